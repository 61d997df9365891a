//! Explicit matrices of linear forms known to resolve Ulrich bundles, plus
//! the coefficient matrix `C` and the map `delta` used to test surjectivity
//! of the top-cohomology map on `P^2`.
//!
//! Matrices are transcribed in their displayed (row-vector) orientation and
//! transposed once here, so every stored matrix follows the column
//! convention of [`crate::poly`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::linalg::RatMatrix;
use crate::numerology::{resolution_ranks, UlrichContext};
use crate::poly::{monomial_basis, LinearMatrix, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GalleryError {
    #[error("banded matrix needs d >= 2, got {0}")]
    BandedDegree(u32),
    #[error("unknown gallery fixture {0:?}; known: p2-banded-d<K> (K >= 2), p3-d2, p2-cubic-r3")]
    UnknownFixture(String),
    #[error("cannot parse linear form {0:?}")]
    Parse(String),
    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    Shape { expected_rows: usize, expected_cols: usize, rows: usize, cols: usize },
    #[error("delta is only defined on P^2 with d >= 2, got n={n}, d={d}")]
    Context { n: usize, d: u32 },
    #[error(transparent)]
    Numerology(#[from] crate::numerology::NumerologyError),
}

/// Parses a linear form such as `x2+x3`, `-x`, `3/2*y - z` or `0`.
pub fn parse_linear_form(s: &str, names: &[&str]) -> Result<Vec<Rational>, GalleryError> {
    let err = || GalleryError::Parse(s.to_string());
    let mut coeffs = vec![Rational::zero(); names.len()];
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "0" {
        return Ok(coeffs);
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > start {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.as_bytes().first() {
            Some(b'-') => (-1, &term[1..]),
            Some(b'+') => (1, &term[1..]),
            _ => (1, term),
        };
        let (coeff, var) = match body.split_once('*') {
            Some((c, v)) => (c.parse::<Rational>().map_err(|_| err())?, v),
            None => (Rational::one(), body),
        };
        let k = names.iter().position(|n| *n == var).ok_or_else(err)?;
        coeffs[k] += coeff * Rational::from(sign);
    }
    Ok(coeffs)
}

/// Builds the stored (column-convention) matrix from a displayed matrix of
/// linear forms, i.e. the transpose of what is written.
pub fn transcribe(display: &[Vec<&str>], names: &[&str]) -> Result<LinearMatrix, GalleryError> {
    let n = names.len() - 1;
    let rows = display.len();
    let cols = display.first().map_or(0, Vec::len);
    let mut parsed = Vec::with_capacity(rows);
    for row in display {
        let r: Result<Vec<_>, _> = row.iter().map(|s| parse_linear_form(s, names)).collect();
        parsed.push(r?);
    }
    Ok(LinearMatrix::from_fn(n, cols, rows, |i, j| parsed[j][i].clone()))
}

fn banded_display(d: u32) -> Vec<Vec<String>> {
    let (rows, cols) = (d as usize - 1, d as usize + 1);
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| match j.checked_sub(i) {
                    Some(0) => "x",
                    Some(1) => "y",
                    Some(2) => "z",
                    _ => "0",
                })
                .map(str::to_string)
                .collect()
        })
        .collect()
}

fn as_strs(display: &[Vec<String>]) -> Vec<Vec<&str>> {
    display.iter().map(|r| r.iter().map(String::as_str).collect()).collect()
}

const XYZ: [&str; 3] = ["x", "y", "z"];
const XYZW: [&str; 4] = ["x", "y", "z", "w"];
const X123: [&str; 3] = ["x1", "x2", "x3"];

/// The banded `(d-1) x (d+1)` matrix with `x, y, z` shifting one column per
/// row, stored as its `(d+1) x (d-1)` transpose. Its cokernel twisted by
/// `d` is a rank-2 Ulrich bundle for `(P^2, O(d))`.
pub fn banded_alpha(d: u32) -> Result<LinearMatrix, GalleryError> {
    if d < 2 {
        return Err(GalleryError::BandedDegree(d));
    }
    transcribe(&as_strs(&banded_display(d)), &XYZ)
}

const P3_ALPHA: [[&str; 4]; 1] = [["x", "y", "z", "w"]];
const P3_BETA: [[&str; 5]; 4] = [
    ["y", "z", "w", "0", "0"],
    ["-x", "0", "0", "z", "w"],
    ["w", "-x", "0", "-y", "0"],
    ["-z", "0", "-x", "0", "-y"],
];

const CUBIC_ALPHA: [[&str; 6]; 3] = [
    ["x1", "x2", "x2+x3", "x2+x3", "x3", "x1+x2"],
    ["x3", "x1+x3", "x2", "x1+x2+x3", "0", "x2"],
    ["x1", "x2+x3", "x1+x2+x3", "x2+x3", "x3", "x3"],
];

fn rows_of<const C: usize>(m: &[[&'static str; C]]) -> Vec<Vec<&'static str>> {
    m.iter().map(|r| r.to_vec()).collect()
}

/// `(D_1, D_2)` for the rank-2 bundle on `(P^3, O(2))`: `D_1` is the stored
/// `5 x 4` transpose of the displayed `beta`, `D_2` the `4 x 1` transpose of
/// `alpha = (x y z w)`.
pub fn p3_pair() -> (LinearMatrix, LinearMatrix) {
    let d1 = transcribe(&rows_of(&P3_BETA), &XYZW).expect("fixture parses");
    let d2 = transcribe(&rows_of(&P3_ALPHA), &XYZW).expect("fixture parses");
    (d1, d2)
}

/// The `6 x 3` stored matrix whose cokernel twisted by 3 is a rank-3 Ulrich
/// bundle for `(P^2, O(3))`.
pub fn p2_cubic_alpha() -> LinearMatrix {
    transcribe(&rows_of(&CUBIC_ALPHA), &X123).expect("fixture parses")
}

/// Coefficient blocks of a `6 x 3` stored matrix on `P^2`:
/// `a[p][i][j]` is the coefficient of `x_p` in displayed entry `(i, j)`;
/// `A_p` holds columns `j < 3`, `B_p` columns `j >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CBlocks {
    pub a: [RatMatrix; 3],
    pub b: [RatMatrix; 3],
}

pub fn extract_blocks(alpha: &LinearMatrix) -> Result<CBlocks, GalleryError> {
    if alpha.shape() != (6, 3) || alpha.n() != 2 {
        return Err(GalleryError::Shape { expected_rows: 6, expected_cols: 3, rows: alpha.rows(), cols: alpha.cols() });
    }
    let block = |p: usize, offset: usize| {
        let mut m = RatMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                // displayed (i, j + offset) is stored (j + offset, i)
                m.set(i, j, alpha.coeffs(j + offset, i)[p].clone());
            }
        }
        m
    };
    Ok(CBlocks { a: [block(0, 0), block(1, 0), block(2, 0)], b: [block(0, 3), block(1, 3), block(2, 3)] })
}

/// The `18 x 18` coefficient matrix of the linear system `f . alpha = 0` in
/// the unknowns `y_{6(p-1)+j} = b^{j,p}`, laid out as
///
/// ```text
/// A1 B1 0  0  0  0
/// 0  0  A2 B2 0  0
/// 0  0  0  0  A3 B3
/// A2 B2 A1 B1 0  0
/// 0  0  A3 B3 A2 B2
/// A3 B3 0  0  A1 B1
/// ```
#[allow(non_snake_case)]
pub fn build_C(blocks: &CBlocks) -> RatMatrix {
    // (block row, block column) -> (is_b, p)
    let layout: [[Option<(bool, usize)>; 6]; 6] = {
        let a = |p| Some((false, p));
        let b = |p| Some((true, p));
        [
            [a(0), b(0), None, None, None, None],
            [None, None, a(1), b(1), None, None],
            [None, None, None, None, a(2), b(2)],
            [a(1), b(1), a(0), b(0), None, None],
            [None, None, a(2), b(2), a(1), b(1)],
            [a(2), b(2), None, None, a(0), b(0)],
        ]
    };
    let mut c = RatMatrix::zeros(18, 18);
    for (br, row) in layout.iter().enumerate() {
        for (bc, cell) in row.iter().enumerate() {
            let Some((is_b, p)) = *cell else { continue };
            let src = if is_b { &blocks.b[p] } else { &blocks.a[p] };
            for i in 0..3 {
                for j in 0..3 {
                    c.set(3 * br + i, 3 * bc + j, src.get(i, j).clone());
                }
            }
        }
    }
    c
}

/// Matrix of `delta: f -> f o alpha` on `P^2`, where `f` is a row of
/// `a_1` forms of degree `d - 2` and `alpha` the stored `a_1 x a_2` first
/// differential. Unknowns are ordered monomial-major (`b^{j,m}` at
/// `m * a_1 + j`), equations likewise (`(M, i)` at `M * a_2 + i`), with
/// monomials in degrevlex order. Built directly from the coefficients
/// `a^p_{i,j}`.
pub fn delta_matrix(alpha: &LinearMatrix, ctx: &UlrichContext) -> Result<RatMatrix, GalleryError> {
    if ctx.n != 2 || alpha.n() != 2 || ctx.d < 2 {
        return Err(GalleryError::Context { n: ctx.n, d: ctx.d });
    }
    let sig = resolution_ranks(ctx)?;
    let (a1, a2) = (sig.rank(1) as usize, sig.rank(2) as usize);
    if alpha.shape() != (a1, a2) {
        return Err(GalleryError::Shape { expected_rows: a1, expected_cols: a2, rows: alpha.rows(), cols: alpha.cols() });
    }
    let src = monomial_basis(2, ctx.d - 2);
    let tgt = monomial_basis(2, ctx.d - 1);
    let tgt_index: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut delta = RatMatrix::zeros(tgt.len() * a2, src.len() * a1);
    for (mi, m) in src.iter().enumerate() {
        for p in 0..3 {
            let big = tgt_index[&m.mul(&Monomial::var(3, p))];
            for i in 0..a2 {
                for j in 0..a1 {
                    let a = &alpha.coeffs(j, i)[p];
                    if !a.is_zero() {
                        delta.add_to(big * a2 + i, mi * a1 + j, a);
                    }
                }
            }
        }
    }
    Ok(delta)
}

/// A named fixture: context, stored differentials and their displayed
/// orientation for human audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub context: UlrichContext,
    pub differentials: Vec<LinearMatrix>,
    /// Displayed (row-vector convention) form of each differential.
    pub display: Vec<Vec<Vec<String>>>,
}

fn display_of(m: &LinearMatrix, names: &[&str]) -> Vec<Vec<String>> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    m.transpose().to_string_with(&names)
}

/// Names of the frozen fixtures shipped with the repository.
pub const FIXTURE_NAMES: [&str; 6] = ["p2-banded-d2", "p2-banded-d3", "p2-banded-d4", "p2-banded-d5", "p3-d2", "p2-cubic-r3"];

pub fn fixture(name: &str) -> Result<Fixture, GalleryError> {
    let unknown = || GalleryError::UnknownFixture(name.to_string());
    let (context, differentials, names): (UlrichContext, Vec<LinearMatrix>, &[&str]) = match name {
        "p3-d2" => {
            let (d1, d2) = p3_pair();
            (UlrichContext::new(3, 2, 2)?, vec![d1, d2], &XYZW)
        }
        "p2-cubic-r3" => (UlrichContext::new(2, 3, 3)?, vec![p2_cubic_alpha()], &X123),
        _ => {
            let d: u32 = name.strip_prefix("p2-banded-d").and_then(|k| k.parse().ok()).ok_or_else(unknown)?;
            if d < 2 || name != format!("p2-banded-d{d}") {
                return Err(unknown());
            }
            (UlrichContext::new(2, d, 2)?, vec![banded_alpha(d)?], &XYZ)
        }
    };
    let display = differentials.iter().map(|m| display_of(m, names)).collect();
    Ok(Fixture { name: name.to_string(), context, differentials, display })
}
