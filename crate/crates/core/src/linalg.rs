//! Dense matrices over the rationals: rank, determinant, products.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;

/// A dense row-major matrix of rationals. Zero-sized shapes are allowed and
/// stand for maps between zero spaces.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        RatMatrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        self.data[i * self.cols + j] += value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    /// Exact rank over the rationals.
    ///
    /// A rank computed modulo a large prime never exceeds the rational rank,
    /// so when it already reaches `min(rows, cols)` the answer is exact and
    /// the rational elimination is skipped.
    pub fn rank(&self) -> usize {
        let full = self.rows.min(self.cols);
        if full == 0 {
            return 0;
        }
        if let Some(r) = self.rank_mod_prime() {
            if r == full {
                return r;
            }
        }
        self.rank_exact()
    }

    /// Rank by Gaussian elimination over the rationals, no shortcuts.
    pub fn rank_exact(&self) -> usize {
        let mut rows: Vec<Vec<Rational>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        eliminate(&mut rows, self.cols).len()
    }

    /// Exact determinant of a square matrix.
    pub fn det(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            let (top, rest) = a.split_at_mut(col + 1);
            let prow = &top[col];
            for row in rest.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot;
                for k in col..n {
                    if !prow[k].is_zero() {
                        let delta = &factor * &prow[k];
                        row[k] -= delta;
                    }
                }
            }
        }
        det
    }

    fn rank_mod_prime(&self) -> Option<usize> {
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for v in self.row(i) {
                row.push(to_mod_prime(v)?);
            }
            rows.push(row);
        }
        Some(modular_rank(&mut rows))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Reduces `rows` to echelon form in place and returns the pivot columns.
fn eliminate(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(p, next);
        let inv = rows[next][col].recip();
        for v in rows[next][col..].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let (top, rest) = rows.split_at_mut(next + 1);
        let prow = &top[next];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for k in col..cols {
                if !prow[k].is_zero() {
                    let delta = &factor * &prow[k];
                    row[k] -= delta;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn big_mod(v: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((v % &p) + &p) % &p;
    r.to_u64().expect("residue fits")
}

fn to_mod_prime(v: &Rational) -> Option<u64> {
    let den = big_mod(v.denom());
    if den == 0 {
        return None;
    }
    Some(mul_mod(big_mod(v.numer()), pow_mod(den, PRIME - 2)))
}

fn modular_rank(rows: &mut [Vec<u64>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(p, next);
        let inv = pow_mod(rows[next][col], PRIME - 2);
        let (top, rest) = rows.split_at_mut(next + 1);
        let prow = &top[next];
        for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let factor = mul_mod(row[col], inv);
            for k in col..cols {
                if prow[k] != 0 {
                    row[k] = (row[k] + PRIME - mul_mod(factor, prow[k])) % PRIME;
                }
            }
        }
        next += 1;
    }
    next
}
