//! Homogeneous polynomials over the rationals, matrices of linear forms and
//! the maps they induce on spaces of global sections.
//!
//! Maps act on column vectors: a map `O(a)^s -> O(b)^r` is an `r x s`
//! matrix. Monomials are ordered graded-reverse-lexicographically with
//! `x_0 > x_1 > ... > x_n`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{choose, Rational};
use crate::linalg::RatMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("cannot compose a {left_rows}x{left_cols} matrix with a {right_rows}x{right_cols} matrix")]
    ShapeMismatch { left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },
    #[error("matrices live over different ambient spaces (P^{0} vs P^{1})")]
    AmbientMismatch(usize, usize),
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("minor size {k} out of range for a {rows}x{cols} matrix")]
    MinorSize { k: usize, rows: usize, cols: usize },
    #[error("malformed linear matrix: {0}")]
    Malformed(String),
}

/// Exponent vector of a monomial in `x_0 .. x_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// The variable index if this is `x_i^k` with `k >= 1`.
    pub fn pure_power_of(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    // smaller exponent in the last differing variable wins
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_monomial(self, &default_names(self.nvars())))
    }
}

pub fn default_names(nvars: usize) -> Vec<String> {
    (0..nvars).map(|i| format!("x{i}")).collect()
}

fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// All monomials of degree `deg` in `n + 1` variables, descending in
/// degrevlex order. Has `C(deg + n, n)` elements.
pub fn monomial_basis(n: usize, deg: u32) -> Vec<Monomial> {
    let nvars = n + 1;
    let mut out = Vec::with_capacity(choose(deg as i64 + n as i64, n as i64) as usize);
    let mut current = vec![0u32; nvars];
    fill_basis(&mut current, 0, deg, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

fn fill_basis(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Monomial(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_basis(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// Dimension of `H^0(P^n, O(deg))`, zero for negative degrees.
pub fn sections_dim(n: usize, deg: i64) -> usize {
    if deg < 0 {
        0
    } else {
        choose(deg + n as i64, n as i64) as usize
    }
}

/// A homogeneous polynomial with rational coefficients. Only nonzero
/// coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl HomPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomPoly { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars, 0);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.nvars(), m.degree());
        p.add_term(m, c);
        p
    }

    /// The linear form `sum_k coeffs[k] * x_k`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let nvars = coeffs.len();
        let mut p = Self::zero(nvars, 1);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(nvars, k), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, degree: u32, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars, degree);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        assert_eq!(m.nvars(), self.nvars, "variable count mismatch");
        assert_eq!(m.degree(), self.degree, "inhomogeneous term");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &HomPoly) -> HomPoly {
        let mut out = self.clone();
        out.add_assign_poly(other);
        out
    }

    pub fn add_assign_poly(&mut self, other: &HomPoly) {
        if other.is_zero() {
            return;
        }
        assert_eq!(self.degree, other.degree, "adding polynomials of different degrees");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &HomPoly) -> HomPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> HomPoly {
        if c.is_zero() {
            return HomPoly::zero(self.nvars, self.degree);
        }
        HomPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = HomPoly::zero(self.nvars, self.degree + other.degree);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// `self -= c * m * g`, in place.
    pub fn sub_scaled_shifted(&mut self, g: &HomPoly, m: &Monomial, c: &Rational) {
        for (k, v) in &g.terms {
            self.add_term(k.mul(m), -(v * c));
        }
    }

    /// Removes and returns the leading term.
    pub fn pop_leading(&mut self) -> Option<(Monomial, Rational)> {
        self.terms.pop_last()
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> HomPoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.clone();
                for (x, &e) in point.iter().zip(m.exponents()) {
                    if e > 0 {
                        v *= x.pow(e);
                    }
                }
                v
            })
            .sum()
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(m, names);
            if m.degree() == 0 {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_names(self.nvars)))
    }
}

impl fmt::Debug for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A matrix of homogeneous polynomials sharing one degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    degree: u32,
    entries: Vec<HomPoly>,
}

impl PolyMatrix {
    pub fn zeros(nvars: usize, degree: u32, rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, nvars, degree, entries: vec![HomPoly::zero(nvars, degree); rows * cols] }
    }

    /// The scalar identity, a matrix of degree-0 constants.
    pub fn identity(nvars: usize, size: usize) -> Self {
        let mut m = Self::zeros(nvars, 0, size, size);
        for i in 0..size {
            m.entries[i * size + i] = HomPoly::constant(nvars, Rational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> &HomPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(HomPoly::is_zero)
    }

    /// Position and value of the first nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &HomPoly)> {
        self.entries
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_zero())
            .map(|(k, p)| (k / self.cols, k % self.cols, p))
    }
}

/// A matrix whose entries are linear forms in `x_0 .. x_n` (or zero).
///
/// Stored as one coefficient vector of length `n + 1` per entry, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    coeffs: Vec<Vec<Rational>>,
}

impl LinearMatrix {
    pub fn zeros(n: usize, rows: usize, cols: usize) -> Self {
        LinearMatrix { n, rows, cols, coeffs: vec![vec![Rational::zero(); n + 1]; rows * cols] }
    }

    /// Builds the matrix from a closure returning the coefficient vector of
    /// entry `(i, j)`.
    pub fn from_fn(n: usize, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Vec<Rational>) -> Self {
        let mut coeffs = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = f(i, j);
                assert_eq!(c.len(), n + 1, "coefficient vector has wrong length");
                coeffs.push(c);
            }
        }
        LinearMatrix { n, rows, cols, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
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

    /// Coefficients of `x_0 .. x_n` in entry `(i, j)`.
    pub fn coeffs(&self, i: usize, j: usize) -> &[Rational] {
        &self.coeffs[i * self.cols + j]
    }

    pub fn coeffs_mut(&mut self, i: usize, j: usize) -> &mut Vec<Rational> {
        &mut self.coeffs[i * self.cols + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> HomPoly {
        HomPoly::linear(self.coeffs(i, j))
    }

    pub fn transpose(&self) -> LinearMatrix {
        LinearMatrix::from_fn(self.n, self.cols, self.rows, |i, j| self.coeffs(j, i).to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Rational::is_zero)
    }

    /// The coefficient matrix of `x_k`.
    pub fn coefficient_matrix(&self, k: usize) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.coeffs(i, j)[k].clone());
            }
        }
        m
    }

    pub fn to_poly_matrix(&self) -> PolyMatrix {
        let nvars = self.n + 1;
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            degree: 1,
            entries: self.coeffs.iter().map(|c| HomPoly::linear(c)).collect(),
        }
    }

    /// The scalar matrix obtained by substituting `point`.
    pub fn evaluate(&self, point: &[Rational]) -> Result<RatMatrix, PolyError> {
        check_point(self.n, point)?;
        let mut m = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v: Rational = self
                    .coeffs(i, j)
                    .iter()
                    .zip(point)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, x)| c * x)
                    .sum();
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn to_string_with(&self, names: &[String]) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.entry(i, j).to_string_with(names)).collect()).collect()
    }
}

fn check_point(n: usize, point: &[Rational]) -> Result<(), PolyError> {
    if point.len() != n + 1 {
        return Err(PolyError::PointLength { expected: n + 1, got: point.len() });
    }
    if point.iter().all(Rational::is_zero) {
        return Err(PolyError::ZeroPoint);
    }
    Ok(())
}

/// Entry-wise product `A * B` of polynomial matrices.
pub fn mat_compose(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
    if a.cols != b.rows {
        return Err(PolyError::ShapeMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    if a.nvars != b.nvars {
        return Err(PolyError::AmbientMismatch(a.nvars - 1, b.nvars - 1));
    }
    let mut out = PolyMatrix::zeros(a.nvars, a.degree + b.degree, a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = HomPoly::zero(a.nvars, a.degree + b.degree);
            for k in 0..a.cols {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if !x.is_zero() && !y.is_zero() {
                    acc.add_assign_poly(&x.mul(y));
                }
            }
            out.entries[i * b.cols + j] = acc;
        }
    }
    Ok(out)
}

/// Composition of two matrices of linear forms.
pub fn compose_linear(a: &LinearMatrix, b: &LinearMatrix) -> Result<PolyMatrix, PolyError> {
    mat_compose(&a.to_poly_matrix(), &b.to_poly_matrix())
}

/// Rank over the rationals of `m` evaluated at a projective point.
pub fn evaluate_rank(m: &LinearMatrix, point: &[Rational]) -> Result<usize, PolyError> {
    Ok(m.evaluate(point)?.rank())
}

/// All nonzero `k x k` minors, ordered lexicographically by row set and
/// then column set.
pub fn minors_ideal(m: &LinearMatrix, k: usize) -> Result<Vec<HomPoly>, PolyError> {
    if k == 0 || k > m.rows.min(m.cols) {
        return Err(PolyError::MinorSize { k, rows: m.rows, cols: m.cols });
    }
    assert!(m.cols <= 64, "too many columns for minor enumeration");
    let nvars = m.n + 1;
    let entries = m.to_poly_matrix();
    let col_sets = combinations(m.cols, k);
    let mut out = Vec::new();
    for row_set in combinations(m.rows, k) {
        // dets[mask] = det of the first |mask| selected rows on columns `mask`
        let mut dets: HashMap<u64, HomPoly> = HashMap::new();
        dets.insert(0, HomPoly::constant(nvars, Rational::one()));
        for size in 1..=k {
            let row = row_set[size - 1];
            for cols in combinations(m.cols, size) {
                let mask: u64 = cols.iter().map(|&c| 1u64 << c).sum();
                let mut acc = HomPoly::zero(nvars, size as u32);
                for (pos, &c) in cols.iter().enumerate() {
                    let a = entries.get(row, c);
                    if a.is_zero() {
                        continue;
                    }
                    let sub = &dets[&(mask & !(1u64 << c))];
                    if sub.is_zero() {
                        continue;
                    }
                    let term = a.mul(sub);
                    if (size - 1 + pos) % 2 == 0 {
                        acc.add_assign_poly(&term);
                    } else {
                        acc.add_assign_poly(&term.neg());
                    }
                }
                dets.insert(mask, acc);
            }
        }
        for cols in &col_sets {
            let mask: u64 = cols.iter().map(|&c| 1u64 << c).sum();
            let det = &dets[&mask];
            if !det.is_zero() {
                out.push(det.clone());
            }
        }
    }
    Ok(out)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Matrix of the map `H^0(O(t))^cols -> H^0(O(t+1))^rows` given by
/// multiplication with `m`, in monomial-basis coordinates. Block `(i, j)`
/// has shape `|basis(t+1)| x |basis(t)|`.
pub fn h0_map(m: &LinearMatrix, src_twist: i64) -> RatMatrix {
    let n = m.n;
    let tgt_dim = sections_dim(n, src_twist + 1);
    let src_dim = sections_dim(n, src_twist);
    let mut out = RatMatrix::zeros(m.rows * tgt_dim, m.cols * src_dim);
    if src_dim == 0 {
        return out;
    }
    let src_basis = monomial_basis(n, src_twist as u32);
    let tgt_basis = monomial_basis(n, src_twist as u32 + 1);
    let tgt_index: HashMap<&Monomial, usize> = tgt_basis.iter().enumerate().map(|(i, mo)| (mo, i)).collect();
    // shifted[u][k] = target index of x_k * src_basis[u]
    let shifted: Vec<Vec<usize>> = src_basis
        .iter()
        .map(|u| (0..=n).map(|k| tgt_index[&u.mul(&Monomial::var(n + 1, k))]).collect())
        .collect();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let c = m.coeffs(i, j);
            for (u, targets) in shifted.iter().enumerate() {
                for (k, &t) in targets.iter().enumerate() {
                    if !c[k].is_zero() {
                        out.add_to(i * tgt_dim + t, j * src_dim + u, &c[k]);
                    }
                }
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct LinearMatrixJson {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<(Rational, Vec<u32>)>>,
}

impl Serialize for LinearMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .coeffs
            .iter()
            .map(|c| {
                // descending degrevlex: x_0 > x_1 > ... > x_n
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(k, v)| (v.clone(), Monomial::var(self.n + 1, k).0))
                    .collect()
            })
            .collect();
        LinearMatrixJson { n: self.n, rows: self.rows, cols: self.cols, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = LinearMatrixJson::deserialize(deserializer)?;
        LinearMatrix::from_json(raw).map_err(D::Error::custom)
    }
}

impl LinearMatrix {
    fn from_json(raw: LinearMatrixJson) -> Result<Self, PolyError> {
        let bad = |msg: String| PolyError::Malformed(msg);
        if raw.entries.len() != raw.rows * raw.cols {
            return Err(bad(format!("{} entries for a {}x{} matrix", raw.entries.len(), raw.rows, raw.cols)));
        }
        let nvars = raw.n + 1;
        let mut coeffs = Vec::with_capacity(raw.entries.len());
        for (idx, terms) in raw.entries.into_iter().enumerate() {
            let mut c = vec![Rational::zero(); nvars];
            for (coeff, exps) in terms {
                if exps.len() != nvars {
                    return Err(bad(format!("entry {idx}: exponent vector of length {}", exps.len())));
                }
                let mono = Monomial(exps);
                match (mono.degree(), mono.pure_power_of()) {
                    (1, Some(k)) => c[k] += coeff,
                    _ => return Err(bad(format!("entry {idx}: term {mono:?} is not linear"))),
                }
            }
            coeffs.push(c);
        }
        Ok(LinearMatrix { n: raw.n, rows: raw.rows, cols: raw.cols, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn lin(n: usize, rows: &[&[&[i64]]]) -> LinearMatrix {
        LinearMatrix::from_fn(n, rows.len(), rows[0].len(), |i, j| rows[i][j].iter().map(|&v| q(v)).collect())
    }

    #[test]
    fn basis_sizes_and_order() {
        assert_eq!(monomial_basis(2, 2).len(), 6);
        assert_eq!(monomial_basis(4, 0), vec![Monomial::one(5)]);
        let b = monomial_basis(1, 3);
        let exps: Vec<Vec<u32>> = b.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        // degrevlex in three variables: x^2 > xy > y^2 > xz > yz > z^2
        let b = monomial_basis(2, 2);
        let exps: Vec<Vec<u32>> = b.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 2]]
        );
        for n in 1..5 {
            for d in 0..6 {
                assert_eq!(monomial_basis(n, d).len(), sections_dim(n, d as i64));
            }
        }
    }

    #[test]
    fn compose_with_identity() {
        let m = lin(2, &[&[&[1, 0, 2], &[0, -1, 0]], &[&[0, 0, 0], &[3, 3, 3]]]);
        let id = PolyMatrix::identity(3, 2);
        let prod = mat_compose(&m.to_poly_matrix(), &id).unwrap();
        assert_eq!(prod, m.to_poly_matrix());
        let err = mat_compose(&m.to_poly_matrix(), &PolyMatrix::identity(3, 3)).unwrap_err();
        assert_eq!(err, PolyError::ShapeMismatch { left_rows: 2, left_cols: 2, right_rows: 3, right_cols: 3 });
    }

    #[test]
    fn evaluation_rank() {
        let z = LinearMatrix::zeros(2, 3, 2);
        assert_eq!(evaluate_rank(&z, &[q(1), q(2), q(3)]).unwrap(), 0);
        assert_eq!(evaluate_rank(&z, &[q(0), q(0), q(0)]), Err(PolyError::ZeroPoint));
        assert!(matches!(evaluate_rank(&z, &[q(1)]), Err(PolyError::PointLength { .. })));
    }

    #[test]
    fn minors_of_a_row_of_variables() {
        let m = lin(2, &[&[&[1, 0, 0]], &[&[0, 1, 0]], &[&[0, 0, 1]]]);
        let minors = minors_ideal(&m, 1).unwrap();
        assert_eq!(minors, vec![HomPoly::var(3, 0), HomPoly::var(3, 1), HomPoly::var(3, 2)]);
        assert!(minors_ideal(&m, 2).is_err());
        assert!(minors_ideal(&m, 0).is_err());
    }

    #[test]
    fn zero_minors_are_omitted() {
        // second row zero: every 2x2 minor through it vanishes
        let m = lin(1, &[&[&[1, 0], &[0, 1]], &[&[0, 0], &[0, 0]], &[&[0, 1], &[1, 0]]]);
        let minors = minors_ideal(&m, 2).unwrap();
        assert_eq!(minors.len(), 1);
        // x0*x0 - x1*x1
        assert_eq!(minors[0].to_string(), "x0^2 - x1^2");
    }

    #[test]
    fn h0_of_single_variable() {
        let m = lin(2, &[&[&[1, 0, 0]]]);
        let h = h0_map(&m, 0);
        assert_eq!(h, RatMatrix::from_i64_rows(&[vec![1], vec![0], vec![0]]));
        let e = h0_map(&m, -3);
        assert_eq!(e.cols(), 0);
        assert_eq!(h0_map(&m, -1).shape(), (1, 0));
    }

    #[test]
    fn json_round_trip() {
        let m = lin(2, &[&[&[1, 0, -2], &[0, 0, 0]]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"rows":1,"cols":2,"entries":[[["1",[1,0,0]],["-2",[0,0,1]]],[]]}"#);
        let back: LinearMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        let bad = r#"{"n":2,"rows":1,"cols":1,"entries":[[["1",[2,0,0]]]]}"#;
        assert!(serde_json::from_str::<LinearMatrix>(bad).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
