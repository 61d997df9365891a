//! Closed-form cohomology of Ulrich bundles on `P^n` for the Veronese
//! polarization `O(d)`, and of their twists by `Omega^j(j)`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, gen_binomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumerologyError {
    #[error("invalid context n={n}, d={d}, r={r}: all must be at least 1")]
    InvalidContext { n: usize, d: u32, r: u32 },
    #[error("{name}={value} out of range {lo}..={hi}")]
    OutOfRange { name: &'static str, value: i64, lo: i64, hi: i64 },
    #[error(transparent)]
    Integrality(#[from] IntegralityViolation),
}

/// A forced dimension that is negative or not an integer: no Ulrich bundle
/// with these parameters exists.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
#[error("integrality violation: {quantity} = {value} is not a nonnegative integer")]
pub struct IntegralityViolation {
    /// Human-readable name of the offending quantity, e.g. `h^2(E(-7))`.
    pub quantity: String,
    pub value: Rational,
}

/// The triple `(n, d, r)`: ambient dimension, Veronese degree, bundle rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UlrichContext {
    pub n: usize,
    pub d: u32,
    pub r: u32,
}

impl UlrichContext {
    pub fn new(n: usize, d: u32, r: u32) -> Result<Self, NumerologyError> {
        if n == 0 || d == 0 || r == 0 {
            return Err(NumerologyError::InvalidContext { n, d, r });
        }
        Ok(UlrichContext { n, d, r })
    }

    /// `r * d^n`, the rank of `E` pushed down along the Veronese map.
    pub fn degree_factor(&self) -> Rational {
        Rational::from(self.r) * Rational::from(self.d).pow(self.n as u32)
    }
}

/// Cohomology dimensions `h^0 .. h^n` at one twist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyProfile {
    pub twist: i64,
    pub values: Vec<u64>,
}

impl CohomologyProfile {
    pub fn zero(n: usize, twist: i64) -> Self {
        CohomologyProfile { twist, values: vec![0; n + 1] }
    }

    /// The degree carrying the nonzero entry, if any.
    pub fn nonzero_degree(&self) -> Option<usize> {
        self.values.iter().position(|&v| v != 0)
    }
}

/// Ranks `[a_1, ..., a_n]` of the linear resolution of `E(-d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionSignature {
    pub ranks: Vec<u64>,
}

impl ResolutionSignature {
    /// `a_1 - a_2 + ... + (-1)^{n+1} a_n`.
    pub fn alternating_sum(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(k, &a)| if k % 2 == 0 { a as i64 } else { -(a as i64) }).sum()
    }

    /// `c_1(E(-d)) = sum_j (-1)^j j a_j`.
    pub fn first_chern_of_twist(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let j = k as i64 + 1;
                if j % 2 == 0 {
                    j * a as i64
                } else {
                    -j * a as i64
                }
            })
            .sum()
    }

    /// `a_j` for `1 <= j <= n`.
    pub fn rank(&self, j: usize) -> u64 {
        self.ranks[j - 1]
    }

    /// Expected pointwise ranks `rho_j = a_{j+1} - a_{j+2} + ...` of the
    /// differentials `D_j`, for `1 <= j <= n - 1`.
    pub fn pointwise_ranks(&self) -> Vec<u64> {
        let n = self.ranks.len();
        let mut rho = vec![0i64; n.saturating_sub(1)];
        let mut tail = 0i64;
        for j in (1..n).rev() {
            // rho_j = a_{j+1} - rho_{j+1}
            tail = self.ranks[j] as i64 - tail;
            rho[j - 1] = tail;
        }
        rho.into_iter().map(|v| v.max(0) as u64).collect()
    }
}

fn check_range(name: &'static str, value: i64, lo: i64, hi: i64) -> Result<(), NumerologyError> {
    if value < lo || value > hi {
        return Err(NumerologyError::OutOfRange { name, value, lo, hi });
    }
    Ok(())
}

fn to_count(value: BigInt) -> u64 {
    u64::try_from(value).expect("cohomology dimension exceeds u64")
}

/// `h^q(P^n, Omega^p(t))` by Bott's formula.
pub fn bott_dimension(n: usize, p: i64, q: i64, t: i64) -> Result<u64, NumerologyError> {
    let n_i = n as i64;
    check_range("p", p, 0, n_i)?;
    check_range("q", q, 0, n_i)?;
    let value = if q == 0 && t > p {
        binomial(t + n_i - p, t) * binomial(t - 1, p)
    } else if t == 0 && p == q {
        BigInt::from(1)
    } else if q == n_i && t < p - n_i {
        binomial(-t + p, -t) * binomial(-t - 1, n_i - p)
    } else {
        BigInt::from(0)
    };
    Ok(to_count(value))
}

/// `chi(E(p)) = r d^n C(p/d + n, n)`.
pub fn chi_ulrich(ctx: &UlrichContext, p: i64) -> Rational {
    let x = Rational::new(p, ctx.d) + Rational::from(ctx.n);
    ctx.degree_factor() * gen_binomial(&x, ctx.n as u32)
}

/// The unique degree that can be nonzero for `E(t)`, or `None` at the
/// twists `-d, ..., -nd` where everything vanishes.
pub fn ulrich_degree(ctx: &UlrichContext, t: i64) -> Option<usize> {
    let d = ctx.d as i64;
    let n = ctx.n as i64;
    if t > -d {
        return Some(0);
    }
    if t < -n * d {
        return Some(ctx.n);
    }
    (1..ctx.n).find(|&q| -(q as i64 + 1) * d < t && t < -(q as i64) * d)
}

fn natural_profile(
    ctx: &UlrichContext,
    twist: i64,
    degree: Option<usize>,
    chi: Rational,
    label: impl Fn(usize) -> String,
) -> Result<CohomologyProfile, NumerologyError> {
    let mut profile = CohomologyProfile::zero(ctx.n, twist);
    let Some(q) = degree else {
        return Ok(profile);
    };
    let value = if q % 2 == 0 { chi } else { -chi };
    match value.to_integer() {
        Some(v) if v >= BigInt::from(0) => {
            profile.values[q] = to_count(v);
            Ok(profile)
        }
        _ => Err(IntegralityViolation { quantity: label(q), value }.into()),
    }
}

/// Cohomology of `E(t)` for an Ulrich bundle `E`.
pub fn ulrich_profile(ctx: &UlrichContext, t: i64) -> Result<CohomologyProfile, NumerologyError> {
    natural_profile(ctx, t, ulrich_degree(ctx, t), chi_ulrich(ctx, t), |q| format!("h^{q}(E({t}))"))
}

/// `chi(E(i) (x) Omega^j(j)) = r d^n sum_k (-1)^{j-k} C(n+1, k) C((i+j-k)/d + n, n)`.
pub fn chi_omega(ctx: &UlrichContext, i: i64, j: usize) -> Result<Rational, NumerologyError> {
    check_range("j", j as i64, 0, ctx.n as i64)?;
    let n = ctx.n as i64;
    let mut sum = Rational::zero();
    for k in 0..=j as i64 {
        let x = Rational::new(i + j as i64 - k, ctx.d) + Rational::from(n);
        let term = Rational::from(binomial(n + 1, k)) * gen_binomial(&x, ctx.n as u32);
        if (j as i64 - k) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(ctx.degree_factor() * sum)
}

/// The degree that can be nonzero for `E(i) (x) Omega^j(j)`; the ranges
/// `q = 0: i > -d`, `0 < q < n: -(q+1)d < i <= -qd`, `q = n: i <= -nd`
/// partition the integers.
pub fn omega_degree(ctx: &UlrichContext, i: i64) -> usize {
    let d = ctx.d as i64;
    if i > -d {
        return 0;
    }
    (1..ctx.n).find(|&q| -(q as i64 + 1) * d < i && i <= -(q as i64) * d).unwrap_or(ctx.n)
}

/// Cohomology of `E(i) (x) Omega^j(j)`.
pub fn omega_profile(ctx: &UlrichContext, i: i64, j: usize) -> Result<CohomologyProfile, NumerologyError> {
    let chi = chi_omega(ctx, i, j)?;
    let degree = if chi.is_zero() { None } else { Some(omega_degree(ctx, i)) };
    natural_profile(ctx, i, degree, chi, |q| format!("h^{q}(E({i}) x Omega^{j}({j}))"))
}

/// `a_j = -r d^n sum_{k=0}^{j} (-1)^{j-k} C(n+1, k) C((j-k)/d + n - 1, n)`.
pub fn resolution_ranks(ctx: &UlrichContext) -> Result<ResolutionSignature, NumerologyError> {
    let n = ctx.n as i64;
    let mut ranks = Vec::with_capacity(ctx.n);
    for j in 1..=n {
        let mut sum = Rational::zero();
        for k in 0..=j {
            let x = Rational::new(j - k, ctx.d) + Rational::from(n - 1);
            let term = Rational::from(binomial(n + 1, k)) * gen_binomial(&x, ctx.n as u32);
            if (j - k) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let a = -(ctx.degree_factor() * sum);
        match a.to_integer() {
            Some(v) if v >= BigInt::from(0) => ranks.push(to_count(v)),
            _ => return Err(IntegralityViolation { quantity: format!("a_{j}"), value: a }.into()),
        }
    }
    Ok(ResolutionSignature { ranks })
}

/// `(c_1, c_2)` forced on a rank-2 Ulrich bundle.
pub fn rank2_chern(n: usize, d: u32) -> Result<(i64, Rational), NumerologyError> {
    check_range("n", n as i64, 2, i64::MAX)?;
    check_range("d", d as i64, 1, i64::MAX)?;
    let (n, d) = (n as i64, d as i64);
    let c1 = (n + 1) * (d - 1);
    let c2 = Rational::new(c1, 12) * Rational::from((3 * n + 4) * d - (3 * n + 2));
    Ok((c1, c2))
}

/// True when the forced `c_2` is not an integer, so no rank-2 Ulrich bundle
/// exists for `(P^n, O(d))`.
pub fn rank2_obstructed(n: usize, d: u32) -> Result<bool, NumerologyError> {
    Ok(!rank2_chern(n, d)?.1.is_integer())
}

/// The twist `a` with `O(a)` Ulrich for `(P^n, O(d))`, if one exists.
///
/// Tests the defining equations `(n+1)(d-1) = 2a` and `d^n = C(a+n, n)`
/// directly.
pub fn rank1_classify(n: usize, d: u32) -> Option<u64> {
    if n == 0 || d == 0 {
        return None;
    }
    if n == 1 {
        return Some(d as u64 - 1);
    }
    let twice_a = (n as u64 + 1) * (d as u64 - 1);
    if twice_a % 2 != 0 {
        return None;
    }
    let a = twice_a / 2;
    let lhs = BigInt::from(d).pow(n as u32);
    (lhs == binomial(a as i64 + n as i64, n as i64)).then_some(a)
}

/// The region of `(q, i)` where `h^q(E(i))` is forced to vanish once
/// `h^{q0}(E(i0)) != 0` is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForcedZeroRegion {
    pub n: usize,
    pub q0: usize,
    pub i0: i64,
}

impl ForcedZeroRegion {
    pub fn contains(&self, q: usize, i: i64) -> bool {
        if q > self.n {
            return false;
        }
        let (q, q0) = (q as i64, self.q0 as i64);
        (q <= q0 - 1 && q + i <= q0 + self.i0) || (q >= q0 + 1 && q + i >= q0 + self.i0)
    }
}

pub fn forced_zeros(ctx: &UlrichContext, q0: usize, i0: i64) -> Result<ForcedZeroRegion, NumerologyError> {
    check_range("q0", q0 as i64, 0, ctx.n as i64)?;
    Ok(ForcedZeroRegion { n: ctx.n, q0, i0 })
}
