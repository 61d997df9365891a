//! Linear resolutions `0 -> O(-n)^{a_n} -> ... -> O(-1)^{a_1} -> E(-d) -> 0`,
//! certification of exactness and local freeness, exact cohomology of the
//! resolved bundle, and the Ulrich verdict with its certificate.
//!
//! Cohomology is read off the twisted resolution: line bundles on `P^n` only
//! have `H^0` and `H^n`, so the hypercohomology spectral sequence has two
//! rows and degenerates. `h^0(E(s))` is the cokernel of the last `H^0` map and
//! `h^q(E(s))`, `q >= 1`, is the homology of the `H^n`-complex at position
//! `n - q`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::Rational;
use crate::groebner;
use crate::linalg::RatMatrix;
use crate::numerology::{resolution_ranks, CohomologyProfile, NumerologyError, ResolutionSignature, UlrichContext};
use crate::poly::{compose_linear, h0_map, minors_ideal, sections_dim, LinearMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error(transparent)]
    Numerology(#[from] NumerologyError),
    #[error("expected {expected} differentials, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("D_{j} should be {}x{}, got {}x{}", expected.0, expected.1, got.0, got.1)]
    Shape { j: usize, expected: (usize, usize), got: (usize, usize) },
    #[error("D_{j} lives on P^{got}, context is P^{expected}")]
    Ambient { j: usize, expected: usize, got: usize },
    #[error("resolution defect at twist {twist}: {complex}-complex has homology of dimension {dimension} at position {position}")]
    Defect { twist: i64, complex: String, position: usize, dimension: i64 },
    #[error("content hash mismatch: stored {stored}, computed {computed}")]
    HashMismatch { stored: String, computed: String },
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

/// Differentials `D_1 .. D_{n-1}` of a linear resolution. `D_j` is stored
/// `a_j x a_{j+1}` and maps `O(-j-1)^{a_{j+1}} -> O(-j)^{a_j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearResolution {
    ctx: UlrichContext,
    differentials: Vec<LinearMatrix>,
    signature: ResolutionSignature,
}

impl LinearResolution {
    pub fn new(ctx: UlrichContext, differentials: Vec<LinearMatrix>) -> Result<Self, ResolutionError> {
        let signature = resolution_ranks(&ctx)?;
        let n = ctx.n;
        if differentials.len() != n - 1 {
            return Err(ResolutionError::WrongCount { expected: n - 1, got: differentials.len() });
        }
        for (k, m) in differentials.iter().enumerate() {
            let j = k + 1;
            if m.n() != n {
                return Err(ResolutionError::Ambient { j, expected: n, got: m.n() });
            }
            let expected = (signature.rank(j) as usize, signature.rank(j + 1) as usize);
            if m.shape() != expected {
                return Err(ResolutionError::Shape { j, expected, got: m.shape() });
            }
        }
        Ok(LinearResolution { ctx, differentials, signature })
    }

    pub fn ctx(&self) -> &UlrichContext {
        &self.ctx
    }

    pub fn differentials(&self) -> &[LinearMatrix] {
        &self.differentials
    }

    /// `D_j` for `1 <= j <= n - 1`.
    pub fn differential(&self, j: usize) -> &LinearMatrix {
        &self.differentials[j - 1]
    }

    pub fn signature(&self) -> &ResolutionSignature {
        &self.signature
    }

    fn a(&self, j: usize) -> i64 {
        self.signature.rank(j) as i64
    }
}

#[derive(Serialize, Deserialize)]
struct ResolutionJson {
    context: UlrichContext,
    differentials: Vec<LinearMatrix>,
}

impl Serialize for LinearResolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ResolutionJson { context: self.ctx, differentials: self.differentials.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearResolution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ResolutionJson::deserialize(deserializer)?;
        LinearResolution::new(raw.context, raw.differentials).map_err(serde::de::Error::custom)
    }
}

/// First nonzero entry of a composition `D_j D_{j+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionFailure {
    pub j: usize,
    pub row: usize,
    pub col: usize,
    pub entry: String,
}

/// Checks `D_j D_{j+1} = 0` for every `j`.
pub fn validate_complex(res: &LinearResolution) -> Result<(), CompositionFailure> {
    for j in 1..res.differentials.len() {
        let prod = compose_linear(res.differential(j), res.differential(j + 1)).expect("shapes validated");
        if let Some((row, col, entry)) = prod.first_nonzero() {
            return Err(CompositionFailure { j, row, col, entry: entry.to_string() });
        }
    }
    Ok(())
}

/// Outcome of the constant-rank check for one differential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionReport {
    pub j: usize,
    pub expected_rank: u64,
    pub screened_points: usize,
    /// A point where the rank drops below `expected_rank`.
    pub witness: Option<Vec<Rational>>,
    pub witness_rank: Option<usize>,
    pub minors: usize,
    pub basis_size: usize,
    /// Variable without a pure-power leading term when the minors have a
    /// common zero.
    pub missing_variable: Option<usize>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub ok: bool,
    pub positions: Vec<PositionReport>,
}

impl ExactnessReport {
    /// Rank of `D_1` is constant, so the cokernel is locally free.
    pub fn locally_free(&self) -> bool {
        self.positions.first().is_none_or(|p| p.ok)
    }
}

/// Number of seeded random points tried before the minors computation.
pub const DEFAULT_SAMPLES: usize = 16;

/// Coordinate points, then nonzero `{-1, 0, 1}` points (for `n <= 3`).
pub fn structured_points(n: usize) -> Vec<Vec<Rational>> {
    let nv = n + 1;
    let mut pts: Vec<Vec<Rational>> =
        (0..nv).rev().map(|k| (0..nv).map(|i| Rational::from(u32::from(i == k))).collect()).collect();
    if n <= 3 {
        let total = 3usize.pow(nv as u32);
        for code in 0..total {
            let mut c = code;
            let p: Vec<i64> = (0..nv)
                .map(|_| {
                    let v = (c % 3) as i64 - 1;
                    c /= 3;
                    v
                })
                .collect();
            if p.iter().filter(|&&v| v != 0).count() >= 2 {
                pts.push(p.into_iter().map(Rational::from).collect());
            }
        }
    }
    pts
}

/// `count` seeded points with coordinates in `-7..=7`, never all zero.
pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let p: Vec<i64> = (0..=n).map(|_| rng.gen_range(-7..=7)).collect();
            if p.iter().any(|&v| v != 0) {
                break p.into_iter().map(Rational::from).collect();
            }
        })
        .collect()
}

/// First point at which some `D_j` has rank below `rho_j`, as
/// `(j, point, rank)`.
pub fn screen_points(res: &LinearResolution, points: &[Vec<Rational>]) -> Option<(usize, Vec<Rational>, usize)> {
    let rho = res.signature.pointwise_ranks();
    for p in points {
        for (k, m) in res.differentials.iter().enumerate() {
            let rank = m.evaluate(p).expect("point length").rank();
            if (rank as u64) < rho[k] {
                return Some((k + 1, p.clone(), rank));
            }
        }
    }
    None
}

/// Certifies that each `D_j` has rank exactly `rho_j` at every point of
/// `P^n` over the algebraic closure.
///
/// The lower bound is the emptiness of the zero locus of the
/// `rho_j`-minors. The upper bound is automatic for a complex:
/// `rank D_j(p) <= a_{j+1} - rank D_{j+1}(p) <= a_{j+1} - rho_{j+1} = rho_j`.
/// With both, every fiber complex is exact, hence so is the sheaf complex,
/// and the cokernel of `D_1` is locally free of rank `a_1 - rho_1 = r`.
pub fn pointwise_exactness(res: &LinearResolution, seed: u64, samples: usize) -> ExactnessReport {
    let n = res.ctx.n;
    let rho = res.signature.pointwise_ranks();
    let mut points = structured_points(n);
    points.extend(random_points(n, samples, seed));
    let positions: Vec<PositionReport> = res
        .differentials
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let j = k + 1;
            let mut report = PositionReport {
                j,
                expected_rank: rho[k],
                screened_points: points.len(),
                witness: None,
                witness_rank: None,
                minors: 0,
                basis_size: 0,
                missing_variable: None,
                ok: true,
            };
            if rho[k] == 0 {
                return report;
            }
            for p in &points {
                let rank = m.evaluate(p).expect("point length").rank();
                if (rank as u64) < rho[k] {
                    report.witness = Some(p.clone());
                    report.witness_rank = Some(rank);
                    report.ok = false;
                    return report;
                }
            }
            let minors = minors_ideal(m, rho[k] as usize).expect("rank within shape");
            report.minors = minors.len();
            let verdict = groebner::emptiness(&minors);
            report.basis_size = verdict.basis_size;
            report.missing_variable = verdict.missing_variable;
            report.ok = verdict.empty;
            report
        })
        .collect();
    ExactnessReport { ok: positions.iter().all(|p| p.ok), positions }
}

/// Matrix of `H^n(O(s)^cols) -> H^n(O(s+1)^rows)` induced by `m`, where `s`
/// is `src_twist`. Computed as the transpose of multiplication by `m^T` on
/// the Serre-dual spaces `H^0(O(-s-n-2))^rows -> H^0(O(-s-n-1))^cols`, using
/// the coefficient-extraction pairing in monomial bases. Empty when both
/// top-cohomology groups vanish.
pub fn serre_dual_map(m: &LinearMatrix, src_twist: i64) -> RatMatrix {
    let n = m.n() as i64;
    h0_map(&m.transpose(), -src_twist - n - 2).transpose()
}

/// `H^n(D_j(t))`, i.e. the map on top cohomology of `D_j` twisted by `t`,
/// whose source is `H^n(O(t-j-1))^{a_{j+1}}`.
pub fn twisted_top_map(res: &LinearResolution, j: usize, t: i64) -> RatMatrix {
    serre_dual_map(res.differential(j), t - j as i64 - 1)
}

fn h0_dim(n: usize, k: i64) -> i64 {
    sections_dim(n, k) as i64
}

fn hn_dim(n: usize, k: i64) -> i64 {
    sections_dim(n, -k - n as i64 - 1) as i64
}

/// Exact `h^q(E(s))` for `s` in `s_min..=s_max`, keyed by the twist `s` of
/// `E` (the resolution is twisted by `s + d`). Requires a certified exact
/// resolution; nonzero homology where exactness forbids it is reported as a
/// defect.
pub fn cohomology_table(res: &LinearResolution, s_min: i64, s_max: i64) -> Result<Vec<CohomologyProfile>, ResolutionError> {
    if s_min > s_max {
        return Ok(Vec::new());
    }
    let n = res.ctx.n;
    let d = res.ctx.d as i64;
    // every rank needed is of D_j with source twist u - j - 1, u = s + d
    let keys: Vec<(usize, i64)> =
        (1..n).flat_map(|j| (s_min..=s_max).map(move |s| (j, s + d - j as i64 - 1))).collect();
    let ranks: Vec<(usize, usize)> = keys
        .par_iter()
        .map(|&(j, k)| {
            let m = res.differential(j);
            (h0_map(m, k).rank(), serre_dual_map(m, k).rank())
        })
        .collect();
    let mut r0: HashMap<(usize, i64), i64> = HashMap::new();
    let mut rn: HashMap<(usize, i64), i64> = HashMap::new();
    for (key, (a, b)) in keys.into_iter().zip(ranks) {
        r0.insert(key, a as i64);
        rn.insert(key, b as i64);
    }
    let rank0 = |j: usize, k: i64| if (1..n).contains(&j) { r0[&(j, k)] } else { 0 };
    let rankn = |j: usize, k: i64| if (1..n).contains(&j) { rn[&(j, k)] } else { 0 };

    let mut table = Vec::new();
    for s in s_min..=s_max {
        let u = s + d;
        let mut values = vec![0u64; n + 1];
        values[0] = (res.a(1) * h0_dim(n, u - 1) - rank0(1, u - 2)) as u64;
        for j in 2..=n {
            let j_i = j as i64;
            let dim = res.a(j) * h0_dim(n, u - j_i) - rank0(j - 1, u - j_i) - rank0(j, u - j_i - 1);
            if dim != 0 {
                return Err(ResolutionError::Defect { twist: s, complex: "H^0".into(), position: j - 1, dimension: dim });
            }
        }
        for (q, value) in values.iter_mut().enumerate().skip(1) {
            let j = n - q + 1;
            let j_i = j as i64;
            let dim = res.a(j) * hn_dim(n, u - j_i) - rankn(j - 1, u - j_i) - rankn(j, u - j_i - 1);
            if dim < 0 {
                return Err(ResolutionError::Defect { twist: s, complex: format!("H^{n}"), position: j - 1, dimension: dim });
            }
            *value = dim as u64;
        }
        table.push(CohomologyProfile { twist: s, values });
    }
    Ok(table)
}

/// Options for [`ulrich_verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Seed of the random pre-screening points.
    pub seed: u64,
    pub samples: usize,
    /// Check every `p` in `1..=n` even for rank-2 bundles.
    pub full_definition: bool,
}

/// Pre-screening seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: DEFAULT_SEED, samples: DEFAULT_SAMPLES, full_definition: false }
    }
}

/// Vanishing required at one twist `-pd`: `h^q = 0` for `q <= max_degree`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingCheck {
    pub p: u32,
    pub twist: i64,
    pub max_degree: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CohomologyFailure {
    Nonvanishing { q: usize, twist: i64, value: u64 },
    Defect { message: String },
}

/// One top-cohomology map from the `n <= 3` criteria.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualMapCheck {
    pub label: String,
    pub differential: usize,
    pub src_twist: i64,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// `injective`, `surjective` or `bijective`.
    pub required: String,
    pub ok: bool,
}

/// The iff-criterion for `P^2` and `P^3`, evaluated alongside the
/// definitional check; both must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub maps: Vec<DualMapCheck>,
    pub ok: bool,
    pub agrees_with_definition: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub complex_ok: bool,
    pub complex_failure: Option<CompositionFailure>,
    pub exactness_ok: bool,
    pub exactness: Vec<PositionReport>,
    pub local_freeness_ok: bool,
    pub cohomology_ok: bool,
    pub cohomology_failure: Option<CohomologyFailure>,
    pub vanishing: Vec<VanishingCheck>,
    pub first_chern: i64,
    pub full_definition_requested: bool,
    pub rank2_reduction: bool,
    pub criterion: Option<CriterionReport>,
    pub signature: Vec<u64>,
    pub expected_ranks: Vec<u64>,
    pub verdict: bool,
}

/// The stage at which verification stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Complex,
    Exactness,
    Cohomology,
    Criterion,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Complex => "complex",
            Stage::Exactness => "exactness",
            Stage::Cohomology => "cohomology",
            Stage::Criterion => "criterion",
        })
    }
}

impl VerificationReport {
    /// The first failed stage, if any.
    pub fn failed_stage(&self) -> Option<Stage> {
        if !self.complex_ok {
            Some(Stage::Complex)
        } else if !self.exactness_ok || !self.local_freeness_ok {
            Some(Stage::Exactness)
        } else if !self.cohomology_ok {
            Some(Stage::Cohomology)
        } else if self.criterion.as_ref().is_some_and(|c| !c.agrees_with_definition) {
            Some(Stage::Criterion)
        } else {
            None
        }
    }

    /// Human-readable witness for the failed stage.
    pub fn witness(&self) -> Option<String> {
        match self.failed_stage()? {
            Stage::Complex => self
                .complex_failure
                .as_ref()
                .map(|f| format!("D_{} D_{} has entry ({}, {}) = {}", f.j, f.j + 1, f.row, f.col, f.entry)),
            Stage::Exactness => self.exactness.iter().find(|p| !p.ok).map(|p| match (&p.witness, p.witness_rank) {
                (Some(pt), Some(rank)) => {
                    let coords: Vec<String> = pt.iter().map(ToString::to_string).collect();
                    format!("D_{} has rank {} < {} at ({})", p.j, rank, p.expected_rank, coords.join(":"))
                }
                _ => format!(
                    "the {}-minors of D_{} have a common zero (no pure power of x{} in the Groebner basis)",
                    p.expected_rank,
                    p.j,
                    p.missing_variable.unwrap_or(0)
                ),
            }),
            Stage::Cohomology => self.cohomology_failure.as_ref().map(|f| match f {
                CohomologyFailure::Nonvanishing { q, twist, value } => format!("h^{q}(E({twist})) = {value}"),
                CohomologyFailure::Defect { message } => message.clone(),
            }),
            Stage::Criterion => Some("top-cohomology criterion disagrees with the definition".to_string()),
        }
    }
}

/// Twists `-pd` to check and the highest degree required at each.
fn vanishing_plan(ctx: &UlrichContext, reduced: bool) -> Vec<(u32, usize)> {
    let n = ctx.n;
    if !reduced {
        return (1..=n as u32).map(|p| (p, n)).collect();
    }
    let m = n / 2;
    let mut plan: Vec<(u32, usize)> = (1..=m as u32).map(|p| (p, n)).collect();
    if n % 2 == 1 {
        plan.push((m as u32 + 1, m));
    }
    plan
}

fn criterion_maps(res: &LinearResolution) -> Vec<DualMapCheck> {
    let ctx = res.ctx;
    let d = ctx.d as i64;
    let check = |label: String, j: usize, t: i64, required: &str| {
        let m = twisted_top_map(res, j, t);
        let rank = m.rank();
        let ok = match required {
            "injective" => rank == m.cols(),
            "surjective" => rank == m.rows(),
            _ => rank == m.cols() && rank == m.rows(),
        };
        DualMapCheck {
            label,
            differential: j,
            src_twist: t - j as i64 - 1,
            rows: m.rows(),
            cols: m.cols(),
            rank,
            required: required.to_string(),
            ok,
        }
    };
    match ctx.n {
        2 => vec![check("H^2(alpha(-d))".into(), 1, -d, "bijective")],
        3 if ctx.r == 2 => vec![check("H^3(alpha(-d))".into(), 2, -d, "injective")],
        3 => (1..=2)
            .flat_map(|i| {
                [
                    check(format!("H^3(alpha(-{i}d))"), 2, -i * d, "injective"),
                    check(format!("H^3(beta(-{i}d))"), 1, -i * d, "surjective"),
                ]
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Runs every stage and collects the results. Later stages are skipped
/// (and reported as failed) once an earlier one fails.
pub fn verify(res: &LinearResolution, opts: &VerifyOptions) -> VerificationReport {
    let ctx = res.ctx;
    let sig = &res.signature;
    let first_chern = sig.first_chern_of_twist() + ctx.r as i64 * ctx.d as i64;
    let mut report = VerificationReport {
        complex_ok: false,
        complex_failure: None,
        exactness_ok: false,
        exactness: Vec::new(),
        local_freeness_ok: false,
        cohomology_ok: false,
        cohomology_failure: None,
        vanishing: Vec::new(),
        first_chern,
        full_definition_requested: opts.full_definition,
        rank2_reduction: false,
        criterion: None,
        signature: sig.ranks.clone(),
        expected_ranks: sig.pointwise_ranks(),
        verdict: false,
    };
    if let Err(f) = validate_complex(res) {
        report.complex_failure = Some(f);
        return report;
    }
    report.complex_ok = true;

    let exact = pointwise_exactness(res, opts.seed, opts.samples);
    report.local_freeness_ok = exact.locally_free();
    report.exactness_ok = exact.ok;
    report.exactness = exact.positions;
    if !report.exactness_ok {
        return report;
    }

    let n = ctx.n;
    let d = ctx.d as i64;
    report.rank2_reduction =
        ctx.r == 2 && !opts.full_definition && first_chern == (n as i64 + 1) * (ctx.d as i64 - 1);
    report.cohomology_ok = true;
    for (p, max_degree) in vanishing_plan(&ctx, report.rank2_reduction) {
        let twist = -(p as i64) * d;
        let values = match cohomology_table(res, twist, twist) {
            Ok(mut t) => t.remove(0).values,
            Err(e) => {
                report.cohomology_ok = false;
                report.cohomology_failure = Some(CohomologyFailure::Defect { message: e.to_string() });
                break;
            }
        };
        if let Some(q) = (0..=max_degree).find(|&q| values[q] != 0) {
            if report.cohomology_ok {
                report.cohomology_ok = false;
                report.cohomology_failure = Some(CohomologyFailure::Nonvanishing { q, twist, value: values[q] });
            }
        }
        report.vanishing.push(VanishingCheck { p, twist, max_degree, values });
    }

    if n == 2 || n == 3 {
        let maps = criterion_maps(res);
        if n == 2 {
            // source and target of the Cor-style map have equal dimension,
            // so injective and surjective coincide
            for m in &maps {
                assert_eq!(m.rows, m.cols, "square top-cohomology map on P^2");
            }
        }
        let ok = maps.iter().all(|m| m.ok);
        let defect = matches!(report.cohomology_failure, Some(CohomologyFailure::Defect { .. }));
        let agrees = defect || ok == report.cohomology_ok;
        report.criterion = Some(CriterionReport { maps, ok, agrees_with_definition: agrees });
    }
    report.verdict = report.failed_stage().is_none();
    report
}

/// Free-form metadata attached to a certificate. Not covered by the content
/// hash.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub source: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_index: Option<String>,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl Provenance {
    pub fn new(source: impl Into<String>, seed: u64) -> Self {
        let timestamp =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Provenance {
            tool: "ulrich".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            source: source.into(),
            seed,
            pool: None,
            candidate_index: None,
            timestamp,
            extra: BTreeMap::new(),
        }
    }
}

/// A positive verdict together with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UlrichCertificate {
    pub resolution: LinearResolution,
    pub report: VerificationReport,
    pub provenance: Provenance,
    pub content_hash: String,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    context: UlrichContext,
    differentials: Vec<LinearMatrix>,
    report: VerificationReport,
    provenance: Provenance,
    content_hash: String,
}

fn sha256_canonical(value: &serde_json::Value) -> String {
    // serde_json maps are ordered by key, so this rendering is canonical
    let text = serde_json::to_string(value).expect("serializable");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Hash of `{context, differentials, report}` in canonical JSON.
pub fn content_hash(res: &LinearResolution, report: &VerificationReport) -> String {
    let value = serde_json::json!({
        "context": res.ctx,
        "differentials": res.differentials,
        "report": report,
    });
    sha256_canonical(&value)
}

/// Hash of `{context, differentials}` only, used to suppress duplicates.
pub fn differentials_hash(res: &LinearResolution) -> String {
    sha256_canonical(&serde_json::to_value(res).expect("serializable"))
}

impl UlrichCertificate {
    pub fn to_json(&self) -> String {
        let raw = CertificateJson {
            context: self.resolution.ctx,
            differentials: self.resolution.differentials.clone(),
            report: self.report.clone(),
            provenance: self.provenance.clone(),
            content_hash: self.content_hash.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    /// Parses a certificate and checks its stored hash against its content.
    pub fn from_json(text: &str) -> Result<Self, ResolutionError> {
        let raw: CertificateJson = serde_json::from_str(text).map_err(|e| ResolutionError::Malformed(e.to_string()))?;
        let resolution = LinearResolution::new(raw.context, raw.differentials)?;
        let computed = content_hash(&resolution, &raw.report);
        if computed != raw.content_hash {
            return Err(ResolutionError::HashMismatch { stored: raw.content_hash, computed });
        }
        Ok(UlrichCertificate { resolution, report: raw.report, provenance: raw.provenance, content_hash: computed })
    }

    /// Re-runs verification from the certificate's own data.
    pub fn reverify(&self) -> Result<UlrichCertificate, VerificationFailure> {
        let opts = VerifyOptions {
            seed: self.provenance.seed,
            samples: DEFAULT_SAMPLES,
            full_definition: self.report.full_definition_requested,
        };
        let mut cert = ulrich_verdict(&self.resolution, &opts)?;
        cert.provenance = self.provenance.clone();
        Ok(cert)
    }
}

/// A negative verdict: the failed stage and the full report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not certified: {stage} check failed{}", .report.witness().map(|w| format!(": {w}")).unwrap_or_default())]
pub struct VerificationFailure {
    pub stage: Stage,
    pub report: VerificationReport,
}

/// Full pipeline: complex, constant ranks, then the defining vanishing
/// `h^q(E(-pd)) = 0`. For rank 2 with the expected `c_1`, only
/// `p <= n/2` (and `q <= n/2` at `p = n/2 + 1` for odd `n`) are needed;
/// the report records when this reduction was used.
pub fn ulrich_verdict(res: &LinearResolution, opts: &VerifyOptions) -> Result<UlrichCertificate, VerificationFailure> {
    let report = verify(res, opts);
    if let Some(stage) = report.failed_stage() {
        return Err(VerificationFailure { stage, report });
    }
    let content_hash = content_hash(res, &report);
    Ok(UlrichCertificate {
        resolution: res.clone(),
        report,
        provenance: Provenance::new("verify", opts.seed),
        content_hash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{banded_alpha, p2_cubic_alpha, p3_pair};
    use crate::numerology::ulrich_profile;

    fn ctx(n: usize, d: u32, r: u32) -> UlrichContext {
        UlrichContext::new(n, d, r).unwrap()
    }

    fn p3() -> LinearResolution {
        let (d1, d2) = p3_pair();
        LinearResolution::new(ctx(3, 2, 2), vec![d1, d2]).unwrap()
    }

    #[test]
    fn shapes_are_validated() {
        let err = LinearResolution::new(ctx(2, 3, 2), vec![banded_alpha(4).unwrap()]).unwrap_err();
        assert_eq!(err, ResolutionError::Shape { j: 1, expected: (4, 2), got: (5, 3) });
        assert!(matches!(LinearResolution::new(ctx(2, 2, 1), vec![]), Err(ResolutionError::Numerology(_))));
        assert!(matches!(LinearResolution::new(ctx(3, 2, 2), vec![]), Err(ResolutionError::WrongCount { .. })));
        assert!(LinearResolution::new(ctx(1, 4, 3), vec![]).is_ok());
    }

    #[test]
    fn complex_checks() {
        assert!(validate_complex(&p3()).is_ok());
        let single = LinearResolution::new(ctx(2, 3, 2), vec![banded_alpha(3).unwrap()]).unwrap();
        assert!(validate_complex(&single).is_ok());
        let (d1, mut d2) = p3_pair();
        d2.coeffs_mut(2, 0)[2] = Rational::from(-1);
        let bad = LinearResolution::new(ctx(3, 2, 2), vec![d1, d2]).unwrap();
        let f = validate_complex(&bad).unwrap_err();
        assert_eq!((f.j, f.row, f.col, f.entry.as_str()), (1, 0, 0, "-2*x2*x3"));
    }

    #[test]
    fn exactness_of_fixtures() {
        let b3 = LinearResolution::new(ctx(2, 3, 2), vec![banded_alpha(3).unwrap()]).unwrap();
        let rep = pointwise_exactness(&b3, 1, 4);
        assert!(rep.ok);
        assert_eq!(rep.positions[0].expected_rank, 2);
        let rep = pointwise_exactness(&p3(), 1, 4);
        assert!(rep.ok);
        let rho: Vec<u64> = rep.positions.iter().map(|p| p.expected_rank).collect();
        assert_eq!(rho, [3, 1]);
    }

    #[test]
    fn zeroed_column_has_witness() {
        let mut alpha = banded_alpha(3).unwrap();
        for i in 0..alpha.cols() {
            *alpha.coeffs_mut(3, i) = vec![Rational::zero(); 3];
        }
        let res = LinearResolution::new(ctx(2, 3, 2), vec![alpha.clone()]).unwrap();
        let rep = pointwise_exactness(&res, 1, 4);
        assert!(!rep.ok);
        let pos = &rep.positions[0];
        let w = pos.witness.clone().unwrap();
        assert_eq!(w, vec![Rational::zero(), Rational::zero(), Rational::one()]);
        assert!(alpha.evaluate(&w).unwrap().rank() < 2);
    }

    #[test]
    fn serre_dual_examples() {
        // (x y z) as the 3x1 first differential, source O(-2) twisted by -2
        let m = serre_dual_map(&banded_alpha(2).unwrap(), -4);
        assert_eq!(m.shape(), (3, 3));
        assert_eq!(m.rank(), 3);
        assert_eq!(serre_dual_map(&banded_alpha(2).unwrap(), 1).shape(), (0, 0));
        let cubic = LinearResolution::new(ctx(2, 3, 3), vec![p2_cubic_alpha()]).unwrap();
        let m = twisted_top_map(&cubic, 1, -3);
        assert_eq!(m.shape(), (18, 18));
        assert_eq!(m.rank(), 18);
    }

    #[test]
    fn p3_cohomology() {
        let res = p3();
        let table = cohomology_table(&res, -8, 2).unwrap();
        for row in &table {
            assert_eq!(row, &ulrich_profile(res.ctx(), row.twist).unwrap(), "twist {}", row.twist);
        }
        let e0 = table.iter().find(|r| r.twist == 0).unwrap();
        assert_eq!(e0.values, [16, 0, 0, 0]);
        for t in [-2, -4, -6] {
            assert!(table.iter().find(|r| r.twist == t).unwrap().values.iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn banded_h0() {
        for d in 2..=4u32 {
            let res = LinearResolution::new(ctx(2, d, 2), vec![banded_alpha(d).unwrap()]).unwrap();
            let t = cohomology_table(&res, 0, 0).unwrap();
            assert_eq!(t[0].values[0], 2 * (d as u64).pow(2));
        }
    }

    #[test]
    fn verdicts() {
        let cert = ulrich_verdict(&p3(), &VerifyOptions::default()).unwrap();
        assert!(cert.report.rank2_reduction);
        assert_eq!(cert.report.vanishing.len(), 2);
        let criterion = cert.report.criterion.as_ref().unwrap();
        assert!(criterion.ok && criterion.agrees_with_definition);
        let full = ulrich_verdict(&p3(), &VerifyOptions { full_definition: true, ..Default::default() }).unwrap();
        assert!(!full.report.rank2_reduction);
        assert_eq!(full.report.vanishing.len(), 3);
        assert_ne!(cert.content_hash, full.content_hash);

        let cubic = LinearResolution::new(ctx(2, 3, 3), vec![p2_cubic_alpha()]).unwrap();
        let cert = ulrich_verdict(&cubic, &VerifyOptions::default()).unwrap();
        assert!(!cert.report.rank2_reduction);

        let zero = LinearResolution::new(ctx(2, 3, 3), vec![LinearMatrix::zeros(2, 6, 3)]).unwrap();
        let fail = ulrich_verdict(&zero, &VerifyOptions::default()).unwrap_err();
        assert_eq!(fail.stage, Stage::Exactness);
        assert!(fail.to_string().contains("rank 0 < 3"));
    }

    #[test]
    fn rank_one_on_the_line() {
        let res = LinearResolution::new(ctx(1, 5, 2), vec![]).unwrap();
        let cert = ulrich_verdict(&res, &VerifyOptions::default()).unwrap();
        assert!(cert.report.verdict);
        let t = cohomology_table(&res, -6, 0).unwrap();
        for row in &t {
            assert_eq!(row, &ulrich_profile(res.ctx(), row.twist).unwrap());
        }
    }

    #[test]
    fn certificate_round_trip() {
        let cert = ulrich_verdict(&p3(), &VerifyOptions::default()).unwrap();
        let text = cert.to_json();
        let back = UlrichCertificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.reverify().unwrap().content_hash, cert.content_hash);
        let tampered = text.replacen("\"verdict\": true", "\"verdict\": false", 1);
        assert!(matches!(UlrichCertificate::from_json(&tampered), Err(ResolutionError::HashMismatch { .. })));
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["content_hash", "context", "differentials", "provenance", "report"]);
    }
}
