//! Seeded random and exhaustive search over matrices of linear forms with
//! coefficients from a small pool, keeping the candidates that certify.
//!
//! Candidate `k` depends only on `(seed, k)` (random mode) or on
//! `start + k` (exhaustive mode), so results do not depend on the number of
//! worker threads.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::numerology::{resolution_ranks, NumerologyError, UlrichContext};
use crate::poly::LinearMatrix;
use crate::resolution::{
    differentials_hash, screen_points, twisted_top_map, ulrich_verdict, validate_complex, LinearResolution, Stage,
    UlrichCertificate, VerifyOptions, DEFAULT_SAMPLES,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("search supports n = 2 or n = 3 only (the range of the top-cohomology criteria), got n = {0}")]
    UnsupportedDimension(usize),
    #[error("coefficient pool is empty")]
    EmptyPool,
    #[error("coefficient pool has repeated values")]
    RepeatedPool,
    #[error(transparent)]
    Numerology(#[from] NumerologyError),
    #[error("start index {0} is outside the candidate space")]
    StartOutOfRange(BigUint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Random,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub ctx: UlrichContext,
    pub pool: Vec<Rational>,
    pub budget: u64,
    pub seed: u64,
    pub mode: SearchMode,
    /// First index enumerated in exhaustive mode.
    pub start: BigUint,
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(ctx: UlrichContext, pool: Vec<Rational>, budget: u64, seed: u64, mode: SearchMode) -> Self {
        SearchConfig { ctx, pool, budget, seed, mode, start: BigUint::zero(), jobs: 1 }
    }
}

/// Per-stage counts for one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCounts {
    pub generated: u64,
    pub rejected_complex: u64,
    pub rejected_point_rank: u64,
    pub rejected_dual_map: u64,
    pub rejected_verdict: u64,
    pub duplicates: u64,
    pub certified: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchManifest {
    pub context: UlrichContext,
    pub pool: Vec<Rational>,
    pub budget: u64,
    pub seed: u64,
    pub mode: SearchMode,
    pub start: String,
    pub jobs: usize,
    pub counts: SearchCounts,
    pub wall_time_ms: u128,
    pub content_hashes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub certificates: Vec<UlrichCertificate>,
    pub manifest: SearchManifest,
}

/// Why a candidate was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    Complex,
    PointRank,
    DualMap,
    Verdict(Stage),
}

/// Shapes `(rows, cols)` of `D_1 .. D_{n-1}` for the context.
pub fn candidate_shapes(ctx: &UlrichContext) -> Result<Vec<(usize, usize)>, SearchError> {
    let sig = resolution_ranks(ctx)?;
    Ok((1..ctx.n).map(|j| (sig.rank(j) as usize, sig.rank(j + 1) as usize)).collect())
}

/// Number of coefficient slots: one per variable per matrix entry.
pub fn slot_count(ctx: &UlrichContext) -> Result<usize, SearchError> {
    Ok(candidate_shapes(ctx)?.iter().map(|(r, c)| r * c * (ctx.n + 1)).sum())
}

/// Size of the exhaustive candidate space, `|pool|^slots`.
pub fn space_size(cfg: &SearchConfig) -> Result<BigUint, SearchError> {
    Ok(BigUint::from(cfg.pool.len()).pow(slot_count(&cfg.ctx)? as u32))
}

fn check_config(cfg: &SearchConfig) -> Result<(), SearchError> {
    if !(2..=3).contains(&cfg.ctx.n) {
        return Err(SearchError::UnsupportedDimension(cfg.ctx.n));
    }
    if cfg.pool.is_empty() {
        return Err(SearchError::EmptyPool);
    }
    if cfg.pool.iter().collect::<HashSet<_>>().len() != cfg.pool.len() {
        return Err(SearchError::RepeatedPool);
    }
    resolution_ranks(&cfg.ctx)?;
    Ok(())
}

fn assemble(ctx: &UlrichContext, shapes: &[(usize, usize)], slots: &[Rational]) -> Vec<LinearMatrix> {
    let nv = ctx.n + 1;
    let mut offset = 0;
    shapes
        .iter()
        .map(|&(rows, cols)| {
            let m = LinearMatrix::from_fn(ctx.n, rows, cols, |i, j| {
                let at = offset + (i * cols + j) * nv;
                slots[at..at + nv].to_vec()
            });
            offset += rows * cols * nv;
            m
        })
        .collect()
}

/// Slot values of candidate `k`. In exhaustive mode slot 0 is the most
/// significant digit of `start + k` written in base `|pool|`.
pub fn candidate_slots(cfg: &SearchConfig, k: u64) -> Result<Vec<Rational>, SearchError> {
    let slots = slot_count(&cfg.ctx)?;
    match cfg.mode {
        SearchMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            Ok((0..slots).map(|_| cfg.pool[rng.gen_range(0..cfg.pool.len())].clone()).collect())
        }
        SearchMode::Exhaustive => {
            let base = BigUint::from(cfg.pool.len());
            let mut index = &cfg.start + BigUint::from(k);
            if index >= space_size(cfg)? {
                return Err(SearchError::StartOutOfRange(index));
            }
            let mut digits = vec![0usize; slots];
            for slot in digits.iter_mut().rev() {
                *slot = (&index % &base).to_usize().expect("digit fits");
                index /= &base;
            }
            Ok(digits.into_iter().map(|i| cfg.pool[i].clone()).collect())
        }
    }
}

/// Differentials of candidate `k`.
pub fn candidate(cfg: &SearchConfig, k: u64) -> Result<Vec<LinearMatrix>, SearchError> {
    let shapes = candidate_shapes(&cfg.ctx)?;
    Ok(assemble(&cfg.ctx, &shapes, &candidate_slots(cfg, k)?))
}

/// Exhaustive-mode index of a given tuple of differentials, if every
/// coefficient is in the pool and the shapes fit.
pub fn index_of(cfg: &SearchConfig, differentials: &[LinearMatrix]) -> Option<BigUint> {
    let shapes = candidate_shapes(&cfg.ctx).ok()?;
    if differentials.len() != shapes.len() || differentials.iter().zip(&shapes).any(|(m, s)| m.shape() != *s) {
        return None;
    }
    let base = BigUint::from(cfg.pool.len());
    let mut index = BigUint::zero();
    for m in differentials {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                for c in m.coeffs(i, j) {
                    let digit = cfg.pool.iter().position(|p| p == c)?;
                    index = index * &base + BigUint::from(digit);
                }
            }
        }
    }
    Some(index)
}

/// The top-cohomology maps of the `n <= 3` criteria as a cheap filter:
/// every one of them is a necessary condition for an Ulrich cokernel.
pub fn dual_map_filter(res: &LinearResolution) -> bool {
    let ctx = res.ctx();
    let d = ctx.d as i64;
    match ctx.n {
        2 => {
            let m = twisted_top_map(res, 1, -d);
            m.rows() == m.cols() && m.rank() == m.cols()
        }
        3 => {
            let injective = |t: i64| {
                let m = twisted_top_map(res, 2, t);
                m.rank() == m.cols()
            };
            let surjective = |t: i64| {
                let m = twisted_top_map(res, 1, t);
                m.rank() == m.rows()
            };
            if ctx.r == 2 {
                injective(-d)
            } else {
                (1..=2).all(|i| injective(-i * d) && surjective(-i * d))
            }
        }
        _ => true,
    }
}

/// Cheap necessary checks, in order: complex property, rank at the
/// coordinate points, then the top-cohomology maps.
pub fn screen(res: &LinearResolution) -> Result<(), Rejection> {
    if validate_complex(res).is_err() {
        return Err(Rejection::Complex);
    }
    let n = res.ctx().n;
    let coordinate: Vec<Vec<Rational>> =
        (0..=n).map(|k| (0..=n).map(|i| Rational::from(u32::from(i == k))).collect()).collect();
    if screen_points(res, &coordinate).is_some() {
        return Err(Rejection::PointRank);
    }
    if !dual_map_filter(res) {
        return Err(Rejection::DualMap);
    }
    Ok(())
}

/// Screens and, if that passes, fully verifies candidate `k`.
pub fn evaluate_candidate(cfg: &SearchConfig, k: u64) -> Result<UlrichCertificate, Rejection> {
    let diffs = candidate(cfg, k).expect("config checked");
    let res = LinearResolution::new(cfg.ctx, diffs).expect("shapes from the signature");
    screen(&res)?;
    let opts = VerifyOptions { seed: cfg.seed, samples: DEFAULT_SAMPLES, full_definition: false };
    ulrich_verdict(&res, &opts).map_err(|f| Rejection::Verdict(f.stage))
}

const CHUNK: u64 = 4096;

/// Runs the search and returns every certificate within budget, sorted by
/// candidate index, with duplicates (same differentials) removed.
pub fn search_ulrich(cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    check_config(cfg)?;
    if cfg.mode == SearchMode::Exhaustive && cfg.budget > 0 && cfg.start >= space_size(cfg)? {
        return Err(SearchError::StartOutOfRange(cfg.start.clone()));
    }
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build().expect("thread pool");
    // exhaustive runs stop at the end of the space
    let budget = match cfg.mode {
        SearchMode::Random => cfg.budget,
        SearchMode::Exhaustive => {
            let left = space_size(cfg)? - &cfg.start;
            left.to_u64().map_or(cfg.budget, |l| l.min(cfg.budget))
        }
    };
    let mut counts = SearchCounts::default();
    let mut seen = HashSet::new();
    let mut certificates = Vec::new();
    let mut lo = 0;
    while lo < budget {
        let hi = (lo + CHUNK).min(budget);
        let outcomes: Vec<(u64, Result<UlrichCertificate, Rejection>)> =
            pool.install(|| (lo..hi).into_par_iter().map(|k| (k, evaluate_candidate(cfg, k))).collect());
        for (k, outcome) in outcomes {
            counts.generated += 1;
            match outcome {
                Err(Rejection::Complex) => counts.rejected_complex += 1,
                Err(Rejection::PointRank) => counts.rejected_point_rank += 1,
                Err(Rejection::DualMap) => counts.rejected_dual_map += 1,
                Err(Rejection::Verdict(_)) => counts.rejected_verdict += 1,
                Ok(mut cert) => {
                    if !seen.insert(differentials_hash(&cert.resolution)) {
                        counts.duplicates += 1;
                        continue;
                    }
                    counts.certified += 1;
                    cert.provenance.source = "search".to_string();
                    cert.provenance.pool = Some(cfg.pool.clone());
                    let index = match cfg.mode {
                        SearchMode::Random => BigUint::from(k),
                        SearchMode::Exhaustive => &cfg.start + BigUint::from(k),
                    };
                    cert.provenance.candidate_index = Some(index.to_string());
                    cert.provenance.extra.insert("mode".into(), serde_json::to_value(cfg.mode).expect("mode"));
                    certificates.push(cert);
                }
            }
        }
        lo = hi;
    }
    let manifest = SearchManifest {
        context: cfg.ctx,
        pool: cfg.pool.clone(),
        budget: cfg.budget,
        seed: cfg.seed,
        mode: cfg.mode,
        start: cfg.start.to_string(),
        jobs: cfg.jobs.max(1),
        counts,
        wall_time_ms: started.elapsed().as_millis(),
        content_hashes: certificates.iter().map(|c| c.content_hash.clone()).collect(),
    };
    Ok(SearchOutcome { certificates, manifest })
}
