//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde_json::Value;
use ulrich_core::arith::binomial;
use ulrich_core::gallery::{self, build_C, extract_blocks, p2_cubic_alpha, FIXTURE_NAMES};
use ulrich_core::numerology::*;
use ulrich_core::resolution::{cohomology_table, LinearResolution, UlrichCertificate};
use ulrich_core::search::{index_of, search_ulrich, SearchConfig, SearchMode};
use ulrich_core::Rational;

/// Seed for the random-mode search of criterion 10.
const SEARCH_SEED: u64 = 1;
const SEARCH_BUDGET: u64 = 100_000;

type Outcome = Result<String, String>;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ulrich_cli::run(std::iter::once("ulrich").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid(n_max: usize, d_max: u32, r_max: u32) -> Vec<UlrichContext> {
    let mut v = Vec::new();
    for n in 1..=n_max {
        for d in 1..=d_max {
            for r in 1..=r_max {
                v.push(UlrichContext::new(n, d, r).unwrap());
            }
        }
    }
    v
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn gallery_resolution(name: &str) -> LinearResolution {
    let f = gallery::fixture(name).unwrap();
    LinearResolution::new(f.context, f.differentials).unwrap()
}

fn c1_gallery_verification() -> Outcome {
    let start = Instant::now();
    for name in FIXTURE_NAMES {
        let (code, out, err) = cli(&["verify", "--gallery", name]);
        ensure(code == 0, || format!("{name}: exit {code}: {err}"))?;
        let cert = UlrichCertificate::from_json(&out).map_err(|e| format!("{name}: {e}"))?;
        ensure(cert.report.verdict, || format!("{name}: verdict false"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {}", secs(elapsed)))?;
    Ok(format!("{} fixtures certified in {}", FIXTURE_NAMES.len(), secs(elapsed)))
}

fn c2_det_c() -> Outcome {
    let det = build_C(&extract_blocks(&p2_cubic_alpha()).map_err(|e| e.to_string())?).det();
    ensure(det == Rational::from(4), || format!("det(C) = {det}"))?;
    Ok("det(C) = 4".into())
}

fn c3_rank_spot_checks() -> Outcome {
    let p3 = resolution_ranks(&UlrichContext::new(3, 2, 2).unwrap()).map_err(|e| e.to_string())?;
    let p2 = resolution_ranks(&UlrichContext::new(2, 3, 3).unwrap()).map_err(|e| e.to_string())?;
    ensure(p3.ranks == [5, 4, 1], || format!("(3,2,2) -> {:?}", p3.ranks))?;
    ensure(p2.ranks == [6, 3], || format!("(2,3,3) -> {:?}", p2.ranks))?;
    let (code, out, _) = cli(&["ranks", "-n", "3", "-d", "2", "-r", "2"]);
    ensure(code == 0 && out == "5 4 1\n", || format!("cli printed {out:?}"))?;
    Ok("(3,2,2) -> [5, 4, 1], (2,3,3) -> [6, 3]".into())
}

fn c4_alternating_sum() -> Outcome {
    let start = Instant::now();
    let contexts = grid(5, 6, 6);
    let mut integral = 0;
    for c in &contexts {
        // rational a_j exist for every context; integral ones also through
        // the resolution ranks
        let sum: Rational = (1..=c.n)
            .map(|j| {
                let a = -chi_omega(c, -(c.d as i64), j).unwrap();
                if j % 2 == 1 {
                    a
                } else {
                    -a
                }
            })
            .sum();
        ensure(sum == Rational::from(c.r), || format!("{c:?}: rational sum {sum}"))?;
        if let Ok(sig) = resolution_ranks(c) {
            integral += 1;
            ensure(sig.alternating_sum() == c.r as i64, || format!("{c:?}: {:?}", sig.ranks))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {}", secs(elapsed)))?;
    Ok(format!("{} contexts ({integral} with integral ranks) in {}", contexts.len(), secs(elapsed)))
}

fn c5_chi_consistency() -> Outcome {
    let mut checked = 0;
    for c in grid(5, 6, 6) {
        let Ok(sig) = resolution_ranks(&c) else { continue };
        for j in 1..=c.n {
            let chi = chi_omega(&c, -(c.d as i64), j).map_err(|e| e.to_string())?;
            ensure(-chi.clone() == Rational::from(sig.rank(j)), || format!("{c:?} j={j}: chi {chi}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (context, j) pairs"))
}

fn chi_recursive(c: &UlrichContext, i: i64, j: usize) -> Rational {
    if j == 0 {
        return chi_ulrich(c, i);
    }
    Rational::from(binomial(c.n as i64 + 1, j as i64)) * chi_ulrich(c, i) - chi_recursive(c, i + 1, j - 1)
}

fn c6_recursion_oracle() -> Outcome {
    let mut checked = 0u64;
    for c in grid(4, 6, 6) {
        let bound = 3 * c.n as i64 * c.d as i64;
        for i in -bound..=bound {
            for j in 0..=c.n {
                let closed = chi_omega(&c, i, j).map_err(|e| e.to_string())?;
                let rec = chi_recursive(&c, i, j);
                ensure(closed == rec, || format!("{c:?} i={i} j={j}: {closed} vs {rec}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} values"))
}

fn chi_bott(n: usize, p: i64, t: i64) -> Result<i64, String> {
    let mut sum = 0i64;
    for q in 0..=n as i64 {
        let h = bott_dimension(n, p, q, t).map_err(|e| e.to_string())? as i64;
        sum += if q % 2 == 0 { h } else { -h };
    }
    Ok(sum)
}

fn c7_bott() -> Outcome {
    let v = bott_dimension(3, 1, 0, 2).map_err(|e| e.to_string())?;
    ensure(v == 6, || format!("h^0(P^3, Omega^1(2)) = {v}"))?;
    for n in 1..=6 {
        for p in 0..=n as i64 {
            let v = bott_dimension(n, p, p, 0).map_err(|e| e.to_string())?;
            ensure(v == 1, || format!("h^{p}(P^{n}, Omega^{p}) = {v}"))?;
        }
    }
    let mut sequences = 0;
    for n in 1..=4usize {
        for t in -8..=8i64 {
            for j in 1..=n as i64 {
                // 0 -> Omega^j(j+t) -> O(t)^C(n+1,j) -> Omega^{j-1}(j+t) -> 0
                let alt = chi_bott(n, j, j + t)? - Rational::from(binomial(n as i64 + 1, j)).to_i64().unwrap() * chi_bott(n, 0, t)?
                    + chi_bott(n, j - 1, j + t)?;
                ensure(alt == 0, || format!("n={n} j={j} t={t}: {alt}"))?;
                sequences += 1;
            }
        }
    }
    Ok(format!("reference values and {sequences} Euler sequences"))
}

fn c8_cohomology_equivalence() -> Outcome {
    let mut rows = 0;
    for name in FIXTURE_NAMES {
        let res = gallery_resolution(name);
        let c = *res.ctx();
        let (n, d) = (c.n as i64, c.d as i64);
        let table = cohomology_table(&res, -(n + 1) * d, d).map_err(|e| format!("{name}: {e}"))?;
        for row in &table {
            let expected = ulrich_profile(&c, row.twist).map_err(|e| e.to_string())?;
            ensure(row == &expected, || format!("{name} twist {}: {:?} vs {:?}", row.twist, row.values, expected.values))?;
            if row.twist < 0 && row.twist >= -n * d && row.twist % d == 0 {
                ensure(row.values.iter().all(|&v| v == 0), || format!("{name}: nonzero at {}", row.twist))?;
            }
            rows += 1;
        }
        let h0 = table.iter().find(|r| r.twist == 0).map(|r| r.values[0]).unwrap_or(0);
        ensure(h0 == c.r as u64 * (c.d as u64).pow(c.n as u32), || format!("{name}: h^0(E) = {h0}"))?;
        let window = [format!("--from={}", -(n + 1) * d), format!("--to={d}")];
        let (c1, from_res, _) = cli(&["table", "--gallery", name, &window[0], &window[1]]);
        let (n_s, d_s, r_s) = (c.n.to_string(), c.d.to_string(), c.r.to_string());
        let (c2, from_formula, _) = cli(&["table", "-n", &n_s, "-d", &d_s, "-r", &r_s, &window[0], &window[1]]);
        ensure(c1 == 0 && c2 == 0 && from_res == from_formula, || format!("{name}: cli tables differ"))?;
    }
    let p3 = cohomology_table(&gallery_resolution("p3-d2"), 0, 0).unwrap()[0].values[0];
    let b3 = cohomology_table(&gallery_resolution("p2-banded-d3"), 0, 0).unwrap()[0].values[0];
    ensure(p3 == 16 && b3 == 18, || format!("h^0(E): p3-d2 {p3}, p2-banded-d3 {b3}"))?;
    Ok(format!("{rows} rows over {} fixtures; h^0(E) = 16 (p3-d2), 18 (p2-banded-d3)", FIXTURE_NAMES.len()))
}

fn c9_nonexistence() -> Outcome {
    ensure(rank2_obstructed(3, 3).map_err(|e| e.to_string())?, || "(3,3) not obstructed".into())?;
    ensure(rank2_obstructed(4, 2).map_err(|e| e.to_string())?, || "(4,2) not obstructed".into())?;
    for n in 1..=6 {
        for d in 1..=6 {
            let found = rank1_classify(n, d);
            ensure(found.is_some() == (n == 1 || d == 1), || format!("rank1_classify({n}, {d}) = {found:?}"))?;
        }
    }
    Ok("rank-2 obstructions at (3,3), (4,2); rank 1 only for d = 1 or n = 1".into())
}

fn c10_search() -> Outcome {
    let ctx = UlrichContext::new(2, 3, 3).unwrap();
    let pool = vec![Rational::zero(), Rational::one()];
    let base = SearchConfig::new(ctx, pool.clone(), 64, 0, SearchMode::Exhaustive);
    let index = index_of(&base, &[p2_cubic_alpha()]).ok_or("known matrix outside the space")?;
    let exhaustive = SearchConfig { start: &index - BigUint::from(32u32), ..base };
    let out = search_ulrich(&exhaustive).map_err(|e| e.to_string())?;
    let hit = out.certificates.iter().any(|c| {
        c.provenance.candidate_index.as_deref() == Some(index.to_string().as_str())
            && c.resolution.differentials() == [p2_cubic_alpha()]
    });
    ensure(hit, || "exhaustive window did not certify the known matrix".into())?;

    let start = Instant::now();
    let random = SearchConfig::new(ctx, pool, SEARCH_BUDGET, SEARCH_SEED, SearchMode::Random);
    let big = search_ulrich(&random).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(!big.certificates.is_empty(), || "no certificate".into())?;
    ensure(elapsed < Duration::from_secs(1800), || format!("took {}", secs(elapsed)))?;
    // a shorter run is a prefix of the long one
    let small = search_ulrich(&SearchConfig { budget: 2000, ..random.clone() }).map_err(|e| e.to_string())?;
    let again = search_ulrich(&SearchConfig { budget: 2000, ..random }).map_err(|e| e.to_string())?;
    let prefix: Vec<&String> = big
        .certificates
        .iter()
        .filter(|c| c.provenance.candidate_index.as_deref().and_then(|s| s.parse::<u64>().ok()).is_some_and(|k| k < 2000))
        .map(|c| &c.content_hash)
        .collect();
    ensure(small.manifest.content_hashes == again.manifest.content_hashes, || "reruns differ".into())?;
    ensure(prefix == small.manifest.content_hashes.iter().collect::<Vec<_>>(), || "prefix differs".into())?;
    Ok(format!(
        "exhaustive window certifies index {index}; seed {SEARCH_SEED}, budget {SEARCH_BUDGET}: {} certificates in {}",
        big.certificates.len(),
        secs(elapsed)
    ))
}

fn c11_round_trip() -> Outcome {
    let dir = std::env::temp_dir().join(format!("ulrich-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    for name in FIXTURE_NAMES {
        let (code, out, _) = cli(&["verify", "--gallery", name]);
        ensure(code == 0, || format!("{name}: exit {code}"))?;
        let original: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, &out).map_err(|e| e.to_string())?;
        let (code, again, err) = cli(&["verify", "--certificate", path.to_str().unwrap()]);
        ensure(code == 0, || format!("{name}: re-verify exit {code}: {err}"))?;
        let again: Value = serde_json::from_str(&again).map_err(|e| e.to_string())?;
        ensure(again["content_hash"] == original["content_hash"], || format!("{name}: hash changed"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} certificates re-verified with identical hashes", FIXTURE_NAMES.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gallery verification", c1_gallery_verification),
        ("det(C) of the rank-3 cubic matrix", c2_det_c),
        ("resolution-rank spot checks", c3_rank_spot_checks),
        ("alternating-sum property", c4_alternating_sum),
        ("chi-consistency of ranks", c5_chi_consistency),
        ("recursion oracle", c6_recursion_oracle),
        ("Bott cross-checks", c7_bott),
        ("end-to-end cohomology equivalence", c8_cohomology_equivalence),
        ("nonexistence reproductions", c9_nonexistence),
        ("search reproduction", c10_search),
        ("certificate round-trip", c11_round_trip),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
