//! Grid-wide identities of the closed-form cohomology, each checked against
//! an independent computation.

use proptest::prelude::*;
use ulrich_core::arith::binomial;
use ulrich_core::numerology::*;
use ulrich_core::Rational;

fn ctx(n: usize, d: u32, r: u32) -> UlrichContext {
    UlrichContext::new(n, d, r).unwrap()
}

fn grid() -> impl Iterator<Item = UlrichContext> {
    (1..=5).flat_map(|n| (1..=6).flat_map(move |d| (1..=6).map(move |r| ctx(n, d, r))))
}

/// `chi(E(i) x Omega^j(j))` from the Euler sequence recursion, starting at
/// `Omega^0 = O`.
fn chi_recursive(c: &UlrichContext, i: i64, j: usize) -> Rational {
    if j == 0 {
        return chi_ulrich(c, i);
    }
    Rational::from(binomial(c.n as i64 + 1, j as i64)) * chi_ulrich(c, i) - chi_recursive(c, i + 1, j - 1)
}

fn chi_bott(n: usize, p: i64, t: i64) -> i64 {
    (0..=n as i64).map(|q| bott_dimension(n, p, q, t).unwrap() as i64 * if q % 2 == 0 { 1 } else { -1 }).sum()
}

#[test]
fn alternating_sum_is_rank() {
    let mut integral = 0;
    for c in grid() {
        if let Ok(sig) = resolution_ranks(&c) {
            integral += 1;
            assert_eq!(sig.alternating_sum(), c.r as i64, "{c:?}");
        }
    }
    assert!(integral > 0);
}

#[test]
fn ranks_are_minus_chi_of_omega_twists() {
    for c in grid() {
        let Ok(sig) = resolution_ranks(&c) else { continue };
        for j in 1..=c.n {
            let chi = chi_omega(&c, -(c.d as i64), j).unwrap();
            assert_eq!(-chi, Rational::from(sig.rank(j)), "{c:?} j={j}");
        }
    }
}

#[test]
fn first_chern_matches_the_rank_two_value() {
    // c_1(E) = c_1(E(-d)) + r d, and r/2 (n+1)(d-1) in general
    for c in grid() {
        let Ok(sig) = resolution_ranks(&c) else { continue };
        let c1 = sig.first_chern_of_twist() + c.r as i64 * c.d as i64;
        assert_eq!(Rational::from(c1), Rational::new(c.r as i64 * (c.n as i64 + 1) * (c.d as i64 - 1), 2), "{c:?}");
        if c.r == 2 && c.n >= 2 {
            assert_eq!(c1, rank2_chern(c.n, c.d).unwrap().0);
        }
    }
}

#[test]
fn closed_form_matches_recursion() {
    for n in 1..=4 {
        for d in 1..=4 {
            for r in 1..=3 {
                let c = ctx(n, d, r);
                let bound = 3 * n as i64 * d as i64;
                for i in -bound..=bound {
                    for j in 0..=n {
                        assert_eq!(chi_omega(&c, i, j).unwrap(), chi_recursive(&c, i, j), "{c:?} i={i} j={j}");
                    }
                }
            }
        }
    }
}

#[test]
fn chi_at_multiples_of_d_is_a_binomial() {
    for c in grid() {
        for k in -8i64..=4 {
            let expected = Rational::from(c.r as i64 * (c.d as i64).pow(c.n as u32)) * Rational::from(binomial(k + c.n as i64, c.n as i64));
            assert_eq!(chi_ulrich(&c, k * c.d as i64), expected);
        }
    }
}

#[test]
fn bott_euler_sequences_alternate() {
    for n in 1..=4usize {
        for t in -8..=8i64 {
            // chi(O(t)) = (t+1)(t+2)...(t+n)/n! for every t
            let mut poly = Rational::one();
            for k in 1..=n as i64 {
                poly = poly * Rational::from(t + k) / Rational::from(k);
            }
            assert_eq!(Rational::from(chi_bott(n, 0, t)), poly);
            for j in 1..=n as i64 {
                // 0 -> Omega^j(j+t) -> O(t)^C(n+1,j) -> Omega^{j-1}(j+t) -> 0
                let lhs = chi_bott(n, j, j + t) + chi_bott(n, j - 1, j + t);
                let rhs = Rational::from(binomial(n as i64 + 1, j)).to_i64().unwrap() * chi_bott(n, 0, t);
                assert_eq!(lhs, rhs, "n={n} j={j} t={t}");
            }
        }
    }
}

#[test]
fn bott_reference_values() {
    assert_eq!(bott_dimension(3, 1, 0, 2).unwrap(), 6);
    for n in 1..=6 {
        for p in 0..=n as i64 {
            assert_eq!(bott_dimension(n, p, p, 0).unwrap(), 1);
        }
    }
    // h^0(Omega^1(3)) on P^2 = C(4, 3) C(2, 1)
    assert_eq!(bott_dimension(2, 1, 0, 3).unwrap(), 8);
}

#[test]
fn rank_one_exists_only_for_lines_and_hyperplanes() {
    for n in 1..=6 {
        for d in 1..=6 {
            let found = rank1_classify(n, d);
            assert_eq!(found.is_some(), n == 1 || d == 1, "n={n} d={d}");
            if d == 1 {
                assert_eq!(found, Some(0));
            }
        }
    }
}

#[test]
fn rank_two_obstructions() {
    assert!(rank2_obstructed(3, 3).unwrap());
    assert!(rank2_obstructed(4, 2).unwrap());
    for k in 1..5 {
        assert!(rank2_obstructed(3, 3 * k).unwrap());
        assert!(rank2_obstructed(4, 2 * k).unwrap());
    }
    assert!(!rank2_obstructed(3, 2).unwrap());
    assert!(!rank2_obstructed(2, 5).unwrap());
}

proptest! {
    #[test]
    fn profiles_have_natural_cohomology(n in 1usize..5, d in 1u32..5, r in 1u32..5, t in -30i64..10) {
        let c = ctx(n, d, r);
        if let Ok(p) = ulrich_profile(&c, t) {
            prop_assert!(p.values.iter().filter(|&&v| v != 0).count() <= 1);
            let chi: i64 = p.values.iter().enumerate().map(|(q, &v)| if q % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
            prop_assert_eq!(Rational::from(chi), chi_ulrich(&c, t));
        }
    }

    #[test]
    fn omega_profiles_have_natural_cohomology(n in 1usize..5, d in 1u32..5, t in -30i64..10, j in 0usize..5) {
        prop_assume!(j <= n);
        let r = (1..=n as u32).product::<u32>();
        let c = ctx(n, d, r);
        if let Ok(p) = omega_profile(&c, t, j) {
            prop_assert!(p.values.iter().filter(|&&v| v != 0).count() <= 1);
            let chi: i64 = p.values.iter().enumerate().map(|(q, &v)| if q % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
            prop_assert_eq!(Rational::from(chi), chi_omega(&c, t, j).unwrap());
        }
    }

    #[test]
    fn forced_zeros_agree_with_profiles(n in 1usize..5, d in 1u32..5, i0 in -20i64..6) {
        let c = ctx(n, d, (1..=n as u32).product());
        let Ok(p0) = ulrich_profile(&c, i0) else { return Ok(()) };
        let Some(q0) = p0.nonzero_degree() else { return Ok(()) };
        let region = forced_zeros(&c, q0, i0).unwrap();
        for i in i0 - 12..i0 + 12 {
            let Ok(p) = ulrich_profile(&c, i) else { continue };
            for q in 0..=n {
                if region.contains(q, i) {
                    prop_assert_eq!(p.values[q], 0, "q={} i={}", q, i);
                }
            }
        }
    }
}
