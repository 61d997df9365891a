//! Buchberger's algorithm over the rationals (degrevlex), used to decide
//! whether a homogeneous ideal has an empty projective zero locus.

use std::collections::{BTreeSet, HashSet};

use crate::poly::{HomPoly, Monomial};

/// A reduced Gröbner basis under degrevlex. Generators are monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<HomPoly>,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[HomPoly] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Normal form of `f` modulo the basis.
    pub fn reduce(&self, f: &HomPoly) -> HomPoly {
        normal_form(f, &self.generators)
    }

    /// Variables without a pure-power leading monomial in the basis.
    pub fn variables_without_pure_power(&self, nvars: usize) -> Vec<usize> {
        missing_pure_powers(&self.generators, nvars)
    }
}

/// Outcome of the emptiness test for a projective zero locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptinessVerdict {
    pub empty: bool,
    /// First variable lacking a pure-power leading term when not empty.
    pub missing_variable: Option<usize>,
    /// Number of basis elements held when the decision was made.
    pub basis_size: usize,
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn buchberger(gens: &[HomPoly]) -> GroebnerBasis {
    let raw = run(gens, |_| false).0;
    GroebnerBasis { generators: interreduce(raw) }
}

/// True iff the common zero locus of `gens` in projective space over the
/// algebraic closure is empty.
pub fn projective_empty(gens: &[HomPoly]) -> bool {
    emptiness(gens).empty
}

/// Decides emptiness via pure-power leading monomials.
///
/// Every intermediate polynomial lies in the ideal, so as soon as the
/// leading monomials collected so far contain a power of every variable the
/// quotient is finite-dimensional and the run stops early. A negative answer
/// always comes from a complete basis.
pub fn emptiness(gens: &[HomPoly]) -> EmptinessVerdict {
    let Some(nvars) = gens.first().map(HomPoly::nvars) else {
        return EmptinessVerdict { empty: false, missing_variable: Some(0), basis_size: 0 };
    };
    let (basis, stopped) = run(gens, |g| missing_pure_powers(g, nvars).is_empty());
    if stopped {
        return EmptinessVerdict { empty: true, missing_variable: None, basis_size: basis.len() };
    }
    let reduced = interreduce(basis);
    let missing = missing_pure_powers(&reduced, nvars);
    EmptinessVerdict { empty: missing.is_empty(), missing_variable: missing.first().copied(), basis_size: reduced.len() }
}

fn missing_pure_powers(basis: &[HomPoly], nvars: usize) -> Vec<usize> {
    let mut covered = vec![false; nvars];
    for g in basis {
        if let Some(i) = g.leading_monomial().and_then(Monomial::pure_power_of) {
            covered[i] = true;
        }
    }
    (0..nvars).filter(|&i| !covered[i]).collect()
}

/// Full reduction of every term of `f` by `basis` (monic generators).
pub fn normal_form(f: &HomPoly, basis: &[HomPoly]) -> HomPoly {
    let mut p = f.clone();
    let mut rest = HomPoly::zero(f.nvars(), f.degree());
    while let Some((m, c)) = p.pop_leading() {
        match basis.iter().find(|g| g.leading_monomial().is_some_and(|lm| lm.divides(&m))) {
            Some(g) => {
                let (lm, _) = g.leading_term().expect("nonzero generator");
                let shift = lm.quotient_of(&m);
                // the leading term cancels against the popped one
                let mut tail = g.clone();
                tail.pop_leading();
                p.sub_scaled_shifted(&tail, &shift, &c);
            }
            None => rest.add_term(m, c),
        }
    }
    rest
}

fn s_polynomial(f: &HomPoly, g: &HomPoly) -> HomPoly {
    let (lf, cf) = f.leading_term().expect("nonzero");
    let (lg, cg) = g.leading_term().expect("nonzero");
    let lcm = lf.lcm(lg);
    let a = f.mul_term(&lf.quotient_of(&lcm), &cg.clone());
    let b = g.mul_term(&lg.quotient_of(&lcm), &cf.clone());
    a.sub(&b)
}

type PairKey = (u32, Monomial, usize, usize);

/// Runs Buchberger with the normal selection strategy, the product
/// criterion and Buchberger's chain criterion. Returns the (non-reduced)
/// basis and whether `stop` fired.
fn run(gens: &[HomPoly], stop: impl Fn(&[HomPoly]) -> bool) -> (Vec<HomPoly>, bool) {
    let mut basis: Vec<HomPoly> = Vec::new();
    let mut queue: BTreeSet<PairKey> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let push = |basis: &mut Vec<HomPoly>,
                queue: &mut BTreeSet<PairKey>,
                pending: &mut HashSet<(usize, usize)>,
                g: HomPoly| {
        let j = basis.len();
        let lg = g.leading_monomial().expect("nonzero").clone();
        for (i, f) in basis.iter().enumerate() {
            let lcm = f.leading_monomial().expect("nonzero").lcm(&lg);
            queue.insert((lcm.degree(), lcm, i, j));
            pending.insert((i, j));
        }
        basis.push(g);
    };

    for f in gens {
        let r = normal_form(f, &basis);
        if !r.is_zero() {
            push(&mut basis, &mut queue, &mut pending, r.monic());
            if stop(&basis) {
                return (basis, true);
            }
        }
    }

    while let Some(key) = queue.pop_first() {
        let (_, lcm, i, j) = key;
        pending.remove(&(i, j));
        let (li, lj) = (basis[i].leading_monomial().unwrap(), basis[j].leading_monomial().unwrap());
        if li.is_coprime(lj) {
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].leading_monomial().unwrap().divides(&lcm)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let r = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            push(&mut basis, &mut queue, &mut pending, r.monic());
            if stop(&basis) {
                return (basis, true);
            }
        }
    }
    (basis, false)
}

/// Turns a Gröbner basis into the reduced one, keeping insertion order.
fn interreduce(basis: Vec<HomPoly>) -> Vec<HomPoly> {
    let lms: Vec<Monomial> = basis.iter().map(|g| g.leading_monomial().unwrap().clone()).collect();
    let keep: Vec<bool> = (0..basis.len())
        .map(|i| !(0..basis.len()).any(|k| k != i && lms[k].divides(&lms[i]) && (lms[k] != lms[i] || k < i)))
        .collect();
    let minimal: Vec<HomPoly> = basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect();
    (0..minimal.len())
        .map(|i| {
            let others: Vec<HomPoly> =
                minimal.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, g)| g.clone()).collect();
            let (lm, lc) = minimal[i].leading_term().unwrap();
            let mut tail = minimal[i].clone();
            tail.pop_leading();
            let mut out = normal_form(&tail, &others);
            out.add_term(lm.clone(), lc.clone());
            out.monic()
        })
        .collect()
}
