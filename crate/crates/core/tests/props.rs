mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use common::{instance, rng, Shape};
use covergen::calculus::{self, CoverOptions, SaturationConfig};
use covergen::flatten::flatten;
use covergen::solver::{cc_sat, entails, Theory};
use covergen::{Formula, Fun, Literal, Precedence, Rel, Sort, Term, Var};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn sort() -> Sort {
    Sort::new("S")
}

fn random_term(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let s = sort();
    if depth == 0 || r.gen_bool(0.4) {
        let v = match r.gen_range(0..4) {
            0 => Var::existential(1, "e1", s),
            1 => Var::existential(2, "e2", s),
            2 => Var::parameter(1, "y1", s),
            _ => Var::parameter(2, "y2", s),
        };
        return Term::var(v);
    }
    if r.gen_bool(0.5) {
        let f = Fun::new("f", vec![s.clone()], s);
        Term::app(f, vec![random_term(r, depth - 1)]).unwrap()
    } else {
        let g = Fun::new("g", vec![s.clone(), s.clone()], s);
        Term::app(g, vec![random_term(r, depth - 1), random_term(r, depth - 1)]).unwrap()
    }
}

fn subterms(t: &Term, out: &mut BTreeSet<Term>) {
    t.for_each_subterm(&mut |u| {
        out.insert(u.clone());
    });
}

/// Ground literals over `y1, y2, f, g` and a unary relation.
fn ground_literals(r: &mut ChaCha8Rng) -> Vec<Literal> {
    let rel = Rel::new("R", vec![sort()]);
    let n = r.gen_range(1..=4);
    (0..n)
        .map(|_| {
            let a = ground(&random_term(r, 2));
            if r.gen_bool(0.2) {
                return Literal::rel(r.gen_bool(0.5), rel.clone(), vec![a]).unwrap();
            }
            let b = ground(&random_term(r, 1));
            if r.gen_bool(0.6) {
                Literal::eq(a, b).unwrap()
            } else {
                Literal::neq(a, b).unwrap()
            }
        })
        .collect()
}

fn ground(t: &Term) -> Term {
    let s = sort();
    let map = [
        (Var::existential(1, "e1", s.clone()), Term::var(Var::parameter(1, "y1", s.clone()))),
        (Var::existential(2, "e2", s.clone()), Term::var(Var::parameter(2, "y2", s))),
    ]
    .into_iter()
    .collect();
    t.substitute(&map)
}

/// Satisfiability by trying every partition of the subterms into classes.
fn brute_sat(lits: &[Literal]) -> bool {
    let mut terms = BTreeSet::new();
    for l in lits {
        for t in l.atom.terms() {
            subterms(t, &mut terms);
        }
    }
    let terms: Vec<Term> = terms.into_iter().collect();
    let idx = |t: &Term| terms.iter().position(|u| u == t).unwrap();
    let mut class = vec![0usize; terms.len()];
    loop {
        if consistent(lits, &terms, &class, &idx) {
            return true;
        }
        if !next_partition(&mut class) {
            return false;
        }
    }
}

fn consistent(lits: &[Literal], terms: &[Term], class: &[usize], idx: &dyn Fn(&Term) -> usize) -> bool {
    for (i, t) in terms.iter().enumerate() {
        for (j, u) in terms.iter().enumerate().skip(i + 1) {
            if t.fun().is_some() && t.fun() == u.fun() && class[i] != class[j] {
                let same = t.args().iter().zip(u.args()).all(|(a, b)| class[idx(a)] == class[idx(b)]);
                if same {
                    return false;
                }
            }
        }
    }
    let mut rels: Vec<(usize, bool)> = Vec::new();
    for l in lits {
        match &l.atom {
            covergen::Atom::Eq(a, b) => {
                if (class[idx(a)] == class[idx(b)]) != l.positive {
                    return false;
                }
            }
            covergen::Atom::Rel(_, args) => {
                let c = class[idx(&args[0])];
                if rels.iter().any(|&(d, p)| d == c && p != l.positive) {
                    return false;
                }
                rels.push((c, l.positive));
            }
        }
    }
    true
}

/// Steps through restricted growth strings.
fn next_partition(class: &mut [usize]) -> bool {
    for i in (1..class.len()).rev() {
        let max_prefix = class[..i].iter().copied().max().unwrap_or(0);
        if class[i] <= max_prefix {
            class[i] += 1;
            for c in &mut class[i + 1..] {
                *c = 0;
            }
            return true;
        }
    }
    false
}

fn quiet() -> SaturationConfig {
    SaturationConfig {
        trace: false,
        ..SaturationConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ordering_is_a_strict_total_order(seed: u64) {
        let mut r = rng(seed);
        let prec = Precedence::default();
        let ts: Vec<Term> = (0..3).map(|_| random_term(&mut r, 3)).collect();
        let (a, b, c) = (&ts[0], &ts[1], &ts[2]);
        prop_assert!(!prec.greater(a, a));
        prop_assert_eq!(prec.compare(a, b), prec.compare(b, a).reverse());
        prop_assert_eq!(prec.compare(a, b) == Ordering::Equal, a == b);
        if prec.greater(a, b) && prec.greater(b, c) {
            prop_assert!(prec.greater(a, c));
        }
    }

    #[test]
    fn ordering_has_the_subterm_property_and_is_monotone(seed: u64) {
        let mut r = rng(seed);
        let prec = Precedence::default();
        let t = random_term(&mut r, 3);
        let mut subs = BTreeSet::new();
        subterms(&t, &mut subs);
        for u in subs.iter().filter(|u| **u != t) {
            prop_assert!(prec.greater(&t, u));
        }
        let u = random_term(&mut r, 2);
        let f = Fun::new("f", vec![sort()], sort());
        let ft = Term::app(f.clone(), vec![t.clone()]).unwrap();
        let fu = Term::app(f, vec![u.clone()]).unwrap();
        prop_assert_eq!(prec.compare(&t, &u), prec.compare(&ft, &fu));
    }

    #[test]
    fn terms_with_existentials_dominate_e_free_ones(seed: u64) {
        let mut r = rng(seed);
        let prec = Precedence::default();
        let t = random_term(&mut r, 3);
        let u = ground(&random_term(&mut r, 3));
        if !t.is_e_free() {
            prop_assert!(prec.greater(&t, &u));
        }
    }

    #[test]
    fn congruence_closure_agrees_with_partition_search(seed: u64) {
        let mut r = rng(seed);
        let lits = ground_literals(&mut r);
        prop_assert_eq!(cc_sat(&lits), brute_sat(&lits), "{:?}", lits);
    }

    #[test]
    fn flattening_preserves_satisfiability(seed: u64) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=4);
        let body: Vec<Literal> = (0..n)
            .map(|_| {
                let (a, b) = (random_term(&mut r, 3), random_term(&mut r, 2));
                if r.gen_bool(0.6) { Literal::eq(a, b) } else { Literal::neq(a, b) }.unwrap()
            })
            .collect();
        let evars = [Var::existential(1, "e1", sort()), Var::existential(2, "e2", sort())];
        let flat = flatten(&body, &evars);
        prop_assert!(flat.literals.iter().all(|l| l.is_e_flat()));
        prop_assert_eq!(cc_sat(&body), cc_sat(&flat.literals));
    }

    #[test]
    fn entailment_is_a_preorder(seed: u64) {
        let mut r = rng(seed);
        let fs: Vec<Formula> = (0..3)
            .map(|_| {
                let lits = ground_literals(&mut r);
                let k = r.gen_range(1..=lits.len());
                Formula::conj(lits.choose_multiple(&mut r, k).cloned().collect::<Vec<_>>().as_slice())
            })
            .collect();
        let t = Theory::Empty;
        prop_assert!(entails(&fs[0], &fs[0], &t).unwrap());
        if entails(&fs[0], &fs[1], &t).unwrap() && entails(&fs[1], &fs[2], &t).unwrap() {
            prop_assert!(entails(&fs[0], &fs[2], &t).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn covers_are_e_free_residues_independent_of_subsumption(seed: u64) {
        let mut r = rng(seed);
        let inst = instance(&mut r, Shape::Mixed, 3);
        let prec = Precedence::default();
        let opts = |subsumption| CoverOptions { subsumption, theory: Theory::Empty };
        let reduced = calculus::cover(&inst.body, &inst.evars, &prec, &quiet(), &opts(true)).unwrap();
        let full = calculus::cover(&inst.body, &inst.evars, &prec, &quiet(), &opts(false)).unwrap();
        let psi = reduced.to_formula();
        prop_assert!(psi.vars().iter().all(|v| !v.is_existential()));
        prop_assert!(entails(&inst.phi(), &psi, &Theory::Empty).unwrap());
        prop_assert!(reduced.clauses.len() <= full.clauses.len());
        prop_assert!(covergen::solver::equivalent(&psi, &full.to_formula(), &Theory::Empty).unwrap());
    }
}
