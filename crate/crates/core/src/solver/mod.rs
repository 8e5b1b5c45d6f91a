//! Decision procedures: congruence closure, quantifier-free satisfiability
//! modulo the supported theories, and Herbrand instantiation.

pub mod cc;

use std::collections::{BTreeSet, HashMap};

pub use cc::Cc;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::signature::{Fun, FunKind, Signature, Sort};
use crate::term::{Term, Var};

/// Default bound on tableau branches explored by [`qf_sat`].
pub const DEFAULT_BRANCH_BUDGET: usize = 100_000;

/// A one-variable universal axiom `forall x. body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub var: Var,
    pub body: Formula,
}

/// Background theory.
#[derive(Clone, Debug, Default)]
pub enum Theory {
    #[default]
    Empty,
    /// `forall x (x = undef <-> f(x) = undef)` for every unary function `f`.
    Undef(Signature),
    /// Finitely many one-variable universal axioms over an acyclic signature.
    Axioms(Signature, Vec<Axiom>),
}

impl Theory {
    pub fn is_empty(&self) -> bool {
        matches!(self, Theory::Empty)
    }

    pub fn signature(&self) -> Option<&Signature> {
        match self {
            Theory::Empty => None,
            Theory::Undef(sig) | Theory::Axioms(sig, _) => Some(sig),
        }
    }
}

/// Satisfiability of a set of ground literals in the empty theory.
pub fn cc_sat(lits: &[Literal]) -> bool {
    let mut cc = Cc::new();
    lits.iter().all(|l| cc.assert_lit(l))
}

fn collect_subterms(f: &Formula, out: &mut BTreeSet<Term>) {
    f.for_each_literal(&mut |l| {
        for t in l.atom.terms() {
            t.for_each_subterm(&mut |s| {
                out.insert(s.clone());
            });
        }
    });
}

/// The ground instances `(t, f(t))` of the undef axioms needed for `phi`.
fn undef_instances(sig: &Signature, phi: &Formula) -> Vec<(Term, Term, Term, Term)> {
    let mut terms = BTreeSet::new();
    collect_subterms(phi, &mut terms);
    for s in sig.sorts() {
        if let Some(u) = sig.undef(s) {
            terms.insert(Term::app_unchecked(u, Vec::new()));
        }
    }
    let unary: Vec<&Fun> = sig
        .funs()
        .iter()
        .filter(|f| f.arity() == 1 && f.kind() == FunKind::Declared)
        .collect();
    let mut out = Vec::new();
    for t in &terms {
        let Some(ut) = sig.undef(t.sort()) else { continue };
        for f in &unary {
            if f.args()[0] != *t.sort() {
                continue;
            }
            let Some(uf) = sig.undef(f.result()) else { continue };
            out.push((
                t.clone(),
                Term::app_unchecked(ut.clone(), Vec::new()),
                Term::app_unchecked((*f).clone(), vec![t.clone()]),
                Term::app_unchecked(uf, Vec::new()),
            ));
        }
    }
    out
}

/// Ground terms generable from `seeds` and the signature's constants by
/// applying function symbols. Fails on cyclic signatures.
pub fn generable_terms(sig: &Signature, seeds: &[Term]) -> Result<Vec<Term>> {
    if !sig.is_acyclic() {
        return Err(Error::Unsupported(
            "generable terms are infinite over a cyclic signature".into(),
        ));
    }
    let mut all: BTreeSet<Term> = seeds.iter().cloned().collect();
    for f in sig.funs() {
        if f.arity() == 0 {
            all.insert(Term::app_unchecked(f.clone(), Vec::new()));
        }
    }
    loop {
        let mut added = false;
        let by_sort: HashMap<Sort, Vec<Term>> = all.iter().fold(HashMap::new(), |mut m, t| {
            m.entry(t.sort().clone()).or_default().push(t.clone());
            m
        });
        for f in sig.funs().iter().filter(|f| f.arity() > 0) {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for s in f.args() {
                let choices = by_sort.get(s).cloned().unwrap_or_default();
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        choices.iter().map(move |c| {
                            let mut t = t.clone();
                            t.push(c.clone());
                            t
                        })
                    })
                    .collect();
            }
            for args in tuples {
                added |= all.insert(Term::app_unchecked(f.clone(), args));
            }
        }
        if !added {
            return Ok(all.into_iter().collect());
        }
    }
}

/// Every axiom instantiated at every generable term of the matching sort.
pub fn herbrand_instances(sig: &Signature, axioms: &[Axiom], ground: &[Term]) -> Result<Vec<Formula>> {
    if axioms.is_empty() {
        return Ok(Vec::new());
    }
    let terms = generable_terms(sig, ground)?;
    let mut out = Vec::new();
    for ax in axioms {
        for t in terms.iter().filter(|t| t.sort() == ax.var.sort()) {
            let map = HashMap::from([(ax.var.clone(), t.clone())]);
            out.push(ax.body.substitute(&map));
        }
    }
    Ok(out)
}

struct Search<'a> {
    undef: &'a [(Term, Term, Term, Term)],
    branches: usize,
    budget: usize,
}

impl Search<'_> {
    fn leaf(&self, cc: &mut Cc) -> bool {
        if self.undef.is_empty() {
            return cc.is_consistent();
        }
        loop {
            let mut changed = false;
            for (t, ut, ft, uf) in self.undef {
                let te = cc.equal(t, ut);
                let fe = cc.equal(ft, uf);
                if te && !fe {
                    changed = true;
                    if !cc.assert_eq(ft, uf) {
                        return false;
                    }
                } else if fe && !te {
                    changed = true;
                    if !cc.assert_eq(t, ut) {
                        return false;
                    }
                }
            }
            if !changed {
                return cc.is_consistent();
            }
        }
    }

    fn run(&mut self, mut cc: Cc, mut conj: Vec<Formula>, mut disj: Vec<Vec<Formula>>) -> Result<bool> {
        loop {
            while let Some(f) = conj.pop() {
                match f {
                    Formula::True => {}
                    Formula::False => return Ok(false),
                    Formula::Lit(l) => {
                        if !cc.assert_lit(&l) {
                            return Ok(false);
                        }
                    }
                    Formula::And(fs) => conj.extend(fs),
                    Formula::Or(fs) => disj.push(fs),
                    Formula::Not(_) | Formula::Implies(..) => {
                        return Err(Error::Internal("tableau input not in negation normal form".into()))
                    }
                }
            }
            // Drop satisfied disjunctions and falsified disjuncts.
            let mut open: Vec<Vec<Formula>> = Vec::new();
            for fs in disj.drain(..) {
                let mut rest = Vec::new();
                let mut done = false;
                for g in fs {
                    match &g {
                        Formula::Lit(l) => match cc.value(l) {
                            Some(true) => {
                                done = true;
                                break;
                            }
                            Some(false) => {}
                            None => rest.push(g),
                        },
                        Formula::False => {}
                        Formula::True => {
                            done = true;
                            break;
                        }
                        _ => rest.push(g),
                    }
                }
                if done {
                    continue;
                }
                match rest.len() {
                    0 => return Ok(false),
                    1 => conj.push(rest.pop().unwrap()),
                    _ => open.push(rest),
                }
            }
            if !conj.is_empty() {
                disj = open;
                continue;
            }
            if open.is_empty() {
                return Ok(self.leaf(&mut cc));
            }
            // Branch on the shortest open disjunction.
            let pick = (0..open.len()).min_by_key(|&i| open[i].len()).unwrap();
            let choices = open.swap_remove(pick);
            for g in choices {
                self.branches += 1;
                if self.branches > self.budget {
                    return Err(Error::Budget {
                        what: "satisfiability search".into(),
                        steps: self.budget,
                        trace: Vec::new(),
                    });
                }
                if self.run(cc.clone(), vec![g], open.clone())? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
    }
}

/// Satisfiability of a quantifier-free formula modulo `theory`.
pub fn qf_sat(phi: &Formula, theory: &Theory) -> Result<bool> {
    qf_sat_budget(phi, theory, DEFAULT_BRANCH_BUDGET)
}

pub fn qf_sat_budget(phi: &Formula, theory: &Theory, budget: usize) -> Result<bool> {
    let mut phi = phi.clone();
    let mut undef = Vec::new();
    match theory {
        Theory::Empty => {}
        Theory::Undef(sig) => undef = undef_instances(sig, &phi),
        Theory::Axioms(sig, axioms) => {
            let mut ground = BTreeSet::new();
            collect_subterms(&phi, &mut ground);
            let ground: Vec<Term> = ground.into_iter().filter(|t| t.args().is_empty()).collect();
            let inst = herbrand_instances(sig, axioms, &ground)?;
            phi = Formula::and(std::iter::once(phi).chain(inst));
        }
    }
    let mut search = Search {
        undef: &undef,
        branches: 0,
        budget,
    };
    search.run(Cc::new(), vec![phi.nnf()], Vec::new())
}

/// `phi |= psi` modulo `theory`.
pub fn entails(phi: &Formula, psi: &Formula, theory: &Theory) -> Result<bool> {
    Ok(!qf_sat(&Formula::and([phi.clone(), Formula::not(psi.clone())]), theory)?)
}

/// Both directions of [`entails`].
pub fn equivalent(phi: &Formula, psi: &Formula, theory: &Theory) -> Result<bool> {
    Ok(entails(phi, psi, theory)? && entails(psi, phi, theory)?)
}

/// Whether the conjunction of `lits` is satisfiable modulo `theory`.
pub fn lits_sat(lits: &[Literal], theory: &Theory) -> Result<bool> {
    if theory.is_empty() {
        return Ok(cc_sat(lits));
    }
    qf_sat(&Formula::conj(lits), theory)
}

pub(crate) fn eq_lit(a: &Term, b: &Term) -> Literal {
    Literal::new(true, Atom::eq_unchecked(a.clone(), b.clone()))
}
