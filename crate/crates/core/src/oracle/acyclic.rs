//! Covers over acyclic signatures by enumerating the finitely many clauses
//! over generable parameter terms.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::signature::{Signature, Sort};
use crate::solver::{generable_terms, qf_sat, Cc, Theory};
use crate::term::{Term, Var};

#[derive(Clone, Debug)]
pub struct AcyclicOptions {
    /// Largest clause size enumerated.
    pub width: usize,
    /// Bound on entailment checks before the result is marked incomplete.
    pub max_checks: usize,
}

impl Default for AcyclicOptions {
    fn default() -> Self {
        AcyclicOptions {
            width: 2,
            max_checks: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AcyclicCover {
    /// Conjunction of the entailed clauses.
    pub formula: Formula,
    pub clauses: Vec<Vec<Literal>>,
    /// False when the check budget ran out before all clauses were tried.
    pub complete: bool,
}

/// The signature of the symbols occurring in `phi`.
pub fn signature_of(phi: &Formula) -> Signature {
    let mut sig = Signature::new();
    let mut sorts = BTreeSet::new();
    let mut funs = Vec::new();
    let mut rels = Vec::new();
    phi.for_each_literal(&mut |l| {
        if let Atom::Rel(r, _) = &l.atom {
            if !rels.contains(r) {
                rels.push(r.clone());
            }
            sorts.extend(r.args().iter().cloned());
        }
        for t in l.atom.terms() {
            t.for_each_subterm(&mut |s| {
                sorts.insert(s.sort().clone());
                if let Some(f) = s.fun() {
                    if !funs.contains(f) {
                        funs.push(f.clone());
                    }
                }
            });
        }
    });
    for s in &sorts {
        let _ = sig.add_sort(s.name());
    }
    for f in funs {
        let args: Vec<&str> = f.args().iter().map(Sort::name).collect();
        let _ = sig.add_fun(f.name(), &args, f.result().name());
    }
    for r in rels {
        let args: Vec<&str> = r.args().iter().map(Sort::name).collect();
        let _ = sig.add_rel(r.name(), &args);
    }
    sig
}

struct Checker<'a> {
    theory: &'a Theory,
    phi: &'a Formula,
    base: Option<Cc>,
    checks: usize,
    max_checks: usize,
}

impl Checker<'_> {
    /// Whether `phi` entails the disjunction of `clause`; `None` once the
    /// budget is spent.
    fn entails(&mut self, clause: &[Literal]) -> Result<Option<bool>> {
        if self.checks >= self.max_checks {
            return Ok(None);
        }
        self.checks += 1;
        if let Some(base) = &self.base {
            let mut cc = base.clone();
            let consistent = cc.is_consistent() && clause.iter().all(|l| cc.assert_lit(&l.negate()));
            return Ok(Some(!consistent));
        }
        let negated = Formula::and(clause.iter().map(|l| Formula::lit(l.negate())));
        Ok(Some(!qf_sat(&Formula::and([self.phi.clone(), negated]), self.theory)?))
    }
}

/// Conjoins every clause of at most `width` literals over the generable
/// parameter terms that `phi` entails modulo `theory`, then drops clauses
/// implied by the remaining ones.
pub fn acyclic_cover(phi: &Formula, theory: &Theory, opts: &AcyclicOptions) -> Result<AcyclicCover> {
    let sig = match theory.signature() {
        Some(sig) => sig.clone(),
        None => signature_of(phi),
    };
    if !sig.is_acyclic() {
        return Err(Error::Unsupported("acyclic cover needs an acyclic signature".into()));
    }
    let mut params: Vec<Var> = phi.vars().into_iter().filter(|v| !v.is_existential()).collect();
    params.sort();
    params.dedup();
    let seeds: Vec<Term> = params.into_iter().map(Term::var).collect();
    let terms = generable_terms(&sig, &seeds)?;
    let mut atoms = Vec::new();
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i + 1..] {
            if a.sort() == b.sort() {
                atoms.push(Atom::eq_unchecked(a.clone(), b.clone()));
            }
        }
    }
    for r in sig.rels() {
        let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
        for s in r.args() {
            let choices: Vec<&Term> = terms.iter().filter(|t| t.sort() == s).collect();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    choices.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push((*c).clone());
                        t
                    })
                })
                .collect();
        }
        for args in tuples {
            atoms.push(Atom::rel(r.clone(), args)?);
        }
    }
    let lits: Vec<Literal> = atoms
        .iter()
        .flat_map(|a| [Literal::new(true, a.clone()), Literal::new(false, a.clone())])
        .collect();

    let base = match (theory, phi.as_conjunction()) {
        (Theory::Empty, Some(body)) => {
            let mut cc = Cc::new();
            for l in &body {
                cc.assert_lit(l);
            }
            Some(cc)
        }
        _ => None,
    };
    let mut checker = Checker {
        theory,
        phi,
        base,
        checks: 0,
        max_checks: opts.max_checks,
    };
    if checker.entails(&[])? == Some(true) {
        return Ok(AcyclicCover {
            formula: Formula::False,
            clauses: vec![Vec::new()],
            complete: true,
        });
    }
    let valid_checker = |clause: &[Literal]| -> Result<bool> {
        let negated = Formula::and(clause.iter().map(|l| Formula::lit(l.negate())));
        Ok(!qf_sat(&negated, theory)?)
    };

    let mut complete = true;
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    'width: for _ in 0..opts.width {
        let mut next = Vec::new();
        for c in &frontier {
            let start = c.last().map_or(0, |&i| i + 1);
            for i in start..lits.len() {
                if c.iter().any(|&j| lits[j].atom == lits[i].atom) {
                    continue;
                }
                let mut d = c.clone();
                d.push(i);
                if found.iter().any(|f| f.iter().all(|x| d.contains(x))) {
                    continue;
                }
                let clause: Vec<Literal> = d.iter().map(|&j| lits[j].clone()).collect();
                match checker.entails(&clause)? {
                    None => {
                        complete = false;
                        break 'width;
                    }
                    Some(true) => {
                        if !valid_checker(&clause)? {
                            found.push(d);
                        }
                    }
                    Some(false) => next.push(d),
                }
            }
        }
        frontier = next;
    }

    let mut clauses: Vec<Vec<Literal>> = found
        .iter()
        .map(|d| d.iter().map(|&j| lits[j].clone()).collect())
        .collect();
    let as_formula = |c: &[Literal]| Formula::or(c.iter().cloned().map(Formula::lit));
    let mut i = 0;
    while i < clauses.len() && clauses.len() <= 200 {
        let rest = Formula::and(
            clauses
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| as_formula(c)),
        );
        let neg = Formula::not(as_formula(&clauses[i]));
        if !qf_sat(&Formula::and([rest, neg]), theory)? {
            clauses.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(AcyclicCover {
        formula: Formula::and(clauses.iter().map(|c| as_formula(c))),
        clauses,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Fun;
    use crate::solver::equivalent;

    fn s() -> Sort {
        Sort::new("S")
    }
    fn u() -> Sort {
        Sort::new("U")
    }

    #[test]
    fn shared_image_forces_equality() {
        let f = Fun::new("f", vec![s()], u());
        let e = Term::var(Var::existential(1, "e", s()));
        let y1 = Term::var(Var::parameter(1, "y1", u()));
        let y2 = Term::var(Var::parameter(2, "y2", u()));
        let fe = Term::app(f, vec![e]).unwrap();
        let phi = Formula::conj(&[
            Literal::eq(fe.clone(), y1.clone()).unwrap(),
            Literal::eq(fe, y2.clone()).unwrap(),
        ]);
        let c = acyclic_cover(&phi, &Theory::Empty, &AcyclicOptions::default()).unwrap();
        assert!(c.complete);
        let expect = Formula::lit(Literal::eq(y1, y2).unwrap());
        assert!(equivalent(&c.formula, &expect, &Theory::Empty).unwrap());
        assert_eq!(c.clauses.len(), 1);
    }

    #[test]
    fn independent_images_give_true() {
        let f = Fun::new("f", vec![s()], u());
        let g = Fun::new("g", vec![s()], u());
        let e = Term::var(Var::existential(1, "e", s()));
        let y1 = Term::var(Var::parameter(1, "y1", u()));
        let y2 = Term::var(Var::parameter(2, "y2", u()));
        let phi = Formula::conj(&[
            Literal::eq(Term::app(f, vec![e.clone()]).unwrap(), y1).unwrap(),
            Literal::eq(Term::app(g, vec![e]).unwrap(), y2).unwrap(),
        ]);
        let c = acyclic_cover(&phi, &Theory::Empty, &AcyclicOptions::default()).unwrap();
        assert_eq!(c.formula, Formula::True);
    }

    #[test]
    fn e_free_input_is_its_own_cover() {
        let f = Fun::new("f", vec![s()], u());
        let y1 = Term::var(Var::parameter(1, "y1", s()));
        let y2 = Term::var(Var::parameter(2, "y2", s()));
        let z = Term::var(Var::parameter(3, "z", u()));
        let phi = Formula::conj(&[
            Literal::neq(y1.clone(), y2).unwrap(),
            Literal::eq(Term::app(f, vec![y1]).unwrap(), z).unwrap(),
        ]);
        let c = acyclic_cover(&phi, &Theory::Empty, &AcyclicOptions::default()).unwrap();
        assert!(equivalent(&c.formula, &phi, &Theory::Empty).unwrap());
    }

    #[test]
    fn contradiction_gives_false() {
        let e = Term::var(Var::existential(1, "e", s()));
        let y = Term::var(Var::parameter(1, "y", s()));
        let phi = Formula::conj(&[
            Literal::neq(e.clone(), e.clone()).unwrap(),
            Literal::eq(y.clone(), y).unwrap(),
        ]);
        let c = acyclic_cover(&phi, &Theory::Empty, &AcyclicOptions::default()).unwrap();
        assert_eq!(c.formula, Formula::False);
    }

    #[test]
    fn cyclic_signature_is_rejected() {
        let f = Fun::new("f", vec![s()], s());
        let y1 = Term::var(Var::parameter(1, "y1", s()));
        let phi = Formula::lit(Literal::eq(Term::app(f, vec![y1.clone()]).unwrap(), y1).unwrap());
        assert!(acyclic_cover(&phi, &Theory::Empty, &AcyclicOptions::default()).is_err());
    }
}
