//! Reading a cover off a saturated set.

use std::collections::HashMap;
use std::fmt;

use crate::calculus::Saturation;
use crate::error::Result;
use crate::formula::Formula;
use crate::literal::{ConstrainedLiteral, Constraint, Literal};
use crate::ordering::Precedence;
use crate::print;
use crate::solver::{lits_sat, Cc, Theory};
use crate::term::Term;

/// The clause `premises -> conclusion`; a missing conclusion is `false`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HornClause {
    /// Equalities written `(larger, smaller)`.
    pub premises: Vec<(Term, Term)>,
    pub conclusion: Option<Literal>,
}

impl HornClause {
    pub fn premise_literals(&self) -> Vec<Literal> {
        self.premises
            .iter()
            .map(|(a, b)| crate::solver::eq_lit(a, b))
            .collect()
    }

    pub fn to_formula(&self) -> Formula {
        let concl = match &self.conclusion {
            Some(l) => Formula::Lit(l.clone()),
            None => Formula::False,
        };
        if self.premises.is_empty() {
            return concl;
        }
        Formula::implies(Formula::conj(&self.premise_literals()), concl)
    }

    pub fn render(&self, prec: &Precedence) -> String {
        let concl = match &self.conclusion {
            Some(l) => print::literal(l, prec),
            None => "false".into(),
        };
        let prems: Vec<String> = self
            .premises
            .iter()
            .map(|(a, b)| format!("(= {} {})", print::term(a), print::term(b)))
            .collect();
        match prems.len() {
            0 => concl,
            1 => format!("(=> {} {concl})", prems[0]),
            _ => format!("(=> (and {}) {concl})", prems.join(" ")),
        }
    }
}

/// A conjunction of Horn clauses over the parameters.
#[derive(Clone, Debug)]
pub struct Cover {
    pub clauses: Vec<HornClause>,
    pub prec: Precedence,
}

impl Cover {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.clauses.iter().map(HornClause::to_formula))
    }

    /// One rendered clause per line, sorted.
    pub fn lines(&self) -> Vec<String> {
        self.clauses.iter().map(|c| c.render(&self.prec)).collect()
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&self.lines().join("\n"))
    }
}

#[derive(Clone, Debug)]
pub struct CoverOptions {
    pub subsumption: bool,
    pub theory: Theory,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            subsumption: true,
            theory: Theory::Empty,
        }
    }
}

/// Rewrites a constraint into an equivalent one that names each class of
/// equal terms by its least member.
pub fn normalize_constraint(c: &Constraint, prec: &Precedence) -> Vec<(Term, Term)> {
    let mut cc = Cc::new();
    let mut sides: Vec<Term> = Vec::new();
    for (a, b) in c.iter() {
        cc.assert_eq(a, b);
        sides.push(a.clone());
        sides.push(b.clone());
    }
    sides.sort();
    sides.dedup();
    let mut classes: HashMap<usize, Vec<Term>> = HashMap::new();
    for t in sides {
        let id = cc.add_term(&t);
        classes.entry(cc.find(id)).or_default().push(t);
    }
    let mut out = Vec::new();
    for members in classes.values() {
        let rep = members
            .iter()
            .min_by(|a, b| prec.compare(a, b))
            .unwrap()
            .clone();
        for m in members {
            if *m != rep {
                out.push((m.clone(), rep.clone()));
            }
        }
    }
    out.sort_by_key(|(a, b)| format!("(= {} {})", print::term(a), print::term(b)));
    out
}

pub fn horn_clause(cl: &ConstrainedLiteral, prec: &Precedence) -> HornClause {
    HornClause {
        premises: normalize_constraint(&cl.constraint, prec),
        conclusion: cl.literal.clone(),
    }
}

fn negated_clause(c: &HornClause) -> Vec<Literal> {
    let mut lits = c.premise_literals();
    if let Some(l) = &c.conclusion {
        lits.push(l.negate());
    }
    lits
}

fn is_tautology(c: &HornClause, theory: &Theory) -> Result<bool> {
    Ok(!lits_sat(&negated_clause(c), theory)?)
}

/// Whether clause `a` entails clause `b`.
pub fn clause_entails(a: &HornClause, b: &HornClause, theory: &Theory) -> Result<bool> {
    let base = negated_clause(b);
    for p in a.premise_literals() {
        let mut q = base.clone();
        q.push(p.negate());
        if lits_sat(&q, theory)? {
            return Ok(false);
        }
    }
    match &a.conclusion {
        None => Ok(true),
        Some(l) => {
            let mut q = base;
            q.push(l.clone());
            Ok(!lits_sat(&q, theory)?)
        }
    }
}

/// Drops tautologies and clauses entailed by a single other clause; among
/// equivalent clauses the one with the fewest premises survives.
pub fn subsume(clauses: Vec<HornClause>, prec: &Precedence, theory: &Theory) -> Result<Vec<HornClause>> {
    let mut cs = Vec::new();
    for c in clauses {
        if !is_tautology(&c, theory)? {
            cs.push(c);
        }
    }
    cs.sort_by_cached_key(|c| (c.premises.len(), c.render(prec)));
    let n = cs.len();
    let mut ent = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ent[j][i] = clause_entails(&cs[j], &cs[i], theory)?;
            }
        }
    }
    let keep: Vec<bool> = (0..n)
        .map(|i| !(0..n).any(|j| ent[j][i] && (j < i || !ent[i][j])))
        .collect();
    Ok(cs
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect())
}

/// The conjunction of the e-free surviving clauses, canonically ordered.
pub fn extract_cover(sat: &Saturation, opts: &CoverOptions) -> Result<Cover> {
    let prec = &sat.prec;
    let mut clauses: Vec<HornClause> = Vec::new();
    for cl in sat.e_free() {
        let h = horn_clause(&cl, prec);
        if !clauses.contains(&h) {
            clauses.push(h);
        }
    }
    if opts.subsumption {
        clauses = subsume(clauses, prec, &opts.theory)?;
    }
    clauses.sort_by_cached_key(|c| c.render(prec));
    Ok(Cover {
        clauses,
        prec: prec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{saturate, SaturationConfig};
    use crate::signature::{Fun, Sort};
    use crate::term::Var;

    fn s() -> Sort {
        Sort::new("S")
    }

    #[test]
    fn conditional_equality_cover() {
        let f = Fun::new("f", vec![s(), s()], s());
        let e = Term::var(Var::existential(1, "e", s()));
        let y = |i, n: &str| Term::var(Var::parameter(i, n, s()));
        let lits = [
            Literal::eq(Term::app(f.clone(), vec![e.clone(), y(1, "y1")]).unwrap(), y(3, "y1p")).unwrap(),
            Literal::eq(Term::app(f, vec![e, y(2, "y2")]).unwrap(), y(4, "y2p")).unwrap(),
        ];
        let sat = saturate(&lits, 1, &Precedence::default(), &SaturationConfig::default()).unwrap();
        let cover = extract_cover(&sat, &CoverOptions::default()).unwrap();
        assert_eq!(cover.to_string(), "(=> (= y1 y2) (= y1p y2p))");
    }

    #[test]
    fn unary_functions_give_true() {
        let f = Fun::new("f", vec![s()], s());
        let g = Fun::new("g", vec![s()], s());
        let e = Term::var(Var::existential(1, "e", s()));
        let y = |i, n: &str| Term::var(Var::parameter(i, n, s()));
        let lits = [
            Literal::eq(Term::app(f, vec![e.clone()]).unwrap(), y(1, "y1")).unwrap(),
            Literal::eq(Term::app(g, vec![e.clone()]).unwrap(), y(2, "y2")).unwrap(),
            Literal::neq(e, y(3, "y3")).unwrap(),
        ];
        let sat = saturate(&lits, 1, &Precedence::default(), &SaturationConfig::default()).unwrap();
        let cover = extract_cover(&sat, &CoverOptions::default()).unwrap();
        assert_eq!(cover.to_string(), "true");
    }

    #[test]
    fn constraint_normalization_uses_least_member() {
        let y = |i, n: &str| Term::var(Var::parameter(i, n, s()));
        let c = crate::literal::canonical_constraint(&[(y(1, "y1"), y(2, "y2")), (y(2, "y2"), y(3, "y3"))]).unwrap();
        let p = Precedence::default();
        let shown: Vec<String> = normalize_constraint(&c, &p)
            .iter()
            .map(|(a, b)| format!("{a}={b}"))
            .collect();
        assert_eq!(shown, ["y1=y3", "y2=y3"]);
    }

    #[test]
    fn subsumption_keeps_weaker_premises() {
        let y = |i, n: &str| Term::var(Var::parameter(i, n, s()));
        let strong = HornClause {
            premises: vec![(y(3, "y3"), y(4, "y4"))],
            conclusion: Some(Literal::eq(y(5, "s1"), y(6, "s2")).unwrap()),
        };
        let weak = HornClause {
            premises: vec![(y(1, "y1"), y(4, "y4")), (y(3, "y3"), y(4, "y4"))],
            conclusion: Some(Literal::eq(y(5, "s1"), y(6, "s2")).unwrap()),
        };
        let p = Precedence::default();
        let out = subsume(vec![weak, strong.clone()], &p, &Theory::Empty).unwrap();
        assert_eq!(out, vec![strong]);
    }

    #[test]
    fn example2_with_listed_precedence() {
        let f = Fun::new("f", vec![s(), s()], s());
        let ex = |i, n: &str| Term::var(Var::existential(i, n, s()));
        let names = ["y1", "y2", "y3", "y4", "t", "s1", "s2"];
        let y: Vec<Term> = names.iter().enumerate().map(|(i, n)| Term::var(Var::parameter(i + 1, n, s()))).collect();
        let ap = |a: &Term, b: &Term| Term::app(f.clone(), vec![a.clone(), b.clone()]).unwrap();
        let (e, e1, e2) = (ex(1, "e"), ex(2, "e1"), ex(3, "e2"));
        let lits = [
            Literal::eq(ap(&y[2], &e), y[5].clone()).unwrap(),
            Literal::eq(ap(&y[3], &e), y[6].clone()).unwrap(),
            Literal::eq(ap(&y[0], &e), e1.clone()).unwrap(),
            Literal::eq(ap(&y[1], &e), e2.clone()).unwrap(),
            Literal::eq(ap(&e1, &e2), y[4].clone()).unwrap(),
        ];
        let p = Precedence::new(&["e", "e1", "e2", "t", "s1", "s2", "y1", "y2", "y3", "y4"]);
        let sat = saturate(&lits, 3, &p, &SaturationConfig::default()).unwrap();
        let cover = extract_cover(&sat, &CoverOptions::default()).unwrap();
        assert_eq!(
            cover.lines(),
            [
                "(=> (= y3 y4) (= s1 s2))",
                "(=> (and (= y1 y3) (= y2 y3)) (= (f s1 s1) t))",
                "(=> (and (= y1 y3) (= y2 y4)) (= (f s1 s2) t))",
                "(=> (and (= y1 y4) (= y2 y3)) (= (f s2 s1) t))",
                "(=> (and (= y1 y4) (= y2 y4)) (= (f s2 s2) t))",
            ]
        );
    }
}
