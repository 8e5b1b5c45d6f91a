//! Covers modulo the undef axioms
//! `forall x (x = undef <-> f(x) = undef)`, one per unary function `f`.
//!
//! Saturation gains two rules: Ext(undef), which from `f(e_j) = u(y) || D`
//! derives `e_j = undef || D u {u(y) = undef}`, and constrained
//! Paramodulation, which rewrites with `e_j = r || C` anywhere. The ground
//! facts `f(undef) = undef` are present from the start.

use std::collections::HashSet;

use crate::calculus::saturate::{run, UndefRules};
use crate::calculus::{extract_cover, oriented, Cover, CoverOptions, Position, Saturation, SaturationConfig};
use crate::error::{Error, Result};
use crate::flatten::flatten;
use crate::literal::{Atom, ConstrainedLiteral, Literal};
use crate::ordering::Precedence;
use crate::signature::{FunKind, Signature};
use crate::solver::Theory;
use crate::term::{Term, Var};

#[derive(Clone, Debug)]
pub struct UndefConfig {
    /// Signature carrying the `undef.<sort>` constants.
    pub sig: Signature,
    /// Require every existential to be declared `= undef` or `!= undef`.
    pub validate: bool,
}

impl UndefConfig {
    pub fn new(sig: &Signature) -> Self {
        let mut sig = sig.clone();
        sig.add_undef_constants();
        UndefConfig { sig, validate: false }
    }
}

fn undef_term(sig: &Signature, t: &Term) -> Option<Term> {
    sig.undef(t.sort()).map(|c| Term::app_unchecked(c, Vec::new()))
}

/// `f(undef) = undef` for every unary function.
pub fn undef_facts(sig: &Signature) -> Vec<Literal> {
    let mut out = Vec::new();
    for f in sig.funs() {
        if f.arity() != 1 || f.kind() != FunKind::Declared {
            continue;
        }
        let (Some(a), Some(r)) = (sig.undef(&f.args()[0]), sig.undef(f.result())) else {
            continue;
        };
        let arg = Term::app_unchecked(a, Vec::new());
        let lhs = Term::app_unchecked(f.clone(), vec![arg]);
        out.push(Literal::new(true, Atom::eq_unchecked(lhs, Term::app_unchecked(r, Vec::new()))));
    }
    out
}

/// Matches `f(e_j) = u(y)` with `f` a declared unary function.
pub(crate) fn unary_application<'c>(
    cl: &'c ConstrainedLiteral,
    prec: &Precedence,
) -> Option<(&'c Term, &'c Term, &'c Var)> {
    let lit = cl.literal.as_ref()?;
    if !lit.positive {
        return None;
    }
    let (l, r) = oriented(lit, prec)?;
    let f = l.fun()?;
    if f.kind() != FunKind::Declared || f.arity() != 1 || !r.is_e_free() {
        return None;
    }
    let v = l.args()[0].as_var()?;
    v.is_existential().then_some((l, r, v))
}

/// From `f(e_j) = u(y) || D` derive `e_j = undef || D u {u(y) = undef}`.
pub fn ext_undef(premise: &ConstrainedLiteral, sig: &Signature, prec: &Precedence) -> Option<ConstrainedLiteral> {
    let (_, u, e) = unary_application(premise, prec)?;
    let ev = Term::var(e.clone());
    let ue = undef_term(sig, &ev)?;
    let uu = undef_term(sig, u)?;
    let mut c = premise.constraint.clone();
    c.insert(u.clone(), uu);
    Some(ConstrainedLiteral::new(Literal::new(true, Atom::eq_unchecked(ev, ue)), c))
}

/// `u(y) != undef || D` for a premise `f(e_j) = u(y) || D`.
pub(crate) fn nonundef_consequence(
    premise: &ConstrainedLiteral,
    sig: &Signature,
    nonundef: &HashSet<Var>,
    prec: &Precedence,
) -> Option<ConstrainedLiteral> {
    let (_, u, e) = unary_application(premise, prec)?;
    if !nonundef.contains(e) {
        return None;
    }
    let uu = undef_term(sig, u)?;
    Some(ConstrainedLiteral::new(
        Literal::new(false, Atom::eq_unchecked(u.clone(), uu)),
        premise.constraint.clone(),
    ))
}

/// The sides of an equality literal, larger first.
fn sides(l: &Literal, prec: &Precedence) -> Option<[Term; 2]> {
    let (a, b) = oriented(l, prec)?;
    Some([a.clone(), b.clone()])
}

/// From `e_j = r || C` with `e_j > r` and `L || D` where `L|_p = e_j`, derive
/// `L[r]_p || C u D`. The first index of `pos` selects the side of `L`
/// (0 for the larger one), the rest is a path into it.
pub fn paramodulate(
    left: &ConstrainedLiteral,
    right: &ConstrainedLiteral,
    pos: &Position,
    prec: &Precedence,
) -> Option<ConstrainedLiteral> {
    let ll = left.literal.as_ref()?;
    let rl = right.literal.as_ref()?;
    if !ll.positive {
        return None;
    }
    let (l, r) = oriented(ll, prec)?;
    if !l.is_evar() || l == r {
        return None;
    }
    let (&side, path) = pos.0.split_first()?;
    let mut ts = sides(rl, prec)?;
    if side > 1 || !valid_path(&ts[side], path) || ts[side].at(path) != l {
        return None;
    }
    ts[side] = ts[side].replace_at(path, r);
    let [a, b] = ts;
    Some(ConstrainedLiteral::new(
        Literal::new(rl.positive, Atom::eq_unchecked(a, b)),
        left.constraint.union(&right.constraint),
    ))
}

fn valid_path(t: &Term, path: &[usize]) -> bool {
    match path.split_first() {
        None => true,
        Some((&i, rest)) => i < t.args().len() && valid_path(&t.args()[i], rest),
    }
}

/// Positions where [`paramodulate`] applies.
pub(crate) fn paramodulation_positions(
    left: &ConstrainedLiteral,
    right: &ConstrainedLiteral,
    prec: &Precedence,
) -> Vec<Position> {
    let mut out = Vec::new();
    let (Some(ll), Some(rl)) = (&left.literal, &right.literal) else {
        return out;
    };
    if !ll.positive {
        return out;
    }
    let Some((l, r)) = oriented(ll, prec) else { return out };
    if !l.is_evar() || l == r {
        return out;
    }
    let Some(ts) = sides(rl, prec) else { return out };
    for (side, t) in ts.iter().enumerate() {
        let mut path = vec![side];
        occurrences(t, l, &mut path, &mut out);
    }
    out
}

fn occurrences(t: &Term, target: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    if t == target {
        out.push(Position(path.clone()));
        return;
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        occurrences(a, target, path, out);
        path.pop();
    }
}

fn nonundef_vars(init: &[Literal], sig: &Signature) -> HashSet<Var> {
    let mut out = HashSet::new();
    for l in init {
        if let (false, Atom::Eq(a, b)) = (l.positive, &l.atom) {
            for (x, y) in [(a, b), (b, a)] {
                if let Some(v) = x.as_var().filter(|v| v.is_existential()) {
                    if undef_term(sig, x).as_ref() == Some(y) {
                        out.insert(v.clone());
                    }
                }
            }
        }
    }
    out
}

fn check_declared(init: &[Literal], evars: &[Var], sig: &Signature) -> Result<()> {
    for v in evars {
        let ev = Term::var(v.clone());
        let Some(u) = undef_term(sig, &ev) else { continue };
        let declared = init.iter().any(|l| match &l.atom {
            Atom::Eq(a, b) => (*a == ev && *b == u) || (*a == u && *b == ev),
            Atom::Rel(..) => false,
        });
        if !declared {
            return Err(Error::Input(format!(
                "existential {} carries neither {} = undef nor {} != undef",
                v.name(),
                v.name(),
                v.name()
            )));
        }
    }
    Ok(())
}

/// Saturation with the undef rules added.
pub fn saturate_undef(
    init: &[Literal],
    evars: &[Var],
    prec: &Precedence,
    cfg: &SaturationConfig,
    ucfg: &UndefConfig,
) -> Result<Saturation> {
    if ucfg.validate {
        check_declared(init, evars, &ucfg.sig)?;
    }
    let rules = UndefRules {
        sig: ucfg.sig.clone(),
        nonundef: nonundef_vars(init, &ucfg.sig),
    };
    run(init, &undef_facts(&ucfg.sig), evars.len(), prec, cfg, Some(&rules))
}

/// Cover of `exists evars. body` modulo the undef axioms.
pub fn undef_cover(
    body: &[Literal],
    evars: &[Var],
    prec: &Precedence,
    cfg: &SaturationConfig,
    ucfg: &UndefConfig,
    subsumption: bool,
) -> Result<Cover> {
    let flat = flatten(body, evars);
    let sat = saturate_undef(&flat.literals, &flat.evars, prec, cfg, ucfg)?;
    extract_cover(
        &sat,
        &CoverOptions {
            subsumption,
            theory: Theory::Undef(ucfg.sig.clone()),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::solver::entails;

    fn setup() -> (Signature, Term, Term, Term) {
        let mut sig = Signature::new();
        sig.add_sort("S").unwrap();
        sig.add_sort("U").unwrap();
        sig.add_fun("f", &["S"], "U").unwrap();
        sig.add_fun("g", &["S"], "U").unwrap();
        sig.add_undef_constants();
        let s = sig.sort("S").unwrap();
        let u = sig.sort("U").unwrap();
        let e = Term::var(Var::existential(1, "e", s));
        let y1 = Term::var(Var::parameter(1, "y1", u.clone()));
        let y2 = Term::var(Var::parameter(2, "y2", u));
        (sig, e, y1, y2)
    }

    fn app(sig: &Signature, f: &str, t: Term) -> Term {
        Term::app(sig.fun(f).unwrap(), vec![t]).unwrap()
    }

    fn undef(sig: &Signature, sort: &str) -> Term {
        Term::constant(sig.undef(&sig.sort(sort).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn ext_undef_instances() {
        let (sig, e, y1, y2) = setup();
        let p = Precedence::default();
        let prem = ConstrainedLiteral::new(Literal::eq(app(&sig, "f", e.clone()), y1.clone()).unwrap(), Default::default());
        let c = ext_undef(&prem, &sig, &p).unwrap();
        assert_eq!(crate::calculus::show_clause(&c, &p), "e = undef.S || {y1 = undef.U}");
        let s = sig.sort("S").unwrap();
        let e2 = Term::var(Var::existential(2, "e2", s));
        let not_free = ConstrainedLiteral::new(Literal::eq(app(&sig, "f", e.clone()), app(&sig, "g", e2)).unwrap(), Default::default());
        assert_eq!(ext_undef(&not_free, &sig, &p), None);
        let guarded = ConstrainedLiteral::new(
            Literal::eq(app(&sig, "f", e), y1.clone()).unwrap(),
            crate::literal::canonical_constraint(&[(y1, y2)]).unwrap(),
        );
        let c = ext_undef(&guarded, &sig, &p).unwrap();
        assert_eq!(c.constraint.len(), 2);
    }

    #[test]
    fn paramodulation_instances() {
        let (sig, e, y1, _) = setup();
        let p = Precedence::default();
        let s = sig.sort("S").unwrap();
        let e2 = Term::var(Var::existential(2, "e2", s.clone()));
        let ys = Term::var(Var::parameter(3, "y3", s));
        let left = ConstrainedLiteral::new(Literal::eq(e.clone(), e2.clone()).unwrap(), Default::default());
        let right = ConstrainedLiteral::new(Literal::eq(app(&sig, "f", e.clone()), undef(&sig, "U")).unwrap(), Default::default());
        let c = paramodulate(&left, &right, &Position(vec![0, 0]), &p).unwrap();
        assert_eq!(crate::calculus::show_clause(&c, &p), "f(e2) = undef.U || {}");
        let left = ConstrainedLiteral::new(Literal::eq(e.clone(), ys).unwrap(), Default::default());
        let right = ConstrainedLiteral::new(Literal::eq(app(&sig, "f", e.clone()), y1.clone()).unwrap(), Default::default());
        let c = paramodulate(&left, &right, &Position(vec![0, 0]), &p).unwrap();
        assert_eq!(crate::calculus::show_clause(&c, &p), "f(y3) = y1 || {}");
        assert_eq!(paramodulate(&right, &left, &Position(vec![0]), &p), None);
    }

    #[test]
    fn forced_undef_and_forced_defined() {
        let (sig, e, y1, _) = setup();
        let p = Precedence::default();
        let ucfg = UndefConfig::new(&sig);
        let th = Theory::Undef(ucfg.sig.clone());
        let ev = e.as_var().unwrap().clone();
        let cfg = SaturationConfig::default();
        let body = [
            Literal::eq(app(&sig, "f", e.clone()), undef(&sig, "U")).unwrap(),
            Literal::eq(app(&sig, "g", e.clone()), y1.clone()).unwrap(),
        ];
        let cover = undef_cover(&body, std::slice::from_ref(&ev), &p, &cfg, &ucfg, true).unwrap();
        let want = Formula::lit(Literal::eq(y1.clone(), undef(&sig, "U")).unwrap());
        assert!(entails(&cover.to_formula(), &want, &th).unwrap());
        let body = [
            Literal::eq(app(&sig, "f", e.clone()), y1.clone()).unwrap(),
            Literal::neq(e, undef(&sig, "S")).unwrap(),
        ];
        let cover = undef_cover(&body, &[ev], &p, &cfg, &ucfg, true).unwrap();
        let want = Formula::lit(Literal::neq(y1, undef(&sig, "U")).unwrap());
        assert!(entails(&cover.to_formula(), &want, &th).unwrap());
    }

    #[test]
    fn validation_requires_declarations() {
        let (sig, e, y1, _) = setup();
        let mut ucfg = UndefConfig::new(&sig);
        ucfg.validate = true;
        let body = [Literal::eq(app(&sig, "f", e.clone()), y1).unwrap()];
        let r = saturate_undef(&body, &[e.as_var().unwrap().clone()], &Precedence::default(), &SaturationConfig::default(), &ucfg);
        assert!(matches!(r, Err(Error::Input(_))));
    }
}
