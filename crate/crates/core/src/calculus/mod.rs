//! The constrained superposition calculus: the matching procedure `E`, the
//! inference and simplification rules, saturation and cover extraction.

pub mod cover;
pub mod degree;
pub mod saturate;

use std::fmt;

pub use cover::{extract_cover, Cover, CoverOptions, HornClause};
pub use saturate::{saturate, Saturation, SaturationConfig};

use crate::error::Result;
use crate::flatten::flatten;
use crate::literal::{Atom, ConstrainedLiteral, Constraint, Literal};
use crate::ordering::Precedence;
use crate::signature::{Fun, FunKind, Sort};
use crate::term::{Node, Term, Var};

/// Cover of `exists evars. body` in the empty theory: flattening,
/// saturation and extraction.
pub fn cover(body: &[Literal], evars: &[Var], prec: &Precedence, cfg: &SaturationConfig, opts: &CoverOptions) -> Result<Cover> {
    let flat = flatten(body, evars);
    let sat = saturate(&flat.literals, flat.evars.len(), prec, cfg)?;
    extract_cover(&sat, opts)
}

/// Core of `E(t, u)`; `free` decides which terms count as parameters.
/// Appends the produced equalities to `out` and returns `false` on failure.
pub(crate) fn e_match_by(t: &Term, u: &Term, free: &impl Fn(&Term) -> bool, out: &mut Vec<(Term, Term)>) -> bool {
    let (ft, fu) = (free(t), free(u));
    if ft != fu {
        return false;
    }
    if t == u {
        return true;
    }
    if ft {
        out.push((t.clone(), u.clone()));
        return true;
    }
    match (t.node(), u.node()) {
        (Node::App(f, a), Node::App(g, b)) if f == g => {
            a.iter().zip(b.iter()).all(|(x, y)| e_match_by(x, y, free, out))
        }
        _ => false,
    }
}

/// `E(t, u)`: the parameter equalities under which two e-flat terms coincide,
/// or `None` when they cannot.
pub fn e_match(t: &Term, u: &Term) -> Option<Constraint> {
    let mut pairs = Vec::new();
    if !e_match_by(t, u, &Term::is_e_free, &mut pairs) {
        return None;
    }
    let mut c = Constraint::empty();
    for (a, b) in pairs {
        c.insert(a, b);
    }
    Some(c)
}

/// A position inside the larger side of an equality, as argument indices.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// The sides of an equality literal as `(larger, smaller)`.
pub(crate) fn oriented<'a>(l: &'a Literal, prec: &Precedence) -> Option<(&'a Term, &'a Term)> {
    match &l.atom {
        Atom::Eq(a, b) => Some(prec.orient(a, b)),
        Atom::Rel(..) => None,
    }
}

/// Positions of `s` where a non-e-free left-hand side may match: the root and
/// arguments that are existential variables.
pub(crate) fn candidate_positions(s: &Term) -> Vec<Position> {
    let mut out = Vec::new();
    if s.is_e_free() {
        return out;
    }
    out.push(Position::root());
    for (i, a) in s.args().iter().enumerate() {
        if a.is_evar() {
            out.push(Position(vec![i]));
        }
    }
    out
}

fn superpose(
    left: &ConstrainedLiteral,
    right: &ConstrainedLiteral,
    pos: &Position,
    want_positive: bool,
    prec: &Precedence,
) -> Option<ConstrainedLiteral> {
    if left.is_e_free() || right.is_e_free() {
        return None;
    }
    let ll = left.literal.as_ref()?;
    let rl = right.literal.as_ref()?;
    if !ll.positive || rl.positive != want_positive {
        return None;
    }
    let (l, r) = oriented(ll, prec)?;
    let (s, t) = oriented(rl, prec)?;
    if l == r || s == t {
        return None;
    }
    if !pos.0.is_empty() && (pos.0.len() > 1 || pos.0[0] >= s.args().len()) {
        return None;
    }
    let sub = s.at(&pos.0);
    let e = e_match(sub, l)?;
    let new_s = s.replace_at(&pos.0, r);
    let lit = Literal::new(want_positive, Atom::eq_unchecked(new_s, t.clone()));
    let c = left.constraint.union(&right.constraint).union(&e);
    Some(ConstrainedLiteral::new(lit, c))
}

/// Superposition into a positive equality: from `l = r || C` and
/// `s = t || D` derive `s[r]_p = t || C u D u E(s|_p, l)`.
pub fn superpose_right(
    left: &ConstrainedLiteral,
    right: &ConstrainedLiteral,
    pos: &Position,
    prec: &Precedence,
) -> Option<ConstrainedLiteral> {
    superpose(left, right, pos, true, prec)
}

/// Superposition into a disequality.
pub fn superpose_left(
    left: &ConstrainedLiteral,
    right: &ConstrainedLiteral,
    pos: &Position,
    prec: &Precedence,
) -> Option<ConstrainedLiteral> {
    superpose(left, right, pos, false, prec)
}

/// From `t != u || C` derive `false || C u E(t, u)`.
pub fn reflexion(cl: &ConstrainedLiteral) -> Option<ConstrainedLiteral> {
    if cl.is_e_free() {
        return None;
    }
    let l = cl.literal.as_ref()?;
    match (&l.atom, l.positive) {
        (Atom::Eq(t, u), false) => {
            let e = e_match(t, u)?;
            Some(ConstrainedLiteral::bottom(cl.constraint.union(&e)))
        }
        _ => None,
    }
}

/// If the literal is `e_j = t` with `t` e-free, returns `(e_j, t)`.
pub fn as_definition(l: &Literal) -> Option<(&Var, &Term)> {
    match (&l.atom, l.positive) {
        (Atom::Eq(a, b), true) => {
            if let (Some(v), true) = (a.as_var(), b.is_e_free()) {
                if v.is_existential() {
                    return Some((v, b));
                }
            }
            if let (Some(v), true) = (b.as_var(), a.is_e_free()) {
                if v.is_existential() {
                    return Some((v, a));
                }
            }
            None
        }
        _ => None,
    }
}

/// Rewrites every occurrence of `e_j` in `target` with `rule = (e_j = t(y) || D)`
/// provided `D` is included in the target's constraint.
pub fn demodulate(target: &ConstrainedLiteral, rule: &ConstrainedLiteral) -> Option<ConstrainedLiteral> {
    let (v, t) = as_definition(rule.literal.as_ref()?)?;
    let lit = target.literal.as_ref()?;
    if !rule.constraint.is_subset(&target.constraint) {
        return None;
    }
    let ev = Term::var(v.clone());
    if !lit.atom.terms().iter().any(|x| x.contains(&ev)) {
        return None;
    }
    let new = lit.map_terms(|x| x.replace(&ev, t));
    Some(ConstrainedLiteral::new(new, target.constraint.clone()))
}

fn relation_sort(name: &str) -> Sort {
    Sort::new(&format!("bool.{name}"))
}

fn relation_tag(r: &crate::signature::Rel) -> Fun {
    Fun::with_kind(r.name(), r.args().to_vec(), relation_sort(r.name()), FunKind::RelationTag)
}

fn relation_true(name: &str) -> Term {
    let f = Fun::with_kind(&format!("true.{name}"), Vec::new(), relation_sort(name), FunKind::TrueConst);
    Term::app_unchecked(f, Vec::new())
}

/// Encodes `R(t..)` as `R(t..) = true.R`.
pub fn encode_relations(l: &Literal) -> Literal {
    match &l.atom {
        Atom::Rel(r, args) => {
            let lhs = Term::app_unchecked(relation_tag(r), args.clone());
            Literal::new(l.positive, Atom::eq_unchecked(lhs, relation_true(r.name())))
        }
        Atom::Eq(..) => l.clone(),
    }
}

/// Inverse of [`encode_relations`]; other literals are returned unchanged.
pub fn decode_relations(l: &Literal) -> Literal {
    if let Atom::Eq(a, b) = &l.atom {
        for (x, y) in [(a, b), (b, a)] {
            if let (Some(f), Some(g)) = (x.fun(), y.fun()) {
                if f.kind() == FunKind::RelationTag && g.kind() == FunKind::TrueConst {
                    let r = crate::signature::Rel::new(f.name(), f.args().to_vec());
                    return Literal::new(l.positive, Atom::Rel(r, x.args().to_vec()));
                }
            }
        }
    }
    l.clone()
}

/// Human-readable literal with the larger side of equalities first.
pub fn show_literal(l: &Literal, prec: &Precedence) -> String {
    let l = decode_relations(l);
    match &l.atom {
        Atom::Eq(a, b) => {
            let (x, y) = prec.orient(a, b);
            if l.positive {
                format!("{x} = {y}")
            } else {
                format!("{x} != {y}")
            }
        }
        Atom::Rel(..) => l.to_string(),
    }
}

pub fn show_constraint(c: &Constraint, prec: &Precedence) -> String {
    let mut items: Vec<String> = c
        .iter()
        .map(|(a, b)| {
            let (x, y) = prec.orient(a, b);
            format!("{x} = {y}")
        })
        .collect();
    items.sort();
    format!("{{{}}}", items.join(", "))
}

pub fn show_clause(cl: &ConstrainedLiteral, prec: &Precedence) -> String {
    let lit = match &cl.literal {
        Some(l) => show_literal(l, prec),
        None => "false".to_string(),
    };
    format!("{lit} || {}", show_constraint(&cl.constraint, prec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::canonical_constraint;

    fn s() -> Sort {
        Sort::new("S")
    }
    fn e(i: usize) -> Term {
        Term::var(Var::existential(i, &format!("e{i}"), s()))
    }
    fn y(i: usize) -> Term {
        Term::var(Var::parameter(i, &format!("y{i}"), s()))
    }
    fn app(name: &str, args: Vec<Term>) -> Term {
        Term::app(Fun::new(name, vec![s(); args.len()], s()), args).unwrap()
    }
    fn cl(l: Literal, pairs: &[(Term, Term)]) -> ConstrainedLiteral {
        ConstrainedLiteral::new(l, canonical_constraint(pairs).unwrap())
    }

    #[test]
    fn e_match_cases() {
        assert_eq!(
            e_match(&app("f", vec![e(1), y(1)]), &app("f", vec![e(1), y(2)])),
            Some(canonical_constraint(&[(y(1), y(2))]).unwrap())
        );
        assert_eq!(e_match(&e(1), &e(1)), Some(Constraint::empty()));
        assert_eq!(e_match(&e(1), &app("f", vec![e(1)])), None);
        assert_eq!(
            e_match(&y(1), &app("g", vec![y(2)])),
            Some(canonical_constraint(&[(y(1), app("g", vec![y(2)]))]).unwrap())
        );
        assert_eq!(e_match(&e(1), &e(2)), None);
        assert_eq!(e_match(&y(1), &e(2)), None);
        assert_eq!(e_match(&app("f", vec![e(1)]), &app("g", vec![e(1)])), None);
    }

    #[test]
    fn superposition_right_at_root() {
        let p = Precedence::default();
        let a = cl(Literal::eq(app("f", vec![e(1), y(1)]), e(2)).unwrap(), &[]);
        let b = cl(Literal::eq(app("f", vec![e(1), y(3)]), e(3)).unwrap(), &[]);
        let c = superpose_right(&a, &b, &Position::root(), &p).unwrap();
        assert_eq!(show_clause(&c, &p), "e2 = e3 || {y1 = y3}");
    }

    #[test]
    fn superposition_right_below_root() {
        let p = Precedence::default();
        let a = cl(Literal::eq(e(1), e(2)).unwrap(), &[(y(1), y(2))]);
        let b = cl(Literal::eq(app("f", vec![e(1), e(2)]), app("t", vec![])).unwrap(), &[]);
        let c = superpose_right(&a, &b, &Position(vec![0]), &p).unwrap();
        assert_eq!(show_clause(&c, &p), "f(e2, e2) = t || {y1 = y2}");
        let clash = cl(Literal::eq(app("g", vec![e(1)]), y(1)).unwrap(), &[]);
        assert_eq!(superpose_right(&clash, &b, &Position::root(), &p), None);
    }

    #[test]
    fn superposition_left_and_reflexion() {
        let p = Precedence::default();
        let a = cl(Literal::eq(e(1), e(2)).unwrap(), &[(y(1), y(2))]);
        let b = cl(Literal::neq(e(1), e(2)).unwrap(), &[]);
        let c = superpose_left(&a, &b, &Position::root(), &p).unwrap();
        assert_eq!(show_clause(&c, &p), "e2 != e2 || {y1 = y2}");
        let d = reflexion(&c).unwrap();
        assert_eq!(show_clause(&d, &p), "false || {y1 = y2}");
        let free = cl(Literal::eq(y(1), y(2)).unwrap(), &[]);
        assert_eq!(superpose_left(&free, &b, &Position::root(), &p), None);
        assert_eq!(reflexion(&cl(Literal::neq(y(1), y(2)).unwrap(), &[])), None);
        let clash = cl(Literal::neq(app("f", vec![e(1)]), app("g", vec![e(1)])).unwrap(), &[]);
        assert_eq!(reflexion(&clash), None);
    }

    #[test]
    fn demodulation_requires_included_constraint() {
        let target = cl(Literal::eq(app("f", vec![e(1)]), e(2)).unwrap(), &[]);
        let rule = cl(Literal::eq(e(1), y(1)).unwrap(), &[]);
        let out = demodulate(&target, &rule).unwrap();
        assert_eq!(out.literal.unwrap(), Literal::eq(app("f", vec![y(1)]), e(2)).unwrap());
        let guarded = cl(Literal::eq(e(1), y(1)).unwrap(), &[(y(2), y(3))]);
        assert_eq!(demodulate(&target, &guarded), None);
    }

    #[test]
    fn relation_encoding_round_trips() {
        let r = crate::signature::Rel::new("R", vec![s(), s()]);
        let l = Literal::rel(false, r, vec![e(1), y(1)]).unwrap();
        let enc = encode_relations(&l);
        assert!(matches!(enc.atom, Atom::Eq(..)));
        assert_eq!(decode_relations(&enc), l);
    }
}
