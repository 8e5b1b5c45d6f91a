//! Quadratic cover computation for signatures whose function symbols are all
//! unary (relations may have any arity).
//!
//! Constraints stay empty in this setting, so the calculus collapses to a
//! fixed sequence: close under restricted superposition, mark existentials
//! that acquire an explicit definition, check for reflexion, keep the
//! literals over parameters and marked variables, and resolve relation
//! literals on unmarked variables.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::calculus::e_match_by;
use crate::error::{Error, Result};
use crate::flatten::flatten;
use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::ordering::Precedence;
use crate::print;
use crate::signature::{Fun, Rel};
use crate::term::{Term, Var};

/// `exists e' (Def(e', y) and psi(e', y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagCover {
    /// Each definition uses only parameters and earlier defined variables.
    pub defs: Vec<(Var, Term)>,
    /// Clauses (disjunctions of literals); an empty clause is `false`.
    pub psi: Vec<Vec<Literal>>,
}

impl DagCover {
    pub fn is_false(&self) -> bool {
        self.psi.iter().any(Vec::is_empty)
    }

    pub fn render(&self, prec: &Precedence) -> String {
        let defs: Vec<String> = self
            .defs
            .iter()
            .map(|(v, t)| format!("(= {} {})", v.name(), print::term(t)))
            .collect();
        let psi: Vec<String> = self.psi.iter().map(|c| render_clause(c, prec)).collect();
        let body = match (defs.len(), psi.len()) {
            (0, 0) => "true".to_string(),
            (0, 1) => psi[0].clone(),
            _ => format!("(and {})", defs.into_iter().chain(psi).collect::<Vec<_>>().join(" ")),
        };
        if self.defs.is_empty() {
            return body;
        }
        let binders: Vec<String> = self
            .defs
            .iter()
            .map(|(v, _)| format!("({} {})", v.name(), v.sort()))
            .collect();
        format!("(exists ({}) {body})", binders.join(" "))
    }
}

fn render_clause(c: &[Literal], prec: &Precedence) -> String {
    match c.len() {
        0 => "false".into(),
        1 => print::literal(&c[0], prec),
        _ => {
            let parts: Vec<String> = c.iter().map(|l| print::literal(l, prec)).collect();
            format!("(or {})", parts.join(" "))
        }
    }
}

impl fmt::Display for DagCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&Precedence::default()))
    }
}

fn check_unary(lits: &[Literal]) -> Result<()> {
    for l in lits {
        for t in l.atom.terms() {
            let mut bad = None;
            t.for_each_subterm(&mut |s| {
                if let Some(f) = s.fun() {
                    if f.arity() > 1 {
                        bad = Some(f.name().to_string());
                    }
                }
            });
            if let Some(name) = bad {
                return Err(Error::Signature(format!(
                    "function {name} is not unary; the database procedure needs unary functions"
                )));
            }
        }
    }
    Ok(())
}

fn evars(l: &Literal) -> Vec<Var> {
    let mut vs = Vec::new();
    l.vars(&mut vs);
    vs.retain(Var::is_existential);
    vs.sort();
    vs.dedup();
    vs
}

/// `f(e_i)` side of a positive equality, with the other side.
fn application_side(l: &Literal) -> Option<((Fun, Var), Term)> {
    if !l.positive {
        return None;
    }
    let Atom::Eq(a, b) = &l.atom else { return None };
    for (x, y) in [(a, b), (b, a)] {
        if let (Some(f), [arg]) = (x.fun(), x.args()) {
            if let Some(v) = arg.as_var().filter(|v| v.is_existential()) {
                return Some(((f.clone(), v.clone()), y.clone()));
            }
        }
    }
    None
}

/// Positive `e_i = e_j` as `(larger, smaller)`.
fn evar_equality(l: &Literal, prec: &Precedence) -> Option<(Var, Var)> {
    if !l.positive {
        return None;
    }
    let Atom::Eq(a, b) = &l.atom else { return None };
    let (big, small) = prec.orient(a, b);
    match (big.as_var(), small.as_var()) {
        (Some(x), Some(y)) if x.is_existential() && y.is_existential() && x != y => Some((x.clone(), y.clone())),
        _ => None,
    }
}

/// Every literal obtained by replacing one occurrence of `from` with `to`.
fn single_replacements(l: &Literal, from: &Var, to: &Term) -> Vec<Literal> {
    let target = Term::var(from.clone());
    let mut out = Vec::new();
    let terms: Vec<Term> = l.atom.terms().into_iter().cloned().collect();
    for (i, t) in terms.iter().enumerate() {
        let mut paths = Vec::new();
        collect_paths(t, &target, &mut Vec::new(), &mut paths);
        for p in paths {
            let mut ts = terms.clone();
            ts[i] = t.replace_at(&p, to);
            let atom = match &l.atom {
                Atom::Eq(..) => Atom::eq_unchecked(ts[0].clone(), ts[1].clone()),
                Atom::Rel(r, _) => Atom::Rel(r.clone(), ts),
            };
            out.push(Literal::new(l.positive, atom));
        }
    }
    out
}

fn collect_paths(t: &Term, target: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if t == target {
        out.push(path.clone());
        return;
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        collect_paths(a, target, path, out);
        path.pop();
    }
}

struct Closure<'p> {
    prec: &'p Precedence,
    set: HashSet<Literal>,
    order: Vec<Literal>,
    by_app: HashMap<(Fun, Var), Vec<Term>>,
    occurs: HashMap<Var, Vec<usize>>,
    eqs: HashMap<Var, Vec<Var>>,
    pending: Vec<Literal>,
}

impl Closure<'_> {
    fn push(&mut self, l: Literal) {
        if l.positive && l.atom.is_trivial_eq() {
            return;
        }
        if !self.set.contains(&l) {
            self.pending.push(l);
        }
    }

    fn insert(&mut self, l: Literal) {
        if !self.set.insert(l.clone()) {
            return;
        }
        let idx = self.order.len();
        self.order.push(l.clone());
        if let Some((key, t)) = application_side(&l) {
            let others = self.by_app.entry(key).or_default();
            let fresh: Vec<Term> = others.iter().filter(|v| **v != t).cloned().collect();
            others.push(t.clone());
            for v in fresh {
                self.push(Literal::new(true, Atom::eq_unchecked(t.clone(), v)));
            }
        }
        let vs = evars(&l);
        for v in &vs {
            self.occurs.entry(v.clone()).or_default().push(idx);
            if let Some(smaller) = self.eqs.get(v).cloned() {
                for w in smaller {
                    for r in single_replacements(&l, v, &Term::var(w)) {
                        self.push(r);
                    }
                }
            }
        }
        if let Some((big, small)) = evar_equality(&l, self.prec) {
            self.eqs.entry(big.clone()).or_default().push(small.clone());
            let hits = self.occurs.get(&big).cloned().unwrap_or_default();
            let to = Term::var(small);
            for i in hits {
                let target = self.order[i].clone();
                for r in single_replacements(&target, &big, &to) {
                    self.push(r);
                }
            }
        }
    }
}

/// Closes e-flat literals under the two restricted superposition
/// conditions: `f(e_i) = t, f(e_i) = v` gives `t = v`, and `e_i = e_j` with
/// `e_i > e_j` rewrites any single occurrence of `e_i` to `e_j`.
pub fn rs_close(lits: &[Literal], prec: &Precedence) -> Result<Vec<Literal>> {
    check_unary(lits)?;
    for l in lits {
        if !l.is_e_flat() {
            return Err(Error::Input(format!("literal is not e-flat: {l}")));
        }
    }
    let mut c = Closure {
        prec,
        set: HashSet::new(),
        order: Vec::new(),
        by_app: HashMap::new(),
        occurs: HashMap::new(),
        eqs: HashMap::new(),
        pending: Vec::new(),
    };
    for l in lits {
        c.push(l.clone());
        while let Some(next) = c.pending.pop() {
            c.insert(next);
        }
    }
    Ok(c.order)
}

/// An explicit definition candidate `e_i = t`.
fn definitions(l: &Literal) -> Vec<(Var, Term)> {
    let mut out = Vec::new();
    if !l.positive {
        return out;
    }
    if let Atom::Eq(a, b) = &l.atom {
        for (x, y) in [(a, b), (b, a)] {
            if let Some(v) = x.as_var().filter(|v| v.is_existential()) {
                if !y.contains_var(v) {
                    out.push((v.clone(), y.clone()));
                }
            }
        }
    }
    out
}

/// Least fixpoint of: mark `e_i` when some `e_i = t` has every existential of
/// `t` marked. Returns the marked variables in marking order together with
/// the definition that marked each.
pub fn mark(lits: &[Literal]) -> Vec<(Var, Term)> {
    let mut waiting: HashMap<Var, Vec<usize>> = HashMap::new();
    let mut cands: Vec<(Var, Term, usize)> = Vec::new();
    let mut ready = Vec::new();
    for l in lits {
        for (v, t) in definitions(l) {
            let mut deps = Vec::new();
            t.vars(&mut deps);
            deps.retain(Var::is_existential);
            deps.sort();
            deps.dedup();
            let id = cands.len();
            for d in &deps {
                waiting.entry(d.clone()).or_default().push(id);
            }
            if deps.is_empty() {
                ready.push(id);
            }
            cands.push((v, t, deps.len()));
        }
    }
    let mut marked: HashSet<Var> = HashSet::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < ready.len() {
        let (v, t, _) = cands[ready[i]].clone();
        i += 1;
        if !marked.insert(v.clone()) {
            continue;
        }
        out.push((v.clone(), t));
        for &c in waiting.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            cands[c].2 -= 1;
            if cands[c].2 == 0 {
                ready.push(c);
            }
        }
    }
    out
}

/// Resolution between `R(s..)` and `!R(t..)`, treating marked variables as
/// parameters. Returns the equalities of `E`, or `None` if it fails.
pub fn db_resolution(pos: &Literal, neg: &Literal, marked: &HashSet<Var>) -> Option<Vec<(Term, Term)>> {
    let (Atom::Rel(r, a), Atom::Rel(q, b)) = (&pos.atom, &neg.atom) else {
        return None;
    };
    if r != q || !pos.positive || neg.positive {
        return None;
    }
    let free = |t: &Term| {
        let mut vs = Vec::new();
        t.vars(&mut vs);
        vs.iter().all(|v| !v.is_existential() || marked.contains(v))
    };
    let mut out = Vec::new();
    for (x, y) in a.iter().zip(b) {
        if !e_match_by(x, y, &free, &mut out) {
            return None;
        }
    }
    Some(out)
}

fn first_unmarked(args: &[Term], marked: &HashSet<Var>) -> Option<(usize, Var)> {
    args.iter().enumerate().find_map(|(i, t)| {
        t.as_var()
            .filter(|v| v.is_existential() && !marked.contains(v))
            .map(|v| (i, v.clone()))
    })
}

fn sort_key(c: &[Literal]) -> String {
    c.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ")
}

/// Cover of `exists evars. body` in dag format.
pub fn db_cover(body: &[Literal], evars: &[Var], prec: &Precedence) -> Result<DagCover> {
    check_unary(body)?;
    let flat = flatten(body, evars);
    let s = rs_close(&flat.literals, prec)?;
    let bottom = DagCover {
        defs: Vec::new(),
        psi: vec![Vec::new()],
    };
    if s.iter().any(|l| !l.positive && l.atom.is_trivial_eq()) {
        return Ok(bottom);
    }
    let marking = mark(&s);
    let marked: HashSet<Var> = marking.iter().map(|(v, _)| v.clone()).collect();
    let chosen: HashSet<Literal> = marking
        .iter()
        .map(|(v, t)| Literal::new(true, Atom::eq_unchecked(Term::var(v.clone()), t.clone())))
        .collect();
    let is_known = |l: &Literal| evars_of_all_marked(l, &marked);
    let mut psi: Vec<Vec<Literal>> = Vec::new();
    let mut seen: HashSet<Vec<Literal>> = HashSet::new();
    for l in &s {
        if is_known(l) && !chosen.contains(l) && seen.insert(vec![l.clone()]) {
            psi.push(vec![l.clone()]);
        }
    }
    let mut negatives: HashMap<(Rel, usize, Var), Vec<&Literal>> = HashMap::new();
    for l in &s {
        if let (false, Atom::Rel(r, args)) = (l.positive, &l.atom) {
            for (i, t) in args.iter().enumerate() {
                if let Some(v) = t.as_var().filter(|v| v.is_existential() && !marked.contains(v)) {
                    negatives.entry((r.clone(), i, v.clone())).or_default().push(l);
                }
            }
        }
    }
    for l in &s {
        let (true, Atom::Rel(r, args)) = (l.positive, &l.atom) else { continue };
        let Some((i, v)) = first_unmarked(args, &marked) else { continue };
        for neg in negatives.get(&(r.clone(), i, v)).map(Vec::as_slice).unwrap_or(&[]) {
            if let Some(eqs) = db_resolution(l, neg, &marked) {
                let mut clause: Vec<Literal> = eqs
                    .into_iter()
                    .map(|(a, b)| Literal::new(false, Atom::eq_unchecked(a, b)))
                    .collect();
                clause.sort();
                clause.dedup();
                if clause.is_empty() {
                    return Ok(bottom);
                }
                if seen.insert(clause.clone()) {
                    psi.push(clause);
                }
            }
        }
    }
    psi.sort_by_cached_key(|c| sort_key(c));
    Ok(DagCover { defs: marking, psi })
}

fn evars_of_all_marked(l: &Literal, marked: &HashSet<Var>) -> bool {
    evars(l).iter().all(|v| marked.contains(v))
}

/// Substitutes the definitions in order, giving a quantifier-free formula.
pub fn unravel(d: &DagCover) -> Result<Formula> {
    let mut map: HashMap<Var, Term> = HashMap::new();
    for (v, t) in &d.defs {
        let body = t.substitute(&map);
        if !body.is_e_free() {
            return Err(Error::Internal(format!("definition of {} is not acyclic", v.name())));
        }
        map.insert(v.clone(), body);
    }
    let clauses = d
        .psi
        .iter()
        .map(|c| Formula::or(c.iter().map(|l| Formula::Lit(l.substitute(&map)))));
    let f = Formula::and(clauses);
    if !f.is_e_free() {
        return Err(Error::Internal("unravelled cover mentions an existential".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;

    fn s() -> Sort {
        Sort::new("S")
    }
    fn e(i: usize) -> Term {
        Term::var(Var::existential(i, &format!("e{i}"), s()))
    }
    fn y(i: usize) -> Term {
        Term::var(Var::parameter(i, &format!("y{i}"), s()))
    }
    fn f(t: Term) -> Term {
        Term::app(Fun::new("f", vec![s()], s()), vec![t]).unwrap()
    }
    fn g(t: Term) -> Term {
        Term::app(Fun::new("g", vec![s()], s()), vec![t]).unwrap()
    }
    fn r() -> Rel {
        Rel::new("R", vec![s(), s()])
    }
    fn ev(i: usize) -> Var {
        e(i).as_var().unwrap().clone()
    }

    #[test]
    fn closure_bullets() {
        let p = Precedence::default();
        let out = rs_close(&[Literal::eq(f(e(1)), y(1)).unwrap(), Literal::eq(f(e(1)), y(2)).unwrap()], &p).unwrap();
        assert!(out.contains(&Literal::eq(y(1), y(2)).unwrap()));
        let out = rs_close(&[Literal::eq(e(1), e(2)).unwrap(), Literal::eq(f(e(1)), y(1)).unwrap()], &p).unwrap();
        assert!(out.contains(&Literal::eq(f(e(2)), y(1)).unwrap()));
        let again = rs_close(&out, &p).unwrap();
        assert_eq!(again.len(), out.len());
    }

    #[test]
    fn marking_fixpoint() {
        let m = mark(&[Literal::eq(e(2), f(e(1))).unwrap(), Literal::eq(e(1), y(1)).unwrap()]);
        let vs: Vec<Var> = m.iter().map(|(v, _)| v.clone()).collect();
        assert_eq!(vs, [ev(1), ev(2)]);
        assert!(mark(&[Literal::eq(f(e(1)), y(1)).unwrap()]).is_empty());
        let m = mark(&[Literal::eq(e(1), e(2)).unwrap(), Literal::eq(e(2), y(1)).unwrap()]);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn resolution_cases() {
        let none = HashSet::new();
        let pos = Literal::rel(true, r(), vec![e(1), y(1)]).unwrap();
        let neg = Literal::rel(false, r(), vec![e(1), y(2)]).unwrap();
        assert_eq!(db_resolution(&pos, &neg, &none), Some(vec![(y(1), y(2))]));
        let marked: HashSet<Var> = [ev(2), ev(3)].into_iter().collect();
        let pos = Literal::rel(true, r(), vec![e(1), e(2)]).unwrap();
        let neg = Literal::rel(false, r(), vec![e(1), e(3)]).unwrap();
        assert_eq!(db_resolution(&pos, &neg, &marked), Some(vec![(e(2), e(3))]));
        let pos = Literal::rel(true, r(), vec![e(1), y(1)]).unwrap();
        let neg = Literal::rel(false, r(), vec![e(2), y(1)]).unwrap();
        assert_eq!(db_resolution(&pos, &neg, &none), None);
    }

    #[test]
    fn relation_cover() {
        let body = [
            Literal::rel(true, r(), vec![e(1), y(1)]).unwrap(),
            Literal::rel(false, r(), vec![e(1), y(2)]).unwrap(),
        ];
        let d = db_cover(&body, &[ev(1)], &Precedence::default()).unwrap();
        assert!(d.defs.is_empty());
        assert_eq!(d.psi, vec![vec![Literal::neq(y(1), y(2)).unwrap()]]);
    }

    #[test]
    fn unmarked_applications_are_dropped() {
        let body = [
            Literal::eq(f(e(1)), y(1)).unwrap(),
            Literal::eq(f(e(1)), y(2)).unwrap(),
            Literal::eq(g(e(1)), y(3)).unwrap(),
        ];
        let d = db_cover(&body, &[ev(1)], &Precedence::default()).unwrap();
        assert!(d.defs.is_empty());
        assert_eq!(d.psi, vec![vec![Literal::eq(y(1), y(2)).unwrap()]]);
    }

    #[test]
    fn parameter_only_body_is_kept() {
        let body = [Literal::eq(f(y(1)), y(2)).unwrap()];
        let d = db_cover(&body, &[], &Precedence::default()).unwrap();
        assert!(d.defs.is_empty());
        assert_eq!(unravel(&d).unwrap(), Formula::conj(&body));
    }

    #[test]
    fn unravel_in_order() {
        let d = DagCover {
            defs: vec![(ev(1), y(1)), (ev(2), f(e(1)))],
            psi: vec![vec![Literal::eq(g(e(2)), y(2)).unwrap()]],
        };
        assert_eq!(unravel(&d).unwrap(), Formula::conj(&[Literal::eq(g(f(y(1))), y(2)).unwrap()]));
        let d = DagCover {
            defs: vec![(ev(1), y(1))],
            psi: vec![vec![Literal::eq(f(e(1)), y(2)).unwrap()]],
        };
        assert_eq!(unravel(&d).unwrap(), Formula::conj(&[Literal::eq(f(y(1)), y(2)).unwrap()]));
    }

    #[test]
    fn binary_function_rejected() {
        let h = Fun::new("h", vec![s(), s()], s());
        let body = [Literal::eq(Term::app(h, vec![e(1), y(1)]).unwrap(), y(2)).unwrap()];
        assert!(matches!(db_cover(&body, &[ev(1)], &Precedence::default()), Err(Error::Signature(_))));
    }
}
