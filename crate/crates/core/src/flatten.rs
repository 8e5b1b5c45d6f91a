//! Abstraction of nested existential terms into e-flat literals.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::term::{Term, Var};

#[derive(Clone, Debug)]
pub struct Flattened {
    /// Definitions of fresh variables in creation order, then the rewritten
    /// input literals.
    pub literals: Vec<Literal>,
    /// The original existentials followed by the fresh ones.
    pub evars: Vec<Var>,
}

struct Namer {
    memo: HashMap<Term, Term>,
    taken: HashSet<String>,
    next_index: usize,
    next_suffix: usize,
    evars: Vec<Var>,
    out: Vec<Literal>,
}

impl Namer {
    fn fresh(&mut self, t: &Term) -> Term {
        let name = loop {
            let n = format!("e{}", self.next_suffix);
            self.next_suffix += 1;
            if self.taken.insert(n.clone()) {
                break n;
            }
        };
        let v = Var::existential(self.next_index, &name, t.sort().clone());
        self.next_index += 1;
        self.evars.push(v.clone());
        Term::var(v)
    }

    /// An e-free term or an existential variable equal to `t`.
    fn atomize(&mut self, t: &Term) -> Term {
        if t.is_atomic() {
            return t.clone();
        }
        let flat = self.flat_term(t);
        if let Some(name) = self.memo.get(&flat) {
            return name.clone();
        }
        let name = self.fresh(&flat);
        self.out.push(Literal::new(true, Atom::eq_unchecked(flat.clone(), name.clone())));
        self.memo.insert(flat, name.clone());
        name
    }

    /// An e-flat term equal to `t`.
    fn flat_term(&mut self, t: &Term) -> Term {
        if t.is_atomic() {
            return t.clone();
        }
        let args: Vec<Term> = t.args().iter().map(|a| self.atomize(a)).collect();
        Term::app_unchecked(t.fun().unwrap().clone(), args)
    }

    fn literal(&mut self, l: &Literal) -> Literal {
        let atom = match &l.atom {
            Atom::Eq(a, b) if l.positive => {
                if b.is_atomic() {
                    let fa = self.flat_term(a);
                    Atom::eq_unchecked(fa, b.clone())
                } else if a.is_atomic() {
                    let fb = self.flat_term(b);
                    Atom::eq_unchecked(fb, a.clone())
                } else {
                    let fa = self.flat_term(a);
                    let nb = self.atomize(b);
                    Atom::eq_unchecked(fa, nb)
                }
            }
            Atom::Eq(a, b) => {
                let na = self.atomize(a);
                let nb = self.atomize(b);
                Atom::eq_unchecked(na, nb)
            }
            Atom::Rel(r, args) => Atom::Rel(r.clone(), args.iter().map(|a| self.atomize(a)).collect()),
        };
        Literal::new(l.positive, atom)
    }
}

/// Flattens a conjunction of literals. Nested existential subterms are named
/// innermost-leftmost; syntactically equal subterms share one name. Fresh
/// variables are called `e1`, `e2`, ... skipping names already in use.
pub fn flatten(body: &[Literal], evars: &[Var]) -> Flattened {
    let mut taken: HashSet<String> = evars.iter().map(|v| v.name().to_string()).collect();
    let mut vars = Vec::new();
    for l in body {
        l.vars(&mut vars);
    }
    taken.extend(vars.iter().map(|v| v.name().to_string()));
    let next_index = evars
        .iter()
        .chain(vars.iter().filter(|v| v.is_existential()))
        .map(Var::index)
        .max()
        .unwrap_or(0)
        + 1;
    let mut namer = Namer {
        memo: HashMap::new(),
        taken,
        next_index,
        next_suffix: 1,
        evars: evars.to_vec(),
        out: Vec::new(),
    };
    for l in body {
        let flat = namer.literal(l);
        namer.out.push(flat);
    }
    Flattened {
        literals: namer.out,
        evars: namer.evars,
    }
}

/// Flattens a formula that must be a conjunction of literals.
pub fn flatten_formula(body: &Formula, evars: &[Var]) -> Result<Flattened> {
    let lits = body
        .as_conjunction()
        .ok_or_else(|| Error::Input("expected a conjunction of literals".into()))?;
    Ok(flatten(&lits, evars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::{Fun, Sort};

    fn s() -> Sort {
        Sort::new("S")
    }

    #[test]
    fn nested_disequality() {
        let f = Fun::new("f", vec![s(), s()], s());
        let e = Var::existential(1, "e", s());
        let p = |i, n: &str| Term::var(Var::parameter(i, n, s()));
        let ap = |a: Term, b: Term| Term::app(f.clone(), vec![a, b]).unwrap();
        let et = Term::var(e.clone());
        let lhs = ap(ap(et.clone(), p(1, "y1")), p(2, "y2"));
        let rhs = ap(ap(et, p(3, "y1p")), p(4, "y2p"));
        let out = flatten(&[Literal::neq(lhs, rhs).unwrap()], &[e]);
        let shown: Vec<String> = out.literals.iter().map(|l| l.to_string()).collect();
        assert_eq!(
            shown,
            [
                "e1 = f(e, y1)",
                "e2 = f(e1, y2)",
                "e3 = f(e, y1p)",
                "e4 = f(e3, y2p)",
                "e2 != e4"
            ]
        );
        assert_eq!(out.evars.len(), 5);
        assert!(out.literals.iter().all(Literal::is_e_flat));
    }

    #[test]
    fn flat_input_unchanged() {
        let f = Fun::new("f", vec![s(), s()], s());
        let g = Fun::new("g", vec![s()], s());
        let e = Var::existential(1, "e", s());
        let y1 = Term::var(Var::parameter(1, "y1", s()));
        let y2 = Term::var(Var::parameter(2, "y2", s()));
        let gy = Term::app(g, vec![y1]).unwrap();
        let l = Literal::eq(Term::app(f, vec![Term::var(e.clone()), gy]).unwrap(), y2).unwrap();
        let out = flatten(std::slice::from_ref(&l), &[e]);
        assert_eq!(out.literals, vec![l]);
        assert_eq!(out.evars.len(), 1);
    }

    #[test]
    fn shared_subterms_named_once() {
        let f = Fun::new("f", vec![s()], s());
        let e = Var::existential(1, "e", s());
        let fe = Term::app(f.clone(), vec![Term::var(e.clone())]).unwrap();
        let ffe = Term::app(f, vec![fe]).unwrap();
        let y1 = Term::var(Var::parameter(1, "y1", s()));
        let y2 = Term::var(Var::parameter(2, "y2", s()));
        let body = [Literal::eq(ffe.clone(), y1).unwrap(), Literal::neq(ffe, y2).unwrap()];
        let out = flatten(&body, &[e]);
        assert_eq!(out.evars.len(), 3);
        assert_eq!(out.literals.len(), 4);
    }
}
