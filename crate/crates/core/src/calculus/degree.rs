//! Degree of e-flat terms relative to the terms of the input.
//!
//! Level 0 holds the terms occurring in the input; a term has degree `k + 1`
//! when it arises from a level-0 term by replacing existential arguments with
//! e-free terms of degree at most `k` (or with other existentials). Saturation
//! never produces a term of degree above the number of existentials.

use std::collections::{HashMap, HashSet};

use crate::literal::Literal;
use crate::signature::Fun;
use crate::term::Term;

#[derive(Clone, Debug, Default)]
pub struct DegreeTracker {
    base: HashSet<Term>,
    by_fun: HashMap<Fun, Vec<Term>>,
    memo: HashMap<Term, Option<usize>>,
}

impl DegreeTracker {
    pub fn new(init: &[Literal]) -> Self {
        let mut tr = DegreeTracker::default();
        for l in init {
            for t in l.atom.terms() {
                t.for_each_subterm(&mut |s| {
                    if tr.base.insert(s.clone()) {
                        if let Some(f) = s.fun() {
                            tr.by_fun.entry(f.clone()).or_default().push(s.clone());
                        }
                    }
                });
            }
        }
        tr
    }

    /// `None` when the term is not reachable from the input terms at all.
    pub fn degree(&mut self, u: &Term) -> Option<usize> {
        if u.is_evar() || self.base.contains(u) {
            return Some(0);
        }
        if let Some(&d) = self.memo.get(u) {
            return d;
        }
        let f = u.fun()?.clone();
        let candidates = self.by_fun.get(&f).cloned().unwrap_or_default();
        let mut best: Option<usize> = None;
        'outer: for s in &candidates {
            let mut worst = 0;
            for (si, ui) in s.args().iter().zip(u.args()) {
                let d = if si == ui || (si.is_evar() && ui.is_evar()) {
                    0
                } else if si.is_evar() && ui.is_e_free() {
                    match self.degree(ui) {
                        Some(d) => d + 1,
                        None => continue 'outer,
                    }
                } else {
                    continue 'outer;
                };
                worst = worst.max(d);
            }
            best = Some(best.map_or(worst, |b| b.min(worst)));
        }
        self.memo.insert(u.clone(), best);
        best
    }

    /// Largest degree among the terms of a literal; `None` if some term is
    /// unreachable.
    pub fn literal_degree(&mut self, l: &Literal) -> Option<usize> {
        let mut worst = 0;
        for t in l.atom.terms() {
            worst = worst.max(self.degree(t)?);
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;
    use crate::term::Var;

    #[test]
    fn rewriting_existential_arguments_raises_degree() {
        let s = Sort::new("S");
        let f = Fun::new("f", vec![s.clone(), s.clone()], s.clone());
        let e1 = Term::var(Var::existential(1, "e1", s.clone()));
        let e2 = Term::var(Var::existential(2, "e2", s.clone()));
        let y1 = Term::var(Var::parameter(1, "y1", s.clone()));
        let t = Term::var(Var::parameter(2, "t", s.clone()));
        let base = Term::app(f.clone(), vec![e1.clone(), e2.clone()]).unwrap();
        let mut tr = DegreeTracker::new(&[Literal::eq(base, t.clone()).unwrap(), Literal::eq(e1, y1.clone()).unwrap()]);
        let once = Term::app(f.clone(), vec![y1.clone(), e2.clone()]).unwrap();
        assert_eq!(tr.degree(&once), Some(1));
        let renamed = Term::app(f.clone(), vec![e2.clone(), e2]).unwrap();
        assert_eq!(tr.degree(&renamed), Some(0));
        let twice = Term::app(f.clone(), vec![once.clone(), y1.clone()]).unwrap();
        assert_eq!(tr.degree(&twice), None);
        let unknown = Term::app(f, vec![t.clone(), t]).unwrap();
        assert_eq!(tr.degree(&unknown), Some(1));
    }
}
