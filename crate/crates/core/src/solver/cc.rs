//! Congruence closure over ground terms and relation atoms.

use std::collections::HashMap;

use crate::literal::{Atom, Literal};
use crate::signature::{Fun, Rel};
use crate::term::{Node, Term, Var};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Sym {
    True,
    Var(Var),
    Fun(Fun),
    Rel(Rel),
}

#[derive(Clone, Debug)]
struct NodeInfo {
    sym: Sym,
    args: Vec<usize>,
}

/// Incremental congruence closure. Relation atoms are nodes; a positive atom
/// is merged with a distinguished `true` node, a negative one is kept apart
/// from it.
#[derive(Clone, Debug)]
pub struct Cc {
    index: HashMap<Term, usize>,
    nodes: Vec<NodeInfo>,
    parent: Vec<usize>,
    members: Vec<Vec<usize>>,
    uses: Vec<Vec<usize>>,
    sigs: HashMap<(Sym, Vec<usize>), usize>,
    diseqs: Vec<(usize, usize)>,
    conflict: bool,
}

const TRUE: usize = 0;

impl Default for Cc {
    fn default() -> Self {
        Cc::new()
    }
}

impl Cc {
    pub fn new() -> Self {
        let mut cc = Cc {
            index: HashMap::new(),
            nodes: Vec::new(),
            parent: Vec::new(),
            members: Vec::new(),
            uses: Vec::new(),
            sigs: HashMap::new(),
            diseqs: Vec::new(),
            conflict: false,
        };
        cc.push_node(Sym::True, Vec::new());
        cc
    }

    fn push_node(&mut self, sym: Sym, args: Vec<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(NodeInfo { sym, args });
        self.parent.push(id);
        self.members.push(vec![id]);
        self.uses.push(Vec::new());
        id
    }

    pub fn find(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    fn signature(&self, id: usize) -> (Sym, Vec<usize>) {
        let n = &self.nodes[id];
        (n.sym.clone(), n.args.iter().map(|&a| self.find(a)).collect())
    }

    fn app_node(&mut self, sym: Sym, args: Vec<usize>) -> usize {
        let key = (sym.clone(), args.iter().map(|&a| self.find(a)).collect::<Vec<_>>());
        if let Some(&id) = self.sigs.get(&key) {
            if self.nodes[id].args == args && self.nodes[id].sym == sym {
                return id;
            }
        }
        let id = self.push_node(sym, args.clone());
        for &a in &args {
            let r = self.find(a);
            self.uses[r].push(id);
        }
        match self.sigs.get(&key) {
            Some(&other) => self.merge(id, other),
            None => {
                self.sigs.insert(key, id);
            }
        }
        id
    }

    /// Interns a term, returning its node.
    pub fn add_term(&mut self, t: &Term) -> usize {
        if let Some(&id) = self.index.get(t) {
            return id;
        }
        let id = match t.node() {
            Node::Var(v) => self.push_node(Sym::Var(v.clone()), Vec::new()),
            Node::App(f, args) => {
                let args: Vec<usize> = args.iter().map(|a| self.add_term(a)).collect();
                self.app_node(Sym::Fun(f.clone()), args)
            }
        };
        self.index.insert(t.clone(), id);
        id
    }

    fn add_rel(&mut self, r: &Rel, args: &[Term]) -> usize {
        let args: Vec<usize> = args.iter().map(|a| self.add_term(a)).collect();
        self.app_node(Sym::Rel(r.clone()), args)
    }

    pub fn merge(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            // Attach the smaller class below the larger one.
            let (small, big) = if self.members[ra].len() < self.members[rb].len() {
                (ra, rb)
            } else {
                (rb, ra)
            };
            let moved_uses = std::mem::take(&mut self.uses[small]);
            for &u in &moved_uses {
                let key = self.signature(u);
                self.sigs.remove(&key);
            }
            self.parent[small] = big;
            let moved = std::mem::take(&mut self.members[small]);
            self.members[big].extend(moved);
            for &u in &moved_uses {
                let key = self.signature(u);
                match self.sigs.get(&key) {
                    Some(&other) if self.find(other) != self.find(u) => pending.push((u, other)),
                    Some(_) => {}
                    None => {
                        self.sigs.insert(key, u);
                    }
                }
            }
            self.uses[big].extend(moved_uses);
        }
    }

    /// Asserts a literal; returns `false` once the state is inconsistent.
    pub fn assert_lit(&mut self, l: &Literal) -> bool {
        let (a, b) = self.atom_nodes(&l.atom);
        if l.positive {
            self.merge(a, b);
        } else {
            self.diseqs.push((a, b));
        }
        self.check()
    }

    fn atom_nodes(&mut self, atom: &Atom) -> (usize, usize) {
        match atom {
            Atom::Eq(x, y) => (self.add_term(x), self.add_term(y)),
            Atom::Rel(r, args) => (self.add_rel(r, args), TRUE),
        }
    }

    pub fn assert_eq(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.add_term(a), self.add_term(b));
        self.merge(a, b);
        self.check()
    }

    fn check(&mut self) -> bool {
        if !self.conflict {
            let conflict = self.diseqs.iter().any(|&(a, b)| self.find(a) == self.find(b));
            self.conflict = conflict;
        }
        !self.conflict
    }

    pub fn is_consistent(&self) -> bool {
        !self.conflict
    }

    pub fn equal(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.add_term(a), self.add_term(b));
        self.find(a) == self.find(b)
    }

    fn nodes_distinct(&self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.diseqs
            .iter()
            .any(|&(x, y)| {
                let (rx, ry) = (self.find(x), self.find(y));
                (rx == ra && ry == rb) || (rx == rb && ry == ra)
            })
    }

    /// `Some(true)` if the literal already holds, `Some(false)` if asserting it
    /// would immediately conflict, `None` otherwise.
    pub fn value(&mut self, l: &Literal) -> Option<bool> {
        let (a, b) = self.atom_nodes(&l.atom);
        let same = self.find(a) == self.find(b);
        let apart = !same && self.nodes_distinct(a, b);
        match (l.positive, same, apart) {
            (true, true, _) | (false, _, true) => Some(true),
            (true, _, true) | (false, true, _) => Some(false),
            _ => None,
        }
    }

    /// Interned terms with their class representative.
    pub fn classes(&self) -> Vec<(Term, usize)> {
        self.index.iter().map(|(t, &id)| (t.clone(), self.find(id))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Sort;

    fn s() -> Sort {
        Sort::new("S")
    }
    fn y(i: usize) -> Term {
        Term::var(Var::parameter(i, &format!("y{i}"), s()))
    }
    fn f(t: Term) -> Term {
        Term::app(Fun::new("f", vec![s()], s()), vec![t]).unwrap()
    }

    #[test]
    fn congruence_conflict() {
        let mut cc = Cc::new();
        assert!(cc.assert_lit(&Literal::eq(f(y(1)), y(2)).unwrap()));
        assert!(cc.assert_lit(&Literal::eq(y(1), y(3)).unwrap()));
        assert!(!cc.assert_lit(&Literal::neq(f(y(3)), y(2)).unwrap()));
    }

    #[test]
    fn relation_atoms() {
        let r = Rel::new("R", vec![s()]);
        let mut cc = Cc::new();
        assert!(cc.assert_lit(&Literal::rel(true, r.clone(), vec![y(1)]).unwrap()));
        assert!(cc.assert_lit(&Literal::rel(false, r.clone(), vec![y(2)]).unwrap()));
        assert!(!cc.assert_lit(&Literal::eq(y(1), y(2)).unwrap()));
    }

    #[test]
    fn late_interned_terms_join_classes() {
        let mut cc = Cc::new();
        assert!(cc.assert_lit(&Literal::eq(y(1), y(2)).unwrap()));
        assert!(cc.equal(&f(f(y(1))), &f(f(y(2)))));
        assert_eq!(cc.value(&Literal::neq(f(y(1)), f(y(2))).unwrap()), Some(false));
    }
}
