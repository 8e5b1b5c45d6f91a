//! Ground terms over a signature extended with variable-constants.
//!
//! Existential variables and parameters are treated as free constants; bound
//! variables only occur inside universal theory axioms.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::signature::{Fun, Sort};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum VarKind {
    Existential,
    Parameter,
    Bound,
}

#[derive(Debug)]
struct VarData {
    kind: VarKind,
    index: usize,
    name: String,
    sort: Sort,
}

/// A variable-constant. Identity is `(kind, index)`; the name is for display.
#[derive(Clone)]
pub struct Var(Arc<VarData>);

impl Var {
    pub fn new(kind: VarKind, index: usize, name: &str, sort: Sort) -> Self {
        Var(Arc::new(VarData {
            kind,
            index,
            name: name.to_string(),
            sort,
        }))
    }

    pub fn existential(index: usize, name: &str, sort: Sort) -> Self {
        Var::new(VarKind::Existential, index, name, sort)
    }

    pub fn parameter(index: usize, name: &str, sort: Sort) -> Self {
        Var::new(VarKind::Parameter, index, name, sort)
    }

    pub fn kind(&self) -> VarKind {
        self.0.kind
    }

    pub fn index(&self) -> usize {
        self.0.index
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn sort(&self) -> &Sort {
        &self.0.sort
    }

    pub fn is_existential(&self) -> bool {
        self.0.kind == VarKind::Existential
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind == other.0.kind && self.0.index == other.0.index
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state);
        self.0.index.hash(state);
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.kind, self.0.index).cmp(&(other.0.kind, other.0.index))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(Var),
    App(Fun, Box<[Term]>),
}

struct TermData {
    node: Node,
    size: usize,
    evars: usize,
    hash: u64,
}

/// An immutable, structurally shared term.
#[derive(Clone)]
pub struct Term(Arc<TermData>);

impl Term {
    fn from_node(node: Node) -> Self {
        let (size, evars) = match &node {
            Node::Var(v) => (1, usize::from(v.is_existential())),
            Node::App(_, args) => args
                .iter()
                .fold((1, 0), |(s, e), a| (s + a.size(), e + a.evar_count())),
        };
        let mut h = DefaultHasher::new();
        node.hash(&mut h);
        let hash = h.finish();
        Term(Arc::new(TermData {
            node,
            size,
            evars,
            hash,
        }))
    }

    pub fn var(v: Var) -> Self {
        Term::from_node(Node::Var(v))
    }

    /// Builds `f(args)`, checking arity and argument sorts.
    pub fn app(f: Fun, args: Vec<Term>) -> Result<Self> {
        if f.arity() != args.len() {
            return Err(Error::Sort(format!(
                "`{}` expects {} arguments, got {}",
                f.name(),
                f.arity(),
                args.len()
            )));
        }
        for (i, (a, s)) in args.iter().zip(f.args()).enumerate() {
            if a.sort() != s {
                return Err(Error::Sort(format!(
                    "argument {} of `{}` has sort {}, expected {}",
                    i + 1,
                    f.name(),
                    a.sort(),
                    s
                )));
            }
        }
        Ok(Term::app_unchecked(f, args))
    }

    pub(crate) fn app_unchecked(f: Fun, args: Vec<Term>) -> Self {
        Term::from_node(Node::App(f, args.into_boxed_slice()))
    }

    pub fn constant(c: Fun) -> Result<Self> {
        Term::app(c, Vec::new())
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.node {
            Node::Var(v) => Some(v),
            Node::App(..) => None,
        }
    }

    pub fn fun(&self) -> Option<&Fun> {
        match &self.0.node {
            Node::App(f, _) => Some(f),
            Node::Var(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.node {
            Node::App(_, args) => args,
            Node::Var(_) => &[],
        }
    }

    pub fn sort(&self) -> &Sort {
        match &self.0.node {
            Node::Var(v) => v.sort(),
            Node::App(f, _) => f.result(),
        }
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// Number of existential-variable occurrences.
    pub fn evar_count(&self) -> usize {
        self.0.evars
    }

    pub fn is_e_free(&self) -> bool {
        self.0.evars == 0
    }

    pub fn is_evar(&self) -> bool {
        matches!(&self.0.node, Node::Var(v) if v.is_existential())
    }

    /// e-free or an existential variable.
    pub fn is_atomic(&self) -> bool {
        self.is_e_free() || self.is_evar()
    }

    /// e-free, an existential variable, or `f(u..)` with every `u` atomic.
    pub fn is_e_flat(&self) -> bool {
        self.is_atomic() || self.args().iter().all(Term::is_atomic)
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn contains(&self, t: &Term) -> bool {
        self == t || self.args().iter().any(|a| a.contains(t))
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match &self.0.node {
            Node::Var(w) => w == v,
            Node::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Visits every subterm, children before parents.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        for a in self.args() {
            a.for_each_subterm(f);
        }
        f(self);
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        self.for_each_subterm(&mut |t| {
            if let Some(v) = t.as_var() {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
    }

    pub fn at(&self, path: &[usize]) -> &Term {
        match path.split_first() {
            None => self,
            Some((&i, rest)) => self.args()[i].at(rest),
        }
    }

    pub fn replace_at(&self, path: &[usize], with: &Term) -> Term {
        match path.split_first() {
            None => with.clone(),
            Some((&i, rest)) => {
                let f = self.fun().expect("position below a variable").clone();
                let mut args = self.args().to_vec();
                args[i] = args[i].replace_at(rest, with);
                Term::app_unchecked(f, args)
            }
        }
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        if self.size() <= from.size() {
            return self.clone();
        }
        match &self.0.node {
            Node::Var(_) => self.clone(),
            Node::App(f, args) => {
                let new: Vec<Term> = args.iter().map(|a| a.replace(from, to)).collect();
                if new.iter().zip(args.iter()).all(|(a, b)| Arc::ptr_eq(&a.0, &b.0)) {
                    self.clone()
                } else {
                    Term::app_unchecked(f.clone(), new)
                }
            }
        }
    }

    pub fn substitute(&self, map: &HashMap<Var, Term>) -> Term {
        match &self.0.node {
            Node::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Node::App(f, args) => {
                if args.is_empty() {
                    return self.clone();
                }
                Term::app_unchecked(f.clone(), args.iter().map(|a| a.substitute(map)).collect())
            }
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.node == other.0.node)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            Node::Var(v) => write!(f, "{v}"),
            Node::App(g, args) if args.is_empty() => f.write_str(g.name()),
            Node::App(g, args) => {
                write!(f, "{}(", g.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
