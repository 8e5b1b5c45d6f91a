//! Literals, constraints and constrained literals.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::signature::Rel;
use crate::term::{Term, Var};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// An unordered pair, stored with the smaller term first.
    Eq(Term, Term),
    Rel(Rel, Vec<Term>),
}

impl Atom {
    pub fn eq(a: Term, b: Term) -> Result<Atom> {
        if a.sort() != b.sort() {
            return Err(Error::Sort(format!(
                "equality between `{a}` of sort {} and `{b}` of sort {}",
                a.sort(),
                b.sort()
            )));
        }
        Ok(Atom::eq_unchecked(a, b))
    }

    pub(crate) fn eq_unchecked(a: Term, b: Term) -> Atom {
        if a <= b {
            Atom::Eq(a, b)
        } else {
            Atom::Eq(b, a)
        }
    }

    pub fn rel(r: Rel, args: Vec<Term>) -> Result<Atom> {
        if r.arity() != args.len() {
            return Err(Error::Sort(format!(
                "`{}` expects {} arguments, got {}",
                r.name(),
                r.arity(),
                args.len()
            )));
        }
        for (i, (a, s)) in args.iter().zip(r.args()).enumerate() {
            if a.sort() != s {
                return Err(Error::Sort(format!(
                    "argument {} of `{}` has sort {}, expected {}",
                    i + 1,
                    r.name(),
                    a.sort(),
                    s
                )));
            }
        }
        Ok(Atom::Rel(r, args))
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(a, b) => vec![a, b],
            Atom::Rel(_, args) => args.iter().collect(),
        }
    }

    pub fn is_e_free(&self) -> bool {
        self.terms().iter().all(|t| t.is_e_free())
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::eq_unchecked(f(a), f(b)),
            Atom::Rel(r, args) => Atom::Rel(r.clone(), args.iter().map(f).collect()),
        }
    }

    pub fn is_trivial_eq(&self) -> bool {
        matches!(self, Atom::Eq(a, b) if a == b)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
            Atom::Rel(r, args) => {
                write!(f, "{}(", r.name())?;
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

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn new(positive: bool, atom: Atom) -> Self {
        Literal { positive, atom }
    }

    pub fn eq(a: Term, b: Term) -> Result<Self> {
        Ok(Literal::new(true, Atom::eq(a, b)?))
    }

    pub fn neq(a: Term, b: Term) -> Result<Self> {
        Ok(Literal::new(false, Atom::eq(a, b)?))
    }

    pub fn rel(positive: bool, r: Rel, args: Vec<Term>) -> Result<Self> {
        Ok(Literal::new(positive, Atom::rel(r, args)?))
    }

    pub fn negate(&self) -> Literal {
        Literal::new(!self.positive, self.atom.clone())
    }

    pub fn is_e_free(&self) -> bool {
        self.atom.is_e_free()
    }

    /// `t = a` with `t` e-flat and `a` atomic, `a != b` with both atomic,
    /// or a relation literal over atomic arguments.
    pub fn is_e_flat(&self) -> bool {
        match &self.atom {
            Atom::Eq(a, b) => {
                if self.positive {
                    (a.is_e_flat() && b.is_atomic()) || (b.is_e_flat() && a.is_atomic())
                } else {
                    a.is_atomic() && b.is_atomic()
                }
            }
            Atom::Rel(_, args) => args.iter().all(Term::is_atomic),
        }
    }

    pub fn map_terms(&self, f: impl FnMut(&Term) -> Term) -> Literal {
        Literal::new(self.positive, self.atom.map_terms(f))
    }

    pub fn substitute(&self, map: &HashMap<Var, Term>) -> Literal {
        self.map_terms(|t| t.substitute(map))
    }

    pub fn vars(&self, out: &mut Vec<Var>) {
        for t in self.atom.terms() {
            t.vars(out);
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.atom, self.positive) {
            (Atom::Eq(a, b), false) => write!(f, "{a} != {b}"),
            (atom, true) => write!(f, "{atom}"),
            (atom, false) => write!(f, "!{atom}"),
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite set of equalities between e-free terms, read as a conjunction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Constraint(BTreeSet<(Term, Term)>);

/// Builds a constraint from term pairs, dropping duplicates and `u = u`.
pub fn canonical_constraint(pairs: &[(Term, Term)]) -> Result<Constraint> {
    Constraint::new(pairs.iter().cloned())
}

impl Constraint {
    pub fn empty() -> Self {
        Constraint::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (Term, Term)>) -> Result<Self> {
        let mut c = Constraint::empty();
        for (a, b) in pairs {
            if !a.is_e_free() || !b.is_e_free() {
                return Err(Error::Input(format!(
                    "constraint `{a} = {b}` mentions an existential variable"
                )));
            }
            if a.sort() != b.sort() {
                return Err(Error::Sort(format!("constraint `{a} = {b}` is ill-sorted")));
            }
            c.insert(a, b);
        }
        Ok(c)
    }

    pub(crate) fn insert(&mut self, a: Term, b: Term) {
        if a == b {
            return;
        }
        if a < b {
            self.0.insert((a, b));
        } else {
            self.0.insert((b, a));
        }
    }

    pub fn union(&self, other: &Constraint) -> Constraint {
        let mut c = self.clone();
        c.0.extend(other.0.iter().cloned());
        c
    }

    pub fn is_subset(&self, other: &Constraint) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Term, Term)> {
        self.0.iter()
    }

    pub fn literals(&self) -> Vec<Literal> {
        self.0
            .iter()
            .map(|(a, b)| Literal::new(true, Atom::eq_unchecked(a.clone(), b.clone())))
            .collect()
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self.0.iter().map(|(a, b)| format!("{a} = {b}")).collect();
        items.sort();
        write!(f, "{{{}}}", items.join(", "))
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `L || C`, meaning the Horn clause `/\C -> L`. A missing literal is `false`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ConstrainedLiteral {
    pub literal: Option<Literal>,
    pub constraint: Constraint,
}

impl ConstrainedLiteral {
    pub fn new(literal: Literal, constraint: Constraint) -> Self {
        ConstrainedLiteral {
            literal: Some(literal),
            constraint,
        }
    }

    pub fn bottom(constraint: Constraint) -> Self {
        ConstrainedLiteral {
            literal: None,
            constraint,
        }
    }

    pub fn is_bottom(&self) -> bool {
        self.literal.is_none()
    }

    pub fn is_e_free(&self) -> bool {
        self.literal.as_ref().is_none_or(Literal::is_e_free)
    }

    pub fn is_e_flat(&self) -> bool {
        self.literal.as_ref().is_none_or(Literal::is_e_flat)
    }
}

impl fmt::Display for ConstrainedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.literal {
            Some(l) => write!(f, "{l} || {}", self.constraint),
            None => write!(f, "false || {}", self.constraint),
        }
    }
}
