//! A total ground reduction ordering on terms.
//!
//! Terms are weighed by `(existential occurrences, symbol count)`, which puts
//! every existential variable above every e-free term, then compared by the
//! precedence of their root symbols and finally argument by argument.

use std::cmp::{Ordering, Reverse};
use std::collections::HashMap;

use crate::signature::Fun;
use crate::term::{Node, Term, VarKind};

/// Total order on symbols.
///
/// Explicitly listed names come first (earlier is greater). Unlisted symbols
/// follow in the order existentials > parameters > function symbols; among
/// variables a lower index is greater, function symbols go by name.
#[derive(Clone, Debug, Default)]
pub struct Precedence {
    listed: HashMap<String, usize>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Key<'a> {
    Fun(&'a Fun),
    Var(u8, Reverse<usize>),
    Listed(Reverse<usize>),
}

impl Precedence {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let mut listed = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            listed.entry(n.as_ref().to_string()).or_insert(i);
        }
        Precedence { listed }
    }

    pub fn listed(&self) -> Vec<&str> {
        let mut names: Vec<(&str, usize)> = self.listed.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        names.sort_by_key(|&(_, i)| i);
        names.into_iter().map(|(n, _)| n).collect()
    }

    fn key<'a>(&self, t: &'a Term) -> Key<'a> {
        let name = match t.node() {
            Node::Var(v) => v.name(),
            Node::App(f, _) => f.name(),
        };
        if let Some(&i) = self.listed.get(name) {
            return Key::Listed(Reverse(i));
        }
        match t.node() {
            Node::Var(v) => {
                let tier = match v.kind() {
                    VarKind::Existential => 2,
                    VarKind::Parameter => 1,
                    VarKind::Bound => 0,
                };
                Key::Var(tier, Reverse(v.index()))
            }
            Node::App(f, _) => Key::Fun(f),
        }
    }

    pub fn compare(&self, t: &Term, u: &Term) -> Ordering {
        if t == u {
            return Ordering::Equal;
        }
        (t.evar_count(), t.size())
            .cmp(&(u.evar_count(), u.size()))
            .then_with(|| self.key(t).cmp(&self.key(u)))
            .then_with(|| {
                for (a, b) in t.args().iter().zip(u.args()) {
                    let c = self.compare(a, b);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                t.args().len().cmp(&u.args().len())
            })
            .then_with(|| t.cmp(u))
    }

    pub fn greater(&self, t: &Term, u: &Term) -> bool {
        self.compare(t, u) == Ordering::Greater
    }

    /// The pair sorted as `(larger, smaller)`.
    pub fn orient<'a>(&self, a: &'a Term, b: &'a Term) -> (&'a Term, &'a Term) {
        if self.compare(a, b) == Ordering::Less {
            (b, a)
        } else {
            (a, b)
        }
    }

    pub fn max<'a>(&self, a: &'a Term, b: &'a Term) -> &'a Term {
        self.orient(a, b).0
    }

    pub fn min<'a>(&self, a: &'a Term, b: &'a Term) -> &'a Term {
        self.orient(a, b).1
    }
}
