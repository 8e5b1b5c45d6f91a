//! Multi-sorted signatures: sorts, function symbols and relation symbols.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A sort name. Sorts are compared by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Where a function symbol comes from.
///
/// Relation atoms `R(t..)` are handled in the general calculus as equalities
/// `R(t..) = true.R`; the two synthetic kinds below name the symbols that
/// encoding introduces.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FunKind {
    Declared,
    RelationTag,
    TrueConst,
}

#[derive(Debug)]
struct FunData {
    name: String,
    args: Vec<Sort>,
    result: Sort,
    kind: FunKind,
}

/// A function symbol with its sort profile. Constants are 0-ary functions.
#[derive(Clone)]
pub struct Fun(Arc<FunData>);

impl Fun {
    pub fn new(name: &str, args: Vec<Sort>, result: Sort) -> Self {
        Fun::with_kind(name, args, result, FunKind::Declared)
    }

    pub(crate) fn with_kind(name: &str, args: Vec<Sort>, result: Sort, kind: FunKind) -> Self {
        Fun(Arc::new(FunData {
            name: name.to_string(),
            args,
            result,
            kind,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.args.len()
    }

    pub fn args(&self) -> &[Sort] {
        &self.0.args
    }

    pub fn result(&self) -> &Sort {
        &self.0.result
    }

    pub fn kind(&self) -> FunKind {
        self.0.kind
    }
}

impl PartialEq for Fun {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.kind == other.0.kind && self.0.name == other.0.name)
    }
}

impl Eq for Fun {}

impl Hash for Fun {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state);
        self.0.name.hash(state);
    }
}

impl PartialOrd for Fun {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fun {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.0.kind, &self.0.name).cmp(&(other.0.kind, &other.0.name))
    }
}

impl fmt::Debug for Fun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[derive(Debug)]
struct RelData {
    name: String,
    args: Vec<Sort>,
}

/// A relation symbol with its argument sorts.
#[derive(Clone)]
pub struct Rel(Arc<RelData>);

impl Rel {
    pub fn new(name: &str, args: Vec<Sort>) -> Self {
        Rel(Arc::new(RelData {
            name: name.to_string(),
            args,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.args.len()
    }

    pub fn args(&self) -> &[Sort] {
        &self.0.args
    }
}

impl PartialEq for Rel {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for Rel {}

impl Hash for Rel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl PartialOrd for Rel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// Prefix of the distinguished undefined constant of each sort (`undef.S`).
pub const UNDEF_PREFIX: &str = "undef.";

/// A finite multi-sorted signature.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    sorts: Vec<Sort>,
    funs: Vec<Fun>,
    rels: Vec<Rel>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<Sort> {
        if self.sorts.iter().any(|s| s.name() == name) {
            return Err(Error::Signature(format!("duplicate sort `{name}`")));
        }
        let sort = Sort::new(name);
        self.sorts.push(sort.clone());
        Ok(sort)
    }

    fn resolve_sort(&self, name: &str) -> Result<Sort> {
        self.sort(name)
            .ok_or_else(|| Error::Sort(format!("undeclared sort `{name}`")))
    }

    fn check_fresh_symbol(&self, name: &str) -> Result<()> {
        if self.fun(name).is_some() || self.rel(name).is_some() {
            return Err(Error::Signature(format!("duplicate symbol `{name}`")));
        }
        Ok(())
    }

    pub fn add_fun(&mut self, name: &str, args: &[&str], result: &str) -> Result<Fun> {
        self.check_fresh_symbol(name)?;
        let args = args
            .iter()
            .map(|a| self.resolve_sort(a))
            .collect::<Result<Vec<_>>>()?;
        let fun = Fun::new(name, args, self.resolve_sort(result)?);
        self.funs.push(fun.clone());
        Ok(fun)
    }

    pub fn add_rel(&mut self, name: &str, args: &[&str]) -> Result<Rel> {
        self.check_fresh_symbol(name)?;
        let args = args
            .iter()
            .map(|a| self.resolve_sort(a))
            .collect::<Result<Vec<_>>>()?;
        let rel = Rel::new(name, args);
        self.rels.push(rel.clone());
        Ok(rel)
    }

    /// Adds `undef.S` for every sort that does not have one yet.
    pub fn add_undef_constants(&mut self) {
        for sort in self.sorts.clone() {
            let name = format!("{UNDEF_PREFIX}{}", sort.name());
            if self.fun(&name).is_none() {
                self.funs.push(Fun::new(&name, Vec::new(), sort));
            }
        }
    }

    pub fn undef(&self, sort: &Sort) -> Option<Fun> {
        self.fun(&format!("{UNDEF_PREFIX}{}", sort.name()))
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn funs(&self) -> &[Fun] {
        &self.funs
    }

    pub fn rels(&self) -> &[Rel] {
        &self.rels
    }

    pub fn sort(&self, name: &str) -> Option<Sort> {
        self.sorts.iter().find(|s| s.name() == name).cloned()
    }

    pub fn fun(&self, name: &str) -> Option<Fun> {
        self.funs.iter().find(|f| f.name() == name).cloned()
    }

    pub fn rel(&self, name: &str) -> Option<Rel> {
        self.rels.iter().find(|r| r.name() == name).cloned()
    }

    /// DB signature: every function symbol is unary (constants allowed).
    pub fn is_db(&self) -> bool {
        self.funs.iter().all(|f| f.arity() <= 1)
    }

    /// True iff the sort graph (edge `S -> U` for every `f: .. S .. -> U`)
    /// has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        let mut edges: BTreeMap<&Sort, BTreeSet<&Sort>> = BTreeMap::new();
        for f in &self.funs {
            for a in f.args() {
                edges.entry(a).or_default().insert(f.result());
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&Sort, u8> = BTreeMap::new();
        fn dfs<'a>(
            s: &'a Sort,
            edges: &BTreeMap<&'a Sort, BTreeSet<&'a Sort>>,
            state: &mut BTreeMap<&'a Sort, u8>,
        ) -> bool {
            match state.get(s) {
                Some(1) => return false,
                Some(2) => return true,
                _ => {}
            }
            state.insert(s, 1);
            if let Some(next) = edges.get(s) {
                for n in next {
                    if !dfs(n, edges, state) {
                        return false;
                    }
                }
            }
            state.insert(s, 2);
            true
        }
        self.sorts.iter().all(|s| dfs(s, &edges, &mut state))
    }
}
