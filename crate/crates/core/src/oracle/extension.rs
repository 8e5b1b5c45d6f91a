//! Bounded search for an extension witnessing `exists e. phi` in every model
//! of `psi`.
//!
//! The universal player builds a finite model `M` lazily: a function value or
//! relation tuple of `M` is only fixed once some evaluation needs it, and
//! every fix is a branch point. The existential player picks values for the
//! existentials among the elements of `M` and fresh elements; tables of the
//! extension on tuples that mention a fresh element are free. A world where
//! every choice fails without consulting an unfixed fact is a counterexample.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::signature::{Fun, FunKind, Rel, Sort};
use crate::solver::Theory;
use crate::term::{Node, Term, Var};

/// Bound on the number of partial models visited.
pub const DEFAULT_WORLD_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionResult {
    Pass,
    Fail(Witness),
    Inconclusive,
}

impl ExtensionResult {
    pub fn is_pass(&self) -> bool {
        matches!(self, ExtensionResult::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, ExtensionResult::Fail(_))
    }
}

/// A partial model (every completion of which is a counterexample) and the
/// parameter assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub sizes: Vec<(String, usize)>,
    pub assignment: Vec<(String, String)>,
    pub facts: Vec<String>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes.iter().map(|(s, n)| format!("|{s}|={n}")).collect();
        let asg: Vec<String> = self.assignment.iter().map(|(v, e)| format!("{v}={e}")).collect();
        write!(f, "{}; {}", sizes.join(" "), asg.join(" "))?;
        if !self.facts.is_empty() {
            write!(f, "; {}", self.facts.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum FactKey {
    Fun(Fun, Vec<usize>),
    Rel(Rel, Vec<usize>),
}

#[derive(Clone, Debug, Default)]
struct World {
    sizes: BTreeMap<Sort, usize>,
    funs: BTreeMap<(Fun, Vec<usize>), usize>,
    rels: BTreeMap<(Rel, Vec<usize>), bool>,
}

struct Game<'a> {
    phi: Vec<Flat>,
    psi: &'a Formula,
    params: Vec<Var>,
    undef: bool,
    max_dom: usize,
    worlds: usize,
    budget: usize,
}

/// A disjunct of `phi` with every subterm named by a slot.
#[derive(Debug)]
struct Flat {
    slots: Vec<Slot>,
    /// Literals over slot ids, each checked once its largest slot is set.
    lits: Vec<(usize, bool, FlatAtom)>,
}

#[derive(Debug)]
enum Slot {
    Param(usize),
    Exists(Sort),
    App(Fun, Vec<usize>),
}

#[derive(Debug)]
enum FlatAtom {
    Eq(usize, usize),
    Rel(Rel, Vec<usize>),
}

fn flatten_disjunct(lits: &[Literal], params: &[Var]) -> Flat {
    let mut flat = Flat {
        slots: Vec::new(),
        lits: Vec::new(),
    };
    let mut index: HashMap<Term, usize> = HashMap::new();
    fn slot(t: &Term, params: &[Var], flat: &mut Flat, index: &mut HashMap<Term, usize>) -> usize {
        if let Some(&i) = index.get(t) {
            return i;
        }
        let s = match t.node() {
            Node::Var(v) if v.is_existential() => Slot::Exists(v.sort().clone()),
            Node::Var(v) => Slot::Param(params.iter().position(|p| p == v).unwrap()),
            Node::App(f, args) => {
                let ids = args.iter().map(|a| slot(a, params, flat, index)).collect();
                Slot::App(f.clone(), ids)
            }
        };
        flat.slots.push(s);
        index.insert(t.clone(), flat.slots.len() - 1);
        flat.slots.len() - 1
    }
    for l in lits {
        let atom = match &l.atom {
            Atom::Eq(a, b) => {
                let (a, b) = (
                    slot(a, params, &mut flat, &mut index),
                    slot(b, params, &mut flat, &mut index),
                );
                FlatAtom::Eq(a, b)
            }
            Atom::Rel(r, args) => {
                let ids = args.iter().map(|a| slot(a, params, &mut flat, &mut index)).collect();
                FlatAtom::Rel(r.clone(), ids)
            }
        };
        let last = match &atom {
            FlatAtom::Eq(a, b) => *a.max(b),
            FlatAtom::Rel(_, ids) => ids.iter().copied().max().unwrap_or(0),
        };
        flat.lits.push((last, l.positive, atom));
    }
    flat
}

fn is_undef_const(f: &Fun) -> bool {
    f.arity() == 0 && f.kind() == FunKind::Declared && f.name() == format!("undef.{}", f.result().name())
}

impl World {
    fn size(&self, s: &Sort) -> usize {
        self.sizes.get(s).copied().unwrap_or(0)
    }

    fn fun(&self, f: &Fun, args: &[usize], undef: bool) -> Result<usize, FactKey> {
        if undef && is_undef_const(f) {
            return Ok(0);
        }
        if undef && f.arity() == 1 && args[0] == 0 {
            return Ok(0);
        }
        self.funs
            .get(&(f.clone(), args.to_vec()))
            .copied()
            .ok_or_else(|| FactKey::Fun(f.clone(), args.to_vec()))
    }

    fn rel(&self, r: &Rel, args: &[usize]) -> Result<bool, FactKey> {
        self.rels
            .get(&(r.clone(), args.to_vec()))
            .copied()
            .ok_or_else(|| FactKey::Rel(r.clone(), args.to_vec()))
    }

    fn term(&self, t: &Term, env: &[usize], params: &[Var], undef: bool) -> Result<usize, FactKey> {
        match t.node() {
            Node::Var(v) => Ok(env[params.iter().position(|p| p == v).unwrap()]),
            Node::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term(a, env, params, undef))
                    .collect::<Result<Vec<_>, _>>()?;
                self.fun(f, &vals, undef)
            }
        }
    }

    fn literal(&self, l: &Literal, env: &[usize], params: &[Var], undef: bool) -> Result<bool, FactKey> {
        let v = match &l.atom {
            Atom::Eq(a, b) => self.term(a, env, params, undef)? == self.term(b, env, params, undef)?,
            Atom::Rel(r, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.term(a, env, params, undef))
                    .collect::<Result<Vec<_>, _>>()?;
                self.rel(r, &vals)?
            }
        };
        Ok(v == l.positive)
    }

    /// Three-valued evaluation; an unfixed fact is reported only when it
    /// decides the outcome.
    fn formula(&self, f: &Formula, env: &[usize], params: &[Var], undef: bool) -> Result<bool, FactKey> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Lit(l) => self.literal(l, env, params, undef),
            Formula::Not(g) => self.formula(g, env, params, undef).map(|b| !b),
            Formula::And(fs) | Formula::Or(fs) => {
                let short = matches!(f, Formula::Or(_));
                let mut pending = None;
                for g in fs {
                    match self.formula(g, env, params, undef) {
                        Ok(b) if b == short => return Ok(short),
                        Ok(_) => {}
                        Err(k) => pending = pending.or(Some(k)),
                    }
                }
                match pending {
                    Some(k) => Err(k),
                    None => Ok(!short),
                }
            }
            Formula::Implies(a, b) => {
                self.formula(&Formula::or([Formula::not((**a).clone()), (**b).clone()]), env, params, undef)
            }
        }
    }
}

enum Search {
    Found,
    Blocked(FactKey),
    None,
}

struct Assign<'w> {
    world: &'w World,
    env: &'w [usize],
    undef: bool,
    vals: Vec<usize>,
    fresh: BTreeMap<Sort, usize>,
    funs: HashMap<(Fun, Vec<usize>), usize>,
    rels: HashMap<(Rel, Vec<usize>), bool>,
    blocked: Option<FactKey>,
}

impl Assign<'_> {
    fn is_fresh(&self, s: &Sort, v: usize) -> bool {
        v >= self.world.size(s)
    }

    fn candidates(&self, s: &Sort) -> std::ops::Range<usize> {
        0..self.world.size(s) + self.fresh.get(s).copied().unwrap_or(0) + 1
    }

    fn take(&mut self, s: &Sort, v: usize) -> bool {
        let used = self.fresh.entry(s.clone()).or_insert(0);
        let limit = self.world.size(s) + *used;
        if v == limit {
            *used += 1;
            true
        } else {
            false
        }
    }

    fn release(&mut self, s: &Sort, took: bool) {
        if took {
            *self.fresh.get_mut(s).unwrap() -= 1;
        }
    }

    /// Checks the literals completed at `slot`, recording the relation tuples
    /// on fresh elements they choose into `added`.
    fn check(&mut self, flat: &Flat, slot: usize, added: &mut Vec<(Rel, Vec<usize>)>) -> bool {
        for (last, positive, atom) in &flat.lits {
            if *last != slot {
                continue;
            }
            let holds = match atom {
                FlatAtom::Eq(a, b) => self.vals[*a] == self.vals[*b],
                FlatAtom::Rel(r, ids) => {
                    let args: Vec<usize> = ids.iter().map(|&i| self.vals[i]).collect();
                    let old = args.iter().zip(r.args()).all(|(&v, s)| !self.is_fresh(s, v));
                    if old {
                        match self.world.rel(r, &args) {
                            Ok(b) => b,
                            Err(k) => {
                                self.blocked.get_or_insert(k);
                                return false;
                            }
                        }
                    } else {
                        let key = (r.clone(), args);
                        match self.rels.get(&key) {
                            Some(&b) => b,
                            None => {
                                self.rels.insert(key.clone(), *positive);
                                added.push(key);
                                *positive
                            }
                        }
                    }
                }
            };
            if holds != *positive {
                return false;
            }
        }
        true
    }

    fn search(&mut self, flat: &Flat, slot: usize) -> bool {
        if slot == flat.slots.len() {
            return true;
        }
        match &flat.slots[slot] {
            Slot::Param(i) => {
                self.vals[slot] = self.env[*i];
                self.try_value(flat, slot, None)
            }
            Slot::Exists(s) => {
                for v in self.candidates(s) {
                    self.vals[slot] = v;
                    if self.try_value(flat, slot, Some(s)) {
                        return true;
                    }
                }
                false
            }
            Slot::App(f, ids) => {
                let args: Vec<usize> = ids.iter().map(|&i| self.vals[i]).collect();
                let old = args.iter().zip(f.args()).all(|(&v, s)| !self.is_fresh(s, v));
                if old {
                    match self.world.fun(f, &args, self.undef) {
                        Ok(v) => {
                            self.vals[slot] = v;
                            self.try_value(flat, slot, None)
                        }
                        Err(k) => {
                            self.blocked.get_or_insert(k);
                            false
                        }
                    }
                } else if let Some(&v) = self.funs.get(&(f.clone(), args.clone())) {
                    self.vals[slot] = v;
                    self.try_value(flat, slot, None)
                } else {
                    let s = f.result().clone();
                    for v in self.candidates(&s) {
                        if self.undef && f.arity() == 1 && v == 0 {
                            continue;
                        }
                        self.vals[slot] = v;
                        let key = (f.clone(), args.clone());
                        self.funs.insert(key.clone(), v);
                        let ok = self.try_value(flat, slot, Some(&s));
                        self.funs.remove(&key);
                        if ok {
                            return true;
                        }
                    }
                    false
                }
            }
        }
    }

    fn try_value(&mut self, flat: &Flat, slot: usize, sort: Option<&Sort>) -> bool {
        let took = match sort {
            Some(s) => {
                let v = self.vals[slot];
                self.take(s, v)
            }
            None => false,
        };
        let mut added = Vec::new();
        let ok = self.check(flat, slot, &mut added) && self.search(flat, slot + 1);
        for k in added {
            self.rels.remove(&k);
        }
        if let Some(s) = sort {
            self.release(s, took);
        }
        ok
    }
}

impl Game<'_> {
    fn exists(&self, world: &World, env: &[usize]) -> Search {
        let mut blocked = None;
        for flat in &self.phi {
            let mut a = Assign {
                world,
                env,
                undef: self.undef,
                vals: vec![0; flat.slots.len()],
                fresh: BTreeMap::new(),
                funs: HashMap::new(),
                rels: HashMap::new(),
                blocked: None,
            };
            if a.search(flat, 0) {
                return Search::Found;
            }
            blocked = blocked.or(a.blocked);
        }
        match blocked {
            Some(k) => Search::Blocked(k),
            None => Search::None,
        }
    }

    /// The worlds obtained by fixing `key`.
    fn split(&self, world: &World, key: &FactKey) -> Vec<World> {
        let mut out = Vec::new();
        match key {
            FactKey::Rel(r, args) => {
                for b in [false, true] {
                    let mut w = world.clone();
                    w.rels.insert((r.clone(), args.clone()), b);
                    out.push(w);
                }
            }
            FactKey::Fun(f, args) => {
                let s = f.result();
                let n = world.size(s);
                let nonundef = self.undef && f.arity() == 1;
                let lo = usize::from(nonundef);
                let hi = if n < self.max_dom { n + 1 } else { n };
                for v in lo..hi {
                    let mut w = world.clone();
                    if v == n {
                        w.sizes.insert(s.clone(), n + 1);
                    }
                    w.funs.insert((f.clone(), args.clone()), v);
                    out.push(w);
                }
            }
        }
        out
    }

    fn witness(&self, world: &World, env: &[usize]) -> Witness {
        let name = |s: &Sort, i: usize| {
            if self.undef && i == 0 {
                format!("undef.{}", s.name())
            } else {
                format!("{}{}", s.name().to_lowercase(), i)
            }
        };
        let mut facts = Vec::new();
        for ((f, args), &v) in &world.funs {
            let a: Vec<String> = args.iter().zip(f.args()).map(|(&x, s)| name(s, x)).collect();
            let lhs = if a.is_empty() {
                f.name().to_string()
            } else {
                format!("{}({})", f.name(), a.join(","))
            };
            facts.push(format!("{lhs}={}", name(f.result(), v)));
        }
        for ((r, args), &b) in &world.rels {
            let a: Vec<String> = args.iter().zip(r.args()).map(|(&x, s)| name(s, x)).collect();
            facts.push(format!("{}{}({})", if b { "" } else { "!" }, r.name(), a.join(",")));
        }
        Witness {
            sizes: world.sizes.iter().map(|(s, &n)| (s.name().to_string(), n)).collect(),
            assignment: self
                .params
                .iter()
                .zip(env)
                .map(|(p, &v)| (p.name().to_string(), name(p.sort(), v)))
                .collect(),
            facts,
        }
    }

    fn play(&mut self, world: World, env: &[usize]) -> ExtensionResult {
        self.worlds += 1;
        if self.worlds > self.budget {
            return ExtensionResult::Inconclusive;
        }
        let key = match world.formula(self.psi, env, &self.params, self.undef) {
            Ok(false) => return ExtensionResult::Pass,
            Err(k) => k,
            Ok(true) => match self.exists(&world, env) {
                Search::Found => return ExtensionResult::Pass,
                Search::None => return ExtensionResult::Fail(self.witness(&world, env)),
                Search::Blocked(k) => k,
            },
        };
        let mut result = ExtensionResult::Pass;
        for w in self.split(&world, &key) {
            match self.play(w, env) {
                ExtensionResult::Pass => {}
                ExtensionResult::Inconclusive => result = ExtensionResult::Inconclusive,
                fail => return fail,
            }
        }
        result
    }

    fn params(&mut self, world: World, env: &mut Vec<usize>) -> ExtensionResult {
        if env.len() == self.params.len() {
            return self.play(world, env);
        }
        let s = self.params[env.len()].sort().clone();
        let n = world.size(&s);
        let hi = if n < self.max_dom { n + 1 } else { n };
        let mut result = ExtensionResult::Pass;
        for v in 0..hi {
            let mut w = world.clone();
            if v == n {
                w.sizes.insert(s.clone(), n + 1);
            }
            env.push(v);
            let r = self.params(w, env);
            env.pop();
            match r {
                ExtensionResult::Pass => {}
                ExtensionResult::Inconclusive => result = ExtensionResult::Inconclusive,
                fail => return fail,
            }
        }
        result
    }
}

/// Searches for a model `M` of the theory with at most `max_dom` elements per
/// sort and an assignment satisfying `psi` that no extension of `M` turns
/// into a model of `exists e. phi`.
///
/// Only the empty and undef theories are supported; other theories give
/// `Inconclusive`.
pub fn check_extension(phi: &Formula, psi: &Formula, theory: &Theory, max_dom: usize) -> ExtensionResult {
    check_extension_budget(phi, psi, theory, max_dom, DEFAULT_WORLD_BUDGET)
}

pub fn check_extension_budget(
    phi: &Formula,
    psi: &Formula,
    theory: &Theory,
    max_dom: usize,
    budget: usize,
) -> ExtensionResult {
    let undef = match theory {
        Theory::Empty => false,
        Theory::Undef(_) => true,
        Theory::Axioms(..) => return ExtensionResult::Inconclusive,
    };
    let mut params: Vec<Var> = phi.vars().into_iter().filter(|v| !v.is_existential()).collect();
    for v in psi.vars() {
        if !v.is_existential() && !params.contains(&v) {
            params.push(v);
        }
    }
    params.sort();
    let Ok(disjuncts) = phi.dnf(10_000) else {
        return ExtensionResult::Inconclusive;
    };
    let mut game = Game {
        phi: disjuncts.iter().map(|d| flatten_disjunct(d, &params)).collect(),
        psi,
        params,
        undef,
        max_dom: max_dom.max(1),
        worlds: 0,
        budget,
    };
    let mut world = World::default();
    if undef {
        let mut sorts: Vec<Sort> = game.params.iter().map(|p| p.sort().clone()).collect();
        for flat in &game.phi {
            for s in &flat.slots {
                match s {
                    Slot::Exists(s) => sorts.push(s.clone()),
                    Slot::App(f, _) => {
                        sorts.push(f.result().clone());
                        sorts.extend(f.args().iter().cloned());
                    }
                    Slot::Param(_) => {}
                }
            }
        }
        for s in sorts {
            world.sizes.insert(s, 1);
        }
    }
    game.params(world, &mut Vec::new())
}
