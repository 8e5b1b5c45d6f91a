//! Given-clause saturation with eager Demodulation.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::calculus::degree::DegreeTracker;
use crate::calculus::{
    as_definition, candidate_positions, decode_relations, demodulate, encode_relations, oriented, reflexion,
    show_clause, superpose_left, superpose_right,
};
use crate::error::{Error, Result};
use crate::literal::{ConstrainedLiteral, Constraint, Literal};
use crate::ordering::Precedence;
use crate::signature::Signature;
use crate::term::{Term, Var};
use crate::undef;

#[derive(Clone, Debug)]
pub struct SaturationConfig {
    /// Maximum number of generated conclusions.
    pub max_steps: usize,
    /// Maximum number of retained clauses.
    pub max_clauses: usize,
    pub trace: bool,
    pub track_degree: bool,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            max_steps: 1_000_000,
            max_clauses: 100_000,
            trace: true,
            track_degree: false,
        }
    }
}

/// Extra rules for the undef axioms.
#[derive(Clone, Debug)]
pub(crate) struct UndefRules {
    pub sig: Signature,
    /// Existentials constrained by an input literal `e != undef`.
    pub nonundef: HashSet<Var>,
}

#[derive(Clone, Debug)]
pub struct ClauseEntry {
    pub id: usize,
    /// Relations appear in their equational encoding.
    pub clause: ConstrainedLiteral,
    pub alive: bool,
    /// Background facts seeded from the theory, not part of the cover.
    pub theory: bool,
}

#[derive(Clone, Debug)]
pub struct Saturation {
    pub clauses: Vec<ClauseEntry>,
    pub trace: Vec<String>,
    pub steps: usize,
    /// Largest term degree seen, when tracking was enabled.
    pub max_degree: Option<usize>,
    pub n_evars: usize,
    pub prec: Precedence,
}

impl Saturation {
    pub fn alive(&self) -> impl Iterator<Item = &ClauseEntry> {
        self.clauses.iter().filter(|c| c.alive)
    }

    /// The e-free surviving clauses with relations decoded.
    pub fn e_free(&self) -> Vec<ConstrainedLiteral> {
        self.alive()
            .filter(|c| !c.theory && c.clause.is_e_free())
            .map(|c| decode_clause(&c.clause))
            .collect()
    }

    /// Surviving clauses in display form, by id.
    pub fn shown(&self) -> Vec<String> {
        self.alive()
            .map(|c| format!("[{}] {}", c.id, show_clause(&c.clause, &self.prec)))
            .collect()
    }
}

fn decode_clause(cl: &ConstrainedLiteral) -> ConstrainedLiteral {
    ConstrainedLiteral {
        literal: cl.literal.as_ref().map(decode_relations),
        constraint: cl.constraint.clone(),
    }
}

fn is_trivial(cl: &ConstrainedLiteral) -> bool {
    cl.literal.as_ref().is_some_and(|l| l.positive && l.atom.is_trivial_eq())
}

fn evars_of(l: &Literal) -> Vec<Var> {
    let mut vs = Vec::new();
    l.vars(&mut vs);
    vs.retain(Var::is_existential);
    vs.sort();
    vs.dedup();
    vs
}

struct Engine<'a> {
    prec: &'a Precedence,
    cfg: &'a SaturationConfig,
    undef: Option<&'a UndefRules>,
    entries: Vec<ClauseEntry>,
    present: HashMap<ConstrainedLiteral, usize>,
    defs: HashMap<Var, Vec<usize>>,
    occurs: HashMap<Var, Vec<usize>>,
    queue: VecDeque<usize>,
    active: Vec<usize>,
    trace: Vec<String>,
    steps: usize,
    degree: Option<DegreeTracker>,
    max_degree: usize,
    done: bool,
}

impl<'a> Engine<'a> {
    fn alive(&self, id: usize) -> bool {
        self.entries[id - 1].alive
    }

    fn clause(&self, id: usize) -> &ConstrainedLiteral {
        &self.entries[id - 1].clause
    }

    fn budget(&self, what: &str) -> Error {
        Error::Budget {
            what: what.to_string(),
            steps: self.steps,
            trace: self.trace.clone(),
        }
    }

    /// Id of the definition that Demodulation applies to `cl` next.
    fn pick_rule(&self, cl: &ConstrainedLiteral) -> Option<usize> {
        let lit = cl.literal.as_ref()?;
        let own = as_definition(lit).map(|(v, t)| (v.clone(), t.clone()));
        let mut evs = evars_of(lit);
        evs.sort_by(|a, b| self.prec.compare(&Term::var(b.clone()), &Term::var(a.clone())));
        for v in evs {
            let Some(ids) = self.defs.get(&v) else { continue };
            let mut best: Option<(usize, &Term)> = None;
            for &rid in ids {
                if !self.alive(rid) {
                    continue;
                }
                let rule = self.clause(rid);
                let (_, t) = as_definition(rule.literal.as_ref().unwrap()).unwrap();
                if !rule.constraint.is_subset(&cl.constraint) {
                    continue;
                }
                if let Some((ov, ot)) = &own {
                    if *ov == v && rule.constraint == cl.constraint && !self.prec.greater(ot, t) {
                        continue;
                    }
                }
                let better = match best {
                    None => true,
                    Some((bid, bt)) => {
                        let c = self.prec.compare(t, bt);
                        c.is_lt() || (c.is_eq() && rid < bid)
                    }
                };
                if better {
                    best = Some((rid, t));
                }
            }
            if let Some((rid, _)) = best {
                return Some(rid);
            }
        }
        None
    }

    fn forward(&self, mut cl: ConstrainedLiteral) -> (ConstrainedLiteral, Vec<usize>) {
        let mut used = Vec::new();
        while let Some(rid) = self.pick_rule(&cl) {
            match demodulate(&cl, self.clause(rid)) {
                Some(next) => {
                    cl = next;
                    used.push(rid);
                }
                None => break,
            }
        }
        (cl, used)
    }

    fn add(&mut self, cl: ConstrainedLiteral, origin: String) -> Result<()> {
        self.add_entry(cl, origin, false)
    }

    fn add_entry(&mut self, cl: ConstrainedLiteral, origin: String, theory: bool) -> Result<()> {
        if self.done {
            return Ok(());
        }
        let (mut cl, used) = self.forward(cl);
        if cl.literal.as_ref().is_some_and(|l| !l.positive && l.atom.is_trivial_eq()) {
            cl = ConstrainedLiteral::bottom(cl.constraint);
        }
        if is_trivial(&cl) || self.present.contains_key(&cl) {
            return Ok(());
        }
        if self.entries.len() >= self.cfg.max_clauses {
            return Err(self.budget("clauses"));
        }
        let id = self.entries.len() + 1;
        if self.cfg.trace {
            let demod = if used.is_empty() {
                String::new()
            } else {
                let ids: Vec<String> = used.iter().map(ToString::to_string).collect();
                format!(", demod({})", ids.join(","))
            };
            self.trace
                .push(format!("[{id}] {origin}{demod} => {}", show_clause(&cl, self.prec)));
        }
        if let (Some(tr), Some(l)) = (self.degree.as_mut(), cl.literal.as_ref()) {
            let d = tr.literal_degree(l).unwrap_or(usize::MAX);
            self.max_degree = self.max_degree.max(d);
        }
        let def = cl
            .literal
            .as_ref()
            .and_then(as_definition)
            .map(|(v, _)| v.clone());
        if let Some(l) = &cl.literal {
            for v in evars_of(l) {
                self.occurs.entry(v).or_default().push(id);
            }
        }
        if let Some(v) = &def {
            self.defs.entry(v.clone()).or_default().push(id);
        }
        let stop = cl.is_bottom() && cl.constraint.is_empty();
        self.present.insert(cl.clone(), id);
        self.entries.push(ClauseEntry {
            id,
            clause: cl,
            alive: true,
            theory,
        });
        self.queue.push_back(id);
        if stop {
            self.done = true;
            return Ok(());
        }
        if def.is_some() {
            self.backward(id)?;
        }
        Ok(())
    }

    fn kill(&mut self, id: usize) {
        let e = &mut self.entries[id - 1];
        e.alive = false;
        self.present.remove(&e.clause);
    }

    /// Rewrites existing clauses with the new definition `xid`.
    fn backward(&mut self, xid: usize) -> Result<()> {
        let x = self.clause(xid).clone();
        let (v, t) = {
            let (v, t) = as_definition(x.literal.as_ref().unwrap()).unwrap();
            (v.clone(), t.clone())
        };
        let mut cands: Vec<usize> = self
            .occurs
            .get(&v)
            .map(|ids| ids.iter().copied().filter(|&i| i != xid && self.alive(i)).collect())
            .unwrap_or_default();
        cands.sort_by_key(|&i| {
            let is_def = self.clause(i).literal.as_ref().and_then(as_definition).is_some();
            (!is_def, i)
        });
        for yid in cands {
            if self.done || !self.alive(xid) {
                break;
            }
            if !self.alive(yid) {
                continue;
            }
            let y = self.clause(yid).clone();
            if !x.constraint.is_subset(&y.constraint) {
                continue;
            }
            if let Some((yv, yt)) = y.literal.as_ref().and_then(as_definition) {
                if *yv == v && x.constraint == y.constraint && !self.prec.greater(yt, &t) {
                    continue;
                }
            }
            let Some(next) = demodulate(&y, &x) else { continue };
            self.kill(yid);
            self.add(next, format!("demod({yid},{xid})"))?;
        }
        Ok(())
    }

    fn count_step(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.cfg.max_steps {
            return Err(self.budget("steps"));
        }
        Ok(())
    }

    fn unary(&mut self, g: usize) -> Result<()> {
        let cl = self.clause(g).clone();
        if let Some(c) = reflexion(&cl) {
            self.count_step()?;
            self.add(c, format!("reflexion({g})"))?;
        }
        if let Some(rules) = self.undef {
            for (c, origin) in undef_unary(&cl, g, rules, self.prec) {
                if !self.alive(g) {
                    break;
                }
                self.count_step()?;
                self.add(c, origin)?;
            }
        }
        Ok(())
    }

    fn binary(&mut self, a: usize, b: usize) -> Result<()> {
        let left = self.clause(a).clone();
        let right = self.clause(b).clone();
        if left.is_e_free() || right.is_e_free() {
            return Ok(());
        }
        let (Some(ll), Some(rl)) = (&left.literal, &right.literal) else {
            return Ok(());
        };
        if ll.positive {
            if let Some((s, _)) = oriented(rl, self.prec) {
                for pos in candidate_positions(s) {
                    if self.done || !self.alive(a) || !self.alive(b) {
                        return Ok(());
                    }
                    let (conc, name) = if rl.positive {
                        (superpose_right(&left, &right, &pos, self.prec), "sup-right")
                    } else {
                        (superpose_left(&left, &right, &pos, self.prec), "sup-left")
                    };
                    if let Some(c) = conc {
                        self.count_step()?;
                        self.add(c, format!("{name}({a},{b}) @{pos}"))?;
                    }
                }
            }
        }
        if self.undef.is_some() {
            for (c, origin) in paramodulations(&left, a, &right, b, self.prec) {
                if self.done || !self.alive(a) || !self.alive(b) {
                    return Ok(());
                }
                self.count_step()?;
                self.add(c, origin)?;
            }
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        while let Some(g) = self.queue.pop_front() {
            if self.done {
                break;
            }
            if !self.alive(g) {
                continue;
            }
            let entry = &self.entries[g - 1];
            if entry.theory || entry.clause.is_e_free() {
                continue;
            }
            self.active.push(g);
            self.unary(g)?;
            let snapshot = self.active.clone();
            for a in snapshot {
                if self.done || !self.alive(g) {
                    break;
                }
                if !self.alive(a) {
                    continue;
                }
                self.binary(a, g)?;
                if a != g && self.alive(a) && self.alive(g) {
                    self.binary(g, a)?;
                }
            }
        }
        Ok(())
    }
}

/// Ext(undef) and the propagation of `e != undef` declarations.
fn undef_unary(
    cl: &ConstrainedLiteral,
    g: usize,
    rules: &UndefRules,
    prec: &Precedence,
) -> Vec<(ConstrainedLiteral, String)> {
    let mut out = Vec::new();
    if let Some(c) = undef::ext_undef(cl, &rules.sig, prec) {
        out.push((c, format!("ext-undef({g})")));
    }
    if let Some(c) = undef::nonundef_consequence(cl, &rules.sig, &rules.nonundef, prec) {
        out.push((c, format!("nonundef({g})")));
    }
    out
}

fn paramodulations(
    left: &ConstrainedLiteral,
    a: usize,
    right: &ConstrainedLiteral,
    b: usize,
    prec: &Precedence,
) -> Vec<(ConstrainedLiteral, String)> {
    undef::paramodulation_positions(left, right, prec)
        .into_iter()
        .filter_map(|p| {
            undef::paramodulate(left, right, &p, prec).map(|c| (c, format!("paramod({a},{b}) @{p}")))
        })
        .collect()
}

fn check_input(init: &[Literal]) -> Result<()> {
    for l in init {
        if !l.is_e_flat() {
            return Err(Error::Input(format!("literal is not e-flat: {l}")));
        }
    }
    Ok(())
}

/// Saturates the constrained literals `L || {}` for the given e-flat
/// literals. Relation atoms are handled through their equational encoding.
pub fn saturate(init: &[Literal], n_evars: usize, prec: &Precedence, cfg: &SaturationConfig) -> Result<Saturation> {
    run(init, &[], n_evars, prec, cfg, None)
}

pub(crate) fn run(
    init: &[Literal],
    facts: &[Literal],
    n_evars: usize,
    prec: &Precedence,
    cfg: &SaturationConfig,
    undef: Option<&UndefRules>,
) -> Result<Saturation> {
    check_input(init)?;
    let encoded: Vec<Literal> = init.iter().map(encode_relations).collect();
    let mut eng = Engine {
        prec,
        cfg,
        undef,
        entries: Vec::new(),
        present: HashMap::new(),
        defs: HashMap::new(),
        occurs: HashMap::new(),
        queue: VecDeque::new(),
        active: Vec::new(),
        trace: Vec::new(),
        steps: 0,
        degree: cfg.track_degree.then(|| DegreeTracker::new(&encoded)),
        max_degree: 0,
        done: false,
    };
    for f in facts {
        eng.add_entry(ConstrainedLiteral::new(f.clone(), Constraint::empty()), "axiom".into(), true)?;
    }
    for l in encoded {
        eng.add(ConstrainedLiteral::new(l, Constraint::empty()), "input".into())?;
    }
    eng.run()?;
    Ok(Saturation {
        clauses: eng.entries,
        trace: eng.trace,
        steps: eng.steps,
        max_degree: cfg.track_degree.then_some(eng.max_degree),
        n_evars,
        prec: prec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::flatten;
    use crate::signature::{Fun, Sort};

    fn s() -> Sort {
        Sort::new("S")
    }
    fn y(i: usize, n: &str) -> Term {
        Term::var(Var::parameter(i, n, s()))
    }

    fn example1() -> (Vec<Literal>, usize) {
        let f = Fun::new("f", vec![s(), s()], s());
        let e = Var::existential(1, "e", s());
        let ap = |a: Term, b: Term| Term::app(f.clone(), vec![a, b]).unwrap();
        let et = Term::var(e.clone());
        let lhs = ap(ap(et.clone(), y(1, "y1")), y(2, "y2"));
        let rhs = ap(ap(et, y(3, "y1p")), y(4, "y2p"));
        let out = flatten(&[Literal::neq(lhs, rhs).unwrap()], &[e]);
        (out.literals, out.evars.len())
    }

    #[test]
    fn example1_single_output_clause() {
        let (lits, n) = example1();
        let cfg = SaturationConfig {
            track_degree: true,
            ..Default::default()
        };
        let sat = saturate(&lits, n, &Precedence::default(), &cfg).unwrap();
        let out: Vec<String> = sat.e_free().iter().map(|c| show_clause(c, &sat.prec)).collect();
        assert_eq!(out, ["false || {y1 = y1p, y2 = y2p}"]);
        assert!(sat.max_degree.unwrap() <= n);
        assert!(sat.trace[0].starts_with("[1] input => "));
    }

    #[test]
    fn unsatisfiable_input_stops_with_bottom() {
        let e = Term::var(Var::existential(1, "e", s()));
        let lits = [Literal::eq(e.clone(), y(1, "y1")).unwrap(), Literal::neq(e, y(1, "y1")).unwrap()];
        let sat = saturate(&lits, 1, &Precedence::default(), &SaturationConfig::default()).unwrap();
        let out = sat.e_free();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_bottom() && out[0].constraint.is_empty());
    }

    #[test]
    fn rejects_non_flat_input() {
        let f = Fun::new("g", vec![s()], s());
        let e = Term::var(Var::existential(1, "e", s()));
        let nested = Term::app(f.clone(), vec![Term::app(f, vec![e]).unwrap()]).unwrap();
        let l = Literal::eq(nested, y(1, "y1")).unwrap();
        let r = saturate(&[l], 1, &Precedence::default(), &SaturationConfig::default());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn budget_reports_trace() {
        let (lits, n) = example1();
        let cfg = SaturationConfig {
            max_steps: 1,
            ..Default::default()
        };
        match saturate(&lits, n, &Precedence::default(), &cfg) {
            Err(Error::Budget { trace, .. }) => assert!(!trace.is_empty()),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
