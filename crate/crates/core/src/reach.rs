//! Backward reachability with covers as quantifier elimination.

use std::collections::HashMap;
use std::fmt;

use crate::calculus::{self, CoverOptions, SaturationConfig};
use crate::dbcover::{db_cover, unravel};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::literal::Literal;
use crate::oracle::{acyclic_cover, AcyclicOptions};
use crate::ordering::Precedence;
use crate::print;
use crate::signature::Signature;
use crate::solver::{entails, lits_sat, qf_sat, Theory};
use crate::term::{Term, Var, VarKind};
use crate::undef::{undef_cover, UndefConfig};

/// Default bound on loop iterations.
pub const DEFAULT_MAX_ITER: usize = 64;

/// State variables `x`, their primed copies `x'`, and the formulae
/// `init(x)`, `trans(x, x')`, `unsafe(x)`. Variables of `trans` that are
/// neither state variables nor primed copies are existentially quantified
/// per step.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    pub sig: Signature,
    pub theory: Theory,
    pub vars: Vec<Var>,
    pub next: Vec<Var>,
    pub init: Formula,
    pub trans: Formula,
    pub unsafe_states: Formula,
}

impl TransitionSystem {
    /// Builds the primed copies `x1'` (indices after the state variables).
    pub fn new(sig: Signature, theory: Theory, vars: Vec<Var>, init: Formula, trans: Formula, unsafe_states: Formula) -> Self {
        let n = vars.len();
        let next = vars
            .iter()
            .enumerate()
            .map(|(i, v)| Var::parameter(n + i + 1, &format!("{}'", v.name()), v.sort().clone()))
            .collect();
        TransitionSystem {
            sig,
            theory,
            vars,
            next,
            init,
            trans,
            unsafe_states,
        }
    }

    /// The step-local variables of `trans`.
    pub fn locals(&self) -> Vec<Var> {
        self.trans
            .vars()
            .into_iter()
            .filter(|v| !self.vars.contains(v) && !self.next.contains(v))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ReachConfig {
    pub max_iter: usize,
    /// Bound on the disjuncts produced when normalizing to DNF.
    pub dnf_budget: usize,
    /// Re-checks the verdict against the solver before returning.
    pub certify: bool,
}

impl Default for ReachConfig {
    fn default() -> Self {
        ReachConfig {
            max_iter: DEFAULT_MAX_ITER,
            dnf_budget: 4096,
            certify: true,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// The invariant `B`, a disjunction of cubes whose states all avoid
    /// `init` under backward reachability.
    Safe(Formula),
    /// Length of a counterexample path.
    Unsafe(usize),
    BudgetExceeded,
}

#[derive(Clone, Debug)]
pub struct ReachResult {
    pub verdict: Verdict,
    /// Number of fresh cubes at each iteration.
    pub frontier_sizes: Vec<usize>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Safe(b) => write!(f, "safe\n{}", print::formula(b, &Precedence::default())),
            Verdict::Unsafe(k) => write!(f, "unsafe {k}"),
            Verdict::BudgetExceeded => f.write_str("budget exceeded"),
        }
    }
}

/// `exists x'. trans(x, x') /\ phi(x')`, one primitive formula per DNF
/// disjunct. Returns the existentials and the conjunctions over them.
pub fn pre_image(sys: &TransitionSystem, phi: &[Literal], dnf_budget: usize) -> Result<(Vec<Var>, Vec<Vec<Literal>>)> {
    let mut evars = Vec::new();
    let mut to_e: HashMap<Var, Term> = HashMap::new();
    let mut prime: HashMap<Var, Term> = HashMap::new();
    for (x, xp) in sys.vars.iter().zip(&sys.next) {
        let e = Var::existential(evars.len() + 1, xp.name(), xp.sort().clone());
        prime.insert(x.clone(), Term::var(e.clone()));
        to_e.insert(xp.clone(), Term::var(e.clone()));
        evars.push(e);
    }
    for l in sys.locals() {
        let e = Var::existential(evars.len() + 1, l.name(), l.sort().clone());
        to_e.insert(l, Term::var(e.clone()));
        evars.push(e);
    }
    let target: Vec<Literal> = phi.iter().map(|l| l.substitute(&prime)).collect();
    let mut out = Vec::new();
    for d in sys.trans.substitute(&to_e).dnf(dnf_budget)? {
        let mut conj = d;
        conj.extend(target.iter().cloned());
        out.push(conj);
    }
    Ok((evars, out))
}

/// Cover of `exists evars. body` modulo the system's theory.
pub fn qe_cover(sys: &TransitionSystem, body: &[Literal], evars: &[Var]) -> Result<Formula> {
    let prec = Precedence::default();
    let cfg = SaturationConfig {
        trace: false,
        ..SaturationConfig::default()
    };
    match &sys.theory {
        Theory::Empty if sys.sig.is_db() => unravel(&db_cover(body, evars, &prec)?),
        Theory::Empty => Ok(calculus::cover(body, evars, &prec, &cfg, &CoverOptions::default())?.to_formula()),
        Theory::Undef(sig) => {
            let ucfg = UndefConfig::new(sig);
            let mut cases = Vec::new();
            for mask in 0..1usize << evars.len() {
                let mut lits = body.to_vec();
                for (i, e) in evars.iter().enumerate() {
                    let u = Term::app_unchecked(ucfg.sig.undef(e.sort()).unwrap(), Vec::new());
                    lits.push(Literal::new(
                        mask >> i & 1 == 1,
                        crate::literal::Atom::eq_unchecked(Term::var(e.clone()), u),
                    ));
                }
                cases.push(undef_cover(&lits, evars, &prec, &cfg, &ucfg, true)?.to_formula());
            }
            Ok(Formula::or(cases))
        }
        Theory::Axioms(..) => {
            let c = acyclic_cover(&Formula::conj(body), &sys.theory, &AcyclicOptions::default())?;
            if !c.complete {
                return Err(Error::Unsupported(
                    "clause enumeration budget exhausted before the cover was complete".into(),
                ));
            }
            Ok(c.formula)
        }
    }
}

fn cubes(f: &Formula, theory: &Theory, budget: usize) -> Result<Vec<Vec<Literal>>> {
    let mut out: Vec<Vec<Literal>> = Vec::new();
    for mut c in f.dnf(budget)? {
        c.sort();
        c.dedup();
        if lits_sat(&c, theory)? && !out.contains(&c) {
            out.push(c);
        }
    }
    let keep: Vec<bool> = (0..out.len())
        .map(|i| {
            !(0..out.len()).any(|j| {
                j != i
                    && out[j].iter().all(|l| out[i].contains(l))
                    && (out[j].len() < out[i].len() || j < i)
            })
        })
        .collect();
    Ok(out.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect())
}

fn disjunction(cubes: &[Vec<Literal>]) -> Formula {
    Formula::or(cubes.iter().map(|c| Formula::conj(c)))
}

/// Renames the state variables to step `k` copies, and the locals of `trans`
/// to step-specific ones.
fn at_step(sys: &TransitionSystem, f: &Formula, k: usize, locals: bool) -> Formula {
    let copy = |v: &Var, step: usize, slot: usize| {
        Term::var(Var::new(
            VarKind::Parameter,
            1_000 * (step + 1) + slot,
            &format!("{}@{step}", v.name()),
            v.sort().clone(),
        ))
    };
    let n = sys.vars.len();
    let mut map = HashMap::new();
    for (i, (x, xp)) in sys.vars.iter().zip(&sys.next).enumerate() {
        map.insert(x.clone(), copy(x, k, i));
        map.insert(xp.clone(), copy(x, k + 1, i));
    }
    if locals {
        for (i, l) in sys.locals().iter().enumerate() {
            map.insert(l.clone(), copy(l, k, n + i));
        }
    }
    f.substitute(&map)
}

/// `init(x0) /\ trans(x0, x1) /\ .. /\ unsafe(xk)`.
pub fn unrolling(sys: &TransitionSystem, k: usize) -> Formula {
    let mut parts = vec![at_step(sys, &sys.init, 0, false)];
    for i in 0..k {
        parts.push(at_step(sys, &sys.trans, i, true));
    }
    parts.push(at_step(sys, &sys.unsafe_states, k, false));
    Formula::and(parts)
}

/// Whether `b` excludes `init` and contains the covers of its own
/// pre-images.
pub fn check_invariant(sys: &TransitionSystem, b: &Formula, dnf_budget: usize) -> Result<bool> {
    if qf_sat(&Formula::and([sys.init.clone(), b.clone()]), &sys.theory)? {
        return Ok(false);
    }
    if !entails(&sys.unsafe_states, b, &sys.theory)? {
        return Ok(false);
    }
    for c in cubes(b, &sys.theory, dnf_budget)? {
        let (evars, prims) = pre_image(sys, &c, dnf_budget)?;
        for p in prims {
            if !entails(&qe_cover(sys, &p, &evars)?, b, &sys.theory)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Backward reachability: iterates pre-image covers from `unsafe` until they
/// are subsumed by the accumulated set `B` or meet `init`.
pub fn breach(sys: &TransitionSystem, cfg: &ReachConfig) -> Result<ReachResult> {
    let theory = &sys.theory;
    let mut b: Vec<Vec<Literal>> = Vec::new();
    let mut phi = cubes(&sys.unsafe_states, theory, cfg.dnf_budget)?;
    let mut frontier_sizes = Vec::new();
    for k in 0..=cfg.max_iter {
        let bf = disjunction(&b);
        let mut fresh = Vec::new();
        for c in phi {
            if qf_sat(&Formula::and([Formula::conj(&c), Formula::not(bf.clone())]), theory)? {
                fresh.push(c);
            }
        }
        frontier_sizes.push(fresh.len());
        if fresh.is_empty() {
            let inv = bf;
            if cfg.certify && !check_invariant(sys, &inv, cfg.dnf_budget)? {
                return Err(Error::Internal("safe verdict failed the invariant check".into()));
            }
            return Ok(ReachResult {
                verdict: Verdict::Safe(inv),
                frontier_sizes,
            });
        }
        let fresh_f = disjunction(&fresh);
        if qf_sat(&Formula::and([sys.init.clone(), fresh_f]), theory)? {
            if cfg.certify && !qf_sat(&unrolling(sys, k), theory)? {
                return Err(Error::Internal(format!("unsafe verdict at {k} steps has an unsatisfiable unrolling")));
            }
            return Ok(ReachResult {
                verdict: Verdict::Unsafe(k),
                frontier_sizes,
            });
        }
        if k == cfg.max_iter {
            break;
        }
        let mut next = Vec::new();
        for c in &fresh {
            let (evars, prims) = pre_image(sys, c, cfg.dnf_budget)?;
            for p in prims {
                let cover = qe_cover(sys, &p, &evars)?;
                for d in cubes(&cover, theory, cfg.dnf_budget)? {
                    if !next.contains(&d) {
                        next.push(d);
                    }
                }
            }
        }
        b.extend(fresh);
        phi = next;
    }
    Ok(ReachResult {
        verdict: Verdict::BudgetExceeded,
        frontier_sizes,
    })
}
