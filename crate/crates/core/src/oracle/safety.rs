//! Explicit-state safety checking over every small finite model.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::oracle::FiniteModel;
use crate::reach::TransitionSystem;
use crate::signature::{FunKind, Sort};
use crate::solver::Theory;
use crate::term::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExplicitVerdict {
    Safe,
    /// Length of the shortest path to an unsafe state over all models.
    Unsafe(usize),
}

enum Cell {
    Fun(crate::signature::Fun, Vec<usize>, Vec<usize>),
    Rel(crate::signature::Rel, Vec<usize>),
}

fn tuples(sizes: &BTreeMap<Sort, usize>, sorts: &[Sort]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in sorts {
        let n = sizes[s];
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn satisfies_axioms(m: &FiniteModel, theory: &Theory) -> bool {
    match theory {
        Theory::Axioms(_, axioms) => axioms.iter().all(|ax| {
            let n = m.sizes.get(ax.var.sort()).copied().unwrap_or(0);
            (0..n).all(|i| {
                let env = HashMap::from([(ax.var.clone(), i)]);
                m.eval(&ax.body, &env) == Some(true)
            })
        }),
        _ => true,
    }
}

/// Every model of the theory with `1..=max_dom` elements per sort, or `None`
/// when there are more than `budget`.
pub fn enumerate_models(sys: &TransitionSystem, max_dom: usize, budget: usize) -> Option<Vec<FiniteModel>> {
    let undef = matches!(sys.theory, Theory::Undef(_));
    let sorts: Vec<Sort> = sys.sig.sorts().to_vec();
    let mut out = Vec::new();
    let mut size_choice = vec![1usize; sorts.len()];
    loop {
        let sizes: BTreeMap<Sort, usize> = sorts.iter().cloned().zip(size_choice.iter().copied()).collect();
        let mut cells = Vec::new();
        for f in sys.sig.funs() {
            if f.kind() != FunKind::Declared || (undef && f.arity() == 0 && f.name().starts_with("undef.")) {
                continue;
            }
            let n = sizes[f.result()];
            for args in tuples(&sizes, f.args()) {
                let range: Vec<usize> = if undef && f.arity() == 1 {
                    if args[0] == 0 {
                        vec![0]
                    } else {
                        (1..n).collect()
                    }
                } else {
                    (0..n).collect()
                };
                cells.push(Cell::Fun(f.clone(), args, range));
            }
        }
        for r in sys.sig.rels() {
            for args in tuples(&sizes, r.args()) {
                cells.push(Cell::Rel(r.clone(), args));
            }
        }
        let ranges: Vec<usize> = cells
            .iter()
            .map(|c| match c {
                Cell::Fun(_, _, r) => r.len(),
                Cell::Rel(..) => 2,
            })
            .collect();
        if ranges.iter().all(|&r| r > 0) {
            let total = ranges.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r));
            match total {
                Some(t) if out.len() + t <= budget => {}
                _ => return None,
            }
            let mut pick = vec![0usize; cells.len()];
            loop {
                let mut m = FiniteModel {
                    sizes: sizes.clone(),
                    undef,
                    ..FiniteModel::default()
                };
                for (c, &p) in cells.iter().zip(&pick) {
                    match c {
                        Cell::Fun(f, args, range) => {
                            m.funs.entry(f.clone()).or_default().insert(args.clone(), range[p]);
                        }
                        Cell::Rel(r, args) => {
                            let set = m.rels.entry(r.clone()).or_default();
                            if p == 1 {
                                set.insert(args.clone());
                            }
                        }
                    }
                }
                if satisfies_axioms(&m, &sys.theory) {
                    out.push(m);
                }
                let mut i = 0;
                while i < pick.len() {
                    pick[i] += 1;
                    if pick[i] < ranges[i] {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == pick.len() {
                    break;
                }
            }
        }
        let mut i = 0;
        while i < size_choice.len() {
            size_choice[i] += 1;
            if size_choice[i] <= max_dom {
                break;
            }
            size_choice[i] = 1;
            i += 1;
        }
        if i == size_choice.len() {
            return Some(out);
        }
    }
}

/// Shortest distance from an initial to an unsafe state in `m`.
pub fn model_distance(sys: &TransitionSystem, m: &FiniteModel) -> Option<usize> {
    let states = m.assignments(&sys.vars);
    let locals = sys.locals();
    let local_envs = m.assignments(&locals);
    let holds = |f, env: &HashMap<Var, usize>| m.eval(f, env) == Some(true);
    let mut dist: Vec<Option<usize>> = vec![None; states.len()];
    let mut queue = VecDeque::new();
    for (i, s) in states.iter().enumerate() {
        if holds(&sys.init, s) {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let d = dist[i].unwrap();
        if holds(&sys.unsafe_states, &states[i]) {
            return Some(d);
        }
        for (j, t) in states.iter().enumerate() {
            if dist[j].is_some() {
                continue;
            }
            let mut env = states[i].clone();
            for (x, xp) in sys.vars.iter().zip(&sys.next) {
                env.insert(xp.clone(), t[x]);
            }
            let step = local_envs.iter().any(|l| {
                let mut env = env.clone();
                env.extend(l.iter().map(|(k, v)| (k.clone(), *v)));
                holds(&sys.trans, &env)
            });
            if step {
                dist[j] = Some(d + 1);
                queue.push_back(j);
            }
        }
    }
    None
}

/// Safety of `sys` over all models with at most `max_dom` elements per sort;
/// `None` when more than `budget` models would be needed.
pub fn explicit_safety(sys: &TransitionSystem, max_dom: usize, budget: usize) -> Option<ExplicitVerdict> {
    let models = enumerate_models(sys, max_dom, budget)?;
    let best = models.iter().filter_map(|m| model_distance(sys, m)).min();
    Some(match best {
        Some(k) => ExplicitVerdict::Unsafe(k),
        None => ExplicitVerdict::Safe,
    })
}
