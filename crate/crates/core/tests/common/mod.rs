#![allow(dead_code)]

use covergen::reach::TransitionSystem;
use covergen::solver::{qf_sat, Theory};
use covergen::{Formula, Fun, Literal, Rel, Signature, Sort, Term, Var};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A cover query `exists evars. body`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub sig: Signature,
    pub evars: Vec<Var>,
    pub params: Vec<Var>,
    pub body: Vec<Literal>,
}

impl Instance {
    pub fn phi(&self) -> Formula {
        Formula::conj(&self.body)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Functions of arity up to 2 over one or two sorts.
    Mixed,
    /// Unary functions only.
    Db,
    /// Unary functions from `S` to `U` only, so the sort graph is acyclic.
    AcyclicDb,
}

fn signature(rng: &mut ChaCha8Rng, shape: Shape) -> Signature {
    let mut sig = Signature::new();
    let two = shape == Shape::AcyclicDb || rng.gen_bool(0.5);
    sig.add_sort("S").unwrap();
    if two {
        sig.add_sort("U").unwrap();
    }
    let sorts: Vec<&str> = if two { vec!["S", "U"] } else { vec!["S"] };
    let nf = rng.gen_range(1..=3);
    for i in 0..nf {
        let name = ["f", "g", "h"][i];
        match shape {
            Shape::AcyclicDb => {
                sig.add_fun(name, &["S"], "U").unwrap();
            }
            Shape::Db => {
                let a = *sorts.choose(rng).unwrap();
                let r = *sorts.choose(rng).unwrap();
                sig.add_fun(name, &[a], r).unwrap();
            }
            Shape::Mixed => {
                let arity = rng.gen_range(1..=2);
                let args: Vec<&str> = (0..arity).map(|_| *sorts.choose(rng).unwrap()).collect();
                let r = *sorts.choose(rng).unwrap();
                sig.add_fun(name, &args, r).unwrap();
            }
        }
    }
    let nr = rng.gen_range(0..=2);
    for i in 0..nr {
        let arity = rng.gen_range(1..=2);
        let args: Vec<&str> = (0..arity).map(|_| *sorts.choose(rng).unwrap()).collect();
        sig.add_rel(["R", "Q"][i], &args).unwrap();
    }
    sig
}

struct Pool {
    evars: Vec<Var>,
    params: Vec<Var>,
}

impl Pool {
    fn atomic(&self, rng: &mut ChaCha8Rng, sort: &Sort, e_bias: f64) -> Term {
        let es: Vec<&Var> = self.evars.iter().filter(|v| v.sort() == sort).collect();
        let ys: Vec<&Var> = self.params.iter().filter(|v| v.sort() == sort).collect();
        let v = if !es.is_empty() && (ys.is_empty() || rng.gen_bool(e_bias)) {
            es.choose(rng).unwrap()
        } else {
            ys.choose(rng).unwrap()
        };
        Term::var((*v).clone())
    }

    fn flat_app(&self, rng: &mut ChaCha8Rng, f: &Fun) -> Term {
        let args = f.args().iter().map(|s| self.atomic(rng, s, 0.6)).collect();
        Term::app(f.clone(), args).unwrap()
    }
}

fn literal(rng: &mut ChaCha8Rng, sig: &Signature, pool: &Pool) -> Literal {
    let funs: Vec<Fun> = sig.funs().to_vec();
    let rels: Vec<Rel> = sig.rels().to_vec();
    let roll = rng.gen_range(0..10);
    if roll < 2 && !rels.is_empty() {
        let r = rels.choose(rng).unwrap();
        let args = r.args().iter().map(|s| pool.atomic(rng, s, 0.6)).collect();
        return Literal::rel(rng.gen_bool(0.5), r.clone(), args).unwrap();
    }
    if roll < 7 && !funs.is_empty() {
        let f = funs.choose(rng).unwrap();
        let lhs = pool.flat_app(rng, f);
        let rhs = pool.atomic(rng, f.result(), 0.4);
        return Literal::eq(lhs, rhs).unwrap();
    }
    let sorts = sig.sorts();
    let s = sorts.choose(rng).unwrap();
    let a = pool.atomic(rng, s, 0.7);
    let mut b = pool.atomic(rng, s, 0.3);
    for _ in 0..3 {
        if b != a {
            break;
        }
        b = pool.atomic(rng, s, 0.3);
    }
    if rng.gen_bool(0.7) {
        Literal::neq(a, b).unwrap()
    } else {
        Literal::eq(a, b).unwrap()
    }
}

/// A random e-flat conjunction with at most `max_e` existentials.
pub fn instance(rng: &mut ChaCha8Rng, shape: Shape, max_e: usize) -> Instance {
    let sig = signature(rng, shape);
    let sorts = sig.sorts().to_vec();
    let ne = rng.gen_range(1..=max_e);
    let evars: Vec<Var> = (0..ne)
        .map(|i| Var::existential(i + 1, &format!("e{}", i + 1), sorts.choose(rng).unwrap().clone()))
        .collect();
    let mut params = Vec::new();
    for s in &sorts {
        let n = rng.gen_range(2..=3);
        for _ in 0..n {
            let i = params.len() + 1;
            params.push(Var::parameter(i, &format!("y{i}"), s.clone()));
        }
    }
    let pool = Pool { evars, params };
    let nl = rng.gen_range(2..=5);
    let mut body: Vec<Literal> = (0..nl).map(|_| literal(rng, &sig, &pool)).collect();
    while !body.iter().any(|l| !l.is_e_free()) {
        let i = rng.gen_range(0..body.len());
        body[i] = literal(rng, &sig, &pool);
    }
    body.sort();
    body.dedup();
    let used: Vec<Var> = Formula::conj(&body).vars();
    let Pool { evars, params } = pool;
    Instance {
        sig,
        evars: evars.into_iter().filter(|v| used.contains(v)).collect(),
        params: params.into_iter().filter(|v| used.contains(v)).collect(),
        body,
    }
}

/// A random system over `S`, `U`, `f: S -> U`, and unary relations, with up
/// to three state variables and at most one step-local variable.
pub fn system(rng: &mut ChaCha8Rng) -> TransitionSystem {
    let mut sig = Signature::new();
    let s = sig.add_sort("S").unwrap();
    let u = sig.add_sort("U").unwrap();
    let f = sig.add_fun("f", &["S"], "U").unwrap();
    let r = sig.add_rel("R", &["S"]).unwrap();
    let q = rng.gen_bool(0.5).then(|| sig.add_rel("Q", &["U"]).unwrap());
    let nv = rng.gen_range(2..=3);
    let vars: Vec<Var> = (0..nv)
        .map(|i| {
            let sort = if i == 0 || rng.gen_bool(0.5) { s.clone() } else { u.clone() };
            Var::parameter(i + 1, &format!("x{}", i + 1), sort)
        })
        .collect();
    let mut sys = TransitionSystem::new(sig, Theory::Empty, vars.clone(), Formula::True, Formula::True, Formula::True);
    let local = rng
        .gen_bool(0.4)
        .then(|| Var::parameter(2 * nv + 1, "z", s.clone()));
    let x: Vec<Term> = vars.iter().cloned().map(Term::var).collect();
    let xp: Vec<Term> = sys.next.iter().cloned().map(Term::var).collect();

    let state_lit = |rng: &mut ChaCha8Rng, terms: &[Term]| -> Literal {
        let mut atoms: Vec<Literal> = Vec::new();
        for (i, a) in terms.iter().enumerate() {
            if a.sort() == &s {
                atoms.push(Literal::rel(true, r.clone(), vec![a.clone()]).unwrap());
                let fa = Term::app(f.clone(), vec![a.clone()]).unwrap();
                for b in terms {
                    if b.sort() == &u {
                        atoms.push(Literal::eq(fa.clone(), b.clone()).unwrap());
                    }
                }
                if let Some(q) = &q {
                    atoms.push(Literal::rel(true, q.clone(), vec![fa]).unwrap());
                }
            } else if let Some(q) = &q {
                atoms.push(Literal::rel(true, q.clone(), vec![a.clone()]).unwrap());
            }
            for b in &terms[i + 1..] {
                if a.sort() == b.sort() {
                    atoms.push(Literal::eq(a.clone(), b.clone()).unwrap());
                }
            }
        }
        let l = atoms.choose(rng).unwrap().clone();
        if rng.gen_bool(0.5) {
            l.negate()
        } else {
            l
        }
    };
    let cube = |rng: &mut ChaCha8Rng, terms: &[Term], max: usize| -> Formula {
        let n = rng.gen_range(1..=max);
        Formula::conj(&(0..n).map(|_| state_lit(rng, terms)).collect::<Vec<_>>())
    };

    loop {
        sys.init = cube(rng, &x, 2);
        sys.unsafe_states = cube(rng, &x, 2);
        let overlap = Formula::and([sys.init.clone(), sys.unsafe_states.clone()]);
        if !qf_sat(&overlap, &Theory::Empty).unwrap() {
            break;
        }
    }
    let mut scope = x.clone();
    if let Some(z) = &local {
        scope.push(Term::var(z.clone()));
    }
    let rules = rng.gen_range(1..=2);
    let mut disjuncts = Vec::new();
    for _ in 0..rules {
        let mut parts = Vec::new();
        if rng.gen_bool(0.7) {
            parts.push(cube(rng, &scope, 2));
        }
        for (i, v) in vars.iter().enumerate() {
            let mut choices: Vec<Term> = scope.iter().filter(|t| t.sort() == v.sort()).cloned().collect();
            if v.sort() == &u {
                for t in scope.iter().filter(|t| t.sort() == &s) {
                    choices.push(Term::app(f.clone(), vec![t.clone()]).unwrap());
                }
            }
            let rhs = choices.choose(rng).unwrap().clone();
            parts.push(Formula::lit(Literal::eq(xp[i].clone(), rhs).unwrap()));
        }
        disjuncts.push(Formula::and(parts));
    }
    sys.trans = Formula::or(disjuncts);
    sys
}
