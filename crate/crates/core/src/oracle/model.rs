//! Finite structures, evaluation, and their relational view.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::signature::{Fun, Rel, Signature, Sort};
use crate::term::{Node, Term, Var};

/// A finite structure. Elements of each sort are `0..size`; when `undef` is
/// set, element 0 of every sort interprets `undef.<sort>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteModel {
    pub sizes: BTreeMap<Sort, usize>,
    pub funs: BTreeMap<Fun, BTreeMap<Vec<usize>, usize>>,
    pub rels: BTreeMap<Rel, BTreeSet<Vec<usize>>>,
    pub undef: bool,
}

impl FiniteModel {
    pub fn element_name(&self, sort: &Sort, i: usize) -> String {
        if self.undef && i == 0 {
            format!("undef.{}", sort.name())
        } else {
            format!("{}{}", sort.name().to_lowercase(), i)
        }
    }

    fn apply(&self, f: &Fun, args: &[usize]) -> Option<usize> {
        if self.undef && args.is_empty() && f.name() == format!("undef.{}", f.result().name()) {
            return Some(0);
        }
        self.funs.get(f)?.get(args).copied()
    }

    /// `None` when some value is missing from the tables.
    pub fn eval_term(&self, t: &Term, env: &HashMap<Var, usize>) -> Option<usize> {
        match t.node() {
            Node::Var(v) => env.get(v).copied(),
            Node::App(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(a, env))
                    .collect::<Option<Vec<_>>>()?;
                self.apply(f, &vals)
            }
        }
    }

    pub fn eval_literal(&self, l: &Literal, env: &HashMap<Var, usize>) -> Option<bool> {
        let v = match &l.atom {
            Atom::Eq(a, b) => self.eval_term(a, env)? == self.eval_term(b, env)?,
            Atom::Rel(r, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_term(a, env))
                    .collect::<Option<Vec<_>>>()?;
                self.rels.get(r).is_some_and(|s| s.contains(&vals))
            }
        };
        Some(v == l.positive)
    }

    pub fn eval(&self, f: &Formula, env: &HashMap<Var, usize>) -> Option<bool> {
        Some(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => self.eval_literal(l, env)?,
            Formula::Not(g) => !self.eval(g, env)?,
            Formula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Some(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Some(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
        })
    }

    /// Checks `f(x) = undef <-> x = undef` for every total unary table.
    pub fn satisfies_undef_axioms(&self) -> bool {
        self.funs.iter().all(|(f, table)| {
            f.arity() != 1 || table.iter().all(|(args, &v)| (args[0] == 0) == (v == 0))
        })
    }

    /// Every assignment of the variables to elements of their sorts.
    pub fn assignments(&self, vars: &[Var]) -> Vec<HashMap<Var, usize>> {
        let mut out = vec![HashMap::new()];
        for v in vars {
            let n = self.sizes.get(v.sort()).copied().unwrap_or(0);
            out = out
                .into_iter()
                .flat_map(|env| {
                    (0..n).map(move |i| {
                        let mut env = env.clone();
                        env.insert(v.clone(), i);
                        env
                    })
                })
                .collect();
        }
        out
    }
}

/// A labeled fact `R(a: v, ..)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fact {
    pub relation: String,
    pub fields: Vec<(String, String)>,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| if k.is_empty() { v.clone() } else { format!("{k}: {v}") })
            .collect();
        write!(f, "{}({})", self.relation, parts.join(", "))
    }
}

/// The relational view of a structure over a DB signature: for every sort
/// `S` and element `o`, a fact `R_S(id: o, a_f: f(o), ..)` over the unary
/// functions with domain `S`; plus the tuples of every relation.
pub fn export_relational(model: &FiniteModel, sig: &Signature) -> Vec<Fact> {
    let mut out = Vec::new();
    for (sort, &n) in &model.sizes {
        let attrs: Vec<&Fun> = sig
            .funs()
            .iter()
            .filter(|f| f.arity() == 1 && f.args()[0] == *sort)
            .collect();
        for o in 0..n {
            let mut fields = vec![("id".to_string(), model.element_name(sort, o))];
            for f in &attrs {
                let v = match model.apply(f, &[o]) {
                    Some(v) => model.element_name(f.result(), v),
                    None => "?".into(),
                };
                fields.push((format!("a_{}", f.name()), v));
            }
            out.push(Fact {
                relation: format!("R_{}", sort.name()),
                fields,
            });
        }
    }
    for (r, tuples) in &model.rels {
        for t in tuples {
            let fields = t
                .iter()
                .zip(r.args())
                .map(|(&v, s)| (String::new(), model.element_name(s, v)))
                .collect();
            out.push(Fact {
                relation: r.name().to_string(),
                fields,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relational_view() {
        let mut sig = Signature::new();
        sig.add_sort("S").unwrap();
        sig.add_sort("V").unwrap();
        let f = sig.add_fun("f", &["S"], "V").unwrap();
        let r = sig.add_rel("r", &["S", "V"]).unwrap();
        let s = sig.sort("S").unwrap();
        let v = sig.sort("V").unwrap();
        assert!(export_relational(&FiniteModel::default(), &sig).is_empty());
        let mut m = FiniteModel::default();
        m.sizes.insert(s, 1);
        m.sizes.insert(v, 1);
        m.funs.entry(f).or_default().insert(vec![0], 0);
        let shown: Vec<String> = export_relational(&m, &sig).iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["R_S(id: s0, a_f: v0)", "R_V(id: v0)"]);
        m.rels.entry(r).or_default().insert(vec![0, 0]);
        let shown: Vec<String> = export_relational(&m, &sig).iter().map(ToString::to_string).collect();
        assert_eq!(shown.last().unwrap(), "r(s0, v0)");
    }
}
