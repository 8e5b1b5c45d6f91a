//! Quantifier-free formulae.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::literal::Literal;
use crate::term::{Term, Var};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn lit(l: Literal) -> Formula {
        Formula::Lit(l)
    }

    /// Conjunction, flattening nested conjunctions and absorbing constants.
    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction, flattening nested disjunctions and absorbing constants.
    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => Formula::Lit(l.negate()),
            Formula::Not(g) => *g,
            f => Formula::Not(Box::new(f)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn conj(lits: &[Literal]) -> Formula {
        Formula::and(lits.iter().cloned().map(Formula::Lit))
    }

    /// Negation normal form: only `And`, `Or`, literals and constants remain.
    pub fn nnf(&self) -> Formula {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, pos: bool) -> Formula {
        match (self, pos) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Lit(l), true) => Formula::Lit(l.clone()),
            (Formula::Lit(l), false) => Formula::Lit(l.negate()),
            (Formula::Not(g), p) => g.nnf_pol(!p),
            (Formula::And(fs), true) => Formula::and(fs.iter().map(|f| f.nnf_pol(true))),
            (Formula::And(fs), false) => Formula::or(fs.iter().map(|f| f.nnf_pol(false))),
            (Formula::Or(fs), true) => Formula::or(fs.iter().map(|f| f.nnf_pol(true))),
            (Formula::Or(fs), false) => Formula::and(fs.iter().map(|f| f.nnf_pol(false))),
            (Formula::Implies(a, b), true) => Formula::or([a.nnf_pol(false), b.nnf_pol(true)]),
            (Formula::Implies(a, b), false) => Formula::and([a.nnf_pol(true), b.nnf_pol(false)]),
        }
    }

    /// Disjunctive normal form as a list of cubes; fails past `budget` cubes.
    pub fn dnf(&self, budget: usize) -> Result<Vec<Vec<Literal>>> {
        fn go(f: &Formula, budget: usize) -> Result<Vec<Vec<Literal>>> {
            match f {
                Formula::True => Ok(vec![Vec::new()]),
                Formula::False => Ok(Vec::new()),
                Formula::Lit(l) => Ok(vec![vec![l.clone()]]),
                Formula::Or(fs) => {
                    let mut out = Vec::new();
                    for g in fs {
                        out.extend(go(g, budget)?);
                        if out.len() > budget {
                            return Err(dnf_budget(budget));
                        }
                    }
                    Ok(out)
                }
                Formula::And(fs) => {
                    let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                    for g in fs {
                        let part = go(g, budget)?;
                        let mut next = Vec::with_capacity(acc.len() * part.len());
                        for a in &acc {
                            for p in &part {
                                let mut cube = a.clone();
                                for l in p {
                                    if !cube.contains(l) {
                                        cube.push(l.clone());
                                    }
                                }
                                next.push(cube);
                                if next.len() > budget {
                                    return Err(dnf_budget(budget));
                                }
                            }
                        }
                        acc = next;
                    }
                    Ok(acc)
                }
                Formula::Not(_) | Formula::Implies(..) => unreachable!("not in negation normal form"),
            }
        }
        go(&self.nnf(), budget)
    }

    /// The literals of a conjunction of literals, or `None` for any other shape.
    pub fn as_conjunction(&self) -> Option<Vec<Literal>> {
        match self {
            Formula::True => Some(Vec::new()),
            Formula::Lit(l) => Some(vec![l.clone()]),
            Formula::Not(g) => match g.as_ref() {
                Formula::Lit(l) => Some(vec![l.negate()]),
                _ => None,
            },
            Formula::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    out.extend(f.as_conjunction()?);
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn for_each_literal<'a>(&'a self, f: &mut impl FnMut(&'a Literal)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => f(l),
            Formula::Not(g) => g.for_each_literal(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.for_each_literal(f)),
            Formula::Implies(a, b) => {
                a.for_each_literal(f);
                b.for_each_literal(f);
            }
        }
    }

    pub fn map_literals(&self, f: &mut impl FnMut(&Literal) -> Literal) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Lit(l) => Formula::Lit(f(l)),
            Formula::Not(g) => Formula::Not(Box::new(g.map_literals(f))),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_literals(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_literals(f)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.map_literals(f)), Box::new(b.map_literals(f)))
            }
        }
    }

    pub fn substitute(&self, map: &HashMap<Var, Term>) -> Formula {
        self.map_literals(&mut |l| l.substitute(map))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.for_each_literal(&mut |l| l.vars(&mut out));
        out
    }

    pub fn is_e_free(&self) -> bool {
        let mut free = true;
        self.for_each_literal(&mut |l| free &= l.is_e_free());
        free
    }
}

fn dnf_budget(budget: usize) -> Error {
    Error::Budget {
        what: format!("DNF larger than {budget} cubes"),
        steps: budget,
        trace: Vec::new(),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str) -> fmt::Result {
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(fs) => join(f, fs, "&"),
            Formula::Or(fs) => join(f, fs, "|"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}
