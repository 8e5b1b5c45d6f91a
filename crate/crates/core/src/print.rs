//! S-expression rendering of terms, literals and formulae.
//!
//! Equalities print their larger side first under the given precedence, so
//! output is stable across runs.

use crate::formula::Formula;
use crate::literal::{Atom, Literal};
use crate::ordering::Precedence;
use crate::term::{Node, Term};

pub fn term(t: &Term) -> String {
    match t.node() {
        Node::Var(v) => v.name().to_string(),
        Node::App(f, args) if args.is_empty() => f.name().to_string(),
        Node::App(f, args) => {
            let parts: Vec<String> = args.iter().map(term).collect();
            format!("({} {})", f.name(), parts.join(" "))
        }
    }
}

pub fn atom(a: &Atom, prec: &Precedence) -> String {
    match a {
        Atom::Eq(x, y) => {
            let (big, small) = prec.orient(x, y);
            format!("(= {} {})", term(big), term(small))
        }
        Atom::Rel(r, args) if args.is_empty() => r.name().to_string(),
        Atom::Rel(r, args) => {
            let parts: Vec<String> = args.iter().map(term).collect();
            format!("({} {})", r.name(), parts.join(" "))
        }
    }
}

pub fn literal(l: &Literal, prec: &Precedence) -> String {
    if l.positive {
        atom(&l.atom, prec)
    } else {
        format!("(not {})", atom(&l.atom, prec))
    }
}

pub fn formula(f: &Formula, prec: &Precedence) -> String {
    let list = |head: &str, fs: &[Formula]| {
        let parts: Vec<String> = fs.iter().map(|g| formula(g, prec)).collect();
        format!("({head} {})", parts.join(" "))
    };
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Lit(l) => literal(l, prec),
        Formula::Not(g) => format!("(not {})", formula(g, prec)),
        Formula::And(fs) => list("and", fs),
        Formula::Or(fs) => list("or", fs),
        Formula::Implies(a, b) => format!("(=> {} {})", formula(a, prec), formula(b, prec)),
    }
}
