//! Browser bindings: a cover, its dag form, and a safety check, each taking
//! the text of a problem file.

use covergen::calculus::{self, CoverOptions, SaturationConfig};
use covergen::dbcover::db_cover;
use covergen::parse::{parse_problem, Problem, Query};
use covergen::reach::{breach, ReachConfig, Verdict};
use covergen::solver::Theory;
use covergen::undef::{undef_cover, UndefConfig};
use covergen::{print, Error};
use wasm_bindgen::prelude::*;

fn cover_of(p: &Problem) -> Result<String, Error> {
    let Query::Cover(q) = &p.query else {
        return Err(Error::Input("expected a (cover ...) query".into()));
    };
    let cfg = SaturationConfig {
        trace: false,
        ..SaturationConfig::default()
    };
    let c = match &p.theory {
        Theory::Empty => calculus::cover(&q.body, &q.evars, &p.prec, &cfg, &CoverOptions::default())?,
        Theory::Undef(sig) => undef_cover(&q.body, &q.evars, &p.prec, &cfg, &UndefConfig::new(sig), true)?,
        Theory::Axioms(..) => return Err(Error::Unsupported("axiom theories in the demo".into())),
    };
    Ok(c.to_string())
}

pub fn cover_text(text: &str) -> Result<String, Error> {
    cover_of(&parse_problem(text)?)
}

pub fn dag_text(text: &str) -> Result<String, Error> {
    let p = parse_problem(text)?;
    let Query::Cover(q) = &p.query else {
        return Err(Error::Input("expected a (cover ...) query".into()));
    };
    Ok(db_cover(&q.body, &q.evars, &p.prec)?.render(&p.prec))
}

pub fn safety_text(text: &str) -> Result<String, Error> {
    let p = parse_problem(text)?;
    let Query::System(sys) = &p.query else {
        return Err(Error::Input("expected a (system ...) query".into()));
    };
    Ok(match breach(sys, &ReachConfig::default())?.verdict {
        Verdict::Safe(b) => format!("safe\n{}", print::formula(&b, &p.prec)),
        Verdict::Unsafe(k) => format!("unsafe after {k} steps"),
        Verdict::BudgetExceeded => "unknown: iteration budget exhausted".into(),
    })
}

#[wasm_bindgen]
pub fn cover(text: &str) -> Result<String, JsError> {
    cover_text(text).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn dag_cover(text: &str) -> Result<String, JsError> {
    dag_text(text).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn safety(text: &str) -> Result<String, JsError> {
    safety_text(text).map_err(|e| JsError::new(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_operations() {
        let ex1 = "(signature (sorts S) (functions (f (S S) S)))\n\
                   (cover (exists ((e S))) (and (not (= (f (f e y1) y2) (f (f e y1p) y2p)))))";
        assert_eq!(cover_text(ex1).unwrap(), "(=> (and (= y1 y1p) (= y2 y2p)) false)");
        let rel = "(signature (sorts S) (relations (R (S S))))\n\
                   (cover (exists ((e S))) (and (R e y1) (not (R e y2))))";
        assert_eq!(dag_text(rel).unwrap(), "(not (= y1 y2))");
        let sys = "(signature (sorts S))\n\
                   (system (vars (x S) (y S)) (init (= x y)) (trans (and (= x' x) (= y' y))) (unsafe (not (= x y))))";
        assert!(safety_text(sys).unwrap().starts_with("safe"));
        assert!(cover_text("").is_err());
    }
}
