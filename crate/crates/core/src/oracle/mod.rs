//! Independent checks of covers: the residue and extension conditions, a
//! brute-force cover over acyclic signatures, and finite-model utilities.

mod acyclic;
mod extension;
mod model;
mod safety;

pub use acyclic::{acyclic_cover, signature_of, AcyclicCover, AcyclicOptions};
pub use extension::{check_extension, check_extension_budget, ExtensionResult, Witness, DEFAULT_WORLD_BUDGET};
pub use model::{export_relational, Fact, FiniteModel};
pub use safety::{enumerate_models, explicit_safety, model_distance, ExplicitVerdict};

use crate::error::Result;
use crate::formula::Formula;
use crate::solver::{entails, Theory};

/// Whether `psi` follows from `phi` with its existentials read as free
/// constants.
pub fn check_residue(phi: &Formula, psi: &Formula, theory: &Theory) -> Result<bool> {
    entails(phi, psi, theory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::Literal;
    use crate::signature::{Rel, Sort};
    use crate::term::{Term, Var};

    #[test]
    fn residue_examples() {
        let s = Sort::new("S");
        let r = Rel::new("R", vec![s.clone(), s.clone()]);
        let e = Term::var(Var::existential(1, "e", s.clone()));
        let y1 = Term::var(Var::parameter(1, "y1", s.clone()));
        let y2 = Term::var(Var::parameter(2, "y2", s));
        let phi = Formula::conj(&[
            Literal::rel(true, r.clone(), vec![e.clone(), y1.clone()]).unwrap(),
            Literal::rel(false, r, vec![e, y2.clone()]).unwrap(),
        ]);
        assert!(check_residue(&phi, &Formula::True, &Theory::Empty).unwrap());
        let eq = Formula::lit(Literal::eq(y1.clone(), y2.clone()).unwrap());
        assert!(!check_residue(&phi, &eq, &Theory::Empty).unwrap());
        let ne = Formula::lit(Literal::neq(y1, y2).unwrap());
        assert!(check_residue(&phi, &ne, &Theory::Empty).unwrap());
    }
}
