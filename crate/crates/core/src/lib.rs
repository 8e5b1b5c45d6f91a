//! Cover computation (uniform quantifier-free interpolation) for the theory
//! of equality with uninterpreted symbols.
//!
//! The general engine is a constrained superposition calculus
//! ([`calculus`]); signatures with only unary functions get a quadratic
//! specialization ([`dbcover`]); the undef axioms are handled by
//! [`undef`]. Covers serve as the quantifier-elimination step of a backward
//! reachability checker ([`reach`]).

pub mod calculus;
pub mod dbcover;
pub mod error;
pub mod flatten;
pub mod formula;
pub mod literal;
pub mod oracle;
pub mod ordering;
pub mod parse;
pub mod print;
pub mod reach;
pub mod signature;
pub mod solver;
pub mod term;
pub mod undef;

pub use error::{Error, Result};
pub use formula::Formula;
pub use literal::{canonical_constraint, Atom, ConstrainedLiteral, Constraint, Literal};
pub use ordering::Precedence;
pub use signature::{Fun, Rel, Signature, Sort};
pub use term::{Term, Var, VarKind};
