//! Cirquent-calculus proofs as executable strategies.
//!
//! Formulas are interpreted as games between the machine (`⊤`) and the
//! environment (`⊥`); a verified proof is turned into a machine strategy
//! that wins the interpreted game under every interpretation.

pub mod calculus;
pub mod cirquent;
pub mod formula;
pub mod games;
pub mod harness;
pub mod runs;
pub mod strategy;
