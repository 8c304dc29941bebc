//! Toolkit for gadget-composed CNF formulas and lifting experiments.
//!
//! The crate builds composed formulas `F ∘ Ind`, verifies Resolution,
//! Cutting Planes, decision-dag and real-protocol objects, lifts refutations
//! of `F` into refutations of the composed formula, computes exact
//! complexity measures by brute force, and checks the entropy and
//! rectangle machinery used by lifting arguments on explicit micro domains.

pub mod compose;
pub mod formula;
pub mod gadget;
pub mod lab;
pub mod lift;
pub mod oracle;
pub mod proof;
pub mod relation;
pub mod sim;
pub mod tree;
