//! Proof systems and their verifiers.

pub mod cp;
pub mod dag;
pub mod protocol;
pub mod resolution;
