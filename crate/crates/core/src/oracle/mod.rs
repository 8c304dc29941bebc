//! Exact brute-force complexity measures for desk-scale instances.
//!
//! Every search returns a witness that the proof-system verifiers accept:
//! decision trees for depth and tree size, resolution refutations for width
//! and block-width.

mod closure;
mod composed_depth;
mod relation_depth;
mod saturation;
mod trees;

use std::fmt;

use thiserror::Error;

use crate::formula::{Clause, CnfFormula, Lit};

pub use closure::{conjunction_closure_width, ClosureMeasure, MAX_CLOSURE_VARS};
pub use composed_depth::{min_composed_depth, ComposedDepth, MAX_BLOCK_BITS};
pub use relation_depth::{min_relation_depth, RelationDepth};
pub use saturation::{min_block_width, min_width, saturate, Saturation};
pub use trees::{min_depth, min_tree_size, tree_to_resolution, TreeWitness};

pub const MAX_DEPTH_VARS: u32 = 24;
pub const MAX_TREE_SIZE_VARS: u32 = 15;
pub const MAX_WIDTH_VARS: u32 = 20;
pub const MAX_BLOCK_WIDTH_VARS: u32 = 16;
pub const MAX_RELATION_BITS: usize = 24;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("formula is satisfiable; the measure is infinite")]
    Satisfiable,
    #[error("instance has {size} variables; the limit for {measure} is {limit}")]
    TooLarge { measure: &'static str, size: usize, limit: usize },
    #[error("relation is not total: {0}")]
    NotTotal(String),
    #[error("block structure covers {blocks} variables, formula has {formula}")]
    BlockMismatch { blocks: u32, formula: u32 },
}

/// One measure outcome for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(u128),
    Sat,
    Skipped(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "{v}"),
            Outcome::Sat => write!(f, "SAT"),
            Outcome::Skipped(why) => write!(f, "skipped({why})"),
        }
    }
}

impl<T: Into<u128>> From<Result<T, OracleError>> for Outcome {
    fn from(r: Result<T, OracleError>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v.into()),
            Err(OracleError::Satisfiable) => Outcome::Sat,
            Err(e) => Outcome::Skipped(e.to_string()),
        }
    }
}

/// `measure=value` lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<(String, Outcome)>,
}

impl Report {
    pub fn push(&mut self, measure: &str, outcome: Outcome) {
        self.lines.push((measure.to_string(), outcome));
    }

    pub fn get(&self, measure: &str) -> Option<&Outcome> {
        self.lines.iter().find(|(m, _)| m == measure).map(|(_, o)| o)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, o) in &self.lines {
            writeln!(f, "{m}={o}")?;
        }
        Ok(())
    }
}

/// A restricted formula in canonical form: clauses sorted, duplicates and
/// subsumed clauses removed. Falsified-clause problems of two formulas with
/// the same canonical form have the same decision-tree measures.
pub(crate) type Key = Vec<Clause>;

pub(crate) fn canonical(mut clauses: Vec<Clause>) -> Key {
    clauses.sort_by(|a, b| a.width().cmp(&b.width()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Vec<Clause> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !kept.iter().any(|k| k.subsumes(&c)) {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

pub(crate) fn assign(key: &Key, var: u32, value: bool) -> Key {
    let lit = Lit::new(var, value);
    let clauses = key
        .iter()
        .filter(|c| !c.contains(lit))
        .map(|c| c.lits().iter().copied().filter(|l| l.var() != var).collect())
        .collect();
    canonical(clauses)
}

pub(crate) fn key_vars(key: &Key) -> Vec<u32> {
    let mut vars: Vec<u32> = key.iter().flat_map(|c| c.vars()).collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

pub(crate) fn has_empty(key: &Key) -> bool {
    key.first().is_some_and(Clause::is_empty)
}

pub(crate) fn check_size(measure: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
    if size > limit {
        return Err(OracleError::TooLarge { measure, size, limit });
    }
    Ok(())
}

pub(crate) fn check_unsat(formula: &CnfFormula) -> Result<(), OracleError> {
    if formula.is_satisfiable() {
        return Err(OracleError::Satisfiable);
    }
    Ok(())
}

/// `Σ_{i ≤ w} C(n, i) 2^i`: the number of clauses of width at most `w`.
pub fn clauses_up_to_width(n: u32, w: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 0..=w.min(n as usize) {
        total += binom << i;
        binom = binom * (n as u128 - i as u128) / (i as u128 + 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_subsumed_clauses() {
        let k = canonical(vec![Clause::from_dimacs(&[1, 2]), Clause::from_dimacs(&[1]), Clause::from_dimacs(&[1])]);
        assert_eq!(k, vec![Clause::from_dimacs(&[1])]);
        let r = assign(&vec![Clause::from_dimacs(&[1, 2]), Clause::from_dimacs(&[-1, 3])], 1, false);
        assert_eq!(r, vec![Clause::from_dimacs(&[2])]);
        assert!(has_empty(&assign(&vec![Clause::from_dimacs(&[1])], 1, false)));
    }

    #[test]
    fn clause_counts() {
        assert_eq!(clauses_up_to_width(2, 2), 1 + 4 + 4);
        assert_eq!(clauses_up_to_width(3, 1), 1 + 6);
        assert_eq!(clauses_up_to_width(1, 5), 3);
    }

    #[test]
    fn report_lines() {
        let mut r = Report::default();
        r.push("depth", Outcome::Value(2));
        r.push("width", Outcome::Sat);
        assert_eq!(r.to_string(), "depth=2\nwidth=SAT\n");
    }
}
