//! Entropy measures and structure checks on explicit micro domains.
//!
//! Selector sets live in `[m]^N` with 0-based symbols: selector value `v`
//! is symbol `v − 1` and points at row bit `v − 1`. Rows of `{0,1}^m` are
//! `u64` masks with bit `c` holding column `c`.

pub mod dist;
pub mod fourier;
pub mod partition;
pub mod real;
pub mod round;
pub mod simplex;
pub mod structured;

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

pub use dist::{Blockwise, Coordinate, FiniteDistribution};
pub use real::Real;

/// A measured or threshold quantity in a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    Finite(Real),
    Infinite,
    NegInfinite,
}

impl Quantity {
    pub fn rat(q: BigRational) -> Self {
        Quantity::Finite(Real::Rat(q))
    }

    pub fn count(v: usize) -> Self {
        Quantity::Finite(Real::int(v as i64))
    }

    fn cmp(&self, other: &Quantity) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Quantity::Infinite, Quantity::Infinite) | (Quantity::NegInfinite, Quantity::NegInfinite) => Equal,
            (Quantity::Infinite, _) | (_, Quantity::NegInfinite) => Greater,
            (_, Quantity::Infinite) | (Quantity::NegInfinite, _) => Less,
            (Quantity::Finite(a), Quantity::Finite(b)) => a.compare(b),
        }
    }

    pub fn at_least(&self, threshold: &Quantity) -> bool {
        self.cmp(threshold) != std::cmp::Ordering::Less
    }

    pub fn at_most(&self, threshold: &Quantity) -> bool {
        self.cmp(threshold) != std::cmp::Ordering::Greater
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Finite(r) => write!(f, "{r}"),
            Quantity::Infinite => write!(f, "inf"),
            Quantity::NegInfinite => write!(f, "-inf"),
        }
    }
}

/// One checked condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub name: String,
    pub measured: Quantity,
    pub threshold: Quantity,
    pub pass: bool,
}

/// Checker output; one `condition=… measured=… threshold=… pass=…` line each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabReport {
    pub conditions: Vec<Condition>,
}

impl LabReport {
    pub fn push(&mut self, name: impl Into<String>, measured: Quantity, threshold: Quantity, pass: bool) {
        self.conditions.push(Condition { name: name.into(), measured, threshold, pass });
    }

    /// Records `measured ≥ threshold`.
    pub fn at_least(&mut self, name: impl Into<String>, measured: Quantity, threshold: Quantity) -> bool {
        let pass = measured.at_least(&threshold);
        self.push(name, measured, threshold, pass);
        pass
    }

    /// Records `measured ≤ threshold`.
    pub fn at_most(&mut self, name: impl Into<String>, measured: Quantity, threshold: Quantity) -> bool {
        let pass = measured.at_most(&threshold);
        self.push(name, measured, threshold, pass);
        pass
    }

    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, prefix: &str, other: LabReport) {
        for mut c in other.conditions {
            c.name = format!("{prefix}{}", c.name);
            self.conditions.push(c);
        }
    }
}

impl fmt::Display for LabReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            writeln!(f, "condition={} measured={} threshold={} pass={}", c.name, c.measured, c.threshold, c.pass)?;
        }
        Ok(())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("{what} has {size} coordinates; the limit is {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty component: {0}")]
    EmptyComponent(String),
    #[error("box is not structured:\n{0}")]
    NotStructured(LabReport),
    #[error("union bound infeasible: slack {slack}")]
    Infeasible { slack: String },
    #[error("no selector is good for every row")]
    NoGoodSelector,
    #[error("blockwise min-entropy {beta} is not above 1/2")]
    EntropyTooLow { beta: String },
    #[error("no selector reaches the target; best epsilon {best}")]
    NoUniformSelector { best: String },
    #[error("grouping is not balanced: {0}")]
    Unbalanced(String),
    #[error("preconditions unmet:\n{0}")]
    PreconditionFailed(LabReport),
    #[error("no part satisfies every round condition:\n{0}")]
    NoRoundPart(String),
    #[error("membership is not monotone: {0}")]
    NotMonotone(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> LabError {
    LabError::Syntax { line, msg: msg.into() }
}

/// Subsets of `0..k` as bitmasks, grouped by decreasing size, lex within a size.
pub(crate) fn subsets_by_size_desc(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in (1..=k).rev() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            out.push(combo.clone());
            let Some(i) = (0..size).rev().find(|&i| combo[i] < k - size + i) else { break };
            combo[i] += 1;
            for t in i + 1..size {
                combo[t] = combo[t - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_come_largest_first() {
        let s = subsets_by_size_desc(3);
        assert_eq!(s.len(), 7);
        assert_eq!(s[0], vec![0, 1, 2]);
        assert_eq!(&s[1..4], &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(s[6], vec![2]);
    }

    #[test]
    fn report_lines() {
        let mut r = LabReport::default();
        assert!(r.at_most("d", Quantity::count(1), Quantity::count(2)));
        assert!(!r.at_least("h", Quantity::count(1), Quantity::Infinite));
        assert_eq!(r.to_string(), "condition=d measured=1 threshold=2 pass=true\ncondition=h measured=1 threshold=inf pass=false\n");
        assert!(!r.pass());
    }
}
