//! CNF formulas, literals, clauses and the falsified-clause search problem.
//!
//! Variables are 1-indexed as in DIMACS. Clause indices are 0-based positions
//! in [`CnfFormula::clauses`]; text formats that refer to clauses use 1-based
//! indices and convert at the boundary.

mod assignment;
mod blocks;
mod dimacs;

pub use assignment::{BlockPartialAssignment, PartialAssignment};
pub use blocks::{BlockError, BlockStructure};
pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};

use std::fmt;

use thiserror::Error;

/// Errors raised when building formulas or evaluating assignments.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause}: variable {var} exceeds declared variable count {var_count}")]
    VariableOutOfRange { clause: usize, var: u32, var_count: u32 },
    #[error("clause {clause} is tautological (contains x{var} and its negation)")]
    Tautology { clause: usize, var: u32 },
    #[error("assignment has {got} values but the formula has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
}

/// A literal: variable index (≥ 1) and polarity.
///
/// Ordering is by variable first, negative before positive, which gives the
/// canonical clause order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    var: u32,
    positive: bool,
}

impl Lit {
    /// Builds a literal. Panics on variable 0, which has no meaning.
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variables are 1-indexed");
        Lit { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Lit::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Lit::new(var, false)
    }

    /// Converts a nonzero DIMACS integer.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 || value.unsigned_abs() > u64::from(u32::MAX) {
            return None;
        }
        Some(Lit::new(value.unsigned_abs() as u32, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Lit { var: self.var, positive: !self.positive }
    }

    /// Truth value of the literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals kept sorted and duplicate-free.
///
/// Tautologies are representable here (proof objects may contain them);
/// [`CnfFormula::new`] rejects them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        Clause { lits }
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    /// Builds a clause from DIMACS integers; zeros are ignored.
    pub fn from_dimacs(values: &[i64]) -> Self {
        Clause::new(values.iter().filter_map(|&v| Lit::from_dimacs(v)))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// Distinct variables, ascending.
    pub fn vars(&self) -> Vec<u32> {
        let mut vars: Vec<u32> = self.lits.iter().map(|l| l.var).collect();
        vars.dedup();
        vars
    }

    pub fn max_var(&self) -> u32 {
        self.lits.last().map_or(0, |l| l.var)
    }

    /// The variable occurring with both polarities, if any.
    pub fn tautology_var(&self) -> Option<u32> {
        self.lits.windows(2).find(|w| w[0].var == w[1].var).map(|w| w[0].var)
    }

    pub fn is_tautology(&self) -> bool {
        self.tautology_var().is_some()
    }

    /// `self ⊆ other`; the empty clause subsumes every clause.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    /// Evaluates under a total assignment (`z[v-1]` is the value of variable v).
    pub fn eval(&self, z: &[bool]) -> bool {
        self.lits.iter().any(|l| l.eval(z[l.var as usize - 1]))
    }

    /// True if every literal is falsified by the fixed part of `a`.
    pub fn falsified_by(&self, a: &PartialAssignment) -> bool {
        self.lits.iter().all(|l| a.get(l.var) == Some(!l.positive))
    }

    /// Resolvent on `pivot`: `(self ∖ {±pivot}) ∪ (other ∖ {±pivot})`.
    pub fn resolve(&self, other: &Clause, pivot: u32) -> Clause {
        Clause::new(self.lits.iter().chain(other.lits.iter()).copied().filter(|l| l.var != pivot))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

impl FromIterator<Lit> for Clause {
    fn from_iter<I: IntoIterator<Item = Lit>>(iter: I) -> Self {
        Clause::new(iter)
    }
}

/// A CNF formula: variable count plus an ordered clause list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    var_count: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Checks variable ranges and rejects tautological clauses.
    pub fn new(var_count: u32, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for (i, c) in clauses.iter().enumerate() {
            if c.max_var() > var_count {
                return Err(FormulaError::VariableOutOfRange {
                    clause: i,
                    var: c.max_var(),
                    var_count,
                });
            }
            if let Some(var) = c.tautology_var() {
                return Err(FormulaError::Tautology { clause: i, var });
            }
        }
        Ok(CnfFormula { var_count, clauses })
    }

    /// Convenience constructor from DIMACS-style integer lists.
    pub fn from_dimacs_clauses(var_count: u32, clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        CnfFormula::new(var_count, clauses.iter().map(|c| Clause::from_dimacs(c)).collect())
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> Option<&Clause> {
        self.clauses.get(index)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    /// Removes satisfied clauses and falsified literals. An emptied clause
    /// stays in the result. The variable count is unchanged.
    pub fn restrict(&self, a: &PartialAssignment) -> CnfFormula {
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.lits.iter().any(|l| a.get(l.var) == Some(l.positive)))
            .map(|c| Clause { lits: c.lits.iter().copied().filter(|l| a.get(l.var).is_none()).collect() })
            .collect();
        CnfFormula { var_count: self.var_count, clauses }
    }

    /// 0-based indices of the clauses falsified by the total assignment `z`.
    pub fn falsified_clauses(&self, z: &[bool]) -> Result<Vec<usize>, FormulaError> {
        if z.len() != self.var_count as usize {
            return Err(FormulaError::AssignmentLength { expected: self.var_count as usize, got: z.len() });
        }
        Ok(self.clauses.iter().enumerate().filter(|(_, c)| !c.eval(z)).map(|(i, _)| i).collect())
    }

    /// Brute-force satisfiability; intended for desk-scale formulas only.
    pub fn is_satisfiable(&self) -> bool {
        let n = self.var_count as usize;
        assert!(n <= 30, "brute-force satisfiability is limited to 30 variables");
        let mut z = vec![false; n];
        (0u64..1 << n).any(|bits| {
            for (v, slot) in z.iter_mut().enumerate() {
                *slot = bits >> v & 1 == 1;
            }
            self.clauses.iter().all(|c| c.eval(&z))
        })
    }
}

/// Free-function form of [`CnfFormula::restrict`].
pub fn restrict(formula: &CnfFormula, a: &PartialAssignment) -> CnfFormula {
    formula.restrict(a)
}

/// Free-function form of [`CnfFormula::falsified_clauses`].
pub fn falsified_clauses(formula: &CnfFormula, z: &[bool]) -> Result<Vec<usize>, FormulaError> {
    formula.falsified_clauses(z)
}

/// Number of blocks a clause touches.
pub fn clause_block_width(clause: &Clause, blocks: &BlockStructure) -> usize {
    blocks.touched_blocks(clause).len()
}

/// The formula with all `2^d` sign patterns over `x1..xd` as clauses; the
/// leaves of a complete depth-`d` decision tree querying the variables in order.
pub fn complete_tree_contradiction(d: u32) -> CnfFormula {
    let clauses = (0u64..1 << d)
        .map(|pattern| Clause::new((1..=d).map(|v| Lit::new(v, pattern >> (d - v) & 1 == 0))))
        .collect();
    CnfFormula::new(d, clauses).expect("sign patterns are never tautological")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_two_var() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap()
    }

    #[test]
    fn clause_is_sorted_and_deduplicated() {
        let c = Clause::from_dimacs(&[3, -1, 3, 2]);
        assert_eq!(c.lits(), &[Lit::neg(1), Lit::pos(2), Lit::pos(3)]);
        assert!(!c.is_tautology());
        assert!(Clause::from_dimacs(&[1, -1]).is_tautology());
    }

    #[test]
    fn tautologies_are_rejected_in_formulas() {
        let err = CnfFormula::from_dimacs_clauses(1, &[&[1, -1]]).unwrap_err();
        assert_eq!(err, FormulaError::Tautology { clause: 0, var: 1 });
    }

    #[test]
    fn out_of_range_variable_is_rejected() {
        assert!(matches!(
            CnfFormula::from_dimacs_clauses(1, &[&[2]]),
            Err(FormulaError::VariableOutOfRange { var: 2, .. })
        ));
    }

    #[test]
    fn empty_clause_subsumes_everything() {
        let e = Clause::empty();
        assert!(e.subsumes(&Clause::from_dimacs(&[1, -2])));
        assert!(e.subsumes(&e));
        assert!(!Clause::from_dimacs(&[1]).subsumes(&e));
    }

    #[test]
    fn restrict_examples() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let mut a = PartialAssignment::new(2);
        a.set(1, true);
        assert!(f.restrict(&a).is_empty());
        a.set(1, false);
        assert_eq!(f.restrict(&a).clauses(), &[Clause::from_dimacs(&[2])]);

        let g = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let mut b = PartialAssignment::new(1);
        b.set(1, false);
        assert_eq!(g.restrict(&b).clauses(), &[Clause::empty()]);
    }

    #[test]
    fn falsified_clause_examples() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(f.falsified_clauses(&[true]).unwrap(), vec![1]);
        assert_eq!(full_two_var().falsified_clauses(&[false, false]).unwrap(), vec![0]);
        let sat = CnfFormula::from_dimacs_clauses(2, &[&[1, -2]]).unwrap();
        assert!(sat.falsified_clauses(&[true, false]).unwrap().is_empty());
        assert!(matches!(f.falsified_clauses(&[]), Err(FormulaError::AssignmentLength { .. })));
    }

    #[test]
    fn complete_tree_contradiction_shape() {
        let f = complete_tree_contradiction(2);
        assert_eq!(f.clauses().len(), 4);
        assert!(!f.is_satisfiable());
        for bits in 0..4u32 {
            let z = [bits & 2 != 0, bits & 1 != 0];
            assert_eq!(f.falsified_clauses(&z).unwrap().len(), 1);
        }
        assert_eq!(complete_tree_contradiction(0).clauses(), &[Clause::empty()]);
    }

    #[test]
    fn resolve_removes_both_pivot_literals() {
        let a = Clause::from_dimacs(&[1, 2]);
        let b = Clause::from_dimacs(&[-1, 3]);
        assert_eq!(a.resolve(&b, 1), Clause::from_dimacs(&[2, 3]));
    }
}
