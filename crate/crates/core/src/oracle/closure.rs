//! Exhaustive decision-dag measures for tiny formulas.
//!
//! A conjunction is solvable within a measure bound when it is a leaf (it
//! forces some clause to be falsified) or its points are covered by two
//! solvable conjunctions. A dag within the bound exists exactly when the
//! empty conjunction is solvable, so the least fixpoint over all admissible
//! conjunctions gives the measure with no reference to resolution.

use super::{check_unsat, OracleError};
use crate::formula::{BlockStructure, Clause, CnfFormula, Lit};

pub const MAX_CLOSURE_VARS: u32 = 6;

#[derive(Clone, Copy, Debug)]
pub enum ClosureMeasure<'a> {
    Width,
    BlockWidth(&'a BlockStructure),
}

impl ClosureMeasure<'_> {
    fn cost(&self, c: &Clause) -> usize {
        match self {
            ClosureMeasure::Width => c.width(),
            ClosureMeasure::BlockWidth(b) => b.touched_blocks(c).len(),
        }
    }

    fn max(&self, n: u32) -> usize {
        match self {
            ClosureMeasure::Width => n as usize,
            ClosureMeasure::BlockWidth(b) => b.block_count(),
        }
    }
}

/// Points (bit `v-1` of the index is variable `v`) satisfying all literals.
fn point_set(lits: &[Lit], n: u32) -> u64 {
    (0u64..1 << n)
        .filter(|&p| lits.iter().all(|l| l.eval(p >> (l.var() - 1) & 1 == 1)))
        .fold(0u64, |acc, p| acc | 1 << p)
}

fn solvable_root(formula: &CnfFormula, measure: ClosureMeasure<'_>, bound: usize) -> bool {
    let n = formula.var_count();
    let falsify: Vec<u64> = formula.clauses().iter().map(|c| {
        let neg: Vec<Lit> = c.lits().iter().map(|l| l.negated()).collect();
        point_set(&neg, n)
    }).collect();
    let mut sets: Vec<u64> = Vec::new();
    for code in 0..3u32.pow(n) {
        let mut lits = Vec::new();
        let mut rest = code;
        for v in 1..=n {
            match rest % 3 {
                1 => lits.push(Lit::pos(v)),
                2 => lits.push(Lit::neg(v)),
                _ => {}
            }
            rest /= 3;
        }
        if measure.cost(&Clause::new(lits.iter().copied())) <= bound {
            sets.push(point_set(&lits, n));
        }
    }
    let mut solved: Vec<bool> = sets.iter().map(|&s| falsify.iter().any(|&f| s & !f == 0)).collect();
    let full = if n == 6 { u64::MAX } else { (1u64 << (1u64 << n)) - 1 };
    loop {
        let mut changed = false;
        for i in 0..sets.len() {
            if solved[i] {
                continue;
            }
            let target = sets[i];
            let mut parts: Vec<u64> =
                (0..sets.len()).filter(|&j| solved[j] && sets[j] & target != 0).map(|j| sets[j] & target).collect();
            parts.sort_unstable();
            parts.dedup();
            let covered = parts.iter().enumerate().any(|(a, &pa)| parts[a..].iter().any(|&pb| pa | pb == target));
            if covered {
                solved[i] = true;
                changed = true;
            }
        }
        let root = sets.iter().zip(&solved).any(|(&s, &ok)| s == full && ok);
        if root || !changed {
            return root;
        }
    }
}

/// The least bound under which the empty conjunction is solvable.
pub fn conjunction_closure_width(formula: &CnfFormula, measure: ClosureMeasure<'_>) -> Result<usize, OracleError> {
    let n = formula.var_count();
    if n > MAX_CLOSURE_VARS {
        return Err(OracleError::TooLarge { measure: "conjunction_closure", size: n as usize, limit: MAX_CLOSURE_VARS as usize });
    }
    if let ClosureMeasure::BlockWidth(b) = measure {
        if b.var_count() != n {
            return Err(OracleError::BlockMismatch { blocks: b.var_count(), formula: n });
        }
    }
    check_unsat(formula)?;
    Ok((0..=measure.max(n)).find(|&b| solvable_root(formula, measure, b)).expect("unsatisfiable formulas are solvable"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_known_widths() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(conjunction_closure_width(&f, ClosureMeasure::Width).unwrap(), 1);
        let g = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        assert_eq!(conjunction_closure_width(&g, ClosureMeasure::Width).unwrap(), 2);
        let one = BlockStructure::contiguous(1, 2);
        assert_eq!(conjunction_closure_width(&g, ClosureMeasure::BlockWidth(&one)).unwrap(), 1);
        let e = CnfFormula::new(1, vec![Clause::empty()]).unwrap();
        assert_eq!(conjunction_closure_width(&e, ClosureMeasure::Width).unwrap(), 0);
    }
}
