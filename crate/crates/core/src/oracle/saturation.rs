//! Width and block-width by restricted resolution saturation.

use std::collections::HashMap;

use super::{check_size, check_unsat, OracleError, MAX_BLOCK_WIDTH_VARS, MAX_WIDTH_VARS};
use crate::formula::{BlockStructure, Clause, CnfFormula, Lit};
use crate::proof::resolution::{ResStep, ResolutionProof};

/// Result of saturating under an admissibility predicate.
#[derive(Clone, Debug)]
pub struct Saturation {
    /// Number of distinct admissible clauses derived (including axioms).
    pub clause_count: usize,
    /// A refutation using only admissible clauses, when one exists.
    pub proof: Option<ResolutionProof>,
}

#[derive(Default)]
struct Store {
    clauses: Vec<Clause>,
    origin: Vec<ResStep>,
    index: HashMap<Clause, usize>,
    by_lit: HashMap<Lit, Vec<usize>>,
}

impl Store {
    fn add(&mut self, c: Clause, o: ResStep) -> Option<usize> {
        if self.index.contains_key(&c) {
            return None;
        }
        let id = self.clauses.len();
        for &l in c.lits() {
            self.by_lit.entry(l).or_default().push(id);
        }
        self.index.insert(c.clone(), id);
        self.clauses.push(c);
        self.origin.push(o);
        Some(id)
    }
}

/// Closes the admissible axioms under resolution, keeping only admissible,
/// non-tautological resolvents. Stops at the first empty clause.
pub fn saturate<P: Fn(&Clause) -> bool>(formula: &CnfFormula, admissible: P) -> Saturation {
    let mut st = Store::default();
    let mut empty = None;
    for (k, c) in formula.clauses().iter().enumerate() {
        if admissible(c) {
            if let Some(id) = st.add(c.clone(), ResStep::Axiom(k)) {
                if st.clauses[id].is_empty() && empty.is_none() {
                    empty = Some(id);
                }
            }
        }
    }
    let mut next = 0;
    'outer: while empty.is_none() && next < st.clauses.len() {
        let id = next;
        next += 1;
        let c = st.clauses[id].clone();
        for &l in c.lits() {
            // Partners already processed; later ones meet `id` when processed.
            let partners: Vec<usize> =
                st.by_lit.get(&l.negated()).map_or(Vec::new(), |v| v.iter().copied().filter(|&o| o <= id).collect());
            for other in partners {
                let r = c.resolve(&st.clauses[other], l.var());
                if r.is_tautology() || !admissible(&r) {
                    continue;
                }
                let step = ResStep::Resolve { left: other, right: id, pivot: l.var() };
                if let Some(new) = st.add(r, step) {
                    if st.clauses[new].is_empty() {
                        empty = Some(new);
                        break 'outer;
                    }
                }
            }
        }
    }
    let proof = empty.map(|e| extract(&st.origin, e));
    Saturation { clause_count: st.clauses.len(), proof }
}

/// The steps reachable from `target`, renumbered in derivation order.
fn extract(origin: &[ResStep], target: usize) -> ResolutionProof {
    let mut used = vec![false; origin.len()];
    used[target] = true;
    for i in (0..=target).rev() {
        if let (true, ResStep::Resolve { left, right, .. }) = (used[i], origin[i]) {
            used[left] = true;
            used[right] = true;
        }
    }
    let mut new_id = vec![usize::MAX; origin.len()];
    let mut steps = Vec::new();
    for i in 0..=target {
        if !used[i] {
            continue;
        }
        new_id[i] = steps.len();
        steps.push(match origin[i] {
            ResStep::Axiom(k) => ResStep::Axiom(k),
            ResStep::Resolve { left, right, pivot } => ResStep::Resolve { left: new_id[left], right: new_id[right], pivot },
        });
    }
    ResolutionProof::new(steps, false)
}

/// `w(F)` with a refutation of that width and the saturation size at that width.
pub fn min_width(formula: &CnfFormula) -> Result<(usize, Saturation), OracleError> {
    check_size("min_width", formula.var_count() as usize, MAX_WIDTH_VARS as usize)?;
    check_unsat(formula)?;
    for w in 0..=formula.var_count() as usize {
        let s = saturate(formula, |c| c.width() <= w);
        if s.proof.is_some() {
            return Ok((w, s));
        }
    }
    unreachable!("width-n saturation refutes every unsatisfiable formula")
}

/// `bw(F)` for `blocks`, with a refutation of that block-width.
pub fn min_block_width(formula: &CnfFormula, blocks: &BlockStructure) -> Result<(usize, Saturation), OracleError> {
    check_size("min_block_width", formula.var_count() as usize, MAX_BLOCK_WIDTH_VARS as usize)?;
    if blocks.var_count() != formula.var_count() {
        return Err(OracleError::BlockMismatch { blocks: blocks.var_count(), formula: formula.var_count() });
    }
    check_unsat(formula)?;
    for b in 0..=blocks.block_count() {
        let s = saturate(formula, |c| blocks.touched_blocks(c).len() <= b);
        if s.proof.is_some() {
            return Ok((b, s));
        }
    }
    unreachable!("saturation with every block admitted refutes every unsatisfiable formula")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::resolution::verify_resolution;

    #[test]
    fn width_examples() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(min_width(&f).unwrap().0, 1);
        let g = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let (w, s) = min_width(&g).unwrap();
        assert_eq!(w, 2);
        let m = verify_resolution(&g, s.proof.as_ref().unwrap(), None).unwrap();
        assert_eq!(m.width, 2);
        let e = CnfFormula::new(2, vec![Clause::from_dimacs(&[1, 2]), Clause::empty()]).unwrap();
        assert_eq!(min_width(&e).unwrap().0, 0);
    }

    #[test]
    fn block_width_examples() {
        let g = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        assert_eq!(min_block_width(&g, &BlockStructure::singletons(2)).unwrap().0, 2);
        let (b, s) = min_block_width(&g, &BlockStructure::contiguous(1, 2)).unwrap();
        assert_eq!(b, 1);
        let m = verify_resolution(&g, s.proof.as_ref().unwrap(), Some(&BlockStructure::contiguous(1, 2))).unwrap();
        assert_eq!(m.block_width, Some(1));
    }
}
