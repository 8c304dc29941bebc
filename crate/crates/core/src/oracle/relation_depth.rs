//! Minimum decision-tree depth for arbitrary search relations.

use std::collections::HashMap;

use super::{check_size, OracleError, MAX_RELATION_BITS};
use crate::relation::{check_total, SearchRelation};
use crate::tree::DecisionTree;

/// An optimal tree over 1-based input variables with 0-based outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationDepth {
    pub depth: usize,
    pub tree: DecisionTree<u32, usize>,
}

/// Subcube as (fixed-bit mask, values of fixed bits).
type Cube = (u32, u32);

struct Search<'a, S: SearchRelation + ?Sized> {
    s: &'a S,
    n: usize,
    memo: HashMap<Cube, (usize, Option<(usize, usize)>)>,
    solved: HashMap<Cube, Option<usize>>,
}

impl<S: SearchRelation + ?Sized> Search<'_, S> {
    fn expand(&self, (mask, vals): Cube) -> Vec<Option<bool>> {
        (0..self.n).map(|b| (mask >> b & 1 == 1).then_some(vals >> b & 1 == 1)).collect()
    }

    fn solve(&mut self, c: Cube) -> Option<usize> {
        if let Some(&o) = self.solved.get(&c) {
            return o;
        }
        let o = self.s.solve_subcube(&self.expand(c));
        self.solved.insert(c, o);
        o
    }

    fn decide(&mut self, c: Cube, k: usize) -> bool {
        if self.solve(c).is_some() {
            return true;
        }
        if k == 0 {
            return false;
        }
        if let Some(&(lb, ub)) = self.memo.get(&c) {
            if lb > k {
                return false;
            }
            if ub.is_some_and(|(u, _)| u <= k) {
                return true;
            }
        }
        let cube = self.expand(c);
        let (mask, vals) = c;
        for b in (0..self.n).filter(|&b| mask >> b & 1 == 0 && self.s.is_relevant(&cube, b)) {
            let m = mask | 1 << b;
            if self.decide((m, vals), k - 1) && self.decide((m, vals | 1 << b), k - 1) {
                self.memo.entry(c).or_insert((0, None)).1 = Some((k, b));
                return true;
            }
        }
        let e = self.memo.entry(c).or_insert((0, None));
        e.0 = e.0.max(k + 1);
        false
    }

    fn build(&self, c: Cube) -> DecisionTree<u32, usize> {
        if let Some(&Some(o)) = self.solved.get(&c) {
            return DecisionTree::Leaf(o);
        }
        let (_, b) = self.memo[&c].1.expect("decided cubes record their query");
        let (mask, vals) = c;
        let m = mask | 1 << b;
        DecisionTree::query(b as u32 + 1, self.build((m, vals)), self.build((m, vals | 1 << b)))
    }
}

/// Exact least depth of a decision tree solving `s`.
pub fn min_relation_depth<S: SearchRelation + ?Sized>(s: &S) -> Result<RelationDepth, OracleError> {
    let n = s.input_bits();
    check_size("min_relation_depth", n, MAX_RELATION_BITS)?;
    check_total(s).map_err(|e| OracleError::NotTotal(e.to_string()))?;
    let mut search = Search { s, n, memo: HashMap::new(), solved: HashMap::new() };
    let depth = (0..=n).find(|&k| search.decide((0, 0), k)).expect("total relations are solved by querying every bit");
    Ok(RelationDepth { depth, tree: search.build((0, 0)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{compose_single, ComposeOptions};
    use crate::formula::CnfFormula;
    use crate::oracle::min_depth;
    use crate::relation::{CnfRelation, ComposedRelation, ExplicitRelation};

    #[test]
    fn constant_relation_has_depth_zero() {
        let r = ExplicitRelation::new(2, 2, vec![vec![0, 1], vec![1], vec![1], vec![1]]).unwrap();
        assert_eq!(min_relation_depth(&r).unwrap().depth, 0);
        let partial = ExplicitRelation::new(1, 1, vec![vec![0], vec![]]).unwrap();
        assert!(matches!(min_relation_depth(&partial), Err(OracleError::NotTotal(_))));
    }

    #[test]
    fn agrees_with_formula_depth() {
        let g = CnfFormula::from_dimacs_clauses(3, &[&[1, 2], &[1, -2], &[-1, 3], &[-1, -3]]).unwrap();
        let r = min_relation_depth(&CnfRelation::new(&g)).unwrap();
        assert_eq!(r.depth, min_depth(&g).unwrap().value);
        assert_eq!(r.depth, 2);
    }

    #[test]
    fn composed_smallest_contradiction() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let c = compose_single(&f, 2, ComposeOptions::default()).unwrap();
        let r = min_relation_depth(&ComposedRelation::new(&f, &c.layout)).unwrap();
        assert_eq!(r.depth, 2);
    }
}
