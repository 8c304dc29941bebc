//! Minimum decision-tree depth and size for falsified-clause problems.

use std::collections::HashMap;

use super::{assign, canonical, check_size, check_unsat, has_empty, key_vars, Key, OracleError};
use super::{MAX_DEPTH_VARS, MAX_TREE_SIZE_VARS};
use crate::formula::{Clause, CnfFormula, Lit, PartialAssignment};
use crate::proof::resolution::{ResStep, ResolutionProof};
use crate::tree::DecisionTree;

/// An optimal decision tree and its measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeWitness {
    pub value: usize,
    pub tree: DecisionTree<u32, usize>,
}

#[derive(Default)]
struct DepthSearch {
    /// Lower bound and, once known, an upper bound with a query achieving it.
    memo: HashMap<Key, (usize, Option<(usize, u32)>)>,
}

impl DepthSearch {
    /// Is the depth of `g` at most `k`?
    fn decide(&mut self, g: &Key, k: usize) -> bool {
        if has_empty(g) {
            return true;
        }
        if k == 0 {
            return false;
        }
        if let Some(&(lb, ub)) = self.memo.get(g) {
            if lb > k {
                return false;
            }
            if ub.is_some_and(|(u, _)| u <= k) {
                return true;
            }
        }
        for v in key_vars(g) {
            if self.decide(&assign(g, v, false), k - 1) && self.decide(&assign(g, v, true), k - 1) {
                let e = self.memo.entry(g.clone()).or_insert((0, None));
                e.1 = Some((k, v));
                return true;
            }
        }
        let e = self.memo.entry(g.clone()).or_insert((0, None));
        e.0 = e.0.max(k + 1);
        false
    }
}

fn initial_key(formula: &CnfFormula) -> Key {
    canonical(formula.clauses().to_vec())
}

/// Lowest-index clause falsified by `a`.
fn falsified_index(formula: &CnfFormula, a: &PartialAssignment) -> usize {
    formula.clauses().iter().position(|c| c.falsified_by(a)).expect("restriction contains the empty clause")
}

/// `d(F)`: least depth of a decision tree solving the falsified-clause problem.
pub fn min_depth(formula: &CnfFormula) -> Result<TreeWitness, OracleError> {
    check_size("min_depth", formula.var_count() as usize, MAX_DEPTH_VARS as usize)?;
    check_unsat(formula)?;
    let root = initial_key(formula);
    let mut search = DepthSearch::default();
    let depth = (0..).find(|&k| search.decide(&root, k)).expect("unsatisfiable formulas have finite depth");
    fn build(
        s: &DepthSearch,
        formula: &CnfFormula,
        g: &Key,
        a: &mut PartialAssignment,
    ) -> DecisionTree<u32, usize> {
        if has_empty(g) {
            return DecisionTree::Leaf(falsified_index(formula, a));
        }
        let (_, var) = s.memo[g].1.expect("decided nodes record their query");
        let mut branch = |value: bool| {
            a.set(var, value);
            let t = build(s, formula, &assign(g, var, value), a);
            a.unset(var);
            t
        };
        let zero = branch(false);
        let one = branch(true);
        DecisionTree::query(var, zero, one)
    }
    let tree = build(&search, formula, &root, &mut PartialAssignment::new(formula.var_count()));
    Ok(TreeWitness { value: depth, tree })
}

#[derive(Default)]
struct SizeSearch {
    memo: HashMap<Key, (usize, u32)>,
}

impl SizeSearch {
    fn size(&mut self, g: &Key) -> usize {
        if has_empty(g) {
            return 1;
        }
        if let Some(&(s, _)) = self.memo.get(g) {
            return s;
        }
        let mut best = (usize::MAX, 0);
        for v in key_vars(g) {
            let s0 = self.size(&assign(g, v, false));
            if s0.saturating_add(2) >= best.0 {
                continue;
            }
            let s1 = self.size(&assign(g, v, true));
            if s0 + s1 + 1 < best.0 {
                best = (s0 + s1 + 1, v);
            }
        }
        self.memo.insert(g.clone(), best);
        best.0
    }
}

/// `resTree(F)`: least size (vertex count) of a decision tree solving the
/// falsified-clause problem, which equals the least length of a tree-like
/// Resolution refutation.
pub fn min_tree_size(formula: &CnfFormula) -> Result<TreeWitness, OracleError> {
    check_size("min_tree_size", formula.var_count() as usize, MAX_TREE_SIZE_VARS as usize)?;
    check_unsat(formula)?;
    let root = initial_key(formula);
    let mut search = SizeSearch::default();
    let size = search.size(&root);
    fn build(s: &SizeSearch, formula: &CnfFormula, g: &Key, a: &mut PartialAssignment) -> DecisionTree<u32, usize> {
        if has_empty(g) {
            return DecisionTree::Leaf(falsified_index(formula, a));
        }
        let (_, var) = s.memo[g];
        let mut branch = |value: bool| {
            a.set(var, value);
            let t = build(s, formula, &assign(g, var, value), a);
            a.unset(var);
            t
        };
        let zero = branch(false);
        let one = branch(true);
        DecisionTree::query(var, zero, one)
    }
    let tree = build(&search, formula, &root, &mut PartialAssignment::new(formula.var_count()));
    Ok(TreeWitness { value: size, tree })
}

/// Reads a tree-like refutation off a decision tree solving the
/// falsified-clause problem. Branches whose clause does not mention the
/// queried variable replace the whole query, so the length is at most the
/// tree size.
pub fn tree_to_resolution(formula: &CnfFormula, tree: &DecisionTree<u32, usize>) -> ResolutionProof {
    fn go(formula: &CnfFormula, node: &DecisionTree<u32, usize>) -> (Vec<ResStep>, Clause) {
        match node {
            DecisionTree::Leaf(k) => (vec![ResStep::Axiom(*k)], formula.clauses()[*k].clone()),
            DecisionTree::Query { var, zero, one } => {
                let (s0, c0) = go(formula, zero);
                if !c0.contains(Lit::pos(*var)) {
                    return (s0, c0);
                }
                let (s1, c1) = go(formula, one);
                if !c1.contains(Lit::neg(*var)) {
                    return (s1, c1);
                }
                let off = s0.len();
                let mut steps = s0;
                steps.extend(s1.into_iter().map(|s| match s {
                    ResStep::Axiom(k) => ResStep::Axiom(k),
                    ResStep::Resolve { left, right, pivot } => {
                        ResStep::Resolve { left: left + off, right: right + off, pivot }
                    }
                }));
                let n = steps.len();
                steps.push(ResStep::Resolve { left: off - 1, right: n - 1, pivot: *var });
                (steps, c0.resolve(&c1, *var))
            }
        }
    }
    ResolutionProof::new(go(formula, tree).0, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::complete_tree_contradiction;
    use crate::proof::resolution::verify_resolution;
    use crate::tree::verify_cnf_tree;

    fn full_two_var() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap()
    }

    #[test]
    fn depth_examples() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(min_depth(&f).unwrap().value, 1);
        let e = CnfFormula::new(1, vec![Clause::empty(), Clause::from_dimacs(&[1])]).unwrap();
        assert_eq!(min_depth(&e).unwrap().value, 0);
        let w = min_depth(&full_two_var()).unwrap();
        assert_eq!(w.value, 2);
        assert!(verify_cnf_tree(&full_two_var(), &w.tree).is_ok());
        let sat = CnfFormula::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        assert_eq!(min_depth(&sat), Err(OracleError::Satisfiable));
    }

    #[test]
    fn size_examples() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(min_tree_size(&f).unwrap().value, 3);
        let e = CnfFormula::new(1, vec![Clause::empty()]).unwrap();
        assert_eq!(min_tree_size(&e).unwrap().value, 1);
        let w = min_tree_size(&full_two_var()).unwrap();
        assert_eq!(w.value, 7);
        let p = tree_to_resolution(&full_two_var(), &w.tree);
        assert_eq!(verify_resolution(&full_two_var(), &p, None).unwrap().length, 7);
    }

    #[test]
    fn complete_tree_measures() {
        for d in 1..=4 {
            let f = complete_tree_contradiction(d);
            assert_eq!(min_depth(&f).unwrap().value, d as usize);
            assert_eq!(min_tree_size(&f).unwrap().value, (1 << (d + 1)) - 1);
        }
    }

    #[test]
    fn irrelevant_branches_are_pruned() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1]]).unwrap();
        let t = DecisionTree::query(2, DecisionTree::query(1, DecisionTree::Leaf(0), DecisionTree::Leaf(1)), DecisionTree::Leaf(0));
        assert!(verify_cnf_tree(&f, &t).is_err());
        let t = DecisionTree::query(
            2,
            DecisionTree::query(1, DecisionTree::Leaf(0), DecisionTree::Leaf(1)),
            DecisionTree::query(1, DecisionTree::Leaf(0), DecisionTree::Leaf(1)),
        );
        let p = tree_to_resolution(&f, &t);
        assert_eq!(verify_resolution(&f, &p, None).unwrap().length, 3);
    }
}
