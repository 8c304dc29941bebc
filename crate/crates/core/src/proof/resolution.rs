//! Resolution refutations.
//!
//! Text format, one step per line (1-based step and clause numbers):
//! `a <k>` is the k-th clause of the formula, `r <i> <j> <var>` resolves
//! steps `i` and `j` on `var`. A line `tree` marks the proof tree-like; `c`
//! lines are comments.

use thiserror::Error;

use crate::formula::{BlockStructure, Clause, CnfFormula};
use crate::proof::dag::{Conjunction, ConjunctionDag, DagVertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResStep {
    /// 0-based clause index.
    Axiom(usize),
    /// 0-based premise step indices.
    Resolve { left: usize, right: usize, pivot: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ResolutionProof {
    pub steps: Vec<ResStep>,
    pub tree_like: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolutionMeasures {
    pub length: usize,
    pub width: usize,
    pub block_width: Option<usize>,
    /// Longest premise chain; reported for tree-like proofs only.
    pub depth: Option<usize>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("proof has no steps")]
    Empty,
    #[error("step {step}: clause {clause} does not exist")]
    BadClause { step: usize, clause: usize },
    #[error("step {step}: premise {premise} does not precede it")]
    BadPremise { step: usize, premise: usize },
    #[error("step {step}: pivot x{pivot} does not occur with opposite signs in the premises")]
    PivotAbsent { step: usize, pivot: u32 },
    #[error("final clause `{clause}` is not empty")]
    NonEmptyFinal { clause: String },
    #[error("step {step} is used as a premise more than once in a tree-like proof")]
    TreeViolation { step: usize },
    #[error("line {line}: malformed step `{text}`")]
    Syntax { line: usize, text: String },
}

impl ResolutionProof {
    pub fn new(steps: Vec<ResStep>, tree_like: bool) -> Self {
        ResolutionProof { steps, tree_like }
    }

    pub fn parse(text: &str) -> Result<Self, ResolutionError> {
        let mut proof = ResolutionProof::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line == "tree" {
                proof.tree_like = true;
                continue;
            }
            let err = || ResolutionError::Syntax { line: idx + 1, text: line.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().ok().filter(|&v| v >= 1).ok_or_else(err);
            let step = match parts.as_slice() {
                ["a", k] => ResStep::Axiom(num(k)? - 1),
                ["r", i, j, v] => ResStep::Resolve {
                    left: num(i)? - 1,
                    right: num(j)? - 1,
                    pivot: u32::try_from(num(v)?).map_err(|_| err())?,
                },
                _ => return Err(err()),
            };
            proof.steps.push(step);
        }
        Ok(proof)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.tree_like {
            out.push_str("tree\n");
        }
        for s in &self.steps {
            match *s {
                ResStep::Axiom(k) => out.push_str(&format!("a {}\n", k + 1)),
                ResStep::Resolve { left, right, pivot } => {
                    out.push_str(&format!("r {} {} {}\n", left + 1, right + 1, pivot))
                }
            }
        }
        out
    }

    /// The clause derived at each step.
    pub fn derive(&self, formula: &CnfFormula) -> Result<Vec<Clause>, ResolutionError> {
        let mut clauses: Vec<Clause> = Vec::with_capacity(self.steps.len());
        for (i, s) in self.steps.iter().enumerate() {
            let c = match *s {
                ResStep::Axiom(k) => {
                    formula.clause(k).cloned().ok_or(ResolutionError::BadClause { step: i + 1, clause: k + 1 })?
                }
                ResStep::Resolve { left, right, pivot } => {
                    for p in [left, right] {
                        if p >= i {
                            return Err(ResolutionError::BadPremise { step: i + 1, premise: p + 1 });
                        }
                    }
                    let (a, b) = (&clauses[left], &clauses[right]);
                    let pos = crate::formula::Lit::pos(pivot);
                    let neg = pos.negated();
                    let ok = (a.contains(pos) && b.contains(neg)) || (a.contains(neg) && b.contains(pos));
                    if pivot == 0 || !ok {
                        return Err(ResolutionError::PivotAbsent { step: i + 1, pivot });
                    }
                    a.resolve(b, pivot)
                }
            };
            clauses.push(c);
        }
        Ok(clauses)
    }

    /// Indices of steps reachable from the final step, ascending.
    pub fn used_steps(&self) -> Vec<usize> {
        let mut used = vec![false; self.steps.len()];
        if let Some(last) = self.steps.len().checked_sub(1) {
            used[last] = true;
            for i in (0..self.steps.len()).rev() {
                if let (true, ResStep::Resolve { left, right, .. }) = (used[i], self.steps[i]) {
                    used[left] = true;
                    used[right] = true;
                }
            }
        }
        (0..used.len()).filter(|&i| used[i]).collect()
    }
}

/// Checks a refutation and returns its measures.
pub fn verify_resolution(
    formula: &CnfFormula,
    proof: &ResolutionProof,
    blocks: Option<&BlockStructure>,
) -> Result<ResolutionMeasures, ResolutionError> {
    if proof.steps.is_empty() {
        return Err(ResolutionError::Empty);
    }
    let clauses = proof.derive(formula)?;
    let last = clauses.last().expect("nonempty");
    if !last.is_empty() {
        return Err(ResolutionError::NonEmptyFinal { clause: last.to_string() });
    }
    let mut depth = vec![0usize; proof.steps.len()];
    if proof.tree_like {
        let mut uses = vec![0usize; proof.steps.len()];
        for (i, s) in proof.steps.iter().enumerate() {
            if let ResStep::Resolve { left, right, .. } = *s {
                uses[left] += 1;
                uses[right] += 1;
                depth[i] = 1 + depth[left].max(depth[right]);
            }
        }
        if let Some(step) = uses.iter().position(|&u| u > 1) {
            return Err(ResolutionError::TreeViolation { step: step + 1 });
        }
    }
    Ok(ResolutionMeasures {
        length: proof.steps.len(),
        width: clauses.iter().map(Clause::width).max().unwrap_or(0),
        block_width: blocks.map(|b| clauses.iter().map(|c| b.touched_blocks(c).len()).max().unwrap_or(0)),
        depth: proof.tree_like.then(|| *depth.last().expect("nonempty")),
    })
}

/// The standard translation: one vertex per step reachable from the final
/// step, labelled with the negation of its clause. Axiom steps become leaves
/// that output their clause index.
pub fn resolution_to_dag(formula: &CnfFormula, proof: &ResolutionProof) -> Result<ConjunctionDag, ResolutionError> {
    let clauses = proof.derive(formula)?;
    let used = proof.used_steps();
    let mut id = vec![usize::MAX; proof.steps.len()];
    // Root first: reverse order puts conclusions before premises.
    for (k, &s) in used.iter().rev().enumerate() {
        id[s] = k;
    }
    let vertices = used
        .iter()
        .rev()
        .map(|&s| {
            let label = Conjunction::negation_of(&clauses[s]);
            match proof.steps[s] {
                ResStep::Axiom(k) => DagVertex::leaf(label, k),
                ResStep::Resolve { left, right, .. } => DagVertex::inner(label, id[left], id[right]),
            }
        })
        .collect();
    Ok(ConjunctionDag::new(vertices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::dag::verify_decision_dag;
    use crate::relation::CnfRelation;

    fn x_not_x() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap()
    }

    pub(crate) fn full_two_var() -> (CnfFormula, ResolutionProof) {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let p = ResolutionProof::parse("tree\na 1\na 2\nr 1 2 2\na 3\na 4\nr 4 5 2\nr 3 6 1\n").unwrap();
        (f, p)
    }

    #[test]
    fn smallest_refutation() {
        let p = ResolutionProof::parse("tree\na 1\na 2\nr 1 2 1").unwrap();
        let m = verify_resolution(&x_not_x(), &p, None).unwrap();
        assert_eq!(m, ResolutionMeasures { length: 3, width: 1, block_width: None, depth: Some(1) });
    }

    #[test]
    fn pivot_must_occur_in_both_premises() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1], &[2]]).unwrap();
        let p = ResolutionProof::parse("a 1\na 3\nr 1 2 1").unwrap();
        assert_eq!(verify_resolution(&f, &p, None), Err(ResolutionError::PivotAbsent { step: 3, pivot: 1 }));
    }

    #[test]
    fn seven_step_refutation() {
        let (f, p) = full_two_var();
        let m = verify_resolution(&f, &p, Some(&BlockStructure::singletons(2))).unwrap();
        assert_eq!((m.length, m.width, m.block_width, m.depth), (7, 2, Some(2), Some(2)));
        assert_eq!(ResolutionProof::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn structural_errors() {
        let f = x_not_x();
        let cases = [
            ("", ResolutionError::Empty),
            ("a 3", ResolutionError::BadClause { step: 1, clause: 3 }),
            ("a 1\nr 1 2 1", ResolutionError::BadPremise { step: 2, premise: 2 }),
            ("a 1", ResolutionError::NonEmptyFinal { clause: "1 0".into() }),
            ("tree\na 1\na 2\nr 1 2 1\nr 1 2 1\nr 3 4 1", ResolutionError::PivotAbsent { step: 5, pivot: 1 }),
            ("tree\na 1\na 2\nr 1 2 1\nr 1 2 1", ResolutionError::TreeViolation { step: 1 }),
        ];
        for (text, expected) in cases {
            let p = ResolutionProof::parse(text).unwrap();
            assert_eq!(verify_resolution(&f, &p, None), Err(expected), "{text}");
        }
        assert!(matches!(ResolutionProof::parse("x 1"), Err(ResolutionError::Syntax { line: 1, .. })));
        assert!(matches!(ResolutionProof::parse("a 0"), Err(ResolutionError::Syntax { .. })));
    }

    #[test]
    fn translation_to_dag_verifies() {
        let (f, p) = full_two_var();
        let dag = resolution_to_dag(&f, &p).unwrap();
        assert_eq!(dag.len(), 7);
        assert!(verify_decision_dag(&CnfRelation::new(&f), &dag, 24).is_ok());
    }

    #[test]
    fn unused_steps_are_dropped_from_dag() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1], &[-1], &[2]]).unwrap();
        let p = ResolutionProof::parse("a 3\na 1\na 2\nr 2 3 1").unwrap();
        assert_eq!(p.used_steps(), vec![1, 2, 3]);
        let dag = resolution_to_dag(&f, &p).unwrap();
        assert_eq!(dag.len(), 3);
        assert!(verify_decision_dag(&CnfRelation::new(&f), &dag, 24).is_ok());
    }
}
