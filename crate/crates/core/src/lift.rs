//! Lifting refutations of `F` to refutations of `F ∘ Ind`.
//!
//! Dag lifting: the vertex for a derived clause `D` touching blocks `I`
//! becomes a family of `m^{|I|}` conjunctions, one per selector assignment
//! `α ∈ [m]^I`; each is the negation of the certificate clause of `D` under
//! `α`. When the premises of a resolution step touch a block `i ∉ I`, each
//! family member is joined to the premise families by a complete tree that
//! queries the selector bits of block `i`, most significant first.
//!
//! Tree lifting: every query of a source variable becomes a query of its
//! block's selector (skipped when the selector is already known on the path)
//! followed by the pointed matrix bit.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::compose::{ClauseOrigin, Composition, CompositionLayout};
use crate::formula::{Clause, CnfFormula, Lit};
use crate::proof::dag::{Conjunction, ConjunctionDag, DagVertex};
use crate::proof::resolution::{verify_resolution, ResStep, ResolutionProof};
use crate::tree::{verify_cnf_tree, DecisionTree};

pub const DEFAULT_VERTEX_BUDGET: usize = 5_000_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("input refutation does not verify: {0}")]
    Unverified(String),
    #[error("layout has {layout} source variables, formula has {formula}")]
    LayoutMismatch { layout: u32, formula: u32 },
    #[error("step {step}: premises touch {count} blocks the conclusion does not")]
    ExtraBlocks { step: usize, count: usize },
    #[error("lifted dag needs more than {budget} vertices")]
    Budget { budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftOptions {
    pub vertex_budget: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { vertex_budget: DEFAULT_VERTEX_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexRole {
    /// Member of the family of the source step for the given selectors.
    Family,
    /// Connector node below a family member: the new block and the selector
    /// bits fixed so far.
    Connector { block: usize, prefix: Vec<bool> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedOrigin {
    /// 0-based source proof step.
    pub step: usize,
    /// `(block, value)`, blocks ascending, values 1-based.
    pub selectors: Vec<(usize, usize)>,
    pub role: VertexRole,
}

#[derive(Clone, Debug)]
pub struct LiftedDag {
    pub dag: ConjunctionDag,
    pub origins: Vec<LiftedOrigin>,
    pub family_vertices: usize,
    pub connector_vertices: usize,
    /// Length of the source refutation.
    pub source_length: usize,
    /// Block-width of the source refutation.
    pub block_width: usize,
    pub m: usize,
}

impl LiftedDag {
    /// `m^{bw} · |Π|`, the family budget.
    pub fn family_bound(&self) -> u128 {
        (self.m as u128).pow(self.block_width as u32) * self.source_length as u128
    }

    /// `m^{bw+1} · |Π|`, the bound including connectors.
    pub fn size_bound(&self) -> u128 {
        (self.m as u128).pow(self.block_width as u32 + 1) * self.source_length as u128
    }

    /// Replaces source clause outputs by composed clause indices.
    pub fn with_composed_outputs(&self, composition: &Composition) -> ConjunctionDag {
        let index = composition.origin_index();
        let mut dag = self.dag.clone();
        for (v, origin) in dag.vertices_mut().iter_mut().zip(&self.origins) {
            if let Some(o) = v.output {
                let key = ClauseOrigin { source_clause: o, selectors: origin.selectors.clone() };
                v.output = Some(index[&key]);
            }
        }
        dag
    }

    /// Dag text followed by one `p` line per vertex:
    /// `p <id> <step> f <block>=<value>...` or
    /// `p <id> <step> c <block>=<value>... / <block> <bits>`, all 1-based.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "c size={} family_vertices={} connector_vertices={}", self.dag.len(), self.family_vertices, self.connector_vertices);
        let _ = writeln!(out, "c source_length={} block_width={} m={} size_bound={}", self.source_length, self.block_width, self.m, self.size_bound());
        out.push_str(&self.dag.to_text());
        for (id, o) in self.origins.iter().enumerate() {
            let sel: Vec<String> = o.selectors.iter().map(|(b, v)| format!("{}={}", b + 1, v)).collect();
            let _ = write!(out, "p {} {} ", id + 1, o.step + 1);
            match &o.role {
                VertexRole::Family => {
                    let _ = write!(out, "f");
                }
                VertexRole::Connector { block, prefix } => {
                    let bits: String = prefix.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    let _ = write!(out, "c / {} {}", block + 1, if bits.is_empty() { "-" } else { &bits });
                }
            }
            for s in &sel {
                let _ = write!(out, " {s}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_layout(formula: &CnfFormula, layout: &CompositionLayout) -> Result<(), LiftError> {
    if layout.blocks().var_count() != formula.var_count() {
        return Err(LiftError::LayoutMismatch { layout: layout.blocks().var_count(), formula: formula.var_count() });
    }
    Ok(())
}

struct DagBuilder<'a> {
    layout: &'a CompositionLayout,
    clauses: Vec<Clause>,
    vertices: Vec<DagVertex<Conjunction>>,
    origins: Vec<LiftedOrigin>,
    ids: HashMap<(usize, Vec<(usize, usize)>), usize>,
    queue: VecDeque<usize>,
    budget: usize,
}

impl DagBuilder<'_> {
    fn push(&mut self, label: Conjunction, origin: LiftedOrigin) -> Result<usize, LiftError> {
        if self.vertices.len() >= self.budget {
            return Err(LiftError::Budget { budget: self.budget });
        }
        self.vertices.push(DagVertex { label, children: Vec::new(), output: None });
        self.origins.push(origin);
        Ok(self.vertices.len() - 1)
    }

    /// The family member for `step` under the selectors of its touched blocks.
    fn family(&mut self, step: usize, selectors: &[(usize, usize)]) -> Result<usize, LiftError> {
        let touched = self.layout.blocks().touched_blocks(&self.clauses[step]);
        let sel: Vec<(usize, usize)> = selectors.iter().copied().filter(|(b, _)| touched.contains(b)).collect();
        if let Some(&id) = self.ids.get(&(step, sel.clone())) {
            return Ok(id);
        }
        let label = Conjunction::negation_of(&self.layout.certificate_clause(&self.clauses[step], &sel));
        let id = self.push(label, LiftedOrigin { step, selectors: sel.clone(), role: VertexRole::Family })?;
        self.ids.insert((step, sel), id);
        self.queue.push_back(id);
        Ok(id)
    }

    /// Fills the children of connector node `id` whose selector prefix for
    /// `block` is `prefix`.
    fn connector(&mut self, id: usize, left: usize, right: usize, block: usize, prefix: Vec<bool>) -> Result<(), LiftError> {
        let p = self.layout.params();
        let origin = self.origins[id].clone();
        if prefix.len() == p.selector_bits() {
            let value = p.decode_selector(&prefix);
            let mut sel = origin.selectors.clone();
            sel.push((block, value));
            sel.sort_unstable();
            let u = self.family(left, &sel)?;
            let u2 = self.family(right, &sel)?;
            self.vertices[id].children = vec![u, u2];
            return Ok(());
        }
        let mut kids = Vec::with_capacity(2);
        for bit in [false, true] {
            let mut next = prefix.clone();
            next.push(bit);
            let lit = Lit::new(self.layout.selector_var(block, prefix.len()), bit);
            let label = self.vertices[id].label.and(&[lit]);
            let role = VertexRole::Connector { block, prefix: next.clone() };
            let kid = self.push(label, LiftedOrigin { step: origin.step, selectors: origin.selectors.clone(), role })?;
            self.connector(kid, left, right, block, next)?;
            kids.push(kid);
        }
        self.vertices[id].children = kids;
        Ok(())
    }
}

/// Lifts a verified Resolution refutation of `formula` to a decision-dag
/// solving the composed search problem. Outputs are source clause indices;
/// see [`LiftedDag::with_composed_outputs`] for composed clause indices.
pub fn lift_dag_refutation(
    formula: &CnfFormula,
    proof: &ResolutionProof,
    layout: &CompositionLayout,
    options: LiftOptions,
) -> Result<LiftedDag, LiftError> {
    check_layout(formula, layout)?;
    let measures =
        verify_resolution(formula, proof, Some(layout.blocks())).map_err(|e| LiftError::Unverified(e.to_string()))?;
    let clauses = proof.derive(formula).map_err(|e| LiftError::Unverified(e.to_string()))?;
    let mut b = DagBuilder {
        layout,
        clauses,
        vertices: Vec::new(),
        origins: Vec::new(),
        ids: HashMap::new(),
        queue: VecDeque::new(),
        budget: options.vertex_budget,
    };
    b.family(proof.steps.len() - 1, &[])?;
    while let Some(id) = b.queue.pop_front() {
        let LiftedOrigin { step, selectors, .. } = b.origins[id].clone();
        match proof.steps[step] {
            ResStep::Axiom(k) => b.vertices[id].output = Some(k),
            ResStep::Resolve { left, right, .. } => {
                let own = layout.blocks().touched_blocks(&b.clauses[step]);
                let mut new: Vec<usize> = [left, right]
                    .iter()
                    .flat_map(|&s| layout.blocks().touched_blocks(&b.clauses[s]))
                    .filter(|blk| !own.contains(blk))
                    .collect();
                new.sort_unstable();
                new.dedup();
                match new.as_slice() {
                    [] => {
                        let u = b.family(left, &selectors)?;
                        let u2 = b.family(right, &selectors)?;
                        b.vertices[id].children = vec![u, u2];
                    }
                    [block] => b.connector(id, left, right, *block, Vec::new())?,
                    _ => return Err(LiftError::ExtraBlocks { step: step + 1, count: new.len() }),
                }
            }
        }
    }
    let family_vertices = b.ids.len();
    Ok(LiftedDag {
        connector_vertices: b.vertices.len() - family_vertices,
        family_vertices,
        dag: ConjunctionDag::new(b.vertices),
        origins: b.origins,
        source_length: measures.length,
        block_width: measures.block_width.expect("blocks given"),
        m: layout.params().m(),
    })
}

/// Leaf of a lifted tree: the source clause and its certificate clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedLeaf {
    pub source_clause: usize,
    pub selectors: Vec<(usize, usize)>,
    pub clause: Clause,
}

impl LiftedLeaf {
    pub fn origin(&self) -> ClauseOrigin {
        ClauseOrigin { source_clause: self.source_clause, selectors: self.selectors.clone() }
    }
}

fn lift_node(
    node: &DecisionTree<u32, usize>,
    formula: &CnfFormula,
    layout: &CompositionLayout,
    known: &mut Vec<Option<usize>>,
) -> DecisionTree<u32, LiftedLeaf> {
    match node {
        DecisionTree::Leaf(k) => {
            let clause = &formula.clauses()[*k];
            let selectors: Vec<(usize, usize)> = layout
                .blocks()
                .touched_blocks(clause)
                .into_iter()
                .map(|b| (b, known[b].expect("clause falsified on the path, so its selectors are known")))
                .collect();
            DecisionTree::Leaf(LiftedLeaf {
                source_clause: *k,
                clause: layout.certificate_clause(clause, &selectors),
                selectors,
            })
        }
        DecisionTree::Query { var, zero, one } => {
            let (block, row) = layout.blocks().position(*var);
            if let Some(v) = known[block] {
                let z = lift_node(zero, formula, layout, known);
                let o = lift_node(one, formula, layout, known);
                return DecisionTree::query(layout.matrix_var(block, row, v - 1), z, o);
            }
            selector_subtree(Vec::new(), block, row, (zero, one), formula, layout, known)
        }
    }
}

fn selector_subtree(
    prefix: Vec<bool>,
    block: usize,
    row: usize,
    branches: (&DecisionTree<u32, usize>, &DecisionTree<u32, usize>),
    formula: &CnfFormula,
    layout: &CompositionLayout,
    known: &mut Vec<Option<usize>>,
) -> DecisionTree<u32, LiftedLeaf> {
    let p = layout.params();
    if prefix.len() == p.selector_bits() {
        let v = p.decode_selector(&prefix);
        known[block] = Some(v);
        let z = lift_node(branches.0, formula, layout, known);
        let o = lift_node(branches.1, formula, layout, known);
        known[block] = None;
        return DecisionTree::query(layout.matrix_var(block, row, v - 1), z, o);
    }
    let var = layout.selector_var(block, prefix.len());
    let mut sub = |bit: bool| {
        let mut next = prefix.clone();
        next.push(bit);
        selector_subtree(next, block, row, branches, formula, layout, known)
    };
    let z = sub(false);
    let o = sub(true);
    DecisionTree::query(var, z, o)
}

/// Lifts a decision tree solving `S_F` to one solving the composed problem.
pub fn lift_tree_refutation(
    formula: &CnfFormula,
    tree: &DecisionTree<u32, usize>,
    layout: &CompositionLayout,
) -> Result<DecisionTree<u32, LiftedLeaf>, LiftError> {
    check_layout(formula, layout)?;
    verify_cnf_tree(formula, tree).map_err(|e| LiftError::Unverified(e.to_string()))?;
    let mut known = vec![None; layout.block_count()];
    Ok(lift_node(tree, formula, layout, &mut known))
}

/// A lifted tree with composed clause indices at the leaves.
pub fn lifted_tree_outputs(tree: &DecisionTree<u32, LiftedLeaf>, composition: &Composition) -> DecisionTree<u32, usize> {
    let index = composition.origin_index();
    tree.map_leaves(&mut |leaf: &LiftedLeaf| index[&leaf.origin()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{compose_block, compose_single, ComposeOptions};
    use crate::formula::BlockStructure;
    use crate::proof::dag::verify_decision_dag;
    use crate::relation::{CnfRelation, ComposedRelation};

    fn x_not_x() -> (CnfFormula, ResolutionProof) {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        (f, ResolutionProof::parse("tree\na 1\na 2\nr 1 2 1\n").unwrap())
    }

    #[test]
    fn lifts_smallest_refutation() {
        let (f, p) = x_not_x();
        let c = compose_single(&f, 2, ComposeOptions::default()).unwrap();
        let lifted = lift_dag_refutation(&f, &p, &c.layout, LiftOptions::default()).unwrap();
        // Root, 2 connector nodes, 2 + 2 premise family members.
        assert_eq!((lifted.family_vertices, lifted.connector_vertices), (5, 2));
        assert!(lifted.dag.len() as u128 <= lifted.size_bound());
        assert!(verify_decision_dag(&ComposedRelation::new(&f, &c.layout), &lifted.dag, 24).is_ok());
        let composed = lifted.with_composed_outputs(&c);
        assert!(verify_decision_dag(&CnfRelation::new(&c.formula), &composed, 24).is_ok());
        assert_eq!(ConjunctionDag::parse(&lifted.to_text()).unwrap(), lifted.dag);
    }

    #[test]
    fn empty_clause_lifts_to_single_vertex() {
        let f = CnfFormula::new(1, vec![Clause::empty()]).unwrap();
        let p = ResolutionProof::parse("a 1").unwrap();
        let c = compose_single(&f, 4, ComposeOptions::default()).unwrap();
        let lifted = lift_dag_refutation(&f, &p, &c.layout, LiftOptions::default()).unwrap();
        assert_eq!(lifted.dag.len(), 1);
        assert!(lifted.dag.vertices()[0].label.lits().is_empty());
    }

    #[test]
    fn two_variable_refutation_in_one_block() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let p = ResolutionProof::parse("tree\na 1\na 2\nr 1 2 2\na 3\na 4\nr 4 5 2\nr 3 6 1\n").unwrap();
        let c = compose_block(&f, &BlockStructure::contiguous(1, 2), 2, ComposeOptions::default()).unwrap();
        let lifted = lift_dag_refutation(&f, &p, &c.layout, LiftOptions::default()).unwrap();
        assert!(lifted.dag.len() as u128 <= lifted.size_bound());
        assert!(verify_decision_dag(&ComposedRelation::new(&f, &c.layout), &lifted.dag, 24).is_ok());
    }

    #[test]
    fn budget_is_enforced() {
        let (f, p) = x_not_x();
        let c = compose_single(&f, 2, ComposeOptions::default()).unwrap();
        let err = lift_dag_refutation(&f, &p, &c.layout, LiftOptions { vertex_budget: 3 }).unwrap_err();
        assert_eq!(err, LiftError::Budget { budget: 3 });
    }

    #[test]
    fn rejects_unverified_input() {
        let (f, _) = x_not_x();
        let c = compose_single(&f, 2, ComposeOptions::default()).unwrap();
        let bad = ResolutionProof::parse("a 1").unwrap();
        assert!(matches!(lift_dag_refutation(&f, &bad, &c.layout, LiftOptions::default()), Err(LiftError::Unverified(_))));
        let tree = DecisionTree::Leaf(0);
        assert!(matches!(lift_tree_refutation(&f, &tree, &c.layout), Err(LiftError::Unverified(_))));
    }

    #[test]
    fn lifts_depth_one_tree() {
        let (f, _) = x_not_x();
        let c = compose_single(&f, 2, ComposeOptions::default()).unwrap();
        let tree = DecisionTree::query(1, DecisionTree::Leaf(0), DecisionTree::Leaf(1));
        let lifted = lift_tree_refutation(&f, &tree, &c.layout).unwrap();
        assert_eq!(lifted.depth(), 2);
        assert!(verify_cnf_tree(&c.formula, &lifted_tree_outputs(&lifted, &c)).is_ok());
    }
}
