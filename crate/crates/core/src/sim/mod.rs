//! Simulating a real protocol for the composed search problem by a decision
//! tree for the source formula, at block size `ℓ = 1`.
//!
//! Alice holds `x ∈ [m]^n` (0-based symbols), indexed in mixed radix with
//! block 0 most significant. Bob holds `y ∈ ({0,1}^m)^n` packed into a word
//! with column `c` of row `i` at bit `i·m + c`; his index is that word.

pub mod quadrant;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::compose::CompositionLayout;
use crate::formula::{BlockStructure, CnfFormula, PartialAssignment};
use crate::gadget::GadgetParams;
use crate::lab::round::{bit, round_lemma_find, row, row_deficiency, selector_deficiency, RoundThresholds};
use crate::lab::{LabError, Real};
use crate::lift::{lift_tree_refutation, LiftedLeaf};
use crate::proof::protocol::{eval_protocol, Labeling, ProtocolError, ProtocolNode, RealProtocol};
use crate::tree::DecisionTree;

pub use quadrant::{quadrant_select, Quadrant, QuadrantKind};

/// Largest `m·n` for exhaustive simulation.
pub const MAX_SIM_BITS: usize = 16;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("empty rectangle")]
    EmptyRectangle,
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("round step failed at node {node}: {error}\nstate: {state}")]
    Round { node: usize, error: LabError, state: String },
    #[error("query budget {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("gadget image check failed at step {step} on blocks {blocks:?}")]
    FixingFailed { step: usize, blocks: Vec<usize> },
    #[error("leaf outputs clause {clause}, which the fixed blocks do not falsify")]
    LeafNotJustified { clause: usize },
    #[error("protocol outputs clause {clause} on x={x} y={y}, which the decoded input satisfies")]
    WrongOutput { x: usize, y: usize, clause: usize },
    #[error("lifting failed: {0}")]
    Lift(String),
}

/// The composed instance `F ∘ Ind_m` with singleton blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimShape {
    pub m: usize,
    pub n: usize,
}

impl SimShape {
    pub fn new(m: usize, n: usize) -> Result<Self, SimError> {
        if m < 2 || !m.is_power_of_two() || m > 8 {
            return Err(SimError::Shape(format!("m = {m} must be a power of two in 2..=8")));
        }
        if m * n > MAX_SIM_BITS {
            return Err(SimError::Shape(format!("m·n = {} exceeds {MAX_SIM_BITS}", m * n)));
        }
        Ok(SimShape { m, n })
    }

    pub fn x_size(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn y_size(&self) -> usize {
        1 << (self.m * self.n)
    }

    pub fn x_point(&self, mut idx: usize) -> Vec<usize> {
        let mut p = vec![0; self.n];
        for i in (0..self.n).rev() {
            p[i] = idx % self.m;
            idx /= self.m;
        }
        p
    }

    pub fn x_index(&self, p: &[usize]) -> usize {
        p.iter().fold(0, |acc, &v| acc * self.m + v)
    }

    /// `z = Ind(x, y)`.
    pub fn decode(&self, x: &[usize], y: u64) -> Vec<bool> {
        (0..self.n).map(|i| bit(y, self.m, i, x[i])).collect()
    }
}

/// Per-block gadget images of `X × Y`: bit `0` for output 0, bit `1` for output 1.
pub fn gadget_images(shape: SimShape, x: &[Vec<usize>], y: &[u64]) -> Vec<u8> {
    (0..shape.n)
        .map(|i| {
            let mut symbols = vec![false; shape.m];
            for p in x {
                symbols[p[i]] = true;
            }
            let mut rows = vec![false; 1 << shape.m];
            for &v in y {
                rows[row(v, shape.m, i) as usize] = true;
            }
            let mut mask = 0u8;
            for (r, _) in rows.iter().enumerate().filter(|(_, &s)| s) {
                for (c, _) in symbols.iter().enumerate().filter(|(_, &s)| s) {
                    mask |= 1 << (r >> c & 1);
                }
            }
            mask
        })
        .collect()
}

/// Blocks where the image differs from `{ρ_i}` (fixed) or `{0,1}` (free).
pub fn fixing_violations(shape: SimShape, x: &[Vec<usize>], y: &[u64], rho: &[Option<bool>]) -> Vec<usize> {
    gadget_images(shape, x, y)
        .into_iter()
        .enumerate()
        .filter(|&(i, img)| match rho[i] {
            Some(b) => img != 1 << u8::from(b),
            None => img != 0b11,
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn fixing_check(shape: SimShape, x: &[Vec<usize>], y: &[u64], rho: &[Option<bool>]) -> bool {
    fixing_violations(shape, x, y, rho).is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub thresholds: RoundThresholds,
    pub budget: usize,
    /// Keep the rectangle and `ρ` after every step in [`Simulation::states`].
    pub record_states: bool,
}

/// The rectangle `X × Y` and partial assignment after one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkState {
    pub x: Vec<Vec<usize>>,
    pub y: Vec<u64>,
    pub rho: Vec<Option<bool>>,
}

/// One walk step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptLine {
    pub node: usize,
    pub quadrant: QuadrantKind,
    pub inside: bool,
    pub queried: Vec<usize>,
    pub answers: Vec<bool>,
    pub x_size: usize,
    pub y_size: usize,
    pub x_deficiency: Real,
    pub y_deficiency: Real,
}

impl fmt::Display for TranscriptLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.queried.iter().map(|b| (b + 1).to_string()).collect();
        let z: String = self.answers.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(
            f,
            "node={} quadrant={} side={} queried=[{}] z={} x_size={} y_size={} x_deficiency={} y_deficiency={}",
            self.node,
            self.quadrant,
            if self.inside { "in" } else { "out" },
            blocks.join(","),
            if z.is_empty() { "-" } else { &z },
            self.x_size,
            self.y_size,
            self.x_deficiency,
            self.y_deficiency
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    /// 0-based clause index.
    pub output: usize,
    pub queries: Vec<usize>,
    pub transcript: Vec<TranscriptLine>,
    pub rho: Vec<Option<bool>>,
    /// Filled when [`SimConfig::record_states`] is set; entry 0 is the start.
    pub states: Vec<WalkState>,
}

struct Walk<'a> {
    shape: SimShape,
    config: &'a SimConfig,
    x: Vec<Vec<usize>>,
    y: Vec<u64>,
    rho: Vec<Option<bool>>,
    queries: Vec<usize>,
    transcript: Vec<TranscriptLine>,
    states: Vec<WalkState>,
}

impl Walk<'_> {
    fn state(&self) -> String {
        format!("rho={:?} |X|={} |Y|={} queries={:?}", self.rho, self.x.len(), self.y.len(), self.queries)
    }

    fn round(&mut self, node: usize, query: &mut dyn FnMut(usize) -> bool) -> Result<(Vec<usize>, Vec<bool>), SimError> {
        let m = self.shape.m;
        let free: Vec<usize> = (0..self.shape.n).filter(|&i| self.rho[i].is_none()).collect();
        let proj_x = |p: &Vec<usize>| -> Vec<usize> { free.iter().map(|&i| p[i]).collect() };
        let proj_y = |v: u64| -> u64 { free.iter().enumerate().fold(0, |acc, (t, &i)| acc | row(v, m, i) << (t * m)) };
        let xs: Vec<Vec<usize>> = self.x.iter().map(proj_x).collect();
        let ys: Vec<u64> = self.y.iter().map(|&v| proj_y(v)).collect();
        let outcome = round_lemma_find(m, free.len(), &xs, &ys, &self.config.thresholds)
            .map_err(|error| SimError::Round { node, error, state: self.state() })?;
        let blocks: Vec<usize> = outcome.coords.iter().map(|&t| free[t]).collect();
        if self.queries.len() + blocks.len() > self.config.budget {
            return Err(SimError::BudgetExceeded { budget: self.config.budget });
        }
        let answers: Vec<bool> = blocks.iter().map(|&b| query(b)).collect();
        let branch = outcome.branches.iter().find(|b| b.z == answers).expect("a branch per answer pattern");
        let keep_x: std::collections::HashSet<&Vec<usize>> = branch.x.iter().collect();
        let keep_y: std::collections::HashSet<u64> = branch.y.iter().copied().collect();
        self.x.retain(|p| keep_x.contains(&proj_x(p)));
        self.y.retain(|&v| keep_y.contains(&proj_y(v)));
        for (&b, &z) in blocks.iter().zip(&answers) {
            self.rho[b] = Some(z);
        }
        self.queries.extend(&blocks);
        Ok((blocks, answers))
    }

    fn check(&mut self, step: usize) -> Result<(), SimError> {
        if self.config.record_states {
            self.states.push(WalkState { x: self.x.clone(), y: self.y.clone(), rho: self.rho.clone() });
        }
        let blocks = fixing_violations(self.shape, &self.x, &self.y, &self.rho);
        if blocks.is_empty() {
            Ok(())
        } else {
            Err(SimError::FixingFailed { step, blocks })
        }
    }
}

/// Walks `Π` from the root keeping a rectangle `R = X × Y` and a partial
/// assignment `ρ`: at each test node it moves to a quadrant of `R` on one side
/// of the node's triangle, runs the round step on the free blocks, asks
/// `query` for the returned blocks and restricts `R` to the matching branch.
/// The gadget images are checked after every step, and the leaf's clause
/// must be falsified by `ρ` alone.
pub fn simulate_protocol(
    protocol: &RealProtocol,
    formula: &CnfFormula,
    shape: SimShape,
    config: &SimConfig,
    query: &mut dyn FnMut(usize) -> bool,
) -> Result<Simulation, SimError> {
    check_protocol_shape(protocol, formula, shape)?;
    let mut walk = Walk {
        shape,
        config,
        x: (0..shape.x_size()).map(|i| shape.x_point(i)).collect(),
        y: (0..shape.y_size() as u64).collect(),
        rho: vec![None; shape.n],
        queries: Vec::new(),
        transcript: Vec::new(),
        states: Vec::new(),
    };
    walk.check(0)?;
    let mut node = &protocol.root;
    let mut id = 0usize;
    loop {
        match node {
            ProtocolNode::Leaf(clause) => {
                let clause = *clause;
                let mut a = PartialAssignment::new(shape.n as u32);
                for (i, v) in walk.rho.iter().enumerate() {
                    if let Some(b) = v {
                        a.set(i as u32 + 1, *b);
                    }
                }
                let ok = formula.clause(clause).is_some_and(|c| c.falsified_by(&a));
                if !ok {
                    return Err(SimError::LeafNotJustified { clause });
                }
                return Ok(Simulation { output: clause, queries: walk.queries, transcript: walk.transcript, rho: walk.rho, states: walk.states });
            }
            ProtocolNode::Test { a, b, left, right } => {
                let xs: Vec<usize> = walk.x.iter().map(|p| shape.x_index(p)).collect();
                let ys: Vec<usize> = walk.y.iter().map(|&v| v as usize).collect();
                let quad = quadrant_select(&xs, &ys, a, b)?;
                let keep_x: std::collections::HashSet<usize> = quad.x.iter().copied().collect();
                let keep_y: std::collections::HashSet<usize> = quad.y.iter().copied().collect();
                walk.x.retain(|p| keep_x.contains(&shape.x_index(p)));
                walk.y.retain(|&v| keep_y.contains(&(v as usize)));
                let here = id;
                if quad.inside {
                    node = left;
                    id += 1;
                } else {
                    id += 1 + left.size();
                    node = right;
                }
                let (queried, answers) = walk.round(here, query)?;
                walk.check(walk.transcript.len() + 1)?;
                walk.transcript.push(TranscriptLine {
                    node: here,
                    quadrant: quad.kind,
                    inside: quad.inside,
                    queried,
                    answers,
                    x_size: walk.x.len(),
                    y_size: walk.y.len(),
                    x_deficiency: selector_deficiency(walk.x.len(), shape.m, shape.n),
                    y_deficiency: row_deficiency(walk.y.len(), shape.m, shape.n),
                });
            }
        }
    }
}

fn check_protocol_shape(protocol: &RealProtocol, formula: &CnfFormula, shape: SimShape) -> Result<(), SimError> {
    if formula.var_count() as usize != shape.n {
        return Err(SimError::Shape(format!("formula has {} variables, shape has {} blocks", formula.var_count(), shape.n)));
    }
    if protocol.x_size != shape.x_size() || protocol.y_size != shape.y_size() {
        return Err(SimError::Shape(format!(
            "protocol domain {}x{} does not match {}x{}",
            protocol.x_size,
            protocol.y_size,
            shape.x_size(),
            shape.y_size()
        )));
    }
    protocol.validate()?;
    Ok(())
}

/// Exhaustive check that every leaf reached on `(x, y)` names a clause
/// falsified by `Ind(x, y)`.
pub fn verify_protocol_solves(protocol: &RealProtocol, formula: &CnfFormula, shape: SimShape) -> Result<(), SimError> {
    check_protocol_shape(protocol, formula, shape)?;
    for xi in 0..shape.x_size() {
        let xp = shape.x_point(xi);
        for yi in 0..shape.y_size() {
            let (clause, _) = eval_protocol(protocol, xi, yi)?;
            let z = shape.decode(&xp, yi as u64);
            let ok = formula.clause(clause).is_some_and(|c| !c.eval(&z));
            if !ok {
                return Err(SimError::WrongOutput { x: xi, y: yi, clause });
            }
        }
    }
    Ok(())
}

/// Labelings shared by every node that queries the same composed bit.
struct Labelings {
    half_x: Labeling,
    half_y: Labeling,
    by_var: HashMap<u32, (Labeling, Labeling)>,
}

impl Labelings {
    fn new(shape: SimShape) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Labelings {
            half_x: vec![half.clone(); shape.x_size()].into(),
            half_y: vec![half; shape.y_size()].into(),
            by_var: HashMap::new(),
        }
    }

    /// A selector-bit query is Alice's test `bit < 1/2`, a matrix query is
    /// Bob's test `1/2 < 1 − bit`.
    fn get(&mut self, var: u32, shape: SimShape, layout: &CompositionLayout) -> (Labeling, Labeling) {
        let (half_x, half_y) = (&self.half_x, &self.half_y);
        self.by_var
            .entry(var)
            .or_insert_with(|| {
                let t = layout.params().selector_bits();
                let off = (var as usize - 1) % layout.stride();
                let block = (var as usize - 1) / layout.stride();
                if off < t {
                    let a = (0..shape.x_size())
                        .map(|i| {
                            let bit = shape.x_point(i)[block] >> (t - 1 - off) & 1;
                            BigRational::from_integer(bit.into())
                        })
                        .collect::<Vec<_>>();
                    (a.into(), half_y.clone())
                } else {
                    let col = off - t;
                    let b = (0..shape.y_size())
                        .map(|v| if bit(v as u64, shape.m, block, col) { BigRational::zero() } else { BigRational::one() })
                        .collect::<Vec<_>>();
                    (half_x.clone(), b.into())
                }
            })
            .clone()
    }
}

/// The real protocol that runs the lifted decision tree. Both kinds of
/// query go left on a 0 answer. Leaves output the source clause.
pub fn protocol_from_tree(formula: &CnfFormula, tree: &DecisionTree<u32, usize>, shape: SimShape) -> Result<RealProtocol, SimError> {
    let params = GadgetParams::new(shape.m, 1).map_err(|e| SimError::Shape(e.to_string()))?;
    let layout = CompositionLayout::new(BlockStructure::singletons(shape.n as u32), params)
        .map_err(|e| SimError::Shape(e.to_string()))?;
    let lifted = lift_tree_refutation(formula, tree, &layout).map_err(|e| SimError::Lift(e.to_string()))?;
    let root = convert(&lifted, shape, &layout, &mut Labelings::new(shape));
    Ok(RealProtocol::new(shape.x_size(), shape.y_size(), root)?)
}

fn convert(tree: &DecisionTree<u32, LiftedLeaf>, shape: SimShape, layout: &CompositionLayout, labels: &mut Labelings) -> ProtocolNode {
    match tree {
        DecisionTree::Leaf(leaf) => ProtocolNode::Leaf(leaf.source_clause),
        DecisionTree::Query { var, zero, one } => {
            let (a, b) = labels.get(*var, shape, layout);
            ProtocolNode::Test {
                a,
                b,
                left: Box::new(convert(zero, shape, layout, labels)),
                right: Box::new(convert(one, shape, layout, labels)),
            }
        }
    }
}

/// Runs the simulation for every `z ∈ {0,1}^n` and checks each output
/// against the clauses `z` falsifies.
pub fn simulate_all(protocol: &RealProtocol, formula: &CnfFormula, shape: SimShape, config: &SimConfig) -> Result<Vec<Simulation>, SimError> {
    let mut out = Vec::new();
    for bits in 0u64..1 << shape.n {
        let z: Vec<bool> = (0..shape.n).map(|i| bits >> (shape.n - 1 - i) & 1 == 1).collect();
        let sim = simulate_protocol(protocol, formula, shape, config, &mut |i| z[i])?;
        if formula.clause(sim.output).map_or(true, |c| c.eval(&z)) {
            return Err(SimError::LeafNotJustified { clause: sim.output });
        }
        out.push(sim);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::complete_tree_contradiction;
    use crate::oracle::min_depth;

    fn config(budget: usize) -> SimConfig {
        SimConfig { thresholds: RoundThresholds::micro(), budget, record_states: false }
    }

    #[test]
    fn empty_clause_needs_no_queries() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[]]).unwrap();
        let shape = SimShape::new(2, 1).unwrap();
        let p = RealProtocol::new(shape.x_size(), shape.y_size(), ProtocolNode::Leaf(0)).unwrap();
        verify_protocol_solves(&p, &f, shape).unwrap();
        for sim in simulate_all(&p, &f, shape, &config(0)).unwrap() {
            assert!(sim.queries.is_empty());
        }
    }

    #[test]
    fn single_variable_contradiction_queries_once() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let shape = SimShape::new(2, 1).unwrap();
        let tree = min_depth(&f).unwrap().tree;
        let p = protocol_from_tree(&f, &tree, shape).unwrap();
        assert_eq!(p.depth(), 2);
        verify_protocol_solves(&p, &f, shape).unwrap();
        let sims = simulate_all(&p, &f, shape, &config(1)).unwrap();
        assert_eq!(sims.iter().map(|s| s.output).collect::<Vec<_>>(), vec![0, 1]);
        assert!(sims.iter().all(|s| s.queries == vec![0]));
    }

    #[test]
    fn complete_tree_runs_within_budget() {
        let f = complete_tree_contradiction(2);
        let shape = SimShape::new(4, 2).unwrap();
        let p = protocol_from_tree(&f, &min_depth(&f).unwrap().tree, shape).unwrap();
        verify_protocol_solves(&p, &f, shape).unwrap();
        let sims = simulate_all(&p, &f, shape, &config(2)).unwrap();
        assert_eq!(sims.len(), 4);
    }

    #[test]
    fn fixing_check_flags_collapsed_block() {
        let shape = SimShape::new(2, 1).unwrap();
        let x = vec![vec![0], vec![1]];
        assert!(fixing_check(shape, &x, &[0, 1, 2, 3], &[None]));
        assert_eq!(fixing_violations(shape, &x, &[0], &[None]), vec![0]);
        assert!(fixing_check(shape, &x, &[0], &[Some(false)]));
    }

    #[test]
    fn broken_protocol_is_rejected() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let shape = SimShape::new(2, 1).unwrap();
        let p = RealProtocol::new(shape.x_size(), shape.y_size(), ProtocolNode::Leaf(0)).unwrap();
        assert!(matches!(verify_protocol_solves(&p, &f, shape), Err(SimError::WrongOutput { .. })));
    }
}
