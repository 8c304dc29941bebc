//! Composed formulas `F ∘ Ind_{ℓ×m}^n` built by certificate enumeration.
//!
//! For a source clause `D` touching blocks `I` and a selector assignment
//! `α ∈ [m]^I`, the certificate reads the selector bits of every block in `I`
//! and, for each literal of `D` on variable `(i, j)`, the matrix bit at row `j`,
//! column `α_i` of gadget `i`. The composed clause is the negation of that
//! certificate. Composed clauses are listed by source clause index, then
//! selector assignment in lexicographic order (first touched block most
//! significant).
//!
//! Variable layout: block `i` (0-based) owns the `t + ℓm` consecutive
//! variables starting at `i·(t + ℓm) + 1`; first its `t` selector bits MSB
//! first, then the matrix row by row.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{write_dimacs, BlockStructure, Clause, CnfFormula, Lit};
use crate::gadget::{GadgetError, GadgetParams};

pub const DEFAULT_CLAUSE_BUDGET: u64 = 10_000_000;
pub const MANIFEST_SCHEMA: &str = "liftkit.composition/1";

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("block structure covers {blocks} variables but the formula has {formula}")]
    BlockMismatch { blocks: u32, formula: u32 },
    #[error("composition needs {needed} clauses, over the budget of {budget}")]
    Budget { needed: String, budget: u64 },
    #[error("composed variable count overflows u32")]
    TooManyVariables,
    #[error("assignment has {got} values, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("manifest: {0}")]
    Manifest(String),
}

/// Where each composed variable lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionLayout {
    blocks: BlockStructure,
    params: GadgetParams,
}

impl CompositionLayout {
    pub fn new(blocks: BlockStructure, params: GadgetParams) -> Result<Self, ComposeError> {
        let stride = params.selector_bits() + params.ell() * params.m();
        if blocks.block_size() != params.ell() {
            return Err(ComposeError::BlockMismatch { blocks: blocks.var_count(), formula: params.ell() as u32 });
        }
        if u32::try_from(blocks.block_count() * stride).is_err() {
            return Err(ComposeError::TooManyVariables);
        }
        Ok(CompositionLayout { blocks, params })
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn params(&self) -> &GadgetParams {
        &self.params
    }

    pub fn block_count(&self) -> usize {
        self.blocks.block_count()
    }

    /// Variables owned by one gadget: `t + ℓm`.
    pub fn stride(&self) -> usize {
        self.params.selector_bits() + self.params.ell() * self.params.m()
    }

    pub fn var_count(&self) -> u32 {
        (self.block_count() * self.stride()) as u32
    }

    /// Selector bit `k` (0 = MSB) of block `block`.
    pub fn selector_var(&self, block: usize, k: usize) -> u32 {
        (block * self.stride() + k + 1) as u32
    }

    /// Matrix entry `(row, col)` of block `block`, all 0-based.
    pub fn matrix_var(&self, block: usize, row: usize, col: usize) -> u32 {
        (block * self.stride() + self.params.selector_bits() + row * self.params.m() + col + 1) as u32
    }

    /// Selector value (1-based) of `block` under a total composed assignment.
    pub fn selector_value(&self, assignment: &[bool], block: usize) -> usize {
        let bits: Vec<bool> =
            (0..self.params.selector_bits()).map(|k| assignment[self.selector_var(block, k) as usize - 1]).collect();
        self.params.decode_selector(&bits)
    }

    /// `z = Ind_{ℓ×m}^n(x, y)` laid out over the source variables.
    pub fn decode(&self, assignment: &[bool]) -> Result<Vec<bool>, ComposeError> {
        let expected = self.var_count() as usize;
        if assignment.len() != expected {
            return Err(ComposeError::AssignmentLength { expected, got: assignment.len() });
        }
        let mut z = vec![false; self.blocks.var_count() as usize];
        for b in 0..self.block_count() {
            let col = self.selector_value(assignment, b) - 1;
            for row in 0..self.params.ell() {
                z[self.blocks.var_at(b, row) as usize - 1] = assignment[self.matrix_var(b, row, col) as usize - 1];
            }
        }
        Ok(z)
    }

    /// Literals `¬(selector of block = value)`, one per selector bit.
    pub fn selector_exclusion(&self, block: usize, value: usize) -> Vec<Lit> {
        let bits = self.params.encode_selector(value).expect("selector in range");
        bits.iter().enumerate().map(|(k, &b)| Lit::new(self.selector_var(block, k), !b)).collect()
    }

    /// Literals asserting `selector of block = value`.
    pub fn selector_literals(&self, block: usize, value: usize) -> Vec<Lit> {
        self.selector_exclusion(block, value).into_iter().map(Lit::negated).collect()
    }

    /// The matrix literal standing for source literal `lit` when its block's
    /// selector is `value`: same polarity, on the pointed matrix bit.
    pub fn pointed_literal(&self, lit: Lit, value: usize) -> Lit {
        let (block, row) = self.blocks.position(lit.var());
        Lit::new(self.matrix_var(block, row, value - 1), lit.is_positive())
    }

    /// The composed clause for `clause` under `selectors` (block, value) pairs,
    /// which must cover exactly the blocks the clause touches.
    pub fn certificate_clause(&self, clause: &Clause, selectors: &[(usize, usize)]) -> Clause {
        let value_of = |block: usize| {
            selectors.iter().find(|(b, _)| *b == block).map(|&(_, v)| v).expect("selector for touched block")
        };
        let mut lits: Vec<Lit> = selectors.iter().flat_map(|&(b, v)| self.selector_exclusion(b, v)).collect();
        lits.extend(clause.lits().iter().map(|&l| self.pointed_literal(l, value_of(self.blocks.position(l.var()).0))));
        Clause::new(lits)
    }
}

/// Source clause and selector assignment behind one composed clause.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClauseOrigin {
    /// 0-based source clause index.
    pub source_clause: usize,
    /// `(block, selector value)`, blocks 0-based ascending, values 1-based.
    pub selectors: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct Composition {
    pub formula: CnfFormula,
    pub layout: CompositionLayout,
    pub provenance: Vec<ClauseOrigin>,
    pub requested_m: usize,
    pub source_sha256: String,
}

impl Composition {
    /// Composed clause index for each origin.
    pub fn origin_index(&self) -> HashMap<ClauseOrigin, usize> {
        self.provenance.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect()
    }
}

/// Options for the composition builders.
#[derive(Clone, Copy, Debug)]
pub struct ComposeOptions {
    pub clause_budget: u64,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions { clause_budget: DEFAULT_CLAUSE_BUDGET }
    }
}

/// `Σ_D m^{bw(D)}`, or `None` on overflow.
pub fn composed_clause_count(formula: &CnfFormula, blocks: &BlockStructure, m: usize) -> Option<u128> {
    formula.clauses().iter().try_fold(0u128, |acc, c| {
        let bw = blocks.touched_blocks(c).len() as u32;
        (m as u128).checked_pow(bw).and_then(|x| acc.checked_add(x))
    })
}

/// All assignments in `[m]^k`, lexicographic with the first entry most significant.
pub(crate) fn selector_tuples(k: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = m.checked_pow(k as u32).expect("selector tuple count fits usize");
    (0..total).map(move |mut idx| {
        let mut t = vec![1; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % m + 1;
            idx /= m;
        }
        t
    })
}

pub fn source_hash(formula: &CnfFormula) -> String {
    hex::encode(Sha256::digest(write_dimacs(formula).as_bytes()))
}

/// `F ∘ Ind_{ℓ×m}^n` for blocks `blocks`.
pub fn compose_block(
    formula: &CnfFormula,
    blocks: &BlockStructure,
    m: usize,
    options: ComposeOptions,
) -> Result<Composition, ComposeError> {
    let params = GadgetParams::new(m, blocks.block_size())?;
    if blocks.var_count() != formula.var_count() {
        return Err(ComposeError::BlockMismatch { blocks: blocks.var_count(), formula: formula.var_count() });
    }
    let layout = CompositionLayout::new(blocks.clone(), params)?;
    match composed_clause_count(formula, blocks, m) {
        Some(n) if n <= u128::from(options.clause_budget) => {}
        other => {
            return Err(ComposeError::Budget {
                needed: other.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string()),
                budget: options.clause_budget,
            })
        }
    }
    let mut clauses = Vec::new();
    let mut provenance = Vec::new();
    for (ci, clause) in formula.clauses().iter().enumerate() {
        let touched = blocks.touched_blocks(clause);
        for alpha in selector_tuples(touched.len(), m) {
            let selectors: Vec<(usize, usize)> = touched.iter().copied().zip(alpha).collect();
            clauses.push(layout.certificate_clause(clause, &selectors));
            provenance.push(ClauseOrigin { source_clause: ci, selectors });
        }
    }
    let formula_out = CnfFormula::new(layout.var_count(), clauses).expect("certificate clauses are well formed");
    Ok(Composition { formula: formula_out, layout, provenance, requested_m: m, source_sha256: source_hash(formula) })
}

/// `F ∘ Ind_m^n`: every variable is its own block.
pub fn compose_single(formula: &CnfFormula, m: usize, options: ComposeOptions) -> Result<Composition, ComposeError> {
    compose_block(formula, &BlockStructure::singletons(formula.var_count()), m, options)
}

/// Free-function form of [`CompositionLayout::decode`].
pub fn decode_assignment(layout: &CompositionLayout, assignment: &[bool]) -> Result<Vec<bool>, ComposeError> {
    layout.decode(assignment)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetManifest {
    pub requested_m: usize,
    pub m: usize,
    pub ell: usize,
    pub selector_bits: usize,
    pub selector_encoding: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayoutManifest {
    /// 1-based block number.
    pub block: usize,
    /// Source variables of the block, in offset order.
    pub source_vars: Vec<u32>,
    /// Selector bit variables, MSB first.
    pub selector_vars: Vec<u32>,
    /// `matrix_vars[row][col]`.
    pub matrix_vars: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    /// 1-based composed clause index.
    pub clause: usize,
    /// 1-based source clause index.
    pub source_clause: usize,
    /// `[block, selector]` pairs, both 1-based.
    pub selectors: Vec<[usize; 2]>,
}

/// Versioned description of a composition, written next to the composed DIMACS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionManifest {
    pub schema: String,
    pub source_sha256: String,
    pub source_var_count: u32,
    pub source_clause_count: usize,
    pub gadget: GadgetManifest,
    pub composed_var_count: u32,
    pub composed_clause_count: usize,
    pub layout: Vec<BlockLayoutManifest>,
    pub provenance: Vec<ProvenanceEntry>,
}

impl Composition {
    pub fn manifest(&self, source_clause_count: usize) -> CompositionManifest {
        let p = self.layout.params();
        let layout = (0..self.layout.block_count())
            .map(|b| BlockLayoutManifest {
                block: b + 1,
                source_vars: self.layout.blocks().blocks()[b].clone(),
                selector_vars: (0..p.selector_bits()).map(|k| self.layout.selector_var(b, k)).collect(),
                matrix_vars: (0..p.ell())
                    .map(|r| (0..p.m()).map(|c| self.layout.matrix_var(b, r, c)).collect())
                    .collect(),
            })
            .collect();
        let provenance = self
            .provenance
            .iter()
            .enumerate()
            .map(|(i, o)| ProvenanceEntry {
                clause: i + 1,
                source_clause: o.source_clause + 1,
                selectors: o.selectors.iter().map(|&(b, v)| [b + 1, v]).collect(),
            })
            .collect();
        CompositionManifest {
            schema: MANIFEST_SCHEMA.to_string(),
            source_sha256: self.source_sha256.clone(),
            source_var_count: self.layout.blocks().var_count(),
            source_clause_count,
            gadget: GadgetManifest {
                requested_m: self.requested_m,
                m: p.m(),
                ell: p.ell(),
                selector_bits: p.selector_bits(),
                selector_encoding: "msb-first; selector v stored as v-1".to_string(),
            },
            composed_var_count: self.layout.var_count(),
            composed_clause_count: self.formula.len(),
            layout,
            provenance,
        }
    }
}

impl CompositionManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ComposeError> {
        let m: CompositionManifest = serde_json::from_str(text).map_err(|e| ComposeError::Manifest(e.to_string()))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(ComposeError::Manifest(format!("unsupported schema `{}`", m.schema)));
        }
        Ok(m)
    }

    /// Rebuilds the layout and checks it matches the recorded variable numbers.
    pub fn layout(&self) -> Result<CompositionLayout, ComposeError> {
        let blocks = BlockStructure::new(self.gadget.ell, self.layout.iter().map(|b| b.source_vars.clone()).collect())
            .map_err(|e| ComposeError::Manifest(e.to_string()))?;
        let layout = CompositionLayout::new(blocks, GadgetParams::new(self.gadget.m, self.gadget.ell)?)?;
        let consistent = self.layout.iter().enumerate().all(|(b, entry)| {
            entry.selector_vars.iter().enumerate().all(|(k, &v)| layout.selector_var(b, k) == v)
                && entry
                    .matrix_vars
                    .iter()
                    .enumerate()
                    .all(|(r, row)| row.iter().enumerate().all(|(c, &v)| layout.matrix_var(b, r, c) == v))
        });
        if !consistent || layout.var_count() != self.composed_var_count {
            return Err(ComposeError::Manifest("variable layout does not match the standard layout".into()));
        }
        Ok(layout)
    }
}
