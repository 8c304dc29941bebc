//! Total search relations `S ⊆ {0,1}^N × O` with outputs `0..output_count`.
//!
//! Input bit `k` (0-based) corresponds to variable `k + 1`. A subcube is a
//! slice of `Option<bool>`, one entry per input bit.

use thiserror::Error;

use crate::compose::CompositionLayout;
use crate::formula::CnfFormula;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("relation is not total: input {input} has no valid output")]
    NotTotal { input: String },
    #[error("relation has {bits} input bits; at most {cap} are supported")]
    TooManyBits { bits: usize, cap: usize },
    #[error("table has {got} rows, expected 2^{bits}")]
    TableSize { bits: usize, got: usize },
    #[error("output {output} outside 0..{count}")]
    OutputOutOfRange { output: usize, count: usize },
}

pub const MAX_EXPLICIT_BITS: usize = 24;

pub trait SearchRelation {
    fn input_bits(&self) -> usize;

    fn output_count(&self) -> usize;

    fn is_valid(&self, x: &[bool], output: usize) -> bool;

    /// Input bits that can affect whether `output` is valid, if known.
    fn output_support(&self, _output: usize) -> Option<Vec<usize>> {
        None
    }

    /// An output valid on every point of the subcube, lowest index first.
    fn solve_subcube(&self, cube: &[Option<bool>]) -> Option<usize> {
        brute_force_subcube(self, cube)
    }

    /// False when the relation restricted to the subcube provably does not
    /// depend on `bit`, so querying it cannot help.
    fn is_relevant(&self, _cube: &[Option<bool>], _bit: usize) -> bool {
        true
    }

    fn solutions(&self, x: &[bool]) -> Vec<usize> {
        (0..self.output_count()).filter(|&o| self.is_valid(x, o)).collect()
    }
}

fn brute_force_subcube<S: SearchRelation + ?Sized>(s: &S, cube: &[Option<bool>]) -> Option<usize> {
    let free: Vec<usize> = (0..cube.len()).filter(|&i| cube[i].is_none()).collect();
    let mut x: Vec<bool> = cube.iter().map(|v| v.unwrap_or(false)).collect();
    'outputs: for o in 0..s.output_count() {
        let relevant: Vec<usize> = match s.output_support(o) {
            Some(sup) => free.iter().copied().filter(|b| sup.contains(b)).collect(),
            None => free.clone(),
        };
        for mask in 0u64..1 << relevant.len() {
            for (k, &b) in relevant.iter().enumerate() {
                x[b] = mask >> k & 1 == 1;
            }
            if !s.is_valid(&x, o) {
                continue 'outputs;
            }
        }
        return Some(o);
    }
    None
}

/// Checks totality by enumerating all inputs.
pub fn check_total<S: SearchRelation + ?Sized>(s: &S) -> Result<(), RelationError> {
    let n = s.input_bits();
    if n > MAX_EXPLICIT_BITS {
        return Err(RelationError::TooManyBits { bits: n, cap: MAX_EXPLICIT_BITS });
    }
    let mut x = vec![false; n];
    for idx in 0u64..1 << n {
        for (k, slot) in x.iter_mut().enumerate() {
            *slot = idx >> k & 1 == 1;
        }
        if !(0..s.output_count()).any(|o| s.is_valid(&x, o)) {
            return Err(RelationError::NotTotal { input: x.iter().map(|&b| if b { '1' } else { '0' }).collect() });
        }
    }
    Ok(())
}

/// A relation given by its full table: `valid[idx]` lists the valid outputs
/// for the input whose bit `k` is `idx >> k & 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitRelation {
    bits: usize,
    outputs: usize,
    valid: Vec<Vec<usize>>,
}

impl ExplicitRelation {
    pub fn new(bits: usize, outputs: usize, valid: Vec<Vec<usize>>) -> Result<Self, RelationError> {
        if bits > MAX_EXPLICIT_BITS {
            return Err(RelationError::TooManyBits { bits, cap: MAX_EXPLICIT_BITS });
        }
        if valid.len() != 1 << bits {
            return Err(RelationError::TableSize { bits, got: valid.len() });
        }
        let mut valid = valid;
        for row in &mut valid {
            row.sort_unstable();
            row.dedup();
            if let Some(&o) = row.iter().find(|&&o| o >= outputs) {
                return Err(RelationError::OutputOutOfRange { output: o, count: outputs });
            }
        }
        Ok(ExplicitRelation { bits, outputs, valid })
    }

    /// Tabulates another relation.
    pub fn from_relation<S: SearchRelation + ?Sized>(s: &S) -> Result<Self, RelationError> {
        let n = s.input_bits();
        if n > MAX_EXPLICIT_BITS {
            return Err(RelationError::TooManyBits { bits: n, cap: MAX_EXPLICIT_BITS });
        }
        let valid = (0u64..1 << n).map(|idx| s.solutions(&index_bits(idx, n))).collect();
        ExplicitRelation::new(n, s.output_count(), valid)
    }
}

pub(crate) fn index_bits(idx: u64, n: usize) -> Vec<bool> {
    (0..n).map(|k| idx >> k & 1 == 1).collect()
}

fn bits_index(x: &[bool]) -> usize {
    x.iter().enumerate().fold(0, |acc, (k, &b)| acc | usize::from(b) << k)
}

impl SearchRelation for ExplicitRelation {
    fn input_bits(&self) -> usize {
        self.bits
    }

    fn output_count(&self) -> usize {
        self.outputs
    }

    fn is_valid(&self, x: &[bool], output: usize) -> bool {
        self.valid[bits_index(x)].binary_search(&output).is_ok()
    }
}

/// `S_F`: outputs are clause indices, valid when the clause is falsified.
#[derive(Clone, Copy, Debug)]
pub struct CnfRelation<'a> {
    pub formula: &'a CnfFormula,
}

impl<'a> CnfRelation<'a> {
    pub fn new(formula: &'a CnfFormula) -> Self {
        CnfRelation { formula }
    }
}

impl SearchRelation for CnfRelation<'_> {
    fn input_bits(&self) -> usize {
        self.formula.var_count() as usize
    }

    fn output_count(&self) -> usize {
        self.formula.len()
    }

    fn is_valid(&self, x: &[bool], output: usize) -> bool {
        !self.formula.clauses()[output].eval(x)
    }

    fn output_support(&self, output: usize) -> Option<Vec<usize>> {
        Some(self.formula.clauses()[output].vars().iter().map(|&v| v as usize - 1).collect())
    }

    fn solve_subcube(&self, cube: &[Option<bool>]) -> Option<usize> {
        self.formula
            .clauses()
            .iter()
            .position(|c| c.lits().iter().all(|l| cube[l.var() as usize - 1] == Some(!l.is_positive())))
    }

    fn is_relevant(&self, cube: &[Option<bool>], bit: usize) -> bool {
        let var = bit as u32 + 1;
        self.formula.clauses().iter().any(|c| {
            c.lits().iter().any(|l| l.var() == var)
                && !c.lits().iter().any(|l| cube[l.var() as usize - 1] == Some(l.is_positive()))
        })
    }
}

/// `S_F ∘ Ind`: inputs are composed assignments, outputs are source clause
/// indices, valid when the decoded assignment falsifies the clause.
#[derive(Clone, Copy, Debug)]
pub struct ComposedRelation<'a> {
    pub source: &'a CnfFormula,
    pub layout: &'a CompositionLayout,
}

impl<'a> ComposedRelation<'a> {
    pub fn new(source: &'a CnfFormula, layout: &'a CompositionLayout) -> Self {
        ComposedRelation { source, layout }
    }

    /// Selector values (1-based) of `block` consistent with the subcube.
    fn possible_selectors(&self, cube: &[Option<bool>], block: usize) -> Vec<usize> {
        let p = self.layout.params();
        let t = p.selector_bits();
        (1..=p.m())
            .filter(|&v| {
                let bits = p.encode_selector(v).expect("in range");
                (0..t).all(|k| cube[self.layout.selector_var(block, k) as usize - 1].map_or(true, |b| b == bits[k]))
            })
            .collect()
    }

    /// Values source variable `var` can take on the subcube: (can be 0, can be 1).
    fn possible_values(&self, cube: &[Option<bool>], var: u32) -> (bool, bool) {
        let (block, row) = self.layout.blocks().position(var);
        let mut out = (false, false);
        for v in self.possible_selectors(cube, block) {
            match cube[self.layout.matrix_var(block, row, v - 1) as usize - 1] {
                Some(false) => out.0 = true,
                Some(true) => out.1 = true,
                None => return (true, true),
            }
        }
        out
    }
}

impl SearchRelation for ComposedRelation<'_> {
    fn input_bits(&self) -> usize {
        self.layout.var_count() as usize
    }

    fn output_count(&self) -> usize {
        self.source.len()
    }

    fn is_valid(&self, x: &[bool], output: usize) -> bool {
        let z = self.layout.decode(x).expect("input length matches layout");
        !self.source.clauses()[output].eval(&z)
    }

    fn output_support(&self, output: usize) -> Option<Vec<usize>> {
        let p = self.layout.params();
        let mut bits = Vec::new();
        for block in self.layout.blocks().touched_blocks(&self.source.clauses()[output]) {
            bits.extend((0..p.selector_bits()).map(|k| self.layout.selector_var(block, k) as usize - 1));
            for row in 0..p.ell() {
                bits.extend((0..p.m()).map(|c| self.layout.matrix_var(block, row, c) as usize - 1));
            }
        }
        bits.sort_unstable();
        Some(bits)
    }

    fn solve_subcube(&self, cube: &[Option<bool>]) -> Option<usize> {
        self.source.clauses().iter().position(|c| {
            c.lits().iter().all(|l| {
                let (zero, one) = self.possible_values(cube, l.var());
                if l.is_positive() {
                    zero && !one
                } else {
                    one && !zero
                }
            })
        })
    }

    fn is_relevant(&self, cube: &[Option<bool>], bit: usize) -> bool {
        let p = self.layout.params();
        let stride = self.layout.stride();
        let block = bit / stride;
        let offset = bit % stride;
        if offset < p.selector_bits() {
            return true;
        }
        let col = (offset - p.selector_bits()) % p.m();
        self.possible_selectors(cube, block).contains(&(col + 1))
    }
}
