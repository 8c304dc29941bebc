use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Clause;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("block {block} has {got} variables, expected {expected}")]
    WrongBlockSize { block: usize, expected: usize, got: usize },
    #[error("variable {var} is outside 1..={max}")]
    VariableOutOfRange { var: u32, max: u32 },
    #[error("variable {var} appears in more than one block position")]
    DuplicateVariable { var: u32 },
    #[error("sidecar declares {declared} blocks but lists {listed}")]
    CountMismatch { declared: usize, listed: usize },
    #[error("malformed block sidecar: {0}")]
    Malformed(String),
}

/// Partition of variables `1..=n·ℓ` into `n` blocks of `ℓ` variables each.
///
/// Block and offset indices are 0-based in the API; the sidecar document
/// lists 1-indexed variables per block in block order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    block_size: usize,
    blocks: Vec<Vec<u32>>,
    position: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    block_count: usize,
    block_size: usize,
    blocks: Vec<Vec<u32>>,
}

impl BlockStructure {
    pub fn new(block_size: usize, blocks: Vec<Vec<u32>>) -> Result<Self, BlockError> {
        if block_size == 0 {
            return Err(BlockError::ZeroBlockSize);
        }
        let total = (blocks.len() * block_size) as u32;
        let mut position = vec![None; total as usize];
        for (b, vars) in blocks.iter().enumerate() {
            if vars.len() != block_size {
                return Err(BlockError::WrongBlockSize { block: b, expected: block_size, got: vars.len() });
            }
            for (o, &v) in vars.iter().enumerate() {
                if v == 0 || v > total {
                    return Err(BlockError::VariableOutOfRange { var: v, max: total });
                }
                let slot = &mut position[v as usize - 1];
                if slot.is_some() {
                    return Err(BlockError::DuplicateVariable { var: v });
                }
                *slot = Some((b, o));
            }
        }
        let position = position.into_iter().map(|p| p.expect("pigeonhole: every slot filled")).collect();
        Ok(BlockStructure { block_size, blocks, position })
    }

    /// Block `i` holds variables `iℓ+1 ..= (i+1)ℓ`.
    pub fn contiguous(block_count: usize, block_size: usize) -> Self {
        let blocks = (0..block_count)
            .map(|b| (0..block_size).map(|o| (b * block_size + o + 1) as u32).collect())
            .collect();
        BlockStructure::new(block_size, blocks).expect("contiguous layout is a partition")
    }

    /// One block per variable.
    pub fn singletons(var_count: u32) -> Self {
        BlockStructure::contiguous(var_count as usize, 1)
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn var_count(&self) -> u32 {
        self.position.len() as u32
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// `(block, offset)` of a variable, both 0-based.
    pub fn position(&self, var: u32) -> (usize, usize) {
        self.position[var as usize - 1]
    }

    pub fn var_at(&self, block: usize, offset: usize) -> u32 {
        self.blocks[block][offset]
    }

    /// Sorted, deduplicated 0-based indices of blocks touched by `clause`.
    pub fn touched_blocks(&self, clause: &Clause) -> Vec<usize> {
        let mut touched: Vec<usize> = clause.lits().iter().map(|l| self.position(l.var()).0).collect();
        touched.sort_unstable();
        touched.dedup();
        touched
    }

    /// Splits a flat assignment over `1..=n·ℓ` into per-block bit strings.
    pub fn split(&self, z: &[bool]) -> Vec<Vec<bool>> {
        self.blocks.iter().map(|vars| vars.iter().map(|&v| z[v as usize - 1]).collect()).collect()
    }

    /// Inverse of [`BlockStructure::split`].
    pub fn join(&self, blocks: &[Vec<bool>]) -> Vec<bool> {
        let mut z = vec![false; self.position.len()];
        for (vars, bits) in self.blocks.iter().zip(blocks) {
            for (&v, &b) in vars.iter().zip(bits) {
                z[v as usize - 1] = b;
            }
        }
        z
    }

    pub fn to_sidecar(&self) -> String {
        let doc = Sidecar { block_count: self.blocks.len(), block_size: self.block_size, blocks: self.blocks.clone() };
        let mut s = serde_json::to_string_pretty(&doc).expect("sidecar serializes");
        s.push('\n');
        s
    }

    pub fn from_sidecar(text: &str) -> Result<Self, BlockError> {
        let doc: Sidecar = serde_json::from_str(text).map_err(|e| BlockError::Malformed(e.to_string()))?;
        if doc.block_count != doc.blocks.len() {
            return Err(BlockError::CountMismatch { declared: doc.block_count, listed: doc.blocks.len() });
        }
        BlockStructure::new(doc.block_size, doc.blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::clause_block_width;

    #[test]
    fn block_width_examples() {
        let b = BlockStructure::contiguous(2, 2);
        assert_eq!(clause_block_width(&Clause::empty(), &b), 0);
        assert_eq!(clause_block_width(&Clause::from_dimacs(&[1, -2]), &b), 1);
        assert_eq!(clause_block_width(&Clause::from_dimacs(&[1, 3]), &b), 2);
    }

    #[test]
    fn sidecar_round_trip() {
        let b = BlockStructure::new(2, vec![vec![3, 1], vec![2, 4]]).unwrap();
        let again = BlockStructure::from_sidecar(&b.to_sidecar()).unwrap();
        assert_eq!(b, again);
        assert_eq!(again.position(1), (0, 1));
    }

    #[test]
    fn rejects_non_partitions() {
        assert_eq!(BlockStructure::new(2, vec![vec![1, 1]]), Err(BlockError::DuplicateVariable { var: 1 }));
        assert!(matches!(BlockStructure::new(2, vec![vec![1, 3]]), Err(BlockError::VariableOutOfRange { .. })));
        assert!(matches!(BlockStructure::new(2, vec![vec![1]]), Err(BlockError::WrongBlockSize { .. })));
        let bad = r#"{"block_count": 2, "block_size": 1, "blocks": [[1]]}"#;
        assert!(matches!(BlockStructure::from_sidecar(bad), Err(BlockError::CountMismatch { .. })));
    }

    #[test]
    fn split_join_round_trip() {
        let b = BlockStructure::new(2, vec![vec![4, 1], vec![2, 3]]).unwrap();
        let z = vec![true, false, false, true];
        let parts = b.split(&z);
        assert_eq!(parts, vec![vec![true, true], vec![false, false]]);
        assert_eq!(b.join(&parts), z);
    }
}
