//! The index gadget `Ind_m` and the column-index gadget `Ind_{ℓ×m}`.
//!
//! A selector value `v ∈ [m]` (1-based) is encoded as `v − 1` in `t = log2 m`
//! bits, most significant bit first. Matrix columns are addressed 0-based
//! internally, so selector `v` points at column `v − 1`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::DecisionTree;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("m = {0} is not a power of two with log m >= 1")]
    NotPowerOfTwo(usize),
    #[error("output width must be at least 1")]
    ZeroWidth,
    #[error("selector {selector} outside 1..={m}")]
    SelectorOutOfRange { selector: usize, m: usize },
    #[error("matrix has shape {rows}x{cols}, expected {ell}x{m}")]
    Shape { rows: usize, cols: usize, ell: usize, m: usize },
}

/// Selector domain size `m = 2^t` (t ≥ 1) and output width `ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GadgetParams {
    m: usize,
    ell: usize,
}

impl GadgetParams {
    pub fn new(m: usize, ell: usize) -> Result<Self, GadgetError> {
        if m < 2 || !m.is_power_of_two() {
            return Err(GadgetError::NotPowerOfTwo(m));
        }
        if ell == 0 {
            return Err(GadgetError::ZeroWidth);
        }
        Ok(GadgetParams { m, ell })
    }

    /// Smallest valid `m' ≥ max(requested, 2)` that is a power of two.
    pub fn round_up(requested: usize, ell: usize) -> Result<Self, GadgetError> {
        GadgetParams::new(requested.max(2).next_power_of_two(), ell)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `t = log2 m`.
    pub fn selector_bits(&self) -> usize {
        self.m.trailing_zeros() as usize
    }

    fn check_selector(&self, selector: usize) -> Result<(), GadgetError> {
        if selector == 0 || selector > self.m {
            return Err(GadgetError::SelectorOutOfRange { selector, m: self.m });
        }
        Ok(())
    }

    /// The `t` bits encoding `selector`, MSB first.
    pub fn encode_selector(&self, selector: usize) -> Result<Vec<bool>, GadgetError> {
        self.check_selector(selector)?;
        let t = self.selector_bits();
        Ok((0..t).map(|k| (selector - 1) >> (t - 1 - k) & 1 == 1).collect())
    }

    /// Inverse of [`GadgetParams::encode_selector`]; `bits` must have length `t`.
    pub fn decode_selector(&self, bits: &[bool]) -> usize {
        debug_assert_eq!(bits.len(), self.selector_bits());
        1 + bits.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(b))
    }
}

/// `Ind_m(x, y) = y_x`.
pub fn eval_index(params: &GadgetParams, selector: usize, row: &[bool]) -> Result<bool, GadgetError> {
    params.check_selector(selector)?;
    if row.len() != params.m {
        return Err(GadgetError::Shape { rows: 1, cols: row.len(), ell: 1, m: params.m });
    }
    Ok(row[selector - 1])
}

/// Column `x` of the `ℓ × m` matrix `y`, top row first.
pub fn eval_column_index(params: &GadgetParams, selector: usize, matrix: &[Vec<bool>]) -> Result<Vec<bool>, GadgetError> {
    params.check_selector(selector)?;
    let bad_shape = || GadgetError::Shape {
        rows: matrix.len(),
        cols: matrix.first().map_or(0, Vec::len),
        ell: params.ell,
        m: params.m,
    };
    if matrix.len() != params.ell || matrix.iter().any(|r| r.len() != params.m) {
        return Err(bad_shape());
    }
    Ok(matrix.iter().map(|r| r[selector - 1]).collect())
}

/// A variable of a single gadget instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetVar {
    /// Selector bit `k`, 0 = most significant.
    Selector(usize),
    /// Matrix entry, both indices 0-based.
    Matrix { row: usize, col: usize },
}

impl fmt::Display for GadgetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetVar::Selector(k) => write!(f, "s{k}"),
            GadgetVar::Matrix { row, col } => write!(f, "y{row}.{col}"),
        }
    }
}

/// Queries the selector bits MSB first, then the `ℓ` bits of the pointed
/// column top to bottom. Depth `log m + ℓ`; leaves carry the gadget output.
pub fn gadget_query_tree(params: &GadgetParams) -> DecisionTree<GadgetVar, Vec<bool>> {
    fn selector_level(p: &GadgetParams, k: usize, prefix: usize) -> DecisionTree<GadgetVar, Vec<bool>> {
        if k == p.selector_bits() {
            return column_level(p, prefix, 0, Vec::new());
        }
        DecisionTree::query(
            GadgetVar::Selector(k),
            selector_level(p, k + 1, prefix << 1),
            selector_level(p, k + 1, prefix << 1 | 1),
        )
    }
    fn column_level(p: &GadgetParams, col: usize, row: usize, out: Vec<bool>) -> DecisionTree<GadgetVar, Vec<bool>> {
        if row == p.ell {
            return DecisionTree::Leaf(out);
        }
        let mut zero = out.clone();
        zero.push(false);
        let mut one = out;
        one.push(true);
        DecisionTree::query(
            GadgetVar::Matrix { row, col },
            column_level(p, col, row + 1, zero),
            column_level(p, col, row + 1, one),
        )
    }
    selector_level(params, 0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn params_validation() {
        assert!(GadgetParams::new(1, 1).is_err());
        assert!(GadgetParams::new(6, 1).is_err());
        assert!(GadgetParams::new(4, 0).is_err());
        assert_eq!(GadgetParams::round_up(5, 1).unwrap().m(), 8);
        assert_eq!(GadgetParams::round_up(1, 1).unwrap().m(), 2);
    }

    #[test]
    fn selector_encoding_is_msb_first() {
        let p = GadgetParams::new(4, 1).unwrap();
        assert_eq!(p.encode_selector(1).unwrap(), bits("00"));
        assert_eq!(p.encode_selector(2).unwrap(), bits("01"));
        assert_eq!(p.encode_selector(3).unwrap(), bits("10"));
        for v in 1..=4 {
            assert_eq!(p.decode_selector(&p.encode_selector(v).unwrap()), v);
        }
        assert!(p.encode_selector(5).is_err());
    }

    #[test]
    fn index_examples() {
        let p4 = GadgetParams::new(4, 1).unwrap();
        assert!(eval_index(&p4, 3, &bits("0110")).unwrap());
        let p2 = GadgetParams::new(2, 1).unwrap();
        assert!(!eval_index(&p2, 1, &bits("01")).unwrap());
        let p8 = GadgetParams::new(8, 1).unwrap();
        assert!(eval_index(&p8, 8, &bits("00000001")).unwrap());
        assert!(eval_index(&p4, 0, &bits("0110")).is_err());
    }

    #[test]
    fn column_examples() {
        let p = GadgetParams::new(2, 2).unwrap();
        assert_eq!(eval_column_index(&p, 1, &[bits("10"), bits("01")]).unwrap(), bits("10"));
        let q = GadgetParams::new(4, 3).unwrap();
        assert_eq!(eval_column_index(&q, 2, &vec![bits("1111"); 3]).unwrap(), bits("111"));
        assert!(eval_column_index(&q, 2, &vec![bits("1111"); 2]).is_err());
    }

    #[test]
    fn query_tree_depths() {
        for (m, ell, depth) in [(2, 1, 2), (4, 1, 3), (2, 2, 3), (8, 3, 6)] {
            let p = GadgetParams::new(m, ell).unwrap();
            let t = gadget_query_tree(&p);
            assert_eq!(t.depth(), depth);
            assert_eq!(t.leaf_count(), m << ell);
        }
    }
}
