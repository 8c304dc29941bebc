//! Exact decision-tree depth of `S_F ∘ Ind` by searching over classes of
//! per-block subcubes instead of subcubes of the whole input.
//!
//! A query touches one block, and whether a clause is a valid output depends
//! only on which gadget outputs each block's subcube still allows. Block
//! subcubes are grouped by the coarsest relation that keeps the allowed
//! outputs and matches every informative query by one landing in the same
//! pair of groups; the depth of a product of subcubes depends only on the
//! groups of its factors.

use std::collections::HashMap;

use super::{check_size, check_unsat, OracleError};
use crate::compose::CompositionLayout;
use crate::formula::CnfFormula;

/// Largest number of composed bits per block.
pub const MAX_BLOCK_BITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedDepth {
    pub depth: usize,
    /// Number of block-subcube classes.
    pub block_classes: usize,
    /// Distinct class vectors visited.
    pub states: usize,
}

/// One class of block subcubes.
struct BlockClass {
    /// Per row: `Some(v)` when the gadget output is fixed to `v`.
    status: Vec<Option<bool>>,
    /// Informative queries as unordered pairs of child classes.
    options: Vec<(u16, u16)>,
}

/// Subcubes of `{0,1}^s` in base 3: digit 0 free, 1 for `0`, 2 for `1`.
struct BlockCubes {
    bits: usize,
    count: usize,
}

impl BlockCubes {
    fn digit(&self, cube: usize, b: usize) -> usize {
        cube / 3usize.pow(b as u32) % 3
    }

    fn with(&self, cube: usize, b: usize, v: bool) -> usize {
        cube + 3usize.pow(b as u32) * (1 + usize::from(v))
    }
}

fn block_status(cubes: &BlockCubes, cube: usize, t: usize, ell: usize, m: usize) -> Vec<Option<bool>> {
    let selectors: Vec<usize> = (0..m)
        .filter(|&s| (0..t).all(|k| match cubes.digit(cube, k) {
            0 => true,
            d => (d == 2) == (s >> (t - 1 - k) & 1 == 1),
        }))
        .collect();
    (0..ell)
        .map(|row| {
            let mut seen = [false; 3];
            for &s in &selectors {
                seen[cubes.digit(cube, t + row * m + s)] = true;
            }
            match seen {
                [false, true, false] => Some(false),
                [false, false, true] => Some(true),
                _ => None,
            }
        })
        .collect()
}

fn block_classes(layout: &CompositionLayout) -> (Vec<BlockClass>, u16) {
    let (t, ell, m) = (layout.params().selector_bits(), layout.params().ell(), layout.params().m());
    let cubes = BlockCubes { bits: layout.stride(), count: 3usize.pow(layout.stride() as u32) };
    let statuses: Vec<Vec<Option<bool>>> = (0..cubes.count).map(|c| block_status(&cubes, c, t, ell, m)).collect();
    let children: Vec<Vec<(usize, usize)>> = (0..cubes.count)
        .map(|c| {
            (0..cubes.bits).filter(|&b| cubes.digit(c, b) == 0).map(|b| (cubes.with(c, b, false), cubes.with(c, b, true))).collect()
        })
        .collect();

    let mut ids: HashMap<&Vec<Option<bool>>, u16> = HashMap::new();
    let mut class: Vec<u16> = statuses
        .iter()
        .map(|s| {
            let next = ids.len() as u16;
            *ids.entry(s).or_insert(next)
        })
        .collect();
    let mut count = ids.len();
    let signature = |class: &[u16], c: usize| -> (u16, Vec<(u16, u16)>) {
        let own = class[c];
        let mut pairs: Vec<(u16, u16)> = children[c]
            .iter()
            .map(|&(a, b)| (class[a].min(class[b]), class[a].max(class[b])))
            .filter(|&(a, b)| !(a == own && b == own))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        (own, pairs)
    };
    loop {
        let mut sigs: HashMap<(u16, Vec<(u16, u16)>), u16> = HashMap::new();
        let next: Vec<u16> = (0..cubes.count)
            .map(|c| {
                let fresh = sigs.len() as u16;
                *sigs.entry(signature(&class, c)).or_insert(fresh)
            })
            .collect();
        let stable = sigs.len() == count;
        count = sigs.len();
        class = next;
        if stable {
            break;
        }
    }
    let mut out: Vec<Option<BlockClass>> = (0..count).map(|_| None).collect();
    for c in 0..cubes.count {
        let k = class[c] as usize;
        if out[k].is_none() {
            out[k] = Some(BlockClass { status: statuses[c].clone(), options: signature(&class, c).1 });
        }
    }
    (out.into_iter().map(|c| c.expect("every class has a member")).collect(), class[0])
}

struct Search<'a> {
    classes: &'a [BlockClass],
    /// Per clause: `(block, row, falsifying value)`.
    clauses: Vec<Vec<(usize, usize, bool)>>,
    memo: HashMap<Vec<u16>, usize>,
}

impl Search<'_> {
    fn leaf(&self, s: &[u16]) -> bool {
        self.clauses.iter().any(|c| c.iter().all(|&(b, r, v)| self.classes[s[b] as usize].status[r] == Some(v)))
    }

    fn decide(&mut self, s: &mut Vec<u16>, k: usize) -> bool {
        if self.leaf(s) {
            return true;
        }
        if k == 0 || self.memo.get(s.as_slice()).is_some_and(|&lb| lb > k) {
            return false;
        }
        for i in 0..s.len() {
            let own = s[i];
            for oi in 0..self.classes[own as usize].options.len() {
                let (a, b) = self.classes[own as usize].options[oi];
                s[i] = a;
                let ok = self.decide(s, k - 1) && {
                    s[i] = b;
                    self.decide(s, k - 1)
                };
                s[i] = own;
                if ok {
                    return true;
                }
            }
        }
        let e = self.memo.entry(s.clone()).or_insert(0);
        *e = (*e).max(k + 1);
        false
    }
}

/// Least depth of a decision tree over the composed bits solving `S_F ∘ Ind`.
pub fn min_composed_depth(formula: &CnfFormula, layout: &CompositionLayout) -> Result<ComposedDepth, OracleError> {
    let blocks = layout.blocks();
    if blocks.var_count() != formula.var_count() {
        return Err(OracleError::BlockMismatch { blocks: blocks.var_count(), formula: formula.var_count() });
    }
    check_size("min_composed_depth", layout.stride(), MAX_BLOCK_BITS)?;
    check_unsat(formula)?;
    let (classes, free) = block_classes(layout);
    let clauses = formula
        .clauses()
        .iter()
        .map(|c| {
            c.lits()
                .iter()
                .map(|l| {
                    let (b, r) = blocks.position(l.var());
                    (b, r, !l.is_positive())
                })
                .collect()
        })
        .collect();
    let mut search = Search { classes: &classes, clauses, memo: HashMap::new() };
    let mut state = vec![free; layout.block_count()];
    let max = layout.var_count() as usize;
    let depth = (0..=max).find(|&k| search.decide(&mut state, k)).expect("an unsatisfiable source is solved by querying every bit");
    Ok(ComposedDepth { depth, block_classes: classes.len(), states: search.memo.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{complete_tree_contradiction, BlockStructure};
    use crate::gadget::GadgetParams;
    use crate::oracle::min_relation_depth;
    use crate::relation::ComposedRelation;

    fn layout(f: &CnfFormula, m: usize) -> CompositionLayout {
        CompositionLayout::new(BlockStructure::singletons(f.var_count()), GadgetParams::new(m, 1).unwrap()).unwrap()
    }

    fn brute(f: &CnfFormula, m: usize) -> usize {
        let l = layout(f, m);
        min_relation_depth(&ComposedRelation::new(f, &l)).unwrap().depth
    }

    #[test]
    fn agrees_with_cube_search() {
        let x_and_not_x = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let full2 = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let cases = [(&x_and_not_x, 2), (&x_and_not_x, 4), (&x_and_not_x, 8), (&full2, 2), (&full2, 4)];
        for (f, m) in cases {
            assert_eq!(min_composed_depth(f, &layout(f, m)).unwrap().depth, brute(f, m), "m={m}");
        }
        let tree2 = complete_tree_contradiction(2);
        assert_eq!(min_composed_depth(&tree2, &layout(&tree2, 2)).unwrap().depth, brute(&tree2, 2));
    }

    #[test]
    fn single_block_needs_selector_and_bit() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(min_composed_depth(&f, &layout(&f, 4)).unwrap().depth, 3);
    }

    #[test]
    fn block_gadgets() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let l = CompositionLayout::new(BlockStructure::contiguous(1, 2), GadgetParams::new(2, 2).unwrap()).unwrap();
        let brute = min_relation_depth(&ComposedRelation::new(&f, &l)).unwrap().depth;
        assert_eq!(min_composed_depth(&f, &l).unwrap().depth, brute);
    }

    #[test]
    fn satisfiable_source_is_rejected() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        assert_eq!(min_composed_depth(&f, &layout(&f, 2)), Err(OracleError::Satisfiable));
    }
}
