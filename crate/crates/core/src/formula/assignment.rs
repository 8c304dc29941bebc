use std::fmt;

/// A value in `{0, 1, *}` for each variable `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
}

impl PartialAssignment {
    /// All variables unassigned.
    pub fn new(var_count: u32) -> Self {
        PartialAssignment { values: vec![None; var_count as usize] }
    }

    pub fn from_values(values: Vec<Option<bool>>) -> Self {
        PartialAssignment { values }
    }

    /// A total assignment viewed as a partial one.
    pub fn from_total(z: &[bool]) -> Self {
        PartialAssignment { values: z.iter().map(|&b| Some(b)).collect() }
    }

    pub fn var_count(&self) -> u32 {
        self.values.len() as u32
    }

    /// Value of variable `var` (1-indexed); `None` when unassigned or out of range.
    pub fn get(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize - 1).copied().flatten()
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values[var as usize - 1] = Some(value);
    }

    pub fn unset(&mut self, var: u32) {
        self.values[var as usize - 1] = None;
    }

    pub fn with(&self, var: u32, value: bool) -> Self {
        let mut next = self.clone();
        next.set(var, value);
        next
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    /// True if `z` agrees with every assigned variable.
    pub fn consistent_with(&self, z: &[bool]) -> bool {
        self.values.iter().zip(z).all(|(v, &b)| v.map_or(true, |x| x == b))
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            let c = match v {
                Some(true) => '1',
                Some(false) => '0',
                None => '*',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Per-block value in `{0,1}^ℓ ∪ {*}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockPartialAssignment {
    block_size: usize,
    blocks: Vec<Option<Vec<bool>>>,
}

impl BlockPartialAssignment {
    /// `*^n`.
    pub fn free(block_count: usize, block_size: usize) -> Self {
        BlockPartialAssignment { block_size, blocks: vec![None; block_count] }
    }

    /// Panics if a fixed block has the wrong length.
    pub fn from_blocks(block_size: usize, blocks: Vec<Option<Vec<bool>>>) -> Self {
        for b in blocks.iter().flatten() {
            assert_eq!(b.len(), block_size, "fixed block has wrong length");
        }
        BlockPartialAssignment { block_size, blocks }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn get(&self, block: usize) -> Option<&[bool]> {
        self.blocks[block].as_deref()
    }

    pub fn fix(&mut self, block: usize, value: Vec<bool>) {
        assert_eq!(value.len(), self.block_size, "fixed block has wrong length");
        self.blocks[block] = Some(value);
    }

    pub fn is_free(&self, block: usize) -> bool {
        self.blocks[block].is_none()
    }

    /// 0-based indices of free blocks, ascending.
    pub fn free_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].is_none()).collect()
    }

    /// 0-based indices of fixed blocks, ascending.
    pub fn fixed_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| self.blocks[i].is_some()).collect()
    }

    /// Membership of `z ∈ ({0,1}^ℓ)^n` in `Cube(ρ)`.
    pub fn contains(&self, z: &[Vec<bool>]) -> bool {
        z.len() == self.blocks.len()
            && self.blocks.iter().zip(z).all(|(b, zi)| zi.len() == self.block_size && b.as_ref().map_or(true, |v| v == zi))
    }

    /// Number of points of `Cube(ρ)`: `2^(ℓ·|free(ρ)|)`.
    pub fn cube_size_log2(&self) -> usize {
        self.block_size * self.free_blocks().len()
    }
}

impl fmt::Display for BlockPartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match b {
                None => write!(f, "*")?,
                Some(bits) => {
                    for &bit in bits {
                        write!(f, "{}", u8::from(bit))?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_membership_respects_fixed_blocks() {
        let mut rho = BlockPartialAssignment::free(2, 2);
        assert!(rho.contains(&[vec![false, true], vec![true, true]]));
        rho.fix(0, vec![true, false]);
        assert!(rho.contains(&[vec![true, false], vec![false, false]]));
        assert!(!rho.contains(&[vec![false, false], vec![false, false]]));
        assert_eq!(rho.free_blocks(), vec![1]);
        assert_eq!(rho.fixed_blocks(), vec![0]);
        assert_eq!(rho.free_blocks().len() + rho.fixed_blocks().len(), 2);
        assert_eq!(rho.to_string(), "10 *");
    }

    #[test]
    fn partial_assignment_display_and_consistency() {
        let mut a = PartialAssignment::new(3);
        a.set(2, true);
        assert_eq!(a.to_string(), "*1*");
        assert!(a.consistent_with(&[false, true, false]));
        assert!(!a.consistent_with(&[false, false, false]));
    }
}
