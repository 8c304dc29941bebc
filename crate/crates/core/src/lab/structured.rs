//! Product boxes `X × ∏_{ij} Y^{ij}`, structure predicates and good selectors.
//!
//! Text form:
//!
//! ```text
//! box n 1 ell 1 m 4
//! x 0
//! x 2
//! y 0 0 0110
//! ```
//!
//! `x` lines list 0-based selector symbols per block; `y i j bits` adds a row
//! to `Y^{ij}` with column 0 first.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dist::{set_blockwise, set_deficiency};
use super::{syntax, LabError, LabReport, Quantity, Real};
use crate::formula::BlockPartialAssignment;

/// Largest row length for which full rows are enumerated.
pub const MAX_ROW_BITS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBox {
    m: usize,
    ell: usize,
    n: usize,
    x: Vec<Vec<usize>>,
    y: Vec<Vec<Vec<u64>>>,
}

/// Thresholds of the structure conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureThresholds {
    /// Free blocks need blockwise min-entropy `≥ entropy_frac · log m`.
    pub entropy_frac: BigRational,
    /// Free rows need deficiency `≤ defect_bound`.
    pub defect_bound: Real,
}

impl StructureThresholds {
    /// `0.9` and `√m`.
    pub fn standard(m: usize) -> Self {
        StructureThresholds {
            entropy_frac: BigRational::new(BigInt::from(9), BigInt::from(10)),
            defect_bound: Real::root(BigRational::from_integer(BigInt::from(m)), 2),
        }
    }

    pub fn new(entropy_frac: BigRational, defect_bound: Real) -> Self {
        StructureThresholds { entropy_frac, defect_bound }
    }
}

/// The result of a good-selector search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSelector {
    pub x: Vec<usize>,
    /// `1 − Σ_{ij} fixed(Y^{ij}) · max Pr[x_i]` over free blocks.
    pub slack: BigRational,
}

fn log_m(m: usize) -> Real {
    Real::log2(BigRational::from_integer(BigInt::from(m)))
}

/// Which outputs `{0,1}` a row set can produce at column `c`.
fn outputs(rows: &[u64], c: usize) -> (bool, bool) {
    let ones = rows.iter().filter(|&&r| r >> c & 1 == 1).count();
    (ones < rows.len(), ones > 0)
}

impl ProductBox {
    /// `x[k]` is a selector tuple of length `n`; `y[i][j]` lists rows of `Y^{ij}`.
    pub fn new(m: usize, ell: usize, x: Vec<Vec<usize>>, y: Vec<Vec<Vec<u64>>>) -> Result<Self, LabError> {
        if m == 0 || m > 64 || ell == 0 {
            return Err(LabError::DimensionMismatch(format!("need 1 <= m <= 64 and ell >= 1, got m={m} ell={ell}")));
        }
        let n = y.len();
        let mut x = x;
        x.sort();
        x.dedup();
        if x.is_empty() {
            return Err(LabError::EmptyComponent("X".into()));
        }
        if let Some(p) = x.iter().find(|p| p.len() != n || p.iter().any(|&v| v >= m)) {
            return Err(LabError::DimensionMismatch(format!("selector tuple {p:?} outside [{m}]^{n}")));
        }
        let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let mut y = y;
        for (i, block) in y.iter_mut().enumerate() {
            if block.len() != ell {
                return Err(LabError::DimensionMismatch(format!("block {i} has {} rows, expected {ell}", block.len())));
            }
            for (j, rows) in block.iter_mut().enumerate() {
                rows.sort_unstable();
                rows.dedup();
                if rows.is_empty() {
                    return Err(LabError::EmptyComponent(format!("Y^({i},{j})")));
                }
                if rows.iter().any(|&r| r & !mask != 0) {
                    return Err(LabError::DimensionMismatch(format!("row of Y^({i},{j}) wider than {m} bits")));
                }
            }
        }
        Ok(ProductBox { m, ell, n, x, y })
    }

    /// `[m]^n × ∏ {0,1}^m`.
    pub fn full(m: usize, ell: usize, n: usize) -> Result<Self, LabError> {
        if m > MAX_ROW_BITS {
            return Err(LabError::TooLarge { what: "full row set", size: m, limit: MAX_ROW_BITS });
        }
        let mut x = vec![vec![]];
        for _ in 0..n {
            x = x.into_iter().flat_map(|p: Vec<usize>| (0..m).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        let rows: Vec<u64> = (0..1u64 << m).collect();
        ProductBox::new(m, ell, x, vec![vec![rows; ell]; n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn blocks(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &[Vec<usize>] {
        &self.x
    }

    pub fn rows(&self, i: usize, j: usize) -> &[u64] {
        &self.y[i][j]
    }

    /// The same rows with `X` replaced.
    pub fn with_x(&self, x: Vec<Vec<usize>>) -> Result<Self, LabError> {
        ProductBox::new(self.m, self.ell, x, self.y.clone())
    }

    /// Number of columns constant across `Y^{ij}`.
    pub fn fixed_bits(&self, i: usize, j: usize) -> usize {
        (0..self.m).filter(|&c| !matches!(outputs(&self.y[i][j], c), (true, true))).count()
    }

    fn check_rho(&self, rho: &BlockPartialAssignment) -> Result<(), LabError> {
        if rho.block_count() != self.n || rho.block_size() != self.ell {
            return Err(LabError::DimensionMismatch(format!(
                "rho has {} blocks of size {}, box has {} of size {}",
                rho.block_count(),
                rho.block_size(),
                self.n,
                self.ell
            )));
        }
        Ok(())
    }

    /// The three structure conditions, each measured exactly.
    pub fn is_rho_structured(&self, rho: &BlockPartialAssignment, th: &StructureThresholds) -> Result<LabReport, LabError> {
        self.check_rho(rho)?;
        let mut report = LabReport::default();
        let mut violations = 0;
        for i in rho.fixed_blocks() {
            let want = rho.get(i).expect("fixed block");
            let selectors: HashSet<usize> = self.x.iter().map(|p| p[i]).collect();
            for (j, &bit) in want.iter().enumerate() {
                if selectors.iter().any(|&c| outputs(&self.y[i][j], c) != (!bit, bit)) {
                    violations += 1;
                }
            }
        }
        report.at_most("gadgets_fixed", Quantity::count(violations), Quantity::count(0));

        let free = rho.free_blocks();
        let projected: Vec<Vec<usize>> = self.x.iter().map(|p| free.iter().map(|&i| p[i]).collect()).collect();
        let measured = match set_blockwise(&projected, free.len())? {
            Some(b) => Quantity::Finite(b.value),
            None => Quantity::Infinite,
        };
        let threshold = Real::Rat(th.entropy_frac.clone()) * log_m(self.m);
        report.at_least("free_blockwise_entropy", measured, Quantity::Finite(threshold));

        let domain = BigInt::one() << self.m;
        let worst = free
            .iter()
            .flat_map(|&i| (0..self.ell).map(move |j| (i, j)))
            .map(|(i, j)| set_deficiency(self.y[i][j].len(), domain.clone()))
            .max_by(|a, b| a.compare(b))
            .unwrap_or_else(|| Real::int(0));
        report.at_most("row_deficiency", Quantity::Finite(worst), Quantity::Finite(th.defect_bound.clone()));
        Ok(report)
    }

    /// Gadget outputs of `{x} × ∏ Y^{ij}` as `nℓ`-bit masks, bit `i·ℓ + j`.
    fn slice_image(&self, x: &[usize], into: &mut HashSet<u64>) {
        let mut acc = vec![0u64];
        for i in 0..self.n {
            for j in 0..self.ell {
                let bit = 1u64 << (i * self.ell + j);
                let (zero, one) = outputs(&self.y[i][j], x[i]);
                acc = acc
                    .into_iter()
                    .flat_map(|z| {
                        let mut v = Vec::with_capacity(2);
                        if zero {
                            v.push(z);
                        }
                        if one {
                            v.push(z | bit);
                        }
                        v
                    })
                    .collect();
            }
        }
        into.extend(acc);
    }

    /// `Ind(R) = Cube(ρ)` exactly.
    pub fn is_rho_like(&self, rho: &BlockPartialAssignment) -> Result<bool, LabError> {
        self.check_rho(rho)?;
        let mut image = HashSet::new();
        for x in &self.x {
            self.slice_image(x, &mut image);
        }
        Ok(image_is_cube(&image, rho))
    }

    /// Searches `X` in order for a selector good for every free row, after
    /// checking structure and the union-bound feasibility at the measured
    /// quantities. The returned slice is re-verified to be `ρ`-like.
    pub fn find_good_x(&self, rho: &BlockPartialAssignment, th: &StructureThresholds) -> Result<GoodSelector, LabError> {
        let report = self.is_rho_structured(rho, th)?;
        if !report.pass() {
            return Err(LabError::NotStructured(report));
        }
        let mut sum = BigRational::zero();
        let total = BigInt::from(self.x.len());
        for i in rho.free_blocks() {
            let mut counts = vec![0usize; self.m];
            for p in &self.x {
                counts[p[i]] += 1;
            }
            let pmax = BigRational::new(BigInt::from(*counts.iter().max().unwrap()), total.clone());
            let fixed: usize = (0..self.ell).map(|j| self.fixed_bits(i, j)).sum();
            sum += pmax * BigRational::from_integer(BigInt::from(fixed));
        }
        let slack = BigRational::one() - sum;
        if !slack.is_positive() {
            return Err(LabError::Infeasible { slack: crate::proof::protocol::format_rational(&slack) });
        }
        let free = rho.free_blocks();
        let good = self.x.iter().find(|p| {
            free.iter().all(|&i| (0..self.ell).all(|j| outputs(&self.y[i][j], p[i]) == (true, true)))
        });
        let x = good.ok_or(LabError::NoGoodSelector)?.clone();
        if !self.with_x(vec![x.clone()])?.is_rho_like(rho)? {
            return Err(LabError::NoGoodSelector);
        }
        Ok(GoodSelector { x, slack })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("box n {} ell {} m {}\n", self.n, self.ell, self.m);
        for p in &self.x {
            let v: Vec<String> = p.iter().map(usize::to_string).collect();
            out.push_str(&format!("x {}\n", v.join(" ")));
        }
        for (i, block) in self.y.iter().enumerate() {
            for (j, rows) in block.iter().enumerate() {
                for &r in rows {
                    let bits: String = (0..self.m).map(|c| if r >> c & 1 == 1 { '1' } else { '0' }).collect();
                    out.push_str(&format!("y {i} {j} {bits}\n"));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut dims: Option<(usize, usize, usize)> = None;
        let mut x = Vec::new();
        let mut y: Vec<Vec<Vec<u64>>> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let ln = k + 1;
            let t: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(ln, format!("bad number `{s}`")));
            match t.first() {
                None | Some(&"c") => {}
                Some(&"box") => {
                    if t.len() != 7 || t[1] != "n" || t[3] != "ell" || t[5] != "m" {
                        return Err(syntax(ln, "expected `box n <n> ell <ell> m <m>`"));
                    }
                    let (n, ell, m) = (num(t[2])?, num(t[4])?, num(t[6])?);
                    dims = Some((n, ell, m));
                    y = vec![vec![Vec::new(); ell]; n];
                }
                Some(&"x") => {
                    let (n, _, _) = dims.ok_or_else(|| syntax(ln, "`x` before `box`"))?;
                    if t.len() != n + 1 {
                        return Err(syntax(ln, format!("expected {n} selectors")));
                    }
                    x.push(t[1..].iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?);
                }
                Some(&"y") => {
                    let (n, ell, m) = dims.ok_or_else(|| syntax(ln, "`y` before `box`"))?;
                    if t.len() != 4 {
                        return Err(syntax(ln, "expected `y <i> <j> <bits>`"));
                    }
                    let (i, j) = (num(t[1])?, num(t[2])?);
                    if i >= n || j >= ell || t[3].len() != m {
                        return Err(syntax(ln, "row index or width out of range"));
                    }
                    let mut r = 0u64;
                    for (c, ch) in t[3].chars().enumerate() {
                        match ch {
                            '0' => {}
                            '1' => r |= 1 << c,
                            _ => return Err(syntax(ln, "row bits must be 0 or 1")),
                        }
                    }
                    y[i][j].push(r);
                }
                Some(other) => return Err(syntax(ln, format!("unknown declaration `{other}`"))),
            }
        }
        let (_, ell, m) = dims.ok_or_else(|| syntax(0, "missing `box` header"))?;
        ProductBox::new(m, ell, x, y)
    }
}

/// Image equality with `Cube(ρ)` for masks with bit `i·ℓ + j`.
fn image_is_cube(image: &HashSet<u64>, rho: &BlockPartialAssignment) -> bool {
    let ell = rho.block_size();
    let mut fixed_mask = 0u64;
    let mut fixed_val = 0u64;
    for i in rho.fixed_blocks() {
        for (j, &b) in rho.get(i).unwrap().iter().enumerate() {
            fixed_mask |= 1 << (i * ell + j);
            if b {
                fixed_val |= 1 << (i * ell + j);
            }
        }
    }
    image.iter().all(|&z| z & fixed_mask == fixed_val) && image.len() as u64 == 1u64 << rho.cube_size_log2()
}

/// `ρ`-likeness of an arbitrary explicit set of composed points
/// `(x, y)` with `y[i][j]` a row.
pub fn is_rho_like_set(
    points: &[(Vec<usize>, Vec<Vec<u64>>)],
    rho: &BlockPartialAssignment,
) -> bool {
    let ell = rho.block_size();
    let image: HashSet<u64> = points
        .iter()
        .map(|(x, y)| {
            let mut z = 0u64;
            for (i, xi) in x.iter().enumerate() {
                for j in 0..ell {
                    if y[i][j] >> xi & 1 == 1 {
                        z |= 1 << (i * ell + j);
                    }
                }
            }
            z
        })
        .collect();
    image_is_cube(&image, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_with(m: usize, pred: impl Fn(u64) -> bool) -> Vec<u64> {
        (0..1u64 << m).filter(|&r| pred(r)).collect()
    }

    #[test]
    fn full_box_is_structured_and_like() {
        let b = ProductBox::full(4, 1, 2).unwrap();
        let rho = BlockPartialAssignment::free(2, 1);
        let r = b.is_rho_structured(&rho, &StructureThresholds::standard(4)).unwrap();
        assert!(r.pass(), "{r}");
        assert!(b.is_rho_like(&rho).unwrap());
        let g = b.find_good_x(&rho, &StructureThresholds::standard(4)).unwrap();
        assert_eq!(g.x, vec![0, 0]);
    }

    #[test]
    fn fixed_selector_fails_entropy() {
        let b = ProductBox::new(4, 1, vec![vec![2]], vec![vec![rows_with(4, |_| true)]]).unwrap();
        let r = b.is_rho_structured(&BlockPartialAssignment::free(1, 1), &StructureThresholds::standard(4)).unwrap();
        assert!(!r.get("free_blockwise_entropy").unwrap().pass);
        assert!(r.get("gadgets_fixed").unwrap().pass);
    }

    #[test]
    fn half_rows_have_deficiency_one() {
        let x = (0..4).map(|v| vec![v]).collect();
        let b = ProductBox::new(4, 1, x, vec![vec![rows_with(4, |r| r & 1 == 0)]]).unwrap();
        let r = b.is_rho_structured(&BlockPartialAssignment::free(1, 1), &StructureThresholds::standard(4)).unwrap();
        let c = r.get("row_deficiency").unwrap();
        assert_eq!(c.measured, Quantity::count(1));
        assert_eq!(c.threshold.to_string(), "2");
        assert!(c.pass);
    }

    #[test]
    fn good_selector_avoids_fixed_column() {
        let th = StructureThresholds::new(BigRational::new(1.into(), 2.into()), Real::int(1));
        let b = ProductBox::new(4, 1, vec![vec![0], vec![2], vec![3]], vec![vec![rows_with(4, |r| r & 1 == 0)]]).unwrap();
        let g = b.find_good_x(&BlockPartialAssignment::free(1, 1), &th).unwrap();
        assert_eq!(g.x, vec![2]);
        assert_eq!(g.slack, BigRational::new(2.into(), 3.into()));
        let point = ProductBox::new(4, 1, vec![vec![0], vec![1], vec![2], vec![3]], vec![vec![vec![5]]]).unwrap();
        let loose = StructureThresholds::new(BigRational::new(1.into(), 2.into()), Real::int(4));
        assert!(matches!(point.find_good_x(&BlockPartialAssignment::free(1, 1), &loose), Err(LabError::Infeasible { .. })));
    }

    #[test]
    fn box_image_matches_explicit_enumeration() {
        let b = ProductBox::new(2, 1, vec![vec![0, 1]], vec![vec![vec![1, 3]], vec![vec![0, 2]]]).unwrap();
        let mut pts = Vec::new();
        for x in b.x() {
            for &r0 in b.rows(0, 0) {
                for &r1 in b.rows(1, 0) {
                    pts.push((x.clone(), vec![vec![r0], vec![r1]]));
                }
            }
        }
        let mut rho = BlockPartialAssignment::free(2, 1);
        rho.fix(0, vec![true]);
        assert_eq!(b.is_rho_like(&rho).unwrap(), is_rho_like_set(&pts, &rho));
        assert!(b.is_rho_like(&rho).unwrap());
        assert!(!b.is_rho_like(&BlockPartialAssignment::free(2, 1)).unwrap());
        assert_eq!(ProductBox::parse(&b.to_text()).unwrap(), b);
    }
}
