//! Blockwise min-entropy restoring partitions and megacoordinate filtering.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::dist::{projection_counts, set_blockwise};
use super::{subsets_by_size_desc, LabError, LabReport, Quantity, Real};

pub const MAX_PARTITION_COORDS: usize = 16;

/// One part `X^j = {x ∈ X_residual : x_I = α}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestoringPart {
    pub coords: Vec<usize>,
    pub alpha: Vec<usize>,
    pub points: Vec<Vec<usize>>,
    /// Size of the residual set when the part was selected.
    pub residual_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestoringPartition {
    pub m: usize,
    pub coord_count: usize,
    /// `θ` in bits.
    pub threshold: BigRational,
    pub parts: Vec<RestoringPart>,
}

/// `count/total > 2^{-θ·size}` for `θ = a/b`: `count^b · 2^{a·size} > total^b`.
pub(crate) fn violates(count: usize, total: usize, theta: &BigRational, size: usize) -> bool {
    let b = theta.denom().clone();
    let a = theta.numer().clone();
    let e: usize = b.try_into().expect("threshold denominator fits in usize");
    let shift: usize = (a * BigInt::from(size)).try_into().expect("threshold numerator is non-negative");
    num_traits::pow(BigInt::from(count), e) << shift > num_traits::pow(BigInt::from(total), e)
}

fn validate(points: &[Vec<usize>], m: usize, n: usize) -> Result<(), LabError> {
    if n > MAX_PARTITION_COORDS {
        return Err(LabError::TooLarge { what: "restoring partition", size: n, limit: MAX_PARTITION_COORDS });
    }
    if points.is_empty() {
        return Err(LabError::EmptyComponent("X".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != n || p.iter().any(|&v| v >= m)) {
        return Err(LabError::DimensionMismatch(format!("point {p:?} outside [{m}]^{n}")));
    }
    Ok(())
}

/// Repeatedly takes a largest `I` (lex first among equal sizes) with an
/// outcome `α` (lex first) such that `Pr[X_I = α] > 2^{-θ|I|}` over the
/// residual set, splits off `{x : x_I = α}`, and stops once the residual is
/// empty. When no nonempty `I` violates, the whole residual becomes a part
/// with `I = ∅`.
pub fn restore_partition(points: &[Vec<usize>], m: usize, n: usize, theta: &BigRational) -> Result<RestoringPartition, LabError> {
    validate(points, m, n)?;
    if theta < &BigRational::from_integer(0.into()) {
        return Err(LabError::DimensionMismatch("threshold must be non-negative".into()));
    }
    let mut residual = points.to_vec();
    residual.sort();
    residual.dedup();
    let subsets = subsets_by_size_desc(n);
    let mut parts = Vec::new();
    while !residual.is_empty() {
        let total = residual.len();
        let mut choice: Option<(Vec<usize>, Vec<usize>)> = None;
        for s in &subsets {
            let counts = projection_counts(&residual, s);
            let mut violating: Vec<&Vec<usize>> =
                counts.iter().filter(|(_, &c)| violates(c, total, theta, s.len())).map(|(a, _)| a).collect();
            violating.sort();
            if let Some(a) = violating.first() {
                choice = Some((s.clone(), (*a).clone()));
                break;
            }
        }
        let (coords, alpha) = choice.unwrap_or_default();
        let (inside, outside): (Vec<_>, Vec<_>) =
            residual.into_iter().partition(|p| coords.iter().zip(&alpha).all(|(&c, &v)| p[c] == v));
        parts.push(RestoringPart { coords, alpha, points: inside, residual_size: total });
        residual = outside;
    }
    Ok(RestoringPartition { m, coord_count: n, threshold: theta.clone(), parts })
}

impl RestoringPartition {
    /// Exhaustive check of disjointness, coverage, the selection rule and
    /// restored blockwise min-entropy off each `I_j`.
    pub fn check(&self, points: &[Vec<usize>]) -> LabReport {
        let mut report = LabReport::default();
        let mut all: Vec<Vec<usize>> = self.parts.iter().flat_map(|p| p.points.iter().cloned()).collect();
        let listed = all.len();
        all.sort();
        all.dedup();
        let mut want = points.to_vec();
        want.sort();
        want.dedup();
        report.at_most("parts_disjoint", Quantity::count(listed - all.len()), Quantity::count(0));
        let missing = want.iter().filter(|p| all.binary_search(p).is_err()).count()
            + all.iter().filter(|p| want.binary_search(p).is_err()).count();
        report.at_most("parts_cover", Quantity::count(missing), Quantity::count(0));

        let mut residual = want;
        let mut bad_selection = 0;
        let mut worst: Option<Real> = None;
        for part in &self.parts {
            let count = residual.iter().filter(|p| part.coords.iter().zip(&part.alpha).all(|(&c, &v)| p[c] == v)).count();
            let selected = part.coords.is_empty() || violates(count, residual.len(), &self.threshold, part.coords.len());
            if !selected || count != part.points.len() || residual.len() != part.residual_size {
                bad_selection += 1;
            }
            residual.retain(|p| part.points.binary_search(p).is_err());
            let rest: Vec<usize> = (0..self.coord_count).filter(|c| !part.coords.contains(c)).collect();
            let projected: Vec<Vec<usize>> = part.points.iter().map(|p| rest.iter().map(|&c| p[c]).collect()).collect();
            if let Ok(Some(b)) = set_blockwise(&projected, rest.len()) {
                if worst.as_ref().map_or(true, |w| b.value.compare(w).is_lt()) {
                    worst = Some(b.value);
                }
            }
        }
        report.at_most("selection_violates_threshold", Quantity::count(bad_selection), Quantity::count(0));
        let measured = worst.map_or(Quantity::Infinite, Quantity::Finite);
        report.at_least("restored_blockwise_entropy", measured, Quantity::rat(self.threshold.clone()));
        report
    }
}

/// A balanced map `h : [N] → [K]` with `|h⁻¹(k)| = N/K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MegaGrouping {
    map: Vec<usize>,
    groups: usize,
}

impl MegaGrouping {
    pub fn new(map: Vec<usize>, groups: usize) -> Result<Self, LabError> {
        let n = map.len();
        if groups == 0 || n % groups != 0 {
            return Err(LabError::Unbalanced(format!("{n} coordinates do not split into {groups} equal groups")));
        }
        let mut sizes = vec![0usize; groups];
        for &g in &map {
            if g >= groups {
                return Err(LabError::Unbalanced(format!("group {g} outside 0..{groups}")));
            }
            sizes[g] += 1;
        }
        if sizes.iter().any(|&s| s != n / groups) {
            return Err(LabError::Unbalanced(format!("group sizes {sizes:?}")));
        }
        Ok(MegaGrouping { map, groups })
    }

    pub fn group_of(&self, coord: usize) -> usize {
        self.map[coord]
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn group_size(&self) -> usize {
        self.map.len() / self.groups
    }

    pub fn coord_count(&self) -> usize {
        self.map.len()
    }

    /// Every balanced map on `n` coordinates into `groups` groups.
    pub fn all_balanced(n: usize, groups: usize) -> Vec<MegaGrouping> {
        fn go(i: usize, n: usize, cap: usize, sizes: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for g in 0..sizes.len() {
                if sizes[g] < cap {
                    sizes[g] += 1;
                    cur.push(g);
                    go(i + 1, n, cap, sizes, cur, out);
                    cur.pop();
                    sizes[g] -= 1;
                }
            }
        }
        if groups == 0 || n % groups != 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        go(0, n, n / groups, &mut vec![0; groups], &mut Vec::new(), &mut out);
        out.into_iter().map(|map| MegaGrouping { map, groups }).collect()
    }
}

/// Parts whose coordinates land in distinct megacoordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MegaFilter {
    pub kept_parts: Vec<usize>,
    pub points: Vec<Vec<usize>>,
    /// `|X_h| / |X|`.
    pub survival: BigRational,
}

pub fn mega_filter(partition: &RestoringPartition, h: &MegaGrouping) -> Result<MegaFilter, LabError> {
    if h.coord_count() != partition.coord_count {
        return Err(LabError::Unbalanced(format!(
            "grouping covers {} coordinates, partition has {}",
            h.coord_count(),
            partition.coord_count
        )));
    }
    let mut kept_parts = Vec::new();
    let mut points = Vec::new();
    let mut total = 0usize;
    for (j, part) in partition.parts.iter().enumerate() {
        total += part.points.len();
        let mut groups: Vec<usize> = part.coords.iter().map(|&c| h.group_of(c)).collect();
        groups.sort_unstable();
        groups.dedup();
        if groups.len() == part.coords.len() {
            kept_parts.push(j);
            points.extend(part.points.iter().cloned());
        }
    }
    let survival = if total == 0 { BigRational::one() } else { BigRational::new(points.len().into(), total.into()) };
    points.sort();
    Ok(MegaFilter { kept_parts, points, survival })
}
