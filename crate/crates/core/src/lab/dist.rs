//! Finite distributions over named product domains with exact probabilities.
//!
//! Text form, one declaration per line:
//!
//! ```text
//! c comment
//! coord x1 4
//! coord x2 4
//! p 0 1 1/2
//! p 2 3 1/2
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{syntax, LabError, Real};
use crate::proof::protocol::{format_rational, parse_rational};

/// Largest coordinate count for subset enumeration.
pub const MAX_BLOCKWISE_COORDS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub name: String,
    pub alphabet: usize,
}

impl Coordinate {
    pub fn new(name: impl Into<String>, alphabet: usize) -> Self {
        Coordinate { name: name.into(), alphabet }
    }

    /// `k` coordinates `prefix1..prefixk` over the same alphabet.
    pub fn uniform_family(prefix: &str, k: usize, alphabet: usize) -> Vec<Coordinate> {
        (1..=k).map(|i| Coordinate::new(format!("{prefix}{i}"), alphabet)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDistribution {
    coords: Vec<Coordinate>,
    /// Sorted by point; every probability positive.
    support: Vec<(Vec<usize>, BigRational)>,
}

/// The minimizing marginal of blockwise min-entropy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blockwise {
    /// `(1/|S|) · log2(1 / max_prob)`.
    pub value: Real,
    pub subset: Vec<usize>,
    pub max_prob: BigRational,
}

/// Minimizes `log2(1/p_S)/|S|` over nonempty `S ⊆ [k]`, i.e. maximizes
/// `p_S^(1/|S|)`; ties go to the first subset in bitmask order.
pub(crate) fn best_subset(k: usize, mut pmax: impl FnMut(&[usize]) -> BigRational) -> Option<Blockwise> {
    let mut best: Option<(Vec<usize>, BigRational)> = None;
    for mask in 1u32..1 << k {
        let s: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let p = pmax(&s);
        let better = match &best {
            None => true,
            Some((bs, bp)) => num_traits::pow(p.clone(), bs.len()) > num_traits::pow(bp.clone(), s.len()),
        };
        if better {
            best = Some((s, p));
        }
    }
    best.map(|(subset, max_prob)| Blockwise {
        value: Real::ratio(1, subset.len() as i64) * Real::log2(max_prob.recip()),
        subset,
        max_prob,
    })
}

/// Projection counts of `points` onto `coords`.
pub(crate) fn projection_counts(points: &[Vec<usize>], coords: &[usize]) -> HashMap<Vec<usize>, usize> {
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for p in points {
        *counts.entry(coords.iter().map(|&c| p[c]).collect()).or_default() += 1;
    }
    counts
}

/// Blockwise min-entropy of the uniform distribution on a nonempty point set.
pub fn set_blockwise(points: &[Vec<usize>], k: usize) -> Result<Option<Blockwise>, LabError> {
    check_coords(k)?;
    let total = BigInt::from(points.len());
    Ok(best_subset(k, |s| {
        let c = projection_counts(points, s).into_values().max().unwrap_or(0);
        BigRational::new(BigInt::from(c), total.clone())
    }))
}

/// Deficiency of the uniform distribution on `count` distinct points of a
/// domain of size `domain`: `log2(domain / count)`.
pub fn set_deficiency(count: usize, domain: BigInt) -> Real {
    Real::log2(BigRational::new(domain, BigInt::from(count)))
}

/// Deficiency of the uniform distribution on `points` marginalized to
/// `coords`, each coordinate with alphabet `alphabet`.
pub fn projected_deficiency(points: &[Vec<usize>], coords: &[usize], alphabet: usize) -> Real {
    let c = projection_counts(points, coords).into_values().max().unwrap_or(0);
    let domain = num_traits::pow(BigInt::from(alphabet), coords.len());
    Real::log2(BigRational::new(domain * BigInt::from(c), BigInt::from(points.len())))
}

fn check_coords(k: usize) -> Result<(), LabError> {
    if k > MAX_BLOCKWISE_COORDS {
        return Err(LabError::TooLarge { what: "blockwise min-entropy", size: k, limit: MAX_BLOCKWISE_COORDS });
    }
    Ok(())
}

impl FiniteDistribution {
    pub fn new(coords: Vec<Coordinate>, support: Vec<(Vec<usize>, BigRational)>) -> Result<Self, LabError> {
        let bad = |msg: String| Err(LabError::InvalidDistribution(msg));
        if let Some(c) = coords.iter().find(|c| c.alphabet == 0) {
            return bad(format!("coordinate {} has an empty alphabet", c.name));
        }
        let mut merged: Vec<(Vec<usize>, BigRational)> = Vec::with_capacity(support.len());
        let mut total = BigRational::zero();
        for (p, q) in support {
            if p.len() != coords.len() {
                return bad(format!("point of length {} in a {}-coordinate domain", p.len(), coords.len()));
            }
            if let Some((i, v)) = p.iter().enumerate().find(|&(i, &v)| v >= coords[i].alphabet) {
                return bad(format!("value {v} outside the alphabet of {}", coords[i].name));
            }
            if q.is_negative() {
                return bad(format!("negative probability {}", format_rational(&q)));
            }
            total += &q;
            if !q.is_zero() {
                merged.push((p, q));
            }
        }
        if total != BigRational::one() {
            return bad(format!("probabilities sum to {}", format_rational(&total)));
        }
        merged.sort();
        if merged.windows(2).any(|w| w[0].0 == w[1].0) {
            return bad("repeated support point".into());
        }
        Ok(FiniteDistribution { coords, support: merged })
    }

    /// Uniform over the distinct points of a nonempty list.
    pub fn uniform(coords: Vec<Coordinate>, points: &[Vec<usize>]) -> Result<Self, LabError> {
        let mut pts = points.to_vec();
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Err(LabError::InvalidDistribution("empty support".into()));
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(pts.len()));
        FiniteDistribution::new(coords, pts.into_iter().map(|x| (x, p.clone())).collect())
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn support(&self) -> &[(Vec<usize>, BigRational)] {
        &self.support
    }

    pub fn prob(&self, point: &[usize]) -> BigRational {
        self.support
            .binary_search_by(|(p, _)| p.as_slice().cmp(point))
            .map_or_else(|_| BigRational::zero(), |i| self.support[i].1.clone())
    }

    pub fn domain_size(&self) -> BigInt {
        self.coords.iter().map(|c| BigInt::from(c.alphabet)).product()
    }

    pub fn max_prob(&self) -> BigRational {
        self.support.iter().map(|(_, q)| q.clone()).max().expect("support is nonempty")
    }

    /// Marginal on `coords` in the given order.
    pub fn marginal(&self, coords: &[usize]) -> FiniteDistribution {
        let mut acc: HashMap<Vec<usize>, BigRational> = HashMap::new();
        for (p, q) in &self.support {
            *acc.entry(coords.iter().map(|&c| p[c]).collect()).or_insert_with(BigRational::zero) += q;
        }
        let mut support: Vec<_> = acc.into_iter().collect();
        support.sort();
        FiniteDistribution { coords: coords.iter().map(|&c| self.coords[c].clone()).collect(), support }
    }

    fn marginal_max(&self, coords: &[usize]) -> BigRational {
        self.marginal(coords).max_prob()
    }

    /// `H∞ = log2(1 / max_x Pr[x])`.
    pub fn min_entropy(&self) -> Real {
        Real::log2(self.max_prob().recip())
    }

    /// `min_{∅≠S} H∞(x_S)/|S|`; `None` for a distribution with no coordinates.
    pub fn blockwise_min_entropy(&self) -> Result<Option<Blockwise>, LabError> {
        check_coords(self.arity())?;
        Ok(best_subset(self.arity(), |s| self.marginal_max(s)))
    }

    /// `D∞ = log2 |domain| − H∞ = log2(|domain| · max Pr)`.
    pub fn deficiency(&self) -> Real {
        Real::log2(BigRational::from_integer(self.domain_size()) * self.max_prob())
    }

    /// Least `ε` with `Pr[x] = (1 ± ε)/|S|` on all of `target`; `None` (infinite)
    /// when the support is not exactly `target`.
    pub fn multiplicative_uniformity(&self, target: &[Vec<usize>]) -> Option<BigRational> {
        let mut s = target.to_vec();
        s.sort();
        s.dedup();
        if s.len() != self.support.len() || self.support.iter().zip(&s).any(|((p, _), t)| p != t) {
            return None;
        }
        let size = BigRational::from_integer(BigInt::from(s.len()));
        self.support.iter().map(|(_, q)| (q * &size - BigRational::one()).abs()).max()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.coords {
            out.push_str(&format!("coord {} {}\n", c.name, c.alphabet));
        }
        for (p, q) in &self.support {
            let vals: Vec<String> = p.iter().map(usize::to_string).collect();
            out.push_str(&format!("p {}{}{}\n", vals.join(" "), if vals.is_empty() { "" } else { " " }, format_rational(q)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut coords = Vec::new();
        let mut support = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                None | Some(&"c") => {}
                Some(&"coord") => {
                    if toks.len() != 3 || !support.is_empty() {
                        return Err(syntax(n, "expected `coord <name> <alphabet>` before any `p` line"));
                    }
                    let a = toks[2].parse().map_err(|_| syntax(n, "bad alphabet size"))?;
                    coords.push(Coordinate::new(toks[1], a));
                }
                Some(&"p") => {
                    if toks.len() != coords.len() + 2 {
                        return Err(syntax(n, format!("expected {} values and a probability", coords.len())));
                    }
                    let point = toks[1..toks.len() - 1]
                        .iter()
                        .map(|t| t.parse().map_err(|_| syntax(n, format!("bad value `{t}`"))))
                        .collect::<Result<Vec<usize>, _>>()?;
                    let q = parse_rational(toks[toks.len() - 1]).map_err(|e| syntax(n, e.to_string()))?;
                    support.push((point, q));
                }
                Some(t) => return Err(syntax(n, format!("unknown declaration `{t}`"))),
            }
        }
        FiniteDistribution::new(coords, support)
    }
}

#[cfg(test)]
mod tests {
    use std::cmp::Ordering;

    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    fn grid(k: usize, a: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            out = out.into_iter().flat_map(|p| (0..a).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        out
    }

    #[test]
    fn min_entropy_examples() {
        let u = FiniteDistribution::uniform(Coordinate::uniform_family("b", 3, 2), &grid(3, 2)).unwrap();
        assert_eq!(u.min_entropy().constant_value(), Some(q(3, 1)));
        assert_eq!(u.deficiency().constant_value(), Some(q(0, 1)));
        let point = FiniteDistribution::uniform(Coordinate::uniform_family("b", 3, 2), &[vec![0, 1, 0]]).unwrap();
        assert_eq!(point.min_entropy().constant_value(), Some(q(0, 1)));
        assert_eq!(point.deficiency().constant_value(), Some(q(3, 1)));
        let skew = FiniteDistribution::new(
            vec![Coordinate::new("v", 3)],
            vec![(vec![0], q(1, 2)), (vec![1], q(1, 4)), (vec![2], q(1, 4))],
        )
        .unwrap();
        assert_eq!(skew.min_entropy().constant_value(), Some(q(1, 1)));
    }

    #[test]
    fn blockwise_examples() {
        let full = FiniteDistribution::uniform(Coordinate::uniform_family("x", 2, 4), &grid(2, 4)).unwrap();
        assert_eq!(full.blockwise_min_entropy().unwrap().unwrap().value.compare(&Real::int(2)), Ordering::Equal);
        let fixed = FiniteDistribution::uniform(Coordinate::uniform_family("x", 2, 4), &[vec![0, 1], vec![0, 2]]).unwrap();
        assert_eq!(fixed.blockwise_min_entropy().unwrap().unwrap().value.constant_value(), Some(q(0, 1)));
        // {(1,1),(1,2),(2,1)}: each single marginal has max 2/3, the pair 1/3.
        let three = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
        let d = FiniteDistribution::uniform(Coordinate::uniform_family("x", 2, 2), &three).unwrap();
        let b = d.blockwise_min_entropy().unwrap().unwrap();
        assert_eq!(b.subset, vec![0]);
        assert_eq!(b.max_prob, q(2, 3));
        let direct = set_blockwise(&three, 2).unwrap().unwrap();
        assert_eq!(direct, b);
    }

    #[test]
    fn multiplicative_uniformity_examples() {
        let pts = vec![vec![0], vec![1]];
        let u = FiniteDistribution::uniform(vec![Coordinate::new("z", 2)], &pts).unwrap();
        assert_eq!(u.multiplicative_uniformity(&pts), Some(q(0, 1)));
        let s = FiniteDistribution::new(vec![Coordinate::new("z", 2)], vec![(vec![0], q(3, 8)), (vec![1], q(5, 8))]).unwrap();
        assert_eq!(s.multiplicative_uniformity(&pts), Some(q(1, 4)));
        let p = FiniteDistribution::uniform(vec![Coordinate::new("z", 2)], &[vec![1]]).unwrap();
        assert_eq!(p.multiplicative_uniformity(&pts), None);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let d = FiniteDistribution::new(
            vec![Coordinate::new("a", 2), Coordinate::new("b", 3)],
            vec![(vec![0, 2], q(1, 3)), (vec![1, 0], q(2, 3))],
        )
        .unwrap();
        assert_eq!(FiniteDistribution::parse(&d.to_text()).unwrap(), d);
        assert!(FiniteDistribution::parse("coord a 2\np 0 1/2\n").is_err());
        assert!(FiniteDistribution::parse("coord a 2\np 2 1\n").is_err());
        assert!(FiniteDistribution::parse("coord a 2\np 0 1/2\np 0 1/2\n").is_err());
    }
}
