//! Character expectations of the index function and the uniform-selector search.
//!
//! `Λ` ranges over `[ℓ]^k`; `Γ` over `({0,1}^ℓ)^k` with each coordinate an
//! `ℓ`-bit mask. A bit `b` is read as the sign `(−1)^b`, so
//! `χ_I(y_x) = Π_{i∈I} (−1)^{y_i[x_i]}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dist::{Blockwise, Coordinate, FiniteDistribution};
use super::{LabError, Real};
use crate::proof::protocol::format_rational;

/// Largest `ℓ·k` for exact summation.
pub const MAX_FOURIER_BITS: usize = 20;

fn shape(lambda: &FiniteDistribution, gamma: &FiniteDistribution) -> Result<(usize, usize), LabError> {
    let k = lambda.arity();
    let ell = lambda.coords().first().map_or(1, |c| c.alphabet);
    if lambda.coords().iter().any(|c| c.alphabet != ell) {
        return Err(LabError::DimensionMismatch("selector coordinates need one common alphabet".into()));
    }
    if ell * k > MAX_FOURIER_BITS {
        return Err(LabError::TooLarge { what: "character expectation", size: ell * k, limit: MAX_FOURIER_BITS });
    }
    if gamma.arity() != k || gamma.coords().iter().any(|c| c.alphabet != 1 << ell) {
        return Err(LabError::DimensionMismatch(format!("row distribution must have {k} coordinates over 2^{ell} masks")));
    }
    Ok((k, ell))
}

fn character(x: &[usize], y: &[usize], subset: &[usize]) -> bool {
    subset.iter().filter(|&&i| y[i] >> x[i] & 1 == 1).count() % 2 == 1
}

/// `E_{Λ,Γ}[χ_I(y_x)]` exactly.
pub fn character_expectation(lambda: &FiniteDistribution, gamma: &FiniteDistribution, subset: &[usize]) -> Result<BigRational, LabError> {
    let (k, _) = shape(lambda, gamma)?;
    if let Some(&i) = subset.iter().find(|&&i| i >= k) {
        return Err(LabError::DimensionMismatch(format!("coordinate {i} outside 0..{k}")));
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    let mut total = BigRational::zero();
    for (x, px) in lambda.support() {
        for (y, py) in gamma.support() {
            let term = px * py;
            if character(x, y, &s) {
                total -= term;
            } else {
                total += term;
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierCheck {
    pub expectation: BigRational,
    pub beta: Blockwise,
    pub deficiency: Real,
    /// `(2^{−β/2−1}(k+s))^{|I|}`.
    pub bound: Real,
    pub holds: bool,
    /// `bound − |E|`.
    pub slack: Real,
}

/// Compares `|E[χ_I]|` with `(2^{−β/2−1}(k+s))^{|I|}` where `β` is the
/// blockwise min-entropy of `Λ` and `s` the deficiency of `Γ`. Requires
/// `β > 1/2`.
pub fn check_fourier_bound(lambda: &FiniteDistribution, gamma: &FiniteDistribution, subset: &[usize]) -> Result<FourierCheck, LabError> {
    let (k, _) = shape(lambda, gamma)?;
    let expectation = character_expectation(lambda, gamma, subset)?;
    let beta = lambda.blockwise_min_entropy()?.ok_or_else(|| LabError::DimensionMismatch("no coordinates".into()))?;
    if beta.value.compare(&Real::ratio(1, 2)).is_le() {
        return Err(LabError::EntropyTooLow { beta: beta.value.render() });
    }
    let deficiency = gamma.deficiency();
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    // 2^{−β/2} = p_S^{1/(2|S|)} for the minimizing marginal S.
    let decay = Real::root(beta.max_prob.clone(), 2 * beta.subset.len() as u32);
    let base = Real::ratio(1, 2) * decay * (Real::int(k as i64) + deficiency.clone());
    let bound = base.pow(s.len() as u32);
    let abs = Real::Rat(expectation.abs());
    let holds = abs.compare(&bound).is_le();
    let slack = bound.clone() - abs;
    Ok(FourierCheck { expectation, beta, deficiency, bound, holds, slack })
}

/// One goodness test `|E_y[χ_I(y_x)]| ≤ k^{−c|I|}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessEntry {
    pub subset: Vec<usize>,
    pub bias: BigRational,
    pub bound: BigRational,
    pub good: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformSelector {
    pub x: Vec<usize>,
    pub epsilon: BigRational,
    pub certificate: Vec<GoodnessEntry>,
}

/// Distribution of `(y_i[x_i])_i` for `y ~ Γ`, as a distribution over `{0,1}^k`.
pub fn pointed_distribution(x: &[usize], gamma: &FiniteDistribution) -> FiniteDistribution {
    let k = x.len();
    let mut acc: std::collections::BTreeMap<Vec<usize>, BigRational> = std::collections::BTreeMap::new();
    for (y, p) in gamma.support() {
        let z: Vec<usize> = (0..k).map(|i| y[i] >> x[i] & 1).collect();
        *acc.entry(z).or_insert_with(BigRational::zero) += p;
    }
    FiniteDistribution::new(Coordinate::uniform_family("z", k, 2), acc.into_iter().collect())
        .expect("pushforward of a distribution is a distribution")
}

fn all_bits(k: usize) -> Vec<Vec<usize>> {
    (0..1usize << k).map(|v| (0..k).map(|i| v >> (k - 1 - i) & 1).collect()).collect()
}

/// Scans `supp(X)` in order for the first `x` whose pointed distribution is
/// `ε_target`-multiplicatively uniform, with the per-`I` goodness certificate
/// `|E_y[χ_I(y_x)]| ≤ k^{−c|I|}` (`c = goodness_coeff`).
pub fn find_uniform_selector(
    xdist: &FiniteDistribution,
    ydist: &FiniteDistribution,
    eps_target: &BigRational,
    goodness_coeff: u32,
) -> Result<UniformSelector, LabError> {
    let (k, _) = shape(xdist, ydist)?;
    let cube = all_bits(k);
    let mut best: Option<BigRational> = None;
    for (x, _) in xdist.support() {
        let eps = pointed_distribution(x, ydist).multiplicative_uniformity(&cube);
        if let Some(e) = &eps {
            if best.as_ref().map_or(true, |b| e < b) {
                best = Some(e.clone());
            }
        }
        if eps.as_ref().is_some_and(|e| e <= eps_target) {
            let point = FiniteDistribution::new(xdist.coords().to_vec(), vec![(x.clone(), BigRational::one())])
                .expect("point mass");
            let mut certificate = Vec::new();
            for mask in 1usize..1 << k {
                let subset: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
                let bias = character_expectation(&point, ydist, &subset)?.abs();
                let bound = num_traits::pow(BigRational::from_integer(BigInt::from(k)), goodness_coeff as usize * subset.len())
                    .recip();
                let good = bias <= bound;
                certificate.push(GoodnessEntry { subset, bias, bound, good });
            }
            return Ok(UniformSelector { x: x.clone(), epsilon: eps.unwrap(), certificate });
        }
    }
    Err(LabError::NoUniformSelector { best: best.map_or("inf".into(), |b| format_rational(&b)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn uniform_rows(k: usize, ell: usize) -> FiniteDistribution {
        let mut pts = vec![vec![]];
        for _ in 0..k {
            pts = pts.into_iter().flat_map(|p: Vec<usize>| (0..1usize << ell).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        FiniteDistribution::uniform(Coordinate::uniform_family("y", k, 1 << ell), &pts).unwrap()
    }

    fn selectors(pts: &[Vec<usize>]) -> FiniteDistribution {
        FiniteDistribution::uniform(Coordinate::uniform_family("x", pts[0].len(), 2), pts).unwrap()
    }

    #[test]
    fn empty_character_and_uniform_rows() {
        let l = selectors(&[vec![0, 1]]);
        let g = uniform_rows(2, 2);
        assert_eq!(character_expectation(&l, &g, &[]).unwrap(), q(1, 1));
        assert_eq!(character_expectation(&l, &g, &[0]).unwrap(), q(0, 1));
        assert_eq!(character_expectation(&l, &g, &[0, 1]).unwrap(), q(0, 1));
    }

    #[test]
    fn crafted_expectation() {
        // Λ uniform on {(0,0),(1,1)}; Γ a point mass on masks (0b01, 0b11).
        let l = selectors(&[vec![0, 0], vec![1, 1]]);
        let g = FiniteDistribution::uniform(Coordinate::uniform_family("y", 2, 4), &[vec![1, 3]]).unwrap();
        // x=(0,0): bits (1,1) → χ = +1; x=(1,1): bits (0,1) → χ = −1.
        assert_eq!(character_expectation(&l, &g, &[0, 1]).unwrap(), q(0, 1));
        assert_eq!(character_expectation(&l, &g, &[1]).unwrap(), q(-1, 1));
        assert_eq!(character_expectation(&l, &g, &[0]).unwrap(), q(0, 1));
    }

    #[test]
    fn fourier_bound_examples() {
        let full = selectors(&[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let c = check_fourier_bound(&full, &uniform_rows(2, 2), &[0, 1]).unwrap();
        assert!(c.holds);
        assert_eq!(c.expectation, q(0, 1));
        let e = check_fourier_bound(&full, &uniform_rows(2, 2), &[]).unwrap();
        assert!(e.holds);
        assert_eq!(e.bound.constant_value(), Some(q(1, 1)));
        let low = selectors(&[vec![0, 0]]);
        assert!(matches!(check_fourier_bound(&low, &uniform_rows(2, 2), &[0]), Err(LabError::EntropyTooLow { .. })));
    }

    #[test]
    fn uniform_selector_examples() {
        let xs = selectors(&[vec![0, 1], vec![1, 0]]);
        let s = find_uniform_selector(&xs, &uniform_rows(2, 2), &q(0, 1), 10).unwrap();
        assert_eq!(s.x, vec![0, 1]);
        assert!(s.certificate.iter().all(|c| c.good));
        let point = FiniteDistribution::uniform(Coordinate::uniform_family("y", 2, 4), &[vec![1, 2]]).unwrap();
        assert!(matches!(find_uniform_selector(&xs, &point, &q(99, 100), 10), Err(LabError::NoUniformSelector { .. })));
    }
}
