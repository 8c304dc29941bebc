//! Constructive round step: fix a few selector coordinates and their rows so
//! the gadget output on them is a prescribed `z_I`, while the free part keeps
//! high blockwise min-entropy and bounded deficiency.
//!
//! `Y ⊆ ({0,1}^m)^N` is packed into `u64`: row `i` occupies bits
//! `[i·m, (i+1)·m)`, column `c` of row `i` is bit `i·m + c`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dist::{set_blockwise, set_deficiency};
use super::partition::{restore_partition, RestoringPartition};
use super::{LabError, LabReport, Quantity, Real};
use crate::proof::protocol::format_rational;

pub const MAX_ROUND_COORDS: usize = 8;
pub const MAX_ROUND_M: usize = 8;

/// Constants of the round conditions; all in units of `log m` where noted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundThresholds {
    /// Required blockwise min-entropy of `X`, as a fraction of `log m`.
    pub pre_frac: BigRational,
    /// Restoring threshold `θ`, as a fraction of `log m`.
    pub restore_frac: BigRational,
    /// Required deficiency drop per fixed coordinate, as a fraction of `log m`.
    pub c_frac: BigRational,
    /// Additive slack of the deficiency drop.
    pub c_const: BigRational,
    /// Allowed row-deficiency growth per fixed coordinate.
    pub d_coeff: BigRational,
    pub d_const: BigRational,
    /// Optional precondition `D∞(Y) ≤ bound`.
    pub y_deficiency_bound: Option<BigRational>,
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

impl Default for RoundThresholds {
    fn default() -> Self {
        RoundThresholds {
            pre_frac: q(9, 10),
            restore_frac: q(19, 20),
            c_frac: q(1, 10),
            c_const: q(1, 1),
            d_coeff: q(1, 1),
            d_const: q(1, 1),
            y_deficiency_bound: None,
        }
    }
}

impl RoundThresholds {
    /// Regime for micro simulations: no entropy precondition, `θ = log m / 2`.
    pub fn micro() -> Self {
        RoundThresholds { pre_frac: q(0, 1), restore_frac: q(1, 2), ..Self::default() }
    }
}

/// One `z_I` branch: `R′ = X′ × Y′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundBranch {
    pub z: Vec<bool>,
    /// Common rows `y_I` of `Y′`.
    pub rows: Vec<u64>,
    pub x: Vec<Vec<usize>>,
    pub y: Vec<u64>,
    pub report: LabReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    pub coords: Vec<usize>,
    pub alpha: Vec<usize>,
    pub part_index: usize,
    /// Multiplicative uniformity of `(y_i[α_i])_{i∈I}` under uniform `Y`.
    pub epsilon: Option<BigRational>,
    pub branches: Vec<RoundBranch>,
    pub preconditions: LabReport,
    pub y_min_entropy: Real,
    pub y_deficiency: Real,
    pub partition: RestoringPartition,
}

fn log2_m(m: usize) -> Result<i64, LabError> {
    if m < 2 || !m.is_power_of_two() || m > MAX_ROUND_M {
        return Err(LabError::DimensionMismatch(format!("m = {m} must be a power of two in 2..={MAX_ROUND_M}")));
    }
    Ok(m.trailing_zeros() as i64)
}

/// Row `i` of a packed point.
pub fn row(y: u64, m: usize, i: usize) -> u64 {
    (y >> (i * m)) & ((1u64 << m) - 1)
}

/// Gadget output `y_i[x_i]`.
pub fn bit(y: u64, m: usize, i: usize, symbol: usize) -> bool {
    y >> (i * m + symbol) & 1 == 1
}

fn validate(m: usize, n: usize, x: &[Vec<usize>], y: &[u64]) -> Result<(), LabError> {
    if n > MAX_ROUND_COORDS {
        return Err(LabError::TooLarge { what: "round step", size: n, limit: MAX_ROUND_COORDS });
    }
    if x.is_empty() {
        return Err(LabError::EmptyComponent("X".into()));
    }
    if y.is_empty() {
        return Err(LabError::EmptyComponent("Y".into()));
    }
    if let Some(p) = x.iter().find(|p| p.len() != n || p.iter().any(|&v| v >= m)) {
        return Err(LabError::DimensionMismatch(format!("selector {p:?} outside [{m}]^{n}")));
    }
    if n * m < 64 {
        if let Some(v) = y.iter().find(|&&v| v >> (n * m) != 0) {
            return Err(LabError::DimensionMismatch(format!("row pack {v:#x} wider than {} bits", n * m)));
        }
    }
    Ok(())
}

fn dedup<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort();
    out.dedup();
    out
}

/// `log2(m^N / |X|)`.
pub fn selector_deficiency(count: usize, m: usize, n: usize) -> Real {
    set_deficiency(count, num_traits::pow(BigInt::from(m), n))
}

/// `log2(2^{mN} / |Y|)`.
pub fn row_deficiency(count: usize, m: usize, n: usize) -> Real {
    set_deficiency(count, BigInt::one() << (m * n))
}

fn pointed_epsilon(y: &[u64], m: usize, coords: &[usize], alpha: &[usize]) -> Option<BigRational> {
    let k = coords.len();
    let mut counts = vec![0usize; 1 << k];
    for &v in y {
        let idx = coords.iter().zip(alpha).enumerate().fold(0, |acc, (t, (&i, &a))| acc | (bit(v, m, i, a) as usize) << t);
        counts[idx] += 1;
    }
    let total = BigInt::from(y.len());
    let cells = BigInt::one() << k;
    let mut eps = BigRational::zero();
    for c in counts {
        if c == 0 {
            return None;
        }
        let dev = (BigRational::new(BigInt::from(c) * &cells, total.clone()) - BigRational::one()).abs();
        if dev > eps {
            eps = dev;
        }
    }
    Some(eps)
}

fn z_bits(k: usize) -> Vec<Vec<bool>> {
    (0..1usize << k).map(|v| (0..k).map(|t| v >> (k - 1 - t) & 1 == 1).collect()).collect()
}

struct Context<'a> {
    m: usize,
    n: usize,
    log_m: i64,
    x_deficiency: Real,
    y_deficiency: Real,
    th: &'a RoundThresholds,
}

impl Context<'_> {
    fn branch(&self, coords: &[usize], alpha: &[usize], xs: &[Vec<usize>], y: &[u64], z: &[bool]) -> Option<RoundBranch> {
        let (m, n) = (self.m, self.n);
        let matching: Vec<u64> = y
            .iter()
            .copied()
            .filter(|&v| coords.iter().zip(alpha).zip(z).all(|((&i, &a), &b)| bit(v, m, i, a) == b))
            .collect();
        let mut groups: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
        for v in matching {
            groups.entry(coords.iter().map(|&i| row(v, m, i)).collect()).or_default().push(v);
        }
        let (rows, ys) = groups.into_iter().fold(None::<(Vec<u64>, Vec<u64>)>, |best, (a, g)| match best {
            Some((_, ref bg)) if bg.len() >= g.len() => best,
            _ => Some((a, g)),
        })?;
        let free: Vec<usize> = (0..n).filter(|i| !coords.contains(i)).collect();
        let mut report = LabReport::default();

        let mut violations = xs.iter().filter(|p| coords.iter().zip(alpha).any(|(&i, &a)| p[i] != a)).count();
        violations += ys.iter().filter(|&&v| coords.iter().zip(&rows).any(|(&i, &r)| row(v, m, i) != r)).count();
        violations += coords.iter().zip(alpha).zip(&rows).zip(z).filter(|(((_, &a), &r), &b)| (r >> a & 1 == 1) != b).count();
        report.at_most("fixed_output", Quantity::count(violations), Quantity::count(0));

        let projected: Vec<Vec<usize>> = xs.iter().map(|p| free.iter().map(|&i| p[i]).collect()).collect();
        let measured = match set_blockwise(&projected, free.len()).ok().flatten() {
            Some(b) => Quantity::Finite(b.value),
            None => Quantity::Infinite,
        };
        let theta = Real::Rat(self.th.restore_frac.clone() * BigRational::from_integer(self.log_m.into()));
        report.at_least("restored_blockwise_entropy", measured, Quantity::Finite(theta));

        let k = coords.len() as i64;
        let x_free = selector_deficiency(dedup(&projected).len(), m, free.len());
        let drop = Real::Rat(self.th.c_frac.clone() * BigRational::from_integer((k * self.log_m).into()));
        let measured = x_free - self.x_deficiency.clone() + drop;
        report.at_most("x_deficiency_drop", Quantity::Finite(measured), Quantity::rat(self.th.c_const.clone()));

        let y_proj: Vec<u64> = dedup(&ys.iter().map(|&v| free.iter().enumerate().fold(0u64, |acc, (t, &i)| acc | row(v, m, i) << (t * m))).collect::<Vec<_>>());
        let y_free = row_deficiency(y_proj.len(), m, free.len());
        let growth = y_free - self.y_deficiency.clone();
        let bound = self.th.d_coeff.clone() * BigRational::from_integer(k.into()) + self.th.d_const.clone();
        report.at_most("y_deficiency_growth", Quantity::Finite(growth), Quantity::rat(bound));

        Some(RoundBranch { z: z.to_vec(), rows, x: xs.to_vec(), y: ys, report })
    }
}

/// Runs the restoring partition on `X`, orders its parts by how close the
/// pointed bits `(y_i[α_i])_{i∈I}` are to uniform (then by part index), and
/// returns the first part whose every `z_I` branch exists and meets the four
/// round conditions. Each branch keeps the largest group of `Y^{I,z}` sharing
/// the rows `y_I` (lex smallest rows on ties).
pub fn round_lemma_find(m: usize, n: usize, x: &[Vec<usize>], y: &[u64], th: &RoundThresholds) -> Result<RoundOutcome, LabError> {
    let log_m = log2_m(m)?;
    validate(m, n, x, y)?;
    let x = dedup(x);
    let y = dedup(y);
    let x_deficiency = selector_deficiency(x.len(), m, n);
    let y_deficiency = row_deficiency(y.len(), m, n);
    let y_min_entropy = Real::log2(BigRational::from_integer(BigInt::from(y.len())));

    let mut pre = LabReport::default();
    let measured = match set_blockwise(&x, n)? {
        Some(b) => Quantity::Finite(b.value),
        None => Quantity::Infinite,
    };
    let need = Real::Rat(th.pre_frac.clone() * BigRational::from_integer(log_m.into()));
    pre.at_least("x_blockwise_entropy", measured, Quantity::Finite(need));
    if let Some(bound) = &th.y_deficiency_bound {
        pre.at_most("y_deficiency", Quantity::Finite(y_deficiency.clone()), Quantity::rat(bound.clone()));
    }
    if !pre.pass() {
        return Err(LabError::PreconditionFailed(pre));
    }

    let theta = th.restore_frac.clone() * BigRational::from_integer(log_m.into());
    let partition = restore_partition(&x, m, n, &theta)?;
    let mut order: Vec<(Option<BigRational>, usize)> = partition
        .parts
        .iter()
        .enumerate()
        .map(|(j, p)| (pointed_epsilon(&y, m, &p.coords, &p.alpha), j))
        .collect();
    order.sort_by(|(ea, ja), (eb, jb)| match (ea, eb) {
        (Some(a), Some(b)) => a.cmp(b).then(ja.cmp(jb)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => ja.cmp(jb),
    });

    let ctx = Context { m, n, log_m, x_deficiency, y_deficiency: y_deficiency.clone(), th };
    let mut log = String::new();
    for (epsilon, j) in order {
        let part = &partition.parts[j];
        let eps_text = epsilon.as_ref().map_or("inf".to_string(), format_rational);
        let mut branches = Vec::new();
        let mut ok = true;
        for z in z_bits(part.coords.len()) {
            let zs: String = z.iter().map(|&b| if b { '1' } else { '0' }).collect();
            match ctx.branch(&part.coords, &part.alpha, &part.points, &y, &z) {
                None => {
                    log.push_str(&format!("part={j} I={:?} alpha={:?} epsilon={eps_text} z={zs} branch=empty\n", part.coords, part.alpha));
                    ok = false;
                }
                Some(b) => {
                    for c in &b.report.conditions {
                        log.push_str(&format!(
                            "part={j} I={:?} alpha={:?} epsilon={eps_text} z={zs} condition={} measured={} threshold={} pass={}\n",
                            part.coords, part.alpha, c.name, c.measured, c.threshold, c.pass
                        ));
                    }
                    ok &= b.report.pass();
                    branches.push(b);
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            return Ok(RoundOutcome {
                coords: part.coords.clone(),
                alpha: part.alpha.clone(),
                part_index: j,
                epsilon,
                branches,
                preconditions: pre,
                y_min_entropy,
                y_deficiency,
                partition,
            });
        }
    }
    Err(LabError::NoRoundPart(log))
}
