//! Exact comparison of the real numbers that entropy checks produce.
//!
//! Values are expression trees over rationals, `log2 q` and `q^(1/n)`.
//! Rational combinations of logarithms of rationals are compared exactly by
//! exponentiating: `Σ a_i log2 b_i + a_0 ≥ 0` iff `Π b_i^{a_i} · 2^{a_0} ≥ 1`
//! once the coefficients are cleared to integers. Everything else is compared
//! by outward-rounded dyadic interval arithmetic with increasing precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::proof::protocol::format_rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Rat(BigRational),
    /// `log2 q`, `q > 0`.
    Log2(BigRational),
    /// `q^(1/n)`, `q ≥ 0`, `n ≥ 1`.
    Root(BigRational, u32),
    Sum(Vec<Real>),
    Product(Vec<Real>),
    Pow(Box<Real>, u32),
}

/// `constant + Σ coeff · log2 base`.
#[derive(Clone, Debug)]
struct Linear {
    constant: BigRational,
    logs: Vec<(BigRational, BigRational)>,
}

impl Linear {
    fn constant(c: BigRational) -> Self {
        Linear { constant: c, logs: Vec::new() }
    }

    fn add(mut self, other: Linear) -> Linear {
        self.constant += other.constant;
        for (b, c) in other.logs {
            match self.logs.iter_mut().find(|(b2, _)| *b2 == b) {
                Some(e) => e.1 += c,
                None => self.logs.push((b, c)),
            }
        }
        self
    }

    fn scale(mut self, k: &BigRational) -> Linear {
        self.constant *= k;
        for e in &mut self.logs {
            e.1 *= k;
        }
        self
    }

    fn as_constant(&self) -> Option<&BigRational> {
        self.logs.iter().all(|(_, c)| c.is_zero()).then_some(&self.constant)
    }

    fn sign(&self) -> Ordering {
        let mut lcm = self.constant.denom().clone();
        for (_, c) in &self.logs {
            lcm = lcm.lcm(c.denom());
        }
        let scale = BigRational::from_integer(lcm);
        let a0 = (&self.constant * &scale).to_integer();
        let mut product = pow2(&a0);
        for (b, c) in &self.logs {
            let a = (c * &scale).to_integer();
            product *= pow_int(b, &a);
        }
        product.cmp(&BigRational::one())
    }
}

fn pow_int(b: &BigRational, e: &BigInt) -> BigRational {
    let k = e.abs().to_u32().expect("exponent fits in u32");
    let p = num_traits::pow(b.clone(), k as usize);
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

fn pow2(e: &BigInt) -> BigRational {
    pow_int(&BigRational::from_integer(BigInt::from(2)), e)
}

/// `Some(k)` when `q = 2^k`.
fn exact_log2(q: &BigRational) -> Option<i64> {
    let (n, d) = (q.numer(), q.denom());
    let is_pow2 = |x: &BigInt| x.is_positive() && (x & (x - 1u32)).is_zero();
    if is_pow2(n) && is_pow2(d) {
        Some(n.bits() as i64 - d.bits() as i64)
    } else {
        None
    }
}

fn exact_root(q: &BigRational, n: u32) -> Option<BigRational> {
    let (a, b) = (q.numer(), q.denom());
    let (ra, rb) = (a.nth_root(n), b.nth_root(n));
    (num_traits::pow(ra.clone(), n as usize) == *a && num_traits::pow(rb.clone(), n as usize) == *b)
        .then(|| BigRational::new(ra, rb))
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new((x.numer() * &s).div_floor(x.denom()), s)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let s = BigInt::one() << bits;
    BigRational::new(-((-(x.numer() * &s)).div_floor(x.denom())), s)
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// `[lo, hi] ∋ log2 q` with width at most `2^-bits`.
fn log2_bracket(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    if let Some(k) = exact_log2(q) {
        let v = BigRational::from_integer(BigInt::from(k));
        return (v.clone(), v);
    }
    let mut e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let mut y = q * pow2(&BigInt::from(-e));
    while y < BigRational::one() {
        y *= two();
        e -= 1;
    }
    while y >= two() {
        y /= two();
        e += 1;
    }
    let work = bits + 16;
    let (mut lo, mut hi) = (y.clone(), y);
    let mut frac = BigInt::zero();
    let mut k = 0;
    while k < bits {
        lo = round_down(&(&lo * &lo), work);
        hi = round_up(&(&hi * &hi), work);
        frac <<= 1;
        if lo >= two() {
            frac += 1;
            lo /= two();
            hi /= two();
        } else if hi >= two() {
            frac >>= 1;
            break;
        }
        k += 1;
    }
    let unit = BigRational::new(BigInt::one(), BigInt::one() << k);
    let base = BigRational::from_integer(BigInt::from(e)) + BigRational::from_integer(frac) * &unit;
    (base.clone(), base + unit)
}

/// `[lo, hi] ∋ q^(1/n)` with width at most `2^-bits`.
fn root_bracket(q: &BigRational, n: u32, bits: u32) -> (BigRational, BigRational) {
    if let Some(r) = exact_root(q, n) {
        return (r.clone(), r);
    }
    let mut lo = BigRational::zero();
    let mut hi = if *q > BigRational::one() { q.clone() } else { BigRational::one() };
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / two();
        if num_traits::pow(mid.clone(), n as usize) <= *q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn interval_mul(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let lo = c.iter().min().unwrap().clone();
    let hi = c.iter().max().unwrap().clone();
    (lo, hi)
}

impl Real {
    pub fn rat(q: BigRational) -> Real {
        Real::Rat(q)
    }

    pub fn int(v: i64) -> Real {
        Real::Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Real {
        Real::Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Panics unless `q > 0`.
    pub fn log2(q: BigRational) -> Real {
        assert!(q.is_positive(), "log2 of a non-positive rational");
        match exact_log2(&q) {
            Some(k) => Real::int(k),
            None => Real::Log2(q),
        }
    }

    /// Panics unless `q ≥ 0` and `n ≥ 1`.
    pub fn root(q: BigRational, n: u32) -> Real {
        assert!(!q.is_negative() && n >= 1, "root of a negative rational");
        match exact_root(&q, n) {
            Some(r) => Real::Rat(r),
            None => Real::Root(q, n),
        }
    }

    pub fn pow(self, k: u32) -> Real {
        Real::Pow(Box::new(self), k)
    }

    fn linear(&self) -> Option<Linear> {
        match self {
            Real::Rat(q) => Some(Linear::constant(q.clone())),
            Real::Log2(q) => Some(match exact_log2(q) {
                Some(k) => Linear::constant(BigRational::from_integer(BigInt::from(k))),
                None => Linear { constant: BigRational::zero(), logs: vec![(q.clone(), BigRational::one())] },
            }),
            Real::Root(q, n) => exact_root(q, *n).map(Linear::constant),
            Real::Sum(xs) => {
                xs.iter().try_fold(Linear::constant(BigRational::zero()), |acc, x| Some(acc.add(x.linear()?)))
            }
            Real::Product(xs) => {
                let mut coeff = BigRational::one();
                let mut rest: Option<Linear> = None;
                for x in xs {
                    if let Some(c) = x.constant_value() {
                        coeff *= c;
                    } else if rest.is_none() {
                        rest = Some(x.linear()?);
                    } else {
                        return None;
                    }
                }
                Some(rest.unwrap_or_else(|| Linear::constant(BigRational::one())).scale(&coeff))
            }
            Real::Pow(x, k) => match (x.constant_value(), k) {
                (_, 0) => Some(Linear::constant(BigRational::one())),
                (_, 1) => x.linear(),
                (Some(c), _) => Some(Linear::constant(num_traits::pow(c, *k as usize))),
                (None, _) => None,
            },
        }
    }

    /// The exact value when it is rational and recognizably so.
    pub fn constant_value(&self) -> Option<BigRational> {
        match self {
            Real::Rat(q) => Some(q.clone()),
            Real::Root(q, n) => exact_root(q, *n),
            Real::Pow(_, 0) => Some(BigRational::one()),
            Real::Product(xs) => xs.iter().try_fold(BigRational::one(), |acc, x| x.constant_value().map(|c| acc * c)),
            Real::Pow(x, k) => match (&**x, k) {
                (Real::Root(q, n), _) => exact_root(&num_traits::pow(q.clone(), *k as usize), *n),
                (Real::Product(xs), _) => xs
                    .iter()
                    .try_fold(BigRational::one(), |acc, x| x.clone().pow(*k).constant_value().map(|c| acc * c)),
                _ => x.constant_value().map(|c| num_traits::pow(c, *k as usize)),
            },
            _ => self.linear().and_then(|l| l.as_constant().cloned()),
        }
    }

    /// A dyadic interval containing the value.
    pub fn bracket(&self, bits: u32) -> (BigRational, BigRational) {
        let work = bits + 8;
        let (lo, hi) = match self {
            Real::Rat(q) => return (q.clone(), q.clone()),
            Real::Log2(q) => log2_bracket(q, work),
            Real::Root(q, n) => root_bracket(q, *n, work),
            Real::Sum(xs) => xs.iter().fold((BigRational::zero(), BigRational::zero()), |(l, h), x| {
                let (a, b) = x.bracket(work);
                (l + a, h + b)
            }),
            Real::Product(xs) => xs
                .iter()
                .fold((BigRational::one(), BigRational::one()), |acc, x| interval_mul(&acc, &x.bracket(work))),
            Real::Pow(x, k) => {
                let b = x.bracket(work);
                (0..*k).fold((BigRational::one(), BigRational::one()), |acc, _| interval_mul(&acc, &b))
            }
        };
        (round_down(&lo, work), round_up(&hi, work))
    }

    /// Exact comparison. Values that agree to 2^-1024 without being
    /// recognizably equal compare as equal.
    pub fn compare(&self, other: &Real) -> Ordering {
        let diff = self.clone() - other.clone();
        if let Some(l) = diff.linear() {
            return l.sign();
        }
        if let Some(c) = diff.constant_value() {
            return c.cmp(&BigRational::zero());
        }
        let mut bits = 16;
        while bits <= 1024 {
            let (lo, hi) = diff.bracket(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 4;
        }
        Ordering::Equal
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.bracket(60);
        let mid = (lo + hi) / two();
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact rational text when known, otherwise six decimals rounded down.
    pub fn render(&self) -> String {
        if let Some(c) = self.constant_value() {
            return format_rational(&c);
        }
        let (lo, _) = self.bracket(40);
        let scaled = (lo * BigRational::from_integer(BigInt::from(1_000_000))).floor().to_integer();
        let sign = if scaled.is_negative() { "-" } else { "" };
        let (q, r) = scaled.abs().div_rem(&BigInt::from(1_000_000));
        format!("{sign}{q}.{r:06}")
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        match (self, rhs) {
            (Real::Sum(mut a), Real::Sum(b)) => {
                a.extend(b);
                Real::Sum(a)
            }
            (Real::Sum(mut a), b) => {
                a.push(b);
                Real::Sum(a)
            }
            (a, b) => Real::Sum(vec![a, b]),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Rat(q) => Real::Rat(-q),
            x => Real::Product(vec![Real::int(-1), x]),
        }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        self + (-rhs)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        match (self, rhs) {
            (Real::Product(mut a), b) => {
                a.push(b);
                Real::Product(a)
            }
            (a, b) => Real::Product(vec![a, b]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn logs_of_rationals_compare_exactly() {
        let three = Real::log2(q(3, 1));
        assert_eq!(three.compare(&Real::ratio(3, 2)), Ordering::Greater);
        assert_eq!(three.compare(&Real::ratio(8, 5)), Ordering::Less);
        let nine_half = Real::ratio(1, 2) * Real::log2(q(9, 1));
        assert_eq!(nine_half.compare(&three), Ordering::Equal);
        assert_eq!(Real::log2(q(1, 8)).constant_value(), Some(q(-3, 1)));
    }

    #[test]
    fn brackets_contain_the_value() {
        let (lo, hi) = Real::log2(q(3, 1)).bracket(30);
        assert!(lo.to_f64().unwrap() <= 3f64.log2() && 3f64.log2() <= hi.to_f64().unwrap());
        let (lo, hi) = Real::root(q(2, 1), 2).bracket(30);
        assert!(lo.to_f64().unwrap() <= 2f64.sqrt() && 2f64.sqrt() <= hi.to_f64().unwrap());
        assert_eq!(Real::root(q(9, 4), 2).constant_value(), Some(q(3, 2)));
        assert_eq!(Real::root(q(2, 1), 2).pow(2).constant_value(), Some(q(2, 1)));
    }

    #[test]
    fn mixed_comparisons() {
        let sqrt2 = Real::root(q(2, 1), 2);
        assert_eq!(sqrt2.compare(&Real::log2(q(8, 3))), Ordering::Less);
        assert_eq!((sqrt2.clone() * Real::log2(q(3, 1))).compare(&Real::ratio(2241, 1000)), Ordering::Greater);
        assert_eq!(sqrt2.render(), "1.414213");
        assert_eq!(Real::log2(q(3, 1)).render(), "1.584962");
        assert_eq!((-Real::log2(q(3, 1))).render(), "-1.584963");
    }
}
