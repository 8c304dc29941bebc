//! Ordered simplices, the largest-cube classification and the row cleanup loop.
//!
//! Membership is down-closed: lowering the rank of any one part keeps a point
//! inside. Points are tuples of element values; part `p`'s order lists its
//! elements from rank 0 upward.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{subsets_by_size_desc, syntax, LabError, LabReport, Quantity, Real};

pub const MAX_SIMPLEX_POINTS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPart {
    pub name: String,
    pub alphabet: usize,
    /// Element at each rank, lowest first.
    pub order: Vec<usize>,
    rank: Vec<usize>,
}

impl SimplexPart {
    pub fn new(name: impl Into<String>, order: Vec<usize>) -> Result<Self, LabError> {
        let alphabet = order.len();
        let mut rank = vec![usize::MAX; alphabet];
        for (r, &e) in order.iter().enumerate() {
            if e >= alphabet || rank[e] != usize::MAX {
                return Err(LabError::DimensionMismatch(format!("order {order:?} is not a permutation")));
            }
            rank[e] = r;
        }
        Ok(SimplexPart { name: name.into(), alphabet, order, rank })
    }

    /// Natural order `0 < 1 < … < alphabet − 1`.
    pub fn natural(name: impl Into<String>, alphabet: usize) -> Self {
        Self::new(name, (0..alphabet).collect()).expect("identity order")
    }

    pub fn rank(&self, element: usize) -> usize {
        self.rank[element]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedSimplex {
    parts: Vec<SimplexPart>,
    members: Vec<bool>,
}

impl OrderedSimplex {
    /// Builds the simplex and checks down-closure exhaustively.
    pub fn from_fn(parts: Vec<SimplexPart>, mut member: impl FnMut(&[usize]) -> bool) -> Result<Self, LabError> {
        let size = parts.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.alphabet).filter(|&s| s <= MAX_SIMPLEX_POINTS));
        let size = size.ok_or(LabError::TooLarge { what: "simplex domain", size: usize::MAX, limit: MAX_SIMPLEX_POINTS })?;
        let mut s = OrderedSimplex { parts, members: vec![false; size] };
        for idx in 0..size {
            let p = s.point(idx);
            s.members[idx] = member(&p);
        }
        s.check_monotone()?;
        Ok(s)
    }

    pub fn from_points(parts: Vec<SimplexPart>, points: &[Vec<usize>]) -> Result<Self, LabError> {
        let k = parts.len();
        let alphabets: Vec<usize> = parts.iter().map(|p| p.alphabet).collect();
        if let Some(p) = points.iter().find(|p| p.len() != k || p.iter().zip(&alphabets).any(|(&e, &a)| e >= a)) {
            return Err(LabError::DimensionMismatch(format!("point {p:?} outside the domain")));
        }
        let set: std::collections::HashSet<&Vec<usize>> = points.iter().collect();
        Self::from_fn(parts, |p| set.contains(&p.to_vec()))
    }

    fn check_monotone(&self) -> Result<(), LabError> {
        for idx in 0..self.members.len() {
            if !self.members[idx] {
                continue;
            }
            let mut p = self.point(idx);
            for k in 0..self.parts.len() {
                let r = self.parts[k].rank(p[k]);
                if r == 0 {
                    continue;
                }
                let keep = p[k];
                p[k] = self.parts[k].order[r - 1];
                if !self.contains(&p) {
                    return Err(LabError::NotMonotone(format!("{:?} is a member but {p:?} is not", self.point(idx))));
                }
                p[k] = keep;
            }
        }
        Ok(())
    }

    pub fn parts(&self) -> &[SimplexPart] {
        &self.parts
    }

    fn index(&self, point: &[usize]) -> usize {
        point.iter().zip(&self.parts).fold(0, |acc, (&e, p)| acc * p.alphabet + e)
    }

    fn point(&self, mut idx: usize) -> Vec<usize> {
        let mut p = vec![0; self.parts.len()];
        for k in (0..self.parts.len()).rev() {
            p[k] = idx % self.parts[k].alphabet;
            idx /= self.parts[k].alphabet;
        }
        p
    }

    pub fn contains(&self, point: &[usize]) -> bool {
        self.members[self.index(point)]
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        (0..self.members.len()).filter(|&i| self.members[i]).map(|i| self.point(i)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("simplex\n");
        for p in &self.parts {
            let order: Vec<String> = p.order.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "part {} {} order {}", p.name, p.alphabet, order.join(" "));
        }
        for m in self.members() {
            let vals: Vec<String> = m.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "member {}", vals.join(" "));
        }
        s
    }

    /// Parses `simplex`, `part <name> <alphabet> order <e…>` and
    /// `member <e…>` lines; `c` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut parts = Vec::new();
        let mut points = Vec::new();
        let mut seen_header = false;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| syntax(line, format!("bad number {t:?}")));
            match toks.first().copied() {
                None | Some("c") => {}
                Some("simplex") => seen_header = true,
                Some("part") => {
                    if toks.len() < 4 || toks[3] != "order" {
                        return Err(syntax(line, "expected part <name> <alphabet> order <elements>"));
                    }
                    let alphabet = num(toks[2])?;
                    let order = toks[4..].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?;
                    if order.len() != alphabet {
                        return Err(syntax(line, "order must list every element once"));
                    }
                    parts.push(SimplexPart::new(toks[1], order).map_err(|e| syntax(line, e.to_string()))?);
                }
                Some("member") => points.push(toks[1..].iter().map(|t| num(t)).collect::<Result<Vec<_>, _>>()?),
                Some(t) => return Err(syntax(line, format!("unknown record {t:?}"))),
            }
        }
        if !seen_header {
            return Err(syntax(1, "missing simplex header"));
        }
        Self::from_points(parts, &points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubeClass {
    Empty,
    Heavy,
    /// Per measured part, the elements of induced rank below `M`.
    Light { errors: Vec<(usize, Vec<usize>)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargestCube {
    /// Largest `M` with the rank-`(M−1)` diagonal point inside.
    pub side: usize,
    /// Per part, the first `M` allowed elements (fixed parts keep their element).
    pub cube: Vec<Vec<usize>>,
    /// `M / alphabet` per measured part.
    pub densities: Vec<(usize, BigRational)>,
    pub class: CubeClass,
}

/// Largest diagonal cube of `T` restricted to `∏ allowed_p` under the
/// induced orders. Parts outside `measured` must have exactly one allowed
/// element and are held fixed. The slice is heavy when every measured part
/// has `log2(M / alphabet) ≥ −β`.
pub fn largest_cube(t: &OrderedSimplex, allowed: &[Vec<usize>], measured: &[usize], beta: &Real) -> Result<LargestCube, LabError> {
    let k = t.parts.len();
    if allowed.len() != k {
        return Err(LabError::DimensionMismatch(format!("{} allowed sets for {k} parts", allowed.len())));
    }
    let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(k);
    for (p, set) in allowed.iter().enumerate() {
        let mut s = set.clone();
        if s.iter().any(|&e| e >= t.parts[p].alphabet) {
            return Err(LabError::DimensionMismatch(format!("element outside part {p}")));
        }
        s.sort_by_key(|&e| t.parts[p].rank(e));
        s.dedup();
        if !measured.contains(&p) && s.len() != 1 {
            return Err(LabError::DimensionMismatch(format!("unmeasured part {p} must be fixed to one element")));
        }
        sorted.push(s);
    }
    let limit = measured.iter().map(|&p| sorted[p].len()).min().unwrap_or(0);
    let any_empty = sorted.iter().any(|s| s.is_empty());
    let mut side = 0;
    if !any_empty {
        let mut point: Vec<usize> = sorted.iter().map(|s| s[0]).collect();
        let cap = if measured.is_empty() { 1 } else { limit };
        while side < cap {
            for &p in measured {
                point[p] = sorted[p][side];
            }
            if !t.contains(&point) {
                break;
            }
            side += 1;
        }
    }
    let cube: Vec<Vec<usize>> = (0..k)
        .map(|p| if measured.contains(&p) { sorted[p][..side].to_vec() } else if side > 0 { sorted[p].clone() } else { vec![] })
        .collect();
    let densities: Vec<(usize, BigRational)> = measured
        .iter()
        .map(|&p| (p, BigRational::new(BigInt::from(side), BigInt::from(t.parts[p].alphabet))))
        .collect();
    let class = if side == 0 {
        CubeClass::Empty
    } else if densities.iter().all(|(_, d)| Real::log2(d.clone()).compare(&-beta.clone()).is_ge()) {
        CubeClass::Heavy
    } else {
        CubeClass::Light { errors: measured.iter().map(|&p| (p, sorted[p][..side].to_vec())).collect() }
    };
    Ok(LargestCube { side, cube, densities, class })
}

/// Heaviness exponent `β` and error-set bound for the cleanup loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanupConfig {
    pub beta: Real,
    /// Bound on `log2(|Y^{ij,err}| / 2^m)`; `None` uses `log2(#slices) − β`.
    pub error_log_density_bound: Option<Real>,
}

impl CleanupConfig {
    /// `β = √m`.
    pub fn standard(m: usize) -> Self {
        CleanupConfig { beta: Real::root(BigRational::from_integer(BigInt::from(m)), 2), error_log_density_bound: None }
    }
}

/// A slice `{x} × Y_{I,α,γ}`: rows `(i, j)` with `i ∈ I` have bit `α_i`
/// equal to `γ_i[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceKey {
    pub coords: Vec<usize>,
    pub alpha: Vec<usize>,
    pub gamma: Vec<Vec<bool>>,
    pub x: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanupTrigger {
    pub slice: SliceKey,
    pub side: usize,
    pub added: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanupResult {
    /// Error set per row part `(i, j)`, index `i·ℓ + j`, sorted.
    pub errors: Vec<Vec<usize>>,
    pub triggers: Vec<CleanupTrigger>,
    pub slices: usize,
}

/// Shape of a cleanup simplex: part 0 is Alice's input, part `1 + i·ℓ + j`
/// holds row `(i, j)` as an `m`-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CleanupShape {
    pub m: usize,
    pub n: usize,
    pub ell: usize,
}

impl CleanupShape {
    fn check(&self, t: &OrderedSimplex) -> Result<(), LabError> {
        let want = 1 + self.n * self.ell;
        if t.parts.len() != want || t.parts[1..].iter().any(|p| p.alphabet != 1 << self.m) {
            return Err(LabError::DimensionMismatch(format!(
                "cleanup needs 1 + {} row parts over 2^{} masks",
                self.n * self.ell,
                self.m
            )));
        }
        Ok(())
    }

    /// Every slice key in order: `I` by size then lex, `α` lex, `γ` lex, `x`.
    pub fn slices(&self, x_alphabet: usize) -> Vec<SliceKey> {
        let mut subsets = vec![vec![]];
        let mut rest = subsets_by_size_desc(self.n);
        rest.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        subsets.extend(rest);
        let mut out = Vec::new();
        for coords in subsets {
            let k = coords.len();
            for a in 0..self.m.pow(k as u32) {
                let alpha: Vec<usize> = (0..k).map(|t| a / self.m.pow((k - 1 - t) as u32) % self.m).collect();
                for g in 0..1usize << (k * self.ell) {
                    let gamma: Vec<Vec<bool>> = (0..k)
                        .map(|t| (0..self.ell).map(|j| g >> ((k - 1 - t) * self.ell + (self.ell - 1 - j)) & 1 == 1).collect())
                        .collect();
                    for x in 0..x_alphabet {
                        out.push(SliceKey { coords: coords.clone(), alpha: alpha.clone(), gamma: gamma.clone(), x });
                    }
                }
            }
        }
        out
    }

    fn allowed(&self, key: &SliceKey, errors: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let mut allowed = vec![vec![key.x]];
        for i in 0..self.n {
            for j in 0..self.ell {
                let pos = key.coords.iter().position(|&c| c == i);
                let set: Vec<usize> = (0..1usize << self.m)
                    .filter(|&e| pos.map_or(true, |t| (e >> key.alpha[t] & 1 == 1) == key.gamma[t][j]))
                    .filter(|e| errors[i * self.ell + j].binary_search(e).is_err())
                    .collect();
                allowed.push(set);
            }
        }
        allowed
    }
}

/// Repeats passes over all slices; a slice that is neither empty nor heavy
/// has its low-rank elements added to the error sets. Stops after a pass
/// adds nothing.
pub fn bob_cleanup(t: &OrderedSimplex, shape: CleanupShape, config: &CleanupConfig) -> Result<CleanupResult, LabError> {
    shape.check(t)?;
    let rows = shape.n * shape.ell;
    let measured: Vec<usize> = (1..=rows).collect();
    let slices = shape.slices(t.parts[0].alphabet);
    let mut errors: Vec<Vec<usize>> = vec![vec![]; rows];
    let mut triggers = Vec::new();
    loop {
        let mut changed = false;
        for key in &slices {
            let cube = largest_cube(t, &shape.allowed(key, &errors), &measured, &config.beta)?;
            if let CubeClass::Light { errors: add } = cube.class {
                let added: Vec<(usize, Vec<usize>)> = add.into_iter().map(|(p, es)| (p - 1, es)).collect();
                for (r, es) in &added {
                    errors[*r].extend(es);
                    errors[*r].sort_unstable();
                    errors[*r].dedup();
                }
                triggers.push(CleanupTrigger { slice: key.clone(), side: cube.side, added });
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(CleanupResult { errors, triggers, slices: slices.len() })
}

/// Exhaustive exit check: every slice empty-or-heavy, error sets within the
/// bound, and every trigger added sets below the heaviness threshold.
pub fn verify_cleanup(t: &OrderedSimplex, shape: CleanupShape, config: &CleanupConfig, result: &CleanupResult) -> Result<LabReport, LabError> {
    shape.check(t)?;
    let rows = shape.n * shape.ell;
    let measured: Vec<usize> = (1..=rows).collect();
    let slices = shape.slices(t.parts[0].alphabet);
    let mut bad = 0;
    for key in &slices {
        if let CubeClass::Light { .. } = largest_cube(t, &shape.allowed(key, &result.errors), &measured, &config.beta)?.class {
            bad += 1;
        }
    }
    let mut report = LabReport::default();
    report.at_most("empty_or_heavy", Quantity::count(bad), Quantity::count(0));

    let bound = config
        .error_log_density_bound
        .clone()
        .unwrap_or_else(|| Real::log2(BigRational::from_integer(BigInt::from(slices.len()))) - config.beta.clone());
    let worst = result
        .errors
        .iter()
        .filter(|e| !e.is_empty())
        .map(|e| Real::log2(BigRational::new(BigInt::from(e.len()), BigInt::from(1u64 << shape.m))))
        .max_by(|a, b| a.compare(b));
    match worst {
        None => report.at_most("error_log_density", Quantity::NegInfinite, Quantity::Finite(bound)),
        Some(w) => report.at_most("error_log_density", Quantity::Finite(w), Quantity::Finite(bound)),
    };

    let neg_beta = -config.beta.clone();
    let heavy_adds = result
        .triggers
        .iter()
        .filter(|tr| {
            tr.added.iter().any(|(_, es)| {
                Real::log2(BigRational::new(BigInt::from(es.len()), BigInt::from(1u64 << shape.m))).compare(&neg_beta).is_ge()
            })
        })
        .count();
    report.at_most("trigger_density_below_threshold", Quantity::count(heavy_adds), Quantity::count(0));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag() -> OrderedSimplex {
        OrderedSimplex::from_fn(vec![SimplexPart::natural("a", 4), SimplexPart::natural("b", 4)], |p| p[0] + p[1] <= 3).unwrap()
    }

    #[test]
    fn monotonicity_is_checked() {
        let parts = vec![SimplexPart::natural("a", 2), SimplexPart::natural("b", 2)];
        assert!(matches!(OrderedSimplex::from_points(parts.clone(), &[vec![1, 1]]), Err(LabError::NotMonotone(_))));
        let rev = vec![SimplexPart::new("a", vec![1, 0]).unwrap(), SimplexPart::natural("b", 2)];
        assert!(OrderedSimplex::from_points(rev, &[vec![1, 0], vec![1, 1]]).is_ok());
    }

    #[test]
    fn diagonal_cube() {
        let t = diag();
        let all = vec![(0..4).collect::<Vec<_>>(); 2];
        let c = largest_cube(&t, &all, &[0, 1], &Real::int(1)).unwrap();
        assert_eq!(c.side, 2);
        assert_eq!(c.class, CubeClass::Heavy);
        let c = largest_cube(&t, &all, &[0, 1], &Real::ratio(1, 2)).unwrap();
        assert_eq!(c.class, CubeClass::Light { errors: vec![(0, vec![0, 1]), (1, vec![0, 1])] });
    }

    #[test]
    fn full_and_empty_cubes() {
        let full = OrderedSimplex::from_fn(vec![SimplexPart::natural("a", 3); 2], |_| true).unwrap();
        let all = vec![(0..3).collect::<Vec<_>>(); 2];
        assert_eq!(largest_cube(&full, &all, &[0, 1], &Real::int(0)).unwrap().class, CubeClass::Heavy);
        let empty = OrderedSimplex::from_fn(vec![SimplexPart::natural("a", 3); 2], |_| false).unwrap();
        let c = largest_cube(&empty, &all, &[0, 1], &Real::int(0)).unwrap();
        assert_eq!((c.side, c.class), (0, CubeClass::Empty));
    }

    #[test]
    fn text_round_trip() {
        let t = diag();
        assert_eq!(OrderedSimplex::parse(&t.to_text()).unwrap(), t);
        assert!(OrderedSimplex::parse("simplex\npart a 2 order 0 1\nmember 1\n").is_err());
    }

    fn cleanup_parts(m: usize) -> Vec<SimplexPart> {
        vec![SimplexPart::natural("x", 2), SimplexPart::natural("y00", 1 << m)]
    }

    #[test]
    fn cleanup_of_full_and_empty() {
        let shape = CleanupShape { m: 2, n: 1, ell: 1 };
        let cfg = CleanupConfig::standard(2);
        for all in [true, false] {
            let t = OrderedSimplex::from_fn(cleanup_parts(2), |_| all).unwrap();
            let r = bob_cleanup(&t, shape, &cfg).unwrap();
            assert!(r.errors.iter().all(|e| e.is_empty()));
            assert!(r.triggers.is_empty());
            assert!(verify_cleanup(&t, shape, &cfg, &r).unwrap().pass());
        }
    }

    #[test]
    fn thin_staircase_triggers_cleanup() {
        let shape = CleanupShape { m: 4, n: 1, ell: 1 };
        let cfg = CleanupConfig::standard(4);
        // x = 0 keeps nine rows, x = 1 keeps one.
        let t = OrderedSimplex::from_fn(cleanup_parts(4), |p| p[1] < if p[0] == 0 { 9 } else { 1 }).unwrap();
        let r = bob_cleanup(&t, shape, &cfg).unwrap();
        assert_eq!(r.slices, 2 * (1 + 4 * 2));
        assert!(!r.triggers.is_empty());
        assert!(r.errors[0].contains(&0));
        let report = verify_cleanup(&t, shape, &cfg, &r).unwrap();
        assert!(report.pass(), "{report}");
    }
}
