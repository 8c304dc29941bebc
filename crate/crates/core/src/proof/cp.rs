//! Cutting Planes over arbitrary-precision integers.
//!
//! Text format, one step per line (1-based step, clause and variable
//! numbers): `a <k>` clause axiom, `b <var> 0` for `x ≥ 0`, `b <var> 1` for
//! `-x ≥ -1`, `l <i> <j> <c1> <c2>` linear combination, `d <i> <c>` division,
//! `s <i> <j> : <a1> <a2> ... >= <b>` semantic step asserting the dense line
//! `Σ a_k x_k ≥ b`. A line `tree` marks the proof tree-like; `c` lines are
//! comments.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::formula::{Clause, CnfFormula};
use crate::proof::dag::VertexLabel;
use crate::proof::resolution::{ResStep, ResolutionError, ResolutionProof};

/// `Σ a_v x_v ≥ b` with zero coefficients omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CpLine {
    coeffs: BTreeMap<u32, BigInt>,
    bound: BigInt,
}

impl CpLine {
    pub fn new<I: IntoIterator<Item = (u32, BigInt)>>(coeffs: I, bound: BigInt) -> Self {
        let mut map: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (v, a) in coeffs {
            *map.entry(v).or_default() += a;
        }
        map.retain(|_, a| !a.is_zero());
        CpLine { coeffs: map, bound }
    }

    /// `dense[k]` is the coefficient of variable `k + 1`.
    pub fn from_dense(dense: &[BigInt], bound: BigInt) -> Self {
        CpLine::new(dense.iter().enumerate().map(|(k, a)| (k as u32 + 1, a.clone())), bound)
    }

    pub fn from_i64(coeffs: &[(u32, i64)], bound: i64) -> Self {
        CpLine::new(coeffs.iter().map(|&(v, a)| (v, BigInt::from(a))), BigInt::from(bound))
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, BigInt> {
        &self.coeffs
    }

    pub fn coeff(&self, var: u32) -> BigInt {
        self.coeffs.get(&var).cloned().unwrap_or_default()
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn max_var(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// `0 ≥ b` with `b ≥ 1`.
    pub fn is_contradiction(&self) -> bool {
        self.coeffs.is_empty() && self.bound >= BigInt::one()
    }

    pub fn scaled_sum(&self, c1: &BigInt, other: &CpLine, c2: &BigInt) -> CpLine {
        let terms = self
            .coeffs
            .iter()
            .map(|(&v, a)| (v, a * c1))
            .chain(other.coeffs.iter().map(|(&v, a)| (v, a * c2)));
        CpLine::new(terms, &self.bound * c1 + &other.bound * c2)
    }

    /// Gcd of the nonzero coefficients; `None` for the zero form.
    pub fn gcd(&self) -> Option<BigInt> {
        let mut it = self.coeffs.values();
        let first = it.next()?.abs();
        Some(it.fold(first, |g, a| g.gcd(a)))
    }

    /// Divides by `c`, rounding the bound up; coefficients must be divisible.
    pub fn divide(&self, c: &BigInt) -> Option<CpLine> {
        if !c.is_positive() || self.coeffs.values().any(|a| !a.is_multiple_of(c)) {
            return None;
        }
        Some(CpLine {
            coeffs: self.coeffs.iter().map(|(&v, a)| (v, a / c)).collect(),
            bound: self.bound.div_ceil(c),
        })
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        let lhs: BigInt = self.coeffs.iter().filter(|(&v, _)| x[v as usize - 1]).map(|(_, a)| a).sum();
        lhs >= self.bound
    }

    fn small(&self) -> Option<(Vec<(u32, i128)>, i128)> {
        let total: BigInt = self.coeffs.values().map(|a| a.abs()).sum::<BigInt>() + self.bound.abs();
        total.to_i64()?;
        Some((
            self.coeffs.iter().map(|(&v, a)| (v, a.to_i128().expect("fits"))).collect(),
            self.bound.to_i128().expect("fits"),
        ))
    }
}

impl fmt::Display for CpLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (v, a)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if a.is_positive() {
                write!(f, "+")?;
            }
            write!(f, "{a} x{v}")?;
        }
        write!(f, " >= {}", self.bound)
    }
}

impl VertexLabel for CpLine {
    fn support(&self) -> Vec<u32> {
        self.coeffs.keys().copied().collect()
    }

    fn eval_on(&self, x: &[bool]) -> bool {
        self.eval(x)
    }

    fn is_contradictory(&self) -> bool {
        let max: BigInt = self.coeffs.values().filter(|a| a.is_positive()).sum();
        max < self.bound
    }
}

/// `Σ_{pos} x_i + Σ_{neg} (1 - x_i) ≥ 1` with constants moved to the bound.
pub fn clause_to_inequality(clause: &Clause) -> CpLine {
    let negs = clause.lits().iter().filter(|l| !l.is_positive()).count() as i64;
    CpLine::new(
        clause.lits().iter().map(|l| (l.var(), BigInt::from(if l.is_positive() { 1 } else { -1 }))),
        BigInt::from(1 - negs),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CpStep {
    /// 0-based clause index.
    ClauseAxiom(usize),
    /// `x ≥ 0` when `upper` is false, `-x ≥ -1` when true.
    BoolAxiom { var: u32, upper: bool },
    LinComb { i: usize, j: usize, c1: BigInt, c2: BigInt },
    Divide { i: usize, c: BigInt },
    Semantic { i: usize, j: usize, line: CpLine },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CpProof {
    pub steps: Vec<CpStep>,
    pub tree_like: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpMode {
    Syntactic,
    Semantic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CpMeasures {
    pub length: usize,
    /// Longest premise chain; reported for tree-like proofs only.
    pub depth: Option<usize>,
    pub max_coeff_bits: u64,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CpError {
    #[error("proof has no steps")]
    Empty,
    #[error("step {step}: clause {clause} does not exist")]
    BadClause { step: usize, clause: usize },
    #[error("step {step}: variable {var} outside 1..={n}")]
    VariableOutOfRange { step: usize, var: u32, n: u32 },
    #[error("step {step}: premise {premise} does not precede it")]
    BadPremise { step: usize, premise: usize },
    #[error("step {step}: combination coefficient {coeff} is negative")]
    NegativeCoefficient { step: usize, coeff: String },
    #[error("step {step}: division of a line with no nonzero coefficient")]
    DivideZeroForm { step: usize },
    #[error("step {step}: divisor {got} differs from the coefficient gcd {gcd}")]
    WrongDivisor { step: usize, got: String, gcd: String },
    #[error("step {step}: semantic steps are not allowed in syntactic mode")]
    SemanticNotAllowed { step: usize },
    #[error("step {step}: joint support of {size} variables exceeds the cap of {cap}")]
    SupportCap { step: usize, size: usize, cap: usize },
    #[error("step {step}: assignment {point} satisfies both premises but not the conclusion")]
    UnsoundSemantic { step: usize, point: String },
    #[error("final line `{line}` is not 0 >= b with b >= 1")]
    NonContradictoryFinal { line: String },
    #[error("step {step} is used as a premise more than once in a tree-like proof")]
    TreeViolation { step: usize },
    #[error("line {line}: malformed step `{text}`")]
    Syntax { line: usize, text: String },
}

impl CpStep {
    /// Distinct premise indices.
    fn premises(&self) -> Vec<usize> {
        match *self {
            CpStep::ClauseAxiom(_) | CpStep::BoolAxiom { .. } => vec![],
            CpStep::LinComb { i, j, .. } | CpStep::Semantic { i, j, .. } if i != j => vec![i, j],
            CpStep::LinComb { i, .. } | CpStep::Semantic { i, .. } | CpStep::Divide { i, .. } => vec![i],
        }
    }
}

impl CpProof {
    pub fn new(steps: Vec<CpStep>, tree_like: bool) -> Self {
        CpProof { steps, tree_like }
    }

    pub fn parse(text: &str) -> Result<Self, CpError> {
        let mut proof = CpProof::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line == "tree" {
                proof.tree_like = true;
                continue;
            }
            let err = || CpError::Syntax { line: idx + 1, text: line.to_string() };
            let (head, tail) = match line.split_once(':') {
                Some((h, t)) => (h, Some(t)),
                None => (line, None),
            };
            let parts: Vec<&str> = head.split_whitespace().collect();
            let idx1 = |s: &str| s.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1).ok_or_else(err);
            let int = |s: &str| s.parse::<BigInt>().map_err(|_| err());
            let step = match (parts.as_slice(), tail) {
                (["a", k], None) => CpStep::ClauseAxiom(idx1(k)?),
                (["b", v, s], None) => CpStep::BoolAxiom {
                    var: v.parse::<u32>().ok().filter(|&v| v >= 1).ok_or_else(err)?,
                    upper: match *s {
                        "0" => false,
                        "1" => true,
                        _ => return Err(err()),
                    },
                },
                (["l", i, j, c1, c2], None) => CpStep::LinComb { i: idx1(i)?, j: idx1(j)?, c1: int(c1)?, c2: int(c2)? },
                (["d", i, c], None) => CpStep::Divide { i: idx1(i)?, c: int(c)? },
                (["s", i, j], Some(t)) => {
                    let (lhs, rhs) = t.split_once(">=").ok_or_else(err)?;
                    let dense = lhs.split_whitespace().map(int).collect::<Result<Vec<_>, _>>()?;
                    CpStep::Semantic { i: idx1(i)?, j: idx1(j)?, line: CpLine::from_dense(&dense, int(rhs.trim())?) }
                }
                _ => return Err(err()),
            };
            proof.steps.push(step);
        }
        Ok(proof)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.tree_like {
            out.push_str("tree\n");
        }
        for s in &self.steps {
            let text = match s {
                CpStep::ClauseAxiom(k) => format!("a {}", k + 1),
                CpStep::BoolAxiom { var, upper } => format!("b {} {}", var, u8::from(*upper)),
                CpStep::LinComb { i, j, c1, c2 } => format!("l {} {} {} {}", i + 1, j + 1, c1, c2),
                CpStep::Divide { i, c } => format!("d {} {}", i + 1, c),
                CpStep::Semantic { i, j, line } => {
                    let dense: Vec<String> = (1..=line.max_var()).map(|v| line.coeff(v).to_string()).collect();
                    format!("s {} {} : {} >= {}", i + 1, j + 1, dense.join(" "), line.bound())
                }
            };
            out.push_str(&text);
            out.push('\n');
        }
        out
    }

    /// Replaces every derived step by a semantic step asserting the same
    /// line from the same premises.
    pub fn to_semantic(&self, formula: &CnfFormula) -> Result<CpProof, CpError> {
        let lines = derive_lines(formula, self, CpMode::Syntactic, 0)?;
        let steps = self
            .steps
            .iter()
            .zip(lines)
            .map(|(s, line)| match *s {
                CpStep::LinComb { i, j, .. } => CpStep::Semantic { i, j, line },
                CpStep::Divide { i, .. } => CpStep::Semantic { i, j: i, line },
                _ => s.clone(),
            })
            .collect();
        Ok(CpProof { steps, tree_like: self.tree_like })
    }
}

fn point_string(support: &[u32], x: &[bool]) -> String {
    support.iter().map(|&v| format!("x{}={}", v, u8::from(x[v as usize - 1]))).collect::<Vec<_>>().join(",")
}

/// Searches the joint support for an assignment satisfying `p1` and `p2`
/// but not `concl`. Walks the cube in Gray-code order with incremental sums
/// when the coefficients fit in machine integers.
pub fn semantic_counterexample(
    p1: &CpLine,
    p2: &CpLine,
    concl: &CpLine,
    cap: usize,
) -> Result<Option<String>, (usize, usize)> {
    let mut support: Vec<u32> = p1.support();
    support.extend(p2.support());
    support.extend(concl.support());
    support.sort_unstable();
    support.dedup();
    if support.len() > cap {
        return Err((support.len(), cap));
    }
    let n = support.last().copied().unwrap_or(0) as usize;
    let mut x = vec![false; n];
    let k = support.len();
    if let (Some(a), Some(b), Some(c)) = (p1.small(), p2.small(), concl.small()) {
        let lines = [a, b, c];
        let weight: Vec<[i128; 3]> = support
            .iter()
            .map(|&v| {
                let mut w = [0i128; 3];
                for (t, (coeffs, _)) in lines.iter().enumerate() {
                    if let Ok(p) = coeffs.binary_search_by_key(&v, |&(u, _)| u) {
                        w[t] = coeffs[p].1;
                    }
                }
                w
            })
            .collect();
        let mut sums = [0i128; 3];
        for step in 0u64..1 << k {
            if sums[0] >= lines[0].1 && sums[1] >= lines[1].1 && sums[2] < lines[2].1 {
                return Ok(Some(point_string(&support, &x)));
            }
            let flip = (step + 1).trailing_zeros() as usize;
            if flip >= k {
                break;
            }
            let slot = support[flip] as usize - 1;
            x[slot] = !x[slot];
            for t in 0..3 {
                if x[slot] {
                    sums[t] += weight[flip][t];
                } else {
                    sums[t] -= weight[flip][t];
                }
            }
        }
        return Ok(None);
    }
    for mask in 0u64..1 << k {
        for (b, &v) in support.iter().enumerate() {
            x[v as usize - 1] = mask >> b & 1 == 1;
        }
        if p1.eval(&x) && p2.eval(&x) && !concl.eval(&x) {
            return Ok(Some(point_string(&support, &x)));
        }
    }
    Ok(None)
}

/// The line derived at each step, checking every rule.
pub fn derive_lines(formula: &CnfFormula, proof: &CpProof, mode: CpMode, cap: usize) -> Result<Vec<CpLine>, CpError> {
    let n = formula.var_count();
    let mut lines: Vec<CpLine> = Vec::with_capacity(proof.steps.len());
    for (idx, s) in proof.steps.iter().enumerate() {
        let step = idx + 1;
        for p in s.premises() {
            if p >= idx {
                return Err(CpError::BadPremise { step, premise: p + 1 });
            }
        }
        let line = match s {
            CpStep::ClauseAxiom(k) => {
                clause_to_inequality(formula.clause(*k).ok_or(CpError::BadClause { step, clause: k + 1 })?)
            }
            CpStep::BoolAxiom { var, upper } => {
                if *var == 0 || *var > n {
                    return Err(CpError::VariableOutOfRange { step, var: *var, n });
                }
                if *upper {
                    CpLine::from_i64(&[(*var, -1)], -1)
                } else {
                    CpLine::from_i64(&[(*var, 1)], 0)
                }
            }
            CpStep::LinComb { i, j, c1, c2 } => {
                for c in [c1, c2] {
                    if c.is_negative() {
                        return Err(CpError::NegativeCoefficient { step, coeff: c.to_string() });
                    }
                }
                lines[*i].scaled_sum(c1, &lines[*j], c2)
            }
            CpStep::Divide { i, c } => {
                let gcd = lines[*i].gcd().ok_or(CpError::DivideZeroForm { step })?;
                if *c != gcd {
                    return Err(CpError::WrongDivisor { step, got: c.to_string(), gcd: gcd.to_string() });
                }
                lines[*i].divide(c).expect("gcd divides every coefficient")
            }
            CpStep::Semantic { i, j, line } => {
                if mode == CpMode::Syntactic {
                    return Err(CpError::SemanticNotAllowed { step });
                }
                if line.max_var() > n {
                    return Err(CpError::VariableOutOfRange { step, var: line.max_var(), n });
                }
                match semantic_counterexample(&lines[*i], &lines[*j], line, cap) {
                    Err((size, cap)) => return Err(CpError::SupportCap { step, size, cap }),
                    Ok(Some(point)) => return Err(CpError::UnsoundSemantic { step, point }),
                    Ok(None) => line.clone(),
                }
            }
        };
        lines.push(line);
    }
    Ok(lines)
}

/// Checks a refutation in the given mode.
pub fn verify_cp(formula: &CnfFormula, proof: &CpProof, mode: CpMode, support_cap: usize) -> Result<CpMeasures, CpError> {
    if proof.steps.is_empty() {
        return Err(CpError::Empty);
    }
    let lines = derive_lines(formula, proof, mode, support_cap)?;
    let last = lines.last().expect("nonempty");
    if !last.is_contradiction() {
        return Err(CpError::NonContradictoryFinal { line: last.to_string() });
    }
    let mut depth = vec![0usize; proof.steps.len()];
    if proof.tree_like {
        let mut uses = vec![0usize; proof.steps.len()];
        for (i, s) in proof.steps.iter().enumerate() {
            for p in s.premises() {
                uses[p] += 1;
                depth[i] = depth[i].max(depth[p] + 1);
            }
        }
        if let Some(step) = uses.iter().position(|&u| u > 1) {
            return Err(CpError::TreeViolation { step: step + 1 });
        }
    }
    let max_coeff_bits = lines
        .iter()
        .flat_map(|l| l.coeffs.values().chain(std::iter::once(&l.bound)))
        .map(|a| a.bits())
        .max()
        .unwrap_or(0);
    Ok(CpMeasures { length: proof.steps.len(), depth: proof.tree_like.then(|| depth[depth.len() - 1]), max_coeff_bits })
}

/// Simulates a Resolution refutation: each resolvent becomes the sum of its
/// premises' lines, topped up with Boolean axioms for literals in only one
/// premise, then halved.
pub fn resolution_to_cp(formula: &CnfFormula, proof: &ResolutionProof) -> Result<CpProof, ResolutionError> {
    let clauses = proof.derive(formula)?;
    let two = BigInt::from(2);
    let one = BigInt::one();
    let mut steps = Vec::new();
    let mut at = vec![0usize; proof.steps.len()];
    for (s, step) in proof.steps.iter().enumerate() {
        match *step {
            ResStep::Axiom(k) => steps.push(CpStep::ClauseAxiom(k)),
            ResStep::Resolve { left, right, pivot } => {
                steps.push(CpStep::LinComb { i: at[left], j: at[right], c1: one.clone(), c2: one.clone() });
                let (a, b) = (&clauses[left], &clauses[right]);
                for lit in clauses[s].lits() {
                    if lit.var() != pivot && a.contains(*lit) != b.contains(*lit) {
                        steps.push(CpStep::BoolAxiom { var: lit.var(), upper: !lit.is_positive() });
                        let k = steps.len();
                        steps.push(CpStep::LinComb { i: k - 2, j: k - 1, c1: one.clone(), c2: one.clone() });
                    }
                }
                if !clauses[s].is_empty() {
                    steps.push(CpStep::Divide { i: steps.len() - 1, c: two.clone() });
                }
            }
        }
        at[s] = steps.len() - 1;
    }
    Ok(CpProof { steps, tree_like: proof.tree_like })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Lit;

    fn line(c: &[(u32, i64)], b: i64) -> CpLine {
        CpLine::from_i64(c, b)
    }

    #[test]
    fn clause_encoding_examples() {
        let c = Clause::new([Lit::pos(1), Lit::neg(2)]);
        assert_eq!(clause_to_inequality(&c), line(&[(1, 1), (2, -1)], 0));
        assert_eq!(clause_to_inequality(&Clause::new([Lit::pos(1)])), line(&[(1, 1)], 1));
        assert!(clause_to_inequality(&Clause::empty()).is_contradiction());
    }

    #[test]
    fn division_rounds_bound_up() {
        let l = line(&[(1, 2), (2, 2)], 3);
        assert_eq!(l.gcd(), Some(BigInt::from(2)));
        assert_eq!(l.divide(&BigInt::from(2)).unwrap(), line(&[(1, 1), (2, 1)], 2));
        assert_eq!(line(&[(1, 2), (2, -2)], -3).divide(&BigInt::from(2)).unwrap(), line(&[(1, 1), (2, -1)], -1));
        assert!(l.divide(&BigInt::from(3)).is_none());
    }

    #[test]
    fn lincomb_reaches_contradiction() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let p = CpProof::parse("a 1\na 2\nl 1 2 1 1\n").unwrap();
        let m = verify_cp(&f, &p, CpMode::Syntactic, 24).unwrap();
        assert_eq!(m.length, 3);
        assert_eq!(CpProof::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn unsound_semantic_step_is_rejected() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let p = CpProof::parse("b 1 0\nb 1 1\ns 1 2 : 1 >= 1\n").unwrap();
        match verify_cp(&f, &p, CpMode::Semantic, 24) {
            Err(CpError::UnsoundSemantic { step: 3, point }) => assert_eq!(point, "x1=0"),
            other => panic!("{other:?}"),
        }
        assert_eq!(verify_cp(&f, &p, CpMode::Syntactic, 24), Err(CpError::SemanticNotAllowed { step: 3 }));
    }

    #[test]
    fn rule_errors() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1], &[-2]]).unwrap();
        let cases = [
            ("a 1\na 2\nl 1 2 1 -1", CpError::NegativeCoefficient { step: 3, coeff: "-1".into() }),
            ("a 1\nd 1 2", CpError::WrongDivisor { step: 2, got: "2".into(), gcd: "1".into() }),
            ("a 1\na 2\nl 1 2 1 1\na 3\nl 3 4 1 1\nd 5 1", CpError::DivideZeroForm { step: 6 }),
            ("a 4", CpError::BadClause { step: 1, clause: 4 }),
            ("b 3 0", CpError::VariableOutOfRange { step: 1, var: 3, n: 2 }),
            ("a 1\nl 1 2 1 1", CpError::BadPremise { step: 2, premise: 2 }),
            ("a 1", CpError::NonContradictoryFinal { line: "+1 x1 +1 x2 >= 1".into() }),
        ];
        for (text, expected) in cases {
            let p = CpProof::parse(text).unwrap();
            assert_eq!(verify_cp(&f, &p, CpMode::Semantic, 24), Err(expected), "{text}");
        }
        let ok = CpProof::parse("a 1\na 2\nl 1 2 1 1\na 3\nl 3 4 1 1\n").unwrap();
        assert!(verify_cp(&f, &ok, CpMode::Syntactic, 24).is_ok());
        let capped = CpProof::parse("a 1\na 1\ns 1 2 : 1 1 >= 1").unwrap();
        assert_eq!(verify_cp(&f, &capped, CpMode::Semantic, 1), Err(CpError::SupportCap { step: 3, size: 2, cap: 1 }));
    }

    #[test]
    fn semantic_conversion_preserves_validity() {
        let f = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let r = ResolutionProof::parse("tree\na 1\na 2\nr 1 2 2\na 3\na 4\nr 4 5 2\nr 3 6 1\n").unwrap();
        let cp = resolution_to_cp(&f, &r).unwrap();
        let m = verify_cp(&f, &cp, CpMode::Syntactic, 24).unwrap();
        assert!(m.depth.is_some());
        let sem = cp.to_semantic(&f).unwrap();
        assert_eq!(verify_cp(&f, &sem, CpMode::Semantic, 24).map(|m| m.length), Ok(cp.steps.len()));
        assert_eq!(CpProof::parse(&sem.to_text()).unwrap(), sem);
    }

    #[test]
    fn gray_code_agrees_with_direct_evaluation() {
        let big: BigInt = BigInt::from(1u8) << 80;
        let p1 = CpLine::new([(1, big.clone()), (2, BigInt::from(1))], big.clone());
        let p2 = line(&[(2, -1), (3, 1)], 0);
        let c = line(&[(1, 1)], 1);
        assert_eq!(semantic_counterexample(&p1, &p2, &c, 24).unwrap(), None);
        let small = line(&[(1, 5), (2, 1)], 5);
        assert_eq!(semantic_counterexample(&small, &p2, &c, 24).unwrap(), None);
        let weak = line(&[(1, 5), (2, 5)], 5);
        assert_eq!(semantic_counterexample(&weak, &p2, &c, 24).unwrap(), Some("x1=0,x2=1,x3=1".into()));
    }
}
