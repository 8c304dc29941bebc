//! Decision-dags with conjunction labels, and the same structure with
//! linear-threshold labels.
//!
//! A dag solves a search relation `S` when the root label is constantly 1,
//! every inner vertex `v` with children `u, u'` satisfies
//! `f_v⁻¹(1) ⊆ f_u⁻¹(1) ∪ f_u'⁻¹(1)`, and every leaf `v` with output `o`
//! satisfies `f_v⁻¹(1) ⊆ S⁻¹(o)`. Inner vertices may name the same child
//! twice; leaves have no children.
//!
//! Text format for conjunction dags (ids and outputs 1-based, ids listed in
//! order): `n <id> <u> <u'> : <lits> 0` for an inner vertex and
//! `l <id> <o> : <lits> 0` for a leaf. Lines starting with `c` or `p` are
//! skipped by the parser.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{Clause, Lit};
use crate::relation::SearchRelation;

pub const DEFAULT_SUPPORT_CAP: usize = 24;

/// A vertex label: a boolean function of finitely many variables.
pub trait VertexLabel {
    /// Variables the label depends on, ascending, 1-based.
    fn support(&self) -> Vec<u32>;

    /// Value on the assignment `x` (`x[v-1]` is variable `v`).
    fn eval_on(&self, x: &[bool]) -> bool;

    /// Literals true on every satisfying point; lets checks skip the rest of
    /// the cube.
    fn pinned(&self) -> Vec<Lit> {
        Vec::new()
    }

    /// True when the label is known to have no satisfying point.
    fn is_contradictory(&self) -> bool {
        false
    }
}

/// A conjunction of literals, kept sorted. Contradictory conjunctions are
/// allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Conjunction {
    lits: Vec<Lit>,
}

impl Conjunction {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Self {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        Conjunction { lits }
    }

    pub fn top() -> Self {
        Conjunction::default()
    }

    /// `¬D`: the conjunction of the negated literals of `D`.
    pub fn negation_of(clause: &Clause) -> Self {
        Conjunction::new(clause.lits().iter().map(|l| l.negated()))
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn and(&self, more: &[Lit]) -> Self {
        Conjunction::new(self.lits.iter().chain(more).copied())
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

impl VertexLabel for Conjunction {
    fn support(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.lits.iter().map(|l| l.var()).collect();
        v.dedup();
        v
    }

    fn eval_on(&self, x: &[bool]) -> bool {
        self.lits.iter().all(|l| l.eval(x[l.var() as usize - 1]))
    }

    fn pinned(&self) -> Vec<Lit> {
        if self.is_contradictory() {
            Vec::new()
        } else {
            self.lits.clone()
        }
    }

    fn is_contradictory(&self) -> bool {
        self.lits.windows(2).any(|w| w[0].var() == w[1].var())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagVertex<L> {
    pub label: L,
    pub children: Vec<usize>,
    pub output: Option<usize>,
}

impl<L> DagVertex<L> {
    pub fn leaf(label: L, output: usize) -> Self {
        DagVertex { label, children: Vec::new(), output: Some(output) }
    }

    pub fn inner(label: L, u: usize, u2: usize) -> Self {
        DagVertex { label, children: vec![u, u2], output: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag<L> {
    vertices: Vec<DagVertex<L>>,
}

pub type ConjunctionDag = Dag<Conjunction>;

/// Dags labelled with linear threshold functions.
pub type LtfDag = Dag<crate::proof::cp::CpLine>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DagMeasures {
    pub size: usize,
    pub depth: usize,
    pub width: usize,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("dag has no vertices")]
    Empty,
    #[error("vertex {vertex}: child {child} does not exist")]
    BadChild { vertex: usize, child: usize },
    #[error("vertex {vertex} has {count} children; at most 2 are allowed")]
    TooManyChildren { vertex: usize, count: usize },
    #[error("vertex {vertex} has no children and no output")]
    LeafWithoutOutput { vertex: usize },
    #[error("vertex {vertex} has both children and an output")]
    OutputOnInner { vertex: usize },
    #[error("vertex {vertex}: output {output} outside the relation's {count} outputs")]
    BadOutput { vertex: usize, output: usize, count: usize },
    #[error("vertex {vertex}: label mentions variable {var}, relation has {bits} input bits")]
    VariableOutOfRange { vertex: usize, var: u32, bits: usize },
    #[error("dag has {count} roots; exactly one is required")]
    RootCount { count: usize },
    #[error("dag contains a cycle")]
    Cycle,
    #[error("root label is not constantly true (fails at {point})")]
    RootNotTrue { point: String },
    #[error("vertex {vertex}: point {point} satisfies the label but neither child")]
    CoverFails { vertex: usize, point: String },
    #[error("leaf {vertex}: point {point} satisfies the label but output {output} is not valid there")]
    LeafFails { vertex: usize, output: usize, point: String },
    #[error("vertex {vertex}: {size} free variables exceed the cap of {cap}")]
    SupportCap { vertex: usize, size: usize, cap: usize },
    #[error("line {line}: malformed vertex `{text}`")]
    Syntax { line: usize, text: String },
}

impl<L> Dag<L> {
    pub fn new(vertices: Vec<DagVertex<L>>) -> Self {
        Dag { vertices }
    }

    pub fn vertices(&self) -> &[DagVertex<L>] {
        &self.vertices
    }

    pub fn vertices_mut(&mut self) -> &mut Vec<DagVertex<L>> {
        &mut self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Structural checks; returns a topological order (parents first) and the root.
    fn structure(&self) -> Result<(Vec<usize>, usize), DagError> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(DagError::Empty);
        }
        let mut indegree = vec![0usize; n];
        for (v, vert) in self.vertices.iter().enumerate() {
            if vert.children.len() > 2 {
                return Err(DagError::TooManyChildren { vertex: v, count: vert.children.len() });
            }
            match (vert.children.is_empty(), vert.output.is_some()) {
                (true, false) => return Err(DagError::LeafWithoutOutput { vertex: v }),
                (false, true) => return Err(DagError::OutputOnInner { vertex: v }),
                _ => {}
            }
            let distinct: BTreeSet<usize> = vert.children.iter().copied().collect();
            for &c in &distinct {
                if c >= n {
                    return Err(DagError::BadChild { vertex: v, child: c });
                }
                indegree[c] += 1;
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        if roots.len() != 1 {
            return Err(if roots.is_empty() { DagError::Cycle } else { DagError::RootCount { count: roots.len() } });
        }
        let mut order = Vec::with_capacity(n);
        let mut queue = roots.clone();
        while let Some(v) = queue.pop() {
            order.push(v);
            let distinct: BTreeSet<usize> = self.vertices[v].children.iter().copied().collect();
            for c in distinct {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if order.len() != n {
            return Err(DagError::Cycle);
        }
        Ok((order, roots[0]))
    }
}

fn point_string(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Enumerates assignments to `vars ∖ pinned(base)` with `base`'s pinned
/// literals fixed; stops at the first point where `bad` holds.
fn find_point<F: FnMut(&[bool]) -> bool>(
    x: &mut [bool],
    pinned: &[Lit],
    vars: &BTreeSet<u32>,
    cap: usize,
    vertex: usize,
    mut bad: F,
) -> Result<Option<Vec<bool>>, DagError> {
    for l in pinned {
        x[l.var() as usize - 1] = l.is_positive();
    }
    let pinned_vars: BTreeSet<u32> = pinned.iter().map(|l| l.var()).collect();
    let free: Vec<usize> = vars.difference(&pinned_vars).map(|&v| v as usize - 1).collect();
    if free.len() > cap {
        return Err(DagError::SupportCap { vertex, size: free.len(), cap });
    }
    for mask in 0u64..1 << free.len() {
        for (k, &b) in free.iter().enumerate() {
            x[b] = mask >> k & 1 == 1;
        }
        if bad(x) {
            return Ok(Some(x.to_vec()));
        }
    }
    Ok(None)
}

/// Verifies that `dag` solves `relation`; checks are exhaustive over the
/// variables that matter for each condition.
pub fn verify_decision_dag<L: VertexLabel, S: SearchRelation + ?Sized>(
    relation: &S,
    dag: &Dag<L>,
    support_cap: usize,
) -> Result<DagMeasures, DagError> {
    let (order, root) = dag.structure()?;
    let bits = relation.input_bits();
    let outputs = relation.output_count();
    for (v, vert) in dag.vertices.iter().enumerate() {
        if let Some(&var) = vert.label.support().iter().find(|&&var| var as usize > bits) {
            return Err(DagError::VariableOutOfRange { vertex: v, var, bits });
        }
        if let Some(o) = vert.output.filter(|&o| o >= outputs) {
            return Err(DagError::BadOutput { vertex: v, output: o, count: outputs });
        }
    }
    let mut x = vec![false; bits];
    let root_label = &dag.vertices[root].label;
    let support: BTreeSet<u32> = root_label.support().into_iter().collect();
    if let Some(p) = find_point(&mut x, &[], &support, support_cap, root, |x| !root_label.eval_on(x))? {
        return Err(DagError::RootNotTrue { point: point_string(&p) });
    }
    for (v, vert) in dag.vertices.iter().enumerate() {
        if vert.label.is_contradictory() {
            continue;
        }
        let pinned = vert.label.pinned();
        let mut vars: BTreeSet<u32> = vert.label.support().into_iter().collect();
        if let Some(o) = vert.output {
            match relation.output_support(o) {
                Some(sup) => vars.extend(sup.into_iter().map(|b| b as u32 + 1)),
                None => vars.extend(1..=bits as u32),
            }
            let bad = find_point(&mut x, &pinned, &vars, support_cap, v, |x| {
                vert.label.eval_on(x) && !relation.is_valid(x, o)
            })?;
            if let Some(p) = bad {
                return Err(DagError::LeafFails { vertex: v, output: o, point: point_string(&p) });
            }
        } else {
            let (u, u2) = (vert.children[0], *vert.children.last().expect("nonempty"));
            let (lu, lu2) = (&dag.vertices[u].label, &dag.vertices[u2].label);
            vars.extend(lu.support());
            vars.extend(lu2.support());
            let bad = find_point(&mut x, &pinned, &vars, support_cap, v, |x| {
                vert.label.eval_on(x) && !lu.eval_on(x) && !lu2.eval_on(x)
            })?;
            if let Some(p) = bad {
                return Err(DagError::CoverFails { vertex: v, point: point_string(&p) });
            }
        }
    }
    let mut depth = vec![0usize; dag.len()];
    for &v in order.iter().rev() {
        depth[v] = dag.vertices[v].children.iter().map(|&c| depth[c] + 1).max().unwrap_or(0);
    }
    Ok(DagMeasures {
        size: dag.len(),
        depth: depth[root],
        width: dag.vertices.iter().map(|v| v.label.support().len()).max().unwrap_or(0),
    })
}

impl ConjunctionDag {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            match v.output {
                Some(o) => out.push_str(&format!("l {} {} : {}\n", i + 1, o + 1, v.label)),
                None => {
                    let (u, u2) = (v.children[0], *v.children.last().expect("inner vertex"));
                    out.push_str(&format!("n {} {} {} : {}\n", i + 1, u + 1, u2 + 1, v.label));
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DagError> {
        let mut vertices = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('p') {
                continue;
            }
            let err = || DagError::Syntax { line: idx + 1, text: line.to_string() };
            let (head, tail) = line.split_once(':').ok_or_else(err)?;
            let head: Vec<&str> = head.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1).ok_or_else(err);
            let mut lits = Vec::new();
            let mut terminated = false;
            for tok in tail.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| err())?;
                if terminated {
                    return Err(err());
                }
                if v == 0 {
                    terminated = true;
                } else {
                    lits.push(Lit::from_dimacs(v).ok_or_else(err)?);
                }
            }
            if !terminated {
                return Err(err());
            }
            let label = Conjunction::new(lits);
            let vertex = match head.as_slice() {
                ["n", id, u, u2] if num(id)? == vertices.len() => DagVertex::inner(label, num(u)?, num(u2)?),
                ["l", id, o] if num(id)? == vertices.len() => DagVertex::leaf(label, num(o)?),
                _ => return Err(err()),
            };
            vertices.push(vertex);
        }
        Ok(Dag::new(vertices))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::CnfFormula;
    use crate::relation::{CnfRelation, ExplicitRelation};

    #[test]
    fn single_vertex_solves_trivial_relation() {
        let rel = ExplicitRelation::new(2, 2, vec![vec![1], vec![0, 1], vec![1], vec![1]]).unwrap();
        let dag = Dag::new(vec![DagVertex::leaf(Conjunction::top(), 1)]);
        assert_eq!(verify_decision_dag(&rel, &dag, 24).unwrap(), DagMeasures { size: 1, depth: 0, width: 0 });
        let wrong = Dag::new(vec![DagVertex::leaf(Conjunction::top(), 0)]);
        assert!(matches!(verify_decision_dag(&rel, &wrong, 24), Err(DagError::LeafFails { .. })));
    }

    fn x_not_x_dag() -> (CnfFormula, ConjunctionDag) {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let dag = ConjunctionDag::parse("n 1 2 3 : 0\nl 2 1 : -1 0\nl 3 2 : 1 0\n").unwrap();
        (f, dag)
    }

    #[test]
    fn text_round_trip_and_verification() {
        let (f, dag) = x_not_x_dag();
        assert_eq!(ConjunctionDag::parse(&dag.to_text()).unwrap(), dag);
        let m = verify_decision_dag(&CnfRelation::new(&f), &dag, 24).unwrap();
        assert_eq!(m, DagMeasures { size: 3, depth: 1, width: 1 });
    }

    #[test]
    fn broken_cover_is_reported() {
        let (f, mut dag) = x_not_x_dag();
        dag.vertices_mut()[0].children = vec![1, 1];
        assert!(matches!(verify_decision_dag(&CnfRelation::new(&f), &dag, 24), Err(DagError::RootCount { count: 2 })));
        let mut dag2 = ConjunctionDag::parse("n 1 2 2 : 0\nl 2 1 : -1 0\n").unwrap();
        assert!(matches!(verify_decision_dag(&CnfRelation::new(&f), &dag2, 24), Err(DagError::CoverFails { .. })));
        dag2.vertices_mut()[1].label = Conjunction::top();
        assert!(matches!(verify_decision_dag(&CnfRelation::new(&f), &dag2, 24), Err(DagError::LeafFails { .. })));
    }

    #[test]
    fn structural_errors() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let rel = CnfRelation::new(&f);
        let leafless = Dag::new(vec![DagVertex { label: Conjunction::top(), children: vec![], output: None }]);
        assert!(matches!(verify_decision_dag(&rel, &leafless, 24), Err(DagError::LeafWithoutOutput { .. })));
        let both = Dag::new(vec![
            DagVertex { label: Conjunction::top(), children: vec![1], output: Some(0) },
            DagVertex::leaf(Conjunction::top(), 0),
        ]);
        assert!(matches!(verify_decision_dag(&rel, &both, 24), Err(DagError::OutputOnInner { .. })));
        let cyclic = Dag::new(vec![
            DagVertex::inner(Conjunction::top(), 1, 1),
            DagVertex::inner(Conjunction::top(), 2, 2),
            DagVertex::inner(Conjunction::top(), 1, 1),
        ]);
        assert!(matches!(verify_decision_dag(&rel, &cyclic, 24), Err(DagError::Cycle)));
        let bad_root = ConjunctionDag::parse("l 1 1 : -1 0\n").unwrap();
        assert!(matches!(verify_decision_dag(&rel, &bad_root, 24), Err(DagError::RootNotTrue { .. })));
    }

    #[test]
    fn contradictory_labels_cover_vacuously() {
        let f = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let dag = ConjunctionDag::parse("n 1 2 3 : 0\nl 2 1 : -1 0\nn 3 4 4 : 1 0\nl 4 2 : 1 -1 0\n").unwrap();
        assert!(verify_decision_dag(&CnfRelation::new(&f), &dag, 24).is_err());
        let dag = ConjunctionDag::parse("n 1 2 3 : 0\nl 2 1 : -1 0\nl 3 2 : 1 0\n").unwrap();
        assert!(verify_decision_dag(&CnfRelation::new(&f), &dag, 24).is_ok());
        let odd = ConjunctionDag::parse("n 1 2 3 : 0\nl 2 1 : -1 0\nn 3 4 5 : 1 0\nl 4 2 : 1 0\nl 5 1 : 1 -1 0\n").unwrap();
        assert!(verify_decision_dag(&CnfRelation::new(&f), &odd, 24).is_ok());
    }
}
