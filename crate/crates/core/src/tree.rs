//! Binary decision trees with labelled leaves.
//!
//! The text form is a preorder listing, one node per line: `q <var>` for a
//! query (its 0-branch follows, then its 1-branch) and `l <output>` for a
//! leaf. Outputs are 1-based clause indices when the tree solves a CNF search
//! problem.

use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{CnfFormula, PartialAssignment};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DecisionTree<V, O> {
    Leaf(O),
    Query { var: V, zero: Box<DecisionTree<V, O>>, one: Box<DecisionTree<V, O>> },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("line {line}: malformed node `{text}`")]
    Malformed { line: usize, text: String },
    #[error("tree text ended before the tree was complete")]
    Truncated,
    #[error("trailing nodes after a complete tree")]
    Trailing,
    #[error("leaf on path {path} outputs clause {clause}, which the path does not falsify")]
    WrongLeaf { path: String, clause: usize },
    #[error("leaf outputs clause {clause}, but the formula has {count} clauses")]
    UnknownClause { clause: usize, count: usize },
    #[error("query of variable {var} outside 1..={var_count}")]
    UnknownVariable { var: u32, var_count: u32 },
}

impl<V, O> DecisionTree<V, O> {
    pub fn query(var: V, zero: Self, one: Self) -> Self {
        DecisionTree::Query { var, zero: Box::new(zero), one: Box::new(one) }
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Query { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    /// Number of nodes, leaves included.
    pub fn size(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Query { zero, one, .. } => 1 + zero.size() + one.size(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Query { zero, one, .. } => zero.leaf_count() + one.leaf_count(),
        }
    }

    /// Walks the tree answering queries with `answer`; returns the leaf
    /// label and the number of queries made.
    pub fn evaluate<F: FnMut(&V) -> bool>(&self, mut answer: F) -> (&O, usize) {
        let mut node = self;
        let mut steps = 0;
        loop {
            match node {
                DecisionTree::Leaf(o) => return (o, steps),
                DecisionTree::Query { var, zero, one } => {
                    node = if answer(var) { one } else { zero };
                    steps += 1;
                }
            }
        }
    }

    /// Calls `visit` on every leaf with the answers along its path.
    pub fn for_each_leaf<'a, F: FnMut(&[(&'a V, bool)], &'a O)>(&'a self, mut visit: F) {
        fn go<'a, V, O, F: FnMut(&[(&'a V, bool)], &'a O)>(
            node: &'a DecisionTree<V, O>,
            path: &mut Vec<(&'a V, bool)>,
            visit: &mut F,
        ) {
            match node {
                DecisionTree::Leaf(o) => visit(path, o),
                DecisionTree::Query { var, zero, one } => {
                    path.push((var, false));
                    go(zero, path, visit);
                    path.pop();
                    path.push((var, true));
                    go(one, path, visit);
                    path.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut visit);
    }

    pub fn map_leaves<P, F: FnMut(&O) -> P>(&self, f: &mut F) -> DecisionTree<V, P>
    where
        V: Clone,
    {
        match self {
            DecisionTree::Leaf(o) => DecisionTree::Leaf(f(o)),
            DecisionTree::Query { var, zero, one } => {
                DecisionTree::query(var.clone(), zero.map_leaves(f), one.map_leaves(f))
            }
        }
    }
}

impl<V: Display, O: Display> DecisionTree<V, O> {
    pub fn to_preorder(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                DecisionTree::Leaf(o) => out.push_str(&format!("l {o}\n")),
                DecisionTree::Query { var, zero, one } => {
                    out.push_str(&format!("q {var}\n"));
                    stack.push(one);
                    stack.push(zero);
                }
            }
        }
        out
    }
}

impl<V: FromStr, O: FromStr> DecisionTree<V, O> {
    pub fn parse_preorder(text: &str) -> Result<Self, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
        let tree = parse_node(&mut lines)?;
        if lines.next().is_some() {
            return Err(TreeError::Trailing);
        }
        Ok(tree)
    }
}

fn parse_node<'a, V: FromStr, O: FromStr, I: Iterator<Item = (usize, &'a str)>>(
    lines: &mut I,
) -> Result<DecisionTree<V, O>, TreeError> {
    // Iterative parse: a stack of query nodes awaiting children.
    enum Pending<V, O> {
        Zero(V),
        One(V, DecisionTree<V, O>),
    }
    let mut stack: Vec<Pending<V, O>> = Vec::new();
    loop {
        let (line, text) = lines.next().ok_or(TreeError::Truncated)?;
        let malformed = || TreeError::Malformed { line, text: text.to_string() };
        let mut parts = text.split_whitespace();
        let kind = parts.next().ok_or_else(malformed)?;
        let arg = parts.next().ok_or_else(malformed)?;
        if parts.next().is_some() {
            return Err(malformed());
        }
        let mut done = match kind {
            "q" => {
                stack.push(Pending::Zero(arg.parse().map_err(|_| malformed())?));
                continue;
            }
            "l" => DecisionTree::Leaf(arg.parse().map_err(|_| malformed())?),
            _ => return Err(malformed()),
        };
        loop {
            match stack.pop() {
                None => return Ok(done),
                Some(Pending::Zero(v)) => {
                    stack.push(Pending::One(v, done));
                    break;
                }
                Some(Pending::One(v, zero)) => done = DecisionTree::query(v, zero, done),
            }
        }
    }
}

/// Checks that a tree over source variables with 0-based clause outputs
/// solves the falsified-clause problem of `formula`: every leaf's clause is
/// falsified by the answers on its path.
pub fn verify_cnf_tree(formula: &CnfFormula, tree: &DecisionTree<u32, usize>) -> Result<(), TreeError> {
    let mut result = Ok(());
    tree.for_each_leaf(|path, &clause| {
        if result.is_err() {
            return;
        }
        let mut a = PartialAssignment::new(formula.var_count());
        for &(&var, value) in path {
            if var == 0 || var > formula.var_count() {
                result = Err(TreeError::UnknownVariable { var, var_count: formula.var_count() });
                return;
            }
            a.set(var, value);
        }
        match formula.clause(clause) {
            None => result = Err(TreeError::UnknownClause { clause, count: formula.len() }),
            Some(c) if !c.falsified_by(&a) => result = Err(TreeError::WrongLeaf { path: a.to_string(), clause }),
            Some(_) => {}
        }
    });
    result
}
