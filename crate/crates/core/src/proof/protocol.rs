//! Real communication protocols: binary trees whose inner nodes test
//! `a_T(x) < b_T(y)` with rational labelings over finite domains.
//!
//! JSON form: `{"x_size": n, "y_size": m, "root": node}` where a node is
//! `{"leaf": o}` or `{"a": ["p/q", ...], "b": [...], "left": node, "right": node}`.

use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A rational labeling of one side's inputs. Nodes may share labelings.
pub type Labeling = Arc<[BigRational]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProtocolNode {
    Leaf(usize),
    Test { a: Labeling, b: Labeling, left: Box<ProtocolNode>, right: Box<ProtocolNode> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealProtocol {
    pub x_size: usize,
    pub y_size: usize,
    pub root: ProtocolNode,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("input ({x}, {y}) outside the domain {x_size} x {y_size}")]
    DomainMismatch { x: usize, y: usize, x_size: usize, y_size: usize },
    #[error("labeling at depth {depth} has {got} entries, expected {expected}")]
    LabelingLength { depth: usize, got: usize, expected: usize },
    #[error("bad rational `{0}`")]
    BadRational(String),
    #[error("malformed protocol document: {0}")]
    Json(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Leaf { leaf: usize },
    Test { a: Vec<String>, b: Vec<String>, left: Box<NodeDoc>, right: Box<NodeDoc> },
}

#[derive(Serialize, Deserialize)]
struct ProtocolDoc {
    x_size: usize,
    y_size: usize,
    root: NodeDoc,
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ProtocolError> {
    let bad = || ProtocolError::BadRational(s.to_string());
    let (p, q) = match s.trim().split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, num_bigint::BigInt::from(1)),
    };
    if q == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

impl ProtocolNode {
    pub fn depth(&self) -> usize {
        match self {
            ProtocolNode::Leaf(_) => 0,
            ProtocolNode::Test { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            ProtocolNode::Leaf(_) => 1,
            ProtocolNode::Test { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    fn to_doc(&self) -> NodeDoc {
        match self {
            ProtocolNode::Leaf(o) => NodeDoc::Leaf { leaf: *o },
            ProtocolNode::Test { a, b, left, right } => NodeDoc::Test {
                a: a.iter().map(format_rational).collect(),
                b: b.iter().map(format_rational).collect(),
                left: Box::new(left.to_doc()),
                right: Box::new(right.to_doc()),
            },
        }
    }

    fn from_doc(doc: NodeDoc) -> Result<Self, ProtocolError> {
        Ok(match doc {
            NodeDoc::Leaf { leaf } => ProtocolNode::Leaf(leaf),
            NodeDoc::Test { a, b, left, right } => ProtocolNode::Test {
                a: a.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?.into(),
                b: b.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?.into(),
                left: Box::new(ProtocolNode::from_doc(*left)?),
                right: Box::new(ProtocolNode::from_doc(*right)?),
            },
        })
    }
}

impl RealProtocol {
    pub fn new(x_size: usize, y_size: usize, root: ProtocolNode) -> Result<Self, ProtocolError> {
        let p = RealProtocol { x_size, y_size, root };
        p.validate()?;
        Ok(p)
    }

    /// Every labeling must be total over its domain.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let mut stack = vec![(&self.root, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            if let ProtocolNode::Test { a, b, left, right } = node {
                for (lab, expected) in [(a, self.x_size), (b, self.y_size)] {
                    if lab.len() != expected {
                        return Err(ProtocolError::LabelingLength { depth, got: lab.len(), expected });
                    }
                }
                stack.push((left, depth + 1));
                stack.push((right, depth + 1));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn to_json(&self) -> String {
        let doc = ProtocolDoc { x_size: self.x_size, y_size: self.y_size, root: self.root.to_doc() };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ProtocolError> {
        let doc: ProtocolDoc = serde_json::from_str(text).map_err(|e| ProtocolError::Json(e.to_string()))?;
        RealProtocol::new(doc.x_size, doc.y_size, ProtocolNode::from_doc(doc.root)?)
    }
}

/// Walks left at a node when `a(x) < b(y)`. Returns the leaf output and the
/// directions taken (`true` for left).
pub fn eval_protocol(p: &RealProtocol, x: usize, y: usize) -> Result<(usize, Vec<bool>), ProtocolError> {
    if x >= p.x_size || y >= p.y_size {
        return Err(ProtocolError::DomainMismatch { x, y, x_size: p.x_size, y_size: p.y_size });
    }
    let mut node = &p.root;
    let mut path = Vec::new();
    loop {
        match node {
            ProtocolNode::Leaf(o) => return Ok((*o, path)),
            ProtocolNode::Test { a, b, left, right } => {
                let inside = a[x] < b[y];
                path.push(inside);
                node = if inside { left } else { right };
            }
        }
    }
}
