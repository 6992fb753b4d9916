//! Paths, signed path combinations, and their edge-vector images.
//!
//! Path addition and removal on (multi)graphs are modelled as arithmetic on
//! [`EdgeVector`]s: a multigraph with parallel edges is an edge vector with
//! entries above one, and removal subtracts.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{EdgeId, EdgeRef, NetworkGraph, NodeRef};

/// A node sequence with strictly increasing layers.
///
/// Full paths run from layer 0 to the last layer; the basis construction also
/// uses shorter prefixes of that shape internally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    nodes: Vec<NodeRef>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least two nodes")]
    TooShort,
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeRef),
    #[error("{0} is not an edge of the graph")]
    MissingEdge(EdgeRef),
    #[error("path starts at {0}, not in the input layer")]
    WrongStart(NodeRef),
    #[error("path ends at {0}, not in the output layer")]
    WrongEnd(NodeRef),
}

impl Path {
    /// Validates `nodes` as an input-to-output path of `g`.
    pub fn new(g: &NetworkGraph, nodes: Vec<NodeRef>) -> Result<Self, PathError> {
        let p = Self { nodes };
        p.validate(g)?;
        Ok(p)
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<NodeRef>) -> Self {
        Self { nodes }
    }

    /// Single-edge path.
    pub fn from_edge(e: EdgeRef) -> Self {
        Self {
            nodes: vec![e.tail, e.head],
        }
    }

    pub fn validate(&self, g: &NetworkGraph) -> Result<(), PathError> {
        if self.nodes.len() < 2 {
            return Err(PathError::TooShort);
        }
        if let Some(&n) = self.nodes.iter().find(|&&n| !g.contains_node(n)) {
            return Err(PathError::UnknownNode(n));
        }
        // Every consecutive pair must be an edge; edges point to higher
        // layers, so this also gives increasing layers and distinct nodes.
        for w in self.nodes.windows(2) {
            let e = EdgeRef::new(w[0], w[1]);
            if w[0].layer >= w[1].layer || g.edge_id(&e).is_none() {
                return Err(PathError::MissingEdge(e));
            }
        }
        if self.first().layer != 0 {
            return Err(PathError::WrongStart(self.first()));
        }
        if self.last().layer != g.last_layer() {
            return Err(PathError::WrongEnd(self.last()));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[NodeRef] {
        &self.nodes
    }

    pub fn first(&self) -> NodeRef {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeRef {
        *self.nodes.last().expect("path has nodes")
    }

    pub fn layers(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.layer).collect()
    }

    pub fn edge_refs(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.nodes.windows(2).map(|w| EdgeRef::new(w[0], w[1]))
    }

    /// Edge ids on `g`. The path must lie on `g`.
    pub fn edge_ids<'a>(&'a self, g: &'a NetworkGraph) -> impl Iterator<Item = EdgeId> + 'a {
        self.edge_refs().map(move |e| {
            g.edge_id(&e)
                .unwrap_or_else(|| panic!("{e} is not an edge of the host graph"))
        })
    }

    /// `self` followed by `next`, which must start where `self` ends.
    pub fn concat(&self, next: &Path) -> Path {
        assert_eq!(self.last(), next.first(), "paths do not meet");
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&next.nodes[1..]);
        Path { nodes }
    }

    /// Applies `f` to every node.
    pub fn map_nodes(&self, f: impl Fn(NodeRef) -> NodeRef) -> Path {
        Path {
            nodes: self.nodes.iter().map(|&n| f(n)).collect(),
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Signed edge multiplicities over a fixed host graph. Zero entries are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeVector {
    coefficients: BTreeMap<EdgeId, i64>,
}

impl EdgeVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn get(&self, id: EdgeId) -> i64 {
        self.coefficients.get(&id).copied().unwrap_or(0)
    }

    pub fn add_to(&mut self, id: EdgeId, delta: i64) {
        let entry = self.coefficients.entry(id).or_insert(0);
        *entry += delta;
        if *entry == 0 {
            self.coefficients.remove(&id);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, i64)> + '_ {
        self.coefficients.iter().map(|(&id, &c)| (id, c))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Adds `k` times the indicator of `p`.
    pub fn add_path(&mut self, g: &NetworkGraph, p: &Path, k: i64) {
        for id in p.edge_ids(g) {
            self.add_to(id, k);
        }
    }

    pub fn to_dense(&self, m: usize) -> Vec<i64> {
        let mut v = vec![0; m];
        for (id, c) in self.iter() {
            v[id.0] = c;
        }
        v
    }

    pub fn records(&self, g: &NetworkGraph) -> Vec<EdgeCoefficient> {
        self.iter()
            .map(|(id, coefficient)| {
                let e = g.edge(id);
                EdgeCoefficient {
                    tail: e.tail,
                    head: e.head,
                    coefficient,
                }
            })
            .collect()
    }
}

impl Add for &EdgeVector {
    type Output = EdgeVector;
    fn add(self, rhs: &EdgeVector) -> EdgeVector {
        let mut out = self.clone();
        for (id, c) in rhs.iter() {
            out.add_to(id, c);
        }
        out
    }
}

impl Sub for &EdgeVector {
    type Output = EdgeVector;
    fn sub(self, rhs: &EdgeVector) -> EdgeVector {
        let mut out = self.clone();
        for (id, c) in rhs.iter() {
            out.add_to(id, -c);
        }
        out
    }
}

impl Neg for &EdgeVector {
    type Output = EdgeVector;
    fn neg(self) -> EdgeVector {
        EdgeVector {
            coefficients: self.coefficients.iter().map(|(&id, &c)| (id, -c)).collect(),
        }
    }
}

/// Serialized edge vector entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCoefficient {
    pub tail: NodeRef,
    pub head: NodeRef,
    pub coefficient: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.factor() as i8
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub sign: Sign,
    pub path: Path,
}

/// Ordered signed sum of paths.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathCombination {
    pub terms: Vec<Term>,
}

impl PathCombination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plus(mut self, p: &Path) -> Self {
        self.terms.push(Term {
            sign: Sign::Plus,
            path: p.clone(),
        });
        self
    }

    pub fn minus(mut self, p: &Path) -> Self {
        self.terms.push(Term {
            sign: Sign::Minus,
            path: p.clone(),
        });
        self
    }

    pub fn concat(mut self, other: PathCombination) -> Self {
        self.terms.extend(other.terms);
        self
    }
}

/// The 0/1 edge indicator of `p`.
pub fn path_edges(g: &NetworkGraph, p: &Path) -> EdgeVector {
    let mut v = EdgeVector::zero();
    v.add_path(g, p, 1);
    v
}

/// Signed sum of edge indicators. Shared edges of two added paths get
/// multiplicity two.
pub fn evaluate(g: &NetworkGraph, c: &PathCombination) -> EdgeVector {
    let mut v = EdgeVector::zero();
    for t in &c.terms {
        v.add_path(g, &t.path, t.sign.factor());
    }
    v
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("path {path} is not contained in the graph (edge {missing} has multiplicity {have})")]
pub struct PathNotSubgraph {
    pub path: Path,
    pub missing: EdgeRef,
    pub have: i64,
}

/// Removes `p` from the multigraph `h`. Every edge of `p` must be present.
pub fn graph_remove_path(
    g: &NetworkGraph,
    h: &EdgeVector,
    p: &Path,
) -> Result<EdgeVector, PathNotSubgraph> {
    let mut out = h.clone();
    for id in p.edge_ids(g) {
        let have = out.get(id);
        if have < 1 {
            return Err(PathNotSubgraph {
                path: p.clone(),
                missing: g.edge(id),
                have,
            });
        }
        out.add_to(id, -1);
    }
    Ok(out)
}

/// Why an edge vector does not describe a single input-to-output path.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotAPath {
    #[error("the vector is zero")]
    Empty,
    #[error("edge {edge} has coefficient {coefficient}")]
    NonBinary { edge: EdgeRef, coefficient: i64 },
    #[error("node {node} has more than one incoming or outgoing edge")]
    Branching { node: NodeRef },
    #[error("the edges do not form one connected chain")]
    Disconnected,
    #[error("the chain runs from {start} to {end}, not input to output")]
    WrongEndpoints { start: NodeRef, end: NodeRef },
}

/// Recovers the unique path whose indicator equals `v`.
pub fn as_path(g: &NetworkGraph, v: &EdgeVector) -> Result<Path, NotAPath> {
    if v.is_zero() {
        return Err(NotAPath::Empty);
    }
    let mut next: BTreeMap<NodeRef, NodeRef> = BTreeMap::new();
    let mut has_in: BTreeMap<NodeRef, ()> = BTreeMap::new();
    for (id, c) in v.iter() {
        let e = g.edge(id);
        if c != 1 {
            return Err(NotAPath::NonBinary {
                edge: e,
                coefficient: c,
            });
        }
        if next.insert(e.tail, e.head).is_some() {
            return Err(NotAPath::Branching { node: e.tail });
        }
        if has_in.insert(e.head, ()).is_some() {
            return Err(NotAPath::Branching { node: e.head });
        }
    }
    let mut starts = next.keys().filter(|n| !has_in.contains_key(n));
    let start = match (starts.next(), starts.next()) {
        (Some(&s), None) => s,
        _ => return Err(NotAPath::Disconnected),
    };
    let mut nodes = vec![start];
    let mut cur = start;
    while let Some(&h) = next.get(&cur) {
        nodes.push(h);
        cur = h;
    }
    if nodes.len() - 1 != v.len() {
        return Err(NotAPath::Disconnected);
    }
    if start.layer != 0 || cur.layer != g.last_layer() {
        return Err(NotAPath::WrongEndpoints { start, end: cur });
    }
    Ok(Path::from_nodes_unchecked(nodes))
}
