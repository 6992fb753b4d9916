//! Upper level of the hierarchical construction.
//!
//! Since every block is complete bipartite, which node represents a layer
//! does not matter: the reduced one-node-per-layer graph is determined by the
//! block list alone. Its 0-to-L paths are the substructure paths.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact;
use crate::netgraph::{NetworkGraph, NetworkSpec, NodeRef};

/// One node per layer, one edge per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGraph {
    pub last_layer: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

/// Strictly increasing layer sequence from 0 to L.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubstructurePath {
    pub layers: Vec<usize>,
}

impl SubstructurePath {
    pub fn new(layers: Vec<usize>) -> Self {
        Self { layers }
    }

    /// Layer transitions `(j, l)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.layers.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Row-major `(L+1) x (L+1)` layer adjacency matrix of a substructure path:
/// bit `j * (L+1) + l` is set iff the path steps from layer `j` to `l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaVector {
    pub bits: Vec<u8>,
}

impl AlphaVector {
    pub fn side(&self) -> usize {
        (self.bits.len() as f64).sqrt().round() as usize
    }

    /// Recovers the layer sequence; `None` if the bits are not a 0-to-L chain.
    pub fn decode(&self) -> Option<SubstructurePath> {
        let side = self.side();
        if side * side != self.bits.len() || side == 0 {
            return None;
        }
        let mut layers = vec![0];
        let mut cur = 0;
        let mut seen = 0;
        while cur + 1 < side {
            let row = &self.bits[cur * side..(cur + 1) * side];
            let mut next = row
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 1)
                .map(|(l, _)| l);
            let l = next.next()?;
            if next.next().is_some() || l <= cur {
                return None;
            }
            layers.push(l);
            cur = l;
            seen += 1;
        }
        (self.bits.iter().filter(|&&b| b == 1).count() == seen)
            .then(|| SubstructurePath::new(layers))
    }

    pub fn as_i64(&self) -> Vec<i64> {
        self.bits.iter().map(|&b| b as i64).collect()
    }
}

/// Substructure paths in discovery order, their vectors, and the chosen
/// maximal independent subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstructureSet {
    pub paths: Vec<SubstructurePath>,
    pub alpha_vectors: Vec<AlphaVector>,
    pub independent: Vec<usize>,
}

impl SubstructureSet {
    pub fn independent_paths(&self) -> impl Iterator<Item = &SubstructurePath> + '_ {
        self.independent.iter().map(|&i| &self.paths[i])
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubstructureError {
    #[error("the output layer is unreachable from the input layer")]
    Unreachable,
    #[error("substructure path uses transition ({from},{to}), which is not a block")]
    MissingBlock { from: usize, to: usize },
}

/// Layer transitions shared by two substructure paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedEdges {
    pub first: SubstructurePath,
    pub second: SubstructurePath,
    pub transitions: Vec<(usize, usize)>,
}

pub fn reduced_graph(g: &NetworkGraph) -> ReducedGraph {
    ReducedGraph {
        last_layer: g.last_layer(),
        edges: g.blocks().iter().map(|b| (b.from, b.to)).collect(),
    }
}

/// Every 0-to-L path, breadth first: fewer transitions first, then
/// lexicographic.
pub fn enumerate_substructure_paths(
    rg: &ReducedGraph,
) -> Result<Vec<SubstructurePath>, SubstructureError> {
    let last = rg.last_layer;
    let mut found = Vec::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::from([vec![0]]);
    while let Some(partial) = queue.pop_front() {
        let here = *partial.last().expect("never empty");
        if here == last {
            found.push(SubstructurePath::new(partial));
            continue;
        }
        for &(_, to) in rg.edges.range((here, 0)..(here + 1, 0)) {
            let mut next = partial.clone();
            next.push(to);
            queue.push_back(next);
        }
    }
    if found.is_empty() {
        return Err(SubstructureError::Unreachable);
    }
    // FIFO order with ascending successors already yields this; the sort pins it.
    found.sort_by(|a, b| {
        a.layers
            .len()
            .cmp(&b.layers.len())
            .then_with(|| a.layers.cmp(&b.layers))
    });
    Ok(found)
}

pub fn vectorize(p: &SubstructurePath, last_layer: usize) -> AlphaVector {
    let side = last_layer + 1;
    let mut bits = vec![0u8; side * side];
    for (j, l) in p.transitions() {
        bits[j * side + l] = 1;
    }
    AlphaVector { bits }
}

/// Greedy exact elimination in input order; see [`exact::greedy_independent`].
pub fn maximal_independent_subset(vectors: &[AlphaVector]) -> Vec<usize> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let rows: Vec<Vec<i64>> = vectors.iter().map(AlphaVector::as_i64).collect();
    exact::greedy_independent(first.bits.len(), &rows)
}

/// First pair (in list order) sharing a layer transition, if any.
pub fn check_pairwise_edge_disjoint(paths: &[SubstructurePath]) -> Result<(), SharedEdges> {
    for (i, a) in paths.iter().enumerate() {
        let ta: BTreeSet<_> = a.transitions().collect();
        for b in &paths[i + 1..] {
            let shared: Vec<_> = b.transitions().filter(|t| ta.contains(t)).collect();
            if !shared.is_empty() {
                return Err(SharedEdges {
                    first: a.clone(),
                    second: b.clone(),
                    transitions: shared,
                });
            }
        }
    }
    Ok(())
}

/// A skip-free network made of the layers a substructure path visits.
/// Local layer `r` is original layer `layer_map[r]`; node indices are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedSubgraph {
    pub graph: NetworkGraph,
    pub layer_map: Vec<usize>,
}

impl InducedSubgraph {
    pub fn to_original(&self, n: NodeRef) -> NodeRef {
        NodeRef::new(self.layer_map[n.layer], n.index)
    }
}

pub fn induced_subgraph(
    g: &NetworkGraph,
    p: &SubstructurePath,
) -> Result<InducedSubgraph, SubstructureError> {
    if let Some((from, to)) = p.transitions().find(|&(a, b)| !g.has_block(a, b)) {
        return Err(SubstructureError::MissingBlock { from, to });
    }
    let sizes: Vec<usize> = p.layers.iter().map(|&l| g.layer_size(l)).collect();
    let graph = NetworkGraph::build(&NetworkSpec::layered(&sizes)).map_err(|_| {
        SubstructureError::MissingBlock {
            from: p.layers[0],
            to: *p.layers.last().unwrap_or(&0),
        }
    })?;
    Ok(InducedSubgraph {
        graph,
        layer_map: p.layers.clone(),
    })
}

/// Reduced graph, BFS enumeration, vectorization, and maximal subset.
pub fn decompose(g: &NetworkGraph) -> Result<SubstructureSet, SubstructureError> {
    let rg = reduced_graph(g);
    let paths = enumerate_substructure_paths(&rg)?;
    let alpha_vectors: Vec<AlphaVector> =
        paths.iter().map(|p| vectorize(p, rg.last_layer)).collect();
    let independent = maximal_independent_subset(&alpha_vectors);
    Ok(SubstructureSet {
        paths,
        alpha_vectors,
        independent,
    })
}
