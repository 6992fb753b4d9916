//! Layered fully-connected networks as directed acyclic graphs.
//!
//! A network is a list of layer sizes plus a list of blocks. Each block
//! `(from, to)` stands for every edge from a node of layer `from` to a node of
//! layer `to`. Edges are stored in canonical order: by block
//! `(from_layer, to_layer)`, then tail index, then head index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::path::Path;

/// Default cap on the number of input-to-output paths that may be enumerated.
pub const DEFAULT_PATH_LIMIT: u128 = 1_000_000;

/// A node `O_i^l`: layer `l` and 1-based index `i` inside that layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct NodeRef {
    pub layer: usize,
    pub index: usize,
}

impl NodeRef {
    pub const fn new(layer: usize, index: usize) -> Self {
        Self { layer, index }
    }
}

impl From<(usize, usize)> for NodeRef {
    fn from((layer, index): (usize, usize)) -> Self {
        Self { layer, index }
    }
}

impl From<NodeRef> for (usize, usize) {
    fn from(n: NodeRef) -> Self {
        (n.layer, n.index)
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.layer, self.index)
    }
}

/// A directed edge. Always points toward a higher layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    pub tail: NodeRef,
    pub head: NodeRef,
}

impl EdgeRef {
    pub const fn new(tail: NodeRef, head: NodeRef) -> Self {
        Self { tail, head }
    }

    /// Number of layers this edge jumps over; 0 for consecutive layers.
    pub fn skip_degree(&self) -> usize {
        self.head.layer - self.tail.layer - 1
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

/// Position of an edge in the canonical edge order of its graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

/// Complete bipartite edge set between two layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LayerBlock {
    pub from: usize,
    pub to: usize,
}

impl LayerBlock {
    pub const fn new(from: usize, to: usize) -> Self {
        Self { from, to }
    }
}

/// Optional per-edge weight annotation. Carried through, never used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub tail: NodeRef,
    pub head: NodeRef,
    pub value: f64,
}

/// The on-disk network description.
///
/// ```json
/// { "format_version": 1, "layers": [2, 3, 3, 2],
///   "blocks": [{"from": 0, "to": 1}, {"from": 1, "to": 2},
///              {"from": 2, "to": 3}, {"from": 0, "to": 3}] }
/// ```
///
/// A missing `blocks` field means every consecutive pair `(l, l+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    pub layers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<LayerBlock>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightEntry>,
}

impl NetworkSpec {
    /// Consecutive blocks only.
    pub fn layered(layers: &[usize]) -> Self {
        Self {
            format_version: None,
            layers: layers.to_vec(),
            blocks: None,
            weights: Vec::new(),
        }
    }

    pub fn with_blocks(layers: &[usize], blocks: &[(usize, usize)]) -> Self {
        Self {
            format_version: None,
            layers: layers.to_vec(),
            blocks: Some(blocks.iter().map(|&(f, t)| LayerBlock::new(f, t)).collect()),
            weights: Vec::new(),
        }
    }

    /// Consecutive blocks plus the given extra (skip) blocks.
    pub fn with_skips(layers: &[usize], skips: &[(usize, usize)]) -> Self {
        let mut blocks: Vec<(usize, usize)> = (1..layers.len()).map(|l| (l - 1, l)).collect();
        blocks.extend_from_slice(skips);
        Self::with_blocks(layers, &blocks)
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        if let Some(v) = spec.format_version {
            if v != 1 {
                return Err(SpecError::UnsupportedVersion(v));
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid network spec: {0}")]
    Parse(String),
    #[error("invalid network spec: unsupported format_version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid network spec: need at least two layers, got {0}")]
    TooFewLayers(usize),
    #[error("invalid network spec: layer {0} is empty")]
    EmptyLayer(usize),
    #[error("invalid network spec: block ({from},{to}) out of range for {layers} layers")]
    BlockOutOfRange {
        from: usize,
        to: usize,
        layers: usize,
    },
    #[error("invalid network spec: duplicate block ({from},{to})")]
    DuplicateBlock { from: usize, to: usize },
    #[error("invalid network spec: weight on {0}, which is not an edge")]
    WeightNotOnEdge(EdgeRef),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("network has {count} input-to-output paths, above the limit of {limit}")]
pub struct PathCountExceedsLimit {
    pub count: u128,
    pub limit: u128,
}

/// Immutable layered DAG built from a [`NetworkSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGraph {
    layer_sizes: Vec<usize>,
    blocks: Vec<LayerBlock>,
    block_offsets: Vec<usize>,
    /// `(L+1)^2` table from `(from, to)` to position in `blocks`.
    block_lookup: Vec<Option<usize>>,
    edges: Vec<EdgeRef>,
    out_adj: Vec<Vec<Vec<EdgeId>>>,
    in_adj: Vec<Vec<Vec<EdgeId>>>,
    weights: BTreeMap<EdgeId, f64>,
}

impl NetworkGraph {
    pub fn build(spec: &NetworkSpec) -> Result<Self, SpecError> {
        let sizes = &spec.layers;
        if sizes.len() < 2 {
            return Err(SpecError::TooFewLayers(sizes.len()));
        }
        if let Some(l) = sizes.iter().position(|&s| s == 0) {
            return Err(SpecError::EmptyLayer(l));
        }
        let n_layers = sizes.len();
        let mut blocks: Vec<LayerBlock> = match &spec.blocks {
            Some(b) => b.clone(),
            None => (1..n_layers).map(|l| LayerBlock::new(l - 1, l)).collect(),
        };
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if b.from >= b.to || b.to >= n_layers {
                return Err(SpecError::BlockOutOfRange {
                    from: b.from,
                    to: b.to,
                    layers: n_layers,
                });
            }
            if !seen.insert(*b) {
                return Err(SpecError::DuplicateBlock {
                    from: b.from,
                    to: b.to,
                });
            }
        }
        blocks.sort();

        let mut block_lookup = vec![None; n_layers * n_layers];
        let mut block_offsets = Vec::with_capacity(blocks.len());
        let mut edges = Vec::new();
        let mut out_adj: Vec<Vec<Vec<EdgeId>>> =
            sizes.iter().map(|&s| vec![Vec::new(); s]).collect();
        let mut in_adj = out_adj.clone();
        for (pos, b) in blocks.iter().enumerate() {
            block_lookup[b.from * n_layers + b.to] = Some(pos);
            block_offsets.push(edges.len());
            for t in 1..=sizes[b.from] {
                for h in 1..=sizes[b.to] {
                    let id = EdgeId(edges.len());
                    edges.push(EdgeRef::new(NodeRef::new(b.from, t), NodeRef::new(b.to, h)));
                    out_adj[b.from][t - 1].push(id);
                    in_adj[b.to][h - 1].push(id);
                }
            }
        }
        // Adjacency follows (head layer, head index) so DFS yields lexicographic paths.
        for layer in out_adj.iter_mut() {
            for list in layer.iter_mut() {
                list.sort_by_key(|id| edges[id.0].head);
            }
        }
        for layer in in_adj.iter_mut() {
            for list in layer.iter_mut() {
                list.sort_by_key(|id| edges[id.0].tail);
            }
        }

        let mut g = Self {
            layer_sizes: sizes.clone(),
            blocks,
            block_offsets,
            block_lookup,
            edges,
            out_adj,
            in_adj,
            weights: BTreeMap::new(),
        };
        for w in &spec.weights {
            let e = EdgeRef::new(w.tail, w.head);
            let id = g.edge_id(&e).ok_or(SpecError::WeightNotOnEdge(e))?;
            g.weights.insert(id, w.value);
        }
        Ok(g)
    }

    /// Index `L` of the output layer.
    pub fn last_layer(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn layer_size(&self, layer: usize) -> usize {
        self.layer_sizes[layer]
    }

    pub fn blocks(&self) -> &[LayerBlock] {
        &self.blocks
    }

    pub fn has_block(&self, from: usize, to: usize) -> bool {
        self.block_pos(from, to).is_some()
    }

    fn block_pos(&self, from: usize, to: usize) -> Option<usize> {
        let n = self.layer_sizes.len();
        if from >= n || to >= n {
            return None;
        }
        self.block_lookup[from * n + to]
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> EdgeRef {
        self.edges[id.0]
    }

    /// `m`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `H`: number of nodes strictly between the input and output layers.
    pub fn hidden_count(&self) -> usize {
        let l = self.last_layer();
        self.layer_sizes[1..l].iter().sum()
    }

    pub fn has_skip_edges(&self) -> bool {
        self.blocks.iter().any(|b| b.to != b.from + 1)
    }

    pub fn contains_node(&self, n: NodeRef) -> bool {
        n.layer < self.layer_sizes.len() && n.index >= 1 && n.index <= self.layer_sizes[n.layer]
    }

    pub fn edge_id(&self, e: &EdgeRef) -> Option<EdgeId> {
        if !self.contains_node(e.tail) || !self.contains_node(e.head) {
            return None;
        }
        let pos = self.block_pos(e.tail.layer, e.head.layer)?;
        let width = self.layer_sizes[e.head.layer];
        Some(EdgeId(
            self.block_offsets[pos] + (e.tail.index - 1) * width + (e.head.index - 1),
        ))
    }

    /// Edges of block `(from, to)` in canonical order.
    pub fn block_edges(&self, from: usize, to: usize) -> impl Iterator<Item = EdgeId> + '_ {
        let range = match self.block_pos(from, to) {
            Some(pos) => {
                let start = self.block_offsets[pos];
                start..start + self.layer_sizes[from] * self.layer_sizes[to]
            }
            None => 0..0,
        };
        range.map(EdgeId)
    }

    pub fn out_edges(&self, n: NodeRef) -> &[EdgeId] {
        &self.out_adj[n.layer][n.index - 1]
    }

    pub fn in_edges(&self, n: NodeRef) -> &[EdgeId] {
        &self.in_adj[n.layer][n.index - 1]
    }

    pub fn nodes_of_layer(&self, layer: usize) -> impl Iterator<Item = NodeRef> {
        (1..=self.layer_sizes[layer]).map(move |i| NodeRef::new(layer, i))
    }

    pub fn weight(&self, id: EdgeId) -> Option<f64> {
        self.weights.get(&id).copied()
    }

    /// Number of input-to-output paths, by dynamic programming over layers.
    /// Saturates at `u128::MAX`.
    pub fn path_count(&self) -> u128 {
        let counts = self.prefix_counts();
        counts[self.last_layer()]
            .iter()
            .fold(0u128, |a, &c| a.saturating_add(c))
    }

    /// For every node, the number of paths from the input layer that end there.
    pub(crate) fn prefix_counts(&self) -> Vec<Vec<u128>> {
        let mut counts: Vec<Vec<u128>> = self.layer_sizes.iter().map(|&s| vec![0; s]).collect();
        counts[0].iter_mut().for_each(|c| *c = 1);
        for layer in 1..self.layer_sizes.len() {
            for i in 0..self.layer_sizes[layer] {
                let mut total = 0u128;
                for id in &self.in_adj[layer][i] {
                    let t = self.edges[id.0].tail;
                    total = total.saturating_add(counts[t.layer][t.index - 1]);
                }
                counts[layer][i] = total;
            }
        }
        counts
    }

    /// For every node, the number of paths from it to the output layer.
    pub(crate) fn suffix_counts(&self) -> Vec<Vec<u128>> {
        let last = self.last_layer();
        let mut counts: Vec<Vec<u128>> = self.layer_sizes.iter().map(|&s| vec![0; s]).collect();
        counts[last].iter_mut().for_each(|c| *c = 1);
        for layer in (0..last).rev() {
            for i in 0..self.layer_sizes[layer] {
                let mut total = 0u128;
                for id in &self.out_adj[layer][i] {
                    let h = self.edges[id.0].head;
                    total = total.saturating_add(counts[h.layer][h.index - 1]);
                }
                counts[layer][i] = total;
            }
        }
        counts
    }

    /// All input-to-output paths in lexicographic node order.
    pub fn enumerate_paths(&self, limit: u128) -> Result<Vec<Path>, PathCountExceedsLimit> {
        let count = self.path_count();
        if count > limit {
            return Err(PathCountExceedsLimit { count, limit });
        }
        let last = self.last_layer();
        let mut out = Vec::with_capacity(count as usize);
        let mut stack: Vec<NodeRef> = Vec::new();
        for start in self.nodes_of_layer(0) {
            stack.push(start);
            self.dfs(&mut stack, last, &mut out);
            stack.pop();
        }
        Ok(out)
    }

    fn dfs(&self, stack: &mut Vec<NodeRef>, last: usize, out: &mut Vec<Path>) {
        let here = *stack.last().expect("non-empty stack");
        if here.layer == last {
            out.push(Path::from_nodes_unchecked(stack.clone()));
            return;
        }
        for id in self.out_edges(here) {
            stack.push(self.edges[id.0].head);
            self.dfs(stack, last, out);
            stack.pop();
        }
    }

    /// Round-trips to a spec with explicit blocks.
    pub fn to_spec(&self) -> NetworkSpec {
        NetworkSpec {
            format_version: Some(1),
            layers: self.layer_sizes.clone(),
            blocks: Some(self.blocks.clone()),
            weights: self
                .weights
                .iter()
                .map(|(id, &value)| {
                    let e = self.edge(*id);
                    WeightEntry {
                        tail: e.tail,
                        head: e.head,
                        value,
                    }
                })
                .collect(),
        }
    }
}
