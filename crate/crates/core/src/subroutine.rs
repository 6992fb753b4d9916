//! Layer-by-layer basis construction for networks without layer-skip edges.
//!
//! Between every pair of consecutive layers the edges are split into direct
//! edges (a vertex-disjoint seed matching plus one edge for every leftover
//! tail node, so exactly one direct edge leaves each tail node) and cross
//! edges (the rest). Moving up one layer, the direct edge of a node is
//! appended to every constructed path reaching that node, while each cross
//! edge is appended to a single chosen path `p*`. The result has `m - H`
//! paths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{EdgeRef, NetworkGraph, NodeRef};
use crate::path::Path;
use crate::tiebreak::{Chooser, TieBreak, TieBreakError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Direct,
    Cross,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisPath {
    pub substructure: usize,
    pub origin: Origin,
    pub path: Path,
}

/// Ordered basis paths with provenance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "BasisSetRepr", try_from = "BasisSetRepr")]
pub struct BasisPathSet {
    entries: Vec<BasisPath>,
}

#[derive(Serialize, Deserialize)]
struct BasisSetRepr {
    #[serde(default)]
    cardinality: Option<usize>,
    paths: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Record {
        path: Path,
        #[serde(default = "default_origin")]
        origin: Origin,
        #[serde(default)]
        substructure: usize,
    },
    Bare(Path),
}

fn default_origin() -> Origin {
    Origin::Direct
}

impl From<BasisPathSet> for BasisSetRepr {
    fn from(b: BasisPathSet) -> Self {
        Self {
            cardinality: Some(b.entries.len()),
            paths: b
                .entries
                .into_iter()
                .map(|e| EntryRepr::Record {
                    path: e.path,
                    origin: e.origin,
                    substructure: e.substructure,
                })
                .collect(),
        }
    }
}

impl TryFrom<BasisSetRepr> for BasisPathSet {
    type Error = String;
    fn try_from(r: BasisSetRepr) -> Result<Self, String> {
        let entries: Vec<BasisPath> = r
            .paths
            .into_iter()
            .map(|e| match e {
                EntryRepr::Record {
                    path,
                    origin,
                    substructure,
                } => BasisPath {
                    substructure,
                    origin,
                    path,
                },
                EntryRepr::Bare(path) => BasisPath {
                    substructure: 0,
                    origin: Origin::Direct,
                    path,
                },
            })
            .collect();
        if let Some(c) = r.cardinality {
            if c != entries.len() {
                return Err(format!(
                    "cardinality {c} does not match {} listed paths",
                    entries.len()
                ));
            }
        }
        Ok(Self { entries })
    }
}

impl BasisPathSet {
    pub fn new(entries: Vec<BasisPath>) -> Self {
        Self { entries }
    }

    /// Untagged paths, all marked direct in substructure 0.
    pub fn from_paths(paths: impl IntoIterator<Item = Path>) -> Self {
        Self {
            entries: paths
                .into_iter()
                .map(|path| BasisPath {
                    substructure: 0,
                    origin: Origin::Direct,
                    path,
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[BasisPath] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<BasisPath> {
        self.entries
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> + '_ {
        self.entries.iter().map(|e| &e.path)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts by `(substructure, origin, path)`.
    pub fn canonicalize(&mut self) {
        self.entries.sort();
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubroutineError {
    #[error("graph has layer-skip edges (block {from}->{to}); use hbps")]
    HasSkipEdges { from: usize, to: usize },
    #[error("no constructed path reaches {node}; the graph is missing a consecutive block")]
    EmptyReach { node: NodeRef },
    #[error("graph has no block {from}->{to}")]
    MissingBlock { from: usize, to: usize },
    #[error(transparent)]
    TieBreak(#[from] TieBreakError),
}

/// Construction state after the edges from layer `k` to `k + 1` were added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerState {
    pub k: usize,
    /// Paths from layer 0 to layer `k + 1` whose last edge is direct.
    pub direct: Vec<Path>,
    /// Paths from layer 0 to layer `k + 1` whose last edge is cross.
    pub cross: Vec<Path>,
    /// `reach[i]`: every constructed path ending at node `i + 1` of layer
    /// `k + 1`, lexicographically sorted.
    pub reach: Vec<Vec<Path>>,
}

impl LayerState {
    pub fn len(&self) -> usize {
        self.direct.len() + self.cross.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn reach_of(&self, node: NodeRef) -> &[Path] {
        assert_eq!(node.layer, self.k + 1);
        &self.reach[node.index - 1]
    }
}

fn ensure_skip_free(g: &NetworkGraph) -> Result<(), SubroutineError> {
    match g.blocks().iter().find(|b| b.to != b.from + 1) {
        Some(b) => Err(SubroutineError::HasSkipEdges {
            from: b.from,
            to: b.to,
        }),
        None => Ok(()),
    }
}

/// Direct single-edge paths between layers `k` and `k + 1`, sorted by tail.
/// Every node of layer `k` is the tail of exactly one of them.
pub fn direct_paths(
    g: &NetworkGraph,
    k: usize,
    chooser: &mut Chooser,
) -> Result<Vec<Path>, SubroutineError> {
    if !g.has_block(k, k + 1) {
        return Err(SubroutineError::MissingBlock { from: k, to: k + 1 });
    }
    let tails: Vec<NodeRef> = g.nodes_of_layer(k).collect();
    let heads: Vec<NodeRef> = g.nodes_of_layer(k + 1).collect();
    let mut edges: Vec<EdgeRef> = chooser
        .matching(&tails, &heads)?
        .into_iter()
        .map(|(t, h)| EdgeRef::new(t, h))
        .collect();
    if tails.len() > heads.len() {
        let matched: Vec<NodeRef> = edges.iter().map(|e| e.tail).collect();
        for &t in tails.iter().filter(|t| !matched.contains(t)) {
            let h = chooser.extra_head(t, &heads)?;
            edges.push(EdgeRef::new(t, h));
        }
    }
    edges.sort();
    Ok(edges.into_iter().map(Path::from_edge).collect())
}

/// Edges between layers `k` and `k + 1` not used by `direct`, in canonical
/// edge order.
pub fn cross_paths(g: &NetworkGraph, k: usize, direct: &[Path]) -> Vec<Path> {
    g.block_edges(k, k + 1)
        .map(|id| g.edge(id))
        .filter(|e| {
            !direct
                .iter()
                .any(|d| d.first() == e.tail && d.last() == e.head)
        })
        .map(Path::from_edge)
        .collect()
}

fn group_by_head(g: &NetworkGraph, k: usize, direct: &[Path], cross: &[Path]) -> Vec<Vec<Path>> {
    let mut reach = vec![Vec::new(); g.layer_size(k + 1)];
    for p in direct.iter().chain(cross) {
        reach[p.last().index - 1].push(p.clone());
    }
    for r in reach.iter_mut() {
        r.sort();
    }
    reach
}

/// First step: the layer-0 to layer-1 edges, with nothing to concatenate.
pub fn initial_state(
    g: &NetworkGraph,
    chooser: &mut Chooser,
) -> Result<LayerState, SubroutineError> {
    let direct = direct_paths(g, 0, chooser)?;
    let cross = cross_paths(g, 0, &direct);
    let reach = group_by_head(g, 0, &direct, &cross);
    Ok(LayerState {
        k: 0,
        direct,
        cross,
        reach,
    })
}

/// Adds the edges from layer `k` to `k + 1` to a state that ends at layer `k`.
pub fn extend_layer(
    state: &LayerState,
    g: &NetworkGraph,
    k: usize,
    chooser: &mut Chooser,
) -> Result<LayerState, SubroutineError> {
    assert!(k >= 1 && state.k + 1 == k, "state must end at layer {k}");
    let stubs = direct_paths(g, k, chooser)?;
    let cross_stubs = cross_paths(g, k, &stubs);
    let mut direct = Vec::new();
    let mut cross = Vec::new();
    for node in g.nodes_of_layer(k) {
        let lower = state.reach_of(node);
        if lower.is_empty() {
            return Err(SubroutineError::EmptyReach { node });
        }
        for d in stubs.iter().filter(|s| s.first() == node) {
            direct.extend(lower.iter().map(|p0| p0.concat(d)));
        }
        let pick = chooser.cross_parent(node, lower)?;
        let p_star = &lower[pick];
        for c in cross_stubs.iter().filter(|s| s.first() == node) {
            cross.push(p_star.concat(c));
        }
    }
    direct.sort();
    cross.sort();
    let reach = group_by_head(g, k, &direct, &cross);
    Ok(LayerState {
        k,
        direct,
        cross,
        reach,
    })
}

/// Every intermediate state, one per layer pair.
pub fn subroutine_trace(
    g: &NetworkGraph,
    tb: &TieBreak,
) -> Result<Vec<LayerState>, SubroutineError> {
    ensure_skip_free(g)?;
    let mut chooser = Chooser::new(tb);
    let mut states = vec![initial_state(g, &mut chooser)?];
    for k in 1..g.last_layer() {
        let next = extend_layer(states.last().expect("initial state"), g, k, &mut chooser)?;
        states.push(next);
    }
    chooser.finish()?;
    Ok(states)
}

/// Basis path set of a skip-free fully connected network, canonically sorted
/// (direct paths first, then cross, each lexicographic).
pub fn subroutine_basis(g: &NetworkGraph, tb: &TieBreak) -> Result<BasisPathSet, SubroutineError> {
    let last = subroutine_trace(g, tb)?
        .pop()
        .expect("at least one layer pair");
    let tag = |origin| {
        move |path| BasisPath {
            substructure: 0,
            origin,
            path,
        }
    };
    let mut b = BasisPathSet::new(
        last.direct
            .into_iter()
            .map(tag(Origin::Direct))
            .chain(last.cross.into_iter().map(tag(Origin::Cross)))
            .collect(),
    );
    b.canonicalize();
    Ok(b)
}
