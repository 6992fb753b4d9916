//! Resolution of the free choices in the basis construction.
//!
//! Three places in the construction pick "some" element: the vertex-disjoint
//! seed matching between two layers, the head node that a leftover tail node
//! attaches to, and the lower path `p*` that every cross edge of a node is
//! extended with. A [`TieBreak`] fixes all three reproducibly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::{EdgeRef, NodeRef};
use crate::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Index matching, lowest-index heads for leftovers, lexicographically
    /// least `p*`.
    #[default]
    Deterministic,
    Seeded(u64),
    /// Explicit choices; anything not named falls back to `Deterministic`.
    Overrides(Overrides),
}

/// Chosen lower path for the cross edges leaving `node`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossParent {
    pub node: NodeRef,
    pub path: Path,
}

/// Override document:
///
/// ```json
/// { "format_version": 1,
///   "matching": [{"tail": [1,1], "head": [2,1]}],
///   "extras": [{"tail": [0,3], "head": [1,2]}],
///   "cross_parent": [{"node": [1,1], "path": [[0,2],[1,1]]}] }
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    #[serde(default)]
    pub matching: Vec<EdgeRef>,
    #[serde(default)]
    pub extras: Vec<EdgeRef>,
    #[serde(default)]
    pub cross_parent: Vec<CrossParent>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.matching.is_empty() && self.extras.is_empty() && self.cross_parent.is_empty()
    }

    /// Keeps only the entries that live on the layers in `layer_map` (local
    /// layer `r` is original layer `layer_map[r]`) and relabels them to local
    /// layers. Returns the relabelled set and the consumed original entries
    /// counts `(matching, extras, cross_parent)` as index lists.
    pub(crate) fn localize(&self, layer_map: &[usize]) -> (Overrides, [Vec<usize>; 3]) {
        let step = |a: usize, b: usize| layer_map.windows(2).position(|w| w[0] == a && w[1] == b);
        let relabel_edge = |e: &EdgeRef| {
            step(e.tail.layer, e.head.layer).map(|r| {
                EdgeRef::new(
                    NodeRef::new(r, e.tail.index),
                    NodeRef::new(r + 1, e.head.index),
                )
            })
        };
        let mut used: [Vec<usize>; 3] = Default::default();
        let mut out = Overrides::default();
        for (i, e) in self.matching.iter().enumerate() {
            if let Some(local) = relabel_edge(e) {
                out.matching.push(local);
                used[0].push(i);
            }
        }
        for (i, e) in self.extras.iter().enumerate() {
            if let Some(local) = relabel_edge(e) {
                out.extras.push(local);
                used[1].push(i);
            }
        }
        for (i, cp) in self.cross_parent.iter().enumerate() {
            let layers = cp.path.layers();
            if layers.len() <= layer_map.len() && layers == layer_map[..layers.len()] {
                let local = cp
                    .path
                    .nodes()
                    .iter()
                    .enumerate()
                    .map(|(r, n)| NodeRef::new(r, n.index))
                    .collect();
                out.cross_parent.push(CrossParent {
                    node: NodeRef::new(layers.len() - 1, cp.node.index),
                    path: Path::from_nodes_unchecked(local),
                });
                used[2].push(i);
            }
        }
        (out, used)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TieBreakError {
    #[error("invalid override: {0}")]
    InvalidOverride(String),
}

/// Stateful helper that makes the choices for one construction run.
#[derive(Debug)]
pub struct Chooser {
    overrides: Option<Overrides>,
    used_extras: BTreeSet<usize>,
    used_parents: BTreeSet<usize>,
    used_matching: BTreeSet<usize>,
    rng: Option<ChaCha8Rng>,
}

impl Chooser {
    pub fn new(tb: &TieBreak) -> Self {
        let (overrides, rng) = match tb {
            TieBreak::Deterministic => (None, None),
            TieBreak::Seeded(seed) => (None, Some(ChaCha8Rng::seed_from_u64(*seed))),
            TieBreak::Overrides(o) => (Some(o.clone()), None),
        };
        Self {
            overrides,
            used_extras: BTreeSet::new(),
            used_parents: BTreeSet::new(),
            used_matching: BTreeSet::new(),
            rng,
        }
    }

    /// Vertex-disjoint seed edges between `tails` and `heads` (both in index
    /// order). Complete bipartite blocks make any injective pairing valid.
    pub fn matching(
        &mut self,
        tails: &[NodeRef],
        heads: &[NodeRef],
    ) -> Result<Vec<(NodeRef, NodeRef)>, TieBreakError> {
        let size = tails.len().min(heads.len());
        let (tl, hl) = (tails[0].layer, heads[0].layer);
        if let Some(o) = &self.overrides {
            let chosen: Vec<(usize, &EdgeRef)> = o
                .matching
                .iter()
                .enumerate()
                .filter(|(_, e)| e.tail.layer == tl && e.head.layer == hl)
                .collect();
            if !chosen.is_empty() {
                let bad = || {
                    TieBreakError::InvalidOverride(format!("matching between layers {tl} and {hl} must be {size} vertex-disjoint edges"))
                };
                if chosen.len() != size {
                    return Err(bad());
                }
                let ts: BTreeSet<_> = chosen.iter().map(|(_, e)| e.tail).collect();
                let hs: BTreeSet<_> = chosen.iter().map(|(_, e)| e.head).collect();
                if ts.len() != size || hs.len() != size {
                    return Err(bad());
                }
                if ts.iter().any(|t| !tails.contains(t)) || hs.iter().any(|h| !heads.contains(h)) {
                    return Err(bad());
                }
                for (i, _) in &chosen {
                    self.used_matching.insert(*i);
                }
                let mut pairs: Vec<_> = chosen.iter().map(|(_, e)| (e.tail, e.head)).collect();
                pairs.sort();
                return Ok(pairs);
            }
        }
        if let Some(rng) = &mut self.rng {
            let mut pairs = if tails.len() >= heads.len() {
                let mut t = tails.to_vec();
                t.shuffle(rng);
                t.into_iter().zip(heads.iter().copied()).collect::<Vec<_>>()
            } else {
                let mut h = heads.to_vec();
                h.shuffle(rng);
                tails.iter().copied().zip(h).collect::<Vec<_>>()
            };
            pairs.sort();
            return Ok(pairs);
        }
        Ok(tails
            .iter()
            .copied()
            .zip(heads.iter().copied())
            .take(size)
            .collect())
    }

    /// Head node for a tail node left over by the matching.
    pub fn extra_head(
        &mut self,
        tail: NodeRef,
        heads: &[NodeRef],
    ) -> Result<NodeRef, TieBreakError> {
        if let Some(o) = &self.overrides {
            let hl = heads[0].layer;
            if let Some((i, e)) = o
                .extras
                .iter()
                .enumerate()
                .find(|(_, e)| e.tail == tail && e.head.layer == hl)
            {
                if !heads.contains(&e.head) {
                    return Err(TieBreakError::InvalidOverride(format!(
                        "extra edge {e} names an unknown head"
                    )));
                }
                self.used_extras.insert(i);
                return Ok(e.head);
            }
        }
        if let Some(rng) = &mut self.rng {
            return Ok(heads[rng.gen_range(0..heads.len())]);
        }
        Ok(heads[0])
    }

    /// Index into `candidates` (lexicographically sorted) of the lower path
    /// that the cross edges leaving `node` are extended with.
    pub fn cross_parent(
        &mut self,
        node: NodeRef,
        candidates: &[Path],
    ) -> Result<usize, TieBreakError> {
        if let Some(o) = &self.overrides {
            if let Some((i, cp)) = o
                .cross_parent
                .iter()
                .enumerate()
                .find(|(_, cp)| cp.node == node)
            {
                let pos = candidates
                    .iter()
                    .position(|p| *p == cp.path)
                    .ok_or_else(|| {
                        TieBreakError::InvalidOverride(format!(
                            "path {} does not reach {node}",
                            cp.path
                        ))
                    })?;
                self.used_parents.insert(i);
                return Ok(pos);
            }
        }
        if let Some(rng) = &mut self.rng {
            return Ok(rng.gen_range(0..candidates.len()));
        }
        Ok(0)
    }

    /// Errors if some override was never applied.
    pub fn finish(&self) -> Result<(), TieBreakError> {
        let Some(o) = &self.overrides else {
            return Ok(());
        };
        if let Some(i) = (0..o.matching.len()).find(|i| !self.used_matching.contains(i)) {
            return Err(TieBreakError::InvalidOverride(format!(
                "matching edge {} was never used",
                o.matching[i]
            )));
        }
        if let Some(i) = (0..o.extras.len()).find(|i| !self.used_extras.contains(i)) {
            return Err(TieBreakError::InvalidOverride(format!(
                "extra edge {} does not start at a leftover node",
                o.extras[i]
            )));
        }
        if let Some(i) = (0..o.cross_parent.len()).find(|i| !self.used_parents.contains(i)) {
            return Err(TieBreakError::InvalidOverride(format!(
                "cross parent for {} was never used",
                o.cross_parent[i].node
            )));
        }
        Ok(())
    }
}

/// Seed for the `index`-th independent unit of work under a seeded run, so
/// substructures draw from separate streams regardless of scheduling.
pub(crate) fn derive(tb: &TieBreak, index: usize) -> TieBreak {
    match tb {
        TieBreak::Seeded(seed) => {
            TieBreak::Seeded(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        }
        other => other.clone(),
    }
}
