//! Hierarchical basis construction for networks with layer-skip blocks.
//!
//! The upper level picks a maximal independent set of substructure paths and
//! requires them to be pairwise transition-disjoint. The lower level runs the
//! skip-free construction on each induced sub-network independently and maps
//! the results back to the original node coordinates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netgraph::NetworkGraph;
use crate::subroutine::{subroutine_basis, BasisPath, BasisPathSet, SubroutineError};
use crate::substructure::{
    check_pairwise_edge_disjoint, decompose, induced_subgraph, SharedEdges, SubstructureError,
    SubstructurePath, SubstructureSet,
};
use crate::tiebreak::{derive, TieBreak, TieBreakError};

/// Diagnostic printed when the disjointness gate fails.
pub const SHARED_EDGES_MESSAGE: &str =
    "There exist shared edges between two independent substructure paths";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstructureBasis {
    pub path: SubstructurePath,
    pub m: usize,
    pub h: usize,
    pub basis: BasisPathSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbpsResult {
    pub cardinality: usize,
    pub substructures: SubstructureSet,
    pub per_substructure: Vec<SubstructureBasis>,
    pub basis: BasisPathSet,
}

impl HbpsResult {
    /// `sum (m_r - H_r)` over the independent substructures.
    pub fn expected_cardinality(&self) -> usize {
        self.per_substructure.iter().map(|s| s.m - s.h).sum()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HbpsError {
    #[error("{SHARED_EDGES_MESSAGE}")]
    RejectedSharedEdges(SharedEdges),
    #[error(transparent)]
    Substructure(#[from] SubstructureError),
    #[error(transparent)]
    Subroutine(#[from] SubroutineError),
    #[error(transparent)]
    TieBreak(#[from] TieBreakError),
}

/// How the per-substructure stage is executed. Output does not depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Sequential,
    /// Run on a dedicated pool with this many threads.
    Parallel(usize),
}

pub fn hbps(g: &NetworkGraph, tb: &TieBreak) -> Result<HbpsResult, HbpsError> {
    hbps_scheduled(g, tb, Schedule::Sequential)
}

pub fn hbps_scheduled(
    g: &NetworkGraph,
    tb: &TieBreak,
    schedule: Schedule,
) -> Result<HbpsResult, HbpsError> {
    let substructures = decompose(g)?;
    let independent: Vec<SubstructurePath> = substructures.independent_paths().cloned().collect();
    check_pairwise_edge_disjoint(&independent).map_err(HbpsError::RejectedSharedEdges)?;

    // Localize explicit overrides per substructure and track which entries
    // land on at least one of them.
    let mut local_tbs = Vec::with_capacity(independent.len());
    let mut consumed: [Vec<bool>; 3] = match tb {
        TieBreak::Overrides(o) => [
            vec![false; o.matching.len()],
            vec![false; o.extras.len()],
            vec![false; o.cross_parent.len()],
        ],
        _ => Default::default(),
    };
    for (id, p) in independent.iter().enumerate() {
        local_tbs.push(match tb {
            TieBreak::Overrides(o) => {
                let (local, used) = o.localize(&p.layers);
                for (kind, list) in used.iter().enumerate() {
                    for &i in list {
                        consumed[kind][i] = true;
                    }
                }
                TieBreak::Overrides(local)
            }
            other => derive(other, id),
        });
    }
    if consumed.iter().any(|c| c.iter().any(|&u| !u)) {
        return Err(TieBreakError::InvalidOverride(
            "an override does not lie on any independent substructure".into(),
        )
        .into());
    }

    let work = |(id, (p, local_tb)): (usize, (&SubstructurePath, &TieBreak))| -> Result<SubstructureBasis, HbpsError> {
        let sub = induced_subgraph(g, p)?;
        let local = subroutine_basis(&sub.graph, local_tb)?;
        let mut entries: Vec<BasisPath> = local
            .into_entries()
            .into_iter()
            .map(|e| BasisPath {
                substructure: id,
                origin: e.origin,
                path: e.path.map_nodes(|n| sub.to_original(n)),
            })
            .collect();
        entries.sort();
        Ok(SubstructureBasis {
            path: p.clone(),
            m: sub.graph.edge_count(),
            h: sub.graph.hidden_count(),
            basis: BasisPathSet::new(entries),
        })
    };
    let jobs = independent.iter().zip(local_tbs.iter()).enumerate();
    let per_substructure: Vec<SubstructureBasis> = match schedule {
        Schedule::Sequential => jobs.map(work).collect::<Result<_, _>>()?,
        Schedule::Parallel(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .expect("thread pool");
            let items: Vec<_> = jobs.collect();
            pool.install(|| {
                items
                    .into_par_iter()
                    .map(work)
                    .collect::<Result<Vec<_>, _>>()
            })?
        }
    };

    let mut basis = BasisPathSet::new(
        per_substructure
            .iter()
            .flat_map(|s| s.basis.entries().iter().cloned())
            .collect(),
    );
    basis.canonicalize();
    Ok(HbpsResult {
        cardinality: basis.len(),
        substructures,
        per_substructure,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{EdgeRef, NetworkSpec, NodeRef};
    use crate::tiebreak::Overrides;

    fn graph(layers: &[usize], skips: &[(usize, usize)]) -> NetworkGraph {
        NetworkGraph::build(&NetworkSpec::with_skips(layers, skips)).unwrap()
    }

    #[test]
    fn skip_free_matches_subroutine() {
        let g = graph(&[3, 2, 3], &[]);
        let r = hbps(&g, &TieBreak::Deterministic).unwrap();
        assert_eq!(r.cardinality, 10);
        assert_eq!(
            r.basis,
            subroutine_basis(&g, &TieBreak::Deterministic).unwrap()
        );
        assert_eq!(r.substructures.independent, vec![0]);
    }

    #[test]
    fn single_skip_instance() {
        let g = graph(&[2, 3, 3, 2], &[(0, 3)]);
        let r = hbps(&g, &TieBreak::Deterministic).unwrap();
        assert_eq!(r.cardinality, 19);
        let parts: Vec<_> = r
            .per_substructure
            .iter()
            .map(|s| (s.path.layers.clone(), s.m, s.h))
            .collect();
        assert_eq!(parts, vec![(vec![0, 3], 4, 0), (vec![0, 1, 2, 3], 21, 6)]);
        assert_eq!(r.expected_cardinality(), 19);
        // Paths of the (0,3) substructure are the four skip edges.
        assert!(r.basis.entries()[..4]
            .iter()
            .all(|e| e.substructure == 0 && e.path.nodes().len() == 2));
    }

    #[test]
    fn shared_transition_is_rejected() {
        let g = NetworkGraph::build(&NetworkSpec::with_blocks(
            &[2, 2, 2, 2],
            &[(0, 1), (1, 2), (2, 3), (0, 2)],
        ))
        .unwrap();
        let err = hbps(&g, &TieBreak::Deterministic).unwrap_err();
        match &err {
            HbpsError::RejectedSharedEdges(s) => assert_eq!(s.transitions, vec![(2, 3)]),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.to_string(), SHARED_EDGES_MESSAGE);
    }

    #[test]
    fn unreachable_output_propagates() {
        let g = NetworkGraph::build(&NetworkSpec::with_blocks(&[2, 2, 2], &[(0, 1)])).unwrap();
        assert!(matches!(
            hbps(&g, &TieBreak::Deterministic),
            Err(HbpsError::Substructure(SubstructureError::Unreachable))
        ));
    }

    #[test]
    fn parallel_schedule_is_identical() {
        let g = graph(&[3, 2, 4, 2, 3], &[(0, 4)]);
        for tb in [TieBreak::Deterministic, TieBreak::Seeded(7)] {
            let a = hbps_scheduled(&g, &tb, Schedule::Sequential).unwrap();
            let b = hbps_scheduled(&g, &tb, Schedule::Parallel(4)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn overrides_in_original_coordinates() {
        let g = graph(&[3, 2, 2], &[(0, 2)]);
        let tb = TieBreak::Overrides(Overrides {
            extras: vec![
                EdgeRef::new(NodeRef::new(0, 3), NodeRef::new(1, 2)),
                EdgeRef::new(NodeRef::new(0, 3), NodeRef::new(2, 2)),
            ],
            ..Default::default()
        });
        let r = hbps(&g, &tb).unwrap();
        let skip = &r.per_substructure[0];
        assert_eq!(skip.path.layers, vec![0, 2]);
        assert!(skip
            .basis
            .entries()
            .iter()
            .any(|e| e.origin == crate::subroutine::Origin::Direct
                && e.path.nodes() == [NodeRef::new(0, 3), NodeRef::new(2, 2)]));

        let stray = TieBreak::Overrides(Overrides {
            extras: vec![EdgeRef::new(NodeRef::new(1, 1), NodeRef::new(2, 1))],
            ..Default::default()
        });
        let g2 = graph(&[3, 2, 3], &[]);
        assert!(hbps(&g2, &stray).is_err());
    }
}
