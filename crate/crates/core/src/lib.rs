//! Basis path sets of layered fully-connected networks.
//!
//! A path runs from an input node to an output node; a basis path set is a
//! maximal subset of paths from which every other path can be reached by
//! adding and removing paths. This crate builds such sets for networks whose
//! blocks may skip layers, and checks every claim about them with exact
//! rational linear algebra:
//!
//! - [`netgraph`]: network model, spec parsing, path counting and enumeration.
//! - [`path`]: paths, signed path combinations and edge vectors.
//! - [`subroutine`]: the layer-by-layer construction for skip-free networks.
//! - [`substructure`]: reduction to one node per layer and the choice of
//!   independent substructures.
//! - [`hbps`]: the hierarchical construction combining the two.
//! - [`verify`]: coverage, rank, span and brute-force oracles.
//!
//! ```
//! use basis_paths::{hbps, NetworkGraph, NetworkSpec, TieBreak};
//!
//! let g = NetworkGraph::build(&NetworkSpec::with_skips(&[2, 3, 3, 2], &[(0, 3)])).unwrap();
//! let result = hbps::hbps(&g, &TieBreak::Deterministic).unwrap();
//! assert_eq!(result.cardinality, 19);
//! ```

pub mod doc;
pub mod exact;
pub mod hbps;
pub mod netgraph;
pub mod path;
pub mod subroutine;
pub mod substructure;
pub mod tiebreak;
pub mod verify;

pub use netgraph::{EdgeRef, LayerBlock, NetworkGraph, NetworkSpec, NodeRef};
pub use path::{Path, PathCombination};
pub use subroutine::{BasisPathSet, Origin};
pub use tiebreak::TieBreak;
