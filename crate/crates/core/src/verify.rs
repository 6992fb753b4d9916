//! Independent checks of basis claims: edge coverage, exact rank, span
//! membership with coefficient extraction, and an exhaustive search over
//! small signed path combinations.

use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{is_integer, ExactSpan};
use crate::netgraph::{EdgeRef, NetworkGraph, NodeRef, DEFAULT_PATH_LIMIT};
use crate::path::{path_edges, Path, PathError};
use crate::subroutine::BasisPathSet;
use crate::substructure::{check_pairwise_edge_disjoint, decompose, induced_subgraph};

/// Largest host graph (by input-to-output path count) for the exhaustive search.
pub const BRUTE_FORCE_MAX_PATHS: u128 = 12;
pub const BRUTE_FORCE_MAX_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub ok: bool,
    pub uncovered: Vec<EdgeRef>,
}

pub fn check_coverage<'a>(g: &NetworkGraph, paths: impl IntoIterator<Item = &'a Path>) -> Coverage {
    let mut hit = vec![false; g.edge_count()];
    for p in paths {
        for id in p.edge_ids(g) {
            hit[id.0] = true;
        }
    }
    let uncovered: Vec<EdgeRef> = hit
        .iter()
        .enumerate()
        .filter(|(_, &h)| !h)
        .map(|(i, _)| g.edges()[i])
        .collect();
    Coverage {
        ok: uncovered.is_empty(),
        uncovered,
    }
}

fn indicator(g: &NetworkGraph, p: &Path) -> Vec<i64> {
    path_edges(g, p).to_dense(g.edge_count())
}

/// Exact rational span of a list of path indicators, eliminated once and
/// queried many times.
#[derive(Clone, Debug)]
pub struct PathSpan<'g> {
    graph: &'g NetworkGraph,
    span: ExactSpan,
}

impl<'g> PathSpan<'g> {
    pub fn new<'a>(g: &'g NetworkGraph, paths: impl IntoIterator<Item = &'a Path>) -> Self {
        let mut span = ExactSpan::new(g.edge_count());
        for p in paths {
            span.insert(&indicator(g, p));
        }
        Self { graph: g, span }
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, p: &Path) -> bool {
        self.span.contains(&indicator(self.graph, p))
    }

    pub fn represent(&self, p: &Path) -> SpanMembership {
        match self.span.represent(&indicator(self.graph, p)) {
            None => SpanMembership::No,
            Some(coefficients) => SpanMembership::Yes {
                integer: coefficients.iter().all(is_integer),
                coefficients,
            },
        }
    }
}

/// Exact rank of the edge-indicator matrix.
pub fn independence_rank<'a>(g: &NetworkGraph, paths: impl IntoIterator<Item = &'a Path>) -> usize {
    PathSpan::new(g, paths).rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanMembership {
    No,
    /// `indicator(p) = sum c_i indicator(b_i)`; dependent members get zero.
    Yes {
        coefficients: Vec<BigRational>,
        integer: bool,
    },
}

impl SpanMembership {
    pub fn is_yes(&self) -> bool {
        matches!(self, SpanMembership::Yes { .. })
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, SpanMembership::Yes { integer: true, .. })
    }
}

pub fn in_span<'a>(
    g: &NetworkGraph,
    basis: impl IntoIterator<Item = &'a Path>,
    p: &Path,
) -> SpanMembership {
    PathSpan::new(g, basis).represent(p)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("exhaustive search needs at most {BRUTE_FORCE_MAX_PATHS} host paths and depth {BRUTE_FORCE_MAX_DEPTH}; got {paths} paths, depth {depth}")]
    InstanceTooLarge { paths: u128, depth: usize },
    #[error("basis path {path} is invalid: {source}")]
    InvalidPath { path: Path, source: PathError },
}

/// Whether some signed combination of at most `depth` terms drawn (with
/// repetition) from `s` has exactly the edge indicator of `p`.
pub fn brute_force_reachable(
    g: &NetworkGraph,
    s: &[Path],
    p: &Path,
    depth: usize,
) -> Result<bool, VerifyError> {
    let paths = g.path_count();
    if paths > BRUTE_FORCE_MAX_PATHS || depth > BRUTE_FORCE_MAX_DEPTH {
        return Err(VerifyError::InstanceTooLarge { paths, depth });
    }
    let vectors: Vec<Vec<i64>> = s.iter().map(|q| indicator(g, q)).collect();
    let target = indicator(g, p);
    let mut acc = vec![0i64; g.edge_count()];
    Ok(search(&vectors, &target, 0, depth, &mut acc))
}

// Integer coefficient vectors with L1 norm <= budget, one coordinate at a time.
fn search(vectors: &[Vec<i64>], target: &[i64], i: usize, budget: usize, acc: &mut [i64]) -> bool {
    if acc == target {
        return true;
    }
    if i == vectors.len() || budget == 0 {
        return false;
    }
    if search(vectors, target, i + 1, budget, acc) {
        return true;
    }
    for sign in [1i64, -1] {
        let mut used = 0;
        let mut found = false;
        while used < budget {
            used += 1;
            acc.iter_mut()
                .zip(&vectors[i])
                .for_each(|(a, v)| *a += sign * v);
            if search(vectors, target, i + 1, budget - used, acc) {
                found = true;
                break;
            }
        }
        acc.iter_mut()
            .zip(&vectors[i])
            .for_each(|(a, v)| *a -= sign * used as i64 * v);
        if found {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Above this many paths the span check samples instead of enumerating.
    pub max_paths: u128,
    pub samples: usize,
    pub sample_seed: u64,
    pub record_timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_paths: DEFAULT_PATH_LIMIT,
            samples: 1000,
            sample_seed: 0,
            record_timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSource {
    /// `m - H` of a skip-free network.
    EdgesMinusHidden,
    /// `sum (m_r - H_r)` over independent, transition-disjoint substructures.
    SubstructureSum,
    /// Decomposition rejected; no closed form applies.
    Unavailable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMode {
    Full,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub coverage_ms: f64,
    pub rank_ms: f64,
    pub span_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub coverage_ok: bool,
    pub uncovered_edges: Vec<EdgeRef>,
    pub expected_cardinality: Option<usize>,
    pub expected_source: ExpectedSource,
    pub actual_cardinality: usize,
    pub cardinality_ok: bool,
    pub rank: usize,
    pub independent_ok: bool,
    pub total_paths: u64,
    pub span_mode: SpanMode,
    /// Seed of the path sampler; present only in sampled mode.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub span_sample_seed: Option<u64>,
    pub span_checked: usize,
    pub span_failures: Vec<Path>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.coverage_ok
            && self.independent_ok
            && self.cardinality_ok
            && self.span_failures.is_empty()
    }
}

/// Closed-form basis size for `g`, when one applies.
pub fn expected_cardinality(g: &NetworkGraph) -> (Option<usize>, ExpectedSource) {
    if !g.has_skip_edges() {
        return (
            Some(g.edge_count() - g.hidden_count()),
            ExpectedSource::EdgesMinusHidden,
        );
    }
    let Ok(set) = decompose(g) else {
        return (None, ExpectedSource::Unavailable);
    };
    let independent: Vec<_> = set.independent_paths().cloned().collect();
    if check_pairwise_edge_disjoint(&independent).is_err() {
        return (None, ExpectedSource::Unavailable);
    }
    let mut total = 0;
    for p in &independent {
        let Ok(sub) = induced_subgraph(g, p) else {
            return (None, ExpectedSource::Unavailable);
        };
        total += sub.graph.edge_count() - sub.graph.hidden_count();
    }
    (Some(total), ExpectedSource::SubstructureSum)
}

fn weighted_pick(rng: &mut impl Rng, options: Vec<(NodeRef, u128)>) -> NodeRef {
    let total: u128 = options.iter().map(|o| o.1).sum();
    let mut r = rng.gen_range(0..total);
    for (n, c) in options {
        if r < c {
            return n;
        }
        r -= c;
    }
    unreachable!("r < total")
}

/// Uniform random input-to-output path, drawn through suffix path counts.
/// The graph must have at least one path.
pub fn sample_path(g: &NetworkGraph, suffix: &[Vec<u128>], rng: &mut impl Rng) -> Path {
    let count = |n: NodeRef| suffix[n.layer][n.index - 1];
    let mut cur = weighted_pick(rng, g.nodes_of_layer(0).map(|n| (n, count(n))).collect());
    let mut nodes = vec![cur];
    while cur.layer != g.last_layer() {
        let options = g
            .out_edges(cur)
            .iter()
            .map(|id| g.edge(*id).head)
            .map(|h| (h, count(h)))
            .collect();
        cur = weighted_pick(rng, options);
        nodes.push(cur);
    }
    Path::from_nodes_unchecked(nodes)
}

pub fn verify_basis(
    g: &NetworkGraph,
    b: &BasisPathSet,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    for p in b.paths() {
        p.validate(g).map_err(|source| VerifyError::InvalidPath {
            path: p.clone(),
            source,
        })?;
    }
    let t0 = Instant::now();
    let coverage = check_coverage(g, b.paths());
    let t1 = Instant::now();
    let span = PathSpan::new(g, b.paths());
    let rank = span.rank();
    let t2 = Instant::now();

    let total_paths = g.path_count();
    let (mode, seed, targets) = match g.enumerate_paths(opts.max_paths) {
        Ok(all) => (SpanMode::Full, None, all),
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.sample_seed);
            let suffix = g.suffix_counts();
            let sample = (0..opts.samples)
                .map(|_| sample_path(g, &suffix, &mut rng))
                .collect();
            (SpanMode::Sampled, Some(opts.sample_seed), sample)
        }
    };
    let failures: Vec<Path> = targets
        .par_iter()
        .filter(|p| !span.contains(p))
        .cloned()
        .collect();
    let t3 = Instant::now();

    let (expected, source) = expected_cardinality(g);
    let actual = b.len();
    let ms = |a: Instant, z: Instant| (z - a).as_secs_f64() * 1e3;
    Ok(VerificationReport {
        coverage_ok: coverage.ok,
        uncovered_edges: coverage.uncovered,
        expected_cardinality: expected,
        expected_source: source,
        actual_cardinality: actual,
        cardinality_ok: expected.is_none_or(|e| e == actual),
        rank,
        independent_ok: rank == actual,
        total_paths: u64::try_from(total_paths).unwrap_or(u64::MAX),
        span_mode: mode,
        span_sample_seed: seed,
        span_checked: targets.len(),
        span_failures: failures,
        timings: opts.record_timings.then(|| Timings {
            coverage_ms: ms(t0, t1),
            rank_ms: ms(t1, t2),
            span_ms: ms(t2, t3),
        }),
    })
}
