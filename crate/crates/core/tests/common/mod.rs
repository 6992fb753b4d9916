//! Reference computations shared by the integration tests. Edge indexing,
//! path enumeration and rank here are written from scratch and never call
//! the library's enumeration or elimination code.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedMul, CheckedSub, Signed, Zero};
use rand::Rng;

use basis_paths::{NetworkGraph, NetworkSpec, Path};

/// `(layer, 1-based index)`.
pub type Node = (usize, usize);

pub struct RefNet {
    pub layers: Vec<usize>,
    pub blocks: Vec<(usize, usize)>,
    edges: BTreeMap<(Node, Node), usize>,
}

impl RefNet {
    pub fn new(layers: &[usize], blocks: &[(usize, usize)]) -> Self {
        let mut edges = BTreeMap::new();
        for &(a, b) in blocks {
            for i in 1..=layers[a] {
                for j in 1..=layers[b] {
                    let next = edges.len();
                    edges.insert(((a, i), (b, j)), next);
                }
            }
        }
        Self {
            layers: layers.to_vec(),
            blocks: blocks.to_vec(),
            edges,
        }
    }

    pub fn layered(layers: &[usize]) -> Self {
        let blocks: Vec<_> = (1..layers.len()).map(|l| (l - 1, l)).collect();
        Self::new(layers, &blocks)
    }

    /// Reads only the layer sizes and block list of `g`.
    pub fn of(g: &NetworkGraph) -> Self {
        let blocks: Vec<_> = g.blocks().iter().map(|b| (b.from, b.to)).collect();
        Self::new(g.layer_sizes(), &blocks)
    }

    pub fn last(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn hidden(&self) -> usize {
        self.layers[1..self.last()].iter().sum()
    }

    pub fn paths(&self) -> Vec<Vec<Node>> {
        let mut out = Vec::new();
        for i in 1..=self.layers[0] {
            let mut stack = vec![(0, i)];
            self.walk(&mut stack, &mut out);
        }
        out.sort();
        out
    }

    fn walk(&self, stack: &mut Vec<Node>, out: &mut Vec<Vec<Node>>) {
        let (l, _) = *stack.last().unwrap();
        if l == self.last() {
            out.push(stack.clone());
            return;
        }
        for &(a, b) in &self.blocks {
            if a != l {
                continue;
            }
            for j in 1..=self.layers[b] {
                stack.push((b, j));
                self.walk(stack, out);
                stack.pop();
            }
        }
    }

    pub fn indicator(&self, nodes: &[Node]) -> Vec<i64> {
        let mut v = vec![0; self.m()];
        for w in nodes.windows(2) {
            v[self.edges[&(w[0], w[1])]] += 1;
        }
        v
    }

    pub fn indicator_of(&self, p: &Path) -> Vec<i64> {
        self.indicator(&nodes_of(p))
    }
}

pub fn nodes_of(p: &Path) -> Vec<Node> {
    p.nodes().iter().map(|n| (n.layer, n.index)).collect()
}

/// Fraction-free elimination with every stored row kept primitive.
struct IntEchelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T> IntEchelon<T>
where
    T: Clone + Integer + Signed + CheckedMul + CheckedSub + From<i64>,
{
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn reduce(&self, v: &[i64]) -> Option<Vec<T>> {
        let mut v: Vec<T> = v.iter().map(|&x| T::from(x)).collect();
        for (c, row) in &self.rows {
            if v[*c].is_zero() {
                continue;
            }
            let a = row[*c].clone();
            let b = v[*c].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.checked_mul(&a)?.checked_sub(&r.checked_mul(&b)?)?;
            }
            let g = v.iter().fold(T::zero(), |g, x| g.gcd(x));
            if !g.is_zero() {
                v.iter_mut().for_each(|x| *x = x.div_floor(&g));
            }
        }
        Some(v)
    }

    fn insert(&mut self, v: &[i64]) -> Option<bool> {
        let r = self.reduce(v)?;
        match r.iter().position(|x| !x.is_zero()) {
            Some(c) => {
                self.rows.push((c, r));
                Some(true)
            }
            None => Some(false),
        }
    }

    fn rank(rows: &[Vec<i64>]) -> Option<usize> {
        let mut e = Self::new();
        let mut r = 0;
        for row in rows {
            r += usize::from(e.insert(row)?);
        }
        Some(r)
    }

    fn members(basis: &[Vec<i64>], targets: &[Vec<i64>]) -> Option<Vec<bool>> {
        let mut e = Self::new();
        for row in basis {
            e.insert(row)?;
        }
        targets
            .iter()
            .map(|t| e.reduce(t).map(|r| r.iter().all(Zero::is_zero)))
            .collect()
    }
}

pub fn oracle_rank(rows: &[Vec<i64>]) -> usize {
    IntEchelon::<i128>::rank(rows)
        .or_else(|| IntEchelon::<BigInt>::rank(rows))
        .expect("big integers do not overflow")
}

/// For each target, whether it lies in the rational span of `basis`.
pub fn oracle_in_span(basis: &[Vec<i64>], targets: &[Vec<i64>]) -> Vec<bool> {
    IntEchelon::<i128>::members(basis, targets)
        .or_else(|| IntEchelon::<BigInt>::members(basis, targets))
        .expect("big integers do not overflow")
}

pub fn combine(coefficients: &[BigRational], rows: &[Vec<i64>]) -> Vec<BigRational> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut out = vec![BigRational::zero(); dim];
    for (c, row) in coefficients.iter().zip(rows) {
        for (o, &x) in out.iter_mut().zip(row) {
            *o += c * BigRational::from_integer(x.into());
        }
    }
    out
}

/// Transition bits of a substructure path, written as an `(L+1)^2` table.
pub fn alpha_bits(layers: &[usize], last_layer: usize) -> Vec<u8> {
    let side = last_layer + 1;
    let mut bits = vec![0; side * side];
    for w in layers.windows(2) {
        bits[w[0] * side + w[1]] = 1;
    }
    bits
}

pub fn random_layers(rng: &mut impl Rng, max_len: usize, max_size: usize) -> Vec<usize> {
    let len = rng.gen_range(2..=max_len);
    (0..len).map(|_| rng.gen_range(1..=max_size)).collect()
}

/// Every layer-size vector of length `len` with entries in `1..=max`.
pub fn all_layer_vectors(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max).map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture(name: &str) -> NetworkGraph {
    NetworkGraph::build(&NetworkSpec::from_json(&fixture_text(name)).unwrap()).unwrap()
}

/// Network spec fixtures, accepted and rejected.
pub const NETWORK_FIXTURES: &[&str] = &[
    "two_two_two.json",
    "narrow_212.json",
    "three_two_three.json",
    "unbalanced.json",
    "short_skip.json",
    "one_skip.json",
    "long_skip.json",
    "two_skips_shared.json",
    "shared_tail.json",
    "shared_head.json",
];

pub fn graph(layers: &[usize]) -> NetworkGraph {
    NetworkGraph::build(&NetworkSpec::layered(layers)).unwrap()
}

pub fn graph_with(layers: &[usize], blocks: &[(usize, usize)]) -> NetworkGraph {
    NetworkGraph::build(&NetworkSpec::with_blocks(layers, blocks)).unwrap()
}
