//! Immutable host graphs and exact combinatorial primitives on them.
//!
//! Vertices are `0..n`. Undirected edges carry canonical ids `0..m` assigned in
//! lexicographic order of `(min, max)` endpoint pairs; percolation bitmaps are
//! indexed by these ids.

mod components;
mod enumerate;
mod io;
mod ops;
mod trees;
mod vertex_set;

use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::rng::mix64;

pub use components::{components, ComponentSummary, UnionFind};
pub use enumerate::{connected_subsets, for_each_connected_subset, SubsetView};
pub use io::{parse_graph, read_graph, write_graph};
pub use ops::{ball, edge_boundary, external_neighborhood, is_connected_subset, BallScratch};
pub use trees::{count_rooted_trees, count_rooted_trees_with_budget, TREE_COUNT_BUDGET};
pub use vertex_set::VertexSet;

/// A subset of the edges of a graph, addressed by canonical edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeSubset {
    /// One bit per edge id; length must equal `m`.
    Bitmap(FixedBitSet),
    /// Sorted, duplicate-free edge ids. Used when `m` is too large for a bitmap.
    Ids { m: u64, ids: Vec<u64> },
}

impl EdgeSubset {
    /// Length of the universe (the `m` of the host graph).
    pub fn universe(&self) -> u64 {
        match self {
            EdgeSubset::Bitmap(bits) => bits.len() as u64,
            EdgeSubset::Ids { m, .. } => *m,
        }
    }

    pub fn count(&self) -> u64 {
        match self {
            EdgeSubset::Bitmap(bits) => bits.count_ones(..) as u64,
            EdgeSubset::Ids { ids, .. } => ids.len() as u64,
        }
    }

    pub fn contains(&self, e: u64) -> bool {
        match self {
            EdgeSubset::Bitmap(bits) => bits.contains(e as usize),
            EdgeSubset::Ids { ids, .. } => ids.binary_search(&e).is_ok(),
        }
    }

    /// Retained edge ids in increasing order.
    pub fn ids(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            EdgeSubset::Bitmap(bits) => Box::new(bits.ones().map(|e| e as u64)),
            EdgeSubset::Ids { ids, .. } => Box::new(ids.iter().copied()),
        }
    }

    fn check_universe(&self, m: u64) -> Result<()> {
        let got = self.universe();
        if got != m {
            return Err(Error::LengthMismatch { expected: m, got });
        }
        if let EdgeSubset::Ids { ids, .. } = self {
            if ids.last().is_some_and(|&e| e >= m) {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: ids.last().copied().unwrap() + 1,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
enum Repr {
    /// Compressed sparse rows: the neighbors of `v` are
    /// `neighbors[offsets[v]..offsets[v + 1]]`, sorted ascending.
    /// `edge_offsets[v]` is the id of the first edge `(v, w)` with `w > v`.
    Csr {
        offsets: Vec<u64>,
        neighbors: Vec<u32>,
        edge_offsets: Vec<u64>,
    },
    /// `K_n`, never materialized.
    Complete,
}

/// Finite simple undirected graph.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    m: u64,
    min_degree: usize,
    max_degree: usize,
    repr: Repr,
    fingerprint: OnceLock<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("min_degree", &self.min_degree)
            .field("max_degree", &self.max_degree)
            .field("complete", &matches!(self.repr, Repr::Complete))
            .finish()
    }
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges (in either orientation) and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("{n} vertices exceed the u32 index space")));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            pairs.push((u.min(v) as u32, u.max(v) as u32));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0 as usize, w[0].1 as usize));
        }

        let mut degree = vec![0u64; n];
        for &(u, v) in &pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u64);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor: Vec<u64> = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * pairs.len()];
        // Pairs are sorted, so each list receives its entries in ascending order
        // for the `v` side; the `u` side is appended in ascending order too.
        for &(u, v) in &pairs {
            neighbors[cursor[u as usize] as usize] = v;
            cursor[u as usize] += 1;
        }
        for &(u, v) in &pairs {
            neighbors[cursor[v as usize] as usize] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
        }
        Ok(Graph::from_csr_unchecked(offsets, neighbors))
    }

    /// The complete graph `K_n`, stored implicitly.
    pub fn complete(n: usize) -> Graph {
        let m = (n as u64) * (n as u64).saturating_sub(1) / 2;
        let d = n.saturating_sub(1);
        Graph {
            n,
            m,
            min_degree: d,
            max_degree: d,
            repr: Repr::Complete,
            fingerprint: OnceLock::new(),
        }
    }

    /// Wraps sorted, symmetric adjacency lists. Callers guarantee the
    /// invariants; `validate` re-checks them.
    pub(crate) fn from_csr_unchecked(offsets: Vec<u64>, neighbors: Vec<u32>) -> Graph {
        let n = offsets.len() - 1;
        debug_assert_eq!(*offsets.last().unwrap() as usize, neighbors.len());
        let mut edge_offsets = Vec::with_capacity(n + 1);
        edge_offsets.push(0u64);
        let mut min_degree = usize::MAX;
        let mut max_degree = 0;
        for v in 0..n {
            let list = &neighbors[offsets[v] as usize..offsets[v + 1] as usize];
            min_degree = min_degree.min(list.len());
            max_degree = max_degree.max(list.len());
            let upper = list.len() - list.partition_point(|&w| (w as usize) <= v);
            edge_offsets.push(edge_offsets.last().unwrap() + upper as u64);
        }
        if n == 0 {
            min_degree = 0;
        }
        Graph {
            n,
            m: neighbors.len() as u64 / 2,
            min_degree,
            max_degree,
            repr: Repr::Csr {
                offsets,
                neighbors,
                edge_offsets,
            },
            fingerprint: OnceLock::new(),
        }
    }

    /// Checks every structural invariant: sorted lists, no self-loops, no
    /// parallel edges, symmetry, and `m = sum(deg) / 2`.
    pub fn validate(&self) -> Result<()> {
        let Repr::Csr {
            offsets, neighbors, ..
        } = &self.repr
        else {
            return Ok(());
        };
        if neighbors.len() % 2 != 0 {
            return Err(Error::invalid("odd degree sum"));
        }
        for v in 0..self.n {
            let list = &neighbors[offsets[v] as usize..offsets[v + 1] as usize];
            for (i, &w) in list.iter().enumerate() {
                let w = w as usize;
                if w >= self.n {
                    return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
                }
                if w == v {
                    return Err(Error::SelfLoop(v));
                }
                if i > 0 && list[i - 1] as usize >= w {
                    return Err(Error::DuplicateEdge(v, w));
                }
                if !self.has_edge(w, v) {
                    return Err(Error::invalid(format!("asymmetric adjacency {v} -> {w}")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        (self.n > 0 && self.min_degree == self.max_degree).then_some(self.max_degree)
    }

    pub fn is_complete_implicit(&self) -> bool {
        matches!(self.repr, Repr::Complete)
    }

    pub fn degree(&self, v: usize) -> usize {
        match &self.repr {
            Repr::Csr { offsets, .. } => (offsets[v + 1] - offsets[v]) as usize,
            Repr::Complete => self.n - 1,
        }
    }

    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        match &self.repr {
            Repr::Csr {
                offsets, neighbors, ..
            } => Neighbors::Slice(
                neighbors[offsets[v] as usize..offsets[v + 1] as usize].iter(),
            ),
            Repr::Complete => Neighbors::AllBut {
                next: 0,
                end: self.n,
                skip: v,
            },
        }
    }

    /// Sorted neighbor slice; `None` for implicit graphs.
    pub fn neighbor_slice(&self, v: usize) -> Option<&[u32]> {
        match &self.repr {
            Repr::Csr {
                offsets, neighbors, ..
            } => Some(&neighbors[offsets[v] as usize..offsets[v + 1] as usize]),
            Repr::Complete => None,
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.repr {
            Repr::Csr { .. } => self
                .neighbor_slice(u)
                .unwrap()
                .binary_search(&(v as u32))
                .is_ok(),
            Repr::Complete => u != v && u < self.n && v < self.n,
        }
    }

    /// Canonical id of edge `{u, v}`, if present.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<u64> {
        let (a, b) = (u.min(v), u.max(v));
        match &self.repr {
            Repr::Csr { edge_offsets, .. } => {
                let list = self.neighbor_slice(a).unwrap();
                let pos = list.binary_search(&(b as u32)).ok()?;
                let first_upper = list.partition_point(|&w| (w as usize) <= a);
                Some(edge_offsets[a] + (pos - first_upper) as u64)
            }
            Repr::Complete => {
                (a != b && b < self.n).then(|| complete_row_start(self.n, a) + (b - a - 1) as u64)
            }
        }
    }

    /// Endpoints `(u, v)` with `u < v` of edge id `e`.
    pub fn endpoints(&self, e: u64) -> (usize, usize) {
        assert!(e < self.m, "edge id {e} out of range (m = {})", self.m);
        match &self.repr {
            Repr::Csr { edge_offsets, .. } => {
                // last u with edge_offsets[u] <= e
                let u = edge_offsets.partition_point(|&o| o <= e) - 1;
                let list = self.neighbor_slice(u).unwrap();
                let first_upper = list.partition_point(|&w| (w as usize) <= u);
                let v = list[first_upper + (e - edge_offsets[u]) as usize];
                (u, v as usize)
            }
            Repr::Complete => {
                let n = self.n;
                let (mut lo, mut hi) = (0usize, n - 1);
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if complete_row_start(n, mid) <= e {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let u = lo;
                let v = u + 1 + (e - complete_row_start(n, u)) as usize;
                (u, v)
            }
        }
    }

    /// Calls `f(edge_id, u, v)` for every edge in id order (`u < v`).
    #[inline]
    pub fn for_each_edge<F: FnMut(u64, usize, usize)>(&self, mut f: F) {
        match &self.repr {
            Repr::Csr {
                offsets, neighbors, ..
            } => {
                let mut e = 0u64;
                for u in 0..self.n {
                    let list = &neighbors[offsets[u] as usize..offsets[u + 1] as usize];
                    let start = list.partition_point(|&w| (w as usize) <= u);
                    for &v in &list[start..] {
                        f(e, u, v as usize);
                        e += 1;
                    }
                }
            }
            Repr::Complete => {
                let mut e = 0u64;
                for u in 0..self.n {
                    for v in u + 1..self.n {
                        f(e, u, v);
                        e += 1;
                    }
                }
            }
        }
    }

    /// Like `for_each_edge`, restricted to the edges of `subset`.
    pub fn for_each_edge_in<F: FnMut(u64, usize, usize)>(
        &self,
        subset: &EdgeSubset,
        mut f: F,
    ) -> Result<()> {
        subset.check_universe(self.m)?;
        match subset {
            EdgeSubset::Bitmap(bits) => {
                if let Repr::Csr { .. } = self.repr {
                    self.for_each_edge(|e, u, v| {
                        if bits.contains(e as usize) {
                            f(e, u, v);
                        }
                    });
                } else {
                    for e in bits.ones() {
                        let (u, v) = self.endpoints(e as u64);
                        f(e as u64, u, v);
                    }
                }
            }
            EdgeSubset::Ids { ids, .. } => {
                for &e in ids {
                    let (u, v) = self.endpoints(e);
                    f(e, u, v);
                }
            }
        }
        Ok(())
    }

    /// All edges in id order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m as usize);
        self.for_each_edge(|_, u, v| out.push((u, v)));
        out
    }

    /// Structural hash identifying this graph; computed once.
    pub fn fingerprint(&self) -> u64 {
        *self.fingerprint.get_or_init(|| match &self.repr {
            Repr::Csr {
                offsets, neighbors, ..
            } => {
                let mut h = mix64(self.n as u64 ^ 0xC5A5_1F00);
                for &o in offsets.iter().step_by(1 + offsets.len() / 4096) {
                    h = mix64(h ^ o);
                }
                for chunk in neighbors.chunks(2) {
                    let x = chunk[0] as u64 | (chunk.get(1).copied().unwrap_or(0) as u64) << 32;
                    h = mix64(h.wrapping_add(x));
                }
                h
            }
            Repr::Complete => mix64(self.n as u64 ^ 0xC0_4D1E7E),
        })
    }
}

#[inline]
fn complete_row_start(n: usize, u: usize) -> u64 {
    let (n, u) = (n as u64, u as u64);
    u * (2 * n - u - 1) / 2
}

/// Neighbor iterator over either storage.
#[derive(Clone, Debug)]
pub enum Neighbors<'a> {
    Slice(std::slice::Iter<'a, u32>),
    AllBut { next: usize, end: usize, skip: usize },
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        match self {
            Neighbors::Slice(it) => it.next().map(|&v| v as usize),
            Neighbors::AllBut { next, end, skip } => {
                if *next == *skip {
                    *next += 1;
                }
                (*next < *end).then(|| {
                    *next += 1;
                    *next - 1
                })
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = match self {
            Neighbors::Slice(it) => it.len(),
            Neighbors::AllBut { next, end, skip } => {
                let raw = end.saturating_sub(*next);
                raw - usize::from(*skip >= *next && *skip < *end)
            }
        };
        (k, Some(k))
    }
}

impl ExactSizeIterator for Neighbors<'_> {}
