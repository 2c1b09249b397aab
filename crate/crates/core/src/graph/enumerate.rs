//! Connected vertex subsets by canonical extension.
//!
//! Each set is generated exactly once, from its smallest vertex: the set grows
//! only by vertices larger than the root that are adjacent to the newest
//! member and not adjacent to any earlier member at the time they are
//! discovered. No global seen-set is kept.

use std::ops::{ControlFlow, RangeInclusive};

use super::Graph;

/// A connected set together with incrementally maintained statistics.
#[derive(Debug)]
pub struct SubsetView<'a> {
    pub vertices: &'a [usize],
    /// Edges with both endpoints inside.
    pub internal_edges: u64,
    /// `e(U, U^C)`.
    pub boundary_edges: u64,
    /// `|U ∪ N(U)|`.
    pub closed_neighborhood: usize,
}

impl SubsetView<'_> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `|N(U) \ U|`.
    pub fn external_neighbors(&self) -> usize {
        self.closed_neighborhood - self.vertices.len()
    }
}

struct Esu<'g, F> {
    g: &'g Graph,
    sizes: RangeInclusive<usize>,
    root: usize,
    members: Vec<usize>,
    in_set: Vec<bool>,
    /// number of members in the closed neighborhood of each vertex
    cover: Vec<u32>,
    closed: usize,
    internal: u64,
    boundary: u64,
    visit: F,
}

impl<F> Esu<'_, F>
where
    F: FnMut(&SubsetView<'_>) -> ControlFlow<()>,
{
    fn push(&mut self, w: usize) {
        let inside = self.g.neighbors(w).filter(|&x| self.in_set[x]).count() as u64;
        self.internal += inside;
        self.boundary = self.boundary + self.g.degree(w) as u64 - 2 * inside;
        self.in_set[w] = true;
        self.members.push(w);
        self.cover[w] += 1;
        if self.cover[w] == 1 {
            self.closed += 1;
        }
        for x in self.g.neighbors(w) {
            self.cover[x] += 1;
            if self.cover[x] == 1 {
                self.closed += 1;
            }
        }
    }

    fn pop(&mut self) {
        let w = self.members.pop().unwrap();
        self.in_set[w] = false;
        let inside = self.g.neighbors(w).filter(|&x| self.in_set[x]).count() as u64;
        self.internal -= inside;
        self.boundary = self.boundary + 2 * inside - self.g.degree(w) as u64;
        self.cover[w] -= 1;
        if self.cover[w] == 0 {
            self.closed -= 1;
        }
        for x in self.g.neighbors(w) {
            self.cover[x] -= 1;
            if self.cover[x] == 0 {
                self.closed -= 1;
            }
        }
    }

    fn emit(&mut self) -> ControlFlow<()> {
        if self.sizes.contains(&self.members.len()) {
            let view = SubsetView {
                vertices: &self.members,
                internal_edges: self.internal,
                boundary_edges: self.boundary,
                closed_neighborhood: self.closed,
            };
            (self.visit)(&view)
        } else {
            ControlFlow::Continue(())
        }
    }

    fn extend(&mut self, mut ext: Vec<usize>) -> ControlFlow<()> {
        if self.members.len() >= *self.sizes.end() {
            return ControlFlow::Continue(());
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(
                self.g
                    .neighbors(w)
                    .filter(|&x| x > self.root && self.cover[x] == 0),
            );
            self.push(w);
            let flow = match self.emit() {
                ControlFlow::Continue(()) => self.extend(next),
                brk => brk,
            };
            self.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn run_root(&mut self, root: usize) -> ControlFlow<()> {
        self.root = root;
        self.push(root);
        let ext: Vec<usize> = self.g.neighbors(root).filter(|&x| x > root).collect();
        let flow = match self.emit() {
            ControlFlow::Continue(()) => self.extend(ext),
            brk => brk,
        };
        self.pop();
        flow
    }
}

/// Visits every connected vertex set whose size lies in `sizes`, exactly
/// once, in a deterministic order (roots ascending). Returning
/// `ControlFlow::Break` from `visit` stops the enumeration.
pub fn for_each_connected_subset<F>(
    g: &Graph,
    sizes: RangeInclusive<usize>,
    roots: impl IntoIterator<Item = usize>,
    visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&SubsetView<'_>) -> ControlFlow<()>,
{
    if *sizes.end() == 0 || sizes.is_empty() {
        return ControlFlow::Continue(());
    }
    let mut esu = Esu {
        g,
        sizes,
        root: 0,
        members: Vec::new(),
        in_set: vec![false; g.n()],
        cover: vec![0; g.n()],
        closed: 0,
        internal: 0,
        boundary: 0,
        visit,
    };
    for root in roots {
        esu.run_root(root)?;
    }
    ControlFlow::Continue(())
}

/// All connected sets of size `1..=k_max`, each sorted ascending.
pub fn connected_subsets(g: &Graph, k_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let _ = for_each_connected_subset(g, 1..=k_max, 0..g.n(), |s| {
        let mut v = s.vertices.to_vec();
        v.sort_unstable();
        out.push(v);
        ControlFlow::Continue(())
    });
    out
}
