use std::collections::VecDeque;

use super::{Graph, VertexSet};

/// `e(U, U^C)`: edges with exactly one endpoint in `u`.
pub fn edge_boundary(g: &Graph, u: &VertexSet) -> u64 {
    if g.is_complete_implicit() {
        return (u.len() as u64) * (g.n() - u.len()) as u64;
    }
    u.iter()
        .map(|x| g.neighbors(x).filter(|&y| !u.contains(y)).count() as u64)
        .sum()
}

/// `N(U) \ U`.
pub fn external_neighborhood(g: &Graph, u: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new(g.n());
    for x in u.iter() {
        for y in g.neighbors(x) {
            if !u.contains(y) {
                out.insert(y);
            }
        }
    }
    out
}

/// Vertices within graph distance `r` of `v`.
pub fn ball(g: &Graph, v: usize, r: usize) -> VertexSet {
    let mut scratch = BallScratch::new(g.n());
    VertexSet::from_vertices(g.n(), scratch.ball(g, v, r).iter().copied())
}

/// `true` when `vertices` is nonempty and induces a connected subgraph.
pub fn is_connected_subset(g: &Graph, vertices: &VertexSet) -> bool {
    let Some(start) = vertices.iter().next() else {
        return false;
    };
    let mut seen = VertexSet::new(g.n());
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for y in g.neighbors(x) {
            if vertices.contains(y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len() == vertices.len()
}

/// Reusable BFS state for many ball queries on one graph.
pub struct BallScratch {
    stamp: Vec<u32>,
    epoch: u32,
    members: Vec<usize>,
    queue: VecDeque<(usize, usize)>,
}

impl BallScratch {
    pub fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            epoch: 0,
            members: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Members of `B(v, r)` in BFS order; valid until the next call.
    pub fn ball(&mut self, g: &Graph, v: usize, r: usize) -> &[usize] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.members.clear();
        self.queue.clear();
        self.stamp[v] = epoch;
        self.members.push(v);
        self.queue.push_back((v, 0));
        while let Some((x, dist)) = self.queue.pop_front() {
            if dist == r {
                continue;
            }
            for y in g.neighbors(x) {
                if self.stamp[y] != epoch {
                    self.stamp[y] = epoch;
                    self.members.push(y);
                    self.queue.push_back((y, dist + 1));
                }
            }
        }
        &self.members
    }
}
