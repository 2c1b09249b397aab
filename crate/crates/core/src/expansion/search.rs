//! Simulated annealing for vertex sets with small `e(U, U^C) / |U|`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::graph::Graph;
use crate::rng::stream_rng;

const T_START: f64 = 0.05;
const T_END: f64 = 1e-4;

/// Best set found by [`anneal`].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SearchHit {
    /// Sorted members.
    pub vertices: Vec<usize>,
    pub boundary: u64,
    pub proposals: u64,
    /// Largest set size visited.
    pub max_size: usize,
}

impl SearchHit {
    /// `e(U, U^C) / |U|`.
    pub fn ratio(&self) -> f64 {
        self.boundary as f64 / self.vertices.len() as f64
    }
}

/// Minimizes `e(U, U^C) / |U|` over `1 <= |U| <= cap`.
///
/// Restart `i` draws from `stream_rng(seed, i)` and gets `budget / restarts`
/// proposals. A proposal adds a random neighbor of a random member or drops a
/// random member; acceptance is Metropolis on the ratio scaled by the maximum
/// degree, with geometric cooling from `T_START` to `T_END`. Restarts run in
/// parallel; the best (lowest ratio, then lowest restart index) wins.
pub(crate) fn anneal(g: &Graph, cap: usize, budget: u64, restarts: usize, seed: u64) -> Option<SearchHit> {
    let cap = cap.min(g.n());
    if cap == 0 || g.n() == 0 || restarts == 0 {
        return None;
    }
    let per = (budget / restarts as u64).max(1);
    (0..restarts)
        .into_par_iter()
        .map(|i| Annealer::new(g, cap, stream_rng(seed, i as u64)).run(per))
        .reduce_with(|a, b| {
            // a precedes b in restart order
            if (b.boundary as u128) * (a.vertices.len() as u128)
                < (a.boundary as u128) * (b.vertices.len() as u128)
            {
                b
            } else {
                a
            }
        })
}

struct Annealer<'g> {
    g: &'g Graph,
    cap: usize,
    rng: ChaCha8Rng,
    /// neighbors inside the current set, for touched vertices
    inside: Vec<u32>,
    /// position in `members`, or `u32::MAX`
    pos: Vec<u32>,
    members: Vec<u32>,
    boundary: u64,
}

impl<'g> Annealer<'g> {
    fn new(g: &'g Graph, cap: usize, rng: ChaCha8Rng) -> Self {
        Self {
            g,
            cap,
            rng,
            inside: vec![0; g.n()],
            pos: vec![u32::MAX; g.n()],
            members: Vec::new(),
            boundary: 0,
        }
    }

    fn neighbor_at(&self, u: usize, i: usize) -> usize {
        match self.g.neighbor_slice(u) {
            Some(list) => list[i] as usize,
            None => {
                if i < u {
                    i
                } else {
                    i + 1
                }
            }
        }
    }

    fn gain(&self, v: usize) -> i64 {
        self.g.degree(v) as i64 - 2 * self.inside[v] as i64
    }

    fn add(&mut self, v: usize) {
        self.boundary = (self.boundary as i64 + self.gain(v)) as u64;
        self.pos[v] = self.members.len() as u32;
        self.members.push(v as u32);
        for i in 0..self.g.degree(v) {
            let w = self.neighbor_at(v, i);
            self.inside[w] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.boundary = (self.boundary as i64 - self.gain(v)) as u64;
        let at = self.pos[v] as usize;
        self.members.swap_remove(at);
        if let Some(&moved) = self.members.get(at) {
            self.pos[moved as usize] = at as u32;
        }
        self.pos[v] = u32::MAX;
        for i in 0..self.g.degree(v) {
            let w = self.neighbor_at(v, i);
            self.inside[w] -= 1;
        }
    }

    /// A random non-member adjacent to the set, if one is found quickly.
    fn frontier(&mut self) -> Option<usize> {
        for _ in 0..8 {
            let at = self.rng.gen_range(0..self.members.len());
            let u = self.members[at] as usize;
            let deg = self.g.degree(u);
            if deg == 0 {
                continue;
            }
            let i = self.rng.gen_range(0..deg);
            let w = self.neighbor_at(u, i);
            if self.pos[w] == u32::MAX {
                return Some(w);
            }
        }
        None
    }

    fn run(mut self, proposals: u64) -> SearchHit {
        let scale = self.g.max_degree().max(1) as f64;
        let start = self.rng.gen_range(0..self.g.n());
        self.add(start);
        let initial = self.rng.gen_range(1..=self.cap);
        while self.members.len() < initial {
            match self.frontier() {
                Some(w) => self.add(w),
                None => break,
            }
        }
        let mut best = self.snapshot(0);
        let mut largest = self.members.len();
        let cooling = (T_END / T_START).powf(1.0 / proposals as f64);
        let mut temp = T_START;
        for step in 1..=proposals {
            temp *= cooling;
            let size = self.members.len();
            let current = self.boundary as f64 / size as f64;
            let grow = size == 1 || (size < self.cap && self.rng.gen_bool(0.5));
            if grow {
                let Some(w) = self.frontier() else { continue };
                let next = (self.boundary as i64 + self.gain(w)) as f64 / (size + 1) as f64;
                if self.accept(current, next, scale, temp) {
                    self.add(w);
                }
            } else {
                let at = self.rng.gen_range(0..size);
                let u = self.members[at] as usize;
                let next = (self.boundary as i64 - self.gain(u)) as f64 / (size - 1) as f64;
                if self.accept(current, next, scale, temp) {
                    self.remove(u);
                }
            }
            let size = self.members.len();
            if (self.boundary as u128) * (best.vertices.len() as u128)
                < (best.boundary as u128) * (size as u128)
            {
                best = self.snapshot(step);
            }
            largest = largest.max(size);
        }
        best.proposals = proposals;
        best.max_size = largest;
        best
    }

    fn accept(&mut self, current: f64, next: f64, scale: f64, temp: f64) -> bool {
        let delta = (next - current) / scale;
        delta <= 0.0 || self.rng.gen::<f64>() < (-delta / temp).exp()
    }

    fn snapshot(&self, proposals: u64) -> SearchHit {
        let mut vertices: Vec<usize> = self.members.iter().map(|&v| v as usize).collect();
        vertices.sort_unstable();
        SearchHit {
            vertices,
            boundary: self.boundary,
            proposals,
            max_size: self.members.len(),
        }
    }
}
