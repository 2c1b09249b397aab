//! Maximum matching in general graphs (Edmonds' blossom algorithm).
//!
//! A greedy maximal matching is taken first and then improved by augmenting
//! paths until none remain.

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: std::collections::VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Returns the free endpoint of an augmenting path from `root`, if any.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    self.used[self.mate[to]] = true;
                    self.queue.push_back(self.mate[to]);
                }
            }
        }
        None
    }
}

/// Maximum matching of the graph on `0..n` with the given edges. Returned
/// pairs have `u < v` and are sorted.
pub fn maximum_matching(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut mate = vec![NONE; n];
    for &(u, v) in edges {
        if u != v && mate[u] == NONE && mate[v] == NONE {
            mate[u] = v;
            mate[v] = u;
        }
    }
    let mut b = Blossom {
        adj: &adj,
        mate,
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
        queue: Default::default(),
    };
    for root in 0..n {
        if b.mate[root] != NONE {
            continue;
        }
        if let Some(mut u) = b.find_path(root) {
            while u != NONE {
                let pv = b.parent[u];
                let next = b.mate[pv];
                b.mate[u] = pv;
                b.mate[pv] = u;
                u = next;
            }
        }
    }
    let mut out: Vec<(usize, usize)> = (0..n)
        .filter(|&u| b.mate[u] != NONE && u < b.mate[u])
        .map(|u| (u, b.mate[u]))
        .collect();
    out.sort_unstable();
    out
}
