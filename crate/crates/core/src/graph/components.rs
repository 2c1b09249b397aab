use super::{EdgeSubset, Graph};
use crate::error::Result;

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    #[inline]
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns `true` if two distinct sets were merged.
    #[inline]
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// Connected components of a spanning subgraph.
///
/// Labels are dense (`0..count`) and assigned in order of each component's
/// smallest vertex, so two labelings of the same partition are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    labels: Vec<u32>,
    label_sizes: Vec<u32>,
    sizes: Vec<usize>,
}

impl ComponentSummary {
    fn from_labels(labels: Vec<u32>, label_count: usize) -> Self {
        let mut label_sizes = vec![0u32; label_count];
        for &l in &labels {
            label_sizes[l as usize] += 1;
        }
        let mut sizes: Vec<usize> = label_sizes.iter().map(|&s| s as usize).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Self {
            labels,
            label_sizes,
            sizes,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Component sizes, descending.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `L1`.
    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    /// `L2`; zero when there are fewer than two components.
    pub fn second_largest(&self) -> usize {
        self.sizes.get(1).copied().unwrap_or(0)
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_size(&self, label: usize) -> usize {
        self.label_sizes[label] as usize
    }

    /// `|C(v)|`.
    pub fn size_of(&self, v: usize) -> usize {
        self.label_sizes[self.labels[v] as usize] as usize
    }

    /// Number of components whose size lies in `[lo, hi]`.
    pub fn count_in_range(&self, lo: f64, hi: f64) -> usize {
        self.sizes
            .iter()
            .filter(|&&s| (s as f64) >= lo && (s as f64) <= hi)
            .count()
    }
}

/// Components of the subgraph on all `n` vertices keeping only `retained`
/// edges (all edges when `None`).
pub fn components(g: &Graph, retained: Option<&EdgeSubset>) -> Result<ComponentSummary> {
    let mut uf = UnionFind::new(g.n());
    match retained {
        None => g.for_each_edge(|_, u, v| {
            uf.union(u, v);
        }),
        Some(subset) => g.for_each_edge_in(subset, |_, u, v| {
            uf.union(u, v);
        })?,
    }
    let mut root_label = vec![u32::MAX; g.n()];
    let mut labels = vec![0u32; g.n()];
    let mut next = 0u32;
    for v in 0..g.n() {
        let r = uf.find(v);
        if root_label[r] == u32::MAX {
            root_label[r] = next;
            next += 1;
        }
        labels[v] = root_label[r];
    }
    let summary = ComponentSummary::from_labels(labels, next as usize);
    #[cfg(test)]
    {
        let oracle = bfs_components(g, retained);
        assert_eq!(summary, oracle, "union-find and BFS labelings disagree");
    }
    Ok(summary)
}

#[cfg(test)]
fn bfs_components(g: &Graph, retained: Option<&EdgeSubset>) -> ComponentSummary {
    let mut labels = vec![u32::MAX; g.n()];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if labels[s] != u32::MAX {
            continue;
        }
        labels[s] = next;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x) {
                let keep = match retained {
                    None => true,
                    Some(sub) => sub.contains(g.edge_id(x, y).unwrap()),
                };
                if keep && labels[y] == u32::MAX {
                    labels[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    ComponentSummary::from_labels(labels, next as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::generators::{complete_graph, disjoint_cliques};
    use crate::rng::SplitMix64;
    use fixedbitset::FixedBitSet;

    #[test]
    fn k4_without_edges() {
        let g = complete_graph(4).unwrap();
        let empty = EdgeSubset::Bitmap(FixedBitSet::with_capacity(6));
        let s = components(&g, Some(&empty)).unwrap();
        assert_eq!(s.sizes(), &[1, 1, 1, 1]);
        assert_eq!(s.second_largest(), 1);
        assert_eq!(s.count(), 4);
    }

    #[test]
    fn two_cliques() {
        let g = disjoint_cliques(3, 2).unwrap().graph;
        let s = components(&g, None).unwrap();
        assert_eq!(s.sizes(), &[4, 4]);
        assert_eq!(s.second_largest(), 4);
    }

    #[test]
    fn path_with_middle_edge_removed() {
        // 0-1-2 with edge {1,2} dropped
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut bits = FixedBitSet::with_capacity(2);
        bits.insert(0);
        let s = components(&g, Some(&EdgeSubset::Bitmap(bits))).unwrap();
        assert_eq!(s.sizes(), &[2, 1]);
        assert_eq!(s.largest(), 2);
    }

    #[test]
    fn bitmap_length_checked() {
        let g = complete_graph(4).unwrap();
        let wrong = EdgeSubset::Bitmap(FixedBitSet::with_capacity(5));
        assert!(matches!(
            components(&g, Some(&wrong)),
            Err(Error::LengthMismatch { expected: 6, got: 5 })
        ));
    }

    #[test]
    fn union_find_agrees_with_bfs_on_random_graphs() {
        // The oracle comparison runs inside `components` in test builds.
        let mut rng = SplitMix64::new(99);
        for _ in 0..1000 {
            let n = 1 + (rng.next_u64() % 64) as usize;
            let density = rng.next_open01();
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.next_open01() < density * 0.2 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let mut bits = FixedBitSet::with_capacity(g.m() as usize);
            for e in 0..g.m() as usize {
                bits.set(e, rng.next_open01() < 0.5);
            }
            let s = components(&g, Some(&EdgeSubset::Bitmap(bits.clone()))).unwrap();
            assert_eq!(s.sizes().iter().sum::<usize>(), n);
            assert!(s.largest() >= s.second_largest());
            g.for_each_edge(|e, u, v| {
                if bits.contains(e as usize) {
                    assert_eq!(s.label(u), s.label(v));
                }
            });
            let ids: Vec<u64> = bits.ones().map(|e| e as u64).collect();
            let t = components(&g, Some(&EdgeSubset::Ids { m: g.m(), ids })).unwrap();
            assert_eq!(s, t);
        }
    }
}
