use std::ops::ControlFlow;

use super::{for_each_connected_subset, Graph, UnionFind};
use crate::error::{Error, Result};

/// Work limit (edge subsets examined) for [`count_rooted_trees`].
pub const TREE_COUNT_BUDGET: u64 = 50_000_000;

/// Number of subtrees of `g` with `k` vertices that contain `v`, counted as
/// distinct (vertex set, edge set) pairs. Exhaustive; meant for small graphs.
pub fn count_rooted_trees(g: &Graph, v: usize, k: usize) -> Result<u64> {
    count_rooted_trees_with_budget(g, v, k, TREE_COUNT_BUDGET)
}

/// [`count_rooted_trees`] with an explicit limit on edge subsets examined.
pub fn count_rooted_trees_with_budget(g: &Graph, v: usize, k: usize, budget: u64) -> Result<u64> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if k == 0 {
        return Ok(0);
    }
    let mut total = 0u64;
    let mut work = 0u64;
    let mut failure = None;
    let _ = for_each_connected_subset(g, k..=k, 0..g.n(), |set| {
        if !set.vertices.contains(&v) {
            return ControlFlow::Continue(());
        }
        match spanning_trees(g, set.vertices, &mut work, budget) {
            Ok(c) => {
                total += c;
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Spanning trees of the subgraph induced by `vertices`, by checking every
/// `(k-1)`-subset of its edges for acyclicity.
fn spanning_trees(g: &Graph, vertices: &[usize], work: &mut u64, budget: u64) -> Result<u64> {
    let k = vertices.len();
    let local = |x: usize| vertices.iter().position(|&y| y == x);
    let mut edges = Vec::new();
    for (i, &x) in vertices.iter().enumerate() {
        for y in g.neighbors(x) {
            if let Some(j) = local(y) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let mut count = 0u64;
    let mut chosen = Vec::with_capacity(k);
    choose(&edges, 0, k - 1, &mut chosen, &mut |picked| {
        *work += 1;
        if *work > budget {
            return Err(Error::Budget(format!(
                "tree enumeration exceeded {budget} edge subsets"
            )));
        }
        let mut uf = UnionFind::new(k);
        if picked.iter().all(|&(a, b)| uf.union(a, b)) {
            count += 1;
        }
        Ok(())
    })?;
    Ok(count)
}

fn choose<F>(
    items: &[(usize, usize)],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<(usize, usize)>,
    f: &mut F,
) -> Result<()>
where
    F: FnMut(&[(usize, usize)]) -> Result<()>,
{
    if remaining == 0 {
        return f(chosen);
    }
    for i in start..items.len() {
        if items.len() - i < remaining {
            break;
        }
        chosen.push(items[i]);
        choose(items, i + 1, remaining - 1, chosen, f)?;
        chosen.pop();
    }
    Ok(())
}
