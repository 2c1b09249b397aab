use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BallScratch, ComponentSummary, Graph, VertexSet};
use crate::matching::maximum_matching;
use crate::rng::{derive_seed, keyed_uniform, stream_rng};

use super::{double_exposure_split, percolate_with, union_samples, Sampler};

/// Named constants `c` in the large-component threshold `c ln n / eps^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LargePreset {
    /// `c = 7`, the default for `V_L`.
    Seven,
    /// `c = 14`, the wider gap window.
    Fourteen,
}

impl LargePreset {
    pub fn factor(self) -> f64 {
        match self {
            LargePreset::Seven => 7.0,
            LargePreset::Fourteen => 14.0,
        }
    }
}

/// `c ln n / eps^2`.
pub fn large_threshold(n: usize, eps: f64, preset: LargePreset) -> f64 {
    preset.factor() * (n as f64).ln() / (eps * eps)
}

/// Vertices whose component has at least `threshold` vertices.
pub fn large_component_vertices(summary: &ComponentSummary, threshold: f64) -> VertexSet {
    VertexSet::from_vertices(
        summary.n(),
        (0..summary.n()).filter(|&v| summary.size_of(v) as f64 >= threshold),
    )
}

/// Number of components with size in `[lo, hi]`.
pub fn gap_scan(summary: &ComponentSummary, lo: f64, hi: f64) -> Result<usize> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::invalid(format!("empty window [{lo}, {hi}]")));
    }
    Ok(summary.count_in_range(lo, hi))
}

fn host_degree(g: &Graph) -> usize {
    g.regular_degree().unwrap_or_else(|| g.max_degree())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SprinkleReport {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub threshold: f64,
    /// Components of `G_{p1}` with at least `threshold` vertices.
    pub stage1_large_components: usize,
    /// `|V_L(G_{p1})|`.
    pub vl_size: usize,
    /// Every vertex of `V_L(G_{p1})` lies in one component of `G_{p1} ∪ G_{p2}`.
    pub merged: bool,
    pub l1: usize,
    pub l2: usize,
    pub component_count: usize,
}

#[derive(Debug, Clone)]
pub struct SprinkleOutcome {
    pub report: SprinkleReport,
    pub union_summary: ComponentSummary,
}

/// Splits `p`, samples `G_{p1}` with seed `derive_seed(seed, 1)` and `G_{p2}` with
/// `derive_seed(seed, 2)`, and checks that the large stage-one components merge.
///
/// `threshold` defaults to `7 ln n / eps^2`.
pub fn sprinkle_merge(
    g: &Graph,
    p: f64,
    eps: f64,
    seed: u64,
    threshold: Option<f64>,
    sampler: Sampler,
) -> Result<SprinkleOutcome> {
    let split = double_exposure_split(p, eps, host_degree(g))?;
    let threshold = match threshold {
        Some(t) => t,
        None if eps > 0.0 => large_threshold(g.n(), eps, LargePreset::Seven),
        None => return Err(Error::invalid("default threshold needs eps > 0")),
    };
    let s1 = percolate_with(g, split.p1, derive_seed(seed, 1), sampler)?;
    let s2 = percolate_with(g, split.p2, derive_seed(seed, 2), sampler)?;
    let stage1 = s1.components(g)?;
    let stage1_large_components = stage1
        .sizes()
        .iter()
        .take_while(|&&s| s as f64 >= threshold)
        .count();
    let vl = large_component_vertices(&stage1, threshold);
    drop(stage1);
    let union = union_samples(&s1, &s2)?;
    drop((s1, s2));
    let summary = union.components(g)?;
    let mut labels = vl.iter().map(|v| summary.label(v));
    let merged = match labels.next() {
        None => true,
        Some(first) => labels.all(|l| l == first),
    };
    Ok(SprinkleOutcome {
        report: SprinkleReport {
            p,
            p1: split.p1,
            p2: split.p2,
            threshold,
            stage1_large_components,
            vl_size: vl.len(),
            merged,
            l1: summary.largest(),
            l2: summary.second_largest(),
            component_count: summary.count(),
        },
        union_summary: summary,
    })
}

pub fn sprinkle_merge_stat(g: &Graph, p: f64, eps: f64, seed: u64) -> Result<SprinkleReport> {
    Ok(sprinkle_merge(g, p, eps, seed, None, Sampler::Auto)?.report)
}

/// `ceil(1 + log_d ln n)`, at least 1.
pub fn default_dense_radius(n: usize, d: usize) -> usize {
    if d < 2 || n < 3 {
        return 1;
    }
    let r = 1.0 + (n as f64).ln().ln() / (d as f64).ln();
    (r.ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseReport {
    pub radius: usize,
    pub threshold: f64,
    pub probes: usize,
    pub vl_size: usize,
    /// Minimum over probes of `|B(v, radius) ∩ V_L|`.
    pub min_hits: usize,
    pub mean_hits: f64,
    pub zero_probes: usize,
    pub zero_fraction: f64,
}

/// Counts large-component vertices near probe vertices.
///
/// Probes are all vertices when `n_probes >= n`, otherwise `n_probes` uniform
/// draws (with replacement) from `stream_rng(seed, 0)`.
pub fn everywhere_dense_stat(
    g: &Graph,
    summary: &ComponentSummary,
    radius: Option<usize>,
    large_threshold: f64,
    n_probes: usize,
    seed: u64,
) -> Result<DenseReport> {
    if summary.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n() as u64,
            got: summary.n() as u64,
        });
    }
    let radius = radius.unwrap_or_else(|| default_dense_radius(g.n(), host_degree(g)));
    if radius == 0 {
        return Err(Error::invalid("radius must be at least 1"));
    }
    let probes: Vec<usize> = if n_probes >= g.n() {
        (0..g.n()).collect()
    } else {
        let mut rng = stream_rng(seed, 0);
        (0..n_probes).map(|_| rng.gen_range(0..g.n())).collect()
    };
    let vl = large_component_vertices(summary, large_threshold);
    let hits: Vec<usize> = probes
        .par_chunks(64)
        .flat_map_iter(|chunk| {
            let mut scratch = BallScratch::new(g.n());
            chunk
                .iter()
                .map(|&v| scratch.ball(g, v, radius).iter().filter(|&&w| vl.contains(w)).count())
                .collect::<Vec<_>>()
        })
        .collect();
    let zero_probes = hits.iter().filter(|&&h| h == 0).count();
    let count = hits.len().max(1) as f64;
    Ok(DenseReport {
        radius,
        threshold: large_threshold,
        probes: hits.len(),
        vl_size: vl.len(),
        min_hits: hits.iter().copied().min().unwrap_or(0),
        mean_hits: hits.iter().sum::<usize>() as f64 / count,
        zero_probes,
        zero_fraction: zero_probes as f64 / count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingTrialReport {
    pub f_size: usize,
    pub q: f64,
    /// `q * d`.
    pub delta: f64,
    /// `delta^2 |F| / d`.
    pub bound: f64,
    /// `exp(-bound)`.
    pub tail_bound: f64,
    pub trials: u64,
    pub min: usize,
    pub mean: f64,
    pub max: usize,
    /// Trials whose matching is smaller than `bound`.
    pub failures: u64,
    pub failure_fraction: f64,
    /// `sqrt(t (1 - t) / trials)` at `t = tail_bound`.
    pub failure_stderr: f64,
}

/// Keeps each edge of `f` with probability `q` and measures the maximum matching.
///
/// Trial `t` keeps edge `e` iff `keyed_uniform(derive_seed(seed, t), e) < q`.
pub fn percolated_matching_trial(
    g: &Graph,
    f: &[u64],
    q: f64,
    seed: u64,
    trials: u64,
) -> Result<MatchingTrialReport> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q = {q} outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let mut f = f.to_vec();
    f.sort_unstable();
    f.dedup();
    if let Some(&e) = f.last() {
        if e >= g.m() {
            return Err(Error::invalid(format!("edge id {e} out of range (m = {})", g.m())));
        }
    }
    let ends: Vec<(usize, usize)> = f.iter().map(|&e| g.endpoints(e)).collect();
    let mut verts: Vec<usize> = ends.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let local = |v: usize| verts.binary_search(&v).unwrap();
    let local_ends: Vec<(usize, usize)> = ends.iter().map(|&(u, v)| (local(u), local(v))).collect();

    let sizes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let key = derive_seed(seed, t);
            let kept: Vec<(usize, usize)> = f
                .iter()
                .zip(&local_ends)
                .filter(|(&e, _)| keyed_uniform(key, e) < q)
                .map(|(_, &uv)| uv)
                .collect();
            maximum_matching(verts.len(), &kept).len()
        })
        .collect();

    let d = host_degree(g).max(1) as f64;
    let delta = q * d;
    let bound = delta * delta * f.len() as f64 / d;
    let tail_bound = (-bound).exp();
    let failures = sizes.iter().filter(|&&s| (s as f64) < bound).count() as u64;
    Ok(MatchingTrialReport {
        f_size: f.len(),
        q,
        delta,
        bound,
        tail_bound,
        trials,
        min: sizes.iter().copied().min().unwrap_or(0),
        mean: sizes.iter().sum::<usize>() as f64 / trials as f64,
        max: sizes.iter().copied().max().unwrap_or(0),
        failures,
        failure_fraction: failures as f64 / trials as f64,
        failure_stderr: (tail_bound * (1.0 - tail_bound) / trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_graph, disjoint_cliques, hypercube};
    use crate::graph::components;
    use crate::percolation::{percolate, PercolationSample};

    fn summary_of(sizes: &[usize]) -> (Graph, ComponentSummary) {
        // disjoint paths of the given sizes
        let n: usize = sizes.iter().sum();
        let mut edges = Vec::new();
        let mut base = 0;
        for &s in sizes {
            for i in 1..s {
                edges.push((base + i - 1, base + i));
            }
            base += s;
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let s = components(&g, None).unwrap();
        (g, s)
    }

    #[test]
    fn gap_scan_examples() {
        let (_, s) = summary_of(&[10, 5, 1]);
        assert_eq!(gap_scan(&s, 2.0, 6.0).unwrap(), 1);
        assert_eq!(gap_scan(&s, 1.0, 16.0).unwrap(), s.count());
        assert!(gap_scan(&s, 7.0, 6.0).is_err());
        let g = hypercube(4).unwrap();
        let empty = PercolationSample::empty(&g).components(&g).unwrap();
        assert_eq!(gap_scan(&empty, 2.0, 16.0).unwrap(), 0);
    }

    #[test]
    fn large_vertices_examples() {
        let h = disjoint_cliques(3, 2).unwrap();
        let s = components(&h.graph, None).unwrap();
        assert_eq!(large_component_vertices(&s, 4.0).len(), 8);
        assert_eq!(large_component_vertices(&s, 1.0).len(), 8);
        assert_eq!(large_component_vertices(&s, 9.0).len(), 0);
        let (_, s) = summary_of(&[10, 5, 1]);
        let vl = large_component_vertices(&s, 5.0);
        assert_eq!(vl.to_vec(), (0..15).collect::<Vec<_>>());
    }

    #[test]
    fn thresholds() {
        let n = 1000;
        let t7 = large_threshold(n, 0.5, LargePreset::Seven);
        assert!((t7 - 7.0 * (1000f64).ln() / 0.25).abs() < 1e-12);
        assert!((large_threshold(n, 0.5, LargePreset::Fourteen) - 2.0 * t7).abs() < 1e-12);
    }

    #[test]
    fn sprinkle_full_retention_merges() {
        let g = hypercube(6).unwrap();
        let r = sprinkle_merge_stat(&g, 1.0, 0.5, 3).unwrap();
        assert!(r.merged);
        assert_eq!(r.l1, 64);
        assert_eq!(r.l2, 0);
    }

    #[test]
    fn sprinkle_on_cliques_cannot_merge() {
        let h = disjoint_cliques(20, 5).unwrap();
        let out = sprinkle_merge(&h.graph, 0.9, 0.5, 1, Some(10.0), Sampler::Auto).unwrap();
        assert!(out.report.stage1_large_components >= 2);
        assert!(!out.report.merged);
        assert!(out.report.l1 <= 21);
    }

    #[test]
    fn dense_radius_default() {
        // 1 + ln(ln 1e6) / ln 20 = 1.874...
        assert_eq!(default_dense_radius(1_000_000, 20), 2);
        assert_eq!(default_dense_radius(10, 1), 1);
    }

    #[test]
    fn dense_stat_extremes() {
        let g = hypercube(6).unwrap();
        let full = components(&g, None).unwrap();
        let r = everywhere_dense_stat(&g, &full, Some(1), 64.0, 1000, 0).unwrap();
        assert_eq!(r.probes, 64);
        assert_eq!(r.min_hits, 7);
        assert_eq!(r.zero_fraction, 0.0);
        let empty = PercolationSample::empty(&g).components(&g).unwrap();
        let r = everywhere_dense_stat(&g, &empty, Some(2), 2.0, 10, 0).unwrap();
        assert_eq!(r.probes, 10);
        assert_eq!(r.min_hits, 0);
        assert_eq!(r.zero_fraction, 1.0);
        assert!(everywhere_dense_stat(&g, &empty, Some(0), 2.0, 10, 0).is_err());
    }

    #[test]
    fn matching_trial_extremes() {
        let g = complete_graph(10).unwrap();
        let f: Vec<u64> = (0..5).map(|i| g.edge_id(2 * i, 2 * i + 1).unwrap()).collect();
        let r = percolated_matching_trial(&g, &f, 1.0, 0, 20).unwrap();
        assert_eq!((r.min, r.max), (5, 5));
        let r = percolated_matching_trial(&g, &f, 0.0, 0, 20).unwrap();
        assert_eq!((r.min, r.max), (0, 0));
        assert!(percolated_matching_trial(&g, &[g.m()], 0.5, 0, 1).is_err());
    }

    #[test]
    fn percolated_components_sum_to_n() {
        let g = hypercube(10).unwrap();
        let s = percolate(&g, 0.12, 4).unwrap().components(&g).unwrap();
        assert_eq!(s.sizes().iter().sum::<usize>(), g.n());
        assert!(s.largest() >= s.second_largest());
        let t = s.sizes()[3] as f64;
        let vl = large_component_vertices(&s, t);
        let expect: usize = s.sizes().iter().filter(|&&x| x as f64 >= t).sum();
        assert_eq!(vl.len(), expect);
    }
}
