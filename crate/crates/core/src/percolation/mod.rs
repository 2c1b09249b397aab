//! Seeded bond percolation on a host graph.
//!
//! Edge `e` survives in the per-edge sampler iff `keyed_uniform(seed, e) < p`.
//! Because the uniforms depend only on `(seed, e)`, samples at `p <= p'` with a
//! common seed are nested, and the result is independent of thread count.

mod exposure;
mod stats;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, ComponentSummary, EdgeSubset, Graph};
use crate::rng::{derive_seed, keyed_u64, SplitMix64};

pub use exposure::{double_exposure_split, ExposurePair};
pub use stats::{
    default_dense_radius, everywhere_dense_stat, gap_scan, large_component_vertices,
    large_threshold, percolated_matching_trial, sprinkle_merge, sprinkle_merge_stat, DenseReport,
    LargePreset, MatchingTrialReport, SprinkleOutcome, SprinkleReport,
};

/// Hosts with more edges than this are sampled with [`Sampler::BlockSkip`]
/// under [`Sampler::Auto`].
pub const BITMAP_EDGE_LIMIT: u64 = 1 << 28;

/// Edges per independently seeded block in the skip sampler.
pub const SKIP_BLOCK: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// One keyed uniform per edge, stored as a bitmap.
    PerEdge,
    /// Geometric gaps inside blocks of [`SKIP_BLOCK`] edges, stored as ids.
    /// Work is proportional to the number of retained edges.
    BlockSkip,
    /// `PerEdge` unless `m` exceeds [`BITMAP_EDGE_LIMIT`].
    Auto,
}

impl Sampler {
    fn resolve(self, m: u64) -> Sampler {
        match self {
            Sampler::Auto if m > BITMAP_EDGE_LIMIT => Sampler::BlockSkip,
            Sampler::Auto => Sampler::PerEdge,
            s => s,
        }
    }
}

/// A random spanning subgraph `G_p`.
#[derive(Debug, Clone)]
pub struct PercolationSample {
    host: u64,
    p: f64,
    seed: Option<u64>,
    sampler: Sampler,
    retained: EdgeSubset,
}

impl PercolationSample {
    /// Wraps an explicit edge subset (e.g. the full or empty edge set).
    pub fn from_subset(g: &Graph, p: f64, retained: EdgeSubset) -> Result<Self> {
        if retained.universe() != g.m() {
            return Err(Error::LengthMismatch {
                expected: g.m(),
                got: retained.universe(),
            });
        }
        Ok(Self {
            host: g.fingerprint(),
            p,
            seed: None,
            sampler: Sampler::PerEdge,
            retained,
        })
    }

    pub fn empty(g: &Graph) -> Self {
        Self::from_subset(g, 0.0, EdgeSubset::Bitmap(FixedBitSet::with_capacity(g.m() as usize)))
            .expect("universe matches")
    }

    pub fn host_fingerprint(&self) -> u64 {
        self.host
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `None` for unions and wrapped subsets.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn sampler(&self) -> Sampler {
        self.sampler
    }

    pub fn m(&self) -> u64 {
        self.retained.universe()
    }

    pub fn retained(&self) -> &EdgeSubset {
        &self.retained
    }

    pub fn retained_count(&self) -> u64 {
        self.retained.count()
    }

    pub fn contains(&self, e: u64) -> bool {
        self.retained.contains(e)
    }

    fn check_host(&self, g: &Graph) -> Result<()> {
        if self.host != g.fingerprint() || self.m() != g.m() {
            return Err(Error::HostMismatch);
        }
        Ok(())
    }

    /// Components of the sample on all vertices of `g`.
    pub fn components(&self, g: &Graph) -> Result<ComponentSummary> {
        self.check_host(g)?;
        components(g, Some(&self.retained))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("retention probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Per-edge sampler: edge `e` is kept iff `keyed_uniform(seed, e) < p`.
pub fn percolate(g: &Graph, p: f64, seed: u64) -> Result<PercolationSample> {
    check_p(p)?;
    let m = g.m();
    if m > usize::MAX as u64 {
        return Err(Error::Budget(format!("{m} edges do not fit in a bitmap")));
    }
    // Compare in integer space: keyed_uniform(seed, e) < p  <=>  (x >> 11) < ceil(p * 2^53).
    let scale = (1u64 << 53) as f64;
    let cut = (p * scale).ceil() as u64;
    const W: usize = usize::BITS as usize;
    let words = (m as usize).div_ceil(W);
    let blocks: Vec<usize> = (0..words)
        .into_par_iter()
        .map(|w| {
            let base = (w * W) as u64;
            let top = (m - base).min(W as u64);
            let mut word = 0usize;
            for b in 0..top {
                if (keyed_u64(seed, base + b) >> 11) < cut {
                    word |= 1 << b;
                }
            }
            word
        })
        .collect();
    let bits = FixedBitSet::with_capacity_and_blocks(m as usize, blocks);
    Ok(PercolationSample {
        host: g.fingerprint(),
        p,
        seed: Some(seed),
        sampler: Sampler::PerEdge,
        retained: EdgeSubset::Bitmap(bits),
    })
}

/// Skip sampler: inside block `b` (edges `[b * SKIP_BLOCK, (b + 1) * SKIP_BLOCK)`)
/// gaps between kept edges are Geometric(p) draws from `SplitMix64(derive_seed(seed, b))`.
/// Same law as [`percolate`], different realization.
pub fn percolate_sparse(g: &Graph, p: f64, seed: u64) -> Result<PercolationSample> {
    check_p(p)?;
    let m = g.m();
    let blocks = m.div_ceil(SKIP_BLOCK);
    let ids: Vec<u64> = if p == 0.0 {
        Vec::new()
    } else if p == 1.0 {
        (0..m).collect()
    } else {
        let log_q = (-p).ln_1p();
        let per_block: Vec<Vec<u64>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * SKIP_BLOCK;
                let end = (start + SKIP_BLOCK).min(m);
                let mut rng = SplitMix64::new(derive_seed(seed, b));
                let mut out = Vec::new();
                let mut next = start;
                loop {
                    let gap = rng.next_open01().ln() / log_q;
                    if gap >= (end - next) as f64 {
                        break;
                    }
                    next += gap as u64;
                    out.push(next);
                    next += 1;
                    if next >= end {
                        break;
                    }
                }
                out
            })
            .collect();
        per_block.concat()
    };
    Ok(PercolationSample {
        host: g.fingerprint(),
        p,
        seed: Some(seed),
        sampler: Sampler::BlockSkip,
        retained: EdgeSubset::Ids { m, ids },
    })
}

pub fn percolate_with(g: &Graph, p: f64, seed: u64, sampler: Sampler) -> Result<PercolationSample> {
    match sampler.resolve(g.m()) {
        Sampler::BlockSkip => percolate_sparse(g, p, seed),
        _ => percolate(g, p, seed),
    }
}

/// `G_{p1} ∪ G_{p2}`. The result has `p = 1 - (1 - p1)(1 - p2)` and no seed.
pub fn union_samples(a: &PercolationSample, b: &PercolationSample) -> Result<PercolationSample> {
    if a.host != b.host || a.m() != b.m() {
        return Err(Error::HostMismatch);
    }
    let retained = match (&a.retained, &b.retained) {
        (EdgeSubset::Bitmap(x), EdgeSubset::Bitmap(y)) => {
            let mut bits = x.clone();
            bits.union_with(y);
            EdgeSubset::Bitmap(bits)
        }
        (x, y) => {
            let mut ids: Vec<u64> = Vec::with_capacity((x.count() + y.count()) as usize);
            let (mut xi, mut yi) = (x.ids().peekable(), y.ids().peekable());
            loop {
                let next = match (xi.peek(), yi.peek()) {
                    (Some(&u), Some(&v)) if u == v => {
                        xi.next();
                        yi.next()
                    }
                    (Some(&u), Some(&v)) if u < v => xi.next(),
                    (Some(_), Some(_)) => yi.next(),
                    (Some(_), None) => xi.next(),
                    (None, Some(_)) => yi.next(),
                    (None, None) => break,
                };
                ids.extend(next);
            }
            EdgeSubset::Ids { m: a.m(), ids }
        }
    };
    let sampler = if a.sampler == b.sampler {
        a.sampler
    } else {
        Sampler::BlockSkip
    };
    Ok(PercolationSample {
        host: a.host,
        p: 1.0 - (1.0 - a.p) * (1.0 - b.p),
        seed: None,
        sampler,
        retained,
    })
}
