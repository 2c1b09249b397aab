//! Certificates for the expansion hypotheses:
//!
//! * `P1`: `e(U, U^C) >= c1 |U|` for `|U| <= n/2`,
//! * `P2`: `|N(U)| >= c3 d |U|` for small connected `U` (`N(U)` excludes `U`),
//! * `P3`: `e(U, U^C) >= (1 - slack) d |U|` for small connected `U`.
//!
//! Every report states how far it got: exhaustive, spectral, or search only.

mod search;
mod spectral;

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    edge_boundary, external_neighborhood, for_each_connected_subset, BallScratch, Graph,
    VertexSet,
};
use crate::rng::stream_rng;

pub use spectral::{spectral_gap_estimate, SpectralEstimate};

/// Largest `n` accepted by the exact `P1` method.
pub const EXACT_P1_MAX_N: usize = 20;
pub const DEFAULT_K_MAX_EXACT: usize = 8;
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;
pub const DEFAULT_SET_BUDGET: u64 = 50_000_000;
pub const DEFAULT_RESTARTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    P1,
    P2,
    P3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Spectral,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedExact,
    CertifiedSpectral,
    NoViolationFound,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub property: Property,
    pub method: Method,
    /// Every connected set (every set, for `P1`) up to this size was checked.
    pub size_cap_exact: usize,
    /// Largest set size visited by randomized search.
    pub size_cap_searched: usize,
    /// Minimum normalized expansion over the exhaustively checked sets, or the
    /// spectral lower bound for `c1`.
    pub constant: f64,
    /// A set is a violation when its normalized expansion is below this.
    pub target: f64,
    pub verdict: Verdict,
    /// Sorted violating set, present iff `verdict == Violated`.
    pub witness: Option<Vec<usize>>,
    pub witness_value: Option<f64>,
    /// Best normalized value seen by search, when search ran.
    pub search_best: Option<f64>,
    pub sets_examined: u64,
    pub search_proposals: u64,
    /// Number of independent search restarts.
    pub shards: usize,
    pub lambda2: Option<f64>,
    /// Exhaustive stage hit its budget before `k_max`.
    pub truncated: bool,
}

/// Degree used for normalization: the regular degree, else the maximum degree.
pub fn normalizing_degree(g: &Graph) -> usize {
    g.regular_degree().unwrap_or_else(|| g.max_degree()).max(1)
}

/// Normalized expansion of `u` under `property`.
pub fn evaluate(g: &Graph, property: Property, u: &VertexSet) -> f64 {
    let size = u.len() as f64;
    let d = normalizing_degree(g) as f64;
    match property {
        Property::P1 => edge_boundary(g, u) as f64 / size,
        Property::P2 => external_neighborhood(g, u).len() as f64 / (d * size),
        Property::P3 => edge_boundary(g, u) as f64 / (d * size),
    }
}

/// Recomputes the witness with graph primitives; true iff it is a genuine violation.
pub fn witness_holds(g: &Graph, report: &ExpansionReport) -> bool {
    match &report.witness {
        None => report.verdict != Verdict::Violated,
        Some(w) => {
            let u = VertexSet::from_vertices(g.n(), w.iter().copied());
            report.verdict == Verdict::Violated
                && !u.is_empty()
                && u.len() == w.len()
                && evaluate(g, report.property, &u) < report.target
        }
    }
}

/// `num / den` compared exactly.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    fn lt(self, other: Ratio) -> bool {
        (self.num as u128) * (other.den as u128) < (other.num as u128) * (self.den as u128)
    }

    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone)]
struct Best {
    ratio: Ratio,
    vertices: Vec<usize>,
}

fn keep_min(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.ratio.lt(a.ratio) { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// `P1` certification.
///
/// * `Exact`: Gray-code scan of all `2^n` subsets (`n <= 20`); the constant is the
///   true minimum of `e(U, U^C) / |U|` over `1 <= |U| <= n/2`.
/// * `Spectral`: `c1 >= (d - lambda2) / 2` from the mixing bound; falls back to
///   search when that is below `target`.
/// * `Search`: annealing over sets of size at most `n/2`.
///
/// `target` defaults to the smallest positive float, so any set with empty
/// boundary is a violation.
pub fn certify_global_expansion(
    g: &Graph,
    method: Method,
    target: Option<f64>,
    search_budget: u64,
    seed: u64,
) -> Result<ExpansionReport> {
    let target = target.unwrap_or(f64::MIN_POSITIVE);
    let half = g.n() / 2;
    let mut report = ExpansionReport {
        property: Property::P1,
        method,
        size_cap_exact: 0,
        size_cap_searched: 0,
        constant: 0.0,
        target,
        verdict: Verdict::NoViolationFound,
        witness: None,
        witness_value: None,
        search_best: None,
        sets_examined: 0,
        search_proposals: 0,
        shards: 0,
        lambda2: None,
        truncated: false,
    };
    if half == 0 {
        report.verdict = Verdict::CertifiedExact;
        return Ok(report);
    }
    match method {
        Method::Exact => {
            if g.n() > EXACT_P1_MAX_N {
                return Err(Error::Budget(format!(
                    "exact P1 scans 2^n subsets; n = {} exceeds {EXACT_P1_MAX_N}",
                    g.n()
                )));
            }
            let (best, scanned) = p1_gray_scan(g);
            report.size_cap_exact = half;
            report.sets_examined = scanned;
            report.constant = best.ratio.value();
            if best.ratio.value() < target {
                report.verdict = Verdict::Violated;
                report.witness_value = Some(best.ratio.value());
                report.witness = Some(best.vertices);
            } else {
                report.verdict = Verdict::CertifiedExact;
            }
        }
        Method::Spectral => {
            let est = spectral_gap_estimate(g, 1e-6)?;
            let d = normalizing_degree(g) as f64;
            report.lambda2 = Some(est.lambda2);
            report.constant = ((d - est.lambda2) / 2.0).max(0.0);
            if report.constant >= target {
                report.verdict = Verdict::CertifiedSpectral;
            } else {
                apply_search(g, Property::P1, half, search_budget, seed, &mut report);
            }
        }
        Method::Search => {
            report.constant = f64::NAN;
            apply_search(g, Property::P1, half, search_budget, seed, &mut report);
            if let Some(best) = report.search_best {
                report.constant = best;
            }
        }
    }
    Ok(report)
}

fn p1_gray_scan(g: &Graph) -> (Best, u64) {
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).fold(0u32, |m, w| m | 1 << w))
        .collect();
    let half = n / 2;
    let mut mask = 0u32;
    let mut boundary: i64 = 0;
    let mut best = Best {
        ratio: Ratio { num: u64::MAX, den: 1 },
        vertices: Vec::new(),
    };
    let mut best_mask = 0u32;
    let total = 1u64 << n;
    for i in 1..total {
        let v = i.trailing_zeros() as usize;
        let inside = (adj[v] & mask).count_ones() as i64;
        let deg = adj[v].count_ones() as i64;
        if mask & (1 << v) == 0 {
            boundary += deg - 2 * inside;
        } else {
            boundary -= deg - 2 * inside;
        }
        mask ^= 1 << v;
        let size = mask.count_ones() as usize;
        if size >= 1 && size <= half {
            let r = Ratio {
                num: boundary as u64,
                den: size as u64,
            };
            if r.lt(best.ratio) {
                best.ratio = r;
                best_mask = mask;
            }
        }
    }
    best.vertices = (0..n).filter(|&v| best_mask & (1 << v) != 0).collect();
    (best, total - 1)
}

fn search_component(g: &Graph, vertices: &[usize], property: Property) -> Vec<usize> {
    if property == Property::P1 || vertices.len() <= 1 {
        return vertices.to_vec();
    }
    // For P3 the ratio of a disjoint union is a weighted mean of its parts, so
    // some connected part is at least as bad.
    let set = VertexSet::from_vertices(g.n(), vertices.iter().copied());
    let mut seen = VertexSet::new(g.n());
    let mut best: Option<(f64, Vec<usize>)> = None;
    for &s in vertices {
        if seen.contains(s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut i = 0;
        while i < comp.len() {
            let x = comp[i];
            i += 1;
            for y in g.neighbors(x) {
                if set.contains(y) && seen.insert(y) {
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        let u = VertexSet::from_vertices(g.n(), comp.iter().copied());
        let val = evaluate(g, property, &u);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, comp));
        }
    }
    best.map(|(_, c)| c).unwrap_or_default()
}

fn apply_search(
    g: &Graph,
    property: Property,
    cap: usize,
    budget: u64,
    seed: u64,
    report: &mut ExpansionReport,
) {
    let restarts = DEFAULT_RESTARTS.min(budget.max(1) as usize);
    report.shards = restarts;
    let Some(hit) = search::anneal(g, cap, budget, restarts, seed) else {
        return;
    };
    report.search_proposals = hit.proposals * restarts as u64;
    report.size_cap_searched = hit.max_size;
    let scale = match property {
        Property::P1 => 1.0,
        _ => normalizing_degree(g) as f64,
    };
    let best = hit.ratio() / scale;
    report.search_best = Some(best);
    if best < report.target && report.verdict != Verdict::Violated {
        let witness = search_component(g, &hit.vertices, property);
        let u = VertexSet::from_vertices(g.n(), witness.iter().copied());
        report.witness_value = Some(evaluate(g, property, &u));
        report.witness = Some(witness);
        report.verdict = Verdict::Violated;
    }
}

/// Exhaustive minimum of `value(view)` over connected sets, by increasing size.
///
/// Level `k` enumerates all connected sets of size exactly `k`; when the
/// running total would exceed `budget` the level is abandoned and the result
/// covers sizes `< k`.
fn exhaustive_connected<F>(
    g: &Graph,
    k_max: usize,
    budget: u64,
    value: F,
) -> (Option<Best>, usize, u64, bool)
where
    F: Fn(&crate::graph::SubsetView<'_>) -> Ratio + Sync,
{
    let threads = rayon::current_num_threads().max(1);
    let chunk = g.n().div_ceil(threads * 8).max(1);
    let roots: Vec<usize> = (0..g.n()).collect();
    let mut overall: Option<Best> = None;
    let mut done = 0usize;
    let mut examined = 0u64;
    for k in 1..=k_max.min(g.n()) {
        let counter = AtomicU64::new(examined);
        let level: Vec<Option<Best>> = roots
            .par_chunks(chunk)
            .map(|part| {
                let mut best: Option<Best> = None;
                let flow = for_each_connected_subset(g, k..=k, part.iter().copied(), |view| {
                    if counter.fetch_add(1, Ordering::Relaxed) >= budget {
                        return ControlFlow::Break(());
                    }
                    let r = value(view);
                    if best.as_ref().is_none_or(|b| r.lt(b.ratio)) {
                        let mut vertices = view.vertices.to_vec();
                        vertices.sort_unstable();
                        best = Some(Best { ratio: r, vertices });
                    }
                    ControlFlow::Continue(())
                });
                if flow.is_break() {
                    None
                } else {
                    best
                }
            })
            .collect();
        let reached = counter.load(Ordering::Relaxed);
        if reached > budget {
            return (overall, done, budget, true);
        }
        examined = reached;
        for b in level {
            overall = keep_min(overall, b);
        }
        done = k;
    }
    (overall, done, examined, false)
}

/// `P2` by exhaustive enumeration of connected sets up to `k_max`.
///
/// The constant is `min |N(U) \ U| / (d |U|)`. If the set budget runs out the
/// report covers a smaller size cap and `truncated` is set.
pub fn certify_vertex_expansion(
    g: &Graph,
    k_max: usize,
    c3_target: f64,
    set_budget: u64,
) -> Result<ExpansionReport> {
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let d = normalizing_degree(g) as u64;
    let (best, done, examined, truncated) = exhaustive_connected(g, k_max, set_budget, |s| Ratio {
        num: s.external_neighbors() as u64,
        den: d * s.len() as u64,
    });
    Ok(finish_exhaustive(
        Property::P2,
        best,
        done,
        examined,
        truncated,
        c3_target,
    ))
}

fn finish_exhaustive(
    property: Property,
    best: Option<Best>,
    done: usize,
    examined: u64,
    truncated: bool,
    target: f64,
) -> ExpansionReport {
    let mut report = ExpansionReport {
        property,
        method: Method::Exact,
        size_cap_exact: done,
        size_cap_searched: 0,
        constant: best.as_ref().map_or(f64::INFINITY, |b| b.ratio.value()),
        target,
        verdict: if truncated {
            Verdict::NoViolationFound
        } else {
            Verdict::CertifiedExact
        },
        witness: None,
        witness_value: None,
        search_best: None,
        sets_examined: examined,
        search_proposals: 0,
        shards: 0,
        lambda2: None,
        truncated,
    };
    if let Some(b) = best {
        if b.ratio.value() < target {
            report.verdict = Verdict::Violated;
            report.witness_value = Some(b.ratio.value());
            report.witness = Some(b.vertices);
        }
    }
    report
}

/// Parameters for [`certify_small_set_expansion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSetConfig {
    pub k_max_exact: usize,
    pub k_max_search: usize,
    /// Violation when `e(U, U^C) < (1 - slack) d |U|`.
    pub slack: f64,
    pub search_budget: u64,
    pub set_budget: u64,
    pub seed: u64,
}

impl SmallSetConfig {
    pub fn new(slack: f64) -> Self {
        Self {
            k_max_exact: DEFAULT_K_MAX_EXACT,
            k_max_search: 0,
            slack,
            search_budget: DEFAULT_SEARCH_BUDGET,
            set_budget: DEFAULT_SET_BUDGET,
            seed: 0,
        }
    }
}

/// `P3`: exhaustive over connected sets up to `k_max_exact`, then annealing up
/// to `k_max_search` (skipped when `k_max_search == 0` or no budget).
///
/// The search minimizes `e(U, U^C) / (d |U|)`; a violating set it finds is
/// reduced to its worst connected component.
pub fn certify_small_set_expansion(g: &Graph, cfg: &SmallSetConfig) -> Result<ExpansionReport> {
    if !(cfg.slack > 0.0 && cfg.slack < 1.0) {
        return Err(Error::invalid(format!("slack must lie in (0, 1), got {}", cfg.slack)));
    }
    let d = normalizing_degree(g) as u64;
    let target = 1.0 - cfg.slack;
    let (best, done, examined, truncated) = if cfg.k_max_exact == 0 {
        (None, 0, 0, false)
    } else {
        exhaustive_connected(g, cfg.k_max_exact, cfg.set_budget, |s| Ratio {
            num: s.boundary_edges,
            den: d * s.len() as u64,
        })
    };
    let mut report = finish_exhaustive(Property::P3, best, done, examined, truncated, target);
    if cfg.k_max_search > 0 && cfg.search_budget > 0 {
        if report.verdict != Verdict::Violated {
            report.verdict = Verdict::NoViolationFound;
        }
        apply_search(g, Property::P3, cfg.k_max_search, cfg.search_budget, cfg.seed, &mut report);
        report.method = Method::Search;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallDiagnosis {
    /// Every probed ball meets the bound.
    Holds,
    /// Some ball is too small and the graph violates `P3` at slack `eps^3`.
    PreconditionUnmet,
    /// Some ball is too small yet no `P3` violation was found.
    CertificationGap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallGrowthReport {
    pub k: usize,
    pub eps: f64,
    pub radius: usize,
    /// `min(k, eps^(-3 r))`.
    pub bound: f64,
    pub probes: usize,
    pub failures: usize,
    pub min_ball: usize,
    pub diagnosis: BallDiagnosis,
    /// `P3` probe run when a ball falls short.
    pub precondition: Option<ExpansionReport>,
}

/// Checks `|B(v, r)| >= min(k, eps^(-3 r))` at sampled vertices.
///
/// A shortfall contradicts `P3` at slack `eps^3` up to size `k`, so it is
/// traced by probing `P3` (exhaustive up to size 4, annealing up to `k`).
pub fn ball_growth_check(
    g: &Graph,
    k: usize,
    eps: f64,
    radius: usize,
    sample_vertices: usize,
    seed: u64,
) -> Result<BallGrowthReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let bound = (k as f64).min(eps.powi(-3).powi(radius as i32));
    let probes: Vec<usize> = if sample_vertices >= g.n() {
        (0..g.n()).collect()
    } else {
        let mut rng = stream_rng(seed, 0);
        (0..sample_vertices).map(|_| rng.gen_range(0..g.n())).collect()
    };
    let sizes: Vec<usize> = probes
        .par_chunks(32)
        .flat_map_iter(|chunk| {
            let mut scratch = BallScratch::new(g.n());
            chunk
                .iter()
                .map(|&v| scratch.ball(g, v, radius).len())
                .collect::<Vec<_>>()
        })
        .collect();
    let failures = sizes.iter().filter(|&&s| (s as f64) < bound).count();
    let mut report = BallGrowthReport {
        k,
        eps,
        radius,
        bound,
        probes: sizes.len(),
        failures,
        min_ball: sizes.iter().copied().min().unwrap_or(0),
        diagnosis: BallDiagnosis::Holds,
        precondition: None,
    };
    if failures > 0 {
        let cfg = SmallSetConfig {
            k_max_exact: k.min(4),
            k_max_search: k,
            slack: eps.powi(3),
            search_budget: 200_000,
            set_budget: 5_000_000,
            seed,
        };
        let p3 = certify_small_set_expansion(g, &cfg)?;
        report.diagnosis = if p3.verdict == Verdict::Violated {
            BallDiagnosis::PreconditionUnmet
        } else {
            BallDiagnosis::CertificationGap
        };
        report.precondition = Some(p3);
    }
    Ok(report)
}
