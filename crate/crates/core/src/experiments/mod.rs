//! Batch Monte Carlo harness: one host graph, many seeded percolation trials.
//!
//! Trial `i` uses seed `derive_seed(master_seed, i)`, so records do not
//! depend on how trials are scheduled across workers.

mod records;
mod summary;

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{load_host, HostGraph};
use crate::graph::{ComponentSummary, EdgeSubset, Graph};
use crate::percolation::{
    everywhere_dense_stat, large_threshold, percolate_with, sprinkle_merge, LargePreset,
    PercolationSample, Sampler,
};
use crate::rng::derive_seed;

pub use records::{
    emit_records, emit_size_dump, read_csv, read_records, write_csv, write_size_dump,
    RecordFormat, TrialRecord, CSV_COLUMNS,
};
pub use summary::{
    ercp_verdict, mode_verdict, subcritical_verdict, summarize, Check, ExperimentSummary, Verdict,
    ANOMALY_PASS_FRACTION, DEFAULT_C_SECOND, DEFAULT_TOL_GIANT, ISOLATED_INTERNAL_MIN,
    MERGE_PASS_FRACTION, UNIQUE_GIANT_RATIO,
};

pub const DEFAULT_DENSE_PROBES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ercp,
    Subcritical,
    Gap,
    Sprinkle,
    Anomaly,
    Dense,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::invalid(format!("unknown mode `{s}`")))
    }
}

/// Optional overrides of the default thresholds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// `V_L` threshold; default `7 ln n / eps^2`.
    #[serde(default)]
    pub large: Option<f64>,
    /// Gap window; defaults `14 ln n / eps^2` and `d ln n`.
    #[serde(default)]
    pub gap_lo: Option<f64>,
    #[serde(default)]
    pub gap_hi: Option<f64>,
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generator spec string or graph file path.
    pub graph: String,
    /// `p = (1 + eps) / d`; negative for the subcritical side.
    pub eps: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub mode: Mode,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_sampler")]
    pub sampler: Sampler,
    /// Dense mode: probe count and ball radius.
    #[serde(default)]
    pub dense_probes: Option<usize>,
    #[serde(default)]
    pub dense_radius: Option<usize>,
    /// Keep every trial's size multiset for a size dump.
    #[serde(default)]
    pub dump_sizes: bool,
    /// Fill `wall_time_ms`. Off by default so that output is reproducible.
    #[serde(default)]
    pub timing: bool,
}

fn default_sampler() -> Sampler {
    Sampler::Auto
}

impl ExperimentConfig {
    pub fn new(graph: impl Into<String>, mode: Mode, eps: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            graph: graph.into(),
            eps,
            trials,
            master_seed,
            mode,
            thresholds: Thresholds::default(),
            workers: 1,
            sampler: Sampler::Auto,
            dense_probes: None,
            dense_radius: None,
            dump_sizes: false,
            timing: false,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

/// A validated configuration bound to its host graph.
#[derive(Debug)]
pub struct Experiment {
    config: ExperimentConfig,
    host: HostGraph,
    d: usize,
    p: f64,
    large: f64,
    gap: Option<(f64, f64)>,
}

impl Experiment {
    /// Builds the host from `config.graph` and validates.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let host = load_host(&config.graph)?;
        Self::with_host(config, host)
    }

    /// Validates `config` against an already built host.
    pub fn with_host(config: ExperimentConfig, host: HostGraph) -> Result<Self> {
        let g = &host.graph;
        let n = g.n();
        if config.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if config.workers == 0 {
            return Err(Error::invalid("workers must be at least 1"));
        }
        if !config.eps.is_finite() {
            return Err(Error::invalid("eps must be finite"));
        }
        let d = g.regular_degree().unwrap_or_else(|| g.max_degree());
        if d == 0 {
            return Err(Error::invalid("host graph has no edges"));
        }
        let p = (1.0 + config.eps) / d as f64;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p = (1 + eps) / d = {p} outside [0, 1]")));
        }
        let eps = config.eps;
        match config.mode {
            Mode::Subcritical if eps >= 0.0 => {
                return Err(Error::invalid("subcritical mode needs eps < 0"));
            }
            Mode::Ercp | Mode::Gap | Mode::Sprinkle | Mode::Dense if eps <= 0.0 => {
                return Err(Error::invalid(format!("{:?} mode needs eps > 0", config.mode)));
            }
            Mode::Anomaly if host.class_size.is_none() => {
                return Err(Error::invalid(
                    "anomaly mode needs a partitioned host (anomaly or disjoint_cliques)",
                ));
            }
            _ => {}
        }
        let large = config
            .thresholds
            .large
            .unwrap_or_else(|| large_threshold(n, eps.abs().max(f64::MIN_POSITIVE), LargePreset::Seven));
        let gap = if config.mode == Mode::Gap {
            let lo = config
                .thresholds
                .gap_lo
                .unwrap_or_else(|| large_threshold(n, eps, LargePreset::Fourteen));
            let hi = config.thresholds.gap_hi.unwrap_or(d as f64 * (n as f64).ln());
            if lo > hi {
                return Err(Error::invalid(format!(
                    "gap window [{lo:.1}, {hi:.1}] is empty: lo = 14 ln n / eps^2 exceeds hi = d ln n; \
                     this needs d >~ ln n / eps^2 (override thresholds.gap_lo / gap_hi to force a window)"
                )));
            }
            Some((lo, hi))
        } else {
            None
        };
        Ok(Self {
            config,
            host,
            d,
            p,
            large,
            gap,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn host(&self) -> &HostGraph {
        &self.host
    }

    pub fn into_host(self) -> HostGraph {
        self.host
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn large_threshold(&self) -> f64 {
        self.large
    }

    pub fn gap_window(&self) -> Option<(f64, f64)> {
        self.gap
    }

    pub fn trial_seed(&self, trial_idx: u64) -> u64 {
        derive_seed(self.config.master_seed, trial_idx)
    }

    /// Percolation sample used by trial `trial_idx` in non-sprinkle modes.
    pub fn sample(&self, trial_idx: u64) -> Result<PercolationSample> {
        percolate_with(&self.host.graph, self.p, self.trial_seed(trial_idx), self.config.sampler)
    }

    /// Runs one trial; also returns the component summary of its sample.
    pub fn run_trial_detailed(&self, trial_idx: u64) -> Result<(TrialRecord, ComponentSummary)> {
        let start = Instant::now();
        let g = &self.host.graph;
        let seed = self.trial_seed(trial_idx);
        let mut record = TrialRecord {
            trial_idx,
            seed,
            n: g.n(),
            d: self.d,
            eps: self.config.eps,
            p: self.p,
            l1: 0,
            l2: 0,
            component_count: 0,
            gap_count: None,
            merged: None,
            isolated_class_count: None,
            max_isolated_internal: None,
            wall_time_ms: None,
            dense_zero_probes: None,
            sizes: None,
        };
        let summary = if self.config.mode == Mode::Sprinkle {
            let out = sprinkle_merge(
                g,
                self.p,
                self.config.eps,
                seed,
                Some(self.large),
                self.config.sampler,
            )?;
            record.merged = Some(out.report.merged);
            out.union_summary
        } else {
            let sample = self.sample(trial_idx)?;
            let summary = sample.components(g)?;
            match self.config.mode {
                Mode::Gap => {
                    let (lo, hi) = self.gap.expect("validated");
                    record.gap_count = Some(summary.count_in_range(lo, hi));
                }
                Mode::Anomaly => {
                    let (count, largest) = isolated_classes(&self.host, sample.retained(), &summary)?;
                    record.isolated_class_count = Some(count);
                    record.max_isolated_internal = Some(largest);
                }
                Mode::Dense => {
                    let report = everywhere_dense_stat(
                        g,
                        &summary,
                        self.config.dense_radius,
                        self.large,
                        self.config.dense_probes.unwrap_or(DEFAULT_DENSE_PROBES),
                        seed,
                    )?;
                    record.dense_zero_probes = Some(report.zero_probes);
                }
                _ => {}
            }
            summary
        };
        record.l1 = summary.largest();
        record.l2 = summary.second_largest();
        record.component_count = summary.count();
        if self.config.dump_sizes {
            record.sizes = Some(summary.sizes().to_vec());
        }
        if self.config.timing {
            record.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok((record, summary))
    }

    pub fn run_trial(&self, trial_idx: u64) -> Result<TrialRecord> {
        self.run_trial_detailed(trial_idx).map(|(r, _)| r)
    }

    /// Runs all trials on a pool of `workers` threads. Records come back sorted
    /// by `trial_idx`. On failure the completed records are returned with the
    /// first error (lowest trial index).
    pub fn run(&self) -> std::result::Result<ExperimentRun, PartialRun> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .build()
            .map_err(|e| PartialRun {
                records: Vec::new(),
                error: Error::invalid(format!("thread pool: {e}")),
            })?;
        let results: Vec<Result<TrialRecord>> = pool.install(|| {
            (0..self.config.trials)
                .into_par_iter()
                .map(|i| self.run_trial(i))
                .collect()
        });
        let mut records = Vec::with_capacity(results.len());
        let mut error = None;
        for r in results {
            match r {
                Ok(rec) => records.push(rec),
                Err(e) if error.is_none() => error = Some(e),
                Err(_) => {}
            }
        }
        if let Some(error) = error {
            return Err(PartialRun { records, error });
        }
        let summary = summarize(self.config.mode, &records).expect("at least one trial");
        let verdict = mode_verdict(&summary);
        Ok(ExperimentRun {
            records,
            summary,
            verdict,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
    pub verdict: Verdict,
}

/// Completed records of an aborted run.
#[derive(Debug)]
pub struct PartialRun {
    pub records: Vec<TrialRecord>,
    pub error: Error,
}

/// Builds the host and runs one trial.
pub fn run_trial(config: &ExperimentConfig, trial_idx: u64) -> Result<TrialRecord> {
    Experiment::new(config.clone())?.run_trial(trial_idx)
}

pub fn run_experiment(config: &ExperimentConfig) -> std::result::Result<ExperimentRun, PartialRun> {
    let exp = Experiment::new(config.clone()).map_err(|error| PartialRun {
        records: Vec::new(),
        error,
    })?;
    exp.run()
}

/// Classes with no retained inter-class edge, and the largest component found
/// inside one of them.
///
/// Each counted class is cross-checked against the global summary: every
/// component meeting the class must lie entirely inside it.
pub fn isolated_classes(
    host: &HostGraph,
    retained: &EdgeSubset,
    summary: &ComponentSummary,
) -> Result<(usize, usize)> {
    let g: &Graph = &host.graph;
    let size = host
        .class_size
        .ok_or_else(|| Error::invalid("host has no class partition"))?;
    let classes = g.n() / size;
    let mut crossed = vec![false; classes];
    g.for_each_edge_in(retained, |_, u, v| {
        let (a, b) = (u / size, v / size);
        if a != b {
            crossed[a] = true;
            crossed[b] = true;
        }
    })?;
    let mut count = 0;
    let mut largest = 0;
    let mut tally: HashMap<u32, usize> = HashMap::new();
    for class in (0..classes).filter(|&c| !crossed[c]) {
        count += 1;
        tally.clear();
        for v in class * size..(class + 1) * size {
            *tally.entry(summary.labels()[v]).or_default() += 1;
        }
        for (&label, &inside) in &tally {
            if inside != summary.label_size(label as usize) {
                return Err(Error::Infeasible(format!(
                    "class {class} is isolated but component {label} leaves it"
                )));
            }
            largest = largest.max(inside);
        }
    }
    Ok((count, largest))
}
