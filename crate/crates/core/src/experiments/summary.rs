use serde::{Deserialize, Serialize};

use super::{Mode, TrialRecord};
use crate::branching::survival_probability;

pub const DEFAULT_TOL_GIANT: f64 = 0.02;
pub const DEFAULT_C_SECOND: f64 = 30.0;
/// Finite-n proxy for uniqueness of the giant: `L2 / L1` at most this.
pub const UNIQUE_GIANT_RATIO: f64 = 0.1;
/// Sprinkle mode passes when at least this fraction of trials merged.
pub const MERGE_PASS_FRACTION: f64 = 0.95;
/// Anomaly mode: smallest isolated-class component counted as "large".
pub const ISOLATED_INTERNAL_MIN: usize = 20;
/// Anomaly mode passes when at least this fraction of trials shows the mechanism.
pub const ANOMALY_PASS_FRACTION: f64 = 0.6;

/// Fold of a record set. Depends only on the records and the mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub mode: Mode,
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub p: f64,
    pub mean_l1_frac: f64,
    /// Sample standard deviation of `L1 / n` (zero for one trial).
    pub std_l1_frac: f64,
    pub stderr_l1_frac: f64,
    pub min_l1: usize,
    pub max_l1: usize,
    pub max_l2: usize,
    pub max_l2_over_l1: f64,
    /// `y(eps)` for `eps > 0`.
    pub y_reference: Option<f64>,
    /// Trials with `L2 / L1 <= 0.1`.
    pub frac_unique_giant: f64,
    pub frac_gap_empty: Option<f64>,
    pub max_gap_count: Option<usize>,
    pub frac_merged: Option<f64>,
    pub mean_isolated_class_count: Option<f64>,
    /// Trials with `max_isolated_internal >= 20` and `L2 >= max_isolated_internal`.
    pub frac_isolated_mechanism: Option<f64>,
    pub frac_dense_all_hit: Option<f64>,
}

fn frac<F: Fn(&TrialRecord) -> bool>(records: &[TrialRecord], f: F) -> f64 {
    records.iter().filter(|r| f(r)).count() as f64 / records.len() as f64
}

fn optional_frac<F>(records: &[TrialRecord], present: bool, f: F) -> Option<f64>
where
    F: Fn(&TrialRecord) -> bool,
{
    present.then(|| frac(records, f))
}

/// Summarizes `records`; `None` when there are none.
pub fn summarize(mode: Mode, records: &[TrialRecord]) -> Option<ExperimentSummary> {
    let first = records.first()?;
    let t = records.len() as f64;
    // fixed summation order, so the fold ignores record order
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.trial_idx);
    let fracs: Vec<f64> = sorted.iter().map(|r| r.l1 as f64 / r.n as f64).collect();
    let mean = fracs.iter().sum::<f64>() / t;
    let var = if records.len() > 1 {
        fracs.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    let has_gap = records.iter().all(|r| r.gap_count.is_some());
    let has_merged = records.iter().all(|r| r.merged.is_some());
    let has_isolated = records.iter().all(|r| r.isolated_class_count.is_some());
    let has_dense = records.iter().all(|r| r.dense_zero_probes.is_some());
    Some(ExperimentSummary {
        mode,
        trials: records.len(),
        n: first.n,
        d: first.d,
        eps: first.eps,
        p: first.p,
        mean_l1_frac: mean,
        std_l1_frac: std,
        stderr_l1_frac: std / t.sqrt(),
        min_l1: records.iter().map(|r| r.l1).min().unwrap_or(0),
        max_l1: records.iter().map(|r| r.l1).max().unwrap_or(0),
        max_l2: records.iter().map(|r| r.l2).max().unwrap_or(0),
        max_l2_over_l1: records
            .iter()
            .map(|r| r.l2 as f64 / r.l1.max(1) as f64)
            .fold(0.0, f64::max),
        y_reference: (first.eps > 0.0).then(|| survival_probability(first.eps).y),
        frac_unique_giant: frac(records, |r| {
            r.l2 as f64 <= UNIQUE_GIANT_RATIO * r.l1 as f64
        }),
        frac_gap_empty: optional_frac(records, has_gap, |r| r.gap_count == Some(0)),
        max_gap_count: has_gap.then(|| records.iter().filter_map(|r| r.gap_count).max().unwrap_or(0)),
        frac_merged: optional_frac(records, has_merged, |r| r.merged == Some(true)),
        mean_isolated_class_count: has_isolated.then(|| {
            records.iter().filter_map(|r| r.isolated_class_count).sum::<usize>() as f64 / t
        }),
        frac_isolated_mechanism: optional_frac(records, has_isolated, |r| {
            let m = r.max_isolated_internal.unwrap_or(0);
            m >= ISOLATED_INTERNAL_MIN && r.l2 >= m
        }),
        frac_dense_all_hit: optional_frac(records, has_dense, |r| r.dense_zero_probes == Some(0)),
    })
}

/// One named pass/fail condition with the measured value and its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
    /// `limit - value` for upper limits, `value - limit` for lower limits.
    pub margin: f64,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value <= limit,
            value,
            limit,
            margin: limit - value,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            pass: value >= limit,
            value,
            limit,
            margin: value - limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    fn from_checks(checks: Vec<Check>) -> Self {
        Self {
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn label(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

fn log_scale(n: usize, eps: f64) -> f64 {
    (n as f64).ln() / (eps * eps)
}

/// Giant of size `~ y(eps) n`, every other component `O(ln n / eps^2)`, and
/// `L2 / L1 <= 0.1` in every trial.
pub fn ercp_verdict(s: &ExperimentSummary, eps: f64, tol_giant: f64, c_second: f64) -> Verdict {
    let y = survival_probability(eps).y;
    Verdict::from_checks(vec![
        Check::at_most("giant_deviation", (s.mean_l1_frac - y).abs(), tol_giant),
        Check::at_most("max_l2", s.max_l2 as f64, c_second * log_scale(s.n, eps)),
        Check::at_most("max_l2_over_l1", s.max_l2_over_l1, UNIQUE_GIANT_RATIO),
    ])
}

/// Every `L1` at most `c ln n / eps_abs^2`.
pub fn subcritical_verdict(s: &ExperimentSummary, eps_abs: f64, c: f64) -> Verdict {
    Verdict::from_checks(vec![Check::at_most(
        "max_l1",
        s.max_l1 as f64,
        c * log_scale(s.n, eps_abs),
    )])
}

/// Default verdict for each mode.
pub fn mode_verdict(s: &ExperimentSummary) -> Verdict {
    match s.mode {
        Mode::Ercp => ercp_verdict(s, s.eps, DEFAULT_TOL_GIANT, DEFAULT_C_SECOND),
        Mode::Subcritical => subcritical_verdict(s, s.eps.abs(), DEFAULT_C_SECOND),
        Mode::Gap => Verdict::from_checks(vec![Check::at_most(
            "max_gap_count",
            s.max_gap_count.unwrap_or(0) as f64,
            0.0,
        )]),
        Mode::Sprinkle => Verdict::from_checks(vec![Check::at_least(
            "frac_merged",
            s.frac_merged.unwrap_or(0.0),
            MERGE_PASS_FRACTION,
        )]),
        Mode::Anomaly => Verdict::from_checks(vec![
            Check::at_least(
                "mean_isolated_class_count",
                s.mean_isolated_class_count.unwrap_or(0.0),
                f64::MIN_POSITIVE,
            ),
            Check::at_least(
                "frac_isolated_mechanism",
                s.frac_isolated_mechanism.unwrap_or(0.0),
                ANOMALY_PASS_FRACTION,
            ),
        ]),
        Mode::Dense => Verdict::from_checks(vec![Check::at_least(
            "frac_dense_all_hit",
            s.frac_dense_all_hit.unwrap_or(0.0),
            1.0,
        )]),
    }
}
