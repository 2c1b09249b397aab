//! Galton-Watson survival probability.
//!
//! `y(eps)` is the unique root in `(0, 1)` of `y = 1 - exp(-(1 + eps) y)`,
//! the survival probability of a branching process with Poisson(1 + eps)
//! offspring.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::rng::stream_rng;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Below this supercriticality the bracket is built from the small-`eps`
/// expansion `y ~ 2 eps / (1 + eps)^2`.
pub const NEAR_CRITICAL_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalSolution {
    pub eps: f64,
    pub y: f64,
    /// `|y - (1 - exp(-(1 + eps) y))|`.
    pub residual: f64,
    pub regime: Regime,
    pub near_critical: bool,
    pub iterations: u32,
}

/// `f(y) = y - 1 + exp(-(1 + eps) y)`, evaluated without cancellation near 0.
#[inline]
fn excess(eps: f64, y: f64) -> f64 {
    y + (-(1.0 + eps) * y).exp_m1()
}

/// `f(y) / (-y)` evaluated without cancellation: `eps + a psi(a y)` with
/// `a = 1 + eps` and `psi(x) = (1 - e^(-x)) / x - 1`. Positive below the root.
fn scaled_excess(eps: f64, y: f64) -> f64 {
    let a = 1.0 + eps;
    let x = a * y;
    let psi = if x < 1e-2 {
        // sum_{k >= 1} (-x)^k / (k + 1)!
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..=12 {
            term *= -x / (k + 1) as f64;
            sum += term;
        }
        sum
    } else {
        -(-x).exp_m1() / x - 1.0
    };
    eps + a * psi
}

/// Bisection on [`scaled_excess`] around the asymptotic root `2 eps / (1 + eps)^2`.
fn near_critical(eps: f64, seed: f64) -> SurvivalSolution {
    let (mut lo, mut hi) = (0.5 * seed, 2.0 * seed);
    while scaled_excess(eps, lo) <= 0.0 {
        lo *= 0.5;
    }
    while scaled_excess(eps, hi) >= 0.0 {
        hi *= 2.0;
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if scaled_excess(eps, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    SurvivalSolution {
        eps,
        y,
        residual: excess(eps, y).abs(),
        regime: Regime::Supercritical,
        near_critical: true,
        iterations,
    }
}

pub fn survival_probability(eps: f64) -> SurvivalSolution {
    survival_probability_tol(eps, DEFAULT_TOL)
}

/// Bisection on `f(y) = y - 1 + exp(-(1 + eps) y)`. Returns `y = 0` for
/// `eps <= 0`.
pub fn survival_probability_tol(eps: f64, tol: f64) -> SurvivalSolution {
    if eps.is_nan() || eps <= 0.0 {
        return SurvivalSolution {
            eps,
            y: 0.0,
            residual: 0.0,
            regime: if eps == 0.0 {
                Regime::Critical
            } else {
                Regime::Subcritical
            },
            near_critical: false,
            iterations: 0,
        };
    }
    let seed = 2.0 * eps / ((1.0 + eps) * (1.0 + eps));
    if eps < NEAR_CRITICAL_EPS {
        return near_critical(eps, seed);
    }
    // f < 0 on (0, 2 eps / (1 + eps)^2) up to third-order terms, which are
    // themselves negative; half of that point is a safe lower bracket.
    let mut lo = 0.5 * seed;
    while excess(eps, lo) >= 0.0 && lo > f64::MIN_POSITIVE {
        lo *= 0.5;
    }
    let mut hi = 1.0;
    let mut iterations = 0;
    // bisect to the resolution of f64
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations >= 2000 {
            break;
        }
        iterations += 1;
        if excess(eps, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * 1e-4 * hi {
            break;
        }
    }
    let y = if excess(eps, lo).abs() <= excess(eps, hi).abs() {
        lo
    } else {
        hi
    };
    SurvivalSolution {
        eps,
        y,
        residual: excess(eps, y).abs(),
        regime: Regime::Supercritical,
        near_critical: eps < NEAR_CRITICAL_EPS,
        iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GwEstimate {
    pub d: u64,
    pub p: f64,
    pub depth_cap: u32,
    pub trials: u64,
    pub survived: u64,
    pub estimate: f64,
    /// `sqrt(q (1 - q) / trials)`.
    pub stderr: f64,
}

/// Once a generation reaches this size, extinction has probability below
/// `(1 - y)^SURE_SURVIVAL`, which is negligible for every supercritical case
/// this is used for.
const SURE_SURVIVAL: u64 = 100_000;

/// Fraction of Bin(d, p)-offspring branching processes still alive after
/// `depth_cap` generations. Trial `i` uses RNG stream `(seed, i)`.
pub fn gw_survival_monte_carlo(d: u64, p: f64, depth_cap: u32, trials: u64, seed: u64) -> GwEstimate {
    let p = p.clamp(0.0, 1.0);
    let survived: u64 = (0..trials)
        .into_par_iter()
        .map(|i| u64::from(survives(d, p, depth_cap, seed, i)))
        .sum();
    let q = if trials == 0 {
        0.0
    } else {
        survived as f64 / trials as f64
    };
    GwEstimate {
        d,
        p,
        depth_cap,
        trials,
        survived,
        estimate: q,
        stderr: if trials == 0 {
            0.0
        } else {
            (q * (1.0 - q) / trials as f64).sqrt()
        },
    }
}

fn survives(d: u64, p: f64, depth_cap: u32, seed: u64, trial: u64) -> bool {
    let mut rng = stream_rng(seed, trial);
    let mut population = 1u64;
    for _ in 0..depth_cap {
        if population >= SURE_SURVIVAL {
            return true;
        }
        population = Binomial::new(d * population, p)
            .expect("p clamped to [0, 1]")
            .sample(&mut rng);
        if population == 0 {
            return false;
        }
    }
    population > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain fixed-point iteration from y = 0.5.
    fn fixed_point(eps: f64) -> f64 {
        let mut y = 0.5f64;
        for _ in 0..1_000_000 {
            let next = 1.0 - (-(1.0 + eps) * y).exp();
            if (next - y).abs() < 1e-15 {
                return next;
            }
            y = next;
        }
        y
    }

    #[test]
    fn critical_and_subcritical() {
        assert_eq!(survival_probability(0.0).y, 0.0);
        assert_eq!(survival_probability(0.0).regime, Regime::Critical);
        let s = survival_probability(-0.3);
        assert_eq!((s.y, s.regime), (0.0, Regime::Subcritical));
    }

    #[test]
    fn reference_values() {
        assert!((survival_probability(0.1).y - 0.1761).abs() < 5e-5);
        assert!((survival_probability(1.0).y - 0.7968).abs() < 5e-5);
    }

    #[test]
    fn agrees_with_fixed_point_oracle() {
        for eps in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let s = survival_probability(eps);
            assert!(s.residual <= 1e-12, "eps {eps}: residual {}", s.residual);
            assert!((s.y - fixed_point(eps)).abs() <= 1e-8, "eps {eps}");
        }
    }

    #[test]
    fn monotone_and_saturating() {
        let mut prev = 0.0;
        for i in 1..=100 {
            let y = survival_probability(i as f64 / 100.0).y;
            assert!(y > prev);
            assert!(y > 0.0 && y < 1.0);
            prev = y;
        }
        assert!(survival_probability(10.0).y > 0.9999);
    }

    #[test]
    fn near_critical_root() {
        for eps in [1e-9, 1e-7, 1e-5] {
            let s = survival_probability(eps);
            assert!(s.y > 0.0);
            assert!(s.residual <= 1e-12);
            // y = 2 eps + O(eps^2)
            assert!((s.y / (2.0 * eps) - 1.0).abs() < 10.0 * eps);
            assert_eq!(s.near_critical, eps < NEAR_CRITICAL_EPS);
        }
    }

    #[test]
    fn monte_carlo_degenerate_cases() {
        assert_eq!(gw_survival_monte_carlo(10, 0.0, 50, 1000, 1).estimate, 0.0);
        assert_eq!(gw_survival_monte_carlo(3, 1.0, 50, 1000, 1).estimate, 1.0);
        assert_eq!(gw_survival_monte_carlo(1, 1.0, 50, 100, 1).estimate, 1.0);
    }

    #[test]
    fn monte_carlo_matches_root() {
        // Bin(1000, 1.2/1000) is close to Poisson(1.2)
        let mc = gw_survival_monte_carlo(1000, 1.2 / 1000.0, 200, 20_000, 3);
        let y = survival_probability(0.2).y;
        assert!(mc.estimate > y - 3.0 * mc.stderr, "{mc:?} vs {y}");
        assert!(mc.estimate < y + 0.01 + 3.0 * mc.stderr, "{mc:?} vs {y}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = gw_survival_monte_carlo(50, 0.03, 100, 500, 9);
        let b = gw_survival_monte_carlo(50, 0.03, 100, 500, 9);
        assert_eq!(a, b);
    }
}
