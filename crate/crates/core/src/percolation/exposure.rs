use serde::Serialize;

use crate::error::{Error, Result};

/// Two-round exposure: `G_p` has the law of `G_{p1} ∪ G_{p2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExposurePair {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
}

impl ExposurePair {
    /// `|(1 - p1)(1 - p2) - (1 - p)|`.
    pub fn defect(&self) -> f64 {
        ((1.0 - self.p1) * (1.0 - self.p2) - (1.0 - self.p)).abs()
    }
}

/// `p2 = eps^3 / d`, `p1 = 1 - (1 - p) / (1 - p2)`.
pub fn double_exposure_split(p: f64, eps: f64, d: usize) -> Result<ExposurePair> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("retention probability {p} outside [0, 1]")));
    }
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::invalid(format!("sprinkling needs eps >= 0, got {eps}")));
    }
    if d == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let p2 = eps.powi(3) / d as f64;
    if p < p2 {
        return Err(Error::invalid(format!("p = {p} is below the sprinkle probability {p2}")));
    }
    if p2 >= 1.0 {
        return Err(Error::invalid(format!("sprinkle probability {p2} must be below 1")));
    }
    let p1 = if p2 == 0.0 { p } else { 1.0 - (1.0 - p) / (1.0 - p2) };
    if p1 < p2 {
        return Err(Error::invalid(format!(
            "first-round probability {p1} is below the sprinkle probability {p2}"
        )));
    }
    Ok(ExposurePair { p, p1, p2 })
}
