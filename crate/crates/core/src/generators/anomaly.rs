//! Partitioned construction with isolated dense classes.
//!
//! The vertex set is cut into `t = n / class_size` consecutive classes. An
//! inter-class graph `H` is a random `c1_prime`-regular graph with no edge
//! inside any class (each class is an independent set of `H`), and every class
//! additionally hosts its own random `(d - c1_prime)`-regular graph. The union
//! is `d`-regular. Under percolation at `p = (1 + eps) / d` a class loses all
//! of its `c1_prime * class_size` outgoing edges with probability
//! `(1 - p)^(c1_prime * class_size)`; such isolated classes carry their own
//! supercritical internal components.

use rayon::prelude::*;
use serde::Serialize;

use super::{regular_pairing, HostGraph};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnomalyParams {
    pub n: usize,
    pub d: usize,
    /// Degree of the inter-class graph.
    pub c1_prime: usize,
    /// Vertices per class.
    pub class_size: usize,
}

impl AnomalyParams {
    pub fn class_count(&self) -> usize {
        self.n / self.class_size.max(1)
    }

    /// Degree inside each class.
    pub fn intra_degree(&self) -> usize {
        self.d.saturating_sub(self.c1_prime)
    }

    /// Edges leaving each class.
    pub fn class_boundary(&self) -> usize {
        self.c1_prime * self.class_size
    }

    pub fn structural_checks(&self) -> Vec<FeasibilityCheck> {
        let cs = self.class_size;
        let dp = self.intra_degree();
        vec![
            FeasibilityCheck::new(
                "class_size_divides_n",
                cs > 0 && self.n % cs == 0,
                format!("n = {}, class_size = {cs}", self.n),
            ),
            FeasibilityCheck::new(
                "intra_degree_positive",
                self.d > self.c1_prime,
                format!("d' = d - c1' = {} - {}", self.d, self.c1_prime),
            ),
            FeasibilityCheck::new(
                "class_size_exceeds_intra_degree",
                dp < cs,
                format!("d' = {dp}, class_size = {cs}"),
            ),
            FeasibilityCheck::new(
                "intra_stub_parity",
                (cs * dp) % 2 == 0,
                format!("class_size * d' = {}", cs * dp),
            ),
            FeasibilityCheck::new(
                "inter_stub_parity",
                (self.n * self.c1_prime) % 2 == 0,
                format!("n * c1' = {}", self.n * self.c1_prime),
            ),
            FeasibilityCheck::new(
                "inter_graph_room",
                cs > 0 && self.class_count() >= 2 && self.c1_prime <= self.n.saturating_sub(cs),
                format!("t = {}, c1' = {}", self.class_count(), self.c1_prime),
            ),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl FeasibilityCheck {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub params: AnomalyParams,
    pub eps: f64,
    pub p: f64,
    pub class_count: usize,
    /// `(1 - p)^(c1' * class_size)`.
    pub class_isolation_probability: f64,
    /// `mu = t * (1 - p)^(c1' * class_size)`.
    pub expected_isolated_classes: f64,
    /// `p * d'`; above 1 the classes are internally supercritical.
    pub intra_mean_offspring: f64,
    pub desired_isolated_classes: f64,
    pub structurally_feasible: bool,
    pub class_supercritical: bool,
    pub enough_isolated_classes: bool,
    pub checks: Vec<FeasibilityCheck>,
}

/// Closed-form expectations for percolating the construction at
/// `p = (1 + eps) / d`, plus the structural checks used by the generator.
pub fn construction_feasibility(
    params: &AnomalyParams,
    eps: f64,
    desired_isolated_classes: f64,
) -> FeasibilityReport {
    let p = (1.0 + eps) / params.d as f64;
    let isolation = (1.0 - p).powf(params.class_boundary() as f64);
    let t = params.class_count();
    let mu = t as f64 * isolation;
    let offspring = p * params.intra_degree() as f64;
    let mut checks = params.structural_checks();
    let structurally_feasible = checks.iter().all(|c| c.passed);
    let class_supercritical = offspring > 1.0;
    let enough = mu >= desired_isolated_classes;
    checks.push(FeasibilityCheck::new(
        "class_supercritical",
        class_supercritical,
        format!("p * d' = {offspring:.6}"),
    ));
    checks.push(FeasibilityCheck::new(
        "enough_isolated_classes",
        enough,
        format!("mu = {mu:.6} vs desired {desired_isolated_classes}"),
    ));
    FeasibilityReport {
        params: *params,
        eps,
        p,
        class_count: t,
        class_isolation_probability: isolation,
        expected_isolated_classes: mu,
        intra_mean_offspring: offspring,
        desired_isolated_classes,
        structurally_feasible,
        class_supercritical,
        enough_isolated_classes: enough,
        checks,
    }
}

/// The construction with its original constants: `c1' = 3 c1` and classes of
/// size `d ln(n/d) / (30 c1)`.
#[derive(Debug, Clone, Serialize)]
pub struct OriginalConstantReport {
    pub n: f64,
    pub d: f64,
    pub c1: f64,
    pub c1_prime: f64,
    pub intra_degree: f64,
    pub class_size: f64,
    pub class_count: f64,
    /// `class_size / d = ln(n/d) / (30 c1)`.
    pub class_size_over_d: f64,
    /// Smallest `n` with `class_size >= d`: `d * exp(30 c1)`.
    pub min_n_for_class_size_at_least_d: f64,
    pub feasible: bool,
    pub reasons: Vec<String>,
}

pub fn original_constant_instance(n: f64, d: f64, c1: f64) -> OriginalConstantReport {
    let c1_prime = 3.0 * c1;
    let intra = d - c1_prime;
    let ratio = (n / d).ln() / (30.0 * c1);
    let class_size = d * ratio;
    let mut reasons = Vec::new();
    if intra < 1.0 {
        reasons.push(format!("d' = d - 3 c1 = {intra} < 1"));
    }
    if class_size <= intra {
        reasons.push(format!(
            "class size {class_size:.4} does not exceed d' = {intra}; a d'-regular class graph cannot exist"
        ));
    }
    if ratio < 1.0 {
        reasons.push(format!(
            "class_size / d = ln(n/d) / (30 c1) = {ratio:.4} < 1 unless n >= d e^(30 c1) = {:.3e}",
            d * (30.0 * c1).exp()
        ));
    }
    if class_size.fract() != 0.0 {
        reasons.push(format!("class size {class_size:.4} is not an integer"));
    }
    OriginalConstantReport {
        n,
        d,
        c1,
        c1_prime,
        intra_degree: intra,
        class_size,
        class_count: n / class_size,
        class_size_over_d: ratio,
        min_n_for_class_size_at_least_d: d * (30.0 * c1).exp(),
        feasible: reasons.is_empty(),
        reasons,
    }
}

/// Builds the construction. The inter-class graph uses RNG stream
/// `(seed, 0)`; class `j` uses stream `(seed, j + 1)`, so classes can be
/// built in parallel without affecting the output.
pub fn anomaly_construction(params: &AnomalyParams, seed: u64) -> Result<HostGraph> {
    let failed: Vec<String> = params
        .structural_checks()
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({})", c.name, c.detail))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Infeasible(failed.join("; ")));
    }
    let AnomalyParams {
        n,
        d,
        c1_prime,
        class_size,
    } = *params;
    let intra = params.intra_degree();
    let cs = class_size as u32;
    let inter = regular_pairing(n, c1_prime, derive_seed(seed, 0), move |a, b| a / cs == b / cs)?;

    let mut neighbors = vec![0u32; n * d];
    neighbors
        .par_chunks_mut(class_size * d)
        .enumerate()
        .try_for_each(|(j, block)| -> Result<()> {
            let local = regular_pairing(class_size, intra, derive_seed(seed, j as u64 + 1), |_, _| false)?;
            let base = j * class_size;
            for (i, list) in block.chunks_mut(d).enumerate() {
                let v = base + i;
                list[..c1_prime].copy_from_slice(&inter[v * c1_prime..(v + 1) * c1_prime]);
                for (slot, &w) in list[c1_prime..]
                    .iter_mut()
                    .zip(&local[i * intra..(i + 1) * intra])
                {
                    *slot = (base + w as usize) as u32;
                }
                list.sort_unstable();
            }
            Ok(())
        })?;
    let offsets = (0..=n as u64).map(|v| v * d as u64).collect();
    Ok(HostGraph {
        graph: Graph::from_csr_unchecked(offsets, neighbors),
        class_size: Some(class_size),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{components, edge_boundary, EdgeSubset, VertexSet};
    use fixedbitset::FixedBitSet;

    fn small() -> AnomalyParams {
        AnomalyParams {
            n: 1200,
            d: 16,
            c1_prime: 3,
            class_size: 48,
        }
    }

    #[test]
    fn structure_of_small_instance() {
        let params = small();
        let host = anomaly_construction(&params, 7).unwrap();
        let g = &host.graph;
        g.validate().unwrap();
        assert_eq!(g.regular_degree(), Some(16));
        let t = params.class_count();
        assert_eq!(t, 25);
        for j in 0..t {
            let class = VertexSet::from_vertices(g.n(), j * 48..(j + 1) * 48);
            assert_eq!(edge_boundary(g, &class), 144);
            for v in j * 48..(j + 1) * 48 {
                let inside = g.neighbors(v).filter(|&w| class.contains(w)).count();
                assert_eq!(inside, 13);
            }
        }
        // dropping inter-class edges leaves t components of size class_size
        let mut bits = FixedBitSet::with_capacity(g.m() as usize);
        g.for_each_edge(|e, u, v| bits.set(e as usize, u / 48 == v / 48));
        let s = components(g, Some(&EdgeSubset::Bitmap(bits))).unwrap();
        assert_eq!(s.sizes(), vec![48; 25].as_slice());
    }

    #[test]
    fn seeded_determinism() {
        let a = anomaly_construction(&small(), 3).unwrap().graph;
        let b = anomaly_construction(&small(), 3).unwrap().graph;
        let c = anomaly_construction(&small(), 4).unwrap().graph;
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn infeasible_parameters_rejected() {
        let bad = AnomalyParams {
            n: 1000,
            d: 16,
            c1_prime: 3,
            class_size: 48,
        };
        assert!(matches!(anomaly_construction(&bad, 0), Err(Error::Infeasible(_))));
        let tiny_class = AnomalyParams {
            n: 1200,
            d: 64,
            c1_prime: 30,
            class_size: 24,
        };
        let err = anomaly_construction(&tiny_class, 0).unwrap_err().to_string();
        assert!(err.contains("class_size_exceeds_intra_degree"), "{err}");
    }

    #[test]
    fn feasibility_numbers() {
        let params = AnomalyParams {
            n: 4_243_200,
            d: 64,
            c1_prime: 3,
            class_size: 160,
        };
        let r = construction_feasibility(&params, 0.2, 2.0);
        assert_eq!(r.class_count, 26_520);
        assert!((r.p - 0.01875).abs() < 1e-15);
        // (1 - 0.01875)^480 evaluated independently via exp/ln
        let iso = (480.0 * (1.0f64 - 0.01875).ln()).exp();
        assert!((r.class_isolation_probability - iso).abs() < 1e-15);
        assert!((r.class_isolation_probability - 1.133e-4).abs() < 1e-6);
        assert!((r.expected_isolated_classes - 3.0048).abs() < 1e-3);
        assert!((r.intra_mean_offspring - 1.14375).abs() < 1e-12);
        assert!(r.structurally_feasible && r.class_supercritical && r.enough_isolated_classes);
    }

    #[test]
    fn subcritical_classes_flagged() {
        let r = construction_feasibility(&small(), 0.1, 1.0);
        // p * d' = 1.1 / 16 * 13 < 1
        assert!(!r.class_supercritical);
        assert!(r.checks.iter().any(|c| c.name == "class_supercritical" && !c.passed));
    }

    #[test]
    fn original_constants_are_out_of_reach() {
        let r = original_constant_instance(4.0e6, 64.0, 10.0);
        assert!(!r.feasible);
        assert!(r.class_size < r.intra_degree);
        assert!((r.class_size - 64.0 * (62_500f64).ln() / 300.0).abs() < 1e-9);
        assert!(r.class_size_over_d < 1.0);
        assert!((r.min_n_for_class_size_at_least_d / (64.0 * 300f64.exp()) - 1.0).abs() < 1e-12);
        let r2 = original_constant_instance(4_243_200.0, 64.0, 10.0);
        assert!(!r2.feasible);
    }
}
