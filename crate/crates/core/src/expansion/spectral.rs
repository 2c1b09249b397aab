use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{components, Graph};
use crate::rng::keyed_uniform;

const MAX_ITERATIONS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// `rayleigh + residual`: an upper estimate of the second adjacency eigenvalue.
    pub lambda2: f64,
    /// Rayleigh quotient of `A` on the final iterate.
    pub rayleigh: f64,
    /// `||A x - rayleigh x||` for the unit iterate `x`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Power iteration for `A + dI` on the complement of the all-ones vector.
///
/// Stops when `residual <= tol * d` or after a fixed iteration cap. The
/// shift makes the operator positive semidefinite, so the iteration tracks
/// the second-largest adjacency eigenvalue rather than the most negative one.
pub fn spectral_gap_estimate(g: &Graph, tol: f64) -> Result<SpectralEstimate> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let n = g.n();
    if n < 2 || components(g, None)?.count() != 1 {
        return Err(Error::Disconnected);
    }
    let d = d as f64;
    let mut x: Vec<f64> = (0..n).map(|v| keyed_uniform(0x05EC_70A1, v as u64) - 0.5).collect();
    deflate_and_normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut est = SpectralEstimate {
        lambda2: d,
        rayleigh: d,
        residual: f64::INFINITY,
        iterations: 0,
        converged: false,
    };
    for it in 1..=MAX_ITERATIONS {
        adjacency_times(g, &x, &mut y);
        let mu: f64 = x.par_iter().zip(&y).map(|(a, b)| a * b).sum();
        let res: f64 = x
            .par_iter()
            .zip(&y)
            .map(|(a, b)| (b - mu * a) * (b - mu * a))
            .sum::<f64>()
            .sqrt();
        est = SpectralEstimate {
            lambda2: mu + res,
            rayleigh: mu,
            residual: res,
            iterations: it,
            converged: res <= tol * d,
        };
        if est.converged {
            break;
        }
        // x <- (A + dI) x
        x.par_iter_mut().zip(&y).for_each(|(a, b)| *a = *b + d * *a);
        deflate_and_normalize(&mut x);
    }
    Ok(est)
}

fn deflate_and_normalize(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.par_iter_mut().for_each(|a| *a -= mean);
    let norm = x.par_iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.par_iter_mut().for_each(|a| *a /= norm);
    }
}

fn adjacency_times(g: &Graph, x: &[f64], y: &mut [f64]) {
    if g.is_complete_implicit() {
        let total: f64 = x.iter().sum();
        y.par_iter_mut().zip(x).for_each(|(b, a)| *b = total - a);
        return;
    }
    y.par_iter_mut().enumerate().for_each(|(v, out)| {
        *out = g
            .neighbor_slice(v)
            .expect("explicit adjacency")
            .iter()
            .map(|&w| x[w as usize])
            .sum();
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_graph, disjoint_cliques, hypercube, random_regular};

    #[test]
    fn complete_graph_spectrum() {
        let est = spectral_gap_estimate(&complete_graph(4).unwrap(), 1e-9).unwrap();
        assert!((est.rayleigh + 1.0).abs() < 1e-9);
        assert!(est.lambda2 <= 3.0 * 1e-9);
        let explicit = Graph::from_edges(4, complete_graph(4).unwrap().edges()).unwrap();
        let est = spectral_gap_estimate(&explicit, 1e-9).unwrap();
        assert!((est.lambda2 + 1.0).abs() < 1e-6);
    }

    /// Eigenvalues of `Q^3` by Jacobi rotation on the dense 8x8 adjacency matrix.
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[p][q] * a[p][q];
                    if a[p][q].abs() < 1e-14 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
            if off < 1e-24 {
                break;
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    #[test]
    fn cube_second_eigenvalue() {
        let g = hypercube(3).unwrap();
        let mut a = vec![vec![0.0; 8]; 8];
        g.for_each_edge(|_, u, v| {
            a[u][v] = 1.0;
            a[v][u] = 1.0;
        });
        let ev = jacobi_eigenvalues(a);
        assert!((ev[0] - 3.0).abs() < 1e-9);
        assert!((ev[1] - 1.0).abs() < 1e-9);
        let est = spectral_gap_estimate(&g, 1e-10).unwrap();
        assert!(est.converged);
        assert!((est.lambda2 - ev[1]).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn random_regular_band() {
        let g = random_regular(10_000, 20, 3).unwrap();
        let est = spectral_gap_estimate(&g, 1e-3).unwrap();
        assert!(est.lambda2 < 10.0, "{est:?}");
        assert!(est.lambda2 < 2.0 * 19f64.sqrt() * 1.2, "{est:?}");
        assert!(est.rayleigh > 6.0, "{est:?}");
    }

    #[test]
    fn rejects_disconnected_and_irregular() {
        let h = disjoint_cliques(3, 2).unwrap();
        assert!(matches!(spectral_gap_estimate(&h.graph, 1e-6), Err(Error::Disconnected)));
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(matches!(spectral_gap_estimate(&path, 1e-6), Err(Error::NotRegular)));
    }
}
