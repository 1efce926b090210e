//! Trigonometric projections by uniform trapezoid quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Sin,
    Cos,
}

impl Trig {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Trig::Sin => x.sin(),
            Trig::Cos => x.cos(),
        }
    }
}

/// Default node count for harmonics up to `n`: `4n + 8`.
pub fn default_nodes(n: usize) -> usize {
    4 * n + 8
}

/// `(1/π) ∫₀^{2π} g(θ) trig(sθ) dθ` on `nodes` uniform points.
///
/// Exact for trigonometric polynomials of degree below `nodes / 2`. With
/// `s = 0` and [`Trig::Cos`] this is twice the mean of `g`.
pub fn fourier_project(
    g: impl Fn(f64) -> Result<f64>,
    harmonic: usize,
    kind: Trig,
    nodes: usize,
) -> Result<f64> {
    let samples = sample_periodic(g, nodes)?;
    Ok(project_samples(&samples, harmonic, kind))
}

/// Values of `g` at `θ_k = 2πk / nodes`.
pub fn sample_periodic(g: impl Fn(f64) -> Result<f64>, nodes: usize) -> Result<Vec<f64>> {
    (0..nodes).map(|k| g(node_angle(k, nodes))).collect()
}

pub fn node_angle(k: usize, nodes: usize) -> f64 {
    2.0 * PI * k as f64 / nodes as f64
}

/// Projection of pre-sampled values (see [`sample_periodic`]).
pub fn project_samples(samples: &[f64], harmonic: usize, kind: Trig) -> f64 {
    let m = samples.len();
    let acc: f64 = samples
        .iter()
        .enumerate()
        .map(|(k, v)| v * kind.apply(harmonic as f64 * node_angle(k, m)))
        .sum();
    2.0 * acc / m as f64
}
