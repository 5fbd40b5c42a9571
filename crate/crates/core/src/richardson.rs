//! Richardson extrapolation to zero noise: exact polynomial weights through
//! the measured scale factors, evaluated at c = 0, with variance propagation.
//!
//! The weights solve sum_i gamma_i = 1 and sum_i gamma_i c_i^k = 0 for
//! k = 1..m, which is the Lagrange interpolation basis evaluated at zero.
//! Fits are exactly determined: an order-m extrapolation consumes exactly
//! m+1 points, and when more are available the lowest scale factors are
//! used (they carry the least amplified noise).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One noisy estimate at a known noise scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledEstimate {
    pub scale: f64,
    pub energy: f64,
    pub sem: f64,
}

/// Input to an extrapolation: scaled estimates plus the polynomial order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolationProblem {
    pub points: Vec<ScaledEstimate>,
    pub order: usize,
}

impl ExtrapolationProblem {
    pub fn new(points: Vec<ScaledEstimate>, order: usize) -> Result<Self> {
        if points.len() < order + 1 {
            return Err(Error::InsufficientPoints { needed: order + 1, got: points.len() });
        }
        let mut sorted = points;
        sorted.sort_by(|a, b| a.scale.partial_cmp(&b.scale).unwrap());
        for w in sorted.windows(2) {
            if (w[1].scale - w[0].scale).abs() < 1e-12 {
                return Err(Error::DuplicateFactors);
            }
        }
        if sorted.iter().any(|p| p.scale <= 0.0 || !p.scale.is_finite()) {
            return Err(Error::InvalidValue("scale factors must be positive".into()));
        }
        Ok(Self { points: sorted, order })
    }
}

/// Zero-noise estimate with the weights that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolationResult {
    pub gammas: Vec<f64>,
    pub estimate: f64,
    pub sem: f64,
    pub order: usize,
    /// The points actually consumed by the fit.
    pub points: Vec<ScaledEstimate>,
}

/// Lagrange-at-zero weights for the given scale factors; order is implied
/// by the factor count (m = len - 1).
pub fn richardson_gammas(factors: &[f64]) -> Result<Vec<f64>> {
    let n = factors.len();
    if n == 0 {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (factors[i] - factors[j]).abs() < 1e-12 {
                return Err(Error::DuplicateFactors);
            }
        }
    }
    let mut gammas = Vec::with_capacity(n);
    for i in 0..n {
        let mut g = 1.0;
        for j in 0..n {
            if i != j {
                g *= -factors[j] / (factors[i] - factors[j]);
            }
        }
        gammas.push(g);
    }
    Ok(gammas)
}

/// Shot-cost multiplier sum_i gamma_i^2 for equal per-point uncertainty.
pub fn variance_amplification(gammas: &[f64]) -> f64 {
    gammas.iter().map(|g| g * g).sum()
}

/// Extrapolate to c = 0 using the m+1 lowest-scale points.
pub fn extrapolate(problem: &ExtrapolationProblem) -> Result<ExtrapolationResult> {
    let used: Vec<ScaledEstimate> = problem.points[..problem.order + 1].to_vec();
    let factors: Vec<f64> = used.iter().map(|p| p.scale).collect();
    let gammas = richardson_gammas(&factors)?;
    let estimate = gammas.iter().zip(&used).map(|(g, p)| g * p.energy).sum();
    let sem = gammas
        .iter()
        .zip(&used)
        .map(|(g, p)| (g * p.sem).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ExtrapolationResult { gammas, estimate, sem, order: problem.order, points: used })
}
