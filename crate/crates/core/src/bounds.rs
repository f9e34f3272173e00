//! Finite-sample error bounds for the least-squares estimator.
//!
//! The bound machinery turns the realized design into its two structural
//! constants: `tau`, the community Gram eigenvalue floor, and `Gamma`, the
//! uniform column-norm scale. Both are computed by inverting the bound
//! assumptions at equality, so the resulting deterministic bound
//!
//! `||theta_hat - theta_0||_2 <= 2 {tau K (T-p)}^{-1/2} (C q_max)^{1/2} ||R^T u||_inf`
//!
//! is a theorem for every realized fit: any violation indicates an
//! implementation bug rather than bad luck.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::design::DesignSystem;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bound constants and evaluated bounds for one design.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport<T: Real> {
    /// Gram eigenvalue floor, `min_c lambda_min(R_c^T R_c)^2 / {|K_c| (T - p_c)}`.
    pub tau: T,
    /// Per-community floors.
    pub tau_per_community: Vec<T>,
    /// Column-norm scale `sqrt(n) max_j ||R_j||_2`.
    pub gamma: T,
    /// Largest community coefficient count `q_max`.
    pub q_max: usize,
    /// Total coefficient count.
    pub q_total: usize,
    /// Community count.
    pub community_count: usize,
    /// Smallest community size.
    pub k_min: usize,
    /// Largest active lag.
    pub max_lag: usize,
    /// Realization length.
    pub len: usize,
    /// The `delta` the probabilistic bound was evaluated at.
    pub delta: T,
    /// `2 {tau K (T-p)}^{-1/2} (C q_max)^{1/2} ||R^T u||_inf`, when the
    /// noise vector was supplied.
    pub deterministic_rhs: Option<T>,
    /// The sub-Gaussian bound at `delta`.
    pub probabilistic_bound: T,
    /// `1 - 2 exp(-delta^2 tau K (T-p))`; can be vacuous (as low as -1).
    pub probability_floor: T,
    /// Diagnostics (e.g. clamped round-off eigenvalues).
    pub warnings: Vec<String>,
}

/// Smallest eigenvalue of a symmetric matrix, with tiny negative
/// round-off clamped to zero.
fn lambda_min<T: Real>(gram: &DMatrix<T>, warnings: &mut Vec<String>, community: usize) -> T {
    let eig = gram.clone().symmetric_eigen();
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(T::from_f64_lossy(f64::INFINITY), T::min);
    if min < T::zero() {
        let scale = eig
            .eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), T::max);
        if -min <= scale * T::from_f64_lossy(1e-10) {
            warnings.push(format!(
                "community {community}: negative round-off eigenvalue {:.3e} clamped to 0",
                min.to_f64_lossy()
            ));
            return T::zero();
        }
    }
    min
}

/// Evaluates the bound constants and both bound expressions.
///
/// `noise`, when supplied, is the realized `u = y - R theta_0` driving the
/// deterministic right-hand side. `noise_sigma` is the (largest) nodal
/// noise standard deviation entering the probabilistic bound.
pub fn error_bound<T: Real>(
    design: &DesignSystem<T>,
    noise_sigma: T,
    delta: T,
    noise: Option<&DVector<T>>,
) -> Result<BoundReport<T>> {
    let part = design.partition();
    let order = design.order();
    let community_count = part.community_count();
    let mut warnings = Vec::new();

    let mut tau_per_community = Vec::with_capacity(community_count);
    for c in 1..=community_count {
        let gram = design.community_gram(c);
        let lmin = lambda_min(&gram, &mut warnings, c);
        let denom = T::from_usize_lossy(part.size(c) * design.community_obs(c));
        let tau_c = lmin * lmin / denom;
        if !(tau_c > T::zero()) {
            return Err(Error::NonPositiveTau { community: c });
        }
        tau_per_community.push(tau_c);
    }
    let tau = tau_per_community
        .iter()
        .copied()
        .fold(T::from_f64_lossy(f64::INFINITY), T::min);

    let n = design.obs_floor();
    let max_col_norm = (0..design.columns())
        .map(|j| design.matrix().column(j).norm())
        .fold(T::zero(), T::max);
    let gamma = T::from_usize_lossy(n).sqrt() * max_col_norm;

    let q_max = (1..=community_count)
        .map(|c| order.community_coefficients(c))
        .max()
        .unwrap_or(0);
    let q_total = order.total_coefficients();
    let k_min = part.min_size();
    let p = order.max_lag();
    let len = design.len();

    let scale = T::from_usize_lossy(k_min * (len - p)) * tau;
    let cq = T::from_usize_lossy(community_count * q_max);
    let two = T::from_f64_lossy(2.0);

    let deterministic_rhs = noise.map(|u| {
        let rtu = design.matrix().transpose() * u;
        let inf = rtu.iter().map(|v| v.abs()).fold(T::zero(), T::max);
        two * cq.sqrt() / scale.sqrt() * inf
    });

    let log_q = T::from_usize_lossy(q_total).ln();
    let probabilistic_bound =
        two * cq.sqrt() * noise_sigma * gamma * two.sqrt() * ((log_q / scale).sqrt() + delta);
    let probability_floor = T::one() - two * (-delta * delta * scale).exp();

    Ok(BoundReport {
        tau,
        tau_per_community,
        gamma,
        q_max,
        q_total,
        community_count,
        k_min,
        max_lag: p,
        len,
        delta,
        deterministic_rhs,
        probabilistic_bound,
        probability_floor,
        warnings,
    })
}
