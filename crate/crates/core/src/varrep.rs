//! VAR representation of a GNAR model and stationarity checks.
//!
//! Every GNAR model is a VAR(p) whose autoregressive matrices are built
//! from the coefficient vector, the (possibly time-varying) weights, the
//! stage matrices and the partition. The representation drives the
//! companion-matrix stationarity check, dual-path simulation tests and
//! one-step forecasts.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, StageAdjacency};
use crate::order::{ModelOrder, ParamCoord, ParameterVector};
use crate::scalar::Real;
use crate::weights::WeightsMatrix;

/// Autoregressive matrices `Phi_1..Phi_p` for one time point.
#[derive(Debug, Clone, PartialEq)]
pub struct VarMatrices<T: Real> {
    mats: Vec<DMatrix<T>>,
}

impl VarMatrices<f64> {}

impl<T: Real> VarMatrices<T> {
    pub fn max_lag(&self) -> usize {
        self.mats.len()
    }

    pub fn node_count(&self) -> usize {
        self.mats.first().map_or(0, DMatrix::nrows)
    }

    /// Matrix for lag `k` (1-based).
    pub fn at_lag(&self, k: usize) -> &DMatrix<T> {
        &self.mats[k - 1]
    }

    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.mats
    }

    /// Applies the lag-k matrix: `Phi_k x`.
    pub fn apply(&self, k: usize, x: &DVector<T>) -> DVector<T> {
        self.at_lag(k) * x
    }

    /// The `pd x pd` companion matrix of the VAR.
    pub fn companion(&self) -> DMatrix<T> {
        let p = self.max_lag();
        let d = self.node_count();
        let mut comp = DMatrix::zeros(p * d, p * d);
        for k in 1..=p {
            comp.view_mut((0, (k - 1) * d), (d, d))
                .copy_from(self.at_lag(k));
        }
        for block in 1..p {
            for i in 0..d {
                comp[(block * d + i, (block - 1) * d + i)] = T::one();
            }
        }
        comp
    }
}

/// Builds `Phi_1..Phi_p` from coefficients and one weights matrix.
///
/// Coefficients beyond a community's own order are structurally absent, so
/// their contribution is zero without being stored.
pub fn var_matrices<T: Real>(
    order: &ModelOrder,
    theta: &ParameterVector<T>,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    part: &CommunityPartition,
) -> Result<VarMatrices<T>> {
    let layout = order.layout();
    let structural = theta.structural(&layout)?;
    let d = part.node_count();
    if weights.node_count() != d {
        return Err(Error::DimensionMismatch {
            context: "weights vs partition",
            expected: d,
            got: weights.node_count(),
        });
    }
    let max_stage = order.max_stage();
    if max_stage > stages.len() {
        return Err(Error::StageShortage {
            requested: max_stage,
            available: stages.len(),
        });
    }
    let p = order.max_lag();
    let mut mats = vec![DMatrix::<T>::zeros(d, d); p];
    for (coord, value) in layout.structural_coords().iter().zip(structural.iter()) {
        if *value == T::zero() {
            continue;
        }
        match *coord {
            ParamCoord::Auto { lag, community } => {
                let m = &mut mats[lag - 1];
                for &i in part.members(community) {
                    m[(i, i)] += *value;
                }
            }
            ParamCoord::Within {
                lag,
                stage,
                community,
            } => {
                let s = stages[stage - 1].matrix();
                let m = &mut mats[lag - 1];
                for &i in part.members(community) {
                    for &j in part.members(community) {
                        if s[(i, j)] {
                            m[(i, j)] += *value * weights.get(i, j);
                        }
                    }
                }
            }
            ParamCoord::Between {
                lag,
                stage,
                community,
                other,
            } => {
                let s = stages[stage - 1].matrix();
                let m = &mut mats[lag - 1];
                for &i in part.members(community) {
                    for &j in part.members(other) {
                        if s[(i, j)] {
                            m[(i, j)] += *value * weights.get(i, j);
                        }
                    }
                }
            }
            ParamCoord::SharedWithin { .. } => {
                unreachable!("shared coordinates only appear in free space")
            }
        }
    }
    Ok(VarMatrices { mats })
}

/// Result of the coefficient-sum stationarity check.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficiencyReport<T: Real> {
    /// Per-community absolute coefficient sums.
    pub community_sums: Vec<T>,
    /// `1 - max_c sum_c`; positive iff the check passes.
    pub margin: T,
    pub pass: bool,
}

/// Checks the sufficient stationarity condition: for every community the
/// absolute sum of its autoregressive, within and interaction coefficients
/// is below one.
pub fn check_stationary_sufficient<T: Real>(
    order: &ModelOrder,
    theta: &ParameterVector<T>,
) -> Result<SufficiencyReport<T>> {
    let layout = order.layout();
    let structural = theta.structural(&layout)?;
    let mut sums = vec![T::zero(); order.community_count()];
    for (coord, value) in layout.structural_coords().iter().zip(structural.iter()) {
        let community = match *coord {
            ParamCoord::Auto { community, .. }
            | ParamCoord::Within { community, .. }
            | ParamCoord::Between { community, .. } => community,
            ParamCoord::SharedWithin { .. } => unreachable!(),
        };
        sums[community - 1] += value.abs();
    }
    let max = sums.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let margin = T::one() - max;
    Ok(SufficiencyReport {
        community_sums: sums,
        margin,
        pass: margin > T::zero(),
    })
}

/// Result of the companion spectral-radius check.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionReport<T: Real> {
    pub spectral_radius: T,
    pub pass: bool,
}

/// Unit-circle tolerance for the companion check.
pub const COMPANION_TOL: f64 = 1e-10;

/// Spectral radius of a square matrix.
pub fn spectral_radius<T: Real>(mat: &DMatrix<T>) -> T {
    mat.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re * z.re + z.im * z.im).sqrt())
        .fold(T::zero(), |a, b| a.max(b))
}

/// Checks stationarity through the companion matrix of a static-weights
/// VAR representation: passes when the spectral radius stays below
/// `1 - 1e-10`.
pub fn check_stationary_companion<T: Real>(var: &VarMatrices<T>) -> CompanionReport<T> {
    let rho = spectral_radius(&var.companion());
    CompanionReport {
        spectral_radius: rho,
        pass: rho < T::one() - T::from_f64_lossy(COMPANION_TOL),
    }
}

/// Spectral radius of the product of per-phase companion matrices, the
/// stability quantity for weights with a finite period.
pub fn cycle_spectral_radius<T: Real>(per_phase: &[VarMatrices<T>]) -> T {
    assert!(!per_phase.is_empty());
    let dim = per_phase[0].companion().nrows();
    let mut product = DMatrix::<T>::identity(dim, dim);
    for var in per_phase {
        product = var.companion() * product;
    }
    let rho = spectral_radius(&product);
    // geometric mean per step, comparable with the static check
    rho.powf(T::one() / T::from_usize_lossy(per_phase.len()))
}
