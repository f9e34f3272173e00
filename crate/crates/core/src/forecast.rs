//! Transforms, one-step forecasts, scoring and baseline models.
//!
//! Forecasts are conditional means: the fitted coefficients contract the
//! recent history with the noise term dropped. Standardization follows
//! the training-window convention `Y = sqrt(T0) (X - mean) / rss^{1/2}`,
//! whose inverse maps standardized forecasts back to the original scale.

use nalgebra::{DMatrix, DVector};

use crate::design::build_design;
use crate::error::{Error, Result};
use crate::fit::{fit_ols, FitResult};
use crate::graph::{CommunityPartition, Network, StageAdjacency};
use crate::order::{ModelOrder, ParamCoord, ParameterVector};
use crate::scalar::Real;
use crate::sim::Realization;
use crate::weights::{equal_weights, WeightsSequence};

/// Per-node centering and scale over a declared training window.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationParams<T: Real> {
    pub means: Vec<T>,
    /// `s_i = {sum_{t<=T0} (X_it - mean_i)^2}^{1/2} / sqrt(T0)`.
    pub scales: Vec<T>,
    pub window: usize,
}

/// Standardizes every node series using moments of the first `t0` steps:
/// `Y = (X - mean) / s`. Over the training window the result has mean zero
/// and squared norm `t0` per node.
pub fn standardize<T: Real>(
    values: &DMatrix<T>,
    t0: usize,
) -> Result<(DMatrix<T>, StandardizationParams<T>)> {
    let (d, len) = (values.nrows(), values.ncols());
    if t0 < 2 || t0 > len {
        return Err(Error::BadWindow { t0, len });
    }
    let mut means = Vec::with_capacity(d);
    let mut scales = Vec::with_capacity(d);
    for i in 0..d {
        let mean = (0..t0).fold(T::zero(), |a, t| a + values[(i, t)]) / T::from_usize_lossy(t0);
        let rss = (0..t0).fold(T::zero(), |a, t| {
            let v = values[(i, t)] - mean;
            a + v * v
        });
        if rss <= T::zero() {
            return Err(Error::ConstantSeries { node: i + 1 });
        }
        means.push(mean);
        scales.push(rss.sqrt() / T::from_usize_lossy(t0).sqrt());
    }
    let out = DMatrix::from_fn(d, len, |i, t| (values[(i, t)] - means[i]) / scales[i]);
    Ok((
        out,
        StandardizationParams {
            means,
            scales,
            window: t0,
        },
    ))
}

/// Maps a standardized forecast back to the original scale,
/// `X = s Y + mean` per node.
pub fn unstandardize_forecast<T: Real>(
    y_hat: &DVector<T>,
    params: &StandardizationParams<T>,
) -> Result<DVector<T>> {
    if y_hat.len() != params.means.len() {
        return Err(Error::DimensionMismatch {
            context: "forecast vs standardization params",
            expected: params.means.len(),
            got: y_hat.len(),
        });
    }
    Ok(DVector::from_fn(y_hat.len(), |i, _| {
        params.scales[i] * y_hat[i] + params.means[i]
    }))
}

/// Differences the series at the given lag: `X_t - X_{t-lag}`, dropping
/// the first `lag` columns.
pub fn difference<T: Real>(values: &DMatrix<T>, lag: usize) -> Result<DMatrix<T>> {
    let len = values.ncols();
    if lag == 0 || len <= lag {
        return Err(Error::DifferenceTooShort { lag, len });
    }
    Ok(DMatrix::from_fn(values.nrows(), len - lag, |i, t| {
        values[(i, t + lag)] - values[(i, t)]
    }))
}

/// One-step conditional-mean forecast from fitted coefficients: every
/// coefficient contracts its neighbourhood regression of the lagged
/// history, using the weights of the lagged time.
pub fn forecast_one_step<T: Real>(
    order: &ModelOrder,
    theta: &ParameterVector<T>,
    history: &Realization<T>,
    weights: &WeightsSequence<T>,
    part: &CommunityPartition,
    stages: &[StageAdjacency],
) -> Result<DVector<T>> {
    let d = part.node_count();
    let p = order.max_lag();
    let len = history.len();
    if len < p {
        return Err(Error::RealizationTooShort { len, max_lag: p });
    }
    if history.node_count() != d {
        return Err(Error::DimensionMismatch {
            context: "history vs partition",
            expected: d,
            got: history.node_count(),
        });
    }
    let layout = order.layout();
    let structural = theta.structural(&layout)?;
    let mut out = DVector::<T>::zeros(d);
    // forecast target time is len + 1 (1-based)
    let target = len as i64 + 1;
    for (coord, value) in layout.structural_coords().iter().zip(structural.iter()) {
        if *value == T::zero() {
            continue;
        }
        let (lag, contribution) = match *coord {
            ParamCoord::Auto { lag, community } => {
                let x = history.state(len - lag);
                let mut z = DVector::zeros(d);
                for &i in part.members(community) {
                    z[i] = x[i];
                }
                (lag, z)
            }
            ParamCoord::Within {
                lag,
                stage,
                community,
            } => {
                if stage > stages.len() {
                    return Err(Error::StageShortage {
                        requested: stage,
                        available: stages.len(),
                    });
                }
                let x = history.state(len - lag);
                let w = weights.at(target - lag as i64);
                let z = crate::sim::community_regression(&x, w, &stages[stage - 1], part, community)?;
                (lag, z)
            }
            ParamCoord::Between {
                lag,
                stage,
                community,
                other,
            } => {
                if stage > stages.len() {
                    return Err(Error::StageShortage {
                        requested: stage,
                        available: stages.len(),
                    });
                }
                let x = history.state(len - lag);
                let w = weights.at(target - lag as i64);
                let z = crate::sim::interaction_regression(
                    &x,
                    w,
                    &stages[stage - 1],
                    part,
                    community,
                    other,
                )?;
                (lag, z)
            }
            ParamCoord::SharedWithin { .. } => unreachable!(),
        };
        let _ = lag;
        out += contribution * *value;
    }
    Ok(out)
}

/// Root mean-squared prediction error across nodes.
pub fn rmspe<T: Real>(forecast: &DVector<T>, actual: &DVector<T>) -> Result<T> {
    if forecast.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            context: "forecast vs actual",
            expected: actual.len(),
            got: forecast.len(),
        });
    }
    let d = T::from_usize_lossy(forecast.len());
    let sum = forecast
        .iter()
        .zip(actual.iter())
        .fold(T::zero(), |a, (f, x)| a + (*x - *f) * (*x - *f));
    Ok((sum / d).sqrt())
}

/// Previous-observation forecast.
pub fn naive_forecast<T: Real>(history: &Realization<T>) -> Result<DVector<T>> {
    if history.is_empty() {
        return Err(Error::Invalid("empty history".to_string()));
    }
    Ok(history.state(history.len() - 1))
}

/// An unrestricted VAR(p) fitted through its GNAR specialization:
/// singleton communities on a complete graph with all interactions.
#[derive(Debug, Clone)]
pub struct VarBaseline<T: Real> {
    pub order: ModelOrder,
    pub fit: FitResult<T>,
    /// Coefficient matrices `Phi_1..Phi_p`.
    pub matrices: Vec<DMatrix<T>>,
}

impl<T: Real> VarBaseline<T> {
    /// One-step conditional-mean forecast.
    pub fn forecast_one_step(&self, history: &Realization<T>) -> Result<DVector<T>> {
        let p = self.matrices.len();
        let len = history.len();
        if len < p {
            return Err(Error::RealizationTooShort { len, max_lag: p });
        }
        let d = history.node_count();
        let mut out = DVector::zeros(d);
        for (k, phi) in self.matrices.iter().enumerate() {
            out += phi * history.state(len - 1 - k);
        }
        Ok(out)
    }
}

/// Fits an unrestricted VAR(p) baseline. Guards against underdetermined
/// systems: each nodal equation has `d p` coefficients and only `T - p`
/// usable rows.
pub fn fit_var_baseline<T: Real>(values: &DMatrix<T>, p: usize) -> Result<VarBaseline<T>> {
    let d = values.nrows();
    let len = values.ncols();
    if p == 0 {
        return Err(Error::InvalidOrder("VAR needs p >= 1".to_string()));
    }
    if d * p >= len.saturating_sub(p) {
        return Err(Error::Underdetermined { p, d, len });
    }
    let complete: Vec<(usize, usize)> = (1..=d)
        .flat_map(|i| ((i + 1)..=d).map(move |j| (i, j)))
        .collect();
    let net = Network::from_edge_list(&complete, d)?;
    let stages = crate::graph::stage_adjacency(&net, 1);
    let part = CommunityPartition::singletons(d);
    let order = ModelOrder::unconstrained_var(d, p)?;
    let weights = WeightsSequence::constant(equal_weights(&net, &stages));
    let real = Realization::new(values.clone());
    let design = build_design(&real, &order, &weights, &part, &stages)?;
    let fit = fit_ols(&design)?;
    let layout = order.layout();
    let mut matrices = vec![DMatrix::<T>::zeros(d, d); p];
    let uniform = if d > 1 {
        T::one() / T::from_usize_lossy(d - 1)
    } else {
        T::one()
    };
    for (coord, value) in layout
        .free_coords()
        .iter()
        .zip(fit.theta.values().iter())
    {
        match *coord {
            ParamCoord::Auto { lag, community } => {
                matrices[lag - 1][(community - 1, community - 1)] = *value;
            }
            ParamCoord::Between {
                lag,
                community,
                other,
                ..
            } => {
                matrices[lag - 1][(community - 1, other - 1)] = *value * uniform;
            }
            _ => {}
        }
    }
    Ok(VarBaseline {
        order,
        fit,
        matrices,
    })
}
