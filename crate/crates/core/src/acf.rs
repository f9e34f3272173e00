//! Network autocorrelation diagnostics.
//!
//! The network autocorrelation at lag `h` and stage `r` is the quadratic
//! form of node-demeaned states under `C_r = I + (A + A^T) / 2` with
//! `A = W o S_r`, normalized by the full-sum denominator so the lag-0
//! value is exactly one. It reduces to the classical autocorrelation on a
//! single node. These formulas are a convention of this crate: they
//! respect the weights and stages but need not match any particular
//! normalization used elsewhere.
//!
//! The partial variant at lag `h` is the network autocorrelation of the
//! residuals after fitting a stage-uniform model with `h - 1` lags,
//! mirroring the regress-out-shorter-lags semantics of the classical
//! partial autocorrelation, to which it reduces on a single node.

use nalgebra::{DMatrix, DVector};

use crate::design::build_design;
use crate::error::{Error, Result};
use crate::fit::residuals_after_projection;
use crate::graph::{CommunityPartition, StageAdjacency};
use crate::order::ModelOrder;
use crate::scalar::Real;
use crate::sim::Realization;
use crate::weights::{WeightsMatrix, WeightsSequence};

/// Heuristic white-noise significance band, `3 / sqrt(d T)`.
pub fn white_noise_band(node_count: usize, len: usize) -> f64 {
    3.0 / ((node_count * len) as f64).sqrt()
}

/// Scope of a (P)NACF value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorbitScope {
    /// All nodes.
    Whole,
    /// Restricted to one community (1-based).
    Community(usize),
    /// Mean over the per-community values of a cell.
    CommunityMean,
}

/// Which diagnostic a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorbitKind {
    Nacf,
    Pnacf,
}

impl CorbitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Nacf => "nacf",
            Self::Pnacf => "pnacf",
        }
    }
}

/// One Corbit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CorbitRow<T: Real> {
    pub lag: usize,
    pub stage: usize,
    pub scope: CorbitScope,
    pub value: T,
}

/// Tabular Corbit data: the full (lag, stage[, community]) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorbitTable<T: Real> {
    pub kind: CorbitKind,
    pub rows: Vec<CorbitRow<T>>,
    pub max_lag: usize,
    pub max_stage: usize,
    pub len: usize,
    pub node_count: usize,
}

impl<T: Real> CorbitTable<T> {
    /// Serializes as `kind,lag,stage,community,value` with an empty
    /// community column for whole-network rows and `mean` for community
    /// means. Deterministic byte-for-byte.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("kind,lag,stage,community,value\n");
        for row in &self.rows {
            let community = match row.scope {
                CorbitScope::Whole => String::new(),
                CorbitScope::Community(c) => c.to_string(),
                CorbitScope::CommunityMean => "mean".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.kind.as_str(),
                row.lag,
                row.stage,
                community,
                row.value.to_f64_lossy()
            ));
        }
        out
    }

    pub fn get(&self, lag: usize, stage: usize, scope: CorbitScope) -> Option<T> {
        self.rows
            .iter()
            .find(|r| r.lag == lag && r.stage == stage && r.scope == scope)
            .map(|r| r.value)
    }
}

/// Node-demeaned copy of the series.
fn demean<T: Real>(values: &DMatrix<T>) -> DMatrix<T> {
    let mut out = values.clone();
    let len = T::from_usize_lossy(values.ncols());
    for i in 0..values.nrows() {
        let mean = values.row(i).iter().fold(T::zero(), |a, v| a + *v) / len;
        for t in 0..values.ncols() {
            out[(i, t)] -= mean;
        }
    }
    out
}

/// `C_r = I + (A + A^T) / 2` for `A = W o S_r`.
fn quadratic_kernel<T: Real>(weights: &WeightsMatrix<T>, stage: &StageAdjacency) -> DMatrix<T> {
    let a = weights.stage_filtered(stage);
    let half = T::from_f64_lossy(0.5);
    let mut c = (&a + a.transpose()) * half;
    for i in 0..c.nrows() {
        c[(i, i)] += T::one();
    }
    c
}

fn quadratic_ratio<T: Real>(tilde: &DMatrix<T>, kernel: &DMatrix<T>, h: usize) -> Result<T> {
    let len = tilde.ncols();
    let mut num = T::zero();
    let mut den = T::zero();
    for t in 0..len {
        let xt = tilde.column(t);
        let cxt = kernel * xt;
        den += xt.dot(&cxt);
        if t + h < len {
            num += tilde.column(t + h).dot(&cxt);
        }
    }
    if den.abs() <= T::from_f64_lossy(1e-300) {
        return Err(Error::ConstantSeries { node: 0 });
    }
    Ok(num / den)
}

fn check_lag_stage<T: Real>(
    real: &Realization<T>,
    stages: &[StageAdjacency],
    h: usize,
    r: usize,
) -> Result<()> {
    if real.len() < 2 || h + 2 > real.len() + (h == 0) as usize {
        if h > real.len().saturating_sub(2) {
            return Err(Error::Invalid(format!(
                "lag {h} too large for a series of length {}",
                real.len()
            )));
        }
    }
    if r == 0 || r > stages.len() {
        return Err(Error::StageShortage {
            requested: r,
            available: stages.len(),
        });
    }
    Ok(())
}

/// Network autocorrelation at lag `h` and stage `r`, optionally restricted
/// to one community.
pub fn nacf<T: Real>(
    real: &Realization<T>,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    h: usize,
    r: usize,
    community: Option<(&CommunityPartition, usize)>,
) -> Result<T> {
    check_lag_stage(real, stages, h, r)?;
    match community {
        None => {
            let tilde = demean(real.values());
            let kernel = quadratic_kernel(weights, &stages[r - 1]);
            quadratic_ratio(&tilde, &kernel, h)
        }
        Some((part, c)) => {
            let nodes = part.members(c);
            if nodes.is_empty() {
                return Err(Error::EmptyCommunity { community: c });
            }
            let sub = real.values().select_rows(nodes.iter());
            let tilde = demean(&sub);
            let sub_w = restrict_weights(weights, nodes);
            let sub_stage = stages[r - 1].restrict(nodes);
            let kernel = quadratic_kernel(&sub_w, &sub_stage);
            quadratic_ratio(&tilde, &kernel, h)
        }
    }
}

fn restrict_weights<T: Real>(weights: &WeightsMatrix<T>, nodes: &[usize]) -> WeightsMatrix<T> {
    let mat = DMatrix::from_fn(nodes.len(), nodes.len(), |a, b| {
        if a == b {
            T::zero()
        } else {
            weights.get(nodes[a], nodes[b])
        }
    });
    WeightsMatrix::new(mat).expect("restriction preserves validity")
}

/// Residual series after fitting a stage-uniform model with `lags` lags
/// and depth `r` at every lag. Returns a `d x (T - lags)` matrix.
fn partial_residuals<T: Real>(
    values: &DMatrix<T>,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    lags: usize,
    r: usize,
) -> Result<DMatrix<T>> {
    let d = values.nrows();
    let real = Realization::new(values.clone());
    let part = CommunityPartition::single(d);
    let order = ModelOrder::global(lags, vec![r; lags])?;
    let seq = WeightsSequence::constant(weights.clone());
    let design = build_design(&real, &order, &seq, &part, stages)?;
    let residuals = residuals_after_projection(design.matrix(), design.response())?;
    let steps = values.ncols() - lags;
    let mut out = DMatrix::zeros(d, steps);
    for (row, (node, t)) in design.row_cells().iter().enumerate() {
        out[(*node, t - lags - 1)] = residuals[row];
    }
    Ok(out)
}

/// Partial network autocorrelation: equals [`nacf`] at lag one; at larger
/// lags it is the network autocorrelation of the residuals after the
/// shorter lags are regressed out (within the community for the community
/// variant).
pub fn pnacf<T: Real>(
    real: &Realization<T>,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    h: usize,
    r: usize,
    community: Option<(&CommunityPartition, usize)>,
) -> Result<T> {
    if h == 0 {
        return Err(Error::Invalid("pnacf needs a lag of at least one".to_string()));
    }
    if h == 1 {
        return nacf(real, weights, stages, h, r, community);
    }
    check_lag_stage(real, stages, h, r)?;
    match community {
        None => {
            let resid = partial_residuals(real.values(), weights, stages, h - 1, r)?;
            residual_nacf(&resid, weights, &stages[r - 1], h)
        }
        Some((part, c)) => {
            let nodes = part.members(c);
            if nodes.is_empty() {
                return Err(Error::EmptyCommunity { community: c });
            }
            let sub = real.values().select_rows(nodes.iter());
            let sub_w = restrict_weights(weights, nodes);
            let sub_stages: Vec<StageAdjacency> =
                stages.iter().map(|s| s.restrict(nodes)).collect();
            let resid = partial_residuals(&sub, &sub_w, &sub_stages, h - 1, r)?;
            residual_nacf(&resid, &sub_w, &sub_stages[r - 1], h)
        }
    }
}

/// Last step of the partial computation. The residual series is shorter
/// than the input by `h - 1` steps, so the lag-`h` overlap can legally
/// shrink to a single term; only a fully empty overlap is an error.
fn residual_nacf<T: Real>(
    resid: &DMatrix<T>,
    weights: &WeightsMatrix<T>,
    stage: &StageAdjacency,
    h: usize,
) -> Result<T> {
    if h >= resid.ncols() {
        return Err(Error::Invalid(format!(
            "lag {h} leaves no overlap in a residual series of length {}",
            resid.ncols()
        )));
    }
    let tilde = demean(resid);
    let kernel = quadratic_kernel(weights, stage);
    quadratic_ratio(&tilde, &kernel, h)
}

/// Assembles the full Corbit grid; with a partition this is the
/// R-Corbit layout carrying per-community values plus their mean at each
/// cell.
pub fn corbit_data<T: Real>(
    real: &Realization<T>,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    max_lag: usize,
    max_stage: usize,
    part: Option<&CommunityPartition>,
    kind: CorbitKind,
) -> Result<CorbitTable<T>> {
    if max_lag == 0 {
        return Err(Error::Invalid("corbit needs max lag >= 1".to_string()));
    }
    let max_stage = max_stage.min(stages.len());
    if max_stage == 0 {
        return Err(Error::StageShortage {
            requested: 1,
            available: 0,
        });
    }
    let eval = |h: usize, r: usize, scope: Option<(&CommunityPartition, usize)>| match kind {
        CorbitKind::Nacf => nacf(real, weights, stages, h, r, scope),
        CorbitKind::Pnacf => pnacf(real, weights, stages, h, r, scope),
    };
    let mut rows = Vec::new();
    for h in 1..=max_lag {
        for r in 1..=max_stage {
            match part {
                None => {
                    rows.push(CorbitRow {
                        lag: h,
                        stage: r,
                        scope: CorbitScope::Whole,
                        value: eval(h, r, None)?,
                    });
                }
                Some(p) => {
                    let mut acc = T::zero();
                    for c in 1..=p.community_count() {
                        let value = eval(h, r, Some((p, c)))?;
                        acc += value;
                        rows.push(CorbitRow {
                            lag: h,
                            stage: r,
                            scope: CorbitScope::Community(c),
                            value,
                        });
                    }
                    rows.push(CorbitRow {
                        lag: h,
                        stage: r,
                        scope: CorbitScope::CommunityMean,
                        value: acc / T::from_usize_lossy(p.community_count()),
                    });
                }
            }
        }
    }
    Ok(CorbitTable {
        kind,
        rows,
        max_lag,
        max_stage,
        len: real.len(),
        node_count: real.node_count(),
    })
}

/// Lagged cross-correlation matrix: entry `(i, j)` correlates
/// `X_{i,t+h}` with `X_{j,t}`. The diagonal of the lag-0 matrix is one;
/// renderers mask the diagonal for display.
pub fn cross_correlation<T: Real>(real: &Realization<T>, h: usize) -> Result<DMatrix<T>> {
    let d = real.node_count();
    let len = real.len();
    if h >= len {
        return Err(Error::Invalid(format!(
            "lag {h} too large for a series of length {len}"
        )));
    }
    let tilde = demean(real.values());
    let mut sd = DVector::<T>::zeros(d);
    for i in 0..d {
        let var = tilde.row(i).iter().fold(T::zero(), |a, v| a + *v * *v);
        if var <= T::zero() {
            return Err(Error::ConstantSeries { node: i + 1 });
        }
        sd[i] = var.sqrt();
    }
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = T::zero();
            for t in 0..len - h {
                acc += tilde[(i, t + h)] * tilde[(j, t)];
            }
            out[(i, j)] = acc / (sd[i] * sd[j]);
        }
    }
    Ok(out)
}
