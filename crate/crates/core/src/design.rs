//! The conditional linear model: stacked design matrix and response.
//!
//! Conditioning a realization of length `T` on its first `p` values turns
//! the model into `y = R theta + u`. Rows are (time, node) cells for
//! `t = p+1..T` in time-major order; columns follow the coefficient
//! layout. Columns belonging to community `c` are zero on rows of nodes
//! outside `K_c`, which makes `R^T R` block diagonal by community.
//!
//! Rows with a missing response (or a missing own lagged value) are
//! dropped; missing predictor nodes instead reweight the surviving
//! neighbourhoods of the lagged weights matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, StageAdjacency};
use crate::order::{ModelOrder, ParamLayout};
use crate::scalar::Real;
use crate::sim::{coefficient_table, Realization};
use crate::weights::{apply_missing, WeightsSequence};

/// Stacked design matrix, response and bookkeeping for one realization.
#[derive(Debug, Clone)]
pub struct DesignSystem<T: Real> {
    matrix: DMatrix<T>,
    response: DVector<T>,
    /// (0-based node, 1-based time) per retained row.
    row_cells: Vec<(usize, usize)>,
    layout: ParamLayout,
    order: ModelOrder,
    part: CommunityPartition,
    len: usize,
    dropped_rows: usize,
}

impl<T: Real> DesignSystem<T> {
    /// `R`, with one column per free coefficient.
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    /// `y`, stacked responses.
    pub fn response(&self) -> &DVector<T> {
        &self.response
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn columns(&self) -> usize {
        self.matrix.ncols()
    }

    /// (node, time) cell of each retained row.
    pub fn row_cells(&self) -> &[(usize, usize)] {
        &self.row_cells
    }

    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn layout(&self) -> &ParamLayout {
        &self.layout
    }

    pub fn order(&self) -> &ModelOrder {
        &self.order
    }

    pub fn partition(&self) -> &CommunityPartition {
        &self.part
    }

    /// Realization length `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0
    }

    /// Largest active lag `p`.
    pub fn max_lag(&self) -> usize {
        self.order.max_lag()
    }

    /// Per-community observation count `n_c = T - p_c`.
    pub fn community_obs(&self, community: usize) -> usize {
        self.len - self.order.community(community).max_lag
    }

    /// The row count floor `n = min_c |K_c| (T - p_c)`.
    pub fn obs_floor(&self) -> usize {
        (1..=self.part.community_count())
            .map(|c| self.part.size(c) * self.community_obs(c))
            .min()
            .unwrap_or(0)
    }

    /// Free column indices owned by community `c`.
    pub fn community_columns(&self, community: usize) -> Vec<usize> {
        self.layout.community_free_indices(community)
    }

    /// Gram matrix `R^T R`.
    pub fn gram(&self) -> DMatrix<T> {
        self.matrix.transpose() * &self.matrix
    }

    /// Gram block `R_c^T R_c` of community `c`.
    pub fn community_gram(&self, community: usize) -> DMatrix<T> {
        let cols = self.community_columns(community);
        let sub = self.matrix.select_columns(cols.iter());
        sub.transpose() * sub
    }

    /// `R_c^T y` restricted to community columns.
    pub fn community_rhs(&self, community: usize) -> DVector<T> {
        let cols = self.community_columns(community);
        let sub = self.matrix.select_columns(cols.iter());
        sub.transpose() * &self.response
    }

    /// Same predictors with a substituted response, e.g. a synthetic
    /// `y = R theta` target.
    pub fn with_response(mut self, response: DVector<T>) -> Result<Self> {
        if response.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                context: "replacement response",
                expected: self.matrix.nrows(),
                got: response.len(),
            });
        }
        self.response = response;
        Ok(self)
    }
}

/// Builds the design system for a realization.
///
/// Rows run over `t = p+1..=T` (1-based) in time-major order. The lag-`k`
/// predictors of time `t` use the weights of time `t - k`, reweighted when
/// nodes are missing at that time.
pub fn build_design<T: Real>(
    real: &Realization<T>,
    order: &ModelOrder,
    weights: &WeightsSequence<T>,
    part: &CommunityPartition,
    stages: &[StageAdjacency],
) -> Result<DesignSystem<T>> {
    let d = part.node_count();
    let len = real.len();
    let p = order.max_lag();
    if real.node_count() != d {
        return Err(Error::DimensionMismatch {
            context: "realization vs partition",
            expected: d,
            got: real.node_count(),
        });
    }
    if len <= p {
        return Err(Error::RealizationTooShort { len, max_lag: p });
    }
    if order.max_stage() > stages.len() {
        return Err(Error::StageShortage {
            requested: order.max_stage(),
            available: stages.len(),
        });
    }
    if order.community_count() != 0 {
        for c in 1..=order.community_count() {
            if c > part.community_count() || part.size(c) == 0 {
                return Err(Error::EmptyCommunity { community: c });
            }
        }
    }
    if order.community_count() != part.community_count() {
        return Err(Error::DimensionMismatch {
            context: "model order vs partition communities",
            expected: part.community_count(),
            got: order.community_count(),
        });
    }

    let layout = order.layout();
    let q = layout.free_len();
    let lags: Vec<usize> = layout
        .structural_coords()
        .iter()
        .map(|coord| match *coord {
            crate::order::ParamCoord::Auto { lag, .. }
            | crate::order::ParamCoord::Within { lag, .. }
            | crate::order::ParamCoord::Between { lag, .. } => lag,
            crate::order::ParamCoord::SharedWithin { .. } => unreachable!(),
        })
        .collect();

    // contribution tables per weights phase; missing data gets per-time
    // adjusted tables instead
    let clean = !real.has_missing();
    let phases: Vec<crate::sim::CoefficientTable<T>> = match weights {
        WeightsSequence::Static(w) => vec![coefficient_table(order, w, stages, part)?],
        WeightsSequence::Cycle(ws) => ws
            .iter()
            .map(|w| coefficient_table(order, w, stages, part))
            .collect::<Result<_>>()?,
    };
    let phase_count = phases.len() as i64;

    // which (node, t) rows survive
    let mut row_cells = Vec::with_capacity((len - p) * d);
    let mut dropped = 0usize;
    for t in (p + 1)..=len {
        for i in 0..d {
            let mut keep = !real.is_missing(i, t - 1);
            // a missing own lag cannot be reweighted away
            let p_c = order.community(part.label_of(i)).max_lag;
            for k in 1..=p_c {
                if real.is_missing(i, t - 1 - k) {
                    keep = false;
                }
            }
            if keep {
                row_cells.push((i, t));
            } else {
                dropped += 1;
            }
        }
    }

    let n = row_cells.len();
    let mut matrix = DMatrix::<T>::zeros(n, q);
    let mut response = DVector::<T>::zeros(n);

    // per (t, structural coord) contribution vectors, assembled row block
    // by row block
    let mut row_at = 0usize;
    let mut cell_idx = 0usize;
    for t in (p + 1)..=len {
        // lagged states with missing entries zeroed
        let mut lagged_states: Vec<DVector<T>> = Vec::with_capacity(p);
        let mut adjusted: Vec<Option<crate::sim::CoefficientTable<T>>> = Vec::with_capacity(p);
        for k in 1..=p {
            let mut x = real.state(t - 1 - k);
            let missing = real.missing_at(t - 1 - k);
            for &m in &missing {
                x[m] = T::zero();
            }
            lagged_states.push(x);
            if clean || missing.is_empty() {
                adjusted.push(None);
            } else {
                let w = apply_missing(weights.at(t as i64 - k as i64), &missing, stages);
                adjusted.push(Some(coefficient_table(order, &w, stages, part)?));
            }
        }
        let block_rows: Vec<(usize, usize)> = {
            let mut v = Vec::new();
            while cell_idx < row_cells.len() && row_cells[cell_idx].1 == t {
                v.push((row_at + v.len(), row_cells[cell_idx].0));
                cell_idx += 1;
            }
            v
        };
        for (idx, &lag) in lags.iter().enumerate() {
            let phase = (t as i64 - lag as i64).rem_euclid(phase_count) as usize;
            let table = match &adjusted[lag - 1] {
                Some(adj) => adj,
                None => &phases[phase],
            };
            let entries = &table.terms[idx];
            if entries.is_empty() {
                continue;
            }
            let x = &lagged_states[lag - 1];
            let mut z = DVector::<T>::zeros(d);
            for &(i, j, w) in entries {
                z[i] += w * x[j];
            }
            let col = layout.free_index_of(idx);
            for &(row, node) in &block_rows {
                matrix[(row, col)] += z[node];
            }
        }
        for &(row, node) in &block_rows {
            response[row] = real.values()[(node, t - 1)];
        }
        row_at += block_rows.len();
    }

    Ok(DesignSystem {
        matrix,
        response,
        row_cells,
        layout,
        order: order.clone(),
        part: part.clone(),
        len,
        dropped_rows: dropped,
    })
}
