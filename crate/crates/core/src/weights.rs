//! Connection-weight matrices and their masked variants.
//!
//! Weights measure the relevance of node `j` when forecasting node `i`.
//! They need not be symmetric and carry a zero diagonal. Community and
//! interaction masks zero entries outside the requested node blocks and by
//! default do *not* renormalize; renormalizing variants exist for
//! experimentation. Missing-data reweighting zeroes the columns of missing
//! nodes and rescales every surviving r-stage neighbourhood to unit mass.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Network, StageAdjacency};
use crate::scalar::Real;

/// Nonnegative weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsMatrix<T: Real> {
    mat: DMatrix<T>,
}

impl<T: Real> WeightsMatrix<T> {
    /// Validates finiteness, nonnegativity and the zero diagonal.
    pub fn new(mat: DMatrix<T>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "weights matrix must be square",
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        for i in 0..mat.nrows() {
            if mat[(i, i)] != T::zero() {
                return Err(Error::Invalid(format!(
                    "weights matrix has nonzero diagonal at node {}",
                    i + 1
                )));
            }
        }
        for v in mat.iter() {
            if !v.is_finite() || *v < T::zero() {
                return Err(Error::Invalid(
                    "weights must be finite and nonnegative".to_string(),
                ));
            }
        }
        Ok(Self { mat })
    }

    pub fn zeros(node_count: usize) -> Self {
        Self {
            mat: DMatrix::zeros(node_count, node_count),
        }
    }

    pub fn node_count(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.mat[(i, j)]
    }

    /// Hadamard product with a stage indicator, `W o S_r`.
    pub fn stage_filtered(&self, stage: &StageAdjacency) -> DMatrix<T> {
        let s = stage.matrix();
        DMatrix::from_fn(self.mat.nrows(), self.mat.ncols(), |i, j| {
            if s[(i, j)] {
                self.mat[(i, j)]
            } else {
                T::zero()
            }
        })
    }
}

/// Equal-importance weights: `w_ij = 1 / |N_r(i)|` for every r-stage
/// neighbour `j` of `i`, over all supplied stages.
///
/// Rows of isolated nodes stay zero.
pub fn equal_weights<T: Real>(net: &Network, stages: &[StageAdjacency]) -> WeightsMatrix<T> {
    let d = net.node_count();
    let mut mat = DMatrix::zeros(d, d);
    for stage in stages {
        for i in 0..d {
            let ns = stage.neighbours(i);
            if ns.is_empty() {
                continue;
            }
            let w = T::one() / T::from_usize_lossy(ns.len());
            for j in ns {
                mat[(i, j)] = w;
            }
        }
    }
    WeightsMatrix { mat }
}

/// Zeroes the columns of missing nodes and renormalizes each surviving
/// `(i, r)` neighbourhood to sum to one; neighbourhoods emptied by
/// missingness become all-zero. An empty missing set returns the input
/// unchanged.
pub fn apply_missing<T: Real>(
    weights: &WeightsMatrix<T>,
    missing_nodes: &[usize],
    stages: &[StageAdjacency],
) -> WeightsMatrix<T> {
    if missing_nodes.is_empty() {
        return weights.clone();
    }
    let d = weights.node_count();
    let mut missing = vec![false; d];
    for &m in missing_nodes {
        missing[m] = true;
    }
    let mut mat = DMatrix::zeros(d, d);
    for stage in stages {
        for i in 0..d {
            let survivors: Vec<usize> = stage
                .neighbours(i)
                .into_iter()
                .filter(|&j| !missing[j])
                .collect();
            let total: T = survivors
                .iter()
                .fold(T::zero(), |acc, &j| acc + weights.get(i, j));
            if total <= T::zero() {
                continue;
            }
            for j in survivors {
                mat[(i, j)] = weights.get(i, j) / total;
            }
        }
    }
    WeightsMatrix { mat }
}

/// `[W_c]_ij = w_ij I(i in K_c and j in K_c)`, no renormalization.
pub fn community_mask<T: Real>(
    weights: &WeightsMatrix<T>,
    part: &CommunityPartition,
    community: usize,
) -> Result<WeightsMatrix<T>> {
    check_community(part, community)?;
    let d = weights.node_count();
    let mat = DMatrix::from_fn(d, d, |i, j| {
        if part.label_of(i) == community && part.label_of(j) == community {
            weights.get(i, j)
        } else {
            T::zero()
        }
    });
    Ok(WeightsMatrix { mat })
}

/// `[W_{c:c~}]_ij = w_ij I(i in K_c and j in K_c~)`, no renormalization.
pub fn interaction_mask<T: Real>(
    weights: &WeightsMatrix<T>,
    part: &CommunityPartition,
    community: usize,
    other: usize,
) -> Result<WeightsMatrix<T>> {
    if community == other {
        return Err(Error::InteractionSameCommunity { community });
    }
    check_community(part, community)?;
    check_community(part, other)?;
    let d = weights.node_count();
    let mat = DMatrix::from_fn(d, d, |i, j| {
        if part.label_of(i) == community && part.label_of(j) == other {
            weights.get(i, j)
        } else {
            T::zero()
        }
    });
    Ok(WeightsMatrix { mat })
}

/// Community mask followed by per-`(i, r)` renormalization to unit mass.
/// Experimental variant; the literal mask is the default convention.
pub fn community_mask_renormalized<T: Real>(
    weights: &WeightsMatrix<T>,
    part: &CommunityPartition,
    community: usize,
    stages: &[StageAdjacency],
) -> Result<WeightsMatrix<T>> {
    let masked = community_mask(weights, part, community)?;
    Ok(renormalize_neighbourhoods(&masked, stages))
}

/// Interaction mask followed by per-`(i, r)` renormalization to unit mass.
pub fn interaction_mask_renormalized<T: Real>(
    weights: &WeightsMatrix<T>,
    part: &CommunityPartition,
    community: usize,
    other: usize,
    stages: &[StageAdjacency],
) -> Result<WeightsMatrix<T>> {
    let masked = interaction_mask(weights, part, community, other)?;
    Ok(renormalize_neighbourhoods(&masked, stages))
}

fn renormalize_neighbourhoods<T: Real>(
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
) -> WeightsMatrix<T> {
    let d = weights.node_count();
    let mut mat = DMatrix::zeros(d, d);
    for stage in stages {
        for i in 0..d {
            let ns = stage.neighbours(i);
            let total: T = ns.iter().fold(T::zero(), |acc, &j| acc + weights.get(i, j));
            if total <= T::zero() {
                continue;
            }
            for j in ns {
                mat[(i, j)] = weights.get(i, j) / total;
            }
        }
    }
    WeightsMatrix { mat }
}

/// Rescales every entry by the total weight its row places on the same
/// stage and the same target community: each `(i, r, target-community)`
/// group then sums to one. Encodes the renormalized mask convention in a
/// single matrix, since each entry belongs to exactly one such group.
///
/// With equal input weights this yields `w_ij = 1 / |N_r(i) n K_c(j)|`.
pub fn community_normalized_weights<T: Real>(
    weights: &WeightsMatrix<T>,
    part: &CommunityPartition,
    stages: &[StageAdjacency],
) -> WeightsMatrix<T> {
    let d = weights.node_count();
    let mut mat = DMatrix::zeros(d, d);
    for stage in stages {
        for i in 0..d {
            let ns = stage.neighbours(i);
            for c in 1..=part.community_count() {
                let group: Vec<usize> = ns
                    .iter()
                    .copied()
                    .filter(|&j| part.label_of(j) == c)
                    .collect();
                let total: T = group
                    .iter()
                    .fold(T::zero(), |acc, &j| acc + weights.get(i, j));
                if total <= T::zero() {
                    continue;
                }
                for j in group {
                    mat[(i, j)] = weights.get(i, j) / total;
                }
            }
        }
    }
    WeightsMatrix { mat }
}

fn check_community(part: &CommunityPartition, community: usize) -> Result<()> {
    if community == 0 || community > part.community_count() {
        return Err(Error::CommunityOutOfRange {
            label: community,
            count: part.community_count(),
        });
    }
    Ok(())
}

/// Deterministic map from integer time to a weights matrix.
#[derive(Debug, Clone)]
pub enum WeightsSequence<T: Real> {
    /// Time-invariant weights.
    Static(WeightsMatrix<T>),
    /// Periodic weights, `W_t = cycle[t mod period]`.
    Cycle(Vec<WeightsMatrix<T>>),
}

impl<T: Real> WeightsSequence<T> {
    pub fn constant(weights: WeightsMatrix<T>) -> Self {
        Self::Static(weights)
    }

    pub fn cycle(mats: Vec<WeightsMatrix<T>>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Invalid("weights cycle cannot be empty".to_string()));
        }
        let d = mats[0].node_count();
        for m in &mats {
            if m.node_count() != d {
                return Err(Error::DimensionMismatch {
                    context: "weights cycle entries",
                    expected: d,
                    got: m.node_count(),
                });
            }
        }
        Ok(Self::Cycle(mats))
    }

    pub fn is_static(&self) -> bool {
        matches!(self, Self::Static(_))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Self::Static(w) => w.node_count(),
            Self::Cycle(ws) => ws[0].node_count(),
        }
    }

    /// Weights at time `t`; negative times wrap periodically.
    pub fn at(&self, t: i64) -> &WeightsMatrix<T> {
        match self {
            Self::Static(w) => w,
            Self::Cycle(ws) => {
                let period = ws.len() as i64;
                &ws[t.rem_euclid(period) as usize]
            }
        }
    }
}
