//! Forward simulation of GNAR processes.
//!
//! The simulator evaluates the structural form directly: every coefficient
//! contributes its neighbourhood regression of the lagged state, plus
//! Gaussian noise. Weights may vary periodically with time; the weights
//! used for a lag-`k` term at time `t` are the weights of time `t - k`,
//! matching the VAR representation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, StageAdjacency};
use crate::order::{ModelOrder, ParamCoord, ParameterVector};
use crate::scalar::Real;
use crate::weights::{WeightsMatrix, WeightsSequence};

/// A simulated or observed d-dimensional series, stored as a `d x T`
/// matrix with optional missing flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<T: Real> {
    values: DMatrix<T>,
    missing: Option<DMatrix<bool>>,
}

impl<T: Real> Realization<T> {
    pub fn new(values: DMatrix<T>) -> Self {
        Self {
            values,
            missing: None,
        }
    }

    pub fn with_missing(values: DMatrix<T>, missing: DMatrix<bool>) -> Result<Self> {
        if missing.nrows() != values.nrows() || missing.ncols() != values.ncols() {
            return Err(Error::DimensionMismatch {
                context: "missing flags vs values",
                expected: values.nrows() * values.ncols(),
                got: missing.nrows() * missing.ncols(),
            });
        }
        Ok(Self {
            values,
            missing: Some(missing),
        })
    }

    pub fn node_count(&self) -> usize {
        self.values.nrows()
    }

    /// Number of time steps `T`.
    pub fn len(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.values.ncols() == 0
    }

    pub fn values(&self) -> &DMatrix<T> {
        &self.values
    }

    /// State vector at 0-based time index.
    pub fn state(&self, t: usize) -> DVector<T> {
        self.values.column(t).into_owned()
    }

    pub fn is_missing(&self, node: usize, t: usize) -> bool {
        self.missing.as_ref().is_some_and(|m| m[(node, t)])
    }

    pub fn has_missing(&self) -> bool {
        self.missing.as_ref().is_some_and(|m| m.iter().any(|&b| b))
    }

    /// 0-based nodes missing at time `t`.
    pub fn missing_at(&self, t: usize) -> Vec<usize> {
        match &self.missing {
            None => Vec::new(),
            Some(m) => (0..m.nrows()).filter(|&i| m[(i, t)]).collect(),
        }
    }
}

/// Gaussian iid noise specification.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec<T: Real> {
    /// Per-node standard deviations.
    sigma: Vec<T>,
    /// Seed for the deterministic noise stream.
    pub seed: u64,
}

impl<T: Real> NoiseSpec<T> {
    /// Equal standard deviation for every node.
    pub fn isotropic(node_count: usize, sigma: T, seed: u64) -> Result<Self> {
        Self::per_node(vec![sigma; node_count], seed)
    }

    pub fn per_node(sigma: Vec<T>, seed: u64) -> Result<Self> {
        for s in &sigma {
            if !s.is_finite() || *s < T::zero() {
                return Err(Error::Invalid(
                    "noise standard deviations must be finite and nonnegative".to_string(),
                ));
            }
        }
        Ok(Self { sigma, seed })
    }

    pub fn node_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    /// Largest nodal standard deviation (the bound quantity).
    pub fn sigma_max(&self) -> T {
        self.sigma.iter().copied().fold(T::zero(), |a, b| a.max(b))
    }
}

/// Derives the seed of a replication from a master seed, keeping
/// independent replications reproducible under any scheduling.
pub fn replication_seed(master: u64, replication: u64) -> u64 {
    master ^ replication
}

/// The deterministic Gaussian noise stream: `steps` vectors of length `d`.
/// Identical spec gives an identical stream.
pub fn noise_stream<T: Real>(noise: &NoiseSpec<T>, steps: usize) -> Vec<DVector<T>> {
    let d = noise.node_count();
    let mut rng = ChaCha20Rng::seed_from_u64(noise.seed);
    (0..steps)
        .map(|_| {
            DVector::from_fn(d, |i, _| {
                let z: f64 = rng.sample(StandardNormal);
                noise.sigma[i] * T::from_f64_lossy(z)
            })
        })
        .collect()
}

/// Plain r-stage neighbourhood regression `(W o S_r) x`.
pub fn neighborhood_regression<T: Real>(
    x: &DVector<T>,
    weights: &WeightsMatrix<T>,
    stage: &StageAdjacency,
) -> Result<DVector<T>> {
    let d = weights.node_count();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            context: "state vector vs weights",
            expected: d,
            got: x.len(),
        });
    }
    let s = stage.matrix();
    Ok(DVector::from_fn(d, |i, _| {
        let mut acc = T::zero();
        for j in 0..d {
            if s[(i, j)] {
                acc += weights.get(i, j) * x[j];
            }
        }
        acc
    }))
}

/// Community variant `(W_c o S_r) x^c`: only within-community edges
/// contribute and only community rows are nonzero.
pub fn community_regression<T: Real>(
    x: &DVector<T>,
    weights: &WeightsMatrix<T>,
    stage: &StageAdjacency,
    part: &CommunityPartition,
    community: usize,
) -> Result<DVector<T>> {
    let masked = crate::weights::community_mask(weights, part, community)?;
    neighborhood_regression(x, &masked, stage)
}

/// Interaction variant `xi_c o (W o S_r) x^{c~}`: rows restricted to
/// community `c`, columns to community `c~`.
pub fn interaction_regression<T: Real>(
    x: &DVector<T>,
    weights: &WeightsMatrix<T>,
    stage: &StageAdjacency,
    part: &CommunityPartition,
    community: usize,
    other: usize,
) -> Result<DVector<T>> {
    let masked = crate::weights::interaction_mask(weights, part, community, other)?;
    neighborhood_regression(x, &masked, stage)
}

/// Default burn-in: stationary processes forget initial conditions
/// geometrically, so a few dozen multiples of the lag order suffice.
pub fn default_burn_in(max_lag: usize) -> usize {
    (50 * max_lag).max(200)
}

/// Sparse per-coefficient contribution table for one weights matrix.
pub(crate) struct CoefficientTable<T> {
    /// Per structural coordinate: the (row, col, weight) entries; the
    /// diagonal carries autoregressive coordinates.
    pub(crate) terms: Vec<Vec<(usize, usize, T)>>,
}

pub(crate) fn coefficient_table<T: Real>(
    order: &ModelOrder,
    weights: &WeightsMatrix<T>,
    stages: &[StageAdjacency],
    part: &CommunityPartition,
) -> Result<CoefficientTable<T>> {
    let layout = order.layout();
    if order.max_stage() > stages.len() {
        return Err(Error::StageShortage {
            requested: order.max_stage(),
            available: stages.len(),
        });
    }
    let mut terms = Vec::with_capacity(layout.structural_len());
    for coord in layout.structural_coords() {
        let entries = match *coord {
            ParamCoord::Auto { community, .. } => part
                .members(community)
                .iter()
                .map(|&i| (i, i, T::one()))
                .collect(),
            ParamCoord::Within {
                stage, community, ..
            } => {
                let s = stages[stage - 1].matrix();
                let mut entries = Vec::new();
                for &i in part.members(community) {
                    for &j in part.members(community) {
                        if s[(i, j)] && weights.get(i, j) != T::zero() {
                            entries.push((i, j, weights.get(i, j)));
                        }
                    }
                }
                entries
            }
            ParamCoord::Between {
                stage,
                community,
                other,
                ..
            } => {
                let s = stages[stage - 1].matrix();
                let mut entries = Vec::new();
                for &i in part.members(community) {
                    for &j in part.members(other) {
                        if s[(i, j)] && weights.get(i, j) != T::zero() {
                            entries.push((i, j, weights.get(i, j)));
                        }
                    }
                }
                entries
            }
            ParamCoord::SharedWithin { .. } => unreachable!(),
        };
        terms.push(entries);
    }
    Ok(CoefficientTable { terms })
}

/// Simulates `len` steps of the process after discarding `burn_in` steps,
/// starting from a zero state. Deterministic given the noise seed.
///
/// Stationarity is not enforced here; callers are expected to check the
/// coefficient-sum or companion condition first. Explosive trajectories
/// abort with an error naming the first non-finite step.
pub fn simulate<T: Real>(
    order: &ModelOrder,
    theta: &ParameterVector<T>,
    weights: &WeightsSequence<T>,
    stages: &[StageAdjacency],
    part: &CommunityPartition,
    len: usize,
    burn_in: usize,
    noise: &NoiseSpec<T>,
) -> Result<Realization<T>> {
    let d = part.node_count();
    if noise.node_count() != d {
        return Err(Error::DimensionMismatch {
            context: "noise spec vs partition",
            expected: d,
            got: noise.node_count(),
        });
    }
    let layout = order.layout();
    let structural = theta.structural(&layout)?;
    let lags: Vec<usize> = layout
        .structural_coords()
        .iter()
        .map(|coord| match *coord {
            ParamCoord::Auto { lag, .. }
            | ParamCoord::Within { lag, .. }
            | ParamCoord::Between { lag, .. } => lag,
            ParamCoord::SharedWithin { .. } => unreachable!(),
        })
        .collect();
    let p = order.max_lag();

    // one contribution table per weights phase
    let phases: Vec<CoefficientTable<T>> = match weights {
        WeightsSequence::Static(w) => vec![coefficient_table(order, w, stages, part)?],
        WeightsSequence::Cycle(ws) => ws
            .iter()
            .map(|w| coefficient_table(order, w, stages, part))
            .collect::<Result<_>>()?,
    };
    let phase_count = phases.len() as i64;

    let total = burn_in + len;
    let shocks = noise_stream(noise, total);
    // rolling history of the last p states, oldest first
    let mut history: Vec<DVector<T>> = vec![DVector::zeros(d); p];
    let mut out = DMatrix::zeros(d, len);
    for step in 1..=total {
        let t = step as i64 - burn_in as i64;
        let mut x = shocks[step - 1].clone();
        for (idx, value) in structural.iter().enumerate() {
            if *value == T::zero() {
                continue;
            }
            let lag = lags[idx];
            // weights of the lagged time t - k select the phase table
            let phase = (t - lag as i64).rem_euclid(phase_count) as usize;
            let entries = &phases[phase].terms[idx];
            let lagged = &history[p - lag];
            for &(i, j, w) in entries {
                x[i] += *value * w * lagged[j];
            }
        }
        for i in 0..d {
            if !x[i].is_finite() {
                return Err(Error::ExplosiveSimulation { t, node: i + 1 });
            }
        }
        if step > burn_in {
            out.set_column(step - burn_in - 1, &x);
        }
        history.rotate_left(1);
        let last = history.len() - 1;
        history[last] = x;
    }
    Ok(Realization::new(out))
}

/// Draws a coefficient vector deterministically satisfying the sufficient
/// stationarity condition: per community, magnitudes follow a symmetric
/// Dirichlet split of `total_mass` over that community's slots, the first
/// autoregressive coefficient keeps a positive sign and all other
/// coefficients get independent random signs. Tied layouts draw free
/// magnitudes directly and rescale so the largest community sum equals
/// `total_mass`.
pub fn sample_stationary_params<T: Real>(
    order: &ModelOrder,
    seed: u64,
    total_mass: T,
) -> Result<ParameterVector<T>> {
    if total_mass <= T::zero() || total_mass >= T::one() {
        return Err(Error::Invalid(
            "total_mass must lie strictly between 0 and 1".to_string(),
        ));
    }
    let layout = order.layout();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut free = vec![T::zero(); layout.free_len()];
    if layout.is_tied() {
        for v in free.iter_mut() {
            let e: f64 = rng.gen::<f64>();
            *v = T::from_f64_lossy(-e.max(1e-12).ln());
        }
        for (slot, coord) in layout.free_coords().iter().enumerate() {
            let flip: bool = rng.gen();
            let keep_positive = matches!(coord, ParamCoord::Auto { lag: 1, .. });
            if flip && !keep_positive {
                free[slot] = -free[slot];
            }
        }
        let structural = layout.expand(&free)?;
        let mut sums = vec![T::zero(); order.community_count()];
        for (coord, v) in layout.structural_coords().iter().zip(&structural) {
            let c = match coord {
                ParamCoord::Auto { community, .. }
                | ParamCoord::Within { community, .. }
                | ParamCoord::Between { community, .. } => *community,
                ParamCoord::SharedWithin { .. } => unreachable!(),
            };
            sums[c - 1] += v.abs();
        }
        let max = sums.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let scale = total_mass / max;
        for v in free.iter_mut() {
            *v *= scale;
        }
    } else {
        for c in 1..=order.community_count() {
            let range = layout.community_range(c);
            let draws: Vec<f64> = range
                .clone()
                .map(|_| -(rng.gen::<f64>().max(1e-12)).ln())
                .collect();
            let total: f64 = draws.iter().sum();
            for (offset, slot) in range.enumerate() {
                let magnitude = total_mass * T::from_f64_lossy(draws[offset] / total);
                let coord = layout.structural_coords()[slot];
                let flip: bool = rng.gen();
                let keep_positive = matches!(coord, ParamCoord::Auto { lag: 1, .. });
                let signed = if flip && !keep_positive {
                    -magnitude
                } else {
                    magnitude
                };
                free[layout.free_index_of(slot)] = signed;
            }
        }
    }
    ParameterVector::new(free, &layout)
}

/// Periodic weights in the style of the seasonal simulation preset: three
/// target-community phase factors over distance-decayed base weights.
///
/// With period `P` and `a = 2 pi t / P`:
/// columns in community 1 use `(1.1 + cos a) 2^(-d_ij / 2)`, community 2
/// `(1.1 + sin a) 2^(-d_ij)`, community 3 `(1.1 + sin(a) / 2) 2^(-d_ij)`.
/// Unreachable pairs keep weight zero.
pub fn periodic_weights_preset<T: Real>(
    net: &crate::graph::Network,
    part: &CommunityPartition,
    period: usize,
) -> Result<WeightsSequence<T>> {
    if part.community_count() != 3 {
        return Err(Error::PresetCommunities {
            got: part.community_count(),
        });
    }
    if part.node_count() != net.node_count() {
        return Err(Error::DimensionMismatch {
            context: "partition vs network",
            expected: net.node_count(),
            got: part.node_count(),
        });
    }
    if period == 0 {
        return Err(Error::Invalid("period must be positive".to_string()));
    }
    let d = net.node_count();
    let dist = net.shortest_path_lengths();
    let half = T::from_f64_lossy(0.5);
    let offset = T::from_f64_lossy(1.1);
    let two = T::from_f64_lossy(2.0);
    let mats = (0..period)
        .map(|t| {
            // exact phase values for the canonical period 4
            let (cos_a, sin_a) = if period == 4 {
                match t % 4 {
                    0 => (T::one(), T::zero()),
                    1 => (T::zero(), T::one()),
                    2 => (-T::one(), T::zero()),
                    _ => (T::zero(), -T::one()),
                }
            } else {
                let a = T::two_pi() * T::from_usize_lossy(t) / T::from_usize_lossy(period);
                (a.cos(), a.sin())
            };
            let factors = [offset + cos_a, offset + sin_a, offset + sin_a * half];
            let mat = DMatrix::from_fn(d, d, |i, j| {
                if i == j || dist[(i, j)] == crate::graph::UNREACHABLE {
                    return T::zero();
                }
                let dij = T::from_usize_lossy(dist[(i, j)] as usize);
                let exponent = match part.label_of(j) {
                    1 => -dij * half,
                    _ => -dij,
                };
                factors[part.label_of(j) - 1] * two.powf(exponent)
            });
            WeightsMatrix::new(mat).expect("preset weights are valid by construction")
        })
        .collect();
    WeightsSequence::cycle(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{stage_adjacency, Network};
    use crate::order::CommunityOrder;
    use crate::varrep::check_stationary_sufficient;
    use crate::weights::equal_weights;
    use approx::assert_relative_eq;

    fn path3() -> (Network, Vec<StageAdjacency>) {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        let stages = stage_adjacency(&net, 2);
        (net, stages)
    }

    #[test]
    fn regression_of_zero_is_zero() {
        let (net, stages) = path3();
        let w = equal_weights::<f64>(&net, &stages);
        let z = neighborhood_regression(&DVector::zeros(3), &w, &stages[0]).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn path_regression_hand_values() {
        let (net, stages) = path3();
        let w = equal_weights::<f64>(&net, &stages);
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let z = neighborhood_regression(&x, &w, &stages[0]).unwrap();
        assert_relative_eq!(z[0], 2.0);
        assert_relative_eq!(z[1], 2.0);
        assert_relative_eq!(z[2], 2.0);
    }

    #[test]
    fn interaction_regression_masks_rows_and_columns() {
        let (net, stages) = path3();
        let w = equal_weights::<f64>(&net, &stages);
        let part = CommunityPartition::new(vec![1, 1, 2], 2).unwrap();
        let x = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        // rows of community 1, columns of community 2: only the 2-3 edge
        let z = interaction_regression(&x, &w, &stages[0], &part, 1, 2).unwrap();
        assert_relative_eq!(z[1], 0.5);
        assert_eq!(z[0], 0.0);
        assert_eq!(z[2], 0.0);
        // community 2 has no internal pairs at stage 2
        let z2 = community_regression(&x, &w, &stages[1], &part, 2).unwrap();
        assert!(z2.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn regression_decomposes_over_masks() {
        let net =
            Network::from_edge_list(&[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (2, 4)], 5).unwrap();
        let stages = stage_adjacency(&net, 3);
        let w = equal_weights::<f64>(&net, &stages);
        let part = CommunityPartition::new(vec![1, 2, 1, 2, 1], 2).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.2, 0.7, 2.0, -0.4]);
        for stage in &stages {
            let plain = neighborhood_regression(&x, &w, stage).unwrap();
            for c in 1..=2 {
                let mut sum = community_regression(&x, &w, stage, &part, c).unwrap();
                for other in 1..=2 {
                    if other != c {
                        sum += interaction_regression(&x, &w, stage, &part, c, other).unwrap();
                    }
                }
                for &i in part.members(c) {
                    assert_relative_eq!(plain[i], sum[i], epsilon = 1e-14);
                }
            }
        }
    }

    fn small_model() -> (
        Network,
        Vec<StageAdjacency>,
        CommunityPartition,
        ModelOrder,
        ParameterVector<f64>,
    ) {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        let stages = stage_adjacency(&net, 2);
        let part = CommunityPartition::single(3);
        let order = ModelOrder::global(1, vec![1]).unwrap();
        let layout = order.layout();
        let theta = ParameterVector::new(vec![0.4, 0.3], &layout).unwrap();
        (net, stages, part, order, theta)
    }

    #[test]
    fn simulate_is_reproducible() {
        let (net, stages, part, order, theta) = small_model();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let noise = NoiseSpec::isotropic(3, 1.0, 99).unwrap();
        let a = simulate(&order, &theta, &w, &stages, &part, 50, 100, &noise).unwrap();
        let b = simulate(&order, &theta, &w, &stages, &part, 50, 100, &noise).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_theta_reproduces_noise_moments() {
        let (net, stages, part, order, _) = small_model();
        let layout = order.layout();
        let theta = ParameterVector::zeros(&layout);
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let sigma = 0.7;
        let noise = NoiseSpec::isotropic(3, sigma, 5).unwrap();
        let len = 20_000;
        let real = simulate(&order, &theta, &w, &stages, &part, len, 0, &noise).unwrap();
        for i in 0..3 {
            let row = real.values().row(i);
            let mean: f64 = row.iter().sum::<f64>() / len as f64;
            let var: f64 = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64;
            assert!(mean.abs() < 4.0 * sigma / (len as f64).sqrt());
            assert!((var - sigma * sigma).abs() < 0.03);
        }
    }

    #[test]
    fn trajectory_scales_with_noise_scale() {
        let (net, stages, part, order, theta) = small_model();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let n1 = NoiseSpec::isotropic(3, 1.0, 7).unwrap();
        let n2 = NoiseSpec::isotropic(3, 2.0, 7).unwrap();
        let a = simulate(&order, &theta, &w, &stages, &part, 30, 0, &n1).unwrap();
        let b = simulate(&order, &theta, &w, &stages, &part, 30, 0, &n2).unwrap();
        for (x, y) in a.values().iter().zip(b.values().iter()) {
            assert_relative_eq!(*y, 2.0 * *x, epsilon = 1e-12);
        }
    }

    #[test]
    fn stationary_mean_is_near_zero() {
        let (net, stages, part, order, theta) = small_model();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let noise = NoiseSpec::isotropic(3, 1.0, 11).unwrap();
        let len = 10_000;
        let real = simulate(&order, &theta, &w, &stages, &part, len, 200, &noise).unwrap();
        for i in 0..3 {
            let row = real.values().row(i);
            let mean: f64 = row.iter().sum::<f64>() / len as f64;
            let sd: f64 =
                (row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64).sqrt();
            assert!(mean.abs() < 4.0 * sd / (len as f64).sqrt() * 3.0);
        }
    }

    #[test]
    fn explosive_theta_errors() {
        let (net, stages, part, order, _) = small_model();
        let layout = order.layout();
        let theta = ParameterVector::new(vec![3.0, 2.0], &layout).unwrap();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let noise = NoiseSpec::isotropic(3, 1.0, 1).unwrap();
        let err = simulate(&order, &theta, &w, &stages, &part, 100, 500, &noise).unwrap_err();
        assert!(matches!(err, Error::ExplosiveSimulation { .. }));
    }

    #[test]
    fn sampled_params_satisfy_sufficiency() {
        let order = ModelOrder::new(vec![
            CommunityOrder::new(3, vec![2, 2, 1], vec![3]),
            CommunityOrder::new(2, vec![3, 2], vec![3]),
            CommunityOrder::new(1, vec![3], vec![1, 2]),
        ])
        .unwrap();
        for seed in 0..200 {
            let theta = sample_stationary_params::<f64>(&order, seed, 0.9).unwrap();
            let report = check_stationary_sufficient(&order, &theta).unwrap();
            assert!(report.pass);
            for sum in report.community_sums {
                assert!(sum <= 0.9 + 1e-12);
            }
        }
    }

    #[test]
    fn sampled_params_differ_across_seeds() {
        let order = ModelOrder::global(2, vec![1, 1]).unwrap();
        let a = sample_stationary_params::<f64>(&order, 1, 0.9).unwrap();
        let b = sample_stationary_params::<f64>(&order, 2, 0.9).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn preset_matches_hand_value() {
        let net = Network::from_edge_list(&[(1, 2), (2, 3), (3, 4)], 4).unwrap();
        let part = CommunityPartition::new(vec![2, 1, 3, 1], 3).unwrap();
        let seq = periodic_weights_preset::<f64>(&net, &part, 4).unwrap();
        // t = 0: cos = 1, factor 2.1; node 4 (community 1) at distance 2
        // from node 2: 2.1 * 2^{-1} = 1.05
        assert_relative_eq!(seq.at(0).get(1, 3), 1.05, epsilon = 1e-12);
        // period 4 exactly
        for t in 0..8 {
            assert_eq!(seq.at(t), seq.at(t + 4));
        }
    }

    #[test]
    fn preset_zero_for_unreachable() {
        let net = Network::from_edge_list(&[(1, 2)], 3).unwrap();
        let part = CommunityPartition::new(vec![1, 2, 3], 3).unwrap();
        let seq = periodic_weights_preset::<f64>(&net, &part, 4).unwrap();
        for t in 0..4 {
            assert_eq!(seq.at(t).get(0, 2), 0.0);
            assert_eq!(seq.at(t).get(2, 0), 0.0);
        }
    }

    #[test]
    fn preset_requires_three_communities() {
        let net = Network::from_edge_list(&[(1, 2)], 2).unwrap();
        let part = CommunityPartition::new(vec![1, 2], 2).unwrap();
        assert!(periodic_weights_preset::<f64>(&net, &part, 4).is_err());
    }
}
