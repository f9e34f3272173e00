//! Monte Carlo studies: coefficient recovery curves and empirical
//! validation of the finite-sample error bounds.
//!
//! Every replication derives its seed from the master seed and its index,
//! so results do not depend on scheduling or parallelism. Draws are
//! stabilized against the actual weights: when the weights are not
//! row-normalized the coefficient-sum condition alone does not control
//! the companion dynamics, so draws shrink geometrically until the
//! per-cycle spectral radius clears a safety margin.

use nalgebra::DVector;

use crate::bounds::error_bound;
use crate::design::build_design;
use crate::error::Result;
use crate::fit::fit_ols;
use crate::graph::{CommunityPartition, StageAdjacency};
use crate::order::{ModelOrder, ParameterVector};
use crate::scalar::Real;
use crate::sim::{
    noise_stream, replication_seed, sample_stationary_params, simulate, NoiseSpec,
};
use crate::varrep::{cycle_spectral_radius, var_matrices};
use crate::weights::WeightsSequence;

/// Fixed ingredients of a study: the process everything simulates from.
#[derive(Debug, Clone)]
pub struct StudySetup<T: Real> {
    pub order: ModelOrder,
    pub part: CommunityPartition,
    pub stages: Vec<StageAdjacency>,
    pub weights: WeightsSequence<T>,
    /// Coefficient-mass budget for stationary draws.
    pub total_mass: T,
    /// Noise standard deviation.
    pub sigma: T,
}

/// Spectral-radius ceiling accepted for stabilized draws.
const STABLE_RADIUS: f64 = 0.98;

impl<T: Real> StudySetup<T> {
    /// Draws a stationary coefficient vector and shrinks it until the
    /// dynamics under the actual weights are stable.
    pub fn draw_stable_params(&self, seed: u64) -> Result<ParameterVector<T>> {
        let mut theta = sample_stationary_params(&self.order, seed, self.total_mass)?;
        let phases: Vec<i64> = match &self.weights {
            WeightsSequence::Static(_) => vec![0],
            WeightsSequence::Cycle(ws) => (0..ws.len() as i64).collect(),
        };
        let shrink = T::from_f64_lossy(0.85);
        let ceiling = T::from_f64_lossy(STABLE_RADIUS);
        for _ in 0..64 {
            let per_phase = phases
                .iter()
                .map(|&t| {
                    var_matrices(
                        &self.order,
                        &theta,
                        self.weights.at(t),
                        &self.stages,
                        &self.part,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            if cycle_spectral_radius(&per_phase) < ceiling {
                return Ok(theta);
            }
            for v in theta.values_mut() {
                *v *= shrink;
            }
        }
        Ok(theta)
    }
}

/// One recovery-study cell.
#[derive(Debug, Clone)]
pub struct RecoveryRow {
    pub len: usize,
    pub replication: usize,
    /// 1-based community, or `None` for the whole model.
    pub community: Option<usize>,
    /// `||theta_hat - theta_0||_2` over the scope, or `None` when the fit
    /// failed.
    pub delta: Option<f64>,
    pub error: Option<String>,
}

/// Recovery-study output table.
#[derive(Debug, Clone)]
pub struct RecoveryStudy {
    pub rows: Vec<RecoveryRow>,
    pub community_count: usize,
}

impl RecoveryStudy {
    /// `T,replication,community,delta` with `all` rows for the whole
    /// model and `NA` for failed fits. Sorted by keys.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("T,replication,community,delta\n");
        for row in &self.rows {
            let community = match row.community {
                Some(c) => c.to_string(),
                None => "all".to_string(),
            };
            let delta = match row.delta {
                Some(v) => v.to_string(),
                None => "NA".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.len, row.replication, community, delta
            ));
        }
        out
    }

    /// Median whole-model error per realization length, skipping failed
    /// cells.
    pub fn median_whole_model(&self) -> Vec<(usize, f64)> {
        let mut lens: Vec<usize> = self
            .rows
            .iter()
            .map(|r| r.len)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        lens.sort_unstable();
        lens.into_iter()
            .filter_map(|len| {
                let mut deltas: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.len == len && r.community.is_none())
                    .filter_map(|r| r.delta)
                    .collect();
                if deltas.is_empty() {
                    return None;
                }
                deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Some((len, deltas[deltas.len() / 2]))
            })
            .collect()
    }

    /// Median per-community error curves, keyed by community.
    pub fn median_by_community(&self) -> Vec<(usize, Vec<(usize, f64)>)> {
        (1..=self.community_count)
            .map(|c| {
                let mut lens: Vec<usize> = self
                    .rows
                    .iter()
                    .filter(|r| r.community == Some(c))
                    .map(|r| r.len)
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                lens.sort_unstable();
                let curve = lens
                    .into_iter()
                    .filter_map(|len| {
                        let mut deltas: Vec<f64> = self
                            .rows
                            .iter()
                            .filter(|r| r.len == len && r.community == Some(c))
                            .filter_map(|r| r.delta)
                            .collect();
                        if deltas.is_empty() {
                            return None;
                        }
                        deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
                        Some((len, deltas[deltas.len() / 2]))
                    })
                    .collect();
                (c, curve)
            })
            .collect()
    }
}

/// Recovery-study configuration.
#[derive(Debug, Clone)]
pub struct RecoveryConfig {
    pub t_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    pub burn_in: usize,
}

/// Runs the coefficient-recovery study: per `(T, replication)` draw a
/// stable coefficient vector, simulate, fit, and record the community and
/// whole-model estimation errors. Fit failures are recorded per row.
pub fn run_recovery_study<T: Real>(
    setup: &StudySetup<T>,
    config: &RecoveryConfig,
) -> Result<RecoveryStudy> {
    let d = setup.part.node_count();
    let community_count = setup.part.community_count();
    let mut rows = Vec::new();
    for &len in &config.t_grid {
        for rep in 0..config.replications {
            let seed = replication_seed(
                config.master_seed,
                (len as u64) << 24 | rep as u64,
            );
            let outcome = run_one_recovery(setup, len, config.burn_in, seed, d);
            match outcome {
                Ok(deltas) => {
                    for c in 1..=community_count {
                        rows.push(RecoveryRow {
                            len,
                            replication: rep,
                            community: Some(c),
                            delta: Some(deltas[c]),
                            error: None,
                        });
                    }
                    rows.push(RecoveryRow {
                        len,
                        replication: rep,
                        community: None,
                        delta: Some(deltas[0]),
                        error: None,
                    });
                }
                Err(err) => {
                    let message = err.to_string();
                    for c in 1..=community_count {
                        rows.push(RecoveryRow {
                            len,
                            replication: rep,
                            community: Some(c),
                            delta: None,
                            error: Some(message.clone()),
                        });
                    }
                    rows.push(RecoveryRow {
                        len,
                        replication: rep,
                        community: None,
                        delta: None,
                        error: Some(message),
                    });
                }
            }
        }
    }
    Ok(RecoveryStudy {
        rows,
        community_count,
    })
}

/// Returns `[whole, c1, c2, ...]` errors for one replication.
fn run_one_recovery<T: Real>(
    setup: &StudySetup<T>,
    len: usize,
    burn_in: usize,
    seed: u64,
    d: usize,
) -> Result<Vec<f64>> {
    let theta0 = setup.draw_stable_params(seed)?;
    let noise = NoiseSpec::isotropic(d, setup.sigma, seed ^ 0x9E37_79B9_7F4A_7C15)?;
    let real = simulate(
        &setup.order,
        &theta0,
        &setup.weights,
        &setup.stages,
        &setup.part,
        len,
        burn_in,
        &noise,
    )?;
    let design = build_design(&real, &setup.order, &setup.weights, &setup.part, &setup.stages)?;
    let fit = fit_ols(&design)?;
    let layout = setup.order.layout();
    let mut out = vec![0.0f64; setup.part.community_count() + 1];
    let mut whole = 0.0f64;
    for c in 1..=setup.part.community_count() {
        let mut acc = 0.0f64;
        for idx in layout.community_free_indices(c) {
            let diff =
                fit.theta.values()[idx].to_f64_lossy() - theta0.values()[idx].to_f64_lossy();
            acc += diff * diff;
        }
        whole += acc;
        out[c] = acc.sqrt();
    }
    out[0] = whole.sqrt();
    Ok(out)
}

/// One bound-check row.
#[derive(Debug, Clone)]
pub struct BoundCheckRow {
    pub delta: f64,
    pub replications: usize,
    pub violations: usize,
    pub empirical_rate: f64,
    /// Mean theoretical ceiling `min(1, 2 exp(-delta^2 tau K (T-p)))`.
    pub ceiling: f64,
}

/// Bound-check output.
#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub rows: Vec<BoundCheckRow>,
    /// Deterministic-bound violations across all replications (a theorem:
    /// should be zero).
    pub deterministic_violations: usize,
    pub replications: usize,
}

impl BoundCheck {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("delta,replications,violations,empirical_rate,ceiling\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.delta, row.replications, row.violations, row.empirical_rate, row.ceiling
            ));
        }
        out
    }
}

/// Bound-check configuration.
#[derive(Debug, Clone)]
pub struct BoundCheckConfig {
    pub delta_grid: Vec<f64>,
    pub replications: usize,
    pub len: usize,
    pub master_seed: u64,
    pub burn_in: usize,
}

/// Validates both bound expressions empirically: simulates, fits, and
/// counts violations of the probabilistic bound per `delta` along with
/// deterministic-bound violations (which indicate bugs, not bad luck).
pub fn run_bound_check<T: Real>(
    setup: &StudySetup<T>,
    config: &BoundCheckConfig,
) -> Result<BoundCheck> {
    let d = setup.part.node_count();
    let mut deterministic_violations = 0usize;
    let mut violations = vec![0usize; config.delta_grid.len()];
    let mut ceilings = vec![0.0f64; config.delta_grid.len()];
    for rep in 0..config.replications {
        let seed = replication_seed(config.master_seed, rep as u64 + 1);
        let theta0 = setup.draw_stable_params(seed)?;
        let noise = NoiseSpec::isotropic(d, setup.sigma, seed ^ 0x517C_C1B7_2722_0A95)?;
        let real = simulate(
            &setup.order,
            &theta0,
            &setup.weights,
            &setup.stages,
            &setup.part,
            config.len,
            config.burn_in,
            &noise,
        )?;
        let design =
            build_design(&real, &setup.order, &setup.weights, &setup.part, &setup.stages)?;
        let fit = fit_ols(&design)?;
        let err: f64 = fit
            .theta
            .values()
            .iter()
            .zip(theta0.values())
            .map(|(a, b)| {
                let diff = a.to_f64_lossy() - b.to_f64_lossy();
                diff * diff
            })
            .sum::<f64>()
            .sqrt();
        // realized noise aligned with retained design rows
        let shocks = noise_stream(&noise, config.burn_in + config.len);
        let mut u = DVector::<T>::zeros(design.rows());
        for (row, (node, t)) in design.row_cells().iter().enumerate() {
            u[row] = shocks[config.burn_in + t - 1][*node];
        }
        for (slot, &delta) in config.delta_grid.iter().enumerate() {
            let report = error_bound(
                &design,
                setup.sigma,
                T::from_f64_lossy(delta),
                Some(&u),
            )?;
            if slot == 0 {
                let rhs = report
                    .deterministic_rhs
                    .expect("noise supplied")
                    .to_f64_lossy();
                if err > rhs + 1e-9 {
                    deterministic_violations += 1;
                }
            }
            if err > report.probabilistic_bound.to_f64_lossy() {
                violations[slot] += 1;
            }
            let floor = report.probability_floor.to_f64_lossy();
            ceilings[slot] += (1.0 - floor).min(1.0);
        }
    }
    let rows = config
        .delta_grid
        .iter()
        .enumerate()
        .map(|(slot, &delta)| BoundCheckRow {
            delta,
            replications: config.replications,
            violations: violations[slot],
            empirical_rate: violations[slot] as f64 / config.replications.max(1) as f64,
            ceiling: ceilings[slot] / config.replications.max(1) as f64,
        })
        .collect();
    Ok(BoundCheck {
        rows,
        deterministic_violations,
        replications: config.replications,
    })
}
