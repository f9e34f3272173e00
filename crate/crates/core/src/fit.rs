//! Conditional least-squares estimation.
//!
//! The estimator solves `y = R theta + u` by a QR decomposition of the
//! design matrix. Because `R^T R` is block diagonal by community, joint
//! and per-community fits agree; both are provided, along with
//! generalised least squares for a known noise covariance.
//!
//! Two residual-variance conventions are reported: the
//! degrees-of-freedom denominator `rows - q` (the default driving the
//! standard errors) and the plain `d (T - p)` denominator matching the
//! consistency statement for the variance estimator.

use nalgebra::{DMatrix, DVector};

use crate::design::DesignSystem;
use crate::error::{Error, Result};
use crate::order::{ParamCoord, ParameterVector};
use crate::scalar::Real;

/// Condition-number threshold above which a near-singularity warning is
/// recorded on the fit.
pub const CONDITION_WARN: f64 = 1e10;

/// Relative singular-value cutoff treated as rank deficiency.
pub const RANK_TOL: f64 = 1e-12;

/// Options for [`fit_ols_with`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions<T: Real> {
    /// Ridge term added to the normal equations for exploratory fits of
    /// rank-deficient designs. Results are marked `regularized`.
    pub ridge: Option<T>,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self { ridge: None }
    }
}

/// Estimation output: coefficients, dispersion and diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult<T: Real> {
    /// Estimated coefficients in layout order.
    pub theta: ParameterVector<T>,
    /// Residual variance with the degrees-of-freedom denominator.
    pub sigma2: T,
    /// Residual variance with the `d (T - p)` denominator.
    pub sigma2_plain: T,
    /// Coefficient covariance (scaled by `sigma2` for OLS, exact for GLS).
    pub covariance: DMatrix<T>,
    /// Standard errors, `sqrt(cov_jj)`.
    pub se: Vec<T>,
    /// `theta_j / se_j`.
    pub t_values: Vec<T>,
    /// `y - R theta`.
    pub residuals: DVector<T>,
    /// Rows used by the fit.
    pub rows_used: usize,
    /// 2-norm condition number of the design.
    pub condition: T,
    /// Diagnostics recorded during fitting.
    pub warnings: Vec<String>,
    /// Whether a ridge term was applied.
    pub regularized: bool,
    /// Coordinate labels for reporting, aligned with `theta`.
    pub coords: Vec<ParamCoord>,
}

impl<T: Real> FitResult<T> {
    /// Residual sum of squares.
    pub fn rss(&self) -> T {
        self.residuals.iter().fold(T::zero(), |a, v| a + *v * *v)
    }

    /// Standard errors under the plain-denominator variance convention.
    pub fn se_plain(&self) -> Vec<T> {
        let ratio = (self.sigma2_plain / self.sigma2).sqrt();
        self.se.iter().map(|s| *s * ratio).collect()
    }
}

struct Solved<T: Real> {
    theta: DVector<T>,
    gram_inv: DMatrix<T>,
    condition: T,
    warnings: Vec<String>,
    regularized: bool,
}

/// Least-squares solve of `m theta = y` through QR, with rank checking.
fn solve_ls<T: Real>(
    m: &DMatrix<T>,
    y: &DVector<T>,
    labels: &[ParamCoord],
    options: &FitOptions<T>,
) -> Result<Solved<T>> {
    let q = m.ncols();
    if m.nrows() < q {
        return Err(Error::Underdetermined {
            p: q,
            d: m.ncols(),
            len: m.nrows(),
        });
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let svd = r.clone().svd(false, true);
    let smax = svd.singular_values.iter().copied().fold(T::zero(), T::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(T::from_f64_lossy(f64::INFINITY), T::min);
    let mut warnings = Vec::new();
    let mut regularized = false;
    let deficient = smax == T::zero() || smin <= smax * T::from_f64_lossy(RANK_TOL);
    if deficient {
        match options.ridge {
            None => {
                let columns = dependent_columns(&svd, labels);
                return Err(Error::RankDeficient { columns });
            }
            Some(ridge) => {
                regularized = true;
                warnings.push(format!(
                    "rank-deficient design; ridge {} applied",
                    ridge.to_f64_lossy()
                ));
            }
        }
    }
    let condition = if smin > T::zero() {
        smax / smin
    } else {
        T::from_f64_lossy(f64::INFINITY)
    };
    if condition > T::from_f64_lossy(CONDITION_WARN) && !deficient {
        warnings.push(format!(
            "near-singular design: condition number {:.3e}",
            condition.to_f64_lossy()
        ));
    }

    let (theta, gram_inv) = if regularized {
        let ridge = options.ridge.expect("regularized implies ridge");
        let mut gram = m.transpose() * m;
        for i in 0..q {
            gram[(i, i)] += ridge;
        }
        let chol = gram
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        let theta = chol.solve(&(m.transpose() * y));
        (theta, chol.inverse())
    } else {
        let qty = qr.q().transpose() * y;
        let theta = r
            .solve_upper_triangular(&qty)
            .ok_or_else(|| Error::RankDeficient {
                columns: "triangular solve failed".to_string(),
            })?;
        let r_inv = r
            .solve_upper_triangular(&DMatrix::identity(q, q))
            .ok_or_else(|| Error::RankDeficient {
                columns: "triangular solve failed".to_string(),
            })?;
        let gram_inv = &r_inv * r_inv.transpose();
        (theta, gram_inv)
    };
    Ok(Solved {
        theta,
        gram_inv,
        condition,
        warnings,
        regularized,
    })
}

fn dependent_columns<T: Real>(
    svd: &nalgebra::SVD<T, nalgebra::Dyn, nalgebra::Dyn>,
    labels: &[ParamCoord],
) -> String {
    let vt = match &svd.v_t {
        Some(vt) => vt,
        None => return "unknown".to_string(),
    };
    let null_row = vt.nrows() - 1;
    let row = vt.row(null_row);
    let max = row.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let involved: Vec<String> = row
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > max * T::from_f64_lossy(0.3))
        .map(|(j, _)| {
            labels
                .get(j)
                .map(|c| c.to_string())
                .unwrap_or_else(|| format!("column {j}"))
        })
        .collect();
    involved.join(", ")
}

/// Ordinary least squares on the full design.
pub fn fit_ols<T: Real>(design: &DesignSystem<T>) -> Result<FitResult<T>> {
    fit_ols_with(design, &FitOptions::default())
}

/// Ordinary least squares with explicit options.
pub fn fit_ols_with<T: Real>(
    design: &DesignSystem<T>,
    options: &FitOptions<T>,
) -> Result<FitResult<T>> {
    let coords = design.layout().free_coords().to_vec();
    let solved = solve_ls(design.matrix(), design.response(), &coords, options)?;
    finish_fit(design, solved, coords, None)
}

fn finish_fit<T: Real>(
    design: &DesignSystem<T>,
    solved: Solved<T>,
    coords: Vec<ParamCoord>,
    fixed_cov: Option<DMatrix<T>>,
) -> Result<FitResult<T>> {
    let residuals = design.response() - design.matrix() * &solved.theta;
    let rows = design.rows();
    let q = solved.theta.len();
    let rss = residuals.iter().fold(T::zero(), |a, v| a + *v * *v);
    let dof = rows.saturating_sub(q).max(1);
    let sigma2 = rss / T::from_usize_lossy(dof);
    let plain = design.partition().node_count() * (design.len() - design.max_lag());
    let sigma2_plain = rss / T::from_usize_lossy(plain.max(1));
    let covariance = match fixed_cov {
        Some(cov) => cov,
        None => solved.gram_inv.map(|v| v * sigma2),
    };
    let se: Vec<T> = (0..q).map(|j| covariance[(j, j)].max(T::zero()).sqrt()).collect();
    let t_values = solved
        .theta
        .iter()
        .zip(&se)
        .map(|(est, s)| if *s > T::zero() { *est / *s } else { T::zero() })
        .collect();
    let theta = ParameterVector::new(solved.theta.as_slice().to_vec(), design.layout())?;
    Ok(FitResult {
        theta,
        sigma2,
        sigma2_plain,
        covariance,
        se,
        t_values,
        residuals,
        rows_used: rows,
        condition: solved.condition,
        warnings: solved.warnings,
        regularized: solved.regularized,
        coords,
    })
}

/// Per-community fit: solves the community block alone. Equals the
/// community slice of the joint fit thanks to block orthogonality.
pub fn fit_community<T: Real>(design: &DesignSystem<T>, community: usize) -> Result<CommunityFit<T>> {
    if design.layout().is_tied() {
        return Err(Error::Invalid(
            "per-community fits need an untied layout".to_string(),
        ));
    }
    if community == 0 || community > design.partition().community_count() {
        return Err(Error::CommunityOutOfRange {
            label: community,
            count: design.partition().community_count(),
        });
    }
    let cols = design.community_columns(community);
    if cols.is_empty() {
        return Err(Error::EmptyCommunity { community });
    }
    let sub = design.matrix().select_columns(cols.iter());
    let coords: Vec<ParamCoord> = cols
        .iter()
        .map(|&j| design.layout().free_coords()[j])
        .collect();
    let solved = solve_ls(&sub, design.response(), &coords, &FitOptions::default())?;
    let residuals = design.response() - &sub * &solved.theta;
    // restrict dispersion to rows of the community's own nodes
    let mut rss_c = T::zero();
    let mut rows_c = 0usize;
    for (row, (node, _)) in design.row_cells().iter().enumerate() {
        if design.partition().label_of(*node) == community {
            rss_c += residuals[row] * residuals[row];
            rows_c += 1;
        }
    }
    let q_c = cols.len();
    let sigma2 = rss_c / T::from_usize_lossy(rows_c.saturating_sub(q_c).max(1));
    let plain_rows = design.partition().size(community) * design.community_obs(community);
    let sigma2_plain = rss_c / T::from_usize_lossy(plain_rows.max(1));
    let covariance = solved.gram_inv.map(|v| v * sigma2);
    let se: Vec<T> = (0..q_c)
        .map(|j| covariance[(j, j)].max(T::zero()).sqrt())
        .collect();
    let t_values = solved
        .theta
        .iter()
        .zip(&se)
        .map(|(est, s)| if *s > T::zero() { *est / *s } else { T::zero() })
        .collect();
    Ok(CommunityFit {
        community,
        columns: cols,
        theta: solved.theta.as_slice().to_vec(),
        sigma2,
        sigma2_plain,
        se,
        t_values,
        rows_used: rows_c,
        coords,
    })
}

/// Output of a per-community fit.
#[derive(Debug, Clone)]
pub struct CommunityFit<T: Real> {
    pub community: usize,
    /// Free column indices this fit covers.
    pub columns: Vec<usize>,
    pub theta: Vec<T>,
    pub sigma2: T,
    pub sigma2_plain: T,
    pub se: Vec<T>,
    pub t_values: Vec<T>,
    pub rows_used: usize,
    pub coords: Vec<ParamCoord>,
}

/// Noise covariance specifications accepted by [`fit_gls`].
#[derive(Debug, Clone)]
pub enum CovarianceSpec<T: Real> {
    /// `sigma^2 I`.
    Isotropic(T),
    /// Per-node variances, constant over time.
    DiagonalNodes(Vec<T>),
    /// One `d x d` covariance repeated in every time block.
    PerTimeBlock(DMatrix<T>),
}

/// Generalised least squares under a known noise covariance, by whitening
/// rows and refitting. The covariance of the estimate is
/// `(R^T Sigma^-1 R)^-1` without any variance rescaling.
pub fn fit_gls<T: Real>(
    design: &DesignSystem<T>,
    sigma: &CovarianceSpec<T>,
) -> Result<FitResult<T>> {
    let rows = design.rows();
    let mut m = design.matrix().clone();
    let mut y = design.response().clone();
    match sigma {
        CovarianceSpec::Isotropic(s2) => {
            if *s2 <= T::zero() {
                return Err(Error::NotPositiveDefinite);
            }
            let w = T::one() / s2.sqrt();
            m *= w;
            y *= w;
        }
        CovarianceSpec::DiagonalNodes(vars) => {
            if vars.len() != design.partition().node_count() {
                return Err(Error::DimensionMismatch {
                    context: "node variances",
                    expected: design.partition().node_count(),
                    got: vars.len(),
                });
            }
            for v in vars {
                if *v <= T::zero() {
                    return Err(Error::NotPositiveDefinite);
                }
            }
            for (row, (node, _)) in design.row_cells().iter().enumerate() {
                let w = T::one() / vars[*node].sqrt();
                for c in 0..m.ncols() {
                    m[(row, c)] *= w;
                }
                y[row] *= w;
            }
        }
        CovarianceSpec::PerTimeBlock(block) => {
            let d = design.partition().node_count();
            if block.nrows() != d || block.ncols() != d {
                return Err(Error::DimensionMismatch {
                    context: "per-time covariance block",
                    expected: d,
                    got: block.nrows(),
                });
            }
            // whiten each time block; missing rows shrink the block
            let mut row = 0usize;
            while row < rows {
                let t = design.row_cells()[row].1;
                let mut nodes = Vec::new();
                let mut end = row;
                while end < rows && design.row_cells()[end].1 == t {
                    nodes.push(design.row_cells()[end].0);
                    end += 1;
                }
                let sub = DMatrix::from_fn(nodes.len(), nodes.len(), |a, b| {
                    block[(nodes[a], nodes[b])]
                });
                let chol = sub.cholesky().ok_or(Error::NotPositiveDefinite)?;
                let l = chol.l();
                let block_m = m.rows(row, nodes.len()).into_owned();
                let block_y = y.rows(row, nodes.len()).into_owned();
                let wm = l
                    .solve_lower_triangular(&block_m)
                    .ok_or(Error::NotPositiveDefinite)?;
                let wy = l
                    .solve_lower_triangular(&block_y)
                    .ok_or(Error::NotPositiveDefinite)?;
                m.rows_mut(row, nodes.len()).copy_from(&wm);
                y.rows_mut(row, nodes.len()).copy_from(&wy);
                row = end;
            }
        }
    }
    let coords = design.layout().free_coords().to_vec();
    let solved = solve_ls(&m, &y, &coords, &FitOptions::default())?;
    let cov = solved.gram_inv.clone();
    let mut fit = finish_fit(design, solved, coords, Some(cov))?;
    // residuals on the original scale
    let theta = DVector::from_vec(fit.theta.values().to_vec());
    fit.residuals = design.response() - design.matrix() * theta;
    Ok(fit)
}

/// Least-squares residuals of `y` on the columns of `m`, with all-zero
/// columns dropped first (they carry no information and would otherwise
/// force a spurious rank-deficiency error).
pub fn residuals_after_projection<T: Real>(
    m: &DMatrix<T>,
    y: &DVector<T>,
) -> Result<DVector<T>> {
    let nonzero: Vec<usize> = (0..m.ncols())
        .filter(|&j| m.column(j).iter().any(|v| *v != T::zero()))
        .collect();
    if nonzero.is_empty() {
        return Ok(y.clone());
    }
    let sub = m.select_columns(nonzero.iter());
    let labels: Vec<ParamCoord> = Vec::new();
    let solved = solve_ls(&sub, y, &labels, &FitOptions::default())?;
    Ok(y - sub * solved.theta)
}

/// The sample instantiation of the asymptotic coefficient covariance:
/// `sigma2 (R^T R)^-1`, the curvature-scaled dispersion the t-values use.
pub fn asymptotic_covariance<T: Real>(
    design: &DesignSystem<T>,
    sigma2: T,
) -> Result<DMatrix<T>> {
    let gram = design.gram();
    let chol = gram.cholesky().ok_or(Error::RankDeficient {
        columns: "gram matrix is singular".to_string(),
    })?;
    Ok(chol.inverse().map(|v| v * sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::build_design;
    use crate::graph::{stage_adjacency, CommunityPartition, Network};
    use crate::order::{CommunityOrder, ModelOrder};
    use crate::sim::{sample_stationary_params, simulate, NoiseSpec, Realization};
    use crate::weights::{equal_weights, WeightsSequence};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn two_community_design(
        seed: u64,
        len: usize,
    ) -> (DesignSystem<f64>, crate::order::ParameterVector<f64>) {
        let net = Network::from_edge_list(&[(1, 2), (2, 3), (3, 4), (4, 1), (2, 5)], 5).unwrap();
        let stages = stage_adjacency(&net, 3);
        let part = CommunityPartition::new(vec![1, 1, 2, 2, 1], 2).unwrap();
        let order = ModelOrder::new(vec![
            CommunityOrder::new(1, vec![1], vec![2]),
            CommunityOrder::new(2, vec![1, 1], vec![]),
        ])
        .unwrap();
        let theta = sample_stationary_params(&order, seed, 0.7).unwrap();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let noise = NoiseSpec::isotropic(5, 1.0, seed ^ 0xABCD).unwrap();
        let real = simulate(&order, &theta, &w, &stages, &part, len, 200, &noise).unwrap();
        let design = build_design(&real, &order, &w, &part, &stages).unwrap();
        (design, theta)
    }

    #[test]
    fn noiseless_interpolation_recovers_theta() {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        let stages = stage_adjacency(&net, 2);
        let part = CommunityPartition::single(3);
        let order = ModelOrder::global(1, vec![1]).unwrap();
        let layout = order.layout();
        let theta0 =
            crate::order::ParameterVector::new(vec![0.4, 0.25], &layout).unwrap();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        // noiseless target: substitute y = R theta0 under a noisy design
        let noisy = NoiseSpec::isotropic(3, 1.0, 3).unwrap();
        let real = simulate(&order, &theta0, &w, &stages, &part, 50, 50, &noisy).unwrap();
        let design = build_design(&real, &order, &w, &part, &stages).unwrap();
        let clean_y = design.matrix() * DVector::from_vec(theta0.values().to_vec());
        let clean = design.with_response(clean_y).unwrap();
        let fit = fit_ols(&clean).unwrap();
        for (a, b) in fit.theta.values().iter().zip(theta0.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn ols_matches_normal_equations_oracle() {
        for seed in 0..20 {
            let (design, _) = two_community_design(seed, 80);
            let fit = fit_ols(&design).unwrap();
            // independent dense normal-equations solve
            let gram = design.gram();
            let rhs = design.matrix().transpose() * design.response();
            let oracle = gram
                .clone()
                .cholesky()
                .unwrap()
                .solve(&rhs);
            let scale = oracle.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
            for (a, b) in fit.theta.values().iter().zip(oracle.iter()) {
                assert!((a - b).abs() <= 1e-8 * scale);
            }
        }
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        let (design, _) = two_community_design(7, 120);
        let fit = fit_ols(&design).unwrap();
        let proj = design.matrix().transpose() * &fit.residuals;
        let scale = design
            .matrix()
            .iter()
            .fold(0.0f64, |a, v| a.max(v.abs()));
        for v in proj.iter() {
            assert!(v.abs() < 1e-8 * scale * design.rows() as f64);
        }
    }

    #[test]
    fn community_fit_equals_joint_slice() {
        for seed in [1u64, 2, 3, 4, 5] {
            let (design, _) = two_community_design(seed, 60);
            let joint = fit_ols(&design).unwrap();
            for c in 1..=2 {
                let local = fit_community(&design, c).unwrap();
                for (offset, &col) in local.columns.iter().enumerate() {
                    assert_relative_eq!(
                        local.theta[offset],
                        joint.theta.values()[col],
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn single_community_fit_matches_fit_ols() {
        let net = Network::from_edge_list(&[(1, 2), (2, 3)], 3).unwrap();
        let stages = stage_adjacency(&net, 2);
        let part = CommunityPartition::single(3);
        let order = ModelOrder::global(2, vec![1, 1]).unwrap();
        let theta = sample_stationary_params(&order, 11, 0.8).unwrap();
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let noise = NoiseSpec::isotropic(3, 1.0, 11).unwrap();
        let real = simulate(&order, &theta, &w, &stages, &part, 100, 200, &noise).unwrap();
        let design = build_design(&real, &order, &w, &part, &stages).unwrap();
        let joint = fit_ols(&design).unwrap();
        let local = fit_community(&design, 1).unwrap();
        for (a, b) in joint.theta.values().iter().zip(&local.theta) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        assert_relative_eq!(joint.sigma2, local.sigma2, epsilon = 1e-12);
    }

    #[test]
    fn gls_isotropic_equals_ols() {
        let (design, _) = two_community_design(9, 70);
        let ols = fit_ols(&design).unwrap();
        let gls = fit_gls(&design, &CovarianceSpec::Isotropic(2.5)).unwrap();
        for (a, b) in ols.theta.values().iter().zip(gls.theta.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn gls_diagonal_matches_weighted_ls_oracle() {
        let (design, _) = two_community_design(13, 60);
        let vars = vec![0.5, 1.0, 2.0, 4.0, 0.25];
        let gls = fit_gls(&design, &CovarianceSpec::DiagonalNodes(vars.clone())).unwrap();
        // oracle: scale rows by 1/sqrt(var) and solve normal equations
        let mut m = design.matrix().clone();
        let mut y = design.response().clone();
        for (row, (node, _)) in design.row_cells().iter().enumerate() {
            let w = 1.0 / vars[*node].sqrt();
            for c in 0..m.ncols() {
                m[(row, c)] *= w;
            }
            y[row] *= w;
        }
        let oracle = (m.transpose() * &m)
            .cholesky()
            .unwrap()
            .solve(&(m.transpose() * &y));
        for (a, b) in gls.theta.values().iter().zip(oracle.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn gls_rejects_non_pd() {
        let (design, _) = two_community_design(15, 50);
        let bad = DMatrix::from_fn(5, 5, |i, j| if i == j { -1.0 } else { 0.0 });
        assert!(matches!(
            fit_gls(&design, &CovarianceSpec::PerTimeBlock(bad)),
            Err(Error::NotPositiveDefinite)
        ));
        assert!(fit_gls(&design, &CovarianceSpec::Isotropic(0.0)).is_err());
    }

    #[test]
    fn gls_per_time_block_isotropic_equals_ols() {
        let (design, _) = two_community_design(21, 60);
        let ols = fit_ols(&design).unwrap();
        let block = DMatrix::identity(5, 5) * 3.0;
        let gls = fit_gls(&design, &CovarianceSpec::PerTimeBlock(block)).unwrap();
        for (a, b) in ols.theta.values().iter().zip(gls.theta.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_deficiency_names_columns() {
        // duplicated node series make alpha and beta columns collinear
        let net = Network::from_edge_list(&[(1, 2)], 2).unwrap();
        let stages = stage_adjacency(&net, 1);
        let part = CommunityPartition::single(2);
        let order = ModelOrder::global(1, vec![1]).unwrap();
        let mut values = DMatrix::zeros(2, 30);
        for t in 0..30 {
            let v = (t as f64 * 0.7).sin();
            values[(0, t)] = v;
            values[(1, t)] = v;
        }
        let real = Realization::new(values);
        let w = WeightsSequence::constant(equal_weights(&net, &stages));
        let design = build_design(&real, &order, &w, &part, &stages).unwrap();
        match fit_ols(&design) {
            Err(Error::RankDeficient { columns }) => {
                assert!(columns.contains("alpha") && columns.contains("beta"));
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        // ridge fallback marks the fit as regularized
        let fit = fit_ols_with(
            &design,
            &FitOptions {
                ridge: Some(1e-8),
            },
        )
        .unwrap();
        assert!(fit.regularized);
    }

    #[test]
    fn asymptotic_covariance_matches_ar1_rate() {
        // AR(1) with phi = 0.5: var(phi_hat) ~ (1 - phi^2) / T
        let net = Network::from_edge_list(&[], 1).unwrap();
        let stages = stage_adjacency(&net, 1);
        let part = CommunityPartition::single(1);
        let order = ModelOrder::global(1, vec![0]).unwrap();
        let layout = order.layout();
        let theta = crate::order::ParameterVector::new(vec![0.5], &layout).unwrap();
        let w = WeightsSequence::constant(crate::weights::WeightsMatrix::zeros(1));
        let noise = NoiseSpec::isotropic(1, 1.0, 31).unwrap();
        let len = 20_000;
        let real = simulate(&order, &theta, &w, &stages, &part, len, 500, &noise).unwrap();
        let design = build_design(&real, &order, &w, &part, &stages).unwrap();
        let fit = fit_ols(&design).unwrap();
        let cov = asymptotic_covariance(&design, fit.sigma2).unwrap();
        let expect = (1.0 - 0.25) / len as f64;
        assert_relative_eq!(cov[(0, 0)], expect, max_relative = 0.15);
        assert!(cov[(0, 0)] > 0.0);
    }
}
