//! End-to-end analysis of the bundled presidential-election panel.
//!
//! The pipeline ingests the state-level Republican vote-share panel, the
//! land-border network and the per-year state winners; classifies states
//! into Red/Blue/Swing communities by the inclusive 75% rule;
//! standardizes over the first eleven elections; fits the headline
//! community model and the interaction model; runs the one-step forecast
//! comparison against the naive and specialization baselines; and emits
//! network-autocorrelation tables. Everything is deterministic given the
//! input files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::acf::{corbit_data, pnacf, CorbitKind, CorbitTable};
use crate::design::build_design;
use crate::error::{Error, Result};
use crate::fit::{fit_ols, FitResult};
use crate::forecast::{
    forecast_one_step, naive_forecast, rmspe, standardize, unstandardize_forecast,
};
use crate::graph::{stage_adjacency, CommunityPartition, StageAdjacency};
use crate::order::{CommunityOrder, ModelOrder};
use crate::panel::{
    classify_parties, read_edges_csv, read_panel_csv, Panel, PanelSchema, BLUE, RED, SWING,
};
use crate::sim::Realization;
use crate::svg::{render_corbit_svg, CorbitStyle};
use crate::weights::{community_normalized_weights, equal_weights, WeightsMatrix, WeightsSequence};

/// Community display names in label order.
pub const COMMUNITY_NAMES: [&str; 3] = ["Red", "Blue", "Swing"];

/// Pipeline configuration.
#[derive(Debug, Clone)]
pub struct ElectionConfig {
    pub panel_csv: PathBuf,
    pub winners_csv: PathBuf,
    pub edges_csv: PathBuf,
    /// Standardization window; the last column is held out for scoring.
    pub window: usize,
    /// Inclusive classification threshold.
    pub threshold: f64,
    /// Use the renormalized-mask weight convention instead of the literal
    /// masks.
    pub renormalize_masks: bool,
    pub max_corbit_lag: usize,
    pub max_corbit_stage: usize,
    /// Optional externally computed comparison rows
    /// (`name,rmspe_raw,rmspe_std,params`).
    pub external_scores_csv: Option<PathBuf>,
}

impl ElectionConfig {
    /// Standard configuration over a fixture directory.
    pub fn from_fixture_dir(dir: &Path) -> Self {
        Self {
            panel_csv: dir.join("usa_election_panel.csv"),
            winners_csv: dir.join("usa_election_winners.csv"),
            edges_csv: dir.join("usa_edges.csv"),
            window: 11,
            threshold: 0.75,
            // the headline coefficients of the bundled panel reproduce the
            // published Blue-community values only under the renormalized
            // convention, so the pipeline defaults to it
            renormalize_masks: true,
            max_corbit_lag: 6,
            max_corbit_stage: 6,
            external_scores_csv: None,
        }
    }
}

/// Directory holding the bundled fixtures, overridable through
/// `GNAR_FIXTURE_DIR`.
pub fn default_fixture_dir() -> PathBuf {
    match std::env::var_os("GNAR_FIXTURE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

/// One reported coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientEntry {
    pub label: String,
    pub estimate: f64,
    pub se: f64,
    pub t_value: f64,
}

/// One model's scores in the comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct ModelScore {
    pub name: String,
    /// RMSPE of the forecast from the raw-scale fit.
    pub rmspe_raw: Option<f64>,
    /// RMSPE of the back-transformed forecast from the standardized fit.
    pub rmspe_std: Option<f64>,
    /// Free-coefficient count.
    pub params: Option<usize>,
    pub note: Option<String>,
}

/// Full pipeline output.
#[derive(Debug, Clone)]
pub struct ElectionReport {
    pub node_ids: Vec<String>,
    pub partition: CommunityPartition,
    pub community_sizes: [usize; 3],
    pub realized_max_stage: usize,
    /// Mean raw vote share over the Swing community (all years).
    pub swing_mean: f64,
    /// Headline fit: community model with two lags and one stage at the
    /// first lag, on the standardized full sample.
    pub headline: Vec<CoefficientEntry>,
    pub headline_sigma2: f64,
    pub headline_sigma2_plain: f64,
    /// Whether the headline coefficients satisfy the sufficient
    /// stationarity condition.
    pub headline_stationary: bool,
    /// Lag-two interaction coefficients of the interaction model.
    pub interaction_lag2: Vec<CoefficientEntry>,
    /// All coefficients of the interaction model.
    pub interaction_all: Vec<CoefficientEntry>,
    pub comparison: Vec<ModelScore>,
    pub naive_rmspe: f64,
    pub corbit_nacf: CorbitTable<f64>,
    pub corbit_pnacf: CorbitTable<f64>,
    /// Lag-one partial values per stage after one-lag differencing,
    /// with the significance band.
    pub differenced_pnacf_lag1: Vec<(usize, f64)>,
    pub differenced_band: f64,
    /// Fit on the standardized one-lag differenced series.
    pub differenced_fit: Vec<CoefficientEntry>,
}

fn entries_from_fit(fit: &FitResult<f64>) -> Vec<CoefficientEntry> {
    fit.coords
        .iter()
        .zip(fit.theta.values())
        .zip(fit.se.iter().zip(&fit.t_values))
        .map(|((coord, est), (se, t))| CoefficientEntry {
            label: coord.to_string(),
            estimate: *est,
            se: *se,
            t_value: *t,
        })
        .collect()
}

/// The headline model order: per community two lags, one stage at the
/// first lag and none at the second.
fn headline_order() -> ModelOrder {
    ModelOrder::new(vec![
        CommunityOrder::new(2, vec![1, 0], vec![]),
        CommunityOrder::new(2, vec![1, 0], vec![]),
        CommunityOrder::new(2, vec![1, 0], vec![]),
    ])
    .expect("static order is valid")
}

/// The interaction model order: two lags, one stage per lag, all
/// pairwise interactions.
fn interaction_order() -> ModelOrder {
    ModelOrder::new(vec![
        CommunityOrder::new(2, vec![1, 1], vec![2, 3]),
        CommunityOrder::new(2, vec![1, 1], vec![1, 3]),
        CommunityOrder::new(2, vec![1, 1], vec![1, 2]),
    ])
    .expect("static order is valid")
}

struct FittedForecast {
    rmspe_raw: Option<f64>,
    rmspe_std: Option<f64>,
    params: usize,
    note: Option<String>,
}

/// Fits one model on the training window in both scales and scores the
/// held-out year.
#[allow(clippy::too_many_arguments)]
fn score_model(
    order: &ModelOrder,
    raw: &Realization<f64>,
    std_real: &Realization<f64>,
    std_params: &crate::forecast::StandardizationParams<f64>,
    actual: &nalgebra::DVector<f64>,
    weights: &WeightsSequence<f64>,
    part: &CommunityPartition,
    stages: &[StageAdjacency],
    window: usize,
) -> FittedForecast {
    let params = order.layout().free_len();
    let truncate = |real: &Realization<f64>| {
        Realization::new(real.values().columns(0, window).into_owned())
    };
    let mut note = None;
    let raw_train = truncate(raw);
    let rmspe_raw = (|| -> Result<f64> {
        let design = build_design(&raw_train, order, weights, part, stages)?;
        let fit = fit_ols(&design)?;
        let forecast = forecast_one_step(order, &fit.theta, &raw_train, weights, part, stages)?;
        rmspe(&forecast, actual)
    })()
    .map_err(|e| note = Some(e.to_string()))
    .ok();
    let std_train = truncate(std_real);
    let rmspe_std = (|| -> Result<f64> {
        let design = build_design(&std_train, order, weights, part, stages)?;
        let fit = fit_ols(&design)?;
        let forecast = forecast_one_step(order, &fit.theta, &std_train, weights, part, stages)?;
        let back = unstandardize_forecast(&forecast, std_params)?;
        rmspe(&back, actual)
    })()
    .map_err(|e| {
        if note.is_none() {
            note = Some(e.to_string());
        }
    })
    .ok();
    FittedForecast {
        rmspe_raw,
        rmspe_std,
        params,
        note,
    }
}

/// Runs the full pipeline.
pub fn election_pipeline(config: &ElectionConfig) -> Result<ElectionReport> {
    let panel: Panel<f64> = read_panel_csv(&config.panel_csv, PanelSchema::WideNodeRows)?;
    let node_ids = panel.node_ids().to_vec();
    let d = panel.node_count();
    let len = panel.len();
    if config.window + 1 != len {
        return Err(Error::BadWindow {
            t0: config.window,
            len,
        });
    }
    let winners = read_winner_records(&config.winners_csv, &node_ids, panel.time_labels())?;
    let net = read_edges_csv(&config.edges_csv, Some(&node_ids))?;
    let realized_max_stage = net.max_stage();
    let stages = stage_adjacency(&net, realized_max_stage);
    let part = classify_parties(&winners, config.threshold)?;
    let community_sizes = [part.size(RED), part.size(BLUE), part.size(SWING)];

    let equal: WeightsMatrix<f64> = equal_weights(&net, &stages);
    let weights_matrix = if config.renormalize_masks {
        community_normalized_weights(&equal, &part, &stages)
    } else {
        equal
    };
    let weights = WeightsSequence::constant(weights_matrix.clone());

    let raw = panel.to_realization()?;
    let (std_values, std_params) = standardize(panel.values(), config.window)?;
    let std_real = Realization::new(std_values);

    let swing_mean = {
        let members = part.members(SWING);
        let mut total = 0.0;
        for &i in members {
            for t in 0..len {
                total += panel.values()[(i, t)];
            }
        }
        total / (members.len() * len) as f64
    };

    // headline fit on the standardized full sample
    let headline_model = headline_order();
    let design = build_design(&std_real, &headline_model, &weights, &part, &stages)?;
    let headline_fit = fit_ols(&design)?;
    let headline = entries_from_fit(&headline_fit);
    let headline_stationary =
        crate::varrep::check_stationary_sufficient(&headline_model, &headline_fit.theta)?.pass;

    // interaction fit
    let interaction_model = interaction_order();
    let design = build_design(&std_real, &interaction_model, &weights, &part, &stages)?;
    let interaction_fit = fit_ols(&design)?;
    let interaction_all = entries_from_fit(&interaction_fit);
    let interaction_lag2 = interaction_all
        .iter()
        .filter(|e| e.label.starts_with("gamma_{2,"))
        .cloned()
        .collect();

    // forecast comparison on the held-out final year
    let actual = raw.state(len - 1);
    let naive = naive_forecast(&Realization::new(
        raw.values().columns(0, config.window).into_owned(),
    ))?;
    let naive_rmspe = rmspe(&naive, &actual)?;
    let mut comparison = vec![ModelScore {
        name: "naive".to_string(),
        rmspe_raw: Some(naive_rmspe),
        rmspe_std: Some(naive_rmspe),
        params: Some(0),
        note: None,
    }];
    let single = CommunityPartition::single(d);
    let singletons = CommunityPartition::singletons(d);
    let menu: Vec<(&str, ModelOrder, &CommunityPartition)> = vec![
        ("gnar-global", ModelOrder::global(2, vec![1, 0])?, &single),
        ("gnar-community", headline_model.clone(), &part),
        ("gnar-interaction", interaction_model.clone(), &part),
        ("gnar-local", ModelOrder::local(d, 2, vec![1, 0])?, &singletons),
    ];
    for (name, order, model_part) in menu {
        let scored = score_model(
            &order,
            &raw,
            &std_real,
            &std_params,
            &actual,
            &weights,
            model_part,
            &stages,
            config.window,
        );
        comparison.push(ModelScore {
            name: name.to_string(),
            rmspe_raw: scored.rmspe_raw,
            rmspe_std: scored.rmspe_std,
            params: Some(scored.params),
            note: scored.note,
        });
    }
    // an unrestricted VAR is underdetermined here; record why
    match crate::forecast::fit_var_baseline(raw.values(), 1) {
        Ok(baseline) => {
            let f = baseline.forecast_one_step(&Realization::new(
                raw.values().columns(0, config.window).into_owned(),
            ))?;
            comparison.push(ModelScore {
                name: "var".to_string(),
                rmspe_raw: Some(rmspe(&f, &actual)?),
                rmspe_std: None,
                params: Some(baseline.order.layout().free_len()),
                note: None,
            });
        }
        Err(err) => comparison.push(ModelScore {
            name: "var".to_string(),
            rmspe_raw: None,
            rmspe_std: None,
            params: None,
            note: Some(err.to_string()),
        }),
    }
    if let Some(path) = &config.external_scores_csv {
        comparison.extend(read_external_scores(path)?);
    }

    // autocorrelation tables on the standardized full sample
    let max_stage = config.max_corbit_stage.min(stages.len());
    let corbit_nacf = corbit_data(
        &std_real,
        &weights_matrix,
        &stages,
        config.max_corbit_lag,
        max_stage,
        Some(&part),
        CorbitKind::Nacf,
    )?;
    let corbit_pnacf = corbit_data(
        &std_real,
        &weights_matrix,
        &stages,
        config.max_corbit_lag,
        max_stage,
        Some(&part),
        CorbitKind::Pnacf,
    )?;

    // one-lag differenced analysis
    let diff = crate::forecast::difference(panel.values(), 1)?;
    let diff_len = diff.ncols();
    let (diff_std, _) = standardize(&diff, diff_len)?;
    let diff_real = Realization::new(diff_std);
    let differenced_band = crate::acf::white_noise_band(d, diff_len);
    let mut differenced_pnacf_lag1 = Vec::new();
    for r in 1..=max_stage {
        let value = pnacf(&diff_real, &weights_matrix, &stages, 1, r, None)?;
        differenced_pnacf_lag1.push((r, value));
    }
    let diff_model = ModelOrder::new(vec![
        CommunityOrder::new(3, vec![1, 1, 1], vec![]),
        CommunityOrder::new(3, vec![1, 1, 1], vec![]),
        CommunityOrder::new(3, vec![1, 1, 1], vec![]),
    ])?;
    let design = build_design(&diff_real, &diff_model, &weights, &part, &stages)?;
    let diff_fit = fit_ols(&design)?;

    Ok(ElectionReport {
        node_ids,
        partition: part,
        community_sizes,
        realized_max_stage,
        swing_mean,
        headline,
        headline_sigma2: headline_fit.sigma2,
        headline_sigma2_plain: headline_fit.sigma2_plain,
        headline_stationary,
        interaction_lag2,
        interaction_all,
        comparison,
        naive_rmspe,
        corbit_nacf,
        corbit_pnacf,
        differenced_pnacf_lag1,
        differenced_band,
        differenced_fit: entries_from_fit(&diff_fit),
    })
}

/// Reads the per-year winner letters aligned with the panel roster.
pub fn read_winner_records(
    path: &Path,
    roster: &[String],
    time_labels: &[String],
) -> Result<Vec<Vec<bool>>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::CsvParse {
        line: 1,
        message: "empty file".to_string(),
    })?;
    let head: Vec<&str> = header.split(',').map(str::trim).collect();
    if head.len() != time_labels.len() + 1 {
        return Err(Error::CsvParse {
            line: 1,
            message: format!(
                "expected {} columns, got {}",
                time_labels.len() + 1,
                head.len()
            ),
        });
    }
    for (got, want) in head[1..].iter().zip(time_labels) {
        if got != want {
            return Err(Error::CsvParse {
                line: 1,
                message: format!("winner column `{got}` does not match panel year `{want}`"),
            });
        }
    }
    let mut records: Vec<Option<Vec<bool>>> = vec![None; roster.len()];
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != time_labels.len() + 1 {
            return Err(Error::CsvParse {
                line: idx + 1,
                message: format!(
                    "expected {} fields, got {}",
                    time_labels.len() + 1,
                    parts.len()
                ),
            });
        }
        let pos = roster
            .iter()
            .position(|n| n == parts[0])
            .ok_or_else(|| Error::UnknownLabel(parts[0].to_string()))?;
        let record = parts[1..]
            .iter()
            .map(|cell| match *cell {
                "R" | "r" => Ok(true),
                "D" | "d" => Ok(false),
                other => Err(Error::CsvParse {
                    line: idx + 1,
                    message: format!("winner cell must be R or D, got `{other}`"),
                }),
            })
            .collect::<Result<Vec<bool>>>()?;
        records[pos] = Some(record);
    }
    records
        .into_iter()
        .enumerate()
        .map(|(i, rec)|

            rec.ok_or_else(|| Error::Invalid(format!("no winner row for `{}`", roster[i]))))
        .collect()
}

/// Reads externally computed comparison rows:
/// `name,rmspe_raw,rmspe_std,params`, empty cells allowed.
fn read_external_scores(path: &Path) -> Result<Vec<ModelScore>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::CsvParse {
                line: idx + 1,
                message: format!("expected 4 fields, got {}", parts.len()),
            });
        }
        let parse = |raw: &str| -> Result<Option<f64>> {
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>().map(Some).map_err(|_| Error::CsvParse {
                line: idx + 1,
                message: format!("unparseable number `{raw}`"),
            })
        };
        out.push(ModelScore {
            name: parts[0].to_string(),
            rmspe_raw: parse(parts[1])?,
            rmspe_std: parse(parts[2])?,
            params: parse(parts[3])?.map(|v| v as usize),
            note: Some("external".to_string()),
        });
    }
    Ok(out)
}

impl ElectionReport {
    /// Plain-text coefficient table in the two-row journal layout.
    pub fn headline_text_table(&self) -> String {
        let mut header = String::from("            ");
        let mut est = String::from("Estimate    ");
        let mut se = String::from("Std. Err.   ");
        for entry in &self.headline {
            header.push_str(&format!("{:>14}", entry.label));
            est.push_str(&format!("{:>14.3}", entry.estimate));
            se.push_str(&format!("{:>14.3}", entry.se));
        }
        format!("{header}\n{est}\n{se}\n")
    }

    /// Comparison table CSV: metrics as rows, models as columns.
    pub fn comparison_csv(&self) -> String {
        let mut out = String::from("metric");
        for score in &self.comparison {
            out.push(',');
            out.push_str(&score.name);
        }
        out.push('\n');
        let fmt_opt = |v: &Option<f64>| match v {
            Some(x) => format!("{x:.4}"),
            None => "NA".to_string(),
        };
        out.push_str("rmspe_raw_fit");
        for score in &self.comparison {
            out.push(',');
            out.push_str(&fmt_opt(&score.rmspe_raw));
        }
        out.push('\n');
        out.push_str("rmspe_standardized_fit");
        for score in &self.comparison {
            out.push(',');
            out.push_str(&fmt_opt(&score.rmspe_std));
        }
        out.push('\n');
        out.push_str("params");
        for score in &self.comparison {
            out.push(',');
            match score.params {
                Some(p) => out.push_str(&p.to_string()),
                None => out.push_str("NA"),
            }
        }
        out.push('\n');
        out
    }

    /// Coefficient CSV: `label,estimate,se,t`.
    pub fn coefficients_csv(entries: &[CoefficientEntry]) -> String {
        let mut out = String::from("label,estimate,se,t\n");
        for e in entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.label, e.estimate, e.se, e.t_value
            ));
        }
        out
    }

    /// Community CSV: `node,community` with numeric labels.
    pub fn communities_csv(&self) -> String {
        let mut out = String::from("node,community\n");
        for (i, node) in self.node_ids.iter().enumerate() {
            out.push_str(&format!("{},{}\n", node, self.partition.label_of(i)));
        }
        out
    }

    /// Writes the full report bundle into a directory.
    pub fn write_bundle(&self, out_dir: &Path) -> Result<()> {
        std::fs::create_dir_all(out_dir)?;
        std::fs::write(out_dir.join("headline_coefficients.txt"), self.headline_text_table())?;
        std::fs::write(
            out_dir.join("headline_coefficients.csv"),
            Self::coefficients_csv(&self.headline),
        )?;
        std::fs::write(
            out_dir.join("interaction_lag2.csv"),
            Self::coefficients_csv(&self.interaction_lag2),
        )?;
        std::fs::write(
            out_dir.join("interaction_coefficients.csv"),
            Self::coefficients_csv(&self.interaction_all),
        )?;
        std::fs::write(out_dir.join("comparison.csv"), self.comparison_csv())?;
        std::fs::write(out_dir.join("communities.csv"), self.communities_csv())?;
        std::fs::write(
            out_dir.join("corbit_nacf.csv"),
            self.corbit_nacf.to_csv_string(),
        )?;
        std::fs::write(
            out_dir.join("corbit_pnacf.csv"),
            self.corbit_pnacf.to_csv_string(),
        )?;
        std::fs::write(
            out_dir.join("corbit_pnacf.svg"),
            render_corbit_svg(&self.corbit_pnacf, &CorbitStyle::default()),
        )?;
        let mut diff = String::from("stage,pnacf_lag1,band\n");
        for (r, v) in &self.differenced_pnacf_lag1 {
            diff.push_str(&format!("{r},{v},{}\n", self.differenced_band));
        }
        std::fs::write(out_dir.join("differenced_pnacf_lag1.csv"), diff)?;
        std::fs::write(
            out_dir.join("differenced_fit.csv"),
            Self::coefficients_csv(&self.differenced_fit),
        )?;
        std::fs::write(out_dir.join("summary.json"), self.summary_json()?)?;
        Ok(())
    }

    /// JSON summary of the scalar outputs.
    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            community_sizes: [usize; 3],
            community_names: [&'static str; 3],
            realized_max_stage: usize,
            swing_mean: f64,
            naive_rmspe: f64,
            headline_sigma2: f64,
            headline_sigma2_plain: f64,
            headline_stationary: bool,
            headline: &'a [CoefficientEntry],
            interaction_lag2: &'a [CoefficientEntry],
            comparison: &'a [ModelScore],
            differenced_band: f64,
            differenced_pnacf_lag1: &'a [(usize, f64)],
        }
        Ok(serde_json::to_string_pretty(&Summary {
            community_sizes: self.community_sizes,
            community_names: COMMUNITY_NAMES,
            realized_max_stage: self.realized_max_stage,
            swing_mean: self.swing_mean,
            naive_rmspe: self.naive_rmspe,
            headline_sigma2: self.headline_sigma2,
            headline_sigma2_plain: self.headline_sigma2_plain,
            headline_stationary: self.headline_stationary,
            headline: &self.headline,
            interaction_lag2: &self.interaction_lag2,
            comparison: &self.comparison,
            differenced_band: self.differenced_band,
            differenced_pnacf_lag1: &self.differenced_pnacf_lag1,
        })?)
    }
}
