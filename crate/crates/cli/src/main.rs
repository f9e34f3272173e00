//! Command-line front end for the GNAR toolkit.
//!
//! Every subcommand reads and writes plain files and is deterministic
//! given `--seed`; without the flag a fixed default seed keeps repeated
//! runs byte-identical. Exit codes: 0 on success, 2 on validation or
//! usage errors, 1 on internal failures (e.g. the output directory is
//! not writable).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use gnar::acf::{corbit_data, CorbitKind};
use gnar::design::build_design;
use gnar::election::{default_fixture_dir, election_pipeline, ElectionConfig};
use gnar::fit::{fit_ols, FitResult};
use gnar::forecast::{forecast_one_step, naive_forecast, rmspe};
use gnar::graph::{stage_adjacency, CommunityPartition, Network, StageAdjacency};
use gnar::order::{ModelOrder, ModelSpecFile, ParameterVector};
use gnar::panel::{
    parse_communities_csv, read_edges_csv, read_panel_csv, realization_to_long_csv,
    realization_to_wide_csv, PanelSchema,
};
use gnar::sim::{default_burn_in, periodic_weights_preset, simulate, NoiseSpec, Realization};
use gnar::study::{
    run_bound_check, run_recovery_study, BoundCheckConfig, RecoveryConfig, StudySetup,
};
use gnar::svg::{render_corbit_svg, render_lines_svg, CorbitStyle};
use gnar::varrep::{check_stationary_companion, check_stationary_sufficient, var_matrices};
use gnar::weights::{community_normalized_weights, equal_weights, WeightsSequence};

/// Default seed keeping unseeded runs reproducible.
const DEFAULT_SEED: u64 = 2024;

#[derive(Parser)]
#[command(name = "gnar", version, about = "Network autoregressive modelling toolkit", arg_required_else_help = true)]
struct Cli {
    /// Seed for all randomness.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Stdout format for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaArg {
    Long,
    Wide,
    NodeRows,
}

impl From<SchemaArg> for PanelSchema {
    fn from(value: SchemaArg) -> Self {
        match value {
            SchemaArg::Long => PanelSchema::Long,
            SchemaArg::Wide => PanelSchema::WideTimeRows,
            SchemaArg::NodeRows => PanelSchema::WideNodeRows,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    /// Equal importance over each r-stage neighbourhood.
    Equal,
    /// Period-four seasonal preset (needs a 3-community partition).
    Seasonal,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a realization from a model file with coefficients.
    Simulate(SimulateArgs),
    /// Fit a model order to a panel by conditional least squares.
    Fit(FitArgs),
    /// Check the stationarity conditions of a coefficient vector.
    Stationarity(StationarityArgs),
    /// Emit a plain network-autocorrelation table.
    Nacf(CorbitArgs),
    /// Emit Corbit/R-Corbit tables and the ring plot.
    Corbit(CorbitArgs),
    /// One-step forecast with scoring against the held-out step.
    Forecast(ForecastArgs),
    /// Finite-sample error-bound report for a fitted design.
    Bound(BoundArgs),
    /// Monte Carlo studies: recovery curves or bound coverage.
    Study(StudyArgs),
    /// Full election analysis over the bundled fixtures.
    Election(ElectionArgs),
}

#[derive(Args)]
struct ModelInputs {
    /// Model JSON (communities, stage depths, interactions, coefficients).
    #[arg(long)]
    model: PathBuf,
    /// Edge-list CSV (`from,to`).
    #[arg(long)]
    edges: PathBuf,
    /// Community CSV (`node,community`); single community when omitted.
    #[arg(long)]
    communities: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    inputs: ModelInputs,
    /// Steps to keep.
    #[arg(long)]
    len: usize,
    /// Steps to discard; a lag-dependent default applies when omitted.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = WeightsArg::Equal)]
    weights: WeightsArg,
}

#[derive(Args)]
struct PanelInputs {
    /// Panel CSV.
    #[arg(long)]
    panel: PathBuf,
    #[arg(long, value_enum, default_value_t = SchemaArg::Long)]
    schema: SchemaArg,
    /// Edge-list CSV (`from,to`), labels resolved against the panel.
    #[arg(long)]
    edges: PathBuf,
    /// Community CSV (`node,community`); single community when omitted.
    #[arg(long)]
    communities: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    inputs: PanelInputs,
    /// Model JSON; coefficients in the file are ignored.
    #[arg(long)]
    model: PathBuf,
    /// Renormalize masked neighbourhoods to unit mass.
    #[arg(long)]
    renormalize_masks: bool,
}

#[derive(Args)]
struct StationarityArgs {
    /// Model JSON with coefficients.
    #[arg(long)]
    model: PathBuf,
    /// Optional network for the companion-matrix check.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    communities: Option<PathBuf>,
}

#[derive(Args)]
struct CorbitArgs {
    #[command(flatten)]
    inputs: PanelInputs,
    #[arg(long, value_enum, default_value_t = KindArg::Pnacf)]
    kind: KindArg,
    #[arg(long, default_value_t = 6)]
    max_lag: usize,
    #[arg(long, default_value_t = 3)]
    max_stage: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nacf,
    Pnacf,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    inputs: PanelInputs,
    /// Model JSON; coefficients in the file are ignored.
    #[arg(long)]
    model: PathBuf,
    /// Training length; defaults to all but the final step.
    #[arg(long)]
    train_len: Option<usize>,
    #[arg(long)]
    renormalize_masks: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    inputs: PanelInputs,
    /// Model JSON; coefficients in the file are ignored.
    #[arg(long)]
    model: PathBuf,
    /// Noise standard deviation entering the probabilistic bound.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    Recovery,
    BoundCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyPreset {
    /// Bundled state network, election communities, seasonal weights.
    SeasonalUsa,
    /// Five-node demonstration model with equal weights.
    FiveNode,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, value_enum, default_value_t = StudyKind::Recovery)]
    kind: StudyKind,
    #[arg(long, value_enum, default_value_t = StudyPreset::SeasonalUsa)]
    preset: StudyPreset,
    /// Realization lengths for the recovery study.
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400,800")]
    t_grid: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    replications: usize,
    /// Realization length for the bound check.
    #[arg(long, default_value_t = 200)]
    len: usize,
    /// Deltas for the bound check.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,2.0")]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
    /// Coefficient-mass budget for stationary draws.
    #[arg(long, default_value_t = 0.9)]
    total_mass: f64,
}

#[derive(Args)]
struct ElectionArgs {
    /// Fixture directory; the bundled data when omitted
    /// (`GNAR_FIXTURE_DIR` also overrides).
    #[arg(long)]
    fixture_dir: Option<PathBuf>,
    /// Use literal masks instead of the renormalized convention.
    #[arg(long)]
    literal_masks: bool,
    #[arg(long, default_value_t = 11)]
    window: usize,
    #[arg(long, default_value_t = 6)]
    max_lag: usize,
    #[arg(long, default_value_t = 6)]
    max_stage: usize,
    /// Externally computed comparison rows
    /// (`name,rmspe_raw,rmspe_std,params`).
    #[arg(long)]
    external_scores: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Internal(String),
}

impl From<gnar::Error> for Failure {
    fn from(err: gnar::Error) -> Self {
        Failure::Validation(err.to_string())
    }
}

type RunResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Fit(args) => cmd_fit(&cli, args),
        Command::Stationarity(args) => cmd_stationarity(&cli, args),
        Command::Nacf(args) => cmd_corbit(&cli, args, false),
        Command::Corbit(args) => cmd_corbit(&cli, args, true),
        Command::Forecast(args) => cmd_forecast(&cli, args),
        Command::Bound(args) => cmd_bound(&cli, args),
        Command::Study(args) => cmd_study(&cli, args),
        Command::Election(args) => cmd_election(&cli, args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(1)
        }
    }
}

fn write_artifact(path: &Path, contents: &str) -> RunResult {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| Failure::Internal(format!("creating {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| Failure::Internal(format!("writing {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<(ModelOrder, Option<ParameterVector<f64>>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("reading {}: {e}", path.display())))?;
    let file: ModelSpecFile =
        serde_json::from_str(&text).map_err(|e| Failure::Validation(e.to_string()))?;
    Ok(file.to_order()?)
}

fn load_network(
    edges: &Path,
    communities: Option<&Path>,
) -> Result<(Network, Vec<StageAdjacency>, CommunityPartition), Failure> {
    let net = read_edges_csv(edges, None).or_else(|_| {
        // label-based lists need a roster; derive one from the file itself
        let text = std::fs::read_to_string(edges)
            .map_err(|e| Failure::Validation(format!("reading {}: {e}", edges.display())))?;
        let mut names: Vec<String> = text
            .lines()
            .skip(1)
            .flat_map(|l| l.split(',').map(|s| s.trim().to_string()))
            .filter(|s| !s.is_empty())
            .collect();
        names.sort();
        names.dedup();
        gnar::panel::parse_edges_csv(&text, Some(&names)).map_err(Failure::from)
    })?;
    let stages = stage_adjacency(&net, net.max_stage().max(1));
    let part = match communities {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("reading {}: {e}", path.display())))?;
            let roster: Vec<String> = match net.labels() {
                Some(labels) => labels.to_vec(),
                None => (1..=net.node_count()).map(|i| i.to_string()).collect(),
            };
            parse_communities_csv(&text, &roster)?
        }
        None => CommunityPartition::single(net.node_count()),
    };
    Ok((net, stages, part))
}

fn build_weights(
    choice: WeightsArg,
    net: &Network,
    stages: &[StageAdjacency],
    part: &CommunityPartition,
) -> Result<WeightsSequence<f64>, Failure> {
    match choice {
        WeightsArg::Equal => Ok(WeightsSequence::constant(equal_weights(net, stages))),
        WeightsArg::Seasonal => Ok(periodic_weights_preset(net, part, 4)?),
    }
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> RunResult {
    let (order, theta) = load_model(&args.inputs.model)?;
    let theta = theta.ok_or_else(|| {
        Failure::Validation("simulation needs coefficients in the model file".to_string())
    })?;
    let (net, stages, part) = load_network(&args.inputs.edges, args.inputs.communities.as_deref())?;
    let weights = build_weights(args.weights, &net, &stages, &part)?;

    // stationarity is advisory for simulation: warn, do not refuse
    let sufficient = check_stationary_sufficient(&order, &theta)?;
    if !sufficient.pass {
        match &weights {
            WeightsSequence::Static(w) => {
                let var = var_matrices(&order, &theta, w, &stages, &part)?;
                let companion = check_stationary_companion(&var);
                if companion.pass {
                    eprintln!(
                        "warning: coefficient sums exceed one but the companion radius is {:.6}; proceeding",
                        companion.spectral_radius
                    );
                } else {
                    eprintln!(
                        "warning: neither stationarity check passes (radius {:.6}); the simulation may abort as explosive",
                        companion.spectral_radius
                    );
                }
            }
            WeightsSequence::Cycle(_) => {
                eprintln!("warning: coefficient sums exceed one; companion check not evaluated for time-varying weights");
            }
        }
    }

    let burn_in = args.burn_in.unwrap_or_else(|| default_burn_in(order.max_lag()));
    let noise = NoiseSpec::isotropic(part.node_count(), args.sigma, cli.seed)?;
    let real = simulate(&order, &theta, &weights, &stages, &part, args.len, burn_in, &noise)?;
    write_artifact(
        &cli.out_dir.join("simulation_long.csv"),
        &realization_to_long_csv(&real),
    )?;
    write_artifact(
        &cli.out_dir.join("simulation_wide.csv"),
        &realization_to_wide_csv(&real),
    )?;
    #[derive(serde::Serialize)]
    struct Meta<'a> {
        seed: u64,
        len: usize,
        burn_in: usize,
        sigma: f64,
        model: &'a ModelSpecFile,
    }
    let meta = Meta {
        seed: cli.seed,
        len: args.len,
        burn_in,
        sigma: args.sigma,
        model: &ModelSpecFile::from_order(&order, Some(&theta)),
    };
    write_artifact(
        &cli.out_dir.join("simulation_meta.json"),
        &serde_json::to_string_pretty(&meta).map_err(|e| Failure::Internal(e.to_string()))?,
    )?;
    println!(
        "simulated {} nodes x {} steps -> {}",
        part.node_count(),
        args.len,
        cli.out_dir.join("simulation_long.csv").display()
    );
    Ok(())
}

fn panel_pieces(
    inputs: &PanelInputs,
) -> Result<
    (
        gnar::Panel,
        Realization<f64>,
        Network,
        Vec<StageAdjacency>,
        CommunityPartition,
    ),
    Failure,
> {
    let panel: gnar::Panel = read_panel_csv(&inputs.panel, inputs.schema.into())?;
    let net = read_edges_csv(&inputs.edges, Some(panel.node_ids()))
        .or_else(|_| read_edges_csv(&inputs.edges, None).map_err(Failure::from))?;
    if net.node_count() != panel.node_count() {
        return Err(Failure::Validation(format!(
            "network has {} nodes, panel has {}",
            net.node_count(),
            panel.node_count()
        )));
    }
    let stages = stage_adjacency(&net, net.max_stage().max(1));
    let part = match &inputs.communities {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("reading {}: {e}", path.display())))?;
            parse_communities_csv(&text, panel.node_ids())?
        }
        None => CommunityPartition::single(panel.node_count()),
    };
    let real = panel.to_realization()?;
    Ok((panel, real, net, stages, part))
}

fn weights_for_fit(
    net: &Network,
    stages: &[StageAdjacency],
    part: &CommunityPartition,
    renormalize: bool,
) -> WeightsSequence<f64> {
    let equal = equal_weights(net, stages);
    if renormalize {
        WeightsSequence::constant(community_normalized_weights(&equal, part, stages))
    } else {
        WeightsSequence::constant(equal)
    }
}

fn coefficients_json(fit: &FitResult<f64>) -> Result<String, Failure> {
    #[derive(serde::Serialize)]
    struct Entry {
        coordinate: gnar::order::ParamCoord,
        label: String,
        estimate: f64,
        se: f64,
        t: f64,
    }
    #[derive(serde::Serialize)]
    struct Out {
        sigma2: f64,
        sigma2_plain: f64,
        rows_used: usize,
        condition: f64,
        warnings: Vec<String>,
        coefficients: Vec<Entry>,
    }
    let out = Out {
        sigma2: fit.sigma2,
        sigma2_plain: fit.sigma2_plain,
        rows_used: fit.rows_used,
        condition: fit.condition,
        warnings: fit.warnings.clone(),
        coefficients: fit
            .coords
            .iter()
            .zip(fit.theta.values())
            .zip(fit.se.iter().zip(&fit.t_values))
            .map(|((coord, est), (se, t))| Entry {
                coordinate: *coord,
                label: coord.to_string(),
                estimate: *est,
                se: *se,
                t: *t,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).map_err(|e| Failure::Internal(e.to_string()))
}

fn coefficients_csv(fit: &FitResult<f64>) -> String {
    let mut out = String::from("label,estimate,se,t\n");
    for ((coord, est), (se, t)) in fit
        .coords
        .iter()
        .zip(fit.theta.values())
        .zip(fit.se.iter().zip(&fit.t_values))
    {
        out.push_str(&format!("{coord},{est},{se},{t}\n"));
    }
    out
}

fn coefficients_table(fit: &FitResult<f64>) -> String {
    let mut header = String::from("            ");
    let mut est = String::from("Estimate    ");
    let mut se = String::from("Std. Err.   ");
    for (coord, (e, s)) in fit
        .coords
        .iter()
        .zip(fit.theta.values().iter().zip(&fit.se))
    {
        header.push_str(&format!("{:>16}", coord.to_string()));
        est.push_str(&format!("{:>16.3}", e));
        se.push_str(&format!("{:>16.3}", s));
    }
    format!("{header}\n{est}\n{se}\n")
}

fn cmd_fit(cli: &Cli, args: &FitArgs) -> RunResult {
    let (order, _) = load_model(&args.model)?;
    let (_panel, real, net, stages, part) = panel_pieces(&args.inputs)?;
    let weights = weights_for_fit(&net, &stages, &part, args.renormalize_masks);
    let design = build_design(&real, &order, &weights, &part, &stages)?;
    let fit = fit_ols(&design)?;
    for warning in &fit.warnings {
        eprintln!("warning: {warning}");
    }
    write_artifact(&cli.out_dir.join("coefficients.csv"), &coefficients_csv(&fit))?;
    write_artifact(&cli.out_dir.join("coefficients.json"), &coefficients_json(&fit)?)?;
    write_artifact(&cli.out_dir.join("coefficients.txt"), &coefficients_table(&fit))?;
    match cli.format {
        Format::Csv => print!("{}", coefficients_table(&fit)),
        Format::Json => println!("{}", coefficients_json(&fit)?),
    }
    Ok(())
}

fn cmd_stationarity(cli: &Cli, args: &StationarityArgs) -> RunResult {
    let (order, theta) = load_model(&args.model)?;
    let theta = theta.ok_or_else(|| {
        Failure::Validation("stationarity checks need coefficients in the model file".to_string())
    })?;
    let sufficient = check_stationary_sufficient(&order, &theta)?;
    let companion = match &args.edges {
        Some(edges) => {
            let (net, stages, part) = load_network(edges, args.communities.as_deref())?;
            let w = equal_weights(&net, &stages);
            let var = var_matrices(&order, &theta, &w, &stages, &part)?;
            Some(check_stationary_companion(&var))
        }
        None => None,
    };
    #[derive(serde::Serialize)]
    struct Report {
        community_sums: Vec<f64>,
        margin: f64,
        sufficient_pass: bool,
        companion_spectral_radius: Option<f64>,
        companion_pass: Option<bool>,
    }
    let report = Report {
        community_sums: sufficient.community_sums.clone(),
        margin: sufficient.margin,
        sufficient_pass: sufficient.pass,
        companion_spectral_radius: companion.as_ref().map(|c| c.spectral_radius),
        companion_pass: companion.as_ref().map(|c| c.pass),
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    write_artifact(&cli.out_dir.join("stationarity.json"), &json)?;
    println!("{json}");
    Ok(())
}

fn cmd_corbit(cli: &Cli, args: &CorbitArgs, with_communities: bool) -> RunResult {
    let (_panel, real, net, stages, part) = panel_pieces(&args.inputs)?;
    let weights = equal_weights(&net, &stages);
    let kind = match args.kind {
        KindArg::Nacf => CorbitKind::Nacf,
        KindArg::Pnacf => CorbitKind::Pnacf,
    };
    let scope = if with_communities && part.community_count() > 1 {
        Some(&part)
    } else {
        None
    };
    let table = corbit_data(
        &real,
        &weights,
        &stages,
        args.max_lag,
        args.max_stage,
        scope,
        kind,
    )?;
    let csv = table.to_csv_string();
    let stem = if with_communities { "corbit" } else { "nacf" };
    write_artifact(&cli.out_dir.join(format!("{stem}.csv")), &csv)?;
    if with_communities {
        write_artifact(
            &cli.out_dir.join("corbit.svg"),
            &render_corbit_svg(&table, &CorbitStyle::default()),
        )?;
    }
    print!("{csv}");
    let _ = net;
    Ok(())
}

fn cmd_forecast(cli: &Cli, args: &ForecastArgs) -> RunResult {
    let (panel, real, net, stages, part) = panel_pieces(&args.inputs)?;
    let (order, _) = load_model(&args.model)?;
    let len = real.len();
    let train_len = args.train_len.unwrap_or(len.saturating_sub(1));
    if train_len == 0 || train_len > len {
        return Err(Failure::Validation(format!(
            "train length {train_len} out of range 1..={len}"
        )));
    }
    let weights = weights_for_fit(&net, &stages, &part, args.renormalize_masks);
    let train = Realization::new(real.values().columns(0, train_len).into_owned());
    let design = build_design(&train, &order, &weights, &part, &stages)?;
    let fit = fit_ols(&design)?;
    let forecast = forecast_one_step(&order, &fit.theta, &train, &weights, &part, &stages)?;
    let naive = naive_forecast(&train)?;

    let mut csv = String::from("node,forecast,naive\n");
    for (i, node) in panel.node_ids().iter().enumerate() {
        csv.push_str(&format!("{node},{},{}\n", forecast[i], naive[i]));
    }
    write_artifact(&cli.out_dir.join("forecast.csv"), &csv)?;

    let mut scored = None;
    if train_len < len {
        let actual: DVector<f64> = real.state(train_len);
        scored = Some((
            rmspe(&forecast, &actual)?,
            rmspe(&naive, &actual)?,
        ));
    }
    #[derive(serde::Serialize)]
    struct Meta {
        train_len: usize,
        rmspe: Option<f64>,
        naive_rmspe: Option<f64>,
    }
    let meta = Meta {
        train_len,
        rmspe: scored.map(|s| s.0),
        naive_rmspe: scored.map(|s| s.1),
    };
    write_artifact(
        &cli.out_dir.join("forecast_meta.json"),
        &serde_json::to_string_pretty(&meta).map_err(|e| Failure::Internal(e.to_string()))?,
    )?;
    match scored {
        Some((model, naive)) => println!(
            "one-step forecast written; RMSPE {model:.4} (naive {naive:.4})"
        ),
        None => println!("one-step forecast written (no held-out step to score)"),
    }
    Ok(())
}

fn cmd_bound(cli: &Cli, args: &BoundArgs) -> RunResult {
    let (_panel, real, net, stages, part) = panel_pieces(&args.inputs)?;
    let (order, _) = load_model(&args.model)?;
    let weights = WeightsSequence::constant(equal_weights(&net, &stages));
    let design = build_design(&real, &order, &weights, &part, &stages)?;
    let fit = fit_ols(&design)?;
    let report = gnar::bounds::error_bound(&design, args.sigma, args.delta, Some(&fit.residuals))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    write_artifact(&cli.out_dir.join("bound.json"), &json)?;
    println!("{json}");
    Ok(())
}

fn study_setup(preset: StudyPreset, total_mass: f64) -> Result<StudySetup<f64>, Failure> {
    match preset {
        StudyPreset::SeasonalUsa => {
            let (net, stages, part) = gnar::presets::usa_study_pieces()?;
            let weights = periodic_weights_preset(&net, &part, 4)?;
            Ok(StudySetup {
                order: gnar::presets::seasonal_study_order(),
                part,
                stages,
                weights,
                total_mass,
                sigma: 1.0,
            })
        }
        StudyPreset::FiveNode => {
            let (_net, stages, part, order, weights) = gnar::presets::five_net_setup();
            Ok(StudySetup {
                order,
                part,
                stages,
                weights,
                total_mass,
                sigma: 1.0,
            })
        }
    }
}

fn cmd_study(cli: &Cli, args: &StudyArgs) -> RunResult {
    let setup = study_setup(args.preset, args.total_mass)?;
    match args.kind {
        StudyKind::Recovery => {
            let config = RecoveryConfig {
                t_grid: args.t_grid.clone(),
                replications: args.replications,
                master_seed: cli.seed,
                burn_in: args.burn_in,
            };
            let study = run_recovery_study(&setup, &config)?;
            write_artifact(&cli.out_dir.join("recovery_curves.csv"), &study.to_csv_string())?;
            let mut series = vec![(
                "all".to_string(),
                study
                    .median_whole_model()
                    .into_iter()
                    .map(|(t, v)| (t as f64, v))
                    .collect::<Vec<_>>(),
            )];
            for (c, curve) in study.median_by_community() {
                series.push((
                    format!("community {c}"),
                    curve.into_iter().map(|(t, v)| (t as f64, v)).collect(),
                ));
            }
            write_artifact(
                &cli.out_dir.join("recovery_curves.svg"),
                &render_lines_svg(&series, "median coefficient error by realization length"),
            )?;
            for (t, v) in study.median_whole_model() {
                println!("T = {t:<5} median error {v:.4}");
            }
        }
        StudyKind::BoundCheck => {
            let config = BoundCheckConfig {
                delta_grid: args.deltas.clone(),
                replications: args.replications,
                len: args.len,
                master_seed: cli.seed,
                burn_in: args.burn_in,
            };
            let check = run_bound_check(&setup, &config)?;
            write_artifact(&cli.out_dir.join("bound_check.csv"), &check.to_csv_string())?;
            println!(
                "deterministic bound violations: {} of {}",
                check.deterministic_violations, check.replications
            );
            for row in &check.rows {
                println!(
                    "delta = {:<5} violations {}/{} (ceiling {:.3})",
                    row.delta, row.violations, row.replications, row.ceiling
                );
            }
        }
    }
    Ok(())
}

fn cmd_election(cli: &Cli, args: &ElectionArgs) -> RunResult {
    let dir = args
        .fixture_dir
        .clone()
        .unwrap_or_else(default_fixture_dir);
    let mut config = ElectionConfig::from_fixture_dir(&dir);
    config.window = args.window;
    config.renormalize_masks = !args.literal_masks;
    config.max_corbit_lag = args.max_lag;
    config.max_corbit_stage = args.max_stage;
    config.external_scores_csv = args.external_scores.clone();
    let report = election_pipeline(&config)?;
    report
        .write_bundle(&cli.out_dir)
        .map_err(|e| Failure::Internal(e.to_string()))?;
    println!(
        "communities: {} red, {} blue, {} swing; realized max stage {}",
        report.community_sizes[0],
        report.community_sizes[1],
        report.community_sizes[2],
        report.realized_max_stage
    );
    println!("naive one-step RMSPE: {:.4}", report.naive_rmspe);
    print!("{}", report.headline_text_table());
    println!(
        "artifacts written to {} (summary.json, comparison.csv, corbit_pnacf.svg, ...)",
        cli.out_dir.display()
    );
    Ok(())
}
