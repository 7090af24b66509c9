//! The `cast` command line: JSON configs in, reports and tables out.
//!
//! Every subcommand writes a `manifest.json` holding the resolved config. A
//! manifest can be passed back through `--config` to repeat the run.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierSpec;
use crate::data::synthetic::Bundled;
use crate::data::make_split;
use crate::density::EstimatorKind;
use crate::engine::{build_fold_prior, run_self_training, SelfTrainConfig};
use crate::error::CastError;
use crate::evaluation::{run_grid, DatasetSpec, ExperimentGrid};
use crate::selection::DEFAULT_REPEATS;
use crate::theory::{blob_surface, corollary_check, BlobConfig, MixtureSpec};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cast", version, about = "Density-regularized self-training for tabular data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-train one fold of one dataset and write its report.
    Selftrain(CommonArgs),
    /// Run an experiment grid over datasets, strategies and arms.
    Grid(GridArgs),
    /// Compare the information of high- and low-density regions of a 1-D mixture.
    TheoryCheck(CommonArgs),
    /// Export naive and regularized confidence surfaces over a blob pair.
    BlobViz(CommonArgs),
    /// Fit the density prior of one fold and dump it.
    InspectPriors(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file (or a manifest written by an earlier run).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "cast-output")]
    pub output_dir: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Repeat for more log output.
    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Skip the summary printed to stdout.
    #[arg(short, long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Override the seed list, e.g. `--seeds 0,1,2`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
}

fn default_dataset() -> DatasetSpec {
    DatasetSpec::bundled(Bundled::BlobsMid)
}

fn default_fraction() -> f64 {
    0.1
}

/// Config of `selftrain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelftrainConfig {
    pub dataset: DatasetSpec,
    pub labeled_fraction: f64,
    pub seed: u64,
    pub fold: usize,
    pub classifier: ClassifierSpec,
    pub engine: SelfTrainConfig,
}

impl Default for SelftrainConfig {
    fn default() -> Self {
        Self {
            dataset: default_dataset(),
            labeled_fraction: default_fraction(),
            seed: 0,
            fold: 0,
            classifier: ClassifierSpec::default(),
            engine: SelfTrainConfig::default(),
        }
    }
}

/// Config of `inspect-priors`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriorsConfig {
    pub dataset: DatasetSpec,
    pub labeled_fraction: f64,
    pub seed: u64,
    pub fold: usize,
    pub estimator: EstimatorKind,
    pub feature_selection: bool,
    pub selection_repeats: usize,
}

impl Default for PriorsConfig {
    fn default() -> Self {
        Self {
            dataset: default_dataset(),
            labeled_fraction: default_fraction(),
            seed: 0,
            fold: 0,
            estimator: EstimatorKind::default(),
            feature_selection: true,
            selection_repeats: DEFAULT_REPEATS,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest<T> {
    pub toolkit_version: String,
    pub subcommand: String,
    pub config: T,
}

/// Failure of a CLI invocation, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Runtime(m) => write!(f, "run failed: {m}"),
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parse `text` into `T`, rejecting every key `T` does not know. A manifest
/// for `subcommand` is unwrapped to its `config`.
pub fn parse_config<T: DeserializeOwned>(text: &str, subcommand: &str) -> Result<T, CliError> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(invalid)?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("toolkit_version") && obj.contains_key("config") {
            match obj.get("subcommand").and_then(|s| s.as_str()) {
                Some(s) if s != subcommand => {
                    return Err(CliError::Invalid(format!("manifest was written by `{s}`, not `{subcommand}`")))
                }
                _ => {}
            }
            value = obj.remove("config").unwrap_or_default();
        }
    }
    let mut unknown = Vec::new();
    let parsed: T = serde_ignored::deserialize(value, |path| unknown.push(path.to_string())).map_err(invalid)?;
    if !unknown.is_empty() {
        return Err(CliError::Invalid(format!("unknown keys: {}", unknown.join(", "))));
    }
    Ok(parsed)
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>, subcommand: &str) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text, subcommand)
        }
    }
}

fn write_manifest<T: Serialize>(dir: &Path, subcommand: &str, config: &T) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(runtime)?;
    let m = Manifest {
        toolkit_version: TOOLKIT_VERSION.to_string(),
        subcommand: subcommand.to_string(),
        config,
    };
    let text = serde_json::to_string_pretty(&m).map_err(runtime)?;
    fs::write(dir.join("manifest.json"), text).map_err(runtime)
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn parse_and_dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("cast: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Selftrain(a) => selftrain(&a),
        Command::Grid(a) => grid(&a),
        Command::TheoryCheck(a) => theory_check(&a),
        Command::BlobViz(a) => blob_viz(&a),
        Command::InspectPriors(a) => inspect_priors(&a),
    }
}

fn selftrain(a: &CommonArgs) -> Result<(), CliError> {
    init_logging(a.verbose);
    let mut cfg: SelftrainConfig = load_config(a.config.as_deref(), "selftrain")?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.engine.validate().map_err(invalid)?;
    cfg.classifier.validate().map_err(invalid)?;
    if !(cfg.labeled_fraction > 0.0 && cfg.labeled_fraction <= 1.0) {
        return Err(CliError::Invalid("labeled_fraction must be in (0, 1]".into()));
    }
    let ds = cfg.dataset.load().map_err(invalid)?;
    let split = make_split(&ds, cfg.labeled_fraction, cfg.seed).map_err(runtime)?;
    if cfg.fold >= split.folds.len() {
        return Err(CliError::Invalid(format!("fold {} out of range", cfg.fold)));
    }
    write_manifest(&a.output_dir, "selftrain", &cfg)?;

    let out = run_self_training(&ds, &split, cfg.fold, &cfg.classifier, &cfg.engine, None).map_err(runtime)?;
    let dir = &a.output_dir;
    out.report.save(dir.join("report.json")).map_err(runtime)?;
    let pl_dir = dir.join("pseudo_labels");
    fs::create_dir_all(&pl_dir).map_err(runtime)?;
    for set in &out.pseudo_labels {
        set.write_csv(pl_dir.join(format!("iteration_{:03}.csv", set.iteration)))
            .map_err(runtime)?;
    }
    if let Some(p) = &out.prior {
        p.matrix.write_csv(dir.join("priors.csv")).map_err(runtime)?;
    }
    out.best_model.save(dir.join("best_model.json")).map_err(runtime)?;
    let r = &out.report;
    if a.quiet {
        return Ok(());
    }
    println!(
        "fold {} seed {}: {} iterations, best iteration {}, validation {:.4}, test {:.4} (supervised {:.4}), stop: {:?}",
        r.fold,
        r.seed,
        r.iterations.len() - 1,
        r.best_iteration,
        r.best_validation,
        r.test_metric_of_best,
        r.test_scores_supervised.get(cfg.engine.metric),
        r.termination
    );
    Ok(())
}

fn grid(a: &GridArgs) -> Result<(), CliError> {
    init_logging(a.common.verbose);
    let mut cfg: ExperimentGrid = load_config(a.common.config.as_deref(), "grid")?;
    if let Some(seeds) = &a.seeds {
        cfg.seeds = seeds.clone();
    } else if let Some(s) = a.common.seed {
        cfg.seeds = vec![s];
    }
    cfg.validate().map_err(invalid)?;
    for d in &cfg.datasets {
        d.load().map_err(invalid)?;
    }
    write_manifest(&a.common.output_dir, "grid", &cfg)?;
    let res = run_grid(&cfg).map_err(runtime)?;
    res.write(&a.common.output_dir).map_err(runtime)?;
    if a.common.quiet {
        return Ok(());
    }
    for (i, c) in res.cells.iter().enumerate() {
        println!(
            "{:<14} {:<5} {:<9} frac {:<5} {} {:.4} +- {:.4}  rank {}",
            c.dataset,
            c.strategy.name(),
            c.arm.name(),
            c.labeled_fraction,
            c.metric,
            c.mean,
            c.std,
            res.ranks[i].map_or("-".into(), |r| format!("{r:.1}"))
        );
    }
    if let Some(share) = res.alpha_share_at_most(0.7) {
        println!("alpha winners <= 0.7: {:.1}%", 100.0 * share);
    }
    println!("wall time {:.1} s", res.wall_ms / 1e3);
    Ok(())
}

fn theory_check(a: &CommonArgs) -> Result<(), CliError> {
    init_logging(a.verbose);
    let spec: MixtureSpec = load_config(a.config.as_deref(), "theory-check")?;
    spec.validate().map_err(invalid)?;
    write_manifest(&a.output_dir, "theory-check", &spec)?;
    let rep = corollary_check(&spec).map_err(runtime)?;
    fs::write(
        a.output_dir.join("corollary.json"),
        serde_json::to_string_pretty(&rep).map_err(runtime)?,
    )
    .map_err(runtime)?;
    if a.quiet {
        return Ok(());
    }
    println!("theta_high = {:.6}  theta_low = {:.6}", rep.theta_high, rep.theta_low);
    println!("I_all  = {:.10}", rep.i_all);
    println!("I_high = {:.10}", rep.i_high);
    println!("I_low  = {:.10}", rep.i_low);
    println!("max min(D1, D2) on high region = {:.3e}", rep.high_region_max_min_density);
    println!("max |D1 - D2| on low region    = {:.3e}", rep.low_region_max_abs_diff);
    if rep.zero_information {
        println!("verdict: FAIL (densities carry no information)");
    } else if rep.holds {
        println!("verdict: PASS (I_high > I_low)");
    } else {
        println!("verdict: FAIL (I_high <= I_low)");
    }
    Ok(())
}

fn blob_viz(a: &CommonArgs) -> Result<(), CliError> {
    init_logging(a.verbose);
    let mut cfg: BlobConfig = load_config(a.config.as_deref(), "blob-viz")?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if !(0.0..=1.0).contains(&cfg.alpha) || cfg.resolution < 2 || !(cfg.extent > 0.0) {
        return Err(CliError::Invalid(
            "blob-viz needs alpha in [0, 1], resolution >= 2 and extent > 0".into(),
        ));
    }
    write_manifest(&a.output_dir, "blob-viz", &cfg)?;
    let s = blob_surface(&cfg).map_err(runtime)?;
    s.write_csv(&a.output_dir).map_err(runtime)?;
    if a.quiet {
        return Ok(());
    }
    println!(
        "wrote {}x{} grid to {}",
        s.xs.len(),
        s.ys.len(),
        a.output_dir.join("grid.csv").display()
    );
    Ok(())
}

fn inspect_priors(a: &CommonArgs) -> Result<(), CliError> {
    init_logging(a.verbose);
    let mut cfg: PriorsConfig = load_config(a.config.as_deref(), "inspect-priors")?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if cfg.feature_selection && cfg.selection_repeats == 0 {
        return Err(CliError::Invalid("selection_repeats must be >= 1".into()));
    }
    let ds = cfg.dataset.load().map_err(invalid)?;
    let split = make_split(&ds, cfg.labeled_fraction, cfg.seed).map_err(|e| match e {
        CastError::Split(_) | CastError::InvalidInput(_) => invalid(e),
        e => runtime(e),
    })?;
    let fold = split
        .folds
        .get(cfg.fold)
        .ok_or_else(|| CliError::Invalid(format!("fold {} out of range", cfg.fold)))?;
    write_manifest(&a.output_dir, "inspect-priors", &cfg)?;
    let prior = build_fold_prior(
        &ds,
        fold,
        cfg.fold,
        cfg.seed,
        cfg.estimator,
        cfg.feature_selection,
        cfg.selection_repeats,
    )
    .map_err(runtime)?;
    prior.matrix.write_csv(a.output_dir.join("priors.csv")).map_err(runtime)?;
    fs::write(
        a.output_dir.join("selection.json"),
        serde_json::to_string_pretty(&prior.selection).map_err(runtime)?,
    )
    .map_err(runtime)?;
    if a.quiet {
        return Ok(());
    }
    let names: Vec<&str> = prior
        .selection
        .selected_idx
        .iter()
        .map(|&i| ds.schema()[i].name.as_str())
        .collect();
    println!(
        "{} prior over {} unlabeled rows, features [{}]{}",
        cfg.estimator.name(),
        prior.matrix.n_rows(),
        names.join(", "),
        if prior.selection.used_fallback { " (fallback)" } else { "" }
    );
    for k in 0..prior.matrix.n_classes() {
        let col = prior.matrix.raw.column(k);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("class {k}: raw range [{lo:.4e}, {hi:.4e}]");
    }
    Ok(())
}
