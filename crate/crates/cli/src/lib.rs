//! The `nts` command line: train, simulate, abstract, check, export-dot.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use nts_core::ctl::{check_suite, formula_lines};
use nts_core::nnmodel::{load_network, save_network, train_elm, ElmTrainConfig};
use nts_core::partition::MePartitionConfig;
use nts_core::reach::HyperRectangle;
use nts_core::traces::{load_traces_csv, save_traces_csv, simulate_seeded, TraceSet};
use nts_core::transition::{build_abstraction, export_dot, AbstractionParams, Boundary, SelfLoopConfig, TransitionSystem};

use config::FileConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nts_core::Error),
    #[error("{0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Usage(_) | CliError::Core(_) => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "nts", version, about = "Abstract neural-network dynamics into transition systems and model-check them")]
pub struct Cli {
    /// TOML file with one section per subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file.
    #[arg(short = 'o', long = "out", global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an extreme learning machine to a trace CSV.
    Train(TrainArgs),
    /// Roll out a network from random initial states.
    Simulate(SimulateArgs),
    /// Partition the working zone and build the transition system.
    Abstract(AbstractArgs),
    /// Check CTL formulas on a transition system.
    Check(CheckArgs),
    /// Render a transition system as Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Hidden-layer width.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Ridge penalty.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Hidden weights are drawn from [-scale, scale].
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub num_traces: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub init_lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub init_upper: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub input_lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub input_upper: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AbstractArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Minimum entropy gain (bits) for a split.
    #[arg(long, allow_hyphen_values = true)]
    pub entropy: Option<f64>,
    /// Cells shorter than this on every side are not split.
    #[arg(long, allow_hyphen_values = true)]
    pub lmin: Option<f64>,
    /// Self-loops need a dwell longer than this many samples.
    #[arg(long)]
    pub dwell: Option<usize>,
    /// Model error for guaranteed transitions.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub zone_lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub zone_upper: Option<Vec<f64>>,
    /// Relative margin added to a zone taken from the samples.
    #[arg(long, allow_hyphen_values = true)]
    pub zone_margin: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub input_lower: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub input_upper: Option<Vec<f64>>,
    /// Intersect reachable sets with half-open cells instead of closed ones.
    #[arg(long)]
    pub half_open: bool,
    /// Add an `out` sink for cells whose reachable set leaves the zone.
    #[arg(long)]
    pub out_sink: bool,
    /// DOT output path; defaults to the JSON path with a `.dot` extension.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub formulas: Option<PathBuf>,
    /// Partition id to check from.
    #[arg(long)]
    pub initial: Option<usize>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Exit with status 1 unless every formula holds.
    #[arg(long)]
    pub assert_all_true: bool,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    #[arg(long)]
    pub system: Option<PathBuf>,
}

/// Parses `args` and runs the subcommand, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    match &cli.command {
        Command::Train(a) => cmd_train(a, &cfg, cli.out.as_deref(), seed, stdout),
        Command::Simulate(a) => cmd_simulate(a, &cfg, cli.out.as_deref(), seed, stdout),
        Command::Abstract(a) => cmd_abstract(a, &cfg, cli.out.as_deref(), stdout),
        Command::Check(a) => cmd_check(a, &cfg, cli.out.as_deref(), stdout),
        Command::ExportDot(a) => cmd_export_dot(a, &cfg, cli.out.as_deref(), stdout),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{flag}")))
}

fn output_path(flag: Option<&Path>, section: &Option<PathBuf>) -> CliResult<PathBuf> {
    required(flag.map(Path::to_path_buf).or_else(|| section.clone()), "out")
}

fn bounds(lower: Option<Vec<f64>>, upper: Option<Vec<f64>>, name: &str) -> CliResult<Option<HyperRectangle>> {
    match (lower, upper) {
        (None, None) => Ok(None),
        (Some(l), Some(u)) => HyperRectangle::new(l, u)
            .map(Some)
            .map_err(|e| CliError::Usage(format!("--{name}-lower/--{name}-upper: {e}"))),
        _ => Err(CliError::Usage(format!(
            "--{name}-lower and --{name}-upper must be given together"
        ))),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn say(stdout: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(|e| CliError::Usage(format!("stdout: {e}")))
}

fn cmd_train(a: &TrainArgs, cfg: &FileConfig, out: Option<&Path>, seed: u64, stdout: &mut dyn Write) -> CliResult<i32> {
    let s = &cfg.train;
    let traces_path = required(a.traces.clone().or_else(|| s.traces.clone()), "traces")?;
    let out = output_path(out, &s.out)?;
    let defaults = ElmTrainConfig::default();
    let train_cfg = ElmTrainConfig {
        hidden_width: a.hidden.or(s.hidden).unwrap_or(defaults.hidden_width),
        ridge_lambda: a.lambda.or(s.lambda).unwrap_or(defaults.ridge_lambda),
        seed,
        hidden_weight_scale: a.scale.or(s.scale).unwrap_or(defaults.hidden_weight_scale),
    };
    train_cfg.validate()?;
    let traces = load_traces_csv(&traces_path)?;
    let trained = train_elm(&traces, &train_cfg)?;
    save_network(&trained.network, &out)?;
    say(
        stdout,
        &format!(
            "trained {} hidden neurons on {} pairs, RMSE {}",
            train_cfg.hidden_width, trained.report.pairs, trained.report.rmse
        ),
    )?;
    Ok(0)
}

fn cmd_simulate(
    a: &SimulateArgs,
    cfg: &FileConfig,
    out: Option<&Path>,
    seed: u64,
    stdout: &mut dyn Write,
) -> CliResult<i32> {
    let s = &cfg.simulate;
    let network = required(a.network.clone().or_else(|| s.network.clone()), "network")?;
    let out = output_path(out, &s.out)?;
    let count = a.num_traces.or(s.num_traces).unwrap_or(20);
    let horizon = a.horizon.or(s.horizon).unwrap_or(100);
    if horizon == 0 {
        return Err(CliError::Usage("--horizon must be at least 1".into()));
    }
    if count == 0 {
        return Err(CliError::Usage("--num-traces must be at least 1".into()));
    }
    let init = required(
        bounds(
            a.init_lower.clone().or_else(|| s.init_lower.clone()),
            a.init_upper.clone().or_else(|| s.init_upper.clone()),
            "init",
        )?,
        "init-lower/--init-upper",
    )?;
    let inputs = bounds(
        a.input_lower.clone().or_else(|| s.input_lower.clone()),
        a.input_upper.clone().or_else(|| s.input_upper.clone()),
        "input",
    )?;
    let net = load_network(&network)?;
    let traces = simulate_seeded(&net, &init, count, inputs.as_ref(), horizon, seed)?;
    save_traces_csv(&traces, &out)?;
    say(stdout, &format!("{} traces, {} samples", traces.len(), traces.total_samples()))?;
    Ok(0)
}

/// Componentwise min/max box of the sampled states, widened by `margin`
/// times each side.
pub fn zone_from_samples(traces: &TraceSet, margin: f64) -> CliResult<HyperRectangle> {
    if !(margin >= 0.0) || !margin.is_finite() {
        return Err(CliError::Usage(format!("--zone-margin must be nonnegative, got {margin}")));
    }
    let hull = traces
        .state_hull()
        .ok_or_else(|| CliError::Usage("trace file has no samples".into()))?;
    if margin == 0.0 {
        return Ok(hull);
    }
    let (lower, upper) = (0..hull.dim())
        .map(|k| {
            let pad = margin * hull.side(k);
            (hull.lower()[k] - pad, hull.upper()[k] + pad)
        })
        .unzip();
    Ok(HyperRectangle::new(lower, upper)?)
}

fn cmd_abstract(a: &AbstractArgs, cfg: &FileConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<i32> {
    let s = &cfg.abstraction;
    let network = required(a.network.clone().or_else(|| s.network.clone()), "network")?;
    let traces_path = required(a.traces.clone().or_else(|| s.traces.clone()), "traces")?;
    let out = output_path(out, &s.out)?;
    let dot_path = a
        .dot
        .clone()
        .or_else(|| s.dot.clone())
        .unwrap_or_else(|| out.with_extension("dot"));

    let partitioning = MePartitionConfig::new(
        a.entropy.or(s.entropy).unwrap_or(0.04),
        a.lmin.or(s.lmin).unwrap_or(0.05),
    )?;
    let self_loops = SelfLoopConfig::new(a.dwell.or(s.dwell).unwrap_or(100))?;
    let epsilon = a.epsilon.or(s.epsilon).unwrap_or(0.0);
    if !(epsilon >= 0.0) {
        return Err(CliError::Usage(format!("--epsilon must be nonnegative, got {epsilon}")));
    }
    let params = AbstractionParams {
        partitioning,
        self_loops,
        epsilon,
        boundary: if a.half_open || s.half_open.unwrap_or(false) {
            Boundary::HalfOpen
        } else {
            Boundary::Closed
        },
        exit_sink: a.out_sink || s.out_sink.unwrap_or(false),
    };

    let net = load_network(&network)?;
    let traces = load_traces_csv(&traces_path)?;
    let zone = match bounds(
        a.zone_lower.clone().or_else(|| s.zone_lower.clone()),
        a.zone_upper.clone().or_else(|| s.zone_upper.clone()),
        "zone",
    )? {
        Some(zone) => zone,
        None => zone_from_samples(&traces, a.zone_margin.or(s.zone_margin).unwrap_or(0.0))?,
    };
    let input_set = match bounds(
        a.input_lower.clone().or_else(|| s.input_lower.clone()),
        a.input_upper.clone().or_else(|| s.input_upper.clone()),
        "input",
    )? {
        Some(set) => set,
        None if traces.input_dim() > 0 => {
            HyperRectangle::hull_of_points(traces.traces().iter().flat_map(|t| t.samples()).map(|s| &s.input[..]))
                .ok_or_else(|| CliError::Usage("trace file has no samples".into()))?
        }
        None => HyperRectangle::empty_input(),
    };

    let ts = build_abstraction(&net, &traces, &zone, &input_set, &params)?;
    ts.save(&out)?;
    write_text(&dot_path, &export_dot(&ts))?;
    say(
        stdout,
        &format!("{} partitions, {} transitions", ts.len(), ts.transitions().count()),
    )?;
    Ok(0)
}

fn cmd_check(a: &CheckArgs, cfg: &FileConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<i32> {
    let s = &cfg.check;
    let system = required(a.system.clone().or_else(|| s.system.clone()), "system")?;
    let formulas_path = required(a.formulas.clone().or_else(|| s.formulas.clone()), "formulas")?;
    let initial = required(a.initial.or(s.initial), "initial")?;
    let ts = TransitionSystem::load(&system)?;
    let text = std::fs::read_to_string(&formulas_path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", formulas_path.display())))?;
    let report = check_suite(&ts, &formula_lines(&text), initial)?;

    if a.json || s.json.unwrap_or(false) {
        say(stdout, &report.to_json())?;
    } else {
        write!(stdout, "{}", report.to_table()).map_err(|e| CliError::Usage(format!("stdout: {e}")))?;
    }
    if let Some(path) = out.map(Path::to_path_buf).or_else(|| s.out.clone()) {
        write_text(&path, &(report.to_json() + "\n"))?;
    }
    if !report.all_evaluated() {
        return Err(CliError::Assertion("some formulas could not be evaluated".into()));
    }
    if (a.assert_all_true || s.assert_all_true.unwrap_or(false)) && !report.all_true() {
        return Err(CliError::Assertion("not every formula holds".into()));
    }
    Ok(0)
}

fn cmd_export_dot(a: &ExportDotArgs, cfg: &FileConfig, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<i32> {
    let s = &cfg.export_dot;
    let system = required(a.system.clone().or_else(|| s.system.clone()), "system")?;
    let ts = TransitionSystem::load(&system)?;
    let dot = export_dot(&ts);
    match out.map(Path::to_path_buf).or_else(|| s.out.clone()) {
        Some(path) => write_text(&path, &dot)?,
        None => write!(stdout, "{dot}").map_err(|e| CliError::Usage(format!("stdout: {e}")))?,
    }
    Ok(0)
}
