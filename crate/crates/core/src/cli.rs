//! The `nsbm` command line: simulate, fit, summarize, eval.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 1 for internal
//! failures.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::NsbmError;
use crate::io::{self as files, LabelsRecord, MetricsRow};
use crate::metrics::{mean_xi_nmi, nmi, summarize_samples, Level};
use crate::model::{Hyper, NetworkCollection, PosteriorSamples};
use crate::numerics::stream_rng;
use crate::samplers::{run_chain, ChainOptions, InitMode, SamplerKind, DPSBM_ITERATIONS};
use crate::simgen::{gen_collection, personality_benchmark, SimConfig, SimOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nsbm", version, about = "Nested stochastic block model for collections of networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic network collection with planted labels.
    Simulate(SimulateArgs),
    /// Run a sampler and write posterior draws and a trace.
    Fit(FitArgs),
    /// Reduce posterior draws to a minimum-VI point estimate.
    Summarize(SummarizeArgs),
    /// Score point estimates against planted labels.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON generator config.
    #[arg(long, required_unless_present = "personality", conflicts_with = "personality")]
    pub config: Option<PathBuf>,
    /// Generate the three-school personality benchmark with this many networks per school.
    #[arg(long, value_name = "PER_SCHOOL")]
    pub personality: Option<usize>,
    /// Node-count range for the personality benchmark.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [20, 100])]
    pub n_range: Vec<usize>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the class connectivity matrices as JSON.
    #[arg(long)]
    pub eta_out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, env = "NSBM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Ndjson,
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Warm,
    Random,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Network file, or a directory of edge lists with `--format edgelist`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormat::Ndjson)]
    pub format: DataFormat,
    /// g, cg, bg or ibg.
    #[arg(long, default_value = "cg")]
    pub sampler: String,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 500)]
    pub burnin: usize,
    #[arg(long, default_value_t = 5)]
    pub thin: usize,
    /// Class truncation; defaults to min(J, 20).
    #[arg(short = 'K', long)]
    pub classes: Option<usize>,
    /// Community truncation.
    #[arg(short = 'L', long, default_value_t = 20)]
    pub communities: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub pi0: f64,
    #[arg(long, env = "NSBM_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Warm)]
    pub init: InitArg,
    /// Collapsed sweeps of the per-network warm start.
    #[arg(long, default_value_t = DPSBM_ITERATIONS)]
    pub init_iters: usize,
    /// Samples file (NDJSON). With replicates, `-r<i>` is added before the extension.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Trace file (CSV), suffixed like `--out`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Leave `elapsed_ms` empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Independent chains; replicate i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Worker threads for replicates.
    #[arg(long, default_value_t = 1)]
    pub parallel: usize,
    /// Run records (one JSON line per replicate).
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Defaults to the samples file stem.
    #[arg(long)]
    pub run_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// One or more labels files; one CSV row each.
    #[arg(long, required = true, num_args = 1..)]
    pub labels: Vec<PathBuf>,
    /// Network file carrying `z_true` and `xi_true`.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_INPUT, message: e.to_string() }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        CliError { code: EXIT_INTERNAL, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("nsbm: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Summarize(a) => summarize(a),
        Command::Eval(a) => eval(a),
    }
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let out: SimOutput = if let Some(per_school) = a.personality {
        let mut rng = stream_rng(a.seed.unwrap_or(0), 0);
        personality_benchmark(per_school, (a.n_range[0], a.n_range[1]), &mut rng).map_err(CliError::input)?
    } else {
        let path = a.config.as_deref().expect("clap requires --config");
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let cfg = SimConfig::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let seed = a.seed.or(cfg.seed).unwrap_or(0);
        gen_collection(&cfg, &mut stream_rng(seed, 0)).map_err(CliError::input)?
    };
    if out.clamped_pairs > 0 {
        eprintln!(
            "nsbm: warning: {} node pairs had scaled edge probability above 1 and were clamped",
            out.clamped_pairs
        );
    }
    files::write_networks(&out.collection, create(&a.out)?).map_err(CliError::internal)?;
    if let Some(path) = &a.eta_out {
        let rows: Vec<Vec<Vec<f64>>> = out.eta.iter().map(|e| e.to_rows()).collect();
        let mut f = create(path)?;
        serde_json::to_writer(&mut f, &rows).map_err(CliError::internal)?;
        f.write_all(b"\n").map_err(CliError::internal)?;
    }
    Ok(())
}

/// `path` with `-r<i>` inserted before the extension.
pub fn replicate_path(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-r{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}-r{i}"),
    };
    path.with_file_name(name)
}

#[derive(Debug, Serialize)]
struct RunRecord {
    run_id: String,
    sampler: String,
    hyper: Hyper,
    seed: u64,
    iterations: usize,
    burnin: usize,
    thin: usize,
    draws: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
    samples: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<PathBuf>,
}

fn load_data(path: &Path, format: DataFormat) -> crate::Result<NetworkCollection> {
    match format {
        DataFormat::Ndjson => files::read_networks_file(path),
        DataFormat::Edgelist => files::read_edgelist_dir(path),
    }
}

fn fit(a: FitArgs) -> CliResult<()> {
    let kind: SamplerKind = a.sampler.parse().map_err(CliError::input)?;
    let data = load_data(&a.data, a.format).map_err(|e| CliError::input(format!("{}: {e}", a.data.display())))?;
    let defaults = Hyper::defaults_for(data.len());
    let hyper = Hyper {
        alpha: a.alpha,
        beta: a.beta,
        w0: a.w0,
        pi0: a.pi0,
        classes: a.classes.unwrap_or(defaults.classes),
        communities: a.communities,
    };
    hyper.validate().map_err(CliError::input)?;
    if a.replicates == 0 || a.parallel == 0 {
        return Err(CliError::input("--replicates and --parallel must be at least 1"));
    }
    let base = ChainOptions {
        iterations: a.iters,
        burnin: a.burnin,
        thin: a.thin,
        seed: a.seed,
        init: match a.init {
            InitArg::Warm => InitMode::Warm,
            InitArg::Random => InitMode::Random,
        },
        init_iterations: a.init_iters,
        record_timing: !a.no_timing,
    };
    base.validate().map_err(CliError::input)?;

    let run_one = |i: usize| -> crate::Result<(PosteriorSamples, f64)> {
        let opts = ChainOptions { seed: a.seed.wrapping_add(i as u64), ..base.clone() };
        let start = Instant::now();
        let samples = run_chain(kind, &data, &hyper, &opts)?;
        Ok((samples, start.elapsed().as_secs_f64() * 1e3))
    };
    let results: Vec<crate::Result<(PosteriorSamples, f64)>> = if a.replicates > 1 && a.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(a.parallel)
            .build()
            .map_err(CliError::internal)?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..a.replicates).into_par_iter().map(run_one).collect()
        })
    } else {
        (0..a.replicates).map(run_one).collect()
    };

    let mut records = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        let (samples, elapsed) = result.map_err(CliError::internal)?;
        let suffixed = |p: &Path| if a.replicates > 1 { replicate_path(p, i) } else { p.to_path_buf() };
        let out = suffixed(&a.out);
        files::write_draws(&samples.draws, create(&out)?).map_err(CliError::internal)?;
        let trace = a.trace.as_deref().map(suffixed);
        if let Some(t) = &trace {
            files::write_trace(&samples.trace, create(t)?).map_err(CliError::internal)?;
        }
        records.push(RunRecord {
            run_id: out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            sampler: kind.short_name().into(),
            hyper,
            seed: a.seed.wrapping_add(i as u64),
            iterations: a.iters,
            burnin: a.burnin,
            thin: a.thin,
            draws: samples.draws.len(),
            elapsed_ms: (!a.no_timing).then_some(elapsed),
            samples: out,
            trace,
        });
    }
    if let Some(path) = &a.record {
        let mut f = create(path)?;
        for r in &records {
            serde_json::to_writer(&mut f, r).map_err(CliError::internal)?;
            f.write_all(b"\n").map_err(CliError::internal)?;
        }
    }
    Ok(())
}

fn summarize(a: SummarizeArgs) -> CliResult<()> {
    let draws = files::read_draws(open(&a.samples)?).map_err(CliError::input)?;
    if draws.is_empty() {
        return Err(CliError::input(format!("{}: no draws", a.samples.display())));
    }
    let networks = draws[0].xi.len();
    if draws.iter().any(|d| d.z.len() != networks || d.xi.len() != networks) {
        return Err(CliError::input("draws disagree on the number of networks"));
    }
    let samples = PosteriorSamples { draws, trace: Vec::new() };
    let input = |e: NsbmError| CliError::input(e);
    let z = summarize_samples(&samples, Level::Z).map_err(input)?;
    let xi = (0..networks)
        .map(|j| summarize_samples(&samples, Level::Xi(j)))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(input)?;
    let run_id = a
        .run_id
        .unwrap_or_else(|| a.samples.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    files::write_labels(&LabelsRecord { run_id, z, xi }, create(&a.out)?).map_err(CliError::internal)
}

fn eval(a: EvalArgs) -> CliResult<()> {
    let truth = files::read_networks_file(&a.truth).map_err(|e| CliError::input(format!("{}: {e}", a.truth.display())))?;
    let (z_true, xi_true) = match (truth.z_truth(), truth.xi_truth()) {
        (Some(z), Some(xi)) => (z, xi),
        _ => return Err(CliError::input(format!("{}: every network needs z_true and xi_true", a.truth.display()))),
    };
    let mut rows = Vec::new();
    for path in &a.labels {
        let labels = files::read_labels(open(path)?).map_err(CliError::input)?;
        let where_ = |e: NsbmError| CliError::input(format!("{}: {e}", path.display()));
        rows.push(MetricsRow {
            run_id: labels.run_id.clone(),
            z_nmi: nmi(&labels.z, &z_true).map_err(where_)?,
            mean_xi_nmi: mean_xi_nmi(&labels.xi, &xi_true).map_err(where_)?,
        });
    }
    files::write_metrics(&rows, create(&a.out)?).map_err(CliError::internal)
}
