//! `haflab`: matrix functions, field and Cox sampling, and the Fock-space
//! verification battery from the command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage,
//! configuration or I/O error.

mod battery;
mod config;

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use haflab::kernels::CellSet;
use haflab::matfun::{alpha_det, bench_hafnian, determinant, hafnian, permanent, ComplexMatrix, ComplexSymmetricMatrix, HafnianAlgo, Limits};
use haflab::report::{CheckRecord, MomentReport};
use haflab::sampling::{batch_standard_error, cox_patterns, field_samples, poisson_patterns, write_patterns_csv, PointPattern};
use haflab::{Error, Result, C64};
use serde::Serialize;

use battery::Plan;
use config::{Loaded, Source};

#[derive(Parser)]
#[command(name = "haflab", version, about = "Hafnian point processes: matrix functions, sampling and Fock-space checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a matrix function of a matrix read from a text file.
    Matfun(MatfunArgs),
    /// Gaussian field sampling.
    Field {
        #[command(subcommand)]
        action: SampleAction,
    },
    /// Cox (or Poisson) point pattern sampling.
    Cox {
        #[command(subcommand)]
        action: SampleAction,
    },
    /// Run the verification battery and write one JSON record per check.
    Verify(RunArgs),
    /// Time both hafnian algorithms on random complex symmetric matrices.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum SampleAction {
    Sample(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatfunOp {
    Haf,
    Perm,
    Det,
    Alphadet,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Enum,
    Dp,
}

#[derive(Args)]
struct MatfunArgs {
    #[arg(value_enum)]
    op: MatfunOp,
    file: PathBuf,
    #[arg(long, value_enum, default_value = "dp")]
    algo: Algo,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Output directory for `sample`, report file for `verify`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite existing outputs instead of refusing (sample) or appending (verify).
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![4, 6, 8, 10, 12])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("haflab: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Matfun(args) => matfun(&args),
        Command::Field { action: SampleAction::Sample(args) } => field_sample(&args),
        Command::Cox { action: SampleAction::Sample(args) } => cox_sample(&args),
        Command::Verify(args) => verify(&args),
        Command::Bench(args) => bench(&args),
    }
}

/// `-0` prints as `0`.
fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn matfun(args: &MatfunArgs) -> Result<bool> {
    let text = fs::read_to_string(&args.file)?;
    let m = ComplexMatrix::parse_text(&text)?;
    let limits = Limits::default();
    let value = match args.op {
        MatfunOp::Haf => {
            let algo = match args.algo {
                Algo::Enum => HafnianAlgo::Enum,
                Algo::Dp => HafnianAlgo::Dp,
            };
            hafnian(&ComplexSymmetricMatrix::new(m)?, algo, &limits)?
        }
        MatfunOp::Perm => permanent(&m, &limits)?,
        MatfunOp::Det => determinant(&m),
        MatfunOp::Alphadet => alpha_det(&m, args.alpha, &limits)?,
    };
    println!("{} {}", clean(value.re), clean(value.im));
    Ok(true)
}

fn load(args: &RunArgs) -> Result<Loaded> {
    let mut loaded = Loaded::read(&args.config)?;
    if let Some(seed) = args.seed {
        loaded.config.seed = seed;
    }
    if let Some(r) = args.replicates {
        loaded.config.replicates = r;
    }
    if let Some(out) = &args.out {
        loaded.config.output = Some(out.clone());
    }
    Ok(loaded)
}

/// Output directory with the given files absent, unless `force`.
fn prepare_dir(loaded: &Loaded, files: &[&str], force: bool) -> Result<PathBuf> {
    let dir = loaded
        .config
        .output
        .clone()
        .ok_or_else(|| Error::Config("no output directory: pass --out or set \"output\"".into()))?;
    fs::create_dir_all(&dir)?;
    if !force {
        if let Some(f) = files.iter().map(|f| dir.join(f)).find(|p| p.exists()) {
            return Err(Error::Config(format!("{} exists; pass --force to overwrite", f.display())));
        }
    }
    Ok(dir)
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: &'a str,
    seed: u64,
    source: &'a str,
    replicates: usize,
    moments: Vec<MomentReport>,
}

fn write_summary(dir: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    Ok(())
}

fn mean_report(label: String, values: &[f64]) -> MomentReport {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    MomentReport::estimate(label, mean, batch_standard_error(values), values.len() as u64)
}

fn field_sample(args: &RunArgs) -> Result<bool> {
    let loaded = load(args)?;
    let Source::Cox(model) = loaded.source()? else {
        return Err(Error::Config("field sampling needs a Gaussian field model, not a poisson source".into()));
    };
    let dir = prepare_dir(&loaded, &["fields.csv", "summary.json"], args.force)?;
    let (seed, replicates) = (loaded.config.seed, loaded.config.replicates);
    let fields: Vec<Vec<C64>> = field_samples(&model, replicates, seed)?.into_iter().map(|f| f.values).collect();

    let mut csv = BufWriter::new(File::create(dir.join("fields.csv"))?);
    writeln!(csv, "replicate,cell_index,re,im")?;
    for (r, g) in fields.iter().enumerate() {
        for (m, z) in g.iter().enumerate() {
            writeln!(csv, "{r},{m},{},{}", z.re, z.im)?;
        }
    }
    csv.flush()?;

    let mut moments = Vec::new();
    if replicates > 0 {
        for m in 0..model.cells() {
            let values: Vec<f64> = fields.iter().map(|g| g[m].norm_sqr()).collect();
            moments.push(mean_report(format!("E|G|^2 at cell {m}"), &values));
            moments.push(MomentReport::exact(format!("K1 at cell {m}"), model.k1()[(m, m)].re));
        }
    }
    let hash = loaded.hash();
    write_summary(&dir, &Summary { config_hash: &hash, seed, source: "cox", replicates, moments })?;
    Ok(true)
}

fn cox_sample(args: &RunArgs) -> Result<bool> {
    let loaded = load(args)?;
    let source = loaded.source()?;
    let cells = source.cells();
    let boxes = if loaded.config.boxes.is_empty() { Vec::new() } else { loaded.boxes(cells)? };
    let dir = prepare_dir(&loaded, &["patterns.csv", "summary.json"], args.force)?;
    let (seed, replicates) = (loaded.config.seed, loaded.config.replicates);
    let (kind, patterns): (&str, Vec<PointPattern>) = match &source {
        Source::Cox(model) => ("cox", cox_patterns(model, replicates, seed)?),
        Source::Poisson(profile) => ("poisson", poisson_patterns(profile, replicates, seed)),
    };

    let mut csv = BufWriter::new(File::create(dir.join("patterns.csv"))?);
    write_patterns_csv(&mut csv, &patterns)?;
    csv.flush()?;

    let mut moments = Vec::new();
    if replicates > 0 {
        let window = CellSet::new(0..cells);
        for b in std::iter::once(&window).chain(&boxes) {
            let values: Vec<f64> = patterns.iter().map(|p| p.count(b) as f64).collect();
            moments.push(mean_report(format!("mean count {:?}", b.as_slice()), &values));
        }
    }
    let hash = loaded.hash();
    write_summary(&dir, &Summary { config_hash: &hash, seed, source: kind, replicates, moments })?;
    Ok(true)
}

/// Report sink: the `--out` file (appended to unless `force`) or stdout.
fn report_sink(path: Option<&Path>, force: bool) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let file = OpenOptions::new().create(true).write(true).append(!force).truncate(force).open(p)?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct ReportLine<'a> {
    config_hash: &'a str,
    seed: u64,
    #[serde(flatten)]
    record: &'a CheckRecord,
}

fn verify(args: &RunArgs) -> Result<bool> {
    let loaded = load(args)?;
    let source = loaded.source()?;
    let plan = Plan {
        seed: loaded.config.seed,
        boxes: loaded.boxes(source.cells())?,
        orders: loaded.config.orders.clone(),
        truncation: loaded.truncation(),
        replicates: loaded.config.replicates,
        mc_samples: loaded.config.mc_samples,
        quadrature: loaded.config.quadrature,
    };
    let records = match &source {
        Source::Cox(model) => battery::cox_battery(model, &plan),
        Source::Poisson(profile) => battery::poisson_battery(profile, &plan),
    };
    let hash = loaded.hash();
    let mut sink = report_sink(loaded.config.output.as_deref(), args.force)?;
    for record in &records {
        let line = ReportLine { config_hash: &hash, seed: plan.seed, record };
        writeln!(sink, "{}", serde_json::to_string(&line)?)?;
    }
    sink.flush()?;
    let failed: Vec<&CheckRecord> = records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {}: residual {:e} > {:e}{}", r.name, r.residual, r.tolerance, r.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default());
    }
    eprintln!("{} checks, {} failed", records.len(), failed.len());
    Ok(failed.is_empty())
}

fn bench(args: &BenchArgs) -> Result<bool> {
    let rows = bench_hafnian(&args.sizes, args.reps, &Limits::default(), args.seed)?;
    let mut sink = report_sink(args.out.as_deref(), args.force)?;
    for row in &rows {
        writeln!(sink, "{}", serde_json::to_string(row)?)?;
    }
    sink.flush()?;
    Ok(true)
}
