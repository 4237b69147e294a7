use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use qsync::harness::io::{read_json, read_numeric_csv, write_json};
use qsync::harness::{emit_plots, run_sweep, Pipeline, RunOutcome, SweepParameter, SweepPlan};
use qsync::instanton::{fit_r0, ChainOptions, CorrelationEstimate};
use qsync::model::{load_config_file, make_config, ModelConfig, RawParams, SpectrumSection};
use qsync::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "qsync",
    version,
    about = "Frequency synchronization in disordered qubit arrays"
)]
struct Cli {
    /// Versioned TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed; every realization seed is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "qsync-out")]
    out: PathBuf,
    /// Disorder realizations per point.
    #[arg(long, global = true, value_name = "N")]
    realizations: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Draw SVG figures into <out>/plots after the run.
    #[arg(long, global = true)]
    plots: bool,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// Comma-separated κ values, one sweep point each.
    #[arg(long, value_delimiter = ',', value_name = "CSV")]
    kappa_list: Vec<f64>,
    /// Swept parameter for --values.
    #[arg(long, value_enum, requires = "values")]
    param: Option<ParamArg>,
    /// Comma-separated values of --param.
    #[arg(long, value_delimiter = ',', value_name = "CSV", requires = "param")]
    values: Vec<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct ChainArgs {
    /// Metropolis burn-in sweeps.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Metropolis production sweeps.
    #[arg(long)]
    sweeps: Option<usize>,
    /// Keep every n-th production sweep.
    #[arg(long)]
    thin: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw disorder realizations.
    SampleDisorder(SweepArgs),
    /// Frequency fields by one method.
    Simulate {
        #[arg(long, value_enum, default_value_t = MethodArg::Saddle)]
        method: MethodArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Transmission spectra and drop counts from saddle-filtered fields.
    Spectrum(SweepArgs),
    /// Exact spin-chain spectra and localization lengths.
    Oracle(SweepArgs),
    /// Any pipeline over a list of parameter values.
    Sweep {
        #[arg(long, value_enum, default_value_t = PipelineArg::Saddle)]
        pipeline: PipelineArg,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        chain: ChainArgs,
    },
    /// Fit the correlation radius to a correlation CSV and its JSON sidecar.
    FitR0 {
        /// correlation_<method>.csv written by a run.
        input: PathBuf,
    },
    /// Draw SVG figures for an existing run directory.
    Plot {
        /// Run directory (defaults to --out).
        run_dir: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Noninteracting,
    Mcmc,
    Saddle,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum PipelineArg {
    Disorder,
    Noninteracting,
    Mcmc,
    Saddle,
    Spectrum,
    Oracle,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ParamArg {
    Kappa,
    Temperature,
    NSites,
    Dimension,
}

impl From<PipelineArg> for Pipeline {
    fn from(p: PipelineArg) -> Self {
        match p {
            PipelineArg::Disorder => Pipeline::Disorder,
            PipelineArg::Noninteracting => Pipeline::Noninteracting,
            PipelineArg::Mcmc => Pipeline::Mcmc,
            PipelineArg::Saddle => Pipeline::Saddle,
            PipelineArg::Spectrum => Pipeline::Spectrum,
            PipelineArg::Oracle => Pipeline::Oracle,
            PipelineArg::All => Pipeline::All,
        }
    }
}

impl From<ParamArg> for SweepParameter {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Kappa => SweepParameter::Kappa,
            ParamArg::Temperature => SweepParameter::Temperature,
            ParamArg::NSites => SweepParameter::NSites,
            ParamArg::Dimension => SweepParameter::Dimension,
        }
    }
}

struct Loaded {
    model: ModelConfig,
    chain: ChainOptions,
    spectrum: SpectrumSection,
}

fn load(cli: &Cli) -> Result<Loaded> {
    match &cli.config {
        Some(path) => {
            let file = load_config_file(path)?;
            Ok(Loaded {
                model: file.model_config()?,
                chain: file
                    .mcmc
                    .as_ref()
                    .map(ChainOptions::from)
                    .unwrap_or_default(),
                spectrum: file.spectrum.clone().unwrap_or_default(),
            })
        }
        None => Ok(Loaded {
            model: make_config(&RawParams::dimensionless(4096, 0.01, 0.04, 0.1))?,
            chain: ChainOptions::default(),
            spectrum: SpectrumSection::default(),
        }),
    }
}

fn plan(
    cli: &Cli,
    pipeline: Pipeline,
    sweep: &SweepArgs,
    chain: Option<&ChainArgs>,
) -> Result<SweepPlan> {
    let loaded = load(cli)?;
    let mut plan = SweepPlan::new(loaded.model, pipeline, cli.seed, &cli.out);
    plan.realizations = cli.realizations.unwrap_or(1);
    plan.threads = cli.threads;
    plan.chain = loaded.chain;
    plan.spectrum = loaded.spectrum;
    if let Some(c) = chain {
        plan.chain.burn_in_sweeps = c.burn_in.unwrap_or(plan.chain.burn_in_sweeps);
        plan.chain.sweeps = c.sweeps.unwrap_or(plan.chain.sweeps);
        plan.chain.thin = c.thin.unwrap_or(plan.chain.thin);
    }
    match (sweep.kappa_list.is_empty(), sweep.param) {
        (false, Some(_)) => {
            return Err(Error::Config(
                "use either --kappa-list or --param/--values".into(),
            ))
        }
        (false, None) => plan.values = sweep.kappa_list.clone(),
        (true, Some(p)) => {
            plan.parameter = p.into();
            plan.values = sweep.values.clone();
        }
        (true, None) => {}
    }
    Ok(plan)
}

fn summarize(outcome: &RunOutcome) {
    let m = &outcome.manifest;
    println!(
        "{} pipeline: {} point(s) x {} realization(s), {} failed, {} file(s) in {}",
        m.pipeline,
        m.points.len(),
        m.realizations,
        m.failures.len(),
        m.files.len() + 1,
        outcome.run_dir.display()
    );
    for p in &outcome.points {
        let mut line = format!("point {:03}  kappa {:.6}", p.index, p.kappa);
        if let Some(r0) = p.saddle_r0_mean {
            line += &format!("  saddle r0 {r0:.6}");
        }
        for (label, est) in &p.correlations {
            if let Some(r0) = est.fitted_r0 {
                line += &format!("  fitted r0 ({label}) {r0:.6}");
            }
        }
        if let (Some(mean), Some(pred)) = (p.drop_mean, p.drop_predicted) {
            line += &format!("  drops {mean:.3} (predicted {pred:.3})");
        }
        if let Some(l) = &p.localization {
            line += &format!("  loc length {:.6}", l.loc_length);
        }
        println!("{line}");
    }
    for w in &m.warnings {
        println!("warning: {w}");
    }
}

fn run_plan(cli: &Cli, plan: SweepPlan) -> Result<()> {
    info!("writing to {}", plan.out_dir.display());
    let outcome = run_sweep(&plan)?;
    summarize(&outcome);
    if cli.plots {
        plots(&outcome.run_dir)?;
    }
    Ok(())
}

fn plots(dir: &Path) -> Result<()> {
    let report = emit_plots(dir)?;
    for p in &report.written {
        println!("wrote {}", p.display());
    }
    for s in &report.skipped {
        println!("{s}");
    }
    Ok(())
}

fn fit_command(cli: &Cli, input: &Path) -> Result<()> {
    let sidecar = input.with_extension("json");
    let meta: serde_json::Value = read_json(&sidecar)?;
    let table = read_numeric_csv(input)?;
    let column = |name: &str| {
        table.column(name).ok_or_else(|| Error::Parse {
            path: input.to_path_buf(),
            message: format!("missing column {name:?}"),
        })
    };
    let field = |name: &str| {
        meta.get(name).cloned().ok_or_else(|| Error::Parse {
            path: sidecar.clone(),
            message: format!("missing field {name:?}"),
        })
    };
    let as_parse = |e: serde_json::Error| Error::Parse {
        path: sidecar.clone(),
        message: e.to_string(),
    };
    let mut est = CorrelationEstimate {
        separations: column("separation")?,
        r_values: column("r")?,
        r_stderr: column("r_stderr")?,
        n_realizations: serde_json::from_value(field("n_realizations")?).map_err(as_parse)?,
        length: serde_json::from_value(field("length")?).map_err(as_parse)?,
        config_hash: serde_json::from_value(field("config_hash")?).map_err(as_parse)?,
        fitted_r0: None,
        fitted_amplitude: None,
        fit_residual: None,
    };
    let fit = fit_r0(&est)?;
    est.fitted_r0 = Some(fit.r0);
    println!(
        "r0 {:.16e}  amplitude {:.16e}  residual {:.6e}{}",
        fit.r0,
        fit.amplitude,
        fit.residual,
        if fit.boundary_pinned {
            "  (pinned to search boundary)"
        } else {
            ""
        }
    );
    let out = cli.out.join("fit_r0.json");
    write_json(
        &out,
        &serde_json::json!({
            "input": input.display().to_string(),
            "config_hash": est.config_hash,
            "fit": fit,
        }),
    )?;
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::SampleDisorder(s) => {
            let mut p = plan(cli, Pipeline::Disorder, s, None)?;
            p.write_fields = false;
            run_plan(cli, p)
        }
        Command::Simulate {
            method,
            sweep,
            chain,
        } => {
            let pipeline = match method {
                MethodArg::Noninteracting => Pipeline::Noninteracting,
                MethodArg::Mcmc => Pipeline::Mcmc,
                MethodArg::Saddle => Pipeline::Saddle,
            };
            run_plan(cli, plan(cli, pipeline, sweep, Some(chain))?)
        }
        Command::Spectrum(s) => run_plan(cli, plan(cli, Pipeline::Spectrum, s, None)?),
        Command::Oracle(s) => run_plan(cli, plan(cli, Pipeline::Oracle, s, None)?),
        Command::Sweep {
            pipeline,
            sweep,
            chain,
        } => run_plan(cli, plan(cli, (*pipeline).into(), sweep, Some(chain))?),
        Command::FitR0 { input } => fit_command(cli, input),
        Command::Plot { run_dir } => plots(run_dir.as_deref().unwrap_or(&cli.out)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
