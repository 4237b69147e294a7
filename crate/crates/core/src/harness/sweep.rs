//! Seeded parameter sweeps with deterministic on-disk output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{ensure_dir, fmt_f64, write_csv, write_json};
use super::manifest::{
    write_manifest, FailureRecord, PointRecord, RunManifest, Timings, MANIFEST_SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::instanton::{
    closed_form_r0, closed_form_r0_2d, correlation_from_realizations, default_max_separation,
    realization_correlation, saddle_filter, sample_mcmc, sample_noninteracting,
    synchronized_filter, ChainOptions, CorrelationEstimate, R0Fit, SaddleSolution,
};
use crate::model::rng::derive_seed;
use crate::model::{
    sample_disorder, FrequencyField, Method, ModelConfig, RawParams, SpectrumSection,
};
use crate::spectrum::{detect_drops, predicted_drop_count, transmission, SpectrumParams};
use crate::spinon::{
    aggregate_point, band_center_statistics, dense_solve, free_fermion_solve, many_body_levels,
    partition_check, spinon_energies, LocalizationPoint, PartitionCheck, SpinChainSpec,
};
use crate::stats::{linear_fit, mean_stderr, LineFit};

/// Chains up to this length get eigenvectors, IPRs and localization lengths
/// per mode; longer chains get energies only.
pub const FULL_SPINON_SITES: usize = 1024;
/// Chains up to this length are cross-checked against dense diagonalization.
pub const DENSE_CHECK_SITES: usize = 10;
/// Drops shallower than this many single-line depths are ignored when counting.
pub const COUNT_THRESHOLD_UNITS: f64 = 0.5;
/// Estimator label for the correlator of each realization's thermal-mean
/// MCMC field, as opposed to the sample-averaged correlator labelled `mcmc`.
pub const THERMAL_MEAN_LABEL: &str = "mcmc_thermal_mean";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Disorder realizations only.
    Disorder,
    Noninteracting,
    Mcmc,
    Saddle,
    Spectrum,
    Oracle,
    All,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Disorder => "disorder",
            Pipeline::Noninteracting => "noninteracting",
            Pipeline::Mcmc => "mcmc",
            Pipeline::Saddle => "saddle",
            Pipeline::Spectrum => "spectrum",
            Pipeline::Oracle => "oracle",
            Pipeline::All => "all",
        }
    }

    fn runs(self, stage: Pipeline) -> bool {
        self == stage || (self == Pipeline::All && stage != Pipeline::Disorder)
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "disorder" => Pipeline::Disorder,
            "noninteracting" => Pipeline::Noninteracting,
            "mcmc" => Pipeline::Mcmc,
            "saddle" => Pipeline::Saddle,
            "spectrum" => Pipeline::Spectrum,
            "oracle" => Pipeline::Oracle,
            "all" => Pipeline::All,
            other => return Err(Error::Config(format!("unknown pipeline {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Kappa,
    Temperature,
    NSites,
    Dimension,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Kappa => "kappa",
            SweepParameter::Temperature => "temperature",
            SweepParameter::NSites => "n_sites",
            SweepParameter::Dimension => "dimension",
        }
    }

    pub fn apply(self, base: &ModelConfig, value: f64) -> Result<ModelConfig> {
        let integral = |what: &str| -> Result<usize> {
            if value.is_finite() && value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Config(format!(
                    "{what} must be a non-negative integer, got {value}"
                )))
            }
        };
        match self {
            SweepParameter::Kappa => base.with_kappa(value),
            SweepParameter::Temperature => base.with_temperature(value),
            SweepParameter::NSites => base.with_n_sites(integral("n_sites")?),
            SweepParameter::Dimension => {
                let d = integral("dimension")?;
                base.with_dimension(
                    u8::try_from(d).map_err(|_| Error::Config(format!("dimension {d}")))?,
                )
            }
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kappa" => SweepParameter::Kappa,
            "temperature" => SweepParameter::Temperature,
            "n_sites" => SweepParameter::NSites,
            "dimension" => SweepParameter::Dimension,
            other => return Err(Error::Config(format!("unknown sweep parameter {other:?}"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub base: ModelConfig,
    pub parameter: SweepParameter,
    /// Parameter values, one sweep point each. Empty means a single point at `base`.
    pub values: Vec<f64>,
    pub realizations: usize,
    pub pipeline: Pipeline,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    pub chain: ChainOptions,
    pub spectrum: SpectrumSection,
    /// Write per-realization frequency fields.
    pub write_fields: bool,
}

impl SweepPlan {
    pub fn new(
        base: ModelConfig,
        pipeline: Pipeline,
        master_seed: u64,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        SweepPlan {
            base,
            parameter: SweepParameter::Kappa,
            values: Vec::new(),
            realizations: 1,
            pipeline,
            master_seed,
            out_dir: out_dir.into(),
            threads: None,
            chain: ChainOptions::default(),
            spectrum: SpectrumSection::default(),
            write_fields: true,
        }
    }

    /// Model configuration of every sweep point, validated up front.
    pub fn point_configs(&self) -> Result<Vec<(Option<f64>, ModelConfig)>> {
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.values.is_empty() {
            return Ok(vec![(None, self.base.clone())]);
        }
        self.values
            .iter()
            .map(|&v| Ok((Some(v), self.parameter.apply(&self.base, v)?)))
            .collect()
    }
}

/// Aggregates for one sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub index: usize,
    pub value: Option<f64>,
    pub config: RawParams,
    pub kappa: f64,
    pub completed: usize,
    pub failed: usize,
    /// Keyed by estimator label: a method tag, or `mcmc_thermal_mean`.
    pub correlations: Vec<(String, CorrelationEstimate)>,
    pub saddle_r0_mean: Option<f64>,
    pub drop_mean: Option<f64>,
    pub drop_stderr: Option<f64>,
    pub drop_predicted: Option<f64>,
    pub localization: Option<LocalizationPoint>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub manifest: RunManifest,
    pub points: Vec<PointSummary>,
}

#[derive(Debug, Serialize)]
struct FieldSidecar<'a> {
    schema_version: u32,
    kind: &'static str,
    method: Method,
    point: usize,
    realization: usize,
    realization_seed: u64,
    master_seed: u64,
    config_hash: &'a str,
    model: RawParams,
    side: usize,
    columns: &'static [&'static str],
    mean_frequency: f64,
    details: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct SpinonSidecar {
    schema_version: u32,
    kind: &'static str,
    point: usize,
    realization: usize,
    realization_seed: u64,
    config_hash: String,
    n_sites: usize,
    coupling: f64,
    vacuum_parity: crate::spinon::Parity,
    ground_energy: f64,
    band_center_rate: Option<f64>,
    band_center_inverse_ipr: Option<f64>,
    dense_max_abs_diff: Option<f64>,
    partition: Option<PartitionCheck>,
}

/// One file to be written once the whole realization has succeeded.
enum Artifact {
    Csv {
        path: PathBuf,
        header: Vec<&'static str>,
        rows: Vec<Vec<String>>,
    },
    Json {
        path: PathBuf,
        value: serde_json::Value,
    },
}

impl Artifact {
    fn write(self, root: &Path) -> Result<()> {
        match self {
            Artifact::Csv { path, header, rows } => write_csv(&root.join(path), &header, rows),
            Artifact::Json { path, value } => write_json(&root.join(path), &value),
        }
    }
}

#[derive(Default)]
struct RealizationResult {
    artifacts: Vec<Artifact>,
    correlations: Vec<(String, Vec<f64>)>,
    saddle_r0: Option<f64>,
    drops: Option<(usize, usize)>,
    band_center: Option<(f64, f64)>,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn field_artifacts(
    field: &FrequencyField,
    splittings: &[f64],
    cfg: &ModelConfig,
    point: usize,
    realization: usize,
    master_seed: u64,
    details: serde_json::Value,
) -> [Artifact; 2] {
    let stem = format!(
        "point_{point:03}/fields/r{realization:04}_{}",
        field.method.tag()
    );
    let side = cfg.side();
    let (columns, rows): (&'static [&'static str], Vec<Vec<String>>) = if cfg.dimension() == 1 {
        (
            &["site", "splitting", "frequency"],
            (0..field.len())
                .map(|i| {
                    vec![
                        i.to_string(),
                        fmt_f64(splittings[i]),
                        fmt_f64(field.frequencies[i]),
                    ]
                })
                .collect(),
        )
    } else {
        (
            &["site", "x", "y", "splitting", "frequency"],
            (0..field.len())
                .map(|i| {
                    vec![
                        i.to_string(),
                        (i % side).to_string(),
                        (i / side).to_string(),
                        fmt_f64(splittings[i]),
                        fmt_f64(field.frequencies[i]),
                    ]
                })
                .collect(),
        )
    };
    let sidecar = FieldSidecar {
        schema_version: MANIFEST_SCHEMA_VERSION,
        kind: "frequency_field",
        method: field.method,
        point,
        realization,
        realization_seed: field.realization_seed,
        master_seed,
        config_hash: &field.config_hash,
        model: cfg.to_raw(),
        side,
        columns,
        mean_frequency: field.mean(),
        details,
    };
    [
        Artifact::Csv {
            path: PathBuf::from(format!("{stem}.csv")),
            header: columns.to_vec(),
            rows,
        },
        Artifact::Json {
            path: PathBuf::from(format!("{stem}.json")),
            value: to_json(&sidecar),
        },
    ]
}

fn run_realization(
    plan: &SweepPlan,
    cfg: &ModelConfig,
    point: usize,
    r: usize,
) -> Result<RealizationResult> {
    let seed = derive_seed(plan.master_seed, point as u64, r as u64);
    let disorder = sample_disorder(cfg, seed);
    let max_sep = default_max_separation(cfg);
    let mut out = RealizationResult::default();
    let emit_field = |out: &mut RealizationResult, field: &FrequencyField, details| {
        if plan.write_fields {
            let arts = field_artifacts(
                field,
                &disorder.splittings,
                cfg,
                point,
                r,
                plan.master_seed,
                details,
            );
            out.artifacts.extend(arts);
        }
    };

    if plan.pipeline.runs(Pipeline::Disorder) {
        let stem = format!("point_{point:03}/disorder/r{r:04}");
        out.artifacts.push(Artifact::Csv {
            path: PathBuf::from(format!("{stem}.csv")),
            header: vec!["site", "splitting"],
            rows: disorder
                .splittings
                .iter()
                .enumerate()
                .map(|(i, d)| vec![i.to_string(), fmt_f64(*d)])
                .collect(),
        });
        out.artifacts.push(Artifact::Json {
            path: PathBuf::from(format!("{stem}.json")),
            value: serde_json::json!({
                "schema_version": MANIFEST_SCHEMA_VERSION,
                "kind": "disorder",
                "point": point,
                "realization": r,
                "realization_seed": seed,
                "master_seed": plan.master_seed,
                "config_hash": disorder.config_hash,
                "model": cfg.to_raw(),
            }),
        });
    }

    if plan.pipeline.runs(Pipeline::Noninteracting) {
        let field = sample_noninteracting(&disorder, cfg.temperature(), seed)?;
        out.correlations.push((
            field.method.tag().into(),
            realization_correlation(std::slice::from_ref(&field), cfg, max_sep)?,
        ));
        emit_field(
            &mut out,
            &field,
            serde_json::json!({ "temperature": cfg.temperature() }),
        );
    }

    if plan.pipeline.runs(Pipeline::Mcmc) {
        let run = sample_mcmc(&disorder, cfg, &plan.chain, seed)?;
        let n = cfg.n_sites();
        let mut mean = vec![0.0; n];
        for f in &run.fields {
            mean.iter_mut()
                .zip(&f.frequencies)
                .for_each(|(m, w)| *m += w);
        }
        mean.iter_mut().for_each(|m| *m /= run.fields.len() as f64);
        let field = FrequencyField::new(mean, Method::Mcmc, &disorder)?;
        out.correlations.push((
            field.method.tag().into(),
            realization_correlation(&run.fields, cfg, max_sep)?,
        ));
        out.correlations.push((
            THERMAL_MEAN_LABEL.into(),
            realization_correlation(std::slice::from_ref(&field), cfg, max_sep)?,
        ));
        let details = serde_json::json!({
            "samples": run.fields.len(),
            "acceptance_rate": run.acceptance_rate,
            "proposal_width": run.proposal_width,
            "tau_mean_frequency": run.tau_mean_frequency,
            "chain": plan.chain,
        });
        emit_field(&mut out, &field, details);
    }

    if plan.pipeline.runs(Pipeline::Saddle) {
        let (field, sol): (FrequencyField, SaddleSolution) = saddle_filter(&disorder, cfg)?;
        out.saddle_r0 = Some(sol.r0);
        out.correlations.push((
            field.method.tag().into(),
            realization_correlation(std::slice::from_ref(&field), cfg, max_sep)?,
        ));
        emit_field(&mut out, &field, to_json(&sol));
    }

    if plan.pipeline.runs(Pipeline::Spectrum) {
        let (field, r0) = synchronized_filter(&disorder, cfg)?;
        let params = SpectrumParams::from_section(&plan.spectrum, cfg, &field.frequencies)?;
        let spec = transmission(&field, &params)?;
        let unit = params.unit_depth();
        let all = detect_drops(&spec, COUNT_THRESHOLD_UNITS * unit);
        let giant = detect_drops(&spec, plan.spectrum.depth_threshold * unit);
        out.drops = Some((all.len(), giant.len()));
        let stem = format!("point_{point:03}/spectra/r{r:04}");
        out.artifacts.push(Artifact::Csv {
            path: PathBuf::from(format!("{stem}.csv")),
            header: vec!["omega", "transmission"],
            rows: spec
                .grid
                .iter()
                .zip(&spec.values)
                .map(|(w, d)| vec![fmt_f64(*w), fmt_f64(*d)])
                .collect(),
        });
        out.artifacts.push(Artifact::Json {
            path: PathBuf::from(format!("{stem}.json")),
            value: serde_json::json!({
                "schema_version": MANIFEST_SCHEMA_VERSION,
                "kind": "transmission_spectrum",
                "point": point,
                "realization": r,
                "realization_seed": seed,
                "config_hash": cfg.hash(),
                "r0": r0.is_finite().then_some(r0),
                "saturated": r0.is_infinite(),
                "params": params,
                "count_threshold": COUNT_THRESHOLD_UNITS * unit,
                "giant_threshold": plan.spectrum.depth_threshold * unit,
                "drops": all.drops,
                "n_drops": all.len(),
                "n_giant": giant.len(),
            }),
        });
    }

    if plan.pipeline.runs(Pipeline::Oracle) {
        let spec = SpinChainSpec::from_realization(&disorder, cfg)?;
        let n = spec.n_sites();
        let (rows, ground) = if n <= FULL_SPINON_SITES {
            let s = free_fermion_solve(&spec)?;
            let rows = (0..n)
                .map(|k| {
                    vec![
                        k.to_string(),
                        fmt_f64(s.energies[k]),
                        fmt_f64(s.iprs[k]),
                        fmt_f64(s.loc_lengths[k]),
                    ]
                })
                .collect();
            (rows, Some(s))
        } else {
            let e = spinon_energies(&spec)?;
            let rows = e
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    vec![
                        k.to_string(),
                        fmt_f64(*v),
                        fmt_f64(f64::NAN),
                        fmt_f64(f64::NAN),
                    ]
                })
                .collect();
            (rows, None)
        };
        let energies_sum: f64 = match &ground {
            Some(s) => s.energies.iter().sum(),
            None => spinon_energies(&spec)?.iter().sum(),
        };
        let dense_max_abs_diff = match &ground {
            Some(s) if n <= DENSE_CHECK_SITES => {
                let exact = dense_solve(&spec)?.eigenvalues;
                let rebuilt = many_body_levels(s)?.all();
                Some(
                    exact
                        .iter()
                        .zip(&rebuilt)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                )
            }
            _ => None,
        };
        let partition = if spec.coupling == 0.0 && n <= DENSE_CHECK_SITES {
            Some(partition_check(&spec, cfg.temperature())?)
        } else {
            None
        };
        let band = match band_center_statistics(&spec) {
            Ok(b) => Some(b),
            Err(e) => {
                log::debug!("point {point} realization {r}: no band-centre estimate ({e})");
                None
            }
        };
        out.band_center = band;
        let stem = format!("point_{point:03}/spinon/r{r:04}");
        out.artifacts.push(Artifact::Csv {
            path: PathBuf::from(format!("{stem}.csv")),
            header: vec!["mode", "energy", "ipr", "loc_length"],
            rows,
        });
        let sidecar = SpinonSidecar {
            schema_version: MANIFEST_SCHEMA_VERSION,
            kind: "spinon_spectrum",
            point,
            realization: r,
            realization_seed: seed,
            config_hash: cfg.hash(),
            n_sites: n,
            coupling: spec.coupling,
            vacuum_parity: spec.vacuum_parity(),
            ground_energy: -energies_sum,
            band_center_rate: band.map(|b| b.0),
            band_center_inverse_ipr: band.map(|b| b.1),
            dense_max_abs_diff,
            partition,
        };
        out.artifacts.push(Artifact::Json {
            path: PathBuf::from(format!("{stem}.json")),
            value: to_json(&sidecar),
        });
    }
    Ok(out)
}

fn continuum_r0(cfg: &ModelConfig) -> f64 {
    match cfg.dimension() {
        1 => closed_form_r0(cfg),
        _ => closed_form_r0_2d(cfg),
    }
}

fn correlation_artifacts(
    label: &str,
    est: &CorrelationEstimate,
    fit: Option<&R0Fit>,
    cfg: &ModelConfig,
    point: usize,
    saddle_r0_mean: Option<f64>,
) -> Vec<Artifact> {
    let stem = format!("point_{point:03}/correlation_{label}");
    let model = |x: f64| match fit {
        Some(f) => f.amplitude * (1.0 + x / f.r0) * (-x / f.r0).exp(),
        None => f64::NAN,
    };
    let rows = (0..est.separations.len())
        .map(|k| {
            let x = est.separations[k];
            vec![
                fmt_f64(x),
                fmt_f64(est.r_values[k]),
                fmt_f64(est.r_stderr[k]),
                fmt_f64(model(x)),
            ]
        })
        .collect();
    vec![
        Artifact::Csv {
            path: PathBuf::from(format!("{stem}.csv")),
            header: vec!["separation", "r", "r_stderr", "r_model"],
            rows,
        },
        Artifact::Json {
            path: PathBuf::from(format!("{stem}.json")),
            value: serde_json::json!({
                "schema_version": MANIFEST_SCHEMA_VERSION,
                "kind": "correlation",
                "estimator": label,
                "point": point,
                "config_hash": est.config_hash,
                "model": cfg.to_raw(),
                "n_realizations": est.n_realizations,
                "length": est.length,
                "fit": fit,
                "r0_continuum": continuum_r0(cfg),
                "r0_saddle_mean": saddle_r0_mean,
            }),
        },
    ]
}

/// One row of `scaling.csv`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingRow {
    pub point: usize,
    pub estimator: String,
    pub kappa: f64,
    pub temperature: f64,
    pub n_sites: usize,
    pub dimension: u8,
    #[serde(deserialize_with = "crate::stats::nullable_f64")]
    pub r0_fit: f64,
    #[serde(deserialize_with = "crate::stats::nullable_f64")]
    pub fit_residual: f64,
    #[serde(deserialize_with = "crate::stats::nullable_f64")]
    pub r0_continuum: f64,
    pub r0_saddle_mean: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub rows: Vec<ScalingRow>,
    /// Per estimator: slope of ln r₀ against ln κ.
    pub log_log: Vec<(String, LineFit)>,
    /// Per estimator: slope of ln r₀ against κ².
    pub log_vs_kappa_sq: Vec<(String, LineFit)>,
}

fn scaling_summary(rows: Vec<ScalingRow>) -> ScalingSummary {
    let mut labels: Vec<String> = Vec::new();
    for r in &rows {
        if !labels.contains(&r.estimator) {
            labels.push(r.estimator.clone());
        }
    }
    let mut log_log = Vec::new();
    let mut log_vs_kappa_sq = Vec::new();
    for m in labels {
        let sel: Vec<&ScalingRow> = rows
            .iter()
            .filter(|r| r.estimator == m && r.kappa > 0.0 && r.r0_fit > 0.0)
            .collect();
        if sel.len() < 2 {
            continue;
        }
        let y: Vec<f64> = sel.iter().map(|r| r.r0_fit.ln()).collect();
        let lk: Vec<f64> = sel.iter().map(|r| r.kappa.ln()).collect();
        let k2: Vec<f64> = sel.iter().map(|r| r.kappa * r.kappa).collect();
        log_log.push((m.clone(), linear_fit(&lk, &y)));
        log_vs_kappa_sq.push((m, linear_fit(&k2, &y)));
    }
    ScalingSummary {
        rows,
        log_log,
        log_vs_kappa_sq,
    }
}

/// Runs every sweep point, writes its files under `plan.out_dir` and finishes
/// with the manifest. More than 10% failed realizations is reported as
/// [`Error::PartialFailure`] after the manifest has been written; if every
/// realization failed, the first error is returned instead.
pub fn run_sweep(plan: &SweepPlan) -> Result<RunOutcome> {
    let configs = plan.point_configs()?;
    let root = plan.out_dir.clone();
    ensure_dir(&root)?;
    let pool = match plan.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut first_error: Option<Error> = None;
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    let mut records = Vec::new();
    let mut point_seconds = Vec::new();
    let mut scaling_rows = Vec::new();

    for (p, (value, cfg)) in configs.iter().enumerate() {
        let value = *value;
        let t0 = Instant::now();
        log::info!(
            "point {p}: {}{} (config {})",
            plan.parameter.name(),
            value.map(|v| format!(" = {v}")).unwrap_or_default(),
            cfg.hash()
        );
        let work = || {
            (0..plan.realizations)
                .into_par_iter()
                .map(|r| run_realization(plan, cfg, p, r))
                .collect::<Vec<_>>()
        };
        let results = match &pool {
            Some(pool) => pool.install(work),
            None => work(),
        };

        let mut ok = Vec::new();
        for (r, res) in results.into_iter().enumerate() {
            match res {
                Ok(v) => ok.push(v),
                Err(e) => {
                    let seed = derive_seed(plan.master_seed, p as u64, r as u64);
                    log::warn!("point {p} realization {r} (seed {seed}) failed: {e}");
                    failures.push(FailureRecord {
                        point: p,
                        realization: r,
                        seed,
                        message: e.to_string(),
                        exit_code: e.exit_code(),
                    });
                    first_error.get_or_insert(e);
                }
            }
        }

        let mut correlations_raw: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
        let mut saddle_r0s = Vec::new();
        let mut drop_counts = Vec::new();
        let mut giant_counts = Vec::new();
        let mut rates = Vec::new();
        let mut inv_iprs = Vec::new();
        for res in ok.iter_mut() {
            for a in res.artifacts.drain(..) {
                a.write(&root)?;
            }
            for (m, c) in res.correlations.drain(..) {
                match correlations_raw.iter_mut().find(|(mm, _)| *mm == m) {
                    Some((_, v)) => v.push(c),
                    None => correlations_raw.push((m, vec![c])),
                }
            }
            if let Some(r0) = res.saddle_r0 {
                saddle_r0s.push(r0);
            }
            if let Some((a, g)) = res.drops {
                drop_counts.push(a as f64);
                giant_counts.push(g as f64);
            }
            if let Some((rate, ipr)) = res.band_center {
                rates.push(rate);
                inv_iprs.push(ipr);
            }
        }
        let saddle_r0_mean = (!saddle_r0s.is_empty())
            .then(|| saddle_r0s.iter().sum::<f64>() / saddle_r0s.len() as f64);

        let mut correlations = Vec::new();
        for (m, per) in correlations_raw {
            if per.len() < crate::instanton::correlation::MIN_REALIZATIONS {
                continue;
            }
            let mut est = correlation_from_realizations(&per, cfg)?;
            let fit = match est.fit() {
                Ok(f) => {
                    if f.boundary_pinned {
                        warnings.push(format!(
                            "point {p} {m}: r0 fit pinned to the search boundary"
                        ));
                    }
                    scaling_rows.push(ScalingRow {
                        point: p,
                        estimator: m.clone(),
                        kappa: cfg.kappa(),
                        temperature: cfg.temperature(),
                        n_sites: cfg.n_sites(),
                        dimension: cfg.dimension(),
                        r0_fit: f.r0,
                        fit_residual: f.residual,
                        r0_continuum: continuum_r0(cfg),
                        r0_saddle_mean: saddle_r0_mean,
                    });
                    Some(f)
                }
                Err(e) => {
                    warnings.push(format!("point {p} {m}: r0 fit failed: {e}"));
                    None
                }
            };
            for a in correlation_artifacts(&m, &est, fit.as_ref(), cfg, p, saddle_r0_mean) {
                a.write(&root)?;
            }
            correlations.push((m, est));
        }

        let (drop_mean, drop_stderr, drop_predicted) = if drop_counts.is_empty() {
            (None, None, None)
        } else {
            let est = mean_stderr(&drop_counts);
            (
                Some(est.mean),
                Some(est.stderr),
                Some(predicted_drop_count(cfg)),
            )
        };
        let localization = (!rates.is_empty()).then(|| {
            aggregate_point(
                cfg,
                &rates,
                inv_iprs.iter().sum::<f64>() / inv_iprs.len() as f64,
            )
        });

        let failed = plan.realizations - ok.len();
        records.push(PointRecord {
            index: p,
            value,
            config_hash: cfg.hash(),
            model: cfg.to_raw(),
            kappa: cfg.kappa(),
            completed: ok.len(),
            failed,
            mean_giant_drops: (!giant_counts.is_empty())
                .then(|| giant_counts.iter().sum::<f64>() / giant_counts.len() as f64),
        });
        points.push(PointSummary {
            index: p,
            value,
            config: cfg.to_raw(),
            kappa: cfg.kappa(),
            completed: ok.len(),
            failed,
            correlations,
            saddle_r0_mean,
            drop_mean,
            drop_stderr,
            drop_predicted,
            localization,
        });
        point_seconds.push(t0.elapsed().as_secs_f64());
    }

    let value_cell = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "nan".into());
    if points.iter().any(|p| p.drop_mean.is_some()) {
        let rows = points
            .iter()
            .zip(&records)
            .filter(|(p, _)| p.drop_mean.is_some())
            .map(|(p, rec)| {
                vec![
                    p.index.to_string(),
                    value_cell(p.value),
                    fmt_f64(p.kappa),
                    p.completed.to_string(),
                    value_cell(p.drop_mean),
                    value_cell(p.drop_stderr),
                    value_cell(rec.mean_giant_drops),
                    value_cell(p.drop_predicted),
                ]
            });
        write_csv(
            &root.join("drop_counts.csv"),
            &[
                "point",
                "value",
                "kappa",
                "realizations",
                "mean_drops",
                "stderr_drops",
                "mean_giant_drops",
                "predicted",
            ],
            rows,
        )?;
    }
    if points.iter().any(|p| p.localization.is_some()) {
        let rows = points.iter().filter_map(|p| {
            let l = p.localization.as_ref()?;
            Some(vec![
                p.index.to_string(),
                value_cell(p.value),
                fmt_f64(l.kappa),
                p.config.n_sites.to_string(),
                l.realizations.to_string(),
                fmt_f64(l.loc_length),
                fmt_f64(l.loc_length_stderr),
                fmt_f64(l.inverse_ipr),
                u8::from(l.finite_size).to_string(),
            ])
        });
        write_csv(
            &root.join("localization.csv"),
            &[
                "point",
                "value",
                "kappa",
                "n_sites",
                "realizations",
                "loc_length",
                "loc_length_stderr",
                "inverse_ipr",
                "finite_size",
            ],
            rows,
        )?;
    }
    if scaling_rows.len() >= 2 {
        let rows = scaling_rows.iter().map(|s| {
            vec![
                s.point.to_string(),
                s.estimator.clone(),
                fmt_f64(s.kappa),
                fmt_f64(s.temperature),
                s.n_sites.to_string(),
                s.dimension.to_string(),
                fmt_f64(s.r0_fit),
                fmt_f64(s.fit_residual),
                fmt_f64(s.r0_continuum),
                value_cell(s.r0_saddle_mean),
            ]
        });
        write_csv(
            &root.join("scaling.csv"),
            &[
                "point",
                "estimator",
                "kappa",
                "temperature",
                "n_sites",
                "dimension",
                "r0_fit",
                "fit_residual",
                "r0_continuum",
                "r0_saddle_mean",
            ],
            rows,
        )?;
        write_json(&root.join("scaling.json"), &scaling_summary(scaling_rows))?;
    }

    let total = plan.realizations * configs.len();
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool: "qsync".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        pipeline: plan.pipeline,
        parameter: plan.parameter,
        values: plan.values.clone(),
        realizations: plan.realizations,
        master_seed: plan.master_seed,
        base_model: plan.base.to_raw(),
        base_config_hash: plan.base.hash(),
        chain: plan.chain.clone(),
        spectrum: plan.spectrum.clone(),
        points: records,
        failures,
        warnings,
        timings: Timings {
            total_seconds: started.elapsed().as_secs_f64(),
            point_seconds,
        },
        files: Vec::new(),
    };
    let manifest = write_manifest(&root, manifest)?;
    let failed = manifest.failures.len();
    if failed > 0 && failed == total {
        return Err(first_error.expect("a failure was recorded"));
    }
    if failed * 10 > total {
        return Err(Error::PartialFailure { failed, total });
    }
    Ok(RunOutcome {
        run_dir: root,
        manifest,
        points,
    })
}
