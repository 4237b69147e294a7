//! SVG figures drawn from a finished run directory.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::io::{list_files, read_json, read_numeric_csv};
use super::manifest::{read_manifest, write_manifest};
use super::sweep::ScalingSummary;
use crate::error::{Error, Result};

pub const PLOT_DIR: &str = "plots";

const COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(23, 190, 207),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Line,
    Dots,
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    mark: Mark,
}

#[derive(Debug, Clone, Default)]
pub struct PlotReport {
    pub written: Vec<PathBuf>,
    /// One notice per figure that had no input.
    pub skipped: Vec<String>,
}

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Plot(e.to_string())
}

fn padded(lo: f64, hi: f64) -> std::ops::Range<f64> {
    let span = (hi - lo).abs().max(1e-12 * lo.abs().max(1.0));
    (lo - 0.05 * span)..(hi + 0.05 * span)
}

fn render(path: &Path, caption: &str, x_desc: &str, y_desc: &str, series: &[Series]) -> Result<()> {
    let finite = series
        .iter()
        .flat_map(|s| &s.points)
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return Err(Error::Plot(format!(
            "no finite data for {}",
            path.display()
        )));
    }
    let root = SVGBackend::new(path, (860, 580)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(48)
        .y_label_area_size(84)
        .build_cartesian_2d(padded(x0, x1), padded(y0, y1))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc(x_desc)
        .y_desc(y_desc)
        .draw()
        .map_err(plot_err)?;
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let drawn = match s.mark {
            Mark::Line => chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(plot_err)?,
            Mark::Dots => chart
                .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, color.filled())))
                .map_err(plot_err)?,
        };
        drawn.label(s.label.clone()).legend(move |(x, y)| {
            PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
        });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)
}

fn slash(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn spectrum_plot(root: &Path, files: &[String], out: &Path) -> Result<bool> {
    let Some(first) = files
        .iter()
        .find(|f| f.contains("/spectra/") && f.ends_with(".csv"))
    else {
        return Ok(false);
    };
    let t = read_numeric_csv(&root.join(first))?;
    let (Some(w), Some(d)) = (t.column("omega"), t.column("transmission")) else {
        return Err(Error::Plot(format!(
            "{first} lacks omega/transmission columns"
        )));
    };
    let mut series = vec![Series {
        label: first.clone(),
        points: w.into_iter().zip(d).collect(),
        mark: Mark::Line,
    }];
    let sidecar = root.join(first).with_extension("json");
    if sidecar.exists() {
        let meta: serde_json::Value = read_json(&sidecar)?;
        let drops: Vec<(f64, f64)> = meta["drops"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter_map(|d| Some((d["center"].as_f64()?, 1.0 - d["depth"].as_f64()?)))
                    .collect()
            })
            .unwrap_or_default();
        series.push(Series {
            label: format!("{} drops", drops.len()),
            points: drops,
            mark: Mark::Dots,
        });
    }
    render(out, "Transmission spectrum", "frequency ω", "D(ω)", &series)?;
    Ok(true)
}

fn correlation_plot(root: &Path, files: &[String], out: &Path) -> Result<bool> {
    let inputs: Vec<&String> = files
        .iter()
        .filter(|f| {
            let name = f.rsplit('/').next().unwrap_or(f);
            name.starts_with("correlation_") && name.ends_with(".csv")
        })
        .take(COLORS.len() / 2)
        .collect();
    if inputs.is_empty() {
        return Ok(false);
    }
    let mut series = Vec::new();
    for f in inputs {
        let t = read_numeric_csv(&root.join(f))?;
        let (Some(x), Some(r), Some(m)) =
            (t.column("separation"), t.column("r"), t.column("r_model"))
        else {
            return Err(Error::Plot(format!(
                "{f} lacks separation/r/r_model columns"
            )));
        };
        let label = f.trim_end_matches(".csv").to_string();
        series.push(Series {
            label: label.clone(),
            points: x.iter().copied().zip(r).collect(),
            mark: Mark::Dots,
        });
        if m.iter().any(|v| v.is_finite()) {
            let meta: Option<serde_json::Value> =
                read_json(&root.join(f).with_extension("json")).ok();
            let r0 = meta.as_ref().and_then(|v| v["fit"]["r0"].as_f64());
            series.push(Series {
                label: match r0 {
                    Some(r0) => format!("{label} fit, r₀ = {r0:.4}"),
                    None => format!("{label} fit"),
                },
                points: x.into_iter().zip(m).collect(),
                mark: Mark::Line,
            });
        }
    }
    render(
        out,
        "Frequency correlation",
        "separation |x|",
        "R(x)",
        &series,
    )?;
    Ok(true)
}

fn scaling_plot(root: &Path, out: &Path) -> Result<bool> {
    let path = root.join("scaling.json");
    if !path.exists() {
        return Ok(false);
    }
    let summary: ScalingSummary = read_json(&path)?;
    let mut labels: Vec<&str> = Vec::new();
    for r in &summary.rows {
        if !labels.contains(&r.estimator.as_str()) {
            labels.push(&r.estimator);
        }
    }
    let mut series = Vec::new();
    for m in labels.into_iter().take(COLORS.len() / 2) {
        let rows: Vec<_> = summary
            .rows
            .iter()
            .filter(|r| r.estimator == m && r.kappa > 0.0)
            .collect();
        let slope = summary
            .log_log
            .iter()
            .find(|(l, _)| l == m)
            .map(|(_, f)| f.slope);
        series.push(Series {
            label: match slope {
                Some(s) => format!("{m} fit, slope {s:.3}"),
                None => format!("{m} fit"),
            },
            points: rows
                .iter()
                .map(|r| (r.kappa.log10(), r.r0_fit.log10()))
                .collect(),
            mark: Mark::Dots,
        });
        series.push(Series {
            label: format!("{m} continuum"),
            points: rows
                .iter()
                .map(|r| (r.kappa.log10(), r.r0_continuum.log10()))
                .collect(),
            mark: Mark::Line,
        });
    }
    render(out, "Correlation radius", "log10 κ", "log10 r₀", &series)?;
    Ok(true)
}

type PlotJob<'a> = Box<dyn Fn(&Path) -> Result<bool> + 'a>;

/// Draws `spectrum.svg`, `correlation.svg` and `scaling.svg` into
/// `<run_dir>/plots` from whatever inputs the run produced, then refreshes the
/// manifest. Fails if the run has no manifest or no figure could be drawn.
pub fn emit_plots(run_dir: &Path) -> Result<PlotReport> {
    let manifest = read_manifest(run_dir)?;
    let files: Vec<String> = list_files(run_dir)?.iter().map(|p| slash(p)).collect();
    let dir = run_dir.join(PLOT_DIR);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut report = PlotReport::default();
    let jobs: [(&str, PlotJob); 3] = [
        (
            "spectrum.svg",
            Box::new(|out: &Path| spectrum_plot(run_dir, &files, out)),
        ),
        (
            "correlation.svg",
            Box::new(|out: &Path| correlation_plot(run_dir, &files, out)),
        ),
        (
            "scaling.svg",
            Box::new(|out: &Path| scaling_plot(run_dir, out)),
        ),
    ];
    for (name, job) in jobs {
        let out = dir.join(name);
        if job(&out)? {
            report.written.push(out);
        } else {
            let notice = format!("skipped {name}: no input in {}", run_dir.display());
            log::warn!("{notice}");
            report.skipped.push(notice);
        }
    }
    if report.written.is_empty() {
        let _ = std::fs::remove_dir(&dir);
        return Err(Error::NothingToPlot(run_dir.to_path_buf()));
    }
    write_manifest(run_dir, manifest)?;
    Ok(report)
}
