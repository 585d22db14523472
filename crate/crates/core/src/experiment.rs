//! Synthetic experiment sweeps: repeated estimation against closed-form
//! ground truth, CSV and SVG output.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::baselines::{estimate_j_kde_fixed, estimate_j_leonenko, Bandwidth};
use crate::bias::{BiasEntry, EstimatorKind};
use crate::bias_table::BiasTable;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{EstimatorConfig, Method, Truncation};
use crate::kde::estimate_j_kde;
use crate::kernels::{KernelFamily, KernelSpec};
use crate::llde::estimate_j_klnn;
use crate::synth::{ground_truth, sample, Family};

pub const CSV_HEADER: &str = "experiment,family,alpha,r,n,method,k,trials,mean,std,ground_truth,rel_error,seed";

/// Which parameter varies across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    R,
    N,
}

/// A sweep over correlation or sample size for one distribution family.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub family: Family,
    pub alpha: f64,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub sweep: SweepVar,
    /// `(r, n)` for every sweep point.
    pub points: Vec<(f64, usize)>,
    pub kernel: KernelFamily,
    pub bandwidth: Bandwidth,
    pub truncation: Truncation,
}

pub const DEFAULT_R_GRID: [f64; 5] = [0.9, 0.99, 0.999, 0.9999, 0.99999];
pub const DEFAULT_N_GRID: [usize; 6] = [100, 200, 400, 800, 1600, 3200];

impl ExperimentSpec {
    /// Sweep over `r` at fixed `n`.
    pub fn r_sweep(name: &str, family: Family, alpha: f64, n: usize, rs: &[f64]) -> Self {
        Self::base(name, family, alpha, SweepVar::R, rs.iter().map(|&r| (r, n)).collect())
    }

    /// Sweep over `n` at fixed `r`.
    pub fn n_sweep(name: &str, family: Family, alpha: f64, r: f64, ns: &[usize]) -> Self {
        Self::base(name, family, alpha, SweepVar::N, ns.iter().map(|&n| (r, n)).collect())
    }

    fn base(name: &str, family: Family, alpha: f64, sweep: SweepVar, points: Vec<(f64, usize)>) -> Self {
        Self {
            name: name.to_string(),
            family,
            alpha,
            k: 5,
            trials: 100,
            seed: 0,
            sweep,
            points,
            kernel: KernelFamily::Gaussian,
            bandwidth: Bandwidth::Silverman,
            truncation: Truncation::MatchBias,
        }
    }

    /// The four standard experiments by number (1 to 4), as `r` sweeps at `n = 100`.
    pub fn preset(number: u32) -> Result<Self> {
        let (family, alpha) = preset_family(number)?;
        Ok(Self::r_sweep(
            &format!("exp{number}"),
            family,
            alpha,
            100,
            &DEFAULT_R_GRID,
        ))
    }

    /// As [`ExperimentSpec::preset`] but sweeping `n` at `r = 0.99999`.
    pub fn preset_n(number: u32) -> Result<Self> {
        let (family, alpha) = preset_family(number)?;
        Ok(Self::n_sweep(
            &format!("exp{number}"),
            family,
            alpha,
            0.99999,
            &DEFAULT_N_GRID,
        ))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidParameter("sweep has no points".into()));
        }
        for &(r, n) in &self.points {
            if n < 10 {
                return Err(Error::InvalidParameter(format!("n = {n} is below the minimum of 10")));
            }
            if n < self.k + 1 {
                return Err(Error::MTooLarge {
                    m: self.k,
                    available: n - 1,
                });
            }
            ground_truth(self.family, self.alpha, r)?;
        }
        Ok(())
    }
}

fn preset_family(number: u32) -> Result<(Family, f64)> {
    match number {
        1 => Ok((Family::Gauss2d, 2.0)),
        2 => Ok((Family::Gauss2d, 3.0)),
        3 => Ok((Family::Gauss6dBlock, 2.0)),
        4 => Ok((Family::Mixture2d, 2.0)),
        other => Err(Error::InvalidParameter(format!("no experiment {other}; choose 1 to 4"))),
    }
}

/// Aggregated result for one (sweep point, method).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub family: Family,
    pub alpha: f64,
    pub r: f64,
    pub n: usize,
    pub method: Method,
    pub k: usize,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation over trials.
    pub std: f64,
    pub ground_truth: f64,
    /// `|mean - truth| / truth`.
    pub rel_error: f64,
    pub seed: u64,
    /// Mean over trials of `|estimate - truth|`.
    pub mean_abs_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub sweep: Option<SweepVar>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn row(&self, r: f64, n: usize, method: Method) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|row| row.r == r && row.n == n && row.method == method)
    }
}

/// Everything a method needs to run, resolved before any data is drawn.
enum Prepared {
    Kde(EstimatorConfig, BiasEntry),
    Klnn(EstimatorConfig, BiasEntry),
    Leonenko(usize),
    KdeFixed(KernelSpec, Bandwidth),
}

fn prepare(spec: &ExperimentSpec, method: Method, table: &BiasTable) -> Result<Prepared> {
    let d = spec.family.dim();
    let config =
        |kernel| EstimatorConfig::new(spec.k, spec.alpha, KernelSpec::new(kernel, d)).with_truncation(spec.truncation);
    Ok(match method {
        Method::Kde => {
            let bias = table.lookup(spec.k, d, spec.alpha, EstimatorKind::Kde(spec.kernel))?;
            Prepared::Kde(config(spec.kernel), bias.clone())
        }
        Method::Klnn => {
            let bias = table.lookup(spec.k, d, spec.alpha, EstimatorKind::Llde)?;
            Prepared::Klnn(config(KernelFamily::Gaussian), bias.clone())
        }
        Method::Leonenko => {
            crate::baselines::leonenko_constant(spec.k, spec.alpha)?;
            Prepared::Leonenko(spec.k)
        }
        Method::KdeFixed => Prepared::KdeFixed(KernelSpec::new(spec.kernel, d), spec.bandwidth),
    })
}

fn run_one(p: &Prepared, data: &Dataset, alpha: f64) -> Result<f64> {
    let r = match p {
        Prepared::Kde(cfg, bias) => estimate_j_kde(data, cfg, bias)?,
        Prepared::Klnn(cfg, bias) => estimate_j_klnn(data, cfg, bias)?,
        Prepared::Leonenko(k) => estimate_j_leonenko(data, *k, alpha)?,
        Prepared::KdeFixed(kernel, bw) => estimate_j_kde_fixed(data, kernel, alpha, *bw)?,
    };
    Ok(r.value)
}

/// Runs every method on the same simulated data at every sweep point.
///
/// All validation, including bias lookups, happens before the first sample
/// is drawn. Trials run in parallel and are reduced in trial order.
pub fn run_experiment(spec: &ExperimentSpec, methods: &[Method], table: &BiasTable) -> Result<Report> {
    spec.validate()?;
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    let prepared = methods
        .iter()
        .map(|&m| prepare(spec, m, table))
        .collect::<Result<Vec<_>>>()?;
    for p in &prepared {
        if let Prepared::Kde(cfg, bias) | Prepared::Klnn(cfg, bias) = p {
            for &(_, n) in &spec.points {
                cfg.truncation_for(n, bias)?;
            }
        }
    }

    let mut rows = Vec::with_capacity(spec.points.len() * methods.len());
    for &(r, n) in &spec.points {
        let truth = ground_truth(spec.family, spec.alpha, r)?;
        let point = format!("r={r} n={n}");
        let per_trial: Vec<Result<Vec<f64>>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let data = sample(spec.family, r, n, spec.seed, t as u64)?;
                prepared
                    .iter()
                    .zip(methods)
                    .map(|(p, m)| {
                        run_one(p, &data, spec.alpha).map_err(|e| Error::Trial {
                            method: m.to_string(),
                            point: point.clone(),
                            trial: t,
                            source: Box::new(e),
                        })
                    })
                    .collect()
            })
            .collect();
        let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
        for (mi, &method) in methods.iter().enumerate() {
            let values: Vec<f64> = per_trial.iter().map(|v| v[mi]).collect();
            let t = values.len() as f64;
            let mean = values.iter().sum::<f64>() / t;
            let std = if values.len() > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (t - 1.0)).sqrt()
            } else {
                0.0
            };
            let mean_abs_error = values.iter().map(|v| (v - truth).abs()).sum::<f64>() / t;
            rows.push(ReportRow {
                experiment: spec.name.clone(),
                family: spec.family,
                alpha: spec.alpha,
                r,
                n,
                method,
                k: if method == Method::KdeFixed { 0 } else { spec.k },
                trials: spec.trials,
                mean,
                std,
                ground_truth: truth,
                rel_error: (mean - truth).abs() / truth,
                seed: spec.seed,
                mean_abs_error,
            });
        }
    }
    Ok(Report {
        sweep: Some(spec.sweep),
        rows,
    })
}

/// Writes the report as CSV with header [`CSV_HEADER`].
pub fn emit_csv<W: Write>(report: &Report, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER.split(','))?;
    for row in &report.rows {
        out.write_record([
            row.experiment.clone(),
            row.family.to_string(),
            row.alpha.to_string(),
            row.r.to_string(),
            row.n.to_string(),
            row.method.to_string(),
            row.k.to_string(),
            row.trials.to_string(),
            row.mean.to_string(),
            row.std.to_string(),
            row.ground_truth.to_string(),
            row.rel_error.to_string(),
            row.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

/// Mean estimate with a one-standard-deviation band per method against the
/// sweep variable, and the ground truth as a dashed black line.
///
/// `r` sweeps are drawn against `-log10(1 - r)` and `n` sweeps against
/// `log10(n)`. Output depends only on the report.
pub fn emit_plot<W: Write>(report: &Report, mut w: W) -> Result<()> {
    let sweep = report.sweep.unwrap_or(SweepVar::R);
    let xval = |row: &ReportRow| match sweep {
        SweepVar::R => -(1.0 - row.r).log10(),
        SweepVar::N => (row.n as f64).log10(),
    };
    let mut methods: Vec<Method> = Vec::new();
    for row in &report.rows {
        if !methods.contains(&row.method) {
            methods.push(row.method);
        }
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if report.rows.is_empty() {
        svg.push_str("</svg>\n");
        w.write_all(svg.as_bytes())?;
        return Ok(());
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in &report.rows {
        let x = xval(row);
        x0 = x0.min(x);
        x1 = x1.max(x);
        for y in [row.mean - row.std, row.mean + row.std, row.ground_truth] {
            if y.is_finite() {
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
        }
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD}V{:.2}H{:.2}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let xlabel = match sweep {
        SweepVar::R => "-log10(1 - r)",
        SweepVar::N => "log10(n)",
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{xlabel}</text>"#,
        W / 2.0,
        H - 20.0
    );
    for (label, y) in [(y0, H - PAD), (y1, PAD)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4e}</text>"#,
            PAD - 4.0,
            y,
            label
        );
    }

    let first = &methods[0];
    let truth: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.method == *first)
        .map(|r| format!("{:.2},{:.2}", sx(xval(r)), sy(r.ground_truth)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-dasharray="6 4"/>"#,
        truth.join(" ")
    );

    for (mi, method) in methods.iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let rows: Vec<&ReportRow> = report.rows.iter().filter(|r| r.method == *method).collect();
        let upper: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(xval(r)), sy(r.mean + r.std)))
            .collect();
        let lower: Vec<String> = rows
            .iter()
            .rev()
            .map(|r| format!("{:.2},{:.2}", sx(xval(r)), sy(r.mean - r.std)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let mean: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(xval(r)), sy(r.mean)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            mean.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{method}</text>"#,
            W - PAD + 4.0,
            PAD + 16.0 * mi as f64
        );
    }
    svg.push_str("</svg>\n");
    w.write_all(svg.as_bytes())?;
    Ok(())
}
