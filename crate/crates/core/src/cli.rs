//! Command-line front end: `simulate`, `identify`, `deconvolve`, `report`.
//!
//! Every command computes its artifacts in memory first and only then writes
//! them, so a failing run leaves no partial outputs behind.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::deconvolution::{density_error_report, invert_cf, DensityEstimate, Window};
use crate::error::{Error, Result};
use crate::identification::{
    identify_from_samples, identify_from_slices, DeltaSchedule, Extrapolation, Identification,
    IdentifyOptions, NegativeAxis,
};
use crate::io;
use crate::model::{validate_cf_curve, ComplexCurve, ComponentDist, CurveKind, FreqGrid, ModelConfig};
use crate::oracle::{cf_value, compose_phi_y_slices};
use crate::simulator::sample_components;
use crate::svg::LinePlot;

/// CF validation tolerance below which `deconvolve` warns.
const LOOSE_TOLERANCE: f64 = 0.1;

const STAGES: [&str; 3] = ["alpha", "eta", "epsilon"];

#[derive(Parser, Debug)]
#[command(
    name = "dyadic-cf",
    version,
    about = "Identify dyadic error-component distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw triples (y_ij, y_kj, y_il) from a model config.
    Simulate(SimulateArgs),
    /// Identify the alpha, eta and epsilon CFs from samples or closed-form slices.
    Identify(IdentifyArgs),
    /// Invert a CF curve to a density.
    Deconvolve(DeconvolveArgs),
    /// Summarize a run directory as markdown.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Model config (JSON); flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Component law as `kind:scale`, e.g. `laplace:1`.
    #[arg(long)]
    pub alpha: Option<ComponentDist>,
    #[arg(long)]
    pub eta: Option<ComponentDist>,
    #[arg(long)]
    pub epsilon: Option<ComponentDist>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples CSV; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExtrapolationArg {
    Richardson,
    LastValue,
}

impl From<ExtrapolationArg> for Extrapolation {
    fn from(e: ExtrapolationArg) -> Self {
        match e {
            ExtrapolationArg::Richardson => Extrapolation::Richardson,
            ExtrapolationArg::LastValue => Extrapolation::LastValue,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NegativeAxisArg {
    Hermitian,
    Product,
}

impl From<NegativeAxisArg> for NegativeAxis {
    fn from(e: NegativeAxisArg) -> Self {
        match e {
            NegativeAxisArg::Hermitian => NegativeAxis::Hermitian,
            NegativeAxisArg::Product => NegativeAxis::Product,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct IdentifyArgs {
    /// Samples CSV written by `simulate` (or any `y_ij,y_kj,y_il` file).
    #[arg(long, conflicts_with = "oracle", required_unless_present = "oracle")]
    pub samples: Option<PathBuf>,
    /// Model config; runs on closed-form slices instead of samples.
    #[arg(long)]
    pub oracle: Option<PathBuf>,
    /// Model config used only as ground truth in plots and the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Pipeline options (JSON); flags override its keys.
    #[arg(long)]
    pub options: Option<PathBuf>,
    #[arg(long, default_value_t = 6.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub spacing: f64,
    /// Comma-separated decreasing δ values.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    /// Treat `--deltas` as absolute values rather than multiples of the gap
    /// between singular points.
    #[arg(long)]
    pub absolute_deltas: bool,
    #[arg(long, value_enum)]
    pub extrapolation: Option<ExtrapolationArg>,
    #[arg(long, value_enum)]
    pub negative_axis: Option<NegativeAxisArg>,
    #[arg(long)]
    pub rel_threshold: Option<f64>,
    #[arg(long)]
    pub convergence_tol: Option<f64>,
    #[arg(long)]
    pub epsilon_floor: Option<f64>,
    #[arg(long)]
    pub probe_offset: Option<f64>,
    /// Also invert every CF with this frequency cutoff.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long, default_value_t = Window::CosineTaper)]
    pub window: Window,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct DeconvolveArgs {
    /// Curve CSV with columns `s,re,im`.
    #[arg(long)]
    pub cf: PathBuf,
    #[arg(long)]
    pub cutoff: f64,
    #[arg(long, default_value_t = Window::CosineTaper)]
    pub window: Window,
    /// Density CSV; sidecar and SVG are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ReportArgs {
    pub run_dir: PathBuf,
    /// Defaults to `report.md` inside the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where an identification run got its slices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunInput {
    Samples { path: String, n: usize, seed: u64 },
    Oracle { config: ModelConfig },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRequest {
    pub cutoff: f64,
    pub window: Window,
}

/// The effective configuration of an `identify` run, echoed to `run.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: RunInput,
    pub truth: Option<ModelConfig>,
    pub grid: FreqGrid,
    pub options: IdentifyOptions,
    pub density: Option<DensityRequest>,
}

/// Files to write, in order.
struct Artifacts(Vec<(PathBuf, Vec<u8>)>);

impl Artifacts {
    fn new() -> Self {
        Artifacts(Vec::new())
    }

    fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.0.push((path, bytes.into()));
    }

    fn json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(path, text);
        Ok(())
    }

    /// Writes everything; on failure removes what was already written.
    fn commit(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.0.len());
        for (path, bytes) in self.0 {
            if let Err(e) = std::fs::write(&path, bytes) {
                for p in &written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.into());
            }
            written.push(path);
        }
        Ok(written)
    }
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    if args.n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let base = match &args.config {
        Some(p) => Some(ModelConfig::load(p)?),
        None => None,
    };
    let pick = |flag: Option<ComponentDist>, file: Option<ComponentDist>, name: &'static str| {
        flag.or(file)
            .ok_or_else(|| Error::param(name, "missing: pass --config or the flag"))
    };
    let cfg = ModelConfig::new(
        args.c.or(base.map(|b| b.c)).unwrap_or(0.0),
        pick(args.alpha, base.map(|b| b.alpha), "alpha")?,
        pick(args.eta, base.map(|b| b.eta), "eta")?,
        pick(args.epsilon, base.map(|b| b.epsilon), "epsilon")?,
    );
    let samples = sample_components(&cfg, args.n, args.seed)?;

    let mut out = Artifacts::new();
    out.add(args.out.clone(), io::samples_to_csv(&samples)?);
    out.json(io::sidecar_path(&args.out), &io::samples_sidecar(&samples))?;
    out.commit()?;

    let want_var = cfg.alpha.variance() + cfg.eta.variance() + cfg.epsilon.variance();
    let mut summary = format!("{} triples, seed {}\n", samples.len(), samples.seed());
    for (name, col) in [
        ("y_ij", crate::model::Column::Yij),
        ("y_kj", crate::model::Column::Ykj),
        ("y_il", crate::model::Column::Yil),
    ] {
        let (m, v) = mean_var(&samples.column(col));
        let _ = writeln!(
            summary,
            "{name}: mean {m:.6} (model {:.6}), variance {v:.6} (model {want_var:.6})",
            cfg.c
        );
    }
    Ok(summary)
}

fn effective_options(args: &IdentifyArgs) -> Result<IdentifyOptions> {
    let mut opts = match &args.options {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => IdentifyOptions::default(),
    };
    if args.deltas.is_some() || args.absolute_deltas || args.extrapolation.is_some() {
        let extrapolation = args
            .extrapolation
            .map(Extrapolation::from)
            .unwrap_or(opts.schedule.extrapolation());
        let deltas = args
            .deltas
            .clone()
            .unwrap_or_else(|| opts.schedule.deltas().to_vec());
        let relative = !args.absolute_deltas && (args.deltas.is_some() || opts.schedule.is_relative());
        opts.schedule = if relative {
            DeltaSchedule::relative(deltas, extrapolation)?
        } else {
            DeltaSchedule::absolute(deltas, extrapolation)?
        };
    }
    if let Some(v) = args.negative_axis {
        opts.negative_axis = v.into();
    }
    if let Some(v) = args.rel_threshold {
        opts.rel_threshold = v;
    }
    if let Some(v) = args.convergence_tol {
        opts.convergence_tol = v;
    }
    if let Some(v) = args.epsilon_floor {
        opts.epsilon_floor = Some(v);
    }
    if let Some(v) = args.probe_offset {
        opts.probe_offset = v;
    }
    Ok(opts)
}

fn truth_of(cfg: &ModelConfig, stage: &str) -> ComponentDist {
    match stage {
        "alpha" => cfg.alpha,
        "eta" => cfg.eta,
        _ => cfg.epsilon,
    }
}

fn cf_plot(stage: &str, curve: &ComplexCurve, truth: Option<&ComponentDist>) -> LinePlot {
    let est: Vec<(f64, f64)> = curve.points().map(|(s, v)| (s, v.norm())).collect();
    let mut plot = LinePlot::new(format!("{stage}: |CF|"))
        .labels("s", "modulus")
        .line("estimate", est);
    if let Some(d) = truth {
        let t = curve.points().map(|(s, _)| (s, cf_value(d, s).norm())).collect();
        plot = plot.dashed(format!("truth {d}"), t);
    }
    plot
}

fn density_plot(stage: &str, est: &DensityEstimate, truth: Option<&ComponentDist>) -> LinePlot {
    let mut plot = LinePlot::new(format!("{stage}: density"))
        .labels("x", "f(x)")
        .line("estimate", est.points().collect());
    if let Some(d) = truth.filter(|d| d.has_density()) {
        let t = est
            .points()
            .map(|(x, _)| (x, crate::oracle::density_value(d, x).unwrap_or(0.0)))
            .collect();
        plot = plot.dashed(format!("truth {d}"), t);
    }
    plot
}

fn run_identification(args: &IdentifyArgs) -> Result<(Identification, RunConfig)> {
    let grid = FreqGrid::with_spacing(args.s_max, args.spacing)?;
    let options = effective_options(args)?;
    let mut truth = match &args.truth {
        Some(p) => Some(ModelConfig::load(p)?),
        None => None,
    };
    if let Some(c) = args.cutoff {
        if c > grid.s_max() {
            return Err(Error::CutoffExceedsGrid {
                cutoff: c,
                s_max: grid.s_max(),
            });
        }
    }
    let (id, input) = match (&args.samples, &args.oracle) {
        (_, Some(cfg_path)) => {
            let cfg = ModelConfig::load(cfg_path)?;
            truth.get_or_insert(cfg);
            let id = identify_from_slices(&compose_phi_y_slices(&cfg, &grid), &options)?;
            (id, RunInput::Oracle { config: cfg })
        }
        (Some(path), None) => {
            let samples = io::read_samples(path)?;
            if truth.is_none() {
                truth = samples.config().copied();
            }
            let id = identify_from_samples(&samples, &grid, &options)?;
            (
                id,
                RunInput::Samples {
                    path: path.display().to_string(),
                    n: samples.len(),
                    seed: samples.seed(),
                },
            )
        }
        (None, None) => return Err(Error::param("samples", "pass --samples or --oracle")),
    };
    let run = RunConfig {
        input,
        truth,
        grid,
        options,
        density: args.cutoff.map(|cutoff| DensityRequest {
            cutoff,
            window: args.window,
        }),
    };
    Ok((id, run))
}

/// Runs the pipeline and writes its artifacts; returns the written paths.
pub fn cmd_identify(args: &IdentifyArgs) -> Result<Vec<PathBuf>> {
    let (id, run) = match run_identification(args) {
        Ok(r) => r,
        Err(e @ Error::Stage { .. }) => {
            // Leave the failure evidence where the diagnostics would have gone.
            std::fs::create_dir_all(&args.out_dir)?;
            let path = args.out_dir.join("failure.json");
            let body = serde_json::json!({ "error": e.to_string(), "stage": stage_name(&e) });
            std::fs::write(&path, json_string(&body)?)?;
            return Err(Error::WithDiagnostics {
                path,
                source: Box::new(e),
            });
        }
        Err(e) => return Err(e),
    };
    let dir = &args.out_dir;
    let mut out = Artifacts::new();
    let curves = [id.alpha_cf(), id.eta_cf(), id.epsilon_cf()];
    for (stage, curve) in STAGES.iter().zip(curves) {
        let truth = run.truth.as_ref().map(|t| truth_of(t, stage));
        out.add(dir.join(format!("{stage}_cf.csv")), io::curve_to_csv(curve)?);
        out.add(
            dir.join(format!("{stage}_cf.svg")),
            cf_plot(stage, curve, truth.as_ref()).to_svg(),
        );
        if let Some(req) = &run.density {
            let est = invert_cf(curve, req.cutoff, req.window)?;
            let csv = dir.join(format!("{stage}_density.csv"));
            out.add(csv.clone(), io::density_to_csv(&est)?);
            out.json(io::sidecar_path(&csv), &io::density_sidecar(&est))?;
            out.add(
                dir.join(format!("{stage}_density.svg")),
                density_plot(stage, &est, truth.as_ref()).to_svg(),
            );
        }
    }
    out.add(dir.join("diagnostics.json"), id.diagnostics().to_json() + "\n");
    out.json(dir.join("run.json"), &run)?;
    std::fs::create_dir_all(dir)?;
    let stale = dir.join("failure.json");
    if stale.exists() {
        std::fs::remove_file(stale)?;
    }
    out.commit()
}

fn stage_name(e: &Error) -> Option<String> {
    match e {
        Error::Stage { stage, .. } => Some(stage.clone()),
        _ => None,
    }
}

/// Inverts a curve file; returns warnings.
pub fn cmd_deconvolve(args: &DeconvolveArgs) -> Result<Vec<String>> {
    let curve = io::read_curve_csv(&args.cf, CurveKind::Cf)?;
    let mut warnings = Vec::new();
    let report = validate_cf_curve(&curve, LOOSE_TOLERANCE);
    if !report.passed {
        warnings.push(format!(
            "{} fails CF validation at tolerance {LOOSE_TOLERANCE} (max violation {:.3e}); inverting anyway",
            args.cf.display(),
            report.max_violation()
        ));
    }
    let est = invert_cf(&curve, args.cutoff, args.window)?;
    let mut out = Artifacts::new();
    out.add(args.out.clone(), io::density_to_csv(&est)?);
    out.json(io::sidecar_path(&args.out), &io::density_sidecar(&est))?;
    let title = args
        .cf
        .file_stem()
        .map_or_else(|| "curve".to_string(), |s| s.to_string_lossy().into_owned());
    out.add(
        with_extension(&args.out, "svg"),
        density_plot(&title, &est, None).to_svg(),
    );
    out.commit()?;
    Ok(warnings)
}

fn fmt_num(x: f64) -> String {
    if x == 0.0 || (1e-3..1e4).contains(&x.abs()) {
        format!("{x:.4}")
    } else {
        format!("{x:.3e}")
    }
}

fn zero_tables(md: &mut String, diag: &serde_json::Value) {
    let _ = writeln!(md, "## Zeros\n");
    match diag["zeros"].as_array() {
        Some(z) if !z.is_empty() => {
            let _ = writeln!(md, "| stage | location | modulus |\n|---|---|---|");
            for e in z {
                let _ = writeln!(
                    md,
                    "| {} | {} | {} |",
                    e["stage"].as_str().unwrap_or("?"),
                    fmt_num(e["location"].as_f64().unwrap_or(f64::NAN)),
                    fmt_num(e["modulus"].as_f64().unwrap_or(f64::NAN)),
                );
            }
        }
        _ => {
            let _ = writeln!(md, "No zeros detected.");
        }
    }
    let _ = writeln!(md, "\n## Singular classification\n");
    match diag["singular"].as_array() {
        Some(z) if !z.is_empty() => {
            let _ = writeln!(
                md,
                "| stage | location | singular | peak | baseline |\n|---|---|---|---|---|"
            );
            for e in z {
                let _ = writeln!(
                    md,
                    "| {} | {} | {} | {} | {} |",
                    e["stage"].as_str().unwrap_or("?"),
                    fmt_num(e["location"].as_f64().unwrap_or(f64::NAN)),
                    e["singular"]
                        .as_bool()
                        .map_or("?", |b| if b { "yes" } else { "no" }),
                    fmt_num(e["peak"].as_f64().unwrap_or(f64::NAN)),
                    fmt_num(e["baseline"].as_f64().unwrap_or(f64::NAN)),
                );
            }
        }
        _ => {
            let _ = writeln!(md, "No zeros to classify.");
        }
    }
    if let Some(flags) = diag["convergence_flags"].as_array().filter(|f| !f.is_empty()) {
        let _ = writeln!(
            md,
            "\n## Bridges\n\n| stage | point | converged | last step |\n|---|---|---|---|"
        );
        for f in flags {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} |",
                f["stage"].as_str().unwrap_or("?"),
                fmt_num(f["point"].as_f64().unwrap_or(f64::NAN)),
                f["converged"].as_bool().unwrap_or(false),
                fmt_num(f["last_step"].as_f64().unwrap_or(f64::NAN)),
            );
        }
    }
    if let Some(w) = diag["warnings"].as_array().filter(|w| !w.is_empty()) {
        let _ = writeln!(md, "\n## Warnings\n");
        for x in w {
            let _ = writeln!(md, "- {}", x.as_str().unwrap_or(""));
        }
    }
}

/// Writes `report.md` for a run directory; returns its path.
pub fn cmd_report(args: &ReportArgs) -> Result<PathBuf> {
    let dir = &args.run_dir;
    if !dir.is_dir() {
        return Err(Error::param(
            "run_dir",
            format!("{} is not a directory", dir.display()),
        ));
    }
    let mut expected: Vec<String> = vec!["run.json".into(), "diagnostics.json".into()];
    for s in STAGES {
        for suffix in ["cf.csv", "cf.svg", "density.csv", "density.svg"] {
            expected.push(format!("{s}_{suffix}"));
        }
    }
    let (present, missing): (Vec<&String>, Vec<&String>) =
        expected.iter().partition(|f| dir.join(f).is_file());
    if present.is_empty() {
        return Err(Error::EmptyInput("run directory has no artifacts"));
    }
    let run: Option<RunConfig> = std::fs::read_to_string(dir.join("run.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let truth = run.as_ref().and_then(|r| r.truth);

    let mut md = String::from("# Identification report\n\n");
    if let Some(r) = &run {
        let source = match &r.input {
            RunInput::Samples { path, n, seed } => format!("samples `{path}` (n = {n}, seed {seed})"),
            RunInput::Oracle { .. } => "closed-form slices".to_string(),
        };
        let _ = writeln!(
            md,
            "Input: {source}. Grid: |s| ≤ {}, spacing {}.\n",
            r.grid.s_max(),
            fmt_num(r.grid.spacing())
        );
        if let Some(t) = truth {
            let _ = writeln!(
                md,
                "Truth: alpha {}, eta {}, epsilon {}.\n",
                t.alpha, t.eta, t.epsilon
            );
        }
    }

    let _ = writeln!(md, "## Characteristic functions\n");
    let mut metrics = Vec::new();
    for s in STAGES {
        let svg = format!("{s}_cf.svg");
        if dir.join(&svg).is_file() {
            let _ = writeln!(md, "![{s} CF]({svg})\n");
        }
        let csv = dir.join(format!("{s}_cf.csv"));
        if let (Some(t), true) = (truth, csv.is_file()) {
            let curve = io::read_curve_csv(&csv, CurveKind::Cf)?;
            let d = truth_of(&t, s);
            let full = curve.sup_error(curve.grid().s_max(), |x| cf_value(&d, x), |_| false);
            let inner = curve.sup_error(2.0_f64.min(curve.grid().s_max()), |x| cf_value(&d, x), |_| false);
            metrics.push(format!("| {s} | CF sup error, all s | {} |", fmt_num(full)));
            metrics.push(format!("| {s} | CF sup error, abs(s) ≤ 2 | {} |", fmt_num(inner)));
        }
    }
    let _ = writeln!(md, "## Densities\n");
    for s in STAGES {
        let svg = format!("{s}_density.svg");
        if dir.join(&svg).is_file() {
            let _ = writeln!(md, "![{s} density]({svg})\n");
        }
        let csv = dir.join(format!("{s}_density.csv"));
        if let (Some(t), true) = (truth, csv.is_file()) {
            let d = truth_of(&t, s);
            if d.has_density() {
                let est = io::read_density(&csv)?;
                let r = density_error_report(&est, &d)?;
                metrics.push(format!("| {s} | density L1 | {} |", fmt_num(r.l1)));
                metrics.push(format!("| {s} | density sup | {} |", fmt_num(r.sup)));
            }
        }
    }
    if !metrics.is_empty() {
        let _ = writeln!(
            md,
            "## Error against truth\n\n| curve | metric | value |\n|---|---|---|"
        );
        for m in metrics {
            let _ = writeln!(md, "{m}");
        }
        md.push('\n');
    }
    match std::fs::read_to_string(dir.join("diagnostics.json")) {
        Ok(text) => {
            let diag: serde_json::Value = serde_json::from_str(&text)?;
            zero_tables(&mut md, &diag);
        }
        Err(_) => {
            let _ = writeln!(md, "Diagnostics unavailable.");
        }
    }
    if !missing.is_empty() {
        let _ = writeln!(md, "\n## Missing artifacts\n");
        for m in &missing {
            let _ = writeln!(md, "- `{m}`");
        }
    }
    let out = args.out.clone().unwrap_or_else(|| dir.join("report.md"));
    let mut a = Artifacts::new();
    a.add(out.clone(), md);
    a.commit()?;
    Ok(out)
}

/// Parses `args` and runs the chosen command, reporting errors on stderr.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a).map(|summary| print!("{summary}")),
        Command::Identify(a) => cmd_identify(a).map(|paths| {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }),
        Command::Deconvolve(a) => cmd_deconvolve(a).map(|warnings| {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", a.out.display());
        }),
        Command::Report(a) => cmd_report(a).map(|p| println!("wrote {}", p.display())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn main() -> ExitCode {
    run_from(std::env::args_os())
}
