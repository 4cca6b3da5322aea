use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use dnnreuse::error::{Error, MetricError, ProfileError, StatsError};
use dnnreuse::measure::{energy_metrics, load_measurements, load_power_samples, average_power, MeasurementRecord};
use dnnreuse::metrics::{derive_metrics, weighted_intensity, CaseThresholds, DerivedMetrics};
use dnnreuse::model::{load_model, ShapedGraph};
use dnnreuse::profile::{
    aggregate_many, batch_scale, layerwise_ai_stats, read_profiles, LayerActivations, NetworkProfile,
    ProfileRecord,
};
use dnnreuse::roofline::{roofline_points, write_roofline_csv, HardwareSpec, IntensityMode};
use dnnreuse::stats::{alpha_sweep, fisher_ci, min_sample_size, pearson, spearman, ConfidenceInterval};
use dnnreuse::{Exec, Reuse};
use serde::Serialize;
use thiserror::Error;

use crate::output::{field, json, ratio, sci, Table};
use crate::{Common, Convention, Format, Metric, Mode};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input.
    #[error("{0}")]
    Input(String),
    /// Well-formed input on which the analysis is undefined.
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    fn from_core(context: &str, e: impl Into<Error>) -> Self {
        let e = e.into();
        let msg = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        if is_degenerate(&e) {
            CliError::Degenerate(msg)
        } else {
            CliError::Input(msg)
        }
    }
}

fn is_degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::Profile(ProfileError::NoMacLayers | ProfileError::NoData | ProfileError::EmptyGraph)
            | Error::Stats(
                StatsError::ZeroVariance(_) | StatsError::PerfectCorrelation(_) | StatsError::TooFewSamples { .. }
            )
            | Error::Metric(MetricError::NonPositive(_))
    )
}

fn core<T, E: Into<Error>>(context: &str, r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_core(context, e))
}

fn exec(common: Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_graph(path: &Path) -> Result<ShapedGraph, CliError> {
    let text = read(path)?;
    core(&path.display().to_string(), load_model(&text))
}

fn check_alpha(alpha: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(CliError::Input(format!("--alpha must lie in [0, 1], got {alpha}")))
    }
}

fn parse_thresholds(s: &str) -> Result<CaseThresholds, CliError> {
    let bad = || CliError::Input(format!("--thresholds expects LOW,HIGH with 0 < LOW <= HIGH, got `{s}`"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let low: f64 = lo.trim().parse().map_err(|_| bad())?;
    let high: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(low > 0.0 && low <= high && high.is_finite()) {
        return Err(bad());
    }
    Ok(CaseThresholds { low, high })
}

#[derive(Serialize)]
struct AnalyzeRow {
    model: String,
    #[serde(flatten)]
    profile: NetworkProfile,
    weight_reuse: f64,
    activation_reuse: f64,
    a_over_w: f64,
    #[serde(flatten)]
    metrics: DerivedMetrics,
}

pub fn analyze(
    models: &[PathBuf],
    batch: u64,
    alpha: f64,
    thresholds: &str,
    common: Common,
) -> Result<String, CliError> {
    let alpha = check_alpha(alpha)?;
    let thresholds = parse_thresholds(thresholds)?;
    if batch == 0 {
        return Err(CliError::Input("--batch must be at least 1".into()));
    }
    let graphs = models.iter().map(|p| load_graph(p)).collect::<Result<Vec<_>, _>>()?;
    let profiles = aggregate_many(&graphs, exec(common));

    let mut rows = Vec::new();
    for (path, profile) in models.iter().zip(profiles) {
        let ctx = path.display().to_string();
        let profile = core(&ctx, profile.and_then(|p| batch_scale(&p, batch)))?;
        let reuse = core(&ctx, profile.reuse())?;
        let metrics = core(&ctx, derive_metrics(&reuse, alpha, thresholds))?;
        rows.push(AnalyzeRow {
            model: model_name(path),
            weight_reuse: profile.weight_reuse(),
            activation_reuse: profile.activation_reuse(),
            a_over_w: profile.a_over_w(),
            profile,
            metrics,
        });
    }
    if common.format == Format::Json {
        return Ok(json(&rows));
    }
    let mut t = Table::new(&[
        "model",
        "batch",
        "macs",
        "weights",
        "activations",
        "peak_concurrent",
        "ai_c",
        "weight_reuse",
        "activation_reuse",
        "a_over_w",
        "alpha",
        "di",
        "d_f",
        "case",
    ]);
    for r in &rows {
        let p = &r.profile;
        t.row([
            field(&r.model),
            p.batch.to_string(),
            sci(p.macs as f64),
            sci(p.weights as f64),
            sci(p.activations as f64),
            sci(p.peak_concurrent as f64),
            ratio(r.metrics.ai_c),
            ratio(r.weight_reuse),
            ratio(r.activation_reuse),
            ratio(r.a_over_w),
            ratio(r.metrics.alpha),
            ratio(r.metrics.di),
            ratio(r.metrics.d_f),
            r.metrics.case.to_string(),
        ]);
    }
    Ok(t.finish())
}

pub fn layers(model: &Path, convention: Convention, common: Common) -> Result<String, CliError> {
    let graph = load_graph(model)?;
    let convention = match convention {
        Convention::Output => LayerActivations::OutputOnly,
        Convention::InputOutput => LayerActivations::InputOutput,
    };
    let stats = core(&model.display().to_string(), layerwise_ai_stats(&graph, convention))?;
    if common.format == Format::Json {
        return Ok(json(&stats));
    }
    let mut t = Table::new(&["layer", "kind", "macs", "weights", "activations", "ai"]);
    for l in &stats.layers {
        let charged = match convention {
            LayerActivations::OutputOnly => l.output_elements,
            LayerActivations::InputOutput => l.cost.activations,
        };
        t.row([
            field(&l.name),
            l.kind.to_string(),
            sci(l.cost.macs as f64),
            sci(l.cost.weights as f64),
            sci(charged as f64),
            ratio(l.ai),
        ]);
    }
    t.trailer("median", ratio(stats.median));
    t.trailer("variance", sci(stats.variance));
    t.trailer("min", ratio(stats.min));
    t.trailer("max", ratio(stats.max));
    Ok(t.finish())
}

fn load_profiles(path: &Path) -> Result<Vec<ProfileRecord>, CliError> {
    core(&path.display().to_string(), read_profiles(open(path)?))
}

fn load_runs(path: &Path) -> Result<Vec<MeasurementRecord>, CliError> {
    core(&path.display().to_string(), load_measurements(open(path)?))
}

/// Profiles keyed by exact model name.
fn index(profiles: &[ProfileRecord]) -> HashMap<&str, NetworkProfile> {
    profiles.iter().map(|r| (r.model.as_str(), r.profile())).collect()
}

fn efficiency_of(run: &MeasurementRecord, profile: Option<&NetworkProfile>) -> Result<f64, CliError> {
    let mut run = run.clone();
    if run.macs.is_none() {
        run.macs = profile.map(|p| p.macs);
    }
    core(&run.model.clone(), energy_metrics(&run, false)).map(|m| m.efficiency)
}

#[derive(Serialize)]
struct CalibrationReport {
    device: String,
    batch: u32,
    n: usize,
    ai_c_r_p: f64,
    ai_c_r_s: f64,
    #[serde(flatten)]
    curve: dnnreuse::CalibrationCurve,
}

pub fn calibrate(
    profiles: &Path,
    measurements: &Path,
    device: &str,
    batch: u32,
    step: f64,
    epsilon: f64,
    common: Common,
) -> Result<String, CliError> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(CliError::Input(format!("--epsilon must be non-negative, got {epsilon}")));
    }
    let records = load_profiles(profiles)?;
    let by_model = index(&records);
    let runs: Vec<MeasurementRecord> = load_runs(measurements)?
        .into_iter()
        .filter(|r| r.device == device && r.batch == batch)
        .collect();
    if runs.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no measurements for device `{device}` at batch {batch}",
            measurements.display()
        )));
    }

    let measured: BTreeSet<&str> = runs.iter().map(|r| r.model.as_str()).collect();
    let mut orphans: Vec<String> = measured
        .iter()
        .filter(|m| !by_model.contains_key(*m))
        .map(|m| format!("{m} (no profile)"))
        .collect();
    orphans.extend(
        records
            .iter()
            .filter(|r| !measured.contains(r.model.as_str()))
            .map(|r| format!("{} (no measurement)", r.model)),
    );
    if !orphans.is_empty() {
        return Err(CliError::Input(format!("unmatched models: {}", orphans.join(", "))));
    }

    let mut reuses = Vec::new();
    let mut ai = Vec::new();
    let mut eff = Vec::new();
    for run in &runs {
        let p = &by_model[run.model.as_str()];
        let reuse = core(&run.model, p.reuse())?;
        ai.push(reuse.ai_c());
        reuses.push(reuse);
        eff.push(efficiency_of(run, Some(p))?);
    }
    let curve = core("calibration", alpha_sweep(&reuses, &eff, step, epsilon, exec(common)))?;
    let report = CalibrationReport {
        device: device.to_string(),
        batch,
        n: runs.len(),
        ai_c_r_p: core("AI_c", pearson(&ai, &eff))?,
        ai_c_r_s: core("AI_c", spearman(&ai, &eff))?,
        curve,
    };
    if common.format == Format::Json {
        return Ok(json(&report));
    }
    let mut t = Table::new(&["alpha", "r_p", "r_s"]);
    for g in &report.curve.grid {
        t.row([ratio(g.alpha), ratio(g.r_p), ratio(g.r_s)]);
    }
    t.trailer("n", report.n.to_string());
    t.trailer("ai_c_r_p", ratio(report.ai_c_r_p));
    t.trailer("ai_c_r_s", ratio(report.ai_c_r_s));
    t.trailer("selected_alpha", ratio(report.curve.selected_alpha));
    Ok(t.finish())
}

pub struct RooflineArgs {
    pub hw: PathBuf,
    pub metric: Metric,
    pub profiles: PathBuf,
    pub alpha: f64,
    pub mode: Mode,
    pub bytes_per_element: f64,
    pub flops_per_mac: f64,
    pub measured: Option<(PathBuf, String, u32)>,
    pub envelope: Option<PathBuf>,
    pub common: Common,
}

pub fn roofline(args: RooflineArgs) -> Result<String, CliError> {
    let alpha = check_alpha(args.alpha)?;
    let hw = core(&args.hw.display().to_string(), HardwareSpec::from_json(&read(&args.hw)?))?;
    let mode = match args.mode {
        Mode::Raw => IntensityMode::Raw,
        Mode::Converted => {
            if !(args.bytes_per_element > 0.0 && args.flops_per_mac > 0.0) {
                return Err(CliError::Input("--bytes-per-element and --flops-per-mac must be positive".into()));
            }
            IntensityMode::Converted {
                bytes_per_element: args.bytes_per_element,
                flops_per_mac: args.flops_per_mac,
            }
        }
    };
    let records = load_profiles(&args.profiles)?;
    if records.is_empty() {
        return Err(CliError::Input(format!("{}: no profiles", args.profiles.display())));
    }
    let mut points = Vec::new();
    for r in &records {
        let reuse = core(&r.model, r.profile().reuse())?;
        let intensity = match args.metric {
            Metric::Ai => reuse.ai_c(),
            Metric::Di => core(&r.model, weighted_intensity(&reuse, alpha))?,
        };
        points.push((r.model.clone(), intensity));
    }

    let measured = match &args.measured {
        None => None,
        Some((path, device, batch)) => {
            let by_model = index(&records);
            let runs = load_runs(path)?;
            let ops_per_mac = match mode {
                IntensityMode::Raw => 1.0,
                IntensityMode::Converted { flops_per_mac, .. } => flops_per_mac,
            };
            let mut out = Vec::new();
            for r in &records {
                let run = runs
                    .iter()
                    .find(|m| m.model == r.model && &m.device == device && m.batch == *batch);
                out.push(run.map(|m| {
                    let macs = m.macs.or_else(|| by_model.get(m.model.as_str()).map(|p| p.macs)).unwrap_or(0);
                    ops_per_mac * m.batch as f64 * macs as f64 / (m.i_t / 1000.0)
                }));
            }
            Some(out)
        }
    };

    let plot = core("roofline", roofline_points(&hw, &points, measured.as_deref(), mode))?;
    if let Some(path) = &args.envelope {
        let mut t = Table::new(&["segment", "intensity", "attainable_ops"]);
        for (segment, pts) in [("slope", &plot.slope), ("roof", &plot.roof)] {
            for p in pts.iter() {
                t.row([segment.to_string(), sci(p.intensity), sci(p.attainable_ops)]);
            }
        }
        fs::write(path, t.finish()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    if args.common.format == Format::Json {
        return Ok(json(&plot));
    }
    let mut buf = Vec::new();
    write_roofline_csv(&mut buf, &plot.rows).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("utf-8 csv"))
}

#[derive(Serialize)]
struct EnergyRow {
    model: String,
    device: String,
    batch: u32,
    epp: f64,
    efficiency: f64,
    ai_c: f64,
    di: f64,
}

pub fn energy(
    measurements: &Path,
    profiles: &Path,
    device: Option<&str>,
    batch: Option<u32>,
    alpha: f64,
    per_frame: bool,
    common: Common,
) -> Result<String, CliError> {
    let alpha = check_alpha(alpha)?;
    let records = load_profiles(profiles)?;
    let by_model = index(&records);
    let runs: Vec<MeasurementRecord> = load_runs(measurements)?
        .into_iter()
        .filter(|r| device.is_none_or(|d| r.device == d) && batch.is_none_or(|b| r.batch == b))
        .collect();
    let orphans: BTreeSet<&str> = runs
        .iter()
        .filter(|r| !by_model.contains_key(r.model.as_str()))
        .map(|r| r.model.as_str())
        .collect();
    if !orphans.is_empty() {
        return Err(CliError::Input(format!(
            "unmatched models: {}",
            orphans.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let mut rows = Vec::new();
    for run in &runs {
        let p = &by_model[run.model.as_str()];
        let mut joined = run.clone();
        joined.macs = joined.macs.or(Some(p.macs));
        let m = core(&run.model, energy_metrics(&joined, per_frame))?;
        let reuse: Reuse = core(&run.model, p.reuse())?;
        rows.push(EnergyRow {
            model: run.model.clone(),
            device: run.device.clone(),
            batch: run.batch,
            epp: m.epp,
            efficiency: m.efficiency,
            ai_c: reuse.ai_c(),
            di: core(&run.model, weighted_intensity(&reuse, alpha))?,
        });
    }
    if common.format == Format::Json {
        return Ok(json(&rows));
    }
    let mut t = Table::new(&["model", "device", "batch", "epp", "efficiency", "ai_c", "di"]);
    for r in &rows {
        t.row([
            field(&r.model),
            field(&r.device),
            r.batch.to_string(),
            sci(r.epp),
            sci(r.efficiency),
            ratio(r.ai_c),
            ratio(r.di),
        ]);
    }
    Ok(t.finish())
}

fn column(path: &Path, name: &str) -> Result<Vec<f64>, CliError> {
    let ctx = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| CliError::Input(format!("{ctx}: {e}")))?;
    let idx = headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Input(format!("{ctx}: no column `{name}`")))?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{ctx}: {e}")))?;
        let cell = rec.get(idx).unwrap_or("");
        let v: f64 = cell
            .parse()
            .map_err(|_| CliError::Input(format!("{ctx}: row {}: `{name}` is not a number: `{cell}`", i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Input(format!("{ctx}: row {}: `{name}` is not finite", i + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

#[derive(Serialize)]
struct StatsReport {
    n: usize,
    r_p: f64,
    r_s: f64,
    ci95: Option<ConfidenceInterval>,
    ci99: Option<ConfidenceInterval>,
}

pub fn stats(csv: &Path, x: &str, y: &str, common: Common) -> Result<String, CliError> {
    let xs = column(csv, x)?;
    let ys = column(csv, y)?;
    let ctx = format!("{x} vs {y}");
    let r_p = core(&ctx, pearson(&xs, &ys))?;
    let r_s = core(&ctx, spearman(&xs, &ys))?;
    let report = StatsReport {
        n: xs.len(),
        r_p,
        r_s,
        ci95: fisher_ci(r_p, xs.len(), 0.95).ok(),
        ci99: fisher_ci(r_p, xs.len(), 0.99).ok(),
    };
    if common.format == Format::Json {
        return Ok(json(&report));
    }
    let bounds = |ci: &Option<ConfidenceInterval>| match ci {
        Some(c) => [ratio(c.lower), ratio(c.upper)],
        None => [String::new(), String::new()],
    };
    let mut t = Table::new(&["n", "r_p", "r_s", "ci95_lower", "ci95_upper", "ci99_lower", "ci99_upper"]);
    let [l95, u95] = bounds(&report.ci95);
    let [l99, u99] = bounds(&report.ci99);
    t.row([report.n.to_string(), ratio(r_p), ratio(r_s), l95, u95, l99, u99]);
    Ok(t.finish())
}

pub fn ci(r: f64, n: usize, level: f64, common: Common) -> Result<String, CliError> {
    let ci = fisher_ci(r, n, level).map_err(|e| match e {
        StatsError::PerfectCorrelation(_) | StatsError::TooFewSamples { .. } => CliError::Degenerate(e.to_string()),
        _ => CliError::Input(e.to_string()),
    })?;
    if common.format == Format::Json {
        return Ok(json(&ci));
    }
    let mut t = Table::new(&["r", "n", "level", "lower", "upper", "width"]);
    t.row([
        ratio(ci.r),
        ci.n.to_string(),
        ratio(ci.level),
        ratio(ci.lower),
        ratio(ci.upper),
        ratio(ci.width),
    ]);
    Ok(t.finish())
}

pub fn sample_size(level: f64, width: f64) -> Result<String, CliError> {
    let n = min_sample_size(level, width).map_err(|e| CliError::Input(e.to_string()))?;
    let mut t = Table::new(&["level", "width", "n"]);
    t.row([ratio(level), ratio(width), n.to_string()]);
    Ok(t.finish())
}

pub fn power(trace: &Path, idle: f64, subtract_idle: bool) -> Result<String, CliError> {
    let samples = core(&trace.display().to_string(), load_power_samples(open(trace)?))?;
    let watts: Vec<f64> = samples.iter().map(|s| s.watts).collect();
    let avg = core(&trace.display().to_string(), average_power(&watts, idle, subtract_idle))?;
    let mut t = Table::new(&["p_avg_w"]);
    t.row([ratio(avg)]);
    Ok(t.finish())
}
