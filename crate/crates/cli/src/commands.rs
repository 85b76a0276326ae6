//! Subcommand implementations. Each returns its stdout text so that output
//! can be tested without spawning processes.

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path;

use rdladder::clustering::{train, Trained};
use rdladder::decision::{LadderSegment, Mode};
use rdladder::ingest::{builtin_paper_model, load_model, model_checksum, parse_measurements_named, save_model, MeasurementSet};
use rdladder::rd_model::FitFamily;
use rdladder::{Advisor, BitrateGrid, ClusterModelSet, DecisionConfig, Modes};
use serde::Serialize;

use crate::args::{Format, ModelSource};
use crate::error::{CliError, CliResult};
use crate::verify::{verify_paper, VerifyReport};
use crate::wire::{advise, AdvisoryResponse, GopResult};

/// Plot sampling step in Mbps.
pub const PLOT_STEP: f64 = 0.05;

pub fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_measurements(path: &Path) -> CliResult<MeasurementSet> {
    let text = read_input(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    parse_measurements_named(&text, name.as_deref())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_source(source: &ModelSource) -> CliResult<ClusterModelSet> {
    match (&source.model, source.paper_model) {
        (None, true) => Ok(builtin_paper_model()),
        (Some(path), false) => {
            let text = read_input(path)?;
            load_model(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        _ => Err(CliError::Input("pass exactly one of --model PATH and --paper-model".into())),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Internal(format!("serializing output: {e}")))
}

fn fmt_mse(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn family_name(f: FitFamily) -> &'static str {
    match f {
        FitFamily::Linear => "linear",
        FitFamily::Logarithmic => "log",
        FitFamily::Quadratic => "quadratic",
        FitFamily::Cubic => "cubic",
    }
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    k: usize,
    seed: u64,
    grid: &'a [f64],
    vectors: usize,
    checksum: String,
    tiers: Vec<TierSummary>,
}

#[derive(Serialize)]
struct TierSummary {
    tier: String,
    inertia: f64,
    iterations: usize,
    converged: bool,
    clusters: Vec<ClusterSummary>,
}

#[derive(Serialize)]
struct ClusterSummary {
    cluster: usize,
    size: usize,
    chosen: &'static str,
    mse_linear: Option<f64>,
    mse_log: Option<f64>,
    mse_quadratic: Option<f64>,
    mse_cubic: Option<f64>,
}

fn summarize(trained: &Trained, vectors: usize) -> TrainSummary<'_> {
    let model = &trained.model;
    TrainSummary {
        k: model.k(),
        seed: model.seed(),
        grid: model.grid().points(),
        vectors,
        checksum: format!("{:016x}", model_checksum(model)),
        tiers: trained
            .tiers
            .iter()
            .map(|t| TierSummary {
                tier: t.tier.to_string(),
                inertia: t.kmeans.inertia,
                iterations: t.kmeans.iterations,
                converged: t.kmeans.converged,
                clusters: t
                    .fits
                    .iter()
                    .enumerate()
                    .map(|(i, fit)| ClusterSummary {
                        cluster: i + 1,
                        size: t
                            .kmeans
                            .labels
                            .iter()
                            .filter(|&&l| t.cluster_of_label[l] == i + 1)
                            .count(),
                        chosen: family_name(fit.chosen),
                        mse_linear: fit.linear,
                        mse_log: fit.logarithmic,
                        mse_quadratic: fit.quadratic,
                        mse_cubic: fit.cubic,
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Trains a model from `input`, writes it to `out` and returns the summary.
pub fn cmd_train(
    input: &Path,
    out: &Path,
    k: usize,
    seed: u64,
    grid: &BitrateGrid,
    format: Format,
) -> CliResult<String> {
    let set = read_measurements(input)?;
    let vectors = set.rd_vectors(grid)?;
    let n: usize = vectors.values().map(Vec::len).sum();
    let trained = train(&vectors, grid, k, seed)?;
    std::fs::write(out, save_model(&trained.model))
        .map_err(|e| CliError::Internal(format!("{}: {e}", out.display())))?;

    let summary = summarize(&trained, n);
    if format == Format::Json {
        return to_json(&summary);
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "trained k={} seed={} on {} R-D vectors, grid of {} bitrates [{}, {}] Mbps",
        summary.k,
        summary.seed,
        summary.vectors,
        grid.len(),
        grid.min(),
        grid.max()
    );
    for t in &summary.tiers {
        let _ = writeln!(
            s,
            "\n{}: inertia {:.6} after {} iterations{}",
            t.tier,
            t.inertia,
            t.iterations,
            if t.converged { "" } else { " (iteration cap reached)" }
        );
        let _ = writeln!(
            s,
            "  cluster  size  chosen     mse linear   mse log      mse quad     mse cubic"
        );
        for c in &t.clusters {
            let _ = writeln!(
                s,
                "  {:>7}  {:>4}  {:<9}  {:<11}  {:<11}  {:<11}  {}",
                c.cluster,
                c.size,
                c.chosen,
                fmt_mse(c.mse_linear),
                fmt_mse(c.mse_log),
                fmt_mse(c.mse_quadratic),
                fmt_mse(c.mse_cubic)
            );
        }
    }
    let _ = writeln!(s, "\nmodel written to {} (checksum {})", out.display(), summary.checksum);
    Ok(s)
}

pub fn cmd_verify_paper(format: Format) -> CliResult<(String, VerifyReport)> {
    let report = verify_paper().map_err(|e| CliError::Internal(e.to_string()))?;
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Human | Format::Csv => report.render_human(),
    };
    Ok((text, report))
}

fn render_recommendations_csv(resp: &AdvisoryResponse) -> String {
    let mut s = String::from(
        "gop_id,cluster,distance_db,native_tier,tier,target_bitrate,proposed_bitrate,\
         predicted_psnr,psnr_change,applied,target_clamped,extrapolated,error\n",
    );
    for r in &resp.recommendations {
        match r {
            GopResult::Ok(r) => {
                let applied: Vec<&str> = r.applied.iter().map(Mode::as_str).collect();
                let _ = writeln!(
                    s,
                    "{},{},{:.6},{},{},{},{:.6},{:.6},{:.6},{},{},{},",
                    r.gop_id,
                    r.cluster,
                    r.distance,
                    r.native_tier,
                    r.tier,
                    r.target_bitrate,
                    r.proposed_bitrate,
                    r.predicted_psnr,
                    r.psnr_change,
                    applied.join("+"),
                    r.target_clamped,
                    r.extrapolated
                );
            }
            GopResult::Err { gop_id, error } => {
                let message = error.message.replace('"', "'");
                let _ = writeln!(s, "{gop_id},,,,,,,,,,,,\"{}: {message}\"", error.kind);
            }
        }
    }
    s
}

fn render_recommendations_human(resp: &AdvisoryResponse) -> String {
    let mut s = String::new();
    let width = resp.recommendations.iter().map(|r| r.gop_id().len()).max().unwrap_or(3).max(3);
    let _ = writeln!(
        s,
        "{:<width$}  cluster  native  tier   target  proposed  psnr    Δpsnr   rationale",
        "gop"
    );
    for r in &resp.recommendations {
        match r {
            GopResult::Ok(r) => {
                let _ = writeln!(
                    s,
                    "{:<width$}  {:>7}  {:<6}  {:<5}  {:>6.3}  {:>8.3}  {:>6.2}  {:>+6.2}  {}",
                    r.gop_id,
                    r.cluster,
                    r.native_tier.to_string(),
                    r.tier.to_string(),
                    r.target_bitrate,
                    r.proposed_bitrate,
                    r.predicted_psnr,
                    r.psnr_change,
                    r.rationale
                );
            }
            GopResult::Err { gop_id, error } => {
                let _ = writeln!(s, "{gop_id:<width$}  error: {}", error.message);
            }
        }
    }
    match &resp.savings {
        Some(sv) => {
            let _ = writeln!(
                s,
                "\ntotal target {:.3} Mbps, proposed {:.3} Mbps, saving {:.2}%",
                sv.total_target, sv.total_proposed, sv.saving_percent
            );
        }
        None => s.push_str("\nno GOP received a recommendation\n"),
    }
    s
}

pub fn cmd_recommend(
    source: &ModelSource,
    input: &Path,
    target: f64,
    modes: Modes,
    cfg: DecisionConfig,
    format: Format,
) -> CliResult<String> {
    if !(target.is_finite() && target > 0.0) {
        return Err(CliError::Input(format!("--target-bitrate must be > 0, got {target}")));
    }
    let advisor = Advisor::new(load_source(source)?, cfg)?;
    let set = read_measurements(input)?;
    let resp = advise(&advisor, &set, modes, target);
    match format {
        Format::Json => to_json(&resp),
        Format::Csv => Ok(render_recommendations_csv(&resp)),
        Format::Human => Ok(render_recommendations_human(&resp)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    /// `curve`, `knee`, `vl` or `nzs`.
    pub kind: &'static str,
    pub cluster: usize,
    pub tier: String,
    pub bitrate: f64,
    pub psnr: f64,
    pub note: String,
}

/// Number of samples per curve over `range` at [`PLOT_STEP`].
pub fn plot_steps(range: (f64, f64)) -> usize {
    ((range.1 - range.0) / PLOT_STEP + 1e-9).floor() as usize + 1
}

pub fn plot_rows(advisor: &Advisor, clusters: &[usize]) -> CliResult<Vec<PlotRow>> {
    let model = advisor.model();
    let range = advisor.config().operating_range;
    let n = plot_steps(range);
    let mut rows = Vec::new();
    for &cluster in clusters {
        for curve in model.cluster(cluster)? {
            for i in 0..n {
                let r = range.0 + PLOT_STEP * i as f64;
                rows.push(PlotRow {
                    kind: "curve",
                    cluster,
                    tier: curve.tier.to_string(),
                    bitrate: r,
                    psnr: curve.cubic.value(r),
                    note: String::new(),
                });
            }
        }
        let ladder = advisor.ladder(cluster)?;
        for w in ladder.segments().windows(2) {
            let [LadderSegment { tier: from, hi, .. }, LadderSegment { tier: to, .. }] = w else { continue };
            rows.push(PlotRow {
                kind: "knee",
                cluster,
                tier: to.to_string(),
                bitrate: *hi,
                psnr: model.cubic(cluster, *to)?.value(*hi),
                note: format!("{from} -> {to}"),
            });
        }
        for tier in model.tiers() {
            if let Some(t) = advisor.vl_threshold(cluster, *tier) {
                let mut note = String::from("visually lossless");
                if t.clamped {
                    note.push_str("; already lossless at range start");
                }
                if t.extrapolated {
                    note.push_str("; extrapolated");
                }
                rows.push(PlotRow {
                    kind: "vl",
                    cluster,
                    tier: tier.to_string(),
                    bitrate: t.bitrate,
                    psnr: model.cubic(cluster, *tier)?.value(t.bitrate),
                    note,
                });
            }
            if let Some(iv) = advisor.nzs_interval(cluster, *tier) {
                let cubic = model.cubic(cluster, *tier)?;
                for (edge, r, clamped) in [("start", iv.lo, iv.lo_clamped), ("end", iv.hi, iv.hi_clamped)] {
                    rows.push(PlotRow {
                        kind: "nzs",
                        cluster,
                        tier: tier.to_string(),
                        bitrate: r,
                        psnr: cubic.value(r),
                        note: format!("near-zero slope {edge}{}", if clamped { "; clamped" } else { "" }),
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn parse_cluster_selection(sel: &str, k: usize) -> CliResult<Vec<usize>> {
    if sel.trim().eq_ignore_ascii_case("all") {
        return Ok((1..=k).collect());
    }
    match sel.trim().parse::<usize>() {
        Ok(c) if (1..=k).contains(&c) => Ok(vec![c]),
        _ => Err(CliError::Input(format!("unknown cluster {sel:?}: expected 1..={k} or all"))),
    }
}

pub fn cmd_plotdata(source: &ModelSource, cluster: &str, cfg: DecisionConfig, format: Format) -> CliResult<String> {
    let advisor = Advisor::new(load_source(source)?, cfg)?;
    let clusters = parse_cluster_selection(cluster, advisor.model().k())?;
    let rows = plot_rows(&advisor, &clusters)?;
    if format == Format::Json {
        return to_json(&rows);
    }
    let mut s = String::from("kind,cluster,tier,bitrate,psnr,note\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{:.4},{:.6},{}", r.kind, r.cluster, r.tier, r.bitrate, r.psnr, r.note);
    }
    Ok(s)
}
