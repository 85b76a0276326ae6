//! Command-line surface.

use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rdladder::{BitrateGrid, DecisionConfig, Modes};

#[derive(Debug, Parser)]
#[command(name = "rdladder", version, about = "R-D model based resolution and bitrate decisions for transcoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster measured R-D curves and fit a cubic model per cluster and tier.
    Train(TrainArgs),
    /// Recompute the published knee points, thresholds and savings tables.
    VerifyPaper(VerifyArgs),
    /// Recommend a resolution and bitrate for every GOP in a measurement file.
    Recommend(RecommendArgs),
    /// Emit sampled model curves and decision markers for plotting.
    Plotdata(PlotArgs),
    /// Serve recommendations over HTTP at POST /v1/recommend.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

/// Exactly one of `--model` and `--paper-model`.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ModelSource {
    /// Model file written by `train`.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Use the built-in published six-cluster model.
    #[arg(long)]
    pub paper_model: bool,
}

/// Overrides for the decision thresholds.
#[derive(Debug, Clone, Default, Args)]
pub struct DecisionArgs {
    /// Visually-lossless PSNR target in dB [default: 40].
    #[arg(long, value_name = "DB")]
    pub vl_psnr: Option<f64>,
    /// Near-zero-slope threshold in dB per Mbps [default: 0.1].
    #[arg(long, value_name = "DB_PER_MBPS")]
    pub nzs_slope: Option<f64>,
    /// Bitrate range for ladders and near-zero-slope clamping [default: 0.2:6].
    #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
    pub operating_range: Option<(f64, f64)>,
    /// Bitrate range searched for the visually-lossless threshold [default: 0.2:12].
    #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
    pub vl_search_range: Option<(f64, f64)>,
}

impl DecisionArgs {
    pub fn config(&self) -> DecisionConfig {
        let mut cfg = DecisionConfig::default();
        if let Some(v) = self.vl_psnr {
            cfg.vl_psnr = v;
        }
        if let Some(v) = self.nzs_slope {
            cfg.nzs_slope = v;
        }
        if let Some(r) = self.operating_range {
            cfg.operating_range = r;
        }
        if let Some(r) = self.vl_search_range {
            cfg.vl_search_range = r;
        }
        cfg
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Measurement CSV (`gop_id,resolution,bitrate_mbps,psnr_db`), `-` for stdin.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Where to write the model file.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Clusters per tier.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// `LO:HI:N` for N evenly spaced bitrates, or a comma-separated list.
    #[arg(long, value_name = "GRID", default_value = "0.2:6:10", value_parser = parse_grid)]
    pub grid: BitrateGrid,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Measurement CSV, `-` for stdin.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Target transcoding bitrate in Mbps.
    #[arg(long, value_name = "MBPS")]
    pub target_bitrate: f64,
    /// Comma-separated subset of `trans_size,vl,nzs`, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_modes)]
    pub modes: Modes,
    #[command(flatten)]
    pub decision: DecisionArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Cluster index or `all`.
    #[arg(long, default_value = "all")]
    pub cluster: String,
    #[command(flatten)]
    pub decision: DecisionArgs,
    /// `human` and `csv` both emit CSV.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    #[command(flatten)]
    pub decision: DecisionArgs,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    Ok((parse_f64(lo)?, parse_f64(hi)?))
}

pub fn parse_grid(s: &str) -> Result<BitrateGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts[..] {
        [lo, hi, n] => {
            let n: usize = n.trim().parse().map_err(|_| format!("not a count: {n:?}"))?;
            BitrateGrid::linspace(parse_f64(lo)?, parse_f64(hi)?, n)
        }
        [list] => BitrateGrid::new(list.split(',').map(parse_f64).collect::<Result<_, _>>()?),
        _ => return Err(format!("expected LO:HI:N or a comma list, got {s:?}")),
    };
    grid.map_err(|e| e.to_string())
}

fn parse_modes(s: &str) -> Result<Modes, String> {
    s.parse().map_err(|e: rdladder::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("0.2:6:10").unwrap(), BitrateGrid::default());
        assert_eq!(parse_grid("1,2,3,4").unwrap().points(), &[1.0, 2.0, 3.0, 4.0]);
        assert!(parse_grid("1,2,3").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("4,3,2,1").is_err());
    }

    #[test]
    fn model_source_is_exclusive() {
        let base = ["rdladder", "recommend", "--input", "x.csv", "--target-bitrate", "3"];
        let parse = |extra: &[&str]| Cli::try_parse_from(base.iter().chain(extra));
        assert!(parse(&["--paper-model"]).is_ok());
        assert!(parse(&["--model", "m.json"]).is_ok());
        assert!(parse(&[]).is_err());
        assert!(parse(&["--paper-model", "--model", "m.json"]).is_err());
    }

    #[test]
    fn target_bitrate_is_mandatory() {
        let r = Cli::try_parse_from(["rdladder", "recommend", "--paper-model", "--input", "x.csv"]);
        assert!(r.is_err());
    }

    #[test]
    fn decision_overrides() {
        let cli = Cli::try_parse_from([
            "rdladder", "serve", "--paper-model", "--vl-psnr", "38", "--operating-range", "0.5:8",
        ])
        .unwrap();
        let Command::Serve(args) = cli.command else { panic!() };
        let cfg = args.decision.config();
        assert_eq!(cfg.vl_psnr, 38.0);
        assert_eq!(cfg.operating_range, (0.5, 8.0));
        assert_eq!(cfg.nzs_slope, 0.1);
    }
}
