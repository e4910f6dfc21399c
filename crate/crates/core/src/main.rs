use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use rfct::evaluation::{evaluate, format_boxes, load_boxes, parse_boxes, SequenceResult};
use rfct::features::Frame;
use rfct::spatial_map::MapKind;
use rfct::synthetic::{track_synthetic, SyntheticSpec};
use rfct::{run_sequence, Error, TrackerConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_IMAGES: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_EVAL: u8 = 4;

#[derive(Parser)]
#[command(name = "rfct", version, about = "Region-filtering correlation tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a target through a directory of frames.
    Track(TrackArgs),
    /// Score predicted boxes against ground truth.
    Eval(EvalArgs),
    /// Track a generated sequence and check the result.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Overrides {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial map variant: binary, rquadratic or ours.
    #[arg(long)]
    map: Option<String>,
    /// Color-name table (text or raw f32).
    #[arg(long)]
    cn_table: Option<PathBuf>,
}

#[derive(Args)]
struct TrackArgs {
    /// Directory of JPEG or PNG frames, processed in filename order.
    sequence_dir: PathBuf,
    /// Initial box `x,y,w,h`, 1-indexed pixels.
    #[arg(long)]
    init: String,
    /// Output file, one `x,y,w,h` line per frame.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the fully resolved config here.
    #[arg(long)]
    effects_log: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted boxes, one `x,y,w,h` line per frame
    predictions: PathBuf,
    /// Ground-truth boxes in the same format; NaN rows are skipped
    ground_truth: PathBuf,
    /// JSON output path; printed to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Number of pyramid levels.
    #[arg(long)]
    scales: Option<usize>,
    /// ADMM iterations per frame.
    #[arg(long)]
    iterations: Option<usize>,
    #[command(flatten)]
    overrides: Overrides,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    error!("{msg}");
    eprintln!("rfct: {msg}");
    ExitCode::from(code)
}

fn load_config(o: &Overrides) -> Result<TrackerConfig, Error> {
    let mut cfg = match &o.config {
        Some(p) => TrackerConfig::load(p)?,
        None => TrackerConfig::default(),
    };
    if let Some(m) = &o.map {
        cfg.map_kind = m.parse::<MapKind>()?;
    }
    if let Some(p) = &o.cn_table {
        cfg.cn_table = Some(p.clone());
    }
    Ok(cfg)
}

fn list_frames(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| matches!(x.to_ascii_lowercase().as_str(), "jpg" | "jpeg" | "png"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Io(format!("no JPEG or PNG frames in {}", dir.display())));
    }
    Ok(paths)
}

fn cmd_track(args: TrackArgs) -> ExitCode {
    let cfg = match load_config(&args.overrides).and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let init = match parse_boxes(&args.init) {
        Ok(v) if v.len() == 1 && v[0].is_some() => v[0].unwrap(),
        _ => return fail(EXIT_CONFIG, format!("bad initial box `{}`", args.init)),
    };
    if let Some(p) = &args.effects_log {
        if let Err(e) = std::fs::write(p, cfg.to_text()) {
            return fail(EXIT_FAILURE, format!("cannot write {}: {e}", p.display()));
        }
    }
    let paths = match list_frames(&args.sequence_dir) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_IMAGES, e),
    };
    info!("{} frames", paths.len());
    let run = run_sequence(paths.iter().map(Frame::open), init, &cfg);
    if let Err(e) = std::fs::write(&args.out, format_boxes(&run.boxes)) {
        return fail(EXIT_FAILURE, format!("cannot write {}: {e}", args.out.display()));
    }
    match run.error {
        None => ExitCode::SUCCESS,
        Some((i, e)) => {
            let code = match e {
                Error::Io(_) => EXIT_IMAGES,
                Error::Config(_) => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            };
            let name = paths.get(i).map(|p| p.display().to_string()).unwrap_or_default();
            fail(code, format!("frame {} ({name}): {e}", i + 1))
        }
    }
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let pred = match load_boxes(&args.predictions) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_EVAL, e),
    };
    let gt = match load_boxes(&args.ground_truth) {
        Ok(b) => b,
        Err(e) => return fail(EXIT_EVAL, e),
    };
    let metrics = match SequenceResult::new("sequence", pred, gt).and_then(|r| evaluate(&[r])) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_EVAL, e),
    };
    let json = metrics.to_json();
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, json + "\n") {
                return fail(EXIT_FAILURE, format!("cannot write {}: {e}", p.display()));
            }
        }
        None => println!("{json}"),
    }
    ExitCode::SUCCESS
}

fn cmd_selftest(args: SelftestArgs) -> ExitCode {
    let mut cfg = match load_config(&args.overrides) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(s) = args.scales {
        cfg.pyramid.s = s;
    }
    if let Some(n) = args.iterations {
        cfg.solver.iterations = n;
    }
    if let Err(e) = cfg.validate() {
        return fail(EXIT_CONFIG, e);
    }
    let seq = SyntheticSpec::default().generate();
    let report = match track_synthetic(&seq, &cfg) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_FAILURE, e),
    };
    let final_kappa = report.run.kappas.last().copied().unwrap_or(1.0);
    println!(
        "frames={} mean_iou={:.4} dp20={:.4} op50={:.4} auc={:.4} final_kappa={:.4}",
        report.run.boxes.len(),
        report.mean_iou,
        report.metrics.dp20,
        report.metrics.op50,
        report.metrics.auc,
        final_kappa
    );
    if report.mean_iou > 0.5 {
        println!("selftest: pass");
        ExitCode::SUCCESS
    } else {
        println!("selftest: FAIL (mean IoU must exceed 0.5)");
        ExitCode::from(EXIT_FAILURE)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Track(a) => cmd_track(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Selftest(a) => cmd_selftest(a),
    }
}
