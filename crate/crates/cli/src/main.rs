//! `meanpath` command-line front end.
//!
//! Exit codes: 0 success, 1 validation or parse failure, 2 runtime failure.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use meanpath::analysis::{follow_metrics, path_metrics, MetricsTable};
use meanpath::engine::run_with_frames;
use meanpath::perception::CameraFrame;
use meanpath::plot::{emit_plot, PlotKind};
use meanpath::{load_scenario_file, trace, Color, ScenarioError};

#[derive(Parser)]
#[command(
    name = "meanpath",
    version,
    about = "Multi-robot patrol simulator and trace analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the per-tick trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario duration, in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Write every rendered camera frame as a PPM image into this directory.
        #[arg(long)]
        frames: Option<PathBuf>,
    },
    /// Sample a robot's passage metrics from a trace.
    AnalyzePath {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        robot: u32,
        /// Comma-separated sample times in seconds.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample follower distances to an intruder from a trace.
    AnalyzeFollow {
        #[arg(long)]
        trace: PathBuf,
        /// Comma-separated follower robot ids.
        #[arg(long, value_delimiter = ',', required = true)]
        followers: Vec<u32>,
        #[arg(long, value_parser = parse_color)]
        color: Color,
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a metrics table as an SVG chart.
    Plot {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn parse_color(s: &str) -> Result<Color, String> {
    Color::parse(s).ok_or_else(|| format!("unknown color `{s}` (expected blue or green)"))
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Invalid(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load(path: &Path) -> Result<meanpath::Scenario, Failure> {
    load_scenario_file(path).map_err(|e| match e {
        ScenarioError::Io { .. } => runtime(e),
        _ => invalid(anyhow!(e).context(format!("scenario {}", path.display()))),
    })
}

fn read_trace(path: &Path) -> Result<Vec<trace::TraceRecord>, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening trace {}", path.display()))
        .map_err(runtime)?;
    trace::read_csv(BufReader::new(file))
        .with_context(|| format!("reading trace {}", path.display()))
        .map_err(invalid)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(runtime)
}

fn write_table(table: &MetricsTable, out: &Path) -> Result<(), Failure> {
    table
        .write_csv(create(out)?)
        .with_context(|| format!("writing {}", out.display()))
        .map_err(runtime)
}

fn simulate(
    scenario: &Path,
    out: &Path,
    duration: Option<f64>,
    frames: Option<&Path>,
) -> Result<(), Failure> {
    let mut sc = load(scenario)?;
    if let Some(d) = duration {
        if !(d.is_finite() && d >= 0.0) {
            return Err(invalid(anyhow!(
                "--duration must be a non-negative number of seconds, got {d}"
            )));
        }
        sc.duration = d;
    }
    let trace = match frames {
        None => run_with_frames(&sc, None),
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating frame directory {}", dir.display()))
                .map_err(runtime)?;
            let mut error = None;
            let mut sink = |tick: u64, robot: u32, frame: &CameraFrame| {
                if error.is_some() {
                    return;
                }
                let path = dir.join(format!("robot{robot}_tick{tick:06}.ppm"));
                let res = File::create(&path)
                    .map(BufWriter::new)
                    .and_then(|mut w| frame.write_ppm(&mut w).and_then(|_| w.flush()))
                    .with_context(|| format!("writing frame {}", path.display()));
                if let Err(e) = res {
                    error = Some(e);
                }
            };
            let trace = run_with_frames(&sc, Some(&mut sink));
            if let Some(e) = error {
                return Err(runtime(e));
            }
            trace
        }
    };
    let mut clamped: BTreeMap<u32, (u64, usize)> = BTreeMap::new();
    for c in &trace.collisions {
        clamped.entry(c.robot_id).or_insert((c.tick, 0)).1 += 1;
    }
    for (robot, (first, n)) in clamped {
        eprintln!(
            "warning: robot {robot} motion clamped by contact on {n} ticks, first at tick {first}"
        );
    }
    trace::write_csv(&trace.records, create(out)?)
        .with_context(|| format!("writing trace {}", out.display()))
        .map_err(runtime)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            duration,
            frames,
        } => simulate(&scenario, &out, duration, frames.as_deref()),
        Command::AnalyzePath {
            trace,
            robot,
            times,
            out,
        } => {
            let records = read_trace(&trace)?;
            let rows = path_metrics(&records, robot, &times).map_err(invalid)?;
            write_table(&MetricsTable::from_path_rows(&rows), &out)
        }
        Command::AnalyzeFollow {
            trace,
            followers,
            color,
            times,
            out,
        } => {
            let records = read_trace(&trace)?;
            let rows = follow_metrics(&records, &followers, color, &times).map_err(invalid)?;
            write_table(&MetricsTable::from_follow_rows(&rows), &out)
        }
        Command::Plot { metrics, kind, out } => {
            let file = File::open(&metrics)
                .with_context(|| format!("opening metrics {}", metrics.display()))
                .map_err(runtime)?;
            let table = MetricsTable::read_csv(BufReader::new(file))
                .with_context(|| format!("reading metrics {}", metrics.display()))
                .map_err(invalid)?;
            let svg = emit_plot(&table, kind).map_err(invalid)?;
            fs::write(&out, svg)
                .with_context(|| format!("writing {}", out.display()))
                .map_err(runtime)
        }
        Command::Validate { scenario } => {
            let sc = load(&scenario)?;
            println!(
                "{}: ok ({} robots, {} intruders, {} obstacles, {} s)",
                scenario.display(),
                sc.robots.len(),
                sc.intruders.len(),
                sc.world.obstacles.len(),
                sc.duration
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let (Failure::Invalid(e) | Failure::Runtime(e)) = f;
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
