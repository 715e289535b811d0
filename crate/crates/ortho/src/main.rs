use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ortho::bench::{generated_cases, rows_to_csv, run_benchmark};
use ortho::generate::generate_random_multigraph;
use ortho::instance::{emit_instance, parse_instance, Instance, InstanceConfig, Mode, NudgeKind};
use ortho::pipeline::{nudge_mode, parse_schedule, PipelineConfig};
use ortho::svg::emit_svg;
use ortho_core::metrics::CROSSING_POLICY;

#[derive(Parser)]
#[command(name = "ortho", version, about = "Orthogonal layout for multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Force,
    GivenPositions,
    GivenRouting,
}

#[derive(Clone, Copy, ValueEnum)]
enum NudgeArg {
    Constrained,
    Full,
}

#[derive(clap::Args)]
struct LayoutFlags {
    /// Where vertex positions and routes come from (default: force).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Minimum distance between drawing objects (default: 12).
    #[arg(long)]
    delta_min: Option<f64>,
    /// Nudging variant (default: full).
    #[arg(long, value_enum)]
    nudge: Option<NudgeArg>,
    /// Nudging pass schedule, H and V letters (default: HVH).
    #[arg(long)]
    passes: Option<String>,
    /// Seed for the force-directed layout.
    #[arg(long)]
    seed: Option<u64>,
    /// Merge collinear bends of one edge where possible.
    #[arg(long)]
    collapse_bends: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Lay out an instance document.
    Layout {
        /// JSON instance document.
        input: PathBuf,
        #[command(flatten)]
        flags: LayoutFlags,
        /// Write the drawing as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write metrics as key=value lines.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Write the drawing back as an instance document with positions and paths.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Add channels, representatives and constraint arcs to the SVG.
        #[arg(long)]
        debug_layers: bool,
    },
    /// Write a random connected multigraph as an instance document.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        degree: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the pipeline on generated instances and print CSV.
    Bench {
        /// Comma separated vertex counts.
        #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100, 150])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 4.0)]
        degree: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        flags: LayoutFlags,
    },
}

fn apply_flags(mut cfg: PipelineConfig, f: &LayoutFlags) -> Result<PipelineConfig, String> {
    if let Some(m) = f.mode {
        cfg.mode = match m {
            ModeArg::Force => Mode::Force,
            ModeArg::GivenPositions => Mode::GivenPositions,
            ModeArg::GivenRouting => Mode::GivenRouting,
        };
    }
    if let Some(d) = f.delta_min {
        cfg.nudge.delta_min = d;
    }
    if let Some(n) = f.nudge {
        cfg.nudge.mode = nudge_mode(match n {
            NudgeArg::Constrained => NudgeKind::Constrained,
            NudgeArg::Full => NudgeKind::Full,
        });
    }
    if let Some(p) = &f.passes {
        cfg.nudge.schedule = parse_schedule(p)?;
    }
    if let Some(s) = f.seed {
        cfg.seed = s;
    }
    if f.collapse_bends {
        cfg.nudge.collapse_bends = true;
    }
    Ok(cfg)
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let usage = |e: String| (1u8, e);
    let pipeline = |e: ortho::PipelineError| (2u8, e.to_string());
    match cli.command {
        Command::Layout { input, flags, svg, metrics, output, debug_layers } => {
            let text = fs::read_to_string(&input).map_err(|e| (1, format!("{}: {e}", input.display())))?;
            let inst = parse_instance(&text).map_err(|e| (1, format!("{}: {e}", input.display())))?;
            let cfg = PipelineConfig::default().with_instance(&inst).map_err(usage)?;
            let cfg = apply_flags(cfg, &flags).map_err(usage)?;
            let out = ortho::run_instance(&inst, &cfg).map_err(pipeline)?;
            for (stage, d) in &out.timings {
                log::info!("{stage}: {:.3}s", d.as_secs_f64());
            }
            if let Some(p) = svg {
                let text = emit_svg(&out.graph, &out.drawing, debug_layers.then_some(&out.debug));
                write_out(&Some(p), &text).map_err(usage)?;
            }
            let mut report = format!("crossing_policy={CROSSING_POLICY}\n");
            for (k, v) in out.metrics.fields() {
                report.push_str(&format!("{k}={v}\n"));
            }
            match metrics {
                Some(p) => write_out(&Some(p), &report).map_err(usage)?,
                None => print!("{report}"),
            }
            if let Some(p) = output {
                let mut g = out.graph.clone();
                for (v, b) in g.vertices_mut().iter_mut().zip(&out.drawing.boxes) {
                    v.shape = Some(*b);
                    v.position = Some(b.center);
                }
                let paths = out.drawing.edges.iter().map(|e| e.points.clone()).collect();
                let doc = Instance {
                    graph: g,
                    paths: Some(paths),
                    config: InstanceConfig { mode: Some(Mode::GivenRouting), ..InstanceConfig::default() },
                };
                write_out(&Some(p), &emit_instance(&doc)).map_err(usage)?;
            }
            Ok(())
        }
        Command::Generate { n, degree, seed, output } => {
            let graph = generate_random_multigraph(n, degree, seed).map_err(|e| (1, e.to_string()))?;
            let doc = Instance { graph, paths: None, config: InstanceConfig::default() };
            write_out(&output, &(emit_instance(&doc) + "\n")).map_err(usage)
        }
        Command::Bench { sizes, degree, seed, flags } => {
            let cfg = apply_flags(PipelineConfig::default(), &flags).map_err(usage)?;
            let cases = generated_cases(&sizes, degree, seed).map_err(|e| (1, e.to_string()))?;
            let rows = run_benchmark(&cases, &cfg);
            print!("{}", rows_to_csv(&rows));
            if rows.iter().any(|r| r.error.is_some()) {
                return Err((2, "some instances failed".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
