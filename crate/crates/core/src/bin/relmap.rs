//! relmap command-line entry point.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 schema or usage error,
//! 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use relmap::error::HarnessError;
use relmap::graph::{export_dot, import_json};
use relmap::harness::scenario::{inline_parts, Actions, AgentSpec, Generator, WorldSpec};
use relmap::harness::{run_file, sweep_file, Scenario};

#[derive(Parser)]
#[command(
    name = "relmap",
    version,
    about = "Grid-anchored relation graphs: scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics.csv, summary.json, graph.json, graph.dot.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the cross product of parameter values, one subdirectory per cell.
    Sweep {
        scenario: PathBuf,
        /// e.g. "config.grid.period=2,4;seed=1,2"
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "sweep_out")]
        out: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Convert an exported graph.json to another format on stdout.
    Export {
        graph: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
    /// Write a self-contained scenario for a seeded random world.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        parts: usize,
        #[arg(long, value_enum, default_value = "learn-revisit")]
        trajectory: Trajectory,
        /// Wander steps for learn-revisit, total steps for the others.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Writes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trajectory {
    LearnRevisit,
    RandomWalk,
    Exploration,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn harness_exit(e: &HarnessError) -> ExitCode {
    eprintln!("relmap: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
        } => match run_file(&scenario, &out, seed) {
            Ok(output) => {
                let s = &output.summary;
                println!(
                    "prediction_accuracy={:.4} predictions={} nodes={} edges={} -> {}",
                    s.prediction_accuracy,
                    s.predictions,
                    s.node_count,
                    s.edge_count,
                    out.display()
                );
                for a in output.assertions.iter().filter(|a| !a.passed) {
                    eprintln!(
                        "relmap: assertion failed: {} = {} not within [{}, {}]",
                        a.metric,
                        a.value,
                        a.min.map_or("-inf".into(), |m| m.to_string()),
                        a.max.map_or("inf".into(), |m| m.to_string()),
                    );
                }
                ExitCode::from(output.exit_code() as u8)
            }
            Err(e) => harness_exit(&e),
        },
        Command::Sweep {
            scenario,
            grid,
            out,
            jobs,
        } => match sweep_file(&scenario, &grid, &out, jobs) {
            Ok(output) => {
                for c in output.cells.iter().filter(|c| c.exit_code != 0) {
                    eprintln!(
                        "relmap: cell {:03} exited {}{}",
                        c.index,
                        c.exit_code,
                        c.error
                            .as_deref()
                            .map(|e| format!(": {e}"))
                            .unwrap_or_default()
                    );
                }
                println!(
                    "{} cells -> {}",
                    output.cells.len(),
                    out.join("sweep.csv").display()
                );
                ExitCode::from(output.exit_code() as u8)
            }
            Err(e) => harness_exit(&e),
        },
        Command::Export { graph, format } => match export(&graph, format) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("relmap: {e:#}");
                ExitCode::from(2)
            }
        },
        Command::Generate {
            seed,
            parts,
            trajectory,
            steps,
            out,
        } => match generate(seed, parts, trajectory, steps, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("relmap: {e:#}");
                ExitCode::from(3)
            }
        },
    }
}

fn export(path: &PathBuf, format: Format) -> anyhow::Result<String> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let graph = import_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match format {
        Format::Dot => export_dot(&graph),
    })
}

fn generate(
    seed: u64,
    parts: usize,
    trajectory: Trajectory,
    steps: usize,
    out: Option<PathBuf>,
) -> anyhow::Result<()> {
    let mut scenario = Scenario {
        seed,
        world: WorldSpec {
            n_parts: parts,
            ..WorldSpec::default()
        },
        ..Scenario::from_value(serde_json::json!({}))?
    };
    let inline = inline_parts(&scenario.world, &scenario.config, seed)?;
    let generator = match trajectory {
        Trajectory::LearnRevisit => Generator::LearnRevisit {
            wander_steps: steps,
        },
        Trajectory::RandomWalk => Generator::RandomWalk {
            part: 0,
            steps,
            min_distance: 0.3,
        },
        Trajectory::Exploration => Generator::Exploration { steps },
    };
    scenario.actions = Actions::Generated(generator);
    let world = scenario.build_world()?;
    scenario.actions = Actions::List(scenario.resolve_actions(&world));
    scenario.world.parts = Some(inline);
    scenario.world.agent = Some(AgentSpec {
        position: [world.agent().x, world.agent().y],
        heading: world.heading(),
    });
    scenario.validate()?;
    let mut text = serde_json::to_string_pretty(&scenario)?;
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}
