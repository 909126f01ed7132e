//! `screenbot` — scenario runner, planner and chat console for the
//! fever-screening robot simulator.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use screenbot_cli::{intents, output, scenario_io, CliError};
use screenbot_core::chat::IntentSet;
use screenbot_core::harness;
use screenbot_core::nav::costmap::Costmap;
use screenbot_core::nav::grid::OccupancyGrid;
use screenbot_core::nav::plan_global;
use screenbot_core::world::Pose2D;

#[derive(Parser)]
#[command(
    name = "screenbot",
    version,
    about = "Deterministic 2D simulator for a fever-screening robot"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: events as JSON Lines, metrics as one JSON object.
    Run {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// RNG seed; identical seeds replay identical runs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tick budget override.
        #[arg(long)]
        ticks: Option<u64>,
        /// Event stream destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the trajectory trace (CSV).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Intent configuration; overrides the scenario's `chat.intents_path`.
        #[arg(long)]
        intents: Option<PathBuf>,
    },
    /// One-shot global plan on the scenario's ground-truth map (CSV x,y).
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        /// Index into the scenario goal list.
        #[arg(long, default_value_t = 0)]
        goal: usize,
    },
    /// Interactive screening conversation on stdin/stdout.
    Chat {
        /// Intent configuration; built-in set when omitted.
        #[arg(long)]
        intents: Option<PathBuf>,
        /// Temperature reading the session opens with, degrees Celsius.
        #[arg(long, default_value_t = 38.6)]
        reading: f64,
    },
    /// Run a scenario and dump the final occupancy grid as a PGM graymap.
    Map {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ticks: Option<u64>,
        /// Graymap destination.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            scenario,
            seed,
            ticks,
            out,
            trace,
            intents,
        } => cmd_run(&scenario, seed, ticks, out.as_deref(), trace.as_deref(), intents.as_deref()),
        Command::Plan { scenario, goal } => cmd_plan(&scenario, goal),
        Command::Chat { intents, reading } => cmd_chat(intents.as_deref(), reading),
        Command::Map {
            scenario,
            seed,
            ticks,
            out,
        } => cmd_map(&scenario, seed, ticks, &out),
    }
}

/// Intent set for a scenario: explicit flag beats the scenario's
/// `chat.intents_path` (resolved against the scenario file's directory),
/// which beats the built-in set.
fn resolve_intents(
    flag: Option<&Path>,
    scenario_path: &Path,
    scenario: &screenbot_core::scenario::Scenario,
) -> Result<IntentSet, CliError> {
    if let Some(p) = flag {
        return intents::load_intents(p);
    }
    if let Some(rel) = &scenario.chat.intents_path {
        let base = scenario_path.parent().unwrap_or(Path::new("."));
        return intents::load_intents(&base.join(rel));
    }
    Ok(intents::default_intents())
}

fn run_scenario(
    scenario_path: &Path,
    seed: u64,
    ticks: Option<u64>,
    intents_flag: Option<&Path>,
) -> Result<harness::RunOutput, CliError> {
    let scenario = scenario_io::load_scenario(scenario_path)?;
    let intent_set = resolve_intents(intents_flag, scenario_path, &scenario)?;
    harness::run(&scenario, intent_set, seed, ticks).map_err(|e| CliError::Scenario {
        path: scenario_path.display().to_string(),
        source: e,
    })
}

fn cmd_run(
    scenario_path: &Path,
    seed: u64,
    ticks: Option<u64>,
    out: Option<&Path>,
    trace: Option<&Path>,
    intents_flag: Option<&Path>,
) -> Result<(), CliError> {
    let result = run_scenario(scenario_path, seed, ticks, intents_flag)?;

    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::OutputIo {
                context: path.display().to_string(),
                source: e,
            })?;
            output::write_events(std::io::BufWriter::new(file), &result.events)?;
            // Events went to a file, so metrics own stdout.
            output::write_metrics(std::io::stdout().lock(), &result.metrics)?;
        }
        None => {
            output::write_events(std::io::stdout().lock(), &result.events)?;
            output::write_metrics(std::io::stderr().lock(), &result.metrics)?;
        }
    }
    if let Some(path) = trace {
        let file = std::fs::File::create(path).map_err(|e| CliError::OutputIo {
            context: path.display().to_string(),
            source: e,
        })?;
        output::write_trace(std::io::BufWriter::new(file), &result.trace)?;
    }
    Ok(())
}

fn cmd_plan(scenario_path: &Path, goal_index: usize) -> Result<(), CliError> {
    let scenario = scenario_io::load_scenario(scenario_path)?;
    let goals = scenario.goal_list();
    let goal = goals.get(goal_index).ok_or_else(|| {
        CliError::Usage(format!(
            "goal index {goal_index} out of range; scenario has {} goal(s)",
            goals.len()
        ))
    })?;

    let grid = OccupancyGrid::rasterize(
        scenario.world.bounds,
        &scenario.world.obstacles,
        scenario.planner.resolution,
    );
    let costmap = Costmap::build(&grid, &scenario.planner_params());
    let start = Pose2D::new(scenario.robot.start.0, scenario.robot.start.1, scenario.robot.start.2);
    let path = plan_global(&costmap, &start, &goal.pose())
        .map_err(|e| CliError::Runtime(format!("planning failed: {e}")))?;

    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "x,y").map_err(|e| CliError::OutputIo {
        context: "plan output".into(),
        source: e,
    })?;
    for p in &path {
        writeln!(w, "{},{}", p.x, p.y).map_err(|e| CliError::OutputIo {
            context: "plan output".into(),
            source: e,
        })?;
    }
    Ok(())
}

fn cmd_chat(intents_flag: Option<&Path>, reading: f64) -> Result<(), CliError> {
    let intent_set = match intents_flag {
        Some(p) => intents::load_intents(p)?,
        None => intents::default_intents(),
    };
    let mut engine = screenbot_core::chat::ChatEngine::new(intent_set, 38.0);
    let opening = engine
        .start_session(0, reading)
        .map_err(|e| CliError::Usage(format!("cannot open session: {e}")))?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{opening}").map_err(chat_io)?;

    let stdin = std::io::stdin();
    for line in stdin.lock().lines() {
        let line = line.map_err(chat_io)?;
        let reply = engine
            .respond(0, &line)
            .map_err(|e| CliError::Runtime(format!("chat: {e}")))?;
        writeln!(out, "{}", reply.text).map_err(chat_io)?;
        if reply.fallback {
            // Re-prompt with the pending question.
            let prompt = engine.session(0).expect("session open").pending_prompt().to_string();
            writeln!(out, "{prompt}").map_err(chat_io)?;
        }
        if reply.state == screenbot_core::chat::DialogState::Done {
            return Ok(());
        }
    }
    Err(CliError::Runtime(
        "input ended before the conversation finished".into(),
    ))
}

fn chat_io(e: std::io::Error) -> CliError {
    CliError::OutputIo {
        context: "chat console".into(),
        source: e,
    }
}

fn cmd_map(scenario_path: &Path, seed: u64, ticks: Option<u64>, out: &Path) -> Result<(), CliError> {
    let result = run_scenario(scenario_path, seed, ticks, None)?;
    let pgm = output::grid_to_pgm(&result.grid);
    std::fs::write(out, pgm).map_err(|e| CliError::OutputIo {
        context: out.display().to_string(),
        source: e,
    })
}
