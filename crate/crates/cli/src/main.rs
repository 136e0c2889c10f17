//! `osbrp`: exact one-station repositioning from the command line.
//!
//! Subcommands front the library one-to-one: `solve` and `simulate` work on
//! instance files, `oracle` cross-checks the solver against exhaustive
//! search, `gen` writes seeded random instances, `bench` times the solver
//! across horizon sizes, and `export-lp` emits the equivalent integer
//! program in LP format.
//!
//! Exit codes: 0 success (oracle: PASS), 1 internal invariant breach
//! (oracle: FAIL), 2 input error, 3 resource-limit refusal.

mod bench;

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use osbrp_core::global_solver;
use osbrp_core::instance_io::{self, GeneratorConfig, InitialStockPolicy};
use osbrp_core::milp_export;
use osbrp_core::model::{simulate, simulate_unchecked, BaseTrajectory, Instance};
use osbrp_core::oracle::{brute_force, uncapacitated_bracket};

#[derive(Parser)]
#[command(name = "osbrp", version, about = "Exact one-station bike repositioning solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the loss-minimizing transfer for every scheduled visit
    Solve {
        /// Instance file (JSON)
        instance: PathBuf,
        /// Write the induced trajectory as CSV
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
        /// Ignore the vehicle load windows
        #[arg(long)]
        uncapacitated: bool,
    },
    /// Replay a transfer vector and report its loss
    Simulate {
        /// Instance file (JSON)
        instance: PathBuf,
        /// Comma-separated transfer per visit, e.g. "-2,0"
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        interventions: String,
        /// Write the induced trajectory as CSV
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Cross-check the solver against exhaustive search
    Oracle {
        /// Instance file (JSON)
        instance: PathBuf,
        /// Refuse searches wider than this many candidate vectors
        #[arg(long, default_value_t = 10_000_000)]
        limit: u128,
        /// Compare the unbounded-vehicle solver against a wide-bracket search
        #[arg(long)]
        uncapacitated: bool,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Write a seeded random instance
    Gen {
        /// Horizon length
        #[arg(long)]
        epochs: usize,
        /// Number of vehicle visits
        #[arg(long)]
        visits: usize,
        /// Station capacity
        #[arg(long)]
        capacity: i64,
        /// Inclusive per-epoch demand range, e.g. "-8,8"
        #[arg(long, value_name = "A,B", value_parser = parse_range, allow_hyphen_values = true)]
        demand_range: (i64, i64),
        /// Inclusive vehicle capacity range
        #[arg(long, value_name = "A,B", value_parser = parse_range, default_value = "0,8")]
        vehicle_capacity_range: (i64, i64),
        /// Fix the initial stock instead of drawing it uniformly
        #[arg(long)]
        initial_stock: Option<i64>,
        /// RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output instance file
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
    },
    /// Time the solver across horizon sizes
    Bench {
        /// Comma-separated horizon sizes, strictly increasing
        #[arg(long, value_name = "S1,S2,…", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Visits per instance
        #[arg(long, default_value_t = 50)]
        visits: usize,
        /// Timed solves per size (at least 3)
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Base RNG seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Machine-readable output
        #[arg(long)]
        json: bool,
    },
    /// Write the instance's integer program in LP format
    #[command(name = "export-lp")]
    ExportLp {
        /// Instance file (JSON)
        instance: PathBuf,
        /// Relax integrality (drop the Generals section)
        #[arg(long)]
        relax: bool,
        /// Output LP file
        #[arg(short, long, value_name = "PATH")]
        output: PathBuf,
    },
}

/// Failure modes mapped onto the exit-code taxonomy.
enum CliError {
    /// Unreadable, unparsable, or invalid input; exit 2.
    Input(String),
    /// The tool contradicted itself; exit 1.
    Invariant(String),
    /// A configured resource limit refused the work; exit 3.
    Limit(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Invariant(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
            CliError::Limit(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Invariant(m) | CliError::Limit(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            instance,
            trajectory,
            json,
            uncapacitated,
        } => cmd_solve(&instance, trajectory.as_deref(), json, uncapacitated),
        Command::Simulate {
            instance,
            interventions,
            trajectory,
            json,
        } => cmd_simulate(&instance, &interventions, trajectory.as_deref(), json),
        Command::Oracle {
            instance,
            limit,
            uncapacitated,
            json,
        } => cmd_oracle(&instance, limit, uncapacitated, json),
        Command::Gen {
            epochs,
            visits,
            capacity,
            demand_range,
            vehicle_capacity_range,
            initial_stock,
            seed,
            output,
        } => cmd_gen(
            &GeneratorConfig {
                epochs,
                visit_count: visits,
                station_capacity: capacity,
                demand_range,
                vehicle_capacity_range,
                seed,
                initial_stock_policy: match initial_stock {
                    Some(stock) => InitialStockPolicy::Fixed(stock),
                    None => InitialStockPolicy::Uniform,
                },
            },
            &output,
        ),
        Command::Bench {
            sizes,
            visits,
            repeats,
            seed,
            json,
        } => cmd_bench(
            &bench::BenchConfig {
                sizes,
                visits,
                repeats,
                seed,
            },
            json,
        ),
        Command::ExportLp {
            instance,
            relax,
            output,
        } => cmd_export_lp(&instance, relax, &output),
    }
}

#[derive(Serialize)]
struct SolveOutput {
    interventions: Vec<i64>,
    total_loss: i64,
    null_loss: i64,
    recovered_loss: i64,
    systemic_pre_visit_loss: i64,
    uncapacitated_loss: i64,
}

fn cmd_solve(
    path: &Path,
    trajectory_path: Option<&Path>,
    json: bool,
    uncapacitated: bool,
) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    let solution = global_solver::solve(&instance);

    let output;
    let replay: (BaseTrajectory, i64);
    if uncapacitated {
        let (loss, plan) = global_solver::solve_uncapacitated(&instance);
        replay = simulate_unchecked(&instance, &plan)
            .map_err(|e| CliError::Invariant(format!("replaying the solution: {e}")))?;
        output = SolveOutput {
            interventions: plan,
            total_loss: loss,
            null_loss: solution.null_loss,
            recovered_loss: solution.null_loss - loss,
            systemic_pre_visit_loss: solution.systemic_pre_visit_loss,
            uncapacitated_loss: loss,
        };
    } else {
        replay = simulate(&instance, &solution.interventions)
            .map_err(|e| CliError::Invariant(format!("replaying the solution: {e}")))?;
        output = SolveOutput {
            interventions: solution.interventions,
            total_loss: solution.total_loss,
            null_loss: solution.null_loss,
            recovered_loss: solution.recovered_loss,
            systemic_pre_visit_loss: solution.systemic_pre_visit_loss,
            uncapacitated_loss: solution.uncapacitated_loss,
        };
    }

    if replay.1 != output.total_loss {
        return Err(CliError::Invariant(format!(
            "replayed loss {} does not match reported total_loss {}",
            replay.1, output.total_loss
        )));
    }

    if let Some(out) = trajectory_path {
        write_trajectory_file(&instance, &output.interventions, &replay.0, out)?;
    }

    if json {
        print_json(&output)?;
    } else {
        println!("interventions: {:?}", output.interventions);
        println!("total_loss: {}", output.total_loss);
        println!("null_loss: {}", output.null_loss);
        println!("recovered_loss: {}", output.recovered_loss);
        println!("systemic_pre_visit_loss: {}", output.systemic_pre_visit_loss);
        println!("uncapacitated_loss: {}", output.uncapacitated_loss);
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput {
    interventions: Vec<i64>,
    total_loss: i64,
    terminal_stock: i64,
}

fn cmd_simulate(
    path: &Path,
    interventions: &str,
    trajectory_path: Option<&Path>,
    json: bool,
) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    let interventions = parse_interventions(interventions)?;
    let (trajectory, total_loss) =
        simulate(&instance, &interventions).map_err(|e| CliError::Input(e.to_string()))?;

    if let Some(out) = trajectory_path {
        write_trajectory_file(&instance, &interventions, &trajectory, out)?;
    }

    let output = SimulateOutput {
        interventions,
        total_loss,
        terminal_stock: trajectory.terminal_stock(),
    };
    if json {
        print_json(&output)?;
    } else {
        println!("interventions: {:?}", output.interventions);
        println!("total_loss: {}", output.total_loss);
        println!("terminal_stock: {}", output.terminal_stock);
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleOutput {
    oracle_best_loss: i64,
    solver_total_loss: i64,
    pass: bool,
}

fn cmd_oracle(path: &Path, limit: u128, uncapacitated: bool, json: bool) -> Result<(), CliError> {
    let instance = load_instance(path)?;

    let (solver_total_loss, search) = if uncapacitated {
        let bounds = vec![uncapacitated_bracket(&instance); instance.visit_count()];
        let (loss, _) = global_solver::solve_uncapacitated(&instance);
        (loss, brute_force(&instance, Some(&bounds), limit))
    } else {
        (
            global_solver::solve(&instance).total_loss,
            brute_force(&instance, None, limit),
        )
    };
    let oracle = search.map_err(|e| match e {
        osbrp_core::oracle::OracleError::SearchSpaceTooLarge { size, limit } => {
            CliError::Limit(format!(
                "search space of {size} candidate vectors exceeds the limit of {limit}"
            ))
        }
        other => CliError::Input(other.to_string()),
    })?;

    let output = OracleOutput {
        oracle_best_loss: oracle.best_loss,
        solver_total_loss,
        pass: oracle.best_loss == solver_total_loss,
    };
    if json {
        print_json(&output)?;
    } else {
        println!("oracle best_loss: {}", output.oracle_best_loss);
        println!("solver total_loss: {}", output.solver_total_loss);
        println!("{}", if output.pass { "PASS" } else { "FAIL" });
    }
    if output.pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "solver total_loss {} disagrees with oracle best_loss {}",
            output.solver_total_loss, output.oracle_best_loss
        )))
    }
}

fn cmd_gen(config: &GeneratorConfig, output: &Path) -> Result<(), CliError> {
    let instance = instance_io::generate(config).map_err(|e| CliError::Input(e.to_string()))?;
    fs::write(output, instance_io::write_instance(&instance))
        .map_err(|e| CliError::Input(format!("writing {}: {e}", output.display())))?;
    println!("wrote {}", output.display());
    Ok(())
}

fn cmd_bench(config: &bench::BenchConfig, json: bool) -> Result<(), CliError> {
    let report = bench::run(config).map_err(|e| CliError::Input(e.to_string()))?;
    if json {
        print_json(&report)?;
    } else {
        print!("{}", bench::render_report(&report));
    }
    Ok(())
}

fn cmd_export_lp(path: &Path, relax: bool, output: &Path) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    let model = milp_export::build_model(&instance, relax);
    fs::write(output, model.render())
        .map_err(|e| CliError::Input(format!("writing {}: {e}", output.display())))?;
    println!("wrote {}", output.display());
    Ok(())
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))?;
    instance_io::read_instance(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_interventions(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<i64>().map_err(|_| {
                CliError::Input(format!(
                    "interventions must be comma-separated integers, got {part:?}"
                ))
            })
        })
        .collect()
}

fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let (low, high) = text
        .split_once(',')
        .ok_or_else(|| format!("expected \"A,B\", got {text:?}"))?;
    let low = low
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("{low:?} is not an integer"))?;
    let high = high
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("{high:?} is not an integer"))?;
    Ok((low, high))
}

fn write_trajectory_file(
    instance: &Instance,
    interventions: &[i64],
    trajectory: &BaseTrajectory,
    path: &Path,
) -> Result<(), CliError> {
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Input(format!("creating {}: {e}", path.display())))?;
    instance_io::write_trajectory(instance, interventions, trajectory, &mut file)
        .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))?;
    file.flush()
        .map_err(|e| CliError::Input(format!("writing {}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Invariant(format!("serializing output: {e}")))?;
    println!("{text}");
    Ok(())
}
