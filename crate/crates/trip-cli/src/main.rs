//! `trip` — single-day itinerary planning toolkit.
//!
//! Exit codes: 0 success, 1 validation failures, 2 I/O or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use trip_core::compile::{compile, total_cost};
use trip_core::model::{plan_utility, TimeGrid};
use trip_core::pddl::{emit_pddl, parse_plan_llm, parse_plan_native, render_plan_native};
use trip_core::planner::{oracle_solve, solve, Heuristic, SolveOptions};
use trip_core::providers::{fixture_provider, llm_provider, synthetic_provider, ProviderRequest};
use trip_core::validator::validate;

use trip_cli::harness::{
    self, default_cities, eval_plan, gen_suite, gen_sweep, run_suite, summarize, write_csv,
    GenConfig, PlanGrammar, SweepMode, DEFAULT_PLACEHOLDER_UTILITY,
};
use trip_cli::http::HttpChat;
use trip_cli::taskfile::{load_task, load_task_file, save_task_file, TaskFile};
use trip_cli::transcript::{load_transcript, save_transcript, RecordingChat, ReplayChat};

#[derive(Parser)]
#[command(name = "trip", version, about = "Single-day itinerary planner")]
struct Cli {
    /// Base seed for anything randomized.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Rating scale ceiling for generated tasks.
    #[arg(long, global = true, default_value_t = 10)]
    max_utility: u32,

    /// Minutes per time slot.
    #[arg(long, global = true, default_value_t = 15)]
    slot_minutes: u16,

    /// Utility reported for invalid plans in metrics output.
    #[arg(long, global = true, default_value_t = DEFAULT_PLACEHOLDER_UTILITY)]
    placeholder_utility: u32,

    /// Search heuristic.
    #[arg(long, global = true, value_enum, default_value_t = HeuristicArg::H0)]
    heuristic: HeuristicArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    H0,
    H1,
}

impl From<HeuristicArg> for Heuristic {
    fn from(arg: HeuristicArg) -> Self {
        match arg {
            HeuristicArg::H0 => Heuristic::H0,
            HeuristicArg::H1 => Heuristic::H1,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GrammarArg {
    Native,
    Llm,
}

impl From<GrammarArg> for PlanGrammar {
    fn from(arg: GrammarArg) -> Self {
        match arg {
            GrammarArg::Native => PlanGrammar::Native,
            GrammarArg::Llm => PlanGrammar::Llm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    Fixture,
    Synthetic,
    Llm,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded benchmark suite of task files.
    Gen(GenArgs),
    /// Retrieve travel information for a city and write a task file.
    Fetch(FetchArgs),
    /// Solve a task optimally and print or save the plan.
    Plan(PlanArgs),
    /// Run the dynamic-programming oracle on a task.
    Oracle(OracleArgs),
    /// Check a plan against its task and print the violation report.
    Validate(ValidateArgs),
    /// Evaluate a plan file into a one-row metrics table.
    Eval(EvalArgs),
    /// Solve and score every task in a directory; write a CSV table.
    RunSuite(RunSuiteArgs),
    /// Write domain and problem PDDL for a task.
    PddlExport(PddlExportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for task files.
    #[arg(long, default_value = "suite")]
    out: PathBuf,
    /// Comma-separated city labels (default: the 20-city evaluation list).
    #[arg(long, value_delimiter = ',')]
    cities: Vec<String>,
    /// Tasks per city.
    #[arg(long, default_value_t = 5)]
    per_city: usize,
    /// POIs per task.
    #[arg(long, default_value_t = 10)]
    pois: usize,
    /// Tourism hours per task.
    #[arg(long, default_value_t = 8)]
    hours: u16,
    /// Scalability sweep instead of a flat suite.
    #[arg(long, value_enum)]
    sweep: Option<SweepArg>,
    /// Overwrite existing task files.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    /// POI counts 8..=18 (step 2) at 8 hours.
    Pois,
    /// Horizons 6..=10 hours at 10 POIs.
    Hours,
}

#[derive(Args)]
struct FetchArgs {
    /// City to fetch.
    #[arg(long)]
    city: String,
    /// POIs to request.
    #[arg(long, default_value_t = 10)]
    pois: usize,
    /// Tourism hours.
    #[arg(long, default_value_t = 8)]
    hours: u16,
    /// Task file to write.
    #[arg(long)]
    out: PathBuf,
    /// Where the data comes from.
    #[arg(long, value_enum, default_value_t = ProviderArg::Synthetic)]
    provider: ProviderArg,
    /// Replay a recorded transcript instead of calling the endpoint.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Record the endpoint conversation to this file.
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Task file.
    task: PathBuf,
    /// Plan file to write (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Task file.
    task: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Task file.
    task: PathBuf,
    /// Plan file.
    plan: PathBuf,
    /// Plan grammar.
    #[arg(long, value_enum, default_value_t = GrammarArg::Native)]
    grammar: GrammarArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Task file.
    task: PathBuf,
    /// Plan file.
    plan: PathBuf,
    /// Plan grammar.
    #[arg(long, value_enum, default_value_t = GrammarArg::Native)]
    grammar: GrammarArg,
    /// CSV file to write (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunSuiteArgs {
    /// Directory of task files.
    dir: PathBuf,
    /// CSV file to write (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PddlExportArgs {
    /// Task file.
    task: PathBuf,
    /// Directory for the .pddl files (defaults to the task's directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn solve_options(cli: &Cli) -> SolveOptions {
    SolveOptions {
        heuristic: cli.heuristic.into(),
        ..SolveOptions::default()
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Fetch(args) => cmd_fetch(cli, args),
        Command::Plan(args) => cmd_plan(cli, args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Eval(args) => cmd_eval(cli, args),
        Command::RunSuite(args) => cmd_run_suite(cli, args),
        Command::PddlExport(args) => cmd_pddl_export(args),
    }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode> {
    let config = GenConfig {
        per_city: args.per_city,
        n_pois: args.pois,
        horizon_hours: args.hours,
        max_utility: cli.max_utility,
        slot_minutes: cli.slot_minutes,
        seed: cli.seed,
        force: args.force,
    };
    let paths = match args.sweep {
        Some(SweepArg::Pois) => gen_sweep(&args.out, SweepMode::Pois, &config)?,
        Some(SweepArg::Hours) => gen_sweep(&args.out, SweepMode::Hours, &config)?,
        None => {
            let cities: Vec<&str> = if args.cities.is_empty() {
                default_cities()
            } else {
                args.cities.iter().map(String::as_str).collect()
            };
            gen_suite(&args.out, &cities, &config)?
        }
    };
    println!("wrote {} task files to {}", paths.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_fetch(cli: &Cli, args: &FetchArgs) -> Result<ExitCode> {
    let request = ProviderRequest {
        city: args.city.clone(),
        n_pois: args.pois,
        horizon_hours: args.hours,
        seed: cli.seed,
    };
    let raw = match args.provider {
        ProviderArg::Fixture => fixture_provider(&args.city).map_err(|e| anyhow::anyhow!("{e}"))?,
        ProviderArg::Synthetic => synthetic_provider(&request, cli.max_utility),
        ProviderArg::Llm => {
            if let Some(path) = &args.transcript {
                let mut chat = ReplayChat::new(load_transcript(path)?);
                llm_provider(&mut chat, &request, cli.max_utility)
                    .map_err(|e| anyhow::anyhow!("{e}"))?
            } else {
                let mut chat = RecordingChat::new(HttpChat::from_env()?);
                let raw = llm_provider(&mut chat, &request, cli.max_utility)
                    .map_err(|e| anyhow::anyhow!("{e}"))?;
                if let Some(record) = &args.record {
                    save_transcript(record, &chat.records)?;
                }
                raw
            }
        }
    };
    // The provider must cover a solvable task before anything is written.
    let grid = TimeGrid::new(cli.slot_minutes, 8 * 60, args.hours)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    trip_core::providers::build_task(&raw, &args.city, grid, cli.max_utility)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let file = TaskFile::from_raw(
        &raw,
        &args.city,
        cli.slot_minutes,
        "08:00",
        args.hours,
        cli.max_utility,
    )?;
    save_task_file(&args.out, &file)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_plan(cli: &Cli, args: &PlanArgs) -> Result<ExitCode> {
    let task = load_task(&args.task)?;
    let compiled = compile(&task);
    let start = Instant::now();
    let plan = solve(&compiled, &solve_options(cli)).map_err(|e| anyhow::anyhow!("{e}"))?;
    let runtime = start.elapsed().as_secs_f64();
    let text = render_plan_native(&plan, &task);
    let utility = plan_utility(&plan, &task).map_err(|e| anyhow::anyhow!("{e}"))?;
    let cost = total_cost(&plan, &compiled).map_err(|e| anyhow::anyhow!("{e}"))?;
    match &args.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    println!(
        "; utility {utility} cost {cost} visited {} of {} in {runtime:.3}s",
        plan.visited.len(),
        task.n_pois()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: &OracleArgs) -> Result<ExitCode> {
    let task = load_task(&args.task)?;
    let (utility, plan) = oracle_solve(&task).map_err(|e| anyhow::anyhow!("{e}"))?;
    print!("{}", render_plan_native(&plan, &task));
    println!(
        "; oracle utility {utility} visited {} of {}",
        plan.visited.len(),
        task.n_pois()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_plan_file(path: &Path, task: &trip_core::model::ItineraryTask, grammar: GrammarArg) -> Result<trip_core::model::Plan> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = match grammar {
        GrammarArg::Native => parse_plan_native(&text, task),
        GrammarArg::Llm => parse_plan_llm(&text, task),
    };
    parsed.map_err(|e| anyhow::anyhow!("{}:{}: {}", path.display(), e.line, e.message))
}

fn cmd_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let task = load_task(&args.task)?;
    let plan = parse_plan_file(&args.plan, &task, args.grammar)?;
    let report = validate(&plan, &task);
    print!("{report}");
    let ratios = harness::duration_ratios(&report);
    if !ratios.is_empty() {
        let (mean, std) = harness::mean_std(&ratios);
        println!("duration ratios: mean {mean:.4} std {std:.4}");
    }
    if report.valid() {
        println!("plan is valid");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<ExitCode> {
    let record = eval_plan(
        &args.task,
        &args.plan,
        args.grammar.into(),
        cli.placeholder_utility,
        &solve_options(cli),
    )?;
    let records = vec![record];
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &records)?;
        }
        None => write_csv(std::io::stdout().lock(), &records)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_run_suite(cli: &Cli, args: &RunSuiteArgs) -> Result<ExitCode> {
    let outcome = run_suite(&args.dir, cli.placeholder_utility, &solve_options(cli))?;
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &outcome.records)?;
            println!("wrote {} rows to {}", outcome.records.len(), path.display());
        }
        None => write_csv(std::io::stdout().lock(), &outcome.records)?,
    }
    print!("{}", summarize(&outcome.records));
    if outcome.errors > 0 {
        eprintln!("{} task(s) failed to load or solve", outcome.errors);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_pddl_export(args: &PddlExportArgs) -> Result<ExitCode> {
    let task = load_task(&args.task)?;
    // Also proves the file parses as trip-task/1 before export.
    let _ = load_task_file(&args.task)?;
    let compiled = compile(&task);
    let pair = emit_pddl(&compiled);
    let stem = args
        .task
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "task".to_string());
    let dir = match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            dir.clone()
        }
        None => args
            .task
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let domain_path = dir.join(format!("{stem}-domain.pddl"));
    let problem_path = dir.join(format!("{stem}-problem.pddl"));
    fs::write(&domain_path, &pair.domain_text)?;
    fs::write(&problem_path, &pair.problem_text)?;
    println!("wrote {}", domain_path.display());
    println!("wrote {}", problem_path.display());
    Ok(ExitCode::SUCCESS)
}
