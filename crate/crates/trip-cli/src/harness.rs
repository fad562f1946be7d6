//! Benchmark harness: seeded suite generation, evaluation records, CSV
//! metrics.
//!
//! The default suite mirrors the evaluation protocol: 20 cities (10 popular
//! destinations, 10 less popular), 5 instances each, N=10 POIs, H=8 tourism
//! hours — 100 tasks. City names are labels that select seeds; the instance
//! data itself is synthetic.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use trip_core::compile::compile;
use trip_core::model::{plan_utility, ItineraryTask, Plan};
use trip_core::pddl::{parse_plan_llm, parse_plan_native};
use trip_core::planner::{oracle_solve, solve, SolveOptions};
use trip_core::providers::{synthetic_provider, ProviderRequest};
use trip_core::validator::{validate, violation_ratio, ValidationReport, ViolationCategory};

use crate::taskfile::{load_task, TaskFile};

pub const CSV_HEADER: [&str; 11] = [
    "task_id",
    "method",
    "valid",
    "utility",
    "reported_utility",
    "suboptimality",
    "runtime_seconds",
    "visit_short",
    "travel_short",
    "horizon_exceeded",
    "pois_visited",
];

/// Utility reported for invalid external plans, used only in reporting.
pub const DEFAULT_PLACEHOLDER_UTILITY: u32 = 21;

pub fn popular_cities() -> Vec<&'static str> {
    vec![
        "Tokyo",
        "Paris",
        "Barcelona",
        "New York City",
        "London",
        "Cape Town",
        "Amsterdam",
        "Toronto",
        "Rome",
        "Berlin",
    ]
}

pub fn less_popular_cities() -> Vec<&'static str> {
    vec![
        "Cienfuegos",
        "Yogyakarta",
        "Matera",
        "Luang Prabang",
        "Salzburg",
        "Valparaiso",
        "Zadar",
        "Bergen",
        "Hoi An",
        "Colonia del Sacramento",
    ]
}

pub fn default_cities() -> Vec<&'static str> {
    let mut cities = popular_cities();
    cities.extend(less_popular_cities());
    cities
}

/// Stable per-instance seed derivation (splitmix64 over the inputs).
pub fn derive_seed(base: u64, city_index: u64, instance: u64) -> u64 {
    let mut z = base
        .wrapping_add(city_index.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(instance.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub per_city: usize,
    pub n_pois: usize,
    pub horizon_hours: u16,
    pub max_utility: u32,
    pub slot_minutes: u16,
    pub seed: u64,
    pub force: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            per_city: 5,
            n_pois: 10,
            horizon_hours: 8,
            max_utility: 10,
            slot_minutes: 15,
            seed: 0,
            force: false,
        }
    }
}

fn task_id(city: &str, instance: usize, n_pois: usize) -> String {
    let folded = trip_core::fold_name(city).unwrap_or_else(|_| "city".into());
    format!("{folded}_{instance}_poi_{n_pois}")
}

fn write_instance(
    dir: &Path,
    city: &str,
    id: &str,
    seed: u64,
    config: &GenConfig,
    horizon_hours: u16,
    n_pois: usize,
) -> Result<PathBuf> {
    let request = ProviderRequest {
        city: city.to_string(),
        n_pois,
        horizon_hours,
        seed,
    };
    let raw = synthetic_provider(&request, config.max_utility);
    let file = TaskFile::from_raw(
        &raw,
        city,
        config.slot_minutes,
        "08:00",
        horizon_hours,
        config.max_utility,
    )?;
    let path = dir.join(format!("{id}.json"));
    if path.exists() && !config.force {
        bail!("{} already exists (use --force to overwrite)", path.display());
    }
    fs::write(&path, file.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Generate `per_city` synthetic tasks per city with derived seeds.
pub fn gen_suite(dir: &Path, cities: &[&str], config: &GenConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (ci, city) in cities.iter().enumerate() {
        for k in 0..config.per_city {
            let seed = derive_seed(config.seed, ci as u64, k as u64);
            let id = task_id(city, k, config.n_pois);
            paths.push(write_instance(
                dir,
                city,
                &id,
                seed,
                config,
                config.horizon_hours,
                config.n_pois,
            )?);
        }
    }
    Ok(paths)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// POIs 8..=18 step 2 at H=8.
    Pois,
    /// H 6..=10 at N=10.
    Hours,
}

/// Scalability sweep over Paris and Rome labels, 5 runs per point.
pub fn gen_sweep(dir: &Path, mode: SweepMode, config: &GenConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let cities = ["Paris", "Rome"];
    let mut paths = Vec::new();
    let points: Vec<(usize, u16)> = match mode {
        SweepMode::Pois => (8..=18).step_by(2).map(|n| (n, 8)).collect(),
        SweepMode::Hours => (6..=10).map(|h| (10, h)).collect(),
    };
    for (ci, city) in cities.iter().enumerate() {
        for (pi, &(n_pois, horizon)) in points.iter().enumerate() {
            for k in 0..config.per_city {
                let seed = derive_seed(config.seed, (ci * 100 + pi) as u64, k as u64);
                let id = match mode {
                    SweepMode::Pois => format!("{}_{k}_poi_{n_pois}", city.to_lowercase()),
                    SweepMode::Hours => format!("{}_{k}_hours_{horizon}", city.to_lowercase()),
                };
                paths.push(write_instance(dir, city, &id, seed, config, horizon, n_pois)?);
            }
        }
    }
    Ok(paths)
}

#[derive(Clone, Debug)]
pub struct EvalRecord {
    pub task_id: String,
    pub method: String,
    pub valid: bool,
    pub utility: u32,
    /// Equals `utility` when valid, the configured placeholder otherwise.
    pub reported_utility: u32,
    pub suboptimality: Option<f64>,
    pub runtime_seconds: f64,
    pub visit_short: usize,
    pub travel_short: usize,
    pub horizon_exceeded: usize,
    pub pois_visited: usize,
}

impl EvalRecord {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.task_id.clone(),
            self.method.clone(),
            self.valid.to_string(),
            self.utility.to_string(),
            self.reported_utility.to_string(),
            self.suboptimality
                .map(|s| format!("{s:.4}"))
                .unwrap_or_default(),
            format!("{:.4}", self.runtime_seconds),
            self.visit_short.to_string(),
            self.travel_short.to_string(),
            self.horizon_exceeded.to_string(),
            self.pois_visited.to_string(),
        ]
    }
}

fn record_from_report(
    task_id: &str,
    method: &str,
    plan: &Plan,
    report: &ValidationReport,
    utility: u32,
    optimum: Option<u32>,
    placeholder: u32,
    runtime_seconds: f64,
) -> EvalRecord {
    let valid = report.valid();
    let suboptimality = match (valid, optimum) {
        (true, Some(opt)) if utility > 0 => Some(opt as f64 / utility as f64),
        _ => None,
    };
    EvalRecord {
        task_id: task_id.to_string(),
        method: method.to_string(),
        valid,
        utility,
        reported_utility: if valid { utility } else { placeholder },
        suboptimality,
        runtime_seconds,
        visit_short: report.count(ViolationCategory::VisitTooShort),
        travel_short: report.count(ViolationCategory::TravelTooShort),
        horizon_exceeded: report.count(ViolationCategory::HorizonExceeded),
        pois_visited: plan.visited.len(),
    }
}

fn error_record(task_id: &str, method: &str, placeholder: u32) -> EvalRecord {
    EvalRecord {
        task_id: task_id.to_string(),
        method: method.to_string(),
        valid: false,
        utility: 0,
        reported_utility: placeholder,
        suboptimality: None,
        runtime_seconds: 0.0,
        visit_short: 0,
        travel_short: 0,
        horizon_exceeded: 0,
        pois_visited: 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanGrammar {
    Native,
    Llm,
}

/// Best utility the task allows: the DP oracle where it fits, the search
/// otherwise.
pub fn optimum_utility(task: &ItineraryTask, options: &SolveOptions) -> Result<u32> {
    if task.n_pois() <= 16 {
        let (u, _) = oracle_solve(task).map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(u)
    } else {
        let compiled = compile(task);
        let plan = solve(&compiled, options).map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(plan_utility(&plan, task).map_err(|e| anyhow::anyhow!("{e}"))?)
    }
}

/// Evaluate an external plan file against its task.
pub fn eval_plan(
    task_path: &Path,
    plan_path: &Path,
    grammar: PlanGrammar,
    placeholder: u32,
    options: &SolveOptions,
) -> Result<EvalRecord> {
    let start = Instant::now();
    let task = load_task(task_path)?;
    let task_id = stem(task_path);
    let text = fs::read_to_string(plan_path)
        .with_context(|| format!("reading {}", plan_path.display()))?;
    let parsed = match grammar {
        PlanGrammar::Native => parse_plan_native(&text, &task),
        PlanGrammar::Llm => parse_plan_llm(&text, &task),
    };
    let plan = match parsed {
        Ok(plan) => plan,
        Err(_) => {
            let mut record = error_record(&task_id, "external", placeholder);
            record.runtime_seconds = start.elapsed().as_secs_f64();
            return Ok(record);
        }
    };
    let report = validate(&plan, &task);
    let utility = plan_utility(&plan, &task).unwrap_or(0);
    let optimum = optimum_utility(&task, options)?;
    Ok(record_from_report(
        &task_id,
        "external",
        &plan,
        &report,
        utility,
        Some(optimum),
        placeholder,
        start.elapsed().as_secs_f64(),
    ))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub struct SuiteOutcome {
    pub records: Vec<EvalRecord>,
    pub errors: usize,
}

/// Run solver and oracle over every task file in a directory. Rows come out
/// in task-id order; a corrupt task or an exhausted solver yields an error
/// row and the suite continues.
pub fn run_suite(dir: &Path, placeholder: u32, options: &SolveOptions) -> Result<SuiteOutcome> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();

    let mut records = Vec::new();
    let mut errors = 0;
    for path in &paths {
        let task_id = stem(path);
        let task = match load_task(path) {
            Ok(task) => task,
            Err(_) => {
                errors += 1;
                records.push(error_record(&task_id, "error", placeholder));
                continue;
            }
        };

        let start = Instant::now();
        let compiled = compile(&task);
        match solve(&compiled, options) {
            Ok(plan) => {
                let runtime = start.elapsed().as_secs_f64();
                let report = validate(&plan, &task);
                let utility = plan_utility(&plan, &task).unwrap_or(0);
                records.push(record_from_report(
                    &task_id,
                    "optimal",
                    &plan,
                    &report,
                    utility,
                    Some(utility),
                    placeholder,
                    runtime,
                ));
            }
            Err(_) => {
                errors += 1;
                records.push(error_record(&task_id, "error", placeholder));
                continue;
            }
        }

        if task.n_pois() <= 16 {
            let start = Instant::now();
            if let Ok((utility, plan)) = oracle_solve(&task) {
                let runtime = start.elapsed().as_secs_f64();
                let report = validate(&plan, &task);
                records.push(record_from_report(
                    &task_id,
                    "oracle",
                    &plan,
                    &report,
                    utility,
                    Some(utility),
                    placeholder,
                    runtime,
                ));
            }
        }
    }
    Ok(SuiteOutcome { records, errors })
}

pub fn write_csv<W: std::io::Write>(out: W, records: &[EvalRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for record in records {
        writer.write_record(record.csv_row())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (mean, var.sqrt())
}

/// Human-readable roll-up of a metrics table.
pub fn summarize(records: &[EvalRecord]) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for method in ["optimal", "oracle", "external"] {
        let rows: Vec<&EvalRecord> = records.iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            continue;
        }
        let utilities: Vec<f64> = rows.iter().map(|r| r.utility as f64).collect();
        let (mu, su) = mean_std(&utilities);
        let validity = rows.iter().filter(|r| r.valid).count() as f64 / rows.len() as f64;
        let subopt: Vec<f64> = rows.iter().filter_map(|r| r.suboptimality).collect();
        let (ms, _) = mean_std(&subopt);
        let pois: Vec<f64> = rows.iter().map(|r| r.pois_visited as f64).collect();
        let (mp, _) = mean_std(&pois);
        let _ = writeln!(
            out,
            "{method}: n={} utility={mu:.2}+/-{su:.2} validity={validity:.2} \
             mean_suboptimality={ms:.3} mean_pois_visited={mp:.2}",
            rows.len()
        );
    }
    out
}

/// `actual/required` fractions for every duration violation, for the reported
/// deviation statistic.
pub fn duration_ratios(report: &ValidationReport) -> Vec<f64> {
    violation_ratio(report)
}
