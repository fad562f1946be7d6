//! PDDL export and plan-text parsing.
//!
//! The emitted domain is the STRIPS + action-costs fragment: `visit` and
//! `move` consume time through precomputed `logic_sum` static facts (one
//! object per time slot), `end_mode` stops the real plan, and `no_visit`
//! charges the skip cost of each POI left unvisited. The metric minimizes
//! `total-cost`.
//!
//! Two plan grammars are read back:
//! - the native grounded-action grammar this crate writes
//!   (`(visit eiffel_tower t0 t8 t8)` etc.), and
//! - the clock-time grammar LLM replies use
//!   (`(visit place_1 9:00)` / `(drive place_1 to place_2 10:00)`).

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::compile::CompiledTask;
use crate::model::{fold_name, ItineraryTask, Plan, PlanStep, TimeGrid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PddlDocumentPair {
    pub domain_text: String,
    pub problem_text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Render a compiled task as a domain/problem pair.
pub fn emit_pddl(compiled: &CompiledTask<'_>) -> PddlDocumentPair {
    let task = compiled.task();
    let domain_text = String::from(
        "\
(define (domain trip)
  (:requirements :strips :typing :action-costs)
  (:types location time)
  (:predicates
    (normal_mode)
    (plan_ended)
    (current_time ?t - time)
    (user_at ?loc - location)
    (visited ?loc - location)
    (visited_time ?loc - location ?t - time)
    (travel_time ?from - location ?to - location ?t - time)
    (logic_sum ?t0 - time ?td - time ?tf - time))
  (:functions
    (total-cost)
    (visit_cost ?loc - location)
    (skip_cost ?loc - location))
  (:action visit
    :parameters (?vloc - location
                 ?vt0 - time
                 ?vtvisit - time
                 ?vtf - time)
    :precondition
      (and (normal_mode)
           (current_time ?vt0)
           (visited_time ?vloc ?vtvisit)
           (user_at ?vloc)
           (logic_sum ?vt0 ?vtvisit ?vtf))
    :effect
      (and (visited ?vloc)
           (not (current_time ?vt0))
           (current_time ?vtf)
           (increase (total-cost)
                     (visit_cost ?vloc))))
  (:action move
    :parameters (?vfrom - location
                 ?vto - location
                 ?vt0 - time
                 ?vtravel - time
                 ?vtf - time)
    :precondition
      (and (normal_mode)
           (current_time ?vt0)
           (user_at ?vfrom)
           (travel_time ?vfrom ?vto ?vtravel)
           (logic_sum ?vt0 ?vtravel ?vtf))
    :effect
      (and (not (user_at ?vfrom))
           (user_at ?vto)
           (not (current_time ?vt0))
           (current_time ?vtf)))
  (:action end_mode
    :parameters ()
    :precondition (and (normal_mode))
    :effect (and (not (normal_mode)) (plan_ended)))
  (:action no_visit
    :parameters (?vloc - location)
    :precondition (and (plan_ended))
    :effect
      (and (visited ?vloc)
           (increase (total-cost)
                     (skip_cost ?vloc)))))
",
    );

    let s = task.grid().total_slots();
    let mut p = String::new();
    let problem_name = fold_name(task.city()).unwrap_or_else(|_| "task".to_string());
    let _ = writeln!(p, "(define (problem trip-{problem_name})");
    let _ = writeln!(p, "  (:domain trip)");
    let _ = write!(p, "  (:objects");
    for t in 0..=s {
        let _ = write!(p, " t{t}");
    }
    let _ = writeln!(p, " - time");
    let _ = write!(p, "           ");
    for poi in task.pois() {
        let _ = write!(p, " {}", poi.id);
    }
    let _ = writeln!(p, " - location)");
    let _ = writeln!(p, "  (:init");
    let _ = writeln!(p, "    (normal_mode)");
    let _ = writeln!(p, "    (current_time t0)");
    let _ = writeln!(p, "    (user_at {})", task.pois()[task.start_poi()].id);
    let _ = writeln!(p, "    (= (total-cost) 0)");
    for poi in task.pois() {
        let _ = writeln!(p, "    (visited_time {} t{})", poi.id, poi.visit_slots);
    }
    for (i, from) in task.pois().iter().enumerate() {
        for (j, to) in task.pois().iter().enumerate() {
            if i != j {
                let _ = writeln!(
                    p,
                    "    (travel_time {} {} t{})",
                    from.id,
                    to.id,
                    task.travel_slots(i, j)
                );
            }
        }
    }
    for (t0, d, tf) in compiled.sum_facts() {
        let _ = writeln!(p, "    (logic_sum t{t0} t{d} t{tf})");
    }
    for (i, poi) in task.pois().iter().enumerate() {
        let _ = writeln!(p, "    (= (visit_cost {}) {})", poi.id, compiled.visit_cost(i));
    }
    for (i, poi) in task.pois().iter().enumerate() {
        let _ = writeln!(p, "    (= (skip_cost {}) {})", poi.id, compiled.skip_cost(i));
    }
    let _ = writeln!(p, "  )");
    let _ = writeln!(p, "  (:goal (and (plan_ended)");
    for poi in task.pois() {
        let _ = writeln!(p, "              (visited {})", poi.id);
    }
    let _ = writeln!(p, "  ))");
    let _ = writeln!(p, "  (:metric minimize (total-cost)))");

    PddlDocumentPair {
        domain_text,
        problem_text: p,
    }
}

/// One node of an s-expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parse a sequence of s-expressions. `;` starts a comment.
pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    let mut atom = String::new();
    let mut line = 1usize;
    let mut in_comment = false;

    let flush = |atom: &mut String, top: &mut Vec<Sexp>| {
        if !atom.is_empty() {
            top.push(Sexp::Atom(core::mem::take(atom)));
        }
    };

    for ch in text.chars() {
        if ch == '\n' {
            line += 1;
            in_comment = false;
        }
        if in_comment {
            continue;
        }
        match ch {
            ';' => {
                flush(&mut atom, &mut top);
                in_comment = true;
            }
            '(' => {
                flush(&mut atom, &mut top);
                stack.push(core::mem::take(&mut top));
            }
            ')' => {
                flush(&mut atom, &mut top);
                let inner = core::mem::take(&mut top);
                top = stack
                    .pop()
                    .ok_or_else(|| err(line, "unbalanced closing paren"))?;
                top.push(Sexp::List(inner));
            }
            c if c.is_whitespace() => flush(&mut atom, &mut top),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut top);
    if !stack.is_empty() {
        return Err(err(line, "unbalanced opening paren"));
    }
    Ok(top)
}

/// Extract all `(logic_sum tA tB tC)` facts from an emitted problem file.
pub fn logic_sum_facts(problem_text: &str) -> Result<Vec<(u16, u16, u16)>, ParseError> {
    let sexps = parse_sexps(problem_text)?;
    let mut facts = Vec::new();
    collect_logic_sum(&sexps, &mut facts)?;
    Ok(facts)
}

fn collect_logic_sum(sexps: &[Sexp], out: &mut Vec<(u16, u16, u16)>) -> Result<(), ParseError> {
    for sexp in sexps {
        if let Sexp::List(items) = sexp {
            if let Some(Sexp::Atom(head)) = items.first() {
                if head == "logic_sum" {
                    if items.len() != 4 {
                        return Err(err(0, "malformed logic_sum fact"));
                    }
                    let mut vals = [0u16; 3];
                    for (slot, item) in vals.iter_mut().zip(&items[1..]) {
                        let Sexp::Atom(a) = item else {
                            return Err(err(0, "malformed logic_sum fact"));
                        };
                        *slot = parse_slot_token(a, 0, u16::MAX)?;
                    }
                    out.push((vals[0], vals[1], vals[2]));
                    continue;
                }
            }
            collect_logic_sum(items, out)?;
        }
    }
    Ok(())
}

fn parse_slot_token(token: &str, line: usize, max: u16) -> Result<u16, ParseError> {
    let digits = token
        .strip_prefix('t')
        .ok_or_else(|| err(line, alloc::format!("expected slot token, got {token:?}")))?;
    let value: u16 = digits
        .parse()
        .map_err(|_| err(line, alloc::format!("bad slot token {token:?}")))?;
    if value > max {
        return Err(err(
            line,
            alloc::format!("slot token {token:?} beyond horizon t{max}"),
        ));
    }
    Ok(value)
}

/// Write a plan in the native grounded-action grammar, including the
/// `end_mode` / `no_visit` tail for the soft-goal compilation.
pub fn render_plan_native(plan: &Plan, task: &ItineraryTask) -> String {
    let mut out = String::new();
    for step in &plan.steps {
        match step {
            PlanStep::Visit {
                poi,
                start_slot,
                end_slot,
            } => {
                let _ = writeln!(
                    out,
                    "(visit {poi} t{start_slot} t{} t{end_slot})",
                    end_slot - start_slot
                );
            }
            PlanStep::Move {
                from,
                to,
                start_slot,
                end_slot,
            } => {
                let _ = writeln!(
                    out,
                    "(move {from} {to} t{start_slot} t{} t{end_slot})",
                    end_slot - start_slot
                );
            }
        }
    }
    let _ = writeln!(out, "(end_mode)");
    for poi in task.pois() {
        if !plan.visited.contains(&poi.id) {
            let _ = writeln!(out, "(no_visit {})", poi.id);
        }
    }
    out
}

/// Parse a native plan file: one grounded action per line, `;` comments.
/// `end_mode`/`no_visit` lines are dropped from the step list but checked
/// against the visited set.
pub fn parse_plan_native(text: &str, task: &ItineraryTask) -> Result<Plan, ParseError> {
    let s = task.grid().total_slots();
    let mut steps = Vec::new();
    let mut skipped: BTreeSet<String> = BTreeSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let inner = line
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| err(lineno, "expected a parenthesized action"))?;
        let tokens: Vec<&str> = inner.split_whitespace().collect();
        match tokens.as_slice() {
            ["visit", poi, t0, _tvisit, tf] => {
                let start_slot = parse_slot_token(t0, lineno, s)?;
                let end_slot = parse_slot_token(tf, lineno, s)?;
                steps.push(PlanStep::Visit {
                    poi: (*poi).to_string(),
                    start_slot,
                    end_slot,
                });
            }
            ["move", from, to, t0, _td, tf] => {
                let start_slot = parse_slot_token(t0, lineno, s)?;
                let end_slot = parse_slot_token(tf, lineno, s)?;
                steps.push(PlanStep::Move {
                    from: (*from).to_string(),
                    to: (*to).to_string(),
                    start_slot,
                    end_slot,
                });
            }
            ["end_mode"] => {}
            ["no_visit", poi] => {
                skipped.insert((*poi).to_string());
            }
            _ => return Err(err(lineno, alloc::format!("malformed action: {line:?}"))),
        }
    }

    let plan = Plan::new(task.city().to_string(), steps);
    if let Some(bad) = skipped.iter().find(|id| plan.visited.contains(*id)) {
        return Err(err(0, alloc::format!("no_visit of visited POI {bad}")));
    }
    Ok(plan)
}

/// Match an LLM POI token to a task id: exact fold match first, then unique
/// prefix. Unmatched tokens stay as-is so the validator reports UnknownPoi.
fn match_poi(token: &str, task: &ItineraryTask) -> String {
    let Ok(folded) = fold_name(token) else {
        return String::from("unparseable_name");
    };
    if task.poi_index(&folded).is_some() {
        return folded;
    }
    let mut matches = task
        .pois()
        .iter()
        .filter(|p| p.id.starts_with(folded.as_str()));
    match (matches.next(), matches.next()) {
        (Some(p), None) => p.id.clone(),
        _ => folded,
    }
}

/// Parse "H:MM" / "H:MM am|pm" to minutes since midnight.
fn parse_clock(tokens: &[&str]) -> Option<u32> {
    let (time_tok, suffix) = match tokens {
        [t] => (*t, None),
        [t, s] => (*t, Some(*s)),
        _ => return None,
    };
    let time_tok = time_tok.trim_end_matches(|c: char| !c.is_ascii_digit());
    let (h, m) = time_tok.split_once(':')?;
    let hour: u32 = h.parse().ok()?;
    let minute: u32 = m.parse().ok()?;
    if hour > 23 || minute > 59 {
        return None;
    }
    let hour = match suffix.map(|s| s.to_ascii_lowercase()) {
        Some(s) if s.starts_with("pm") => {
            if hour < 12 {
                hour + 12
            } else {
                hour
            }
        }
        Some(s) if s.starts_with("am") => {
            if hour == 12 {
                0
            } else {
                hour
            }
        }
        Some(_) => return None,
        None => hour,
    };
    Some(hour * 60 + minute)
}

/// Round minutes-from-day-start to the nearest slot, ties up.
fn nearest_slot(minutes: u32, grid: &TimeGrid) -> u16 {
    let sm = grid.slot_minutes() as u32;
    ((minutes + sm / 2) / sm).min(u16::MAX as u32) as u16
}

/// Parse the clock-time grammar LLM replies use.
///
/// Each clause carries only the end time of its activity; clause `i` starts
/// where clause `i-1` ended and the first one starts at day start. A clause
/// whose end time lies before the running clock becomes a zero-duration step
/// for the validator to flag. Never panics on arbitrary input.
pub fn parse_plan_llm(text: &str, task: &ItineraryTask) -> Result<Plan, ParseError> {
    let grid = task.grid();
    let day_start = grid.day_start_minutes() as u32;
    let mut steps = Vec::new();
    let mut clock_slot = 0u16;

    for clause in text.split('(').skip(1) {
        let Some(body) = clause.split(')').next() else {
            continue;
        };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let keyword = tokens[0].to_ascii_lowercase();
        // find the trailing clock-time tokens
        let time_start = tokens
            .iter()
            .position(|t| t.contains(':') && t.chars().next().is_some_and(|c| c.is_ascii_digit()));
        let Some(time_at) = time_start else {
            continue;
        };
        let Some(abs_minutes) = parse_clock(&tokens[time_at..]) else {
            continue;
        };
        let end_slot = if abs_minutes <= day_start {
            0
        } else {
            nearest_slot(abs_minutes - day_start, grid)
        };
        let (start_slot, end_slot) = if end_slot < clock_slot {
            (clock_slot, clock_slot) // time went backwards: zero duration
        } else {
            (clock_slot, end_slot)
        };

        match keyword.as_str() {
            "visit" => {
                if time_at < 2 {
                    continue;
                }
                let name = tokens[1..time_at].join(" ");
                steps.push(PlanStep::Visit {
                    poi: match_poi(&name, task),
                    start_slot,
                    end_slot,
                });
                clock_slot = end_slot;
            }
            "drive" | "move" | "travel" => {
                let Some(to_at) = tokens[1..time_at].iter().position(|t| *t == "to") else {
                    continue;
                };
                let from = tokens[1..1 + to_at].join(" ");
                let to = tokens[2 + to_at..time_at].join(" ");
                if from.is_empty() || to.is_empty() {
                    continue;
                }
                steps.push(PlanStep::Move {
                    from: match_poi(&from, task),
                    to: match_poi(&to, task),
                    start_slot,
                    end_slot,
                });
                clock_slot = end_slot;
            }
            _ => {}
        }
    }

    if steps.is_empty() {
        return Err(err(0, "no visit/drive clauses found"));
    }
    Ok(Plan::new(task.city().to_string(), steps))
}
