//! Exact single-day travel itinerary planning.
//!
//! The pipeline: travel information (points of interest, ratings, visit
//! times, travel times) is assembled into an [`model::ItineraryTask`] on a
//! discrete 15-minute grid, compiled into cost space where utility
//! maximization becomes cost minimization ([`compile`]), solved exactly
//! ([`planner`]), and checked by an independent validator ([`validator`]).
//! Tasks can also be exported as PDDL domain/problem pairs and plans parsed
//! from either the grounded-action grammar or the clock-time grammar LLMs
//! emit ([`pddl`]).
//!
//! The crate is `no_std` (alloc only); IO, file formats and the CLI live in
//! the companion `trip-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod compile;
pub mod model;
pub mod pddl;
pub mod planner;
pub mod providers;
pub mod validator;

pub use compile::{compile, total_cost, CompiledTask};
pub use model::{
    fold_name, minutes_to_slots, plan_utility, ItineraryTask, ModelError, Plan, PlanStep, Poi,
    TimeGrid,
};
pub use planner::{oracle_solve, solve, Heuristic, SolveOptions};
pub use validator::{validate, violation_ratio, ValidationReport, Violation, ViolationCategory};
