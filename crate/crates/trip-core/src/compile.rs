//! Soft-goal cost compilation.
//!
//! Planners minimize cost, so per-POI utility is reversed into
//! `visit_cost = max_utility - utility + 1` and every unvisited POI pays a
//! `skip_cost = max_utility + 1` at plan end. With `move_cost = 0` this makes
//! cost minimization exactly utility maximization:
//! `total_cost + plan_utility = N * (max_utility + 1)` on every plan.

use alloc::vec::Vec;

use crate::model::{ItineraryTask, ModelError, Plan, PlanStep};

/// Cost-space view of a task, shared by the native planner and the PDDL
/// emitter.
#[derive(Debug)]
pub struct CompiledTask<'a> {
    task: &'a ItineraryTask,
    visit_cost: Vec<u32>,
    skip_cost: Vec<u32>,
    move_cost: u32,
}

impl<'a> CompiledTask<'a> {
    pub fn task(&self) -> &'a ItineraryTask {
        self.task
    }

    pub fn visit_cost(&self, poi: usize) -> u32 {
        self.visit_cost[poi]
    }

    pub fn skip_cost(&self, poi: usize) -> u32 {
        self.skip_cost[poi]
    }

    pub fn move_cost(&self) -> u32 {
        self.move_cost
    }

    /// Slot arithmetic restricted to the horizon: `Some(t0 + d)` when
    /// `t0 + d <= S`, absent otherwise.
    pub fn sum(&self, t0: u16, delta: u16) -> Option<u16> {
        let tf = t0.checked_add(delta)?;
        (tf <= self.task.grid().total_slots()).then_some(tf)
    }

    /// All `(t0, d, tf)` facts with `d >= 1` and `tf <= S`, in lexicographic
    /// order. These become the static `logic_sum` facts of the PDDL problem.
    pub fn sum_facts(&self) -> impl Iterator<Item = (u16, u16, u16)> + '_ {
        let s = self.task.grid().total_slots();
        (0..s).flat_map(move |t0| (1..=s - t0).map(move |d| (t0, d, t0 + d)))
    }
}

/// Compile a task into cost space.
pub fn compile(task: &ItineraryTask) -> CompiledTask<'_> {
    let max_u = task.max_utility();
    let visit_cost = task.pois().iter().map(|p| max_u - p.utility + 1).collect();
    let skip_cost = task.pois().iter().map(|_| max_u + 1).collect();
    CompiledTask {
        task,
        visit_cost,
        skip_cost,
        move_cost: 0,
    }
}

/// Total compiled cost of a plan: visit costs for visited POIs, skip costs
/// for the rest, plus `move_cost` per Move step.
pub fn total_cost(plan: &Plan, compiled: &CompiledTask<'_>) -> Result<u32, ModelError> {
    let task = compiled.task;
    let mut cost = 0u32;
    for (idx, poi) in task.pois().iter().enumerate() {
        if plan.visited.contains(&poi.id) {
            cost += compiled.visit_cost(idx);
        } else {
            cost += compiled.skip_cost(idx);
        }
    }
    for id in &plan.visited {
        if task.poi_index(id).is_none() {
            return Err(ModelError::UnknownPoi(id.clone()));
        }
    }
    let moves = plan
        .steps
        .iter()
        .filter(|s| matches!(s, PlanStep::Move { .. }))
        .count() as u32;
    Ok(cost + compiled.move_cost * moves)
}
