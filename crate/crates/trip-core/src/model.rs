//! Task and plan data model on a discrete time grid.
//!
//! All durations are integer slot counts. A slot is `slot_minutes` long
//! (15 by default); the horizon `H` in hours gives `S = H*60/slot_minutes`
//! total slots. Values are immutable after construction.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    /// Name folds down to an empty token.
    InvalidName(String),
    /// A plan references a POI id the task does not contain.
    UnknownPoi(String),
    InvalidGrid(String),
    InvalidTask(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidName(raw) => write!(f, "name folds to empty token: {raw:?}"),
            ModelError::UnknownPoi(id) => write!(f, "unknown POI id: {id}"),
            ModelError::InvalidGrid(msg) => write!(f, "invalid time grid: {msg}"),
            ModelError::InvalidTask(msg) => write!(f, "invalid task: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

/// Discrete day grid: slot length, day start, tourism horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeGrid {
    slot_minutes: u16,
    day_start_minutes: u16,
    horizon_hours: u16,
}

impl TimeGrid {
    pub fn new(
        slot_minutes: u16,
        day_start_minutes: u16,
        horizon_hours: u16,
    ) -> Result<Self, ModelError> {
        if slot_minutes == 0 || 60 % slot_minutes != 0 {
            return Err(ModelError::InvalidGrid(alloc::format!(
                "slot_minutes {slot_minutes} must divide 60"
            )));
        }
        if horizon_hours == 0 {
            return Err(ModelError::InvalidGrid("horizon_hours must be >= 1".into()));
        }
        if day_start_minutes >= 24 * 60 {
            return Err(ModelError::InvalidGrid("day_start beyond 24h".into()));
        }
        Ok(TimeGrid {
            slot_minutes,
            day_start_minutes,
            horizon_hours,
        })
    }

    /// Default grid: 15-minute slots starting at 08:00.
    pub fn standard(horizon_hours: u16) -> Result<Self, ModelError> {
        TimeGrid::new(15, 8 * 60, horizon_hours)
    }

    pub fn slot_minutes(&self) -> u16 {
        self.slot_minutes
    }

    pub fn day_start_minutes(&self) -> u16 {
        self.day_start_minutes
    }

    pub fn horizon_hours(&self) -> u16 {
        self.horizon_hours
    }

    /// Total slots S in the horizon.
    pub fn total_slots(&self) -> u16 {
        self.horizon_hours * 60 / self.slot_minutes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poi {
    pub id: String,
    pub display_name: String,
    pub utility: u32,
    pub visit_slots: u16,
}

/// A city-level planning instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItineraryTask {
    city: String,
    grid: TimeGrid,
    max_utility: u32,
    pois: Vec<Poi>,
    /// N x N slot matrix, row-major; `travel_slots[from * N + to]`.
    travel_slots: Vec<u16>,
    start_poi: usize,
}

impl ItineraryTask {
    pub fn new(
        city: String,
        grid: TimeGrid,
        max_utility: u32,
        pois: Vec<Poi>,
        travel_slots: Vec<u16>,
        start_poi: usize,
    ) -> Result<Self, ModelError> {
        let n = pois.len();
        if n == 0 {
            return Err(ModelError::InvalidTask("task needs at least one POI".into()));
        }
        if travel_slots.len() != n * n {
            return Err(ModelError::InvalidTask(alloc::format!(
                "travel matrix has {} entries, expected {}",
                travel_slots.len(),
                n * n
            )));
        }
        if start_poi >= n {
            return Err(ModelError::InvalidTask("start_poi out of range".into()));
        }
        let mut seen = BTreeSet::new();
        for poi in &pois {
            if poi.utility < 1 || poi.utility > max_utility {
                return Err(ModelError::InvalidTask(alloc::format!(
                    "utility {} of {} outside [1, {}]",
                    poi.utility,
                    poi.id,
                    max_utility
                )));
            }
            if poi.visit_slots == 0 {
                return Err(ModelError::InvalidTask(alloc::format!(
                    "visit_slots of {} must be >= 1",
                    poi.id
                )));
            }
            if poi.id != fold_name(&poi.id)? {
                return Err(ModelError::InvalidTask(alloc::format!(
                    "id {:?} is not a folded token",
                    poi.id
                )));
            }
            if !seen.insert(poi.id.clone()) {
                return Err(ModelError::InvalidTask(alloc::format!(
                    "duplicate POI id {}",
                    poi.id
                )));
            }
        }
        for from in 0..n {
            for to in 0..n {
                let d = travel_slots[from * n + to];
                if from == to && d != 0 {
                    return Err(ModelError::InvalidTask("travel diagonal must be 0".into()));
                }
                if from != to && d == 0 {
                    return Err(ModelError::InvalidTask(alloc::format!(
                        "travel {} -> {} must be >= 1 slot",
                        pois[from].id,
                        pois[to].id
                    )));
                }
            }
        }
        Ok(ItineraryTask {
            city,
            grid,
            max_utility,
            pois,
            travel_slots,
            start_poi,
        })
    }

    pub fn city(&self) -> &str {
        &self.city
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn max_utility(&self) -> u32 {
        self.max_utility
    }

    pub fn pois(&self) -> &[Poi] {
        &self.pois
    }

    pub fn n_pois(&self) -> usize {
        self.pois.len()
    }

    pub fn start_poi(&self) -> usize {
        self.start_poi
    }

    pub fn travel_slots(&self, from: usize, to: usize) -> u16 {
        self.travel_slots[from * self.pois.len() + to]
    }

    pub fn travel_matrix(&self) -> &[u16] {
        &self.travel_slots
    }

    pub fn poi_index(&self, id: &str) -> Option<usize> {
        self.pois.iter().position(|p| p.id == id)
    }

    /// Same task with a different horizon; everything else untouched.
    pub fn with_horizon(&self, horizon_hours: u16) -> Result<Self, ModelError> {
        let grid = TimeGrid::new(
            self.grid.slot_minutes(),
            self.grid.day_start_minutes(),
            horizon_hours,
        )?;
        Ok(ItineraryTask {
            grid,
            ..self.clone()
        })
    }
}

/// One timed step of a plan. Slots are offsets from day start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanStep {
    Visit {
        poi: String,
        start_slot: u16,
        end_slot: u16,
    },
    Move {
        from: String,
        to: String,
        start_slot: u16,
        end_slot: u16,
    },
}

impl PlanStep {
    pub fn start_slot(&self) -> u16 {
        match self {
            PlanStep::Visit { start_slot, .. } | PlanStep::Move { start_slot, .. } => *start_slot,
        }
    }

    pub fn end_slot(&self) -> u16 {
        match self {
            PlanStep::Visit { end_slot, .. } | PlanStep::Move { end_slot, .. } => *end_slot,
        }
    }

    pub fn duration_slots(&self) -> u16 {
        self.end_slot().saturating_sub(self.start_slot())
    }
}

/// A timed sequence of visit/move steps. May be structurally invalid
/// (e.g. parsed from LLM output); the validator reports violations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub task_ref: String,
    pub steps: Vec<PlanStep>,
    pub visited: BTreeSet<String>,
}

impl Plan {
    /// `visited` is derived from the Visit steps (deduplicated).
    pub fn new(task_ref: String, steps: Vec<PlanStep>) -> Self {
        let visited = steps
            .iter()
            .filter_map(|s| match s {
                PlanStep::Visit { poi, .. } => Some(poi.clone()),
                PlanStep::Move { .. } => None,
            })
            .collect();
        Plan {
            task_ref,
            steps,
            visited,
        }
    }

    pub fn empty(task_ref: String) -> Self {
        Plan::new(task_ref, Vec::new())
    }

    pub fn end_slot(&self) -> u16 {
        self.steps.last().map(|s| s.end_slot()).unwrap_or(0)
    }
}

/// Fold a display name into a stable POI id token.
///
/// Lowercases, keeps ASCII alphanumerics, turns whitespace and hyphens into
/// underscores, and drops everything else (accented letters included, so
/// "Musée d'Orsay" becomes "muse_dorsay"). Idempotent.
pub fn fold_name(raw: &str) -> Result<String, ModelError> {
    let mut out = String::new();
    let mut pending_sep = false;
    for ch in raw.chars() {
        if ch.is_ascii_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.push(ch.to_ascii_lowercase());
        } else if ch.is_whitespace() || ch == '-' || ch == '_' {
            pending_sep = true;
        }
        // anything else (punctuation, non-ASCII) is dropped
    }
    if out.is_empty() {
        return Err(ModelError::InvalidName(raw.into()));
    }
    Ok(out)
}

/// Convert minutes to slots, rounding up; 0 stays 0.
pub fn minutes_to_slots(minutes: u32, grid: &TimeGrid) -> u16 {
    let sm = grid.slot_minutes() as u32;
    ((minutes + sm - 1) / sm) as u16
}

/// Sum of utilities of the POIs the plan visits; each POI counts once.
pub fn plan_utility(plan: &Plan, task: &ItineraryTask) -> Result<u32, ModelError> {
    let mut total = 0u32;
    for id in &plan.visited {
        let idx = task
            .poi_index(id)
            .ok_or_else(|| ModelError::UnknownPoi(id.clone()))?;
        total += task.pois()[idx].utility;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn fold_name_golden_examples() {
        assert_eq!(fold_name("Eiffel Tower").unwrap(), "eiffel_tower");
        assert_eq!(fold_name("louvre_museum").unwrap(), "louvre_museum");
        // golden: folding drops accented characters rather than transliterating
        assert_eq!(
            fold_name("Sacré-Cœur Basilica").unwrap(),
            "sacr_cur_basilica"
        );
        assert_eq!(fold_name("Musée d'Orsay").unwrap(), "muse_dorsay");
        assert_eq!(fold_name("Champs-Élysées").unwrap(), "champs_lyses");
        assert_eq!(
            fold_name("Notre-Dame Cathedral").unwrap(),
            "notre_dame_cathedral"
        );
    }

    #[test]
    fn fold_name_rejects_empty() {
        assert!(matches!(fold_name("  é' "), Err(ModelError::InvalidName(_))));
        assert!(matches!(fold_name(""), Err(ModelError::InvalidName(_))));
    }

    #[test]
    fn minutes_round_up() {
        let g = TimeGrid::standard(8).unwrap();
        assert_eq!(minutes_to_slots(8, &g), 1);
        assert_eq!(minutes_to_slots(0, &g), 0);
        assert_eq!(minutes_to_slots(120, &g), 8);
        assert_eq!(minutes_to_slots(15, &g), 1);
        assert_eq!(minutes_to_slots(16, &g), 2);
    }

    #[test]
    fn grid_invariants() {
        assert!(TimeGrid::new(7, 480, 8).is_err());
        assert!(TimeGrid::new(15, 480, 0).is_err());
        let g = TimeGrid::new(15, 480, 6).unwrap();
        assert_eq!(g.total_slots(), 24);
    }

    fn two_poi_task() -> ItineraryTask {
        ItineraryTask::new(
            "test".to_string(),
            TimeGrid::standard(8).unwrap(),
            10,
            vec![
                Poi {
                    id: "a".into(),
                    display_name: "A".into(),
                    utility: 3,
                    visit_slots: 2,
                },
                Poi {
                    id: "b".into(),
                    display_name: "B".into(),
                    utility: 7,
                    visit_slots: 4,
                },
            ],
            vec![0, 1, 2, 0],
            0,
        )
        .unwrap()
    }

    #[test]
    fn utility_sums_visits_once() {
        let task = two_poi_task();
        let plan = Plan::new(
            "test".into(),
            vec![
                PlanStep::Visit {
                    poi: "a".into(),
                    start_slot: 0,
                    end_slot: 2,
                },
                PlanStep::Move {
                    from: "a".into(),
                    to: "b".into(),
                    start_slot: 2,
                    end_slot: 3,
                },
                PlanStep::Visit {
                    poi: "b".into(),
                    start_slot: 3,
                    end_slot: 7,
                },
            ],
        );
        assert_eq!(plan_utility(&plan, &task).unwrap(), 10);
        assert_eq!(plan_utility(&Plan::empty("test".into()), &task).unwrap(), 0);
    }

    #[test]
    fn utility_unknown_poi() {
        let task = two_poi_task();
        let plan = Plan::new(
            "test".into(),
            vec![PlanStep::Visit {
                poi: "zzz".into(),
                start_slot: 0,
                end_slot: 1,
            }],
        );
        assert!(matches!(
            plan_utility(&plan, &task),
            Err(ModelError::UnknownPoi(_))
        ));
    }

    #[test]
    fn task_rejects_bad_matrix() {
        let pois = vec![
            Poi {
                id: "a".into(),
                display_name: "A".into(),
                utility: 1,
                visit_slots: 1,
            },
            Poi {
                id: "b".into(),
                display_name: "B".into(),
                utility: 1,
                visit_slots: 1,
            },
        ];
        let grid = TimeGrid::standard(8).unwrap();
        // nonzero diagonal
        assert!(
            ItineraryTask::new("t".into(), grid, 10, pois.clone(), vec![1, 1, 1, 0], 0).is_err()
        );
        // zero off-diagonal
        assert!(
            ItineraryTask::new("t".into(), grid, 10, pois.clone(), vec![0, 0, 1, 0], 0).is_err()
        );
        // asymmetric is fine
        assert!(ItineraryTask::new("t".into(), grid, 10, pois, vec![0, 1, 2, 0], 0).is_ok());
    }
}
