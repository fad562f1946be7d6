//! Plan validation: action applicability plus time constraints.
//!
//! A plan is valid iff (1) it fits within the horizon, (2) every visit and
//! move lasts at least the required time, and (3) every action is applicable
//! where it fires (known POIs, correct location chaining, no revisits).
//! All violations are reported, not just the first.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use alloc::collections::BTreeSet;

use crate::model::{ItineraryTask, Plan, PlanStep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationCategory {
    VisitTooShort,
    TravelTooShort,
    HorizonExceeded,
    NotApplicable,
    DuplicateVisit,
    UnknownPoi,
    BadChaining,
}

impl fmt::Display for ViolationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCategory::VisitTooShort => "visit-too-short",
            ViolationCategory::TravelTooShort => "travel-too-short",
            ViolationCategory::HorizonExceeded => "horizon-exceeded",
            ViolationCategory::NotApplicable => "not-applicable",
            ViolationCategory::DuplicateVisit => "duplicate-visit",
            ViolationCategory::UnknownPoi => "unknown-poi",
            ViolationCategory::BadChaining => "bad-chaining",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub category: ViolationCategory,
    pub step_index: usize,
    pub detail: String,
    /// Required duration in slots, for the two duration categories.
    pub required_slots: Option<u16>,
    pub actual_slots: Option<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, category: ViolationCategory) -> usize {
        self.violations
            .iter()
            .filter(|v| v.category == category)
            .count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid() {
            return writeln!(f, "valid: no violations");
        }
        writeln!(f, "invalid: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "  step {}: {} - {}", v.step_index, v.category, v.detail)?;
            if let (Some(req), Some(act)) = (v.required_slots, v.actual_slots) {
                write!(f, " (required {req} slots, actual {act})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn push(
    report: &mut ValidationReport,
    category: ViolationCategory,
    step_index: usize,
    detail: String,
) {
    report.violations.push(Violation {
        category,
        step_index,
        detail,
        required_slots: None,
        actual_slots: None,
    });
}

/// Check a plan against its task.
pub fn validate(plan: &Plan, task: &ItineraryTask) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut location = task.pois()[task.start_poi()].id.clone();
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    let mut clock = 0u16;

    for (i, step) in plan.steps.iter().enumerate() {
        if step.start_slot() != clock {
            push(
                &mut report,
                ViolationCategory::NotApplicable,
                i,
                alloc::format!(
                    "step starts at slot {} but previous step ended at {}",
                    step.start_slot(),
                    clock
                ),
            );
        }
        match step {
            PlanStep::Visit {
                poi,
                start_slot,
                end_slot,
            } => {
                let Some(idx) = task.poi_index(poi) else {
                    push(
                        &mut report,
                        ViolationCategory::UnknownPoi,
                        i,
                        alloc::format!("visit of unknown POI {poi}"),
                    );
                    clock = *end_slot;
                    continue;
                };
                if *poi != location {
                    push(
                        &mut report,
                        ViolationCategory::BadChaining,
                        i,
                        alloc::format!("visit of {poi} while located at {location}"),
                    );
                    // assume the tourist teleported so later steps chain from here
                    location = poi.clone();
                }
                if !visited.insert(&task.pois()[idx].id) {
                    push(
                        &mut report,
                        ViolationCategory::DuplicateVisit,
                        i,
                        alloc::format!("{poi} visited more than once"),
                    );
                }
                let required = task.pois()[idx].visit_slots;
                let actual = end_slot.saturating_sub(*start_slot);
                if actual < required {
                    report.violations.push(Violation {
                        category: ViolationCategory::VisitTooShort,
                        step_index: i,
                        detail: alloc::format!("visit of {poi} too short"),
                        required_slots: Some(required),
                        actual_slots: Some(actual),
                    });
                }
                clock = *end_slot;
            }
            PlanStep::Move {
                from,
                to,
                start_slot,
                end_slot,
            } => {
                let from_idx = task.poi_index(from);
                let to_idx = task.poi_index(to);
                if from_idx.is_none() {
                    push(
                        &mut report,
                        ViolationCategory::UnknownPoi,
                        i,
                        alloc::format!("move from unknown POI {from}"),
                    );
                }
                if to_idx.is_none() {
                    push(
                        &mut report,
                        ViolationCategory::UnknownPoi,
                        i,
                        alloc::format!("move to unknown POI {to}"),
                    );
                }
                if from == to {
                    push(
                        &mut report,
                        ViolationCategory::BadChaining,
                        i,
                        alloc::format!("zero-length move at {from}"),
                    );
                } else if from_idx.is_some() && *from != location {
                    push(
                        &mut report,
                        ViolationCategory::BadChaining,
                        i,
                        alloc::format!("move departs {from} while located at {location}"),
                    );
                }
                if let (Some(fi), Some(ti)) = (from_idx, to_idx) {
                    if fi != ti {
                        let required = task.travel_slots(fi, ti);
                        let actual = end_slot.saturating_sub(*start_slot);
                        if actual < required {
                            report.violations.push(Violation {
                                category: ViolationCategory::TravelTooShort,
                                step_index: i,
                                detail: alloc::format!("move {from} -> {to} too short"),
                                required_slots: Some(required),
                                actual_slots: Some(actual),
                            });
                        }
                    }
                }
                location = to.clone();
                clock = *end_slot;
            }
        }
    }

    if clock > task.grid().total_slots() {
        let last = plan.steps.len().saturating_sub(1);
        push(
            &mut report,
            ViolationCategory::HorizonExceeded,
            last,
            alloc::format!(
                "plan ends at slot {} beyond horizon {}",
                clock,
                task.grid().total_slots()
            ),
        );
    }

    report
}

/// Fractions `actual / required` for every duration violation in the
/// report. The harness aggregates these into the mean +/- std statistic.
pub fn violation_ratio(report: &ValidationReport) -> Vec<f64> {
    report
        .violations
        .iter()
        .filter_map(|v| match (v.required_slots, v.actual_slots) {
            (Some(req), Some(act)) if req > 0 => Some(act as f64 / req as f64),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Poi, TimeGrid};
    use alloc::string::ToString;
    use alloc::vec;

    fn task() -> ItineraryTask {
        // p0 requires 8 slots (2h), p1 requires 12 slots (3h)
        ItineraryTask::new(
            "test".to_string(),
            TimeGrid::standard(8).unwrap(),
            10,
            vec![
                Poi {
                    id: "tower".into(),
                    display_name: "Tower".into(),
                    utility: 5,
                    visit_slots: 8,
                },
                Poi {
                    id: "islands".into(),
                    display_name: "Islands".into(),
                    utility: 4,
                    visit_slots: 12,
                },
            ],
            vec![0, 2, 2, 0],
            0,
        )
        .unwrap()
    }

    fn visit(poi: &str, start: u16, end: u16) -> PlanStep {
        PlanStep::Visit {
            poi: poi.into(),
            start_slot: start,
            end_slot: end,
        }
    }

    #[test]
    fn visit_too_short_tower_case() {
        // 1.5 hours instead of 2: 6 slots of 8 required
        let plan = Plan::new("test".into(), vec![visit("tower", 0, 6)]);
        let report = validate(&plan, &task());
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.category, ViolationCategory::VisitTooShort);
        assert_eq!(v.required_slots, Some(8));
        assert_eq!(v.actual_slots, Some(6));
        assert_eq!(violation_ratio(&report), vec![0.75]);
    }

    #[test]
    fn visit_too_short_islands_case() {
        // 15 minutes instead of the 3 hours asked for
        let plan = Plan::new(
            "test".into(),
            vec![
                visit("tower", 0, 8),
                PlanStep::Move {
                    from: "tower".into(),
                    to: "islands".into(),
                    start_slot: 8,
                    end_slot: 10,
                },
                visit("islands", 10, 11),
            ],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::VisitTooShort), 1);
        let ratios = violation_ratio(&report);
        assert_eq!(ratios.len(), 1);
        assert!((ratios[0] - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn valid_plan_is_clean() {
        let plan = Plan::new(
            "test".into(),
            vec![
                visit("tower", 0, 8),
                PlanStep::Move {
                    from: "tower".into(),
                    to: "islands".into(),
                    start_slot: 8,
                    end_slot: 10,
                },
                visit("islands", 10, 22),
            ],
        );
        let report = validate(&plan, &task());
        assert!(report.valid(), "{report}");
    }

    #[test]
    fn horizon_exceeded() {
        let plan = Plan::new(
            "test".into(),
            vec![visit("tower", 0, 8), visit("tower", 8, 40)],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::HorizonExceeded), 1);
        assert_eq!(report.count(ViolationCategory::DuplicateVisit), 1);
    }

    #[test]
    fn chaining_faults() {
        // visit elsewhere without a move
        let plan = Plan::new(
            "test".into(),
            vec![visit("tower", 0, 8), visit("islands", 8, 20)],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::BadChaining), 1);

        // move departing from somewhere we are not
        let plan = Plan::new(
            "test".into(),
            vec![PlanStep::Move {
                from: "islands".into(),
                to: "tower".into(),
                start_slot: 0,
                end_slot: 2,
            }],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::BadChaining), 1);

        // zero-length move
        let plan = Plan::new(
            "test".into(),
            vec![PlanStep::Move {
                from: "tower".into(),
                to: "tower".into(),
                start_slot: 0,
                end_slot: 1,
            }],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::BadChaining), 1);
    }

    #[test]
    fn unknown_poi_reported() {
        let plan = Plan::new("test".into(), vec![visit("atlantis", 0, 4)]);
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::UnknownPoi), 1);
    }

    #[test]
    fn time_discontinuity_is_not_applicable() {
        let plan = Plan::new(
            "test".into(),
            vec![visit("tower", 0, 8), visit("tower", 12, 20)],
        );
        let report = validate(&plan, &task());
        assert_eq!(report.count(ViolationCategory::NotApplicable), 1);
    }
}
