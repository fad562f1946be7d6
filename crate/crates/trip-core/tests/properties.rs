use proptest::prelude::*;

use trip_core::model::{
    fold_name, minutes_to_slots, plan_utility, ItineraryTask, Plan, PlanStep, Poi, TimeGrid,
};
use trip_core::pddl::{parse_plan_llm, parse_plan_native, render_plan_native};
use trip_core::providers::{fixture_provider, PARIS_POIS};
use trip_core::validator::{validate, ViolationCategory};

fn paris_task() -> ItineraryTask {
    let raw = fixture_provider("Paris").unwrap();
    trip_core::providers::build_task(&raw, "Paris", TimeGrid::standard(8).unwrap(), 5).unwrap()
}

proptest! {
    #[test]
    fn fold_name_idempotent(raw in "\\PC{1,40}") {
        if let Ok(folded) = fold_name(&raw) {
            prop_assert_eq!(fold_name(&folded).unwrap(), folded);
        }
    }

    #[test]
    fn minutes_to_slots_rounds_up(m in 0u32..10_000) {
        let grid = TimeGrid::standard(8).unwrap();
        let slots = minutes_to_slots(m, &grid) as u32;
        let sm = grid.slot_minutes() as u32;
        prop_assert!(slots * sm >= m);
        prop_assert_eq!(slots * sm == m, m % sm == 0);
        prop_assert_eq!(slots == 0, m == 0);
    }

    #[test]
    fn llm_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
        let text = String::from_utf8_lossy(&bytes);
        let task = paris_task();
        let _ = parse_plan_llm(&text, &task);
    }

    #[test]
    fn native_parser_never_panics(text in "\\PC{0,300}") {
        let task = paris_task();
        let _ = parse_plan_native(&text, &task);
    }
}

#[test]
fn fold_name_idempotent_on_fixture_names() {
    for (name, _, _) in PARIS_POIS {
        let once = fold_name(name).unwrap();
        assert_eq!(fold_name(&once).unwrap(), once);
    }
}

#[test]
fn utility_monotone_under_visit_insertion() {
    let task = paris_task();
    let base = Plan::new(
        "Paris".into(),
        vec![PlanStep::Visit {
            poi: "eiffel_tower".into(),
            start_slot: 0,
            end_slot: 8,
        }],
    );
    let u0 = plan_utility(&base, &task).unwrap();
    let mut steps = base.steps.clone();
    steps.push(PlanStep::Move {
        from: "eiffel_tower".into(),
        to: "louvre_museum".into(),
        start_slot: 8,
        end_slot: 9,
    });
    steps.push(PlanStep::Visit {
        poi: "louvre_museum".into(),
        start_slot: 9,
        end_slot: 21,
    });
    let bigger = Plan::new("Paris".into(), steps);
    let u1 = plan_utility(&bigger, &task).unwrap();
    let louvre_utility = task.pois()[task.poi_index("louvre_museum").unwrap()].utility;
    assert_eq!(u1, u0 + louvre_utility);
}

#[test]
fn shrinking_a_visit_flips_exactly_one_violation() {
    let task = paris_task();
    let plan = Plan::new(
        "Paris".into(),
        vec![
            PlanStep::Visit {
                poi: "eiffel_tower".into(),
                start_slot: 0,
                end_slot: 8,
            },
            PlanStep::Move {
                from: "eiffel_tower".into(),
                to: "louvre_museum".into(),
                start_slot: 8,
                end_slot: 9,
            },
            PlanStep::Visit {
                poi: "louvre_museum".into(),
                start_slot: 9,
                end_slot: 21,
            },
        ],
    );
    assert!(validate(&plan, &task).valid());

    // shrink the louvre visit by one slot; shift nothing else so only the
    // duration check can fire
    let mut steps = plan.steps.clone();
    if let PlanStep::Visit { end_slot, .. } = &mut steps[2] {
        *end_slot -= 1;
    }
    let shrunk = Plan::new("Paris".into(), steps);
    let report = validate(&shrunk, &task);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(
        report.violations[0].category,
        ViolationCategory::VisitTooShort
    );
}

#[test]
fn shuffled_steps_break_chaining() {
    let task = paris_task();
    let plan = Plan::new(
        "Paris".into(),
        vec![
            PlanStep::Visit {
                poi: "eiffel_tower".into(),
                start_slot: 0,
                end_slot: 8,
            },
            PlanStep::Move {
                from: "eiffel_tower".into(),
                to: "louvre_museum".into(),
                start_slot: 8,
                end_slot: 9,
            },
            PlanStep::Visit {
                poi: "louvre_museum".into(),
                start_slot: 9,
                end_slot: 21,
            },
        ],
    );
    let mut steps = plan.steps.clone();
    steps.swap(0, 2);
    let shuffled = Plan::new("Paris".into(), steps);
    let report = validate(&shuffled, &task);
    assert!(report.count(ViolationCategory::BadChaining) >= 1);
}

#[test]
fn injected_faults_all_reported() {
    let task = paris_task();
    // three independent faults: unknown POI, too-short visit, horizon blown
    let plan = Plan::new(
        "Paris".into(),
        vec![
            PlanStep::Visit {
                poi: "eiffel_tower".into(),
                start_slot: 0,
                end_slot: 4, // needs 8
            },
            PlanStep::Move {
                from: "eiffel_tower".into(),
                to: "atlantis".into(),
                start_slot: 4,
                end_slot: 5,
            },
            PlanStep::Visit {
                poi: "atlantis".into(),
                start_slot: 5,
                end_slot: 40, // beyond S = 32
            },
        ],
    );
    let report = validate(&plan, &task);
    assert!(report.violations.len() >= 3, "{report}");
}

#[test]
fn native_render_parse_round_trip_paris() {
    let task = paris_task();
    let compiled = trip_core::compile(&task);
    let plan = trip_core::solve(&compiled, &Default::default()).unwrap();
    let text = render_plan_native(&plan, &task);
    let back = parse_plan_native(&text, &task).unwrap();
    assert_eq!(back, plan);
}
