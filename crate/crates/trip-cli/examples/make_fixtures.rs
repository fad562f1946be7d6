//! Regenerates the files under `crates/trip-cli/fixtures/`.
//!
//! Run from the workspace root:
//!
//! ```sh
//! cargo run -p trip-cli --example make_fixtures
//! ```
//!
//! The generated files are committed; tests pin their bytes. Rerun this only
//! when the formats intentionally change.

use std::fs;
use std::path::Path;

use trip_core::model::plan_utility;
use trip_core::pddl::parse_plan_llm;
use trip_core::providers::{
    fixture_provider, llm_provider, synthetic_provider, ProviderError, ProviderRequest,
    TravelChat, PARIS_MAX_UTILITY, PARIS_POIS, PARIS_TRAVEL_MINUTES,
};
use trip_core::validator::validate;

use trip_cli::taskfile::{load_task, TaskFile};
use trip_cli::transcript::{save_transcript, RecordingChat};

/// Returns canned replies in order, ignoring the prompts.
struct ScriptedChat {
    replies: Vec<String>,
    at: usize,
}

impl TravelChat for ScriptedChat {
    fn ask(&mut self, _prompt: &str) -> Result<String, ProviderError> {
        let reply = self.replies[self.at].clone();
        self.at += 1;
        Ok(reply)
    }
}

fn paris_replies() -> Vec<String> {
    let names: Vec<&str> = PARIS_POIS.iter().map(|(n, _, _)| *n).collect();
    let poi_list = names.join(", ");
    let ratings = PARIS_POIS
        .iter()
        .map(|(n, r, _)| format!("{n} = {r}"))
        .collect::<Vec<_>>()
        .join("\n");
    let visits = PARIS_POIS
        .iter()
        .map(|(n, _, v)| format!("{n} = {v} minutes"))
        .collect::<Vec<_>>()
        .join("\n");
    let mut travel_lines = Vec::new();
    for (i, row) in PARIS_TRAVEL_MINUTES.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if i != j {
                travel_lines.push(format!(
                    "Travel time from {}, Paris to {}, Paris is {m} mins",
                    names[i], names[j]
                ));
            }
        }
    }
    vec![poi_list, ratings, visits, travel_lines.join("\n")]
}

fn main() -> anyhow::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir)?;

    // Paris task file: 15-minute slots, 08:00 start, 6 tourism hours.
    let raw = fixture_provider("Paris").map_err(|e| anyhow::anyhow!("{e}"))?;
    let paris = TaskFile::from_raw(&raw, "Paris", 15, "08:00", 6, PARIS_MAX_UTILITY)?;
    fs::write(dir.join("paris.json"), paris.to_json())?;

    // Synthetic golden instance: seed 42, 10 POIs, 8 hours.
    let request = ProviderRequest {
        city: "Synthetic".to_string(),
        n_pois: 10,
        horizon_hours: 8,
        seed: 42,
    };
    let synthetic = synthetic_provider(&request, 10);
    let file = TaskFile::from_raw(&synthetic, "Synthetic", 15, "08:00", 8, 10)?;
    fs::write(dir.join("synthetic_42.json"), file.to_json())?;

    // Retrieval transcript whose replay reproduces the Paris fixture data.
    let scripted = ScriptedChat {
        replies: paris_replies(),
        at: 0,
    };
    let mut recorder = RecordingChat::new(scripted);
    let request = ProviderRequest {
        city: "Paris".to_string(),
        n_pois: 10,
        horizon_hours: 6,
        seed: 0,
    };
    let replayed = llm_provider(&mut recorder, &request, PARIS_MAX_UTILITY)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    assert_eq!(replayed, raw, "transcript must reproduce the fixture data");
    save_transcript(&dir.join("paris_retrieval.json"), &recorder.records)?;

    // Golden parse + validation of the frozen clock-time plan.
    let task = load_task(&dir.join("paris.json"))?;
    let plan_text = fs::read_to_string(dir.join("paris_llm_plan.txt"))?;
    let plan = parse_plan_llm(&plan_text, &task).map_err(|e| anyhow::anyhow!("{}", e.message))?;
    let report = validate(&plan, &task);
    let mut golden = String::new();
    for step in &plan.steps {
        golden.push_str(&format!("{step:?}\n"));
    }
    golden.push_str(&format!("utility {}\n", plan_utility(&plan, &task)?));
    golden.push_str(&format!("{report}"));
    fs::write(dir.join("paris_llm_plan.golden.txt"), &golden)?;

    println!("fixtures written to {}", dir.display());
    Ok(())
}
