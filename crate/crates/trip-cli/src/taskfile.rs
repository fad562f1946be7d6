//! The `trip-task/1` JSON task file format.
//!
//! Minutes live in the file; they are converted to slots on load (rounding
//! up, minimum one slot for travel). Unknown keys are rejected so typos in
//! hand-edited files fail loudly.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use trip_core::model::{minutes_to_slots, ItineraryTask, Poi, TimeGrid};
use trip_core::providers::RawTravelInfo;

pub const FORMAT: &str = "trip-task/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoiFile {
    pub id: String,
    pub name: String,
    pub utility: u32,
    pub visit_minutes: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub format: String,
    pub city: String,
    pub slot_minutes: u16,
    /// "HH:MM"
    pub day_start: String,
    pub horizon_hours: u16,
    pub max_utility: u32,
    pub start_poi: usize,
    pub pois: Vec<PoiFile>,
    pub travel_minutes: Vec<Vec<u32>>,
}

impl TaskFile {
    /// Assemble a task file from provider output, keeping raw minutes.
    pub fn from_raw(
        raw: &RawTravelInfo,
        city: &str,
        slot_minutes: u16,
        day_start: &str,
        horizon_hours: u16,
        max_utility: u32,
    ) -> Result<Self> {
        let mut pois = Vec::new();
        for name in &raw.poi_names {
            let id = trip_core::fold_name(name).map_err(|e| anyhow::anyhow!("{e}"))?;
            let utility = *raw
                .ratings
                .get(name)
                .with_context(|| format!("missing rating for {name}"))?;
            let visit_minutes = *raw
                .visit_minutes
                .get(name)
                .with_context(|| format!("missing visit time for {name}"))?;
            pois.push(PoiFile {
                id,
                name: name.clone(),
                utility,
                visit_minutes,
            });
        }
        let n = raw.poi_names.len();
        let mut travel_minutes = vec![vec![0u32; n]; n];
        for (i, from) in raw.poi_names.iter().enumerate() {
            for (j, to) in raw.poi_names.iter().enumerate() {
                if i == j {
                    continue;
                }
                travel_minutes[i][j] = *raw
                    .travel_minutes
                    .get(&(from.clone(), to.clone()))
                    .with_context(|| format!("missing travel time {from} -> {to}"))?;
            }
        }
        Ok(TaskFile {
            format: FORMAT.to_string(),
            city: city.to_string(),
            slot_minutes,
            day_start: day_start.to_string(),
            horizon_hours,
            max_utility,
            start_poi: 0,
            pois,
            travel_minutes,
        })
    }

    pub fn to_task(&self) -> Result<ItineraryTask> {
        if self.format != FORMAT {
            bail!("unsupported format {:?}, expected {FORMAT:?}", self.format);
        }
        let (h, m) = self
            .day_start
            .split_once(':')
            .with_context(|| format!("day_start {:?} is not HH:MM", self.day_start))?;
        let hours: u16 = h.parse().context("day_start hours")?;
        let minutes: u16 = m.parse().context("day_start minutes")?;
        let grid = TimeGrid::new(self.slot_minutes, hours * 60 + minutes, self.horizon_hours)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let pois: Vec<Poi> = self
            .pois
            .iter()
            .map(|p| Poi {
                id: p.id.clone(),
                display_name: p.name.clone(),
                utility: p.utility,
                visit_slots: minutes_to_slots(p.visit_minutes, &grid),
            })
            .collect();
        let n = pois.len();
        if self.travel_minutes.len() != n || self.travel_minutes.iter().any(|r| r.len() != n) {
            bail!("travel_minutes must be a {n}x{n} matrix");
        }
        let mut travel_slots = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    travel_slots[i * n + j] =
                        minutes_to_slots(self.travel_minutes[i][j], &grid).max(1);
                }
            }
        }
        ItineraryTask::new(
            self.city.clone(),
            grid,
            self.max_utility,
            pois,
            travel_slots,
            self.start_poi,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("task file serializes");
        s.push('\n');
        s
    }
}

pub fn load_task_file(path: &Path) -> Result<TaskFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: TaskFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file)
}

pub fn load_task(path: &Path) -> Result<ItineraryTask> {
    load_task_file(path)?.to_task()
}

pub fn save_task_file(path: &Path, file: &TaskFile) -> Result<()> {
    fs::write(path, file.to_json()).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use trip_core::providers::fixture_provider;

    #[test]
    fn value_round_trip() {
        let raw = fixture_provider("Paris").unwrap();
        let file = TaskFile::from_raw(&raw, "Paris", 15, "08:00", 6, 5).unwrap();
        let json = file.to_json();
        let back: TaskFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_task().unwrap(), file.to_task().unwrap());
        // byte stability
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn unknown_keys_rejected() {
        let raw = fixture_provider("Paris").unwrap();
        let file = TaskFile::from_raw(&raw, "Paris", 15, "08:00", 6, 5).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&file.to_json()).unwrap();
        value["surprise"] = serde_json::json!(1);
        let text = serde_json::to_string(&value).unwrap();
        assert!(serde_json::from_str::<TaskFile>(&text).is_err());
    }

    #[test]
    fn format_key_required() {
        let raw = fixture_provider("Paris").unwrap();
        let mut file = TaskFile::from_raw(&raw, "Paris", 15, "08:00", 6, 5).unwrap();
        file.format = "trip-task/999".into();
        assert!(file.to_task().is_err());
    }
}
