//! Record/replay of chat exchanges so the retrieval pipeline can be tested
//! offline. A transcript is an ordered JSON list of {prompt, response}
//! records, replayed verbatim.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use trip_core::providers::{ProviderError, TravelChat};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub prompt: String,
    pub response: String,
}

pub fn load_transcript(path: &Path) -> Result<Vec<TranscriptRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn save_transcript(path: &Path, records: &[TranscriptRecord]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Replays a recorded transcript in order.
pub struct ReplayChat {
    records: Vec<TranscriptRecord>,
    at: usize,
}

impl ReplayChat {
    pub fn new(records: Vec<TranscriptRecord>) -> Self {
        ReplayChat { records, at: 0 }
    }
}

impl TravelChat for ReplayChat {
    fn ask(&mut self, _prompt: &str) -> Result<String, ProviderError> {
        let record = self.records.get(self.at).ok_or_else(|| {
            ProviderError::ProviderUnavailable("transcript exhausted".to_string())
        })?;
        self.at += 1;
        Ok(record.response.clone())
    }
}

/// Wraps another chat and records every exchange.
pub struct RecordingChat<C> {
    inner: C,
    pub records: Vec<TranscriptRecord>,
}

impl<C: TravelChat> RecordingChat<C> {
    pub fn new(inner: C) -> Self {
        RecordingChat {
            inner,
            records: Vec::new(),
        }
    }
}

impl<C: TravelChat> TravelChat for RecordingChat<C> {
    fn ask(&mut self, prompt: &str) -> Result<String, ProviderError> {
        let response = self.inner.ask(prompt)?;
        self.records.push(TranscriptRecord {
            prompt: prompt.to_string(),
            response: response.clone(),
        });
        Ok(response)
    }
}
