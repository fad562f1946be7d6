//! Travel-information providers behind one contract.
//!
//! A provider produces a [`RawTravelInfo`]: POI names, ratings, visit
//! minutes, and an asymmetric travel-minute table. Three sources exist:
//! the bundled Paris fixture, a seeded synthetic generator, and a
//! chat-completion endpoint driven through the [`TravelChat`] trait (the
//! HTTP transport lives in the companion CLI crate so this module stays
//! offline-testable). [`build_task`] turns any of them into an
//! [`ItineraryTask`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{fold_name, minutes_to_slots, ItineraryTask, Poi, TimeGrid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProviderError {
    UnknownFixture(String),
    /// A reply had no usable entries.
    ParseError(String),
    /// Gaps between the POI list and the ratings/times/travel tables.
    IncompleteInfo(Vec<String>),
    ProviderUnavailable(String),
    /// A reply stayed unparseable after retries; carries the raw text.
    ProviderParseError { step: &'static str, raw: String },
    InvalidTask(String),
}

impl fmt::Display for ProviderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProviderError::UnknownFixture(city) => write!(f, "no fixture for city {city:?}"),
            ProviderError::ParseError(msg) => write!(f, "parse error: {msg}"),
            ProviderError::IncompleteInfo(gaps) => {
                write!(f, "incomplete travel info, missing: {}", gaps.join(", "))
            }
            ProviderError::ProviderUnavailable(msg) => write!(f, "provider unavailable: {msg}"),
            ProviderError::ProviderParseError { step, raw } => {
                write!(f, "unparseable {step} reply after retries: {raw:?}")
            }
            ProviderError::InvalidTask(msg) => write!(f, "invalid task from provider: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProviderError {}

/// What a planning episode asks a provider for.
#[derive(Clone, Debug)]
pub struct ProviderRequest {
    pub city: String,
    pub n_pois: usize,
    pub horizon_hours: u16,
    pub seed: u64,
}

/// Raw travel information as retrieved, before slot conversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTravelInfo {
    pub poi_names: Vec<String>,
    pub ratings: BTreeMap<String, u32>,
    pub visit_minutes: BTreeMap<String, u32>,
    /// Keyed by name pair as retrieved; [`build_task`] matches keys to POIs
    /// via name folding, so slightly different spellings still line up.
    pub travel_minutes: BTreeMap<(String, String), u32>,
}

/// The Paris dataset from the worked example: 10 POIs on a 1-5 rating
/// scale with an asymmetric travel matrix.
pub const PARIS_POIS: [(&str, u32, u32); 10] = [
    ("Eiffel Tower", 5, 120),
    ("Louvre Museum", 5, 180),
    ("Notre-Dame Cathedral", 4, 60),
    ("Sacré-Cœur Basilica", 4, 60),
    ("Palace of Versailles", 5, 240),
    ("Champs-Élysées", 4, 90),
    ("Montmartre", 3, 75),
    ("Sainte-Chapelle", 3, 45),
    ("Centre Pompidou", 2, 90),
    ("Musée d'Orsay", 4, 120),
];

/// Travel minutes between the Paris POIs, row-major in `PARIS_POIS` order.
pub const PARIS_TRAVEL_MINUTES: [[u32; 10]; 10] = [
    [0, 8, 13, 14, 35, 14, 23, 16, 18, 9],
    [11, 0, 6, 8, 45, 8, 23, 8, 11, 4],
    [15, 7, 0, 7, 49, 7, 27, 2, 10, 8],
    [17, 10, 3, 0, 46, 1, 25, 5, 8, 11],
    [32, 37, 42, 43, 0, 43, 46, 44, 46, 37],
    [17, 10, 3, 1, 46, 0, 25, 5, 8, 11],
    [24, 20, 27, 25, 48, 25, 0, 29, 23, 22],
    [14, 7, 3, 5, 47, 5, 25, 0, 8, 8],
    [18, 11, 3, 2, 47, 2, 26, 6, 0, 11],
    [11, 5, 9, 10, 45, 10, 23, 10, 14, 0],
];

/// Rating scale of the Paris fixture.
pub const PARIS_MAX_UTILITY: u32 = 5;

/// Fixture data for a known city. Currently only Paris is bundled.
pub fn fixture_provider(city: &str) -> Result<RawTravelInfo, ProviderError> {
    if !city.eq_ignore_ascii_case("paris") {
        return Err(ProviderError::UnknownFixture(city.to_string()));
    }
    let poi_names: Vec<String> = PARIS_POIS.iter().map(|(n, _, _)| n.to_string()).collect();
    let ratings = PARIS_POIS
        .iter()
        .map(|(n, r, _)| (n.to_string(), *r))
        .collect();
    let visit_minutes = PARIS_POIS
        .iter()
        .map(|(n, _, v)| (n.to_string(), *v))
        .collect();
    let mut travel_minutes = BTreeMap::new();
    for (i, row) in PARIS_TRAVEL_MINUTES.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            if i != j {
                travel_minutes.insert((poi_names[i].clone(), poi_names[j].clone()), m);
            }
        }
    }
    Ok(RawTravelInfo {
        poi_names,
        ratings,
        visit_minutes,
        travel_minutes,
    })
}

/// Seeded synthetic instance: placeholder POI names, uniform ratings in
/// `[1, max_utility]`, visit minutes uniform over {30, 45, ..., 180}, and
/// asymmetric travel minutes uniform over {15, 30, 45, 60}.
pub fn synthetic_provider(request: &ProviderRequest, max_utility: u32) -> RawTravelInfo {
    let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
    let n = request.n_pois;
    let poi_names: Vec<String> = (1..=n).map(|i| alloc::format!("poi_{i:02}")).collect();
    let ratings: BTreeMap<String, u32> = poi_names
        .iter()
        .map(|name| (name.clone(), rng.gen_range(1..=max_utility)))
        .collect();
    let visit_minutes: BTreeMap<String, u32> = poi_names
        .iter()
        .map(|name| (name.clone(), 30 + 15 * rng.gen_range(0..=10u32)))
        .collect();
    let mut travel_minutes = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                travel_minutes.insert(
                    (poi_names[i].clone(), poi_names[j].clone()),
                    15 * rng.gen_range(1..=4u32),
                );
            }
        }
    }
    RawTravelInfo {
        poi_names,
        ratings,
        visit_minutes,
        travel_minutes,
    }
}

/// One exchange with a chat-completion endpoint. Implementations carry the
/// growing context themselves: each reply is part of the next call's
/// context.
pub trait TravelChat {
    fn ask(&mut self, prompt: &str) -> Result<String, ProviderError>;
}

/// Comma-separated POI list, leading enumeration digits stripped.
pub fn parse_poi_list(text: &str) -> Result<Vec<String>, ProviderError> {
    let names: Vec<String> = text
        .split(',')
        .map(|part| {
            part.trim()
                .trim_start_matches(|c: char| c.is_ascii_digit() || c == '.' || c == ')')
                .trim()
                .to_string()
        })
        .filter(|s| s.chars().any(|c| c.is_alphanumeric()))
        .collect();
    if names.is_empty() {
        return Err(ProviderError::ParseError("no POI names found".into()));
    }
    Ok(names)
}

/// `name = k [suffix]` lines; the unit suffix (e.g. "minutes") is optional
/// and stripped. Lines that do not match are ignored.
pub fn parse_kv_lines(text: &str) -> Result<BTreeMap<String, u32>, ProviderError> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let Some((name, value)) = line.split_once('=') else {
            continue;
        };
        let name = name.trim();
        let digits: String = value
            .trim()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if name.is_empty() || digits.is_empty() {
            continue;
        }
        if let Ok(v) = digits.parse::<u32>() {
            out.insert(name.to_string(), v);
        }
    }
    if out.is_empty() {
        return Err(ProviderError::ParseError("no `name = value` lines".into()));
    }
    Ok(out)
}

/// `Travel time from A[, City] to B[, City] is k mins` lines; city suffixes
/// after commas are stripped. Garbled lines are skipped.
pub fn parse_travel_lines(
    text: &str,
) -> Result<BTreeMap<(String, String), u32>, ProviderError> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let lower = line.to_ascii_lowercase();
        let Some(from_at) = lower.find("travel time from ") else {
            continue;
        };
        let rest = &line[from_at + "travel time from ".len()..];
        let rest_lower = &lower[from_at + "travel time from ".len()..];
        let Some(is_at) = rest_lower.rfind(" is ") else {
            continue;
        };
        let (places, tail) = (&rest[..is_at], &rest[is_at + 4..]);
        let places_lower = &rest_lower[..is_at];
        let Some(to_at) = places_lower.find(" to ") else {
            continue;
        };
        let strip_city = |s: &str| s.split(',').next().unwrap_or("").trim().to_string();
        let from = strip_city(&places[..to_at]);
        let to = strip_city(&places[to_at + 4..]);
        let digits: String = tail
            .trim()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        let Ok(minutes) = digits.parse::<u32>() else {
            continue;
        };
        if from.is_empty() || to.is_empty() {
            continue;
        }
        out.insert((from, to), minutes);
    }
    if out.is_empty() {
        return Err(ProviderError::ParseError("no travel-time lines".into()));
    }
    Ok(out)
}

const RETRIES: usize = 2;

fn ask_parsed<T>(
    chat: &mut dyn TravelChat,
    prompt: &str,
    step: &'static str,
    parse: impl Fn(&str) -> Result<T, ProviderError>,
) -> Result<T, ProviderError> {
    let mut last_raw = String::new();
    for _ in 0..=RETRIES {
        let reply = chat.ask(prompt)?;
        if reply.trim().is_empty() {
            return Err(ProviderError::ProviderUnavailable(alloc::format!(
                "empty {step} reply"
            )));
        }
        match parse(&reply) {
            Ok(v) => return Ok(v),
            Err(_) => last_raw = reply,
        }
    }
    Err(ProviderError::ProviderParseError {
        step,
        raw: last_raw,
    })
}

/// Run the four-prompt retrieval sequence over a chat endpoint. Ratings and
/// visit-time entries are matched back to the POI list by name folding and
/// re-keyed by the canonical names.
pub fn llm_provider(
    chat: &mut dyn TravelChat,
    request: &ProviderRequest,
    max_utility: u32,
) -> Result<RawTravelInfo, ProviderError> {
    let poi_prompt = alloc::format!(
        "Give me a list of {} tourist points of interest by their full name for the city of {}. \
         Present it as a comma separated list of places like placeA, place B, place C. No numbers.",
        request.n_pois,
        request.city
    );
    let poi_names = ask_parsed(chat, &poi_prompt, "poi-list", parse_poi_list)?;

    let rating_prompt = alloc::format!(
        "Given, this information, for the places mentioned, assign a number from 1 to {max_utility} \
         based on how popular they are for tourists. For example location one = 2 \n\
         location two = 4 \nlocation three = 1 ... put each entry on a new line"
    );
    let ratings_raw = ask_parsed(chat, &rating_prompt, "ratings", parse_kv_lines)?;

    let visit_prompt = "For the places and popularity mentioned, assign the amount of time one \
         should spend at each of the locations. The amount of time should be in chunks of 15 \
         minutes, and give the time in minutes not hours. For example \
         location one = 15 minutes \nlocation two = 30 minutes \nlocation three = 75 minutes \
         ... put each entry on a new line";
    let visits_raw = ask_parsed(chat, visit_prompt, "visit-times", parse_kv_lines)?;

    let travel_prompt = alloc::format!(
        "For every ordered pair of the places mentioned, give the travel time in minutes, one per \
         line, like: Travel time from placeA, {0} to placeB, {0} is 12 mins",
        request.city
    );
    let travel_minutes = ask_parsed(chat, &travel_prompt, "travel-times", parse_travel_lines)?;

    let rekey = |raw: BTreeMap<String, u32>| -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        for (key, value) in raw {
            let Ok(folded) = fold_name(&key) else {
                continue;
            };
            if let Some(canonical) = poi_names
                .iter()
                .find(|n| fold_name(n).as_deref() == Ok(folded.as_str()))
            {
                out.insert(canonical.clone(), value);
            }
        }
        out
    };

    Ok(RawTravelInfo {
        ratings: rekey(ratings_raw),
        visit_minutes: rekey(visits_raw),
        travel_minutes,
        poi_names,
    })
}

/// Convert raw travel information into a planning task: names folded to
/// ids, minutes rounded up to slots, start at the first listed POI.
pub fn build_task(
    raw: &RawTravelInfo,
    city: &str,
    grid: TimeGrid,
    max_utility: u32,
) -> Result<ItineraryTask, ProviderError> {
    let mut gaps = Vec::new();
    let mut pois = Vec::new();
    let mut folded_names = Vec::new();

    for name in &raw.poi_names {
        let id = fold_name(name)
            .map_err(|_| ProviderError::InvalidTask(alloc::format!("unfoldable name {name:?}")))?;
        let utility = raw.ratings.get(name).copied();
        let minutes = raw.visit_minutes.get(name).copied();
        if utility.is_none() {
            gaps.push(alloc::format!("rating for {name}"));
        }
        if minutes.is_none() {
            gaps.push(alloc::format!("visit time for {name}"));
        }
        folded_names.push(id.clone());
        pois.push(Poi {
            id,
            display_name: name.clone(),
            utility: utility.unwrap_or(0),
            visit_slots: minutes_to_slots(minutes.unwrap_or(0), &grid),
        });
    }

    // travel keys matched by folded names
    let mut folded_travel: BTreeMap<(String, String), u32> = BTreeMap::new();
    for ((from, to), minutes) in &raw.travel_minutes {
        if let (Ok(f), Ok(t)) = (fold_name(from), fold_name(to)) {
            folded_travel.insert((f, t), *minutes);
        }
    }

    let n = raw.poi_names.len();
    let mut travel_slots = alloc::vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let key = (folded_names[i].clone(), folded_names[j].clone());
            match folded_travel.get(&key) {
                Some(&minutes) => {
                    // the minimum hop is one slot even if the source says less
                    travel_slots[i * n + j] = minutes_to_slots(minutes, &grid).max(1);
                }
                None => gaps.push(alloc::format!("travel {} -> {}", key.0, key.1)),
            }
        }
    }

    if !gaps.is_empty() {
        return Err(ProviderError::IncompleteInfo(gaps));
    }

    ItineraryTask::new(city.to_string(), grid, max_utility, pois, travel_slots, 0)
        .map_err(|e| ProviderError::InvalidTask(e.to_string()))
}
