//! Deterministic answer extraction from free-form responses.

use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interchange::{Answer, Color, QaItem, Task};

pub const MILE_IN_KM: f64 = 1.609344;

/// A prediction pulled out of a response, in the task's own unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extracted {
    /// Meters for distance, km/h for speed.
    Scalar(f64),
    Clock(u8),
    Interval([f64; 2]),
    Color(Color),
    /// "object A" / "object B": the first or second object of the question.
    Slot(usize),
    Boolean(bool),
}

impl Extracted {
    fn from_answer(a: &Answer) -> Self {
        match *a {
            Answer::Meters(x) | Answer::Kmh(x) => Extracted::Scalar(x),
            Answer::Clock(h) => Extracted::Clock(h),
            Answer::Interval(iv) => Extracted::Interval(iv),
            Answer::Choice(c) => Extracted::Color(c),
            Answer::Boolean(b) => Extracted::Boolean(b),
        }
    }
}

pub trait AnswerExtractor: Send + Sync {
    /// `Ok(None)` means the response holds no usable answer.
    fn extract(&self, item: &QaItem, response: &str) -> Result<Option<Extracted>>;
}

const NUM: &str = r"(\d+(?:\.\d+)?|\.\d+)";

static DISTANCE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i){NUM}\s*(kilometers?|kilometres?|km|meters?|metres?|m|miles?|mi)\b(?:\s*(?:per|/)\s*(?:hour|h|hr|s|sec|second))?"
    ))
    .expect("valid regex")
});

static SPEED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i){NUM}\s*(km\s*/\s*h|km\s*/\s*hr|kmh|kph|km/hour|kilometers?\s+per\s+hour|kilometres?\s+per\s+hour|mph|miles?\s+per\s+hour|m\s*/\s*s|meters?\s+per\s+second|metres?\s+per\s+second)"
    ))
    .expect("valid regex")
});

static BARE_NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(NUM).expect("valid regex"));

static OCLOCK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(\d{1,2})\s*o'?\s*clock").expect("valid regex"));

static BARE_INT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b(\d{1,2})\b").expect("valid regex"));

static INTERVAL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)(?:from\s+{NUM}\s*(?:s|sec|secs|seconds?)?\s+(?:to|until|till)\s+{NUM})|(?:between\s+{NUM}\s*(?:s|sec|secs|seconds?)?\s+and\s+{NUM})|(?:{NUM}\s*(?:s|sec|secs|seconds?)?\s*(?:-|–|—|to)\s*{NUM}\s*(?:s|sec|secs|seconds?)\b)"
    ))
    .expect("valid regex")
});

static COLOR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(red|green|blue|yellow|magenta|cyan)\b").expect("valid regex"));

static SLOT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bobject\s+(a|b)\b").expect("valid regex"));

static YES_NO: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(yes|no)\b").expect("valid regex"));

static SAME_DIFFERENT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(not\s+(?:moving\s+)?(?:in\s+)?the\s+same|different|opposite|same)\b").expect("valid regex")
});

fn num(s: &str) -> Option<f64> {
    s.parse().ok().filter(|x: &f64| x.is_finite())
}

fn distance(response: &str) -> Option<f64> {
    let with_unit = DISTANCE
        .captures_iter(response)
        .filter(|c| !c[0].contains('/') && !c[0].to_lowercase().contains("per"))
        .last();
    if let Some(c) = with_unit {
        let x = num(&c[1])?;
        let unit = c[2].to_lowercase();
        return Some(if unit.starts_with("k") {
            x * 1000.0
        } else if unit.starts_with("mi") {
            x * MILE_IN_KM * 1000.0
        } else {
            x
        });
    }
    BARE_NUMBER.find_iter(response).last().and_then(|m| num(m.as_str()))
}

fn speed(response: &str) -> Option<f64> {
    if let Some(c) = SPEED.captures_iter(response).last() {
        let x = num(&c[1])?;
        let unit = c[2].to_lowercase().replace(' ', "");
        return Some(if unit.starts_with("mph") || unit.starts_with("mile") {
            x * MILE_IN_KM
        } else if unit.starts_with("m/s") || unit.starts_with("meter") || unit.starts_with("metre") {
            x * 3.6
        } else {
            x
        });
    }
    BARE_NUMBER.find_iter(response).last().and_then(|m| num(m.as_str()))
}

fn clock(response: &str) -> Option<u8> {
    let h = match OCLOCK.captures_iter(response).last() {
        Some(c) => c[1].parse::<u8>().ok()?,
        None => BARE_INT.captures_iter(response).last()?[1].parse::<u8>().ok()?,
    };
    (1..=12).contains(&h).then_some(h)
}

fn interval(response: &str) -> Option<[f64; 2]> {
    let c = INTERVAL.captures(response)?;
    let groups: Vec<f64> = (1..c.len()).filter_map(|i| c.get(i)).filter_map(|m| num(m.as_str())).collect();
    match groups[..] {
        [a, b] if a < b => Some([a, b]),
        _ => None,
    }
}

fn choice(response: &str) -> Option<Extracted> {
    let color = COLOR.captures(response).map(|c| (c.get(0).expect("match").start(), c[1].to_lowercase()));
    let slot = SLOT.captures(response).map(|c| (c.get(0).expect("match").start(), c[1].to_lowercase()));
    match (color, slot) {
        (Some((ci, c)), Some((si, _))) if ci < si => c.parse().ok().map(Extracted::Color),
        (_, Some((_, s))) => Some(Extracted::Slot(usize::from(s == "b"))),
        (Some((_, c)), None) => c.parse().ok().map(Extracted::Color),
        (None, None) => None,
    }
}

fn boolean(response: &str) -> Option<bool> {
    if let Some(c) = YES_NO.captures(response) {
        return Some(c[1].eq_ignore_ascii_case("yes"));
    }
    let c = SAME_DIFFERENT.captures(response)?;
    Some(c[1].eq_ignore_ascii_case("same"))
}

/// The built-in grammar. Scalars take the last number carrying a unit, or
/// failing that the last bare number; intervals and choices take the first
/// match; clock hours the last "N o'clock" or bare 1 to 12.
pub fn extract_answer(task: Task, response: &str) -> Option<Extracted> {
    match task {
        Task::TraveledDistance => distance(response).map(Extracted::Scalar),
        Task::TravelingSpeed => speed(response).map(Extracted::Scalar),
        Task::MovementDirection => clock(response).map(Extracted::Clock),
        Task::DirectionTimestamp => interval(response).map(Extracted::Interval),
        Task::DistanceComparison | Task::SpeedComparison => choice(response),
        Task::DirectionComparison => boolean(response).map(Extracted::Boolean),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GrammarExtractor;

impl AnswerExtractor for GrammarExtractor {
    fn extract(&self, item: &QaItem, response: &str) -> Result<Option<Extracted>> {
        Ok(extract_answer(item.task, response))
    }
}

/// Delegates extraction to an external program. It receives one JSON object
/// `{"task", "question", "response"}` on stdin and prints a typed answer
/// (same encoding as `answer_typed`) or `null` on stdout.
#[derive(Debug, Clone)]
pub struct CommandExtractor {
    pub program: String,
    pub args: Vec<String>,
}

#[derive(Serialize)]
struct ExtractRequest<'a> {
    task: Task,
    question: &'a str,
    response: &'a str,
}

impl AnswerExtractor for CommandExtractor {
    fn extract(&self, item: &QaItem, response: &str) -> Result<Option<Extracted>> {
        let fail = |m: String| Error::Extractor(format!("{}: {m}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| fail(e.to_string()))?;
        let req = serde_json::to_vec(&ExtractRequest {
            task: item.task,
            question: &item.question,
            response,
        })
        .expect("serializable request");
        child
            .stdin
            .take()
            .expect("piped stdin")
            .write_all(&req)
            .map_err(|e| fail(e.to_string()))?;
        let out = child.wait_with_output().map_err(|e| fail(e.to_string()))?;
        if !out.status.success() {
            return Err(fail(format!("exited with {}", out.status)));
        }
        let answer: Option<Answer> = serde_json::from_slice(&out.stdout).map_err(|e| fail(e.to_string()))?;
        match answer {
            Some(a) if !a.matches_task(item.task) => Err(fail(format!("{a:?} does not fit task {}", item.task))),
            other => Ok(other.as_ref().map(Extracted::from_answer)),
        }
    }
}
