//! Scoring of free-form model responses against a benchmark.

mod extract;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use extract::{extract_answer, AnswerExtractor, CommandExtractor, Extracted, GrammarExtractor, MILE_IN_KM};

use crate::error::{Error, Result};
use crate::interchange::{Answer, QaItem, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub qa_id: String,
    pub response: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarScore {
    pub correct: bool,
    pub abs_err: f64,
}

/// Correct when `0.75 y <= yhat <= 1.25 y`, both ends inclusive.
pub fn score_scalar(y: f64, yhat: f64) -> Result<ScalarScore> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidArgument(format!("ground truth {y} must be > 0")));
    }
    Ok(ScalarScore {
        correct: y * 0.75 <= yhat && yhat <= y * 1.25,
        abs_err: (y - yhat).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClockScore {
    pub correct: bool,
    pub err: u8,
}

/// Exact-match accuracy with wrap-around error `min(|d|, 12 - |d|)`.
pub fn score_clock(y: u8, yhat: u8) -> Result<ClockScore> {
    for h in [y, yhat] {
        if !(1..=12).contains(&h) {
            return Err(Error::InvalidArgument(format!("clock hour {h} outside 1..12")));
        }
    }
    let d = y.abs_diff(yhat);
    Ok(ClockScore {
        correct: d == 0,
        err: d.min(12 - d),
    })
}

pub fn iou(a: [f64; 2], b: [f64; 2]) -> f64 {
    let inter = (a[1].min(b[1]) - a[0].max(b[0])).max(0.0);
    let union = (a[1] - a[0]) + (b[1] - b[0]) - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalScore {
    pub correct: bool,
    pub iou: f64,
}

pub fn score_interval(y: [f64; 2], yhat: [f64; 2]) -> Result<IntervalScore> {
    for iv in [y, yhat] {
        if !(iv[0] < iv[1] && iv[0].is_finite() && iv[1].is_finite()) {
            return Err(Error::InvalidArgument(format!("degenerate interval ({}, {})", iv[0], iv[1])));
        }
    }
    let v = iou(y, yhat);
    Ok(IntervalScore { correct: v >= 0.5, iou: v })
}

pub fn score_choice<T: PartialEq>(y: &T, yhat: &T) -> bool {
    y == yhat
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemScore {
    pub qa_id: String,
    pub task: Task,
    pub parsed: bool,
    pub correct: bool,
    /// Absolute error in the task unit, where the task has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iou: Option<f64>,
}

/// Scores one item. Predictions that do not fit the task, such as a clock
/// hour out of range or an empty interval, count as unparsed.
pub fn score_item(item: &QaItem, extracted: Option<Extracted>) -> Result<ItemScore> {
    let mut s = ItemScore {
        qa_id: item.qa_id.clone(),
        task: item.task,
        parsed: false,
        correct: false,
        error: None,
        iou: None,
    };
    let Some(x) = extracted else {
        return Ok(s);
    };
    match (&item.answer_typed, x) {
        (Answer::Meters(y) | Answer::Kmh(y), Extracted::Scalar(yhat)) if yhat.is_finite() => {
            let r = score_scalar(*y, yhat)?;
            (s.correct, s.error) = (r.correct, Some(r.abs_err));
        }
        (Answer::Clock(y), Extracted::Clock(yhat)) if (1..=12).contains(&yhat) => {
            let r = score_clock(*y, yhat)?;
            (s.correct, s.error) = (r.correct, Some(r.err as f64));
        }
        (Answer::Interval(y), Extracted::Interval(yhat)) if yhat[0] < yhat[1] => {
            let r = score_interval(*y, yhat)?;
            (s.correct, s.iou) = (r.correct, Some(r.iou));
        }
        (Answer::Choice(y), Extracted::Color(c)) => s.correct = score_choice(y, &c),
        (Answer::Choice(y), Extracted::Slot(k)) => match item.color_of_slot(k) {
            Some(c) => s.correct = score_choice(y, &c),
            None => return Ok(s),
        },
        (Answer::Boolean(y), Extracted::Boolean(b)) => s.correct = score_choice(y, &b),
        _ => return Ok(s),
    }
    s.parsed = true;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskMetrics {
    /// Percent of items answered correctly; unparsed items count as wrong.
    pub accuracy: f64,
    /// Mean absolute error over parsed items (m, km/h or clock hours).
    pub mae: Option<f64>,
    pub mean_iou: Option<f64>,
    pub n: usize,
    pub n_correct: usize,
    pub n_unparsed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tasks: BTreeMap<Task, TaskMetrics>,
    /// Unweighted mean of the per-task accuracies.
    pub average_accuracy: f64,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Folds item scores into per-task metrics. Scores are reduced in `qa_id`
/// order so the result does not depend on input order.
pub fn summarize(scores: &[ItemScore]) -> EvalReport {
    let mut sorted: Vec<&ItemScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.qa_id.cmp(&b.qa_id));
    let mut by_task: BTreeMap<Task, Vec<&ItemScore>> = BTreeMap::new();
    for s in sorted {
        by_task.entry(s.task).or_default().push(s);
    }
    let tasks: BTreeMap<Task, TaskMetrics> = by_task
        .into_iter()
        .map(|(task, ss)| {
            let n = ss.len();
            let n_correct = ss.iter().filter(|s| s.correct).count();
            let errors: Vec<f64> = ss.iter().filter_map(|s| s.error).collect();
            let ious: Vec<f64> = ss.iter().filter_map(|s| s.iou).collect();
            let has_mae = matches!(task, Task::TraveledDistance | Task::TravelingSpeed | Task::MovementDirection);
            let metrics = TaskMetrics {
                accuracy: 100.0 * n_correct as f64 / n as f64,
                mae: if has_mae { mean(&errors) } else { None },
                mean_iou: if task == Task::DirectionTimestamp { mean(&ious) } else { None },
                n,
                n_correct,
                n_unparsed: ss.iter().filter(|s| !s.parsed).count(),
            };
            (task, metrics)
        })
        .collect();
    let accs: Vec<f64> = tasks.values().map(|m| m.accuracy).collect();
    EvalReport {
        average_accuracy: mean(&accs).unwrap_or(0.0),
        tasks,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: EvalReport,
    pub items: Vec<ItemScore>,
    pub warnings: Vec<String>,
}

/// Scores every benchmark item against its prediction. Missing predictions
/// count as unparsed; for duplicated `qa_id`s the last one wins.
pub fn aggregate(bench: &[QaItem], predictions: &[Prediction], extractor: &dyn AnswerExtractor) -> Result<Evaluation> {
    let known: HashMap<&str, &QaItem> = bench.iter().map(|i| (i.qa_id.as_str(), i)).collect();
    if known.len() != bench.len() {
        return Err(Error::InvalidArgument("benchmark has duplicate qa_ids".into()));
    }
    let mut warnings = Vec::new();
    let mut latest: HashMap<&str, &str> = HashMap::new();
    for p in predictions {
        if !known.contains_key(p.qa_id.as_str()) {
            return Err(Error::InvalidArgument(format!("prediction for unknown qa_id {}", p.qa_id)));
        }
        if latest.insert(&p.qa_id, &p.response).is_some() {
            warnings.push(format!("duplicate prediction for {}; keeping the last", p.qa_id));
        }
    }
    for w in &warnings {
        warn!("{w}");
    }
    let items = bench
        .par_iter()
        .map(|item| {
            let extracted = match latest.get(item.qa_id.as_str()) {
                Some(r) => extractor.extract(item, r)?,
                None => None,
            };
            score_item(item, extracted)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        report: summarize(&items),
        items,
        warnings,
    })
}

fn cell(x: Option<f64>, decimals: usize) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.decimals$}"))
}

/// Plain-text table with one column per metric, laid out like a results
/// table: accuracy and error for single-object tasks, accuracy for
/// comparisons, then the average.
pub fn format_table(report: &EvalReport, model: &str) -> String {
    let mut header = vec!["Model".to_string()];
    let mut row = vec![model.to_string()];
    for &task in Task::ALL {
        let m = report.tasks.get(&task);
        header.push(format!("{} Acc", task.short()));
        row.push(cell(m.map(|m| m.accuracy), 1));
        match task {
            Task::TraveledDistance | Task::TravelingSpeed | Task::MovementDirection => {
                let unit = match task {
                    Task::TraveledDistance => "m",
                    Task::TravelingSpeed => "km/h",
                    _ => "clock",
                };
                header.push(format!("MAE ({unit})"));
                row.push(cell(m.and_then(|m| m.mae), 1));
            }
            Task::DirectionTimestamp => {
                header.push("IoU".into());
                row.push(cell(m.and_then(|m| m.mean_iou), 2));
            }
            _ => {}
        }
    }
    header.push("Average".into());
    row.push(format!("{:.1}", report.average_accuracy));
    let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
    let mut out = String::new();
    for line in [&header, &row] {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(out, "{}", cells.join(" | ").trim_end()).expect("string write");
        if std::ptr::eq(line, &header) {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            writeln!(out, "{}", rule.join("-+-")).expect("string write");
        }
    }
    out
}
