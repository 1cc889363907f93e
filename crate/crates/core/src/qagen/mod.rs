//! Template-based generation of the seven kinematic QA tasks from scene
//! manifests, plus bounding-box overlays for the visual prompt.

mod overlay;
mod templates;

use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use overlay::{outline_pixel_count, read_ppm, render_overlay, write_ppm, RgbRaster};
pub use templates::{required_placeholders, templates_for, QaTemplate, ALL_PLACEHOLDERS, TEMPLATES};

use crate::error::{Error, Result};
use crate::interchange::{read_jsonl, write_jsonl, Answer, Color, Domain, Polarity, QaItem, QaParams, SceneManifest, Task};
use crate::trajectory::{
    compare_distance, compare_speed, direction_intervals, longest_interval, same_direction, speed, step_labels,
    traveled_distance, CompareConfig, DirectionLabel, DirectionVerdict, KinematicsConfig, TimeInterval, Trajectory,
    Verdict,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QaConfig {
    pub tasks: Vec<Task>,
    /// Distance tasks skip windows in which the object moves less than this.
    pub min_distance: f64,
    /// Shortest question window, seconds.
    pub min_window: f64,
}

impl Default for QaConfig {
    fn default() -> Self {
        Self {
            tasks: Task::ALL.to_vec(),
            min_distance: 2.0,
            min_window: 2.0,
        }
    }
}

/// Everything generation and re-derivation depend on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenSettings {
    pub qa: QaConfig,
    pub kinematics: KinematicsConfig,
    pub compare: CompareConfig,
}

pub const PALETTE: [Color; 6] = [Color::Red, Color::Green, Color::Blue, Color::Yellow, Color::Magenta, Color::Cyan];

/// Palette colors for the first six objects in manifest order.
pub fn assign_colors(manifest: &SceneManifest) -> BTreeMap<String, Color> {
    manifest
        .objects
        .iter()
        .zip(PALETTE)
        .map(|(o, c)| (o.object_id.clone(), c))
        .collect()
}

fn join_words(words: &[String]) -> String {
    match words {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

pub fn common_prompt(duration: f64, timestamps: &[f64], colors: &[Color]) -> Result<String> {
    if colors.is_empty() {
        return Err(Error::InvalidArgument("common prompt needs at least one annotated object".into()));
    }
    let times: Vec<String> = timestamps.iter().map(|t| format!("{t:.1}")).collect();
    let names: Vec<String> = colors.iter().map(|c| c.to_string()).collect();
    Ok(format!(
        "The video lasts for {duration:.1} seconds, and {} frames are uniformly sampled from it. \
         These frames are located at {} seconds. \
         There are {} objects annotated with {} bounding boxes in the video.",
        timestamps.len(),
        times.join(", "),
        colors.len(),
        join_words(&names)
    ))
}

pub fn answer_text(answer: &Answer) -> String {
    match answer {
        Answer::Meters(m) => format!("Answer: {m:.1} meters"),
        Answer::Kmh(v) => format!("Answer: {v:.1} km/h"),
        Answer::Clock(h) => format!("Answer: {h} o'clock"),
        Answer::Interval([s, e]) => format!("Answer: from {s:.1} to {e:.1} seconds"),
        Answer::Choice(c) => format!("Answer: the {c} object"),
        Answer::Boolean(b) => format!("Answer: {}", if *b { "yes" } else { "no" }),
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Per-scene generator: the run seed mixed with the scene id, so adding a
/// scene never perturbs another scene's items.
pub fn scene_rng(seed: u64, scene_id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(scene_id))
}

/// Resampled trajectories of the colored objects; objects that fail to
/// resample are left out with a warning.
fn trajectories(manifest: &SceneManifest, colors: &BTreeMap<String, Color>, kin: &KinematicsConfig) -> Vec<Trajectory> {
    manifest
        .objects
        .iter()
        .filter(|o| colors.contains_key(&o.object_id))
        .filter_map(|o| match Trajectory::resample(&o.object_id, o.class, &o.raw_samples(), kin) {
            Ok(t) => Some(t),
            Err(e) => {
                warn!("{}: skipping {}: {e}", manifest.scene_id, o.object_id);
                None
            }
        })
        .collect()
}

fn trajectory_of(manifest: &SceneManifest, id: &str, kin: &KinematicsConfig) -> Result<Trajectory> {
    let o = manifest
        .object(id)
        .ok_or_else(|| Error::InvalidArgument(format!("{}: no object {id}", manifest.scene_id)))?;
    Trajectory::resample(&o.object_id, o.class, &o.raw_samples(), kin)
}

/// Grid windows `[k0 * step, k1 * step]` between absolute indices `lo..=hi`
/// lasting at least `min_len` seconds.
fn grid_windows(lo: i64, hi: i64, step: f64, min_len: f64) -> Vec<TimeInterval> {
    let min_steps = (min_len / step - 1e-9).ceil() as i64;
    let mut out = Vec::new();
    for a in lo..=hi {
        for b in (a + min_steps.max(1))..=hi {
            out.push(TimeInterval {
                start: a as f64 * step,
                end: b as f64 * step,
            });
        }
    }
    out
}

fn index_range(t: &Trajectory) -> (i64, i64) {
    (t.first_index(), t.first_index() + t.len() as i64 - 1)
}

fn window_param(w: TimeInterval) -> Option<[f64; 2]> {
    Some([w.start, w.end])
}

fn fill(pattern: &str, subs: &[(&str, String)]) -> String {
    subs.iter().fold(pattern.to_string(), |q, (k, v)| q.replace(k, v))
}

fn choice(v: Verdict, a: Color, b: Color, polarity: Polarity) -> Option<Color> {
    match (v, polarity) {
        (Verdict::AGreater, Polarity::Greater) | (Verdict::BGreater, Polarity::Less) => Some(a),
        (Verdict::BGreater, Polarity::Greater) | (Verdict::AGreater, Polarity::Less) => Some(b),
        (Verdict::Ambiguous, _) => None,
    }
}

/// The typed answer implied by `task` and `params`, or `None` when the
/// combination has no well-defined answer.
fn derive(
    task: Task,
    params: &QaParams,
    trajs: &[&Trajectory],
    colors: &BTreeMap<String, Color>,
    s: &GenSettings,
) -> Result<Option<Answer>> {
    let window = || -> Result<TimeInterval> {
        let [a, b] = params
            .window
            .ok_or_else(|| Error::InvalidArgument(format!("{task} needs a window")))?;
        TimeInterval::new(a, b)
    };
    let color = |t: &Trajectory| colors[t.object_id()];
    Ok(match task {
        Task::TraveledDistance => {
            let w = window()?;
            Some(Answer::Meters(traveled_distance(trajs[0], w.start, w.end)?))
        }
        Task::TravelingSpeed => {
            let w = window()?;
            Some(Answer::Kmh(speed(trajs[0], w.start, w.end)?))
        }
        Task::MovementDirection => match step_labels(trajs[0], &s.kinematics)?.last() {
            Some(DirectionLabel::Hour(h)) => Some(Answer::Clock(*h)),
            _ => None,
        },
        Task::DirectionTimestamp => {
            let hour = params
                .hour
                .ok_or_else(|| Error::InvalidArgument("direction_timestamp needs an hour".into()))?;
            longest_interval(&direction_intervals(trajs[0], hour, &s.kinematics)?)
                .map(|iv| Answer::Interval([iv.start, iv.end]))
        }
        Task::DistanceComparison | Task::SpeedComparison => {
            let w = window()?;
            let polarity = params
                .polarity
                .ok_or_else(|| Error::InvalidArgument(format!("{task} needs a polarity")))?;
            let v = if task == Task::DistanceComparison {
                compare_distance(trajs[0], trajs[1], w, &s.compare)?
            } else {
                compare_speed(trajs[0], trajs[1], w, &s.compare)?
            };
            choice(v, color(trajs[0]), color(trajs[1]), polarity).map(Answer::Choice)
        }
        Task::DirectionComparison => {
            let w = window()?;
            match same_direction(trajs[0], trajs[1], w, &s.kinematics, &s.compare) {
                Ok(DirectionVerdict::Same) => Some(Answer::Boolean(true)),
                Ok(DirectionVerdict::Different) => Some(Answer::Boolean(false)),
                Ok(DirectionVerdict::Ambiguous) | Err(Error::StationaryWindow(_)) => None,
                Err(e) => return Err(e),
            }
        }
    })
}

/// Recomputes an item's typed answer from its manifest.
pub fn rederive(item: &QaItem, manifest: &SceneManifest, s: &GenSettings) -> Result<Answer> {
    if item.scene_id != manifest.scene_id {
        return Err(Error::InvalidArgument(format!(
            "{} belongs to scene {}, not {}",
            item.qa_id, item.scene_id, manifest.scene_id
        )));
    }
    let trajs = item
        .params
        .objects
        .iter()
        .map(|id| trajectory_of(manifest, id, &s.kinematics))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&Trajectory> = trajs.iter().collect();
    let need = if item.task.is_comparison() { 2 } else { 1 };
    if refs.len() != need {
        return Err(Error::InvalidArgument(format!("{} names {} objects, needs {need}", item.qa_id, refs.len())));
    }
    derive(item.task, &item.params, &refs, &item.object_colors, s)?
        .ok_or_else(|| Error::InvalidArgument(format!("{}: answer is no longer well defined", item.qa_id)))
}

struct Draft {
    task: Task,
    params: QaParams,
    answer: Answer,
    question: String,
}

fn single_object_drafts(
    task: Task,
    t: &Trajectory,
    colors: &BTreeMap<String, Color>,
    s: &GenSettings,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Draft>> {
    let color = colors[t.object_id()].to_string();
    let mut params = QaParams {
        objects: vec![t.object_id().to_string()],
        ..QaParams::default()
    };
    let mut subs = vec![("[COLOR]", color)];
    let whole = match task {
        Task::TraveledDistance | Task::TravelingSpeed => {
            let (lo, hi) = index_range(t);
            let eligible: Vec<TimeInterval> = grid_windows(lo, hi, t.grid_step(), s.qa.min_window)
                .into_iter()
                .filter(|w| traveled_distance(t, w.start, w.end).is_ok_and(|d| d >= s.qa.min_distance))
                .collect();
            let Some(&w) = eligible.choose(rng) else {
                return Ok(None);
            };
            params.window = window_param(w);
            subs.push(("[START]", format!("{:.1}", w.start)));
            subs.push(("[END]", format!("{:.1}", w.end)));
            w.start == t.start() && w.end == t.end()
        }
        Task::MovementDirection => true,
        Task::DirectionTimestamp => {
            let mut hours: Vec<u8> = match step_labels(t, &s.kinematics) {
                Ok(labels) => labels
                    .into_iter()
                    .filter_map(|l| match l {
                        DirectionLabel::Hour(h) => Some(h),
                        DirectionLabel::Stationary => None,
                    })
                    .collect(),
                Err(Error::StationaryStart { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            hours.sort_unstable();
            hours.dedup();
            let Some(&h) = hours.choose(rng) else {
                return Ok(None);
            };
            params.hour = Some(h);
            subs.push(("[DIRECTION]", h.to_string()));
            true
        }
        _ => unreachable!("comparison task {task}"),
    };
    let answer = match derive(task, &params, &[t], colors, s) {
        Ok(Some(a)) => a,
        Ok(None) | Err(Error::StationaryStart { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let tpl = templates_for(task, None, whole)
        .choose(rng)
        .copied()
        .expect("every task has templates");
    Ok(Some(Draft {
        task,
        question: fill(tpl.pattern, &subs),
        params,
        answer,
    }))
}

fn pair_draft(
    task: Task,
    a: &Trajectory,
    b: &Trajectory,
    colors: &BTreeMap<String, Color>,
    s: &GenSettings,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Draft>> {
    let (a, b) = if rng.gen_bool(0.5) { (b, a) } else { (a, b) };
    let polarity = match task {
        Task::DirectionComparison => None,
        _ => Some(if rng.gen_bool(0.5) { Polarity::Greater } else { Polarity::Less }),
    };
    let (alo, ahi) = index_range(a);
    let (blo, bhi) = index_range(b);
    let mut params = QaParams {
        objects: vec![a.object_id().to_string(), b.object_id().to_string()],
        polarity,
        ..QaParams::default()
    };
    let mut eligible = Vec::new();
    for w in grid_windows(alo.max(blo), ahi.min(bhi), a.grid_step(), s.qa.min_window) {
        params.window = window_param(w);
        if let Some(ans) = derive(task, &params, &[a, b], colors, s)? {
            eligible.push((w, ans));
        }
    }
    let Some((w, answer)) = eligible.choose(rng).cloned() else {
        return Ok(None);
    };
    params.window = window_param(w);
    let tpl = templates_for(task, polarity, false)
        .choose(rng)
        .copied()
        .expect("every task has templates");
    let subs = [
        ("[COLOR_A]", colors[a.object_id()].to_string()),
        ("[COLOR_B]", colors[b.object_id()].to_string()),
        ("[START]", format!("{:.1}", w.start)),
        ("[END]", format!("{:.1}", w.end)),
    ];
    Ok(Some(Draft {
        task,
        question: fill(tpl.pattern, &subs),
        params,
        answer,
    }))
}

/// All items for one manifest. Ineligible combinations are skipped: windows
/// where the object moves less than `min_distance`, stationary headings,
/// ambiguous comparisons, and every direction task in the sports domain.
pub fn generate(manifest: &SceneManifest, seed: u64, s: &GenSettings) -> Result<Vec<QaItem>> {
    manifest.check()?;
    let colors = assign_colors(manifest);
    if colors.is_empty() {
        return Ok(Vec::new());
    }
    let palette: Vec<Color> = PALETTE[..colors.len()].to_vec();
    let prompt = common_prompt(manifest.duration, &manifest.frame_timestamps, &palette)?;
    let trajs = trajectories(manifest, &colors, &s.kinematics);
    let mut rng = scene_rng(seed, &manifest.scene_id);
    let mut items = Vec::new();
    for &task in Task::ALL {
        if !s.qa.tasks.contains(&task) || (task.is_direction() && manifest.domain == Domain::Sports) {
            continue;
        }
        let mut drafts = Vec::new();
        if task.is_comparison() {
            for i in 0..trajs.len() {
                for j in i + 1..trajs.len() {
                    drafts.extend(pair_draft(task, &trajs[i], &trajs[j], &colors, s, &mut rng)?);
                }
            }
        } else {
            for t in &trajs {
                drafts.extend(single_object_drafts(task, t, &colors, s, &mut rng)?);
            }
        }
        for (n, d) in drafts.into_iter().enumerate() {
            let item = QaItem {
                qa_id: format!("{}-{}-{:03}", manifest.scene_id, task.short(), n),
                scene_id: manifest.scene_id.clone(),
                task: d.task,
                question: format!("{prompt} {}", d.question),
                answer_text: answer_text(&d.answer),
                answer_typed: d.answer,
                object_colors: colors.clone(),
                frame_timestamps: manifest.frame_timestamps.clone(),
                duration: manifest.duration,
                params: d.params,
            };
            item.check()?;
            items.push(item);
        }
    }
    Ok(items)
}

pub fn sort_items(items: &mut [QaItem]) {
    items.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Generates over many manifests in parallel; the result is sorted and
/// independent of the worker count.
pub fn generate_all(manifests: &[SceneManifest], seed: u64, s: &GenSettings) -> Result<Vec<QaItem>> {
    let violations = crate::interchange::validate_dataset(manifests);
    if !violations.is_empty() {
        return Err(Error::Invalid {
            what: "manifest set".into(),
            violations,
        });
    }
    let per_scene = manifests
        .par_iter()
        .map(|m| generate(m, seed, s))
        .collect::<Result<Vec<_>>>()?;
    let mut items: Vec<QaItem> = per_scene.into_iter().flatten().collect();
    sort_items(&mut items);
    Ok(items)
}

pub fn write_dataset(items: &[QaItem], path: impl AsRef<Path>) -> Result<()> {
    let mut sorted = items.to_vec();
    sort_items(&mut sorted);
    write_jsonl(&sorted, path)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<QaItem>> {
    let items: Vec<QaItem> = read_jsonl(path)?;
    for item in &items {
        item.check()?;
    }
    Ok(items)
}

#[cfg(test)]
mod tests;
