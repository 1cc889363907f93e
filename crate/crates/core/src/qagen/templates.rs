use crate::interchange::{Polarity, Task};

/// A question pattern. Placeholders: `[COLOR]` for single-object tasks,
/// `[COLOR_A]`/`[COLOR_B]` for pairs, `[START]`/`[END]` for windows and
/// `[DIRECTION]` for the queried hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QaTemplate {
    pub task: Task,
    /// Set on comparison templates that ask for the greater or the lesser.
    pub polarity: Option<Polarity>,
    /// Phrased over the object's whole track rather than an explicit window.
    pub whole: bool,
    pub pattern: &'static str,
}

const fn t(task: Task, polarity: Option<Polarity>, whole: bool, pattern: &'static str) -> QaTemplate {
    QaTemplate { task, polarity, whole, pattern }
}

use Polarity::{Greater, Less};
use Task::*;

pub const TEMPLATES: &[QaTemplate] = &[
    t(TraveledDistance, None, false, "Can you calculate the total distance the [COLOR] object traveled between [START] and [END] seconds?"),
    t(TraveledDistance, None, false, "How far does the [COLOR] object move from [START] to [END] seconds?"),
    t(TraveledDistance, None, false, "What distance does the [COLOR] object cover between [START] and [END] seconds?"),
    t(TraveledDistance, None, true, "Can you calculate the total distance the [COLOR] object traveled in the video?"),
    t(TraveledDistance, None, true, "How far does the [COLOR] object travel throughout the video?"),
    t(TraveledDistance, None, true, "What is the total distance covered by the [COLOR] object over the video?"),
    t(TravelingSpeed, None, false, "What is the average speed of the [COLOR] object between [START] and [END] seconds?"),
    t(TravelingSpeed, None, false, "How fast does the [COLOR] object move on average from [START] to [END] seconds?"),
    t(TravelingSpeed, None, false, "Estimate the average traveling speed of the [COLOR] object between [START] and [END] seconds."),
    t(TravelingSpeed, None, true, "Tell me the [COLOR] object's average speed throughout the video."),
    t(TravelingSpeed, None, true, "How fast does the [COLOR] object travel on average in the video?"),
    t(TravelingSpeed, None, true, "What is the average traveling speed of the [COLOR] object over the video?"),
    t(MovementDirection, None, true, "What direction does the [COLOR] object travel at the end of the video?"),
    t(MovementDirection, None, true, "Taking the initial heading of the [COLOR] object as 12 o'clock, in which clock direction is it moving at the end of the video?"),
    t(MovementDirection, None, true, "Relative to where it first moved, toward which o'clock is the [COLOR] object heading at the end of the video?"),
    t(DirectionTimestamp, None, true, "Describe the timestamp when the [COLOR] object moves in the [DIRECTION] o'clock direction."),
    t(DirectionTimestamp, None, true, "With its initial heading as 12 o'clock, when does the [COLOR] object travel toward [DIRECTION] o'clock?"),
    t(DirectionTimestamp, None, true, "During which seconds is the [COLOR] object moving in the [DIRECTION] o'clock direction?"),
    t(DistanceComparison, Some(Greater), false, "Which object travels a greater distance between [START] and [END] seconds, the [COLOR_A] one or the [COLOR_B] one?"),
    t(DistanceComparison, Some(Greater), false, "Between the [COLOR_A] and [COLOR_B] objects, which one covers more distance from [START] to [END] seconds?"),
    t(DistanceComparison, Some(Greater), false, "Does the [COLOR_A] object or the [COLOR_B] object travel farther between [START] and [END] seconds?"),
    t(DistanceComparison, Some(Less), false, "Which object travels a shorter distance between [START] and [END] seconds, the [COLOR_A] one or the [COLOR_B] one?"),
    t(DistanceComparison, Some(Less), false, "Between the [COLOR_A] and [COLOR_B] objects, which one covers less distance from [START] to [END] seconds?"),
    t(DistanceComparison, Some(Less), false, "Does the [COLOR_A] object or the [COLOR_B] object travel less between [START] and [END] seconds?"),
    t(SpeedComparison, Some(Greater), false, "Which object moves faster between [START] and [END] seconds, the [COLOR_A] one or the [COLOR_B] one?"),
    t(SpeedComparison, Some(Greater), false, "Between the [COLOR_A] and [COLOR_B] objects, which one has the higher average speed from [START] to [END] seconds?"),
    t(SpeedComparison, Some(Greater), false, "Is the [COLOR_A] object or the [COLOR_B] object quicker between [START] and [END] seconds?"),
    t(SpeedComparison, Some(Less), false, "Which object moves slower between [START] and [END] seconds, the [COLOR_A] one or the [COLOR_B] one?"),
    t(SpeedComparison, Some(Less), false, "Between the [COLOR_A] and [COLOR_B] objects, which one has the lower average speed from [START] to [END] seconds?"),
    t(SpeedComparison, Some(Less), false, "Is the [COLOR_A] object or the [COLOR_B] object slower between [START] and [END] seconds?"),
    t(DirectionComparison, None, false, "Is the [COLOR_A] object moving in the same direction as the [COLOR_B] object between [START] and [END] seconds?"),
    t(DirectionComparison, None, false, "Between [START] and [END] seconds, do the [COLOR_A] and [COLOR_B] objects head the same way?"),
    t(DirectionComparison, None, false, "Do the [COLOR_A] object and the [COLOR_B] object travel in the same direction from [START] to [END] seconds?"),
];

/// Templates usable for a task with the given polarity and window kind.
pub fn templates_for(task: Task, polarity: Option<Polarity>, whole: bool) -> Vec<&'static QaTemplate> {
    TEMPLATES
        .iter()
        .filter(|t| t.task == task && t.polarity == polarity && t.whole == whole)
        .collect()
}

/// Placeholders a template of this task must use, and no others.
pub fn required_placeholders(task: Task, whole: bool) -> &'static [&'static str] {
    match (task, whole) {
        (TraveledDistance | TravelingSpeed, false) => &["[COLOR]", "[START]", "[END]"],
        (TraveledDistance | TravelingSpeed | MovementDirection, true) => &["[COLOR]"],
        (DirectionTimestamp, _) => &["[COLOR]", "[DIRECTION]"],
        (DistanceComparison | SpeedComparison | DirectionComparison, _) => {
            &["[COLOR_A]", "[COLOR_B]", "[START]", "[END]"]
        }
        (MovementDirection, false) => &["[COLOR]"],
    }
}

pub const ALL_PLACEHOLDERS: [&str; 6] = ["[COLOR]", "[COLOR_A]", "[COLOR_B]", "[START]", "[END]", "[DIRECTION]"];
