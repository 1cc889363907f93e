use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::manifest::string_enum;
use crate::error::{Error, Result, Violation};

string_enum!(
    /// The seven kinematic question families.
    Task {
        TraveledDistance => "traveled_distance",
        TravelingSpeed => "traveling_speed",
        MovementDirection => "movement_direction",
        DirectionTimestamp => "direction_timestamp",
        DistanceComparison => "distance_comparison",
        SpeedComparison => "speed_comparison",
        DirectionComparison => "direction_comparison",
    }
);

impl Task {
    pub fn short(self) -> &'static str {
        match self {
            Task::TraveledDistance => "dist",
            Task::TravelingSpeed => "speed",
            Task::MovementDirection => "dir",
            Task::DirectionTimestamp => "dirts",
            Task::DistanceComparison => "distcmp",
            Task::SpeedComparison => "speedcmp",
            Task::DirectionComparison => "dircmp",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Task::TraveledDistance => "Traveled Distance",
            Task::TravelingSpeed => "Traveling Speed",
            Task::MovementDirection => "Movement Direction",
            Task::DirectionTimestamp => "Direction Timestamp",
            Task::DistanceComparison => "Distance Comparison",
            Task::SpeedComparison => "Speed Comparison",
            Task::DirectionComparison => "Direction Comparison",
        }
    }

    pub fn is_direction(self) -> bool {
        matches!(
            self,
            Task::MovementDirection | Task::DirectionTimestamp | Task::DirectionComparison
        )
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            Task::DistanceComparison | Task::SpeedComparison | Task::DirectionComparison
        )
    }
}

string_enum!(
    /// Bounding-box overlay palette, in assignment order.
    Color {
        Red => "red",
        Green => "green",
        Blue => "blue",
        Yellow => "yellow",
        Magenta => "magenta",
        Cyan => "cyan",
    }
);

impl Color {
    pub fn rgb(self) -> [u8; 3] {
        match self {
            Color::Red => [255, 0, 0],
            Color::Green => [0, 255, 0],
            Color::Blue => [0, 0, 255],
            Color::Yellow => [255, 255, 0],
            Color::Magenta => [255, 0, 255],
            Color::Cyan => [0, 255, 255],
        }
    }
}

/// Ground-truth answer in the unit the task is scored in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Meters(f64),
    Kmh(f64),
    Clock(u8),
    Interval([f64; 2]),
    Choice(Color),
    Boolean(bool),
}

impl Answer {
    pub fn matches_task(&self, task: Task) -> bool {
        matches!(
            (task, self),
            (Task::TraveledDistance, Answer::Meters(_))
                | (Task::TravelingSpeed, Answer::Kmh(_))
                | (Task::MovementDirection, Answer::Clock(_))
                | (Task::DirectionTimestamp, Answer::Interval(_))
                | (Task::DistanceComparison, Answer::Choice(_))
                | (Task::SpeedComparison, Answer::Choice(_))
                | (Task::DirectionComparison, Answer::Boolean(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// "farther" / "faster"
    Greater,
    /// "shorter" / "slower"
    Less,
}

/// Everything needed to recompute the answer from the manifest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QaParams {
    /// Queried objects; comparisons list object A then object B.
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hour: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaItem {
    pub qa_id: String,
    pub scene_id: String,
    pub task: Task,
    pub question: String,
    pub answer_text: String,
    pub answer_typed: Answer,
    pub object_colors: BTreeMap<String, Color>,
    pub frame_timestamps: Vec<f64>,
    pub duration: f64,
    pub params: QaParams,
}

impl QaItem {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let at = |f: &str| format!("{}.{f}", self.qa_id);
        if !self.answer_typed.matches_task(self.task) {
            out.push(Violation::new(
                at("answer_typed"),
                format!("{:?} does not fit task {}", self.answer_typed, self.task),
            ));
        }
        match self.answer_typed {
            Answer::Interval([s, e]) if !(0.0 <= s && s < e && e <= self.duration) => {
                out.push(Violation::new(
                    at("answer_typed"),
                    format!("interval ({s}, {e}) must satisfy 0 <= start < end <= {}", self.duration),
                ));
            }
            Answer::Clock(h) if !(1..=12).contains(&h) => {
                out.push(Violation::new(at("answer_typed"), format!("clock hour {h} outside 1..12")));
            }
            Answer::Meters(x) | Answer::Kmh(x) if !(x.is_finite() && x >= 0.0) => {
                out.push(Violation::new(at("answer_typed"), format!("invalid magnitude {x}")));
            }
            _ => {}
        }
        let colors: std::collections::HashSet<_> = self.object_colors.values().collect();
        if colors.len() != self.object_colors.len() {
            out.push(Violation::new(at("object_colors"), "colors must be distinct"));
        }
        for id in &self.params.objects {
            if !self.object_colors.contains_key(id) {
                out.push(Violation::new(at("params.objects"), format!("{id} has no color")));
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid {
                what: format!("qa item {}", self.qa_id),
                violations,
            })
        }
    }

    /// Color of object A or B in a comparison.
    pub fn color_of_slot(&self, slot: usize) -> Option<Color> {
        self.params
            .objects
            .get(slot)
            .and_then(|id| self.object_colors.get(id))
            .copied()
    }

    pub fn sort_key(&self) -> (&str, Task, &str) {
        (&self.scene_id, self.task, &self.qa_id)
    }
}
