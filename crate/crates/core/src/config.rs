//! Run configuration: every threshold, bucket width and seed in one JSON
//! document. Missing fields take their defaults.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::BenchConfig;
use crate::error::{Error, Result, Violation};
use crate::geometry::ScaleConfig;
use crate::pseudolabel::{GateConfig, PipelineConfig};
use crate::qagen::{GenSettings, QaConfig};
use crate::trajectory::{CompareConfig, KinematicsConfig, SmoothConfig, SpeedCaps};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub kinematics: KinematicsConfig,
    pub smoothing: SmoothConfig,
    pub speed_caps: SpeedCaps,
    pub compare: CompareConfig,
    pub gates: GateConfig,
    pub scale: ScaleConfig,
    pub qagen: QaConfig,
    pub bench: BenchConfig,
}

fn positive(out: &mut Vec<Violation>, path: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        out.push(Violation::new(path, format!("must be a positive number, got {x}")));
    }
}

fn at_least_one(out: &mut Vec<Violation>, path: &str, n: usize) {
    if n == 0 {
        out.push(Violation::new(path, "must be at least 1"));
    }
}

impl Config {
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let k = &self.kinematics;
        positive(&mut v, "kinematics.grid_step", k.grid_step);
        positive(&mut v, "kinematics.coverage_tolerance", k.coverage_tolerance);
        positive(&mut v, "kinematics.epsilon_move", k.epsilon_move);
        for (name, w) in [("median_window", self.smoothing.median_window), ("mean_window", self.smoothing.mean_window)] {
            if w % 2 == 0 {
                v.push(Violation::new(format!("smoothing.{name}"), format!("must be odd, got {w}")));
            }
        }
        for (class, cap) in &self.speed_caps.0 {
            positive(&mut v, &format!("speed_caps.{class}"), *cap);
        }
        let c = &self.compare;
        if !(c.ratio_margin >= 1.0 && c.ratio_margin.is_finite()) {
            v.push(Violation::new("compare.ratio_margin", format!("must be >= 1, got {}", c.ratio_margin)));
        }
        positive(&mut v, "compare.same_max_deg", c.same_max_deg);
        positive(&mut v, "compare.different_min_deg", c.different_min_deg);
        if !(c.same_max_deg <= c.different_min_deg && c.different_min_deg <= 180.0) {
            v.push(Violation::new(
                "compare.different_min_deg",
                format!(
                    "must satisfy same_max_deg ({}) <= different_min_deg ({}) <= 180",
                    c.same_max_deg, c.different_min_deg
                ),
            ));
        }
        let g = &self.gates;
        if !(g.min_confidence > 0.0 && g.min_confidence <= 1.0) {
            v.push(Violation::new("gates.min_confidence", format!("must be in (0, 1], got {}", g.min_confidence)));
        }
        positive(&mut v, "gates.min_box_area_fraction", g.min_box_area_fraction);
        at_least_one(&mut v, "gates.min_track_samples", g.min_track_samples);
        at_least_one(&mut v, "scale.stride", self.scale.stride);
        at_least_one(&mut v, "scale.min_valid_pixels", self.scale.min_valid_pixels);
        positive(&mut v, "qagen.min_distance", self.qagen.min_distance);
        positive(&mut v, "qagen.min_window", self.qagen.min_window);
        if self.qagen.tasks.is_empty() {
            v.push(Violation::new("qagen.tasks", "must name at least one task"));
        }
        let b = &self.bench;
        positive(&mut v, "bench.distance_bin", b.distance_bin);
        positive(&mut v, "bench.distance_max", b.distance_max);
        positive(&mut v, "bench.speed_bin", b.speed_bin);
        positive(&mut v, "bench.interval_bin", b.interval_bin);
        at_least_one(&mut v, "bench.quota", b.quota);
        at_least_one(&mut v, "bench.min_cap", b.min_cap);
        if let Some(cap) = b.cap {
            at_least_one(&mut v, "bench.cap", cap);
        }
        if b.tasks.is_empty() {
            v.push(Violation::new("bench.tasks", "must name at least one task"));
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid {
                what: "config".into(),
                violations,
            })
        }
    }

    pub fn from_json_str(text: &str, what: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Invalid {
                what: what.to_string(),
                violations: vec![Violation::new(path, e.into_inner().to_string())],
            }
        })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable config");
        s.push('\n');
        s
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            scale: self.scale,
            gates: self.gates,
            kinematics: self.kinematics,
            smoothing: self.smoothing,
            speed_caps: self.speed_caps.clone(),
        }
    }

    pub fn gen_settings(&self) -> GenSettings {
        GenSettings {
            qa: self.qagen.clone(),
            kinematics: self.kinematics,
            compare: self.compare,
        }
    }
}
