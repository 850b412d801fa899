//! Selection quality reports with a frozen JSON shape.
//!
//! Reports are the CLI's interchange format, so the serialization is strict
//! both ways: fixed key order and pretty-printing on the way out (equal
//! reports produce byte-identical files), unknown fields, missing fields,
//! and inconsistent contents rejected on the way in. The achieved ratio may
//! be infinite (a vanishing baseline with a non-vanishing residual), which
//! JSON cannot spell; it travels as `null`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// JSON Schema (draft-07) for the report format.
pub const SELECTION_REPORT_SCHEMA: &str = r#"{
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "SelectionReport",
  "type": "object",
  "required": [
    "method", "seed", "r", "k", "chosen",
    "residual_trace", "rank_k_error", "achieved_ratio",
    "bound", "bound_satisfied"
  ],
  "additionalProperties": false,
  "properties": {
    "method": { "type": "string", "enum": ["greedy", "volume", "manual"] },
    "seed": { "type": ["integer", "null"], "minimum": 0 },
    "r": { "type": "integer", "minimum": 1 },
    "k": { "type": "integer", "minimum": 1 },
    "chosen": {
      "type": "array",
      "items": { "type": "integer", "minimum": 0 },
      "uniqueItems": true
    },
    "residual_trace": { "type": "number", "minimum": 0 },
    "rank_k_error": { "type": "number", "minimum": 0 },
    "achieved_ratio": { "type": ["number", "null"], "minimum": 0 },
    "bound": { "type": "number", "minimum": 1 },
    "bound_satisfied": { "type": "boolean" },
    "wall_time_ms": { "type": "number", "minimum": 0 }
  }
}
"#;

/// How a selection fared against the best rank-k baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionReport {
    /// "greedy", "volume", or "manual".
    pub method: String,
    /// Sampling seed for randomized methods, null for deterministic ones.
    pub seed: Option<u64>,
    pub r: usize,
    pub k: usize,
    pub chosen: Vec<usize>,
    pub residual_trace: f64,
    pub rank_k_error: f64,
    /// residual_trace / rank_k_error; +inf (JSON null) when the baseline
    /// vanishes but the residual does not.
    #[serde(with = "ratio_as_nullable")]
    pub achieved_ratio: f64,
    pub bound: f64,
    pub bound_satisfied: bool,
    /// Timing is not part of the canonical report; when present it is
    /// advisory only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

mod ratio_as_nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            ser.serialize_f64(*value)
        } else {
            ser.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(de)?.unwrap_or(f64::INFINITY))
    }
}

impl SelectionReport {
    /// Canonical serialization: pretty JSON, declaration key order, trailing
    /// newline. Equal reports produce byte-identical output.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    /// Strict parse: structural violations and internal inconsistencies are
    /// both schema errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: SelectionReport =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.method.as_str(), "greedy" | "volume" | "manual") {
            return Err(Error::Schema(format!("unknown method \"{}\"", self.method)));
        }
        if self.r == 0 {
            return Err(Error::Schema("r must be at least 1".into()));
        }
        if self.k == 0 || self.k > self.r {
            return Err(Error::Schema(format!(
                "k must satisfy 1 <= k <= r, got k = {}, r = {}",
                self.k, self.r
            )));
        }
        if self.chosen.len() != self.r {
            return Err(Error::Schema(format!(
                "chosen has {} indices but r = {}",
                self.chosen.len(),
                self.r
            )));
        }
        if self.chosen.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Schema(
                "chosen indices must be strictly increasing".into(),
            ));
        }
        for (name, v) in [
            ("residual_trace", self.residual_trace),
            ("rank_k_error", self.rank_k_error),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Schema(format!(
                    "{name} must be a finite nonnegative number"
                )));
            }
        }
        if !(self.achieved_ratio >= 0.0) {
            return Err(Error::Schema("achieved_ratio must be nonnegative".into()));
        }
        if !(self.bound >= 1.0) || !self.bound.is_finite() {
            return Err(Error::Schema(
                "bound must be a finite number at least 1".into(),
            ));
        }
        if let Some(ms) = self.wall_time_ms {
            if !(ms >= 0.0) || !ms.is_finite() {
                return Err(Error::Schema(
                    "wall_time_ms must be finite and nonnegative".into(),
                ));
            }
        }
        Ok(())
    }
}
