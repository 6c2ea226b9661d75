//! Vessel configuration files, duration parsing and content hashing.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{
    ConditionLabel, DisplacementCondition, LoadedVessel, ModelOptions, VesselGeometry,
};
use crate::{Error, Result};

/// Geometry, modelling options and per-condition overrides.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselConfig {
    pub geometry: VesselGeometry,
    pub model: ModelOptions,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<DisplacementCondition>,
}

impl VesselConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| toml_error(&e, text))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        for label in ConditionLabel::ALL {
            if self.conditions.iter().filter(|c| c.label == label).count() > 1 {
                return Err(Error::Config(format!("condition {label} defined twice")));
            }
        }
        for c in &self.conditions {
            c.validate()?;
        }
        Ok(())
    }

    /// The configured condition, or the built-in preset.
    pub fn condition(&self, label: ConditionLabel) -> DisplacementCondition {
        self.conditions
            .iter()
            .find(|c| c.label == label)
            .copied()
            .unwrap_or_else(|| DisplacementCondition::preset(label))
    }

    pub fn vessel(&self, label: ConditionLabel) -> Result<LoadedVessel> {
        LoadedVessel::new(self.geometry, self.condition(label), self.model)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        sha256_hex(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn toml_error(e: &toml::de::Error, text: &str) -> Error {
    let line = e
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0);
    Error::Parse {
        line,
        message: e.message().to_string(),
    }
}

/// Parse a duration in seconds: a plain number or an ISO 8601 time span such
/// as `PT90S`, `PT1M30S` or `PT0.5S`.
pub fn parse_duration(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::Config(format!("invalid duration '{text}'"));
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let upper = s.to_ascii_uppercase();
    let rest = upper.strip_prefix("PT").ok_or_else(bad)?;
    if rest.is_empty() {
        return Err(bad());
    }
    let mut total = 0.0;
    let mut number = String::new();
    let mut last_unit = 0;
    for ch in rest.chars() {
        let (rank, scale) = match ch {
            'H' => (1, 3600.0),
            'M' => (2, 60.0),
            'S' => (3, 1.0),
            c if c.is_ascii_digit() || c == '.' => {
                number.push(c);
                continue;
            }
            _ => return Err(bad()),
        };
        if rank <= last_unit || number.is_empty() {
            return Err(bad());
        }
        total += number.parse::<f64>().map_err(|_| bad())? * scale;
        number.clear();
        last_unit = rank;
    }
    if !number.is_empty() {
        return Err(bad());
    }
    Ok(total)
}

/// Serde adapter accepting a number of seconds or an ISO duration string.
pub mod duration {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(s) => parse_duration(&s).map_err(serde::de::Error::custom),
        }
    }

    pub fn serialize<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(*v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn durations() {
        assert_eq!(parse_duration("PT60S").unwrap(), 60.0);
        assert_eq!(parse_duration("pt1m30s").unwrap(), 90.0);
        assert_eq!(parse_duration("PT0.5S").unwrap(), 0.5);
        assert_eq!(parse_duration("PT1H").unwrap(), 3600.0);
        assert_eq!(parse_duration("12.5").unwrap(), 12.5);
        for bad in ["", "PT", "60S", "PT5S3M", "PTS", "PT1X", "PT5"] {
            assert!(parse_duration(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_config_is_default() {
        let cfg = VesselConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, VesselConfig::default());
        assert_eq!(cfg.condition(ConditionLabel::Full).mass, 246.0);
    }

    #[test]
    fn condition_override() {
        let text = r#"
[geometry]
length_overall = 4.29
waterline_length = 3.21
hull_separation = 1.83
beam_overall = 2.2
hull_beam = 0.37
draft = 0.105
reference_mass = 220.0
waterplane_area = 1.1
lcg = 1.27
water_density = 1025.0

[[conditions]]
label = "full"
mass = 250.0
surge_drag = { linear = 47.0, quadratic = -2.5 }
"#;
        let cfg = VesselConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.condition(ConditionLabel::Full).mass, 250.0);
        assert_eq!(cfg.condition(ConditionLabel::Lightship).mass, 220.0);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = VesselConfig::from_toml_str("[model]\n\nbogus = 1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_geometry_rejected() {
        let mut cfg = VesselConfig::default();
        cfg.geometry.hull_separation = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn hash_changes_with_content() {
        let a = VesselConfig::default();
        let mut b = a.clone();
        b.model.coriolis_divisor = 100.0;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), VesselConfig::default().hash());
        assert_eq!(a.hash().len(), 64);
    }
}
