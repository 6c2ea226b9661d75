use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Principal hull dimensions and mass-independent properties of the vessel.
///
/// The draft is the mid-length draft measured at `reference_mass`; drafts at
/// other displacements follow from the waterplane area (see [`VesselGeometry::draft_for`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselGeometry {
    /// L, m
    pub length_overall: f64,
    /// LWL, m
    pub waterline_length: f64,
    /// B, centerline-to-centerline side hull separation, m
    pub hull_separation: f64,
    /// BOA, m
    pub beam_overall: f64,
    /// B_hull, beam of one pontoon hull, m
    pub hull_beam: f64,
    /// T at `reference_mass`, m
    pub draft: f64,
    /// Displacement at which `draft` was measured, kg
    pub reference_mass: f64,
    /// A_WP, m^2
    pub waterplane_area: f64,
    /// LCG measured from the aft plane, m
    pub lcg: f64,
    /// I_z, kg m^2. Estimated from the loaded mass when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yaw_inertia: Option<f64>,
    /// rho, kg/m^3
    pub water_density: f64,
}

impl VesselGeometry {
    /// The WAM-V 14 ft twin-hull vehicle.
    pub fn wam_v14() -> Self {
        Self {
            length_overall: 4.29,
            waterline_length: 3.21,
            hull_separation: 1.83,
            beam_overall: 2.20,
            hull_beam: 2.20 - 1.83,
            draft: 0.105,
            reference_mass: 220.0,
            waterplane_area: 1.1,
            lcg: 1.27,
            yaw_inertia: None,
            water_density: 1025.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let positive = [
            ("length_overall", self.length_overall),
            ("waterline_length", self.waterline_length),
            ("hull_separation", self.hull_separation),
            ("beam_overall", self.beam_overall),
            ("hull_beam", self.hull_beam),
            ("draft", self.draft),
            ("reference_mass", self.reference_mass),
            ("waterplane_area", self.waterplane_area),
            ("water_density", self.water_density),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                problems.push(format!("{name} must be positive, got {value}"));
            }
        }
        if !(self.lcg > 0.0 && self.lcg < self.length_overall) {
            problems.push(format!(
                "lcg must lie in (0, {}), got {}",
                self.length_overall, self.lcg
            ));
        }
        if let Some(iz) = self.yaw_inertia {
            if !(iz.is_finite() && iz > 0.0) {
                problems.push(format!("yaw_inertia must be positive, got {iz}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(problems.join("; ")))
        }
    }

    /// Draft at displacement `mass`, from the change in displaced volume
    /// spread over the waterplane area.
    pub fn draft_for(&self, mass: f64) -> f64 {
        self.draft + (mass - self.reference_mass) / (self.water_density * self.waterplane_area)
    }

    /// Yaw inertia at displacement `mass`; a uniform rectangular plate of
    /// L x BOA unless configured explicitly.
    pub fn yaw_inertia_for(&self, mass: f64) -> f64 {
        self.yaw_inertia.unwrap_or_else(|| {
            mass * (self.length_overall.powi(2) + self.beam_overall.powi(2)) / 12.0
        })
    }
}

impl Default for VesselGeometry {
    fn default() -> Self {
        Self::wam_v14()
    }
}

/// Named loading conditions of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionLabel {
    Slick,
    Lightship,
    Full,
}

impl ConditionLabel {
    pub const ALL: [ConditionLabel; 3] = [Self::Slick, Self::Lightship, Self::Full];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Slick => "slick",
            Self::Lightship => "lightship",
            Self::Full => "full",
        }
    }
}

impl fmt::Display for ConditionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "slick" => Ok(Self::Slick),
            "lightship" => Ok(Self::Lightship),
            "full" | "full_displacement" | "full-displacement" => Ok(Self::Full),
            other => Err(Error::InvalidCondition(format!(
                "unknown condition '{other}'"
            ))),
        }
    }
}

/// Surge resistance D(u) = X_u u + X_u|u| u|u|, tabulated with X_u > 0 and X_u|u| < 0.
///
/// The value is a resistive force magnitude that always opposes surge
/// motion. Past `cap_speed` the fitted quadratic is continued linearly with
/// slope X_u so that the curve stays monotone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeDrag {
    /// X_u, N/(m/s)
    pub linear: f64,
    /// X_u|u|, N/(m/s)^2
    pub quadratic: f64,
    /// Validity cap of the quadratic fit, m/s
    #[serde(default = "SurgeDrag::default_cap")]
    pub cap_speed: f64,
}

impl SurgeDrag {
    pub const DEFAULT_CAP: f64 = 3.2;

    fn default_cap() -> f64 {
        Self::DEFAULT_CAP
    }

    pub fn new(linear: f64, quadratic: f64) -> Self {
        Self {
            linear,
            quadratic,
            cap_speed: Self::DEFAULT_CAP,
        }
    }

    /// Speed at which the fitted quadratic peaks (infinite if it never turns over).
    pub fn peak_speed(&self) -> f64 {
        if self.quadratic < 0.0 {
            self.linear / (2.0 * self.quadratic.abs())
        } else {
            f64::INFINITY
        }
    }

    fn effective_cap(&self) -> f64 {
        self.cap_speed.min(self.peak_speed())
    }

    fn magnitude(&self, speed: f64) -> f64 {
        let cap = self.effective_cap();
        if speed <= cap {
            self.linear * speed + self.quadratic * speed * speed
        } else {
            self.linear * cap + self.quadratic * cap * cap + self.linear * (speed - cap)
        }
    }

    /// Signed resistive force; same sign as `u`, applied against the motion.
    pub fn force(&self, u: f64) -> f64 {
        u.signum() * self.magnitude(u.abs())
    }

    /// dD/du, used by the root-solve oracle and linearizations.
    pub fn slope(&self, u: f64) -> f64 {
        let s = u.abs();
        if s <= self.effective_cap() {
            self.linear + 2.0 * self.quadratic * s
        } else {
            self.linear
        }
    }
}

/// A loading condition: displacement plus the surge drag identified for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementCondition {
    pub label: ConditionLabel,
    /// kg
    pub mass: f64,
    pub surge_drag: SurgeDrag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draft_override: Option<f64>,
    /// Observed full-throttle top speed, m/s; anchors the pump-analog thruster.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_speed: Option<f64>,
}

impl DisplacementCondition {
    pub fn slick() -> Self {
        Self {
            label: ConditionLabel::Slick,
            mass: 150.0,
            surge_drag: SurgeDrag::new(50.897, -5.8722),
            draft_override: None,
            top_speed: None,
        }
    }

    pub fn lightship() -> Self {
        Self {
            label: ConditionLabel::Lightship,
            mass: 220.0,
            surge_drag: SurgeDrag::new(55.771, -6.9627),
            draft_override: None,
            top_speed: Some(2.8),
        }
    }

    pub fn full() -> Self {
        Self {
            label: ConditionLabel::Full,
            mass: 246.0,
            surge_drag: SurgeDrag::new(47.341, -2.6693),
            draft_override: None,
            top_speed: Some(2.5),
        }
    }

    pub fn preset(label: ConditionLabel) -> Self {
        match label {
            ConditionLabel::Slick => Self::slick(),
            ConditionLabel::Lightship => Self::lightship(),
            ConditionLabel::Full => Self::full(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.mass.is_finite() && self.mass > 0.0) {
            problems.push(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.surge_drag.linear.is_finite() && self.surge_drag.linear > 0.0) {
            problems.push(format!(
                "X_u must be positive, got {}",
                self.surge_drag.linear
            ));
        }
        if !self.surge_drag.quadratic.is_finite() {
            problems.push("X_u|u| must be finite".to_string());
        }
        if !(self.surge_drag.cap_speed > 0.0) {
            problems.push("drag cap speed must be positive".to_string());
        }
        if let Some(t) = self.draft_override {
            if !(t > 0.0) {
                problems.push(format!("draft override must be positive, got {t}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidCondition(format!(
                "{}: {}",
                self.label,
                problems.join("; ")
            )))
        }
    }

    /// Draft used for the coefficient formulas.
    pub fn draft(&self, geometry: &VesselGeometry) -> f64 {
        self.draft_override
            .unwrap_or_else(|| geometry.draft_for(self.mass))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_tabulated_masses() {
        assert_eq!(DisplacementCondition::slick().mass, 150.0);
        assert_eq!(DisplacementCondition::lightship().mass, 220.0);
        assert_eq!(DisplacementCondition::full().mass, 246.0);
        for label in ConditionLabel::ALL {
            let c = DisplacementCondition::preset(label);
            assert!(c.surge_drag.linear > 0.0 && c.surge_drag.quadratic < 0.0);
            c.validate().unwrap();
        }
    }

    #[test]
    fn lightship_drag_at_top_speed() {
        let d = DisplacementCondition::lightship().surge_drag;
        let expected = 55.771 * 2.8 - 6.9627 * 2.8 * 2.8;
        assert!((d.force(2.8) - expected).abs() < 1e-12);
        assert!((d.force(2.8) - 101.6).abs() < 0.1);
        assert_eq!(d.force(0.0), 0.0);
    }

    #[test]
    fn full_drag_at_top_speed() {
        let d = DisplacementCondition::full().surge_drag;
        assert!((d.force(2.5) - (47.341 * 2.5 - 2.6693 * 6.25)).abs() < 1e-12);
        assert!((d.force(2.5) - 101.7).abs() < 0.1);
    }

    #[test]
    fn drag_is_odd_and_monotone_past_cap() {
        let d = DisplacementCondition::lightship().surge_drag;
        let mut prev = d.force(0.0);
        for i in 1..=800 {
            let u = i as f64 * 0.01;
            let f = d.force(u);
            assert!(f > prev, "drag not increasing at u = {u}");
            assert_eq!(d.force(-u), -f);
            prev = f;
        }
        let cap = d.cap_speed;
        let at_cap = d.force(cap);
        assert!((d.force(cap + 1.0) - at_cap - d.linear).abs() < 1e-9);
    }

    #[test]
    fn lightship_peak_speed() {
        let d = DisplacementCondition::lightship().surge_drag;
        assert!((d.peak_speed() - 4.005).abs() < 1e-3);
    }

    #[test]
    fn drafts_follow_waterplane_area() {
        let g = VesselGeometry::wam_v14();
        assert_eq!(DisplacementCondition::lightship().draft(&g), 0.105);
        let full = DisplacementCondition::full().draft(&g);
        assert!((full - (0.105 + 26.0 / (1025.0 * 1.1))).abs() < 1e-15);
        let slick = DisplacementCondition::slick().draft(&g);
        assert!(slick > 0.0 && slick < 0.105);
    }

    #[test]
    fn geometry_validation() {
        VesselGeometry::wam_v14().validate().unwrap();
        let mut g = VesselGeometry::wam_v14();
        g.lcg = 5.0;
        g.draft = 0.0;
        let err = g.validate().unwrap_err().to_string();
        assert!(err.contains("lcg") && err.contains("draft"));
    }

    #[test]
    fn condition_label_parse() {
        assert_eq!(
            "Full".parse::<ConditionLabel>().unwrap(),
            ConditionLabel::Full
        );
        assert!("heavy".parse::<ConditionLabel>().is_err());
    }
}
