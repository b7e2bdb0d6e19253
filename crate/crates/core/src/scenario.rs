//! Scenario configuration, geometry, and UAV mobility.
//!
//! All positions are full 3-D Cartesian `(x, y, z)` in meters with `z` the
//! height above ground. The ground RIS array lies in the x–z plane, so link
//! directions are expressed through the two direction cosines along x and z.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

/// A point in 3-D space, serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Distance in the horizontal (x, y) plane.
    pub fn horizontal_distance(&self, other: &Position3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 3]> for Position3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Self { x, y, z }
    }
}

impl From<Position3> for [f64; 3] {
    fn from(p: Position3) -> Self {
        [p.x, p.y, p.z]
    }
}

/// Direction of a link.
///
/// `azimuth` is measured in the x–z plane from +x toward +z and `elevation`
/// from the +y axis (the ground array's normal), so that
/// `cos(az)·sin(el) = Δx/d` and `sin(az)·sin(el) = Δz/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkAngles {
    pub azimuth: f64,
    pub elevation: f64,
}

impl LinkAngles {
    /// The two direction cosines `(cos az · sin el, sin az · sin el)`.
    pub fn direction_cosines(&self) -> (f64, f64) {
        let s = self.elevation.sin();
        (self.azimuth.cos() * s, self.azimuth.sin() * s)
    }

    pub fn perturbed(&self, d_azimuth: f64, d_elevation: f64) -> Self {
        Self {
            azimuth: self.azimuth + d_azimuth,
            elevation: self.elevation + d_elevation,
        }
    }
}

/// Rician factors per link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicianFactors {
    #[serde(rename = "BU")]
    pub bu: f64,
    #[serde(rename = "UR")]
    pub ur: f64,
    #[serde(rename = "Rk")]
    pub rk: f64,
    #[serde(rename = "Uk")]
    pub uk: f64,
}

impl RicianFactors {
    pub const fn uniform(zeta: f64) -> Self {
        Self {
            bu: zeta,
            ur: zeta,
            rk: zeta,
            uk: zeta,
        }
    }
}

/// Jitter bounds ψ (radians) for the three links touching the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterBounds {
    #[serde(rename = "BU")]
    pub bu: f64,
    #[serde(rename = "UR")]
    pub ur: f64,
    #[serde(rename = "Uk")]
    pub uk: f64,
}

impl JitterBounds {
    pub const fn uniform(psi: f64) -> Self {
        Self {
            bu: psi,
            ur: psi,
            uk: psi,
        }
    }
}

/// How the per-slot reward aggregates node rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Minimum over nodes of the running time-averaged rate.
    #[default]
    RunningAverage,
    /// Minimum over nodes of this slot's rate.
    Instantaneous,
}

/// Full physical and episode parameterization.
///
/// JSON keys follow the symbols of the system model (`H_U`, `L`, `M`, `F1`,
/// ...). Powers may also be given in dBm through `<key>_dbm` variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub area_x: f64,
    pub area_y: f64,
    pub bs_pos: Position3,
    pub ris_pos: Position3,
    pub uav_start: Position3,
    pub uav_end: Position3,
    pub node_pos: Vec<Position3>,
    #[serde(rename = "H_U")]
    pub uav_altitude: f64,
    pub v_max: f64,
    pub slot_dt: f64,
    #[serde(rename = "L")]
    pub slots: usize,
    #[serde(rename = "M")]
    pub bs_antennas: usize,
    #[serde(rename = "F1")]
    pub flying_rows: usize,
    #[serde(rename = "F2")]
    pub flying_cols: usize,
    #[serde(rename = "N1")]
    pub ground_rows: usize,
    #[serde(rename = "N2")]
    pub ground_cols: usize,
    pub spacing_ratio: f64,
    pub rician: RicianFactors,
    pub beta_ref: f64,
    pub alpha_cascade: f64,
    pub eps_direct: f64,
    pub jitter_psi: JitterBounds,
    /// When set, each jittered link uses ψ = ratio · |nominal azimuth| of
    /// that link in the current slot instead of `jitter_psi`.
    pub jitter_ratio: Option<f64>,
    #[serde(rename = "P_dl")]
    pub p_dl: f64,
    #[serde(rename = "P_ul")]
    pub p_ul: f64,
    /// Peak transmit limits; loaded and validated but not used by the
    /// projection, which enforces `P_dl` / `P_ul`.
    #[serde(rename = "P_dl_max")]
    pub p_dl_max: f64,
    #[serde(rename = "P_ul_max")]
    pub p_ul_max: f64,
    pub sigma2: f64,
    pub dl_weight: f64,
    pub penalty: f64,
    pub reward_mode: RewardMode,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let start = Position3::new(80.0, 80.0, 100.0);
        Self {
            area_x: 800.0,
            area_y: 800.0,
            bs_pos: Position3::new(0.0, 0.0, 25.0),
            ris_pos: Position3::new(360.0, 200.0, 80.0),
            uav_start: start,
            uav_end: start,
            node_pos: vec![
                Position3::new(520.0, 320.0, 0.0),
                Position3::new(600.0, 480.0, 0.0),
                Position3::new(420.0, 560.0, 0.0),
                Position3::new(680.0, 640.0, 0.0),
            ],
            uav_altitude: 100.0,
            v_max: 20.0,
            slot_dt: 1.0,
            slots: 250,
            bs_antennas: 4,
            flying_rows: 6,
            flying_cols: 6,
            ground_rows: 8,
            ground_cols: 8,
            spacing_ratio: 0.25,
            rician: RicianFactors::uniform(5.0),
            beta_ref: 1e-3,
            alpha_cascade: 3.7,
            eps_direct: 2.7,
            jitter_psi: JitterBounds::uniform(0.0),
            jitter_ratio: None,
            p_dl: dbm_to_watts(40.0),
            p_ul: dbm_to_watts(40.0),
            p_dl_max: dbm_to_watts(20.0),
            p_ul_max: dbm_to_watts(20.0),
            sigma2: dbm_to_watts(-80.0),
            dl_weight: 1.0,
            penalty: -10.0,
            reward_mode: RewardMode::RunningAverage,
            seed: 0,
        }
    }
}

const DBM_KEYS: [&str; 5] = ["P_dl", "P_ul", "P_dl_max", "P_ul_max", "sigma2"];

impl ScenarioConfig {
    /// Number of IoT nodes `K`.
    pub fn num_nodes(&self) -> usize {
        self.node_pos.len()
    }

    /// Flying-RIS element count `F = F1·F2`.
    pub fn flying_elements(&self) -> usize {
        self.flying_rows * self.flying_cols
    }

    /// Ground-RIS element count `N = N1·N2`.
    pub fn ground_elements(&self) -> usize {
        self.ground_rows * self.ground_cols
    }

    /// Maximum horizontal hop per slot, `D = slot_dt · v_max`.
    pub fn max_hop(&self) -> f64 {
        self.slot_dt * self.v_max
    }

    pub fn in_area(&self, p: &Position3) -> bool {
        (0.0..=self.area_x).contains(&p.x) && (0.0..=self.area_y).contains(&p.y)
    }

    /// Parse a JSON document, converting `*_dbm` keys, filling defaults and
    /// validating.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = if text.trim().is_empty() {
            Value::Object(Map::new())
        } else {
            serde_json::from_str(text)?
        };
        Self::from_value(value)
    }

    pub fn from_value(mut value: Value) -> Result<Self> {
        if let Value::Object(map) = &mut value {
            convert_dbm_keys(map)?;
        }
        let cfg: ScenarioConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invariant(key, v, "must be finite and > 0"))
            }
        }
        fn nonneg(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invariant(key, v, "must be finite and >= 0"))
            }
        }
        fn at_least_one(key: &str, v: usize) -> Result<()> {
            if v >= 1 {
                Ok(())
            } else {
                Err(Error::invariant(key, v, "must be >= 1"))
            }
        }

        positive("area_x", self.area_x)?;
        positive("area_y", self.area_y)?;
        positive("H_U", self.uav_altitude)?;
        positive("v_max", self.v_max)?;
        positive("slot_dt", self.slot_dt)?;
        positive("spacing_ratio", self.spacing_ratio)?;
        positive("beta_ref", self.beta_ref)?;
        positive("alpha_cascade", self.alpha_cascade)?;
        positive("eps_direct", self.eps_direct)?;
        positive("P_dl", self.p_dl)?;
        positive("P_ul", self.p_ul)?;
        positive("P_dl_max", self.p_dl_max)?;
        positive("P_ul_max", self.p_ul_max)?;
        positive("sigma2", self.sigma2)?;
        at_least_one("L", self.slots)?;
        at_least_one("K", self.num_nodes())?;
        at_least_one("M", self.bs_antennas)?;
        at_least_one("F1", self.flying_rows)?;
        at_least_one("F2", self.flying_cols)?;
        at_least_one("N1", self.ground_rows)?;
        at_least_one("N2", self.ground_cols)?;

        for (key, zeta) in [
            ("rician.BU", self.rician.bu),
            ("rician.UR", self.rician.ur),
            ("rician.Rk", self.rician.rk),
            ("rician.Uk", self.rician.uk),
        ] {
            nonneg(key, zeta)?;
        }
        for (key, psi) in [
            ("jitter_psi.BU", self.jitter_psi.bu),
            ("jitter_psi.UR", self.jitter_psi.ur),
            ("jitter_psi.Uk", self.jitter_psi.uk),
        ] {
            nonneg(key, psi)?;
        }
        if let Some(ratio) = self.jitter_ratio {
            nonneg("jitter_ratio", ratio)?;
        }
        if !(0.0..=1.0).contains(&self.dl_weight) {
            return Err(Error::invariant(
                "dl_weight",
                self.dl_weight,
                "must lie in [0, 1]",
            ));
        }
        if !(self.penalty.is_finite() && self.penalty <= 0.0) {
            return Err(Error::invariant(
                "penalty",
                self.penalty,
                "must be finite and <= 0",
            ));
        }

        let mut points = vec![
            ("bs_pos", self.bs_pos),
            ("ris_pos", self.ris_pos),
            ("uav_start", self.uav_start),
            ("uav_end", self.uav_end),
        ];
        points.extend(self.node_pos.iter().map(|p| ("node_pos", *p)));
        for (key, p) in points {
            if !p.is_finite() {
                return Err(Error::invariant(key, format!("{p:?}"), "must be finite"));
            }
        }
        for (key, p) in [("uav_start", self.uav_start), ("uav_end", self.uav_end)] {
            if !self.in_area(&p) {
                return Err(Error::invariant(
                    key,
                    format!("{p:?}"),
                    "must lie inside the playable rectangle",
                ));
            }
            if (p.z - self.uav_altitude).abs() > 1e-9 {
                return Err(Error::invariant(key, p.z, "altitude must equal H_U"));
            }
        }
        Ok(())
    }
}

fn convert_dbm_keys(map: &mut Map<String, Value>) -> Result<()> {
    for key in DBM_KEYS {
        let dbm_key = format!("{key}_dbm");
        let Some(raw) = map.remove(&dbm_key) else {
            continue;
        };
        if map.contains_key(key) {
            return Err(Error::invariant(
                &dbm_key,
                &raw,
                "conflicts with a linear value for the same key",
            ));
        }
        let dbm = raw
            .as_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::invariant(&dbm_key, &raw, "must be a finite number"))?;
        map.insert(key.to_owned(), Value::from(dbm_to_watts(dbm)));
    }
    Ok(())
}

/// Convert dBm to watts: `10^((p − 30) / 10)`.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

/// Move the UAV horizontally for one slot.
///
/// Speed is clamped to `[0, v_max]`; altitude is left unchanged.
pub fn propose_move(pos: Position3, speed: f64, heading: f64, cfg: &ScenarioConfig) -> Position3 {
    let speed = if speed.is_nan() {
        0.0
    } else {
        speed.clamp(0.0, cfg.v_max)
    };
    let hop = speed * cfg.slot_dt;
    Position3 {
        x: pos.x + hop * heading.cos(),
        y: pos.y + hop * heading.sin(),
        z: pos.z,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MobilityViolation {
    /// Trajectory does not begin at `uav_start`.
    Start { distance: f64 },
    /// Hop between slot `slot` and `slot + 1` exceeds `D`.
    Step { slot: usize, distance: f64 },
    /// Final point is more than `D` away from `uav_end`.
    Terminal { distance: f64 },
}

/// Check a trajectory of `L + 1` points against the per-slot hop bound,
/// the fixed start, and the terminal-position constraint.
pub fn check_mobility(
    trajectory: &[Position3],
    cfg: &ScenarioConfig,
) -> Result<Vec<MobilityViolation>> {
    let expected = cfg.slots + 1;
    if trajectory.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: trajectory.len(),
        });
    }
    let d = cfg.max_hop();
    // Relative slack absorbs rounding in cos/sin-generated hops.
    let bound = d * d * (1.0 + 1e-12) + 1e-12;
    let mut violations = Vec::new();

    let start_dev = link_distance(&trajectory[0], &cfg.uav_start);
    if start_dev > 1e-9 {
        violations.push(MobilityViolation::Start {
            distance: start_dev,
        });
    }
    for (slot, pair) in trajectory.windows(2).enumerate() {
        let hop = pair[0].horizontal_distance(&pair[1]);
        if hop * hop > bound {
            violations.push(MobilityViolation::Step {
                slot,
                distance: hop,
            });
        }
    }
    let last = trajectory[cfg.slots];
    let end_dev = last.horizontal_distance(&cfg.uav_end);
    if end_dev * end_dev > bound {
        violations.push(MobilityViolation::Terminal { distance: end_dev });
    }
    Ok(violations)
}

/// Euclidean 3-D distance.
pub fn link_distance(a: &Position3, b: &Position3) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let dz = b.z - a.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Angles of the link from `from` toward `to`.
pub fn link_angles(from: &Position3, to: &Position3) -> Result<LinkAngles> {
    let d = link_distance(from, to);
    if d == 0.0 {
        return Err(Error::ZeroDistance);
    }
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    let dz = to.z - from.z;
    Ok(LinkAngles {
        azimuth: dz.atan2(dx),
        elevation: (dy / d).clamp(-1.0, 1.0).acos(),
    })
}

/// Map an angle into `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn empty_document_yields_table_defaults() {
        let cfg = ScenarioConfig::from_json("{}").unwrap();
        assert_eq!(cfg.flying_elements(), 36);
        assert_eq!(cfg.ground_elements(), 64);
        assert_eq!(cfg.v_max, 20.0);
        assert_eq!(cfg.uav_altitude, 100.0);
        assert_eq!(cfg.slots, 250);
        assert_eq!(cfg.spacing_ratio, 0.25);
        assert_eq!(cfg.rician, RicianFactors::uniform(5.0));
        assert_eq!(cfg, ScenarioConfig::from_json("").unwrap());
    }

    #[test]
    fn negative_speed_is_rejected() {
        let err = ScenarioConfig::from_json(r#"{"v_max": -1}"#).unwrap_err();
        assert!(err.to_string().contains("invariant violation"), "{err}");
        assert!(err.to_string().contains("v_max"), "{err}");
    }

    #[test]
    fn malformed_and_unknown_keys_fail() {
        assert!(matches!(
            ScenarioConfig::from_json("{not json"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"v_maxx": 3}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn dbm_variants_convert_on_load() {
        let cfg = ScenarioConfig::from_json(r#"{"P_dl_dbm": 30, "sigma2_dbm": -90}"#).unwrap();
        assert_relative_eq!(cfg.p_dl, 1.0, max_relative = 1e-12);
        assert_relative_eq!(cfg.sigma2, 1e-12, max_relative = 1e-12);
        assert!(ScenarioConfig::from_json(r#"{"P_dl_dbm": 30, "P_dl": 1}"#).is_err());
    }

    #[test]
    fn start_outside_area_rejected() {
        let err = ScenarioConfig::from_json(r#"{"uav_start": [900, 10, 100]}"#).unwrap_err();
        assert!(err.to_string().contains("uav_start"));
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn dbm_conversion() {
        assert_relative_eq!(dbm_to_watts(-80.0), 1e-11, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(0.0), 1e-3, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(40.0), 10.0, max_relative = 1e-12);
    }

    #[test]
    fn move_examples() {
        let cfg = ScenarioConfig::default();
        let p = Position3::new(80.0, 80.0, 100.0);
        let q = propose_move(p, 20.0, 0.0, &cfg);
        assert_eq!(q, Position3::new(100.0, 80.0, 100.0));
        let q = propose_move(p, 35.0, 1.0, &cfg);
        assert_relative_eq!(p.horizontal_distance(&q), 20.0, epsilon = 1e-12);
        assert_eq!(propose_move(p, 0.0, 2.0, &cfg), p);
    }

    #[test]
    fn mobility_checks() {
        let mut cfg = ScenarioConfig {
            slots: 3,
            ..ScenarioConfig::default()
        };
        let s = cfg.uav_start;
        assert!(check_mobility(&[s; 4], &cfg).unwrap().is_empty());

        let hop = Position3::new(s.x + 25.0, s.y, s.z);
        let v = check_mobility(&[s, s, hop, hop], &cfg).unwrap();
        // The 25 m hop also leaves the final point 25 m from the end.
        assert!(v.contains(&MobilityViolation::Step {
            slot: 1,
            distance: 25.0
        }));

        let mut tr = vec![s; 4];
        cfg.uav_end = Position3::new(s.x + 100.0, s.y, s.z);
        tr[3] = s;
        let v = check_mobility(&tr, &cfg).unwrap();
        assert_eq!(v, vec![MobilityViolation::Terminal { distance: 100.0 }]);

        assert!(matches!(
            check_mobility(&[s; 3], &cfg),
            Err(Error::LengthMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn distance_examples() {
        let o = Position3::default();
        assert_eq!(link_distance(&o, &o), 0.0);
        assert_eq!(link_distance(&o, &Position3::new(3.0, 4.0, 0.0)), 5.0);
        // Frozen from direct evaluation: sqrt(280² + 120² + 20²).
        let d = link_distance(
            &Position3::new(360.0, 200.0, 80.0),
            &Position3::new(80.0, 80.0, 100.0),
        );
        assert_relative_eq!(d, 305.286_750_449_474_94, epsilon = 1e-9);
    }

    #[test]
    fn angle_examples() {
        let o = Position3::new(0.0, 0.0, 10.0);
        let (cx, cz) = link_angles(&o, &Position3::new(5.0, 0.0, 10.0))
            .unwrap()
            .direction_cosines();
        assert_relative_eq!(cx, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cz, 0.0, epsilon = 1e-15);

        let (_, cz) = link_angles(&o, &Position3::new(0.0, 0.0, 0.0))
            .unwrap()
            .direction_cosines();
        assert_relative_eq!(cz.abs(), 1.0, epsilon = 1e-15);

        let u = Position3::new(80.0, 80.0, 100.0);
        let r = Position3::new(360.0, 200.0, 80.0);
        let (cx, cz) = link_angles(&u, &r).unwrap().direction_cosines();
        let d = link_distance(&u, &r);
        assert_relative_eq!(cx, (r.x - u.x) / d, epsilon = 1e-14);
        assert_relative_eq!(cz, (r.z - u.z) / d, epsilon = 1e-14);
        assert_eq!((cx * 1e4).round() / 1e4, 0.9172);

        assert!(matches!(link_angles(&u, &u), Err(Error::ZeroDistance)));
    }

    #[test]
    fn canonical_angle_range() {
        assert_eq!(canonical_angle(-1e-300), 0.0);
        assert_relative_eq!(canonical_angle(-std::f64::consts::PI), std::f64::consts::PI);
        assert_relative_eq!(canonical_angle(7.0), 7.0 - TAU, epsilon = 1e-15);
    }

    fn point() -> impl Strategy<Value = Position3> {
        (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y, z)| Position3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn move_respects_hop_bound(speed in -50.0..100.0f64, heading in -10.0..10.0f64) {
            let cfg = ScenarioConfig::default();
            let p = cfg.uav_start;
            let q = propose_move(p, speed, heading, &cfg);
            prop_assert!(p.horizontal_distance(&q) <= cfg.max_hop() + 1e-12);
            prop_assert_eq!(q.z, p.z);
        }

        #[test]
        fn triangle_inequality(a in point(), b in point(), c in point()) {
            prop_assert!(link_distance(&a, &c) <= link_distance(&a, &b) + link_distance(&b, &c) + 1e-9);
            prop_assert_eq!(link_distance(&a, &b), link_distance(&b, &a));
        }

        #[test]
        fn cosines_bounded(a in point(), b in point()) {
            prop_assume!(link_distance(&a, &b) > 1e-6);
            let (cx, cz) = link_angles(&a, &b).unwrap().direction_cosines();
            prop_assert!(cx * cx + cz * cz <= 1.0 + 1e-12);
        }

        #[test]
        fn generated_trajectories_are_feasible(
            moves in proptest::collection::vec((0.0..40.0f64, 0.0..7.0f64), 10)
        ) {
            let cfg = ScenarioConfig {
                slots: moves.len(),
                ..ScenarioConfig::default()
            };
            let mut tr = vec![cfg.uav_start];
            for (speed, heading) in &moves {
                let last = *tr.last().unwrap();
                tr.push(propose_move(last, *speed, *heading, &cfg));
            }
            let steps = check_mobility(&tr, &cfg).unwrap()
                .into_iter()
                .filter(|v| matches!(v, MobilityViolation::Step { .. }))
                .count();
            prop_assert_eq!(steps, 0);
        }
    }
}
