//! Batch evaluation over seeds and one-key parameter sweeps.
//!
//! Every value of a sweep reuses the same episode seeds, so the per-seed
//! results are paired and can be compared with paired tests.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use super::policy::{make_policy, PolicyKind};
use crate::env::{run_episode, EpisodeTrace};
use crate::scenario::ScenarioConfig;
use crate::stats::{mean, paired_t_test, std_dev, PairedTest, Tail};
use crate::{Error, Result};

/// Run `episodes` episodes with seeds `seed, seed + 1, ...` in parallel.
/// Results are returned in seed order and do not depend on thread count.
pub fn evaluate(
    cfg: &ScenarioConfig,
    kind: PolicyKind,
    seed: u64,
    episodes: usize,
) -> Result<Vec<EpisodeTrace>> {
    cfg.validate()?;
    (0..episodes as u64)
        .into_par_iter()
        .map(|e| {
            let s = seed.wrapping_add(e);
            let mut policy = make_policy(kind, cfg, s);
            run_episode(policy.as_mut(), cfg, s)
        })
        .collect()
}

/// `KEY=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (key, list) = s
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=v1,v2,..., got `{s}`"))?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad value `{v}`: {e}"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if key.is_empty() || values.is_empty() {
            return Err(format!("expected KEY=v1,v2,..., got `{s}`"));
        }
        Ok(Self {
            key: key.trim().to_string(),
            values,
        })
    }
}

/// Return a copy of `cfg` with one key set.
///
/// Accepts any top-level configuration key (as spelled in JSON) plus
/// `N_side` and `F_side`, which set both sides of the ground or flying
/// array.
pub fn apply_override(cfg: &ScenarioConfig, key: &str, value: f64) -> Result<ScenarioConfig> {
    let mut doc = serde_json::to_value(cfg)?;
    let map = doc.as_object_mut().expect("config serializes to an object");
    let number = if value.fract() == 0.0 && value.abs() < 9.0e15 {
        Value::from(value as i64)
    } else {
        serde_json::Number::from_f64(value)
            .map(Value::Number)
            .ok_or_else(|| Error::invariant(key, value, "must be finite"))?
    };
    let keys: &[&str] = match key {
        "N_side" => &["N1", "N2"],
        "F_side" => &["F1", "F2"],
        _ if map.contains_key(key) => std::slice::from_ref(&key),
        _ => return Err(Error::UnknownKey(key.to_string())),
    };
    for k in keys {
        map.insert((*k).to_string(), number.clone());
    }
    ScenarioConfig::from_value(doc)
}

/// Results for one swept value.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    /// Final min-rate per episode, in seed order.
    pub min_rates: Vec<f64>,
}

impl SweepPoint {
    pub fn mean(&self) -> f64 {
        mean(&self.min_rates)
    }

    pub fn std(&self) -> f64 {
        std_dev(&self.min_rates)
    }
}

pub fn sweep(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    kind: PolicyKind,
    seed: u64,
    episodes: usize,
) -> Result<Vec<SweepPoint>> {
    spec.values
        .iter()
        .map(|&value| {
            let cfg = apply_override(base, &spec.key, value)?;
            let traces = evaluate(&cfg, kind, seed, episodes)?;
            Ok(SweepPoint {
                value,
                min_rates: traces.iter().map(|t| t.report.min_rate).collect(),
            })
        })
        .collect()
}

/// Paired one-sided tests between consecutive sweep points.
pub fn trend_tests(points: &[SweepPoint], tail: Tail) -> Result<Vec<PairedTest>> {
    points
        .windows(2)
        .map(|w| paired_t_test(&w[0].min_rates, &w[1].min_rates, tail))
        .collect()
}

pub fn write_sweep<W: Write>(out: W, key: &str, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value", "episodes", "mean_min_rate", "std_min_rate"])?;
    for p in points {
        w.write_record([
            key.to_string(),
            p.value.to_string(),
            p.min_rates.len().to_string(),
            p.mean().to_string(),
            p.std().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
