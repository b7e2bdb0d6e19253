//! Reference policies used as baselines and for smoke testing.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::sample_nlos;
use crate::env::{encode_action, flat_action, Action, Layout, Policy, StateObs};
use crate::scenario::ScenarioConfig;
use crate::signal::{matched_solution, PhaseConfig};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyKind {
    Random,
    Matched,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Matched => "matched",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(Self::Random),
            "matched" => Ok(Self::Matched),
            _ => Err(format!("unknown policy `{s}`")),
        }
    }
}

/// Build a boxed policy. Random policies draw from a stream seeded with
/// `seed`, so an episode stays a pure function of its seed.
pub fn make_policy(kind: PolicyKind, cfg: &ScenarioConfig, seed: u64) -> Box<dyn Policy + Send> {
    match kind {
        PolicyKind::Random => Box::new(RandomPolicy::new(cfg, seed)),
        PolicyKind::Matched => Box::new(MatchedPolicy::new(cfg)),
    }
}

/// Uniform speed, heading and phases; Gaussian beams scaled just inside the
/// downlink budget; every node scheduled.
pub struct RandomPolicy {
    layout: Layout,
    v_max: f64,
    p_dl: f64,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Self {
        Self {
            layout: Layout::new(cfg),
            v_max: cfg.v_max,
            p_dl: cfg.p_dl,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5241_4e44_4f4d),
        }
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, _obs: &StateObs) -> Result<Vec<f64>> {
        let Layout { m, k, f, n } = self.layout;
        let rng = &mut self.rng;
        let speed = rng.random_range(0.0..=self.v_max);
        let heading = rng.random_range(0.0..TAU);
        let w = sample_nlos(rng, m, k);
        let norm2 = w.norm_squared();
        let scale = if norm2 > 0.0 {
            (self.p_dl * (1.0 - 1e-9) / norm2).sqrt()
        } else {
            0.0
        };
        let phases = PhaseConfig::new(
            (0..f).map(|_| rng.random_range(0.0..TAU)).collect(),
            (0..n).map(|_| rng.random_range(0.0..TAU)).collect(),
        );
        Ok(encode_action(&Action {
            speed,
            heading,
            schedule: vec![true; k],
            w: w * Complex64::from(scale),
            phases,
        }))
    }
}

/// Serves one node per slot in round-robin order with the co-phasing
/// matched solution computed on the observed channels, while flying toward
/// the centroid of the nodes.
pub struct MatchedPolicy {
    cfg: ScenarioConfig,
    layout: Layout,
    target: (f64, f64),
}

impl MatchedPolicy {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let k = cfg.num_nodes() as f64;
        let cx = cfg.node_pos.iter().map(|p| p.x).sum::<f64>() / k;
        let cy = cfg.node_pos.iter().map(|p| p.y).sum::<f64>() / k;
        Self {
            cfg: cfg.clone(),
            layout: Layout::new(cfg),
            target: (cx, cy),
        }
    }
}

impl Policy for MatchedPolicy {
    fn act(&mut self, obs: &StateObs) -> Result<Vec<f64>> {
        let ch = self.layout.channels(obs)?;
        let focus = obs.slot_index % self.layout.k;
        let (phases, beam) = matched_solution(focus, &ch, &self.cfg)?;
        let pos = obs.uav_position(&self.cfg);
        let (dx, dy) = (self.target.0 - pos.x, self.target.1 - pos.y);
        let dist = dx.hypot(dy);
        let speed = (dist / self.cfg.slot_dt).min(self.cfg.v_max);
        Ok(flat_action(speed, dy.atan2(dx), &beam.w, &phases))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{decode_action, run_episode, Env};

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            flying_rows: 2,
            flying_cols: 2,
            ground_rows: 3,
            ground_cols: 3,
            bs_antennas: 2,
            slots: 40,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn random_actions_never_clamp() {
        let cfg = small();
        let mut p = RandomPolicy::new(&cfg, 3);
        let mut env = Env::new(cfg.clone()).unwrap();
        let obs = env.reset(0).unwrap();
        for _ in 0..500 {
            let a = p.act(&obs).unwrap();
            assert_eq!(decode_action(&cfg, &a).unwrap().clamps, 0);
        }
    }

    #[test]
    fn matched_flies_to_centroid_and_stays() {
        let cfg = small();
        let mut p = MatchedPolicy::new(&cfg);
        let trace = run_episode(&mut p, &cfg, 1).unwrap();
        let last = trace.steps.last().unwrap().info.position;
        assert!(
            (last[0] - 555.0).abs() < 1e-6 && (last[1] - 500.0).abs() < 1e-6,
            "{last:?}"
        );
        assert!(trace
            .steps
            .iter()
            .all(|s| !s.info.boundary && s.info.clamp_count == 0));
    }

    #[test]
    fn matched_serves_nodes_in_turn() {
        let cfg = small();
        let mut p = MatchedPolicy::new(&cfg);
        let trace = run_episode(&mut p, &cfg, 2).unwrap();
        for (t, s) in trace.steps.iter().enumerate() {
            let served = t % cfg.num_nodes();
            for (k, r) in s.info.rates.iter().enumerate() {
                assert_eq!(*r > 0.0, k == served, "slot {t} node {k}");
            }
        }
    }

    #[test]
    fn parse_kind() {
        assert_eq!(
            "matched".parse::<PolicyKind>().unwrap(),
            PolicyKind::Matched
        );
        assert!("greedy".parse::<PolicyKind>().is_err());
        assert_eq!(PolicyKind::Random.to_string(), "random");
    }
}
