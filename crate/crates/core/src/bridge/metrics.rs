//! Per-slot CSV metrics and episode summaries.
//!
//! Numbers are written with Rust's shortest round-trip formatting, which
//! never depends on locale.

use std::io::Write;

use serde::Serialize;

use crate::env::EpisodeTrace;
use crate::scenario::{check_mobility, ScenarioConfig};
use crate::stats::{mean, std_dev};
use crate::Result;

/// One slot of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub episode: usize,
    pub seed: u64,
    /// 1-based slot index.
    pub slot: usize,
    /// Weighted rate of each node in this slot.
    pub rates: Vec<f64>,
    /// Minimum over nodes of the running time-averaged rate.
    pub min_rate: f64,
    pub reward: f64,
    pub boundary_flag: bool,
    pub power_used: f64,
}

pub fn header(num_nodes: usize) -> Vec<String> {
    let mut h = vec!["episode".to_string(), "seed".into(), "slot".into()];
    h.extend((0..num_nodes).map(|k| format!("rate_{k}")));
    h.extend(["min_rate", "reward", "boundary_flag", "power_used"].map(String::from));
    h
}

pub fn rows(episode: usize, trace: &EpisodeTrace) -> Vec<MetricsRow> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| MetricsRow {
            episode,
            seed: trace.seed,
            slot: t + 1,
            rates: s.info.rates.clone(),
            min_rate: s.info.min_rate,
            reward: s.reward,
            boundary_flag: s.info.boundary,
            power_used: s.info.power_used,
        })
        .collect()
}

impl MetricsRow {
    fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.episode.to_string(),
            self.seed.to_string(),
            self.slot.to_string(),
        ];
        r.extend(self.rates.iter().map(f64::to_string));
        r.push(self.min_rate.to_string());
        r.push(self.reward.to_string());
        r.push(u8::from(self.boundary_flag).to_string());
        r.push(self.power_used.to_string());
        r
    }
}

/// Write a header and one row per slot of every trace.
pub fn write_metrics<W: Write>(out: W, num_nodes: usize, traces: &[EpisodeTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(num_nodes))?;
    for (e, trace) in traces.iter().enumerate() {
        for row in rows(e, trace) {
            w.write_record(row.record())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Aggregate of the final min-rate over a batch of episodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub episodes: usize,
    pub mean_min_rate: f64,
    pub std_min_rate: f64,
    pub mean_reward: f64,
    pub mean_power: f64,
    /// Episodes whose trajectory breaks a mobility constraint, typically
    /// by not ending within one hop of `uav_end`.
    pub mobility_violations: usize,
}

pub fn summarize(cfg: &ScenarioConfig, traces: &[EpisodeTrace]) -> Result<Summary> {
    let min_rates: Vec<f64> = traces.iter().map(|t| t.report.min_rate).collect();
    let rewards: Vec<f64> = traces
        .iter()
        .map(|t| t.steps.iter().map(|s| s.reward).sum::<f64>() / t.steps.len() as f64)
        .collect();
    let powers: Vec<f64> = traces.iter().map(EpisodeTrace::mean_power).collect();
    let mut mobility_violations = 0;
    for t in traces {
        if !check_mobility(&t.trajectory(cfg), cfg)?.is_empty() {
            mobility_violations += 1;
        }
    }
    Ok(Summary {
        episodes: traces.len(),
        mean_min_rate: mean(&min_rates),
        std_min_rate: std_dev(&min_rates),
        mean_reward: mean(&rewards),
        mean_power: mean(&powers),
        mobility_violations,
    })
}

/// Write a summary as a two-row CSV.
pub fn write_summary<W: Write>(out: W, label: &str, s: &Summary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "policy",
        "episodes",
        "mean_min_rate",
        "std_min_rate",
        "mean_reward",
        "mean_power",
        "mobility_violations",
    ])?;
    w.write_record([
        label.to_string(),
        s.episodes.to_string(),
        s.mean_min_rate.to_string(),
        s.std_min_rate.to_string(),
        s.mean_reward.to_string(),
        s.mean_power.to_string(),
        s.mobility_violations.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::policy::MatchedPolicy;
    use crate::env::run_episode;

    #[test]
    fn golden_header() {
        assert_eq!(
            header(2).join(","),
            "episode,seed,slot,rate_0,rate_1,min_rate,reward,boundary_flag,power_used"
        );
    }

    #[test]
    fn rows_per_slot() {
        let cfg = ScenarioConfig {
            flying_rows: 1,
            flying_cols: 1,
            ground_rows: 2,
            ground_cols: 2,
            bs_antennas: 1,
            slots: 3,
            ..ScenarioConfig::default()
        };
        let trace = run_episode(&mut MatchedPolicy::new(&cfg), &cfg, 9).unwrap();
        let mut out = Vec::new();
        write_metrics(&mut out, 4, &[trace.clone(), trace]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[1].starts_with("0,9,1,"));
        assert!(lines[6].starts_with("1,9,3,"));
        assert_eq!(lines[3].split(',').count(), header(4).len());
    }

    #[test]
    fn numbers_round_trip() {
        let row = MetricsRow {
            episode: 0,
            seed: 1,
            slot: 1,
            rates: vec![0.1 + 0.2, 1e-300],
            min_rate: 3.0,
            reward: -10.0,
            boundary_flag: true,
            power_used: 10.0,
        };
        let rec = row.record();
        assert_eq!(rec[3].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(rec[4].parse::<f64>().unwrap(), 1e-300);
        assert_eq!(rec[7], "1");
    }

    #[test]
    fn summary_counts_unfinished_trajectories() {
        let cfg = ScenarioConfig {
            flying_rows: 1,
            flying_cols: 1,
            ground_rows: 1,
            ground_cols: 1,
            bs_antennas: 1,
            slots: 5,
            ..ScenarioConfig::default()
        };
        let mut policy = MatchedPolicy::new(&cfg);
        let away = run_episode(&mut policy, &cfg, 0).unwrap();
        let mut hover =
            |_: &crate::env::StateObs| Ok(crate::env::idle_action(&crate::env::Layout::new(&cfg)));
        let home = run_episode(&mut hover, &cfg, 0).unwrap();
        let s = summarize(&cfg, &[away, home]).unwrap();
        assert_eq!(s.episodes, 2);
        assert_eq!(s.mobility_violations, 1);
        assert!(s.mean_power <= cfg.p_dl);
    }
}
