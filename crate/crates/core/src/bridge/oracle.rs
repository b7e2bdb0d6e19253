//! Exhaustive search over quantized phases and beam power splits for one
//! frozen channel realization.
//!
//! Phases take values `2πi/levels`. A common rotation of all UAV-RIS phases
//! multiplies every effective channel by the same unit phasor and leaves all
//! SINRs unchanged, so the first UAV element is pinned to zero and only
//! `F + N − 1` phases are enumerated. For every phase point, beams are the
//! normalized matched filters `g_k^H/‖g_k‖` with the downlink power split
//! over nodes in multiples of `P_dl / beam_grid`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelSet, ComplexMatrix};
use crate::scenario::{canonical_angle, ScenarioConfig};
use crate::signal::{effective_channels, slot_rates, LinkDirection, PhaseConfig};
use crate::{Error, Result};

/// Largest number of grid points the oracle will enumerate.
pub const COMBINATION_LIMIT: u128 = 10_000_000;

/// A point of the search grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub theta_u: Vec<usize>,
    pub theta_r: Vec<usize>,
    /// Power units per node, summing to `beam_grid`.
    pub split: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub levels: usize,
    pub beam_grid: usize,
    pub combinations: u64,
    pub point: GridPoint,
    pub phases: PhaseConfig,
    /// Row-major M×K beam matrix as `[re, im]` pairs.
    pub beam: Vec<[f64; 2]>,
    pub min_rate: f64,
    #[serde(skip)]
    pub w: ComplexMatrix,
}

pub fn grid_phase(index: usize, levels: usize) -> f64 {
    TAU * index as f64 / levels as f64
}

/// Index of the nearest grid phase.
pub fn snap_phase(theta: f64, levels: usize) -> usize {
    let step = TAU / levels as f64;
    ((canonical_angle(theta) / step).round() as usize) % levels
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of grid points enumerated for the given sizes.
pub fn combinations(f: usize, n: usize, k: usize, levels: usize, beam_grid: usize) -> u128 {
    let free = (f + n).saturating_sub(1) as u32;
    let phases = (levels as u128).checked_pow(free).unwrap_or(u128::MAX);
    let splits = binomial((beam_grid + k - 1) as u128, (k - 1) as u128);
    phases.saturating_mul(splits)
}

/// All ways to put `total` indistinguishable units into `parts` bins, in
/// lexicographic order.
pub fn power_splits(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

impl GridPoint {
    pub fn phases(&self, levels: usize) -> PhaseConfig {
        PhaseConfig::new(
            self.theta_u
                .iter()
                .map(|&i| grid_phase(i, levels))
                .collect(),
            self.theta_r
                .iter()
                .map(|&i| grid_phase(i, levels))
                .collect(),
        )
    }
}

/// Matched-filter beams for `phases` with power split `split/beam_grid`.
pub fn matched_beams(
    ch: &ChannelSet,
    phases: &PhaseConfig,
    split: &[usize],
    beam_grid: usize,
    cfg: &ScenarioConfig,
) -> Result<ComplexMatrix> {
    let g = effective_channels(ch, phases, LinkDirection::Downlink)?;
    let (k, m) = g.shape();
    let mut w = ComplexMatrix::zeros(m, k);
    for node in 0..k {
        let row = g.row(node);
        let norm = row.norm();
        if norm == 0.0 || split[node] == 0 {
            continue;
        }
        let amp = (cfg.p_dl * split[node] as f64 / beam_grid as f64).sqrt() / norm;
        for a in 0..m {
            w[(a, node)] = row[a].conj() * Complex64::from(amp);
        }
    }
    Ok(w)
}

/// Min weighted rate of all nodes at one grid point.
pub fn evaluate(
    ch: &ChannelSet,
    point: &GridPoint,
    levels: usize,
    beam_grid: usize,
    cfg: &ScenarioConfig,
) -> Result<f64> {
    let phases = point.phases(levels);
    let w = matched_beams(ch, &phases, &point.split, beam_grid, cfg)?;
    let schedule = vec![true; point.split.len()];
    Ok(slot_rates(ch, &phases, &w, &schedule, cfg)?.min_weighted())
}

fn decode_index(mut idx: u64, levels: usize, f: usize, n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut digit = || {
        let d = (idx % levels as u64) as usize;
        idx /= levels as u64;
        d
    };
    let mut theta_u = vec![0; f];
    for t in theta_u.iter_mut().skip(1) {
        *t = digit();
    }
    let theta_r = (0..n).map(|_| digit()).collect();
    (theta_u, theta_r)
}

/// Best grid point for the frozen channels. Ties keep the lowest phase
/// index and then the first power split, so the result is deterministic.
pub fn oracle_exhaustive(
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
    levels: usize,
    beam_grid: usize,
) -> Result<OracleResult> {
    if levels == 0 || beam_grid == 0 {
        return Err(Error::invariant(
            "levels/beam_grid",
            0,
            "must be at least 1",
        ));
    }
    let (n, f) = ch.h_ur.shape();
    let k = ch.num_nodes();
    let total = combinations(f, n, k, levels, beam_grid);
    if total > COMBINATION_LIMIT {
        return Err(Error::SearchSpace {
            combinations: total,
            limit: COMBINATION_LIMIT,
        });
    }
    let splits = power_splits(beam_grid, k);
    let phase_points = (levels as u64).pow((f + n - 1) as u32);

    let best = (0..phase_points)
        .into_par_iter()
        .map(|idx| -> Result<(f64, u64, usize)> {
            let (theta_u, theta_r) = decode_index(idx, levels, f, n);
            let mut best = (f64::NEG_INFINITY, idx, 0);
            for (s, split) in splits.iter().enumerate() {
                let point = GridPoint {
                    theta_u: theta_u.clone(),
                    theta_r: theta_r.clone(),
                    split: split.clone(),
                };
                let v = evaluate(ch, &point, levels, beam_grid, cfg)?;
                if v > best.0 {
                    best = (v, idx, s);
                }
            }
            Ok(best)
        })
        .try_reduce(
            || (f64::NEG_INFINITY, u64::MAX, 0),
            |a, b| {
                let a_wins = a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2));
                Ok(if a_wins { a } else { b })
            },
        )?;

    let (min_rate, idx, s) = best;
    let (theta_u, theta_r) = decode_index(idx, levels, f, n);
    let point = GridPoint {
        theta_u,
        theta_r,
        split: splits[s].clone(),
    };
    let phases = point.phases(levels);
    let w = matched_beams(ch, &phases, &point.split, beam_grid, cfg)?;
    let beam = w.transpose().iter().map(|z| [z.re, z.im]).collect();
    Ok(OracleResult {
        levels,
        beam_grid,
        combinations: total as u64,
        point,
        phases,
        beam,
        min_rate,
        w,
    })
}
