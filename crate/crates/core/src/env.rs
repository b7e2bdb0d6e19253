//! The slot-stepped decision process.
//!
//! Each `step` moves the UAV, realizes the next slot's channels at the new
//! position and scores the submitted beams and phases on them. The
//! observation returned alongside carries exactly those channels, which the
//! agent then uses to choose the following action.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{realize_channels, ChannelSet, ComplexMatrix, SlotSeed};
use crate::scenario::{canonical_angle, propose_move, Position3, RewardMode, ScenarioConfig};
use crate::signal::{episode_rates, project_power, slot_rates, PhaseConfig, RateReport};
use crate::{Error, Result};

/// Decoded agent action.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    /// m/s, in `[0, v_max]`.
    pub speed: f64,
    /// Radians in `[0, 2π)`.
    pub heading: f64,
    pub schedule: Vec<bool>,
    /// M×K beamforming matrix within the downlink budget.
    pub w: ComplexMatrix,
    pub phases: PhaseConfig,
}

/// Fixed flat layouts of observations and actions for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "F")]
    pub f: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

impl Layout {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self {
            m: cfg.bs_antennas,
            k: cfg.num_nodes(),
            f: cfg.flying_elements(),
            n: cfg.ground_elements(),
        }
    }

    fn csi_complex_len(&self) -> usize {
        self.f * self.m + self.n * self.f + self.k * self.n + self.k * self.f
    }

    /// `2 + 1 + 2·(F·M + N·F + K·N + K·F) + 4K`.
    pub fn obs_len(&self) -> usize {
        3 + 2 * self.csi_complex_len() + 4 * self.k
    }

    /// `[speed, heading, schedule(K), Re W(M·K), Im W(M·K), θ_U(F), θ_R(N)]`.
    pub fn action_len(&self) -> usize {
        2 + self.k + 2 * self.m * self.k + self.f + self.n
    }

    /// Rebuild the channel set carried in an observation.
    pub fn channels(&self, obs: &StateObs) -> Result<ChannelSet> {
        let want = self.obs_len() - 3;
        if obs.csi.len() != want {
            return Err(Error::LengthMismatch {
                expected: want,
                got: obs.csi.len(),
            });
        }
        let mut it = obs.csi.iter().copied();
        let mut take = |rows: usize, cols: usize| {
            let entries: Vec<Complex64> = (0..rows * cols)
                .map(|_| Complex64::new(it.next().unwrap(), it.next().unwrap()))
                .collect();
            ComplexMatrix::from_row_slice(rows, cols, &entries)
        };
        let h_bu = take(self.f, self.m);
        let h_ur = take(self.n, self.f);
        let h_rk = take(self.k, self.n);
        let h_uk = take(self.k, self.f);
        let amps = &obs.csi[2 * self.csi_complex_len()..];
        let k = self.k;
        Ok(ChannelSet {
            h_bu,
            h_ur,
            h_rk,
            h_uk,
            pathloss_cascade: amps[..k].to_vec(),
            pathloss_direct_rk: amps[k..2 * k].to_vec(),
            pathloss_direct_uk: amps[2 * k..3 * k].to_vec(),
            pathloss_bu_k: amps[3 * k..].to_vec(),
        })
    }
}

/// What the agent sees each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct StateObs {
    /// UAV position scaled by the area to `[0, 1]²`.
    pub uav_xy: [f64; 2],
    pub slot_index: usize,
    /// Interleaved real/imaginary parts of H_BU, H_UR, h_Rk, h_Uk (row
    /// major) followed by the four per-node path-loss amplitude groups.
    pub csi: Vec<f64>,
}

impl StateObs {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 + self.csi.len());
        v.extend_from_slice(&self.uav_xy);
        v.push(self.slot_index as f64);
        v.extend_from_slice(&self.csi);
        v
    }

    pub fn from_slice(layout: &Layout, v: &[f64]) -> Result<Self> {
        if v.len() != layout.obs_len() {
            return Err(Error::LengthMismatch {
                expected: layout.obs_len(),
                got: v.len(),
            });
        }
        Ok(Self {
            uav_xy: [v[0], v[1]],
            slot_index: v[2] as usize,
            csi: v[3..].to_vec(),
        })
    }

    /// UAV horizontal position in meters.
    pub fn uav_position(&self, cfg: &ScenarioConfig) -> Position3 {
        Position3::new(
            self.uav_xy[0] * cfg.area_x,
            self.uav_xy[1] * cfg.area_y,
            cfg.uav_altitude,
        )
    }
}

fn push_matrix(out: &mut Vec<f64>, m: &ComplexMatrix) {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            out.push(z.re);
            out.push(z.im);
        }
    }
}

/// Flatten position, slot and channels into an observation.
pub fn encode_state(
    cfg: &ScenarioConfig,
    pos: &Position3,
    slot: usize,
    ch: &ChannelSet,
) -> StateObs {
    let layout = Layout::new(cfg);
    let mut csi = Vec::with_capacity(layout.obs_len() - 3);
    push_matrix(&mut csi, &ch.h_bu);
    push_matrix(&mut csi, &ch.h_ur);
    push_matrix(&mut csi, &ch.h_rk);
    push_matrix(&mut csi, &ch.h_uk);
    for group in [
        &ch.pathloss_cascade,
        &ch.pathloss_direct_rk,
        &ch.pathloss_direct_uk,
        &ch.pathloss_bu_k,
    ] {
        csi.extend_from_slice(group);
    }
    StateObs {
        uav_xy: [pos.x / cfg.area_x, pos.y / cfg.area_y],
        slot_index: slot,
        csi,
    }
}

/// An action together with the number of components that had to be clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedAction {
    pub action: Action,
    pub clamps: usize,
}

/// Decode a flat action vector.
///
/// Speed is clamped to `[0, v_max]`, schedule flags are thresholded at 0.5,
/// W is projected onto the downlink budget and phases/heading are wrapped
/// into `[0, 2π)`. Clamping of speed, out-of-range schedule values and
/// power projection each count as a clamp event; angle wrapping does not.
pub fn decode_action(cfg: &ScenarioConfig, flat: &[f64]) -> Result<DecodedAction> {
    let layout = Layout::new(cfg);
    if flat.len() != layout.action_len() {
        return Err(Error::ActionLength {
            expected: layout.action_len(),
            got: flat.len(),
        });
    }
    if let Some(i) = flat.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteAction(i));
    }
    let Layout { m, k, f, n } = layout;
    let mut clamps = 0;

    let speed = flat[0].clamp(0.0, cfg.v_max);
    if speed != flat[0] {
        clamps += 1;
    }
    let heading = canonical_angle(flat[1]);

    let mut at = 2;
    let schedule = flat[at..at + k]
        .iter()
        .map(|&s| {
            if !(0.0..=1.0).contains(&s) {
                clamps += 1;
            }
            s >= 0.5
        })
        .collect();
    at += k;

    let re = &flat[at..at + m * k];
    let im = &flat[at + m * k..at + 2 * m * k];
    at += 2 * m * k;
    let entries: Vec<Complex64> = re
        .iter()
        .zip(im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    let raw = ComplexMatrix::from_row_slice(m, k, &entries);
    let w = project_power(&raw, cfg.p_dl)?;
    if w != raw {
        clamps += 1;
    }

    let phases = PhaseConfig::new(flat[at..at + f].to_vec(), flat[at + f..at + f + n].to_vec());

    Ok(DecodedAction {
        action: Action {
            speed,
            heading,
            schedule,
            w,
            phases,
        },
        clamps,
    })
}

/// Inverse of [`decode_action`] for in-range actions.
pub fn encode_action(action: &Action) -> Vec<f64> {
    let (m, k) = action.w.shape();
    let mut v = Vec::with_capacity(
        2 + k + 2 * m * k + action.phases.theta_u.len() + action.phases.theta_r.len(),
    );
    v.push(action.speed);
    v.push(action.heading);
    v.extend(action.schedule.iter().map(|&s| if s { 1.0 } else { 0.0 }));
    for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
        for r in 0..m {
            for c in 0..k {
                v.push(part(action.w[(r, c)]));
            }
        }
    }
    v.extend_from_slice(&action.phases.theta_u);
    v.extend_from_slice(&action.phases.theta_r);
    v
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Weighted DL/UL rate of each node this slot.
    pub rates: Vec<f64>,
    pub dl_rates: Vec<f64>,
    pub ul_rates: Vec<f64>,
    /// Running time-average of `rates` up to and including this slot.
    pub avg_rates: Vec<f64>,
    /// Minimum of `avg_rates`.
    pub min_rate: f64,
    /// Minimum of `rates`.
    pub min_slot_rate: f64,
    pub boundary: bool,
    /// Downlink Σ‖w_k‖² after projection.
    pub power_used: f64,
    pub clamp_count: usize,
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub obs: StateObs,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone)]
struct Episode {
    seed: u64,
    slot: usize,
    pos: Position3,
    sum_dl: Vec<f64>,
    sum_ul: Vec<f64>,
    done: bool,
}

/// A single environment session. Strictly sequential: `reset`, then up to
/// `L` calls to `step`.
#[derive(Debug, Clone)]
pub struct Env {
    cfg: ScenarioConfig,
    layout: Layout,
    episode: Option<Episode>,
}

impl Env {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let layout = Layout::new(&cfg);
        Ok(Self {
            cfg,
            layout,
            episode: None,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn position(&self) -> Option<Position3> {
        self.episode.as_ref().map(|e| e.pos)
    }

    /// Start a new episode. The whole episode is then a pure function of
    /// `(config, seed, actions)`.
    pub fn reset(&mut self, seed: u64) -> Result<StateObs> {
        let pos = self.cfg.uav_start;
        let ch = realize_channels(&self.cfg, &pos, SlotSeed { seed, slot: 0 })?;
        let k = self.layout.k;
        self.episode = Some(Episode {
            seed,
            slot: 0,
            pos,
            sum_dl: vec![0.0; k],
            sum_ul: vec![0.0; k],
            done: false,
        });
        Ok(encode_state(&self.cfg, &pos, 0, &ch))
    }

    pub fn step(&mut self, flat_action: &[f64]) -> Result<StepResult> {
        self.check_active()?;
        let decoded = decode_action(&self.cfg, flat_action)?;
        self.step_decoded(&decoded.action, decoded.clamps)
    }

    pub fn step_action(&mut self, action: &Action) -> Result<StepResult> {
        self.check_active()?;
        self.step_decoded(action, 0)
    }

    fn check_active(&self) -> Result<()> {
        match &self.episode {
            None => Err(Error::NoActiveEpisode),
            Some(e) if e.done => Err(Error::EpisodeDone),
            Some(_) => Ok(()),
        }
    }

    fn step_decoded(&mut self, action: &Action, clamps: usize) -> Result<StepResult> {
        let cfg = &self.cfg;
        let ep = self.episode.as_mut().ok_or(Error::NoActiveEpisode)?;

        let proposed = propose_move(ep.pos, action.speed, action.heading, cfg);
        let boundary = !cfg.in_area(&proposed);
        if !boundary {
            ep.pos = proposed;
        }
        ep.slot += 1;

        let ch = realize_channels(
            cfg,
            &ep.pos,
            SlotSeed {
                seed: ep.seed,
                slot: ep.slot as u64,
            },
        )?;
        let rates = slot_rates(&ch, &action.phases, &action.w, &action.schedule, cfg)?;
        for k in 0..rates.dl.len() {
            ep.sum_dl[k] += rates.dl[k];
            ep.sum_ul[k] += rates.ul[k];
        }
        let t = ep.slot as f64;
        let avg_rates: Vec<f64> = ep
            .sum_dl
            .iter()
            .zip(&ep.sum_ul)
            .map(|(d, u)| (cfg.dl_weight * d + (1.0 - cfg.dl_weight) * u) / t)
            .collect();
        let min_rate = avg_rates.iter().copied().fold(f64::INFINITY, f64::min);
        let min_slot_rate = rates.min_weighted();
        let mut reward = match cfg.reward_mode {
            RewardMode::RunningAverage => min_rate,
            RewardMode::Instantaneous => min_slot_rate,
        };
        if boundary {
            reward += cfg.penalty;
        }
        ep.done = ep.slot >= cfg.slots;

        Ok(StepResult {
            obs: encode_state(cfg, &ep.pos, ep.slot, &ch),
            reward,
            done: ep.done,
            info: StepInfo {
                rates: rates.weighted,
                dl_rates: rates.dl,
                ul_rates: rates.ul,
                avg_rates,
                min_rate,
                min_slot_rate,
                boundary,
                power_used: rates.dl_power,
                clamp_count: clamps,
                position: ep.pos.into(),
            },
        })
    }
}

/// Maps observations to flat action vectors.
pub trait Policy {
    fn act(&mut self, obs: &StateObs) -> Result<Vec<f64>>;
}

impl<F> Policy for F
where
    F: FnMut(&StateObs) -> Result<Vec<f64>>,
{
    fn act(&mut self, obs: &StateObs) -> Result<Vec<f64>> {
        self(obs)
    }
}

/// Everything needed to replay or re-score an episode.
#[derive(Debug, Clone)]
pub struct EpisodeTrace {
    pub seed: u64,
    pub initial_obs: StateObs,
    pub actions: Vec<Vec<f64>>,
    pub steps: Vec<StepResult>,
    pub report: RateReport,
}

impl EpisodeTrace {
    pub fn mean_power(&self) -> f64 {
        let total: f64 = self.steps.iter().map(|s| s.info.power_used).sum();
        total / self.steps.len().max(1) as f64
    }

    pub fn trajectory(&self, cfg: &ScenarioConfig) -> Vec<Position3> {
        std::iter::once(cfg.uav_start)
            .chain(self.steps.iter().map(|s| Position3::from(s.info.position)))
            .collect()
    }
}

/// Run one full episode of `L` slots.
pub fn run_episode<P: Policy + ?Sized>(
    policy: &mut P,
    cfg: &ScenarioConfig,
    seed: u64,
) -> Result<EpisodeTrace> {
    let mut env = Env::new(cfg.clone())?;
    let initial_obs = env.reset(seed)?;
    let mut obs = initial_obs.clone();
    let mut actions = Vec::with_capacity(cfg.slots);
    let mut steps = Vec::with_capacity(cfg.slots);
    loop {
        let slot = obs.slot_index;
        let action = policy.act(&obs).map_err(|e| Error::Policy {
            slot,
            message: e.to_string(),
        })?;
        let result = env.step(&action)?;
        actions.push(action);
        obs = result.obs.clone();
        let done = result.done;
        steps.push(result);
        if done {
            break;
        }
    }
    let dl: Vec<Vec<f64>> = steps.iter().map(|s| s.info.dl_rates.clone()).collect();
    let ul: Vec<Vec<f64>> = steps.iter().map(|s| s.info.ul_rates.clone()).collect();
    let report = episode_rates(&dl, &ul, cfg.dl_weight)?;
    Ok(EpisodeTrace {
        seed,
        initial_obs,
        actions,
        steps,
        report,
    })
}

/// A zero action (hover, nobody served) of the right length.
pub fn idle_action(layout: &Layout) -> Vec<f64> {
    vec![0.0; layout.action_len()]
}

/// Build a flat action from its parts, all nodes scheduled.
pub fn flat_action(speed: f64, heading: f64, w: &ComplexMatrix, phases: &PhaseConfig) -> Vec<f64> {
    encode_action(&Action {
        speed,
        heading: canonical_angle(heading),
        schedule: vec![true; w.ncols()],
        w: w.clone(),
        phases: phases.clone(),
    })
}
