//! Phase shifts, effective cascaded channels, SINR, rates and power.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSet, ComplexMatrix};
use crate::scenario::{canonical_angle, ScenarioConfig};
use crate::{Error, Result};

/// Phase shifts of the flying (`theta_u`, F entries) and ground (`theta_r`,
/// N entries) surfaces, kept in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub theta_u: Vec<f64>,
    pub theta_r: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(theta_u: Vec<f64>, theta_r: Vec<f64>) -> Self {
        let mut p = Self { theta_u, theta_r };
        p.canonicalize();
        p
    }

    pub fn zeros(f: usize, n: usize) -> Self {
        Self {
            theta_u: vec![0.0; f],
            theta_r: vec![0.0; n],
        }
    }

    pub fn canonicalize(&mut self) {
        for t in self.theta_u.iter_mut().chain(self.theta_r.iter_mut()) {
            *t = canonical_angle(*t);
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.theta_u
            .iter()
            .chain(&self.theta_r)
            .all(|t| (0.0..std::f64::consts::TAU).contains(t))
    }
}

fn phasors(theta: &[f64], conjugate: bool) -> DVector<Complex64> {
    let sign = if conjugate { -1.0 } else { 1.0 };
    DVector::from_iterator(
        theta.len(),
        theta.iter().map(|t| Complex64::from_polar(1.0, sign * t)),
    )
}

/// `diag(e^{jθ_1}, …, e^{jθ_n})`.
pub fn phase_matrix(theta: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&phasors(theta, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDirection {
    Downlink,
    Uplink,
}

/// Beamforming (downlink) or receive-combining (uplink) matrix; column `k`
/// serves node `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamMatrix {
    pub w: ComplexMatrix,
    pub direction: LinkDirection,
}

impl BeamMatrix {
    pub fn total_power(&self) -> f64 {
        self.w.norm_squared()
    }
}

fn check_dims(k: usize, ch: &ChannelSet, ph: &PhaseConfig) -> Result<()> {
    let (n, f) = ch.h_ur.shape();
    let nodes = ch.h_rk.nrows();
    let checks = [
        ("theta_R", ph.theta_r.len(), n),
        ("theta_U", ph.theta_u.len(), f),
        ("h_Rk columns", ch.h_rk.ncols(), n),
        ("h_Uk columns", ch.h_uk.ncols(), f),
        ("h_Uk rows", ch.h_uk.nrows(), nodes),
        ("H_BU rows", ch.h_bu.nrows(), f),
        ("cascade path losses", ch.pathloss_cascade.len(), nodes),
        ("BU-k path losses", ch.pathloss_bu_k.len(), nodes),
    ];
    for (what, got, want) in checks {
        if got != want {
            return Err(Error::Shape(format!("{what}: expected {want}, got {got}")));
        }
    }
    if k >= nodes {
        return Err(Error::Shape(format!(
            "node {k} out of range for K = {nodes}"
        )));
    }
    Ok(())
}

fn effective_channel(
    k: usize,
    ch: &ChannelSet,
    ph: &PhaseConfig,
    conj: bool,
) -> Result<ComplexMatrix> {
    check_dims(k, ch, ph)?;
    let a = Complex64::from(ch.pathloss_cascade[k]);
    let b = Complex64::from(ch.pathloss_bu_k[k]);
    let pr = phasors(&ph.theta_r, conj).transpose();
    let pu = phasors(&ph.theta_u, conj).transpose();

    // h_Rk Θ_R H_UR: scale the row entrywise, then one vector-matrix product.
    let via_ground = ch.h_rk.row(k).component_mul(&pr) * &ch.h_ur;
    let at_uav = (via_ground * a + ch.h_uk.row(k) * b).component_mul(&pu);
    let g = at_uav * &ch.h_bu;
    Ok(ComplexMatrix::from_row_slice(1, g.ncols(), g.as_slice()))
}

/// Downlink effective channel of node `k` (1×M):
/// `D_BURk·h_Rk Θ_R H_UR Θ_U H_BU + D_BUk·h_Uk Θ_U H_BU`.
pub fn effective_dl_channel(k: usize, ch: &ChannelSet, ph: &PhaseConfig) -> Result<ComplexMatrix> {
    effective_channel(k, ch, ph, false)
}

/// Uplink effective channel of node `k` (1×M), the conjugate transpose of
/// the reciprocal column channel so that `|g·w|²` is the combiner output.
pub fn effective_ul_channel(k: usize, ch: &ChannelSet, ph: &PhaseConfig) -> Result<ComplexMatrix> {
    effective_channel(k, ch, ph, true)
}

/// Effective channels of every node stacked as rows (K×M).
pub fn effective_channels(
    ch: &ChannelSet,
    ph: &PhaseConfig,
    direction: LinkDirection,
) -> Result<ComplexMatrix> {
    let k_nodes = ch.num_nodes();
    let m = ch.h_bu.ncols();
    let mut g = ComplexMatrix::zeros(k_nodes, m);
    for k in 0..k_nodes {
        let row = match direction {
            LinkDirection::Downlink => effective_dl_channel(k, ch, ph)?,
            LinkDirection::Uplink => effective_ul_channel(k, ch, ph)?,
        };
        g.set_row(k, &row.row(0));
    }
    Ok(g)
}

/// `|g_k w_k|² / (Σ_{j≠k} |g_k w_j|² + σ²)` with `g` K×M and `w` M×K.
pub fn sinr(k: usize, g: &ComplexMatrix, w: &ComplexMatrix, sigma2: f64) -> Result<f64> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::NoisePower(sigma2));
    }
    if g.ncols() != w.nrows() || k >= g.nrows() || k >= w.ncols() {
        return Err(Error::Shape(format!(
            "channels {:?} incompatible with beams {:?} for node {k}",
            g.shape(),
            w.shape()
        )));
    }
    let row = g.row(k);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for j in 0..w.ncols() {
        let p = (row * w.column(j))[(0, 0)].norm_sqr();
        if j == k {
            signal = p;
        } else {
            interference += p;
        }
    }
    Ok(signal / (interference + sigma2))
}

/// `log2(1 + γ)` in bits/s/Hz.
pub fn rate(gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::NegativeSinr(gamma));
    }
    Ok(gamma.ln_1p() / std::f64::consts::LN_2)
}

/// Scale all columns by `sqrt(P / Σ‖w_k‖²)` when over budget.
pub fn project_power(w: &ComplexMatrix, budget: f64) -> Result<ComplexMatrix> {
    if budget.is_nan() || budget <= 0.0 {
        return Err(Error::PowerBudget(budget));
    }
    let total = w.norm_squared();
    if total > budget {
        Ok(w * Complex64::from((budget / total).sqrt()))
    } else {
        Ok(w.clone())
    }
}

/// Rates of one slot for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRates {
    pub dl_sinr: Vec<f64>,
    pub ul_sinr: Vec<f64>,
    pub dl: Vec<f64>,
    pub ul: Vec<f64>,
    /// `dl_weight·dl + (1 − dl_weight)·ul` per node.
    pub weighted: Vec<f64>,
    /// Σ‖w_k‖² after downlink projection.
    pub dl_power: f64,
    pub ul_power: f64,
}

impl SlotRates {
    pub fn min_weighted(&self) -> f64 {
        self.weighted.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluate a raw beam matrix: unscheduled columns are silenced, the rest
/// is projected onto each direction's power budget.
pub fn slot_rates(
    ch: &ChannelSet,
    ph: &PhaseConfig,
    w: &ComplexMatrix,
    schedule: &[bool],
    cfg: &ScenarioConfig,
) -> Result<SlotRates> {
    let k_nodes = ch.num_nodes();
    if schedule.len() != k_nodes || w.ncols() != k_nodes {
        return Err(Error::Shape(format!(
            "schedule/beam columns must match K = {k_nodes}"
        )));
    }
    let mut active = w.clone();
    for (k, &on) in schedule.iter().enumerate() {
        if !on {
            active.column_mut(k).fill(Complex64::from(0.0));
        }
    }
    let w_dl = project_power(&active, cfg.p_dl)?;
    let w_ul = project_power(&active, cfg.p_ul)?;
    let g_dl = effective_channels(ch, ph, LinkDirection::Downlink)?;
    let g_ul = effective_channels(ch, ph, LinkDirection::Uplink)?;

    let mut out = SlotRates {
        dl_sinr: Vec::with_capacity(k_nodes),
        ul_sinr: Vec::with_capacity(k_nodes),
        dl: Vec::with_capacity(k_nodes),
        ul: Vec::with_capacity(k_nodes),
        weighted: Vec::with_capacity(k_nodes),
        dl_power: w_dl.norm_squared(),
        ul_power: w_ul.norm_squared(),
    };
    for (k, &scheduled) in schedule.iter().enumerate() {
        let (gd, gu) = if scheduled {
            (
                sinr(k, &g_dl, &w_dl, cfg.sigma2)?,
                sinr(k, &g_ul, &w_ul, cfg.sigma2)?,
            )
        } else {
            (0.0, 0.0)
        };
        let (rd, ru) = (rate(gd)?, rate(gu)?);
        out.dl_sinr.push(gd);
        out.ul_sinr.push(gu);
        out.dl.push(rd);
        out.ul.push(ru);
        out.weighted
            .push(cfg.dl_weight * rd + (1.0 - cfg.dl_weight) * ru);
    }
    Ok(out)
}

/// Episode-level averages and the max-min objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub slots: usize,
    /// Time-averaged downlink rate per node.
    pub dl: Vec<f64>,
    /// Time-averaged uplink rate per node.
    pub ul: Vec<f64>,
    /// `dl_weight·R^d_k + (1 − dl_weight)·R^u_k` per node.
    pub weighted: Vec<f64>,
    /// Minimum of `weighted` over nodes.
    pub min_rate: f64,
}

/// Average per-slot rates (`dl[l][k]`, `ul[l][k]`) over the episode.
pub fn episode_rates(dl: &[Vec<f64>], ul: &[Vec<f64>], dl_weight: f64) -> Result<RateReport> {
    if dl.is_empty() {
        return Err(Error::EmptyAccumulation);
    }
    if ul.len() != dl.len() {
        return Err(Error::LengthMismatch {
            expected: dl.len(),
            got: ul.len(),
        });
    }
    let k_nodes = dl[0].len();
    if k_nodes == 0 {
        return Err(Error::EmptyAccumulation);
    }
    let slots = dl.len();
    let mut sum_dl = vec![0.0; k_nodes];
    let mut sum_ul = vec![0.0; k_nodes];
    for (d, u) in dl.iter().zip(ul) {
        if d.len() != k_nodes || u.len() != k_nodes {
            return Err(Error::LengthMismatch {
                expected: k_nodes,
                got: d.len().min(u.len()),
            });
        }
        for k in 0..k_nodes {
            sum_dl[k] += d[k];
            sum_ul[k] += u[k];
        }
    }
    let avg = |s: Vec<f64>| s.into_iter().map(|x| x / slots as f64).collect::<Vec<_>>();
    let dl = avg(sum_dl);
    let ul = avg(sum_ul);
    let weighted: Vec<f64> = dl
        .iter()
        .zip(&ul)
        .map(|(d, u)| dl_weight * d + (1.0 - dl_weight) * u)
        .collect();
    let min_rate = weighted.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RateReport {
        slots,
        dl,
        ul,
        weighted,
        min_rate,
    })
}

const MATCHED_ROUNDS: usize = 8;

fn dominant_right_vector(h: &ComplexMatrix) -> DVector<Complex64> {
    let gram = h.adjoint() * h;
    let m = gram.nrows();
    let mut v = DVector::from_element(m, Complex64::from(1.0 / (m as f64).sqrt()));
    for _ in 0..32 {
        let next = &gram * &v;
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        v = next / Complex64::from(norm);
    }
    v
}

fn align(z: Complex64) -> f64 {
    if z == Complex64::from(0.0) {
        0.0
    } else {
        -z.arg()
    }
}

/// Co-phasing heuristic for one node.
///
/// Alternates three block updates, each optimal given the others: UAV-RIS
/// phases co-phase the per-element contributions, ground-RIS phases align
/// the cascaded terms with the direct term, and the beam is the matched
/// filter `g^H/‖g‖·√P`. Only column `k_focus` of the beam is nonzero.
pub fn matched_solution(
    k_focus: usize,
    ch: &ChannelSet,
    cfg: &ScenarioConfig,
) -> Result<(PhaseConfig, BeamMatrix)> {
    let (n, f) = ch.h_ur.shape();
    let m = ch.h_bu.ncols();
    let mut ph = PhaseConfig::zeros(f, n);
    check_dims(k_focus, ch, &ph)?;

    let a = Complex64::from(ch.pathloss_cascade[k_focus]);
    let b = Complex64::from(ch.pathloss_bu_k[k_focus]);
    let h_rk = ch.h_rk.row(k_focus);
    let h_uk = ch.h_uk.row(k_focus);
    let mut w = dominant_right_vector(&ch.h_bu);

    for _ in 0..MATCHED_ROUNDS {
        // Signal arriving at each UAV element.
        let t = &ch.h_bu * &w;

        let pr = phasors(&ph.theta_r, false).transpose();
        let per_u = (h_rk.component_mul(&pr) * &ch.h_ur) * a + h_uk * b;
        for i in 0..f {
            ph.theta_u[i] = align(per_u[i] * t[i]);
        }

        let pu = phasors(&ph.theta_u, false);
        let into_ground = &ch.h_ur * pu.component_mul(&t);
        let direct: Complex64 = (0..f).map(|i| h_uk[i] * pu[i] * t[i]).sum::<Complex64>() * b;
        let target = if direct == Complex64::from(0.0) {
            0.0
        } else {
            direct.arg()
        };
        for i in 0..n {
            let term = a * h_rk[i] * into_ground[i];
            ph.theta_r[i] = target + align(term);
        }
        ph.canonicalize();

        let g = effective_dl_channel(k_focus, ch, &ph)?;
        let norm = g.norm();
        if norm == 0.0 {
            return Err(Error::ZeroChannel(k_focus));
        }
        w = g.adjoint().column(0) / Complex64::from(norm);
    }

    let mut beam = ComplexMatrix::zeros(m, ch.num_nodes());
    beam.set_column(k_focus, &(w * Complex64::from(cfg.p_dl.sqrt())));
    let beam = project_power(&beam, cfg.p_dl)?;
    Ok((
        ph,
        BeamMatrix {
            w: beam,
            direction: LinkDirection::Downlink,
        },
    ))
}
