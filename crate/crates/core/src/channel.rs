//! Per-slot channel realization.
//!
//! Every link is a Rician mix of a rank-one line-of-sight term built from
//! array steering vectors and an i.i.d. CN(0, 1) scattered term. The three
//! links touching the UAV (BS→UAV, UAV→ground RIS, UAV→node) see their
//! line-of-sight angles perturbed by a bounded jitter draw.
//!
//! Randomness is partitioned into independent streams keyed by
//! `(seed, slot, link, row)`. Growing an array therefore leaves the draws of
//! existing elements and of unrelated links untouched, which keeps paired
//! comparisons across array sizes or jitter levels tight.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scenario::{link_angles, link_distance, LinkAngles, Position3, ScenarioConfig};
use crate::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// One angular jitter draw for a single link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JitterDraw {
    pub d_azimuth: f64,
    pub d_elevation: f64,
}

/// All channels of one slot.
///
/// Downlink orientations: `h_bu` is F×M (BS antennas to UAV elements),
/// `h_ur` is N×F, `h_rk` is K×N and `h_uk` is K×F with one row per node.
/// Uplink channels are the Hermitian transposes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_bu: ComplexMatrix,
    pub h_ur: ComplexMatrix,
    pub h_rk: ComplexMatrix,
    pub h_uk: ComplexMatrix,
    /// BS→UAV→ground RIS→node amplitude.
    pub pathloss_cascade: Vec<f64>,
    pub pathloss_direct_rk: Vec<f64>,
    pub pathloss_direct_uk: Vec<f64>,
    /// BS→UAV→node amplitude.
    pub pathloss_bu_k: Vec<f64>,
}

impl ChannelSet {
    pub fn num_nodes(&self) -> usize {
        self.h_rk.nrows()
    }

    pub fn h_ub(&self) -> ComplexMatrix {
        self.h_bu.adjoint()
    }

    pub fn h_ru(&self) -> ComplexMatrix {
        self.h_ur.adjoint()
    }

    pub fn h_kr(&self) -> ComplexMatrix {
        self.h_rk.adjoint()
    }

    pub fn h_ku(&self) -> ComplexMatrix {
        self.h_uk.adjoint()
    }
}

/// Which random stream a draw comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    NlosBu = 1,
    NlosUr = 2,
    NlosRk = 3,
    NlosUk = 4,
    JitterBu = 5,
    JitterUr = 6,
    JitterUk = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, slot, stream, index)`.
pub fn stream_rng(seed: u64, slot: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for word in [slot, stream as u64, index] {
        h = splitmix64(h ^ word);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Array response of a uniform linear array:
/// entry `m` is `exp(−j·2π·spacing_ratio·m·dir_cos)`.
pub fn steering_vector(n: usize, spacing_ratio: f64, dir_cos: f64) -> Result<DVector<Complex64>> {
    if dir_cos.is_nan() || dir_cos.abs() > 1.0 + 1e-12 {
        return Err(Error::DirectionCosine(dir_cos));
    }
    if n == 0 {
        return Err(Error::Shape(
            "steering vector needs at least one element".into(),
        ));
    }
    Ok(DVector::from_iterator(
        n,
        (0..n).map(|m| Complex64::from_polar(1.0, -TAU * spacing_ratio * m as f64 * dir_cos)),
    ))
}

/// Response of a `rows × cols` uniform rectangular array: the Kronecker
/// product of the x-axis and z-axis steering vectors, element `i·cols + j`.
pub fn ura_response(
    dims: (usize, usize),
    spacing_ratio: f64,
    angles: &LinkAngles,
) -> Result<DVector<Complex64>> {
    let (cx, cz) = angles.direction_cosines();
    let ax = steering_vector(dims.0, spacing_ratio, cx)?;
    let az = steering_vector(dims.1, spacing_ratio, cz)?;
    Ok(ax.kronecker(&az))
}

/// Rank-one line-of-sight matrix between two arrays along one link.
pub fn los_matrix(
    angles: &LinkAngles,
    rows_dims: (usize, usize),
    cols_dims: (usize, usize),
    spacing_ratio: f64,
) -> Result<ComplexMatrix> {
    let r = ura_response(rows_dims, spacing_ratio, angles)?;
    let c = ura_response(cols_dims, spacing_ratio, angles)?;
    Ok(&r * c.transpose())
}

/// I.i.d. CN(0, 1) entries drawn in row-major order.
pub fn sample_nlos<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let draws = (0..rows * cols).map(|_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    DMatrix::from_row_iterator(rows, cols, draws)
}

/// `sqrt(ζ/(1+ζ))·los + sqrt(1/(1+ζ))·nlos`.
pub fn mix_rician(zeta: f64, los: &ComplexMatrix, nlos: &ComplexMatrix) -> Result<ComplexMatrix> {
    if los.shape() != nlos.shape() {
        return Err(Error::Shape(format!(
            "LoS is {:?} but NLoS is {:?}",
            los.shape(),
            nlos.shape()
        )));
    }
    if zeta.is_nan() || zeta < 0.0 {
        return Err(Error::invariant("rician", zeta, "must be >= 0"));
    }
    let (w_los, w_nlos) = rician_weights(zeta);
    Ok(los * Complex64::from(w_los) + nlos * Complex64::from(w_nlos))
}

/// The `(LoS, NLoS)` amplitude weights for Rician factor ζ.
pub fn rician_weights(zeta: f64) -> (f64, f64) {
    if zeta.is_infinite() {
        return (1.0, 0.0);
    }
    ((zeta / (1.0 + zeta)).sqrt(), (1.0 / (1.0 + zeta)).sqrt())
}

/// Uniform draw over the disc `Δaz² + Δel² ≤ ψ²`.
///
/// The same two uniforms are consumed for every ψ, so draws scale linearly
/// with the bound for a fixed generator state.
pub fn sample_jitter<R: Rng + ?Sized>(rng: &mut R, psi: f64) -> JitterDraw {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let r = psi * u.sqrt();
    let phi = TAU * v;
    let draw = JitterDraw {
        d_azimuth: r * phi.cos(),
        d_elevation: r * phi.sin(),
    };
    // Guard against rounding pushing the point a hair outside the disc.
    let norm2 = draw.d_azimuth * draw.d_azimuth + draw.d_elevation * draw.d_elevation;
    if norm2 > psi * psi && norm2 > 0.0 {
        let s = psi / norm2.sqrt();
        JitterDraw {
            d_azimuth: draw.d_azimuth * s,
            d_elevation: draw.d_elevation * s,
        }
    } else {
        draw
    }
}

/// Amplitude `sqrt(β · (Π d_i)^(−α))` of a multi-hop path.
pub fn cascaded_pathloss(beta_ref: f64, alpha: f64, hops: &[f64]) -> Result<f64> {
    let mut product = 1.0;
    for &d in hops {
        if d.is_nan() || d <= 0.0 {
            return Err(Error::NonPositiveDistance(d));
        }
        product *= d;
    }
    Ok((beta_ref * product.powf(-alpha)).sqrt())
}

/// Amplitude `sqrt(β)·d^(−ε/2)` of a single hop (power falls as `d^(−ε)`).
pub fn direct_pathloss(beta_ref: f64, eps: f64, d: f64) -> Result<f64> {
    if d.is_nan() || d <= 0.0 {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(beta_ref.sqrt() * d.powf(-eps / 2.0))
}

/// Identifies the random streams for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotSeed {
    pub seed: u64,
    pub slot: u64,
}

fn jitter_bound(fixed: f64, ratio: Option<f64>, nominal: &LinkAngles) -> f64 {
    match ratio {
        Some(r) => r * nominal.azimuth.abs(),
        None => fixed,
    }
}

fn jittered(
    nominal: LinkAngles,
    psi: f64,
    seed: SlotSeed,
    stream: Stream,
    index: u64,
) -> LinkAngles {
    let mut rng = stream_rng(seed.seed, seed.slot, stream, index);
    let j = sample_jitter(&mut rng, psi);
    nominal.perturbed(j.d_azimuth, j.d_elevation)
}

/// Draw a matrix one row per stream index so that rows and columns nest.
fn nlos_rows(rows: usize, cols: usize, seed: SlotSeed, stream: Stream) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        let mut rng = stream_rng(seed.seed, seed.slot, stream, r as u64);
        m.set_row(r, &sample_nlos(&mut rng, 1, cols).row(0));
    }
    m
}

/// Realize every channel of one slot with the UAV at `uav_pos`.
///
/// Pure in `(cfg, uav_pos, seed.seed, seed.slot)`.
pub fn realize_channels(
    cfg: &ScenarioConfig,
    uav_pos: &Position3,
    seed: SlotSeed,
) -> Result<ChannelSet> {
    let k_nodes = cfg.num_nodes();
    let f_dims = (cfg.flying_rows, cfg.flying_cols);
    let n_dims = (cfg.ground_rows, cfg.ground_cols);
    let (f, n, m) = (
        cfg.flying_elements(),
        cfg.ground_elements(),
        cfg.bs_antennas,
    );
    let ratio = cfg.spacing_ratio;

    // BS → UAV: UAV-side URA response times BS-side ULA response.
    let nominal_bu = link_angles(&cfg.bs_pos, uav_pos)?;
    let psi_bu = jitter_bound(cfg.jitter_psi.bu, cfg.jitter_ratio, &nominal_bu);
    let angles_bu = jittered(nominal_bu, psi_bu, seed, Stream::JitterBu, 0);
    let los_bu = los_matrix(&angles_bu, f_dims, (m, 1), ratio)?;
    let h_bu = mix_rician(
        cfg.rician.bu,
        &los_bu,
        &nlos_rows(f, m, seed, Stream::NlosBu),
    )?;

    // UAV → ground RIS.
    let nominal_ur = link_angles(uav_pos, &cfg.ris_pos)?;
    let psi_ur = jitter_bound(cfg.jitter_psi.ur, cfg.jitter_ratio, &nominal_ur);
    let angles_ur = jittered(nominal_ur, psi_ur, seed, Stream::JitterUr, 0);
    let los_ur = los_matrix(&angles_ur, n_dims, f_dims, ratio)?;
    let h_ur = mix_rician(
        cfg.rician.ur,
        &los_ur,
        &nlos_rows(n, f, seed, Stream::NlosUr),
    )?;

    let mut los_rk = ComplexMatrix::zeros(k_nodes, n);
    let mut los_uk = ComplexMatrix::zeros(k_nodes, f);
    let d_bu = link_distance(&cfg.bs_pos, uav_pos);
    let d_ur = link_distance(uav_pos, &cfg.ris_pos);
    let mut pathloss_cascade = Vec::with_capacity(k_nodes);
    let mut pathloss_direct_rk = Vec::with_capacity(k_nodes);
    let mut pathloss_direct_uk = Vec::with_capacity(k_nodes);
    let mut pathloss_bu_k = Vec::with_capacity(k_nodes);

    for (k, node) in cfg.node_pos.iter().enumerate() {
        // Ground RIS → node: fixed geometry, no jitter.
        let angles_rk = link_angles(&cfg.ris_pos, node)?;
        los_rk.set_row(k, &ura_response(n_dims, ratio, &angles_rk)?.transpose());

        let nominal_uk = link_angles(uav_pos, node)?;
        let psi_uk = jitter_bound(cfg.jitter_psi.uk, cfg.jitter_ratio, &nominal_uk);
        let angles_uk = jittered(nominal_uk, psi_uk, seed, Stream::JitterUk, k as u64);
        los_uk.set_row(k, &ura_response(f_dims, ratio, &angles_uk)?.transpose());

        let d_rk = link_distance(&cfg.ris_pos, node);
        let d_uk = link_distance(uav_pos, node);
        pathloss_cascade.push(cascaded_pathloss(
            cfg.beta_ref,
            cfg.alpha_cascade,
            &[d_bu, d_ur, d_rk],
        )?);
        pathloss_bu_k.push(cascaded_pathloss(
            cfg.beta_ref,
            cfg.alpha_cascade,
            &[d_bu, d_uk],
        )?);
        pathloss_direct_rk.push(direct_pathloss(cfg.beta_ref, cfg.eps_direct, d_rk)?);
        pathloss_direct_uk.push(direct_pathloss(cfg.beta_ref, cfg.eps_direct, d_uk)?);
    }

    let h_rk = mix_rician(
        cfg.rician.rk,
        &los_rk,
        &nlos_rows(k_nodes, n, seed, Stream::NlosRk),
    )?;
    let h_uk = mix_rician(
        cfg.rician.uk,
        &los_uk,
        &nlos_rows(k_nodes, f, seed, Stream::NlosUk),
    )?;

    Ok(ChannelSet {
        h_bu,
        h_ur,
        h_rk,
        h_uk,
        pathloss_cascade,
        pathloss_direct_rk,
        pathloss_direct_uk,
        pathloss_bu_k,
    })
}
