//! Monte Carlo oracle: Brownian exit paths from disks, empirical truncated
//! signatures via the concatenation product, and seeded estimates of the
//! expected signature with per-coefficient standard errors.
//!
//! Sampling uses Gaussian increments of variance `dt` per coordinate; the
//! first step that lands outside the disk is cut at its earlier
//! intersection with the circle, so every sampled path ends exactly on the
//! boundary. Exit monitoring at discrete times carries a known `O(sqrt(dt))`
//! bias, which acceptance tests absorb with a calibrated allowance band.
//!
//! Estimates are reproducible: the master seed plus the batch index fully
//! determines every sample (ChaCha8, one stream per batch), and batches are
//! merged in index order no matter how they were scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::disk::PolyTensor;
use crate::scalar::Scalar;
use crate::tensor::TruncatedTensor;

/// Paths per RNG stream; the `(seed, paths, dt)` triple plus this constant
/// pins the batch partition and with it every drawn sample.
pub const BATCH_SIZE: u64 = 512;

/// Hard cap on steps per path; hitting it indicates an insane `dt`.
const MAX_STEPS: u64 = 1_000_000_000;

/// A piecewise-linear path with timestamps, flagged when its final point
/// lies on the target circle.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePath {
    pub times: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub ends_on_boundary: bool,
}

impl PiecewisePath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn clear(&mut self) {
        self.times.clear();
        self.points.clear();
        self.ends_on_boundary = false;
    }

    fn empty() -> Self {
        PiecewisePath {
            times: Vec::new(),
            points: Vec::new(),
            ends_on_boundary: false,
        }
    }
}

/// A Monte Carlo estimate of the expected signature: the mean tensor, the
/// per-word standard error, and the parameters that reproduce it.
#[derive(Clone, Debug)]
pub struct McEstimate {
    pub mean: TruncatedTensor<f64>,
    pub std_err: TruncatedTensor<f64>,
    pub samples: u64,
    pub seed: u64,
    pub dt: f64,
}

/// Samples one Brownian path from `start` until its first exit from the
/// disk of radius `radius` centered at `center`. A start on the circle
/// (within 1e-12) yields a single-point path, already flagged.
pub fn sample_bm_exit(
    start: [f64; 2],
    center: [f64; 2],
    radius: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> PiecewisePath {
    let mut path = PiecewisePath::empty();
    sample_bm_exit_into(start, center, radius, dt, rng, &mut path);
    path
}

fn sample_bm_exit_into(
    start: [f64; 2],
    center: [f64; 2],
    radius: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
    path: &mut PiecewisePath,
) {
    assert!(dt > 0.0, "dt must be positive");
    assert!(radius > 0.0, "radius must be positive");
    let dist = ((start[0] - center[0]).powi(2) + (start[1] - center[1]).powi(2)).sqrt();
    assert!(
        dist <= radius + 1e-9,
        "start point lies outside the disk: |z - c| = {dist} > r = {radius}"
    );
    path.clear();
    path.times.push(0.0);
    path.points.push(start);
    if dist >= radius - 1e-12 {
        path.ends_on_boundary = true;
        return;
    }

    let sqrt_dt = dt.sqrt();
    let mut p = start;
    let mut steps: u64 = 0;
    loop {
        steps += 1;
        assert!(
            steps <= MAX_STEPS,
            "exit not reached after {MAX_STEPS} steps; dt = {dt} is unusable"
        );
        let dx = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        let dy = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        let q = [p[0] + dx, p[1] + dy];
        let qc = [q[0] - center[0], q[1] - center[1]];
        if qc[0] * qc[0] + qc[1] * qc[1] < radius * radius {
            path.times.push(steps as f64 * dt);
            path.points.push(q);
            p = q;
            continue;
        }
        // cut the crossing segment at the earlier circle intersection
        let pc = [p[0] - center[0], p[1] - center[1]];
        let a = dx * dx + dy * dy;
        let b = pc[0] * dx + pc[1] * dy;
        let c0 = pc[0] * pc[0] + pc[1] * pc[1] - radius * radius;
        let theta = if c0 >= 0.0 {
            // already on/outside by rounding: cut at length zero
            0.0
        } else {
            let disc = (b * b - a * c0).max(0.0).sqrt();
            ((-b + disc) / a).clamp(0.0, 1.0)
        };
        let mut exit = [p[0] + theta * dx, p[1] + theta * dy];
        // snap exactly onto the circle
        let ec = [exit[0] - center[0], exit[1] - center[1]];
        let norm = (ec[0] * ec[0] + ec[1] * ec[1]).sqrt();
        if norm > 0.0 {
            let scale = radius / norm;
            exit = [center[0] + ec[0] * scale, center[1] + ec[1] * scale];
        }
        path.times.push((steps as f64 - 1.0 + theta) * dt);
        path.points.push(exit);
        path.ends_on_boundary = true;
        return;
    }
}

/// Truncated signature of a piecewise-linear path: the ordered product of
/// segment signatures. Timestamps are never read, so reparameterization
/// cannot change the result.
pub fn signature_of_path(path: &PiecewisePath, truncation: usize) -> TruncatedTensor<f64> {
    signature_from_points(&path.points, truncation)
}

/// Truncated signature from the vertex list alone (any scalar kind; exact
/// on rational vertices).
pub fn signature_from_points<S: Scalar>(
    points: &[[S; 2]],
    truncation: usize,
) -> TruncatedTensor<S> {
    assert!(!points.is_empty(), "a path needs at least one point");
    let mut sig = TruncatedTensor::unit(2, truncation);
    let mut seg = TruncatedTensor::zeros(2, truncation);
    let mut tmp = TruncatedTensor::zeros(2, truncation);
    for pair in points.windows(2) {
        let inc = [
            pair[1][0].sub(&pair[0][0]),
            pair[1][1].sub(&pair[0][1]),
        ];
        TruncatedTensor::exp_increment_into(&inc, &mut seg);
        sig.mul_into(&seg, &mut tmp);
        std::mem::swap(&mut sig, &mut tmp);
    }
    sig
}

/// Seeded Monte Carlo estimate of the expected signature at `start` for the
/// disk `(center, radius)`. Batches run in parallel but merge in index
/// order, so the result is bit-identical for a given `(seed, paths, dt)`.
pub fn estimate_phi(
    start: [f64; 2],
    center: [f64; 2],
    radius: f64,
    truncation: usize,
    paths: u64,
    dt: f64,
    seed: u64,
) -> McEstimate {
    assert!(paths >= 1, "need at least one path");
    let batches = paths.div_ceil(BATCH_SIZE);
    let coeff_count: usize = (0..=truncation).map(|k| 1usize << k).sum();

    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let count = BATCH_SIZE.min(paths - batch * BATCH_SIZE);
            let mut sum = vec![0.0f64; coeff_count];
            let mut sum_sq = vec![0.0f64; coeff_count];
            let mut path = PiecewisePath::empty();
            let unit = TruncatedTensor::unit(2, truncation);
            let mut sig = unit.clone();
            let mut seg = TruncatedTensor::zeros(2, truncation);
            let mut tmp = TruncatedTensor::zeros(2, truncation);
            for _ in 0..count {
                sample_bm_exit_into(start, center, radius, dt, &mut rng, &mut path);
                sig.clone_from(&unit);
                for pair in path.points.windows(2) {
                    let inc = [pair[1][0] - pair[0][0], pair[1][1] - pair[0][1]];
                    TruncatedTensor::exp_increment_into(&inc, &mut seg);
                    sig.mul_into(&seg, &mut tmp);
                    std::mem::swap(&mut sig, &mut tmp);
                }
                let mut offset = 0;
                for k in 0..=truncation {
                    for (slot, c) in sig.level(k).iter().enumerate() {
                        sum[offset + slot] += c;
                        sum_sq[offset + slot] += c * c;
                    }
                    offset += 1 << k;
                }
            }
            (sum, sum_sq)
        })
        .collect();

    let mut sum = vec![0.0f64; coeff_count];
    let mut sum_sq = vec![0.0f64; coeff_count];
    for (s, sq) in partials {
        for i in 0..coeff_count {
            sum[i] += s[i];
            sum_sq[i] += sq[i];
        }
    }

    let count = paths as f64;
    let mut mean = TruncatedTensor::zeros(2, truncation);
    let mut std_err = TruncatedTensor::zeros(2, truncation);
    let mut offset = 0;
    for k in 0..=truncation {
        let level_len = 1usize << k;
        for slot in 0..level_len {
            let m = sum[offset + slot] / count;
            mean.level_mut(k)[slot] = m;
            if paths >= 2 {
                let var = (sum_sq[offset + slot] - count * m * m).max(0.0) / (count - 1.0);
                std_err.level_mut(k)[slot] = (var / count).sqrt();
            }
        }
        offset += level_len;
    }
    McEstimate {
        mean,
        std_err,
        samples: paths,
        seed,
        dt,
    }
}

/// `pi_2(Psi(w))`: the expected signature of the Brownian path conditioned
/// to exit at `w`, truncated at level 2. The conditioned Levy area vanishes,
/// so level 2 holds only the squared-increment diagonal.
pub fn psi_level2(w: [f64; 2]) -> TruncatedTensor<f64> {
    let mut t = TruncatedTensor::unit(2, 2);
    t.level_mut(1)[0] = w[0];
    t.level_mut(1)[1] = w[1];
    t.level_mut(2)[0] = 0.5 * w[0] * w[0]; // word "11"
    t.level_mut(2)[3] = 0.5 * w[1] * w[1]; // word "22"
    t
}

/// Residual of the circle mean-value identity at truncation 2:
/// `max | (1/2pi) int psi_2(eps e^(i theta)) (x) Phi(z + eps e^(i theta)) dtheta - pi_2(Phi(z)) |`
/// with an `quadrature_points`-point periodic trapezoid rule. The integrand
/// is a low-order trigonometric polynomial, so 1024 points are already
/// exact to rounding.
pub fn mean_value_check(
    z: [f64; 2],
    eps: f64,
    phi: &PolyTensor,
    quadrature_points: usize,
) -> f64 {
    assert!(phi.truncation() >= 2, "needs the field at truncation >= 2");
    assert!(quadrature_points >= 1);
    let phi2 = phi.truncate(2);
    let mut acc = TruncatedTensor::<f64>::zeros(2, 2);
    for k in 0..quadrature_points {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / quadrature_points as f64;
        let w = [eps * theta.cos(), eps * theta.sin()];
        let term = psi_level2(w).mul(&phi2.evaluate_f64([z[0] + w[0], z[1] + w[1]]));
        acc = acc.add(&term);
    }
    let weight = 1.0 / quadrature_points as f64;
    acc = acc.scale(&weight);
    acc.sub(&phi2.evaluate_f64(z)).max_abs()
}
