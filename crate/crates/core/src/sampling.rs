//! Seeded random states and local operators.
//!
//! Every generator takes the RNG explicitly. [`rng_from_seed`] and [`trial_rng`]
//! build ChaCha20 streams, so a `(seed, trial)` pair always yields the same draws
//! regardless of how trials are scheduled.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::bloch::{DensityState, GroupTag, LocalOperatorChain, PureState};
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_COND_CAP: f64 = 20.0;
pub const MAX_SL_ATTEMPTS: usize = 1000;

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of iid standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)`
/// moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = ginibre(d, d, rng).to_nalgebra();
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Matrix::from_nalgebra(&q)
}

/// Haar-distributed rotation in `SO(k)`.
pub fn random_rotation<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Matrix {
    let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Matrix::from_fn(k, k, |i, j| Complex64::new(q[(i, j)], 0.0))
}

/// `1 ⊕ Q` with `Q` Haar in `SO(d² − 1)`: a rotation of a `d`-dimensional Bloch
/// basis that keeps the identity element in place.
pub fn random_bloch_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let n = d * d;
    let q = random_rotation(n - 1, rng);
    Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (0, _) | (_, 0) => Complex64::new(0.0, 0.0),
        _ => q[(i - 1, j - 1)],
    })
}

/// Ratio of the largest to the smallest singular value.
pub fn condition_number(m: &Matrix) -> f64 {
    let sv = m.to_nalgebra().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlSample {
    pub matrix: Matrix,
    /// Draws rejected for exceeding the condition cap.
    pub resamples: usize,
}

/// Ginibre matrix divided by the principal `d`-th root of its determinant,
/// redrawn while its condition number exceeds `cond_cap`.
pub fn random_sl<R: Rng + ?Sized>(d: usize, rng: &mut R, cond_cap: f64) -> Result<SlSample> {
    for attempt in 0..MAX_SL_ATTEMPTS {
        let g = ginibre(d, d, rng);
        let det = g.det()?;
        if det.norm() == 0.0 {
            continue;
        }
        let root = det.powf(1.0 / d as f64);
        let m = g.scale(root.inv());
        if condition_number(&m) <= cond_cap {
            return Ok(SlSample { matrix: m, resamples: attempt });
        }
    }
    Err(Error::Sampling(format!("no SL({d}) sample with condition number ≤ {cond_cap} in {MAX_SL_ATTEMPTS} attempts")))
}

/// One random operator per party from the tagged group; returns the total number
/// of condition-cap rejections alongside the chain.
pub fn random_chain<R: Rng + ?Sized>(
    dims: &[usize],
    tag: GroupTag,
    rng: &mut R,
    cond_cap: f64,
) -> Result<(LocalOperatorChain, usize)> {
    let mut resamples = 0;
    let mut ops = Vec::with_capacity(dims.len());
    for &d in dims {
        ops.push(match tag {
            GroupTag::Unitary => random_unitary(d, rng),
            GroupTag::SpecialLinear => {
                let s = random_sl(d, rng, cond_cap)?;
                resamples += s.resamples;
                s.matrix
            }
            GroupTag::GeneralLinear => ginibre(d, d, rng),
        });
    }
    Ok((LocalOperatorChain::new(ops, tag)?, resamples))
}

/// `Σ_r v_r v_r†` over `rank` iid complex Gaussian vectors, scaled to unit trace.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityState> {
    if rank < 1 {
        return invalid("rank must be at least 1");
    }
    let n: usize = dims.iter().product();
    let vs = ginibre(n, rank, rng);
    let mut rho = &vs * &vs.adjoint();
    let tr = rho.trace()?;
    rho = rho.scale(tr.inv());
    DensityState::new(dims.to_vec(), rho)
}

/// Normalized pure state with iid complex Gaussian amplitudes.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let n: usize = dims.iter().product();
    let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(dims.to_vec(), v.into_iter().map(|z| z / norm).collect())
}
