use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    float_or_inf, kernel_basis, lq_norm, validate_q, AnalysisError, KernelParameterization,
};

/// How a [`DeltaEstimate`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DeltaMode {
    /// One-dimensional kernel: the single ray gives the value.
    Exact,
    /// Two-dimensional kernel: circle search.
    Grid,
    /// Higher-dimensional kernel: minimum over random directions, which can
    /// only overestimate the infimum.
    UpperBound,
    /// Trivial kernel; the value is `+∞`.
    EmptyKernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    #[serde(with = "float_or_inf")]
    pub value: f64,
    pub mode: DeltaMode,
    #[serde(with = "float_or_inf")]
    pub q: f64,
    pub kernel_dim: usize,
    /// Grid points (d = 2) or random directions (d ≥ 3) examined.
    pub grid: usize,
    /// Seed of the random directions; only set for d ≥ 3.
    pub seed: Option<u64>,
    /// Kernel vector attaining `value`; empty for a trivial kernel.
    pub minimizer: Vec<f64>,
}

/// `(‖v‖₁ / ‖v‖_q)^(q/(q−1))`, with exponent 1 at `q = ∞`.
pub fn section_ratio(v: &[f64], q: f64) -> f64 {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    let lq = lq_norm(v, q);
    if lq == 0.0 {
        return f64::NAN;
    }
    let r = l1 / lq;
    if q.is_infinite() {
        r
    } else {
        r.powf(q / (q - 1.0))
    }
}

/// Spherical-section constant: the infimum of [`section_ratio`] over the
/// nonzero kernel vectors of `a`. Random directions use seed 0.
pub fn delta_q(a: &DMatrix<f64>, q: f64, grid: usize) -> Result<DeltaEstimate, AnalysisError> {
    delta_q_seeded(a, q, grid, 0)
}

pub fn delta_q_seeded(
    a: &DMatrix<f64>,
    q: f64,
    grid: usize,
    seed: u64,
) -> Result<DeltaEstimate, AnalysisError> {
    validate_q(q)?;
    if grid == 0 {
        return Err(AnalysisError::Input("grid must be positive".into()));
    }
    let kernel = kernel_basis(a)?;
    let d = kernel.dim();
    let mut est = DeltaEstimate {
        value: f64::INFINITY,
        mode: DeltaMode::EmptyKernel,
        q,
        kernel_dim: d,
        grid: 0,
        seed: None,
        minimizer: Vec::new(),
    };
    match d {
        0 => {}
        1 => {
            let v = kernel.embed(&[1.0]);
            est.value = section_ratio(&v, q);
            est.minimizer = v;
            est.mode = DeltaMode::Exact;
        }
        2 => {
            let (value, v) = circle_search(&kernel, q, grid);
            est.value = value;
            est.minimizer = v;
            est.mode = DeltaMode::Grid;
            est.grid = grid;
        }
        _ => {
            let (value, v) = sphere_sample(&kernel, q, grid, seed);
            est.value = value;
            est.minimizer = v;
            est.mode = DeltaMode::UpperBound;
            est.grid = grid;
            est.seed = Some(seed);
        }
    }
    Ok(est)
}

fn circle_point(kernel: &KernelParameterization, theta: f64) -> Vec<f64> {
    kernel.embed(&[theta.cos(), theta.sin()])
}

/// Grid over half the circle (the ratio is even), golden-section refinement
/// around the best cell, and the angles where some entry of `v` vanishes.
/// Between two such angles `‖v‖₁` is linear, so the ratio is quasiconcave
/// there and its minimum sits at one of those angles.
fn circle_search(kernel: &KernelParameterization, q: f64, grid: usize) -> (f64, Vec<f64>) {
    let f = |theta: f64| section_ratio(&circle_point(kernel, theta), q);
    let step = PI / grid as f64;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..grid {
        let theta = i as f64 * step;
        let val = f(theta);
        if val < best.0 {
            best = (val, theta);
        }
    }

    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    for (val, theta) in [(fc, c), (fd, d)] {
        if val < best.0 {
            best = (val, theta);
        }
    }

    let basis = kernel.basis();
    for j in 0..kernel.ambient_dim() {
        let (b1, b2) = (basis[(j, 0)], basis[(j, 1)]);
        if b1 == 0.0 && b2 == 0.0 {
            continue;
        }
        let theta = (-b1).atan2(b2);
        let val = f(theta);
        if val < best.0 {
            best = (val, theta);
        }
    }
    (best.0, circle_point(kernel, best.1))
}

fn sphere_sample(
    kernel: &KernelParameterization,
    q: f64,
    samples: usize,
    seed: u64,
) -> (f64, Vec<f64>) {
    let d = kernel.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, Vec::new());
    let mut coords = vec![0.0; d];
    for i in 0..d + samples {
        if i < d {
            coords
                .iter_mut()
                .enumerate()
                .for_each(|(k, c)| *c = (k == i) as u8 as f64);
        } else {
            coords
                .iter_mut()
                .for_each(|c| *c = StandardNormal.sample(&mut rng));
        }
        let v = kernel.embed(&coords);
        let val = section_ratio(&v, q);
        if val < best.0 {
            best = (val, v);
        }
    }
    best
}
