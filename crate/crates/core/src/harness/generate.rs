use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::solvers::MeasurementProblem;

/// Distribution of the nonzero entries of a simulated sparse signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitudes {
    #[default]
    Gaussian,
    Rademacher,
}

/// Entry variance convention of the Gaussian measurement matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixScaling {
    /// Entries `N(0, 1/m)`, so columns have roughly unit norm.
    #[default]
    InverseRows,
    /// Entries `N(0, 1)`.
    Unit,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: a fixed hash of `(master_seed, s, replicate)`.
pub fn trial_seed(master_seed: u64, s: usize, replicate: usize) -> u64 {
    mix64(mix64(mix64(master_seed) ^ s as u64) ^ (replicate as u64).rotate_left(32))
}

fn matrix_seed(trial_seed: u64) -> u64 {
    mix64(trial_seed ^ 0x4d41_5452_4958)
}

fn signal_seed(trial_seed: u64) -> u64 {
    mix64(trial_seed ^ 0x5349_474e_414c)
}

/// The noiseless problem `y = A x` of one trial. The matrix and the signal
/// come from independent streams split off `trial_seed`.
pub fn trial_problem(
    n: usize,
    m: usize,
    s: usize,
    trial_seed: u64,
    magnitudes: Magnitudes,
    scaling: MatrixScaling,
) -> Result<MeasurementProblem, HarnessError> {
    let a = gen_gaussian_matrix_with(m, n, matrix_seed(trial_seed), scaling)?;
    let x = gen_sparse_signal_with(n, s, signal_seed(trial_seed), magnitudes)?;
    MeasurementProblem::noiseless(a, x).map_err(|e| HarnessError::Config(e.to_string()))
}

/// `s`-sparse signal of length `n` with a uniformly random support.
pub fn gen_sparse_signal(n: usize, s: usize, seed: u64) -> Result<DVector<f64>, HarnessError> {
    gen_sparse_signal_with(n, s, seed, Magnitudes::Gaussian)
}

pub fn gen_sparse_signal_with(
    n: usize,
    s: usize,
    seed: u64,
    magnitudes: Magnitudes,
) -> Result<DVector<f64>, HarnessError> {
    if s == 0 || s > n {
        return Err(HarnessError::Config(format!(
            "sparsity {s} must be in 1..={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = index::sample(&mut rng, n, s);
    let mut x = DVector::zeros(n);
    for j in support.iter() {
        x[j] = match magnitudes {
            Magnitudes::Gaussian => loop {
                // a draw of exactly 0 would break the sparsity count
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    break v;
                }
            },
            Magnitudes::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        };
    }
    Ok(x)
}

/// `m × n` matrix with i.i.d. `N(0, 1/m)` entries.
pub fn gen_gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<DMatrix<f64>, HarnessError> {
    gen_gaussian_matrix_with(m, n, seed, MatrixScaling::InverseRows)
}

pub fn gen_gaussian_matrix_with(
    m: usize,
    n: usize,
    seed: u64,
    scaling: MatrixScaling,
) -> Result<DMatrix<f64>, HarnessError> {
    if m == 0 || n == 0 {
        return Err(HarnessError::Config(format!(
            "matrix shape {m}x{n} is empty"
        )));
    }
    let std = match scaling {
        MatrixScaling::InverseRows => (1.0 / m as f64).sqrt(),
        MatrixScaling::Unit => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DMatrix::from_fn(m, n, |_, _| {
        std * rng.sample::<f64, _>(StandardNormal)
    }))
}

/// Compressible signal with entries `j^(-exponent)`, `j = 1..=n`.
pub fn compressible_signal(n: usize, exponent: f64) -> Vec<f64> {
    (1..=n).map(|j| (j as f64).powf(-exponent)).collect()
}
