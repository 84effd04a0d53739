//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code path it is used to check.
#![allow(dead_code)]

use cdfreg::analysis::{kernel_basis, section_ratio};
use cdfreg::penalties::{Family, PenaltyModel};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

/// A random valid parameterization of `family`.
pub fn random_model(family: Family, rng: &mut ChaCha8Rng) -> PenaltyModel {
    let params: Vec<f64> = match family {
        Family::ScadLinear => vec![
            log_uniform(rng, 0.1, 10.0),
            1.05 + 9.0 * rng.random::<f64>(),
        ],
        _ => family
            .param_names()
            .iter()
            .map(|_| log_uniform(rng, 0.2, 5.0))
            .collect(),
    };
    PenaltyModel::new(family, &params).unwrap()
}

pub fn sampleable_families() -> Vec<Family> {
    Family::ALL
        .into_iter()
        .filter(|&f| f != Family::DiracDelta)
        .collect()
}

/// Adaptive Simpson on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + h * i as f64)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Exponent `a` of the `t^(a-1)` behaviour of the density near zero.
fn small_t_exponent(model: &PenaltyModel) -> f64 {
    let p = model.params();
    match model.family() {
        Family::Weibull | Family::ChiSquared => p[0],
        Family::GeneralizedGamma => p[1],
        Family::GeneralizedBetaPrime => p[2] * p[0],
        _ => 1.0,
    }
}

/// `∫₀ᵗ pdf` by adaptive Simpson. Kinks of bounded-support densities are
/// integration breakpoints; an integrable singularity at zero is removed by
/// the substitution `t = u^r`.
pub fn cdf_by_quadrature(model: &PenaltyModel, t: f64) -> f64 {
    let mut cuts = vec![0.0, t];
    if let Some(end) = model.support_end() {
        cuts.push(end.min(t));
    }
    if model.family() == Family::ScadLinear {
        cuts.push(model.params()[0].min(t));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let a = small_t_exponent(model);
    let r = if a < 1.0 { 2.0 / a } else { 1.0 };
    let g = |u: f64| {
        if u <= 0.0 {
            return if r == 1.0 {
                model.pdf(0.0).unwrap()
            } else {
                0.0
            };
        }
        r * u.powf(r - 1.0) * model.pdf(u.powf(r)).unwrap()
    };
    cuts.windows(2)
        .map(|w| simpson(&g, w[0].powf(1.0 / r), w[1].powf(1.0 / r), 1e-12))
        .sum()
}

/// Weighted lasso by cyclic coordinate descent.
pub fn cd_lasso(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
    lambda: f64,
    sweeps: usize,
) -> DVector<f64> {
    let n = a.ncols();
    let mut x: DVector<f64> = DVector::zeros(n);
    let mut r = y.clone();
    let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm_squared()).collect();
    for _ in 0..sweeps {
        let mut change: f64 = 0.0;
        for j in 0..n {
            if norms[j] == 0.0 {
                continue;
            }
            let rho: f64 = a.column(j).dot(&r) + norms[j] * x[j];
            let tau = lambda * w[j];
            let new = rho.signum() * (rho.abs() - tau).max(0.0) / norms[j];
            let d = new - x[j];
            if d != 0.0 {
                r.axpy(-d, &a.column(j), 1.0);
                x[j] = new;
                change = change.max(d.abs());
            }
        }
        if change < 1e-16 {
            break;
        }
    }
    x
}

pub fn lasso_objective(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    w: &[f64],
    lambda: f64,
    x: &DVector<f64>,
) -> f64 {
    let l1: f64 = x.iter().zip(w).map(|(v, wj)| wj * v.abs()).sum();
    0.5 * (y - a * x).norm_squared() + lambda * l1
}

/// Smallest section ratio over `samples` uniform directions in the kernel.
pub fn mc_delta_q(a: &DMatrix<f64>, q: f64, samples: usize, seed: u64) -> f64 {
    let kernel = kernel_basis(a).unwrap();
    let d = kernel.dim();
    let mut rng = rng(seed);
    let mut best = f64::INFINITY;
    let mut coords = vec![0.0; d];
    for _ in 0..samples {
        for c in coords.iter_mut() {
            *c = rng.sample(StandardNormal);
        }
        let v = kernel.basis() * DVector::from_column_slice(&coords);
        best = best.min(section_ratio(v.as_slice(), q));
    }
    best
}

/// All `s`-subsets of `0..n`.
pub fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

/// `J(v_S)` computed entrywise from the CDF.
pub fn restricted_penalty(model: &PenaltyModel, v: &[f64], support: &[usize]) -> f64 {
    support
        .iter()
        .map(|&j| model.cdf(v[j].abs()).unwrap())
        .sum()
}

/// Pearson chi-square statistic against equal expected counts.
pub fn chi_square_uniform(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

/// Upper 0.1% point of chi-square with `k` degrees of freedom, by the
/// Wilson–Hilferty approximation.
pub fn chi_square_critical_999(k: usize) -> f64 {
    let k = k as f64;
    let z = 3.090_232;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}
