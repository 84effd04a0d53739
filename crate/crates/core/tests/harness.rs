mod common;

use std::collections::BTreeMap;

use cdfreg::harness::{
    compressible_signal, gen_gaussian_matrix, gen_sparse_signal, read_records_csv, run_sweep,
    success_rate, success_table, trial_problem, trial_seed, write_records_csv, ExperimentConfig,
    Magnitudes, Manifest, MatrixScaling,
};
use common::{chi_square_critical_999, chi_square_uniform};

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        n: 60,
        m: 30,
        sparsity_grid: vec![4, 8, 12],
        replicates: 4,
        penalties: vec![
            "l1".into(),
            "weibull(k=1,sigma=1)".into(),
            "exp(sigma=0.5)".into(),
        ],
        ..ExperimentConfig::default()
    }
}

#[test]
fn sparse_signal_examples() {
    let full = gen_sparse_signal(5, 5, 9).unwrap();
    assert!(full.iter().all(|v| *v != 0.0));
    assert_eq!(
        gen_sparse_signal(256, 16, 7).unwrap(),
        gen_sparse_signal(256, 16, 7).unwrap()
    );
    assert_eq!(
        gen_sparse_signal(256, 16, 7)
            .unwrap()
            .iter()
            .filter(|v| **v != 0.0)
            .count(),
        16
    );
    assert!(gen_sparse_signal(4, 5, 0).is_err());
    assert!(gen_sparse_signal(4, 0, 0).is_err());
}

#[test]
fn support_is_uniform_over_indices() {
    let (n, s) = (20, 4);
    let mut counts = vec![0usize; n];
    for seed in 0..10_000 {
        for (j, v) in gen_sparse_signal(n, s, seed).unwrap().iter().enumerate() {
            counts[j] += (*v != 0.0) as usize;
        }
    }
    let stat = chi_square_uniform(&counts);
    assert!(stat < chi_square_critical_999(n - 1), "chi-square {stat}");
    // every index inside 3σ binomial bands
    let p = s as f64 / n as f64;
    let (mean, sd) = (1e4 * p, (1e4 * p * (1.0 - p)).sqrt());
    assert!(
        counts
            .iter()
            .all(|&c| (c as f64 - mean).abs() <= 3.0 * sd + 1.0),
        "{counts:?}"
    );
}

#[test]
fn gaussian_matrix_moments() {
    let m = 64;
    let a = gen_gaussian_matrix(m, 15_625, 3).unwrap();
    let count = a.len() as f64;
    let mean = a.iter().sum::<f64>() / count;
    let var = a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let target = 1.0 / m as f64;
    assert!(mean.abs() <= 3.0 * (target / count).sqrt(), "mean {mean}");
    assert!((var - target).abs() <= 0.01 * target, "variance {var}");
    assert_eq!(
        gen_gaussian_matrix(5, 7, 1).unwrap(),
        gen_gaussian_matrix(5, 7, 1).unwrap()
    );
    assert_ne!(
        gen_gaussian_matrix(5, 7, 1).unwrap(),
        gen_gaussian_matrix(5, 7, 2).unwrap()
    );
}

#[test]
fn compressible_examples() {
    let x = compressible_signal(50, 2.0);
    assert_eq!(x[0], 1.0);
    assert!((x[49] - 4e-4).abs() < 1e-18);
    assert_eq!(compressible_signal(4, 0.0), vec![1.0; 4]);
    let t = compressible_signal(3, 1.0);
    assert_eq!(t, vec![1.0, 0.5, 1.0 / 3.0]);
}

#[test]
fn one_cell_gives_one_record() {
    let cfg = ExperimentConfig {
        sparsity_grid: vec![6],
        replicates: 1,
        penalties: vec!["weibull(k=1,sigma=1)".into()],
        ..ExperimentConfig::default()
    };
    assert_eq!(run_sweep(&cfg).unwrap().len(), 1);
}

#[test]
fn records_are_paired_ordered_and_conserved() {
    let cfg = small_config();
    let recs = run_sweep(&cfg).unwrap();
    assert_eq!(
        recs.len(),
        cfg.penalties.len() * cfg.sparsity_grid.len() * cfg.replicates
    );

    let mut seeds: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    for r in &recs {
        seeds.entry((r.s, r.replicate)).or_default().push(r.seed);
        assert_eq!(r.seed, trial_seed(cfg.master_seed, r.s, r.replicate));
        assert!(r.rel_error >= 0.0);
        assert_eq!(r.success, r.rel_error <= cfg.success_tol);
    }
    assert!(seeds
        .values()
        .all(|v| v.len() == cfg.penalties.len() && v.iter().all(|s| *s == v[0])));

    // the same seed gives the same problem whichever penalty is run on it
    let p1 = trial_problem(
        60,
        30,
        4,
        recs[0].seed,
        Magnitudes::Gaussian,
        MatrixScaling::InverseRows,
    )
    .unwrap();
    let p2 = trial_problem(
        60,
        30,
        4,
        recs[0].seed,
        Magnitudes::Gaussian,
        MatrixScaling::InverseRows,
    )
    .unwrap();
    assert_eq!(p1, p2);

    let order: Vec<(usize, usize, usize)> = recs
        .iter()
        .map(|r| {
            let pi = cfg.penalties.iter().position(|p| {
                p.parse::<cdfreg::solvers::Regularizer>()
                    .unwrap()
                    .to_string()
                    == r.penalty
            });
            (
                pi.unwrap(),
                cfg.sparsity_grid.iter().position(|&s| s == r.s).unwrap(),
                r.replicate,
            )
        })
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn sweeps_are_byte_identical() {
    let cfg = small_config();
    let mut first = Vec::new();
    write_records_csv(&mut first, &run_sweep(&cfg).unwrap()).unwrap();
    let mut second = Vec::new();
    write_records_csv(&mut second, &run_sweep(&cfg).unwrap()).unwrap();
    let mut serial = Vec::new();
    let seq = ExperimentConfig {
        parallel: false,
        ..cfg
    };
    write_records_csv(&mut serial, &run_sweep(&seq).unwrap()).unwrap();
    assert_eq!(first, second);
    assert_eq!(first, serial);
    assert_eq!(read_records_csv(first.as_slice()).unwrap().len(), 36);
}

#[test]
fn rates_and_manifest() {
    let cfg = small_config();
    let recs = run_sweep(&cfg).unwrap();
    let table = success_table(&recs);
    assert_eq!(table.len(), 9);
    for row in &table {
        assert_eq!(
            row.success_rate,
            success_rate(&recs, &row.penalty, row.s).unwrap()
        );
    }
    assert!(success_rate(&recs, "l1", 5).is_err());
    let manifest = Manifest::new(&cfg, &recs);
    assert_eq!(manifest.records, recs.len());
    assert_eq!(manifest.config, cfg);
    assert_eq!(manifest.not_converged.len(), 3);
}

#[test]
fn default_protocol_low_sparsity_is_easy() {
    let cfg = ExperimentConfig {
        sparsity_grid: vec![6],
        penalties: vec!["l1".into(), "weibull(k=1,sigma=1)".into()],
        ..ExperimentConfig::default()
    };
    let recs = run_sweep(&cfg).unwrap();
    assert!(success_rate(&recs, "l1", 6).unwrap() >= 0.95);
    assert!(success_rate(&recs, "weibull(k=1,sigma=1)", 6).unwrap() >= 0.95);
}

#[test]
fn success_falls_with_sparsity() {
    let cfg = ExperimentConfig {
        sparsity_grid: vec![6, 32],
        replicates: 30,
        penalties: vec!["l1".into(), "weibull(k=1,sigma=1)".into()],
        ..ExperimentConfig::default()
    };
    let recs = run_sweep(&cfg).unwrap();
    for p in ["l1", "weibull(k=1,sigma=1)"] {
        let hi = success_rate(&recs, p, 6).unwrap();
        let lo = success_rate(&recs, p, 32).unwrap();
        let se = (hi * (1.0 - hi) / 30.0 + lo * (1.0 - lo) / 30.0).sqrt();
        assert!(hi - lo >= -2.326 * se, "{p}: {hi} vs {lo}");
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let cfg = small_config();
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    assert_eq!(cdfreg::harness::read_config(&path).unwrap(), cfg);
    std::fs::write(&path, r#"{"N": 10, "m": 20}"#).unwrap();
    assert!(cdfreg::harness::read_config(&path).is_err());
}
