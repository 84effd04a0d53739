//! A reduced phase-transition sweep: success rate against sparsity for l1
//! and three Weibull penalties, every penalty run on the same problems.
//! Pass a directory to also write results.csv, success_rates.csv and
//! manifest.json there.

use std::path::PathBuf;

use cdfreg::harness::{
    run_sweep, success_table, write_manifest, write_records_csv, write_success_csv,
    ExperimentConfig, Manifest,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        sparsity_grid: vec![8, 12, 16, 20, 24, 28],
        replicates: 20,
        penalties: vec![
            "l1".into(),
            "weibull(k=1,sigma=1)".into(),
            "weibull(k=0.5,sigma=10)".into(),
            "weibull(k=1,sigma=100)".into(),
        ],
        ..ExperimentConfig::default()
    };
    let records = run_sweep(&cfg)?;
    let rates = success_table(&records);

    print!("{:<26}", "penalty \\ s");
    for s in &cfg.sparsity_grid {
        print!("{s:>6}");
    }
    for (i, row) in rates.iter().enumerate() {
        if i % cfg.sparsity_grid.len() == 0 {
            print!("\n{:<26}", row.penalty);
        }
        print!("{:>6.2}", row.success_rate);
    }
    println!();

    if let Some(dir) = std::env::args_os().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        write_records_csv(std::fs::File::create(dir.join("results.csv"))?, &records)?;
        write_success_csv(
            std::fs::File::create(dir.join("success_rates.csv"))?,
            &rates,
        )?;
        write_manifest(&dir.join("manifest.json"), &Manifest::new(&cfg, &records))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
