//! Recovery-condition diagnostics for a Gaussian 48 x 50 matrix: a search
//! for null-space property violations, the spherical-section constant of its
//! two-dimensional kernel, and the error bound that constant implies.

use cdfreg::analysis::{delta_q, gnsp_falsify, recovery_bound, GnspVerdict};
use cdfreg::harness::gen_gaussian_matrix;
use cdfreg::penalties::PenaltyModel;

fn main() {
    let a = gen_gaussian_matrix(48, 50, 11).unwrap();
    let model = PenaltyModel::weibull(0.5, 1.0).unwrap();

    for s in [1, 3, 8] {
        let report = gnsp_falsify(&a, s, &model, 20_000, 1).unwrap();
        match report.verdict {
            GnspVerdict::Falsified { support, support_penalty, complement_penalty, .. } => println!(
                "s = {s}: violated on support {support:?}, J(v_S) = {support_penalty:.3} >= J(v_Sc) = {complement_penalty:.3}"
            ),
            GnspVerdict::NotFalsified => {
                println!("s = {s}: no violation in {} kernel vectors", report.vectors_checked)
            }
        }
    }

    for q in [2.0, f64::INFINITY] {
        let delta = delta_q(&a, q, 4096).unwrap();
        println!(
            "\nq = {q}: Delta = {:.4} ({:?}, kernel dim {})",
            delta.value, delta.mode, delta.kernel_dim
        );
        for s in [1, 4, 8] {
            let b = recovery_bound(delta.value, q, a.ncols(), &model, s).unwrap();
            println!(
                "  s = {s}: error bound {:.4} (needs s < {:.3}: {})",
                b.bound_value, b.s_max, b.sparsity_condition
            );
        }
    }

    // the kernel of [1 1] is spanned by (1, -1), which breaks every s = 1 condition
    let ones = nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    let r = gnsp_falsify(&ones, 1, &model, 100, 0).unwrap();
    println!(
        "\nA = [1 1], s = 1: falsified = {}",
        r.verdict.is_falsified()
    );
}
