use nalgebra::DMatrix;

use super::AnalysisError;

/// Relative singular-value cutoff for deciding the numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Orthonormal basis of `Ker(A)`, stored as the columns of an `N × d`
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParameterization {
    basis: DMatrix<f64>,
    largest_singular_value: f64,
}

impl KernelParameterization {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Kernel dimension `d`.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Ambient dimension `N`.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.largest_singular_value
    }

    /// Maps kernel coordinates `c` to `v = B c`.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let n = self.ambient_dim();
        let mut v = vec![0.0; n];
        for (k, &c) in coords.iter().enumerate() {
            let col = self.basis.column(k);
            for (vi, bi) in v.iter_mut().zip(col.iter()) {
                *vi += c * bi;
            }
        }
        v
    }
}

/// Null space of `a` from the SVD of `a` padded with zero rows to square.
pub fn kernel_basis(a: &DMatrix<f64>) -> Result<KernelParameterization, AnalysisError> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(AnalysisError::Input(format!("matrix is {m}x{n}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::Input("matrix has non-finite entries".into()));
    }
    let square = if m < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.rows_mut(0, m).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = square.svd(false, true);
    let sigma = &svd.singular_values;
    let smax = sigma.max();
    if smax == 0.0 {
        return Err(AnalysisError::Input("matrix is zero".into()));
    }
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let cutoff = RANK_THRESHOLD * smax;
    let null_rows: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= cutoff).collect();
    let mut basis = DMatrix::zeros(n, null_rows.len());
    for (k, &i) in null_rows.iter().enumerate() {
        basis.set_column(k, &v_t.row(i).transpose());
    }
    Ok(KernelParameterization {
        basis,
        largest_singular_value: smax,
    })
}
