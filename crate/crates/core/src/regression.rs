//! Fixed designs, OLS fits and the residual-maker `P = I − X(X′X)⁻¹X′`.

use alloc::vec::Vec;

use crate::linalg::{HouseholderQr, Matrix};
use crate::{Error, Result};

/// An n×p design with n > p ≥ 1, certified full column rank at construction.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    entries: Matrix,
    qr: HouseholderQr,
}

impl DesignMatrix {
    pub fn new(entries: Matrix) -> Result<Self> {
        let (n, p) = (entries.rows(), entries.cols());
        if p == 0 || n <= p {
            return Err(Error::InvalidShape { n, p });
        }
        if !entries.all_finite() {
            return Err(Error::NonFinite("design matrix"));
        }
        let qr = HouseholderQr::factor(&entries)?;
        Ok(Self { entries, qr })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn p(&self) -> usize {
        self.entries.cols()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn factorization(&self) -> &HouseholderQr {
        &self.qr
    }

    /// Orthonormal basis of the column space.
    pub fn basis(&self) -> Matrix {
        self.qr.thin_q()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Least squares through the Householder factorization of `X`; the normal
/// equations are never formed.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch {
            what: "response length",
            expected: x.n(),
            found: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("response"));
    }
    let (beta, residuals) = x.qr.solve(y);
    Ok(OlsFit { beta, residuals })
}

/// Symmetric idempotent n×n residual-maker of rank n − p, with the basis of
/// the complementary (column) space kept alongside.
#[derive(Debug, Clone)]
pub struct ProjectionMatrix {
    p_mat: Matrix,
    basis: Matrix,
}

impl ProjectionMatrix {
    pub fn n(&self) -> usize {
        self.p_mat.rows()
    }

    /// Number of covariates (dimension of the space projected out).
    pub fn p(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p_mat
    }

    /// Orthonormal `Q` with `P = I − QQ′`.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn diag(&self) -> Vec<f64> {
        self.p_mat.diag()
    }

    /// `P y`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.p_mat.matvec(y)
    }

    /// Largest violations of symmetry, idempotence and the trace identity,
    /// and whether the diagonal lies in [0, 1]. Costs one n×n×n product.
    pub fn invariant_report(&self) -> ProjectionCheck {
        let sq = self.p_mat.matmul(&self.p_mat);
        let (n, p) = (self.n() as f64, self.p() as f64);
        ProjectionCheck {
            asymmetry: self.p_mat.max_asymmetry(),
            idempotence: sq.max_abs_diff(&self.p_mat),
            trace_error: libm::fabs(self.p_mat.trace() - (n - p)),
            diagonal_in_unit_interval: self
                .diag()
                .iter()
                .all(|&d| (-1e-12..=1.0 + 1e-12).contains(&d)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionCheck {
    pub asymmetry: f64,
    pub idempotence: f64,
    pub trace_error: f64,
    pub diagonal_in_unit_interval: bool,
}

impl ProjectionCheck {
    pub fn holds(&self) -> bool {
        self.asymmetry <= 1e-10
            && self.idempotence <= 1e-8
            && self.trace_error <= 1e-8
            && self.diagonal_in_unit_interval
    }
}

/// `P = I − QQ′` with `Q` from the Householder factorization of `X`.
pub fn projection_matrix(x: &DesignMatrix) -> ProjectionMatrix {
    let q = x.basis();
    let n = q.rows();
    let mut p_mat = q.matmul_t(&q);
    for i in 0..n {
        for j in 0..i {
            // Exact symmetry, whatever order the product kernel summed in.
            let v = 0.5 * (p_mat[(i, j)] + p_mat[(j, i)]);
            p_mat[(i, j)] = -v;
            p_mat[(j, i)] = -v;
        }
        p_mat[(i, i)] = 1.0 - p_mat[(i, i)];
    }
    ProjectionMatrix { p_mat, basis: q }
}
