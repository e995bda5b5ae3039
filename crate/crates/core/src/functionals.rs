//! Scalar trace functionals of the residual-maker `P` (null case) and of
//! `A = P·diag(σ)` (general case) that the moment formulas are built from.
//!
//! Notation: `∘` is the entrywise product, `M^∘k` the entrywise power,
//! `D_M` the diagonal part of `M`, `d = Diag(P)` the diagonal of `P` as a
//! vector. In the general case `B = AA′` (covariance of the residuals) and
//! `C = A′A`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, hadamard_power, Matrix};
use crate::regression::ProjectionMatrix;
use crate::{Error, Result};

/// Trace functionals of `P` needed by the null mean and variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSummary {
    pub n: usize,
    pub p: usize,
    /// `tr P` (= n − p).
    pub tr_p: f64,
    /// `Σᵢ pᵢᵢ²`, the diagonal reading of `tr(P∘P)`.
    pub t1: f64,
    /// `tr((P∘P)²) = Σᵢⱼ pᵢⱼ⁴`.
    pub q2: f64,
    /// `d′(P∘P)d`.
    pub d2: f64,
    /// `d′(P∘P)²d`.
    pub d2sq: f64,
    /// `tr((P D_P P)∘(P^∘2 P^∘2))`.
    pub m2: f64,
    /// `𝟙′(P^∘4 P^∘4)𝟙`.
    pub m5: f64,
    /// `tr(P P^∘3)`; equals `q2`.
    pub c1: f64,
    /// `tr((P D_P P)∘P)`; equals `d2`.
    pub c2: f64,
    /// `d′ P^∘4 𝟙`.
    pub c3: f64,
    /// Terms that need n×n×n work; only required when ν₄ or ν₆ is non-zero.
    pub cubic: Option<CubicFunctionals>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicFunctionals {
    /// `tr((P∘P)³)`.
    pub q3: f64,
    /// `tr((P∘P)⁴)`.
    pub q4: f64,
    /// `tr(P D_P P P^∘3)`.
    pub m1: f64,
    /// `tr(P P^∘3 P^∘3)`.
    pub m3: f64,
    /// `tr((P^∘3 P)²)`.
    pub m4: f64,
}

/// Every functional, including the cubic group.
pub fn projection_functionals(proj: &ProjectionMatrix) -> ProjectionSummary {
    let mut s = projection_functionals_quadratic(proj);
    s.cubic = Some(cubic_functionals(proj));
    s
}

/// The O(n²) functionals only (`cubic = None`). Sufficient whenever the
/// error law has ν₄ = ν₆ = 0, e.g. Gaussian errors.
pub fn projection_functionals_quadratic(proj: &ProjectionMatrix) -> ProjectionSummary {
    let pm = proj.matrix();
    let n = proj.n();
    let d = pm.diag();

    let mut u = vec![0.0; n]; // (P∘P) d
    let mut r = vec![0.0; n]; // column sums of P^∘4
    let mut sum_p4 = 0.0;
    let mut c1 = 0.0;
    for i in 0..n {
        let row = pm.row(i);
        let mut ui = 0.0;
        for (j, &v) in row.iter().enumerate() {
            let v2 = v * v;
            let v4 = v2 * v2;
            ui += v2 * d[j];
            r[j] += v4;
            sum_p4 += v4;
            // tr(P P^∘3) = Σᵢⱼ pᵢⱼ (P^∘3)ⱼᵢ
            c1 += v * pm[(j, i)] * pm[(j, i)] * pm[(j, i)];
        }
        u[i] = ui;
    }
    // tr((P∘P)²) read as a matrix power of the Hadamard square.
    let q2_trace: f64 = (0..n)
        .map(|i| {
            let row = pm.row(i);
            row.iter()
                .enumerate()
                .map(|(j, &v)| v * v * pm[(j, i)] * pm[(j, i)])
                .sum::<f64>()
        })
        .sum();
    debug_assert!(libm::fabs(q2_trace - sum_p4) <= 1e-8 * sum_p4.max(1e-300));

    // (P D_P P)ⱼⱼ = Σᵢ dᵢ pᵢⱼ², evaluated column-wise on P itself.
    let mut pdp_diag = vec![0.0; n];
    for i in 0..n {
        for (j, &v) in pm.row(i).iter().enumerate() {
            pdp_diag[j] += d[i] * v * v;
        }
    }

    ProjectionSummary {
        n,
        p: proj.p(),
        tr_p: d.iter().sum(),
        t1: dot(&d, &d),
        q2: q2_trace,
        d2: dot(&d, &u),
        d2sq: dot(&u, &u),
        m2: dot(&pdp_diag, &r),
        m5: dot(&r, &r),
        c1,
        c2: dot(&pdp_diag, &d),
        c3: dot(&d, &r),
        cubic: None,
    }
}

/// The n×n×n group, using `P = I − QQ′` to replace three of the four dense
/// products with n×n×p ones. `tr((P∘P)^k)` has no such shortcut.
fn cubic_functionals(proj: &ProjectionMatrix) -> CubicFunctionals {
    let pm = proj.matrix();
    let q = proj.basis();
    let d = pm.diag();

    let s = hadamard_power(pm, 2);
    let s2 = s.matmul(&s);
    let q3 = s2.frobenius_dot(&s);
    let q4 = s2.frobenius_norm_sq();

    let p3 = hadamard_power(pm, 3);
    let p3_norm = p3.frobenius_norm_sq();
    let w = p3.matmul(q); // P^∘3 Q
    let w_norm = w.frobenius_norm_sq();
    let qtw = q.t_matmul(&w); // Q′P^∘3Q, symmetric p×p

    // tr(P^∘3 P P^∘3) = ‖P^∘3‖² − ‖Q′P^∘3‖²
    let m3 = p3_norm - w_norm;
    // tr((P^∘3 P)²) with P^∘3 P = P^∘3 − WQ′
    let m4 = p3_norm - 2.0 * w_norm + qtw.trace_of_product(&qtw);

    // P D P = D − HD − DH + HDH with H = QQ′.
    let diag_term: f64 = d.iter().map(|&x| x * x * x * x).sum();
    let mut cross = 0.0;
    for i in 0..q.rows() {
        cross += d[i] * dot(q.row(i), w.row(i));
    }
    let qdq = q.t_matmul(&q.scale_rows(&d));
    let m1 = diag_term - 2.0 * cross + qdq.trace_of_product(&qtw);

    CubicFunctionals { q3, q4, m1, m3, m4 }
}

/// Functionals of `A = P·diag(σ)` entering the general (heteroscedastic)
/// moments of `T₁ = Σ ε̂ᵢ⁴` and `T₂ = n⁻¹(Σ ε̂ᵢ²)²`.
///
/// With `B = AA′`, `C = A′A`, `G = A(A^∘3)′`, `K = (A∘A)(A∘A)′`,
/// `L = A^∘3(A^∘3)′`, `v = (A∘A)′Diag(B)` (so `vⱼ = (A′D_B A)ⱼⱼ`) and
/// `rⱼ = Σᵢ aᵢⱼ⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSummary {
    pub n: usize,
    /// `tr B`.
    pub tr_b: f64,
    /// `tr B²`.
    pub tr_b_sq: f64,
    /// `tr(B∘B) = Σᵢ bᵢᵢ²`.
    pub diag_b_sq: f64,
    /// `Σᵢⱼ aᵢⱼ⁴`.
    pub a_fourth_sum: f64,
    /// `tr(C∘C) = Σⱼ cⱼⱼ²`; the diagonal that carries ν₄ in `E T₂`.
    pub diag_c_sq: f64,
    /// `Diag′(B)(B∘B)Diag(B)`.
    pub db_bb_db: f64,
    /// `tr((B∘B)²) = Σ bᵢₖ⁴`.
    pub b_fourth_sum: f64,
    /// `tr(B D_B A (A^∘3)′) = Σ bᵢᵢ bᵢₖ Gᵢₖ`.
    pub b_db_g: f64,
    /// `Diag′(B)(A∘A)(A∘A)′Diag(B) = ‖v‖²`.
    pub db_aa_aa_db: f64,
    /// `tr((B∘B)K)`.
    pub bb_k: f64,
    /// `tr(G²)`.
    pub g_sq_trace: f64,
    /// `tr(K²)`.
    pub k_sq_trace: f64,
    /// `tr(B L)`.
    pub b_l: f64,
    /// `Σⱼ vⱼ rⱼ`.
    pub v_r: f64,
    /// `Σⱼ rⱼ²`.
    pub r_sq: f64,
    /// `tr(B²∘B) = Σᵢ bᵢᵢ (B²)ᵢᵢ`.
    pub b_sq_diag_b: f64,
    /// `tr(B G′) = Σ bᵢₖ Gᵢₖ`.
    pub b_g: f64,
    /// `Σⱼ vⱼ cⱼⱼ`.
    pub v_c: f64,
    /// `Σⱼ cⱼⱼ rⱼ`.
    pub c_r: f64,
}

/// General functionals at `A = P·diag(σ)`.
pub fn general_functionals(proj: &ProjectionMatrix, sigma: &[f64]) -> Result<GeneralSummary> {
    if sigma.len() != proj.n() {
        return Err(Error::DimensionMismatch {
            what: "sigma length",
            expected: proj.n(),
            found: sigma.len(),
        });
    }
    if let Some((index, &value)) = sigma.iter().enumerate().find(|(_, s)| !(**s > 0.0)) {
        return Err(Error::NonPositiveSigma { index, value });
    }
    general_functionals_of(&proj.matrix().scale_columns(sigma))
}

/// General functionals for an arbitrary square `A`.
pub fn general_functionals_of(a: &Matrix) -> Result<GeneralSummary> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            what: "square matrix",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.all_finite() {
        return Err(Error::NonFinite("matrix A"));
    }
    let n = a.rows();
    let b = a.matmul_t(a);
    let c = a.t_matmul(a);
    let db = b.diag();
    let dc = c.diag();
    let a2 = hadamard_power(a, 2);
    let a3 = hadamard_power(a, 3);
    let r = a2.map(|v| v * v).t_matvec(&vec![1.0; n]);
    let v = a2.t_matvec(&db);
    let g = a.matmul_t(&a3);
    let k = a2.matmul_t(&a2);
    let l = a3.matmul_t(&a3);

    let mut db_bb_db = 0.0;
    let mut b_fourth_sum = 0.0;
    let mut b_db_g = 0.0;
    let mut bb_k = 0.0;
    let mut b_sq_diag_b = 0.0;
    for i in 0..n {
        let mut row_sq = 0.0;
        for kk in 0..n {
            let bik = b[(i, kk)];
            let b2 = bik * bik;
            db_bb_db += db[i] * b2 * db[kk];
            b_fourth_sum += b2 * b2;
            b_db_g += db[i] * bik * g[(i, kk)];
            bb_k += b2 * k[(i, kk)];
            row_sq += b2;
        }
        b_sq_diag_b += db[i] * row_sq;
    }

    Ok(GeneralSummary {
        n,
        tr_b: b.trace(),
        tr_b_sq: b.frobenius_norm_sq(),
        diag_b_sq: dot(&db, &db),
        a_fourth_sum: r.iter().sum(),
        diag_c_sq: dot(&dc, &dc),
        db_bb_db,
        b_fourth_sum,
        b_db_g,
        db_aa_aa_db: dot(&v, &v),
        bb_k,
        g_sq_trace: g.trace_of_product(&g),
        k_sq_trace: k.frobenius_norm_sq(),
        b_l: b.frobenius_dot(&l),
        v_r: dot(&v, &r),
        r_sq: dot(&r, &r),
        b_sq_diag_b,
        b_g: b.frobenius_dot(&g),
        v_c: dot(&v, &dc),
        c_r: dot(&dc, &r),
    })
}

impl GeneralSummary {
    pub fn all_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Every scalar field in declaration order (after `n`).
    pub fn as_array(&self) -> [f64; 19] {
        [
            self.tr_b,
            self.tr_b_sq,
            self.diag_b_sq,
            self.a_fourth_sum,
            self.diag_c_sq,
            self.db_bb_db,
            self.b_fourth_sum,
            self.b_db_g,
            self.db_aa_aa_db,
            self.bb_k,
            self.g_sq_trace,
            self.k_sq_trace,
            self.b_l,
            self.v_r,
            self.r_sq,
            self.b_sq_diag_b,
            self.b_g,
            self.v_c,
            self.c_r,
        ]
    }

    /// The summary a homoscedastic fit (`σ ≡ 1`) would give, expressed in
    /// terms of a full `ProjectionSummary`.
    pub fn from_projection(s: &ProjectionSummary) -> Result<Self> {
        let cubic = s.cubic.ok_or(Error::MissingCubicFunctionals)?;
        let n_minus_p = s.tr_p;
        Ok(Self {
            n: s.n,
            tr_b: n_minus_p,
            tr_b_sq: n_minus_p,
            diag_b_sq: s.t1,
            a_fourth_sum: s.q2,
            diag_c_sq: s.t1,
            db_bb_db: s.d2,
            b_fourth_sum: s.q2,
            b_db_g: cubic.m1,
            db_aa_aa_db: s.d2sq,
            bb_k: cubic.q3,
            g_sq_trace: cubic.m4,
            k_sq_trace: cubic.q4,
            b_l: cubic.m3,
            v_r: s.m2,
            r_sq: s.m5,
            b_sq_diag_b: s.t1,
            b_g: s.c1,
            v_c: s.c2,
            c_r: s.c3,
        })
    }
}

impl ProjectionSummary {
    /// Scalar fields in a fixed order, cubic group last (NaN when absent).
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        let c = self.cubic;
        let g = |f: fn(&CubicFunctionals) -> f64| c.as_ref().map_or(f64::NAN, f);
        alloc::vec![
            ("tr_p", self.tr_p),
            ("t1", self.t1),
            ("q2", self.q2),
            ("d2", self.d2),
            ("d2sq", self.d2sq),
            ("m2", self.m2),
            ("m5", self.m5),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("q3", g(|c| c.q3)),
            ("q4", g(|c| c.q4)),
            ("m1", g(|c| c.m1)),
            ("m3", g(|c| c.m3)),
            ("m4", g(|c| c.m4)),
        ]
    }
}
