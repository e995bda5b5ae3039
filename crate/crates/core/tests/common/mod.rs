#![allow(dead_code)]

use fcvt_core::{DesignMatrix, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_design(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DesignMatrix {
    DesignMatrix::new(gaussian_matrix(n, p, rng)).expect("gaussian design has full rank")
}

pub fn half2_sigma(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i < n / 2 { 1.0 } else { 2.0 }).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
