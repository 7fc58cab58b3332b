#![allow(dead_code)]

use quasicomm::harness::ensemble::{generate, random_invertible, random_unitary, unit_gaussian, Ensemble};
use quasicomm::harness::suites::trial_rng;
use quasicomm::{Matrix, Tolerances, C64};
use rand_chacha::ChaCha20Rng;

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    trial_rng(seed, 0)
}

pub fn hermitian(n: usize, r: &mut ChaCha20Rng) -> Matrix {
    generate(Ensemble::HermitianGaussian, n, r, &tol()).unwrap()
}

pub fn sample(e: Ensemble, n: usize, r: &mut ChaCha20Rng) -> Matrix {
    generate(e, n, r, &tol()).unwrap()
}

pub fn unitary(n: usize, r: &mut ChaCha20Rng) -> Matrix {
    random_unitary(n, r)
}

pub fn invertible(n: usize, r: &mut ChaCha20Rng) -> Matrix {
    random_invertible(n, r).unwrap()
}

pub fn corner(rows: usize, cols: usize, r: &mut ChaCha20Rng) -> Matrix {
    unit_gaussian(rows, cols, r).unwrap()
}

pub fn norm(m: &Matrix) -> f64 {
    quasicomm::linalg::spectral_norm(m).unwrap()
}

pub fn gap(a: &Matrix, b: &Matrix) -> f64 {
    norm(&(a - b))
}
