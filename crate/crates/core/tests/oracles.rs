//! Comparisons against oracles computed independently of the library paths.

mod common;

use common::*;
use quasicomm::bounds::{affine_exactness, check_hypothesis, polynomial_g1};
use quasicomm::funcalc::{apply_block_diagonal, apply_function};
use quasicomm::harness::ensemble::{gaussian_matrix, Ensemble};
use quasicomm::harness::{run_suite, Suite, TrialConfig};
use quasicomm::stacking::direct_sum;
use quasicomm::{CalculusPath, Matrix, ScalarFunction, C64};
use rand::Rng;

/// Largest singular value by power iteration on `M*M`.
fn power_norm(m: &Matrix) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.rows();
    let mut v = Matrix::column(&vec![c(1.0); n]).unwrap();
    let mut estimate = 0.0;
    for _ in 0..5000 {
        let w = &gram * &v;
        let len = w.to_row_major().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if len == 0.0 {
            return 0.0;
        }
        estimate = len;
        v = w.scale(c(1.0 / len));
    }
    estimate.sqrt()
}

fn taylor_sin(degree: usize) -> ScalarFunction {
    let mut coefficients = vec![c(0.0); degree + 1];
    let mut factorial = 1.0;
    for k in 1..=degree {
        factorial *= k as f64;
        if k % 2 == 1 {
            coefficients[k] = c(if k % 4 == 1 { 1.0 } else { -1.0 } / factorial);
        }
    }
    ScalarFunction::polynomial("sin taylor", coefficients).unwrap()
}

/// `exp` by scaling and squaring a truncated Taylor series.
fn taylor_exp(a: &Matrix) -> Matrix {
    let n = a.rows();
    let squarings = (norm(a).max(1.0).log2().ceil() as i32 + 4).max(0);
    let scaled = a.scale(c(0.5f64.powi(squarings)));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..30 {
        term = (&term * &scaled).scale(c(1.0 / k as f64));
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut r = rng(11);
    for _ in 0..20 {
        let (rows, cols) = (r.random_range(1..=8), r.random_range(1..=8));
        let m = gaussian_matrix(rows, cols, &mut r);
        let (a, b) = (norm(&m), power_norm(&m));
        assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
    }
}

#[test]
fn sin_spectral_path_matches_taylor_polynomial() {
    let a = hermitian(8, &mut rng(12));
    let spectral = apply_function(&ScalarFunction::sin(), &a, CalculusPath::HermitianEigPath, &tol()).unwrap();
    let taylor = apply_function(&taylor_sin(25), &a, CalculusPath::PolynomialHornerPath, &tol()).unwrap();
    assert!(gap(&spectral, &taylor) <= 1e-9);
}

#[test]
fn exp_eigen_paths_match_scaling_and_squaring() {
    let mut r = rng(13);
    for e in [Ensemble::HermitianGaussian, Ensemble::NormalRandom, Ensemble::DiagonalizableRandom] {
        let a = sample(e, 6, &mut r).scale(c(2.0));
        let ours = apply_function(&ScalarFunction::exp(), &a, CalculusPath::DiagonalizablePath, &tol()).unwrap();
        let oracle = taylor_exp(&a);
        assert!(gap(&ours, &oracle) <= 1e-9 * (1.0 + norm(&oracle)), "{e:?}");
    }
}

#[test]
fn sin_of_stacked_pair_matches_parts() {
    let mut r = rng(14);
    let (a1, a2) = (hermitian(4, &mut r), hermitian(4, &mut r));
    let f = ScalarFunction::sin();
    let path = CalculusPath::HermitianEigPath;
    let stacked = apply_block_diagonal(&f, &a1, &a2, path, &tol()).unwrap();
    let parts = direct_sum(
        &apply_function(&f, &a1, path, &tol()).unwrap(),
        &apply_function(&f, &a2, path, &tol()).unwrap(),
    )
    .unwrap();
    assert!(gap(&stacked, &parts) <= 1e-10);
}

fn commutator_ratio(q: &Matrix, a: &Matrix, f: &ScalarFunction) -> f64 {
    let fa = apply_function(f, a, CalculusPath::PolynomialHornerPath, &tol()).unwrap();
    norm(&(q * &fa - &fa * q)) / norm(&(q * a - a * q))
}

#[test]
fn square_slope_two_is_sharp_on_the_unit_ball() {
    let f = ScalarFunction::square();
    assert_eq!(polynomial_g1(&f, 1.0).unwrap().slope(), Some(2.0));

    let mut r = rng(15);
    let mut sup: f64 = 0.0;
    for _ in 0..20_000 {
        let q = gaussian_matrix(2, 2, &mut r);
        let a = gaussian_matrix(2, 2, &mut r);
        let a = a.scale(c(1.0 / norm(&a)));
        sup = sup.max(commutator_ratio(&q, &a, &f));
    }
    assert!(sup <= 2.0 + 1e-12, "random search exceeded the slope: {sup}");

    // diag(1, 1 − δ) against the nilpotent corner gives ratio 2 − δ.
    let q = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    let a = Matrix::from_real_diagonal(&[1.0, 1.0 - 1e-4]).unwrap();
    assert!(commutator_ratio(&q, &a, &f) > 1.999);
}

#[test]
fn quadratic_slope_thirteen_has_no_counterexample() {
    let f = ScalarFunction::quadratic();
    assert_eq!(polynomial_g1(&f, 2.0).unwrap().slope(), Some(13.0));
    let mut r = rng(16);
    for _ in 0..20_000 {
        let n = r.random_range(2..=4);
        let q = gaussian_matrix(n, n, &mut r);
        let a = gaussian_matrix(n, n, &mut r);
        let a = a.scale(c(2.0 * r.random::<f64>() / norm(&a)));
        assert!(commutator_ratio(&q, &a, &f) <= 13.0 * (1.0 + 1e-12));
    }
}

#[test]
fn affine_commutator_scales_by_modulus() {
    let mut r = rng(17);
    for _ in 0..50 {
        let a = sample(Ensemble::NormalRandom, 4, &mut r);
        let q = invertible(4, &mut r);
        let (lhs, rhs) = affine_exactness(C64::new(2.0, 1.0), c(0.5), &q, &a, &tol()).unwrap();
        assert!((lhs / rhs - 1.0).abs() <= 1e-13);
    }
}

#[test]
fn hypothesis_sweep_for_square() {
    let f = ScalarFunction::square();
    let mut r = rng(18);
    for i in 0..1000 {
        let n = r.random_range(1..=8);
        let a = hermitian(n, &mut r);
        let q = invertible(n, &mut r);
        let g = polynomial_g1(&f, norm(&a)).unwrap();
        let chk = check_hypothesis(&g, &q, &a, &f, &tol()).unwrap();
        assert!(chk.satisfied, "trial {i}: {chk:?}");
    }
}

#[test]
fn corner_suite_on_fixed_seed() {
    let mut cfg = TrialConfig::new(Suite::Thm1);
    cfg.seed = 42;
    cfg.trials = 100;
    cfg.dim1 = 4;
    cfg.dim2 = 3;
    let report = run_suite(&cfg, Suite::Thm1).unwrap();
    assert!(report.passed());
    for t in &report.trials {
        assert!(t.residuals["f_side_identity"] <= 1e-9);
        assert!(t.residuals["commutator_identity"] <= 1e-9);
    }
}

#[test]
fn identity_probe_reports_unit_ratio() {
    let mut cfg = TrialConfig::new(Suite::LipschitzProbe);
    cfg.function_name = "identity".into();
    cfg.trials = 10;
    let report = run_suite(&cfg, Suite::LipschitzProbe).unwrap();
    for t in &report.trials {
        assert!((t.norms.quasi.unwrap() - 1.0).abs() <= 1e-12);
    }
}
