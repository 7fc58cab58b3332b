use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::linalg::{condition_number, inverse, spectral_norm, Matrix};
use crate::{Tolerances, C64};

pub const RESAMPLE_BUDGET: usize = 100;
pub const DIAGONALIZABLE_CONDITION: f64 = 100.0;
pub const INVERTIBLE_CONDITION: f64 = 1e3;
pub const MIN_SEPARATION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    HermitianGaussian,
    NormalRandom,
    DiagonalizableRandom,
    CommutingDiagonalPair,
}

impl Ensemble {
    pub const ALL: [Ensemble; 4] = [
        Ensemble::HermitianGaussian,
        Ensemble::NormalRandom,
        Ensemble::DiagonalizableRandom,
        Ensemble::CommutingDiagonalPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::HermitianGaussian => "hermitian-gaussian",
            Ensemble::NormalRandom => "normal-random",
            Ensemble::DiagonalizableRandom => "diagonalizable-random",
            Ensemble::CommutingDiagonalPair => "commuting-diagonal-pair",
        }
    }

    /// Every sample has a real spectrum.
    pub fn real_spectrum(self) -> bool {
        matches!(self, Ensemble::HermitianGaussian | Ensemble::CommutingDiagonalPair)
    }
}

impl std::str::FromStr for Ensemble {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown ensemble `{s}`")))
    }
}

/// `(N + iN) / √2` with independent standard normals.
pub fn complex_gaussian(rng: &mut ChaCha20Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Matrix {
    let entries = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    Matrix::from_row_major(rows, cols, entries).expect("gaussian entries are finite")
}

pub fn gaussian_vector(len: usize, rng: &mut ChaCha20Rng) -> Vec<C64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

/// Gaussian matrix rescaled to spectral norm 1.
pub fn unit_gaussian(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Result<Matrix> {
    let g = gaussian_matrix(rows, cols, rng);
    let norm = spectral_norm(&g)?;
    Ok(g.scale(C64::new(1.0 / norm, 0.0)))
}

/// Uniform on the closed unit disk.
fn unit_disk(rng: &mut ChaCha20Rng) -> C64 {
    let r = rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(r, theta)
}

/// Haar unitary: QR of a Gaussian with the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary(n: usize, rng: &mut ChaCha20Rng) -> Matrix {
    let g = gaussian_matrix(n, n, rng).into_dmatrix();
    let (q, r) = g.qr().unpack();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        })
        .collect();
    let u = q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases));
    Matrix::from_dmatrix(u).expect("unitary factor is finite")
}

/// Gaussian matrix with condition number at most `INVERTIBLE_CONDITION`.
pub fn random_invertible(n: usize, rng: &mut ChaCha20Rng) -> Result<Matrix> {
    for _ in 0..RESAMPLE_BUDGET {
        let g = gaussian_matrix(n, n, rng);
        if condition_number(&g)? <= INVERTIBLE_CONDITION {
            return Ok(g);
        }
    }
    Err(HarnessError::Generation(format!(
        "no {n}×{n} matrix with condition ≤ {INVERTIBLE_CONDITION:e} in {RESAMPLE_BUDGET} draws"
    )))
}

fn hermitian_gaussian(n: usize, rng: &mut ChaCha20Rng) -> Result<Matrix> {
    let g = gaussian_matrix(n, n, rng);
    let h = (&g + g.adjoint()).scale(C64::new(0.5, 0.0));
    let norm = spectral_norm(&h)?;
    if norm == 0.0 {
        return Ok(h);
    }
    // Rescaling breaks exact symmetry by rounding; rebuild from one triangle.
    let scaled = h.scale(C64::new(1.0 / norm, 0.0));
    let mut d = scaled.into_dmatrix();
    for i in 0..n {
        d[(i, i)] = C64::new(d[(i, i)].re, 0.0);
        for j in 0..i {
            d[(j, i)] = d[(i, j)].conj();
        }
    }
    Ok(Matrix::from_dmatrix(d)?)
}

fn normal_random(n: usize, rng: &mut ChaCha20Rng) -> Result<Matrix> {
    let u = random_unitary(n, rng);
    let lambda: Vec<C64> = (0..n).map(|_| unit_disk(rng)).collect();
    Ok(&u * Matrix::from_diagonal(&lambda)? * u.adjoint())
}

fn diagonalizable_random(n: usize, rng: &mut ChaCha20Rng, tol: &Tolerances) -> Result<Matrix> {
    let scale = C64::new(0.5 / (n as f64).sqrt(), 0.0);
    for _ in 0..RESAMPLE_BUDGET {
        let v = Matrix::identity(n) + gaussian_matrix(n, n, rng).scale(scale);
        if condition_number(&v)? > DIAGONALIZABLE_CONDITION {
            continue;
        }
        let lambda: Vec<C64> = (0..n).map(|_| unit_disk(rng)).collect();
        return Ok(&v * Matrix::from_diagonal(&lambda)? * inverse(&v, tol)?);
    }
    Err(HarnessError::Generation(format!(
        "no eigenvector basis with condition ≤ {DIAGONALIZABLE_CONDITION} in {RESAMPLE_BUDGET} draws"
    )))
}

fn real_diagonal(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Two real diagonals whose corresponding entries differ by at least `MIN_SEPARATION`.
pub fn commuting_diagonal_pair(n: usize, rng: &mut ChaCha20Rng) -> Result<(Matrix, Matrix)> {
    let d1 = real_diagonal(n, rng);
    let d2: Vec<f64> = d1
        .iter()
        .map(|&x| {
            let gap = rng.random_range(MIN_SEPARATION..=1.0);
            if rng.random::<bool>() {
                x + gap
            } else {
                x - gap
            }
        })
        .collect();
    Ok((Matrix::from_real_diagonal(&d1)?, Matrix::from_real_diagonal(&d2)?))
}

/// One `n×n` sample. For the commuting pair ensemble this is a single random
/// real diagonal.
pub fn generate(ensemble: Ensemble, n: usize, rng: &mut ChaCha20Rng, tol: &Tolerances) -> Result<Matrix> {
    match ensemble {
        Ensemble::HermitianGaussian => hermitian_gaussian(n, rng),
        Ensemble::NormalRandom => normal_random(n, rng),
        Ensemble::DiagonalizableRandom => diagonalizable_random(n, rng, tol),
        Ensemble::CommutingDiagonalPair => Ok(Matrix::from_real_diagonal(&real_diagonal(n, rng))?),
    }
}

/// `(A₁, A₂)` of sizes `n1`, `n2`. Equal sizes with the commuting ensemble
/// give a commuting pair; otherwise the two are drawn independently.
pub fn generate_pair(
    ensemble: Ensemble,
    n1: usize,
    n2: usize,
    rng: &mut ChaCha20Rng,
    tol: &Tolerances,
) -> Result<(Matrix, Matrix)> {
    if ensemble == Ensemble::CommutingDiagonalPair && n1 == n2 {
        return commuting_diagonal_pair(n1, rng);
    }
    let a1 = generate(ensemble, n1, rng, tol)?;
    let a2 = generate(ensemble, n2, rng, tol)?;
    Ok((a1, a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{classify, OperatorClass};
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn hermitian_samples_classify_hermitian_with_unit_norm() {
        let tol = Tolerances::default();
        let mut r = rng(1);
        for n in [1, 3, 8] {
            let a = generate(Ensemble::HermitianGaussian, n, &mut r, &tol).unwrap();
            assert_eq!(classify(&a, tol.class).unwrap(), OperatorClass::Hermitian);
            assert_eq!(a, a.adjoint());
            assert!((spectral_norm(&a).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_samples_are_normal() {
        let tol = Tolerances::default();
        let a = generate(Ensemble::NormalRandom, 6, &mut rng(2), &tol).unwrap();
        let class = classify(&a, tol.class).unwrap();
        assert!(matches!(class, OperatorClass::Normal | OperatorClass::Hermitian));
        assert!(spectral_norm(&a).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(5, &mut rng(3));
        let gap = spectral_norm(&(&u * u.adjoint() - Matrix::identity(5))).unwrap();
        assert!(gap < 1e-13);
    }

    #[test]
    fn commuting_pair_commutes_exactly_and_is_separated() {
        let (a, b) = commuting_diagonal_pair(7, &mut rng(4)).unwrap();
        assert_eq!(a.commutator(&b).unwrap(), Matrix::zeros(7, 7));
        for (x, y) in a.diagonal().iter().zip(b.diagonal()) {
            assert!((x - y).norm() >= MIN_SEPARATION - 1e-15);
        }
    }

    #[test]
    fn same_seed_same_matrix() {
        let tol = Tolerances::default();
        for e in Ensemble::ALL {
            let a = generate(e, 4, &mut rng(9), &tol).unwrap();
            let b = generate(e, 4, &mut rng(9), &tol).unwrap();
            assert_eq!(a.to_row_major(), b.to_row_major());
        }
    }

    #[test]
    fn ensemble_names_round_trip() {
        for e in Ensemble::ALL {
            assert_eq!(e.name().parse::<Ensemble>().unwrap(), e);
        }
        assert!("ginibre".parse::<Ensemble>().is_err());
    }
}
