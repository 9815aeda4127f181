//! Random unitary and Hermitian matrices.

use nalgebra::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::eig::CMatrix;

fn gaussian(rng: &mut impl Rng) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of `diag(R)` removed.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// A GUE-type Hermitian matrix `(G + G*)/2`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    (&g + g.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let u = haar_unitary(n, &mut rng);
            let err = (u.adjoint() * &u - CMatrix::identity(n, n)).norm();
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn first_entry_modulus_matches_haar() {
        // |U_11|² is Beta(1, n-1) under Haar measure, with mean 1/n.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        let trials = 4000;
        let mean = (0..trials)
            .map(|_| haar_unitary(n, &mut rng)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 0.25).abs() < 0.02, "{mean}");
    }

    #[test]
    fn phases_are_uniform() {
        // Removing the phases of diag(R) leaves E[U_11] = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 4000;
        let mean = (0..trials).map(|_| haar_unitary(3, &mut rng)[(0, 0)]).sum::<Complex<f64>>() / trials as f64;
        assert!(mean.norm() < 0.05, "{mean}");
    }
}
