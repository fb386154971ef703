//! Seeded random samplers for test points and frames.

use num_complex::Complex64;
use rand::Rng;

use crate::lie::{AlgebraElement, RealForm};
use crate::linalg::{self, c, CMat};

/// Matrix with independent entries uniform in the unit square of C.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Algebra element in the given real form with Frobenius norm drawn
/// uniformly from `[scale/2, scale]`.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64, form: RealForm) -> CMat {
    let raw = AlgebraElement::new(random_matrix(rng, n))
        .expect("finite")
        .projected(form)
        .into_matrix();
    let target = scale * rng.random_range(0.5..1.0);
    let norm = raw.norm().max(1e-300);
    raw * c(target / norm)
}

/// `exp` of a random algebra element; lies in the log chart of radius
/// `scale` by construction.
pub fn random_group<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64, form: RealForm) -> CMat {
    linalg::expm(&random_algebra(rng, n, scale, form))
}

/// Random ambient tangent vector at `g` in the direction of the real form
/// (left-translated algebra element of unit size).
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, g: &CMat, form: RealForm) -> CMat {
    let n = g.nrows();
    g * random_algebra(rng, n, 1.0, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scale_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_algebra(&mut rng, 3, 0.1, RealForm::Gl);
            assert!(x.norm() <= 0.1 + 1e-15 && x.norm() >= 0.05 - 1e-15);
        }
    }

    #[test]
    fn su_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_group(&mut rng, 2, 0.3, RealForm::Su);
        assert!((&g * g.adjoint() - linalg::identity(2)).norm() < 1e-14);
        assert!((g.determinant() - c(1.0)).norm() < 1e-14);
    }
}
