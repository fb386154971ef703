//! Dense complex matrix kernels: exponential, logarithm, square root and
//! Fréchet derivatives. Everything here works on plain `CMat` values; the
//! typed wrappers live in [`crate::lie`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone().try_inverse().ok_or(Error::SingularGroupElement {
        det_modulus: a.determinant().norm(),
    })
}

// Padé(13) coefficients of Higham's scaling-and-squaring exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * c(2f64.powi(-squarings));
    let b = &PADE13;
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]))
        + &a6 * c(b[7])
        + &a4 * c(b[5])
        + &a2 * c(b[3])
        + &id * c(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]))
        + &a6 * c(b[6])
        + &a4 * c(b[4])
        + &a2 * c(b[2])
        + &id * c(b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = inverse(&y)?;
        let z_inv = inverse(&z)?;
        let y_next = (&y + z_inv) * c(0.5);
        let z_next = (&z + y_inv) * c(0.5);
        let delta = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    Ok(y)
}

/// Eigenvalues of a complex matrix via its Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    let schur = a.clone().schur();
    let (_, t) = schur.unpack();
    t.diagonal().iter().copied().collect()
}

/// Fails when any eigenvalue leaves the disk |z - 1| < 1.
pub fn check_log_domain(a: &CMat) -> Result<()> {
    for z in eigenvalues(a) {
        if (z - c(1.0)).norm() >= 1.0 {
            return Err(Error::SpectrumOutOfDomain {
                eigenvalue: format!("{z}"),
            });
        }
    }
    Ok(())
}

// Gauss–Legendre nodes/weights on [0, 1], 8 points.
const GL8: [(f64, f64); 8] = [
    (0.019855071751231912, 0.050614268145188344),
    (0.101_666_761_293_186_64, 0.111_190_517_226_687_17),
    (0.237_233_795_041_835_5, 0.156_853_322_938_943_52),
    (0.408_282_678_752_175_1, 0.181_341_891_689_180_88),
    (0.591_717_321_247_824_8, 0.181_341_891_689_180_88),
    (0.762_766_204_958_164_5, 0.156_853_322_938_943_52),
    (0.898_333_238_706_813_4, 0.111_190_517_226_687_17),
    (0.980_144_928_248_768_1, 0.050614268145188344),
];

/// Principal logarithm by inverse scaling and squaring: repeated square
/// roots bring the argument within 0.25 of the identity, then
/// `log(I + X) = ∫_0^1 X (I + sX)^{-1} ds` is evaluated by 8-point
/// Gauss–Legendre, which is the diagonal Padé approximant of order 8.
///
/// No domain check is made here; see [`check_log_domain`].
pub fn logm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let id = identity(n);
    let mut m = a.clone();
    let mut roots = 0;
    while one_norm(&(&m - &id)) > 0.25 {
        if roots >= 60 {
            return Err(Error::SpectrumOutOfDomain {
                eigenvalue: "square-root iteration did not approach the identity".into(),
            });
        }
        m = sqrtm(&m)?;
        roots += 1;
    }
    let x = &m - &id;
    let mut acc = zeros(n);
    for &(node, weight) in GL8.iter() {
        let denom = &id + &x * c(node);
        let term = denom
            .lu()
            .solve(&x)
            .ok_or(Error::SingularGroupElement { det_modulus: 0.0 })?;
        acc += term * c(weight);
    }
    Ok(acc * c(2f64.powi(roots)))
}

/// Fréchet derivative of the exponential at `x` in direction `v`,
/// read off the upper-right block of `exp([[x, v], [0, x]])`.
pub fn expm_frechet(x: &CMat, v: &CMat) -> CMat {
    let n = x.nrows();
    let mut big = CMat::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(x);
    big.view_mut((n, n), (n, n)).copy_from(x);
    big.view_mut((0, n), (n, n)).copy_from(v);
    let e = expm(&big);
    e.view((0, n), (n, n)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64, scale: f64) -> CMat {
        // small deterministic LCG so these unit tests stay self-contained
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMat::from_fn(n, n, |_, _| Complex64::new(next(), next()) * scale)
    }

    #[test]
    fn expm_matches_nalgebra_reference() {
        for seed in 0..10 {
            let a = sample(3, seed, 0.8);
            let ours = expm(&a);
            let reference = a.clone().exp();
            assert!((ours - reference).norm() < 1e-12);
        }
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let a = sample(2, 7, 6.0);
        let reference = a.clone().exp();
        assert!((expm(&a) - &reference).norm() < 1e-10 * reference.norm());
    }

    #[test]
    fn logm_inverts_expm() {
        for seed in 0..10 {
            let x = sample(3, seed, 0.3);
            let back = logm(&expm(&x)).unwrap();
            assert!((back - x).norm() < 1e-12);
        }
    }

    #[test]
    fn sqrtm_squares_back() {
        let a = expm(&sample(3, 3, 0.4));
        let r = sqrtm(&a).unwrap();
        assert!((&r * &r - a).norm() < 1e-13);
    }

    #[test]
    fn log_domain_rejects_negative_eigenvalue() {
        let mut a = identity(2);
        a[(1, 1)] = c(-0.5);
        assert!(matches!(check_log_domain(&a), Err(Error::SpectrumOutOfDomain { .. })));
        assert!(check_log_domain(&identity(2)).is_ok());
    }

    #[test]
    fn frechet_matches_central_difference() {
        let x = sample(3, 11, 0.3);
        let v = sample(3, 12, 1.0);
        let h = 1e-5;
        let fd = (expm(&(&x + &v * c(h))) - expm(&(&x - &v * c(h)))) * c(0.5 / h);
        let exact = expm_frechet(&x, &v);
        assert!((fd - &exact).norm() < 1e-8 * exact.norm());
    }
}
