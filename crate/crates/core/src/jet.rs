//! Truncated multivariate jets of matrices.
//!
//! A jet of order `k` is an element of `M_n(C)[ε_1, …, ε_k] / (ε_i²)`,
//! stored as `2^k` matrix coefficients indexed by subset bitmasks. The
//! infinitesimals are central, so the algebra embeds into block upper
//! triangular matrices of size `2^k · n` through its regular
//! representation; `exp`/`log` of a jet are the corresponding primary
//! functions of that block matrix, which gives exact directional (and mixed)
//! derivatives of everything built from products, inverses, exponentials and
//! logarithms.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{self, c, CMat};

/// Scalar jet with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct JetScalar {
    parts: Vec<Complex64>,
}

/// Matrix jet.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMat {
    parts: Vec<CMat>,
}

fn order_of(len: usize) -> usize {
    debug_assert!(len.is_power_of_two());
    len.trailing_zeros() as usize
}

fn submasks(mask: usize) -> impl Iterator<Item = usize> {
    // all t with t ⊆ mask, including 0 and mask itself
    let mut t = mask;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = t;
        if t == 0 {
            done = true;
        } else {
            t = (t - 1) & mask;
        }
        Some(out)
    })
}

impl JetScalar {
    pub fn constant(z: Complex64) -> Self {
        Self { parts: vec![z] }
    }

    pub fn real(x: f64) -> Self {
        Self::constant(c(x))
    }

    /// `x + ε_bit`, the coordinate function in direction `bit`.
    pub fn variable(x: f64, bit: usize) -> Self {
        Self::real(x).with_part(1 << bit, c(1.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn order(&self) -> usize {
        order_of(self.parts.len())
    }

    pub fn value(&self) -> Complex64 {
        self.parts[0]
    }

    pub fn part(&self, mask: usize) -> Complex64 {
        self.parts.get(mask).copied().unwrap_or_default()
    }

    /// Returns a copy with coefficient `mask` replaced, widening as needed.
    pub fn with_part(mut self, mask: usize, z: Complex64) -> Self {
        let need = (mask + 1).next_power_of_two();
        if self.parts.len() < need {
            self.parts.resize(need, Complex64::default());
        }
        self.parts[mask] = z;
        self
    }

    fn widened(&self, len: usize) -> Vec<Complex64> {
        let mut p = self.parts.clone();
        p.resize(len.max(p.len()), Complex64::default());
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let mut p = self.widened(len);
        for (i, z) in other.parts.iter().enumerate() {
            p[i] += z;
        }
        Self { parts: p }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            parts: self.parts.iter().map(|w| w * z).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let a = self.widened(len);
        let b = other.widened(len);
        let parts = (0..len)
            .map(|s| submasks(s).map(|t| a[t] * b[s ^ t]).sum())
            .collect();
        Self { parts }
    }

    pub fn recip(&self) -> Self {
        // 1/(a0 + n) = (1/a0) Σ_j (-n/a0)^j, n nilpotent of order ≤ k
        let inv0 = Self::constant(1.0 / self.parts[0]);
        let nil = self.clone().with_part(0, Complex64::default()).mul(&inv0).scale(c(-1.0));
        let mut acc = Self::real(1.0);
        let mut power = Self::real(1.0);
        for _ in 0..self.order() {
            power = power.mul(&nil);
            acc = acc.add(&power);
        }
        acc.mul(&inv0)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    pub fn parts(&self) -> &[Complex64] {
        &self.parts
    }

    /// Zero-pads to `order` infinitesimals.
    pub fn lifted(&self, order: usize) -> Self {
        Self {
            parts: self.widened(1 << order),
        }
    }
}

impl JetMat {
    pub fn constant(m: CMat) -> Self {
        Self { parts: vec![m] }
    }

    /// `m + ε_bit · dm`.
    pub fn with_direction(m: CMat, dm: CMat, bit: usize) -> Self {
        Self::constant(m).with_part(1 << bit, dm)
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(linalg::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(linalg::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.parts[0].nrows()
    }

    pub fn order(&self) -> usize {
        order_of(self.parts.len())
    }

    pub fn value(&self) -> &CMat {
        &self.parts[0]
    }

    pub fn part(&self, mask: usize) -> CMat {
        self.parts
            .get(mask)
            .cloned()
            .unwrap_or_else(|| linalg::zeros(self.dim()))
    }

    pub fn with_part(mut self, mask: usize, m: CMat) -> Self {
        let need = (mask + 1).next_power_of_two();
        let n = self.dim();
        if self.parts.len() < need {
            self.parts.resize(need, linalg::zeros(n));
        }
        self.parts[mask] = m;
        self
    }

    fn widened(&self, len: usize) -> Vec<CMat> {
        let mut p = self.parts.clone();
        if p.len() < len {
            p.resize(len, linalg::zeros(self.dim()));
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let mut p = self.widened(len);
        for (i, m) in other.parts.iter().enumerate() {
            p[i] += m;
        }
        Self { parts: p }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let mut p = self.widened(len);
        for (i, m) in other.parts.iter().enumerate() {
            p[i] -= m;
        }
        Self { parts: p }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            parts: self.parts.iter().map(|m| m * z).collect(),
        }
    }

    pub fn scale_jet(&self, s: &JetScalar) -> Self {
        let len = self.parts.len().max(s.parts.len());
        let a = s.widened(len);
        let b = self.widened(len);
        let parts = (0..len)
            .map(|mask| {
                let mut acc = linalg::zeros(self.dim());
                for t in submasks(mask) {
                    if a[t] != Complex64::default() {
                        acc += &b[mask ^ t] * a[t];
                    }
                }
                acc
            })
            .collect();
        Self { parts }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let a = self.widened(len);
        let b = other.widened(len);
        let parts = (0..len)
            .map(|s| {
                let mut acc = linalg::zeros(self.dim());
                for t in submasks(s) {
                    acc += &a[t] * &b[s ^ t];
                }
                acc
            })
            .collect();
        Self { parts }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> JetScalar {
        JetScalar {
            parts: self.parts.iter().map(linalg::trace).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv0 = Self::constant(linalg::inverse(&self.parts[0])?);
        let nil = self
            .clone()
            .with_part(0, linalg::zeros(self.dim()))
            .mul(&inv0)
            .scale(c(-1.0));
        let mut acc = Self::identity(self.dim());
        let mut power = Self::identity(self.dim());
        for _ in 0..self.order() {
            power = power.mul(&nil);
            acc = acc.add(&power);
        }
        Ok(inv0.mul(&acc))
    }

    /// Rescales each infinitesimal so its first-order coefficient has norm
    /// at most 0.1; returns the rescaled jet and the per-bit factors.
    fn normalized(&self) -> (Self, Vec<f64>) {
        let k = self.order();
        let factors: Vec<f64> = (0..k)
            .map(|b| {
                let norm = self.parts[1 << b].norm();
                if norm > 0.1 {
                    0.1 / norm
                } else {
                    1.0
                }
            })
            .collect();
        let parts = self
            .parts
            .iter()
            .enumerate()
            .map(|(mask, m)| m * c(mask_factor(mask, &factors)))
            .collect();
        (Self { parts }, factors)
    }

    fn embed(&self) -> CMat {
        let n = self.dim();
        let len = self.parts.len();
        let mut big = CMat::zeros(len * n, len * n);
        for s in 0..len {
            for u in submasks(s) {
                big.view_mut((s * n, u * n), (n, n))
                    .copy_from(&self.parts[s ^ u]);
            }
        }
        big
    }

    fn unembed(big: &CMat, n: usize, len: usize) -> Self {
        let parts = (0..len)
            .map(|s| big.view((s * n, 0), (n, n)).into_owned())
            .collect();
        Self { parts }
    }

    fn apply(&self, f: impl Fn(&CMat) -> Result<CMat>) -> Result<Self> {
        if self.order() == 0 {
            return Ok(Self::constant(f(&self.parts[0])?));
        }
        let (scaled, factors) = self.normalized();
        let big = f(&scaled.embed())?;
        let mut out = Self::unembed(&big, self.dim(), self.parts.len());
        for (mask, m) in out.parts.iter_mut().enumerate() {
            *m *= c(1.0 / mask_factor(mask, &factors));
        }
        Ok(out)
    }

    pub fn exp(&self) -> Self {
        self.apply(|m| Ok(linalg::expm(m)))
            .expect("matrix exponential is total")
    }

    /// Principal logarithm; the caller is responsible for the domain check
    /// on the value part.
    pub fn log(&self) -> Result<Self> {
        self.apply(linalg::logm)
    }

    pub fn parts(&self) -> &[CMat] {
        &self.parts
    }

    /// Zero-pads to `order` infinitesimals.
    pub fn lifted(&self, order: usize) -> Self {
        Self {
            parts: self.widened(1 << order),
        }
    }

    /// For jets of order `k`, returns `self + ε_k · direction` of order
    /// `k + 1`, with the new infinitesimal as the top bit.
    pub fn extended(&self, direction: &JetMat, k: usize) -> Self {
        let mut parts = self.widened(1 << k);
        parts.extend(direction.widened(1 << k));
        Self { parts }
    }

    /// Inverse of [`extended`](Self::extended): splits off the top
    /// infinitesimal into (value part, coefficient part).
    pub fn split_top(&self) -> (Self, Self) {
        let half = self.parts.len() / 2;
        (
            Self {
                parts: self.parts[..half].to_vec(),
            },
            Self {
                parts: self.parts[half..].to_vec(),
            },
        )
    }
}

fn mask_factor(mask: usize, factors: &[f64]) -> f64 {
    factors
        .iter()
        .enumerate()
        .filter(|(b, _)| mask & (1 << b) != 0)
        .map(|(_, f)| f)
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn m(entries: &[f64]) -> CMat {
        DMatrix::from_row_slice(2, 2, entries).map(c)
    }

    #[test]
    fn submask_enumeration() {
        let mut v: Vec<usize> = submasks(0b101).collect();
        v.sort();
        assert_eq!(v, vec![0, 1, 4, 5]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn product_rule() {
        let a = JetMat::with_direction(m(&[1.0, 2.0, 0.5, 1.0]), m(&[0.0, 1.0, 1.0, 0.0]), 0);
        let b = JetMat::with_direction(m(&[0.3, 0.0, 1.0, 2.0]), m(&[1.0, 0.0, 0.0, -1.0]), 1);
        let p = a.mul(&b);
        assert_eq!(p.part(0), a.value() * b.value());
        assert_eq!(p.part(1), a.part(1) * b.value());
        assert_eq!(p.part(2), a.value() * b.part(2));
        assert_eq!(p.part(3), a.part(1) * b.part(2));
    }

    #[test]
    fn inverse_derivative() {
        let x = m(&[1.2, 0.3, -0.1, 0.9]);
        let dx = m(&[0.5, -1.0, 2.0, 0.1]);
        let j = JetMat::with_direction(x.clone(), dx.clone(), 0);
        let inv = j.inverse().unwrap();
        let xi = linalg::inverse(&x).unwrap();
        let expected = -(&xi * &dx * &xi);
        assert!((inv.part(1) - expected).norm() < 1e-14);
    }

    #[test]
    fn exp_first_part_is_frechet_derivative() {
        let x = m(&[0.1, 0.4, -0.3, 0.2]);
        let v = m(&[2.0, -1.0, 0.5, 3.0]);
        let j = JetMat::with_direction(x.clone(), v.clone(), 0).exp();
        let l = linalg::expm_frechet(&x, &v);
        assert!((j.part(1) - l).norm() < 1e-13);
    }

    #[test]
    fn log_mixed_second_derivative_matches_differences() {
        let x = linalg::expm(&m(&[0.1, 0.2, -0.15, 0.05]));
        let e = m(&[0.3, -0.2, 0.1, 0.4]);
        let f = m(&[-0.1, 0.5, 0.2, 0.0]);
        let jet = JetMat::constant(x.clone())
            .with_part(1, e.clone())
            .with_part(2, f.clone());
        let out = jet.log().unwrap();
        let h = 1e-4;
        let eval = |a: f64, b: f64| linalg::logm(&(&x + &e * c(a) + &f * c(b))).unwrap();
        let fd = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) * c(0.25 / (h * h));
        assert!((out.part(3) - fd).norm() < 1e-6);
    }

    #[test]
    fn scalar_division() {
        let t = JetScalar::variable(0.25, 0);
        let one = JetScalar::real(1.0);
        let q = one.div(&one.sub(&t));
        // d/dt 1/(1-t) = 1/(1-t)^2
        assert!((q.part(1).re - 1.0 / 0.75f64.powi(2)).abs() < 1e-14);
    }
}
