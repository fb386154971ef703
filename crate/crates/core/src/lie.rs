//! Typed Lie group and Lie algebra elements of GL(n, C) and gl(n, C).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{JetMat, JetScalar};
use crate::linalg::{self, c, CMat};
use crate::numerics::{factorial, signed_permutations};

/// Which real form (if any) algebra elements are constrained to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RealForm {
    /// gl(n, C), no constraint.
    #[default]
    Gl,
    /// Traceless matrices.
    Sl,
    /// Traceless skew-Hermitian matrices.
    Su,
}

const FORM_TOL: f64 = 1e-12;
const DET_MIN: f64 = 1e-6;
const DET_MAX: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    m: CMat,
}

impl AlgebraElement {
    pub fn new(m: CMat) -> Result<Self> {
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "algebra element must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { m })
    }

    /// Like [`new`](Self::new) but also enforces a real form to 1e-12.
    pub fn new_in(m: CMat, form: RealForm) -> Result<Self> {
        let x = Self::new(m)?;
        let defect = (&x.m - x.projected(form).m).norm();
        if defect > FORM_TOL {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {defect:e} away from the {form:?} real form"
            )));
        }
        Ok(x)
    }

    pub fn zero(n: usize) -> Self {
        Self { m: linalg::zeros(n) }
    }

    /// Orthogonal projection onto the chosen real form.
    pub fn projected(&self, form: RealForm) -> Self {
        let n = self.dim();
        let mut m = self.m.clone();
        if form == RealForm::Su {
            m = (&m - m.adjoint()) * c(0.5);
        }
        if form != RealForm::Gl {
            let tr = linalg::trace(&m) / c(n as f64);
            m -= linalg::identity(n) * tr;
        }
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn bracket(&self, other: &Self) -> Self {
        Self {
            m: linalg::commutator(&self.m, &other.m),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: &self.m * c(s) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    m: CMat,
    near_identity: bool,
}

impl GroupElement {
    /// Checked constructor: finite entries and `|det|` within `[1e-6, 1e6]`.
    pub fn new(m: CMat) -> Result<Self> {
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite);
        }
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "group element must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let det = m.determinant().norm();
        if !(DET_MIN..=DET_MAX).contains(&det) {
            return Err(Error::SingularGroupElement { det_modulus: det });
        }
        Ok(Self {
            m,
            near_identity: false,
        })
    }

    /// Checked constructor that additionally requires the spectrum to lie
    /// in the principal-logarithm disk.
    pub fn near_identity(m: CMat) -> Result<Self> {
        let mut g = Self::new(m)?;
        linalg::check_log_domain(&g.m)?;
        g.near_identity = true;
        Ok(g)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: linalg::identity(n),
            near_identity: true,
        }
    }

    pub fn is_near_identity(&self) -> bool {
        self.near_identity
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = linalg::inverse(&self.m)?;
        Ok(Self {
            m,
            near_identity: self.near_identity,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(&self.m * &other.m)
    }

    /// `g X g⁻¹`.
    pub fn adjoint(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let inv = linalg::inverse(&self.m)?;
        AlgebraElement::new(&self.m * x.matrix() * inv)
    }

    /// Logarithm restricted to the chart `‖log g‖_F < radius`.
    pub fn chart_log(&self, radius: f64) -> Result<AlgebraElement> {
        let x = log_map(self)?;
        let norm = x.matrix().norm();
        if norm >= radius {
            return Err(Error::ChartOverflow { norm, radius });
        }
        Ok(x)
    }
}

pub fn exp_map(x: &AlgebraElement) -> GroupElement {
    let m = linalg::expm(x.matrix());
    let near_identity = linalg::check_log_domain(&m).is_ok();
    GroupElement { m, near_identity }
}

pub fn log_map(g: &GroupElement) -> Result<AlgebraElement> {
    linalg::check_log_domain(g.matrix())?;
    AlgebraElement::new(linalg::logm(g.matrix())?)
}

/// Left-translated derivative of the exponential:
/// `exp(-X) · d/ds exp(X + sV)|_{s=0}`.
pub fn dexp(x: &AlgebraElement, v: &AlgebraElement) -> AlgebraElement {
    let frechet = linalg::expm_frechet(x.matrix(), v.matrix());
    let back = linalg::expm(&(x.matrix() * c(-1.0)));
    AlgebraElement { m: back * frechet }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaurerCartanSide {
    /// `g⁻¹ v`
    Left,
    /// `v g⁻¹`
    Right,
}

pub fn maurer_cartan(g: &GroupElement, v: &CMat, side: MaurerCartanSide) -> Result<AlgebraElement> {
    let inv = linalg::inverse(g.matrix())?;
    let m = match side {
        MaurerCartanSide::Left => inv * v,
        MaurerCartanSide::Right => v * inv,
    };
    AlgebraElement::new(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolynomialKind {
    /// `(1/p!) Σ_τ Tr(X_τ(1) ⋯ X_τ(p))`
    SymmetrizedTrace,
    /// `Tr(X_1) ⋯ Tr(X_p)`
    TraceProduct,
}

/// A symmetric Ad-invariant multilinear form on gl(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantPolynomial {
    pub degree: usize,
    pub kind: PolynomialKind,
}

impl InvariantPolynomial {
    pub fn symmetrized_trace(degree: usize) -> Self {
        Self {
            degree,
            kind: PolynomialKind::SymmetrizedTrace,
        }
    }

    pub fn eval(&self, args: &[AlgebraElement]) -> Result<Complex64> {
        let mats: Vec<CMat> = args.iter().map(|a| a.matrix().clone()).collect();
        self.eval_matrices(&mats)
    }

    pub fn eval_matrices(&self, args: &[CMat]) -> Result<Complex64> {
        let jets: Vec<JetMat> = args.iter().cloned().map(JetMat::constant).collect();
        Ok(self.eval_jets(&jets)?.value())
    }

    /// Evaluation on jets, so derivatives of the arguments propagate.
    pub fn eval_jets(&self, args: &[JetMat]) -> Result<JetScalar> {
        if args.len() != self.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                got: args.len(),
            });
        }
        let p = self.degree;
        Ok(match self.kind {
            PolynomialKind::TraceProduct => args
                .iter()
                .map(JetMat::trace)
                .fold(JetScalar::real(1.0), |acc, t| acc.mul(&t)),
            PolynomialKind::SymmetrizedTrace => {
                if p == 1 {
                    return Ok(args[0].trace());
                }
                // cyclicity lets the first argument stay in front
                let mut acc = JetScalar::zero();
                for (perm, _) in signed_permutations(p - 1) {
                    let prod = perm
                        .iter()
                        .fold(args[0].clone(), |m, &i| m.mul(&args[i + 1]));
                    acc = acc.add(&prod.trace());
                }
                acc.scale(c(1.0 / factorial(p - 1)))
            }
        })
    }
}
