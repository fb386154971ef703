//! Gauge groups Map(X, G) and gauge algebras Map(X, g) on periodic grids,
//! X = S¹ (u_k = k/N) or T² (an N × N grid), and the cocycles built on them.

mod algebra;
mod group;

pub use algebra::*;
pub use group::*;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::RealForm;
use crate::linalg::{self, c, CMat};
use crate::numerics::pairwise_sum;
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDomain {
    Circle { n: usize },
    Torus { n: usize },
}

impl GridDomain {
    pub fn dims(&self) -> usize {
        match self {
            GridDomain::Circle { .. } => 1,
            GridDomain::Torus { .. } => 2,
        }
    }

    pub fn side(&self) -> usize {
        match *self {
            GridDomain::Circle { n } | GridDomain::Torus { n } => n,
        }
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dims() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trapezoidal weight; exact for resolved trigonometric polynomials.
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Coordinates in `[0, 1)^dims` of grid point `idx` (row-major).
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let n = self.side();
        match self.dims() {
            1 => vec![idx as f64 / n as f64],
            _ => vec![(idx / n) as f64 / n as f64, (idx % n) as f64 / n as f64],
        }
    }

    /// Grid integral (mean) of complex samples, summed pairwise.
    pub fn integrate(&self, samples: &[Complex64]) -> Complex64 {
        pairwise_sum(samples) * self.weight()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridDerivative {
    /// FFT differentiation, exact on resolved modes.
    #[default]
    Spectral,
    /// Second-order periodic central differences.
    CentralDifference,
}

/// Partial derivative along `axis` of matrix samples on a periodic grid.
pub fn grid_partial(domain: GridDomain, values: &[CMat], axis: usize, method: GridDerivative) -> Result<Vec<CMat>> {
    if axis >= domain.dims() {
        return Err(Error::IndexOutOfRange {
            index: axis,
            max: domain.dims() - 1,
        });
    }
    if values.len() != domain.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples on a grid of {}",
            values.len(),
            domain.len()
        )));
    }
    let n = domain.side();
    let dim = values[0].nrows();
    let (stride, lines): (usize, Vec<usize>) = match (domain.dims(), axis) {
        (1, _) => (1, vec![0]),
        (_, 0) => (n, (0..n).collect()),
        _ => (1, (0..n).map(|i| i * n).collect()),
    };
    let mut out = vec![linalg::zeros(dim); values.len()];
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    for &start in &lines {
        let idx: Vec<usize> = (0..n).map(|k| start + k * stride).collect();
        for r in 0..dim {
            for col in 0..dim {
                let line: Vec<Complex64> = idx.iter().map(|&i| values[i][(r, col)]).collect();
                let d = match method {
                    GridDerivative::Spectral => {
                        let mut buf = line;
                        fwd.process(&mut buf);
                        for (k, z) in buf.iter_mut().enumerate() {
                            let freq = if 2 * k < n {
                                k as f64
                            } else if 2 * k == n {
                                0.0
                            } else {
                                k as f64 - n as f64
                            };
                            *z *= Complex64::new(0.0, 2.0 * std::f64::consts::PI * freq / n as f64);
                        }
                        inv.process(&mut buf);
                        buf
                    }
                    GridDerivative::CentralDifference => (0..n)
                        .map(|k| (line[(k + 1) % n] - line[(k + n - 1) % n]) * (n as f64 / 2.0))
                        .collect(),
                };
                for (k, &i) in idx.iter().enumerate() {
                    out[i][(r, col)] = d[k];
                }
            }
        }
    }
    Ok(out)
}

/// Matrix-valued samples with all first partial derivatives.
#[derive(Clone, Debug)]
pub struct GridField {
    domain: GridDomain,
    values: Vec<CMat>,
    partials: Vec<Vec<CMat>>,
}

impl GridField {
    fn check(domain: GridDomain, values: &[CMat]) -> Result<()> {
        if values.len() != domain.len() || values.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples on a grid of {}",
                values.len(),
                domain.len()
            )));
        }
        if values.iter().any(|m| !linalg::is_finite(m)) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn from_samples(domain: GridDomain, values: Vec<CMat>, method: GridDerivative) -> Result<Self> {
        Self::check(domain, &values)?;
        let partials = (0..domain.dims())
            .map(|a| grid_partial(domain, &values, a, method))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            values,
            partials,
        })
    }

    pub fn with_partials(domain: GridDomain, values: Vec<CMat>, partials: Vec<Vec<CMat>>) -> Result<Self> {
        Self::check(domain, &values)?;
        if partials.len() != domain.dims() || partials.iter().any(|p| p.len() != values.len()) {
            return Err(Error::DimensionMismatch("partials do not match the grid".into()));
        }
        Ok(Self {
            domain,
            values,
            partials,
        })
    }

    pub fn domain(&self) -> GridDomain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn partial(&self, axis: usize) -> &[CMat] {
        &self.partials[axis]
    }

    /// Relabels the circle grid `u_k → u_{k+shift}`.
    pub fn rotated(&self, shift: usize) -> Self {
        let len = self.values.len();
        let rot = |v: &[CMat]| (0..len).map(|k| v[(k + shift) % len].clone()).collect::<Vec<_>>();
        Self {
            domain: self.domain,
            values: rot(&self.values),
            partials: self.partials.iter().map(|p| rot(p)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMat, &CMat, &CMat, &CMat) -> (CMat, CMat)) -> Result<Self> {
        if self.domain != other.domain || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("fields on different grids".into()));
        }
        let values: Vec<CMat> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b, a, b).0)
            .collect();
        let partials = (0..self.domain.dims())
            .map(|ax| {
                (0..values.len())
                    .map(|i| {
                        f(
                            &self.values[i],
                            &other.values[i],
                            &self.partials[ax][i],
                            &other.partials[ax][i],
                        )
                        .1
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            domain: self.domain,
            values,
            partials,
        })
    }
}

/// Element of the gauge algebra Map(X, g).
#[derive(Clone, Debug)]
pub struct GaugeAlgebraElement {
    field: GridField,
}

/// A Fourier mode `coefficient · e^{2πi ⟨freq, x⟩}`.
#[derive(Clone, Debug)]
pub struct Mode {
    pub freq: Vec<i64>,
    pub coefficient: CMat,
}

impl GaugeAlgebraElement {
    pub fn from_field(field: GridField) -> Self {
        Self { field }
    }

    pub fn from_samples(domain: GridDomain, values: Vec<CMat>, method: GridDerivative) -> Result<Self> {
        Ok(Self {
            field: GridField::from_samples(domain, values, method)?,
        })
    }

    /// Trigonometric polynomial with exact partial derivatives.
    pub fn from_modes(domain: GridDomain, dim: usize, modes: &[Mode]) -> Result<Self> {
        let len = domain.len();
        let mut values = vec![linalg::zeros(dim); len];
        let mut partials = vec![vec![linalg::zeros(dim); len]; domain.dims()];
        for m in modes {
            if m.freq.len() != domain.dims() || m.coefficient.nrows() != dim {
                return Err(Error::DimensionMismatch("mode does not match the grid".into()));
            }
            for (i, v) in values.iter_mut().enumerate() {
                let x = domain.point(i);
                let phase: f64 = m.freq.iter().zip(&x).map(|(&f, &xi)| f as f64 * xi).sum();
                let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
                *v += &m.coefficient * e;
                for (ax, p) in partials.iter_mut().enumerate() {
                    let factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI * m.freq[ax] as f64);
                    p[i] += &m.coefficient * (e * factor);
                }
            }
        }
        Ok(Self {
            field: GridField::with_partials(domain, values, partials)?,
        })
    }

    pub fn constant(domain: GridDomain, value: CMat) -> Self {
        let dim = value.nrows();
        let len = domain.len();
        Self {
            field: GridField {
                domain,
                values: vec![value; len],
                partials: vec![vec![linalg::zeros(dim); len]; domain.dims()],
            },
        }
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn domain(&self) -> GridDomain {
        self.field.domain
    }

    pub fn values(&self) -> &[CMat] {
        &self.field.values
    }

    pub fn partial(&self, axis: usize) -> &[CMat] {
        &self.field.partials[axis]
    }

    /// Pointwise commutator, differentiated by the Leibniz rule.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            field: self.field.zip_with(&other.field, |a, b, da, db| {
                (
                    linalg::commutator(a, b),
                    linalg::commutator(da, b) + linalg::commutator(a, db),
                )
            })?,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = &self.field;
        Self {
            field: GridField {
                domain: f.domain,
                values: f.values.iter().map(|m| m * c(s)).collect(),
                partials: f
                    .partials
                    .iter()
                    .map(|p| p.iter().map(|m| m * c(s)).collect())
                    .collect(),
            },
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            field: self.field.zip_with(&other.field, |a, b, da, db| (a + b, da + db))?,
        })
    }

    pub fn rotated(&self, shift: usize) -> Self {
        Self {
            field: self.field.rotated(shift),
        }
    }
}

/// Element of the gauge group Map(X, G), every sample inside the log chart.
#[derive(Clone, Debug)]
pub struct GaugeMap {
    field: GridField,
}

impl GaugeMap {
    fn checked(field: GridField, radius: f64) -> Result<Self> {
        for g in &field.values {
            crate::lie::GroupElement::new(g.clone())?.chart_log(radius)?;
        }
        Ok(Self { field })
    }

    pub fn from_samples(domain: GridDomain, values: Vec<CMat>, method: GridDerivative, radius: f64) -> Result<Self> {
        Self::checked(GridField::from_samples(domain, values, method)?, radius)
    }

    pub fn identity(domain: GridDomain, dim: usize) -> Self {
        let len = domain.len();
        Self {
            field: GridField {
                domain,
                values: vec![linalg::identity(dim); len],
                partials: vec![vec![linalg::zeros(dim); len]; domain.dims()],
            },
        }
    }

    /// Pointwise `exp(s ξ)` with partials from the exact Fréchet derivative.
    pub fn exp(xi: &GaugeAlgebraElement, s: f64, radius: f64) -> Result<Self> {
        let f = &xi.field;
        let values: Vec<CMat> = f.values.iter().map(|x| linalg::expm(&(x * c(s)))).collect();
        let partials = f
            .partials
            .iter()
            .map(|p| {
                f.values
                    .iter()
                    .zip(p)
                    .map(|(x, dx)| linalg::expm_frechet(&(x * c(s)), &(dx * c(s))))
                    .collect()
            })
            .collect();
        Self::checked(GridField::with_partials(f.domain, values, partials)?, radius)
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn domain(&self) -> GridDomain {
        self.field.domain
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn values(&self) -> &[CMat] {
        &self.field.values
    }

    pub fn partial(&self, axis: usize) -> &[CMat] {
        &self.field.partials[axis]
    }

    /// Pointwise product, differentiated by the Leibniz rule.
    pub fn product(&self, other: &Self, radius: f64) -> Result<Self> {
        let field = self
            .field
            .zip_with(&other.field, |a, b, da, db| (a * b, da * b + a * db))?;
        Self::checked(field, radius)
    }

    pub fn rotated(&self, shift: usize) -> Self {
        Self {
            field: self.field.rotated(shift),
        }
    }
}

/// Random trigonometric polynomial with `1..=max_modes` frequency vectors of
/// entries at most `max_freq`; each frequency `f` carries independent
/// coefficients on `e^{±2πi⟨f,x⟩}` and the coefficient norms sum to at most
/// `amplitude`.
pub fn random_trig_algebra<R: Rng + ?Sized>(
    rng: &mut R,
    domain: GridDomain,
    dim: usize,
    max_modes: usize,
    max_freq: i64,
    amplitude: f64,
    form: RealForm,
) -> Result<GaugeAlgebraElement> {
    let count = rng.random_range(1..=max_modes.max(1));
    let freqs: Vec<Vec<i64>> = (0..count)
        .map(|_| (0..domain.dims()).map(|_| rng.random_range(-max_freq..=max_freq)).collect())
        .collect();
    trig_algebra(rng, domain, dim, &freqs, amplitude, form)
}

/// Trigonometric polynomial on the given frequency vectors with random
/// coefficients on `e^{±2πi⟨f,x⟩}`, coefficient norms summing to at most `amplitude`.
pub fn trig_algebra<R: Rng + ?Sized>(
    rng: &mut R,
    domain: GridDomain,
    dim: usize,
    freqs: &[Vec<i64>],
    amplitude: f64,
    form: RealForm,
) -> Result<GaugeAlgebraElement> {
    let share = amplitude / (2 * freqs.len().max(1)) as f64;
    let mut modes = Vec::with_capacity(2 * freqs.len());
    for freq in freqs {
        let neg: Vec<i64> = freq.iter().map(|f| -f).collect();
        for f in [freq.clone(), neg] {
            modes.push(Mode {
                freq: f,
                coefficient: sampling::random_algebra(rng, dim, share, form),
            });
        }
    }
    GaugeAlgebraElement::from_modes(domain, dim, &modes)
}
