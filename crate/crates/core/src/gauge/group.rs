//! Group-level cochains on Map(X, G): transgressed η_l, the loop-group
//! 2-cocycle, differentiation to the Lie algebra and the central extension.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{GaugeAlgebraElement, GaugeMap};
use crate::bss::Calibration;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::local::LocalEngine;
use crate::numerics::{pairwise_sum, signed_permutations};
use crate::simplex::gauss_jacobi_unit;

/// `∫_X ev^*η_l` where `ev(g; x) = (g_1(x), …)`.
///
/// The `k_dim` coordinate directions of X come first, followed by `frame`,
/// whose entries are gauge-algebra tuples acting by left translation
/// (`ξ_j ↦ g_j ξ_j`).
pub fn transgress_eta(
    local: &LocalEngine,
    l: usize,
    k_dim: usize,
    maps: &[GaugeMap],
    frame: &[Vec<GaugeAlgebraElement>],
) -> Result<Complex64> {
    if l < k_dim {
        return Err(Error::DegreeMismatch {
            expected: k_dim,
            got: l,
        });
    }
    if frame.len() != l - k_dim {
        return Err(Error::DegreeMismatch {
            expected: l - k_dim,
            got: frame.len(),
        });
    }
    let domain = maps.first().ok_or(Error::DimensionMismatch("no gauge maps".into()))?.domain();
    if domain.dims() != k_dim || maps.iter().any(|g| g.domain() != domain) {
        return Err(Error::DimensionMismatch(format!(
            "transgression over a {}-dimensional grid with k_dim = {k_dim}",
            domain.dims()
        )));
    }
    if frame.iter().flatten().any(|xi| xi.domain() != domain) || frame.iter().any(|v| v.len() != maps.len()) {
        return Err(Error::DimensionMismatch("frame does not match the gauge tuple".into()));
    }
    let values: Vec<Complex64> = (0..domain.len())
        .into_par_iter()
        .map(|i| {
            let gs: Vec<CMat> = maps.iter().map(|g| g.values()[i].clone()).collect();
            let mut vectors: Vec<Vec<CMat>> = (0..k_dim)
                .map(|ax| maps.iter().map(|g| g.partial(ax)[i].clone()).collect())
                .collect();
            for v in frame {
                vectors.push(gs.iter().zip(v).map(|(g, xi)| g * &xi.values()[i]).collect());
            }
            local.eta(l, &gs, &vectors)
        })
        .collect::<Result<_>>()?;
    Ok(domain.integrate(&values))
}

/// The two parts of the loop-group 2-cocycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopCocycleValue {
    pub a: Complex64,
    pub b: Complex64,
}

impl LoopCocycleValue {
    pub fn total(&self) -> Complex64 {
        self.a + self.b
    }
}

/// Closed-form evaluator of `c = a + b` on Map(S¹, G).
///
/// On Δ_2 it uses collapsed coordinates `t_1 = s(1 − r)`, `t_2 = sr`, in which
/// `σ(g_1, g_2; t) = exp(s Z(r))` with `Z(r) = log(g_1 exp(r log g_2))`. The
/// s-integral is then done exactly from the power series of `exp(−sZ) d exp(sZ)`,
/// and `r` uses Gauss–Legendre.
#[derive(Clone, Debug)]
pub struct LoopCocycle {
    k: f64,
    omega1_coefficient: f64,
    radius: f64,
    r_nodes: Vec<f64>,
    r_weights: Vec<f64>,
}

const SERIES_TERMS: usize = 40;

impl LoopCocycle {
    pub fn new(k: f64, omega1_coefficient: f64, quadrature_degree: usize, radius: f64) -> Self {
        let (r_nodes, r_weights) = gauss_jacobi_unit(quadrature_degree / 2 + 1, 0.0);
        Self {
            k,
            omega1_coefficient,
            radius,
            r_nodes,
            r_weights,
        }
    }

    pub fn from_calibration(cal: &Calibration, quadrature_degree: usize, radius: f64) -> Self {
        Self::new(cal.k, cal.omega1_coefficient, quadrature_degree, radius)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, g1: &GaugeMap, g2: &GaugeMap) -> Result<LoopCocycleValue> {
        let domain = g1.domain();
        if domain.dims() != 1 || g2.domain() != domain || g1.dim() != g2.dim() {
            return Err(Error::DimensionMismatch("the loop cocycle needs two loops on one circle".into()));
        }
        let parts: Vec<(Complex64, Complex64)> = (0..domain.len())
            .into_par_iter()
            .map(|i| {
                self.integrands(
                    &g1.values()[i],
                    &g1.partial(0)[i],
                    &g2.values()[i],
                    &g2.partial(0)[i],
                )
            })
            .collect::<Result<_>>()?;
        let a: Vec<Complex64> = parts.iter().map(|p| p.0).collect();
        let b: Vec<Complex64> = parts.iter().map(|p| p.1).collect();
        Ok(LoopCocycleValue {
            a: domain.integrate(&a),
            b: domain.integrate(&b),
        })
    }

    pub fn c(&self, g1: &GaugeMap, g2: &GaugeMap) -> Result<Complex64> {
        Ok(self.eval(g1, g2)?.total())
    }

    /// Integrands over Δ_2 and Δ_1 at one grid point.
    fn integrands(&self, g1: &CMat, dg1: &CMat, g2: &CMat, dg2: &CMat) -> Result<(Complex64, Complex64)> {
        let g1_inv = linalg::inverse(g1)?;
        let (y, dy) = self.log_with_derivatives(g2, std::slice::from_ref(dg2))?;
        // ψ = (g_1, exp(tY)): only ∂_u of the first slot pairs with ∂_t of the second
        let b = linalg::trace(&(&g1_inv * dg1 * &y)) * (3.0 * self.k);

        let mut terms = Vec::with_capacity(self.r_nodes.len());
        for (&r, &w) in self.r_nodes.iter().zip(&self.r_weights) {
            let ry = &y * c(r);
            let e = linalg::expm(&ry);
            let de = &e * left_dexp(&ry, &(&dy[0] * c(r)));
            let q = g1 * &e;
            let dq_r = &q * &y;
            let dq_u = dg1 * &e + g1 * &de;
            let (z, dz) = self.log_with_derivatives(&q, &[dq_r, dq_u])?;
            terms.push(s_integral(&z, &dz[1], &dz[0]) * w);
        }
        // Δ_2 orientation (∂_u, ∂_{t_2}, ∂_{t_1}) equals −(∂_u, ∂_s, ∂_r)/s
        let a = pairwise_sum(&terms) * (-3.0 * self.omega1_coefficient);
        Ok((a, b))
    }

    /// `log m` and its derivatives along each `dm`, from one block logarithm.
    fn log_with_derivatives(&self, m: &CMat, dms: &[CMat]) -> Result<(CMat, Vec<CMat>)> {
        let n = m.nrows();
        let k = dms.len() + 1;
        let mut big = CMat::zeros(k * n, k * n);
        for b in 0..k {
            big.view_mut((b * n, b * n), (n, n)).copy_from(m);
        }
        for (j, d) in dms.iter().enumerate() {
            big.view_mut((0, (j + 1) * n), (n, n)).copy_from(d);
        }
        linalg::check_log_domain(m)?;
        let log = linalg::logm(&big)?;
        let z = log.view((0, 0), (n, n)).into_owned();
        let norm = z.norm();
        if norm >= self.radius {
            return Err(Error::ChartOverflow {
                norm,
                radius: self.radius,
            });
        }
        let ds = (1..k).map(|j| log.view((0, j * n), (n, n)).into_owned()).collect();
        Ok((z, ds))
    }
}

fn ad_series(z: &CMat, v: &CMat) -> Vec<CMat> {
    // (−1)^k ad_z^k(v) / (k+1)!
    let mut out = Vec::with_capacity(SERIES_TERMS);
    let scale = v.norm().max(f64::MIN_POSITIVE);
    let mut cur = v.clone();
    for k in 0..SERIES_TERMS {
        if k > 0 {
            cur = linalg::commutator(z, &cur) * c(-1.0 / (k as f64 + 1.0));
        }
        let small = cur.norm() < 1e-18 * scale;
        out.push(cur.clone());
        if small {
            break;
        }
    }
    out
}

/// `exp(−x) · D exp(x)[v]` by its commutator series.
fn left_dexp(x: &CMat, v: &CMat) -> CMat {
    ad_series(x, v).into_iter().fold(linalg::zeros(x.nrows()), |acc, t| acc + t)
}

/// `∫_0^1 Tr(M_u(s) [Z, M_r(s)]) ds` with `M_·(s) = Σ_k s^{k+1} U_k`.
fn s_integral(z: &CMat, dz_u: &CMat, dz_r: &CMat) -> Complex64 {
    let u = ad_series(z, dz_u);
    let r: Vec<CMat> = ad_series(z, dz_r).iter().map(|m| linalg::commutator(z, m)).collect();
    let mut terms = Vec::with_capacity(u.len() * r.len());
    for (a, ua) in u.iter().enumerate() {
        for (b, rb) in r.iter().enumerate() {
            terms.push(linalg::trace(&(ua * rb)) / (a + b + 3) as f64);
        }
    }
    pairwise_sum(&terms)
}

/// Lie-algebra cochain from a local group p-cochain:
/// `∂^p/∂t_1⋯∂t_p Σ_σ sgn(σ) c(exp(t_σ1 ξ_σ1), …)` at `t = 0`, by a tensor
/// central-difference stencil at `h` and `h/2` with Richardson extrapolation.
pub fn lie_cocycle_from_group<F>(
    cochain: F,
    xis: &[GaugeAlgebraElement],
    h: f64,
    tol: f64,
    radius: f64,
) -> Result<Complex64>
where
    F: Fn(&[GaugeMap]) -> Result<Complex64>,
{
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::Config(format!("differentiation step {h} outside [1e-4, 1e-2]")));
    }
    let d_h = stencil(&cochain, xis, h, radius)?;
    let d_half = stencil(&cochain, xis, h / 2.0, radius)?;
    let extrapolated = (d_half * 4.0 - d_h) / 3.0;
    let disagreement = (d_h - d_half).norm();
    // absolute floor so that vanishing cochains do not trip the check
    let allowance = 10.0 * tol * extrapolated.norm().max(1e-6);
    if disagreement > allowance {
        return Err(Error::StepTooLarge {
            disagreement,
            allowance,
        });
    }
    Ok(extrapolated)
}

fn stencil<F>(cochain: &F, xis: &[GaugeAlgebraElement], h: f64, radius: f64) -> Result<Complex64>
where
    F: Fn(&[GaugeMap]) -> Result<Complex64>,
{
    let p = xis.len();
    let perms = signed_permutations(p);
    let mut terms = Vec::with_capacity((1 << p) * perms.len());
    for signs in 0..(1usize << p) {
        let t: Vec<f64> = (0..p)
            .map(|i| if signs & (1 << i) != 0 { -h } else { h })
            .collect();
        let weight: f64 = t.iter().map(|x| x.signum()).product();
        for (perm, sign) in &perms {
            let maps = perm
                .iter()
                .map(|&j| GaugeMap::exp(&xis[j], t[j], radius))
                .collect::<Result<Vec<_>>>()?;
            terms.push(cochain(&maps)? * (weight * sign));
        }
    }
    Ok(pairwise_sum(&terms) / (2.0 * h).powi(p as i32))
}

/// `δc(g_1, g_2, g_3) = c(g_2, g_3) − c(g_1g_2, g_3) + c(g_1, g_2g_3) − c(g_1, g_2)`.
pub fn group_coboundary<F>(cochain: F, g: &[GaugeMap; 3], radius: f64) -> Result<Complex64>
where
    F: Fn(&GaugeMap, &GaugeMap) -> Result<Complex64>,
{
    let g12 = g[0].product(&g[1], radius)?;
    let g23 = g[1].product(&g[2], radius)?;
    let terms = [
        cochain(&g[1], &g[2])?,
        -cochain(&g12, &g[2])?,
        cochain(&g[0], &g23)?,
        -cochain(&g[0], &g[1])?,
    ];
    Ok(pairwise_sum(&terms))
}

/// Element `(g, z)` of the central extension by ℂ^×.
#[derive(Clone, Debug)]
pub struct ExtensionElement {
    pub g: GaugeMap,
    pub z: Complex64,
}

impl ExtensionElement {
    pub fn unit_over(g: GaugeMap) -> Self {
        Self { g, z: c(1.0) }
    }

    pub fn central(domain: super::GridDomain, dim: usize, z: Complex64) -> Self {
        Self {
            g: GaugeMap::identity(domain, dim),
            z,
        }
    }
}

/// `(g, z)·(h, w) = (gh, z w exp(c(g, h)))`.
pub struct CentralExtension<F> {
    cocycle: F,
    radius: f64,
}

impl<F> CentralExtension<F>
where
    F: Fn(&GaugeMap, &GaugeMap) -> Result<Complex64>,
{
    pub fn new(cocycle: F, radius: f64) -> Self {
        Self { cocycle, radius }
    }

    pub fn mul(&self, x: &ExtensionElement, y: &ExtensionElement) -> Result<ExtensionElement> {
        Ok(ExtensionElement {
            g: x.g.product(&y.g, self.radius)?,
            z: x.z * y.z * (self.cocycle)(&x.g, &y.g)?.exp(),
        })
    }

    /// `|log(z_L / z_R)|` for `(xy)z` against `x(yz)`.
    pub fn associativity_residual(&self, x: &ExtensionElement, y: &ExtensionElement, z: &ExtensionElement) -> Result<f64> {
        let left = self.mul(&self.mul(x, y)?, z)?;
        let right = self.mul(x, &self.mul(y, z)?)?;
        let group_gap = left
            .g
            .values()
            .iter()
            .zip(right.g.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok((left.z / right.z).ln().norm().max(group_gap))
    }
}

/// Associativity residual of the extension on three loops with unit central parts.
pub fn central_extension_demo<F>(ext: &CentralExtension<F>, g1: &GaugeMap, g2: &GaugeMap, g3: &GaugeMap) -> Result<f64>
where
    F: Fn(&GaugeMap, &GaugeMap) -> Result<Complex64>,
{
    ext.associativity_residual(
        &ExtensionElement::unit_over(g1.clone()),
        &ExtensionElement::unit_over(g2.clone()),
        &ExtensionElement::unit_over(g3.clone()),
    )
}

/// Mean of ‖log g‖² over the grid; used to build non-cocycle perturbations.
pub fn mean_log_norm_sq(g: &GaugeMap) -> Result<f64> {
    let v: Vec<f64> = g
        .values()
        .iter()
        .map(|m| linalg::logm(m).map(|l| l.norm_squared()))
        .collect::<Result<_>>()?;
    Ok(crate::numerics::pairwise_sum_real(&v) / v.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::RealForm;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn commutator_series_matches_frechet() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let x = sampling::random_algebra(&mut rng, 3, 0.4, RealForm::Gl);
        let v = sampling::random_matrix(&mut rng, 3);
        let series = linalg::expm(&x) * left_dexp(&x, &v);
        assert!((series - linalg::expm_frechet(&x, &v)).norm() < 1e-14);
    }

    #[test]
    fn block_log_derivatives_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let lc = LoopCocycle::new(-1.0 / 3.0, -1.0 / 3.0, 8, 0.5);
        let m = sampling::random_group(&mut rng, 2, 0.2, RealForm::Gl);
        let d1 = sampling::random_matrix(&mut rng, 2);
        let d2 = sampling::random_matrix(&mut rng, 2);
        let (z, ds) = lc.log_with_derivatives(&m, &[d1.clone(), d2]).unwrap();
        assert!((linalg::expm(&z) - &m).norm() < 1e-14);
        let h = 1e-6;
        let fd = (linalg::logm(&(&m + &d1 * c(h))).unwrap() - linalg::logm(&(&m - &d1 * c(h))).unwrap()) * c(0.5 / h);
        assert!((fd - &ds[0]).norm() < 1e-8);
    }

    #[test]
    fn s_integral_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let z = sampling::random_algebra(&mut rng, 2, 0.3, RealForm::Gl);
        let du = sampling::random_matrix(&mut rng, 2);
        let dr = sampling::random_matrix(&mut rng, 2);
        let (nodes, weights) = gauss_jacobi_unit(12, 0.0);
        let mut acc = Complex64::default();
        for (&s, &w) in nodes.iter().zip(&weights) {
            let sz = &z * c(s);
            let mu = left_dexp(&sz, &(&du * c(s)));
            let mr = left_dexp(&sz, &(&dr * c(s)));
            acc += linalg::trace(&(mu * linalg::commutator(&z, &mr))) * w;
        }
        assert!((acc - s_integral(&z, &du, &dr)).norm() < 1e-14);
    }
}
