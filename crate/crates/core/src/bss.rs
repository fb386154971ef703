//! Bott–Shulman–Stasheff forms ω_n on G^n.
//!
//! Level n of the universal bundle is `G^{n+1} → G^n`,
//! `(g_0, …, g_n) ↦ (g_0⁻¹g_1, …, g_{n−1}⁻¹g_n)`. Each section σ_i (the one
//! with `g_i = 1`) carries a flat connection; in the σ_0 gauge the flat
//! connection of σ_i has form `A_i = −dP_i · P_i⁻¹` with prefix products
//! `P_i = x_1⋯x_i`. The interpolated connection `A = Σ t_i A_i` on
//! `G^n × Δ_n` has curvature
//!
//! ```text
//! F(u, w) = Σ_i (τ_u,i A_i(w) − τ_w,i A_i(u)) − Σ_i t_i [A_i(u), A_i(w)] + [A(u), A(w)]
//! ```
//!
//! (τ the Δ-components), and ω_n is the fiber integral of `P(F^p)` with the
//! G^n-frame in the leading slots and `∂_{t_1}, …, ∂_{t_n}` trailing.
//!
//! All evaluation runs on [`JetMat`] so that exact derivatives of ω with
//! respect to the base point are available to callers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{JetMat, JetScalar};
use crate::lie::{GroupElement, InvariantPolynomial};
use crate::linalg::{self, c, CMat};
use crate::numerics::{factorial, pairwise_sum, signed_matchings, signed_permutations};
use crate::simplex::{make_rule, QuadratureRule, SimplexPoint};

/// Tangent vector to G^n at some point: one ambient matrix per slot.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleTangent {
    slots: Vec<CMat>,
}

impl TupleTangent {
    pub fn new(slots: Vec<CMat>) -> Result<Self> {
        if slots.iter().any(|m| !linalg::is_finite(m)) {
            return Err(Error::NonFinite);
        }
        Ok(Self { slots })
    }

    /// `(v)_j`: the vector `v` placed in slot `j` (1-based) of G^n.
    pub fn in_slot(n: usize, j: usize, v: CMat) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, max: n });
        }
        let dim = v.nrows();
        let mut slots = vec![linalg::zeros(dim); n];
        slots[j - 1] = v;
        Self::new(slots)
    }

    pub fn slots(&self) -> &[CMat] {
        &self.slots
    }
}

/// A point of G^n together with a frame of tangent vectors there.
#[derive(Clone, Debug)]
pub struct TuplePointWithFrame {
    point: Vec<GroupElement>,
    vectors: Vec<TupleTangent>,
}

impl TuplePointWithFrame {
    pub fn new(point: Vec<GroupElement>, vectors: Vec<TupleTangent>) -> Result<Self> {
        let n = point.len();
        let dim = point.first().map(GroupElement::dim).unwrap_or(0);
        if point.iter().any(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch("group elements of mixed size".into()));
        }
        for v in &vectors {
            if v.slots.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "tangent has {} slots on G^{n}",
                    v.slots.len()
                )));
            }
            if v.slots.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
                return Err(Error::DimensionMismatch("tangent matrix of wrong size".into()));
            }
        }
        Ok(Self { point, vectors })
    }

    /// Frame given as `(slot, matrix)` pairs with 1-based slots.
    pub fn slot_tagged(point: Vec<GroupElement>, tagged: Vec<(usize, CMat)>) -> Result<Self> {
        let n = point.len();
        let vectors = tagged
            .into_iter()
            .map(|(j, v)| TupleTangent::in_slot(n, j, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(point, vectors)
    }

    /// Unchecked constructor from raw matrices (internal fast path).
    pub fn from_matrices(point: &[CMat], vectors: &[Vec<CMat>]) -> Result<Self> {
        let point = point
            .iter()
            .cloned()
            .map(GroupElement::new)
            .collect::<Result<Vec<_>>>()?;
        let vectors = vectors
            .iter()
            .cloned()
            .map(TupleTangent::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(point, vectors)
    }

    pub fn n(&self) -> usize {
        self.point.len()
    }

    pub fn point(&self) -> &[GroupElement] {
        &self.point
    }

    pub fn vectors(&self) -> &[TupleTangent] {
        &self.vectors
    }

    pub fn point_matrices(&self) -> Vec<CMat> {
        self.point.iter().map(|g| g.matrix().clone()).collect()
    }

    pub fn vector_matrices(&self) -> Vec<Vec<CMat>> {
        self.vectors.iter().map(|v| v.slots.clone()).collect()
    }

    fn jets(&self) -> (Vec<JetMat>, Vec<Vec<JetMat>>) {
        let x = self.point.iter().map(|g| JetMat::constant(g.matrix().clone())).collect();
        let f = self
            .vectors
            .iter()
            .map(|v| v.slots.iter().cloned().map(JetMat::constant).collect())
            .collect();
        (x, f)
    }
}

/// `(g_0, …, g_n) ↦ (g_0⁻¹g_1, …, g_{n−1}⁻¹g_n)`.
pub fn universal_projection(lift: &[GroupElement]) -> Result<Vec<GroupElement>> {
    lift.windows(2)
        .map(|w| GroupElement::new(linalg::inverse(w[0].matrix())? * w[1].matrix()))
        .collect()
}

/// The section whose `i`-th entry is the identity.
pub fn section_sigma(i: usize, x: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let n = x.len();
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let dim = x.first().map(GroupElement::dim).unwrap_or(1);
    let mut prefixes = vec![linalg::identity(dim)];
    for g in x {
        let next = prefixes.last().unwrap() * g.matrix();
        prefixes.push(next);
    }
    let shift = linalg::inverse(&prefixes[i])?;
    prefixes
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if k == i {
                Ok(GroupElement::identity(dim))
            } else {
                GroupElement::new(&shift * p)
            }
        })
        .collect()
}

/// Prefix products `P_0 = 1, P_i = x_1⋯x_i` and their inverses.
fn prefixes(x: &[JetMat]) -> Result<(Vec<JetMat>, Vec<JetMat>)> {
    let dim = x.first().map(JetMat::dim).unwrap_or(1);
    let mut p = vec![JetMat::identity(dim)];
    for xi in x {
        let next = p.last().unwrap().mul(xi);
        p.push(next);
    }
    let inv = p.iter().map(JetMat::inverse).collect::<Result<Vec<_>>>()?;
    Ok((p, inv))
}

/// `A_0(v), …, A_n(v)` in the σ_0 gauge, via `dP_i = dP_{i−1} x_i + P_{i−1} v_i`.
fn connection_coefficients(x: &[JetMat], p: &[JetMat], p_inv: &[JetMat], v: &[JetMat]) -> Vec<JetMat> {
    let dim = p[0].dim();
    let mut out = vec![JetMat::zeros(dim)];
    let mut dp = JetMat::zeros(dim);
    for i in 1..=x.len() {
        dp = dp.mul(&x[i - 1]).add(&p[i - 1].mul(&v[i - 1]));
        out.push(dp.mul(&p_inv[i]).scale(c(-1.0)));
    }
    out
}

fn combine(coeffs: &[JetMat], t: &[f64]) -> JetMat {
    let mut acc = JetMat::zeros(coeffs[0].dim());
    for (a, &ti) in coeffs.iter().zip(t).skip(1) {
        acc = acc.add(&a.scale(c(ti)));
    }
    acc
}

/// Vector on `G^n × Δ_n`: a G^n part and components along `∂_{t_1}, …, ∂_{t_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedTangent {
    pub base: Vec<CMat>,
    pub fiber: Vec<f64>,
}

impl MixedTangent {
    pub fn base_only(base: Vec<CMat>) -> Self {
        let n = base.len();
        Self {
            base,
            fiber: vec![0.0; n],
        }
    }

    /// `∂_{t_j}` for `j ∈ 1..=n`.
    pub fn fiber_direction(n: usize, dim: usize, j: usize) -> Self {
        let mut fiber = vec![0.0; n];
        fiber[j - 1] = 1.0;
        Self {
            base: vec![linalg::zeros(dim); n],
            fiber,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.base.len() != n || self.fiber.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "mixed tangent with {} base / {} fiber components on G^{n} × Δ_{n}",
                self.base.len(),
                self.fiber.len()
            )));
        }
        Ok(())
    }
}

fn constants(ms: &[CMat]) -> Vec<JetMat> {
    ms.iter().cloned().map(JetMat::constant).collect()
}

fn group_matrices(x: &[GroupElement]) -> Vec<CMat> {
    x.iter().map(|g| g.matrix().clone()).collect()
}

/// Value of the interpolated connection on `v`, in the trivialization of
/// the section σ_gauge. Coefficients come from differentiating the
/// transition functions `P_i⁻¹ P_gauge` directly.
pub fn interpolated_connection_form(
    t: &SimplexPoint,
    x: &[GroupElement],
    v: &MixedTangent,
    gauge: usize,
) -> Result<CMat> {
    let n = x.len();
    v.check(n)?;
    if t.dim() != n {
        return Err(Error::DimensionMismatch(format!("point of Δ_{} on G^{n}", t.dim())));
    }
    if gauge > n {
        return Err(Error::IndexOutOfRange { index: gauge, max: n });
    }
    let xs: Vec<JetMat> = group_matrices(x)
        .into_iter()
        .zip(&v.base)
        .map(|(g, dv)| JetMat::with_direction(g, dv.clone(), 0))
        .collect();
    let (p, p_inv) = prefixes(&xs)?;
    let dim = xs.first().map(JetMat::dim).unwrap_or(1);
    let mut acc = linalg::zeros(dim);
    for (i, &ti) in t.coords().iter().enumerate() {
        let h = p_inv[i].mul(&p[gauge]);
        let h_inv = linalg::inverse(h.value())?;
        acc += h_inv * h.part(1) * c(ti);
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum DerivativeBackend {
    /// Closed-form differentiation of the connection coefficients.
    #[default]
    Exact,
    /// Central differences with the given step, as a cross-check.
    CentralDifference { step: f64 },
}

fn connection_value_raw(x: &[CMat], t_affine: &[f64], v: &[CMat]) -> Result<CMat> {
    let xs = constants(x);
    let (p, p_inv) = prefixes(&xs)?;
    let coeffs = connection_coefficients(&xs, &p, &p_inv, &constants(v));
    let mut t = vec![1.0 - t_affine.iter().sum::<f64>()];
    t.extend_from_slice(t_affine);
    Ok(combine(&coeffs, &t).value().clone())
}

/// Curvature of the interpolated connection (σ_0 gauge) on two mixed vectors.
pub fn curvature_eval(
    t: &SimplexPoint,
    x: &[GroupElement],
    u: &MixedTangent,
    w: &MixedTangent,
    backend: DerivativeBackend,
) -> Result<CMat> {
    let n = x.len();
    u.check(n)?;
    w.check(n)?;
    let xm = group_matrices(x);
    match backend {
        DerivativeBackend::Exact => {
            let xs = constants(&xm);
            let (p, p_inv) = prefixes(&xs)?;
            let au = connection_coefficients(&xs, &p, &p_inv, &constants(&u.base));
            let aw = connection_coefficients(&xs, &p, &p_inv, &constants(&w.base));
            let tc = t.coords();
            let mut f = combine(&au, tc).commutator(&combine(&aw, tc));
            for i in 1..=n {
                f = f
                    .add(&aw[i].scale(c(u.fiber[i - 1])))
                    .sub(&au[i].scale(c(w.fiber[i - 1])))
                    .sub(&au[i].commutator(&aw[i]).scale(c(tc[i])));
            }
            Ok(f.value().clone())
        }
        DerivativeBackend::CentralDifference { step } => {
            // dA(u, w) = u·A(w) − w·A(u) for constant ambient fields
            let shifted = |dir: &MixedTangent, s: f64| -> (Vec<CMat>, Vec<f64>) {
                let xs = xm.iter().zip(&dir.base).map(|(g, d)| g + d * c(s)).collect();
                let ts = t.affine().iter().zip(&dir.fiber).map(|(a, b)| a + s * b).collect();
                (xs, ts)
            };
            let deriv = |dir: &MixedTangent, arg: &MixedTangent| -> Result<CMat> {
                let (xp, tp) = shifted(dir, step);
                let (xm_, tm) = shifted(dir, -step);
                let plus = connection_value_raw(&xp, &tp, &arg.base)?;
                let minus = connection_value_raw(&xm_, &tm, &arg.base)?;
                Ok((plus - minus) * c(0.5 / step))
            };
            let a_u = connection_value_raw(&xm, t.affine(), &u.base)?;
            let a_w = connection_value_raw(&xm, t.affine(), &w.base)?;
            Ok(deriv(u, w)? - deriv(w, u)? + linalg::commutator(&a_u, &a_w))
        }
    }
}

fn sum_jets(terms: &[JetScalar]) -> JetScalar {
    let len = terms.iter().map(|t| t.parts().len()).max().unwrap_or(1);
    let mut out = JetScalar::zero();
    for mask in 0..len {
        let col: Vec<Complex64> = terms.iter().map(|t| t.part(mask)).collect();
        out = out.with_part(mask, pairwise_sum(&col));
    }
    out
}

/// Evaluator for ω_n of a fixed invariant polynomial; caches the fiber rules.
#[derive(Clone, Debug)]
pub struct BssEngine {
    poly: InvariantPolynomial,
    rules: Vec<QuadratureRule>,
}

impl BssEngine {
    /// Rules of degree `2p` integrate the (polynomial) fiber integrand exactly.
    pub fn new(poly: InvariantPolynomial) -> Result<Self> {
        Self::with_degree(poly, 2 * poly.degree)
    }

    pub fn with_degree(poly: InvariantPolynomial, degree: usize) -> Result<Self> {
        let rules = (0..=2 * poly.degree)
            .map(|n| make_rule(n, degree.max(1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { poly, rules })
    }

    pub fn poly(&self) -> InvariantPolynomial {
        self.poly
    }

    pub fn p(&self) -> usize {
        self.poly.degree
    }

    /// ω_n at `x ∈ G^n` on `frame` (each entry a tangent of G^n), on jets.
    pub fn omega_jet(&self, x: &[JetMat], frame: &[Vec<JetMat>]) -> Result<JetScalar> {
        let n = x.len();
        let rule = self
            .rules
            .get(n)
            .ok_or(Error::DegreeMismatch {
                expected: 0,
                got: frame.len(),
            })?;
        omega_generic(self.poly, x, frame, rule)
    }

    pub fn omega(&self, frame: &TuplePointWithFrame) -> Result<Complex64> {
        let (x, f) = frame.jets();
        Ok(self.omega_jet(&x, &f)?.value())
    }

    pub fn omega_raw(&self, x: &[CMat], frame: &[Vec<CMat>]) -> Result<Complex64> {
        let f: Vec<Vec<JetMat>> = frame.iter().map(|v| constants(v)).collect();
        Ok(self.omega_jet(&constants(x), &f)?.value())
    }
}

/// Generic ω_n at jets `x`, integrating over Δ_n with `rule`.
pub fn omega_generic(
    poly: InvariantPolynomial,
    x: &[JetMat],
    frame: &[Vec<JetMat>],
    rule: &QuadratureRule,
) -> Result<JetScalar> {
    let n = x.len();
    let p = poly.degree;
    if n == 0 {
        return Err(Error::DimensionMismatch("ω_n needs n ≥ 1".into()));
    }
    if n > 2 * p || frame.len() != 2 * p - n {
        return Err(Error::DegreeMismatch {
            expected: (2 * p).saturating_sub(n),
            got: frame.len(),
        });
    }
    if rule.q != n {
        return Err(Error::DimensionMismatch(format!("rule on Δ_{} for ω_{n}", rule.q)));
    }
    if let Some(v) = frame.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!("tangent with {} slots on G^{n}", v.len())));
    }
    let r = frame.len();
    let (pr, pr_inv) = prefixes(x)?;
    let coeffs: Vec<Vec<JetMat>> = frame
        .iter()
        .map(|v| connection_coefficients(x, &pr, &pr_inv, v))
        .collect();
    // commutators Σ-independent of t: [A_i(u), A_i(w)]
    let mut brackets = vec![vec![Vec::new(); r]; r];
    for a in 0..r {
        for b in a + 1..r {
            brackets[a][b] = (1..=n).map(|i| coeffs[a][i].commutator(&coeffs[b][i])).collect();
        }
    }
    let matchings = signed_matchings(2 * p);
    let mut terms = Vec::with_capacity(rule.len());
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = node.coords();
        let a_t: Vec<JetMat> = coeffs.iter().map(|cf| combine(cf, t)).collect();
        // F between slot indices; frame first (0..r), then ∂_{t_1..t_n}
        let curvature = |a: usize, b: usize| -> Option<JetMat> {
            match (a < r, b < r) {
                (true, true) => {
                    let mut f = a_t[a].commutator(&a_t[b]);
                    for (i, br) in brackets[a][b].iter().enumerate() {
                        f = f.sub(&br.scale(c(t[i + 1])));
                    }
                    Some(f)
                }
                (true, false) => Some(coeffs[a][b - r + 1].scale(c(-1.0))),
                _ => None,
            }
        };
        let mut f_cache: Vec<Vec<Option<JetMat>>> = vec![vec![None; 2 * p]; 2 * p];
        for a in 0..2 * p {
            for b in a + 1..2 * p {
                f_cache[a][b] = curvature(a, b);
            }
        }
        let mut acc = Vec::new();
        for (m, sign) in &matchings {
            let args: Option<Vec<JetMat>> = m.iter().map(|&(a, b)| f_cache[a][b].clone()).collect();
            if let Some(args) = args {
                acc.push(poly.eval_jets(&args)?.scale(c(*sign)));
            }
        }
        terms.push(sum_jets(&acc).scale(c(w * factorial(p))));
    }
    Ok(sum_jets(&terms))
}

/// Closed form `3k[Tr(g_1⁻¹a_1 b_2 g_2⁻¹) − Tr(g_1⁻¹b_1 a_2 g_2⁻¹)]` on jets.
pub fn closed_omega2_jet(x: &[JetMat], a: &[JetMat], b: &[JetMat], k: f64) -> Result<JetScalar> {
    if x.len() != 2 || a.len() != 2 || b.len() != 2 {
        return Err(Error::DimensionMismatch("closed ω_2 lives on G²".into()));
    }
    let g1i = x[0].inverse()?;
    let g2i = x[1].inverse()?;
    let term = |u: &[JetMat], v: &[JetMat]| g1i.mul(&u[0]).mul(&v[1]).mul(&g2i).trace();
    Ok(term(a, b).sub(&term(b, a)).scale(c(3.0 * k)))
}

pub fn closed_omega2(frame: &TuplePointWithFrame, k: f64) -> Result<Complex64> {
    check_frame(frame, 2, 2)?;
    let (x, f) = frame.jets();
    Ok(closed_omega2_jet(&x, &f[0], &f[1], k)?.value())
}

/// Closed form `c Σ_π sgn(π) Tr(M_π1 M_π2 M_π3)` with `M_i = g⁻¹v_i`.
pub fn closed_omega1_raw(g: &CMat, vectors: &[CMat], coefficient: f64) -> Result<Complex64> {
    if vectors.len() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            got: vectors.len(),
        });
    }
    let gi = linalg::inverse(g)?;
    let m: Vec<CMat> = vectors.iter().map(|v| &gi * v).collect();
    let mut acc = Complex64::default();
    for (perm, sign) in signed_permutations(3) {
        acc += linalg::trace(&(&m[perm[0]] * &m[perm[1]] * &m[perm[2]])) * sign;
    }
    Ok(acc * coefficient)
}

pub fn closed_omega1(frame: &TuplePointWithFrame, coefficient: f64) -> Result<Complex64> {
    check_frame(frame, 1, 3)?;
    let v: Vec<CMat> = frame.vectors.iter().map(|t| t.slots[0].clone()).collect();
    closed_omega1_raw(frame.point[0].matrix(), &v, coefficient)
}

fn check_frame(frame: &TuplePointWithFrame, n: usize, r: usize) -> Result<()> {
    if frame.n() != n {
        return Err(Error::DimensionMismatch(format!("expected a point of G^{n}, got G^{}", frame.n())));
    }
    if frame.vectors.len() != r {
        return Err(Error::DegreeMismatch {
            expected: r,
            got: frame.vectors.len(),
        });
    }
    Ok(())
}

/// Exterior derivative of the closed ω_2 on three tangent vectors of G²,
/// `dω(X,Y,Z) = Xω(Y,Z) − Yω(X,Z) + Zω(X,Y)` with exact directional derivatives.
pub fn closed_domega2(x: &[CMat], vectors: &[Vec<CMat>], k: f64) -> Result<Complex64> {
    if vectors.len() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            got: vectors.len(),
        });
    }
    let along = |dir: usize, a: usize, b: usize| -> Result<Complex64> {
        let xs: Vec<JetMat> = x
            .iter()
            .zip(&vectors[dir])
            .map(|(g, v)| JetMat::with_direction(g.clone(), v.clone(), 0))
            .collect();
        let fa = constants(&vectors[a]);
        let fb = constants(&vectors[b]);
        Ok(closed_omega2_jet(&xs, &fa, &fb, k)?.part(1))
    };
    Ok(along(0, 1, 2)? - along(1, 0, 2)? + along(2, 0, 1)?)
}

/// Result of fitting the closed-form constants against the generic pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    /// ω_2 = 3k Tr(g_1⁻¹dg_1 ∧ dg_2 g_2⁻¹)
    pub k: f64,
    /// ω_1 = c Σ sgn Tr(g⁻¹dg ∧ g⁻¹dg ∧ g⁻¹dg)
    pub omega1_coefficient: f64,
    /// Largest imaginary part seen in the complex least-squares fits.
    pub imaginary_defect: f64,
}

/// Least-squares fit `generic ≈ s · closed(unit)`; returns `s`.
pub fn least_squares_scale(closed_unit: &[Complex64], generic: &[Complex64]) -> Complex64 {
    let num: Vec<Complex64> = closed_unit.iter().zip(generic).map(|(a, b)| a.conj() * b).collect();
    let den: Vec<Complex64> = closed_unit.iter().map(|a| c(a.norm_sqr())).collect();
    pairwise_sum(&num) / pairwise_sum(&den)
}

/// Fits k and the ω_1 coefficient from frames over G² (2 vectors) and
/// over G (3 vectors).
pub fn calibrate(
    engine: &BssEngine,
    frames2: &[TuplePointWithFrame],
    frames1: &[TuplePointWithFrame],
) -> Result<Calibration> {
    let mut closed = Vec::new();
    let mut generic = Vec::new();
    for f in frames2 {
        closed.push(closed_omega2(f, 1.0)?);
        generic.push(engine.omega(f)?);
    }
    let k = least_squares_scale(&closed, &generic);
    closed.clear();
    generic.clear();
    for f in frames1 {
        closed.push(closed_omega1(f, 1.0)?);
        generic.push(engine.omega(f)?);
    }
    let c1 = least_squares_scale(&closed, &generic);
    Ok(Calibration {
        k: k.re,
        omega1_coefficient: c1.re,
        imaginary_defect: k.im.abs().max(c1.im.abs()),
    })
}

/// `s_j: G^{m−1} → G^m` inserting the identity at 0-based position `j`,
/// pushed forward with a zero tangent there; returns ω_m on the image.
pub fn degeneracy_pullback_check(engine: &BssEngine, m: usize, j: usize, frame: &TuplePointWithFrame) -> Result<Complex64> {
    if frame.n() + 1 != m {
        return Err(Error::DimensionMismatch(format!(
            "degeneracy into G^{m} needs a point of G^{}",
            m - 1
        )));
    }
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, max: m - 1 });
    }
    let dim = frame.point.first().map(GroupElement::dim).unwrap_or(1);
    let mut x = frame.point_matrices();
    x.insert(j, linalg::identity(dim));
    let vectors: Vec<Vec<CMat>> = frame
        .vector_matrices()
        .into_iter()
        .map(|mut v| {
            v.insert(j, linalg::zeros(dim));
            v
        })
        .collect();
    engine.omega_raw(&x, &vectors)
}

/// Face map d_j: G^n → G^{n−1} of the bar construction.
pub fn bar_face_point(j: usize, x: &[CMat]) -> Result<Vec<CMat>> {
    let n = x.len();
    if j > n || n == 0 {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    Ok(if j == 0 {
        x[1..].to_vec()
    } else if j == n {
        x[..n - 1].to_vec()
    } else {
        let mut out = x[..j - 1].to_vec();
        out.push(&x[j - 1] * &x[j]);
        out.extend_from_slice(&x[j + 1..]);
        out
    })
}

/// Pushforward of a tangent vector through d_j.
pub fn bar_face_tangent(j: usize, x: &[CMat], v: &[CMat]) -> Result<Vec<CMat>> {
    let n = x.len();
    if j > n || n == 0 {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    Ok(if j == 0 {
        v[1..].to_vec()
    } else if j == n {
        v[..n - 1].to_vec()
    } else {
        let mut out = v[..j - 1].to_vec();
        out.push(&v[j - 1] * &x[j] + &x[j - 1] * &v[j]);
        out.extend_from_slice(&v[j + 1..]);
        out
    })
}

/// `Σ_j signs[j] · d_j^*ω_{n−1}` at `x ∈ G^n`; the plain alternating signs
/// are `(−1)^j`, other choices exist only for negative controls.
pub fn face_pullback_sum(engine: &BssEngine, x: &[CMat], frame: &[Vec<CMat>], signs: &[f64]) -> Result<Complex64> {
    let n = x.len();
    if signs.len() != n + 1 {
        return Err(Error::ArityMismatch {
            expected: n + 1,
            got: signs.len(),
        });
    }
    let mut terms = Vec::with_capacity(n + 1);
    for (j, &s) in signs.iter().enumerate() {
        let y = bar_face_point(j, x)?;
        let f = frame
            .iter()
            .map(|v| bar_face_tangent(j, x, v))
            .collect::<Result<Vec<_>>>()?;
        terms.push(engine.omega_raw(&y, &f)? * s);
    }
    Ok(pairwise_sum(&terms))
}

pub fn alternating_signs(count: usize) -> Vec<f64> {
    (0..count).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

/// `Σ_j (−1)^j d_j^*ω_2` on G³ (should vanish).
pub fn relation_g3_residual(engine: &BssEngine, x: &[CMat], frame: &[Vec<CMat>], signs: &[f64]) -> Result<f64> {
    Ok(face_pullback_sum(engine, x, frame, signs)?.norm())
}

/// `|Σ_j (−1)^j d_j^*ω_1 − dω_2|` on G², with the closed ω_2 at constant `k`.
pub fn relation_g2_residual(engine: &BssEngine, x: &[CMat], frame: &[Vec<CMat>], k: f64, signs: &[f64]) -> Result<f64> {
    let lhs = face_pullback_sum(engine, x, frame, signs)?;
    let rhs = closed_domega2(x, frame, k)?;
    Ok((lhs - rhs).norm())
}

/// The p-linear form on gl(n) obtained from ω_p at the identity of G^p on
/// slot-diagonal frames `((V_1)_1, …, (V_p)_p)`, stored on the matrix-unit basis.
#[derive(Clone, Debug)]
pub struct MultilinearTable {
    pub dim: usize,
    pub p: usize,
    entries: Vec<Complex64>,
}

impl MultilinearTable {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn eval(&self, args: &[&CMat]) -> Result<Complex64> {
        if args.len() != self.p {
            return Err(Error::ArityMismatch {
                expected: self.p,
                got: args.len(),
            });
        }
        let d2 = self.dim * self.dim;
        let flat: Vec<Vec<Complex64>> = args
            .iter()
            .map(|m| (0..d2).map(|i| m[(i / self.dim, i % self.dim)]).collect())
            .collect();
        // contract one index at a time
        let mut acc = self.entries.clone();
        for v in flat.iter().rev() {
            let stride = acc.len() / d2;
            acc = (0..stride)
                .map(|s| (0..d2).map(|i| acc[s * d2 + i] * v[i]).sum())
                .collect();
        }
        Ok(acc[0])
    }
}

pub fn identity_multilinear_form(engine: &BssEngine, dim: usize) -> Result<MultilinearTable> {
    let p = engine.p();
    let d2 = dim * dim;
    let basis: Vec<CMat> = (0..d2)
        .map(|i| {
            let mut m = linalg::zeros(dim);
            m[(i / dim, i % dim)] = c(1.0);
            m
        })
        .collect();
    let x = vec![linalg::identity(dim); p];
    let total = d2.pow(p as u32);
    let mut entries = Vec::with_capacity(total);
    for flat in 0..total {
        // big-endian digits: first argument is the most significant
        let mut idx = vec![0; p];
        let mut rem = flat;
        for slot in (0..p).rev() {
            idx[slot] = rem % d2;
            rem /= d2;
        }
        let frame: Vec<Vec<CMat>> = (0..p)
            .map(|slot| {
                let mut v = vec![linalg::zeros(dim); p];
                v[slot] = basis[idx[slot]].clone();
                v
            })
            .collect();
        entries.push(engine.omega_raw(&x, &frame)?);
    }
    Ok(MultilinearTable { dim, p, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::lie::RealForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_of_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<GroupElement> = (0..3)
            .map(|_| GroupElement::new(sampling::random_group(&mut rng, 2, 0.3, RealForm::Gl)).unwrap())
            .collect();
        for i in 0..=3 {
            let lift = section_sigma(i, &x).unwrap();
            assert_eq!(lift[i].matrix(), &linalg::identity(2));
            let back = universal_projection(&lift).unwrap();
            for (a, b) in back.iter().zip(&x) {
                assert!((a.matrix() - b.matrix()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn frame_validation() {
        let p = vec![GroupElement::identity(2); 2];
        assert!(TuplePointWithFrame::slot_tagged(p.clone(), vec![(3, linalg::zeros(2))]).is_err());
        assert!(TuplePointWithFrame::slot_tagged(p, vec![(2, linalg::zeros(3))]).is_err());
    }

    #[test]
    fn closed_omega2_at_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v1 = sampling::random_matrix(&mut rng, 2);
        let v2 = sampling::random_matrix(&mut rng, 2);
        let p = vec![GroupElement::identity(2); 2];
        let f = TuplePointWithFrame::slot_tagged(p.clone(), vec![(1, v1.clone()), (2, v2.clone())]).unwrap();
        let k = 0.7;
        let expected = linalg::trace(&(&v1 * &v2)) * (3.0 * k);
        assert!((closed_omega2(&f, k).unwrap() - expected).norm() < 1e-14);
        let same = TuplePointWithFrame::slot_tagged(p, vec![(1, v1), (1, v2)]).unwrap();
        assert_eq!(closed_omega2(&same, k).unwrap(), Complex64::default());
    }

    #[test]
    fn degree_mismatch_reported() {
        let engine = BssEngine::new(InvariantPolynomial::symmetrized_trace(2)).unwrap();
        let p = vec![GroupElement::identity(2); 2];
        let f = TuplePointWithFrame::slot_tagged(p, vec![(1, linalg::identity(2))]).unwrap();
        assert!(matches!(engine.omega(&f), Err(Error::DegreeMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn bar_faces_of_two_tuple() {
        let a = linalg::identity(2) * c(2.0);
        let b = linalg::identity(2) * c(3.0);
        let x = vec![a.clone(), b.clone()];
        assert_eq!(bar_face_point(0, &x).unwrap(), vec![b.clone()]);
        assert_eq!(bar_face_point(1, &x).unwrap(), vec![&a * &b]);
        assert_eq!(bar_face_point(2, &x).unwrap(), vec![a]);
    }
}
