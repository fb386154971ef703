//! Local cocycles near the identity: geodesic simplices σ_l, the
//! evaluation maps f_{m,q}, the fiber integrals β_{m,q} and their sums η_l.
//!
//! Orientation: β_{m,q}(ξ) = ∫_{Δ_q} ω_m(df ξ_1, …, df ξ_l, ∂_{t_q}f, …, ∂_{t_1}f),
//! i.e. frame first and the simplex directions in reverse order. With this
//! choice the p = 2 identity `dη_0 = Σ_j (−1)^j d_j^*η_1` holds with
//! `η_0 = β_{1,3}` and `η_1 = β_{1,2} + β_{2,1}`.

use num_complex::Complex64;

use crate::bss::{bar_face_point, bar_face_tangent, BssEngine};
use crate::error::{Error, Result};
use crate::jet::{JetMat, JetScalar};
use crate::lie::GroupElement;
use crate::linalg::{self, c, CMat};
use crate::numerics::pairwise_sum;
use crate::simplex::{make_rule, QuadratureRule, SimplexPoint};

/// σ_l on jets: `σ_l(g; t) = exp(s · log(g_1 σ_{l−1}(g_2, …; t'/s)))`
/// with `s = 1 − t_0` and `t' = (t_1, …, t_l)`, and the identity at `s = 0`.
pub fn sigma_jet(gs: &[JetMat], t: &[JetScalar], radius: f64) -> Result<JetMat> {
    let l = gs.len();
    if t.len() != l + 1 {
        return Err(Error::DimensionMismatch(format!(
            "σ_{l} needs {} barycentric coordinates, got {}",
            l + 1,
            t.len()
        )));
    }
    if l == 0 {
        return Ok(JetMat::identity(1));
    }
    let dim = gs[0].dim();
    let s = JetScalar::real(1.0).sub(&t[0]);
    if s.value().re <= 1e-15 {
        return Ok(JetMat::identity(dim));
    }
    let q = if l == 1 {
        gs[0].clone()
    } else {
        let inner: Vec<JetScalar> = t[1..].iter().map(|ti| ti.div(&s)).collect();
        gs[0].mul(&sigma_jet(&gs[1..], &inner, radius)?)
    };
    linalg::check_log_domain(q.value())?;
    let log_q = q.log()?;
    let norm = log_q.value().norm();
    if norm >= radius {
        return Err(Error::ChartOverflow { norm, radius });
    }
    Ok(log_q.scale_jet(&s).exp())
}

fn plain_coords(t: &SimplexPoint) -> Vec<JetScalar> {
    t.coords().iter().map(|&x| JetScalar::real(x)).collect()
}

/// A geodesic simplex with vertices `1, g_1, g_1g_2, …` in the log chart.
#[derive(Clone, Debug)]
pub struct GroupSimplex {
    vertices: Vec<GroupElement>,
    radius: f64,
}

/// Builds σ_l(g_1, …, g_l; ·); fails if a vertex leaves the chart.
pub fn geodesic_simplex(gs: &[GroupElement], radius: f64) -> Result<GroupSimplex> {
    let dim = gs.first().map(GroupElement::dim).unwrap_or(1);
    let mut prefix = linalg::identity(dim);
    for g in gs {
        prefix = &prefix * g.matrix();
        GroupElement::new(prefix.clone())?.chart_log(radius)?;
    }
    Ok(GroupSimplex {
        vertices: gs.to_vec(),
        radius,
    })
}

impl GroupSimplex {
    pub fn l(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn eval(&self, t: &SimplexPoint) -> Result<GroupElement> {
        if t.dim() != self.l() {
            return Err(Error::DimensionMismatch(format!(
                "point of Δ_{} on a {}-simplex",
                t.dim(),
                self.l()
            )));
        }
        if self.l() == 0 {
            return Ok(GroupElement::identity(1));
        }
        let gs: Vec<JetMat> = self
            .vertices
            .iter()
            .map(|g| JetMat::constant(g.matrix().clone()))
            .collect();
        let v = sigma_jet(&gs, &plain_coords(t), self.radius)?;
        GroupElement::new(v.value().clone())
    }
}

/// `f_{m,q}(g_1, …, g_{m+q−1}; t) = (g_1, …, g_{m−1}, σ_q(g_m, …; t))`.
pub fn f_mq_eval(m: usize, q: usize, gs: &[GroupElement], t: &SimplexPoint, radius: f64) -> Result<Vec<GroupElement>> {
    if m == 0 || gs.len() != m + q - 1 {
        return Err(Error::DimensionMismatch(format!(
            "f_{{{m},{q}}} takes {} group arguments, got {}",
            (m + q).saturating_sub(1),
            gs.len()
        )));
    }
    let mut out = gs[..m - 1].to_vec();
    if q == 0 {
        out.push(GroupElement::identity(gs.first().map(GroupElement::dim).unwrap_or(1)));
    } else {
        let simplex = GroupSimplex {
            vertices: gs[m - 1..].to_vec(),
            radius,
        };
        out.push(simplex.eval(t)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum ParameterDerivative {
    /// Forward-mode jets through the σ recursion.
    #[default]
    Exact,
    /// Central differences with the given step.
    CentralDifference { step: f64 },
}

/// Evaluator for β_{m,q} and η_l on top of a [`BssEngine`].
#[derive(Clone, Debug)]
pub struct LocalEngine {
    bss: BssEngine,
    rules: Vec<QuadratureRule>,
    radius: f64,
    derivative: ParameterDerivative,
}

impl LocalEngine {
    /// `degree` is the exact degree of the Δ_q rules used for β_{m,q}.
    pub fn new(bss: BssEngine, degree: usize, radius: f64) -> Result<Self> {
        let rules = (0..2 * bss.p())
            .map(|q| make_rule(q, degree))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            bss,
            rules,
            radius,
            derivative: ParameterDerivative::Exact,
        })
    }

    pub fn with_derivative(mut self, derivative: ParameterDerivative) -> Self {
        self.derivative = derivative;
        self
    }

    pub fn bss(&self) -> &BssEngine {
        &self.bss
    }

    pub fn p(&self) -> usize {
        self.bss.p()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// β_{m,q} at jets `gs` (order k) on a frame of jets; the result has order k.
    pub fn beta_jet(&self, m: usize, q: usize, gs: &[JetMat], frame: &[Vec<JetMat>]) -> Result<JetScalar> {
        let p = self.p();
        if m == 0 || gs.len() + 1 != m + q {
            return Err(Error::DimensionMismatch(format!(
                "β_{{{m},{q}}} takes {} group arguments, got {}",
                (m + q).saturating_sub(1),
                gs.len()
            )));
        }
        if m > p {
            return Ok(JetScalar::zero());
        }
        let degree = (2 * p).checked_sub(m + q).ok_or(Error::DegreeMismatch {
            expected: 0,
            got: frame.len(),
        })?;
        if frame.len() != degree {
            return Err(Error::DegreeMismatch {
                expected: degree,
                got: frame.len(),
            });
        }
        let order = gs
            .iter()
            .chain(frame.iter().flatten())
            .map(JetMat::order)
            .max()
            .unwrap_or(0);
        let gs: Vec<JetMat> = gs.iter().map(|g| g.lifted(order)).collect();
        let frame: Vec<Vec<JetMat>> = frame
            .iter()
            .map(|v| v.iter().map(|x| x.lifted(order)).collect())
            .collect();
        let dim = gs[0].dim();
        let rule = &self.rules[q];
        let head = &gs[..m - 1];
        let tail = &gs[m - 1..];
        let mut terms = Vec::with_capacity(rule.len());
        for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t: Vec<JetScalar> = node
                .coords()
                .iter()
                .map(|&x| JetScalar::real(x).lifted(order))
                .collect();
            let sigma = if q == 0 {
                JetMat::identity(dim).lifted(order)
            } else {
                sigma_jet(tail, &t, self.radius)?
            };
            let mut point = head.to_vec();
            point.push(sigma);
            let mut vectors = Vec::with_capacity(frame.len() + q);
            for xi in &frame {
                let moved: Vec<JetMat> = tail
                    .iter()
                    .zip(&xi[m - 1..])
                    .map(|(g, v)| g.extended(v, order))
                    .collect();
                let d_sigma = if q == 0 {
                    JetMat::zeros(dim).lifted(order)
                } else {
                    sigma_jet(&moved, &lift_coords(&t, order), self.radius)?.split_top().1
                };
                let mut v = xi[..m - 1].to_vec();
                v.push(d_sigma);
                vectors.push(v);
            }
            for i in (1..=q).rev() {
                let lifted: Vec<JetMat> = tail.iter().map(|g| g.lifted(order + 1)).collect();
                let mut ti = lift_coords(&t, order);
                // moving t_i moves t_0 the opposite way
                ti[i] = ti[i].add(&unit_top(order));
                ti[0] = ti[0].sub(&unit_top(order));
                let (_, d_t) = sigma_jet(&lifted, &ti, self.radius)?.split_top();
                let mut v = vec![JetMat::zeros(dim).lifted(order); m - 1];
                v.push(d_t);
                vectors.push(v);
            }
            terms.push(self.bss.omega_jet(&point, &vectors)?.scale(c(w)));
        }
        Ok(sum_scalar_jets(&terms))
    }

    pub fn beta(&self, m: usize, q: usize, gs: &[CMat], frame: &[Vec<CMat>]) -> Result<Complex64> {
        Ok(self.beta_jet(m, q, &constants(gs), &constant_frame(frame))?.value())
    }

    /// η_l = Σ_{m+q = 2p−l, 1 ≤ m ≤ p} β_{m,q} at `2p − 1 − l` group arguments.
    pub fn eta_jet(&self, l: usize, gs: &[JetMat], frame: &[Vec<JetMat>]) -> Result<JetScalar> {
        let p = self.p();
        if l >= p {
            return Err(Error::IndexOutOfRange { index: l, max: p - 1 });
        }
        let arity = 2 * p - 1 - l;
        if gs.len() != arity {
            return Err(Error::DimensionMismatch(format!(
                "η_{l} takes {arity} group arguments, got {}",
                gs.len()
            )));
        }
        let mut terms = Vec::new();
        for m in 1..=p {
            let q = 2 * p - l - m;
            terms.push(self.beta_jet(m, q, gs, frame)?);
        }
        Ok(sum_scalar_jets(&terms))
    }

    pub fn eta(&self, l: usize, gs: &[CMat], frame: &[Vec<CMat>]) -> Result<Complex64> {
        Ok(self.eta_jet(l, &constants(gs), &constant_frame(frame))?.value())
    }

    /// Directional derivative of η_0 at `gs` along `xi`.
    pub fn d_eta0(&self, gs: &[CMat], xi: &[CMat]) -> Result<Complex64> {
        match self.derivative {
            ParameterDerivative::Exact => {
                let jets: Vec<JetMat> = gs
                    .iter()
                    .zip(xi)
                    .map(|(g, v)| JetMat::with_direction(g.clone(), v.clone(), 0))
                    .collect();
                Ok(self.eta_jet(0, &jets, &[])?.part(1))
            }
            ParameterDerivative::CentralDifference { step } => {
                let shift = |s: f64| -> Vec<CMat> { gs.iter().zip(xi).map(|(g, v)| g + v * c(s)).collect() };
                let plus = self.eta(0, &shift(step), &[])?;
                let minus = self.eta(0, &shift(-step), &[])?;
                Ok((plus - minus) / (2.0 * step))
            }
        }
    }

    /// `Σ_j (−1)^j d_j^*η_1` at `gs ∈ U^{2p−1}` along `xi`, for p = 2.
    pub fn eta1_face_sum(&self, gs: &[CMat], xi: &[CMat]) -> Result<Complex64> {
        let mut terms = Vec::new();
        for j in 0..=gs.len() {
            let y = bar_face_point(j, gs)?;
            let v = bar_face_tangent(j, gs, xi)?;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(self.eta(1, &y, &[v])? * sign);
        }
        Ok(pairwise_sum(&terms))
    }
}

fn unit_top(order: usize) -> JetScalar {
    JetScalar::zero().with_part(1 << order, c(1.0))
}

fn lift_coords(t: &[JetScalar], order: usize) -> Vec<JetScalar> {
    t.iter().map(|x| x.lifted(order + 1)).collect()
}

fn sum_scalar_jets(terms: &[JetScalar]) -> JetScalar {
    let len = terms.iter().map(|t| t.parts().len()).max().unwrap_or(1);
    let mut out = JetScalar::zero();
    for mask in 0..len {
        let col: Vec<Complex64> = terms.iter().map(|t| t.part(mask)).collect();
        out = out.with_part(mask, pairwise_sum(&col));
    }
    out
}

fn constants(ms: &[CMat]) -> Vec<JetMat> {
    ms.iter().cloned().map(JetMat::constant).collect()
}

fn constant_frame(frame: &[Vec<CMat>]) -> Vec<Vec<JetMat>> {
    frame.iter().map(|v| constants(v)).collect()
}

/// Outcome of one evaluation of the p = 2 identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaCocycleSample {
    pub d_eta0: Complex64,
    pub face_sum: Complex64,
}

impl EtaCocycleSample {
    pub fn residual(&self) -> f64 {
        (self.d_eta0 - self.face_sum).norm()
    }
}

/// Checks `dη_0 = Σ_{j=0}^{3} (−1)^j d_j^*η_1` at a triple along `xi`.
pub fn verify_eta_cocycle_p2(engine: &LocalEngine, gs: &[CMat], xi: &[CMat]) -> Result<EtaCocycleSample> {
    if engine.p() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            got: engine.p(),
        });
    }
    if gs.len() != 3 || xi.len() != 3 {
        return Err(Error::DimensionMismatch("the identity is checked on U³".into()));
    }
    Ok(EtaCocycleSample {
        d_eta0: engine.d_eta0(gs, xi)?,
        face_sum: engine.eta1_face_sum(gs, xi)?,
    })
}
