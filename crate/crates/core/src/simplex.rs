//! Standard simplices, face/degeneracy maps and quadrature rules.
//!
//! Integrals over Δ_q are taken against Lebesgue measure in the coordinates
//! `(t_1, …, t_q)` with `t_0 = 1 − Σ t_i`, so `vol(Δ_q) = 1/q!`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{factorial, pairwise_sum};

const BARY_TOL: f64 = 1e-14;

/// Barycentric coordinates `(t_0, …, t_q)` on Δ_q.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSimplexPoint("no coordinates".into()));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > BARY_TOL {
            return Err(Error::InvalidSimplexPoint(format!("coordinates sum to {sum}")));
        }
        if let Some(t) = coords
            .iter()
            .find(|t| !(-BARY_TOL..=1.0 + BARY_TOL).contains(*t))
        {
            return Err(Error::InvalidSimplexPoint(format!("coordinate {t} outside [0, 1]")));
        }
        Ok(Self { coords })
    }

    /// Point from the affine coordinates `(t_1, …, t_q)`.
    pub fn from_affine(tail: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(tail.len() + 1);
        coords.push(1.0 - tail.iter().sum::<f64>());
        coords.extend_from_slice(tail);
        Self::new(coords)
    }

    pub fn vertex(q: usize, i: usize) -> Result<Self> {
        if i > q {
            return Err(Error::IndexOutOfRange { index: i, max: q });
        }
        let mut coords = vec![0.0; q + 1];
        coords[i] = 1.0;
        Ok(Self { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn affine(&self) -> &[f64] {
        &self.coords[1..]
    }
}

/// The face inclusion δ_j: Δ_{q−1} → Δ_q, inserting a zero at slot `j`.
pub fn face_map(j: usize, p: &SimplexPoint) -> Result<SimplexPoint> {
    let q = p.coords.len();
    if j > q {
        return Err(Error::IndexOutOfRange { index: j, max: q });
    }
    let mut coords = p.coords.clone();
    coords.insert(j, 0.0);
    Ok(SimplexPoint { coords })
}

/// The degeneracy s_j: Δ_{q+1} → Δ_q, merging slots `j` and `j + 1`.
pub fn degeneracy_map(j: usize, p: &SimplexPoint) -> Result<SimplexPoint> {
    let q = p.dim();
    if q == 0 || j >= q {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: q.saturating_sub(1),
        });
    }
    let mut coords = p.coords.clone();
    let merged = coords.remove(j + 1);
    coords[j] += merged;
    Ok(SimplexPoint { coords })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RuleFamily {
    /// Tensor Gauss–Jacobi rule pulled back by the collapsed (Duffy) map;
    /// positive weights.
    #[default]
    ConicalGaussJacobi,
    /// Grundmann–Möller rule; signed weights, odd degrees only.
    GrundmannMoller,
}

const MAX_DEGREE_CONICAL: usize = 60;
const MAX_DEGREE_GM: usize = 15;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub q: usize,
    pub nodes: Vec<SimplexPoint>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
    pub family: RuleFamily,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn make_rule(q: usize, exact_degree: usize) -> Result<QuadratureRule> {
    make_rule_with(RuleFamily::ConicalGaussJacobi, q, exact_degree)
}

pub fn make_rule_with(family: RuleFamily, q: usize, exact_degree: usize) -> Result<QuadratureRule> {
    let max = match family {
        RuleFamily::ConicalGaussJacobi => MAX_DEGREE_CONICAL,
        RuleFamily::GrundmannMoller => MAX_DEGREE_GM,
    };
    if exact_degree == 0 || exact_degree > max {
        return Err(Error::UnsupportedDegree {
            q,
            requested: exact_degree,
            max,
        });
    }
    if q == 0 {
        return Ok(QuadratureRule {
            q,
            nodes: vec![SimplexPoint { coords: vec![1.0] }],
            weights: vec![1.0],
            exact_degree,
            family,
        });
    }
    let (points, weights, degree) = match family {
        RuleFamily::ConicalGaussJacobi => conical(q, exact_degree),
        RuleFamily::GrundmannMoller => grundmann_moller(q, exact_degree),
    };
    let nodes = points.into_iter().map(|coords| SimplexPoint { coords }).collect();
    Ok(QuadratureRule {
        q,
        nodes,
        weights,
        exact_degree: degree,
        family,
    })
}

/// Gauss–Jacobi nodes and weights on [0, 1] for the weight `(1 − x)^alpha`,
/// by Golub–Welsch.
pub fn gauss_jacobi_unit(m: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let beta = 0.0;
    let ab = alpha + beta;
    let mut jacobi = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jacobi[(k, k)] = diag;
        if k + 1 < m {
            let j = kf + 1.0;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let s = 2.0 * j + ab;
            let den = s * s * (s + 1.0) * (s - 1.0);
            let off = (num / den).sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    // total mass of (1 − x)^alpha on [−1, 1] with beta = 0
    let mu0 = 2f64.powf(ab + 1.0) / (alpha + 1.0);
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            let x = (eig.eigenvalues[i] + 1.0) / 2.0;
            let w = mu0 * v0 * v0 / 2f64.powf(ab + 1.0);
            (x, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn conical(q: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>, usize) {
    let m = degree / 2 + 1;
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..q)
        .map(|j| gauss_jacobi_unit(m, (q - 1 - j) as f64))
        .collect();
    let total = m.pow(q as u32);
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = 1.0;
        let mut w = 1.0;
        let mut coords = vec![0.0; q + 1];
        let mut idx = flat;
        for (j, (xs, ws)) in axes.iter().enumerate() {
            let i = idx % m;
            idx /= m;
            coords[j + 1] = rem * xs[i];
            w *= ws[i];
            rem *= 1.0 - xs[i];
        }
        coords[0] = 1.0 - coords[1..].iter().sum::<f64>();
        points.push(coords);
        weights.push(w);
    }
    (points, weights, 2 * m - 1)
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn grundmann_moller(q: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>, usize) {
    let s = degree / 2;
    let d = 2 * s + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let denom = (d + q - 2 * i) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * 2f64.powi(-2 * s as i32) * denom.powi(d as i32)
            / (factorial(i) * factorial(d + q - i));
        for beta in compositions(s - i, q + 1) {
            points.push(beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect());
            weights.push(w);
        }
    }
    (points, weights, d)
}

/// Weighted sum of `f` over the nodes, summed pairwise.
pub fn integrate_over_simplex<F>(f: F, rule: &QuadratureRule) -> Result<Complex64>
where
    F: Fn(&SimplexPoint) -> Result<Complex64>,
{
    let terms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(t, &w)| f(t).map(|v| v * w))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_identity_example() {
        let p = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let f = face_map(1, &p).unwrap();
        assert_eq!(f.coords(), &[0.3, 0.0, 0.7]);
        assert!(matches!(face_map(3, &p), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn degeneracy_merges() {
        let p = SimplexPoint::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(degeneracy_map(0, &p).unwrap().coords(), &[0.5, 0.5]);
        assert_eq!(degeneracy_map(1, &p).unwrap().coords(), &[0.25, 0.75]);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn gauss_jacobi_mass() {
        for alpha in 0..4 {
            let (_, w) = gauss_jacobi_unit(5, alpha as f64);
            let s: f64 = w.iter().sum();
            assert!((s - 1.0 / (alpha as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(
            make_rule_with(RuleFamily::GrundmannMoller, 2, 40),
            Err(Error::UnsupportedDegree { .. })
        ));
        assert!(make_rule(2, 0).is_err());
    }
}
