//! Lie-algebra cochains on Map(X, g) and the Chevalley–Eilenberg differential.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::GaugeAlgebraElement;
use crate::bss::MultilinearTable;
use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics::{pairwise_sum, signed_permutations};

/// `6k ∫_0^1 Tr(ξ_1′ ξ_2) du`.
pub fn kac_moody_closed(xi1: &GaugeAlgebraElement, xi2: &GaugeAlgebraElement, k: f64) -> Result<Complex64> {
    let domain = xi1.domain();
    if domain.dims() != 1 || xi2.domain() != domain {
        return Err(Error::DimensionMismatch("Kac–Moody cocycle lives on loops".into()));
    }
    let vals: Vec<Complex64> = xi1
        .partial(0)
        .iter()
        .zip(xi2.values())
        .map(|(d, x)| linalg::trace(&(d * x)))
        .collect();
    Ok(domain.integrate(&vals) * (6.0 * k))
}

/// The unsymmetrized cochain
/// `∫_X Σ_{π ∈ S_k} sgn(π) T(∂_{π1}ξ_1, …, ∂_{πk}ξ_k, ξ_p)` with `k = p − 1`.
pub fn feigin_integral(xis: &[GaugeAlgebraElement], table: &MultilinearTable) -> Result<Complex64> {
    let p = table.p;
    if xis.len() != p {
        return Err(Error::ArityMismatch {
            expected: p,
            got: xis.len(),
        });
    }
    let domain = xis[0].domain();
    if domain.dims() + 1 != p || xis.iter().any(|x| x.domain() != domain) {
        return Err(Error::DimensionMismatch(format!(
            "degree {p} needs a {}-dimensional grid, got {}",
            p - 1,
            domain.dims()
        )));
    }
    if xis[0].values()[0].nrows() != table.dim {
        return Err(Error::DimensionMismatch("table and fields have different matrix sizes".into()));
    }
    let axes = signed_permutations(p - 1);
    let vals: Vec<Complex64> = (0..domain.len())
        .into_par_iter()
        .map(|i| {
            let mut terms = Vec::with_capacity(axes.len());
            for (perm, sign) in &axes {
                let mut args: Vec<&linalg::CMat> = perm
                    .iter()
                    .enumerate()
                    .map(|(slot, &ax)| &xis[slot].partial(ax)[i])
                    .collect();
                args.push(&xis[p - 1].values()[i]);
                terms.push(table.eval(&args)? * *sign);
            }
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<_>>()?;
    Ok(domain.integrate(&vals))
}

/// Skew-symmetrization of [`feigin_integral`] over all p arguments.
pub fn feigin_cocycle(xis: &[GaugeAlgebraElement], table: &MultilinearTable) -> Result<Complex64> {
    let mut terms = Vec::new();
    for (perm, sign) in signed_permutations(xis.len()) {
        let args: Vec<GaugeAlgebraElement> = perm.iter().map(|&j| xis[j].clone()).collect();
        terms.push(feigin_integral(&args, table)? * sign);
    }
    Ok(pairwise_sum(&terms))
}

type Evaluator = dyn Fn(&[GaugeAlgebraElement]) -> Result<Complex64> + Send + Sync;

/// An alternating multilinear p-cochain on a gauge algebra.
#[derive(Clone)]
pub struct CochainCE {
    degree: usize,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for CochainCE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CochainCE").field("degree", &self.degree).finish_non_exhaustive()
    }
}

impl CochainCE {
    pub fn new<F>(degree: usize, evaluator: F) -> Self
    where
        F: Fn(&[GaugeAlgebraElement]) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            degree,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn kac_moody(k: f64) -> Self {
        Self::new(2, move |x| kac_moody_closed(&x[0], &x[1], k))
    }

    pub fn feigin(table: MultilinearTable) -> Self {
        let p = table.p;
        Self::new(p, move |x| feigin_cocycle(x, &table))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, xis: &[GaugeAlgebraElement]) -> Result<Complex64> {
        if xis.len() != self.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                got: xis.len(),
            });
        }
        (self.evaluator)(xis)
    }
}

/// `(dc)(ξ_0, …, ξ_p) = Σ_{i<j} (−1)^{i+j} c([ξ_i, ξ_j], ξ_0, …, ξ̂_i, …, ξ̂_j, …)`.
pub fn ce_differential(cochain: &CochainCE, xis: &[GaugeAlgebraElement]) -> Result<Complex64> {
    if xis.len() != cochain.degree() + 1 {
        return Err(Error::ArityMismatch {
            expected: cochain.degree() + 1,
            got: xis.len(),
        });
    }
    let mut terms = Vec::new();
    for i in 0..xis.len() {
        for j in i + 1..xis.len() {
            let mut args = vec![xis[i].bracket(&xis[j])?];
            args.extend(
                xis.iter()
                    .enumerate()
                    .filter(|(m, _)| *m != i && *m != j)
                    .map(|(_, x)| x.clone()),
            );
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(cochain.eval(&args)? * sign);
        }
    }
    Ok(pairwise_sum(&terms))
}
