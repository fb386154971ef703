use bsslab_core::numerics::factorial;
use bsslab_core::simplex::{
    degeneracy_map, face_map, integrate_over_simplex, make_rule, make_rule_with, RuleFamily,
    SimplexPoint,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// ∫_{Δ_q} Π t_i^{a_i} = Π a_i! / (Σ a_i + q)!
fn dirichlet(exponents: &[usize]) -> f64 {
    let q = exponents.len() - 1;
    let total: usize = exponents.iter().sum();
    exponents.iter().map(|&a| factorial(a)).product::<f64>() / factorial(total + q)
}

fn monomial(exponents: &[usize]) -> impl Fn(&SimplexPoint) -> bsslab_core::Result<Complex64> + '_ {
    move |t| {
        let v: f64 = t
            .coords()
            .iter()
            .zip(exponents)
            .map(|(x, &a)| x.powi(a as i32))
            .product();
        Ok(Complex64::new(v, 0.0))
    }
}

fn all_exponents(q: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..=q {
        out = out
            .into_iter()
            .flat_map(|e: Vec<usize>| {
                let used: usize = e.iter().sum();
                (0..=max_total - used).map(move |a| {
                    let mut f = e.clone();
                    f.push(a);
                    f
                })
            })
            .collect();
    }
    out
}

#[test]
fn volumes() {
    for q in 0..=4 {
        let rule = make_rule(q, 8).unwrap();
        let v: f64 = rule.weights.iter().sum();
        assert!((v - 1.0 / factorial(q)).abs() < 1e-15, "q={q} volume {v}");
    }
}

#[test]
fn spec_dirichlet_example() {
    let rule = make_rule(2, 4).unwrap();
    let v = integrate_over_simplex(monomial(&[2, 1, 0]), &rule).unwrap();
    assert!((v.re - 2.0 / 120.0).abs() < 1e-15);
}

#[test]
fn exact_on_all_monomials_both_families() {
    for family in [RuleFamily::ConicalGaussJacobi, RuleFamily::GrundmannMoller] {
        for q in 1..=3 {
            for degree in [3, 5, 7, 9] {
                let rule = make_rule_with(family, q, degree).unwrap();
                assert!(rule.exact_degree >= degree);
                for e in all_exponents(q, degree) {
                    let got = integrate_over_simplex(monomial(&e), &rule).unwrap().re;
                    let want = dirichlet(&e);
                    assert!(
                        (got - want).abs() < 1e-13,
                        "{family:?} q={q} deg={degree} e={e:?}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn default_weights_positive() {
    for q in 1..=4 {
        for degree in [2, 8, 12] {
            assert!(make_rule(q, degree).unwrap().weights.iter().all(|&w| w > 0.0));
        }
    }
}

#[test]
fn exp_on_unit_interval() {
    let rule = make_rule(1, 12).unwrap();
    let v = integrate_over_simplex(|t| Ok(Complex64::new(t.coords()[0].exp(), 0.0)), &rule).unwrap();
    let e1 = std::f64::consts::E - 1.0;
    assert!((v.re - e1).abs() / e1 < 1e-10);
}

#[test]
fn trivial_one_simplex_integrals() {
    let rule = make_rule(1, 3).unwrap();
    let one = integrate_over_simplex(|_| Ok(Complex64::new(1.0, 0.0)), &rule).unwrap();
    let t0 = integrate_over_simplex(|t| Ok(Complex64::new(t.coords()[0], 0.0)), &rule).unwrap();
    assert!((one.re - 1.0).abs() < 1e-15);
    assert!((t0.re - 0.5).abs() < 1e-15);
}

#[test]
fn face_of_vertex() {
    let p = SimplexPoint::vertex(0, 0).unwrap();
    assert_eq!(face_map(0, &p).unwrap().coords(), &[0.0, 1.0]);
}

proptest! {
    #[test]
    fn simplicial_face_identities(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (x, y) = (a.min(b), a.max(b));
        let p = SimplexPoint::new(vec![x, y - x, 1.0 - y]).unwrap();
        // δ_j δ_i = δ_i δ_{j−1} for i < j
        for j in 1..=4 {
            for i in 0..j {
                let lhs = face_map(j, &face_map(i, &p).unwrap()).unwrap();
                let rhs = face_map(i, &face_map(j - 1, &p).unwrap()).unwrap();
                prop_assert_eq!(lhs.coords(), rhs.coords());
            }
        }
        let f = face_map(2, &p).unwrap();
        prop_assert!((f.coords().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // s_j δ_j = id
        for j in 0..3 {
            let back = degeneracy_map(j, &face_map(j, &p).unwrap()).unwrap();
            prop_assert_eq!(back.coords(), p.coords());
        }
    }

    #[test]
    fn refinement_keeps_polynomial_values(a0 in 0usize..3, a1 in 0usize..3, a2 in 0usize..3) {
        let e = [a0, a1, a2];
        let coarse = integrate_over_simplex(monomial(&e), &make_rule(2, 6).unwrap()).unwrap();
        let fine = integrate_over_simplex(monomial(&e), &make_rule(2, 14).unwrap()).unwrap();
        prop_assert!((coarse - fine).norm() < 1e-13);
    }
}
