use bsslab_core::bss::*;
use bsslab_core::lie::{GroupElement, InvariantPolynomial, RealForm};
use bsslab_core::linalg::{self, c, CMat};
use bsslab_core::sampling::{random_group, random_matrix, random_tangent};
use bsslab_core::simplex::SimplexPoint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine(p: usize) -> BssEngine {
    BssEngine::new(InvariantPolynomial::symmetrized_trace(p)).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, dim: usize, scale: f64) -> Vec<CMat> {
    (0..n).map(|_| random_group(rng, dim, scale, RealForm::Gl)).collect()
}

fn random_frame(rng: &mut ChaCha8Rng, x: &[CMat], r: usize) -> Vec<Vec<CMat>> {
    (0..r)
        .map(|_| x.iter().map(|g| random_tangent(rng, g, RealForm::Gl)).collect())
        .collect()
}

fn frame_of(x: &[CMat], f: &[Vec<CMat>]) -> TuplePointWithFrame {
    TuplePointWithFrame::from_matrices(x, f).unwrap()
}

/// Independent `dP_j(v) = Σ_k x_1⋯v_k⋯x_j`.
fn d_prefix(x: &[CMat], v: &[CMat], j: usize) -> CMat {
    let dim = x[0].nrows();
    let mut acc = linalg::zeros(dim);
    for k in 0..j {
        let mut m = linalg::identity(dim);
        for l in 0..j {
            m = if l == k { &m * &v[l] } else { &m * &x[l] };
        }
        acc += m;
    }
    acc
}

fn prefix(x: &[CMat], j: usize) -> CMat {
    x[..j].iter().fold(linalg::identity(x[0].nrows()), |m, g| m * g)
}

fn groups(x: &[CMat]) -> Vec<GroupElement> {
    x.iter().cloned().map(|m| GroupElement::new(m).unwrap()).collect()
}

#[test]
fn connection_vanishes_at_vertex_zero_and_gauge_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=3 {
        let x = random_point(&mut rng, n, 2, 0.3);
        let v: Vec<CMat> = (0..n).map(|_| random_matrix(&mut rng, 2)).collect();
        let mt = MixedTangent::base_only(v.clone());
        let e0 = SimplexPoint::vertex(n, 0).unwrap();
        let a = interpolated_connection_form(&e0, &groups(&x), &mt, 0).unwrap();
        assert!(a.norm() < 1e-15);
        let mut tail: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0 / n as f64)).collect();
        tail.iter_mut().for_each(|t| *t *= 0.9);
        let t = SimplexPoint::from_affine(&tail).unwrap();
        let a0 = interpolated_connection_form(&t, &groups(&x), &mt, 0).unwrap();
        for j in 1..=n {
            let aj = interpolated_connection_form(&t, &groups(&x), &mt, j).unwrap();
            let u = prefix(&x, j);
            let ui = linalg::inverse(&u).unwrap();
            let oracle = &ui * &a0 * &u + &ui * d_prefix(&x, &v, j);
            assert!((aj - oracle).norm() < 1e-10, "n={n} gauge {j}");
        }
    }
}

#[test]
fn curvature_mixed_direction_is_transition_derivative() {
    // n = 1: F(∂_t, V) = A_1(V) = h⁻¹dh(V) with h = g⁻¹
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_group(&mut rng, 2, 0.3, RealForm::Gl);
    let v = random_matrix(&mut rng, 2);
    let t = SimplexPoint::new(vec![0.4, 0.6]).unwrap();
    let f = curvature_eval(
        &t,
        &groups(std::slice::from_ref(&g)),
        &MixedTangent::fiber_direction(1, 2, 1),
        &MixedTangent::base_only(vec![v.clone()]),
        DerivativeBackend::Exact,
    )
    .unwrap();
    let h = linalg::inverse(&g).unwrap();
    let dh = -(&h * &v * &h);
    let expected = linalg::inverse(&h).unwrap() * dh;
    assert!((f - expected).norm() < 1e-13);
}

#[test]
fn curvature_flat_at_vertices_and_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 2;
    let x = groups(&random_point(&mut rng, n, 2, 0.3));
    let mk = |rng: &mut ChaCha8Rng| MixedTangent {
        base: (0..n).map(|_| random_matrix(rng, 2)).collect(),
        fiber: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
    };
    let u = mk(&mut rng);
    let w = mk(&mut rng);
    for i in 0..=n {
        let e = SimplexPoint::vertex(n, i).unwrap();
        let f = curvature_eval(
            &e,
            &x,
            &MixedTangent::base_only(u.base.clone()),
            &MixedTangent::base_only(w.base.clone()),
            DerivativeBackend::Exact,
        )
        .unwrap();
        assert!(f.norm() < 1e-10, "vertex {i}: {}", f.norm());
    }
    let t = SimplexPoint::new(vec![0.2, 0.5, 0.3]).unwrap();
    let exact = curvature_eval(&t, &x, &u, &w, DerivativeBackend::Exact).unwrap();
    let swapped = curvature_eval(&t, &x, &w, &u, DerivativeBackend::Exact).unwrap();
    assert!((&exact + &swapped).norm() < 1e-14);
    let fd = curvature_eval(&t, &x, &u, &w, DerivativeBackend::CentralDifference { step: 1e-5 }).unwrap();
    assert!((&exact - fd).norm() < 1e-7 * exact.norm());
}

#[test]
fn calibration_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = engine(2);
    let f2: Vec<_> = (0..10)
        .map(|_| {
            let x = random_point(&mut rng, 2, 2, 0.1);
            let f = random_frame(&mut rng, &x, 2);
            frame_of(&x, &f)
        })
        .collect();
    let f1: Vec<_> = (0..10)
        .map(|_| {
            let x = random_point(&mut rng, 1, 2, 0.1);
            let f = random_frame(&mut rng, &x, 3);
            frame_of(&x, &f)
        })
        .collect();
    let cal = calibrate(&e, &f2, &f1).unwrap();
    assert!((cal.k + 1.0 / 3.0).abs() < 1e-12, "k = {}", cal.k);
    assert!((cal.omega1_coefficient + 1.0 / 3.0).abs() < 1e-12);
    assert!(cal.imaginary_defect < 1e-12);
    for f in &f2 {
        let g = e.omega(f).unwrap();
        let o = closed_omega2(f, cal.k).unwrap();
        assert!((g - o).norm() <= 1e-10 * o.norm());
    }
}

#[test]
fn simplicial_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let e = engine(2);
    for _ in 0..5 {
        let x = random_point(&mut rng, 3, 2, 0.1);
        let f = random_frame(&mut rng, &x, 2);
        let r3 = relation_g3_residual(&e, &x, &f, &alternating_signs(4)).unwrap();
        assert!(r3 < 1e-12, "relation on G^3: {r3}");
        let x2 = random_point(&mut rng, 2, 2, 0.1);
        let f2 = random_frame(&mut rng, &x2, 3);
        let r2 = relation_g2_residual(&e, &x2, &f2, -1.0 / 3.0, &alternating_signs(3)).unwrap();
        assert!(r2 < 1e-12, "relation on G^2: {r2}");
    }
    // a corrupted sign must break the G^3 relation
    let x = random_point(&mut rng, 3, 2, 0.1);
    let f = random_frame(&mut rng, &x, 2);
    let bad = relation_g3_residual(&e, &x, &f, &[1.0, -1.0, -1.0, -1.0]).unwrap();
    assert!(bad > 1e-4);
}

#[test]
fn vanishing_above_p_and_degeneracies() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let e = engine(2);
    for n in [3, 4] {
        let x = random_point(&mut rng, n, 3, 0.1);
        let f = random_frame(&mut rng, &x, 4 - n);
        assert!(e.omega_raw(&x, &f).unwrap().norm() < 1e-12);
    }
    for j in 0..2 {
        let x = random_point(&mut rng, 1, 2, 0.1);
        let f = random_frame(&mut rng, &x, 2);
        let v = degeneracy_pullback_check(&e, 2, j, &frame_of(&x, &f)).unwrap();
        assert!(v.norm() < 1e-12, "s_{j}: {v}");
    }
}

#[test]
fn same_factor_vanishing_for_omega_p() {
    // ω_2 on two vectors tangent to the same factor
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let e = engine(2);
    let x = random_point(&mut rng, 2, 2, 0.1);
    let f = TuplePointWithFrame::slot_tagged(
        groups(&x),
        vec![(1, random_matrix(&mut rng, 2)), (1, random_matrix(&mut rng, 2))],
    )
    .unwrap();
    assert!(e.omega(&f).unwrap().norm() < 1e-12);
}

#[test]
fn identity_table_p2_and_p3() {
    let e2 = engine(2);
    let t2 = identity_multilinear_form(&e2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let a = random_matrix(&mut rng, 2);
    let b = random_matrix(&mut rng, 2);
    let want = linalg::trace(&(&a * &b)) * (3.0 * (-1.0 / 3.0));
    assert!((t2.eval(&[&a, &b]).unwrap() - want).norm() < 1e-12);
    // traceless product pair
    let h = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let off = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    assert!(t2.eval(&[&h, &off]).unwrap().norm() < 1e-14);

    let e3 = engine(3);
    let t3 = identity_multilinear_form(&e3, 2).unwrap();
    let cc = random_matrix(&mut rng, 2);
    let v = t3.eval(&[&a, &b, &cc]).unwrap();
    let closed = (linalg::trace(&(&a * &b * &cc)) + linalg::trace(&(&a * &cc * &b))) * -0.5;
    assert!((v - closed).norm() < 1e-12, "{v} vs {closed}");
}

#[test]
fn omega_alternating_in_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let e = engine(2);
    let x = random_point(&mut rng, 1, 2, 0.1);
    let f = random_frame(&mut rng, &x, 3);
    let v = e.omega_raw(&x, &f).unwrap();
    let swapped = vec![f[1].clone(), f[0].clone(), f[2].clone()];
    assert!((e.omega_raw(&x, &swapped).unwrap() + v).norm() < 1e-14);
    let repeated = vec![f[0].clone(), f[0].clone(), f[2].clone()];
    assert!(e.omega_raw(&x, &repeated).unwrap().norm() < 1e-14);
}

#[test]
fn closed_omega1_bi_invariance_and_repeats() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let g = random_group(&mut rng, 2, 0.3, RealForm::Gl);
    let h = random_group(&mut rng, 2, 0.3, RealForm::Gl);
    let v: Vec<CMat> = (0..3).map(|_| random_matrix(&mut rng, 2)).collect();
    let base = closed_omega1_raw(&g, &v, 1.0).unwrap();
    let hv: Vec<CMat> = v.iter().map(|m| &h * m).collect();
    let moved = closed_omega1_raw(&(&h * &g), &hv, 1.0).unwrap();
    assert!((base - moved).norm() < 1e-13);
    let rep = closed_omega1_raw(&g, &[v[0].clone(), v[0].clone(), v[1].clone()], 1.0).unwrap();
    assert!(rep.norm() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn omega2_multilinear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = engine(2);
        let x = random_point(&mut rng, 2, 2, 0.1);
        let f = random_frame(&mut rng, &x, 3);
        let mix: Vec<CMat> = f[0].iter().zip(&f[1]).map(|(u, v)| u * c(a) + v * c(b)).collect();
        let lhs = e.omega_raw(&x, &[mix, f[2].clone()]).unwrap();
        let rhs = e.omega_raw(&x, &[f[0].clone(), f[2].clone()]).unwrap() * a
            + e.omega_raw(&x, &[f[1].clone(), f[2].clone()]).unwrap() * b;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn projection_is_left_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lift = random_point(&mut rng, 3, 2, 0.4);
        let h = random_group(&mut rng, 2, 0.4, RealForm::Gl);
        let moved: Vec<CMat> = lift.iter().map(|g| &h * g).collect();
        let a = universal_projection(&groups(&lift)).unwrap();
        let b = universal_projection(&groups(&moved)).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u.matrix() - v.matrix()).norm() < 1e-13);
        }
    }
}
