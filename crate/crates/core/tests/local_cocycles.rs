use bsslab_core::bss::{closed_omega2, BssEngine, TuplePointWithFrame};
use bsslab_core::lie::{GroupElement, InvariantPolynomial, RealForm};
use bsslab_core::linalg::{self, c, CMat};
use bsslab_core::local::*;
use bsslab_core::sampling::{random_group, random_matrix};
use bsslab_core::simplex::{face_map, make_rule, SimplexPoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RADIUS: f64 = 0.5;

fn engine(degree: usize) -> LocalEngine {
    let bss = BssEngine::new(InvariantPolynomial::symmetrized_trace(2)).unwrap();
    LocalEngine::new(bss, degree, RADIUS).unwrap()
}

fn groups(x: &[CMat]) -> Vec<GroupElement> {
    x.iter().cloned().map(|m| GroupElement::new(m).unwrap()).collect()
}

fn random_interior(rng: &mut ChaCha8Rng, q: usize) -> SimplexPoint {
    let raw: Vec<f64> = (0..=q).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut coords: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let tail: f64 = coords[1..].iter().sum();
    coords[0] = 1.0 - tail;
    SimplexPoint::new(coords).unwrap()
}

#[test]
fn face_conditions_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for l in 2..=3 {
        let gs: Vec<CMat> = (0..l).map(|_| random_group(&mut rng, 2, 0.1, RealForm::Gl)).collect();
        let simplex = geodesic_simplex(&groups(&gs), RADIUS).unwrap();
        for _ in 0..50 {
            let t = random_interior(&mut rng, l - 1);
            // j = 0: g_1 · σ_{l−1}(g_2, …)
            let lhs = simplex.eval(&face_map(0, &t).unwrap()).unwrap();
            let rest = geodesic_simplex(&groups(&gs[1..]), RADIUS).unwrap();
            let rhs = &gs[0] * rest.eval(&t).unwrap().matrix();
            assert!((lhs.matrix() - rhs).norm() < 1e-12);
            // j ≥ 1: σ_{l−1}(d_j g)
            for j in 1..=l {
                let lhs = simplex.eval(&face_map(j, &t).unwrap()).unwrap();
                let dj = bsslab_core::bss::bar_face_point(j, &gs).unwrap();
                let rhs = geodesic_simplex(&groups(&dj), RADIUS).unwrap().eval(&t).unwrap();
                assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-12, "l={l} j={j}");
            }
        }
        let e0 = simplex.eval(&SimplexPoint::vertex(l, 0).unwrap()).unwrap();
        assert!((e0.matrix() - linalg::identity(2)).norm() < 1e-15);
    }
}

#[test]
fn f_mq_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let gs: Vec<CMat> = (0..2).map(|_| random_group(&mut rng, 2, 0.1, RealForm::Gl)).collect();
    let at0 = f_mq_eval(2, 1, &groups(&gs), &SimplexPoint::vertex(1, 0).unwrap(), RADIUS).unwrap();
    assert_eq!(at0[0].matrix(), &gs[0]);
    assert!((at0[1].matrix() - linalg::identity(2)).norm() < 1e-15);
    let at1 = f_mq_eval(2, 1, &groups(&gs), &SimplexPoint::vertex(1, 1).unwrap(), RADIUS).unwrap();
    assert!((at1[1].matrix() - &gs[1]).norm() < 1e-14);
    let single = f_mq_eval(1, 2, &groups(&gs), &SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap(), RADIUS).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn beta_vanishing_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let e = engine(8);
    let gs: Vec<CMat> = (0..3).map(|_| random_group(&mut rng, 2, 0.1, RealForm::Gl)).collect();
    // m + q = 2p with m ≥ 2
    let b22 = e.beta(2, 2, &gs, &[]).unwrap();
    assert!(b22.norm() < 1e-9, "β_22 = {b22}");
    assert_eq!(e.beta(3, 1, &gs, &[]).unwrap(), Complex64::default());
}

/// β_{2,1}(g_1, g_2)(ξ) assembled by hand from the closed ω_2, with the
/// simplex derivative in the g-direction taken by central differences.
#[test]
fn beta21_matches_hand_integrand() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let e = engine(8);
    let k = -1.0 / 3.0;
    let gs: Vec<CMat> = (0..2).map(|_| random_group(&mut rng, 2, 0.1, RealForm::Gl)).collect();
    let xi: Vec<CMat> = (0..2).map(|_| random_matrix(&mut rng, 2)).collect();
    let generic = e.beta(2, 1, &gs, std::slice::from_ref(&xi)).unwrap();
    let log_g2 = linalg::logm(&gs[1]).unwrap();
    let path = |g: &CMat, t: f64| linalg::expm(&(linalg::logm(g).unwrap() * c(t)));
    let rule = make_rule(1, 12).unwrap();
    let h = 1e-5;
    let mut acc = Complex64::default();
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = node.coords()[1];
        let sigma = path(&gs[1], t);
        let d_xi = (path(&(&gs[1] + &xi[1] * c(h)), t) - path(&(&gs[1] - &xi[1] * c(h)), t)) * c(0.5 / h);
        let d_t = &log_g2 * &sigma;
        let frame = TuplePointWithFrame::from_matrices(
            &[gs[0].clone(), sigma],
            &[vec![xi[0].clone(), d_xi], vec![linalg::zeros(2), d_t]],
        )
        .unwrap();
        acc += closed_omega2(&frame, k).unwrap() * *w;
    }
    assert!((generic - acc).norm() < 1e-8 * acc.norm().max(1e-12), "{generic} vs {acc}");
}

#[test]
fn eta_at_identity_vanishes() {
    let e = engine(8);
    let id = vec![linalg::identity(2); 3];
    assert!(e.eta(0, &id, &[]).unwrap().norm() < 1e-15);
    let xi: Vec<CMat> = vec![linalg::identity(2); 3];
    let sample = verify_eta_cocycle_p2(&e, &id, &xi).unwrap();
    assert!(sample.residual() < 1e-15);
}

#[test]
fn eta_cocycle_identity_and_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let e = engine(8);
    let fd = engine(8).with_derivative(ParameterDerivative::CentralDifference { step: 1e-5 });
    for _ in 0..3 {
        let gs: Vec<CMat> = (0..3).map(|_| random_group(&mut rng, 2, 0.05, RealForm::Gl)).collect();
        let xi: Vec<CMat> = (0..3).map(|_| random_matrix(&mut rng, 2)).collect();
        let s = verify_eta_cocycle_p2(&e, &gs, &xi).unwrap();
        assert!(s.residual() < 1e-9, "residual {} (dη0 = {})", s.residual(), s.d_eta0);
        assert!(s.d_eta0.norm() > 1e-6);
        let approx = fd.d_eta0(&gs, &xi).unwrap();
        assert!((approx - s.d_eta0).norm() < 1e-6 * s.d_eta0.norm(), "{approx} vs {} res {}", s.d_eta0, s.residual());
    }
}

#[test]
fn abelian_case_is_trivial_on_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let e = engine(8);
    let diag = |rng: &mut ChaCha8Rng, s: f64| {
        let mut m = linalg::zeros(2);
        m[(0, 0)] = Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s));
        m[(1, 1)] = Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s));
        m
    };
    let gs: Vec<CMat> = (0..3).map(|_| linalg::expm(&diag(&mut rng, 0.05))).collect();
    let xi: Vec<CMat> = (0..3).map(|_| diag(&mut rng, 1.0)).collect();
    let s = verify_eta_cocycle_p2(&e, &gs, &xi).unwrap();
    assert!(s.d_eta0.norm() < 1e-12 && s.face_sum.norm() < 1e-12);
    assert!(s.residual() < 1e-8);
}

#[test]
fn eta1_alternating_multilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let e = engine(8);
    let gs: Vec<CMat> = (0..2).map(|_| random_group(&mut rng, 2, 0.1, RealForm::Gl)).collect();
    let a: Vec<CMat> = (0..2).map(|_| random_matrix(&mut rng, 2)).collect();
    let b: Vec<CMat> = (0..2).map(|_| random_matrix(&mut rng, 2)).collect();
    let sum: Vec<CMat> = a.iter().zip(&b).map(|(x, y)| x * c(2.0) + y * c(-0.5)).collect();
    let lhs = e.eta(1, &gs, &[sum]).unwrap();
    let rhs = e.eta(1, &gs, &[a]).unwrap() * 2.0 - e.eta(1, &gs, &[b]).unwrap() * 0.5;
    assert!((lhs - rhs).norm() < 1e-13);
}
