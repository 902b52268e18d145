use fhtdiag::asymptotics::{eta_of_z, phi_matrix, s_phase, s_phase_derivatives, saddle_data, z_of_eta};
use fhtdiag::complexfn::hyp2f1::{gauss_2f1, HypParams};
use fhtdiag::complexfn::pair::hyp_pair_at_infinity;
use fhtdiag::quadrature::gauss_legendre;
use fhtdiag::rhp::GammaSolver;
use fhtdiag::spectral::{a_of_lambda, Geometry};
use fhtdiag::types::{c, Mat2, Pt, C64, I};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Points with modulus in [lo, hi] at least `gap` (in angle) away from the real axis.
fn off_axis(lo: f64, hi: f64, gap: f64) -> impl Strategy<Value = C64> {
    (lo..hi, gap..PI - gap, prop::bool::ANY).prop_map(|(m, th, up)| C64::from_polar(m, if up { th } else { -th }))
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_commutes_with_conjugation(l in off_axis(0.05, 3.0, 0.05)) {
        let a = a_of_lambda(Pt::new(l)).unwrap();
        let b = a_of_lambda(Pt::new(l.conj())).unwrap();
        prop_assert!(close(b, a.conj(), 1e-12), "{a} {b}");
    }

    #[test]
    fn a_on_the_cut(x in 0.001f64..0.499, neg in prop::bool::ANY) {
        let x = if neg { -x } else { x };
        let p = a_of_lambda(Pt::plus(x)).unwrap();
        let m = a_of_lambda(Pt::minus(x)).unwrap();
        prop_assert!(p.im < 0.0);
        prop_assert_eq!(p.re, 0.5 * x.signum());
        prop_assert!(close(m, p.conj(), 1e-14));
        // boundary value from off the axis
        let near = a_of_lambda(Pt::new(c(x, 1e-9))).unwrap();
        prop_assert!((near - p).norm() < 1e-6);
    }

    #[test]
    fn matrix_inverse(e in prop::array::uniform4((-2.0f64..2.0, -2.0f64..2.0))) {
        let m = Mat2::new(c(e[0].0, e[0].1), c(e[1].0, e[1].1), c(e[2].0, e[2].1), c(e[3].0, e[3].1));
        prop_assume!(m.det().norm() > 1e-3);
        let p = m * m.inv();
        prop_assert!((p - Mat2::identity()).norm() < 1e-10 * (1.0 + m.norm() * m.inv().norm()));
        prop_assert!((m.det() * m.inv().det() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn gamma_is_unimodular(l in off_axis(0.05, 2.0, 0.05), z in off_axis(0.05, 3.0, 0.02)) {
        let g = GammaSolver::new(Pt::new(l), Geometry::symmetric()).unwrap().eval(Pt::new(z)).unwrap();
        prop_assert!((g.det() - 1.0).norm() < 1e-9, "det {}", g.det());
    }

    #[test]
    fn gamma_on_an_asymmetric_geometry(l in off_axis(0.1, 2.0, 0.1), z in off_axis(0.1, 3.0, 0.05), bl in -2.0f64..-0.2, br in 0.2f64..2.0) {
        let g = GammaSolver::new(Pt::new(l), Geometry::new(bl, br).unwrap()).unwrap().eval(Pt::new(z)).unwrap();
        prop_assert!((g.det() - 1.0).norm() < 1e-9, "det {}", g.det());
    }

    #[test]
    fn saddle_point_relations(eta in off_axis(1.5, 60.0, 0.02)) {
        let s = saddle_data(eta).unwrap();
        let (d1, _) = s_phase_derivatives(s.t_minus, eta);
        prop_assert!(d1.norm() < 1e-10 * (1.0 + eta.norm()));
        prop_assert!(close(s.t_minus * s.t_plus, eta, 1e-12));
        prop_assert!(close(s.s_at_saddle, s_phase(s.t_minus, eta).unwrap(), 1e-12));
        prop_assert!(close(s.s_at_saddle, -2.0 * I * s.t_minus.ln(), 1e-10));
    }

    #[test]
    fn eta_map_round_trips(z in off_axis(0.01, 10.0, 0.0)) {
        prop_assert!(close(z_of_eta(eta_of_z(z)), z, 1e-12));
    }

    #[test]
    fn model_solution(z in off_axis(0.05, 5.0, 0.02)) {
        let m = phi_matrix(Pt::new(z)).unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-12);
        let mirrored = phi_matrix(Pt::new(z.conj())).unwrap().conj();
        let s1 = Mat2::sigma1();
        prop_assert!((mirrored - s1 * m * s1).norm() < 1e-12 * m.norm());
    }

    #[test]
    fn gauss_rule_is_exact(n in 1usize..24, a in -3.0f64..0.0, len in 0.1f64..4.0, k in 0usize..48) {
        let k = k.min(2 * n - 1) as i32;
        let b = a + len;
        let (x, w) = gauss_legendre(n, a, b);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
        let exact = (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
        let scale = a.abs().max(b.abs()).powi(k) * len;
        prop_assert!((q - exact).abs() < 1e-12 * scale.max(1.0), "n={n} k={k} {q} {exact}");
    }

    #[test]
    fn hypergeometric_schwarz(
        a in (-1.5f64..1.5, -1.0f64..1.0),
        b in (-1.5f64..1.5, -1.0f64..1.0),
        cc in (0.3f64..2.5, -1.0f64..1.0),
        z in off_axis(0.1, 3.0, 0.05),
    ) {
        let p = HypParams::new(c(a.0, a.1), c(b.0, b.1), c(cc.0, cc.1));
        let q = HypParams::new(p.a.conj(), p.b.conj(), p.c.conj());
        let f = gauss_2f1(p, Pt::new(z)).unwrap();
        let g = gauss_2f1(q, Pt::new(z.conj())).unwrap();
        prop_assert!((g.conj() - f).norm() < 1e-11 * f.norm().max(1e-3), "{f} {g}");
    }

    #[test]
    fn pair_wronskian(a in (-0.45f64..0.45, -3.0f64..3.0), eta in off_axis(0.2, 40.0, 0.02)) {
        let a = c(a.0, a.1);
        let p = hyp_pair_at_infinity(a, Pt::new(eta)).unwrap();
        let w = p.h * p.s_prime - p.s * p.h_prime;
        let want = -(2.0 * a + 1.0);
        prop_assert!((w - want).norm() < 1e-10 * want.norm(), "{w} {want}");
    }
}

#[test]
fn pauli_relations() {
    let (s1, s2, s3) = (Mat2::sigma1(), Mat2::sigma2(), Mat2::sigma3());
    for s in [s1, s2, s3] {
        assert_eq!(s * s, Mat2::identity());
    }
    assert_eq!(s1 * s2, s3.scale(I));
    assert_eq!(s2 * s3, s1.scale(I));
    assert_eq!(s3 * s1, s2.scale(I));
}
