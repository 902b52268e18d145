use fhtdiag::diagonalization::*;
use fhtdiag::quadrature::Rule;
use fhtdiag::spectral::Geometry;
use fhtdiag::types::{r, Side};
use std::sync::OnceLock;

fn transform(side: Side) -> &'static SpectralTransform {
    static L: OnceLock<SpectralTransform> = OnceLock::new();
    static R: OnceLock<SpectralTransform> = OnceLock::new();
    let cell = match side {
        Side::L => &L,
        Side::R => &R,
    };
    cell.get_or_init(|| SpectralTransform::new(side, Geometry::symmetric(), 400).unwrap())
}

fn skewed() -> &'static SpectralTransform {
    static S: OnceLock<SpectralTransform> = OnceLock::new();
    S.get_or_init(|| SpectralTransform::new(Side::R, Geometry::new(-1.0, 2.0).unwrap(), 400).unwrap())
}

fn parabola(st: &SpectralTransform) -> fhtdiag::quadrature::GridFunction {
    let (a, b) = side_interval(st.side, &st.geom);
    st.spatial_function(|x| r((x - a) * (b - x)))
}

#[test]
fn isometry_on_parabola() {
    for side in [Side::L, Side::R] {
        let st = transform(side);
        let f = parabola(st);
        let uf = st.forward(&f);
        let rel = (st.spectral_norm(&uf).powi(2) - f.norm().powi(2)).abs() / f.norm().powi(2);
        assert!(rel < 1e-4, "{side:?}: {rel:e}");
    }
}

#[test]
fn generating_vector() {
    let st = transform(Side::R);
    let one = st.forward(&st.spatial_function(|_| r(1.0)));
    for (l2, v) in one.nodes.iter().zip(&one.values) {
        // the end nodes sit where phi oscillates faster than the spatial grid resolves
        let tol = if (1e-10..=1.0 - 1e-6).contains(l2) { 1e-6 } else { 1e-2 };
        assert!((v - 1.0).norm() < tol, "{l2:e}: {v}");
    }
}

#[test]
fn linear() {
    let st = transform(Side::R);
    let f = parabola(st);
    let g = st.spatial_function(|x| r((3.0 * x).sin()));
    let combo = f.map(|x, v| 2.0 * v + r((3.0 * x).sin()));
    let lhs = st.forward(&combo);
    let (uf, ug) = (st.forward(&f), st.forward(&g));
    for k in 0..lhs.values.len() {
        let rhs = 2.0 * uf.values[k] + ug.values[k];
        assert!((lhs.values[k] - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }
}

#[test]
fn zero_maps_to_zero() {
    let st = transform(Side::L);
    let z = st.forward(&st.spatial_function(|_| r(0.0)));
    assert!(z.values.iter().all(|v| *v == r(0.0)));
    let back = st.inverse(&z);
    assert!(back.values.iter().all(|v| *v == r(0.0)));
}

#[test]
fn round_trip() {
    for side in [Side::L, Side::R] {
        let st = transform(side);
        let f = st.spatial_function(log_bump(side, &st.geom, 14.0));
        let back = st.inverse(&st.forward(&f));
        let err = back.sub(&f).norm() / f.norm();
        assert!(err < 1e-3, "{side:?}: {err:e}");
    }
}

#[test]
fn adjoint_then_forward_is_identity() {
    for side in [Side::L, Side::R] {
        let st = transform(side);
        for (lo, hi) in [(0.2, 0.8), (1e-3, 0.5)] {
            let g = st.spectral_function(bump(lo, hi));
            let err = st.spectral_norm(&st.forward_of_inverse(&g).sub(&g)) / st.spectral_norm(&g);
            assert!(err < 1e-6, "{side:?} ({lo}, {hi}): {err:e}");
        }
    }
}

#[test]
fn diagonalizes_hstar_h() {
    for st in [transform(Side::L), transform(Side::R), skewed()] {
        for f in [parabola(st), st.spatial_function(log_bump(st.side, &st.geom, 8.0))] {
            let d = diagonalization_defect(st, &f);
            assert!(d < 1e-3, "{:?}: {d:e}", st.side);
        }
    }
}

#[test]
fn full_resolution_reproduces() {
    let st = transform(Side::R);
    let f = st.spatial_function(log_bump(Side::R, &st.geom, 14.0));
    let e = st.resolution_of_identity(&f, 1.0);
    assert!(e.sub(&f).norm() / f.norm() < 1e-3);
}

#[test]
fn disjoint_projections_annihilate() {
    let st = transform(Side::R);
    let f = parabola(st);
    let composed = st.compose_projections(&f, (0.5, 0.7), (0.1, 0.3));
    let size = st.inverse_norm(&composed) / f.norm();
    assert!(size < 1e-6, "{size:e}");
}

#[test]
fn projection_is_idempotent() {
    let st = transform(Side::L);
    let f = parabola(st);
    let once = st.truncated_forward(&f, 0.2, 0.6);
    let twice = st.compose_projections(&f, (0.2, 0.6), (0.2, 0.6));
    let err = st.inverse_norm(&twice.sub(&once)) / st.inverse_norm(&once);
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn parseval_on_subinterval() {
    let st = transform(Side::R);
    let f = parabola(st);
    let part = st.truncated_forward(&f, 0.1, 0.3);
    let spatial = st.inverse_norm(&part);
    let spectral = st.spectral_norm(&part);
    assert!((spatial - spectral).abs() < 1e-6 * spectral);
}

#[test]
fn spectral_function_monotone() {
    let st = transform(Side::R);
    let f = parabola(st);
    let uf = st.forward(&f);
    let mut acc = 0.0;
    let mut last = 0.0;
    for k in 0..uf.values.len() {
        acc += uf.values[k].norm_sqr() * st.sigma_prime[k] * uf.weights[k];
        assert!(acc >= last);
        last = acc;
    }
}

#[test]
fn density_by_differentiation() {
    // <E_t chi, chi> = integral over (0, t] of |U chi|^2 d sigma, differentiated in t
    let g = Geometry::symmetric();
    let rule = spatial_rule(Side::R, &g);
    let mass_between = |lo: f64, hi: f64| {
        Rule::gauss(12, lo, hi).integrate(|l2| {
            let k = TransformKernel::new(l2, Side::R, g).unwrap();
            let u = rule.integrate_c(|x| k.phi(x).unwrap());
            u.norm_sqr() * k.sigma_prime()
        })
    };
    for t in [0.25, 0.5, 0.75] {
        let h = 1e-3;
        let slope = mass_between(t - h, t + h) / (2.0 * h);
        let want = TransformKernel::new(t, Side::R, g).unwrap().sigma_prime();
        assert!((slope - want).abs() < 1e-4 * want, "{t}: {slope} {want}");
    }
}
