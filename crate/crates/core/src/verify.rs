//! Verification suites. Each returns one record per residual with the identity
//! it checks, its inputs and its tolerance; the acceptance tests and the CLI
//! both run these.

use crate::asymptotics::{
    error_matrix_diagnostic, eta_of_z, gamma_deviation, max_saddle_angle, saddle_integral_quadrature, steepest_descent_eval,
    z_of_eta, AnnulusConfig,
};
use crate::complexfn::hyp2f1::{eval_method, gauss_2f1, gauss_2f1_d, HypParams, Method};
use crate::complexfn::pair::hyp_pair_at_infinity;
use crate::diagonalization::{
    diagonalization_defect, interior_points, log_bump, pair_identities, side_interval, SpectralTransform,
};
use crate::error::Result;
use crate::kernels::{build_nystrom, resolvent_jump, resolvent_jump_same_interval, resolvent_kernel};
use crate::rhp::{verify_lambda_jump, verify_off_cut, z_jump_residual, GammaSolver};
use crate::spectral::{a_of_lambda, Geometry};
use crate::sturm_liouville::{
    equivalence_check, hl_multiplier, l_apply, multiplier_defect, phi_sampler, wronskian_product, OdeTransform,
};
use crate::types::{c, r, Pt, Side, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub check_id: String,
    /// The identity being checked, in words.
    pub anchor: String,
    pub inputs: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(check_id: &str, anchor: &str, inputs: String, residual: f64, tolerance: f64) -> Self {
        Check {
            check_id: check_id.to_string(),
            anchor: anchor.to_string(),
            inputs,
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub fn worst(checks: &[Check]) -> Option<&Check> {
    checks.iter().max_by(|a, b| (a.residual / a.tolerance).total_cmp(&(b.residual / b.tolerance)))
}

pub const Z_JUMP_LAMBDAS: [(f64, f64, Option<bool>); 5] =
    [(0.6, 0.0, None), (0.0, 0.8, None), (-0.7, 0.2, None), (0.3, 0.0, Some(true)), (-0.3, 0.0, Some(false))];

pub fn z_jump_lambdas() -> Vec<Pt> {
    Z_JUMP_LAMBDAS
        .iter()
        .map(|&(re, im, shore)| match shore {
            Some(true) => Pt::plus(re),
            Some(false) => Pt::minus(re),
            None => Pt::new(c(re, im)),
        })
        .collect()
}

/// Gamma(x+) = Gamma(x-) J(x) on `per_side` interior points of each subinterval,
/// kept `margin` (relative) away from the endpoints, from two-sided evaluation
/// off the axis.
pub fn z_jumps(geom: Geometry, lambdas: &[Pt], per_side: usize, margin: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &lam in lambdas {
        let solver = GammaSolver::new(lam, geom)?;
        let xs: Vec<f64> = [Side::L, Side::R].iter().flat_map(|s| interior_points(*s, &geom, per_side, margin)).collect();
        let res: Vec<f64> = xs.par_iter().map(|x| z_jump_residual(&solver, *x)).collect::<Result<_>>()?;
        for (x, v) in xs.iter().zip(res) {
            out.push(Check::new("z-jump", "Gamma_+ = Gamma_- J on (b_L, 0) and (0, b_R)", format!("lambda={lam} x={x}"), v, 1e-8));
        }
    }
    Ok(out)
}

/// Gamma(z; lambda_+) = Gamma(z; lambda_-)(1 - f2 g2^t / z) at 20 pairs, and
/// single-valuedness for real lambda off [-1/2, 1/2].
pub fn lambda_jumps(geom: Geometry) -> Result<Vec<Check>> {
    let zs = [c(0.3, 0.2), c(-0.4, 0.5), c(0.7, -0.3), c(-0.2, -0.6), c(1.5, 0.1)];
    let lams = [-0.4, -0.15, 0.2, 0.45];
    let mut out = Vec::new();
    for z in zs {
        for l in lams {
            let v = verify_lambda_jump(Pt::new(z), l, geom)?;
            out.push(Check::new("lambda-jump", "Gamma(lambda_+) = Gamma(lambda_-)(1 - f2 g2^t / z)", format!("z={z} lambda={l}"), v, 1e-7));
        }
    }
    for l in [0.8, -0.7, 2.0] {
        let z = c(0.3, 0.2);
        let v = verify_off_cut(Pt::new(z), l, geom)?;
        out.push(Check::new("lambda-off-cut", "Gamma(lambda + i0) = Gamma(lambda - i0) for |lambda| > 1/2", format!("z={z} lambda={l}"), v, 1e-12));
    }
    Ok(out)
}

/// Closed-form resolvent against the Nystrom discretization, the H*H block
/// identity, and the jump of R across the spectral cut.
pub fn resolvent(geom: Geometry, n: usize) -> Result<Vec<Check>> {
    let ny = build_nystrom(geom, n)?;
    let mut out = Vec::new();
    for lam in [c(2.0, 0.0), c(3.0, 1.0)] {
        let inputs = format!("lambda={lam} n={n}");
        out.push(Check::new("resolvent", "(I + R)(I - K/lambda) = I", inputs.clone(), ny.resolvent_residual(Pt::new(lam))?, 1e-5));
        for side in [Side::L, Side::R] {
            let v = ny.block_resolvent_residual(lam, side)?;
            out.push(Check::new("resolvent-block", "(I - H*H/lambda^2)^{-1} = I + pi R(lambda/2) pi", format!("{inputs} side={side:?}"), v, 1e-5));
        }
    }
    for (z, x, lam) in [(0.4, 0.4, -0.2), (-0.4, -0.4, -0.2), (0.3, 0.7, 0.35), (-0.6, -0.2, 0.1), (0.3, -0.5, -0.3)] {
        let p = resolvent_kernel(z, x, Pt::plus(lam), geom)?;
        let m = resolvent_kernel(z, x, Pt::minus(lam), geom)?;
        let jump = if (z > 0.0) == (x > 0.0) {
            resolvent_jump_same_interval(z, x, lam, geom)?
        } else {
            resolvent_jump(z, x, lam, geom)?
        };
        let v = (p - m - jump).norm() / jump.norm();
        out.push(Check::new("resolvent-jump", "R(lambda_+) - R(lambda_-) in closed form", format!("z={z} x={x} lambda={lam}"), v, 1e-6));
    }
    Ok(out)
}

/// Reflection, jumps, SVD relations and moments of d_L, d_R.
pub fn svd(geom: Geometry, lambdas: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &l in lambdas {
        let p = pair_identities(l, geom)?;
        let inputs = format!("lambda={l}");
        for (id, anchor, v) in [
            ("svd-reflection", "d_R(M2(x)) = d_L(x)", p.reflection),
            ("svd-jump-left", "d_L jump = (i/lambda) d_R on (0, b_R)", p.jump_left),
            ("svd-jump-right", "d_R jump = -(i/lambda) d_L on (b_L, 0)", p.jump_right),
            ("svd-relation", "H_R[d_R/y] = 2 lambda d_L/x and mirror", p.svd),
            ("svd-moment", "moments of d/x against d(inf)", p.moment),
        ] {
            out.push(Check::new(id, anchor, inputs.clone(), v, 1e-6));
        }
    }
    Ok(out)
}

fn parabola(side: Side, geom: &Geometry) -> impl Fn(f64) -> C64 {
    let (a, b) = side_interval(side, geom);
    move |x| r((x - a) * (b - x))
}

/// Isometry and diagonalization of H*H by U on both sides, completeness of the
/// resolution of identity and orthogonality of disjoint spectral projections.
pub fn diagonalization(geom: Geometry, spectral_nodes: usize) -> Result<Vec<Check>> {
    let sides: Vec<SpectralTransform> = [Side::L, Side::R]
        .par_iter()
        .map(|s| SpectralTransform::new(*s, geom, spectral_nodes))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for st in &sides {
        let side = st.side;
        let tests = [("parabola", st.spatial_function(parabola(side, &geom))), ("log-bump", st.spatial_function(log_bump(side, &geom, 14.0)))];
        for (name, f) in &tests {
            let inputs = format!("side={side:?} f={name} nodes={spectral_nodes}");
            let uf = st.forward(f);
            let iso = (st.spectral_norm(&uf).powi(2) - f.norm().powi(2)).abs() / f.norm().powi(2);
            out.push(Check::new("isometry", "||U f|| = ||f||", inputs.clone(), iso, 1e-4));
            out.push(Check::new("diagonalization", "U H*H U* = lambda^2", inputs, diagonalization_defect(st, f), 1e-3));
        }
        let bump = st.spatial_function(log_bump(side, &geom, 14.0));
        let full = st.resolution_of_identity(&bump, 1.0);
        let v = full.sub(&bump).norm() / bump.norm();
        out.push(Check::new("resolution-complete", "E over (0, 1] is the identity", format!("side={side:?}"), v, 1e-3));
        let f = &tests[0].1;
        let composed = st.compose_projections(f, (0.5, 0.7), (0.1, 0.3));
        let v = st.inverse_norm(&composed) / f.norm();
        out.push(Check::new("resolution-disjoint", "E(D1) E(D2) = 0 for disjoint D1, D2", format!("side={side:?}"), v, 1e-6));
    }
    Ok(out)
}

/// The commuting differential operator route: eigen-equation, Wronskian,
/// the H_L multiplier and equivalence with the Riemann-Hilbert transforms.
pub fn ode(geom: Geometry, spectral_nodes: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for omega in [1.0, 2.5, 7.0] {
        for side in [Side::L, Side::R] {
            let outer = if side == Side::L { geom.bl } else { geom.br };
            let f = phi_sampler(omega, side, geom);
            for t in [0.2, 0.5, 0.8] {
                let x = t * outer;
                let lf = l_apply(&f, x, &geom)?;
                let want = omega * f(x).re;
                let v = (lf.re - want).abs() / want.abs().max(1e-3);
                out.push(Check::new("ode-eigen", "L phi_j = omega phi_j", format!("omega={omega} side={side:?} x={x}"), v, 1e-6));
                let w = wronskian_product(x, omega, omega, side, &geom)?;
                out.push(Check::new("ode-wronskian", "P W(theta_j, phi_j) = 1", format!("omega={omega} side={side:?} x={x}"), (w - 1.0).abs(), 1e-8));
            }
        }
    }
    let u = [Side::L, Side::R]
        .par_iter()
        .map(|s| OdeTransform::new(*s, geom, spectral_nodes))
        .collect::<Result<Vec<_>>>()?;
    let f = u[0].spatial_function(log_bump(Side::L, &geom, 8.0));
    let d = multiplier_defect(&f, &u[0], &u[1], hl_multiplier)?;
    out.push(Check::new("ode-multiplier", "U_2 H_L U_1^* = multiplier", "f=log-bump side=L".into(), d, 1e-3));
    for t in &u {
        let st = SpectralTransform::new(t.side, geom, spectral_nodes)?;
        let g = parabola(t.side, &geom);
        let v = equivalence_check(&t.spatial_function(g), t, &st)?;
        out.push(Check::new("ode-equivalence", "U_j^* sech^2 U_j = U^* lambda^2 U", format!("side={:?}", t.side), v, 1e-3));
    }
    Ok(out)
}

/// Points where the leading-order form of Gamma is compared with the closed form:
/// the exterior, the four shores at +-0.5, and three sectors of the annulus.
pub fn asymptotic_points(cfg: &AnnulusConfig) -> Vec<(&'static str, Pt)> {
    let rho = cfg.zero_disc_radius;
    vec![
        ("exterior", Pt::real(2.0)),
        ("shore+0.5+", Pt::plus(0.5)),
        ("shore+0.5-", Pt::minus(0.5)),
        ("shore-0.5+", Pt::plus(-0.5)),
        ("shore-0.5-", Pt::minus(-0.5)),
        ("annulus-outside", Pt::new(C64::from_polar(rho, -PI / 2.0))),
        ("annulus-left-lens", Pt::new(C64::from_polar(rho, PI - 0.2))),
        ("annulus-right-lens", Pt::new(C64::from_polar(rho, 0.3))),
    ]
}

/// Deviation of Gamma from its leading-order form at each kappa (lambda = e^{-kappa}
/// on both shores), with per-step checks that it decreases and that successive
/// ratios match kappa_{i+1}/kappa_i within a factor of 2.
pub fn asymptotic_sweep(kappas: &[f64], cfg: &AnnulusConfig) -> Result<(Vec<Check>, Vec<SweepRow>)> {
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for (name, z) in asymptotic_points(cfg) {
        for shore in [true, false] {
            let devs: Vec<f64> = kappas
                .iter()
                .map(|k| {
                    let l = (-k).exp();
                    gamma_deviation(z, if shore { Pt::plus(l) } else { Pt::minus(l) }, cfg)
                })
                .collect::<Result<_>>()?;
            let tag = if shore { "+" } else { "-" };
            for (k, d) in kappas.iter().zip(&devs) {
                rows.push(SweepRow { region: name.to_string(), lambda_shore: tag.to_string(), kappa: *k, deviation: *d });
            }
            for i in 1..kappas.len() {
                let inputs = format!("z={name} lambda shore={tag} kappa={}->{}", kappas[i - 1], kappas[i]);
                out.push(Check::new("asymptotic-decrease", "deviation decreases with kappa", inputs.clone(), devs[i] / devs[i - 1], 1.0));
                let observed = devs[i - 1] / devs[i];
                let expected = kappas[i] / kappas[i - 1];
                out.push(Check::new("asymptotic-rate", "deviation = O(1/kappa)", inputs, (observed / expected).log2().abs(), 1.0));
            }
        }
    }
    Ok((out, rows))
}

/// The annulus itself: the saddle-angle condition for M, membership of the
/// image of Omega under z = 1/(2 eta - 1), and the zero disc lying inside it;
/// then the sweep restricted to the three annulus sectors.
pub fn annulus(kappas: &[f64], cfg: &AnnulusConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let m = cfg.m;
    out.push(Check::new("annulus-saddle-angle", "|arg t_-| < pi/8 over Omega_+", format!("M={m}"), max_saddle_angle(m), PI / 8.0));
    let mut wrong = 0usize;
    let mut round_trip: f64 = 0.0;
    for i in 0..21 {
        let s = (i as f64 + 0.5) / 21.0;
        for j in 0..48 {
            let th = 2.0 * PI * (j as f64 + 0.25) / 48.0;
            for (radius, inside) in [(m * (1.0 + s), true), (m * (0.9 - 0.5 * s), false), (m * (2.1 + s), false)] {
                let eta = C64::from_polar(radius, th);
                let z = z_of_eta(eta);
                round_trip = round_trip.max((eta_of_z(z) - eta).norm() / eta.norm());
                if cfg.in_omega_tilde(z) != inside {
                    wrong += 1;
                }
            }
        }
    }
    out.push(Check::new("annulus-membership", "z in the annulus iff (z+1)/(2z) in Omega", format!("M={m} points=3024"), wrong as f64, 0.0));
    out.push(Check::new("annulus-map", "z -> (z+1)/(2z) inverts 1/(2 eta - 1)", format!("M={m}"), round_trip, 1e-13));
    let outside = (0..64)
        .filter(|j| !cfg.in_omega_tilde(C64::from_polar(cfg.zero_disc_radius, 2.0 * PI * (*j as f64 + 0.5) / 64.0)))
        .count();
    out.push(Check::new("annulus-zero-disc", "the zero-disc circle lies in the annulus", format!("radius={}", cfg.zero_disc_radius), outside as f64, 0.0));
    let (sweep, _) = asymptotic_sweep(kappas, cfg)?;
    out.extend(sweep.into_iter().filter(|c| c.inputs.starts_with("z=annulus")));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub region: String,
    pub lambda_shore: String,
    pub kappa: f64,
    pub deviation: f64,
}

/// The saddle-point leading term against direct quadrature for lambda = +-i e^{-kappa}:
/// relative error within 10 M^2/|Im a|, and successive errors in the ratio of |Im a|
/// within a factor of 2.
pub fn saddle(kappas: &[f64], cfg: &AnnulusConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for eta in [c(20.0, 20.0), c(-25.0, 8.0), c(0.5, 30.0)] {
        for s in [1.0, -1.0] {
            let mut errs = Vec::new();
            for k in kappas {
                let lam = Pt::new(c(0.0, s * (-k).exp()));
                let a = a_of_lambda(lam)?;
                let f = |t: C64| (crate::types::I * a.re * crate::asymptotics::s_phase(t, eta).unwrap_or(r(0.0))).exp();
                let est = steepest_descent_eval(f, eta, lam, cfg)?;
                let quad = saddle_integral_quadrature(f, eta, lam)?;
                let rel = (est.value / quad - 1.0).norm();
                let inputs = format!("eta={eta} lambda={lam} kappa={k}");
                out.push(Check::new("saddle-bound", "saddle term within O(M^2/Im a) of quadrature", inputs, rel * a.im.abs() / (cfg.m * cfg.m), 10.0));
                errs.push((rel, a.im.abs()));
            }
            for i in 1..errs.len() {
                let observed = errs[i - 1].0 / errs[i].0;
                let expected = errs[i].1 / errs[i - 1].1;
                let inputs = format!("eta={eta} sign={s} kappa={}->{}", kappas[i - 1], kappas[i]);
                out.push(Check::new("saddle-rate", "saddle error = O(1/Im a)", inputs, (observed / expected).log2().abs(), 1.0));
            }
        }
    }
    Ok(out)
}

/// Jumps of the error matrix on the contour pieces: the lens edges against their
/// exponential rate, the zero disc against 1/kappa.
pub fn error_matrix(kappas: &[f64], cfg: &AnnulusConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let t = cfg.theta.tan();
    for (name, z) in [("lens-left", c(-0.5, t * 0.5)), ("lens-right", c(0.5, -t * 0.5))] {
        let g = crate::spectral::g_of_z(Pt::new(z))?;
        let rate = if name == "lens-left" { (2.0 * g - 1.0).re } else { -(2.0 * g + 1.0).re };
        let devs: Vec<f64> =
            kappas.iter().map(|k| Ok(error_matrix_diagnostic(z, Pt::plus((-k).exp()), cfg)?.deviation)).collect::<Result<_>>()?;
        for i in 1..kappas.len() {
            let slope = (devs[i].ln() - devs[i - 1].ln()) / (kappas[i] - kappas[i - 1]);
            let inputs = format!("z={z} kappa={}->{}", kappas[i - 1], kappas[i]);
            out.push(Check::new("error-lens", "lens jump ~ e^{kappa Re(2g -+ 1)}", inputs, (slope / rate - 1.0).abs(), 0.05));
        }
    }
    let median = |k: f64| -> Result<f64> {
        let mut v: Vec<f64> = (0..12)
            .map(|j| {
                let z = C64::from_polar(cfg.zero_disc_radius, -PI + (j as f64 + 0.5) * PI / 6.0);
                Ok(error_matrix_diagnostic(z, Pt::plus((-k).exp()), cfg)?.deviation)
            })
            .collect::<Result<_>>()?;
        v.sort_by(f64::total_cmp);
        Ok((v[5] + v[6]) / 2.0)
    };
    let m: Vec<f64> = kappas.iter().map(|k| median(*k)).collect::<Result<_>>()?;
    for i in 1..kappas.len() {
        let observed = m[i - 1] / m[i];
        let expected = kappas[i] / kappas[i - 1];
        let inputs = format!("zero disc median kappa={}->{}", kappas[i - 1], kappas[i]);
        out.push(Check::new("error-zero-disc", "zero-disc jump = O(1/kappa)", inputs, (observed / expected).log2().abs(), 1.0));
    }
    Ok(out)
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Off-cut sample point with modulus in [lo, hi], kept away from the real axis.
fn draw_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    let rho = uniform(rng, lo, hi);
    let mut th = uniform(rng, -PI, PI);
    if th.abs() < 0.05 || th.abs() > PI - 0.05 {
        th += 0.1;
    }
    C64::from_polar(rho, th)
}

/// Randomized invariants of the special functions at `draws` parameter draws:
/// Wronskian constancy, ODE residuals, agreement of transformations, Schwarz
/// symmetry and the a -> -1-a substitution.
pub fn special_functions(seed: u64, draws: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for k in 0..draws {
        let a = c(uniform(&mut rng, -0.45, 0.45), uniform(&mut rng, -3.0, 3.0));
        let e1 = draw_point(&mut rng, 1.6, 40.0);
        let e2 = draw_point(&mut rng, 0.2, 3.0);
        let inputs = format!("draw={k} a={a} eta={e1},{e2}");

        let w0 = -(2.0 * a + 1.0);
        let p1 = hyp_pair_at_infinity(a, Pt::new(e1))?;
        let p2 = hyp_pair_at_infinity(a, Pt::new(e2))?;
        let wr = ((p1.wronskian() - w0).norm()).max((p2.wronskian() - w0).norm()) / w0.norm();
        out.push(Check::new("sf-wronskian", "h s' - s h' = -(2a+1)", inputs.clone(), wr, 1e-10));

        // second derivative by centred differences of h'
        let d = 1e-5 * e2.norm();
        let hp = |e: C64| hyp_pair_at_infinity(a, Pt::new(e)).map(|p| p.h_prime);
        let h2 = (hp(e2 + d)? - hp(e2 - d)?) / (2.0 * d);
        let lhs = e2 * (1.0 - e2) * h2;
        let rhs = a * (a + 1.0) * p2.h;
        out.push(Check::new("sf-pair-ode", "eta(1-eta) h'' + a(a+1) h = 0", inputs.clone(), (lhs + rhs).norm() / (lhs.norm() + rhs.norm()), 1e-8));

        let sub = hyp_pair_at_infinity(-1.0 - a, Pt::new(e1))?;
        out.push(Check::new("sf-substitution", "h(a -> -1-a) = s", inputs.clone(), (sub.h - p1.s).norm() / p1.s.norm(), 1e-10));

        let p = HypParams::new(
            c(uniform(&mut rng, -1.5, 1.5), uniform(&mut rng, -1.0, 1.0)),
            c(uniform(&mut rng, -1.5, 1.5), uniform(&mut rng, -1.0, 1.0)),
            c(uniform(&mut rng, 0.3, 2.5), uniform(&mut rng, -1.0, 1.0)),
        );
        let z = draw_point(&mut rng, 0.3, 3.0);
        let zin = format!("draw={k} a={} b={} c={} z={z}", p.a, p.b, p.c);
        let (f, df) = gauss_2f1_d(p, Pt::new(z))?;
        let d = 1e-5 * z.norm().max(0.1);
        let dfp = |x: C64| gauss_2f1_d(p, Pt::new(x)).map(|v| v.1);
        let d2f = (dfp(z + d)? - dfp(z - d)?) / (2.0 * d);
        let terms = [z * (1.0 - z) * d2f, (p.c - (p.a + p.b + 1.0) * z) * df, -p.a * p.b * f];
        let scale: f64 = terms.iter().map(|t| t.norm()).sum();
        let res = (terms[0] + terms[1] + terms[2]).norm() / scale;
        out.push(Check::new("sf-2f1-ode", "z(1-z)F'' + (c-(a+b+1)z)F' - abF = 0", zin.clone(), res, 1e-8));

        let conj = HypParams::new(p.a.conj(), p.b.conj(), p.c.conj());
        let fc = gauss_2f1(conj, Pt::new(z.conj()))?.conj();
        out.push(Check::new("sf-schwarz", "conj F(conj params; conj z) = F", zin.clone(), (fc - f).norm() / f.norm(), 1e-12));

        for rho in [0.4, 0.7] {
            let zz = C64::from_polar(rho, uniform(&mut rng, -PI, PI));
            let s = eval_method(Method::Series, p, Pt::new(zz))?;
            let mut worst: f64 = 0.0;
            for m in [Method::Euler, Method::Continuation] {
                worst = worst.max((eval_method(m, p, Pt::new(zz))? - s).norm() / s.norm());
            }
            if (zz / (zz - 1.0)).norm() < 0.9 {
                worst = worst.max((eval_method(Method::Pfaff, p, Pt::new(zz))? - s).norm() / s.norm());
            }
            let tin = format!("draw={k} a={} b={} c={} z={zz}", p.a, p.b, p.c);
            out.push(Check::new("sf-transformations", "series, Pfaff, Euler and continuation agree", tin, worst, 1e-10));
        }
    }
    Ok(out)
}
