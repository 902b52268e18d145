//! Closed-form solution Gamma(z; lambda) of the 2x2 jump problem on
//! [b_L, 0] and [0, b_R], and verification of its jumps in z and lambda.

use crate::complexfn::gamma::gamma_ratio;
use crate::complexfn::pair::{check_parameter, continue_pair, direct, hyp_pair_at_infinity, PAIR_RADIUS};
use crate::diagonalization::SingularPair;
use crate::error::{Error, Result};
use crate::spectral::{a_of_lambda, mobius, Geometry, Mobius};
use crate::types::{r, Mat2, Pt, Shore, C64, I};
use std::f64::consts::PI;

/// Two-sided offset and endpoint guard used by the jump sweeps.
pub const JUMP_EPS: f64 = 1e-8;
pub const ENDPOINT_GUARD: f64 = 1e-3;

/// Pair matrix [[h, s], [h', s']] on the principal sheet, and the variant
/// multiplied by eta^{c/2} (1-eta)^{(a+b-c+1)/2}; with c = 0 and b = -1-a the
/// prefactor is identically one.
#[derive(Debug, Clone, Copy)]
pub struct GammaHat {
    pub value: Mat2,
    pub prefactored: Mat2,
}

pub fn gamma_hat(eta: Pt, a: C64) -> Result<GammaHat> {
    let value = hyp_pair_at_infinity(a, eta)?.matrix();
    let (b, c) = (-a - 1.0, r(0.0));
    let e = eta.z;
    let pre = e.powc(c / 2.0) * (r(1.0) - e).powc((a + b - c + 1.0) / 2.0);
    Ok(GammaHat { value, prefactored: value.scale(pre) })
}

/// Q = D (1 + i e^{i pi a} sigma_2).
#[derive(Debug, Clone, Copy)]
pub struct QMatrix {
    pub value: Mat2,
    pub d: Mat2,
}

pub fn q_from_a(a: C64) -> Result<QMatrix> {
    let ea = (I * PI * a).exp();
    let t = (PI * a).tan();
    if !t.re.is_finite() || !t.im.is_finite() {
        return Err(Error::Pole { what: "tan(pi a) in Q", at: format!("{a}") });
    }
    let ratio = gamma_ratio(&[a + 1.5, a + 0.5], &[a, a + 2.0])?;
    let d22 = ((2.0 * a + 1.0) * 4f64.ln()).exp() * ea * ratio;
    let d = Mat2::diag(-t, d22);
    let value = d * Mat2::new(r(1.0), ea, -ea, r(1.0));
    Ok(QMatrix { value, d })
}

pub fn q_matrix(lambda: Pt) -> Result<QMatrix> {
    if lambda.z == r(0.0) {
        return Err(Error::Domain("Q at lambda = 0".into()));
    }
    q_from_a(a_of_lambda(lambda)?)
}

/// Scalar c_-(lambda) with Q_+ = c_- sigma_1 Q_- on (-1/2, 0), evaluated at a = a_-.
pub fn q_jump_scalar(a_minus: C64) -> Result<C64> {
    let t = (PI * a_minus).tan();
    let ratio = gamma_ratio(&[a_minus, a_minus + 2.0], &[a_minus + 1.5, a_minus + 0.5])?;
    let p = ((2.0 * a_minus + 1.0) * 4f64.ln()).exp() * (2.0 * PI * I * a_minus).exp();
    Ok(-t * ratio / p)
}

/// The pair matrix on the sheet used by Gamma: analytic off (-inf, 0] and
/// [1, inf), equal to the principal branch in the upper half plane and
/// continued from there across (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct PairSheet {
    pub a: C64,
    continuation: Mat2,
}

fn eta_side(eta: Pt) -> f64 {
    let e = eta.z;
    if e.im != 0.0 {
        e.im.signum()
    } else if e.re > 0.0 && e.re < 1.0 {
        1.0
    } else {
        eta.shore.map(|s| s.sign()).unwrap_or(0.0)
    }
}

impl PairSheet {
    pub fn new(a: C64) -> Result<Self> {
        check_parameter(a)?;
        let top = C64::new(0.5, PAIR_RADIUS);
        let bottom = C64::new(0.5, -PAIR_RADIUS);
        let from_above = continue_pair(a, top, &direct(a, top, 1.0)?, &[bottom])?.matrix();
        let principal_below = direct(a, bottom, -1.0)?.matrix();
        Ok(PairSheet { a, continuation: principal_below.inv() * from_above })
    }

    pub fn hat(&self, eta: Pt) -> Result<Mat2> {
        let side = eta_side(eta);
        if side == 0.0 {
            return Err(Error::OnCut { at: format!("eta = {eta}") });
        }
        if side > 0.0 {
            let p = Pt { z: eta.z, shore: Some(Shore::Plus) };
            Ok(hyp_pair_at_infinity(self.a, p)?.matrix())
        } else {
            let p = Pt { z: eta.z, shore: Some(Shore::Minus) };
            Ok(hyp_pair_at_infinity(self.a, p)?.matrix() * self.continuation)
        }
    }

    pub fn hat_at_z(&self, z: Pt, geom: &Geometry) -> Result<Mat2> {
        self.hat(eta_of(z, geom)?)
    }
}

/// eta = M1(z) with shores carried over; M1 reverses orientation, so the upper
/// shore of (b_L, b_R) lands on the lower shore of the eta cuts.
pub fn eta_of(z: Pt, g: &Geometry) -> Result<Pt> {
    let zz = z.z;
    if zz.im == 0.0 {
        let x = zz.re;
        if x == g.bl || x == 0.0 || x == g.br {
            return Err(Error::NearEndpoint { at: format!("{z}"), guard: 0.0 });
        }
        if x > g.bl && x < g.br {
            let s = z.shore.ok_or(Error::OnCut { at: format!("z = {z}") })?;
            return Ok(Pt { z: mobius(Mobius::M1, zz, g)?, shore: Some(s.flip()) });
        }
    }
    Ok(Pt::new(mobius(Mobius::M1, zz, g)?))
}

/// Evaluator of Gamma(z; lambda) for a fixed lambda; the per-lambda constants
/// are computed once.
#[derive(Debug, Clone)]
pub struct GammaSolver {
    pub geom: Geometry,
    pub lambda: Pt,
    pub a: C64,
    pub q: QMatrix,
    pub sheet: PairSheet,
    left: Mat2,
    right: Mat2,
}

impl GammaSolver {
    pub fn new(lambda: Pt, geom: Geometry) -> Result<Self> {
        if lambda.z == r(0.0) {
            return Err(Error::Domain("Gamma at lambda = 0".into()));
        }
        let l = lambda.z;
        if l.im == 0.0 && l.re.abs() == 0.5 {
            return Err(Error::Domain("Gamma at lambda = +-1/2".into()));
        }
        let a = a_of_lambda(lambda)?;
        Self::with_a(a, lambda, geom)
    }

    pub fn with_a(a: C64, lambda: Pt, geom: Geometry) -> Result<Self> {
        let sheet = PairSheet::new(a)?;
        let q = q_from_a(a)?;
        let hat_inf = sheet.hat(Pt::real(geom.eta_at_infinity()))?;
        Ok(GammaSolver {
            geom,
            lambda,
            a,
            q,
            sheet,
            left: Mat2::sigma2() * q.value.inv() * hat_inf.inv(),
            right: q.value * Mat2::sigma2(),
        })
    }

    pub fn hat_at_z(&self, z: Pt) -> Result<Mat2> {
        self.sheet.hat_at_z(z, &self.geom)
    }

    fn triangular(&self, z: C64) -> Mat2 {
        let g = &self.geom;
        Mat2::upper(g.bl * g.br / (z * g.width() * (self.a + 1.0)))
    }

    pub fn eval(&self, z: Pt) -> Result<Mat2> {
        let hat = self.hat_at_z(z)?;
        Ok(self.left * self.triangular(z.z) * hat * self.right)
    }

    /// Gamma and dGamma/dz; the pair derivative comes from the ODE
    /// eta(1-eta) w'' + a(a+1) w = 0.
    pub fn eval_with_derivative(&self, z: Pt) -> Result<(Mat2, Mat2)> {
        let g = &self.geom;
        let eta = eta_of(z, g)?;
        let hat = self.sheet.hat(eta)?;
        let e = eta.z;
        let k = -self.a * (self.a + 1.0) / (e * (1.0 - e));
        let hat_eta = Mat2::new(hat.get(1, 0), hat.get(1, 1), k * hat.get(0, 0), k * hat.get(0, 1));
        let zz = z.z;
        let deta_dz = g.bl * g.br / (g.width() * zz * zz);
        let t = self.triangular(zz);
        let t_prime = Mat2::new(r(0.0), -g.bl * g.br / (zz * zz * g.width() * (self.a + 1.0)), r(0.0), r(0.0));
        let value = self.left * t * hat * self.right;
        let deriv = self.left * (t_prime * hat + t * hat_eta.scale(deta_dz)) * self.right;
        Ok((value, deriv))
    }

    /// Jump matrix in z: [[1, -i/lambda], [0, 1]] on (b_L, 0), [[1, 0], [i/lambda, 1]]
    /// on (0, b_R), identity elsewhere.
    pub fn z_jump(&self, x: f64) -> Mat2 {
        let il = I / self.lambda.z;
        if x > self.geom.bl && x < 0.0 {
            Mat2::upper(-il)
        } else if x > 0.0 && x < self.geom.br {
            Mat2::lower(il)
        } else {
            Mat2::identity()
        }
    }

    /// Rank-one form 1 - f1 g1^t / lambda of the z-jump.
    pub fn z_jump_rank_one(&self, x: f64) -> Mat2 {
        let (f1, g1) = f1_g1(x, &self.geom);
        Mat2::identity() - Mat2::outer(f1, g1).scale(r(1.0) / self.lambda.z)
    }

    /// Boundary value at a real point from the side `shore`, by extrapolating
    /// offsets eps and eps/2 off the axis.
    pub fn richardson_shore(&self, x: f64, shore: Shore, eps: f64) -> Result<Mat2> {
        let s = shore.sign();
        let g1 = self.eval(Pt::new(C64::new(x, s * eps)))?;
        let g2 = self.eval(Pt::new(C64::new(x, s * eps / 2.0)))?;
        Ok(g2.scale(r(2.0)) - g1)
    }
}

/// Vectors f1 = [i chi_L, chi_R], g1 = [-i chi_R, chi_L] at a real point.
pub fn f1_g1(x: f64, g: &Geometry) -> ([C64; 2], [C64; 2]) {
    let chl = if x > g.bl && x < 0.0 { 1.0 } else { 0.0 };
    let chr = if x > 0.0 && x < g.br { 1.0 } else { 0.0 };
    ([I * chl, r(chr)], [-I * chr, r(chl)])
}

#[derive(Debug, Clone, Copy)]
pub struct GammaValue {
    pub z: Pt,
    pub lambda: Pt,
    pub value: Mat2,
}

pub fn gamma_solve(z: Pt, lambda: Pt, geom: Geometry) -> Result<GammaValue> {
    let s = GammaSolver::new(lambda, geom)?;
    Ok(GammaValue { z, lambda, value: s.eval(z)? })
}

fn guard(x: f64, g: &Geometry) -> Result<()> {
    let d = ENDPOINT_GUARD * g.width();
    for e in [g.bl, 0.0, g.br] {
        if (x - e).abs() < d {
            return Err(Error::NearEndpoint { at: format!("{x}"), guard: d });
        }
    }
    Ok(())
}

/// ||Gamma(x+) - Gamma(x-) J(x)|| / ||Gamma(x-)|| from two-sided evaluation
/// at x +- i eps with extrapolation in eps.
pub fn verify_z_jump(x: f64, lambda: Pt, geom: Geometry) -> Result<f64> {
    guard(x, &geom)?;
    let s = GammaSolver::new(lambda, geom)?;
    z_jump_residual(&s, x)
}

pub fn z_jump_residual(s: &GammaSolver, x: f64) -> Result<f64> {
    guard(x, &s.geom)?;
    let gp = s.richardson_shore(x, Shore::Plus, JUMP_EPS)?;
    let gm = s.richardson_shore(x, Shore::Minus, JUMP_EPS)?;
    Ok((gp - gm * s.z_jump(x)).norm() / gm.norm())
}

/// The same residual with exact shore values on both sides.
pub fn z_jump_residual_exact(s: &GammaSolver, x: f64) -> Result<f64> {
    guard(x, &s.geom)?;
    let gp = s.eval(Pt::plus(x))?;
    let gm = s.eval(Pt::minus(x))?;
    Ok((gp - gm * s.z_jump(x)).norm() / gm.norm())
}

/// Factor 1 - f2 g2^t / z relating Gamma(z; lambda_+) to Gamma(z; lambda_-)
/// for real lambda in (-1/2, 0) or (0, 1/2).
pub fn lambda_jump_factor(z: Pt, lambda: f64, geom: &Geometry) -> Result<Mat2> {
    let (f2, g2) = f2_g2(z, lambda, geom)?;
    Ok(Mat2::identity() - Mat2::outer(f2, g2).scale(r(1.0) / z.z))
}

/// The vectors f2, g2 built from d_R, d_L at -|lambda|.
pub fn f2_g2(z: Pt, lambda: f64, geom: &Geometry) -> Result<([C64; 2], [C64; 2])> {
    if !(lambda.abs() > 0.0 && lambda.abs() < 0.5) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (-1/2, 0) u (0, 1/2)")));
    }
    let sp = SingularPair::new(-lambda.abs(), *geom)?;
    let (dl, dr) = sp.eval(z)?;
    let am = sp.a_minus;
    let sg = lambda.signum();
    let pre = -2.0 * geom.br * geom.bl * lambda.abs() * (2.0 * am + 1.0) / geom.width();
    Ok(([pre * dr, pre * sg * dl], [-sg * dl, dr]))
}

/// ||Gamma(z; lambda_+) - Gamma(z; lambda_-) (1 - f2 g2^t / z)|| / ||Gamma(z; lambda_-)||.
pub fn verify_lambda_jump(z: Pt, lambda: f64, geom: Geometry) -> Result<f64> {
    let d = ENDPOINT_GUARD;
    for e in [-0.5, 0.0, 0.5] {
        if (lambda - e).abs() < d {
            return Err(Error::NearEndpoint { at: format!("lambda = {lambda}"), guard: d });
        }
    }
    let gp = GammaSolver::new(Pt::plus(lambda), geom)?.eval(z)?;
    let gm = GammaSolver::new(Pt::minus(lambda), geom)?.eval(z)?;
    let j = lambda_jump_factor(z, lambda, &geom)?;
    Ok((gp - gm * j).norm() / gm.norm())
}

/// Off-cut single-valuedness: Gamma at lambda +- i0 for real |lambda| > 1/2.
pub fn verify_off_cut(z: Pt, lambda: f64, geom: Geometry) -> Result<f64> {
    let gp = GammaSolver::new(Pt::plus(lambda), geom)?.eval(z)?;
    let gm = GammaSolver::new(Pt::minus(lambda), geom)?.eval(z)?;
    Ok((gp - gm).norm() / gm.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    fn sym() -> Geometry {
        Geometry::symmetric()
    }

    #[test]
    fn determinant_of_pair_matrix() {
        let a = c(0.2, -0.3);
        for eta in [2.0, 7.0] {
            let h = gamma_hat(Pt::real(eta), a).unwrap();
            assert!((h.prefactored.det() + (2.0 * a + 1.0)).norm() < 1e-10);
        }
        let h = gamma_hat(Pt::new(c(3.0, 0.5)), a).unwrap();
        let k = gamma_hat(Pt::new(c(3.0, 0.5)), -a - 1.0).unwrap();
        assert!((h.value.get(0, 0) - k.value.get(0, 1)).norm() < 1e-12 * h.value.get(0, 0).norm());
        assert!((h.value.get(1, 0) - k.value.get(1, 1)).norm() < 1e-12 * h.value.get(1, 0).norm());
    }

    #[test]
    fn q_factorization_and_jump() {
        let lam = Pt::new(c(0.0, 0.7));
        let q = q_matrix(lam).unwrap();
        let a = a_of_lambda(lam).unwrap();
        let ea = (I * PI * a).exp();
        let alt = q.d * (Mat2::identity() + Mat2::sigma2().scale(I * ea));
        assert!((alt - q.value).norm() < 1e-13 * q.value.norm());
        let qp = q_matrix(Pt::plus(-0.3)).unwrap().value;
        let qm = q_matrix(Pt::minus(-0.3)).unwrap().value;
        let cm = q_jump_scalar(a_of_lambda(Pt::minus(-0.3)).unwrap()).unwrap();
        let res = (qp - (Mat2::sigma1() * qm).scale(cm)).norm() / qp.norm();
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn q_second_row_vanishes_at_infinity() {
        let row = |l: f64| {
            let q = q_matrix(Pt::real(l)).unwrap().value;
            (q.get(1, 0).norm_sqr() + q.get(1, 1).norm_sqr()).sqrt()
        };
        let (r1, r2) = (row(1e3), row(1e4));
        // proportional to |a| ~ 1/(2 pi lambda)
        assert!((r1 / r2 - 10.0).abs() < 0.05, "{}", r1 / r2);
    }

    #[test]
    fn normalization_at_infinity() {
        let s = GammaSolver::new(Pt::real(0.8), sym()).unwrap();
        let z1 = c(1e6, 1e6);
        let d1 = (s.eval(Pt::new(z1)).unwrap() - Mat2::identity()).norm();
        let d2 = (s.eval(Pt::new(z1 * 10.0)).unwrap() - Mat2::identity()).norm();
        assert!(d1 < 1e-5);
        assert!((d1 / d2 - 10.0).abs() < 0.1, "{}", d1 / d2);
    }

    #[test]
    fn unit_determinant() {
        let g = gamma_solve(Pt::new(c(0.3, 0.4)), Pt::new(c(0.0, 0.6)), sym()).unwrap();
        assert!((g.value.det() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn symmetries() {
        let z = c(0.2, -0.1);
        let l = c(0.4, 0.3);
        let g = gamma_solve(Pt::new(z), Pt::new(l), sym()).unwrap().value;
        let conj = gamma_solve(Pt::new(z.conj()), Pt::new(l.conj()), sym()).unwrap().value.conj();
        let s3 = Mat2::sigma3();
        let neg = s3 * gamma_solve(Pt::new(z), Pt::new(-l), sym()).unwrap().value * s3;
        assert!((g - conj).norm() < 1e-10 * g.norm());
        assert!((g - neg).norm() < 1e-10 * g.norm());
    }

    #[test]
    fn z_jumps_at_sample_points() {
        let l = Pt::real(0.9);
        assert!(verify_z_jump(-0.5, l, sym()).unwrap() < 1e-9);
        assert!(verify_z_jump(0.5, l, sym()).unwrap() < 1e-9);
        assert!(verify_z_jump(2.0, l, sym()).unwrap() < 1e-12);
        let s = GammaSolver::new(l, sym()).unwrap();
        assert!(z_jump_residual_exact(&s, -0.5).unwrap() < 1e-12);
        assert!(z_jump_residual_exact(&s, 0.5).unwrap() < 1e-12);
        assert!(verify_z_jump(0.0005, l, sym()).is_err());
    }

    #[test]
    fn derivative_matches_difference() {
        let g = Geometry::new(-1.0, 2.0).unwrap();
        let s = GammaSolver::new(Pt::new(c(0.6, 0.2)), g).unwrap();
        for z in [Pt::new(c(0.3, 0.4)), Pt::plus(0.7), Pt::minus(-0.4), Pt::real(3.0)] {
            let h = 1e-5 * g.width();
            let shift = |d: f64| Pt { z: z.z + d, shore: z.shore };
            let fd = (s.eval(shift(h)).unwrap() - s.eval(shift(-h)).unwrap()).scale(r(0.5 / h));
            let (_, d) = s.eval_with_derivative(z).unwrap();
            assert!((fd - d).norm() < 1e-7 * d.norm(), "{z}: {}", (fd - d).norm() / d.norm());
        }
    }

    #[test]
    fn rank_one_jump_form() {
        let s = GammaSolver::new(Pt::new(c(0.6, 0.2)), Geometry::new(-1.0, 2.0).unwrap()).unwrap();
        for x in [-0.4, 0.9] {
            assert!((s.z_jump(x) - s.z_jump_rank_one(x)).norm() < 1e-15);
        }
    }

    #[test]
    fn lambda_jumps() {
        let z = Pt::new(c(0.3, 0.2));
        let r1 = verify_lambda_jump(z, -0.25, sym()).unwrap();
        let r2 = verify_lambda_jump(z, 0.25, sym()).unwrap();
        assert!(r1 < 1e-8, "{r1}");
        assert!(r2 < 1e-8, "{r2}");
        assert!(verify_off_cut(z, 0.8, sym()).unwrap() < 1e-12);
    }

    fn growth_exponent(f: impl Fn(f64) -> f64, t_big: f64, t_small: f64) -> f64 {
        (f(t_small) / f(t_big)).ln() / (t_small / t_big).ln()
    }

    #[test]
    fn bi_resonant_combination_exponents() {
        let g = sym();
        for lam in [c(0.7, 0.4), c(-0.7, 0.4), c(2.0, 0.0)] {
            let s = GammaSolver::new(Pt::new(lam), g).unwrap();
            let comb = |dir: C64| {
                let s = &s;
                move |t: f64| {
                    let z = dir * t;
                    let h = s.hat_at_z(Pt::new(z)).unwrap();
                    let tt = g.bl * g.br / (z * g.width() * (s.a + 1.0));
                    (h.get(0, 1) + tt * h.get(1, 1)).norm()
                }
            };
            let ra = s.a.re;
            // lower z half plane: principal sheet, the z^{-a} term cancels too
            let below = growth_exponent(comb(c(1.0, -1.0)), 1e-4, 1e-6);
            assert!((below - (1.0 - ra)).abs() < 0.05, "{lam}: {below}");
            assert!(below > -ra - 0.05);
            let above = growth_exponent(comb(c(1.0, 1.0)), 1e-4, 1e-6);
            assert!((above - ra).abs() < 0.05, "{lam}: {above}");
            assert!(above > -0.5 && below > -0.5);
        }
    }

    #[test]
    fn endpoint_growth() {
        let g = Geometry::new(-1.0, 2.0).unwrap();
        let s = GammaSolver::new(Pt::new(c(0.7, 0.4)), g).unwrap();
        let column = |e: f64, j: usize| {
            let s = &s;
            move |t: f64| {
                let m = s.eval(Pt::new(r(e) + c(0.6, 0.8) * t)).unwrap();
                (m.get(0, j).norm_sqr() + m.get(1, j).norm_sqr()).sqrt()
            }
        };
        for (e, j) in [(g.bl, 1), (g.br, 0)] {
            let coarse = growth_exponent(column(e, j), 2f64.powi(-6), 2f64.powi(-10));
            let fine = growth_exponent(column(e, j), 2f64.powi(-14), 2f64.powi(-18));
            assert!(fine > -0.15 && fine.abs() < coarse.abs(), "{e}: {coarse} {fine}");
            let other = growth_exponent(column(e, 1 - j), 2f64.powi(-14), 2f64.powi(-18));
            assert!(other.abs() < 0.01);
        }
        for j in 0..2 {
            let at_zero = growth_exponent(column(0.0, j), 2f64.powi(-14), 2f64.powi(-18));
            assert!(at_zero > -0.5, "{at_zero}");
        }
    }
}
