//! Small-lambda asymptotics of Gamma in the symmetric geometry b_R = -b_L = 1:
//! the saddle phase S_eta(t), a uniform saddle-point evaluator with a
//! quadrature oracle, leading terms of the pair at infinity, the model
//! problem, and the g-function and lens transforms Gamma -> Y -> Z.

use crate::complexfn::gamma::gamma_ratio;
use crate::complexfn::pair::hyp_pair_at_infinity;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::rhp::GammaSolver;
use crate::spectral::{a_of_lambda, g_of_z, kappa_of_lambda, Geometry};
use crate::types::{r, Mat2, Pt, Shore, Side, C64, I};
use std::f64::consts::PI;

pub const DEFAULT_M: f64 = 20.0;
pub const SECTOR_ANGLE: f64 = PI / 6.0;

/// eta = (z + 1) / (2z), the image of z under the normalized first Mobius map.
pub fn eta_of_z(z: C64) -> C64 {
    (z + 1.0) / (2.0 * z)
}

/// Inverse of `eta_of_z`.
pub fn z_of_eta(eta: C64) -> C64 {
    r(1.0) / (2.0 * eta - 1.0)
}

/// Radius parameter M of Omega = {M <= |eta| <= 2M}, the sector angle theta of
/// the lenses, and the disc radii used by the error-matrix diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusConfig {
    pub m: f64,
    pub theta: f64,
    /// Radius of the discs around -1 and 1; also the guard distance for
    /// evaluation near those points.
    pub disc_radius: f64,
    /// Radius of the disc around 0, whose boundary lies inside the annulus.
    pub zero_disc_radius: f64,
}

impl Default for AnnulusConfig {
    fn default() -> Self {
        AnnulusConfig { m: DEFAULT_M, theta: SECTOR_ANGLE, disc_radius: 0.25, zero_disc_radius: 0.018 }
    }
}

/// Largest |arg t_-(eta)| over a grid of Omega_+.
pub fn max_saddle_angle(m: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=8 {
        let rho = m * (1.0 + i as f64 / 8.0);
        for j in 0..=64 {
            let eta = C64::from_polar(rho, PI * j as f64 / 64.0);
            worst = worst.max(t_minus(eta).arg().abs());
        }
    }
    worst
}

impl AnnulusConfig {
    /// Checks that every saddle t_- over Omega_+ satisfies |arg t_-| < pi/8.
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::Domain(format!("annulus radius M = {m} must exceed 1")));
        }
        let worst = max_saddle_angle(m);
        if worst >= PI / 8.0 {
            return Err(Error::Domain(format!("M = {m} is too small: |arg t_-| reaches {worst}")));
        }
        let mid = 1.0 / (3.0 * m);
        Ok(AnnulusConfig { m, zero_disc_radius: mid, ..AnnulusConfig::default() })
    }

    pub fn in_omega(&self, eta: C64) -> bool {
        let n = eta.norm();
        n >= self.m && n <= 2.0 * self.m
    }

    pub fn in_omega_plus(&self, eta: C64) -> bool {
        self.in_omega(eta) && eta.im >= 0.0
    }

    pub fn in_omega_tilde(&self, z: C64) -> bool {
        z != r(0.0) && self.in_omega(eta_of_z(z))
    }

    /// Omega-tilde_+ is the lower half of the annulus, since Im eta = -Im z / (2|z|^2).
    pub fn in_omega_tilde_plus(&self, z: C64) -> bool {
        z != r(0.0) && self.in_omega_plus(eta_of_z(z))
    }
}

fn is_on_cut(t: C64, eta: C64) -> bool {
    let on_axis = t.im == 0.0 && (t.re <= 0.0 || t.re >= 1.0);
    let q = t / eta;
    on_axis || (q.im.abs() <= 1e-15 * q.norm() && q.re >= 1.0)
}

/// S_eta(t) = -i ln(t(1-t)/(1-t/eta)) as a sum of principal logarithms, which
/// places the cuts on (-inf, 0], [1, inf) and the ray from eta outward.
pub fn s_phase(t: C64, eta: C64) -> Result<C64> {
    if eta == r(0.0) {
        return Err(Error::Domain("S_eta needs eta != 0".into()));
    }
    if is_on_cut(t, eta) {
        return Err(Error::OnCut { at: format!("t = {t} (eta = {eta})") });
    }
    Ok(-I * (t.ln() + (r(1.0) - t).ln() - (r(1.0) - t / eta).ln()))
}

/// S', S'' in t.
pub fn s_phase_derivatives(t: C64, eta: C64) -> (C64, C64) {
    let d1 = -I * (r(1.0) / t - r(1.0) / (r(1.0) - t) + r(1.0) / (eta - t));
    let d2 = -I * (-r(1.0) / (t * t) - r(1.0) / ((r(1.0) - t) * (r(1.0) - t)) + r(1.0) / ((eta - t) * (eta - t)));
    (d1, d2)
}

/// sqrt(eta^2 - eta) written as eta sqrt(1 - 1/eta), analytic off [0, 1].
fn root(eta: C64) -> C64 {
    eta * (r(1.0) - r(1.0) / eta).sqrt()
}

fn t_minus(eta: C64) -> C64 {
    // eta - root = eta / (eta + root) avoids the cancellation for large eta
    eta / (eta + root(eta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub eta: C64,
    pub t_minus: C64,
    pub t_plus: C64,
    /// S_eta(t_-).
    pub s_at_saddle: C64,
    /// S''_eta(t_-).
    pub s_second: C64,
}

pub fn saddle_data(eta: C64) -> Result<SaddleData> {
    if eta.im == 0.0 && (0.0..=1.0).contains(&eta.re) {
        return Err(Error::OnCut { at: format!("eta = {eta} on [0, 1]") });
    }
    let tm = t_minus(eta);
    let tp = eta + root(eta);
    let s = s_phase(tm, eta)?;
    let (_, s2) = s_phase_derivatives(tm, eta);
    Ok(SaddleData { eta, t_minus: tm, t_plus: tp, s_at_saddle: s, s_second: s2 })
}

/// Leading term of the integral of F e^{-Im a S} over [0, 1], with the bound
/// M^2 / |Im a| on its relative error (the constant is not known).
#[derive(Debug, Clone, Copy)]
pub struct SaddleEstimate {
    pub value: C64,
    pub bound: f64,
    pub im_a: f64,
    pub saddle: SaddleData,
}

const CAUCHY_RADIUS: f64 = 0.4;
const CAUCHY_NODES: usize = 256;

/// Compares F(t_-) with its Cauchy integral over |t - 1/2| = 0.4; a mismatch
/// means F is not analytic in the disc. Returns the largest |F| on the circle.
fn cauchy_spot_check(f: &impl Fn(C64) -> C64, t0: C64) -> Result<f64> {
    let mut acc = r(0.0);
    let mut big: f64 = 0.0;
    for k in 0..CAUCHY_NODES {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / CAUCHY_NODES as f64);
        let t = 0.5 + CAUCHY_RADIUS * e;
        let v = f(t);
        big = big.max(v.norm());
        acc += v * CAUCHY_RADIUS * e / (t - t0);
    }
    let cauchy = acc / CAUCHY_NODES as f64;
    let direct = f(t0);
    if !((cauchy - direct).norm() <= 1e-8 * big.max(1e-300)) {
        return Err(Error::Domain(format!("F fails the Cauchy check at t_-: {direct} vs {cauchy}")));
    }
    Ok(big)
}

pub fn steepest_descent_eval(
    f: impl Fn(C64) -> C64,
    eta: C64,
    lambda: Pt,
    cfg: &AnnulusConfig,
) -> Result<SaddleEstimate> {
    if !cfg.in_omega_plus(eta) {
        return Err(Error::Domain(format!("eta = {eta} is outside Omega_+ for M = {}", cfg.m)));
    }
    let im_a = a_of_lambda(lambda)?.im;
    let sd = saddle_data(eta)?;
    let big = cauchy_spot_check(&f, sd.t_minus)?;
    let ft = f(sd.t_minus);
    if ft.norm() < 1e-12 * big {
        return Err(Error::Domain("F vanishes at the saddle t_-".into()));
    }
    let value = (-im_a * sd.s_at_saddle).exp() * ft * (2.0 * PI / (im_a * sd.s_second)).sqrt();
    Ok(SaddleEstimate { value, bound: cfg.m * cfg.m / im_a.abs(), im_a, saddle: sd })
}

/// Graded Gauss rule on (2^-45, 1/2], dyadic toward 0; 1 - t stays distinct from 1.
fn half_rule() -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(20, 0.0, 1.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in 1..=44 {
        let hi = 0.5f64.powi(k);
        let lo = hi / 2.0;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(lo + (hi - lo) * x);
            weights.push((hi - lo) * w);
        }
    }
    (nodes, weights)
}

/// Integral of g(t, 1 - t) over [0, 1]; both halves graded toward their endpoint
/// with 1 - t carried exactly.
fn unit_integral(g: impl Fn(C64, C64) -> C64) -> C64 {
    let (x, w) = half_rule();
    let mut sum = r(0.0);
    for (u, wu) in x.iter().zip(&w) {
        sum += g(r(*u), r(1.0 - u)) * *wu;
        sum += g(r(1.0 - u), r(*u)) * *wu;
    }
    sum
}

/// Exponent i S = ln t + ln(1-t) - ln(1 - t/eta) from t and 1 - t.
fn log_base(t: C64, one_minus_t: C64, eta: C64) -> C64 {
    t.ln() + one_minus_t.ln() - (r(1.0) - t / eta).ln()
}

/// Direct quadrature of the integral of F(t) e^{-Im a S_eta(t)} over [0, 1].
pub fn saddle_integral_quadrature(f: impl Fn(C64) -> C64, eta: C64, lambda: Pt) -> Result<C64> {
    let im_a = a_of_lambda(lambda)?.im;
    Ok(unit_integral(|t, u| f(t) * (-im_a * -I * log_base(t, u, eta)).exp()))
}

/// The integral of (t(1-t)/(1-t/eta))^a over [0, 1] by graded quadrature.
pub fn hinf_integral(eta: C64, a: C64) -> C64 {
    unit_integral(|t, u| (a * log_base(t, u, eta)).exp())
}

/// h(eta) = e^{i pi a} eta^{-a} Gamma(2a+2)/Gamma(a+1)^2 times the integral
/// above, valid for Re a > -1.
pub fn h_inf_from_integral(eta: C64, a: C64) -> Result<C64> {
    let pre = (I * PI * a).exp() * (-a * eta.ln()).exp() * gamma_ratio(&[2.0 * a + 2.0], &[a + 1.0, a + 1.0])?;
    Ok(pre * hinf_integral(eta, a))
}

/// A polyline from 0 through t_- to 1 along which Re[sign (S - S(t_-))] <= 0,
/// where sign = -sgn(Im a). Built from the gradient flow of Re(sign S) out of
/// the saddle, continued by straight segments into the endpoints.
#[derive(Debug, Clone)]
pub struct DescentPath {
    pub points: Vec<C64>,
    pub saddle_index: usize,
    pub sign: f64,
}

fn flow_branch(eta: C64, sign: f64, start: C64) -> Vec<C64> {
    let field = |t: C64| {
        let (d1, _) = s_phase_derivatives(t, eta);
        let g = (d1 * sign).conj();
        -g / g.norm()
    };
    let rk4 = |t: C64, h: f64| {
        let k1 = field(t);
        let k2 = field(t + k1 * (h / 2.0));
        let k3 = field(t + k2 * (h / 2.0));
        let k4 = field(t + k3 * h);
        t + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    };
    let mut pts = vec![start];
    let mut t = start;
    let mut h = 1e-3;
    while (t - 0.5).norm() < 0.45 && pts.len() < 20000 {
        let full = rk4(t, h);
        let half = rk4(rk4(t, h / 2.0), h / 2.0);
        let err = (full - half).norm();
        if err > 1e-10 && h > 1e-6 {
            h /= 2.0;
            continue;
        }
        t = half;
        pts.push(t);
        if err < 1e-12 {
            h = (h * 2.0).min(0.02);
        }
    }
    pts
}

fn segment_into(from: C64, to: C64, out: &mut Vec<C64>) {
    // graded toward `to`, where the integrand may be singular
    for k in 1..=50 {
        out.push(to + (from - to) * 0.5f64.powi(k));
    }
    out.push(to);
}

pub fn trace_descent_path(eta: C64, im_a: f64) -> Result<DescentPath> {
    if im_a == 0.0 {
        return Err(Error::Domain("descent path needs Im a != 0".into()));
    }
    let sign = -im_a.signum();
    let sd = saddle_data(eta)?;
    let t0 = sd.t_minus;
    // directions with sign S'' d^2 < 0
    let d = (-1.0 / (sign * sd.s_second)).sqrt();
    let d = d / d.norm();
    let (to_zero, to_one) = if d.re < 0.0 { (d, -d) } else { (-d, d) };
    let step = 1e-3;
    let mut left = flow_branch(eta, sign, t0 + to_zero * step);
    let right = flow_branch(eta, sign, t0 + to_one * step);
    let mut first = Vec::new();
    segment_into(*left.last().unwrap(), r(0.0), &mut first);
    first.reverse();
    left.reverse();
    let mut points = first;
    points.extend(left);
    let saddle_index = points.len();
    points.push(t0);
    points.extend(right.iter().copied());
    segment_into(*right.last().unwrap(), r(1.0), &mut points);
    Ok(DescentPath { points, saddle_index, sign })
}

impl DescentPath {
    /// max over the path (saddle excluded) of Re[sign (S - S(t_-))], skipping
    /// the endpoints where S is singular.
    pub fn max_excess(&self, eta: C64) -> Result<f64> {
        let s0 = s_phase(self.points[self.saddle_index], eta)?;
        let mut worst = f64::NEG_INFINITY;
        for (k, t) in self.points.iter().enumerate() {
            if k == self.saddle_index || *t == r(0.0) || *t == r(1.0) {
                continue;
            }
            worst = worst.max((self.sign * (s_phase(*t, eta)? - s0)).re);
        }
        Ok(worst)
    }

    /// Integral of h along the polyline, 8-point Gauss per segment.
    pub fn integrate(&self, h: impl Fn(C64) -> C64) -> C64 {
        let (x, w) = gauss_legendre(8, 0.0, 1.0);
        let mut sum = r(0.0);
        for p in self.points.windows(2) {
            let dt = p[1] - p[0];
            for (s, ws) in x.iter().zip(&w) {
                sum += h(p[0] + dt * *s) * dt * *ws;
            }
        }
        sum
    }
}

/// Entries of the pair at infinity [[h, s], [h', s']].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairEntry {
    H,
    HPrime,
    S,
    SPrime,
}

/// Sign of Im lambda, with real lambda taken from its shore.
fn lambda_sign(lambda: Pt) -> Result<f64> {
    let s = lambda.side();
    if s == 0.0 {
        return Err(Error::Domain(format!("lambda = {lambda} needs a half plane or shore")));
    }
    Ok(s)
}

/// sqrt of w, with negative reals taken from below.
fn sqrt_lower(w: C64) -> C64 {
    if w.im == 0.0 && w.re < 0.0 {
        C64::new(0.0, -(-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

/// Leading term of h, h', s or s' at eta = (z+1)/(2z) as lambda -> 0, for z in
/// the lower half of the annulus. The sign choice follows the half plane of lambda.
pub fn hyp_asymptotic(z: Pt, lambda: Pt, which: PairEntry, cfg: &AnnulusConfig) -> Result<C64> {
    let zz = z.z;
    if !cfg.in_omega_tilde_plus(zz) {
        return Err(Error::Domain(format!("z = {z} is outside the lower annulus for M = {}", cfg.m)));
    }
    let pm = lambda_sign(lambda)?;
    let a = a_of_lambda(lambda)?;
    let kappa = kappa_of_lambda(lambda)?;
    let g = g_lower(zz)?;
    let four_a = (a * 4f64.ln()).exp();
    let sq = (r(1.0) - zz * zz).sqrt();
    let q = (r(1.0) - zz * zz).powf(0.25);
    let s2z = sqrt_lower(2.0 * zz);
    let e = (pm * kappa * (0.5 - g)).exp();
    Ok(match which {
        PairEntry::H => I * four_a * s2z * q / (1.0 + sq) * e,
        PairEntry::HPrime => -pm * four_a * kappa * s2z.powi(3) * e / (PI * q * (1.0 + sq)),
        PairEntry::S => I / four_a * q * (1.0 + sq) / s2z.powi(3) / e,
        PairEntry::SPrime => pm / four_a * kappa * (1.0 + sq) / (PI * s2z * q) / e,
    })
}

/// g on the closed lower half plane; real points are taken from below.
fn g_lower(z: C64) -> Result<C64> {
    let p = if z.im == 0.0 { Pt { z, shore: Some(Shore::Minus) } } else { Pt::new(z) };
    g_of_z(p)
}

/// The factored leading form of the pair matrix at eta = (z+1)/(2z):
/// i (1-z^2)^{s3/4} diag(1, +-2 z kappa/(i pi)) (1 + i s2)
/// (sqrt(2z)/(1 + sqrt(1-z^2)))^{s3} diag(1, 1/(2z)) 4^{a s3} e^{+-kappa(1/2 - g) s3}.
pub fn gamma_hat_asymptotic(z: Pt, lambda: Pt, cfg: &AnnulusConfig) -> Result<Mat2> {
    let (left, right) = gamma_hat_factors(z, lambda, cfg)?;
    Ok(left * right)
}

/// The parts of the factored form to the left and right of the (1 + O) factor.
pub fn gamma_hat_factors(z: Pt, lambda: Pt, cfg: &AnnulusConfig) -> Result<(Mat2, Mat2)> {
    let zz = z.z;
    if !cfg.in_omega_tilde_plus(zz) {
        return Err(Error::Domain(format!("z = {z} is outside the lower annulus for M = {}", cfg.m)));
    }
    let pm = lambda_sign(lambda)?;
    let a = a_of_lambda(lambda)?;
    let kappa = kappa_of_lambda(lambda)?;
    let g = g_lower(zz)?;
    let q = (r(1.0) - zz * zz).powf(0.25);
    let sq = (r(1.0) - zz * zz).sqrt();
    let b = sqrt_lower(2.0 * zz) / (1.0 + sq);
    let left = Mat2::diag(q, 1.0 / q)
        * Mat2::diag(r(1.0), pm * 2.0 * zz * kappa / (I * PI))
        * (Mat2::identity() + Mat2::sigma2().scale(I))
        * Mat2::diag(b, 1.0 / b)
        * Mat2::diag(r(1.0), 1.0 / (2.0 * zz));
    let left = left.scale(I);
    let d = (a * 4f64.ln() + pm * kappa * (0.5 - g)).exp();
    Ok((left, Mat2::diag(d, 1.0 / d)))
}

/// Largest entrywise relative deviation of the principal pair matrix from the
/// factored form.
pub fn gamma_hat_deviation(z: Pt, lambda: Pt, cfg: &AnnulusConfig) -> Result<f64> {
    let approx = gamma_hat_asymptotic(z, lambda, cfg)?;
    let hat = principal_hat(z, lambda)?;
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((hat.get(i, j) / approx.get(i, j) - 1.0).norm());
        }
    }
    Ok(worst)
}

/// The middle factor L^{-1} Gamma-hat R^{-1} of the factored form. Its off-diagonal
/// entries carry the column scales, so its distance from 1 is O(|eta|^2 / kappa).
pub fn gamma_hat_middle(z: Pt, lambda: Pt, cfg: &AnnulusConfig) -> Result<Mat2> {
    let (left, right) = gamma_hat_factors(z, lambda, cfg)?;
    Ok(left.inv() * principal_hat(z, lambda)? * right.inv())
}

fn principal_hat(z: Pt, lambda: Pt) -> Result<Mat2> {
    let a = a_of_lambda(lambda)?;
    Ok(hyp_pair_at_infinity(a, Pt::new(eta_of_z(z.z)))?.matrix())
}

/// beta(z) = ((z^2 - 1)/z^2)^{1/4}, analytic off [-1, 1] with beta(inf) = 1.
pub fn beta(z: Pt) -> Result<C64> {
    let zz = z.z;
    if zz == r(0.0) || zz == r(1.0) || zz == r(-1.0) {
        return Err(Error::Domain(format!("model solution at singular point z = {zz}")));
    }
    let w = r(1.0) - r(1.0) / (zz * zz);
    if zz.im == 0.0 && zz.re.abs() < 1.0 {
        let s = z.shore.ok_or(Error::OnCut { at: format!("z = {z}") })?;
        return Ok(C64::from_polar(w.norm().powf(0.25), s.sign() * zz.re.signum() * PI / 4.0));
    }
    Ok(w.powf(0.25))
}

/// (1 + (1/z) [[x, -x], [y, -y]]) beta^{sigma_1}.
pub fn model_psi(z: Pt, x: C64, y: C64) -> Result<Mat2> {
    let b = beta(z)?;
    let (p, m) = ((b + 1.0 / b) / 2.0, (b - 1.0 / b) / 2.0);
    let bs = Mat2::new(p, m, m, p);
    let a = Mat2::new(x, -x, y, -y).scale(1.0 / z.z);
    Ok((Mat2::identity() + a) * bs)
}

/// The model solution with x = y = i/2.
pub fn phi_matrix(z: Pt) -> Result<Mat2> {
    model_psi(z, I / 2.0, I / 2.0)
}

/// Entry form of Phi with principal sqrt(z) and (z^2 - 1)^{1/4}; agrees with
/// `phi_matrix` where those branches are continuous, e.g. Re z > 0 off the axis.
pub fn phi_entries(z: C64) -> Mat2 {
    let s = (z * z - 1.0).sqrt();
    let pre = r(1.0) / (2.0 * z.sqrt() * (z * z - 1.0).powf(0.25));
    Mat2::new(I + z + s, -I - z + s, I - z + s, -I + z + s).scale(pre)
}

/// Phi when Im kappa <= 0 (Im lambda >= 0), sigma_1 Phi sigma_1 otherwise.
pub fn psi0(z: Pt, lambda: Pt) -> Result<Mat2> {
    let phi = phi_matrix(z)?;
    if lambda_sign(lambda)? > 0.0 {
        Ok(phi)
    } else {
        Ok(Mat2::sigma1() * phi * Mat2::sigma1())
    }
}

/// Which endpoint a local coordinate is centred at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    MinusOne,
    PlusOne,
}

/// xi_{-1} with -4 sqrt(xi) = kappa (2g - 1), or xi_1 with 4 sqrt(xi) = kappa (2g + 1),
/// for z in the disc of radius `cfg.disc_radius` around the matching endpoint.
pub fn local_coordinate(z: Pt, kappa: C64, cfg: &AnnulusConfig) -> Result<(Endpoint, C64)> {
    let zz = z.z;
    let (end, c) = if (zz + 1.0).norm() < cfg.disc_radius {
        (Endpoint::MinusOne, -1.0)
    } else if (zz - 1.0).norm() < cfg.disc_radius {
        (Endpoint::PlusOne, 1.0)
    } else {
        return Err(Error::Domain(format!("z = {zz} is outside the discs around -1 and 1")));
    };
    if zz == r(c) {
        return Ok((end, r(0.0)));
    }
    // xi is the same from either shore, so untagged points on the cut use the upper one
    let p = if zz.im == 0.0 && zz.re.abs() < 1.0 && z.shore.is_none() { Pt::plus(zz.re) } else { z };
    let g = g_of_z(p)?;
    let v = kappa * (2.0 * g + c) / 4.0;
    Ok((end, v * v))
}

/// Position of z relative to the lenses: the lens around (-1, 0) or (0, 1)
/// (a rhombus with half-angle theta at its vertices, shores included), or outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Outside,
    Lens { side: Side, half: Shore },
}

pub fn region_of(z: Pt, cfg: &AnnulusConfig) -> Region {
    let zz = z.z;
    let (side, lo) = if zz.re > -1.0 && zz.re < 0.0 {
        (Side::L, -1.0)
    } else if zz.re > 0.0 && zz.re < 1.0 {
        (Side::R, 0.0)
    } else {
        return Region::Outside;
    };
    let reach = cfg.theta.tan() * (zz.re - lo).min(lo + 1.0 - zz.re);
    if zz.im.abs() > reach {
        return Region::Outside;
    }
    let half = if zz.im > 0.0 {
        Shore::Plus
    } else if zz.im < 0.0 {
        Shore::Minus
    } else {
        match z.shore {
            Some(s) => s,
            None => return Region::Outside,
        }
    };
    Region::Lens { side, half }
}

/// T with Gamma = Z T e^{-kappa g sigma_3}: [[1, 0], [+-i e^{kappa(2g-1)}, 1]] in the
/// left lens and [[1, -+i e^{-kappa(2g+1)}], [0, 1]] in the right one, the sign by
/// the half plane of z.
pub fn lens_factor(region: Region, kappa: C64, g: C64) -> Mat2 {
    match region {
        Region::Outside => Mat2::identity(),
        Region::Lens { side: Side::L, half } => Mat2::lower(half.sign() * I * (kappa * (2.0 * g - 1.0)).exp()),
        Region::Lens { side: Side::R, half } => Mat2::upper(-half.sign() * I * (-kappa * (2.0 * g + 1.0)).exp()),
    }
}

/// Leading-order form Psi_0 T e^{-kappa g sigma_3} of Gamma(z; lambda) and its parts.
#[derive(Debug, Clone, Copy)]
pub struct GammaAsymptotic {
    pub value: Mat2,
    pub psi0: Mat2,
    pub correction: Mat2,
    pub region: Region,
    pub in_annulus: bool,
    pub kappa: C64,
    pub g: C64,
}

fn guard_endpoints(z: Pt, cfg: &AnnulusConfig) -> Result<()> {
    let zz = z.z;
    for e in [-1.0, 1.0] {
        if (zz - e).norm() < cfg.disc_radius {
            return Err(Error::NearEndpoint { at: format!("{z}"), guard: cfg.disc_radius });
        }
    }
    if zz.norm() < cfg.zero_disc_radius && !cfg.in_omega_tilde(zz) {
        return Err(Error::NearEndpoint { at: format!("{z}"), guard: cfg.zero_disc_radius });
    }
    Ok(())
}

pub fn gamma_asymptotic(z: Pt, lambda: Pt, geom: Geometry, cfg: &AnnulusConfig) -> Result<GammaAsymptotic> {
    geom.require_symmetric()?;
    guard_endpoints(z, cfg)?;
    let kappa = kappa_of_lambda(lambda)?;
    let g = g_of_z(z)?;
    let psi = psi0(z, lambda)?;
    let region = region_of(z, cfg);
    let t = lens_factor(region, kappa, g);
    let e = Mat2::diag((-kappa * g).exp(), (kappa * g).exp());
    Ok(GammaAsymptotic {
        value: psi * t * e,
        psi0: psi,
        correction: t,
        region,
        in_annulus: cfg.in_omega_tilde(z.z),
        kappa,
        g,
    })
}

/// Y = Gamma e^{kappa g sigma_3}.
pub fn y_matrix(gamma: &Mat2, kappa: C64, g: C64) -> Mat2 {
    *gamma * Mat2::diag((kappa * g).exp(), (-kappa * g).exp())
}

/// Z = Y inside the lenses multiplied by the inverse lens factor.
pub fn z_matrix(gamma: &Mat2, kappa: C64, g: C64, region: Region) -> Mat2 {
    y_matrix(gamma, kappa, g) * lens_factor(region, kappa, g).inv()
}

/// || Psi_0^{-1} Gamma e^{kappa g sigma_3} T^{-1} - 1 ||, the size of the O(M^2/kappa)
/// factor for a computed Gamma.
pub fn relative_deviation(gamma: &Mat2, approx: &GammaAsymptotic) -> f64 {
    let z = z_matrix(gamma, approx.kappa, approx.g, approx.region);
    (approx.psi0.inv() * z - Mat2::identity()).norm()
}

/// Convenience: Gamma from the closed-form solver and its deviation from the
/// leading-order form.
pub fn gamma_deviation(z: Pt, lambda: Pt, cfg: &AnnulusConfig) -> Result<f64> {
    let geom = Geometry::symmetric();
    let approx = gamma_asymptotic(z, lambda, geom, cfg)?;
    let gamma = GammaSolver::new(lambda, geom)?.eval(z)?;
    Ok(relative_deviation(&gamma, &approx))
}

/// Pieces of the contour carrying the jumps of the error matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourPiece {
    DiscZero,
    DiscMinusOne,
    DiscPlusOne,
    LensLeft,
    LensRight,
}

#[derive(Debug, Clone, Copy)]
pub struct JumpDeviation {
    pub piece: ContourPiece,
    /// || J - 1 || for the jump J of the error matrix at the point.
    pub deviation: f64,
    /// |xi|^{-1/2} on the discs around -1 and 1, the size of the Bessel
    /// parametrix correction that the diagnostic does not construct.
    pub local_size: Option<f64>,
}

const ON_CONTOUR: f64 = 1e-9;

pub fn contour_piece(z: C64, cfg: &AnnulusConfig) -> Result<ContourPiece> {
    let on = |c: f64, rad: f64| ((z - c).norm() - rad).abs() < ON_CONTOUR;
    if on(0.0, cfg.zero_disc_radius) {
        return Ok(ContourPiece::DiscZero);
    }
    if on(-1.0, cfg.disc_radius) {
        return Ok(ContourPiece::DiscMinusOne);
    }
    if on(1.0, cfg.disc_radius) {
        return Ok(ContourPiece::DiscPlusOne);
    }
    let outside_discs = (z + 1.0).norm() > cfg.disc_radius
        && (z - 1.0).norm() > cfg.disc_radius
        && z.norm() > cfg.zero_disc_radius;
    let edge = |lo: f64| {
        let reach = cfg.theta.tan() * (z.re - lo).min(lo + 1.0 - z.re);
        z.re > lo && z.re < lo + 1.0 && z.im != 0.0 && (z.im.abs() - reach).abs() < ON_CONTOUR
    };
    if outside_discs && edge(-1.0) {
        return Ok(ContourPiece::LensLeft);
    }
    if outside_discs && edge(0.0) {
        return Ok(ContourPiece::LensRight);
    }
    Err(Error::Domain(format!("z = {z} is not on the jump contour")))
}

/// Deviation from the identity of the jump of the error matrix at z. On the disc
/// boundaries this is || Z Psi_0^{-1} - 1 || with Z from the closed-form Gamma;
/// on the lens edges it is the explicit rank-one jump.
pub fn error_matrix_diagnostic(z: C64, lambda: Pt, cfg: &AnnulusConfig) -> Result<JumpDeviation> {
    let piece = contour_piece(z, cfg)?;
    let p = Pt::new(z);
    let kappa = kappa_of_lambda(lambda)?;
    let psi = psi0(p, lambda)?;
    let g = g_of_z(p)?;
    let rank_one = |m: Mat2| (psi * m * psi.inv()).norm();
    let (deviation, local_size) = match piece {
        ContourPiece::LensLeft => (rank_one(Mat2::new(r(0.0), r(0.0), I * (kappa * (2.0 * g - 1.0)).exp(), r(0.0))), None),
        ContourPiece::LensRight => (rank_one(Mat2::new(r(0.0), -I * (-kappa * (2.0 * g + 1.0)).exp(), r(0.0), r(0.0))), None),
        _ => {
            let gamma = GammaSolver::new(lambda, Geometry::symmetric())?.eval(p)?;
            let zm = z_matrix(&gamma, kappa, g, region_of(p, cfg));
            let dev = (zm * psi.inv() - Mat2::identity()).norm();
            let size = match piece {
                ContourPiece::DiscZero => None,
                _ => Some(1.0 / local_coordinate(p, kappa, &AnnulusConfig { disc_radius: cfg.disc_radius * 1.5, ..*cfg })?.1.norm().sqrt()),
            };
            (dev, size)
        }
    };
    Ok(JumpDeviation { piece, deviation, local_size })
}

/// F(zeta) = (2 pi)^{-sigma_3/2} zeta^{-sigma_3/4} (1/sqrt 2) [[1, -i], [-i, 1]], the
/// large-zeta form of the Bessel model solution.
pub fn bessel_normalization(zeta: C64) -> Mat2 {
    let d = (2.0 * PI).powf(-0.5) * zeta.powf(-0.25);
    Mat2::diag(d, 1.0 / d) * Mat2::new(r(1.0), -I, -I, r(1.0)).scale(r(std::f64::consts::FRAC_1_SQRT_2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn saddle_at_ten() {
        let sd = saddle_data(r(10.0)).unwrap();
        assert!((sd.t_minus - r(10.0 - 90f64.sqrt())).norm() < 1e-14);
        let (d1, _) = s_phase_derivatives(sd.t_minus, r(10.0));
        assert!(d1.norm() < 1e-12);
        // Newton from 1/2 lands on the same root
        let mut t = r(0.5);
        for _ in 0..50 {
            let (d1, d2) = s_phase_derivatives(t, r(10.0));
            t -= d1 / d2;
        }
        assert!((t - sd.t_minus).norm() < 1e-13);
    }

    #[test]
    fn phase_at_the_saddle() {
        let eta = c(5.0, 2.0);
        let sd = saddle_data(eta).unwrap();
        assert!((sd.s_at_saddle - (-2.0 * I * sd.t_minus.ln())).norm() < 1e-13);
        let want = 2.0 * I / (sd.t_minus * (1.0 - sd.t_minus));
        assert!((sd.s_second - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn saddles_multiply_to_eta() {
        let eta = c(7.0, -3.0);
        let sd = saddle_data(eta).unwrap();
        assert!((sd.t_plus * sd.t_minus - eta).norm() < 1e-12 * eta.norm());
        assert!((sd.t_plus + sd.t_minus - 2.0 * eta).norm() < 1e-12 * eta.norm());
    }

    #[test]
    fn phase_cuts_are_rejected() {
        let eta = c(20.0, 5.0);
        assert!(s_phase(r(-0.5), eta).is_err());
        assert!(s_phase(r(1.5), eta).is_err());
        assert!(s_phase(eta * 1.5, eta).is_err());
        assert!(s_phase(c(0.3, 0.1), eta).is_ok());
        assert!(saddle_data(r(0.5)).is_err());
    }

    #[test]
    fn config_sweep() {
        assert!(max_saddle_angle(DEFAULT_M) < PI / 8.0);
        assert!(AnnulusConfig::new(DEFAULT_M).is_ok());
        assert!(AnnulusConfig::new(1.0).is_err());
        let cfg = AnnulusConfig::default();
        assert!(cfg.in_omega_tilde(C64::from_polar(cfg.zero_disc_radius, 1.0)));
    }

    #[test]
    fn annulus_maps_consistently() {
        let cfg = AnnulusConfig::default();
        for eta in [c(25.0, 3.0), c(-30.0, 1.0), c(0.0, 39.0)] {
            let z = z_of_eta(eta);
            assert!((eta_of_z(z) - eta).norm() < 1e-12 * eta.norm());
            assert!(cfg.in_omega_tilde_plus(z));
            assert!(z.im <= 0.0);
        }
        assert!(!cfg.in_omega_tilde(r(0.5)));
    }

    #[test]
    fn model_jumps() {
        let (x, y) = (I / 2.0, I / 2.0);
        let jl = Mat2::sigma1().scale(-I);
        let jr = Mat2::sigma1().scale(I);
        for (p, j) in [(-0.5, jl), (0.5, jr)] {
            let up = model_psi(Pt::plus(p), x, y).unwrap();
            let dn = model_psi(Pt::minus(p), x, y).unwrap();
            assert!((up - dn * j).norm() < 1e-10);
        }
    }

    #[test]
    fn model_normalization_and_det() {
        let big = phi_matrix(Pt::real(1e6)).unwrap();
        assert!((big - Mat2::identity()).max_abs() < 1e-6);
        let d1 = (phi_matrix(Pt::real(1e3)).unwrap() - Mat2::identity()).norm();
        let d2 = (phi_matrix(Pt::real(2e3)).unwrap() - Mat2::identity()).norm();
        assert!((d1 / d2 - 2.0).abs() < 1e-2);
        let z = Pt::new(c(2.0, 1.0));
        assert!((phi_matrix(z).unwrap().det() - 1.0).norm() < 1e-14);
        let other = model_psi(z, c(0.1, 0.3), c(-0.2, 0.4)).unwrap();
        assert!((other.det() - 1.0).norm() > 1e-3);
    }

    #[test]
    fn phi_forms_agree() {
        for z in [c(2.0, 1.0), c(0.3, 0.2), c(0.5, -0.7)] {
            let d = (phi_entries(z) - phi_matrix(Pt::new(z)).unwrap()).norm();
            assert!(d < 1e-13, "{z}: {d:e}");
        }
    }

    #[test]
    fn psi0_picks_by_half_plane() {
        let z = Pt::new(c(0.4, -0.3));
        let phi = phi_matrix(z).unwrap();
        assert_eq!(psi0(z, Pt::plus(1e-4)).unwrap(), phi);
        let flipped = Mat2::sigma1() * phi * Mat2::sigma1();
        assert_eq!(psi0(z, Pt::new(c(1e-4, -1e-4))).unwrap(), flipped);
        assert!(psi0(z, Pt::real(0.7)).is_err());
    }

    #[test]
    fn local_coordinates_vanish_at_endpoints() {
        let cfg = AnnulusConfig::default();
        let k = r(9.0);
        for (e, dir) in [(-1.0, 1.0), (1.0, -1.0)] {
            let mut last = f64::INFINITY;
            for j in 2..8 {
                let z = Pt::new(r(e) + C64::from_polar(10f64.powi(-j), 0.7 * dir));
                let xi = local_coordinate(z, k, &cfg).unwrap().1.norm();
                assert!(xi < last);
                last = xi;
            }
            assert!(last < 1e-5, "{last:e}");
        }
        assert!(local_coordinate(Pt::real(0.0), k, &cfg).is_err());
    }

    #[test]
    fn regions() {
        let cfg = AnnulusConfig::default();
        assert_eq!(region_of(Pt::plus(0.5), &cfg), Region::Lens { side: Side::R, half: Shore::Plus });
        assert_eq!(region_of(Pt::new(c(-0.5, -0.1)), &cfg), Region::Lens { side: Side::L, half: Shore::Minus });
        assert_eq!(region_of(Pt::new(c(-0.5, 0.4)), &cfg), Region::Outside);
        assert_eq!(region_of(Pt::real(2.0), &cfg), Region::Outside);
        let z = C64::from_polar(0.018, PI - 0.2);
        assert!(matches!(region_of(Pt::new(z), &cfg), Region::Lens { side: Side::L, .. }));
    }
}
