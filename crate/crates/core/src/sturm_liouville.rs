//! The commuting differential operator L f = (P f')' + 2 (x - (b_R + b_L)/4)^2 f,
//! its explicit solutions f_R, f_L, the bases phi_j / theta_j, Weyl functions,
//! spectral densities rho_j' and the transforms U_1, U_2.
//!
//! Index 1 belongs to [b_L, 0] and index 2 to [0, b_R]; in code they are
//! `Side::L` and `Side::R`.

use crate::complexfn::gamma::{digamma, gamma_ratio};
use crate::complexfn::hyp2f1::{gauss_2f1_d, HypParams};
use crate::diagonalization::{
    mu_rate, side_interval, spatial_rule, spectral_rule, SingularPair, SpectralTransform,
};
use crate::error::{Error, Result};
use crate::quadrature::{fht_apply, pairwise_sum, pairwise_sum_c, GridFunction, Rule};
use crate::spectral::{mobius, Geometry, Mobius};
use crate::types::{r, Pt, Side, C64, I};
use rayon::prelude::*;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Above this value of M4^2 the hypergeometric factor is summed around z = 1.
const LOG_SERIES_FROM: f64 = 0.6;
/// theta_j is not evaluated closer than this to its outer endpoint.
pub const THETA_GUARD: f64 = 1e-4;

/// P(x) = x^2 (x - b_L)(x - b_R) and its first two derivatives.
pub fn p_coefficient(x: f64, g: &Geometry) -> (f64, f64, f64) {
    let s = g.bl + g.br;
    let q = g.bl * g.br;
    let p = x * x * (x * x - s * x + q);
    let dp = 4.0 * x.powi(3) - 3.0 * s * x * x + 2.0 * q * x;
    let d2p = 12.0 * x * x - 6.0 * s * x + 2.0 * q;
    (p, dp, d2p)
}

fn potential(x: f64, g: &Geometry) -> f64 {
    let t = x - (g.bl + g.br) / 4.0;
    2.0 * t * t
}

fn interior(x: f64, g: &Geometry) -> bool {
    (x > g.bl && x < 0.0) || (x > 0.0 && x < g.br)
}

/// First and second derivative by central differences, Richardson-extrapolated
/// over h, h/2, h/4. The step follows the distance to the nearest zero of P.
fn derivatives(f: &impl Fn(f64) -> C64, x: f64, g: &Geometry) -> (C64, C64) {
    let dist = [g.bl, 0.0, g.br].iter().map(|b| (x - b).abs()).fold(f64::INFINITY, f64::min);
    let h0 = 0.05 * dist.min(1.0);
    let f0 = f(x);
    let level = |h: f64| {
        let (fp, fm) = (f(x + h), f(x - h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    };
    let rows: Vec<(C64, C64)> = [h0, h0 / 2.0, h0 / 4.0].iter().map(|h| level(*h)).collect();
    let rich = |a: C64, b: C64, order: i32| {
        let k = 2f64.powi(order);
        (k * b - a) / (k - 1.0)
    };
    let d1 = rich(rich(rows[0].0, rows[1].0, 2), rich(rows[1].0, rows[2].0, 2), 4);
    let d2 = rich(rich(rows[0].1, rows[1].1, 2), rich(rows[1].1, rows[2].1, 2), 4);
    (d1, d2)
}

/// L f at an interior point, with P differentiated exactly and f by finite
/// differences.
pub fn l_apply(f: impl Fn(f64) -> C64, x: f64, g: &Geometry) -> Result<C64> {
    if !interior(x, g) {
        return Err(Error::Domain(format!("L is singular at {x}: P vanishes at b_L, 0, b_R")));
    }
    let (p, dp, _) = p_coefficient(x, g);
    let (d1, d2) = derivatives(&f, x, g);
    Ok(p * d2 + dp * d1 + potential(x, g) * f(x))
}

/// mu(omega) on the continuous spectrum, rejecting the threshold itself.
pub fn mu_on_spectrum(omega: f64, g: &Geometry) -> Result<f64> {
    let m2 = (omega - (g.bl + g.br).powi(2) / 8.0) / (-g.bl * g.br) - 0.25;
    if !(m2 > 0.0) {
        return Err(Error::Domain(format!(
            "omega = {omega} is not above the threshold {}",
            g.omega_threshold()
        )));
    }
    Ok(m2.sqrt())
}

/// mu for a complex omega, on the branch continuous from mu > 0 through Im omega > 0.
pub fn mu_complex(omega: C64, g: &Geometry) -> C64 {
    let m2 = (omega - (g.bl + g.br).powi(2) / 8.0) / (-g.bl * g.br) - 0.25;
    let m = m2.sqrt();
    if m.re < 0.0 {
        -m
    } else {
        m
    }
}

/// mu = arccosh(1/|lambda|)/pi from lambda^2, accurate at both ends of (0, 1).
pub fn mu_of_lambda_sq(lambda_sq: f64) -> f64 {
    let lam = lambda_sq.sqrt();
    let gap = 1.0 - lambda_sq;
    ((gap / (1.0 + lam) + gap.sqrt()) / lam).ln_1p() / PI
}

pub fn omega_of_mu(mu: f64, g: &Geometry) -> f64 {
    (g.bl + g.br).powi(2) / 8.0 - g.bl * g.br * (mu * mu + 0.25)
}

/// Normalizing constants k and l_1, l_2 for a (possibly complex) mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlConstants {
    pub mu: C64,
    pub k: C64,
    pub l1: C64,
    pub l2: C64,
}

pub fn sl_constants(mu: C64, g: &Geometry) -> Result<SlConstants> {
    let im = I * mu;
    let k = gamma_ratio(&[-im], &[0.25 - im / 2.0, 0.75 - im / 2.0])?;
    let common = 2.0 * EULER_GAMMA + 2.0 * digamma(0.5 - im)?;
    let w = g.width();
    let l1 = k / (g.bl * g.bl * w) * (common + (-g.br / (g.bl * w)).ln());
    let l2 = k / (g.br * g.br * w) * (common + (-g.bl / (g.br * w)).ln());
    Ok(SlConstants { mu, k, l1, l2 })
}

/// 2F1(a, b; a + b; z) = reg - log_part * ln(1 - z), with the derivatives of
/// both parts in u = 1 - z. Summed in powers of 1 - z.
#[derive(Debug, Clone, Copy)]
struct LogSplit {
    reg: C64,
    log_part: C64,
    d_reg: C64,
    d_log: C64,
}

fn log_series(a: C64, b: C64, u: f64) -> Result<LogSplit> {
    let pre = gamma_ratio(&[a + b], &[a, b])?;
    let mut coef = r(1.0);
    let mut psi = 2.0 * digamma(r(1.0))? - digamma(a)? - digamma(b)?;
    let mut out = LogSplit { reg: r(0.0), log_part: r(0.0), d_reg: r(0.0), d_log: r(0.0) };
    let mut upow = 1.0;
    for n in 0..2000 {
        let nf = n as f64;
        let t = coef * upow;
        out.reg += t * psi;
        out.log_part += t;
        if n > 0 {
            let tp = coef * nf * u.powi(n - 1);
            out.d_reg += tp * psi;
            out.d_log += tp;
        }
        if n > 4 && t.norm() * (1.0 + psi.norm()) < 1e-17 * out.reg.norm().max(out.log_part.norm()) {
            return Ok(LogSplit {
                reg: pre * out.reg,
                log_part: pre * out.log_part,
                d_reg: pre * out.d_reg,
                d_log: pre * out.d_log,
            });
        }
        coef *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        psi += 2.0 / (nf + 1.0) - 1.0 / (a + nf) - 1.0 / (b + nf);
        upow *= u;
    }
    Err(Error::NoConvergence { terms: 2000 })
}

/// f_j(x, omega) and d/dx f_j, split as value = reg - log_part * ln(1 - M4^2).
/// Away from the outer endpoint the log part is zero.
#[derive(Debug, Clone, Copy)]
pub struct SolutionParts {
    pub reg: C64,
    pub log_part: C64,
    pub d_reg: C64,
    pub d_log: C64,
    /// ln(1 - M4^2), or -inf at the outer endpoint.
    pub log_u: f64,
    /// d/dx ln(1 - M4^2).
    pub d_log_u: f64,
}

impl SolutionParts {
    pub fn value(&self) -> C64 {
        if self.log_part == r(0.0) {
            self.reg
        } else {
            self.reg - self.log_part * self.log_u
        }
    }

    pub fn derivative(&self) -> C64 {
        if self.log_part == r(0.0) && self.d_log == r(0.0) {
            self.d_reg
        } else {
            self.d_reg - self.d_log * self.log_u - self.log_part * self.d_log_u
        }
    }
}

/// f_R for x in (0, b_R] (side R) or f_L for x in [b_L, 0) (side L), for any
/// complex mu with 1 + i mu off the poles.
pub fn solution(x: f64, mu: C64, side: Side, g: &Geometry) -> Result<SolutionParts> {
    let (lo, hi) = side_interval(side, g);
    let inside = match side {
        Side::R => x > lo && x <= hi,
        Side::L => x >= lo && x < hi,
    };
    if !inside {
        return Err(Error::Domain(format!("x = {x} outside the {side:?} subinterval without 0")));
    }
    let (bl, br) = (g.bl, g.br);
    let w = g.width();
    let s = bl + br;
    let den = x * s - 2.0 * br * bl;
    let m = mobius(Mobius::M4, r(x), g)?.re;
    let dm = -2.0 * br * bl * w / (den * den);
    // signed prefactor and the base of the power, both positive on their side
    let (pre, dpre, base, dbase) = match side {
        Side::R => (br * w / den, -br * w * s / (den * den), m, dm),
        Side::L => (-bl * w / den, bl * w * s / (den * den), -m, -dm),
    };
    let p = r(-0.5) + I * mu;
    let (a, b) = (0.25 + I * mu / 2.0, 0.75 + I * mu / 2.0);
    let z = m * m;
    let dz = 2.0 * m * dm;
    let power = (p * base.ln()).exp();
    let dpower = power * p * (dbase / base);
    let outer = pre * power;
    let d_outer = dpre * power + pre * dpower;
    if z < LOG_SERIES_FROM {
        let (f, df) = gauss_2f1_d(HypParams::new(a, b, r(1.0) + I * mu), Pt::real(z))?;
        return Ok(SolutionParts {
            reg: outer * f,
            log_part: r(0.0),
            d_reg: d_outer * f + outer * df * dz,
            d_log: r(0.0),
            log_u: 0.0,
            d_log_u: 0.0,
        });
    }
    let u = 1.0 - z;
    let split = log_series(a, b, u)?;
    // d/dx of a function of u is -dz times its u-derivative
    Ok(SolutionParts {
        reg: outer * split.reg,
        log_part: outer * split.log_part,
        d_reg: d_outer * split.reg - outer * split.d_reg * dz,
        d_log: d_outer * split.log_part - outer * split.d_log * dz,
        log_u: if u > 0.0 { u.ln() } else { f64::NEG_INFINITY },
        d_log_u: -dz / u,
    })
}

/// Values of the basis at one (x, omega).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlBasis {
    pub x: f64,
    pub omega: f64,
    pub side: Side,
    /// f_j(x, omega).
    pub f: C64,
    pub phi: f64,
    pub dphi: f64,
    /// theta_j and its derivative; None within THETA_GUARD of the outer endpoint.
    pub theta: Option<(f64, f64)>,
    pub constants: SlConstants,
}

fn l_of(side: Side, c: &SlConstants) -> C64 {
    match side {
        Side::L => c.l1,
        Side::R => c.l2,
    }
}

/// 2 Re[c f] and its derivative; at the outer endpoint the log term of
/// phi has a vanishing coefficient and is dropped.
fn real_combination(c: C64, parts: &SolutionParts) -> Result<(f64, f64)> {
    if parts.log_u.is_finite() {
        return Ok(((2.0 * c * parts.value()).re, (2.0 * c * parts.derivative()).re));
    }
    let coefficient = (c * parts.log_part).re;
    if coefficient.abs() > 1e-10 * (c * parts.reg).norm() {
        return Err(Error::Domain("logarithmic divergence at the outer endpoint".into()));
    }
    Ok(((2.0 * c * parts.reg).re, f64::NAN))
}

pub fn sl_basis(x: f64, omega: f64, side: Side, g: &Geometry) -> Result<SlBasis> {
    let mu = mu_on_spectrum(omega, g)?;
    let constants = sl_constants(r(mu), g)?;
    let parts = solution(x, r(mu), side, g)?;
    let (phi, dphi) = real_combination(constants.k, &parts)?;
    let outer = match side {
        Side::L => g.bl,
        Side::R => g.br,
    };
    let theta = if (x - outer).abs() < THETA_GUARD * outer.abs() {
        None
    } else {
        Some(real_combination(l_of(side, &constants), &parts)?)
    };
    Ok(SlBasis { x, omega, side, f: parts.value(), phi, dphi, theta, constants })
}

/// phi_j as a complex-valued sampler, for use with `l_apply`.
pub fn phi_sampler(omega: f64, side: Side, g: Geometry) -> impl Fn(f64) -> C64 {
    move |x| sl_basis(x, omega, side, &g).map(|b| r(b.phi)).unwrap_or(r(f64::NAN))
}

/// P(x) W_x(theta_j, phi_j), signed so that it equals 1 on both sides.
pub fn wronskian_product(x: f64, omega: f64, omega_phi: f64, side: Side, g: &Geometry) -> Result<f64> {
    let t = sl_basis(x, omega, side, g)?;
    let p = sl_basis(x, omega_phi, side, g)?;
    let (theta, dtheta) = t.theta.ok_or(Error::NearEndpoint { at: format!("x = {x}"), guard: THETA_GUARD })?;
    let sign = match side {
        Side::R => 1.0,
        Side::L => -1.0,
    };
    Ok(sign * p_coefficient(x, g).0 * (theta * p.dphi - dtheta * p.phi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylData {
    pub omega: C64,
    pub m1: C64,
    pub m2: C64,
    /// Closed-form densities tanh(mu pi) / (b_j^2 (b_R - b_L)); zero off the real axis.
    pub rho1_prime: f64,
    pub rho2_prime: f64,
}

/// m_j = -l_j / k, for real omega above the threshold or any omega with Im omega > 0.
pub fn weyl_data(omega: C64, g: &Geometry) -> Result<WeylData> {
    let mu = if omega.im == 0.0 { r(mu_on_spectrum(omega.re, g)?) } else { mu_complex(omega, g) };
    if omega.im < 0.0 {
        return Err(Error::Domain("Weyl functions are taken from Im omega >= 0".into()));
    }
    let c = sl_constants(mu, g)?;
    let (rho1_prime, rho2_prime) =
        if omega.im == 0.0 { (rho_prime(mu.re, Side::L, g), rho_prime(mu.re, Side::R, g)) } else { (0.0, 0.0) };
    Ok(WeylData { omega, m1: -c.l1 / c.k, m2: -c.l2 / c.k, rho1_prime, rho2_prime })
}

pub fn rho_prime(mu: f64, side: Side, g: &Geometry) -> f64 {
    let b = match side {
        Side::L => g.bl,
        Side::R => g.br,
    };
    (mu * PI).tanh() / (b * b * g.width())
}

/// The multiplier realized by U_2 H_L U_1^*, (b_R / b_L) sech(mu pi). It follows
/// from H_L[phi_1] = (b_L / b_R) sech(mu pi) phi_2, which holds pointwise for the
/// phi_j above and H_L[f](y) = (1/pi) int f(x)/(x - y) dx.
pub fn hl_multiplier(mu: f64, g: &Geometry) -> f64 {
    (g.br / g.bl) / (mu * PI).cosh()
}

/// -(b_R / b_L) sech(mu pi): the same modulus with the opposite sign.
pub fn hl_multiplier_flipped(mu: f64, g: &Geometry) -> f64 {
    -hl_multiplier(mu, g)
}

/// U_1 H_R U_2^* = -(b_L / b_R) sech(mu pi), the adjoint of `hl_multiplier`
/// with H_L^* = -H_R.
pub fn hr_multiplier(mu: f64, g: &Geometry) -> f64 {
    -(g.bl / g.br) / (mu * PI).cosh()
}

/// c(omega) = -b_L sqrt(pi) |lambda| D_R(inf; lambda) with |lambda| = sech(mu pi).
/// With the sign of phi_L used by `TransformKernel`, U_1[f] = -c U_L[f].
pub fn change_of_variable(lambda_sq: f64, g: Geometry) -> Result<C64> {
    let lam = lambda_sq.sqrt();
    let pair = SingularPair::new(-lam / 2.0, g)?;
    Ok(-g.bl * PI.sqrt() * lam * pair.at_infinity()?.1)
}

/// Which of U_1, U_2 or their adjoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    U1,
    U2,
    U1Star,
    U2Star,
}

/// U_j and U_j^* discretized on the spatial rule of the side and on spectral
/// nodes in lambda^2 = sech^2(mu pi), with d rho_j = rho_j' |d omega / d lambda^2| d lambda^2.
#[derive(Debug, Clone)]
pub struct OdeTransform {
    pub side: Side,
    pub geom: Geometry,
    pub spatial: Rule,
    /// Nodes in lambda^2.
    pub spectral: Rule,
    pub omega: Vec<f64>,
    pub mu: Vec<f64>,
    /// rho_j'(omega_k) |d omega / d lambda^2| at each node.
    pub rho_weight: Vec<f64>,
    /// phi_j(x_i, omega_k), indexed [k][i].
    pub phi: Vec<Vec<f64>>,
}

impl OdeTransform {
    pub fn new(side: Side, geom: Geometry, spectral_nodes: usize) -> Result<Self> {
        Self::on_rules(side, geom, spatial_rule(side, &geom), spectral_rule(spectral_nodes))
    }

    pub fn on_rules(side: Side, geom: Geometry, spatial: Rule, spectral: Rule) -> Result<Self> {
        let scale = -geom.bl * geom.br;
        let rows = spectral
            .nodes
            .par_iter()
            .map(|l2| {
                let mu = mu_of_lambda_sq(*l2);
                let c = sl_constants(r(mu), &geom)?;
                let row = spatial
                    .nodes
                    .iter()
                    .map(|x| Ok((2.0 * c.k * solution(*x, r(mu), side, &geom)?.value()).re))
                    .collect::<Result<Vec<f64>>>()?;
                let weight = rho_prime(mu, side, &geom) * 2.0 * scale * mu * mu_rate(*l2);
                Ok((mu, row, weight))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = OdeTransform {
            side,
            geom,
            spatial,
            omega: Vec::new(),
            mu: Vec::new(),
            rho_weight: Vec::new(),
            phi: Vec::new(),
            spectral,
        };
        for (mu, row, weight) in rows {
            t.omega.push(omega_of_mu(mu, &geom));
            t.mu.push(mu);
            t.rho_weight.push(weight);
            t.phi.push(row);
        }
        Ok(t)
    }

    pub fn spatial_function(&self, f: impl Fn(f64) -> C64) -> GridFunction {
        GridFunction::sample(&self.spatial, side_interval(self.side, &self.geom), f)
    }

    pub fn forward(&self, f: &GridFunction) -> GridFunction {
        let values = self
            .phi
            .iter()
            .map(|row| {
                let t: Vec<C64> = row.iter().zip(&f.values).zip(&f.weights).map(|((p, v), w)| v * (p * w)).collect();
                pairwise_sum_c(&t)
            })
            .collect();
        GridFunction {
            nodes: self.spectral.nodes.clone(),
            weights: self.spectral.weights.clone(),
            values,
            interval: (0.0, 1.0),
        }
    }

    pub fn inverse(&self, g: &GridFunction) -> GridFunction {
        let values = (0..self.spatial.len())
            .map(|i| {
                let t: Vec<C64> = self
                    .phi
                    .iter()
                    .zip(&g.values)
                    .zip(self.rho_weight.iter().zip(&g.weights))
                    .map(|((row, v), (s, w))| v * (row[i] * s * w))
                    .collect();
                pairwise_sum_c(&t)
            })
            .collect();
        GridFunction {
            nodes: self.spatial.nodes.clone(),
            weights: self.spatial.weights.clone(),
            values,
            interval: side_interval(self.side, &self.geom),
        }
    }

    /// Norm in L^2(J, rho_j) of a function on the spectral nodes.
    pub fn spectral_norm(&self, g: &GridFunction) -> f64 {
        let t: Vec<f64> =
            g.values.iter().zip(&self.rho_weight).zip(&g.weights).map(|((v, s), w)| v.norm_sqr() * s * w).collect();
        pairwise_sum(&t).sqrt()
    }

    /// Multiplies a spectral function by h(mu).
    pub fn times(&self, g: &GridFunction, h: impl Fn(f64) -> f64) -> GridFunction {
        let values = g.values.iter().zip(&self.mu).map(|(v, m)| v * h(*m)).collect();
        g.with_values(values)
    }
}

pub fn u12_transform(f: &GridFunction, direction: Direction, t: &OdeTransform) -> Result<GridFunction> {
    let side = match direction {
        Direction::U1 | Direction::U1Star => Side::L,
        Direction::U2 | Direction::U2Star => Side::R,
    };
    if side != t.side {
        return Err(Error::Domain(format!("{direction:?} needs the transform of side {side:?}")));
    }
    match direction {
        Direction::U1 | Direction::U2 => Ok(t.forward(f)),
        Direction::U1Star | Direction::U2Star => Ok(t.inverse(f)),
    }
}

/// H_L or H_R of a function on one subinterval, sampled at the spatial nodes of
/// the other subinterval's transform.
pub fn fht_to(f: &GridFunction, side: Side, target: &Rule, g: &Geometry) -> Result<GridFunction> {
    let values = target.nodes.par_iter().map(|y| fht_apply(f, *y, side, g)).collect::<Result<Vec<C64>>>()?;
    Ok(GridFunction {
        nodes: target.nodes.clone(),
        weights: target.weights.clone(),
        values,
        interval: side_interval(side.other(), g),
    })
}

/// Relative L^2(rho_2) size of U_2[H_L f] - m(mu) U_1[f] for f on [b_L, 0].
/// The spectral grids of u1 and u2 must coincide.
pub fn multiplier_defect(
    f: &GridFunction,
    u1: &OdeTransform,
    u2: &OdeTransform,
    m: impl Fn(f64, &Geometry) -> f64,
) -> Result<f64> {
    let g = u1.geom;
    let hf = fht_to(f, Side::L, &u2.spatial, &g)?;
    let lhs = u2.forward(&hf);
    let rhs = u2.times(&u1.forward(f), |mu| m(mu, &g));
    Ok(u2.spectral_norm(&lhs.sub(&rhs)) / u2.spectral_norm(&rhs))
}

/// Relative L^2(rho_1) size of U_1[H_R f] - hr_multiplier U_2[f] for f on [0, b_R].
pub fn adjoint_multiplier_defect(f: &GridFunction, u1: &OdeTransform, u2: &OdeTransform) -> Result<f64> {
    let g = u1.geom;
    let hf = fht_to(f, Side::R, &u1.spatial, &g)?;
    let lhs = u1.forward(&hf);
    let rhs = u1.times(&u2.forward(f), |m| hr_multiplier(m, &g));
    Ok(u1.spectral_norm(&lhs.sub(&rhs)) / u1.spectral_norm(&rhs))
}

/// Relative size of U_1[H_L^* H_L f] - sech^2(mu pi) U_1[f], with H_L^* = -H_R.
pub fn composition_defect(f: &GridFunction, u1: &OdeTransform, u2: &OdeTransform) -> Result<f64> {
    let g = u1.geom;
    let hf = fht_to(f, Side::L, &u2.spatial, &g)?;
    let back = fht_to(&hf, Side::R, &u1.spatial, &g)?.map(|_, v| -v);
    let lhs = u1.forward(&back);
    let rhs = u1.times(&u1.forward(f), |m| 1.0 / (m * PI).cosh().powi(2));
    Ok(u1.spectral_norm(&lhs.sub(&rhs)) / u1.spectral_norm(&rhs))
}

/// ||U_j^* sech^2(mu pi) U_j f - U^* lambda^2 U f|| / ||f||, with U = U_L for
/// side L and U_R for side R.
pub fn equivalence_check(f: &GridFunction, ode: &OdeTransform, st: &SpectralTransform) -> Result<f64> {
    if ode.side != st.side || ode.spatial != st.spatial {
        return Err(Error::Domain("both transforms must share a side and a spatial rule".into()));
    }
    let ode_side = ode.inverse(&ode.times(&ode.forward(f), |m| 1.0 / (m * PI).cosh().powi(2)));
    let rhp_side = st.inverse(&st.forward(f).map(|l2, v| v * l2));
    Ok(ode_side.sub(&rhp_side).norm() / f.norm())
}
