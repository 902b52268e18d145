//! Diagonalization of H_R^* H_R and H_L^* H_L through the functions d_L, d_R:
//! kernels phi_L, phi_R, spectral densities, the transforms U_L, U_R and the
//! resolution of the identity.

use crate::complexfn::gamma::gamma_ratio;
use crate::error::{Error, Result};
use crate::kernels::hstar_h_kernel;
use crate::quadrature::{fht_apply, pairwise_sum, pairwise_sum_c, GridFunction, Rule};
use crate::rhp::PairSheet;
use crate::spectral::{a_of_lambda, mobius, Geometry, Mobius};
use crate::types::{r, Pt, Shore, Side, C64, I};
use rayon::prelude::*;
use std::f64::consts::PI;

/// d_L, d_R for a fixed lambda in (-1/2, 0).
#[derive(Debug, Clone, Copy)]
pub struct SingularPair {
    pub lambda: f64,
    pub a_minus: C64,
    pub alpha: C64,
    pub beta: C64,
    pub geom: Geometry,
    sheet: PairSheet,
}

pub fn alpha_beta(a: C64) -> Result<(C64, C64)> {
    let ea = (I * PI * a).exp();
    let alpha = (PI * a).tan() / ea * gamma_ratio(&[a], &[a + 1.5])? / ((a + 1.0) * 4f64.ln()).exp();
    let beta = (a * 4f64.ln()).exp() * ea * gamma_ratio(&[a + 0.5], &[a + 2.0])?;
    Ok((alpha, beta))
}

impl SingularPair {
    pub fn new(lambda: f64, geom: Geometry) -> Result<Self> {
        Self::with_shore(lambda, Shore::Minus, geom)
    }

    /// Same pair built from a on the given shore of the lambda cut; the result
    /// does not depend on the shore.
    pub fn with_shore(lambda: f64, shore: Shore, geom: Geometry) -> Result<Self> {
        if !(lambda > -0.5 && lambda < 0.0) {
            return Err(Error::Domain(format!("d_L, d_R need lambda in (-1/2, 0), got {lambda}")));
        }
        let a = a_of_lambda(Pt { z: r(lambda), shore: Some(shore) })?;
        let (alpha, beta) = alpha_beta(a)?;
        Ok(SingularPair { lambda, a_minus: a, alpha, beta, geom, sheet: PairSheet::new(a)? })
    }

    fn combine(&self, h_prime: C64, s_prime: C64) -> (C64, C64) {
        let ea = (I * PI * self.a_minus).exp();
        let dr = self.alpha * h_prime + self.beta * s_prime;
        let dl = -ea * self.alpha * h_prime + self.beta * s_prime / ea;
        (dl, dr)
    }

    /// (d_L(z), d_R(z)).
    pub fn eval(&self, z: Pt) -> Result<(C64, C64)> {
        let m = self.sheet.hat_at_z(z, &self.geom)?;
        Ok(self.combine(m.get(1, 0), m.get(1, 1)))
    }

    /// (d_L(inf), d_R(inf)); z = inf corresponds to eta = b_R / (b_R - b_L).
    pub fn at_infinity(&self) -> Result<(C64, C64)> {
        let m = self.sheet.hat(Pt::real(self.geom.eta_at_infinity()))?;
        Ok(self.combine(m.get(1, 0), m.get(1, 1)))
    }

    /// d_L(z); a real point of (b_L, 0) needs no shore since d_L is analytic there.
    pub fn d_left(&self, z: Pt) -> Result<C64> {
        let z = if z.side() == 0.0 && z.z.re > self.geom.bl && z.z.re < 0.0 { Pt::plus(z.z.re) } else { z };
        Ok(self.eval(z)?.0)
    }

    /// d_R(z); a real point of (0, b_R) needs no shore.
    pub fn d_right(&self, z: Pt) -> Result<C64> {
        let z = if z.side() == 0.0 && z.z.re > 0.0 && z.z.re < self.geom.br { Pt::plus(z.z.re) } else { z };
        Ok(self.eval(z)?.1)
    }
}

pub fn d_pair(z: Pt, lambda: f64, geom: Geometry) -> Result<(C64, C64)> {
    SingularPair::new(lambda, geom)?.eval(z)
}

/// Spatial rule for one subinterval: Gauss panels refined `SPATIAL_LEVELS` times
/// toward 0 (square-root substitution on the innermost panel) and a few times
/// toward the outer endpoint.
pub const SPATIAL_LEVELS: usize = 64;
const SPATIAL_POINTS: usize = 16;
const OUTER_LEVELS: usize = 6;

pub fn spatial_rule(side: Side, geom: &Geometry) -> Rule {
    let breaks = spatial_breaks(side, geom);
    match side {
        Side::R => Rule::from_breaks(&breaks, SPATIAL_POINTS, true, false),
        Side::L => Rule::from_breaks(&breaks, SPATIAL_POINTS, false, true),
    }
}

/// Panel ends of `spatial_rule`. For L they are built on (0, |b_L|) and
/// mirrored, so the breaks near 0 keep full precision.
pub fn spatial_breaks(side: Side, geom: &Geometry) -> Vec<f64> {
    match side {
        Side::R => Rule::two_sided_breaks(0.0, geom.br, SPATIAL_LEVELS, OUTER_LEVELS),
        Side::L => {
            let mut breaks: Vec<f64> =
                Rule::two_sided_breaks(0.0, -geom.bl, SPATIAL_LEVELS, OUTER_LEVELS).iter().map(|t| -t).collect();
            breaks.reverse();
            breaks
        }
    }
}

/// |x| of the innermost panel end next to 0.
fn spatial_cutoff(side: Side, geom: &Geometry) -> f64 {
    spatial_breaks(side, geom).iter().map(|x| x.abs()).filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min)
}

pub fn side_interval(side: Side, geom: &Geometry) -> (f64, f64) {
    match side {
        Side::L => (geom.bl, 0.0),
        Side::R => (0.0, geom.br),
    }
}

/// Residuals of the identities satisfied by d_L, d_R at one lambda in (-1/2, 0).
#[derive(Debug, Clone)]
pub struct PairIdentities {
    pub lambda: f64,
    pub reflection: f64,
    pub jump_left: f64,
    pub jump_right: f64,
    pub svd: f64,
    pub moment: f64,
}

impl PairIdentities {
    pub fn max(&self) -> f64 {
        [self.reflection, self.jump_left, self.jump_right, self.svd, self.moment].into_iter().fold(0.0, f64::max)
    }
}

/// d_R(M2(x)) = d_L(x) on sample points of (b_L, 0).
pub fn reflection_residual(sp: &SingularPair, xs: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in xs {
        let m2 = mobius(Mobius::M2, r(x), &sp.geom)?.re;
        let dl = sp.d_left(Pt::real(x))?;
        let dr = sp.d_right(Pt::real(m2))?;
        worst = worst.max((dl - dr).norm() / dl.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// d_L(x+) - d_L(x-) = (i/lambda) d_R(x) on (0, b_R) and
/// d_R(x+) - d_R(x-) = -(i/lambda) d_L(x) on (b_L, 0); relative residuals.
pub fn jump_residuals(sp: &SingularPair, right: &[f64], left: &[f64]) -> Result<(f64, f64)> {
    let il = I / sp.lambda;
    let mut jl: f64 = 0.0;
    for &x in right {
        let (lp, rp) = sp.eval(Pt::plus(x))?;
        let (lm, _) = sp.eval(Pt::minus(x))?;
        jl = jl.max((lp - lm - il * rp).norm() / lp.norm().max(lm.norm()));
    }
    let mut jr: f64 = 0.0;
    for &x in left {
        let (lp, rp) = sp.eval(Pt::plus(x))?;
        let (_, rm) = sp.eval(Pt::minus(x))?;
        jr = jr.max((rp - rm + il * lp).norm() / rp.norm().max(rm.norm()));
    }
    Ok((jl, jr))
}

/// Samples of d_R(y)/y on the right rule and d_L(x)/x on the left rule.
fn scaled_samples(sp: &SingularPair) -> Result<(GridFunction, GridFunction)> {
    let g = sp.geom;
    let sample = |side: Side| -> Result<GridFunction> {
        let rule = spatial_rule(side, &g);
        let values: Vec<C64> = rule
            .nodes
            .par_iter()
            .map(|x| {
                let d = match side {
                    Side::R => sp.d_right(Pt::real(*x))?,
                    Side::L => sp.d_left(Pt::real(*x))?,
                };
                Ok(d / *x)
            })
            .collect::<Result<_>>()?;
        Ok(GridFunction { nodes: rule.nodes, weights: rule.weights, values, interval: side_interval(side, &g) })
    };
    Ok((sample(Side::R)?, sample(Side::L)?))
}

/// max |H_R[d_R(y)/y](x) - 2 lambda d_L(x)/x| / max |2 lambda d_L(x)/x| over `left`
/// and the mirrored H_L[d_L(x)/x](y) = -2 lambda d_R(y)/y over `right`. The minus
/// sign is forced by the jump relations together with d_L(0) = d_R(0) = 0, and
/// keeps H_R* H_R = -H_L H_R positive.
pub fn svd_check(sp: &SingularPair, left: &[f64], right: &[f64]) -> Result<f64> {
    let (dr_over, dl_over) = scaled_samples(sp)?;
    let g = sp.geom;
    let one = |targets: &[f64], src: &GridFunction, src_side: Side| -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &x in targets {
            let lhs = fht_apply(src, x, src_side, &g)?;
            let d = match src_side {
                Side::R => sp.d_left(Pt::real(x))?,
                Side::L => sp.d_right(Pt::real(x))?,
            };
            let rhs = match src_side {
                Side::R => 2.0 * sp.lambda * d / x,
                Side::L => -2.0 * sp.lambda * d / x,
            };
            worst = worst.max((lhs - rhs).norm());
            scale = scale.max(rhs.norm());
        }
        Ok(worst / scale)
    };
    Ok(one(left, &dr_over, Side::R)?.max(one(right, &dl_over, Side::L)?))
}

/// Integral of d_R(x)/x over (0, b_R) against -2 pi lambda d_L(inf), and of
/// d_L(x)/x over (b_L, 0) against 2 pi lambda d_R(inf); relative residual.
/// These are the Cauchy integrals of the jumps evaluated at z = 0.
pub fn moment_residual(sp: &SingularPair) -> Result<f64> {
    let (dr_over, dl_over) = scaled_samples(sp)?;
    let (dl_inf, dr_inf) = sp.at_infinity()?;
    let a = -2.0 * PI * sp.lambda * dl_inf;
    let b = 2.0 * PI * sp.lambda * dr_inf;
    let ra = (dr_over.integral() - a).norm() / a.norm();
    let rb = (dl_over.integral() - b).norm() / b.norm();
    Ok(ra.max(rb))
}

/// Evenly spaced interior sample points of a subinterval, kept `margin` (relative)
/// away from its ends.
pub fn interior_points(side: Side, geom: &Geometry, count: usize, margin: f64) -> Vec<f64> {
    let (a, b) = side_interval(side, geom);
    let len = b - a;
    (0..count).map(|k| a + len * (margin + (1.0 - 2.0 * margin) * k as f64 / (count - 1).max(1) as f64)).collect()
}

pub fn pair_identities(lambda: f64, geom: Geometry) -> Result<PairIdentities> {
    let sp = SingularPair::new(lambda, geom)?;
    let left = interior_points(Side::L, &geom, 12, 0.02);
    let right = interior_points(Side::R, &geom, 12, 0.02);
    let (jump_left, jump_right) = jump_residuals(&sp, &right, &left)?;
    Ok(PairIdentities {
        lambda,
        reflection: reflection_residual(&sp, &left)?,
        jump_left,
        jump_right,
        svd: svd_check(&sp, &left, &right)?,
        moment: moment_residual(&sp)?,
    })
}

/// Spectral integrals over (0, 1) run over [SPECTRAL_FLOOR, SPECTRAL_CEILING].
/// Near 0 the integrand of |U f|^2 d sigma behaves like a power of ln(1/lambda)
/// per unit lambda, so the floor has to be small in lambda, not lambda^2. Near 1
/// the density vanishes linearly.
pub const SPECTRAL_FLOOR: f64 = 1e-18;
pub const SPECTRAL_CEILING: f64 = 1.0 - 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub lambda_sq: f64,
    pub sigma_l_prime: f64,
    pub sigma_r_prime: f64,
}

impl SpectralDensity {
    pub fn on(&self, side: Side) -> f64 {
        match side {
            Side::L => self.sigma_l_prime,
            Side::R => self.sigma_r_prime,
        }
    }
}

/// phi_L or phi_R at a fixed lambda^2, with D(z; lambda) = d(z; -|lambda|/2).
#[derive(Debug, Clone, Copy)]
pub struct TransformKernel {
    pub side: Side,
    pub lambda_sq: f64,
    pub lambda_abs: f64,
    pub pair: SingularPair,
    /// (D_L(inf), D_R(inf)).
    pub d_inf: (C64, C64),
    pub density: SpectralDensity,
}

impl TransformKernel {
    pub fn new(lambda_sq: f64, side: Side, geom: Geometry) -> Result<Self> {
        if !(SPECTRAL_FLOOR..=SPECTRAL_CEILING).contains(&lambda_sq) {
            let guard = if lambda_sq < 0.5 { SPECTRAL_FLOOR } else { 1.0 - SPECTRAL_CEILING };
            return Err(Error::NearEndpoint { at: format!("lambda^2 = {lambda_sq}"), guard });
        }
        Self::unguarded(lambda_sq, side, geom)
    }

    /// No margin check; lambda^2 must still lie in (0, 1).
    pub fn unguarded(lambda_sq: f64, side: Side, geom: Geometry) -> Result<Self> {
        if !(lambda_sq > 0.0 && lambda_sq < 1.0) {
            return Err(Error::Domain(format!("lambda^2 = {lambda_sq} outside (0, 1)")));
        }
        let lambda_abs = lambda_sq.sqrt();
        let pair = SingularPair::new(-lambda_abs / 2.0, geom)?;
        let d_inf = pair.at_infinity()?;
        let a = pair.a_minus;
        let pre = geom.bl.abs() * geom.br * (a + 0.5) / (I * geom.width());
        let density = SpectralDensity {
            lambda_sq,
            sigma_l_prime: (pre * d_inf.1 * d_inf.1).re,
            sigma_r_prime: (pre * d_inf.0 * d_inf.0).re,
        };
        Ok(TransformKernel { side, lambda_sq, lambda_abs, pair, d_inf, density })
    }

    /// phi_L(y) = -D_L(y) / (pi y |lambda| D_R(inf)), phi_R(x) = D_R(x) / (pi x |lambda| D_L(inf)).
    /// With these signs both kernels integrate to 1 over their subinterval.
    pub fn phi(&self, x: f64) -> Result<C64> {
        match self.side {
            Side::L => Ok(-self.pair.d_left(Pt::real(x))? / (PI * x * self.lambda_abs * self.d_inf.1)),
            Side::R => Ok(self.pair.d_right(Pt::real(x))? / (PI * x * self.lambda_abs * self.d_inf.0)),
        }
    }

    pub fn sigma_prime(&self) -> f64 {
        self.density.on(self.side)
    }

    /// mu = Im a, with a = -1/2 + i mu.
    pub fn mu(&self) -> f64 {
        self.pair.a_minus.im
    }

    /// P in phi(x) = |x|^{-1/2} (P |x|^{i mu} + conj(P) |x|^{-i mu}) (1 + O(x)) as x -> 0,
    /// from the leading 1/eta terms of h' and s' at eta = M1(x) ~ c / x.
    pub fn tail_coefficient(&self) -> C64 {
        let a = self.pair.a_minus;
        let g = self.pair.geom;
        let c = -g.br * g.bl / g.width();
        let d_inf = match self.side {
            Side::R => self.d_inf.0,
            Side::L => self.d_inf.1,
        };
        -self.pair.alpha * a * (I * PI * a).exp() * r(c).powc(-a - 1.0) / (PI * self.lambda_abs * d_inf)
    }
}

/// |d mu / d lambda^2| with mu = arccosh(1/|lambda|) / pi.
pub fn mu_rate(lambda_sq: f64) -> f64 {
    1.0 / (2.0 * PI * lambda_sq * (1.0 - lambda_sq).sqrt())
}

pub fn phi_and_density(lambda_sq: f64, side: Side, geom: Geometry) -> Result<(TransformKernel, SpectralDensity)> {
    let k = TransformKernel::new(lambda_sq, side, geom)?;
    Ok((k, k.density))
}

/// Panel ends on [SPECTRAL_FLOOR, SPECTRAL_CEILING]: decades toward 0, four
/// panels across [0.1, 0.9], decades in 1 - lambda^2 toward 1.
pub fn spectral_breaks() -> Vec<f64> {
    let mut breaks: Vec<f64> = Vec::new();
    let mut t = SPECTRAL_FLOOR;
    while t < 0.1 * (1.0 - 1e-9) {
        breaks.push(t);
        t *= 10.0;
    }
    breaks.extend([0.1, 0.3, 0.5, 0.7, 0.9]);
    let mut gap = 0.01;
    while gap > 1.0 - SPECTRAL_CEILING {
        breaks.push(1.0 - gap);
        gap /= 10.0;
    }
    breaks.push(SPECTRAL_CEILING);
    breaks
}

/// Gauss rule on the spectral breaks with at least n nodes in total.
pub fn spectral_rule(n: usize) -> Rule {
    let breaks = spectral_breaks();
    let panels = breaks.len() - 1;
    let points = n.div_ceil(panels).max(2);
    Rule::from_breaks(&breaks, points, false, false)
}

/// U_side and its adjoint, discretized on a spatial rule and a spectral rule.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    pub side: Side,
    pub geom: Geometry,
    pub spatial: Rule,
    pub spectral: Rule,
    /// phi(x_i, lambda_k^2), indexed [k][i].
    pub phi: Vec<Vec<f64>>,
    pub sigma_prime: Vec<f64>,
    pub mu: Vec<f64>,
    /// Tail coefficient P and dP/dmu per spectral node.
    pub tail: Vec<(C64, C64)>,
    /// Spatial nodes with |x| below this sit on the innermost panel.
    pub cutoff: f64,
}

struct NodeData {
    row: Vec<f64>,
    sigma_prime: f64,
    mu: f64,
    tail: (C64, C64),
}

impl SpectralTransform {
    pub fn new(side: Side, geom: Geometry, spectral_nodes: usize) -> Result<Self> {
        Self::on_rules(side, geom, spatial_rule(side, &geom), spectral_rule(spectral_nodes))
    }

    pub fn on_rules(side: Side, geom: Geometry, spatial: Rule, spectral: Rule) -> Result<Self> {
        let data: Vec<NodeData> = spectral
            .nodes
            .par_iter()
            .map(|l2| {
                let k = TransformKernel::new(*l2, side, geom)?;
                let row = spatial.nodes.iter().map(|x| k.phi(*x).map(|v| v.re)).collect::<Result<Vec<f64>>>()?;
                let h = 1e-5 * l2.min(1.0 - l2);
                let up = TransformKernel::unguarded(l2 + h, side, geom)?;
                let down = TransformKernel::unguarded(l2 - h, side, geom)?;
                let slope = (up.tail_coefficient() - down.tail_coefficient()) / (up.mu() - down.mu());
                Ok(NodeData { row, sigma_prime: k.sigma_prime(), mu: k.mu(), tail: (k.tail_coefficient(), slope) })
            })
            .collect::<Result<_>>()?;
        let mut st = SpectralTransform {
            side,
            geom,
            cutoff: spatial_cutoff(side, &geom),
            spatial,
            spectral,
            phi: Vec::with_capacity(data.len()),
            sigma_prime: Vec::with_capacity(data.len()),
            mu: Vec::with_capacity(data.len()),
            tail: Vec::with_capacity(data.len()),
        };
        for d in data {
            st.phi.push(d.row);
            st.sigma_prime.push(d.sigma_prime);
            st.mu.push(d.mu);
            st.tail.push(d.tail);
        }
        Ok(st)
    }

    pub fn spatial_function(&self, f: impl Fn(f64) -> C64) -> GridFunction {
        GridFunction::sample(&self.spatial, side_interval(self.side, &self.geom), f)
    }

    pub fn spectral_function(&self, f: impl Fn(f64) -> C64) -> GridFunction {
        GridFunction::sample(&self.spectral, (0.0, 1.0), f)
    }

    /// U[f](lambda_k^2) = integral of phi(x, lambda_k^2) f(x) dx.
    pub fn forward(&self, f: &GridFunction) -> GridFunction {
        let values = self
            .phi
            .iter()
            .map(|row| {
                let t: Vec<C64> = row.iter().zip(&f.values).zip(&f.weights).map(|((p, v), w)| v * (p * w)).collect();
                pairwise_sum_c(&t)
            })
            .collect();
        GridFunction { nodes: self.spectral.nodes.clone(), weights: self.spectral.weights.clone(), values, interval: (0.0, 1.0) }
    }

    /// U*[g](x_i) = integral of phi(x_i, mu^2) g(mu^2) d sigma(mu^2).
    pub fn inverse(&self, g: &GridFunction) -> GridFunction {
        let n = self.spatial.len();
        let values = (0..n)
            .map(|i| {
                let t: Vec<C64> = self
                    .phi
                    .iter()
                    .zip(&g.values)
                    .zip(self.sigma_prime.iter().zip(&g.weights))
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

    /// U U* g. The spatial integral over |x| < cutoff does not converge
    /// absolutely for U* g, so that piece is done in closed form from the
    /// |x|^{-1/2 +- i mu} behavior of phi (Abel-regularized). Its singular part is
    /// a delta in mu with weight 2 pi |P|^2.
    pub fn forward_of_inverse(&self, g: &GridFunction) -> GridFunction {
        let n = self.spectral.len();
        let keep: Vec<usize> = (0..self.spatial.len()).filter(|i| self.spatial.nodes[*i].abs() >= self.cutoff).collect();
        let log_eps = self.cutoff.ln();
        let c: Vec<C64> = (0..n).map(|j| g.values[j] * (self.sigma_prime[j] * g.weights[j])).collect();
        let values = (0..n)
            .into_par_iter()
            .map(|k| {
                let (p, slope) = self.tail[k];
                let terms: Vec<C64> = (0..n)
                    .map(|j| {
                        let inner: Vec<f64> =
                            keep.iter().map(|i| self.phi[k][*i] * self.phi[j][*i] * self.spatial.weights[*i]).collect();
                        let q = self.tail[j].0;
                        let s = self.mu[k] + self.mu[j];
                        let kappa = self.mu[k] - self.mu[j];
                        let sum_part = 2.0 * (p * q * (I * s * log_eps).exp() / (I * s)).re;
                        let diff_part = if kappa.abs() > 1e-7 {
                            2.0 * (p * q.conj() * (I * kappa * log_eps).exp() / (I * kappa)).re
                        } else {
                            2.0 * p.norm_sqr() * log_eps - 2.0 * (p * slope.conj()).im
                        };
                        c[j] * (pairwise_sum(&inner) + sum_part + diff_part)
                    })
                    .collect();
                let l2 = self.spectral.nodes[k];
                let delta = 2.0 * PI * p.norm_sqr() * self.sigma_prime[k] / mu_rate(l2);
                pairwise_sum_c(&terms) + g.values[k] * delta
            })
            .collect();
        g.with_values(values)
    }

    /// Norm in L^2(d sigma) of a function on the spectral grid.
    pub fn spectral_norm(&self, g: &GridFunction) -> f64 {
        let t: Vec<f64> =
            g.values.iter().zip(&self.sigma_prime).zip(&g.weights).map(|((v, s), w)| v.norm_sqr() * s * w).collect();
        pairwise_sum(&t).sqrt()
    }

    /// E-hat over the spectral interval (lo, hi]: U* applied to the truncated U f.
    pub fn projection(&self, f: &GridFunction, lo: f64, hi: f64) -> GridFunction {
        let uf = self.forward(f);
        let cut = uf.map(|l2, v| if l2 > lo && l2 <= hi { v } else { r(0.0) });
        self.inverse(&cut)
    }

    pub fn resolution_of_identity(&self, f: &GridFunction, upper: f64) -> GridFunction {
        self.projection(f, 0.0, upper)
    }

    /// U restricted to (lo, hi]: chi U f on the spectral grid.
    pub fn truncated_forward(&self, f: &GridFunction, lo: f64, hi: f64) -> GridFunction {
        self.forward(f).map(|l2, v| if l2 > lo && l2 <= hi { v } else { r(0.0) })
    }

    /// U E_second E_first f, i.e. chi_second U U* chi_first U f, on the spectral grid.
    pub fn compose_projections(&self, f: &GridFunction, first: (f64, f64), second: (f64, f64)) -> GridFunction {
        let inner = self.truncated_forward(f, first.0, first.1);
        self.forward_of_inverse(&inner).map(|l2, v| if l2 > second.0 && l2 <= second.1 { v } else { r(0.0) })
    }

    /// Spatial L^2 norm of U* g, computed as <U U* g, g>_sigma^{1/2}.
    pub fn inverse_norm(&self, g: &GridFunction) -> f64 {
        let back = self.forward_of_inverse(g);
        let t: Vec<f64> = back
            .values
            .iter()
            .zip(&g.values)
            .zip(self.sigma_prime.iter().zip(&g.weights))
            .map(|((b, v), (s, w))| (b * v.conj()).re * s * w)
            .collect();
        pairwise_sum(&t).max(0.0).sqrt()
    }
}

/// H*H applied on the transform's spatial grid with the closed-form kernel.
pub fn hstar_h_apply(st: &SpectralTransform, g: &GridFunction) -> GridFunction {
    let x = &st.spatial.nodes;
    let values = x
        .par_iter()
        .map(|p| {
            let t: Vec<C64> = x
                .iter()
                .zip(&g.values)
                .zip(&g.weights)
                .map(|((q, v), w)| v * (hstar_h_kernel(*p, *q, st.side, &st.geom) * w))
                .collect();
            pairwise_sum_c(&t)
        })
        .collect();
    g.with_values(values)
}

/// Relative L^2(d sigma) size of U[H*H f] - lambda^2 U[f]. On the range of U this
/// is U H*H U* - lambda^2. Applying U* to an arbitrary spectral function first
/// gives a spatial function with an x^{-1/2} oscillating tail at 0 that no
/// truncated grid reproduces, so the check starts from a spatial f.
pub fn diagonalization_defect(st: &SpectralTransform, f: &GridFunction) -> f64 {
    let uf = st.forward(f);
    let back = st.forward(&hstar_h_apply(st, f));
    let target = uf.map(|l2, v| v * l2);
    st.spectral_norm(&back.sub(&target)) / st.spectral_norm(&target)
}

/// Smooth bump supported on (lo, hi), equal to 1 at the midpoint.
pub fn bump(lo: f64, hi: f64) -> impl Fn(f64) -> C64 {
    let mid = 0.5 * (lo + hi);
    let peak = 1.0 / ((mid - lo) * (hi - mid));
    move |t| {
        if t <= lo || t >= hi {
            r(0.0)
        } else {
            r((peak - 1.0 / ((t - lo) * (hi - t))).exp())
        }
    }
}

/// Smooth bump in the coordinate theta = ln(|x| / (|b| - |x|)) on the given side,
/// supported where |theta| < width. Its transform decays quickly in the spectral
/// variable, unlike a bump of fixed width in x.
pub fn log_bump(side: Side, geom: &Geometry, width: f64) -> impl Fn(f64) -> C64 {
    let len = match side {
        Side::L => -geom.bl,
        Side::R => geom.br,
    };
    let b = bump(-width, width);
    move |x: f64| {
        let t = x.abs();
        if t <= 0.0 || t >= len {
            return r(0.0);
        }
        b((t / (len - t)).ln())
    }
}
