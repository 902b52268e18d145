use super::gamma::{gamma_ratio, is_pole};
use super::ode::SecondOrderOde;
use crate::error::{Error, Result};
use crate::types::{r, Pt, C64, I};
use std::f64::consts::PI;

const SERIES_CAP: usize = 20_000;
const SERIES_RTOL: f64 = 1e-16;
const DIRECT_RADIUS: f64 = 0.8;
const DEGENERATE_GAP: f64 = 1e-3;
const PERTURB_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl HypParams {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        HypParams { a, b, c }
    }

    /// Parameters of the derivative: d/dz F(a,b;c;z) = (ab/c) F(a+1,b+1;c+1;z).
    pub fn raised(&self) -> Self {
        HypParams::new(self.a + 1.0, self.b + 1.0, self.c + 1.0)
    }
}

/// How to evaluate a point where every applicable connection formula has
/// coinciding exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degenerate {
    /// Continue the ODE solution by local power series from the unit disc.
    Continue,
    /// Perturb b by +-eps and average (two-point extrapolation).
    Perturb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Pfaff,
    Euler,
    OneMinusZ,
    Inverse,
    InverseOneMinusZ,
    OneMinusInverse,
    Continuation,
}

const CONNECTIONS: [Method; 4] = [
    Method::OneMinusZ,
    Method::Inverse,
    Method::InverseOneMinusZ,
    Method::OneMinusInverse,
];

fn int_gap(x: C64) -> f64 {
    ((x.re - x.re.round()).powi(2) + x.im * x.im).sqrt()
}

fn argument(m: Method, z: C64) -> C64 {
    let one = r(1.0);
    match m {
        Method::Series | Method::Euler | Method::Continuation => z,
        Method::Pfaff => z / (z - one),
        Method::OneMinusZ => one - z,
        Method::Inverse => one / z,
        Method::InverseOneMinusZ => one / (one - z),
        Method::OneMinusInverse => one - one / z,
    }
}

fn degenerate(m: Method, p: &HypParams) -> bool {
    match m {
        Method::OneMinusZ | Method::OneMinusInverse => int_gap(p.c - p.a - p.b) < DEGENERATE_GAP,
        Method::Inverse | Method::InverseOneMinusZ => int_gap(p.a - p.b) < DEGENERATE_GAP,
        _ => false,
    }
}

/// base^p with the branch of a negative real base fixed by `side`
/// (side > 0 means base = -|base| + i0, side < 0 means -|base| - i0).
pub fn pow_side(base: C64, p: C64, side: f64) -> C64 {
    if base.im == 0.0 && base.re < 0.0 && side != 0.0 {
        let lb = C64::new(base.re.abs().ln(), side.signum() * PI);
        (p * lb).exp()
    } else if base == r(0.0) {
        r(0.0)
    } else {
        (p * base.ln()).exp()
    }
}

/// Plain Maclaurin series; callers keep |z| comfortably below 1.
pub fn series(p: &HypParams, z: C64) -> Result<C64> {
    if is_pole(p.c) {
        return Err(Error::Pole { what: "2F1 lower parameter", at: format!("{}", p.c) });
    }
    let mut term = r(1.0);
    let mut sum = r(1.0);
    let mut small = 0;
    for n in 0..SERIES_CAP {
        let nf = n as f64;
        term *= (p.a + nf) * (p.b + nf) / ((p.c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() < SERIES_RTOL * sum.norm() || term == r(0.0) {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { terms: SERIES_CAP })
}

fn connection(m: Method, p: &HypParams, z: C64, side: f64) -> Result<C64> {
    let HypParams { a, b, c } = *p;
    let one = r(1.0);
    let w = argument(m, z);
    let v = match m {
        Method::OneMinusZ => {
            let t1 = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            let t2 = gamma_ratio(&[c, a + b - c], &[a, b])?;
            let mut v = r(0.0);
            if t1 != r(0.0) {
                v += t1 * series(&HypParams::new(a, b, a + b - c + 1.0), w)?;
            }
            if t2 != r(0.0) {
                v += t2 * pow_side(w, c - a - b, -side) * series(&HypParams::new(c - a, c - b, c - a - b + 1.0), w)?;
            }
            v
        }
        Method::Inverse => {
            let t1 = gamma_ratio(&[c, b - a], &[b, c - a])?;
            let t2 = gamma_ratio(&[c, a - b], &[a, c - b])?;
            let mut v = r(0.0);
            if t1 != r(0.0) {
                v += t1 * pow_side(-z, -a, -side) * series(&HypParams::new(a, a - c + 1.0, a - b + 1.0), w)?;
            }
            if t2 != r(0.0) {
                v += t2 * pow_side(-z, -b, -side) * series(&HypParams::new(b, b - c + 1.0, b - a + 1.0), w)?;
            }
            v
        }
        Method::InverseOneMinusZ => {
            let t1 = gamma_ratio(&[c, b - a], &[b, c - a])?;
            let t2 = gamma_ratio(&[c, a - b], &[a, c - b])?;
            let mut v = r(0.0);
            if t1 != r(0.0) {
                v += t1 * pow_side(one - z, -a, -side) * series(&HypParams::new(a, c - b, a - b + 1.0), w)?;
            }
            if t2 != r(0.0) {
                v += t2 * pow_side(one - z, -b, -side) * series(&HypParams::new(b, c - a, b - a + 1.0), w)?;
            }
            v
        }
        Method::OneMinusInverse => {
            let t1 = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
            let t2 = gamma_ratio(&[c, a + b - c], &[a, b])?;
            let mut v = r(0.0);
            if t1 != r(0.0) {
                v += t1 * z.powc(-a) * series(&HypParams::new(a, a - c + 1.0, a + b - c + 1.0), w)?;
            }
            if t2 != r(0.0) {
                v += t2
                    * pow_side(one - z, c - a - b, -side)
                    * z.powc(a - c)
                    * series(&HypParams::new(c - a, one - a, c - a - b + 1.0), w)?;
            }
            v
        }
        _ => unreachable!("not a connection formula"),
    };
    Ok(v)
}

fn perturbed(m: Method, p: &HypParams, z: C64, side: f64) -> Result<C64> {
    let up = HypParams::new(p.a, p.b + PERTURB_EPS, p.c);
    let dn = HypParams::new(p.a, p.b - PERTURB_EPS, p.c);
    Ok(0.5 * (connection(m, &up, z, side)? + connection(m, &dn, z, side)?))
}

/// Value and derivative by power-series continuation of the ODE from a point
/// of modulus 0.6, approaching real z > 1 from the side `side`.
pub fn continuation(p: &HypParams, z: C64, side: f64) -> Result<(C64, C64)> {
    let s = if z.im != 0.0 { z.im.signum() } else if side != 0.0 { side } else { 1.0 };
    let start = I * (0.6 * s);
    let f0 = series(p, start)?;
    let df0 = p.a * p.b / p.c * series(&p.raised(), start)?;
    let ode = SecondOrderOde::gauss(p.a, p.b, p.c);
    let height = z.im.abs().max(0.6) * s;
    let corner = C64::new(z.re, height);
    let out = ode.continue_along(start, [f0, df0], &[corner, z])?;
    Ok((out[0], out[1]))
}

fn check_point(p: &HypParams, z: &Pt) -> Result<f64> {
    if is_pole(p.c) {
        return Err(Error::Pole { what: "2F1 lower parameter", at: format!("{}", p.c) });
    }
    let zz = z.z;
    if zz.im == 0.0 && zz.re >= 1.0 {
        if zz.re == 1.0 {
            return Err(Error::Domain("2F1 at the branch point z = 1".into()));
        }
        return match z.shore {
            Some(s) => Ok(s.sign()),
            None => Err(Error::OnCut { at: format!("{z}") }),
        };
    }
    Ok(0.0)
}

/// Pick the evaluation method for a point; `None` means continuation.
pub fn choose_method(p: &HypParams, z: C64) -> Method {
    if z.norm() <= DIRECT_RADIUS {
        return Method::Series;
    }
    if argument(Method::Pfaff, z).norm() <= DIRECT_RADIUS {
        return Method::Pfaff;
    }
    let mut best: Option<(Method, f64)> = None;
    for m in CONNECTIONS {
        if degenerate(m, p) {
            continue;
        }
        let w = argument(m, z).norm();
        if w <= DIRECT_RADIUS && best.is_none_or(|(_, bw)| w < bw) {
            best = Some((m, w));
        }
    }
    best.map(|(m, _)| m).unwrap_or(Method::Continuation)
}

/// Gauss hypergeometric function with the default strategy for degenerate
/// connection coefficients (series continuation).
pub fn gauss_2f1(p: HypParams, z: Pt) -> Result<C64> {
    gauss_2f1_with(p, z, Degenerate::Continue)
}

pub fn gauss_2f1_with(p: HypParams, z: Pt, strategy: Degenerate) -> Result<C64> {
    let side = check_point(&p, &z)?;
    let m = choose_method(&p, z.z);
    if m == Method::Continuation && strategy == Degenerate::Perturb {
        // best degenerate formula, made regular by perturbation
        let mut best: Option<(Method, f64)> = None;
        for cm in CONNECTIONS {
            let w = argument(cm, z.z).norm();
            if w <= DIRECT_RADIUS && best.is_none_or(|(_, bw)| w < bw) {
                best = Some((cm, w));
            }
        }
        if let Some((cm, _)) = best {
            return perturbed(cm, &p, z.z, side);
        }
    }
    eval_method(m, p, z)
}

/// Evaluate with a forced method. Fails if the method's series argument is
/// outside the unit disc or its coefficients are singular.
pub fn eval_method(m: Method, p: HypParams, z: Pt) -> Result<C64> {
    let side = check_point(&p, &z)?;
    let zz = z.z;
    match m {
        Method::Series => series(&p, zz),
        Method::Pfaff => {
            let w = argument(m, zz);
            Ok((r(1.0) - zz).powc(-p.a) * series(&HypParams::new(p.a, p.c - p.b, p.c), w)?)
        }
        Method::Euler => Ok((r(1.0) - zz).powc(p.c - p.a - p.b) * series(&HypParams::new(p.c - p.a, p.c - p.b, p.c), zz)?),
        Method::Continuation => Ok(continuation(&p, zz, side)?.0),
        _ => {
            if degenerate(m, &p) {
                perturbed(m, &p, zz, side)
            } else {
                connection(m, &p, zz, side)
            }
        }
    }
}

/// F and dF/dz.
pub fn gauss_2f1_d(p: HypParams, z: Pt) -> Result<(C64, C64)> {
    let f = gauss_2f1(p, z)?;
    let df = if p.a * p.b == r(0.0) { r(0.0) } else { p.a * p.b / p.c * gauss_2f1(p.raised(), z)? };
    Ok((f, df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexfn::gamma::gamma;
    use crate::types::c;

    fn f(a: f64, b: f64, cc: f64, z: C64) -> C64 {
        gauss_2f1(HypParams::new(r(a), r(b), r(cc)), Pt::new(z)).unwrap()
    }

    #[test]
    fn constant_term_at_origin() {
        let p = HypParams::new(c(0.3, 1.0), c(-2.0, 0.5), c(1.7, -0.2));
        assert_eq!(gauss_2f1(p, Pt::new(r(0.0))).unwrap(), r(1.0));
    }

    #[test]
    fn log_closed_form() {
        let v = f(1.0, 1.0, 2.0, r(0.5));
        assert!((v - r(2.0 * 2f64.ln())).norm() < 1e-14);
        // direct summation oracle
        let direct: f64 = (0..200).map(|n| 0.5f64.powi(n) / (n as f64 + 1.0)).sum();
        assert!((v.re - direct).abs() < 1e-14);
        for z in [c(-3.0, 0.2), c(0.9, 0.5), c(4.0, -1.0), c(0.5, 0.866)] {
            let exact = -(r(1.0) - z).ln() / z;
            assert!((f(1.0, 1.0, 2.0, z) - exact).norm() < 1e-13, "z={z}");
        }
    }

    #[test]
    fn gauss_summation_limit() {
        let (a, b, cc) = (0.3, 0.2, 1.1);
        let exact = gamma(r(1.1)).unwrap() * gamma(r(0.6)).unwrap() / (gamma(r(0.8)).unwrap() * gamma(r(0.9)).unwrap());
        // approach z -> 1 from below; remainder scales like (1-z)^{c-a-b}
        let near = f(a, b, cc, r(1.0 - 1e-12));
        assert!((near - exact).norm() < 1e-6 * exact.norm());
        // extrapolate the (1-z)^{0.6} tail away
        let (e1, e2) = (1e-8, 1e-10);
        let (v1, v2) = (f(a, b, cc, r(1.0 - e1)), f(a, b, cc, r(1.0 - e2)));
        let q = (e2 / e1).powf(0.6);
        let extrap = (v2 - v1 * q) / (1.0 - q);
        assert!((extrap - exact).norm() < 1e-10 * exact.norm());
    }

    #[test]
    fn shores_of_the_cut() {
        // F(1,1;2;x +- i0) for x > 1
        let x = 3.0;
        let p = HypParams::new(r(1.0), r(1.0), r(2.0));
        let up = gauss_2f1(p, Pt::plus(x)).unwrap();
        let dn = gauss_2f1(p, Pt::minus(x)).unwrap();
        let exact_up = -(C64::new(1.0 - x, -0.0)).ln() / x; // 1 - (x + i0) = (1-x) - i0
        let expect_up = -(C64::new((x - 1.0f64).ln(), -PI)) / x;
        assert!((up - expect_up).norm() < 1e-13, "{up} {expect_up} {exact_up}");
        assert!((dn - expect_up.conj()).norm() < 1e-13);
        assert!(gauss_2f1(p, Pt::real(x)).is_err());
    }

    #[test]
    fn pole_in_c_is_error() {
        let p = HypParams::new(r(0.5), r(0.5), r(-2.0));
        assert!(gauss_2f1(p, Pt::new(r(0.3))).is_err());
    }

    #[test]
    fn perturbation_matches_continuation() {
        // c - a - b = 1: the z -> 1 - z formula is degenerate
        let p = HypParams::new(c(0.2, -0.4), c(1.2, -0.4), c(2.4, -0.8));
        for z in [c(1.3, 0.2), c(0.95, -0.3), c(2.5, 0.1)] {
            let a = gauss_2f1_with(p, Pt::new(z), Degenerate::Continue).unwrap();
            let b = eval_method(Method::OneMinusZ, p, Pt::new(z));
            let cont = eval_method(Method::Continuation, p, Pt::new(z)).unwrap();
            assert!((a - cont).norm() < 1e-13 * a.norm());
            if let Ok(b) = b {
                if argument(Method::OneMinusZ, z).norm() < 0.8 {
                    assert!((a - b).norm() < 1e-8 * a.norm(), "z={z} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn transformations_agree() {
        let p = HypParams::new(c(0.3, 0.2), c(-0.7, 0.1), c(1.45, -0.3));
        for z in [c(0.28, 0.28), c(-0.4, 0.0), c(0.7, 0.0), c(-0.35, 0.6)] {
            let s = eval_method(Method::Series, p, Pt::new(z)).unwrap();
            for m in [Method::Pfaff, Method::Euler, Method::OneMinusZ, Method::Continuation] {
                if argument(m, z).norm() > 0.9 {
                    continue;
                }
                let v = eval_method(m, p, Pt::new(z)).unwrap();
                assert!((v - s).norm() < 1e-10 * s.norm(), "{m:?} z={z}: {v} vs {s}");
            }
        }
    }
}
