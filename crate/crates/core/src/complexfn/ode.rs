//! Analytic continuation of solutions of second-order ODEs with polynomial
//! coefficients and regular singular points at 0 and 1, by local power series.

use crate::error::{Error, Result};
use crate::types::{r, C64};

const MAX_TERMS: usize = 600;
const STEP_FRACTION: f64 = 0.5;

/// (p2[0] + p2[1] z + p2[2] z^2) w'' + (p1[0] + p1[1] z) w' + p0 w = 0,
/// with singular points at 0 and 1.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderOde {
    p2: [C64; 3],
    p1: [C64; 2],
    p0: C64,
}

impl SecondOrderOde {
    /// z(1-z)w'' + (c - (a+b+1)z)w' - ab w = 0
    pub fn gauss(a: C64, b: C64, c: C64) -> Self {
        SecondOrderOde {
            p2: [r(0.0), r(1.0), r(-1.0)],
            p1: [c, -(a + b + 1.0)],
            p0: -a * b,
        }
    }

    /// z(1-z)w'' + a(a+1)w = 0, the equation solved by the pair at infinity.
    pub fn pair(a: C64) -> Self {
        SecondOrderOde {
            p2: [r(0.0), r(1.0), r(-1.0)],
            p1: [r(0.0), r(0.0)],
            p0: a * (a + 1.0),
        }
    }

    pub fn residual(&self, z: C64, w: C64, dw: C64, d2w: C64) -> C64 {
        let p2 = self.p2[0] + self.p2[1] * z + self.p2[2] * z * z;
        let p1 = self.p1[0] + self.p1[1] * z;
        p2 * d2w + p1 * dw + self.p0 * w
    }

    fn radius(p: C64) -> f64 {
        p.norm().min((r(1.0) - p).norm())
    }

    /// Move (w, w') from p to q with one local series; |q - p| must be
    /// well inside the radius of convergence at p.
    fn step(&self, p: C64, state: [C64; 2], q: C64) -> Result<[C64; 2]> {
        let t = q - p;
        let a0 = self.p2[0] + self.p2[1] * p + self.p2[2] * p * p;
        let a1 = self.p2[1] + 2.0 * self.p2[2] * p;
        let a2 = self.p2[2];
        let b0 = self.p1[0] + self.p1[1] * p;
        let b1 = self.p1[1];
        let c0 = self.p0;

        let (mut cm1, mut cm0) = (state[0], state[1]); // c_n, c_{n+1}
        let mut w = cm1 + cm0 * t;
        let mut dw = cm0;
        let mut tn = t; // t^{n+1}
        let mut small = 0;
        for n in 0..MAX_TERMS {
            let nf = n as f64;
            let next = -((a1 * nf + b0) * (nf + 1.0) * cm0 + (a2 * nf * (nf - 1.0) + b1 * nf + c0) * cm1)
                / (a0 * (nf + 2.0) * (nf + 1.0));
            // next = c_{n+2}
            let dterm = next * (nf + 2.0) * tn;
            tn *= t;
            let term = next * tn;
            w += term;
            dw += dterm;
            if term.norm() <= 1e-17 * w.norm() && dterm.norm() <= 1e-17 * dw.norm() {
                small += 1;
                if small >= 3 {
                    return Ok([w, dw]);
                }
            } else {
                small = 0;
            }
            cm1 = cm0;
            cm0 = next;
        }
        Err(Error::NoConvergence { terms: MAX_TERMS })
    }

    /// Continue (w, w') from `start` along the polygonal path through `waypoints`.
    pub fn continue_along(&self, start: C64, state: [C64; 2], waypoints: &[C64]) -> Result<[C64; 2]> {
        let mut p = start;
        let mut s = state;
        for &q in waypoints {
            loop {
                let d = q - p;
                let dist = d.norm();
                if dist == 0.0 {
                    break;
                }
                let rad = Self::radius(p);
                if rad == 0.0 {
                    return Err(Error::Domain("continuation path hits a singular point".into()));
                }
                let h = STEP_FRACTION * rad;
                let next = if dist <= h { q } else { p + d * (h / dist) };
                s = self.step(p, s, next)?;
                p = next;
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn continues_log_solution() {
        // F(1,1;2;z) = -ln(1-z)/z; its derivative in closed form
        let ode = SecondOrderOde::gauss(r(1.0), r(1.0), r(2.0));
        let f = |z: C64| -(r(1.0) - z).ln() / z;
        let df = |z: C64| 1.0 / (z * (r(1.0) - z)) + (r(1.0) - z).ln() / (z * z);
        let z0 = c(0.3, 0.2);
        let z1 = c(-2.0, 1.5);
        let out = ode.continue_along(z0, [f(z0), df(z0)], &[c(0.3, 1.0), z1]).unwrap();
        assert!((out[0] - f(z1)).norm() < 1e-14);
        assert!((out[1] - df(z1)).norm() < 1e-14);
    }
}
