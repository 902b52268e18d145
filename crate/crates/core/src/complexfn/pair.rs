//! The solution pair of z(1-z)w'' + a(a+1)w = 0 normalized at infinity:
//! h(eta) = e^{i pi a} eta^{-a} F(a, a+1; 2a+2; 1/eta) and
//! s(eta) = -e^{-i pi a} eta^{a+1} F(-a-1, -a; -2a; 1/eta), with derivatives.

use super::hyp2f1::{pow_side, series, HypParams};
use super::ode::SecondOrderOde;
use crate::error::{Error, Result};
use crate::types::{r, Mat2, Pt, C64, I};
use std::f64::consts::PI;

/// |eta| beyond which the 1/eta series is summed directly.
pub const PAIR_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypPair {
    pub h: C64,
    pub h_prime: C64,
    pub s: C64,
    pub s_prime: C64,
}

impl HypPair {
    /// [[h, s], [h', s']]
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.h, self.s, self.h_prime, self.s_prime)
    }

    pub fn from_matrix(m: &Mat2) -> Self {
        HypPair { h: m.0[0][0], s: m.0[0][1], h_prime: m.0[1][0], s_prime: m.0[1][1] }
    }

    pub fn wronskian(&self) -> C64 {
        self.h * self.s_prime - self.s * self.h_prime
    }
}

pub fn check_parameter(a: C64) -> Result<()> {
    let two_a = 2.0 * a;
    let bad = |x: C64| x.im == 0.0 && x.re <= 0.0 && (x.re - x.re.round()).abs() < 1e-14;
    if bad(two_a + 2.0) || bad(-two_a) {
        return Err(Error::Pole { what: "pair at infinity (2a+2 or -2a)", at: format!("{a}") });
    }
    Ok(())
}

/// Principal-branch values from the 1/eta series; `side` fixes arg(eta) = +-pi
/// on the negative axis.
pub fn direct(a: C64, eta: C64, side: f64) -> Result<HypPair> {
    let w = r(1.0) / eta;
    let ea = (I * PI * a).exp();
    let f_h = series(&HypParams::new(a, a + 1.0, 2.0 * a + 2.0), w)?;
    let f_hp = series(&HypParams::new(a + 1.0, a + 1.0, 2.0 * a + 2.0), w)?;
    let f_s = series(&HypParams::new(-a - 1.0, -a, -2.0 * a), w)?;
    let f_sp = series(&HypParams::new(-a, -a, -2.0 * a), w)?;
    let p_ma = pow_side(eta, -a, side);
    let p_a = pow_side(eta, a, side);
    Ok(HypPair {
        h: ea * p_ma * f_h,
        h_prime: -a * ea * p_ma / eta * f_hp,
        s: -p_a * eta / ea * f_s,
        s_prime: -(a + 1.0) / ea * p_a * f_sp,
    })
}

/// Continue both columns from `start` (where `state` holds their values)
/// along the waypoints.
pub fn continue_pair(a: C64, start: C64, state: &HypPair, waypoints: &[C64]) -> Result<HypPair> {
    let ode = SecondOrderOde::pair(a);
    let h = ode.continue_along(start, [state.h, state.h_prime], waypoints)?;
    let s = ode.continue_along(start, [state.s, state.s_prime], waypoints)?;
    Ok(HypPair { h: h[0], h_prime: h[1], s: s[0], s_prime: s[1] })
}

/// (h, h', s, s') on the principal sheet, cut along (-inf, 1]. Points on the
/// cut need a shore (+ from above).
pub fn hyp_pair_at_infinity(a: C64, eta: Pt) -> Result<HypPair> {
    check_parameter(a)?;
    let z = eta.z;
    if z == r(0.0) || z == r(1.0) {
        return Err(Error::Domain(format!("pair at singular point eta = {z}")));
    }
    let on_cut = z.im == 0.0 && z.re < 1.0;
    let side = if z.im != 0.0 {
        z.im.signum()
    } else if on_cut {
        match eta.shore {
            Some(s) => s.sign(),
            None => return Err(Error::OnCut { at: format!("{eta}") }),
        }
    } else {
        1.0
    };
    if z.norm() >= PAIR_RADIUS && !(on_cut && z.re > 0.0) {
        return direct(a, z, side);
    }
    let start = C64::new(z.re, side * PAIR_RADIUS);
    let init = direct(a, start, side)?;
    continue_pair(a, start, &init, &[z])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn wronskian_is_constant() {
        let a = c(0.2, -0.3);
        for eta in [c(2.0, 0.0), c(5.0, 0.0), c(0.3, 0.4), c(-0.2, -0.1), c(1.2, 0.01)] {
            let p = hyp_pair_at_infinity(a, Pt::new(eta)).unwrap();
            let w = p.wronskian();
            assert!((w + (2.0 * a + 1.0)).norm() < 1e-12, "eta={eta}: {w}");
        }
    }

    #[test]
    fn continuation_matches_series_in_overlap() {
        let a = c(-0.3, 0.8);
        let eta = c(1.1, 1.2);
        let d = direct(a, eta, 1.0).unwrap();
        let start = c(1.1, 3.0);
        let init = direct(a, start, 1.0).unwrap();
        let v = continue_pair(a, start, &init, &[eta]).unwrap();
        for (x, y) in [(d.h, v.h), (d.h_prime, v.h_prime), (d.s, v.s), (d.s_prime, v.s_prime)] {
            assert!((x - y).norm() < 1e-13 * x.norm().max(1.0));
        }
    }

    #[test]
    fn substitution_a_to_minus_one_minus_a() {
        let a = c(0.15, -0.45);
        let eta = Pt::new(c(3.0, 0.2));
        let p = hyp_pair_at_infinity(a, eta).unwrap();
        let q = hyp_pair_at_infinity(-a - 1.0, eta).unwrap();
        assert!((p.h - q.s).norm() < 1e-13 * p.h.norm());
        assert!((p.h_prime - q.s_prime).norm() < 1e-13 * p.h_prime.norm());
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        let a = c(0.1, -0.4);
        let eta = c(2.3, 0.0);
        let h = 1e-3;
        let v = |e: C64| hyp_pair_at_infinity(a, Pt::new(e)).unwrap().h;
        let d2 = (v(eta + h) - 2.0 * v(eta) + v(eta - h)) / (h * h);
        let res = eta * (1.0 - eta) * d2 + a * (a + 1.0) * v(eta);
        assert!(res.norm() < 1e-6 * v(eta).norm().max(1.0), "{res}");
        // fourth-order difference of the analytic first derivative
        let dv = |e: C64| hyp_pair_at_infinity(a, Pt::new(e)).unwrap().h_prime;
        let d2 = (-dv(eta + 2.0 * h) + 8.0 * dv(eta + h) - 8.0 * dv(eta - h) + dv(eta - 2.0 * h)) / (12.0 * h);
        let res = eta * (1.0 - eta) * d2 + a * (a + 1.0) * v(eta);
        assert!(res.norm() < 1e-9, "{res}");
    }

    #[test]
    fn leading_behavior_at_infinity() {
        let a = c(0.1, 0.3);
        let eta = c(1e7, 1e7);
        let p = hyp_pair_at_infinity(a, Pt::new(eta)).unwrap();
        let lead = (I * PI * a).exp() * eta.powc(-a);
        assert!((p.h / lead - 1.0).norm() < 1e-6);
    }

    #[test]
    fn shores_need_tags() {
        let a = c(0.1, 0.3);
        assert!(hyp_pair_at_infinity(a, Pt::real(-0.5)).is_err());
        assert!(hyp_pair_at_infinity(a, Pt::real(0.5)).is_err());
        assert!(hyp_pair_at_infinity(a, Pt::plus(0.5)).is_ok());
        assert!(hyp_pair_at_infinity(a, Pt::real(1.3)).is_ok());
    }
}
