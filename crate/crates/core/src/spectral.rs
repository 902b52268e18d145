//! Parameter maps: a(lambda), g(z), kappa = -ln(lambda), the Mobius maps
//! M1..M4, and the (lambda, omega, mu) interconversion.

use crate::error::{Error, Result};
use crate::types::{r, Pt, Shore, C64, I};
use std::f64::consts::PI;

/// Endpoints of the two touching intervals [b_L, 0] and [0, b_R].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub bl: f64,
    pub br: f64,
}

impl Geometry {
    pub fn new(bl: f64, br: f64) -> Result<Self> {
        if !(bl < 0.0 && br > 0.0) || !bl.is_finite() || !br.is_finite() {
            return Err(Error::Domain(format!("need b_L < 0 < b_R, got ({bl}, {br})")));
        }
        Ok(Geometry { bl, br })
    }

    pub fn symmetric() -> Self {
        Geometry { bl: -1.0, br: 1.0 }
    }

    pub fn is_symmetric(&self) -> bool {
        self.br == 1.0 && self.bl == -1.0
    }

    pub fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::Domain("small-lambda asymptotics need b_R = -b_L = 1".into()))
        }
    }

    pub fn width(&self) -> f64 {
        self.br - self.bl
    }

    /// Threshold (b_L^2 + b_R^2)/8 of the continuous spectrum in omega.
    pub fn omega_threshold(&self) -> f64 {
        (self.bl * self.bl + self.br * self.br) / 8.0
    }

    /// M1(infinity) = b_R / (b_R - b_L), inside (0, 1).
    pub fn eta_at_infinity(&self) -> f64 {
        self.br / self.width()
    }
}

fn ln1p(w: C64) -> C64 {
    if w.norm() < 1e-3 {
        let mut sum = r(0.0);
        let mut p = w;
        for k in 1..8 {
            let term = p / k as f64;
            sum += if k % 2 == 1 { term } else { -term };
            p *= w;
        }
        sum
    } else {
        (r(1.0) + w).ln()
    }
}

/// a(lambda) = (1/(i pi)) ln((i + sqrt(4 lambda^2 - 1)) / (2 lambda)), with the
/// square root ~ 2 lambda at infinity. Real lambda in (-1/2, 1/2) needs a shore;
/// shore values are computed in closed form.
pub fn a_of_lambda(lambda: Pt) -> Result<C64> {
    let l = lambda.z;
    if l == r(0.0) {
        return Err(Error::Domain("a(lambda) at lambda = 0".into()));
    }
    if l.im == 0.0 && l.re.abs() < 0.5 {
        let shore = lambda.shore.ok_or(Error::OnCut { at: format!("{lambda}") })?;
        let x = l.re;
        let root = (1.0 - 4.0 * x * x).sqrt();
        // (1 - root) / 2|x| = 2|x| / (1 + root), written without cancellation
        let log_big = ((1.0 + root) / (2.0 * x.abs())).ln();
        let log_modulus = shore.sign() * log_big;
        return Ok(C64::new(0.5 * x.signum(), -log_modulus / PI));
    }
    let u = r(1.0) / (4.0 * l * l);
    let root = 2.0 * l * (r(1.0) - u).sqrt();
    if (I + root).norm() < 0.5 {
        // (i + root)(i - root) = -4 lambda^2 keeps small lambda in the lower half plane exact
        return Ok((-2.0 * l / (I - root)).ln() / (I * PI));
    }
    // (i + 2 lambda sqrt(1-u)) / (2 lambda) - 1
    let w = I / (2.0 * l) - u / ((r(1.0) - u).sqrt() + 1.0);
    Ok(ln1p(w) / (I * PI))
}

/// g(z) = a(-z/2); for the normalized geometry. Real z in (-1, 1) needs a shore.
pub fn g_of_z(z: Pt) -> Result<C64> {
    if z.z == r(0.0) {
        return Err(Error::Domain("g(z) at z = 0".into()));
    }
    a_of_lambda(Pt { z: -z.z / 2.0, shore: z.shore.map(Shore::flip) })
}

/// kappa = -ln(lambda), principal branch; on the negative axis the shore picks
/// arg = +pi (upper) or -pi (lower).
pub fn kappa_of_lambda(lambda: Pt) -> Result<C64> {
    let l = lambda.z;
    if l == r(0.0) {
        return Err(Error::Domain("kappa at lambda = 0".into()));
    }
    if l.im == 0.0 && l.re < 0.0 {
        let s = lambda.shore.map(|s| s.sign()).unwrap_or(1.0);
        return Ok(-C64::new(l.re.abs().ln(), s * PI));
    }
    Ok(-l.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mobius {
    M1,
    M2,
    M3,
    M4,
}

pub fn mobius(which: Mobius, x: C64, g: &Geometry) -> Result<C64> {
    let (bl, br) = (g.bl, g.br);
    let (num, den) = match which {
        Mobius::M1 => (br * (x - bl), x * (br - bl)),
        Mobius::M2 => (br * bl * x, x * (br + bl) - br * bl),
        Mobius::M3 => (-bl * (x - br), x * (br - bl)),
        Mobius::M4 => (x * (br - bl), x * (br + bl) - 2.0 * br * bl),
    };
    if den == r(0.0) {
        return Err(Error::Pole { what: "Mobius map", at: format!("{x}") });
    }
    Ok(num / den)
}

/// Mutually consistent spectral parameters. The (omega, mu) fields belong to
/// the commuting differential operator and are defined for real
/// lambda in [-1, 1] without zero, through a = a_-(-|lambda|/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Pt,
    pub lambda_sq: C64,
    pub a: C64,
    pub kappa: C64,
    pub omega: C64,
    pub mu: C64,
}

#[derive(Debug, Clone, Copy)]
pub enum SpectralInput {
    Lambda(Pt),
    Omega(f64),
    Mu(f64),
}

/// a_-(-|lambda|/2) = -1/2 + i mu for real 0 < |lambda| <= 1.
pub fn half_lambda_parameter(lambda_abs: f64) -> Result<C64> {
    if !(lambda_abs > 0.0 && lambda_abs <= 1.0) {
        return Err(Error::Domain(format!("|lambda| = {lambda_abs} outside (0, 1]")));
    }
    a_of_lambda(Pt::minus(-lambda_abs / 2.0))
}

fn omega_of_a(a: C64, g: &Geometry) -> C64 {
    let s = g.br + g.bl;
    s * s / 8.0 + g.bl * g.br * a * (a + 1.0)
}

pub fn mu_of_omega(omega: f64, g: &Geometry) -> Result<f64> {
    let s = g.br + g.bl;
    let m2 = (omega - s * s / 8.0) / (-g.bl * g.br) - 0.25;
    if m2 < 0.0 {
        return Err(Error::Domain(format!("omega = {omega} below the threshold {}", g.omega_threshold())));
    }
    Ok(m2.sqrt())
}

pub fn spectral_point(input: SpectralInput, g: &Geometry) -> Result<SpectralPoint> {
    let (lambda, mu) = match input {
        SpectralInput::Lambda(l) => {
            let real_in_band = l.z.im == 0.0 && l.z.re.abs() <= 1.0 && l.z.re != 0.0;
            if !real_in_band {
                return Err(Error::Domain(format!(
                    "omega/mu are defined for real 0 < |lambda| <= 1, got {l}"
                )));
            }
            let asp = half_lambda_parameter(l.z.re.abs())?;
            (l, asp.im)
        }
        SpectralInput::Mu(mu) => {
            if !(mu >= 0.0) {
                return Err(Error::Domain(format!("mu = {mu} must be real and non-negative")));
            }
            (Pt::real(1.0 / (PI * mu).cosh()), mu)
        }
        SpectralInput::Omega(w) => {
            let mu = mu_of_omega(w, g)?;
            (Pt::real(1.0 / (PI * mu).cosh()), mu)
        }
    };
    let l = lambda.z;
    let lam_pt = if l.im == 0.0 && l.re.abs() < 0.5 && lambda.shore.is_none() {
        Pt { z: l, shore: Some(Shore::Plus) }
    } else {
        lambda
    };
    let a = a_of_lambda(lam_pt)?;
    let asp = C64::new(-0.5, mu);
    Ok(SpectralPoint {
        lambda: lam_pt,
        lambda_sq: l * l,
        a,
        kappa: kappa_of_lambda(lam_pt)?,
        omega: omega_of_a(asp, g),
        mu: r(mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn a_at_one_is_one_sixth() {
        // (i + sqrt 3)/2 = e^{i pi/6}
        let a = a_of_lambda(Pt::real(1.0)).unwrap();
        assert!((a - r(1.0 / 6.0)).norm() < 1e-15);
        assert!((a_of_lambda(Pt::real(-1.0)).unwrap() + 1.0 / 6.0).norm() < 1e-15);
    }

    #[test]
    fn a_vanishes_at_infinity() {
        let a = a_of_lambda(Pt::new(c(1e9, 3e8))).unwrap();
        assert!(a.norm() < 1e-9);
        // leading behavior 1/(2 pi lambda)
        let l = c(1e6, 0.0);
        let a = a_of_lambda(Pt::new(l)).unwrap();
        assert!((a * 2.0 * PI * l - 1.0).norm() < 1e-10);
    }

    #[test]
    fn shores_sum_and_real_parts() {
        let p = a_of_lambda(Pt::plus(0.25)).unwrap();
        let m = a_of_lambda(Pt::minus(0.25)).unwrap();
        assert!((p + m - 1.0).norm() < 1e-15);
        assert!((p.re - 0.5).abs() < 1e-15 && p.im < 0.0 && (p.im + m.im).abs() < 1e-15);
        let p = a_of_lambda(Pt::plus(-0.3)).unwrap();
        let m = a_of_lambda(Pt::minus(-0.3)).unwrap();
        assert!((p + m + 1.0).norm() < 1e-15);
        assert!((m.re + 0.5).abs() < 1e-15 && m.im > 0.0);
    }

    #[test]
    fn tiny_lambda_on_both_shores() {
        for x in [-1e-12, 1e-15, -3e-20] {
            let p = a_of_lambda(Pt::plus(x)).unwrap();
            let m = a_of_lambda(Pt::minus(x)).unwrap();
            let expect = (1.0 / x.abs()).ln() / PI;
            assert!((p.im + expect).abs() < 1e-12 && (m.im - expect).abs() < 1e-12, "{x}: {p} {m}");
        }
    }

    #[test]
    fn tiny_complex_lambda_is_conjugate_symmetric() {
        // a(lambda) = 1/2 + i ln(lambda)/pi + O(lambda^2) as lambda -> 0
        for k in [4, 8, 12] {
            let l = C64::from_polar(10f64.powi(-k), PI / 4.0);
            let up = a_of_lambda(Pt::new(l)).unwrap();
            let down = a_of_lambda(Pt::new(l.conj())).unwrap();
            assert!((up - down.conj()).norm() < 1e-12, "{k}: {up} {down}");
            assert!((up - (0.5 + I * l.ln() / PI)).norm() < 1e-7);
        }
    }

    #[test]
    fn shore_values_match_offset_limits() {
        for x in [0.1, 0.37, -0.2, -0.45] {
            for s in [Shore::Plus, Shore::Minus] {
                let exact = a_of_lambda(Pt::on(x, s)).unwrap();
                let near = a_of_lambda(Pt::new(c(x, s.sign() * 1e-12))).unwrap();
                assert!((exact - near).norm() < 1e-10, "x={x} {s:?}");
            }
        }
    }

    #[test]
    fn g_values() {
        assert!(g_of_z(Pt::new(c(1e10, 0.0))).unwrap().norm() < 1e-9);
        assert!((g_of_z(Pt::real(-2.0)).unwrap() - 1.0 / 6.0).norm() < 1e-15);
        let sum = g_of_z(Pt::plus(-0.5)).unwrap() + g_of_z(Pt::minus(-0.5)).unwrap();
        assert!((sum - 1.0).norm() < 1e-15);
    }

    #[test]
    fn mobius_values() {
        let g = Geometry::new(-1.0, 2.0).unwrap();
        assert!(mobius(Mobius::M1, r(g.bl), &g).unwrap().norm() < 1e-16);
        assert!((mobius(Mobius::M1, r(g.br), &g).unwrap() - 1.0).norm() < 1e-15);
        let x = r(0.37);
        let lhs = mobius(Mobius::M3, x, &g).unwrap();
        let rhs = mobius(Mobius::M1, mobius(Mobius::M2, x, &g).unwrap(), &g).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        assert!(mobius(Mobius::M1, r(0.0), &g).is_err());
    }

    #[test]
    fn spectral_point_conversions() {
        let g = Geometry::symmetric();
        let p = spectral_point(SpectralInput::Omega(0.25), &g).unwrap();
        assert!(p.mu.norm() < 1e-15);
        assert!((p.lambda.z - 1.0).norm() < 1e-15);
        let p = spectral_point(SpectralInput::Lambda(Pt::real(1.0)), &g).unwrap();
        assert!((p.omega - 0.25).norm() < 1e-15);
        assert!((p.a - 1.0 / 6.0).norm() < 1e-15);
        let p = spectral_point(SpectralInput::Mu(0.7), &g).unwrap();
        let back = spectral_point(SpectralInput::Lambda(p.lambda), &g).unwrap();
        assert!((back.mu - p.mu).norm() < 1e-12);
        assert!((back.omega - p.omega).norm() < 1e-12);
        assert!(spectral_point(SpectralInput::Omega(0.1), &g).is_err());
    }
}
