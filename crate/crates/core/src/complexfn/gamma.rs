use crate::error::{Error, Result};
use crate::types::{r, C64};
use std::f64::consts::PI;

const SHIFT: f64 = 15.0;

// B_{2k} / (2k (2k-1))
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

// B_{2k} / (2k)
const DIGAMMA_ASY: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

pub fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-14
}

fn shift_count(z: C64) -> usize {
    if z.re >= SHIFT {
        0
    } else {
        (SHIFT - z.re).ceil() as usize
    }
}

/// Principal branch of log Gamma, continuous on C minus (-inf, 0].
pub fn ln_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::Pole { what: "log-gamma", at: format!("{z}") });
    }
    let n = shift_count(z);
    let mut acc = r(0.0);
    for k in 0..n {
        acc += (z + k as f64).ln();
    }
    let w = z + n as f64;
    let lw = w.ln();
    let w2 = w * w;
    let mut tail = r(0.0);
    let mut pw = w;
    for coef in STIRLING {
        tail += coef / pw;
        pw *= w2;
    }
    Ok((w - 0.5) * lw - w + 0.5 * (2.0 * PI).ln() + tail - acc)
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(ln_gamma(z)?.exp())
}

/// 1/Gamma(z), entire; zero at the poles of Gamma.
pub fn rgamma(z: C64) -> C64 {
    if is_pole(z) {
        return r(0.0);
    }
    (-ln_gamma(z).expect("pole handled above")).exp()
}

pub fn digamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::Pole { what: "digamma", at: format!("{z}") });
    }
    let n = shift_count(z);
    let mut acc = r(0.0);
    for k in 0..n {
        acc += 1.0 / (z + k as f64);
    }
    let w = z + n as f64;
    let w2 = w * w;
    let mut tail = r(0.0);
    let mut pw = w2;
    for coef in DIGAMMA_ASY {
        tail += coef / pw;
        pw *= w2;
    }
    Ok(w.ln() - 0.5 / w - tail - acc)
}

/// prod Gamma(num) / prod Gamma(den). Poles in the denominator give zero,
/// poles in the numerator are an error.
pub fn gamma_ratio(num: &[C64], den: &[C64]) -> Result<C64> {
    if den.iter().any(|&d| is_pole(d)) {
        for &n in num {
            if is_pole(n) {
                return Err(Error::Pole { what: "gamma ratio", at: format!("{n}") });
            }
        }
        return Ok(r(0.0));
    }
    let mut s = r(0.0);
    for &n in num {
        s += ln_gamma(n)?;
    }
    for &d in den {
        s -= ln_gamma(d)?;
    }
    Ok(s.exp())
}
