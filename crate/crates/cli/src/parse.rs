use fhtdiag::types::{Pt, Shore, C64};

/// Parses `a`, `bi`, `a+bi` or `a-bi`, with an optional trailing `+` or `-`
/// naming the shore of a real point: `0.3+` is 0.3 approached from above.
pub fn point(s: &str) -> Result<Pt, String> {
    let s = s.trim().replace(' ', "");
    if s.is_empty() {
        return Err("empty point".into());
    }
    let (body, shore) = match s.strip_suffix('+').or_else(|| s.strip_suffix('-')) {
        Some(b) if b.ends_with(|c: char| c.is_ascii_digit() || c == '.' || c == 'i') => {
            (b.to_string(), Some(if s.ends_with('+') { Shore::Plus } else { Shore::Minus }))
        }
        _ => (s.clone(), None),
    };
    let z = complex(&body)?;
    if shore.is_some() && z.im != 0.0 {
        return Err(format!("shore suffix on a non-real point: {s}"));
    }
    Ok(Pt { z, shore })
}

fn real(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

fn imaginary(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(s),
    }
}

pub fn complex(s: &str) -> Result<C64, String> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(real(s)?, 0.0));
    };
    // the sign between the parts: the last + or - that does not start the string
    // or follow an exponent marker
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(real(&body[..k])?, imaginary(&body[k..])?)),
        None => Ok(C64::new(0.0, imaginary(body)?)),
    }
}

pub fn list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| real(p.trim())).collect()
}

pub fn margin(s: &str) -> Result<f64, String> {
    let m = real(s)?;
    if !(0.0..0.5).contains(&m) {
        return Err("margin must lie in [0, 0.5)".into());
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kappas(pub Vec<f64>);

pub fn kappas(s: &str) -> Result<Kappas, String> {
    let k = list(s)?;
    if k.len() < 2 || k.windows(2).any(|w| w[1] <= w[0]) || k[0] <= 0.0 {
        return Err("need at least two increasing positive values".into());
    }
    Ok(Kappas(k))
}
