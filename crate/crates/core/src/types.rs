use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Which side of an oriented real cut a boundary value is taken from.
/// `Plus` is the upper side (the left of a left-to-right oriented segment).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shore {
    Plus,
    Minus,
}

impl Shore {
    pub fn sign(self) -> f64 {
        match self {
            Shore::Plus => 1.0,
            Shore::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Shore {
        match self {
            Shore::Plus => Shore::Minus,
            Shore::Minus => Shore::Plus,
        }
    }
}

/// Which subinterval: [b_L, 0] or [0, b_R].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

/// A complex number with an optional boundary side, used for values on cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub z: C64,
    pub shore: Option<Shore>,
}

impl Pt {
    pub fn new(z: C64) -> Self {
        Pt { z, shore: None }
    }

    pub fn real(x: f64) -> Self {
        Pt::new(r(x))
    }

    pub fn plus(x: f64) -> Self {
        Pt { z: r(x), shore: Some(Shore::Plus) }
    }

    pub fn minus(x: f64) -> Self {
        Pt { z: r(x), shore: Some(Shore::Minus) }
    }

    pub fn on(x: f64, shore: Shore) -> Self {
        Pt { z: r(x), shore: Some(shore) }
    }

    /// True when the point sits on the real axis with a shore tag.
    pub fn is_shore(&self) -> bool {
        self.shore.is_some() && self.z.im == 0.0
    }

    /// Side of the real axis the value is taken from: the sign of Im z, or the
    /// shore for real points. Zero for untagged real points.
    pub fn side(&self) -> f64 {
        if self.z.im > 0.0 {
            1.0
        } else if self.z.im < 0.0 {
            -1.0
        } else {
            self.shore.map(|s| s.sign()).unwrap_or(0.0)
        }
    }
}

impl From<C64> for Pt {
    fn from(z: C64) -> Self {
        Pt::new(z)
    }
}

impl From<f64> for Pt {
    fn from(x: f64) -> Self {
        Pt::real(x)
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.z.re, self.z.im)?;
        match self.shore {
            Some(Shore::Plus) => write!(f, "+"),
            Some(Shore::Minus) => write!(f, "-"),
            None => Ok(()),
        }
    }
}

/// Dense 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(r(1.0), r(0.0), r(0.0), r(1.0))
    }

    pub fn zero() -> Self {
        Mat2::new(r(0.0), r(0.0), r(0.0), r(0.0))
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, r(0.0), r(0.0), d)
    }

    pub fn upper(b: C64) -> Self {
        Mat2::new(r(1.0), b, r(0.0), r(1.0))
    }

    pub fn lower(c: C64) -> Self {
        Mat2::new(r(1.0), r(0.0), c, r(1.0))
    }

    pub fn sigma1() -> Self {
        Mat2::new(r(0.0), r(1.0), r(1.0), r(0.0))
    }

    pub fn sigma2() -> Self {
        Mat2::new(r(0.0), -I, I, r(0.0))
    }

    pub fn sigma3() -> Self {
        Mat2::diag(r(1.0), r(-1.0))
    }

    /// Outer product u v^t.
    pub fn outer(u: [C64; 2], v: [C64; 2]) -> Self {
        Mat2::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inv(&self) -> Mat2 {
        let d = self.det();
        let [[a, b], [c, e]] = self.0;
        Mat2::new(e / d, -b / d, -c / d, a / d)
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a, c, b, d)
    }

    pub fn conj(&self) -> Mat2 {
        self.map(|x| x.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(f(a), f(b), f(c), f(d))
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        self.map(|x| x * s)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn col(&self, j: usize) -> [C64; 2] {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn row(&self, i: usize) -> [C64; 2] {
        self.0[i]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = self.0;
        let b = o.0;
        let mut out = [[r(0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut out = self.0;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += o.0[i][j];
            }
        }
        Mat2(out)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.map(|x| -x)
    }
}

/// Dot product without conjugation, u^t v.
pub fn dot(u: [C64; 2], v: [C64; 2]) -> C64 {
    u[0] * v[0] + u[1] * v[1]
}

/// Relative distance ||a - b|| / max(||b||, floor).
pub fn rel_dist(a: &Mat2, b: &Mat2) -> f64 {
    (*a - *b).norm() / b.norm().max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_relations() {
        let (s1, s2, s3) = (Mat2::sigma1(), Mat2::sigma2(), Mat2::sigma3());
        for s in [s1, s2, s3] {
            assert!((s * s - Mat2::identity()).norm() < 1e-15);
        }
        assert!((s1 * s2 - s3.scale(I)).norm() < 1e-15);
        assert!((s2 * s3 - s1.scale(I)).norm() < 1e-15);
        assert!((s3 * s1 - s2.scale(I)).norm() < 1e-15);
    }

    #[test]
    fn inverse_and_det() {
        let m = Mat2::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, -0.7), c(2.0, 0.0));
        assert!((m * m.inv() - Mat2::identity()).norm() < 1e-14);
        let d = (m * m).det() - m.det() * m.det();
        assert!(d.norm() < 1e-13);
    }
}
