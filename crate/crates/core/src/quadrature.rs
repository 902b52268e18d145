//! Gauss-Legendre rules, graded composite meshes, principal-value integrals
//! and the finite Hilbert transforms between [b_L, 0] and [0, b_R].

use crate::error::{Error, Result};
use crate::spectral::Geometry;
use crate::types::{r, Side, C64};
use std::f64::consts::PI;

/// Nodes and weights on [-1, 1] by Newton iteration on P_n.
fn legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            t = 0.0;
            dp = 1.0;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// n-point Gauss-Legendre rule on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let (x, w) = legendre_unit(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    (x.iter().map(|t| mid + half * t).collect(), w.iter().map(|v| v * half).collect())
}

/// Endpoints toward which a composite mesh is refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    None,
    Left,
    Right,
    Both,
}

/// Composite mesh shape: points per panel, dyadic levels toward graded ends,
/// and whether the innermost panel uses x = a + (b-a) u^2.
#[derive(Debug, Clone, Copy)]
pub struct Mesh {
    pub points: usize,
    pub levels: usize,
    pub sqrt_end: bool,
}

impl Default for Mesh {
    fn default() -> Self {
        Mesh { points: 32, levels: 8, sqrt_end: true }
    }
}

impl Mesh {
    pub fn with_levels(levels: usize) -> Self {
        Mesh { levels, ..Mesh::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss(n: usize, a: f64, b: f64) -> Rule {
        let (nodes, weights) = gauss_legendre(n, a, b);
        Rule { nodes, weights }
    }

    /// Gauss rule on [a, b] after x = a + (b-a) u^2 (or mirrored toward b),
    /// exact for x^{-1/2} times a polynomial in sqrt(x - a).
    pub fn sqrt_panel(n: usize, a: f64, b: f64, toward_a: bool) -> Rule {
        let (u, wu) = gauss_legendre(n, 0.0, 1.0);
        let len = b - a;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (t, w) in u.iter().zip(&wu) {
            let off = len * t * t;
            nodes.push(if toward_a { a + off } else { b - off });
            weights.push(2.0 * len * t * w);
        }
        if !toward_a {
            nodes.reverse();
            weights.reverse();
        }
        Rule { nodes, weights }
    }

    /// Panels between consecutive breakpoints, n points each.
    pub fn composite(breaks: &[f64], n: usize) -> Rule {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in breaks.windows(2) {
            let (x, w) = gauss_legendre(n, p[0], p[1]);
            nodes.extend(x);
            weights.extend(w);
        }
        Rule { nodes, weights }
    }

    /// Breakpoints of a dyadically graded mesh.
    pub fn graded_breaks(a: f64, b: f64, grade: Grade, levels: usize) -> Vec<f64> {
        let len = b - a;
        let mut rel: Vec<f64> = vec![0.0, 1.0];
        match grade {
            Grade::None => {}
            Grade::Left => rel.extend((1..=levels).map(|k| 0.5f64.powi(k as i32))),
            Grade::Right => rel.extend((1..=levels).map(|k| 1.0 - 0.5f64.powi(k as i32))),
            Grade::Both => {
                rel.push(0.5);
                rel.extend((2..=levels + 1).map(|k| 0.5f64.powi(k as i32)));
                rel.extend((2..=levels + 1).map(|k| 1.0 - 0.5f64.powi(k as i32)));
            }
        }
        rel.sort_by(|x, y| x.partial_cmp(y).unwrap());
        rel.dedup();
        rel.into_iter().map(|t| a + len * t).collect()
    }

    /// Breakpoints refined dyadically `toward_a` times at a and `toward_b` at b.
    pub fn two_sided_breaks(a: f64, b: f64, toward_a: usize, toward_b: usize) -> Vec<f64> {
        let mut rel: Vec<f64> = vec![0.0, 1.0];
        if toward_a > 0 && toward_b > 0 {
            rel.push(0.5);
            rel.extend((2..=toward_a + 1).map(|k| 0.5f64.powi(k as i32)));
            rel.extend((2..=toward_b + 1).map(|k| 1.0 - 0.5f64.powi(k as i32)));
        } else {
            rel.extend((1..=toward_a).map(|k| 0.5f64.powi(k as i32)));
            rel.extend((1..=toward_b).map(|k| 1.0 - 0.5f64.powi(k as i32)));
        }
        rel.sort_by(|x, y| x.partial_cmp(y).unwrap());
        rel.dedup();
        rel.into_iter().map(|t| a + (b - a) * t).collect()
    }

    /// Panels on `breaks`, with the square-root substitution on the first
    /// and/or last panel.
    pub fn from_breaks(breaks: &[f64], points: usize, sqrt_first: bool, sqrt_last: bool) -> Rule {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let last = breaks.len() - 2;
        for (i, p) in breaks.windows(2).enumerate() {
            let panel = if sqrt_first && i == 0 {
                Rule::sqrt_panel(points, p[0], p[1], true)
            } else if sqrt_last && i == last {
                Rule::sqrt_panel(points, p[0], p[1], false)
            } else {
                Rule::gauss(points, p[0], p[1])
            };
            nodes.extend(panel.nodes);
            weights.extend(panel.weights);
        }
        Rule { nodes, weights }
    }

    pub fn graded(a: f64, b: f64, grade: Grade, mesh: Mesh) -> Rule {
        let breaks = Self::graded_breaks(a, b, grade, mesh.levels);
        let n = mesh.points;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let last = breaks.len() - 2;
        for (i, p) in breaks.windows(2).enumerate() {
            let left_end = i == 0 && matches!(grade, Grade::Left | Grade::Both);
            let right_end = i == last && matches!(grade, Grade::Right | Grade::Both);
            let panel = if mesh.sqrt_end && left_end {
                Rule::sqrt_panel(n, p[0], p[1], true)
            } else if mesh.sqrt_end && right_end {
                Rule::sqrt_panel(n, p[0], p[1], false)
            } else {
                Rule::gauss(n, p[0], p[1])
            };
            nodes.extend(panel.nodes);
            weights.extend(panel.weights);
        }
        Rule { nodes, weights }
    }

    /// Default rule on a subinterval: graded toward 0, and toward the outer end.
    pub fn on_side(side: Side, geom: &Geometry, mesh: Mesh) -> Rule {
        match side {
            Side::L => Rule::graded(geom.bl, 0.0, Grade::Both, mesh),
            Side::R => Rule::graded(0.0, geom.br, Grade::Both, mesh),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_c(&self, f: impl Fn(f64) -> C64) -> C64 {
        let terms: Vec<C64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| f(*x) * *w).collect();
        pairwise_sum_c(&terms)
    }
}

pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn pairwise_sum_c(v: &[C64]) -> C64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum_c(a) + pairwise_sum_c(b)
    }
}

/// Samples of a function at quadrature nodes of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
    pub interval: (f64, f64),
}

impl GridFunction {
    pub fn sample(rule: &Rule, interval: (f64, f64), f: impl Fn(f64) -> C64) -> Self {
        GridFunction {
            nodes: rule.nodes.clone(),
            weights: rule.weights.clone(),
            values: rule.nodes.iter().map(|x| f(*x)).collect(),
            interval,
        }
    }

    pub fn with_values(&self, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), self.nodes.len());
        GridFunction { values, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64, C64) -> C64) -> Self {
        self.with_values(self.nodes.iter().zip(&self.values).map(|(x, v)| f(*x, *v)).collect())
    }

    pub fn integral(&self) -> C64 {
        let t: Vec<C64> = self.values.iter().zip(&self.weights).map(|(v, w)| v * *w).collect();
        pairwise_sum_c(&t)
    }

    /// <self, other> = sum w f conj(g).
    pub fn inner(&self, other: &GridFunction) -> C64 {
        let t: Vec<C64> =
            self.values.iter().zip(&other.values).zip(&self.weights).map(|((f, g), w)| f * g.conj() * *w).collect();
        pairwise_sum_c(&t)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect())
    }

    pub fn check(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.weights.len() != n || self.values.len() != n {
            return Err(Error::Domain("grid function lengths differ".into()));
        }
        let (a, b) = self.interval;
        let increasing = self.nodes.windows(2).all(|p| p[0] < p[1]);
        let interior = self.nodes.iter().all(|x| *x > a && *x < b);
        if !increasing || !interior || self.weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::Domain("grid nodes must increase inside the interval with positive weights".into()));
        }
        Ok(())
    }
}

fn side_interval(side: Side, geom: &Geometry) -> (f64, f64) {
    match side {
        Side::L => (geom.bl, 0.0),
        Side::R => (0.0, geom.br),
    }
}

fn check_target(y: f64, side: Side, geom: &Geometry) -> Result<()> {
    let (a, b) = side_interval(side.other(), geom);
    if !(y > a && y < b) {
        return Err(Error::Domain(format!("point {y} must lie inside the complementary subinterval ({a}, {b})")));
    }
    Ok(())
}

/// H_L[f](y) (side L, y in (0, b_R)) or H_R[f](y) (side R, y in (b_L, 0)), with
/// f given on the grid of its own subinterval.
pub fn fht_apply(f: &GridFunction, y: f64, side: Side, geom: &Geometry) -> Result<C64> {
    check_target(y, side, geom)?;
    let t: Vec<C64> = f.nodes.iter().zip(&f.values).zip(&f.weights).map(|((x, v), w)| v * (*w / (x - y))).collect();
    Ok(pairwise_sum_c(&t) / PI)
}

/// Same transform for f given as a function; the mesh is refined toward 0
/// down to the scale of |y|.
pub fn fht_apply_fn(f: impl Fn(f64) -> C64, y: f64, side: Side, geom: &Geometry, mesh: Mesh) -> Result<C64> {
    check_target(y, side, geom)?;
    let (a, b) = side_interval(side, geom);
    let extra = ((b - a) / y.abs()).log2().ceil().max(0.0) as usize;
    let rule = Rule::graded(a, b, Grade::Both, Mesh { levels: mesh.levels.max(extra + 4), ..mesh });
    Ok(rule.integrate_c(|x| f(x) / (x - y)) / PI)
}

/// Principal value of the integral of f(x)/(x-y) over [a, b], y interior, by
/// subtracting f(y); panels break at y.
pub fn cauchy_pv(f: impl Fn(f64) -> C64, a: f64, b: f64, y: f64, mesh: Mesh) -> Result<C64> {
    if !(y > a && y < b) {
        return Err(Error::Domain(format!("principal value point {y} not inside ({a}, {b})")));
    }
    let fy = f(y);
    let left = Rule::graded(a, y, Grade::Both, mesh);
    let right = Rule::graded(y, b, Grade::Both, mesh);
    let g = |x: f64| if x == y { r(0.0) } else { (f(x) - fy) / (x - y) };
    let smooth = left.integrate_c(g) + right.integrate_c(g);
    Ok(smooth + fy * ((b - y) / (y - a)).ln())
}

/// PV integral for samples on a grid: f(y) from the caller, nodes at y moved
/// by half the local spacing.
pub fn cauchy_pv_grid(f: &GridFunction, y: f64, f_at_y: C64) -> Result<C64> {
    let (a, b) = f.interval;
    if !(y > a && y < b) {
        return Err(Error::Domain(format!("principal value point {y} not inside ({a}, {b})")));
    }
    let mut y = y;
    if let Some(i) = f.nodes.iter().position(|x| *x == y) {
        let next = f.nodes.get(i + 1).copied().unwrap_or(b);
        y += (next - y) / 2.0;
    }
    let t: Vec<C64> =
        f.nodes.iter().zip(&f.values).zip(&f.weights).map(|((x, v), w)| (v - f_at_y) * (*w / (x - y))).collect();
    Ok(pairwise_sum_c(&t) + f_at_y * ((b - y) / (y - a)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactness() {
        let rule = Rule::gauss(2, -1.0, 1.0);
        assert!((rule.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-15);
        let rule = Rule::gauss(3, 0.0, 1.0);
        assert!((rule.integrate(|x| x.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
        for n in [1, 5, 32, 64] {
            let (_, w) = gauss_legendre(n, -0.5, 2.0);
            assert!((w.iter().sum::<f64>() - 2.5).abs() < 1e-13);
        }
        assert_eq!(gauss_legendre(1, 0.0, 2.0), (vec![1.0], vec![2.0]));
    }

    #[test]
    fn spectral_convergence() {
        let exact = 3f64.atan() / 3.0;
        let err = |n| (Rule::gauss(n, 0.0, 1.0).integrate(|x| 1.0 / (1.0 + 9.0 * x * x)) - exact).abs();
        let mut n = 4;
        while err(2 * n) > 1e-14 {
            assert!(err(2 * n) < err(n) / 1e3 || n < 8, "n={n}: {} {}", err(n), err(2 * n));
            n *= 2;
        }
        let e = |n| (Rule::gauss(n, 0.0, 1.0).integrate(f64::exp) - (1f64.exp() - 1.0)).abs();
        assert!(e(6) < e(3) / 1e3);
    }

    #[test]
    fn graded_endpoint_singularity() {
        let plain = Rule::graded(0.0, 1.0, Grade::Left, Mesh { points: 32, levels: 63, sqrt_end: false });
        assert_eq!(plain.len(), 64 * 32);
        assert!((plain.integrate(|x| x.powf(-0.5)) - 2.0).abs() / 2.0 < 1e-6);
        let sq = Rule::graded(0.0, 1.0, Grade::Both, Mesh::default());
        assert!((sq.integrate(|x| x.powf(-0.5)) - 2.0).abs() < 1e-13);
        assert!((sq.integrate(|x| (1.0 - x).powf(-0.5)) - 2.0).abs() < 1e-13);
        let nodes_ok = sq.nodes.windows(2).all(|p| p[0] < p[1]);
        assert!(nodes_ok);
    }

    #[test]
    fn hilbert_transform_of_one() {
        let g = Geometry::symmetric();
        let rule = Rule::on_side(Side::L, &g, Mesh::default());
        let f = GridFunction::sample(&rule, (g.bl, 0.0), |_| r(1.0));
        f.check().unwrap();
        let v = fht_apply(&f, 0.5, Side::L, &g).unwrap();
        assert!((v.re - (1.0f64 / 3.0).ln() / PI).abs() < 1e-13);
        let v = fht_apply_fn(|_| r(1.0), 1e-4, Side::L, &g, Mesh::default()).unwrap();
        assert!((v.re - (1e-4f64 / (1.0 + 1e-4)).ln() / PI).abs() < 1e-12);
        assert!(fht_apply(&f, -0.5, Side::L, &g).is_err());
        let zero = f.with_values(vec![r(0.0); f.nodes.len()]);
        assert_eq!(fht_apply(&zero, 0.3, Side::L, &g).unwrap(), r(0.0));
    }

    #[test]
    fn adjoint_pairing() {
        let g = Geometry::new(-1.0, 2.0).unwrap();
        let mesh = Mesh::default();
        let fl = |x: f64| C64::new((x * 2.0).cos(), x * x);
        let gr = |y: f64| C64::new(y.exp() / 3.0, -y.sin());
        let lhs = Rule::on_side(Side::R, &g, mesh)
            .integrate_c(|y| fht_apply_fn(fl, y, Side::L, &g, mesh).unwrap() * gr(y).conj());
        let rhs = Rule::on_side(Side::L, &g, mesh)
            .integrate_c(|x| fl(x) * fht_apply_fn(gr, x, Side::R, &g, mesh).unwrap().conj());
        assert!((lhs + rhs).norm() < 1e-8, "{lhs} {rhs}");
    }

    #[test]
    fn principal_values() {
        let m = Mesh::default();
        assert!(cauchy_pv(|_| r(1.0), -1.0, 1.0, 0.0, m).unwrap().norm() < 1e-15);
        let v = cauchy_pv(r, -1.0, 1.0, 0.3, m).unwrap();
        assert!((v.re - (2.0 + 0.3 * (0.7f64 / 1.3).ln())).abs() < 1e-13);
        let v = cauchy_pv(|_| r(2.5), 0.0, 3.0, 1.0, m).unwrap();
        assert!((v.re - 2.5 * 2f64.ln()).abs() < 1e-14);
        let rule = Rule::gauss(64, -1.0, 1.0);
        let f = GridFunction::sample(&rule, (-1.0, 1.0), |x| r(x * x));
        let v = cauchy_pv_grid(&f, 0.3, r(0.09)).unwrap();
        let exact = 0.3 * 2.0 + 0.09 * (0.7f64 / 1.3).ln();
        assert!((v.re - exact).abs() < 1e-12, "{v}");
    }
}
