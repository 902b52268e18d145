//! The integrable kernel K(z, x), the resolvent kernel R(z, x; lambda) built
//! from Gamma, its jump across the lambda cut, and Nystrom discretizations used
//! as brute-force oracles.

use crate::diagonalization::SingularPair;
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::rhp::{f1_g1, f2_g2, GammaSolver};
use crate::spectral::Geometry;
use crate::types::{dot, r, Mat2, Pt, Side, C64, I};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

pub type CMatrix = DMatrix<C64>;

/// Centered-difference step for Gamma along a subinterval, relative to b_R - b_L.
pub const SAME_INTERVAL_STEP: f64 = 1e-5;

/// Below this separation, relative to the distance from x to the nearest
/// endpoint, same-interval values of R use the expansion of
/// Gamma^{-1}(x) Gamma(z) about x instead of the quotient.
const NEAR_DIAGONAL: f64 = 1e-5;

pub fn side_of(x: f64, g: &Geometry) -> Option<Side> {
    if x > g.bl && x < 0.0 {
        Some(Side::L)
    } else if x > 0.0 && x < g.br {
        Some(Side::R)
    } else {
        None
    }
}

/// K(z, x) = (chi_L(x) chi_R(z) + chi_R(x) chi_L(z)) / (2 pi i (x - z)).
pub fn k_kernel(z: f64, x: f64, g: &Geometry) -> Result<C64> {
    match (side_of(z, g), side_of(x, g)) {
        (Some(a), Some(b)) if a != b => Ok(r(1.0) / (2.0 * PI * I * (x - z))),
        (Some(_), Some(_)) => Ok(r(0.0)),
        _ => Err(Error::Domain(format!("kernel points must be interior: z={z}, x={x}"))),
    }
}

fn k_unchecked(z: f64, x: f64) -> C64 {
    if (z < 0.0) != (x < 0.0) {
        r(1.0) / (2.0 * PI * I * (x - z))
    } else {
        r(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KernelSample {
    pub z: f64,
    pub x: f64,
    pub value: C64,
}

/// Gamma and its z-derivative on the + shore at one interior point.
#[derive(Debug, Clone, Copy)]
struct NodeData {
    x: f64,
    gamma: Mat2,
    gamma_inv: Mat2,
    deriv: Mat2,
}

/// R(z, x; lambda) for a fixed lambda, with (I + R)(I - K/lambda) = I.
///
/// The bilinear form g1^t(x) Gamma^{-1}(x) Gamma(z) f1(z) / (2 pi i lambda (z - x))
/// reproduces this resolvent on same-subinterval pairs; on opposite-subinterval
/// pairs it carries the wrong sign (it is the resolvent of -K there), so those
/// entries are negated. Values of Gamma on the interval are taken on the + shore;
/// the bilinear form does not depend on the shore because J f1 = f1 and
/// g1^t J^{-1} = g1^t.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub solver: GammaSolver,
}

impl Resolvent {
    pub fn new(lambda: Pt, geom: Geometry) -> Result<Self> {
        Ok(Resolvent { solver: GammaSolver::new(lambda, geom)? })
    }

    fn node(&self, x: f64) -> Result<NodeData> {
        if side_of(x, &self.solver.geom).is_none() {
            return Err(Error::NearEndpoint { at: format!("{x}"), guard: 0.0 });
        }
        let (gamma, deriv) = self.solver.eval_with_derivative(Pt::plus(x))?;
        Ok(NodeData { x, gamma, gamma_inv: gamma.inv(), deriv })
    }

    /// The bilinear form without the sign correction.
    fn bilinear(&self, zd: &NodeData, xd: &NodeData) -> C64 {
        let g = &self.solver.geom;
        let lambda = self.solver.lambda.z;
        let (f1z, _) = f1_g1(zd.x, g);
        let (_, g1x) = f1_g1(xd.x, g);
        let same = (zd.x < 0.0) == (xd.x < 0.0);
        let local = xd.x.abs().min((xd.x - g.bl).abs()).min((xd.x - g.br).abs());
        if same && (zd.x - xd.x).abs() < NEAR_DIAGONAL * local {
            let slope = (zd.deriv + xd.deriv).scale(r(0.5));
            return dot(g1x, (xd.gamma_inv * slope).apply(f1z)) / (2.0 * PI * I * lambda);
        }
        let n = dot(g1x, (xd.gamma_inv * zd.gamma).apply(f1z));
        n / (2.0 * PI * I * lambda * (zd.x - xd.x))
    }

    fn pair(&self, zd: &NodeData, xd: &NodeData) -> C64 {
        let v = self.bilinear(zd, xd);
        if (zd.x < 0.0) == (xd.x < 0.0) {
            v
        } else {
            -v
        }
    }

    /// R(z, x); the removable singularity at z = x is resolved with dGamma/dz.
    pub fn kernel(&self, z: f64, x: f64) -> Result<C64> {
        let zd = self.node(z)?;
        let xd = if x == z { zd } else { self.node(x)? };
        Ok(self.pair(&zd, &xd))
    }

    /// The bilinear form for every pair of points, with no sign flip across the intervals.
    pub fn kernel_unsigned(&self, z: f64, x: f64) -> Result<C64> {
        let zd = self.node(z)?;
        let xd = if x == z { zd } else { self.node(x)? };
        Ok(self.bilinear(&zd, &xd))
    }

    /// Same-point value with dGamma/dz replaced by a centered difference of
    /// step SAME_INTERVAL_STEP * (b_R - b_L).
    pub fn diagonal_by_difference(&self, x: f64) -> Result<C64> {
        let g = &self.solver.geom;
        let h = SAME_INTERVAL_STEP * g.width();
        let p = self.solver.eval(Pt::plus(x + h))?;
        let m = self.solver.eval(Pt::plus(x - h))?;
        let gx = self.solver.eval(Pt::plus(x))?;
        let (f1, g1) = f1_g1(x, g);
        let n = dot(g1, (gx.inv() * (p - m)).apply(f1)) / (2.0 * h);
        Ok(n / (2.0 * PI * I * self.solver.lambda.z))
    }

    fn nodes(&self, xs: &[f64]) -> Result<Vec<NodeData>> {
        xs.par_iter().map(|x| self.node(*x)).collect()
    }

    /// R at all pairs (rows z, columns x), Gamma evaluated once per point.
    pub fn matrix(&self, rows: &[f64], cols: &[f64]) -> Result<CMatrix> {
        let zd = self.nodes(rows)?;
        let xd = self.nodes(cols)?;
        Ok(CMatrix::from_fn(rows.len(), cols.len(), |i, j| self.pair(&zd[i], &xd[j])))
    }
}

pub fn resolvent_kernel(z: f64, x: f64, lambda: Pt, geom: Geometry) -> Result<C64> {
    Resolvent::new(lambda, geom)?.kernel(z, x)
}

/// R(z, x; lambda_+) - R(z, x; lambda_-) from the bilinear form in f2, g2
/// (with the opposite-subinterval sign of `Resolvent`).
pub fn resolvent_jump(z: f64, x: f64, lambda: f64, geom: Geometry) -> Result<C64> {
    let (sz, sx) = (side_of(z, &geom), side_of(x, &geom));
    if sz.is_none() || sx.is_none() {
        return Err(Error::Domain(format!("resolvent jump needs interior points: z={z}, x={x}")));
    }
    // each factor is used only where its entry is analytic, so any shore works
    let (f2x, _) = f2_g2(Pt::plus(x), lambda, &geom)?;
    let (_, g2z) = f2_g2(Pt::plus(z), lambda, &geom)?;
    let (f1z, _) = f1_g1(z, &geom);
    let (_, g1x) = f1_g1(x, &geom);
    let v = dot(g1x, f2x) * dot(g2z, f1z) / (2.0 * PI * I * lambda * x * z);
    Ok(if sz == sx { v } else { -v })
}

/// Same-interval closed form b_L b_R (2a+1) d(x) d(z) / (sgn(lambda) pi x z (b_R - b_L)),
/// with d = d_R on (0, b_R) and d = d_L on (b_L, 0).
pub fn resolvent_jump_same_interval(z: f64, x: f64, lambda: f64, geom: Geometry) -> Result<C64> {
    let (sz, sx) = (side_of(z, &geom), side_of(x, &geom));
    if sz.is_none() || sz != sx {
        return Err(Error::Domain("points must share a subinterval".into()));
    }
    let sp = SingularPair::new(-lambda.abs(), geom)?;
    let d = |t: f64| match sz {
        Some(Side::R) => sp.d_right(Pt::real(t)),
        _ => sp.d_left(Pt::real(t)),
    };
    let pre = geom.bl * geom.br * (2.0 * sp.a_minus + 1.0) / (lambda.signum() * PI * x * z * geom.width());
    Ok(pre * d(x)? * d(z)?)
}

/// Kernel of H*_R H_R on (0, b_R) (side R) or H*_L H_L on (b_L, 0) (side L):
/// (1/pi^2) times the integral over the other subinterval of dt / ((p - t)(q - t)).
pub fn hstar_h_kernel(p: f64, q: f64, side: Side, g: &Geometry) -> f64 {
    let (lo, hi) = match side {
        Side::R => (g.bl, 0.0),
        Side::L => (0.0, g.br),
    };
    if p == q {
        return -(1.0 / (p - lo) - 1.0 / (p - hi)) / (PI * PI);
    }
    let d = q - p;
    let diff = log_ratio(q - lo, p - lo, d) - log_ratio(q - hi, p - hi, d);
    diff / (PI * PI * (p - q))
}

/// ln(u / v) where u - v = d; ln_1p for nearby arguments.
fn log_ratio(u: f64, v: f64, d: f64) -> f64 {
    if (d / v).abs() < 0.5 {
        (d / v).ln_1p()
    } else {
        (u / v).ln()
    }
}

/// Gauss-Legendre panels, `points` each, on dyadically graded breakpoints.
fn panel_rule(a: f64, b: f64, toward_a: usize, toward_b: usize, points: usize) -> Rule {
    let breaks = Rule::two_sided_breaks(a, b, toward_a, toward_b);
    Rule::composite(&breaks, points)
}

/// n evaluation nodes split between the subintervals, graded toward 0 with
/// about `EVAL_POINTS` Gauss points per panel.
const EVAL_POINTS: usize = 15;
/// Points per panel and extra dyadic levels toward 0 on the solve grid.
const SOLVE_POINTS: usize = 12;
const SOLVE_EXTRA_LEVELS: usize = 16;
const SOLVE_OUTER_LEVELS: usize = 8;

fn eval_rule(a: f64, b: f64, n: usize, zero_at_a: bool) -> (Rule, usize) {
    let panels = (n / EVAL_POINTS).max(1);
    let levels = panels - 1;
    let breaks =
        if zero_at_a { Rule::two_sided_breaks(a, b, levels, 0) } else { Rule::two_sided_breaks(a, b, 0, levels) };
    let count = breaks.len() - 1;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (i, p) in breaks.windows(2).enumerate() {
        let m = n / count + usize::from(i < n % count);
        let rule = Rule::gauss(m, p[0], p[1]);
        nodes.extend(rule.nodes);
        weights.extend(rule.weights);
    }
    (Rule { nodes, weights }, levels)
}

fn join(a: &Rule, b: &Rule) -> Rule {
    Rule {
        nodes: a.nodes.iter().chain(&b.nodes).copied().collect(),
        weights: a.weights.iter().chain(&b.weights).copied().collect(),
    }
}

/// Nystrom discretization. The n-node evaluation grid carries the reported
/// matrices; inverses are computed on a solve grid refined much further toward
/// 0 and brought to the evaluation grid by Nystrom interpolation, because the
/// kernels are homogeneous of degree -1 at the corner z = x = 0 and any panel
/// touching it carries a scale-independent error.
#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub geom: Geometry,
    pub left: Rule,
    pub right: Rule,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub solve_left: Rule,
    pub solve_right: Rule,
    /// K-hat on the evaluation grid (symmetrically weighted).
    pub k_hat: CMatrix,
    /// H_L: [b_L, 0] to [0, b_R], rows on the right grid.
    pub h_l: CMatrix,
    /// H_R: [0, b_R] to [b_L, 0], rows on the left grid.
    pub h_r: CMatrix,
    pub hr_star_hr: CMatrix,
    pub hl_star_hl: CMatrix,
}

/// Weighted matrix sqrt(w_i) k(x_i, y_j) sqrt(v_j).
pub fn weighted(rows: &Rule, cols: &Rule, k: impl Fn(f64, f64) -> C64 + Sync) -> CMatrix {
    let entries: Vec<C64> = (0..rows.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let k = &k;
            (0..cols.len()).map(move |j| k(rows.nodes[i], cols.nodes[j]) * (rows.weights[i] * cols.weights[j]).sqrt())
        })
        .collect();
    CMatrix::from_row_slice(rows.len(), cols.len(), &entries)
}

pub fn build_nystrom(geom: Geometry, n: usize) -> Result<NystromOperator> {
    if n < 8 {
        return Err(Error::Domain(format!("Nystrom needs n >= 8, got {n}")));
    }
    let nl = n / 2;
    let (left, levels_l) = eval_rule(geom.bl, 0.0, nl, false);
    let (right, levels_r) = eval_rule(0.0, geom.br, n - nl, true);
    let solve_left = panel_rule(geom.bl, 0.0, SOLVE_OUTER_LEVELS, levels_l + SOLVE_EXTRA_LEVELS, SOLVE_POINTS);
    let solve_right = panel_rule(0.0, geom.br, levels_r + SOLVE_EXTRA_LEVELS, SOLVE_OUTER_LEVELS, SOLVE_POINTS);
    let full = join(&left, &right);
    let k_hat = weighted(&full, &full, k_unchecked);
    let h_l = weighted(&right, &left, |y, x| r(1.0 / (PI * (x - y))));
    let h_r = weighted(&left, &right, |x, y| r(1.0 / (PI * (y - x))));
    let hr_star_hr = h_r.adjoint() * &h_r;
    let hl_star_hl = h_l.adjoint() * &h_l;
    Ok(NystromOperator {
        geom,
        nodes: full.nodes,
        weights: full.weights,
        left,
        right,
        solve_left,
        solve_right,
        k_hat,
        h_l,
        h_r,
        hr_star_hr,
        hl_star_hl,
    })
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

pub fn solve_inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or_else(|| Error::Singular("Nystrom matrix".into()))
}

/// Kernel of (I - k)^{-1} - I at the evaluation nodes, from a Nystrom solve on
/// `solve`: k(z, x) + sum k(z, y_k) sqrt(v_k) M_kl sqrt(v_l) k(y_l, x).
fn interpolated_resolvent(eval: &Rule, solve: &Rule, k: impl Fn(f64, f64) -> C64 + Sync) -> Result<CMatrix> {
    let a = weighted(solve, solve, &k);
    let m = solve_inverse(&(identity(solve.len()) - a))?;
    let unit_eval = Rule { nodes: eval.nodes.clone(), weights: vec![1.0; eval.len()] };
    let left = weighted(&unit_eval, solve, &k);
    let right = weighted(solve, &unit_eval, &k);
    let direct = weighted(&unit_eval, &unit_eval, &k);
    Ok(direct + left * m * right)
}

fn apply_weights(m: CMatrix, rows: &Rule, cols: &Rule) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (rows.weights[i] * cols.weights[j]).sqrt())
}

impl NystromOperator {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn full(&self) -> Rule {
        Rule { nodes: self.nodes.clone(), weights: self.weights.clone() }
    }

    fn solve_full(&self) -> Rule {
        join(&self.solve_left, &self.solve_right)
    }

    pub fn side_rule(&self, side: Side) -> &Rule {
        match side {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    /// Weighted closed-form resolvent kernel on the evaluation grid.
    pub fn resolvent_matrix(&self, lambda: Pt) -> Result<CMatrix> {
        let res = Resolvent::new(lambda, self.geom)?;
        let full = self.full();
        Ok(apply_weights(res.matrix(&full.nodes, &full.nodes)?, &full, &full))
    }

    /// Weighted resolvent of K-hat from the Nystrom solve.
    pub fn nystrom_resolvent(&self, lambda: C64) -> Result<CMatrix> {
        let full = self.full();
        let m = interpolated_resolvent(&full, &self.solve_full(), |z, x| k_unchecked(z, x) / lambda)?;
        Ok(apply_weights(m, &full, &full))
    }

    /// ||(I + R)(I - K/lambda) - I||_2 on the evaluation grid, with R in closed
    /// form and the composition integral done on the solve grid.
    pub fn resolvent_residual(&self, lambda: Pt) -> Result<f64> {
        let res = Resolvent::new(lambda, self.geom)?;
        let full = self.full();
        let solve = self.solve_full();
        let l = lambda.z;
        let r_ee = res.matrix(&full.nodes, &full.nodes)?;
        let r_es = res.matrix(&full.nodes, &solve.nodes)?;
        let k_se = CMatrix::from_fn(solve.len(), full.len(), |k, j| {
            k_unchecked(solve.nodes[k], full.nodes[j]) * solve.weights[k] / l
        });
        let k_ee = CMatrix::from_fn(full.len(), full.len(), |i, j| k_unchecked(full.nodes[i], full.nodes[j]) / l);
        let defect = r_ee - k_ee - r_es * k_se;
        Ok(spectral_norm(&apply_weights(defect, &full, &full)))
    }

    /// ||R_closed - R_nystrom||_2 on the evaluation grid.
    pub fn resolvent_oracle_gap(&self, lambda: C64) -> Result<f64> {
        Ok(spectral_norm(&(self.resolvent_matrix(Pt::new(lambda))? - self.nystrom_resolvent(lambda)?)))
    }

    /// ||(I - H*H / lambda^2)^{-1} - (I + pi R(lambda/2) pi)||_2 on one side's grid.
    pub fn block_resolvent_residual(&self, lambda: C64, side: Side) -> Result<f64> {
        let eval = self.side_rule(side).clone();
        let solve = match side {
            Side::L => &self.solve_left,
            Side::R => &self.solve_right,
        };
        let g = self.geom;
        let l2 = lambda * lambda;
        let direct = interpolated_resolvent(&eval, solve, |p, q| r(hstar_h_kernel(p, q, side, &g)) / l2)?;
        let res = Resolvent::new(Pt::new(lambda / 2.0), g)?;
        let closed = res.matrix(&eval.nodes, &eval.nodes)?;
        Ok(spectral_norm(&apply_weights(direct - closed, &eval, &eval)))
    }

    /// Eigenvalues of the H*_R H_R (side R) or H*_L H_L discretization, ascending.
    pub fn hstar_h_eigenvalues(&self, side: Side) -> Vec<f64> {
        let m = match side {
            Side::R => &self.hr_star_hr,
            Side::L => &self.hl_star_hl,
        };
        let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }
}
