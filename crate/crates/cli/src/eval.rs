use crate::parse;
use crate::report::Record;
use clap::{Subcommand, ValueEnum};
use fhtdiag::asymptotics::phi_matrix;
use fhtdiag::diagonalization::{d_pair, phi_and_density, TransformKernel};
use fhtdiag::kernels::resolvent_kernel;
use fhtdiag::rhp::GammaSolver;
use fhtdiag::spectral::Geometry;
use fhtdiag::sturm_liouville::weyl_data;
use fhtdiag::types::{Mat2, Pt, Shore, Side, C64};
use fhtdiag::verify::Check;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    L,
    R,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::L => Side::L,
            SideArg::R => Side::R,
        }
    }
}

#[derive(Subcommand)]
pub enum Quantity {
    /// Gamma(z; lambda); residual |det Gamma - 1|.
    Gamma {
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true)]
        lambda: Pt,
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true)]
        z: Pt,
    },
    /// Resolvent kernel R(z, x; lambda) for real z, x; residual from the reflection
    /// R(z, x; conj lambda) = s conj R(z, x; lambda), s = -1 across the two intervals.
    Resolvent {
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true)]
        lambda: Pt,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// (d_L(z), d_R(z)) for real lambda in (-1/2, 0); residual from d(conj z) = conj d(z).
    D {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true)]
        z: Pt,
    },
    /// The transform kernel phi_j(x) at a point lambda^2 of the spectrum; residual |Im phi| / |phi|.
    Phi {
        #[arg(long)]
        lambda_sq: f64,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Spectral densities (sigma_L', sigma_R') at lambda^2; residual is any negative part.
    Density {
        #[arg(long)]
        lambda_sq: f64,
    },
    /// Weyl functions m_1, m_2 at omega; on the spectrum the residual is |Im m_j - pi rho_j'| / (pi rho_j').
    Rho {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        omega: C64,
    },
    /// The model solution Phi(z); residual |det Phi - 1|.
    Model {
        #[arg(long, value_parser = parse::point, allow_hyphen_values = true)]
        z: Pt,
    },
}

fn entries(m: &Mat2) -> [C64; 4] {
    [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]
}

/// Mirror image across the real axis; a shore point moves to the other shore.
fn mirror(p: Pt) -> Pt {
    Pt { z: p.z.conj(), shore: p.shore.map(Shore::flip) }
}

pub fn evaluate(q: &Quantity, geom: Geometry) -> fhtdiag::Result<Record> {
    Ok(match *q {
        Quantity::Gamma { lambda, z } => {
            let g = GammaSolver::new(lambda, geom)?.eval(z)?;
            let check = Check::new("gamma", "det Gamma = 1", format!("lambda={lambda} z={z}"), (g.det() - 1.0).norm(), 1e-12);
            Record::with_value(check, &entries(&g))
        }
        Quantity::Resolvent { lambda, z, x } => {
            let v = resolvent_kernel(z, x, lambda, geom)?;
            let w = resolvent_kernel(z, x, mirror(lambda), geom)?;
            let s = if (z < 0.0) == (x < 0.0) { 1.0 } else { -1.0 };
            let res = (w.conj() * s - v).norm() / v.norm().max(1e-300);
            let check = Check::new("resolvent", "R(z, x; conj lambda) = s conj R(z, x; lambda)", format!("lambda={lambda} z={z} x={x}"), res, 1e-10);
            Record::with_value(check, &[v])
        }
        Quantity::D { lambda, z } => {
            let (dl, dr) = d_pair(z, lambda, geom)?;
            let (ml, mr) = d_pair(mirror(z), lambda, geom)?;
            let res = ((ml.conj() - dl).norm() + (mr.conj() - dr).norm()) / (dl.norm() + dr.norm()).max(1e-300);
            let check = Check::new("d", "d_j(conj z) = conj d_j(z)", format!("lambda={lambda} z={z}"), res, 1e-12);
            Record::with_value(check, &[dl, dr])
        }
        Quantity::Phi { lambda_sq, side, x } => {
            let k = TransformKernel::new(lambda_sq, side.into(), geom)?;
            let v = k.phi(x)?;
            let check = Check::new("phi", "phi_j is real", format!("lambda_sq={lambda_sq} side={side:?} x={x}"), v.im.abs() / v.norm().max(1e-300), 1e-10);
            Record::with_value(check, &[v])
        }
        Quantity::Density { lambda_sq } => {
            let (_, d) = phi_and_density(lambda_sq, Side::L, geom)?;
            let neg = (-d.sigma_l_prime).max(-d.sigma_r_prime).max(0.0);
            let check = Check::new("density", "sigma_j' >= 0", format!("lambda_sq={lambda_sq}"), neg, 0.0);
            Record::with_value(check, &[C64::new(d.sigma_l_prime, 0.0), C64::new(d.sigma_r_prime, 0.0)])
        }
        Quantity::Rho { omega } => {
            let w = weyl_data(omega, &geom)?;
            let (anchor, res) = if omega.im == 0.0 {
                let rel = |m: C64, rho: f64| (m.im - PI * rho).abs() / (PI * rho);
                ("Im m_j = pi rho_j' on the spectrum", rel(w.m1, w.rho1_prime).max(rel(w.m2, w.rho2_prime)))
            } else {
                ("Im m_j >= 0 in the upper half plane", (-w.m1.im).max(-w.m2.im).max(0.0))
            };
            let check = Check::new("rho", anchor, format!("omega={omega}"), res, 1e-10);
            Record::with_value(check, &[w.m1, w.m2, C64::new(w.rho1_prime, 0.0), C64::new(w.rho2_prime, 0.0)])
        }
        Quantity::Model { z } => {
            let m = phi_matrix(z)?;
            let check = Check::new("model", "det Phi = 1", format!("z={z}"), (m.det() - 1.0).norm(), 1e-12);
            Record::with_value(check, &entries(&m))
        }
    })
}
