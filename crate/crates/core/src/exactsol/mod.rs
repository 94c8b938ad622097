//! Radial solution of `-Δu + ζ²u = 1` on the unit disk with
//! `∂ₙu + ζu = 0` on the circle:
//! `u(r) = c₁ J₀(iζr) + ζ⁻²` with `c₁ = -1 / (ζ² (J₀(iζ) - i J₁(iζ)))`.

mod bessel;

use std::f64::consts::PI;

use num_complex::Complex64 as c64;
use thiserror::Error;

use crate::wavenumber::Wavenumber;
pub use bessel::{bessel_j01, ScaledValue, MAX_ARGUMENT, SERIES_RADIUS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactSolError {
    #[error("Bessel argument modulus {0} exceeds {max}", max = MAX_ARGUMENT)]
    DomainTooLarge(f64),
    #[error("non-finite Bessel argument")]
    NonFinite,
    #[error("Robin denominator vanishes (scaled magnitude {0:.3e})")]
    Resonance(f64),
}

/// Scaled denominators below this size are rejected.
pub const RESONANCE_THRESHOLD: f64 = 1e-12;
/// Points on the contour used for the derivative check.
const CONTOUR_POINTS: usize = 64;

#[derive(Debug, Clone)]
pub struct ExactSolution {
    zeta: Wavenumber,
    c1: ScaledValue,
    /// `J₀(iζ) - i J₁(iζ)`
    denominator: ScaledValue,
}

impl ExactSolution {
    pub fn new(zeta: Wavenumber) -> Result<Self, ExactSolError> {
        let z = zeta.zeta();
        let i = c64::new(0.0, 1.0);
        let (j0, j1) = bessel_j01(i * z)?;
        let denominator = j0.add(&j1.scale_by(-i));
        let size = denominator.ln_abs() - j0.ln_abs().max(j1.ln_abs());
        if size.exp() < RESONANCE_THRESHOLD {
            return Err(ExactSolError::Resonance(size.exp()));
        }
        let c1 = ScaledValue::new(-c64::new(1.0, 0.0) / (z * z), 0.0).div(&denominator);
        Ok(Self { zeta, c1, denominator })
    }

    pub fn zeta(&self) -> Wavenumber {
        self.zeta
    }

    pub fn c1(&self) -> ScaledValue {
        self.c1
    }

    /// `u` at a (possibly complex) radius.
    pub fn u_complex(&self, r: c64) -> Result<c64, ExactSolError> {
        let z = self.zeta.zeta();
        let (j0, _) = bessel_j01(c64::new(0.0, 1.0) * z * r)?;
        let ratio = j0.div(&self.denominator).value();
        Ok((c64::new(1.0, 0.0) - ratio) / (z * z))
    }

    pub fn u(&self, r: f64) -> c64 {
        self.u_complex(c64::new(r, 0.0)).expect("radius within the unit disk")
    }

    /// `u'(r) = (i/ζ) J₁(iζr) / (J₀(iζ) - iJ₁(iζ))`.
    pub fn du(&self, r: f64) -> c64 {
        let z = self.zeta.zeta();
        let (_, j1) = bessel_j01(c64::new(0.0, r) * z).expect("radius within the unit disk");
        c64::new(0.0, 1.0) / z * j1.div(&self.denominator).value()
    }

    /// `(u, ∇u)` at a point of the closed disk.
    pub fn evaluate_field(&self, x: [f64; 2]) -> (c64, [c64; 2]) {
        let r = x[0].hypot(x[1]);
        let u = self.u(r);
        if r == 0.0 {
            return (u, [c64::new(0.0, 0.0); 2]);
        }
        let du = self.du(r);
        (u, [du * (x[0] / r), du * (x[1] / r)])
    }

    /// `|u'(1) + ζu(1)| / (|ζ||u(1)| + |u'(1)| + 1)`.
    pub fn robin_residual(&self) -> f64 {
        let u1 = self.u(1.0);
        let d1 = self.du(1.0);
        let z = self.zeta.zeta();
        (d1 + z * u1).norm() / (self.zeta.modulus() * u1.norm() + d1.norm() + 1.0)
    }

    /// Relative residual of `-u'' - u'/r + ζ²u - 1` at radius `r > 0`.
    ///
    /// Derivatives come from Cauchy integrals of `u` on a circle in the
    /// complex radius plane, independent of the closed-form `u'`.
    pub fn pde_residual(&self, r: f64) -> Result<f64, ExactSolError> {
        let rho = (2.0 / self.zeta.modulus()).min(0.5);
        let mut d1 = c64::new(0.0, 0.0);
        let mut d2 = c64::new(0.0, 0.0);
        for j in 0..CONTOUR_POINTS {
            let theta = 2.0 * PI * j as f64 / CONTOUR_POINTS as f64;
            let w = c64::from_polar(1.0, theta);
            let val = self.u_complex(c64::new(r, 0.0) + rho * w)?;
            d1 += val / w;
            d2 += val / (w * w);
        }
        let n = CONTOUR_POINTS as f64;
        let d1 = d1 / (n * rho);
        let d2 = d2 * 2.0 / (n * rho * rho);
        let z = self.zeta.zeta();
        let u = self.u(r);
        let lap = d2 + d1 / r;
        let res = -lap + z * z * u - 1.0;
        let scale = d2.norm() + (d1 / r).norm() + (z * z * u).norm() + 1.0;
        Ok(res.norm() / scale)
    }
}

pub fn build_exact_solution(zeta: Wavenumber) -> Result<ExactSolution, ExactSolError> {
    ExactSolution::new(zeta)
}
