//! Complex frequencies, sector classification and the closed-form stability
//! bounds that depend only on the frequency.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as c64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WavenumberError {
    #[error("inadmissible frequency {re}{im:+}i: real part must be >= 0")]
    NegativeRealPart { re: f64, im: f64 },
    #[error("inadmissible frequency {re}{im:+}i: modulus {modulus} is below 1")]
    ModulusBelowOne { re: f64, im: f64, modulus: f64 },
    #[error("non-finite frequency")]
    NonFinite,
    #[error("cannot parse frequency from {0:?}")]
    Parse(String),
}

/// A frequency `zeta` in the closed right half-plane with `|zeta| >= 1`.
///
/// `nu = Re zeta` and `k = -Im zeta` are cached, so `zeta = nu - i k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    zeta: c64,
    nu: f64,
    k: f64,
    modulus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorTag {
    Sectorial,
    NonSectorial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorClass {
    pub tag: SectorTag,
    pub beta: f64,
}

impl Wavenumber {
    pub fn new(zeta: c64) -> Result<Self, WavenumberError> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(WavenumberError::NonFinite);
        }
        if zeta.re < 0.0 {
            return Err(WavenumberError::NegativeRealPart {
                re: zeta.re,
                im: zeta.im,
            });
        }
        let modulus = zeta.norm();
        if modulus < 1.0 {
            return Err(WavenumberError::ModulusBelowOne {
                re: zeta.re,
                im: zeta.im,
                modulus,
            });
        }
        Ok(Self {
            zeta,
            nu: zeta.re,
            k: -zeta.im,
            modulus,
        })
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, WavenumberError> {
        Self::new(c64::new(re, im))
    }

    /// `modulus * exp(i pi/2 (1 - alpha_tilde))`, the parametrisation of the
    /// convergence study. `alpha_tilde = 0` is purely imaginary, `1` is real;
    /// both endpoints are produced exactly.
    pub fn from_study_grid(modulus: f64, alpha_tilde: f64) -> Result<Self, WavenumberError> {
        let (re, im) = if alpha_tilde == 0.0 {
            (0.0, modulus)
        } else if alpha_tilde == 1.0 {
            (modulus, 0.0)
        } else {
            let angle = 0.5 * PI * alpha_tilde;
            (modulus * angle.sin(), modulus * angle.cos())
        };
        Self::from_parts(re, im)
    }

    pub fn zeta(&self) -> c64 {
        self.zeta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn conj(&self) -> Self {
        Self {
            zeta: self.zeta.conj(),
            nu: self.nu,
            k: -self.k,
            modulus: self.modulus,
        }
    }

    pub fn is_real(&self) -> bool {
        self.zeta.im == 0.0
    }

    pub fn classify(&self, beta: f64) -> SectorClass {
        let tag = if self.zeta.im.abs() < beta * self.nu {
            SectorTag::Sectorial
        } else {
            SectorTag::NonSectorial
        };
        SectorClass { tag, beta }
    }

    /// Lower bound `Re zeta / |zeta|` for the inf-sup constant from coercivity.
    pub fn coercive_inf_sup_bound(&self) -> f64 {
        self.nu / self.modulus
    }

    /// Lower bound `1 / (1 + c |Im zeta| / (1 + Re zeta))`; `c` is a
    /// calibration constant.
    pub fn robust_inf_sup_bound(&self, c: f64) -> f64 {
        1.0 / (1.0 + c * self.zeta.im.abs() / (1.0 + self.nu))
    }

    /// Discrete lower bound shape `c (1 + Re zeta) / |zeta|`.
    pub fn resolved_inf_sup_shape(&self, c: f64) -> f64 {
        c * (1.0 + self.nu) / self.modulus
    }

    /// `(Im zeta)^2 / |zeta|`, the frequency factor in the resolution condition.
    pub fn resolution_factor(&self) -> f64 {
        self.k * self.k / self.modulus
    }
}

/// `N = 2 pi sqrt(dof) / (|zeta| sqrt(area))`.
pub fn dof_per_wavelength(dof: usize, z: &Wavenumber, area: f64) -> f64 {
    2.0 * PI * (dof as f64).sqrt() / (z.modulus() * area.sqrt())
}

impl fmt::Display for Wavenumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.zeta.re, self.zeta.im)
    }
}

impl FromStr for Wavenumber {
    type Err = WavenumberError;

    /// Accepts `M*exp(i*pi/2*(1-A))` (the study grid syntax) or a complex
    /// literal such as `3+4i`, `-10i`, `7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || WavenumberError::Parse(s.to_string());
        if let Some((modulus, rest)) = compact.split_once("*exp(i*pi/2*(1-") {
            let alpha = rest.strip_suffix("))").ok_or_else(bad)?;
            let modulus: f64 = modulus.parse().map_err(|_| bad())?;
            let alpha: f64 = alpha.parse().map_err(|_| bad())?;
            return Self::from_study_grid(modulus, alpha);
        }
        Self::new(parse_complex(&compact).ok_or_else(bad)?)
    }
}

fn parse_complex(s: &str) -> Option<c64> {
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| c64::new(re, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let (re, im) = match split {
        Some(idx) => (&body[..idx], &body[idx..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse().ok()?,
    };
    Some(c64::new(re.parse().ok()?, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Wavenumber {
        Wavenumber::from_parts(re, im).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(z(1.0, 0.0).classify(1.0).tag, SectorTag::Sectorial);
        assert_eq!(z(0.0, -10.0).classify(1.0).tag, SectorTag::NonSectorial);
        assert_eq!(z(1.0, 1.0).classify(1.0).tag, SectorTag::NonSectorial);
    }

    #[test]
    fn admissibility_is_enforced() {
        assert!(matches!(
            Wavenumber::from_parts(-0.5, 3.0),
            Err(WavenumberError::NegativeRealPart { .. })
        ));
        assert!(matches!(
            Wavenumber::from_parts(0.5, 0.0),
            Err(WavenumberError::ModulusBelowOne { .. })
        ));
        assert!(Wavenumber::from_study_grid(0.5, 1.0).is_err());
    }

    #[test]
    fn coercive_bound_examples() {
        assert!((z(3.0, 4.0).coercive_inf_sup_bound() - 0.6).abs() < 1e-15);
        assert_eq!(z(7.0, 0.0).coercive_inf_sup_bound(), 1.0);
        assert_eq!(z(0.0, -50.0).coercive_inf_sup_bound(), 0.0);
    }

    #[test]
    fn robust_bound_examples() {
        assert_eq!(z(4.0, 0.0).robust_inf_sup_bound(3.7), 1.0);
        assert!((z(0.0, -10.0).robust_inf_sup_bound(1.0) - 1.0 / 11.0).abs() < 1e-15);
        assert!((z(10.0, -10.0).robust_inf_sup_bound(1.0) - 11.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn dof_per_wavelength_examples() {
        let two_pi = z(2.0 * PI, 0.0);
        assert!((dof_per_wavelength(1, &two_pi, 1.0) - 1.0).abs() < 1e-15);
        let ten = z(10.0, 0.0);
        let n = dof_per_wavelength(1000, &ten, PI);
        assert!((n - 2.0 * PI * 1000f64.sqrt() / (10.0 * PI.sqrt())).abs() < 1e-12);
        assert!((n - 11.209).abs() < 1e-3);
        let ratio = dof_per_wavelength(4 * 321, &ten, PI) / dof_per_wavelength(321, &ten, PI);
        assert!((ratio - 2.0).abs() < 1e-14);
    }

    #[test]
    fn study_grid_endpoints_are_exact() {
        let imag = Wavenumber::from_study_grid(50.0, 0.0).unwrap();
        assert_eq!(imag.zeta(), c64::new(0.0, 50.0));
        let real = Wavenumber::from_study_grid(50.0, 1.0).unwrap();
        assert_eq!(real.zeta(), c64::new(50.0, 0.0));
        let mid = Wavenumber::from_study_grid(10.0, 0.5).unwrap();
        assert!((mid.nu() - mid.zeta().im).abs() < 1e-13);
        // beta = 1 puts alpha_tilde = 1/2 on the closed side of the boundary
        let boundary = z(1.0, 1.0);
        assert_eq!(boundary.classify(1.0).tag, SectorTag::NonSectorial);
    }

    #[test]
    fn parses_grid_syntax_and_literals() {
        let a: Wavenumber = "50*exp(i*pi/2*(1-0.25))".parse().unwrap();
        let b = Wavenumber::from_study_grid(50.0, 0.25).unwrap();
        assert_eq!(a, b);
        let c: Wavenumber = "3+4i".parse().unwrap();
        assert_eq!(c.zeta(), c64::new(3.0, 4.0));
        let d: Wavenumber = "-10i".parse().unwrap();
        assert_eq!(d.zeta(), c64::new(0.0, -10.0));
        let e: Wavenumber = "7".parse().unwrap();
        assert_eq!(e.zeta(), c64::new(7.0, 0.0));
        let f: Wavenumber = "1e1-2.5e0i".parse().unwrap();
        assert_eq!(f.zeta(), c64::new(10.0, -2.5));
        assert!("abc".parse::<Wavenumber>().is_err());
    }

    #[test]
    fn modulus_identity() {
        let w = z(3.3, -17.25);
        let lhs = w.modulus() * w.modulus();
        let rhs = w.nu() * w.nu() + w.k() * w.k();
        assert!((lhs - rhs).abs() <= 1e-14 * rhs);
    }
}
