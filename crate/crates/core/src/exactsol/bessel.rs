//! Bessel functions `J₀` and `J₁` of complex argument in scaled form.

use std::f64::consts::PI;

use num_complex::Complex64 as c64;

use super::ExactSolError;

/// Largest accepted argument modulus.
pub const MAX_ARGUMENT: f64 = 500.0;
/// Power series below this modulus, Hankel asymptotics above.
pub const SERIES_RADIUS: f64 = 12.0;
const ASYMPTOTIC_TERMS: usize = 60;

/// `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: c64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn new(mantissa: c64, log_scale: f64) -> Self {
        Self { mantissa, log_scale }.normalized()
    }

    pub fn zero() -> Self {
        Self {
            mantissa: c64::new(0.0, 0.0),
            log_scale: 0.0,
        }
    }

    /// Keep `|mantissa|` in `[1e-2, 1e2]` by moving whole powers of `e` into
    /// the scale, so scales stay exact under addition and subtraction.
    pub fn normalized(self) -> Self {
        let m = self.mantissa.norm();
        if m == 0.0 {
            return Self::zero();
        }
        if !m.is_finite() || (1e-2..=1e2).contains(&m) {
            return self;
        }
        let shift = m.ln().round();
        Self {
            mantissa: self.mantissa / shift.exp(),
            log_scale: self.log_scale + shift,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// Plain value; overflows to infinity for huge scales.
    pub fn value(&self) -> c64 {
        if self.is_zero() {
            return self.mantissa;
        }
        self.mantissa * self.log_scale.exp()
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_scale + self.mantissa.norm().ln()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }

    pub fn div(&self, other: &Self) -> Self {
        Self::new(self.mantissa / other.mantissa, self.log_scale - other.log_scale)
    }

    pub fn scale_by(&self, c: c64) -> Self {
        Self::new(self.mantissa * c, self.log_scale)
    }

    /// Sum after aligning both terms to the larger scale.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let s = self.log_scale.max(other.log_scale);
        let m = self.mantissa * (self.log_scale - s).exp() + other.mantissa * (other.log_scale - s).exp();
        Self::new(m, s)
    }
}

/// `(J₀(z), J₁(z))` in scaled form.
pub fn bessel_j01(z: c64) -> Result<(ScaledValue, ScaledValue), ExactSolError> {
    let modulus = z.norm();
    if !modulus.is_finite() {
        return Err(ExactSolError::NonFinite);
    }
    if modulus > MAX_ARGUMENT {
        return Err(ExactSolError::DomainTooLarge(modulus));
    }
    if modulus <= SERIES_RADIUS {
        let (j0, j1) = series(z);
        return Ok((ScaledValue::new(j0, 0.0), ScaledValue::new(j1, 0.0)));
    }
    // the expansion is used in the right half-plane; J₀ is even and J₁ odd
    if z.re < 0.0 {
        let (j0, j1) = hankel(-z);
        return Ok((j0, j1.scale_by(c64::new(-1.0, 0.0))));
    }
    Ok(hankel(z))
}

fn series(z: c64) -> (c64, c64) {
    let q = -z * z / 4.0;
    let mut t0 = c64::new(1.0, 0.0);
    let mut t1 = c64::new(1.0, 0.0);
    let mut j0 = t0;
    let mut j1 = t1;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        j0 += t0;
        j1 += t1;
        if t0.norm() <= 1e-17 * j0.norm().max(1e-300)
            && t1.norm() <= 1e-17 * j1.norm().max(1e-300)
            && kf > q.norm().sqrt()
        {
            break;
        }
    }
    (j0, j1 * z / 2.0)
}

/// Hankel expansion for `Re z >= 0`, `|z| > SERIES_RADIUS`:
/// `J_ν = ½ sqrt(2/(πz)) [e^{iχ} S₊ + e^{-iχ} S₋]`, `χ = z - νπ/2 - π/4`.
fn hankel(z: c64) -> (ScaledValue, ScaledValue) {
    let pre = (c64::new(2.0 / PI, 0.0) / z).sqrt();
    let j = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let (sp, sm) = asymptotic_sums(mu, z);
        let chi_re = z.re - nu * PI / 2.0 - PI / 4.0;
        let y = z.im;
        let ay = y.abs();
        // e^{iχ} = e^{i Re χ} e^{-y}; factor out e^{|y|}
        let ep = c64::from_polar((-y - ay).exp(), chi_re);
        let em = c64::from_polar((y - ay).exp(), -chi_re);
        ScaledValue::new(0.5 * pre * (ep * sp + em * sm), ay)
    };
    (j(0.0), j(1.0))
}

/// `S± = Σ_k (±i)^k a_k(ν) / z^k`, truncated at the smallest term.
fn asymptotic_sums(mu: f64, z: c64) -> (c64, c64) {
    let inv = c64::new(1.0, 0.0) / z;
    let mut a = c64::new(1.0, 0.0);
    let mut sp = a;
    let mut sm = a;
    let mut last = f64::INFINITY;
    let i = c64::new(0.0, 1.0);
    let mut ip = c64::new(1.0, 0.0);
    let mut im = c64::new(1.0, 0.0);
    for k in 1..=ASYMPTOTIC_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= inv * ((mu - odd * odd) / (8.0 * kf));
        let size = a.norm();
        if size >= last || size < 1e-18 {
            break;
        }
        last = size;
        ip *= i;
        im *= -i;
        sp += ip * a;
        sm += im * a;
    }
    (sp, sm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let (j0, j1) = bessel_j01(c64::new(0.0, 0.0)).unwrap();
        assert_eq!(j0.value(), c64::new(1.0, 0.0));
        assert_eq!(j1.value(), c64::new(0.0, 0.0));
    }

    #[test]
    fn known_real_values() {
        let (j0, j1) = bessel_j01(c64::new(1.0, 0.0)).unwrap();
        assert!((j0.value().re - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j1.value().re - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn series_and_asymptotics_agree_at_the_switch() {
        for arg in [0.0, 0.4, 1.3, 2.2, 3.0] {
            let z = c64::from_polar(SERIES_RADIUS + 0.5, arg);
            let (s0, s1) = series(z);
            let (h0, h1) = if z.re < 0.0 {
                let (a, b) = hankel(-z);
                (a, b.scale_by(c64::new(-1.0, 0.0)))
            } else {
                hankel(z)
            };
            let scale = s0.norm().max(s1.norm());
            assert!((s0 - h0.value()).norm() < 1e-9 * scale, "arg {arg}");
            assert!((s1 - h1.value()).norm() < 1e-9 * scale, "arg {arg}");
        }
    }

    #[test]
    fn imaginary_axis_gives_modified_bessel() {
        // J₀(ix) = I₀(x) is real and at least one
        for x in [0.5, 5.0, 20.0, 80.0] {
            let (j0, _) = bessel_j01(c64::new(0.0, x)).unwrap();
            assert!(j0.mantissa.im.abs() < 1e-12);
            assert!(j0.ln_abs() >= 0.0);
        }
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        let (j0, j1) = bessel_j01(c64::new(0.0, 450.0)).unwrap();
        assert!(j0.log_scale > 400.0 && j0.mantissa.norm().is_finite());
        assert!(j1.log_scale > 400.0);
        assert!(matches!(
            bessel_j01(c64::new(501.0, 0.0)),
            Err(ExactSolError::DomainTooLarge(_))
        ));
    }

    #[test]
    fn scaled_arithmetic() {
        let a = ScaledValue::new(c64::new(3.0, 4.0), 700.0);
        let b = ScaledValue::new(c64::new(1.0, 0.0), 699.0);
        assert!((1e-2..=1e2).contains(&a.mantissa.norm()));
        let tiny = ScaledValue::new(c64::new(1e-30, 0.0), 0.0);
        assert!((1e-2..=1e2).contains(&tiny.mantissa.norm()));
        assert!((tiny.value().re - 1e-30).abs() < 1e-44);
        let r = a.div(&b).value();
        assert!((r - c64::new(3.0, 4.0) * 1f64.exp()).norm() < 1e-12);
        let s = a.add(&a).div(&a).value();
        assert!((s - c64::new(2.0, 0.0)).norm() < 1e-14);
    }
}
