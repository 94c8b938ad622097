//! `J₀`, `J₁` against power series summed in exact fixed-point arithmetic.

use lossy_helmholtz::exactsol::{bessel_j01, ScaledValue};
use num_bigint::BigInt;
use num_complex::Complex64 as c64;
use num_traits::{Signed, ToPrimitive, Zero};

/// Binary digits after the point.
const FRAC_BITS: u32 = 480;

#[derive(Clone)]
struct Fixed {
    re: BigInt,
    im: BigInt,
}

impl Fixed {
    fn from_f64(x: f64, y: f64) -> Self {
        // every test input is a multiple of 2^-40
        let conv = |v: f64| {
            let scaled = v * 2f64.powi(40);
            assert_eq!(scaled.fract(), 0.0);
            BigInt::from(scaled as i128) << (FRAC_BITS - 40)
        };
        Self {
            re: conv(x),
            im: conv(y),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: (&self.re * &o.re - &self.im * &o.im) >> FRAC_BITS,
            im: (&self.re * &o.im + &self.im * &o.re) >> FRAC_BITS,
        }
    }

    fn div_int(&self, k: u64) -> Self {
        Self {
            re: &self.re / k,
            im: &self.im / k,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn is_negligible(&self) -> bool {
        self.re.abs() < BigInt::from(16) && self.im.abs() < BigInt::from(16)
    }

    fn to_c64(&self) -> c64 {
        let scale = 2f64.powi(-(FRAC_BITS as i32));
        c64::new(self.re.to_f64().unwrap() * scale, self.im.to_f64().unwrap() * scale)
    }
}

/// `(J₀(z), J₁(z))` from `Σ (-z²/4)^k / (k!(k+ν)!)`.
fn oracle(x: f64, y: f64) -> (c64, c64) {
    let half = Fixed::from_f64(x / 2.0, y / 2.0);
    let sq = half.mul(&half);
    let w = Fixed {
        re: -sq.re.clone(),
        im: -sq.im.clone(),
    };
    let mut t0 = Fixed::from_f64(1.0, 0.0);
    let mut t1 = half.clone();
    let mut j0 = t0.clone();
    let mut j1 = t1.clone();
    let mut k = 1u64;
    loop {
        t0 = t0.mul(&w).div_int(k * k);
        t1 = t1.mul(&w).div_int(k * (k + 1));
        j0 = j0.add(&t0);
        j1 = j1.add(&t1);
        if t0.is_negligible() && t1.is_negligible() && k as f64 > x.hypot(y) {
            break;
        }
        k += 1;
    }
    assert!(!j0.re.is_zero() || !j0.im.is_zero());
    (j0.to_c64(), j1.to_c64())
}

fn rel(a: ScaledValue, b: c64) -> f64 {
    (a.value() - b).norm() / b.norm()
}

#[test]
fn series_region_matches_exact_sum() {
    for (x, y) in [(0.5, 0.0), (3.0, 4.0), (0.0, 11.875), (-7.25, 2.5), (1.0, -9.5)] {
        let (a0, a1) = bessel_j01(c64::new(x, y)).unwrap();
        let (b0, b1) = oracle(x, y);
        assert!(
            rel(a0, b0) < 1e-13 && rel(a1, b1) < 1e-13,
            "z = {x}+{y}i: {} {}",
            rel(a0, b0),
            rel(a1, b1)
        );
    }
}

#[test]
fn asymptotic_region_matches_exact_sum() {
    // the argument iζ for study frequencies, plus points off the axes
    let pts = [
        (12.5, 0.0),
        (30.0, 20.0),
        (0.0, 50.0),
        (-100.0, 0.0),
        (0.0, 100.0),
        (-70.710678118654, 70.710678118654),
        (-0.9817477042468, 49.990361110693),
    ];
    for (x, y) in pts {
        let (x, y) = (
            (x * 2f64.powi(40)).round() / 2f64.powi(40),
            (y * 2f64.powi(40)).round() / 2f64.powi(40),
        );
        let (a0, a1) = bessel_j01(c64::new(x, y)).unwrap();
        let (b0, b1) = oracle(x, y);
        assert!(
            rel(a0, b0) < 1e-10 && rel(a1, b1) < 1e-10,
            "z = {x}+{y}i: {} {}",
            rel(a0, b0),
            rel(a1, b1)
        );
    }
}
