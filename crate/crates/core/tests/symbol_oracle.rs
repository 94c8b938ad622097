//! `σ(ζ, s)` against closed-form integrals of exponentials times the
//! piecewise polynomial cutoff.

use std::f64::consts::PI;

use lossy_helmholtz::freqsplit::{e0, e1, make_cutoff, symbol_sigma};
use lossy_helmholtz::wavenumber::Wavenumber;
use num_complex::Complex64 as c64;

/// `tests/oracles/sigma_mpmath.py`: `σ(1, 0)` with `R = 1`.
const SIGMA_ONE_ZERO: f64 = 0.050_397_587_148_000_19;

/// Coefficients (ascending powers of `t`) of `1 - S(t)`, `S` the quintic smoothstep.
const ONE_MINUS_SMOOTHSTEP: [f64; 6] = [1.0, 0.0, 0.0, -10.0, 15.0, -6.0];

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(q: &[f64], t: f64) -> f64 {
    q.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_derivative(q: &[f64]) -> Vec<f64> {
    q.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
}

/// `∫₀¹ Q(t) e^{-ct} dt` by repeated integration by parts.
fn poly_exp_integral(q: &[f64], c: c64) -> c64 {
    let mut d = q.to_vec();
    let mut sum = c64::new(0.0, 0.0);
    let mut cpow = c;
    let ec = (-c).exp();
    while !d.is_empty() {
        sum += (poly_eval(&d, 0.0) - ec * poly_eval(&d, 1.0)) / cpow;
        d = poly_derivative(&d);
        cpow *= c;
    }
    sum
}

/// `∫₀^{4R} μ(r) e^{-wr} dr`.
fn f_integral(w: c64, r: f64) -> c64 {
    let e = (-2.0 * r * w).exp();
    (1.0 - e) / w + 2.0 * r * e * poly_exp_integral(&ONE_MINUS_SMOOTHSTEP, 2.0 * r * w)
}

/// `∫₀^{4R} r μ(r) e^{-wr} dr`.
fn g_integral(w: c64, r: f64) -> c64 {
    let e = (-2.0 * r * w).exp();
    let head = (1.0 - e * (1.0 + 2.0 * r * w)) / (w * w);
    let weight = poly_mul(&ONE_MINUS_SMOOTHSTEP, &[2.0 * r, 2.0 * r]);
    head + 2.0 * r * e * poly_exp_integral(&weight, 2.0 * r * w)
}

fn closed_form(zeta: c64, s: f64, r: f64) -> c64 {
    let norm = (2.0 * PI).powf(-1.5);
    if s == 0.0 {
        return norm * g_integral(zeta, r);
    }
    let i = c64::new(0.0, 1.0);
    norm * (f_integral(zeta - i * s, r) - f_integral(zeta + i * s, r)) / (2.0 * i * s)
}

#[test]
fn frozen_high_precision_value() {
    let cut = make_cutoff(1.0).unwrap();
    let v = symbol_sigma(&Wavenumber::from_parts(1.0, 0.0).unwrap(), 0.0, &cut).unwrap();
    assert!(
        (v.value.re - SIGMA_ONE_ZERO).abs() < 1e-13 && v.value.im.abs() < 1e-15,
        "{}",
        v.value
    );
    // the closed form agrees with the frozen value too
    let c = closed_form(c64::new(1.0, 0.0), 0.0, 1.0);
    assert!((c.re - SIGMA_ONE_ZERO).abs() < 1e-13);
}

#[test]
fn quadrature_matches_closed_form() {
    let zetas = [
        c64::new(1.0, -1.0),
        c64::new(3.0, 4.0),
        c64::new(0.0, 10.0),
        c64::new(0.7, -7.0),
        c64::new(35.0, 35.0),
        c64::new(2.0, 0.0),
    ];
    for radius in [1.0, 0.5] {
        let cut = make_cutoff(radius).unwrap();
        for &zeta in &zetas {
            let z = Wavenumber::new(zeta).unwrap();
            for s in [0.0, 0.5, 3.0, 25.0, 140.0] {
                // the closed form cancels badly near w = ζ ∓ is = 0
                if (zeta - c64::new(0.0, s)).norm() < 0.5 || (zeta + c64::new(0.0, s)).norm() < 0.5 {
                    continue;
                }
                let got = symbol_sigma(&z, s, &cut).unwrap().value;
                let want = closed_form(zeta, s, radius);
                let scale = want.norm().max(1e-6 * (2.0 * PI).powf(-1.5) / zeta.norm());
                assert!(
                    (got - want).norm() <= 1e-10 * scale,
                    "ζ={zeta} s={s} R={radius}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn e_functions_on_a_thousand_points() {
    for j in 0..1000 {
        let t = 40.0 * j as f64 / 999.0;
        let (a, b) = (e0(t), e1(t));
        assert!(b <= a * a * (1.0 + 1e-14), "t = {t}");
        assert!(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 0.5);
    }
    assert_eq!(e0(0.0), 1.0);
}
