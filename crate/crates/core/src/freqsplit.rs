//! The smooth cutoff `μ`, the functions `E₀`/`E₁`, the radial symbol
//! `σ(ζ,s)` of the truncated fundamental solution and its envelopes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::wavenumber::Wavenumber;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FreqSplitError {
    #[error("the high-frequency bound needs Im ζ ≠ 0, got ζ = {0}")]
    RealFrequency(String),
    #[error("lambda must exceed 1, got {0}")]
    InvalidLambda(f64),
    #[error("cutoff radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("frequency grid s must be non-negative and finite")]
    InvalidFrequency,
}

/// `(2π)^{-3/2}`.
pub fn fourier_constant() -> f64 {
    (2.0 * PI).powf(-1.5)
}

/// Grid size used to measure `C_μ`.
pub const CUTOFF_SAMPLES: usize = 10_000;

/// `μ = 1` on `[0, 2R]`, `0` on `[4R, ∞)`, quintic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub radius: f64,
    /// `max(sup |μ'| R, sup |μ''| R²)` measured on a grid
    pub c_mu: f64,
}

impl Cutoff {
    pub fn new(radius: f64) -> Result<Self, FreqSplitError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FreqSplitError::InvalidRadius(radius));
        }
        let mut cut = Self { radius, c_mu: 0.0 };
        let mut c: f64 = 0.0;
        for j in 0..=CUTOFF_SAMPLES {
            let r = 5.0 * radius * j as f64 / CUTOFF_SAMPLES as f64;
            let (_, d1, d2) = cut.eval(r);
            c = c.max(d1.abs() * radius).max(d2.abs() * radius * radius);
        }
        cut.c_mu = c;
        Ok(cut)
    }

    /// `(μ, μ', μ'')` at `r >= 0`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let rr = self.radius;
        if r <= 2.0 * rr {
            return (1.0, 0.0, 0.0);
        }
        if r >= 4.0 * rr {
            return (0.0, 0.0, 0.0);
        }
        let t = (r - 2.0 * rr) / (2.0 * rr);
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        let d2s = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (1.0 - s, -ds / (2.0 * rr), -d2s / (4.0 * rr * rr))
    }

    pub fn mu(&self, r: f64) -> f64 {
        self.eval(r).0
    }
}

pub fn make_cutoff(radius: f64) -> Result<Cutoff, FreqSplitError> {
    Cutoff::new(radius)
}

/// `E₀(t) = (1 - e^{-t}) / t`, series below `t = 1`.
pub fn e0(t: f64) -> f64 {
    if t < 1.0 {
        // Σ (-t)^k / (k+1)!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term *= -t / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        -(-t).exp_m1() / t
    }
}

/// `E₁(t) = (1 - e^{-t}(1 + t)) / t²`, series below `t = 1`.
pub fn e1(t: f64) -> f64 {
    if t < 1.0 {
        // Σ (-1)^k (k+1) t^k / (k+2)!
        let mut pow_fact = 0.5;
        let mut sum = 0.5;
        for k in 1..30 {
            let kf = k as f64;
            pow_fact *= -t / (kf + 2.0);
            sum += (kf + 1.0) * pow_fact;
        }
        sum
    } else {
        (-(-t).exp_m1() - t * (-t).exp()) / (t * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub zeta: c64,
    pub s: f64,
    pub value: c64,
    pub quad_error: f64,
}

/// `σ(ζ,s) = (2π)^{-3/2} ∫₀^{4R} e^{-ζr} μ(r) sin(rs)/s dr` (`r` in place of
/// `sin(rs)/s` at `s = 0`).
pub fn symbol_sigma(z: &Wavenumber, s: f64, cut: &Cutoff) -> Result<SymbolValue, FreqSplitError> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(FreqSplitError::InvalidFrequency);
    }
    let zeta = z.zeta();
    let f = |r: f64| {
        let kernel = if s == 0.0 { r } else { (r * s).sin() / s };
        (-zeta * r).exp() * (cut.mu(r) * kernel)
    };
    let rr = cut.radius;
    // panels of about one oscillation of the integrand
    let width = (2.0 * PI / (s + zeta.norm() + 1e-300)).min(rr);
    let mut value = c64::new(0.0, 0.0);
    let mut error = 0.0;
    for (a, b) in [(0.0, 2.0 * rr), (2.0 * rr, 4.0 * rr)] {
        let pieces = ((b - a) / width).ceil().max(1.0) as usize;
        let (v, e) = adaptive_gauss_kronrod(&f, a, b, pieces);
        value += v;
        error += e;
    }
    let c = fourier_constant();
    Ok(SymbolValue {
        zeta,
        s,
        value: value * c,
        quad_error: error * c,
    })
}

// Gauss-Kronrod 7-15 nodes on [-1, 1] (positive half, centre first).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// `(integral, |K15 - G7|, ∫|f|)` on `[a, b]`.
fn gk15<F: Fn(f64) -> c64>(f: &F, a: f64, b: f64) -> (c64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (fl, fr) = (f(c - x), f(c + x));
        let s = fl + fr;
        k += s * WGK[j];
        abs += (fl.norm() + fr.norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm(), abs * h.abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: c64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Target accuracy: `1e-12` relative to the integral, floored at a small
/// multiple of `∫|f|` where rounding takes over.
const REL_TOL: f64 = 1e-12;
const ABS_FLOOR: f64 = 1e-14;
const MAX_PANELS: usize = 200_000;

/// Globally adaptive bisection starting from `pieces` equal panels.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> c64>(f: &F, a: f64, b: f64, pieces: usize) -> (c64, f64) {
    let mut heap = BinaryHeap::new();
    let step = (b - a) / pieces as f64;
    for j in 0..pieces {
        let lo = a + step * j as f64;
        let hi = if j + 1 == pieces { b } else { lo + step };
        let (value, error, abs) = gk15(f, lo, hi);
        heap.push(Panel {
            a: lo,
            b: hi,
            value,
            error,
            abs,
        });
    }
    loop {
        let total: c64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let abs: f64 = heap.iter().map(|p| p.abs).sum();
        let tol = (REL_TOL * total.norm()).max(ABS_FLOOR * abs);
        if err <= tol || heap.len() >= MAX_PANELS {
            return (total, err);
        }
        // bisect the worst panels until the estimate may pass
        let mut excess = err - tol;
        while excess > 0.0 {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                heap.push(worst);
                return (total, err);
            }
            excess -= worst.error;
            for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
                let (value, error, abs) = gk15(f, lo, hi);
                heap.push(Panel {
                    a: lo,
                    b: hi,
                    value,
                    error,
                    abs,
                });
            }
        }
    }
}

/// Envelope constants that depend only on `ζ` and the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelopes {
    /// bound on `|σ|`: `4R(1+4C_μ)(2π)^{-3/2} E₀(4Rν)/|ζ|`
    pub plain: f64,
    /// bound on `|sσ|`: `4R√(2/π) E₀(4Rν)`
    pub first: f64,
}

pub fn envelopes(z: &Wavenumber, cut: &Cutoff) -> Envelopes {
    let r = cut.radius;
    let e = e0(4.0 * r * z.nu());
    Envelopes {
        plain: 4.0 * r * (1.0 + 4.0 * cut.c_mu) * fourier_constant() * e / z.modulus(),
        first: 4.0 * r * (2.0 / PI).sqrt() * e,
    }
}

/// Unrestricted `|s²σ|` envelope `(2π)^{-3/2} 4(C + R|ζ|) E₀(4Rν)`.
pub fn second_envelope(z: &Wavenumber, cut: &Cutoff, c: f64) -> f64 {
    fourier_constant() * 4.0 * (c + cut.radius * z.modulus()) * e0(4.0 * cut.radius * z.nu())
}

/// High-frequency `|s²σ|` envelope without its constant:
/// `(2π)^{-3/2} λ/(λ-1) (|ζ|/Im ζ)²`.
pub fn high_frequency_shape(z: &Wavenumber, lambda: f64) -> f64 {
    let ratio = z.modulus() / z.zeta().im;
    fourier_constant() * lambda / (lambda - 1.0) * ratio * ratio
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolRow {
    pub re_zeta: f64,
    pub im_zeta: f64,
    pub s: f64,
    pub abs_sigma: f64,
    pub quad_error: f64,
    /// envelopes expressed as bounds on `|σ|`
    pub bound0: f64,
    pub bound1: f64,
    pub bound2: f64,
    /// `min(bound0, bound1, bound2) / |σ|`
    pub margin: f64,
    /// `s >= λ|k|`
    pub high_frequency: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolReport {
    pub lambda: f64,
    pub radius: f64,
    pub c_mu: f64,
    /// smallest `C` making the unrestricted `|s²σ|` envelope hold
    pub fitted_c_unrestricted: f64,
    /// smallest `C` making the high-frequency envelope hold for `s >= λ|k|`
    pub fitted_c_high_frequency: f64,
    pub plain_bound_holds: bool,
    pub first_bound_holds: bool,
    pub min_margin: f64,
    pub max_quad_error: f64,
    pub rows: Vec<SymbolRow>,
}

/// Evaluate `σ` on the grid, check the two explicit envelopes and fit the
/// constants of the two `|s²σ|` envelopes.
pub fn verify_symbol_bounds(
    z_grid: &[Wavenumber],
    s_grid: &[f64],
    lambda: f64,
    cut: &Cutoff,
) -> Result<SymbolReport, FreqSplitError> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(FreqSplitError::InvalidLambda(lambda));
    }
    if let Some(z) = z_grid.iter().find(|z| z.zeta().im == 0.0) {
        return Err(FreqSplitError::RealFrequency(z.to_string()));
    }
    if s_grid.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(FreqSplitError::InvalidFrequency);
    }
    let per_zeta: Vec<Vec<SymbolValue>> = z_grid
        .par_iter()
        .map(|z| {
            let mut ss: Vec<f64> = s_grid.to_vec();
            // the high-frequency threshold itself is always sampled
            ss.push(lambda * z.k().abs());
            ss.sort_by(f64::total_cmp);
            ss.dedup();
            ss.iter()
                .map(|&s| symbol_sigma(z, s, cut))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut fitted_unrestricted: f64 = 0.0;
    let mut fitted_high: f64 = 0.0;
    for (z, values) in z_grid.iter().zip(&per_zeta) {
        let per_c = fourier_constant() * 4.0 * e0(4.0 * cut.radius * z.nu());
        let shape = high_frequency_shape(z, lambda);
        for v in values {
            let s2 = v.s * v.s * v.value.norm();
            let needed = s2 / per_c - cut.radius * z.modulus();
            fitted_unrestricted = fitted_unrestricted.max(needed);
            if v.s >= lambda * z.k().abs() {
                fitted_high = fitted_high.max(s2 / shape);
            }
        }
    }

    let mut rows = Vec::new();
    let mut plain_ok = true;
    let mut first_ok = true;
    let mut min_margin = f64::INFINITY;
    let mut max_quad_error: f64 = 0.0;
    for (z, values) in z_grid.iter().zip(&per_zeta) {
        let env = envelopes(z, cut);
        let second = second_envelope(z, cut, fitted_unrestricted);
        for v in values {
            let a = v.value.norm();
            let bound1 = if v.s > 0.0 { env.first / v.s } else { f64::INFINITY };
            let bound2 = if v.s > 0.0 { second / (v.s * v.s) } else { f64::INFINITY };
            plain_ok &= a <= env.plain;
            first_ok &= v.s * a <= env.first;
            let margin = env.plain.min(bound1).min(bound2) / a;
            min_margin = min_margin.min(margin);
            max_quad_error = max_quad_error.max(v.quad_error / (1.0 + a));
            rows.push(SymbolRow {
                re_zeta: z.zeta().re,
                im_zeta: z.zeta().im,
                s: v.s,
                abs_sigma: a,
                quad_error: v.quad_error,
                bound0: env.plain,
                bound1,
                bound2,
                margin,
                high_frequency: v.s >= lambda * z.k().abs(),
            });
        }
    }
    Ok(SymbolReport {
        lambda,
        radius: cut.radius,
        c_mu: cut.c_mu,
        fitted_c_unrestricted: fitted_unrestricted.max(0.0),
        fitted_c_high_frequency: fitted_high,
        plain_bound_holds: plain_ok,
        first_bound_holds: first_ok,
        min_margin,
        max_quad_error,
        rows,
    })
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
        .collect()
}

/// The twenty non-real frequencies of the study grid.
pub fn default_zeta_grid() -> Vec<Wavenumber> {
    let mut out = Vec::new();
    for m in [1.0, 10.0, 50.0, 100.0] {
        for a in [0.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5] {
            out.push(Wavenumber::from_study_grid(m, a).expect("grid frequencies are admissible"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_values() {
        let c = Cutoff::new(1.0).unwrap();
        assert_eq!(c.mu(0.0), 1.0);
        assert_eq!(c.mu(1.0), 1.0);
        assert_eq!(c.mu(2.0), 1.0);
        assert_eq!(c.mu(4.0), 0.0);
        assert_eq!(c.mu(5.0), 0.0);
        assert!((c.mu(3.0) - 0.5).abs() < 1e-15);
        // exact sup |μ''| R² = 5/(2√3), attained between grid points
        let exact = 5.0 / (2.0 * 3f64.sqrt());
        assert!(c.c_mu <= exact && c.c_mu > exact - 1e-6);
        assert!(Cutoff::new(0.0).is_err());
    }

    #[test]
    fn cutoff_is_twice_differentiable_at_the_knots() {
        let c = Cutoff::new(2.0).unwrap();
        for knot in [4.0, 8.0] {
            let (l0, l1, l2) = c.eval(knot - 1e-9);
            let (r0, r1, r2) = c.eval(knot + 1e-9);
            assert!((l0 - r0).abs() < 1e-8 && (l1 - r1).abs() < 1e-8 && (l2 - r2).abs() < 1e-8);
        }
    }

    #[test]
    fn e_functions() {
        assert!((e0(0.0) - 1.0).abs() < 1e-16);
        assert!((e1(0.0) - 0.5).abs() < 1e-16);
        assert!((e0(1.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        for t in [1e-6f64, 0.3, 0.999_999, 1.0, 2.5, 40.0] {
            let direct0 = (1.0 - (-t).exp()) / t;
            assert!((e0(t) - direct0).abs() < 1e-9 * direct0);
        }
        // continuity across the series switch
        assert!((e1(1.0 - 1e-12) - e1(1.0)).abs() < 1e-11);
    }

    #[test]
    fn gauss_kronrod_integrates_smooth_functions() {
        let (v, e) = adaptive_gauss_kronrod(&|x: f64| c64::new(x.cos(), x * x), 0.0, 3.0, 1);
        assert!((v - c64::new(3f64.sin(), 9.0)).norm() < 1e-13);
        assert!(e < 1e-10);
    }

    #[test]
    fn symbol_conjugation() {
        let cut = Cutoff::new(1.0).unwrap();
        let z = Wavenumber::from_parts(2.0, -7.0).unwrap();
        for s in [0.0, 1.5, 40.0] {
            let a = symbol_sigma(&z, s, &cut).unwrap().value;
            let b = symbol_sigma(&z.conj(), s, &cut).unwrap().value;
            assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn rejects_real_frequency_and_bad_lambda() {
        let cut = Cutoff::new(1.0).unwrap();
        let real = Wavenumber::from_parts(3.0, 0.0).unwrap();
        assert!(matches!(
            verify_symbol_bounds(&[real], &[1.0], 2.0, &cut),
            Err(FreqSplitError::RealFrequency(_))
        ));
        let z = Wavenumber::from_parts(0.0, -10.0).unwrap();
        assert!(matches!(
            verify_symbol_bounds(&[z], &[1.0], 1.0, &cut),
            Err(FreqSplitError::InvalidLambda(_))
        ));
    }
}
