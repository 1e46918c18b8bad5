//! Reference implementations shared by the integration tests. None of them
//! call into the library's numerical kernels.
#![allow(dead_code)]

pub mod bigfx;

use num_complex::Complex64;

/// Moshinsky function by direct quadrature of
/// `(i/2π) ∫ e^{ik'x − iβk'²/2} / (k' − q) dk'`, β = ħt/m, along the
/// steepest-descent line `k' = x/β + e^{−iπ/4} u`, plus the pole residue when
/// q lies above that line.
pub fn moshinsky_quadrature(x: f64, q: Complex64, t: f64, hbar_over_m: f64) -> Complex64 {
    let beta = hbar_over_m * t;
    let ks = x / beta;
    let rot = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2);
    // signed distance of q from the line (positive above)
    let side = (q.im + q.re - ks) / std::f64::consts::SQRT_2;
    let width = 1.0 / beta.sqrt();
    let h = (0.4 * width).min(side.abs() / 7.0);
    let u_max = 9.5 * width;
    let n = (u_max / h).ceil() as i64;
    let h = u_max / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let u = j as f64 * h;
        let k = ks + rot * u;
        sum += (-0.5 * beta * u * u).exp() / (k - q);
    }
    let phase = Complex64::from_polar(1.0, x * x / (2.0 * beta));
    let mut m = Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI)) * phase * rot * sum * h;
    if side > 0.0 {
        m += (Complex64::new(0.0, 1.0) * (q * x - 0.5 * beta * q * q)).exp();
    }
    m
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Closed-form free evolution of `exp(−(x−x0)²/4σ² + ik0(x−x0))`.
pub fn free_gaussian(x: f64, t: f64, x0: f64, sigma: f64, k0: f64, hbar_over_m: f64) -> Complex64 {
    let alpha = Complex64::new(1.0, hbar_over_m * t / (2.0 * sigma * sigma));
    let d = x - x0 - hbar_over_m * k0 * t;
    let phase = Complex64::new(0.0, k0 * (x - x0) - 0.5 * hbar_over_m * k0 * k0 * t);
    (-(d * d) / (4.0 * sigma * sigma * alpha) + phase).exp() / alpha.sqrt()
}
