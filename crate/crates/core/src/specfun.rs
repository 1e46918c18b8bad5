//! Faddeeva function `w(z) = e^{−z²} erfc(−iz)` and the Moshinsky function
//! built from it.
//!
//! `w` is evaluated with a Laplace continued fraction for large `|z|` and with
//! the exponentially convergent sum representation of Zaghloul & Ali
//! (ACM TOMS Algorithm 916) elsewhere. The lower half-plane is reached through
//! `w(−z) = 2e^{−z²} − w(z)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::PhysicsConstants;

/// 1/√π
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
/// π / √(−ln(ε/2)) for ε = 2⁻⁵², the sampling step of the Algorithm 916 sums.
const A916: f64 = 0.518_321_480_430_085_9;
/// (2/π)·A916
const C916: f64 = 0.329_973_702_884_629_07;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// e^{−iπ/4}
const EXP_MINUS_I_PI_4: Complex64 = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);

/// Faddeeva function. Non-finite input is rejected; a result that is not
/// representable (deep in the lower half-plane) is reported as
/// [`Error::NonFinite`].
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("faddeeva: non-finite argument {z}")));
    }
    let w = w_unchecked(z);
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonFinite("faddeeva"))
    }
}

fn w_unchecked(z: Complex64) -> Complex64 {
    let x = z.re.abs();
    let y = z.im;
    let ya = y.abs();
    let use_cf = ya > 7.0 || (x > 6.0 && (ya > 0.1 || (x > 8.0 && ya > 1e-10) || x > 28.0));
    if use_cf || x >= 10.0 {
        if y >= 0.0 {
            continued_fraction(z)
        } else {
            2.0 * (-z * z).exp() - continued_fraction(-z)
        }
    } else {
        sum916(z)
    }
}

/// Laplace continued fraction `(i/√π) / (z − ½/(z − 1/(z − 3/2/(z − …))))`,
/// valid for Im z ≥ 0 away from the origin.
fn continued_fraction(z: Complex64) -> Complex64 {
    let x = z.re.abs();
    let y = z.im;
    if x + y > 1e7 {
        return I * INV_SQRT_PI / z;
    }
    // Term count fitted for full double precision (Poppe & Wijers style),
    // padded generously.
    let nu = (3.9 + 11.398 / (0.08254 * x + 0.1421 * y + 0.2023)).floor();
    let terms = (2.0 * nu) as usize + 8;
    let mut w = z;
    for j in (1..terms).rev() {
        w = z - (0.5 * j as f64) / w;
    }
    I * INV_SQRT_PI / w
}

/// Algorithm 916 sums, valid for |x| < 10, |y| ≤ 7.
fn sum916(z: Complex64) -> Complex64 {
    let xs = z.re;
    let x = xs.abs();
    let y = z.im;

    let mut s1 = 0.0;
    // Σ e_n·2cosh(2anx) and Σ e_n·an·2sinh(2anx), e_n = e^{−a²n²−x²}/(a²n²+y²)
    let mut s_cosh = 0.0;
    let mut s_sinh = 0.0;
    let mut n = 1u32;
    loop {
        let an = A916 * n as f64;
        let denom = an * an + y * y;
        let base = (-(an * an) - x * x).exp();
        s1 += base / denom;
        let arg = 2.0 * an * x;
        if arg < 1.0 {
            s_cosh += base * 2.0 * arg.cosh() / denom;
            s_sinh += base * an * 2.0 * arg.sinh() / denom;
        } else {
            let lo = (-(an - x) * (an - x)).exp();
            let hi = (-(an + x) * (an + x)).exp();
            s_cosh += (lo + hi) / denom;
            s_sinh += an * (lo - hi) / denom;
        }
        if an > x + 6.5 && an * an > 40.0 {
            break;
        }
        n += 1;
    }

    let ex2 = (-x * x).exp();
    let e_erfcx = if y > -6.0 { ex2 * erfcx(y) } else { 2.0 * (y * y - x * x).exp() };
    let xy = xs * y;
    let coef1 = e_erfcx - C916 * y * s1;
    let coef2 = C916 * xs * ex2;
    let re = coef1 * (2.0 * xy).cos() + coef2 * xy.sin() * sinc(xy);
    let im = coef2 * sinc(2.0 * xy) - coef1 * (2.0 * xy).sin();
    Complex64::new(re + 0.5 * C916 * y * s_cosh, im + 0.5 * C916 * s_sinh.copysign(xs))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Scaled complementary error function e^{y²} erfc(y) for real y.
pub fn erfcx(y: f64) -> f64 {
    if y > 25.0 {
        // Asymptotic series; the first omitted term is below 1e-14 relative.
        let r = 1.0 / (2.0 * y * y);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=7 {
            term *= -((2 * k - 1) as f64) * r;
            sum += term;
        }
        sum * INV_SQRT_PI / y
    } else if y >= 0.0 {
        // y² split exactly into p + e so e^{y²} keeps full relative accuracy
        let p = y * y;
        let e = y.mul_add(y, -p);
        p.exp() * (1.0 + e) * libm::erfc(y)
    } else {
        2.0 * (y * y).exp() - erfcx(-y)
    }
}

/// Arguments of a Moshinsky function `M(x, q, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoshinskyArgs {
    /// Position (Å).
    pub x: f64,
    /// Complex wavenumber (Å⁻¹).
    pub q: Complex64,
    /// Time (ps), strictly positive.
    pub t: f64,
    pub constants: PhysicsConstants,
}

impl MoshinskyArgs {
    pub fn new(constants: PhysicsConstants, x: f64, q: Complex64, t: f64) -> Self {
        Self { x, q, t, constants }
    }

    fn check(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Domain(format!("Moshinsky function requires t > 0, got {}", self.t)));
        }
        if !(self.x.is_finite() && self.q.re.is_finite() && self.q.im.is_finite()) {
            return Err(Error::Domain("Moshinsky function requires finite x and q".into()));
        }
        Ok(())
    }

    /// m x²/(2ħt)
    fn free_phase(&self) -> f64 {
        self.x * self.x / (2.0 * self.constants.hbar_over_m * self.t)
    }

    /// i(qx − ħq²t/2m), equal to i·m x²/2ħt + y_q².
    fn plane_wave_exponent(&self) -> Complex64 {
        I * (self.q * self.x - 0.5 * self.constants.hbar_over_m * self.q * self.q * self.t)
    }

    fn reflected(&self) -> Self {
        Self { x: -self.x, q: -self.q, ..*self }
    }
}

/// `y_q = e^{−iπ/4} (x − ħqt/m) / √(2ħt/m)`.
pub fn moshinsky_arg(args: &MoshinskyArgs) -> Result<Complex64> {
    args.check()?;
    let hm = args.constants.hbar_over_m;
    let scale = (2.0 * hm * args.t).sqrt();
    Ok(EXP_MINUS_I_PI_4 * (args.x - hm * args.q * args.t) / scale)
}

/// `M(x, q, t) = ½ e^{imx²/2ħt} w(i y_q)`.
///
/// When `i·y_q` falls in the lower half-plane the identity
/// `M(x, q, t) = e^{iqx − iħq²t/2m} − M(−x, −q, t)` is used instead, so that
/// `w` is only ever evaluated where it is bounded.
pub fn moshinsky(args: &MoshinskyArgs) -> Result<Complex64> {
    let y = moshinsky_arg(args)?;
    let z = I * y;
    let m = if z.im >= 0.0 {
        0.5 * Complex64::from_polar(1.0, args.free_phase()) * faddeeva(z)?
    } else {
        args.plane_wave_exponent().exp() - moshinsky(&args.reflected())?
    };
    if m.re.is_finite() && m.im.is_finite() {
        Ok(m)
    } else {
        Err(Error::NonFinite("moshinsky"))
    }
}

/// Default lower bound on |y_q| for [`moshinsky_asymptotic`].
pub const ASYMPTOTIC_THRESHOLD: f64 = 5.0;

/// Leading-order large-|y_q| form of `M`:
/// `e^{imx²/2ħt} / (2√π y_q)` for arg y_q ∈ (−π/2, π/2] and
/// `e^{imx²/2ħt} e^{y_q²}` otherwise. For validation only.
pub fn moshinsky_asymptotic(args: &MoshinskyArgs, threshold: f64) -> Result<Complex64> {
    let y = moshinsky_arg(args)?;
    if y.norm() < threshold {
        return Err(Error::Precondition(format!("|y_q| = {} is below the asymptotic threshold {threshold}", y.norm())));
    }
    let arg = y.arg();
    if arg > -PI / 2.0 && arg <= PI / 2.0 {
        Ok(Complex64::from_polar(1.0, args.free_phase()) * INV_SQRT_PI / (2.0 * y))
    } else {
        Ok(args.plane_wave_exponent().exp())
    }
}
