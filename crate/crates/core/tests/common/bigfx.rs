//! Extended-precision reference for the Faddeeva function.
//!
//! Complex fixed-point arithmetic on big integers (value = v / 2^bits) and the
//! everywhere-convergent Taylor series
//! `w(z) = e^{−z²} + (2i/√π) z Σₙ (−2z²)ⁿ / (2n+1)!!`.
//! Working precision grows with |z|² so the cancellation between terms of
//! size e^{|z|²} is absorbed. Independent of the library's algorithms.

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;

#[derive(Clone, Debug)]
struct Fx {
    v: BigInt,
}

#[derive(Clone, Copy)]
struct Prec(u64);

impl Fx {
    fn zero() -> Self {
        Fx { v: BigInt::from(0) }
    }

    fn from_int(n: i64, p: Prec) -> Self {
        Fx { v: BigInt::from(n) << p.0 }
    }

    fn from_f64(x: f64, p: Prec) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let (mant, e) = if exp == 0 {
            ((bits & 0xf_ffff_ffff_ffff) as i64, -1074)
        } else {
            (((bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000) as i64, exp - 1075)
        };
        let m = BigInt::from(sign * mant);
        let shift = p.0 as i64 + e;
        assert!(shift >= 0, "precision too small for {x}");
        Fx { v: m << shift as u64 }
    }

    fn to_f64(&self, p: Prec) -> f64 {
        let bl = self.v.bits() as i64;
        if bl == 0 {
            return 0.0;
        }
        let drop = (bl - 64).max(0);
        let top = &self.v >> drop as u64;
        let (sign, digits) = top.to_u64_digits();
        let mag = digits.first().copied().unwrap_or(0) as f64;
        let s = if sign == Sign::Minus { -1.0 } else { 1.0 };
        let e = drop - p.0 as i64;
        // split the scaling to stay inside the exponent range
        s * mag * 2f64.powi((e / 2) as i32) * 2f64.powi((e - e / 2) as i32)
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx { v: &self.v + &o.v }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx { v: &self.v - &o.v }
    }

    fn mul(&self, o: &Fx, p: Prec) -> Fx {
        Fx { v: (&self.v * &o.v) >> p.0 }
    }

    fn div_int(&self, n: i64) -> Fx {
        Fx { v: &self.v / BigInt::from(n) }
    }

    fn div(&self, o: &Fx, p: Prec) -> Fx {
        Fx { v: (&self.v << p.0) / &o.v }
    }

    fn neg(&self) -> Fx {
        Fx { v: -&self.v }
    }

    fn is_zero(&self) -> bool {
        self.v.sign() == Sign::NoSign
    }

    fn sqrt(&self, p: Prec) -> Fx {
        Fx { v: (&self.v << p.0).sqrt() }
    }
}

/// atan(1/m) by its alternating series.
fn atan_inv(m: i64, p: Prec) -> Fx {
    let mut sum = Fx::zero();
    let mut power = Fx::from_int(1, p).div_int(m);
    let m2 = m * m;
    let mut k = 0i64;
    while !power.is_zero() {
        let term = power.div_int(2 * k + 1);
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        power = power.div_int(m2);
        k += 1;
    }
    sum
}

fn pi(p: Prec) -> Fx {
    atan_inv(5, p).mul(&Fx::from_int(16, p), p).sub(&atan_inv(239, p).mul(&Fx::from_int(4, p), p))
}

fn exp_real(a: &Fx, p: Prec) -> Fx {
    // e^a = (e^{a/2^s})^{2^s}
    let s = 12u32;
    let r = Fx { v: &a.v >> s as u64 };
    let one = Fx::from_int(1, p);
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1i64;
    loop {
        term = term.mul(&r, p).div_int(k);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        k += 1;
    }
    for _ in 0..s {
        sum = sum.mul(&sum, p);
    }
    sum
}

fn cos_sin(b: &Fx, p: Prec) -> (Fx, Fx) {
    // reduce modulo 2π, halve s times, Taylor-expand e^{ih}, then square back
    let two_pi = pi(p).mul(&Fx::from_int(2, p), p);
    let n = &b.v / &two_pi.v;
    let r = Fx { v: &b.v - n * &two_pi.v };
    let s = 10u32;
    let h = Fx { v: &r.v >> s as u64 };
    let mut c = Fx::from_int(1, p);
    let mut sn = Fx::zero();
    let (mut tr, mut ti) = (Fx::from_int(1, p), Fx::zero());
    let mut k = 1i64;
    loop {
        // term *= i h / k
        let nr = ti.mul(&h, p).neg().div_int(k);
        let ni = tr.mul(&h, p).div_int(k);
        tr = nr;
        ti = ni;
        if tr.is_zero() && ti.is_zero() {
            break;
        }
        c = c.add(&tr);
        sn = sn.add(&ti);
        k += 1;
    }
    for _ in 0..s {
        let c2 = c.mul(&c, p).sub(&sn.mul(&sn, p));
        let s2 = c.mul(&sn, p).mul(&Fx::from_int(2, p), p);
        c = c2;
        sn = s2;
    }
    (c, sn)
}

#[derive(Clone)]
struct Cx {
    re: Fx,
    im: Fx,
}

impl Cx {
    fn mul(&self, o: &Cx, p: Prec) -> Cx {
        Cx {
            re: self.re.mul(&o.re, p).sub(&self.im.mul(&o.im, p)),
            im: self.re.mul(&o.im, p).add(&self.im.mul(&o.re, p)),
        }
    }
}

/// Reference w(z); `extra_bits` adds precision on top of the automatic budget.
pub fn faddeeva_reference(z: Complex64, extra_bits: u64) -> Complex64 {
    let r2 = z.norm_sqr();
    let p = Prec(160 + extra_bits + (r2 * 1.5) as u64 + (r2.sqrt() * 4.0) as u64);
    let zc = Cx { re: Fx::from_f64(z.re, p), im: Fx::from_f64(z.im, p) };
    let z2 = zc.mul(&zc, p);
    let factor = Cx { re: z2.re.mul(&Fx::from_int(-2, p), p), im: z2.im.mul(&Fx::from_int(-2, p), p) };

    // Σ Tₙ, T₀ = z, Tₙ = Tₙ₋₁ · (−2z²)/(2n+1)
    let mut term = zc.clone();
    let mut sum = zc.clone();
    let mut n = 1i64;
    let min_terms = (3.0 * r2) as i64 + 20;
    loop {
        let t = term.mul(&factor, p);
        term = Cx { re: t.re.div_int(2 * n + 1), im: t.im.div_int(2 * n + 1) };
        if term.re.is_zero() && term.im.is_zero() && n > min_terms {
            break;
        }
        sum = Cx { re: sum.re.add(&term.re), im: sum.im.add(&term.im) };
        n += 1;
    }
    // (2i/√π)·sum
    let sqrt_pi = pi(p).sqrt(p);
    let two_over = Fx::from_int(2, p).div(&sqrt_pi, p);
    let series = Cx { re: sum.im.mul(&two_over, p).neg(), im: sum.re.mul(&two_over, p) };

    // e^{−z²}
    let a = z2.re.neg();
    let b = z2.im.neg();
    let ea = exp_real(&a, p);
    let (cb, sb) = cos_sin(&b, p);
    let e = Cx { re: ea.mul(&cb, p), im: ea.mul(&sb, p) };

    Complex64::new(e.re.add(&series.re).to_f64(p), e.im.add(&series.im).to_f64(p))
}
