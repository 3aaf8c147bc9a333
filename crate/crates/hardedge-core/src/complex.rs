//! Arbitrary-precision complex numbers over [`Real`].

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::real::Real;

/// Complex number with both parts at the same working precision.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Complex::new(Real::zero(prec), Real::zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Complex::new(Real::one(prec), Real::zero(prec))
    }

    pub fn i(prec: usize) -> Self {
        Complex::new(Real::zero(prec), Real::one(prec))
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Complex::new(re, Real::zero(p))
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex::new(Real::from_f64(re, prec), Real::from_f64(im, prec))
    }

    /// `r·e^{iφ}`.
    pub fn from_polar(r: &Real, phi: &Real) -> Self {
        Complex::new(r * &phi.cos(), r * &phi.sin())
    }

    /// `e^{iφ}`.
    pub fn cis(phi: &Real) -> Self {
        Complex::new(phi.cos(), phi.sin())
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        Complex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    /// `log2 |z|` to about double precision; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * libm::log2(1.0 + libm::exp2(2.0 * (lo - hi)))
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> Real {
        self.im.atan2(&self.re)
    }

    pub fn scale(&self, k: &Real) -> Self {
        Complex::new(&self.re * k, &self.im * k)
    }

    pub fn mul_i(&self) -> Self {
        Complex::new(-&self.im, self.re.clone())
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Complex::new(&self.re / &d, -(&self.im / &d))
    }

    pub fn exp(&self) -> Self {
        let r = self.re.exp();
        Complex::new(&r * &self.im.cos(), &r * &self.im.sin())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Complex::new(self.norm_sqr().ln().div_i64(2), self.arg())
    }

    /// Principal power `exp(e·log z)`.
    pub fn powc(&self, e: &Complex) -> Self {
        (e * &self.ln()).exp()
    }

    /// Principal power with a real exponent.
    pub fn powr(&self, e: &Real) -> Self {
        self.ln().scale(e).exp()
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Complex::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let r = self.abs();
        let two = Real::from_i64(2, self.prec());
        let a = ((&r + &self.re.abs()) / &two).sqrt();
        let b = &self.im.abs() / &(&a * &two);
        if !self.re.is_negative() {
            Complex::new(a, if self.im.is_negative() { -b } else { b })
        } else {
            Complex::new(b, if self.im.is_negative() { -a } else { a })
        }
    }

    pub fn sin(&self) -> Self {
        Complex::new(
            &self.re.sin() * &self.im.cosh(),
            &self.re.cos() * &self.im.sinh(),
        )
    }

    pub fn cos(&self) -> Self {
        Complex::new(
            &self.re.cos() * &self.im.cosh(),
            -(&self.re.sin() * &self.im.sinh()),
        )
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64();
        write!(f, "({a}{b:+}i)")
    }
}

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        Complex::new(re / &d, im / &d)
    }
}

macro_rules! owned_forward {
    ($tr:ident, $m:ident) => {
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $m(self, o: Complex) -> Complex {
                (&self).$m(&o)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $m(self, o: &Complex) -> Complex {
                (&self).$m(o)
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $m(self, o: Complex) -> Complex {
                self.$m(&o)
            }
        }
    };
}

owned_forward!(Add, add);
owned_forward!(Sub, sub);
owned_forward!(Mul, mul);
owned_forward!(Div, div);

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, o: &Complex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl AddAssign<Complex> for Complex {
    fn add_assign(&mut self, o: Complex) {
        *self += &o;
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, o: &Complex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Complex> for Complex {
    fn mul_assign(&mut self, o: &Complex) {
        *self = &*self * o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Complex, b: (f64, f64), tol: f64) -> bool {
        let (x, y) = a.to_f64();
        (x - b.0).abs() <= tol && (y - b.1).abs() <= tol
    }

    #[test]
    fn exp_ln_inverse() {
        let z = Complex::from_f64(-0.7, 2.1, 256);
        let back = z.ln().exp();
        assert!((&back - &z).abs().log2_abs() < -240.0);
    }

    #[test]
    fn principal_branches() {
        let z = Complex::from_f64(-4.0, -0.0, 128);
        assert!(close(
            &Complex::from_f64(-4.0, 1e-30, 128).sqrt(),
            (0.0, 2.0),
            1e-15
        ));
        assert!(close(
            &Complex::from_f64(-4.0, -1e-30, 128).sqrt(),
            (0.0, -2.0),
            1e-15
        ));
        assert!(close(
            &z.ln(),
            (libm::log(4.0), core::f64::consts::PI),
            1e-15
        ));
    }

    #[test]
    fn powi_matches_powr() {
        let z = Complex::from_f64(0.3, -1.2, 192);
        let a = z.powi(7);
        let b = z.powr(&Real::from_i64(7, 192));
        assert!((&a - &b).abs().log2_abs() < -170.0);
        let c = z.powi(-3) * z.powi(3);
        assert!(close(&c, (1.0, 0.0), 1e-40));
    }
}
