//! Arbitrary-precision real numbers.
//!
//! `Real` wraps an `astro_float::BigFloat` together with its working precision.
//! Binary operations round to the larger of the two operand precisions.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use spin::{Lazy, Mutex};

const RM: RoundingMode = RoundingMode::ToEven;

static CONSTS: Lazy<Mutex<Consts>> =
    Lazy::new(|| Mutex::new(Consts::new().expect("constant cache allocation")));

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    let mut cc = CONSTS.lock();
    f(&mut cc)
}

/// Extra bits used when converting to and from decimal.
const DECIMAL_GUARD: usize = 64;

/// Real number carrying its own binary precision.
#[derive(Clone)]
pub struct Real {
    x: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(x: BigFloat, prec: usize) -> Self {
        Real { x, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Self::wrap(BigFloat::new(prec), prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_f64(v, prec), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::wrap(BigFloat::from_i64(v, prec), prec)
    }

    /// `num / den` rounded once.
    pub fn ratio(num: i64, den: i64, prec: usize) -> Self {
        Self::from_i64(num, prec) / Self::from_i64(den, prec)
    }

    /// Parses a decimal literal such as `"1.25e-3"`; `None` if it is not a finite number.
    /// Output of [`Real::to_decimal_string`] reads back to the identical value.
    pub fn parse(s: &str, prec: usize) -> Option<Self> {
        // The conversion is only faithful to the last few bits, so it runs with guard bits.
        let x =
            with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, prec + DECIMAL_GUARD, RM, cc));
        if x.is_nan() || x.is_inf() {
            None
        } else {
            {
                // Arithmetic keeps whole mantissa words, so the parsed value is rounded to the same width.
                let mut r = Self::wrap(x, prec + DECIMAL_GUARD).with_prec(prec.div_ceil(64) * 64);
                r.prec = prec;
                Some(r)
            }
        }
    }

    pub fn pi(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn ln2(prec: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.ln_2(prec, RM)), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Same value rounded (or zero-extended) to `prec` bits.
    pub fn with_prec(&self, prec: usize) -> Self {
        let mut x = self.x.clone();
        if !x.is_zero() {
            // rounding can only fail for an invalid precision, which `prec` never is here
            let _ = x.set_precision(prec, RM);
        }
        Self::wrap(x, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.x.is_nan() && !self.x.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        !self.x.is_zero() && self.x.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.x.is_zero() && self.x.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.x.abs(), self.prec)
    }

    pub fn signum_i32(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.x.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Nearest `f64`; saturates to infinity or zero outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.x.is_nan() {
            return f64::NAN;
        }
        if self.x.is_inf() {
            return if self.x.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        match self.x.as_raw_parts() {
            None => 0.0,
            Some((words, _, sign, e, _)) => {
                if self.x.is_zero() || words.is_empty() {
                    return 0.0;
                }
                let top = words[words.len() - 1] as u64;
                let next = if words.len() > 1 {
                    words[words.len() - 2] as u64
                } else {
                    0
                };
                // top word carries the leading 64 bits; the next word only matters for rounding
                let m = top as f64 + libm::ldexp(next as f64, -64);
                let v = libm::ldexp(m, e as i32 - 64);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// `log2 |x|` to about double precision, valid far outside the `f64` range.
    /// Returns `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        match self.x.as_raw_parts() {
            Some((words, _, _, e, _)) if !self.x.is_zero() && !words.is_empty() => {
                let top = words[words.len() - 1] as u64;
                e as f64 + libm::log2(libm::ldexp(top as f64, -64))
            }
            _ => f64::NEG_INFINITY,
        }
    }

    /// Binary exponent `e` with `|x| ∈ [2^(e-1), 2^e)`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.x.is_zero() {
            None
        } else {
            self.x.exponent().map(|e| e as i64)
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.x.sqrt(self.prec, RM), self.prec)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.sin(self.prec, RM, cc)), self.prec)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.cos(self.prec, RM, cc)), self.prec)
    }

    pub fn atan(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.atan(self.prec, RM, cc)), self.prec)
    }

    pub fn cosh(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.cosh(self.prec, RM, cc)), self.prec)
    }

    pub fn sinh(&self) -> Self {
        Self::wrap(with_consts(|cc| self.x.sinh(self.prec, RM, cc)), self.prec)
    }

    /// Four-quadrant arctangent of `self / x` in `(-π, π]`.
    pub fn atan2(&self, x: &Real) -> Self {
        let p = self.prec.max(x.prec);
        if x.is_zero() {
            let half_pi = Self::pi(p) / Self::from_i64(2, p);
            return match self.signum_i32() {
                1 => half_pi,
                -1 => -half_pi,
                _ => Self::zero(p),
            };
        }
        if self.abs() > x.abs() {
            // keep the atan argument bounded by 1
            let base = (x / self).atan();
            let half_pi = Self::pi(p) / Self::from_i64(2, p);
            return if self.is_negative() {
                -half_pi - base
            } else {
                half_pi - base
            };
        }
        let a = (self / x).atan();
        if x.is_positive() {
            a
        } else if self.is_negative() {
            a - Self::pi(p)
        } else {
            a + Self::pi(p)
        }
    }

    /// `self^e` for `self > 0`.
    pub fn pow(&self, e: &Real) -> Self {
        let p = self.prec.max(e.prec);
        Self::wrap(with_consts(|cc| self.x.pow(&e.x, p, RM, cc)), p)
    }

    /// Integer power by repeated squaring; negative exponents invert.
    pub fn powi(&self, n: i64) -> Self {
        let mut r = Self::wrap(
            self.x.powi(n.unsigned_abs() as usize, self.prec, RM),
            self.prec,
        );
        if n < 0 {
            r = r.recip();
        }
        r
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.x.reciprocal(self.prec, RM), self.prec)
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.x.floor(), self.prec).with_prec(self.prec)
    }

    pub fn ceil(&self) -> Self {
        Self::wrap(self.x.ceil(), self.prec).with_prec(self.prec)
    }

    /// Nearest integer (ties away from zero) as an `i64`; `None` when out of range.
    pub fn round_i64(&self) -> Option<i64> {
        let v = self.to_f64();
        if !v.is_finite() || v.abs() > 9.0e15 {
            return None;
        }
        Some(libm::round(v) as i64)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self * &Self::from_i64(k, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self / &Self::from_i64(k, self.prec)
    }

    pub fn add_f64(&self, v: f64) -> Self {
        self + &Self::from_f64(v, self.prec)
    }

    pub fn mul_f64(&self, v: f64) -> Self {
        self * &Self::from_f64(v, self.prec)
    }

    /// Decimal scientific notation with enough digits beyond the mantissa to round-trip.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let wide = self.with_prec(self.prec + DECIMAL_GUARD);
        with_consts(|cc| wide.x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| String::from("NaN"))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.x.cmp(&other.x).map(|c| c.cmp(&0))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(mut self) -> Real {
        self.x.inv_sign();
        self
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -self.clone()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.x.$op(&rhs.x, p, RM), p)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self.$m(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                (&self).$m(rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$m(&rhs)
            }
        }
        impl $atr<&Real> for Real {
            fn $am(&mut self, rhs: &Real) {
                *self = (&*self).$m(rhs);
            }
        }
        impl $atr<Real> for Real {
            fn $am(&mut self, rhs: Real) {
                *self = (&*self).$m(&rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, add);
binop!(Sub, sub, SubAssign, sub_assign, sub);
binop!(Mul, mul, MulAssign, mul_assign, mul);
binop!(Div, div, DivAssign, div_assign, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip() {
        for v in [1.0, -2.5, 1e-300, 3.0e200, core::f64::consts::PI] {
            assert_eq!(Real::from_f64(v, 256).to_f64(), v);
        }
        assert_eq!(Real::zero(128).to_f64(), 0.0);
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        let third = Real::ratio(1, 3, 320);
        let back = Real::parse(&third.to_decimal_string(), 320).unwrap();
        assert!((back - &third).is_zero());
    }

    #[test]
    fn atan2_quadrants() {
        let p = 128;
        let one = Real::one(p);
        let pi = Real::pi(p).to_f64();
        let cases = [
            (1.0, 1.0, pi / 4.0),
            (1.0, -1.0, 3.0 * pi / 4.0),
            (-1.0, -1.0, -3.0 * pi / 4.0),
            (-2.0, 0.5, libm::atan2(-2.0, 0.5)),
        ];
        for (y, x, want) in cases {
            let got = Real::from_f64(y, p).atan2(&Real::from_f64(x, p)).to_f64();
            assert!((got - want).abs() < 1e-15, "{y} {x}: {got} vs {want}");
        }
        assert!((one.atan2(&Real::zero(p)).to_f64() - pi / 2.0).abs() < 1e-15);
    }

    #[test]
    fn log2_abs_far_outside_f64() {
        let big = Real::from_f64(1e6, 128).exp();
        let want = 1e6 / core::f64::consts::LN_2;
        assert!((big.log2_abs() - want).abs() < 1e-6);
    }

    #[test]
    fn zero_keeps_precision() {
        let z = Real::zero(512);
        assert_eq!(z.prec(), 512);
        assert_eq!((z + Real::ratio(1, 3, 64)).prec(), 512);
    }
}
