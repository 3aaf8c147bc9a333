//! Wright's generalized Bessel function `J_{a1,a2}(x) = Σ_j (−x)^j / (j! Γ(a1 + j a2))`.

use alloc::boxed::Box;
use alloc::vec;

use super::series::{adaptive_sum, log2_factorial, log2_gamma_f64, CoefGen, CoefTable, PartPlan};
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::gamma::rgamma;
use crate::real::Real;

/// Parameters `(a1, a2)` with `a2 > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WrightParams {
    a1: Real,
    a2: Real,
}

impl WrightParams {
    pub fn new(a1: Real, a2: Real) -> Result<Self> {
        if !a1.is_finite() || !a2.is_finite() || !a2.is_positive() {
            return Err(NumError::InvalidParameter(alloc::format!(
                "wright a2 must be positive, got {a2}"
            )));
        }
        Ok(WrightParams { a1, a2 })
    }

    pub fn from_f64(a1: f64, a2: f64, prec: usize) -> Result<Self> {
        Self::new(Real::from_f64(a1, prec), Real::from_f64(a2, prec))
    }

    pub fn a1(&self) -> &Real {
        &self.a1
    }

    pub fn a2(&self) -> &Real {
        &self.a2
    }
}

struct WrightCoef {
    a1: Real,
    a2: Real,
    a1f: f64,
    a2f: f64,
}

impl CoefGen for WrightCoef {
    fn coef(&self, k: usize, wp: usize) -> Real {
        let arg = self.a1.with_prec(wp) + self.a2.with_prec(wp).mul_i64(k as i64);
        let mut c = rgamma(&arg);
        for j in 2..=k {
            c = c.div_i64(j as i64);
        }
        c
    }

    fn log2_est(&self, k: usize) -> f64 {
        -log2_factorial(k) - log2_gamma_f64(self.a1f + k as f64 * self.a2f)
    }
}

/// Reusable evaluator; caches coefficient tables across arguments.
pub struct WrightBessel {
    table: CoefTable,
    ctx: PrecisionContext,
}

impl WrightBessel {
    pub fn new(params: &WrightParams, ctx: &PrecisionContext) -> Self {
        let gen = WrightCoef {
            a1: params.a1.clone(),
            a2: params.a2.clone(),
            a1f: params.a1.to_f64(),
            a2f: params.a2.to_f64(),
        };
        WrightBessel {
            table: CoefTable::new(Box::new(gen)),
            ctx: ctx.clone(),
        }
    }

    pub fn eval(&mut self, x: &Complex) -> Result<Complex> {
        if !x.is_finite() {
            return Err(NumError::NonFinite("wright_bessel argument".into()));
        }
        let target = self.ctx.mantissa_bits;
        let w = -x;
        let mut parts = [PartPlan {
            table: &mut self.table,
            log2w: w.log2_abs(),
            offset: 0.0,
        }];
        adaptive_sum(&mut parts, target, self.ctx.max_series_terms, |wp| {
            vec![(Complex::one(wp), w.with_prec(wp))]
        })
    }
}

/// `J_{a1,a2}(x)`, entire in `x`.
pub fn wright_bessel(
    params: &WrightParams,
    x: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    WrightBessel::new(params, ctx).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    /// Classical `J_ν(y)` by its own power series, as an independent check.
    fn bessel_j(nu: u32, y: f64, prec: usize) -> Real {
        let h = Real::from_f64(y, prec).div_i64(2);
        let h2 = &h * &h;
        let mut term = h.powi(nu as i64);
        for j in 1..=nu {
            term = term.div_i64(j as i64);
        }
        let mut sum = term.clone();
        for k in 1..400i64 {
            term = -(&term * &h2).div_i64(k * (k + nu as i64));
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_argument_gives_reciprocal_gamma() {
        let p = WrightParams::from_f64(2.5, 0.7, 192).unwrap();
        let v = wright_bessel(&p, &Complex::zero(192), &ctx()).unwrap();
        let want = rgamma(&Real::from_f64(2.5, 192));
        assert!((&v.re - &want).log2_abs() < -180.0);
        assert!(v.im.is_zero());
    }

    #[test]
    fn reduces_to_bessel_j0() {
        let p = WrightParams::from_f64(1.0, 1.0, 192).unwrap();
        let v = wright_bessel(&p, &Complex::from_f64(1.0, 0.0, 192), &ctx()).unwrap();
        let want = bessel_j(0, 2.0, 256);
        assert!((&v.re - &want.with_prec(192)).log2_abs() < -170.0);
        assert!((v.re.to_f64() - 0.223_890_779_141_235_7).abs() < 1e-15);
    }

    #[test]
    fn reduces_to_bessel_j1() {
        let p = WrightParams::from_f64(2.0, 1.0, 192).unwrap();
        let v = wright_bessel(&p, &Complex::from_f64(4.0, 0.0, 192), &ctx()).unwrap();
        let want = bessel_j(1, 4.0, 384).div_i64(2);
        assert!((&v.re - &want.with_prec(192)).log2_abs() < -170.0);
    }

    #[test]
    fn large_argument_cancellation_is_absorbed() {
        // J_{1,1}(x) = J0(2√x); at x = 2500 the terms reach 2^140 while the value is O(0.1).
        let p = WrightParams::from_f64(1.0, 1.0, 128).unwrap();
        let c = PrecisionContext::new(128).unwrap();
        let v = wright_bessel(&p, &Complex::from_f64(2500.0, 0.0, 128), &c).unwrap();
        let want = bessel_j(0, 100.0, 512);
        assert!((&v.re - &want.with_prec(128)).log2_abs() - want.log2_abs() < -110.0);
    }

    #[test]
    fn conjugation_symmetry() {
        let p = WrightParams::from_f64(0.3, 1.7, 160).unwrap();
        let c = PrecisionContext::new(160).unwrap();
        let mut w = WrightBessel::new(&p, &c);
        let z = Complex::from_f64(3.1, -7.2, 160);
        let a = w.eval(&z).unwrap();
        let b = w.eval(&z.conj()).unwrap();
        assert!((&a.conj() - &b).log2_abs() - a.log2_abs() < -150.0);
    }

    #[test]
    fn pole_terms_vanish() {
        // a1 = −1, a2 = 1: j = 0, 1 hit poles of Γ, so J = Σ_{j≥2} (−x)^j/(j!(j−2)!).
        let p = WrightParams::from_f64(-1.0, 1.0, 128).unwrap();
        let c = PrecisionContext::new(128).unwrap();
        let v = wright_bessel(&p, &Complex::from_f64(0.5, 0.0, 128), &c).unwrap();
        let mut want = 0.0;
        let mut fact = 1.0;
        for j in 2..30 {
            fact *= j as f64;
            let fj2: f64 = (1..=j - 2).map(|i| i as f64).product();
            want += (-0.5f64).powi(j) / (fact * fj2);
        }
        assert!((v.re.to_f64() - want).abs() < 1e-16);
    }
}
