//! Leading-order exponential behaviour of the Fox-type functions for large `|z|`.
//!
//! These are approximations with `O(1/z)` relative error, not evaluation paths: the
//! residue and Wright series stay accurate at every `|z|` by raising the working
//! precision.

use alloc::format;

use super::fox::{FoxIParams, FoxKind};
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::real::Real;

/// `|z|` beyond which the leading-order forms are considered representative.
pub fn asymptotic_threshold(theta: f64) -> f64 {
    30.0 * (theta + 1.0)
}

/// Open half-width of the sector `|arg z| < w` in which the leading form applies.
pub fn asymptotic_sector(kind: FoxKind, theta: f64) -> f64 {
    let pi = core::f64::consts::PI;
    match kind {
        FoxKind::First => theta * pi / (theta + 1.0),
        FoxKind::Second => pi,
        FoxKind::Third => pi / (theta + 1.0),
    }
}

/// Leading-order approximation of `I⁽ᵏ⁾_{θ,a}(z)`.
///
/// For kinds 1 and 3 both conjugate exponentials are kept; off the positive axis one of
/// them is exponentially subdominant, and on it they combine into the real value.
pub fn fox_i_asymptotic(
    kind: FoxKind,
    params: &FoxIParams,
    z: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let p = ctx.mantissa_bits + 32;
    let z = z.with_prec(p);
    let arg = z.arg().to_f64();
    let width = asymptotic_sector(kind, params.theta().to_f64());
    if z.is_zero() || arg.abs() >= width {
        return Err(NumError::Sector(format!(
            "arg z = {arg} outside |arg z| < {width}"
        )));
    }
    let value = match kind {
        FoxKind::First => first_kind(params, &z, p),
        FoxKind::Third => first_kind(&params.dual(), &z, p),
        FoxKind::Second => {
            let theta = params.theta().with_prec(p);
            let tp1 = &theta + &Real::one(p);
            let amp = (Real::pi(p).mul_i64(2) * tp1).sqrt() / theta.pow(&params.a().with_prec(p));
            (-&z).exp().scale(&amp)
        }
    };
    Ok(value.with_prec(ctx.mantissa_bits))
}

/// `√(θ+1)/(√(2π) θ^a) Σ_± e^{±(1/2−a)πi} e^{−z e^{±πi/(θ+1)}}`.
fn first_kind(params: &FoxIParams, z: &Complex, p: usize) -> Complex {
    let theta = params.theta().with_prec(p);
    let a = params.a().with_prec(p);
    let pi = Real::pi(p);
    let tp1 = &theta + &Real::one(p);
    let amp = tp1.sqrt() / (pi.mul_i64(2).sqrt() * theta.pow(&a));
    let phase = &(Real::ratio(1, 2, p) - &a) * &pi;
    let rot = &pi / &tp1;
    let mut sum = Complex::zero(p);
    for s in [1i64, -1] {
        let e = (-(z * &Complex::cis(&rot.mul_i64(s)))).exp();
        sum += &Complex::cis(&phase.mul_i64(s)) * &e;
    }
    sum.scale(&amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::fox::fox_i;

    fn polar(r: f64, phi: f64, p: usize) -> Complex {
        Complex::from_polar(&Real::from_f64(r, p), &Real::from_f64(phi, p))
    }

    fn rel(a: &Complex, b: &Complex) -> f64 {
        libm::exp2((a - b).log2_abs() - b.log2_abs())
    }

    #[test]
    fn second_kind_leading_form_at_100() {
        let c = PrecisionContext::new(128).unwrap();
        let p = FoxIParams::from_f64(1.0, 0.0, 128).unwrap();
        let v =
            fox_i_asymptotic(FoxKind::Second, &p, &Complex::from_f64(100.0, 0.0, 128), &c).unwrap();
        let want = libm::sqrt(4.0 * core::f64::consts::PI) * libm::exp(-100.0);
        assert!((v.re.to_f64() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_kind_upper_branch() {
        let c = PrecisionContext::new(128).unwrap();
        let p = FoxIParams::from_f64(2.0, 0.3, 128).unwrap();
        let z = polar(80.0, 0.5, 128);
        let a = fox_i_asymptotic(FoxKind::First, &p, &z, &c).unwrap();
        let v = fox_i(FoxKind::First, &p, &z, &c).unwrap();
        assert!(rel(&a, &v) <= 10.0 / 80.0);
    }

    #[test]
    fn consistency_on_a_circle_of_radius_60() {
        let c = PrecisionContext::new(128).unwrap();
        let p = FoxIParams::from_f64(1.0, 0.3, 128).unwrap();
        for kind in [FoxKind::First, FoxKind::Second, FoxKind::Third] {
            let w = asymptotic_sector(kind, 1.0);
            for i in 0..8 {
                let phi = -w + (i as f64 + 0.5) * 2.0 * w / 8.0;
                if phi.abs() < 0.05 {
                    continue;
                }
                let z = polar(60.0, phi, 128);
                let a = fox_i_asymptotic(kind, &p, &z, &c).unwrap();
                let v = fox_i(kind, &p, &z, &c).unwrap();
                assert!(rel(&a, &v) <= 10.0 / 60.0, "kind {kind:?} arg {phi}");
            }
        }
    }

    #[test]
    fn outside_sector_is_rejected() {
        let c = PrecisionContext::new(64).unwrap();
        let p = FoxIParams::from_f64(1.0, 0.3, 64).unwrap();
        let z = polar(60.0, 1.7, 64);
        assert!(matches!(
            fox_i_asymptotic(FoxKind::First, &p, &z, &c),
            Err(NumError::Sector(_))
        ));
        assert!(matches!(
            fox_i_asymptotic(FoxKind::Third, &p, &z, &c),
            Err(NumError::Sector(_))
        ));
        assert!(fox_i_asymptotic(FoxKind::Second, &p, &z, &c).is_ok());
    }
}
