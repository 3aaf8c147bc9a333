use alloc::format;

use crate::complex::Complex;
use crate::error::{NumError, Result};
use crate::real::Real;

/// `J_c(s) = c (s+1) ((s+1)/s)^{1/θ}`, with the branch fixed by `J_c(s) ~ c s` at infinity.
///
/// The cut is `(−1, 0]`; `s = −1` maps to the hard edge 0 and `s = 1/θ` to `b`.
pub fn jc_map(s: &Complex, c: &Real, theta: &Real) -> Result<Complex> {
    let p = s.prec();
    let one = Complex::one(p);
    let sp1 = s + &one;
    if sp1.is_zero() {
        return Ok(Complex::zero(p));
    }
    if s.im.is_zero() && !s.re.is_positive() && (&s.re + &Real::one(p)).is_positive() {
        return Err(NumError::BranchCut(format!(
            "s = {} on (−1, 0]",
            s.re.to_f64()
        )));
    }
    let ratio = &sp1 / s;
    let root = ratio.ln().scale(&theta.with_prec(p).recip()).exp();
    Ok((&sp1 * &root).scale(&c.with_prec(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 128;

    #[test]
    fn critical_points_map_to_the_edges() {
        let theta = Real::from_f64(2.5, P);
        let b = Real::from_f64(3.7, P);
        let tp1 = &theta + &Real::one(P);
        let c = &(&b * &theta) * &tp1.pow(&-(&Real::one(P) + &theta.recip()));
        assert!(jc_map(&Complex::from_f64(-1.0, 0.0, P), &c, &theta)
            .unwrap()
            .is_zero());
        let sb = Complex::from_real(theta.recip());
        let v = jc_map(&sb, &c, &theta).unwrap();
        assert!((&v.re - &b).log2_abs() < -120.0 && v.im.is_zero());
    }

    #[test]
    fn normalised_at_infinity() {
        let theta = Real::from_f64(0.7, P);
        let c = Real::from_f64(1.3, P);
        let s = Complex::from_f64(1e6, 0.0, P);
        let v = jc_map(&s, &c, &theta).unwrap();
        let r = &v / &s.scale(&c);
        assert!((r.re.to_f64() - 1.0).abs() < 1e-5 && r.im.is_zero());
    }

    #[test]
    fn cut_is_rejected() {
        let theta = Real::from_f64(2.0, P);
        let c = Real::one(P);
        assert!(matches!(
            jc_map(&Complex::from_f64(-0.5, 0.0, P), &c, &theta),
            Err(NumError::BranchCut(_))
        ));
        assert!(jc_map(&Complex::from_f64(-0.5, 1e-3, P), &c, &theta).is_ok());
    }
}
