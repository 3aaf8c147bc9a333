use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::complex::Complex;
use crate::error::{NumError, Result};
use crate::real::Real;

/// External field `V` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    /// `V(x) = x`.
    Linear,
    /// `V(x) = x^r`, `r ≥ 1`.
    Monomial(u32),
    /// `V(x) = Σ_k c_k x^k`.
    Series(Vec<f64>),
}

impl Potential {
    /// Rejects fields that do not beat `log x` at infinity, sampled at `10², 10⁴, 10⁶`.
    pub fn validated(self) -> Result<Self> {
        if let Potential::Monomial(0) = self {
            return Err(NumError::InvalidParameter(
                "monomial exponent must be ≥ 1".into(),
            ));
        }
        let ratios: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|&x| self.value(x) / libm::log(x))
            .collect();
        let growing = ratios.iter().all(|r| r.is_finite() && *r > 1.0)
            && ratios.windows(2).all(|w| w[1] > w[0]);
        if !growing {
            return Err(NumError::InvalidParameter(format!(
                "V(x)/log x is not growing: {ratios:?}"
            )));
        }
        Ok(self)
    }

    fn coeffs(&self) -> Vec<f64> {
        match self {
            Potential::Linear => alloc::vec![0.0, 1.0],
            Potential::Monomial(r) => {
                let mut c = alloc::vec![0.0; *r as usize + 1];
                c[*r as usize] = 1.0;
                c
            }
            Potential::Series(c) => c.clone(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let c = self.coeffs();
        (1..c.len())
            .rev()
            .fold(0.0, |acc, k| acc * x + k as f64 * c[k])
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let c = self.coeffs();
        (2..c.len())
            .rev()
            .fold(0.0, |acc, k| acc * x + (k * (k - 1)) as f64 * c[k])
    }

    pub fn value_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs().iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// `V(x)` at the precision of `x`; the coefficients are exact binary doubles.
    pub fn value_real(&self, x: &Real) -> Real {
        let p = x.prec();
        match self {
            Potential::Linear => x.clone(),
            Potential::Monomial(r) => x.powi(*r as i64),
            Potential::Series(c) => c
                .iter()
                .rev()
                .fold(Real::zero(p), |acc, &ck| acc * x + Real::from_f64(ck, p)),
        }
    }

    pub fn value_at(&self, z: &Complex) -> Complex {
        let p = z.prec();
        match self {
            Potential::Linear => z.clone(),
            Potential::Monomial(r) => z.powi(*r as i64),
            Potential::Series(c) => c.iter().rev().fold(Complex::zero(p), |acc, &ck| {
                let mut next = &acc * z;
                next.re += &Real::from_f64(ck, p);
                next
            }),
        }
    }
}

/// Sufficient condition for one-cut regularity: `x V''(x) + V'(x) > 0` on a log-spaced grid
/// of 1000 points in `[10⁻⁸ xmax, xmax]`.
pub fn check_one_cut_sufficient(v: &Potential, xmax: f64) -> bool {
    const POINTS: usize = 1000;
    (0..POINTS).all(|i| {
        let x = xmax * libm::pow(10.0, -8.0 * (1.0 - i as f64 / (POINTS - 1) as f64));
        x * v.second_derivative(x) + v.derivative(x) > 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sufficient_condition_examples() {
        assert!(check_one_cut_sufficient(&Potential::Linear, 10.0));
        assert!(check_one_cut_sufficient(&Potential::Monomial(2), 10.0));
        assert!(!check_one_cut_sufficient(
            &Potential::Series(alloc::vec![0.0, -1.0]),
            10.0
        ));
    }

    #[test]
    fn derivatives_of_a_series() {
        let v = Potential::Series(alloc::vec![1.0, 2.0, 0.5, 0.25]);
        let x = 1.7;
        assert!((v.value(x) - (1.0 + 2.0 * x + 0.5 * x * x + 0.25 * x * x * x)).abs() < 1e-14);
        assert!((v.derivative(x) - (2.0 + x + 0.75 * x * x)).abs() < 1e-14);
        assert!((v.second_derivative(x) - (1.0 + 1.5 * x)).abs() < 1e-14);
    }

    #[test]
    fn growth_is_enforced() {
        assert!(Potential::Linear.validated().is_ok());
        assert!(Potential::Series(alloc::vec![1.0]).validated().is_err());
        assert!(Potential::Monomial(0).validated().is_err());
    }
}
