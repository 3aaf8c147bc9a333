//! Precision and quadrature settings threaded through every routine.

use crate::error::{NumError, Result};
use alloc::format;

/// Working precision and refinement limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    /// Binary mantissa precision of every intermediate.
    pub mantissa_bits: usize,
    /// Target relative error, at least `2^-mantissa_bits`.
    pub rel_tol: f64,
    pub max_series_terms: usize,
    /// Starting node count for closed-contour rules.
    pub quad_points_circle: usize,
    /// Starting node count for line and half-line rules.
    pub quad_points_line: usize,
}

impl PrecisionContext {
    pub const MIN_BITS: usize = 64;

    /// Context with `rel_tol = 2^-(bits/2)`.
    pub fn new(mantissa_bits: usize) -> Result<Self> {
        let rel_tol = libm::exp2(-(mantissa_bits as f64) / 2.0);
        Self::with_tol(mantissa_bits, rel_tol)
    }

    pub fn with_tol(mantissa_bits: usize, rel_tol: f64) -> Result<Self> {
        if mantissa_bits < Self::MIN_BITS {
            return Err(NumError::InvalidParameter(format!(
                "mantissa_bits {mantissa_bits} < 64"
            )));
        }
        let floor = libm::exp2(-(mantissa_bits as f64));
        if !(rel_tol > 0.0) || rel_tol < floor {
            return Err(NumError::InvalidParameter(format!(
                "rel_tol {rel_tol} outside (2^-bits, ∞)"
            )));
        }
        Ok(PrecisionContext {
            mantissa_bits,
            rel_tol,
            max_series_terms: 200_000,
            quad_points_circle: 64,
            quad_points_line: 64,
        })
    }

    /// Same settings at a different precision; `rel_tol` is kept, clamped to the new floor.
    pub fn at_bits(&self, mantissa_bits: usize) -> Self {
        let mut c = *self;
        c.mantissa_bits = mantissa_bits.max(Self::MIN_BITS);
        c.rel_tol = self
            .rel_tol
            .min(1.0)
            .max(libm::exp2(-(c.mantissa_bits as f64)));
        c
    }

    /// Tolerance as a binary exponent, `log2 rel_tol`.
    pub fn tol_bits(&self) -> f64 {
        libm::log2(self.rel_tol)
    }

    pub fn prec(&self) -> usize {
        self.mantissa_bits
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(256).expect("256 bits is a valid precision")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision_and_tiny_tolerance() {
        assert!(PrecisionContext::new(32).is_err());
        assert!(PrecisionContext::with_tol(64, 1e-30).is_err());
        assert!(PrecisionContext::with_tol(64, 0.0).is_err());
    }

    #[test]
    fn default_tolerance_is_half_the_bits() {
        let c = PrecisionContext::new(128).unwrap();
        assert_eq!(c.rel_tol, libm::exp2(-64.0));
    }
}
