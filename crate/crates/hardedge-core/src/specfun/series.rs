//! Power series `Σ c_k w^k` with real coefficients and complex argument.
//!
//! Truncation is planned in double precision from `log2 |c_k|` estimates; coefficients
//! are materialized lazily at the working precision and cached.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{NumError, Result};
use crate::real::Real;

/// Source of series coefficients.
pub(crate) trait CoefGen: Send + Sync {
    /// Exact coefficient `c_k` at `wp` bits.
    fn coef(&self, k: usize, wp: usize) -> Real;
    /// `log2 |c_k|` to a few bits; `-inf` for an exactly vanishing coefficient.
    fn log2_est(&self, k: usize) -> f64;
}

const NULL_SCAN: usize = 4096;

pub(crate) struct CoefTable {
    gen: Box<dyn CoefGen>,
    wp: usize,
    coefs: Vec<Real>,
    /// Cached `log2_est` values; planning rescans them on every evaluation.
    ests: Vec<f64>,
}

impl CoefTable {
    pub fn new(gen: Box<dyn CoefGen>) -> Self {
        CoefTable {
            gen,
            wp: 0,
            coefs: Vec::new(),
            ests: Vec::new(),
        }
    }

    fn ensure(&mut self, k_max: usize, wp: usize) {
        if wp > self.wp {
            self.coefs.clear();
            self.wp = wp;
        }
        while self.coefs.len() < k_max {
            let k = self.coefs.len();
            self.coefs.push(self.gen.coef(k, self.wp));
        }
    }

    fn est(&mut self, k: usize) -> f64 {
        while self.ests.len() <= k {
            let next = self.gen.log2_est(self.ests.len());
            self.ests.push(next);
        }
        self.ests[k]
    }

    /// Largest `log2 |c_k w^k|` and its index, scanning until terms have decayed.
    ///
    /// A run of `NULL_SCAN` vanishing coefficients is taken to mean all later ones vanish.
    pub fn peak(&mut self, log2w: f64, max_terms: usize) -> Result<(f64, usize)> {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        let mut last_finite = 0;
        for k in 0..=max_terms {
            let c = self.est(k);
            if c == f64::NEG_INFINITY {
                // A long run of vanishing coefficients ends the scan: either the series is
                // null or it is a polynomial.
                if k >= last_finite + NULL_SCAN {
                    return Ok((best, arg));
                }
                continue;
            }
            last_finite = k;
            if log2w == f64::NEG_INFINITY {
                return Ok((if k == 0 { c } else { f64::NEG_INFINITY }, 0));
            }
            let t = c + k as f64 * log2w;
            if t > best {
                best = t;
                arg = k;
            }
            if k > arg + 8 && t < best - 400.0 {
                return Ok((best, arg));
            }
        }
        Err(NumError::NonConvergence(format!(
            "series peak beyond {max_terms} terms"
        )))
    }

    /// Number of terms needed so every later term is below `2^threshold`.
    ///
    /// Counting starts at `start`, the peak index; the tail must then stay below for
    /// several consecutive terms, which tolerates the jitter of `Γ` at negative arguments.
    pub fn terms_needed(
        &mut self,
        log2w: f64,
        threshold: f64,
        start: usize,
        max_terms: usize,
    ) -> Result<usize> {
        if log2w == f64::NEG_INFINITY {
            return Ok(1);
        }
        let mut below = 0;
        let mut last_finite = start;
        for k in start..=max_terms {
            let c = self.est(k);
            if c == f64::NEG_INFINITY {
                if k >= last_finite + NULL_SCAN {
                    return Ok(last_finite + 1);
                }
                continue;
            }
            last_finite = k;
            let t = c + k as f64 * log2w;
            if t < threshold {
                below += 1;
                if below >= 6 {
                    return Ok(k + 1);
                }
            } else {
                below = 0;
            }
        }
        Err(NumError::NonConvergence(format!(
            "series needs more than {max_terms} terms"
        )))
    }

    /// Horner evaluation of the first `n` terms at `wp` bits.
    pub fn eval(&mut self, w: &Complex, n: usize, wp: usize) -> Complex {
        self.ensure(n, wp);
        let w = w.with_prec(wp);
        let mut acc = Complex::zero(wp);
        for k in (0..n).rev() {
            acc = &acc * &w;
            acc.re += &self.coefs[k].with_prec(wp);
        }
        acc
    }
}

/// `log2 |Γ(x)|` in double precision; `+inf` at poles.
pub(crate) fn log2_gamma_f64(x: f64) -> f64 {
    if x <= 0.0 && x == libm::floor(x) {
        return f64::INFINITY;
    }
    libm::lgamma(x) * core::f64::consts::LOG2_E
}

pub(crate) fn log2_factorial(k: usize) -> f64 {
    libm::lgamma(k as f64 + 1.0) * core::f64::consts::LOG2_E
}

/// One summand `pref · Σ c_k w^k` of an adaptive evaluation, described in `log2` magnitudes.
pub(crate) struct PartPlan<'t> {
    pub table: &'t mut CoefTable,
    pub log2w: f64,
    /// `log2 |pref|`.
    pub offset: f64,
}

/// Evaluates `Σ_s pref_s S_s(w_s)` to `target` bits.
///
/// `build(wp)` returns the prefactors and arguments at working precision `wp`. The
/// working precision grows until the cancellation between the largest term and the
/// result is covered.
pub(crate) fn adaptive_sum<F>(
    parts: &mut [PartPlan<'_>],
    target: usize,
    max_terms: usize,
    mut build: F,
) -> Result<Complex>
where
    F: FnMut(usize) -> Vec<(Complex, Complex)>,
{
    let mut peak = f64::NEG_INFINITY;
    let mut starts = Vec::with_capacity(parts.len());
    for part in parts.iter_mut() {
        let (m, at) = part.table.peak(part.log2w, max_terms)?;
        peak = peak.max(m + part.offset);
        starts.push(at);
    }
    if peak == f64::NEG_INFINITY {
        return Ok(Complex::zero(target));
    }
    let ceiling = 16 * target + peak.max(0.0) as usize;
    let mut expect = peak;
    loop {
        let loss = (peak - expect).max(0.0);
        let wp = target + 40 + libm::ceil(loss) as usize;
        if wp > ceiling {
            return Err(NumError::PrecisionLoss(format!(
                "series cancellation of {loss:.0} bits"
            )));
        }
        let threshold = expect - target as f64 - 24.0;
        let args = build(wp);
        let mut acc = Complex::zero(wp);
        for ((part, (pref, w)), &at) in parts.iter_mut().zip(args.iter()).zip(starts.iter()) {
            let n = part
                .table
                .terms_needed(part.log2w, threshold - part.offset, at, max_terms)?;
            acc += pref * &part.table.eval(w, n, wp);
        }
        let got = acc.log2_abs();
        if got >= expect - 4.0 {
            return Ok(acc.with_prec(target));
        }
        expect = if got == f64::NEG_INFINITY {
            expect - (wp - target) as f64
        } else {
            got - 4.0
        };
    }
}
