//! Double-exponential rules on `[0, ∞)` planned from a double-precision envelope.

use alloc::format;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::error::{NumError, Result};
use crate::quad::half_line_nodes;
use crate::real::Real;

const MAX_LEVEL: u32 = 14;

/// Node range for `x = s·exp(t − e^{−t})`, `t ∈ [t_lo, t_hi]`.
#[derive(Clone, Debug)]
pub(crate) struct HalfLinePlan {
    pub scale: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl HalfLinePlan {
    /// `log_f` is `ln` of the integrand envelope, behaving like `edge · ln x` at 0
    /// (`edge > −1`); everything below `2^{−bits}` of the peak mass is dropped.
    pub fn new<F: Fn(f64) -> f64>(log_f: F, scale: f64, edge: f64, bits: usize) -> Result<Self> {
        if !(edge > -1.0) {
            return Err(NumError::EndpointSingularity(edge));
        }
        let drop = (bits as f64 + 24.0) * core::f64::consts::LN_2;
        // Coarse log grid over 2^{±60} scales finds the peak of the envelope.
        let grid: Vec<f64> = (0..=960)
            .map(|i| scale * libm::exp2(-60.0 + i as f64 / 8.0))
            .collect();
        let (mut peak, mut x_peak) = (f64::NEG_INFINITY, scale);
        for &x in &grid {
            let v = log_f(x);
            if v > peak {
                peak = v;
                x_peak = x;
            }
        }
        if !peak.is_finite() {
            return Err(NumError::NonFinite("half-line envelope".into()));
        }
        let mass = peak + libm::log(x_peak);
        let mut x_hi = x_peak;
        while log_f(x_hi) + libm::log(x_hi) > mass - drop {
            x_hi *= 1.25;
            if x_hi > scale * 1e300 {
                return Err(NumError::NonConvergence("integrand does not decay".into()));
            }
        }
        // Near 0 the integrand is K x^edge, so [0, ε] holds K ε^{edge+1}/(edge+1).
        let x0 = grid[0];
        let k0 = log_f(x0) - edge * libm::log(x0);
        let ln_eps = (mass - drop - k0 + libm::log(edge + 1.0)) / (edge + 1.0);
        let ln_ratio = (ln_eps - libm::log(scale)).min(-1.0);
        Ok(HalfLinePlan {
            scale,
            t_lo: -libm::log(-ln_ratio) - 0.5,
            t_hi: libm::log(x_hi / scale) + 1.0,
        })
    }

    /// Nodes new at `level`, with weights that include `dx/dt` but not the step.
    pub fn nodes(&self, level: u32, prec: usize) -> Vec<(Real, Real)> {
        half_line_nodes(
            level,
            self.t_lo,
            self.t_hi,
            &Real::from_f64(self.scale, prec),
        )
    }
}

/// `∫_0^∞ f` for real `f` along the plan, doubling levels until the estimate changes by
/// less than `2^{tol_bits}` relative to the result, or to the rounding floor of `Σ|f w|`.
pub(crate) fn integrate_real<F>(
    plan: &HalfLinePlan,
    prec: usize,
    tol_bits: f64,
    mut f: F,
) -> Result<Real>
where
    F: FnMut(&Real) -> Result<Real>,
{
    let mut raw = Real::zero(prec);
    let mut abs = Real::zero(prec);
    let mut prev: Option<Real> = None;
    for level in 0..=MAX_LEVEL {
        for (x, w) in plan.nodes(level, prec) {
            let v = f(&x)? * w;
            abs += v.abs();
            raw += v;
        }
        let step = Real::from_f64(libm::exp2(-(level as f64)), prec);
        let est = &raw * &step;
        if let Some(p) = &prev {
            let diff = (&est - p).abs();
            let floor = (&abs * &step).log2_abs() - prec as f64 + 24.0;
            if level >= 3
                && (diff.is_zero() || diff.log2_abs() <= (est.log2_abs() + tol_bits).max(floor))
            {
                return Ok(est);
            }
        }
        prev = Some(est);
    }
    Err(NumError::NonConvergence(format!(
        "half-line rule at level {MAX_LEVEL}"
    )))
}

/// Same for complex `f` along the ray `x e^{iβ}`, given `cis = e^{iβ}`; `f` receives the
/// point on the ray and the result includes the factor `e^{iβ}` from `dz`.
pub(crate) fn integrate_ray<F>(
    plan: &HalfLinePlan,
    cis: &Complex,
    tol_bits: f64,
    mut f: F,
) -> Result<Complex>
where
    F: FnMut(&Complex) -> Result<Complex>,
{
    let prec = cis.prec();
    let mut raw = Complex::zero(prec);
    let mut abs = Real::zero(prec);
    let mut prev: Option<Complex> = None;
    for level in 0..=MAX_LEVEL {
        for (x, w) in plan.nodes(level, prec) {
            let v = f(&cis.scale(&x))?.scale(&w);
            abs += v.abs();
            raw += v;
        }
        let step = Real::from_f64(libm::exp2(-(level as f64)), prec);
        let est = raw.scale(&step);
        if let Some(p) = &prev {
            let diff = (&est - p).log2_abs();
            let floor = (&abs * &step).log2_abs() - prec as f64 + 24.0;
            if level >= 3
                && (diff == f64::NEG_INFINITY || diff <= (est.log2_abs() + tol_bits).max(floor))
            {
                return Ok(&est * cis);
            }
        }
        prev = Some(est);
    }
    Err(NumError::NonConvergence(format!(
        "ray rule at level {MAX_LEVEL}"
    )))
}
