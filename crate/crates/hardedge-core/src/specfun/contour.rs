//! Direct Mellin–Barnes quadrature of the three Fox-type functions.
//!
//! The loop contour is the parabola `v(t) = x0 + t² + i t`, which starts and ends at
//! `+∞` and encloses every pole of the `Γ(·−·v)` factors. Along it the integrand
//! decays like `exp(−c t² log t)`, so the trapezoid rule in `t` converges geometrically
//! in `1/h`. Intended as an independent check at moderate `|z|`; the integrand grows
//! like `|u|^{Re v}` before decaying, so large `|z|` costs precision.

use alloc::format;

use super::fox::{FoxIParams, FoxKind};
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::gamma::log_gamma;
use crate::real::Real;

const COARSEST_STEP: f64 = 0.25;
const FINEST_STEP: f64 = 1.0 / 4096.0;
const T_LIMIT: f64 = 1.0e4;

/// `I⁽ᵏ⁾_{θ,a}(z)` by quadrature on the Mellin–Barnes loop.
pub fn fox_i_contour(
    kind: FoxKind,
    params: &FoxIParams,
    z: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    if z.im.is_zero() && !z.re.is_positive() {
        return Err(NumError::Domain(format!(
            "z = {z:?} lies on the cut (-inf, 0]"
        )));
    }
    let target = ctx.mantissa_bits;
    let mut wp = target + 48;
    for _ in 0..4 {
        let (value, peak) = trapezoid(kind, params, z, wp, target)?;
        let loss = peak - value.log2_abs();
        if loss + (target as f64) + 16.0 <= wp as f64 {
            return Ok(value.with_prec(target));
        }
        wp = target + 48 + libm::ceil(loss.max(0.0)) as usize;
    }
    Err(NumError::PrecisionLoss(
        "contour integrand dynamic range".into(),
    ))
}

struct Integrand {
    kind: FoxKind,
    lnu: Complex,
    half_minus_a: Real,
    a: Real,
    alpha: Real,
    beta: Real,
    x0: Real,
    tol: f64,
}

impl Integrand {
    /// `F(v(t)) v'(t)` for the parabolic loop.
    fn at(&self, t: &Real) -> Result<Complex> {
        let p = t.prec();
        let v = Complex::new(&self.x0 + &(t * t), t.clone());
        let dv = Complex::new(t.mul_i64(2), Real::one(p));
        let one = Complex::one(p);
        let g_first = || {
            let arg = &Complex::from_real(self.half_minus_a.clone()) - &v.scale(&self.alpha);
            log_gamma(&arg, self.tol)
        };
        let g_second = || {
            let arg = &Complex::from_real(self.a.clone()) - &v.scale(&self.beta);
            log_gamma(&arg, self.tol)
        };
        let log_f = match self.kind {
            FoxKind::First => {
                let den = &(&one - &Complex::from_real(self.a.clone())) + &v.scale(&self.beta);
                g_first()? - log_gamma(&den, self.tol)?
            }
            FoxKind::Second => g_first()? + g_second()?,
            FoxKind::Third => {
                let den = &(&one - &Complex::from_real(self.half_minus_a.clone()))
                    + &v.scale(&self.alpha);
                g_second()? - log_gamma(&den, self.tol)?
            }
        };
        Ok(&(log_f + &v * &self.lnu).exp() * &dv)
    }
}

fn trapezoid(
    kind: FoxKind,
    params: &FoxIParams,
    z: &Complex,
    wp: usize,
    target: usize,
) -> Result<(Complex, f64)> {
    let theta = params.theta().with_prec(wp);
    let a = params.a().with_prec(wp);
    let one = Real::one(wp);
    let tp1 = &theta + &one;
    let half_minus_a = Real::ratio(1, 2, wp) - &a;
    let alpha = &theta / &tp1;
    let beta = tp1.recip();
    let first = (&half_minus_a / &alpha).to_f64();
    let second = (&a / &beta).to_f64();
    let lowest = match kind {
        FoxKind::First => first,
        FoxKind::Second => first.min(second),
        FoxKind::Third => second,
    };
    let mut lnu = z.with_prec(wp).ln();
    lnu.re += &params.u_scale().with_prec(wp).ln();
    let f = Integrand {
        kind,
        lnu,
        half_minus_a,
        a,
        alpha,
        beta,
        x0: Real::from_f64(lowest - 0.5, wp),
        tol: libm::exp2(-(wp as f64)),
    };

    let mut peak = f64::NEG_INFINITY;
    let mut step = COARSEST_STEP;
    let mut sum = sweep(&f, step, 0, wp, &mut peak)?;
    let mut value = scale(&sum, step, wp);
    while step > FINEST_STEP {
        step /= 2.0;
        sum += &sweep(&f, step, 1, wp, &mut peak)?;
        let next = scale(&sum, step, wp);
        let diff = (&next - &value).log2_abs();
        value = next;
        if diff <= value.log2_abs() - target as f64 - 4.0 {
            return Ok((value, peak));
        }
    }
    Err(NumError::ContourNonConvergence(format!(
        "trapezoid step reached {FINEST_STEP} without agreement"
    )))
}

/// `(h/2πi) Σ` of the raw node sum.
fn scale(sum: &Complex, step: f64, wp: usize) -> Complex {
    let two_pi = Real::pi(wp).mul_i64(2);
    let h = Real::from_f64(step, wp);
    let s = sum.scale(&(&h / &two_pi));
    Complex::new(s.im.clone(), -s.re)
}

/// Sum over nodes `t = n·h` with `n ≡ parity (mod 2)` when `parity = 1`, all `n` otherwise,
/// marching outward until the terms fall below the working precision.
fn sweep(f: &Integrand, step: f64, parity: i64, wp: usize, peak: &mut f64) -> Result<Complex> {
    let stride = if parity == 1 { 2 } else { 1 };
    let mut acc = Complex::zero(wp);
    if parity == 0 {
        let v = f.at(&Real::zero(wp))?;
        *peak = peak.max(v.log2_abs());
        acc += &v;
    }
    for dir in [1i64, -1] {
        let mut n = 1;
        let mut quiet = 0;
        loop {
            let t = Real::from_f64(step, wp).mul_i64(dir * n);
            let v = f.at(&t)?;
            let mag = v.log2_abs();
            *peak = peak.max(mag);
            acc += &v;
            if mag < *peak - wp as f64 - 8.0 && (n as f64) * step > 2.0 {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            n += stride;
            if (n as f64) * step > T_LIMIT {
                return Err(NumError::ContourNonConvergence(
                    "contour tail does not decay".into(),
                ));
            }
        }
    }
    Ok(acc)
}
