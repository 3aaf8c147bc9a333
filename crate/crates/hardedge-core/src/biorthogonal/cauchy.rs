//! Cauchy-type transforms of `p_n` and `q_n`.
//!
//! `Cp(z) = (2πi)⁻¹ ∫ p_n(x) w(x) / (x^θ − z^θ) dx` and
//! `C̃q(z) = (2πi)⁻¹ ∫ q_n(x^θ) w(x) / (x − z) dx`. Both are evaluated on a ray
//! `arg x = ∓β` on the far side of the real axis from `z`, which leaves the integrand
//! smooth and gives the boundary values on `(0, ∞)` directly.

use alloc::format;

use super::halfline::{integrate_ray, HalfLinePlan};
use super::system::BiorthogonalSystem;
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::real::Real;

/// Side from which a point of `(0, ∞)` is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    Above,
    Below,
}

#[derive(Clone, Copy)]
enum Family {
    P,
    Q,
}

/// `Cp_n(z)` for `z` in the sector `|arg z| < π/θ` off `[0, ∞)`, or its boundary value
/// from `side` when `z` lies on `(0, ∞)`.
pub fn cauchy_transform_p(
    sys: &BiorthogonalSystem,
    z: &Complex,
    side: Option<Approach>,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    transform(sys, Family::P, z, side, ctx)
}

/// `C̃q_n(z)` for `z` off `[0, ∞)`, or its boundary value from `side` on `(0, ∞)`.
pub fn cauchy_transform_q(
    sys: &BiorthogonalSystem,
    z: &Complex,
    side: Option<Approach>,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    transform(sys, Family::Q, z, side, ctx)
}

fn transform(
    sys: &BiorthogonalSystem,
    family: Family,
    z: &Complex,
    side: Option<Approach>,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let prec = sys.prec();
    let z = z.with_prec(prec);
    let params = sys.params();
    let theta = params.theta().with_prec(prec);
    let thf = theta.to_f64();
    let n = params.n() as usize;
    sys.p(n, &Real::zero(prec))?;
    let (zr, zi) = z.to_f64();
    let on_axis = z.im.is_zero() && !z.re.is_negative();
    let above = if on_axis {
        if z.re.is_zero() {
            return Err(NumError::BranchCut("the transform is singular at 0".into()));
        }
        match side {
            Some(Approach::Above) => true,
            Some(Approach::Below) => false,
            None => {
                return Err(NumError::BranchCut(format!(
                    "z = {zr} lies on (0, ∞); a side is required"
                )))
            }
        }
    } else {
        zi >= 0.0
    };
    if let Family::P = family {
        if libm::fabs(libm::atan2(zi, zr)) * thf >= core::f64::consts::PI {
            return Err(NumError::Sector(format!(
                "|arg z| ≥ π/θ at z = ({zr}, {zi})"
            )));
        }
    }
    // The ray must stay clear of every other root of x^θ = z^θ and keep e^{−nV} decaying.
    let deg = params.potential().degree().max(1) as f64;
    let beta = (core::f64::consts::PI / 8.0)
        .min(core::f64::consts::PI / (4.0 * thf))
        .min(core::f64::consts::PI / (4.0 * deg));
    let beta = if above { -beta } else { beta };
    let cis = Complex::cis(&Real::from_f64(beta, prec));

    let alpha = params.alpha().to_f64();
    let pv = params.potential().clone();
    let nf = n as f64;
    let (cb, sb) = (libm::cos(beta), libm::sin(beta));
    let coefs = match family {
        Family::P => &sys.p_coeffs()[n],
        Family::Q => &sys.q_coeffs()[n],
    };
    let power = match family {
        Family::P => 1.0,
        Family::Q => thf,
    };
    let abs_poly = |r: f64| {
        coefs.iter().rev().fold(0.0, |acc, v| {
            acc * libm::pow(r, power) + libm::fabs(v.to_f64())
        })
    };
    let plan = HalfLinePlan::new(
        |r| {
            let v = pv
                .value_complex(num_complex::Complex64::new(r * cb, r * sb))
                .re;
            libm::log(abs_poly(r)) + alpha * libm::log(r) - nf * v
        },
        params.decay_scale(),
        alpha,
        prec,
    )?;
    let zt = if z.is_zero() {
        z.clone()
    } else {
        z.powr(&theta)
    };
    let two_pi_i = Complex::new(Real::zero(prec), Real::pi(prec).mul_i64(2));
    let integral = integrate_ray(&plan, &cis, ctx.tol_bits(), |x| {
        let w = params.weight_complex(x);
        let xt = x.powr(&theta);
        match family {
            Family::P => Ok(&(&sys.p_complex(n, x)? * &w) / &(&xt - &zt)),
            Family::Q => Ok(&(&sys.q_complex(n, &xt)? * &w) / &(x - &z)),
        }
    })?;
    Ok(&integral / &two_pi_i)
}
