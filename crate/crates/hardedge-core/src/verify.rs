//! The hard-edge limit kernel and convergence experiments for finite-`n` systems.
//!
//! The limit kernel is
//! `K(x, y) = θ ∫_0^1 J_{(α+1)/θ, 1/θ}(xu) J_{α+1, θ}((yu)^θ) u^α du`.
//! A finite-`n` kernel carries the weight `x^α` of its first argument, so scaled kernels
//! are compared against `x^α K(x, y)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::biorthogonal::BiorthogonalSystem;
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::equilibrium::EquilibriumData;
use crate::error::{NumError, Result};
use crate::gamma::rgamma;
use crate::quad::gauss_jacobi_unit;
use crate::real::Real;
use crate::specfun::{WrightBessel, WrightParams};

fn log2_gamma(x: f64) -> f64 {
    libm::lgamma(x) * core::f64::consts::LOG2_E
}

fn validate(x: f64, y: f64, alpha: f64, theta: f64) -> Result<()> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(NumError::Domain(alloc::format!(
            "limit kernel needs x, y ≥ 0, got ({x}, {y})"
        )));
    }
    if !(alpha > -1.0) || !(theta > 0.0) {
        return Err(NumError::InvalidParameter(alloc::format!(
            "alpha = {alpha}, theta = {theta}"
        )));
    }
    Ok(())
}

/// Terms `c_i s^i` of one Wright series with `c_i = (−1)^i / (i! Γ(a + i b))`, cut where
/// they fall `drop` bits below the largest; returns the terms and the peak `log2`.
fn wright_terms(a: &Real, b: &Real, s: &Real, drop: f64) -> (Vec<Real>, f64) {
    let p = s.prec();
    let (af, bf) = (a.to_f64(), b.to_f64());
    let ls = if s.is_zero() {
        f64::NEG_INFINITY
    } else {
        s.log2_abs()
    };
    let est =
        |i: usize| i as f64 * ls - log2_gamma(i as f64 + 1.0) - log2_gamma(af + i as f64 * bf);
    let mut peak = est(0);
    let mut count = 1;
    let mut i = 1;
    while ls > f64::NEG_INFINITY {
        let e = est(i);
        peak = peak.max(e);
        if e < peak - drop && (i as f64) > libm::pow(2.0, ls) + 8.0 {
            break;
        }
        i += 1;
        count = i;
    }
    let mut terms = Vec::with_capacity(count);
    let mut pow = Real::one(p);
    let mut fact = Real::one(p);
    for i in 0..count {
        if i > 0 {
            pow = -(&pow * s);
            fact = fact.mul_i64(i as i64);
        }
        let g = rgamma(&(a + &b.mul_i64(i as i64)));
        terms.push(&pow * &g / &fact);
    }
    (terms, peak)
}

/// `K^{(α,θ)}(x, y)` by integrating the two Wright series term by term:
/// `θ Σ_{i,j} c_i x^i d_j y^{θj} / (α + 1 + i + θj)`.
pub fn limit_kernel(
    x: f64,
    y: f64,
    alpha: f64,
    theta: f64,
    ctx: &PrecisionContext,
) -> Result<Real> {
    validate(x, y, alpha, theta)?;
    let target = ctx.mantissa_bits;
    let mut wp = target + 64;
    loop {
        let th = Real::from_f64(theta, wp);
        let al = Real::from_f64(alpha, wp);
        let a1 = &al.add_f64(1.0) / &th;
        let yr = Real::from_f64(y, wp);
        let yt = if y == 0.0 { yr } else { (&th * &yr.ln()).exp() };
        let (ci, pa) = wright_terms(&a1, &th.recip(), &Real::from_f64(x, wp), wp as f64 + 16.0);
        let (dj, pb) = wright_terms(&al.add_f64(1.0), &th, &yt, wp as f64 + 16.0);
        let mut sum = Real::zero(wp);
        for (i, c) in ci.iter().enumerate() {
            for (j, d) in dj.iter().enumerate() {
                let den = al.add_f64(1.0 + i as f64) + &th.mul_i64(j as i64);
                sum += &(c * d) / &den;
            }
        }
        let got = (&th * &sum).with_prec(target);
        let loss = (pa + pb - got.log2_abs()).max(0.0);
        if got.is_zero() || (wp as f64) >= target as f64 + loss + 48.0 {
            return Ok(got);
        }
        wp = target + 64 + libm::ceil(loss) as usize;
        if wp > 16 * target {
            return Err(NumError::PrecisionLoss(alloc::format!(
                "limit kernel cancellation of {loss:.0} bits"
            )));
        }
    }
}

/// Same integral by Gauss–Jacobi quadrature with weight `u^α`; exponentially convergent
/// only when `(yu)^θ` is smooth in `u`, that is for integer `θ`.
pub fn limit_kernel_quadrature(
    x: f64,
    y: f64,
    alpha: f64,
    theta: f64,
    order: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    validate(x, y, alpha, theta)?;
    let p = ctx.prec();
    let th = Real::from_f64(theta, p);
    let al = Real::from_f64(alpha, p);
    let mut ja = WrightBessel::new(&WrightParams::new(&al.add_f64(1.0) / &th, th.recip())?, ctx);
    let mut jb = WrightBessel::new(&WrightParams::new(al.add_f64(1.0), th.clone())?, ctx);
    let (xr, yr) = (Real::from_f64(x, p), Real::from_f64(y, p));
    let mut sum = Real::zero(p);
    for (u, w) in gauss_jacobi_unit(order, &al)? {
        let yu = &yr * &u;
        let yt = if yu.is_zero() {
            yu
        } else {
            (&th * &yu.ln()).exp()
        };
        let fa = ja.eval(&Complex::from_real(&xr * &u))?.re;
        let fb = jb.eval(&Complex::from_real(yt))?.re;
        sum += fa * fb * w;
    }
    Ok(th * sum)
}

/// Single-mode product `θ^α J_{(α+1)/θ, 1/θ}(θx) J_{α+1, θ}((θy)^θ)`.
pub fn k_product(x: f64, y: f64, alpha: f64, theta: f64, ctx: &PrecisionContext) -> Result<Real> {
    validate(x, y, alpha, theta)?;
    let p = ctx.prec();
    let th = Real::from_f64(theta, p);
    let al = Real::from_f64(alpha, p);
    let ja = crate::specfun::wright_bessel(
        &WrightParams::new(&al.add_f64(1.0) / &th, th.recip())?,
        &Complex::from_real(&th * &Real::from_f64(x, p)),
        ctx,
    )?;
    let ty = &th * &Real::from_f64(y, p);
    let tyt = if ty.is_zero() {
        ty
    } else {
        (&th * &ty.ln()).exp()
    };
    let jb = crate::specfun::wright_bessel(
        &WrightParams::new(al.add_f64(1.0), th.clone())?,
        &Complex::from_real(tyt),
        ctx,
    )?;
    Ok(th.pow(&al) * ja.re * jb.re)
}

/// Constants of the hard-edge scaling, read from the equilibrium measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConstants {
    pub theta: f64,
    pub alpha: f64,
    pub rho: f64,
    pub c: f64,
    pub ell: f64,
    pub g0_re: f64,
    pub gtilde0_re: f64,
    pub m_theta: f64,
}

impl ScalingConstants {
    pub fn new(eq: &EquilibriumData, alpha: f64) -> Self {
        ScalingConstants {
            theta: eq.theta,
            alpha,
            rho: eq.rho,
            c: eq.c,
            ell: eq.lagrange_ell,
            g0_re: eq.g0_re,
            gtilde0_re: eq.gtilde0_re,
            m_theta: eq.m_theta,
        }
    }

    /// `ln C_n`.
    pub fn ln_c_n(&self, n: u32) -> f64 {
        let (t, a, n) = (self.theta, self.alpha, n as f64);
        0.5 * libm::log(2.0 * core::f64::consts::PI)
            + (2.0 * (a + 1.0) - t) / (2.0 * (t + 1.0)) * libm::log(self.c)
            + ((a + 1.0) / t - 0.5) * libm::log(self.rho * n)
            + n * self.g0_re
    }

    /// `ln C̃_n`.
    pub fn ln_c_tilde_n(&self, n: u32) -> f64 {
        let (t, a, n) = (self.theta, self.alpha, n as f64);
        0.5 * libm::log(2.0 * core::f64::consts::PI)
            + (a + 0.5) / (1.0 + 1.0 / t) * libm::log(self.c)
            + (a + 0.5) * libm::log(t * self.rho * n)
            + n * self.gtilde0_re
    }

    /// `ln(2π θ^{−1/2} c^{α+1} e^{nℓ})`.
    pub fn ln_kappa_prediction(&self, n: u32) -> f64 {
        libm::log(2.0 * core::f64::consts::PI) - 0.5 * libm::log(self.theta)
            + (self.alpha + 1.0) * libm::log(self.c)
            + n as f64 * self.ell
    }

    /// Error exponent `(1 − m_θ)/(1 + m_θ)` of the polynomial and kernel asymptotics.
    pub fn polynomial_rate(&self) -> f64 {
        (1.0 - self.m_theta) / (1.0 + self.m_theta)
    }

    /// Error exponent `−m_θ/(m_θ + 1)` of the norm asymptotics.
    pub fn kappa_rate(&self) -> f64 {
        -self.m_theta / (self.m_theta + 1.0)
    }

    /// `(ρn)^{1+1/θ}`.
    pub fn edge_scale(&self, n: u32) -> f64 {
        libm::pow(self.rho * n as f64, 1.0 + 1.0 / self.theta)
    }
}

/// Errors of one experiment over increasing `n`, with a log-log rate fit.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub n_values: Vec<u32>,
    pub errors: Vec<f64>,
    /// Raw ratios for experiments that test a ratio against 1.
    pub ratios: Vec<f64>,
    pub fitted_rate: f64,
    pub predicted_rate: f64,
    pub constants: ScalingConstants,
    pub c_n: Vec<f64>,
    pub c_tilde_n: Vec<f64>,
}

impl ConvergenceReport {
    fn new(
        constants: ScalingConstants,
        n_values: Vec<u32>,
        errors: Vec<f64>,
        ratios: Vec<f64>,
        predicted_rate: f64,
    ) -> Self {
        let fitted_rate = fit_rate(&n_values, &errors);
        let c_n = n_values
            .iter()
            .map(|&n| libm::exp(constants.ln_c_n(n)))
            .collect();
        let c_tilde_n = n_values
            .iter()
            .map(|&n| libm::exp(constants.ln_c_tilde_n(n)))
            .collect();
        ConvergenceReport {
            n_values,
            errors,
            ratios,
            fitted_rate,
            predicted_rate,
            constants,
            c_n,
            c_tilde_n,
        }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    /// `|fitted − predicted| ≤ frac · |predicted|`.
    pub fn rate_within(&self, frac: f64) -> bool {
        libm::fabs(self.fitted_rate - self.predicted_rate) <= frac * libm::fabs(self.predicted_rate)
    }
}

/// Least-squares slope of `ln error` against `ln n` over the last `⌈len/2⌉` points, at
/// least two; `NaN` with fewer than two points.
pub fn fit_rate(n_values: &[u32], errors: &[f64]) -> f64 {
    let len = n_values.len().min(errors.len());
    if len < 2 {
        return f64::NAN;
    }
    let keep = len.div_ceil(2).max(2);
    let pts: Vec<(f64, f64)> = (len - keep..len)
        .map(|i| (libm::log(n_values[i] as f64), libm::log(errors[i])))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    num / den
}

/// Default probe points: radii `0.5, 1, 1.5, 2` at angles `0, ±π/4`.
pub fn default_z_samples() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(12);
    for &r in &[0.5, 1.0, 1.5, 2.0] {
        for &a in &[
            0.0,
            core::f64::consts::FRAC_PI_4,
            -core::f64::consts::FRAC_PI_4,
        ] {
            out.push(Complex64::from_polar(r, a));
        }
    }
    out
}

fn check_systems(
    systems: &[BiorthogonalSystem],
    need_degree: impl Fn(u32) -> usize,
) -> Result<Vec<u32>> {
    let ns: Vec<u32> = systems.iter().map(|s| s.params().n()).collect();
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NumError::InvalidParameter(
            "systems must have strictly increasing n".into(),
        ));
    }
    for s in systems {
        let need = need_degree(s.params().n());
        if s.degree() < need {
            return Err(NumError::DegreeTooLow {
                have: s.degree(),
                need,
            });
        }
    }
    Ok(ns)
}

fn to_complex(z: Complex64, prec: usize) -> Complex {
    Complex::from_f64(z.re, z.im, prec)
}

fn principal_pow(z: &Complex, e: &Real) -> Complex {
    if z.is_zero() {
        z.clone()
    } else {
        z.powr(e)
    }
}

/// `sup_z |p_n(z/(ρn)^{1+1/θ}) / ((−1)^n C_n) − J_{(α+1)/θ,1/θ}(θz)|` for each system.
pub fn verify_pn_asymptotics(
    eq: &EquilibriumData,
    systems: &[BiorthogonalSystem],
    z_samples: &[Complex64],
    ctx: &PrecisionContext,
) -> Result<ConvergenceReport> {
    polynomial_report(eq, systems, z_samples, ctx, false)
}

/// `sup_z |q_n(z^θ/(ρn)^{θ+1}) / ((−1)^n C̃_n) − J_{α+1,θ}((θz)^θ)|` for each system.
pub fn verify_qn_asymptotics(
    eq: &EquilibriumData,
    systems: &[BiorthogonalSystem],
    z_samples: &[Complex64],
    ctx: &PrecisionContext,
) -> Result<ConvergenceReport> {
    polynomial_report(eq, systems, z_samples, ctx, true)
}

fn polynomial_report(
    eq: &EquilibriumData,
    systems: &[BiorthogonalSystem],
    z_samples: &[Complex64],
    ctx: &PrecisionContext,
    dual: bool,
) -> Result<ConvergenceReport> {
    let ns = check_systems(systems, |n| n as usize)?;
    let first = systems[0].params();
    let constants = ScalingConstants::new(eq, first.alpha().to_f64());
    let p = ctx.prec();
    let th = first.theta().with_prec(p);
    let al = first.alpha().with_prec(p);
    let wright = if dual {
        WrightParams::new(al.add_f64(1.0), th.clone())?
    } else {
        WrightParams::new(&al.add_f64(1.0) / &th, th.recip())?
    };
    let mut limit = WrightBessel::new(&wright, ctx);
    let targets: Vec<Complex> = z_samples
        .iter()
        .map(|&z| {
            let tz = to_complex(z, p).scale(&th);
            if dual {
                limit.eval(&principal_pow(&tz, &th))
            } else {
                limit.eval(&tz)
            }
        })
        .collect::<Result<_>>()?;
    let mut errors = Vec::with_capacity(systems.len());
    for (sys, &n) in systems.iter().zip(&ns) {
        let wp = sys.prec();
        let nr = n as usize;
        let ln_c = if dual {
            constants.ln_c_tilde_n(n)
        } else {
            constants.ln_c_n(n)
        };
        let mut norm = Real::from_f64(ln_c, wp).exp();
        if n % 2 == 1 {
            norm = -norm;
        }
        let scale = Real::from_f64(constants.rho * n as f64, wp);
        let mut worst: f64 = 0.0;
        for (z, want) in z_samples.iter().zip(&targets) {
            let z = to_complex(*z, wp);
            let th = th.with_prec(wp);
            let v = if dual {
                let arg = principal_pow(&z, &th).scale(&scale.pow(&th.add_f64(1.0)).recip());
                sys.q_complex(nr, &arg)?
            } else {
                let arg = z.scale(&scale.pow(&th.recip().add_f64(1.0)).recip());
                sys.p_complex(nr, &arg)?
            };
            let normalized = v.scale(&norm.recip());
            worst = worst.max(libm::exp2((&normalized - &want.with_prec(wp)).log2_abs()));
        }
        errors.push(worst);
    }
    Ok(ConvergenceReport::new(
        constants.clone(),
        ns,
        errors,
        vec![],
        constants.polynomial_rate(),
    ))
}

/// Ratios `κ_n / (2π θ^{−1/2} c^{α+1} e^{nℓ})`; the errors are `|ratio − 1|`.
pub fn verify_kappa(
    eq: &EquilibriumData,
    systems: &[BiorthogonalSystem],
) -> Result<ConvergenceReport> {
    let ns = check_systems(systems, |n| n as usize)?;
    let constants = ScalingConstants::new(eq, systems[0].params().alpha().to_f64());
    let ratios: Vec<f64> = systems
        .iter()
        .zip(&ns)
        .map(|(sys, &n)| {
            let k = &sys.kappas()[n as usize];
            libm::exp(
                (k.ln() - Real::from_f64(constants.ln_kappa_prediction(n), k.prec())).to_f64(),
            )
        })
        .collect();
    let errors = ratios.iter().map(|r| libm::fabs(r - 1.0)).collect();
    Ok(ConvergenceReport::new(
        constants.clone(),
        ns,
        errors,
        ratios,
        constants.kappa_rate(),
    ))
}

/// Argument scaling applied to the finite kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelScaling {
    /// `θ⁻¹ s⁻¹ K_n(x/(θ s), y/(θ s))` with `s = (ρn)^{1+1/θ}`.
    WithTheta,
    /// `s⁻¹ K_n(x/s, y/s)`.
    Plain,
}

impl KernelScaling {
    pub const ALL: [KernelScaling; 2] = [KernelScaling::WithTheta, KernelScaling::Plain];

    pub fn label(self) -> &'static str {
        match self {
            KernelScaling::WithTheta => "with_theta",
            KernelScaling::Plain => "plain",
        }
    }
}

/// Scaled kernels against `x^α K^{(α,θ)}(x, y)`, under both argument scalings.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelLimitReport {
    pub n_values: Vec<u32>,
    pub points: Vec<(f64, f64)>,
    /// `x^α K^{(α,θ)}(x, y)` per point.
    pub limits: Vec<f64>,
    /// `scaled[c][i][k]`: scaling `c`, `n_values[i]`, `points[k]`.
    pub scaled: Vec<Vec<Vec<f64>>>,
    /// Relative errors, same layout.
    pub errors: Vec<Vec<Vec<f64>>>,
    /// Worst-point report per scaling.
    pub reports: Vec<ConvergenceReport>,
}

impl KernelLimitReport {
    /// Whether every point's relative error strictly decreases in `n` under `scaling`.
    pub fn pointwise_decreasing(&self, scaling: KernelScaling) -> bool {
        let c = scaling as usize;
        (0..self.points.len()).all(|k| self.errors[c].windows(2).all(|w| w[1][k] < w[0][k]))
    }
}

pub fn scaled_kernel(
    sys: &BiorthogonalSystem,
    constants: &ScalingConstants,
    scaling: KernelScaling,
    x: f64,
    y: f64,
) -> Result<Real> {
    let p = sys.prec();
    let n = sys.params().n();
    let s = Real::from_f64(constants.rho * n as f64, p)
        .pow(&Real::from_f64(1.0 + 1.0 / constants.theta, p));
    let th = Real::from_f64(constants.theta, p);
    let s = match scaling {
        KernelScaling::WithTheta => &s * &th,
        KernelScaling::Plain => s,
    };
    let k = sys.kernel(&(Real::from_f64(x, p) / &s), &(Real::from_f64(y, p) / &s))?;
    Ok(k / s)
}

pub fn verify_kernel_limit(
    eq: &EquilibriumData,
    systems: &[BiorthogonalSystem],
    points: &[(f64, f64)],
    ctx: &PrecisionContext,
) -> Result<KernelLimitReport> {
    let ns = check_systems(systems, |n| n as usize - 1)?;
    let alpha = systems[0].params().alpha().to_f64();
    let constants = ScalingConstants::new(eq, alpha);
    let limits: Vec<f64> = points
        .iter()
        .map(|&(x, y)| {
            Ok(libm::pow(x, alpha) * limit_kernel(x, y, alpha, constants.theta, ctx)?.to_f64())
        })
        .collect::<Result<_>>()?;
    let mut scaled = Vec::new();
    let mut errors = Vec::new();
    let mut reports = Vec::new();
    for scaling in KernelScaling::ALL {
        let mut vals = Vec::new();
        let mut errs = Vec::new();
        for sys in systems {
            let row: Vec<f64> = points
                .iter()
                .map(|&(x, y)| Ok(scaled_kernel(sys, &constants, scaling, x, y)?.to_f64()))
                .collect::<Result<_>>()?;
            errs.push(
                row.iter()
                    .zip(&limits)
                    .map(|(v, l)| libm::fabs(v - l) / libm::fabs(*l))
                    .collect::<Vec<f64>>(),
            );
            vals.push(row);
        }
        let worst: Vec<f64> = errs
            .iter()
            .map(|r: &Vec<f64>| r.iter().cloned().fold(0.0, f64::max))
            .collect();
        reports.push(ConvergenceReport::new(
            constants.clone(),
            ns.clone(),
            worst,
            vec![],
            constants.polynomial_rate(),
        ));
        scaled.push(vals);
        errors.push(errs);
    }
    Ok(KernelLimitReport {
        n_values: ns,
        points: points.to_vec(),
        limits,
        scaled,
        errors,
        reports,
    })
}
