//! Quadrature engines: closed-contour trapezoid, Gauss rules, and a
//! double-exponential rule on the half line.
//!
//! All sums run in a fixed node order so results are bit-reproducible.

use alloc::format;
use alloc::vec::Vec;

use spin::Mutex;

use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::real::Real;

/// Hard cap on nodes for any doubling refinement.
pub const MAX_NODES: usize = 1 << 20;

fn agree(a: &Complex, b: &Complex, scale: &Real, rel_tol: f64) -> bool {
    let diff = (a - b).abs();
    let mag = b.abs().max(scale.clone());
    if mag.is_zero() {
        return diff.is_zero();
    }
    diff.log2_abs() <= mag.log2_abs() + libm::log2(rel_tol)
}

/// `(1/2πi) ∮_{|z|=radius} f(z) dz/z` by the equispaced trapezoid rule,
/// doubling nodes from `ctx.quad_points_circle` until two refinements agree.
pub fn quad_circle<F>(mut f: F, radius: &Real, ctx: &PrecisionContext) -> Result<Complex>
where
    F: FnMut(&Complex) -> Result<Complex>,
{
    if !radius.is_positive() {
        return Err(NumError::Domain(format!("radius {}", radius.to_f64())));
    }
    let p = ctx.prec();
    let two_pi = Real::pi(p).mul_i64(2);
    let mut n = ctx.quad_points_circle.max(4);
    let mut sum = Complex::zero(p);
    let mut abs_sum = Real::zero(p);
    for k in 0..n {
        let phi = &two_pi * &Real::ratio(k as i64, n as i64, p);
        let v = f(&Complex::from_polar(radius, &phi))?;
        abs_sum += v.abs();
        sum += v;
    }
    let mut est = sum.scale(&Real::ratio(1, n as i64, p));
    let mut stable = 0;
    while n < MAX_NODES {
        // new nodes sit at the odd multiples of π/n
        for k in 0..n {
            let phi = &two_pi * &Real::ratio(2 * k as i64 + 1, 2 * n as i64, p);
            let v = f(&Complex::from_polar(radius, &phi))?;
            abs_sum += v.abs();
            sum += v;
        }
        n *= 2;
        let next = sum.scale(&Real::ratio(1, n as i64, p));
        let scale = abs_sum.div_i64(n as i64);
        if agree(&est, &next, &scale, ctx.rel_tol) {
            stable += 1;
            if stable >= 2 {
                return Ok(next);
            }
        } else {
            stable = 0;
        }
        est = next;
    }
    Err(NumError::NonConvergence(format!(
        "quad_circle: {MAX_NODES} nodes"
    )))
}

struct GaussTable {
    order: usize,
    prec: usize,
    /// Nodes on (-1, 1) in increasing order, with weights.
    nodes: Vec<(Real, Real)>,
}

static LEGENDRE: Mutex<Vec<GaussTable>> = Mutex::new(Vec::new());

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_pd(n: usize, x: &Real) -> (Real, Real) {
    let p = x.prec();
    let mut p0 = Real::one(p);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as i64;
        let p2 = (x * &p1).mul_i64(2 * kf - 1) - p0.mul_i64(kf - 1);
        let p2 = p2.div_i64(kf);
        p0 = p1;
        p1 = p2;
    }
    // (1-x²) P_n' = n (P_{n-1} - x P_n)
    let one = Real::one(p);
    let d = (&p0 - &(x * &p1)).mul_i64(n as i64) / (&one - &(x * x));
    (p1, d)
}

fn build_legendre(order: usize, prec: usize) -> Vec<(Real, Real)> {
    let work = prec + 32;
    let mut out = Vec::with_capacity(order);
    for i in 0..order {
        // i-th root from the top, refined by Newton
        let guess = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5));
        let mut x = Real::from_f64(guess, work);
        let mut last_step = f64::INFINITY;
        for _ in 0..200 {
            let (pn, dp) = legendre_pd(order, &x);
            let step = &pn / &dp;
            x -= &step;
            let s = step.log2_abs();
            if s < -(work as f64) + 4.0 || (s >= last_step && s < -(prec as f64)) {
                break;
            }
            last_step = s;
        }
        let (_, dp) = legendre_pd(order, &x);
        let one = Real::one(work);
        let w = Real::from_i64(2, work) / ((&one - &(&x * &x)) * &dp * &dp);
        out.push((x.with_prec(prec), w.with_prec(prec)));
    }
    out.reverse();
    out
}

/// Gauss–Legendre nodes and weights on (-1, 1), cached per (order, precision).
pub fn gauss_legendre(order: usize, prec: usize) -> Vec<(Real, Real)> {
    {
        let cache = LEGENDRE.lock();
        if let Some(t) = cache.iter().find(|t| t.order == order && t.prec == prec) {
            return t.nodes.clone();
        }
    }
    let nodes = build_legendre(order, prec);
    LEGENDRE.lock().push(GaussTable {
        order,
        prec,
        nodes: nodes.clone(),
    });
    nodes
}

/// `(1/2π) ∫_{φ0}^{φ1} f(r e^{iφ}) dφ` by Gauss–Legendre of the given order.
pub fn arc_gauss<F>(
    f: &mut F,
    radius: &Real,
    phi0: &Real,
    phi1: &Real,
    order: usize,
    prec: usize,
) -> Result<Complex>
where
    F: FnMut(&Complex) -> Result<Complex>,
{
    let half = (phi1 - phi0).div_i64(2);
    let mid = (phi1 + phi0).div_i64(2);
    let mut acc = Complex::zero(prec);
    for (x, w) in gauss_legendre(order, prec) {
        let phi = &mid + &(&half * &x);
        let v = f(&Complex::from_polar(radius, &phi))?;
        acc += v.scale(&w);
    }
    let two_pi = Real::pi(prec).mul_i64(2);
    Ok(acc.scale(&(half / two_pi)))
}

/// `(1/2πi) ∮ f dz/z` for an integrand analytic on each arc between the
/// given break angles (increasing, spanning one full turn from the first).
///
/// Each arc uses Gauss–Legendre with order doubling until two orders agree.
pub fn quad_circle_arcs<F>(
    mut f: F,
    radius: &Real,
    breaks: &[Real],
    ctx: &PrecisionContext,
) -> Result<Complex>
where
    F: FnMut(&Complex) -> Result<Complex>,
{
    if breaks.is_empty() {
        return quad_circle(f, radius, ctx);
    }
    let p = ctx.prec();
    let two_pi = Real::pi(p).mul_i64(2);
    let mut total = Complex::zero(p);
    for i in 0..breaks.len() {
        let a = &breaks[i];
        let b = if i + 1 < breaks.len() {
            breaks[i + 1].clone()
        } else {
            &breaks[0] + &two_pi
        };
        let mut order = (ctx.quad_points_circle / 2).max(8);
        let mut prev = arc_gauss(&mut f, radius, a, &b, order, p)?;
        loop {
            order *= 2;
            if order > 4096 {
                return Err(NumError::NonConvergence(format!("arc Gauss order {order}")));
            }
            let next = arc_gauss(&mut f, radius, a, &b, order, p)?;
            let scale = next.abs().max(prev.abs());
            if agree(&prev, &next, &scale, ctx.rel_tol) {
                total += next;
                break;
            }
            prev = next;
        }
    }
    Ok(total)
}

/// Jacobi `P_n^{(a,b)}(x)` by the three-term recurrence.
fn jacobi(n: usize, a: &Real, b: &Real, x: &Real) -> Real {
    let p = x.prec();
    let one = Real::one(p);
    let two = Real::from_i64(2, p);
    let mut p0 = one.clone();
    if n == 0 {
        return p0;
    }
    let mut p1 = ((a - b) + &(&(a + b) + &two) * x) / &two;
    for k in 2..=n {
        let k = Real::from_i64(k as i64, p);
        let s = &(a + b) + &(&k * &two);
        let c1 = &two * &k * (&(&k + a) + b) * (&s - &two);
        let c2 = (&s - &one) * (&(a * a) - &(b * b));
        let c3 = (&s - &two) * (&s - &one) * &s;
        let c4 = &two * (&(&k + a) - &one) * (&(&k + b) - &one) * &s;
        let p2 = ((&c2 + &(&c3 * x)) * &p1 - &c4 * &p0) / &c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_n^{(a,b)}` and its derivative `(n+a+b+1)/2 · P_{n-1}^{(a+1,b+1)}`.
fn jacobi_pd(n: usize, a: &Real, b: &Real, x: &Real) -> (Real, Real) {
    let p = x.prec();
    let one = Real::one(p);
    let v = jacobi(n, a, b, x);
    if n == 0 {
        return (v, Real::zero(p));
    }
    let q = jacobi(n - 1, &(a + &one), &(b + &one), x);
    let nr = Real::from_i64(n as i64, p);
    let d = (&(&(&nr + a) + b) + &one).div_i64(2) * q;
    (v, d)
}

/// Gauss–Jacobi rule for `∫_0^1 g(u) u^α du`: nodes in (0,1) and weights.
pub fn gauss_jacobi_unit(order: usize, alpha: &Real) -> Result<Vec<(Real, Real)>> {
    let p = alpha.prec();
    if alpha.to_f64() <= -1.0 {
        return Err(NumError::EndpointSingularity(alpha.to_f64()));
    }
    let work = p + 32;
    // u = (1+x)/2 with weight (1+x)^α on (-1,1): Jacobi parameters (0, α)
    let a = Real::zero(work);
    let b = alpha.with_prec(work);
    let one = Real::one(work);
    let two = Real::from_i64(2, work);
    let af = alpha.to_f64();
    let mut roots: Vec<Real> = Vec::with_capacity(order);
    for i in 0..order {
        let g = -libm::cos(
            core::f64::consts::PI * (i as f64 + 0.75 + 0.5 * af) / (order as f64 + 0.5 + 0.5 * af),
        );
        let mut x = Real::from_f64(g, work);
        for _ in 0..300 {
            let (pv, dv) = jacobi_pd(order, &a, &b, &x);
            let mut defl = Real::zero(work);
            for r in &roots {
                defl += (&x - r).recip();
            }
            // Newton on P_n / Π(x - r) keeps found roots from attracting again
            let step = &pv / &(&dv - &(&pv * &defl));
            x -= &step;
            if step.is_zero() || step.log2_abs() < -(work as f64) + 8.0 {
                break;
            }
        }
        roots.push(x);
    }
    roots.sort_by(|u, v| u.partial_cmp(v).unwrap_or(core::cmp::Ordering::Equal));
    // with a = 0 the classical constant 2^{α+1} cancels the map to (0,1)
    let mut out = Vec::with_capacity(order);
    for x in roots {
        let (_, dv) = jacobi_pd(order, &a, &b, &x);
        let w = ((&one - &(&x * &x)) * &dv * &dv).recip();
        let u = (&one + &x) / &two;
        out.push((u.with_prec(p), w.with_prec(p)));
    }
    Ok(out)
}

/// Nodes of the rule `x = s·exp(t - e^{-t})` on `t ∈ [t_lo, t_hi]`, step `h = 2^-level`.
///
/// Level 0 returns every node; higher levels return only the nodes new at that level,
/// so summing levels `0..=L` gives the level-`L` rule after scaling by `h`.
/// Weights include `dx/dt` but not `h`.
pub fn half_line_nodes(level: u32, t_lo: f64, t_hi: f64, scale: &Real) -> Vec<(Real, Real)> {
    let p = scale.prec();
    let h = libm::exp2(-(level as f64));
    let (k_lo, k_hi, step) = if level == 0 {
        (libm::floor(t_lo) as i64, libm::ceil(t_hi) as i64, 1i64)
    } else {
        let k_lo = libm::floor(t_lo / h) as i64;
        let k_hi = libm::ceil(t_hi / h) as i64;
        (k_lo, k_hi, 1i64)
    };
    let denom = 1i64 << level;
    let mut out = Vec::new();
    let mut k = k_lo;
    while k <= k_hi {
        if level == 0 || k.rem_euclid(2) == 1 {
            let t = Real::ratio(k, denom, p);
            let emt = (-&t).exp();
            let x = (&t - &emt).exp();
            let w = &x * &(Real::one(p) + &emt);
            out.push((scale * &x, scale * &w));
        }
        k += step;
    }
    out
}

/// `∫_0^∞ f(x) dx` for `f(x) ~ x^α` at 0 (α > -1) decaying faster than any power
/// beyond `decay_scale`, by the double-exponential rule with level doubling.
pub fn quad_semiaxis<F>(
    mut f: F,
    alpha: f64,
    decay_scale: &Real,
    ctx: &PrecisionContext,
) -> Result<Real>
where
    F: FnMut(&Real) -> Result<Real>,
{
    if !(alpha > -1.0) {
        return Err(NumError::EndpointSingularity(alpha));
    }
    let p = ctx.prec();
    let scale = decay_scale.with_prec(p);
    // x^{α+1} < 2^{-p-16} below t_lo; e^{-x/s} with polynomial slack beyond t_hi
    let lo_target = (p as f64 + 16.0) * core::f64::consts::LN_2 / (alpha + 1.0);
    let t_lo = -libm::log(lo_target) - 0.5;
    let xmax = (p as f64 + 16.0) * core::f64::consts::LN_2 * 2.0 + 64.0;
    let t_hi = libm::log(xmax) + 1.0;
    let eval = |f: &mut F, nodes: Vec<(Real, Real)>| -> Result<Real> {
        let mut s = Real::zero(p);
        for (x, w) in nodes {
            let v = f(&x)?;
            s += v * w;
        }
        Ok(s)
    };
    let mut raw = eval(&mut f, half_line_nodes(0, t_lo, t_hi, &scale))?;
    let mut prev = raw.clone();
    for level in 1..=20u32 {
        raw += eval(&mut f, half_line_nodes(level, t_lo, t_hi, &scale))?;
        let est = &raw * &Real::from_f64(libm::exp2(-(level as f64)), p);
        let diff = (&est - &prev).abs();
        if est.is_zero() && diff.is_zero() {
            return Ok(est);
        }
        if level >= 3 && diff.log2_abs() <= est.log2_abs() + libm::log2(ctx.rel_tol) {
            return Ok(est);
        }
        prev = est;
    }
    Err(NumError::NonConvergence(format!(
        "quad_semiaxis at {p} bits"
    )))
}
