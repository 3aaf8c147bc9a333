//! Gamma function family at arbitrary precision.
//!
//! Spouge's approximation `Γ(z+1) = (z+a)^{z+1/2} e^{-(z+a)} [c_0 + Σ c_k/(z+k)]`
//! with `a` chosen from the target precision; coefficient tables are cached per precision.

use alloc::format;
use alloc::vec::Vec;

use spin::Mutex;

use crate::complex::Complex;
use crate::error::{NumError, Result};
use crate::real::Real;

struct SpougeTable {
    prec: usize,
    work: usize,
    a: i64,
    coeffs: Vec<Real>,
}

static SPOUGE: Mutex<Vec<SpougeTable>> = Mutex::new(Vec::new());
static EULER: Mutex<Vec<Real>> = Mutex::new(Vec::new());

fn spouge_a(prec: usize) -> i64 {
    // relative error a^{-1/2} (2π)^{-(a+1/2)} < 2^{-prec-8}
    let l2pi = libm::log2(2.0 * core::f64::consts::PI);
    libm::ceil((prec as f64 + 8.0) / l2pi) as i64 + 1
}

fn build_table(prec: usize) -> SpougeTable {
    let a = spouge_a(prec);
    // the c_k alternate and grow; size the working precision by the largest one
    let mut max_l2 = 0.0f64;
    for k in 1..a {
        let kf = k as f64;
        let l = (kf - 0.5) * libm::log2(a as f64 - kf)
            + (a as f64 - kf) * core::f64::consts::LOG2_E
            - libm::lgamma(kf) * core::f64::consts::LOG2_E;
        max_l2 = max_l2.max(l);
    }
    let work = prec + max_l2.max(0.0) as usize + 32;
    let two_pi = Real::pi(work).mul_i64(2);
    let mut coeffs = Vec::with_capacity(a as usize);
    coeffs.push(two_pi.sqrt());
    let mut fact = Real::one(work);
    for k in 1..a {
        if k > 1 {
            fact = fact.mul_i64(k - 1);
        }
        let base = Real::from_i64(a - k, work);
        let e = Real::ratio(2 * k - 1, 2, work);
        let mut c = base.pow(&e) * Real::from_i64(a - k, work).exp() / &fact;
        if k % 2 == 0 {
            c = -c;
        }
        coeffs.push(c);
    }
    SpougeTable {
        prec,
        work,
        a,
        coeffs,
    }
}

fn with_table<R>(prec: usize, f: impl FnOnce(&SpougeTable) -> R) -> R {
    let mut cache = SPOUGE.lock();
    if let Some(t) = cache.iter().find(|t| t.prec == prec) {
        return f(t);
    }
    let t = build_table(prec);
    let r = f(&t);
    cache.push(t);
    r
}

/// `(S, a, work)` with `Γ(z+1) = (z+a)^{z+1/2} e^{-(z+a)} S` for `Re z > 0`.
fn spouge_sum_complex(z: &Complex, prec: usize) -> (Complex, i64, usize) {
    with_table(prec, |t| {
        let zw = z.with_prec(t.work);
        let mut s = Complex::from_real(t.coeffs[0].clone());
        for (k, c) in t.coeffs.iter().enumerate().skip(1) {
            let d = &zw + &Complex::from_real(Real::from_i64(k as i64, t.work));
            s += Complex::from_real(c.clone()) * d.recip();
        }
        (s, t.a, t.work)
    })
}

fn spouge_sum_real(z: &Real, prec: usize) -> (Real, i64, usize) {
    with_table(prec, |t| {
        let zw = z.with_prec(t.work);
        let mut s = t.coeffs[0].clone();
        for (k, c) in t.coeffs.iter().enumerate().skip(1) {
            s += c / &zw.add_f64(k as f64);
        }
        (s, t.a, t.work)
    })
}

fn near_nonpositive_integer(x: f64, tol: f64) -> bool {
    x <= 0.5 && (x - libm::round(x)).abs() <= tol.max(1e-300)
}

/// `Γ(x)` for real `x`; poles at non-positive integers are errors.
pub fn gamma(x: &Real) -> Result<Real> {
    let p = x.prec();
    if x.is_zero() || (x.is_negative() && (x - &x.floor()).is_zero()) {
        return Err(NumError::Pole(format!("{}", x.to_f64())));
    }
    let half = Real::ratio(1, 2, p);
    if *x < half {
        // Γ(x) Γ(1-x) = π / sin(πx)
        let pi = Real::pi(p + 16);
        let xs = x.with_prec(p + 16);
        let s = (&pi * &xs).sin();
        let g = gamma(&(Real::one(p + 16) - &xs))?;
        return Ok((pi / (s * g)).with_prec(p));
    }
    let (s, a, work) = spouge_sum_real(&(x - &Real::one(p)), p);
    let zw = x.with_prec(work) - Real::one(work);
    let za = zw.add_f64(a as f64);
    let r = za.pow(&(&zw + &Real::ratio(1, 2, work))) * (-za).exp() * s;
    Ok(r.with_prec(p))
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: &Real) -> Real {
    match gamma(x) {
        Ok(g) => g.recip(),
        Err(_) => Real::zero(x.prec()),
    }
}

/// `log|Γ(x)|` and the sign of `Γ(x)` for real `x`.
pub fn ln_gamma_real(x: &Real) -> Result<(Real, i32)> {
    let p = x.prec();
    if x.is_zero() || (x.is_negative() && (x - &x.floor()).is_zero()) {
        return Err(NumError::Pole(format!("{}", x.to_f64())));
    }
    let half = Real::ratio(1, 2, p);
    if *x < half {
        let pi = Real::pi(p + 16);
        let xs = x.with_prec(p + 16);
        let s = (&pi * &xs).sin();
        let (lg, sg) = ln_gamma_real(&(Real::one(p + 16) - &xs))?;
        let sign = sg * s.signum_i32();
        return Ok(((pi.ln() - s.abs().ln() - lg).with_prec(p), sign));
    }
    let (s, a, work) = spouge_sum_real(&(x - &Real::one(p)), p);
    let zw = x.with_prec(work) - Real::one(work);
    let za = zw.add_f64(a as f64);
    let r = (&zw + &Real::ratio(1, 2, work)) * za.ln() - za + s.ln();
    Ok((r.with_prec(p), 1))
}

/// Double-precision principal `log Γ(z)`, used only to select the branch.
fn ln_gamma_f64(re: f64, im: f64) -> (f64, f64) {
    let (mut zr, zi) = (re, im);
    let (mut acc_r, mut acc_i) = (0.0, 0.0);
    while zr < 15.0 || libm::hypot(zr, zi) < 15.0 {
        acc_r -= 0.5 * libm::log(zr * zr + zi * zi);
        acc_i -= libm::atan2(zi, zr);
        zr += 1.0;
        if zr > 1e6 {
            break;
        }
    }
    // Stirling: (z-1/2) log z - z + log(2π)/2 + 1/(12z) - 1/(360 z^3)
    let lr = 0.5 * libm::log(zr * zr + zi * zi);
    let li = libm::atan2(zi, zr);
    let (ar, ai) = (zr - 0.5, zi);
    let mut rr = ar * lr - ai * li - zr + 0.5 * libm::log(2.0 * core::f64::consts::PI);
    let mut ri = ar * li + ai * lr - zi;
    let d = zr * zr + zi * zi;
    let (ir, ii) = (zr / d, -zi / d);
    rr += ir / 12.0;
    ri += ii / 12.0;
    (rr + acc_r, ri + acc_i)
}

/// Principal branch of `log Γ(v)`, analytic off `(-∞, 0]` and real on `(0, ∞)`.
pub fn log_gamma(v: &Complex, rel_tol: f64) -> Result<Complex> {
    let p = v.prec();
    let (vr, vi) = v.to_f64();
    if vi.abs() <= rel_tol && near_nonpositive_integer(vr, rel_tol) {
        return Err(NumError::Pole(format!("{vr}{vi:+}i")));
    }
    let work = p + 16;
    let mut z = v.with_prec(work);
    let mut shift = Complex::one(work);
    let mut m = 0;
    while z.re < Real::one(work) {
        shift = &shift * &z;
        z = &z + &Complex::one(work);
        m += 1;
    }
    let (s, a, sw) = spouge_sum_complex(&(&z - &Complex::one(work)), p);
    let zw = z.with_prec(sw) - Complex::one(sw);
    let za = &zw + &Complex::from_real(Real::from_i64(a, sw));
    let half = Complex::from_real(Real::ratio(1, 2, sw));
    let mut r = (&zw + &half) * za.ln() - za + s.ln();
    if m > 0 {
        r = r - shift.with_prec(sw).ln();
    }
    // select the branch whose imaginary part matches the double-precision continuation
    let (_, want_im) = ln_gamma_f64(vr, vi);
    let two_pi = Real::pi(sw).mul_i64(2);
    let k = libm::round((want_im - r.im.to_f64()) / (2.0 * core::f64::consts::PI));
    if k != 0.0 {
        r.im += &two_pi.mul_f64(k);
    }
    if !r.is_finite() {
        return Err(NumError::NonFinite(format!("log_gamma({vr}{vi:+}i)")));
    }
    Ok(r.with_prec(p))
}

/// `Γ(v)` for complex `v`.
pub fn gamma_complex(v: &Complex, rel_tol: f64) -> Result<Complex> {
    Ok(log_gamma(v, rel_tol)?.exp())
}

/// Euler's constant by the Brent–McMillan series, cached per precision.
pub fn euler_gamma(prec: usize) -> Real {
    {
        let cache = EULER.lock();
        if let Some(g) = cache.iter().find(|g| g.prec() == prec) {
            return g.clone();
        }
    }
    let work = prec + 32;
    // truncation error ~ π e^{-4N}
    let n = libm::ceil((work as f64) * core::f64::consts::LN_2 / 4.0) as i64 + 2;
    let nn = Real::from_i64(n * n, work);
    let mut b = Real::one(work);
    let mut a = -Real::from_i64(n, work).ln();
    let mut u = a.clone();
    let mut v = b.clone();
    let kmax = 4 * n + 10;
    for k in 1..kmax {
        let kr = Real::from_i64(k, work);
        // B_k = B_{k-1} N²/k², A_k = (A_{k-1} N²/k + B_k)/k
        b = &b * &nn / &(&kr * &kr);
        a = (&a * &nn / &kr + &b) / &kr;
        u += &a;
        v += &b;
    }
    let g = (u / v).with_prec(prec);
    EULER.lock().push(g.clone());
    g
}

/// Digamma at positive integers, `ψ(n) = H_{n-1} - γ`.
pub fn digamma_int(n: u64, prec: usize) -> Real {
    let mut h = Real::zero(prec);
    for k in 1..n {
        h += Real::ratio(1, k as i64, prec);
    }
    h - euler_gamma(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &Real, b: &Real) -> f64 {
        ((a - b) / b).abs().log2_abs()
    }

    #[test]
    fn gamma_values() {
        for p in [64usize, 256, 512] {
            let one = gamma(&Real::one(p)).unwrap();
            assert!(rel(&one, &Real::one(p)) < -(p as f64) + 12.0, "p={p}");
            let half = gamma(&Real::ratio(1, 2, p)).unwrap();
            assert!(
                rel(&half, &Real::pi(p).sqrt()) < -(p as f64) + 12.0,
                "p={p}"
            );
            let g7 = gamma(&Real::from_i64(7, p)).unwrap();
            assert!(rel(&g7, &Real::from_i64(720, p)) < -(p as f64) + 12.0);
        }
    }

    #[test]
    fn gamma_reflection_negative() {
        let p = 256;
        // Γ(-1/2) = -2√π
        let g = gamma(&Real::ratio(-1, 2, p)).unwrap();
        let want = -(Real::pi(p).sqrt().mul_i64(2));
        assert!(rel(&g, &want) < -240.0);
        assert!(gamma(&Real::from_i64(-3, p)).is_err());
        assert!(rgamma(&Real::from_i64(-3, p)).is_zero());
    }

    #[test]
    fn ln_gamma_real_matches() {
        let p = 256;
        let x = Real::from_f64(-2.5, p);
        let (l, s) = ln_gamma_real(&x).unwrap();
        let g = gamma(&x).unwrap();
        assert_eq!(s, g.signum_i32());
        assert!(rel(&l.exp(), &g.abs()) < -240.0);
    }

    #[test]
    fn euler_constant_digits() {
        let g = euler_gamma(256);
        let want = Real::parse(
            "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467",
            256,
        )
        .unwrap();
        assert!(rel(&g, &want) < -250.0);
    }

    #[test]
    fn log_gamma_recurrence_and_branch() {
        let p = 256;
        let tol = libm::exp2(-128.0);
        let v = Complex::from_f64(2.3, 1.7, p);
        let l0 = log_gamma(&v, tol).unwrap();
        let l1 = log_gamma(&(&v + &Complex::one(p)), tol).unwrap();
        let res = (l1 - l0 - v.ln()).abs();
        assert!(res.log2_abs() < -240.0);
        // deep in the left half-plane the branch follows the recurrence
        let w = Complex::from_f64(-7.3, 0.4, p);
        let a = log_gamma(&w, tol).unwrap();
        let b = log_gamma(&(&w + &Complex::one(p)), tol).unwrap();
        assert!((b - a - w.ln()).abs().log2_abs() < -230.0);
    }
}
