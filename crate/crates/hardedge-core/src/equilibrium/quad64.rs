//! Double-precision tanh-sinh quadrature and a dense linear solver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{NumError, Result};

/// Quadrature node on `[a, b]` with both endpoint distances computed without cancellation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub x: f64,
    pub from_a: f64,
    pub to_b: f64,
    pub w: f64,
}

const T_MAX: f64 = 3.6;

/// Full tanh-sinh rule with step `2^-level`.
pub(crate) fn tanh_sinh(a: f64, b: f64, level: u32) -> Vec<Node> {
    let h = libm::exp2(-(level as f64));
    let n = libm::ceil(T_MAX / h) as i64;
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(2 * n as usize + 1);
    for k in -n..=n {
        let t = k as f64 * h;
        let u = core::f64::consts::FRAC_PI_2 * libm::sinh(t);
        let e = libm::exp(-2.0 * u.abs());
        // 1 − tanh|u| = 2e/(1+e), exact for large |u|.
        let comp = 2.0 * e / (1.0 + e);
        let (from_a, to_b) = if u >= 0.0 {
            (half * (2.0 - comp), half * comp)
        } else {
            (half * comp, half * (2.0 - comp))
        };
        let ch = libm::cosh(u);
        let w = h * core::f64::consts::FRAC_PI_2 * libm::cosh(t) / (ch * ch) * half;
        if w == 0.0 || from_a == 0.0 || to_b == 0.0 {
            continue;
        }
        out.push(Node {
            x: a + from_a,
            from_a,
            to_b,
            w,
        });
    }
    out
}

/// `∫_a^b f` with level doubling until successive levels agree to `tol` times `∫|f|`.
pub(crate) fn integrate<F: FnMut(&Node) -> f64>(a: f64, b: f64, tol: f64, f: F) -> Result<f64> {
    integrate_scaled(a, b, tol, 0.0, f)
}

/// Same, with the error measured against `max(∫|f|, scale)`; for a piece of a larger sum.
pub(crate) fn integrate_scaled<F: FnMut(&Node) -> f64>(
    a: f64,
    b: f64,
    tol: f64,
    scale: f64,
    mut f: F,
) -> Result<f64> {
    let mut prev = f64::NAN;
    for level in 3..=10 {
        let (mut s, mut m) = (0.0, 0.0);
        for node in tanh_sinh(a, b, level) {
            let v = f(&node) * node.w;
            s += v;
            m += v.abs();
        }
        if !s.is_finite() {
            return Err(NumError::NonFinite("tanh-sinh integrand".into()));
        }
        if (s - prev).abs() <= tol * m.max(scale).max(f64::MIN_POSITIVE) {
            return Ok(s);
        }
        prev = s;
    }
    Err(NumError::NonConvergence("tanh-sinh level 10".into()))
}

/// Vector-valued version: `f(node, out)` adds the integrand values into `out`.
pub(crate) fn integrate_vec<F: FnMut(&Node, &mut [f64])>(
    a: f64,
    b: f64,
    dim: usize,
    tol: f64,
    mut f: F,
) -> Result<Vec<f64>> {
    let mut prev: Vec<f64> = vec![f64::NAN; dim];
    let mut vals = vec![0.0; dim];
    for level in 3..=10 {
        let mut s = vec![0.0; dim];
        let mut m = vec![0.0; dim];
        for node in tanh_sinh(a, b, level) {
            vals.iter_mut().for_each(|v| *v = 0.0);
            f(&node, &mut vals);
            for ((acc, mag), v) in s.iter_mut().zip(m.iter_mut()).zip(vals.iter()) {
                *acc += v * node.w;
                *mag += (v * node.w).abs();
            }
        }
        let settled = s
            .iter()
            .zip(prev.iter())
            .zip(m.iter())
            .all(|((x, y), mag)| (x - y).abs() <= tol * mag.max(f64::MIN_POSITIVE));
        if settled {
            return Ok(s);
        }
        prev = s;
    }
    Err(NumError::NonConvergence("tanh-sinh level 10".into()))
}

/// Solves the dense `n × n` system `a x = rhs` (row-major) by partial pivoting.
pub(crate) fn solve(mut a: Vec<f64>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .abs()
                    .partial_cmp(&a[j * n + col].abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[piv * n + col] == 0.0 {
            return Err(NumError::NonConvergence(
                "singular collocation matrix".into(),
            ));
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (rhs[r] - s) / a[r * n + r];
    }
    Ok(x)
}
