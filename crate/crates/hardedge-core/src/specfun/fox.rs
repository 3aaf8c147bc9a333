//! The three Fox-type functions `I⁽¹⁾, I⁽²⁾, I⁽³⁾` built on the variable
//! `u = (θ/(θ+1))^{θ/(θ+1)} (1/(θ+1))^{1/(θ+1)} z`.
//!
//! * `I⁽¹⁾` and `I⁽³⁾` reduce to Wright's function of `u^{1+1/θ}` (resp. `u^{1+θ}`).
//! * `I⁽²⁾` is summed from its residue expansion, two interleaved pole lattices
//!   `v = (1+1/θ)(1/2 − a + k)` and `v = (1+θ)(a + j)`. When the lattices collide
//!   the pair of simple poles merges into a double pole and contributes a `log u` term.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;

use super::series::{adaptive_sum, log2_factorial, log2_gamma_f64, CoefGen, CoefTable, PartPlan};
use super::wright::{WrightBessel, WrightParams};
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::gamma::{digamma_int, gamma, ln_gamma_real};
use crate::real::Real;

/// Which of the three functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FoxKind {
    First,
    Second,
    Third,
}

impl FoxKind {
    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(FoxKind::First),
            2 => Ok(FoxKind::Second),
            3 => Ok(FoxKind::Third),
            _ => Err(NumError::InvalidParameter(format!(
                "fox kind must be 1, 2 or 3, got {k}"
            ))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            FoxKind::First => 1,
            FoxKind::Second => 2,
            FoxKind::Third => 3,
        }
    }
}

/// `(θ, a)` together with the derived scale of `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoxIParams {
    theta: Real,
    a: Real,
    u_scale: Real,
}

impl FoxIParams {
    pub fn new(theta: Real, a: Real) -> Result<Self> {
        if !theta.is_finite() || !theta.is_positive() || !a.is_finite() {
            return Err(NumError::InvalidParameter(format!(
                "need finite θ > 0 and finite a, got θ={theta}, a={a}"
            )));
        }
        let p = theta.prec().max(a.prec());
        let one = Real::one(p);
        let tp1 = &theta + &one;
        let s = &theta / &tp1;
        let r = tp1.recip();
        let u_scale = s.pow(&s) * r.pow(&r);
        Ok(FoxIParams { theta, a, u_scale })
    }

    pub fn from_f64(theta: f64, a: f64, prec: usize) -> Result<Self> {
        Self::new(Real::from_f64(theta, prec), Real::from_f64(a, prec))
    }

    pub fn theta(&self) -> &Real {
        &self.theta
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn u_scale(&self) -> &Real {
        &self.u_scale
    }

    /// `(1/θ, 1/2 − a)`, under which `I⁽³⁾` becomes `I⁽¹⁾`; `u_scale` is invariant.
    pub fn dual(&self) -> Self {
        let p = self.theta.prec().max(self.a.prec());
        FoxIParams {
            theta: self.theta.recip(),
            a: Real::ratio(1, 2, p) - &self.a,
            u_scale: self.u_scale.clone(),
        }
    }
}

/// Reusable evaluator for one kind and parameter set.
pub struct FoxI {
    kind: FoxKind,
    params: FoxIParams,
    ctx: PrecisionContext,
    engine: Engine,
}

enum Engine {
    /// `(1+1/θ) u^{(1+1/θ)(1/2−a)} J(u^{1+1/θ})` for the (possibly dual) parameters.
    Wright {
        theta: Real,
        a: Real,
        bessel: WrightBessel,
    },
    Residue(ResidueTables),
}

struct ResidueTables {
    theta: Real,
    a: Real,
    regular: CoefTable,
    logarithmic: CoefTable,
    second: CoefTable,
}

impl FoxI {
    pub fn new(kind: FoxKind, params: &FoxIParams, ctx: &PrecisionContext) -> Result<Self> {
        let p = ctx.mantissa_bits;
        let engine = match kind {
            FoxKind::First | FoxKind::Third => {
                let eff = if kind == FoxKind::First {
                    params.clone()
                } else {
                    params.dual()
                };
                let theta = eff.theta.with_prec(p + 64);
                let a = eff.a.with_prec(p + 64);
                let one = Real::one(p + 64);
                let a1 = (Real::ratio(1, 2, p + 64) - &a) / &theta + &one - &a;
                let wp = WrightParams::new(a1, theta.recip())?;
                Engine::Wright {
                    theta,
                    a,
                    bessel: WrightBessel::new(&wp, ctx),
                }
            }
            FoxKind::Second => {
                let lattice = Lattice::new(&params.theta, &params.a, p);
                Engine::Residue(ResidueTables {
                    theta: params.theta.clone(),
                    a: params.a.clone(),
                    regular: CoefTable::new(Box::new(Regular(lattice.clone()))),
                    logarithmic: CoefTable::new(Box::new(Logarithmic(lattice.clone()))),
                    second: CoefTable::new(Box::new(Second(lattice))),
                })
            }
        };
        Ok(FoxI {
            kind,
            params: params.clone(),
            ctx: ctx.clone(),
            engine,
        })
    }

    pub fn kind(&self) -> FoxKind {
        self.kind
    }

    pub fn params(&self) -> &FoxIParams {
        &self.params
    }

    /// Value at a principal-branch `z ∉ (−∞, 0]`.
    pub fn eval(&mut self, z: &Complex) -> Result<Complex> {
        if !z.is_finite() {
            return Err(NumError::NonFinite("fox_i argument".into()));
        }
        if z.im.is_zero() && !z.re.is_positive() {
            return Err(NumError::Domain(format!(
                "z = {z:?} lies on the cut (-inf, 0]"
            )));
        }
        let lnz = z.with_prec(self.ctx.mantissa_bits + 64).ln();
        self.eval_log(&lnz)
    }

    /// Value at the point of the logarithmic Riemann surface with logarithm `lnz`.
    pub fn eval_log(&mut self, lnz: &Complex) -> Result<Complex> {
        if !lnz.is_finite() {
            return Err(NumError::Domain("z = 0".into()));
        }
        let target = self.ctx.mantissa_bits;
        let ln_scale = |wp: usize| {
            let mut l = lnz.with_prec(wp);
            l.re += &self.params.u_scale.with_prec(wp).ln();
            l
        };
        let lnu = ln_scale(target + 64);
        match &mut self.engine {
            Engine::Wright { theta, a, bessel } => {
                let p = target + 64;
                let one = Real::one(p);
                let e = &one + &theta.recip();
                let w = lnu.scale(&e).exp();
                let pref = lnu
                    .scale(&(&e * &(Real::ratio(1, 2, p) - &*a)))
                    .exp()
                    .scale(&e);
                let j = bessel.eval(&w)?;
                Ok((&pref * &j).with_prec(target))
            }
            Engine::Residue(t) => residue_sum(t, &lnu, target, self.ctx.max_series_terms, |wp| {
                ln_scale(wp)
            }),
        }
    }
}

/// One-shot evaluation of `I⁽ᵏ⁾_{θ,a}(z)`.
pub fn fox_i(
    kind: FoxKind,
    params: &FoxIParams,
    z: &Complex,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    FoxI::new(kind, params, ctx)?.eval(z)
}

fn residue_sum<F>(
    t: &mut ResidueTables,
    lnu: &Complex,
    target: usize,
    max_terms: usize,
    ln_at: F,
) -> Result<Complex>
where
    F: Fn(usize) -> Complex,
{
    let thf = t.theta.to_f64();
    let af = t.a.to_f64();
    let l2u = lnu.re.to_f64() * core::f64::consts::LOG2_E;
    let alpha0 = (1.0 + 1.0 / thf) * (0.5 - af);
    let beta0 = (1.0 + thf) * af;
    let log2_lnu = lnu.log2_abs();
    let (theta, a) = (&t.theta, &t.a);
    let mut parts = [
        PartPlan {
            table: &mut t.regular,
            log2w: (1.0 + 1.0 / thf) * l2u,
            offset: alpha0 * l2u,
        },
        PartPlan {
            table: &mut t.logarithmic,
            log2w: (1.0 + 1.0 / thf) * l2u,
            offset: alpha0 * l2u + log2_lnu,
        },
        PartPlan {
            table: &mut t.second,
            log2w: (1.0 + thf) * l2u,
            offset: beta0 * l2u,
        },
    ];
    adaptive_sum(&mut parts, target, max_terms, |wp| {
        let l = ln_at(wp);
        let one = Real::one(wp);
        let th = theta.with_prec(wp);
        let aw = a.with_prec(wp);
        let e1 = &one + &th.recip();
        let e2 = &one + &th;
        let half = Real::ratio(1, 2, wp);
        let p_reg = l.scale(&(&e1 * &(&half - &aw))).exp();
        let p_log = &p_reg * &l;
        let p_sec = l.scale(&(&e2 * &aw)).exp();
        let w1 = l.scale(&e1).exp();
        let w2 = l.scale(&e2).exp();
        vec![(p_reg, w1.clone()), (p_log, w1), (p_sec, w2)]
    })
}

/// Pole-lattice bookkeeping for `I⁽²⁾`: pole `k` of the first family sits at
/// `(1+1/θ)(1/2 − a + k)`, pole `j` of the second at `(1+θ)(a + j)`.
#[derive(Clone)]
struct Lattice {
    theta: Real,
    a: Real,
    thf: f64,
    af: f64,
    /// Bits of the input parameters; collisions closer than `2^{16−bits}` are exact.
    bits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Collision {
    None,
    /// The first-family pole `k` coincides with the second-family pole `j`.
    Exact {
        k: usize,
        j: usize,
    },
}

impl Lattice {
    fn new(theta: &Real, a: &Real, bits: usize) -> Self {
        Lattice {
            theta: theta.clone(),
            a: a.clone(),
            thf: theta.to_f64(),
            af: a.to_f64(),
            bits,
        }
    }

    /// `(1/2 − a + k) − θ(a + j)` at high precision.
    fn gap(&self, k: usize, j: usize) -> Real {
        let p = self.bits + 64;
        let th = self.theta.with_prec(p);
        let a = self.a.with_prec(p);
        let lhs = Real::ratio(1, 2, p) - &a + Real::from_i64(k as i64, p);
        lhs - &th * &(&a + &Real::from_i64(j as i64, p))
    }

    fn is_exact(&self, k: usize, j: usize) -> bool {
        self.gap(k, j).log2_abs() <= -((self.bits as f64) - 16.0)
    }

    fn from_first(&self, k: usize) -> Collision {
        let x = (0.5 - self.af + k as f64) / self.thf - self.af;
        let j = libm::round(x);
        if j >= 0.0 && (x - j).abs() < 1e-6 && self.is_exact(k, j as usize) {
            return Collision::Exact { k, j: j as usize };
        }
        Collision::None
    }

    fn from_second(&self, j: usize) -> Collision {
        let y = self.thf * (self.af + j as f64) - 0.5 + self.af;
        let k = libm::round(y);
        if k >= 0.0 && (y - k).abs() < 1e-6 && self.is_exact(k as usize, j) {
            return Collision::Exact { k: k as usize, j };
        }
        Collision::None
    }

    /// `log2 |Γ(x)|` where `x` may sit near (but not on) a pole; `near` rebuilds `x` exactly.
    fn log2_gamma_guarded(&self, xf: f64, near: impl FnOnce(usize) -> Real) -> f64 {
        let n = libm::round(-xf);
        if xf < 0.5 && (xf + n).abs() < 1e-6 {
            let x = near(self.bits + 64);
            return match ln_gamma_real(&x) {
                Ok((l, _)) => l.to_f64() * core::f64::consts::LOG2_E,
                Err(_) => f64::NEG_INFINITY,
            };
        }
        log2_gamma_f64(xf)
    }

    /// `a − (1/2 − a + k)/θ`, the Gamma argument of the first family.
    fn first_arg(&self, k: usize, wp: usize) -> Real {
        let a = self.a.with_prec(wp);
        &a - &((Real::ratio(1, 2, wp) - &a + Real::from_i64(k as i64, wp))
            / &self.theta.with_prec(wp))
    }

    /// `1/2 − a − θ(a + j)`, the Gamma argument of the second family.
    fn second_arg(&self, j: usize, wp: usize) -> Real {
        let a = self.a.with_prec(wp);
        Real::ratio(1, 2, wp)
            - &a
            - &self.theta.with_prec(wp) * &(&a + &Real::from_i64(j as i64, wp))
    }

    fn signed_inv_factorials(&self, k: usize, j: usize, wp: usize) -> Real {
        let mut c = Real::one(wp);
        for i in 2..=k {
            c = c.div_i64(i as i64);
        }
        for i in 2..=j {
            c = c.div_i64(i as i64);
        }
        if (k + j) % 2 == 1 {
            -c
        } else {
            c
        }
    }
}

/// Coefficients of `w1^k` multiplying `u^{α0}` (no log factor).
struct Regular(Lattice);
/// Coefficients of `w1^k` multiplying `u^{α0} log u`; nonzero only at collisions.
struct Logarithmic(Lattice);
/// Coefficients of `w2^j` multiplying `u^{β0}`; zero at collisions.
struct Second(Lattice);

impl CoefGen for Regular {
    fn coef(&self, k: usize, wp: usize) -> Real {
        let l = &self.0;
        let th = l.theta.with_prec(wp);
        let one = Real::one(wp);
        let e1 = &one + &th.recip();
        let e2 = &one + &th;
        match l.from_first(k) {
            Collision::Exact { k, j } => {
                let s = l.signed_inv_factorials(k, j, wp);
                let psi_j = digamma_int(j as u64 + 1, wp);
                let psi_k = digamma_int(k as u64 + 1, wp);
                s * (&e1 * &psi_j + &e2 * &psi_k)
            }
            Collision::None => {
                let g = gamma(&l.first_arg(k, wp)).unwrap_or_else(|_| Real::zero(wp));
                l.signed_inv_factorials(k, 0, wp) * e1 * g
            }
        }
    }

    fn log2_est(&self, k: usize) -> f64 {
        let l = &self.0;
        match l.from_first(k) {
            Collision::Exact { k, j } => {
                let mag = (1.0 + l.thf)
                    * (3.0 + libm::log((k + 1) as f64) + libm::log((j + 1) as f64))
                    * (1.0 + 1.0 / l.thf);
                libm::log2(mag) - log2_factorial(k) - log2_factorial(j)
            }
            Collision::None => {
                let xf = l.af - (0.5 - l.af + k as f64) / l.thf;
                libm::log2(1.0 + 1.0 / l.thf) - log2_factorial(k)
                    + l.log2_gamma_guarded(xf, |p| l.first_arg(k, p))
            }
        }
    }
}

impl CoefGen for Logarithmic {
    fn coef(&self, k: usize, wp: usize) -> Real {
        let l = &self.0;
        match l.from_first(k) {
            Collision::Exact { k, j } => {
                let th = l.theta.with_prec(wp);
                let e2 = &Real::one(wp) + &th;
                -(l.signed_inv_factorials(k, j, wp) * (&e2 * &e2) / th)
            }
            Collision::None => Real::zero(wp),
        }
    }

    fn log2_est(&self, k: usize) -> f64 {
        let l = &self.0;
        match l.from_first(k) {
            Collision::Exact { k, j } => {
                libm::log2((1.0 + l.thf) * (1.0 + l.thf) / l.thf)
                    - log2_factorial(k)
                    - log2_factorial(j)
            }
            Collision::None => f64::NEG_INFINITY,
        }
    }
}

impl CoefGen for Second {
    fn coef(&self, j: usize, wp: usize) -> Real {
        let l = &self.0;
        match l.from_second(j) {
            Collision::Exact { .. } => Real::zero(wp),
            Collision::None => {
                let e2 = &Real::one(wp) + &l.theta.with_prec(wp);
                let g = gamma(&l.second_arg(j, wp)).unwrap_or_else(|_| Real::zero(wp));
                l.signed_inv_factorials(j, 0, wp) * e2 * g
            }
        }
    }

    fn log2_est(&self, j: usize) -> f64 {
        let l = &self.0;
        match l.from_second(j) {
            Collision::Exact { .. } => f64::NEG_INFINITY,
            Collision::None => {
                let xf = 0.5 - l.af - l.thf * (l.af + j as f64);
                libm::log2(1.0 + l.thf) - log2_factorial(j)
                    + l.log2_gamma_guarded(xf, |p| l.second_arg(j, p))
            }
        }
    }
}
