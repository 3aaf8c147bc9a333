//! Model parametrix functions at the hard edge.
//!
//! `G^model(z; λ)` and `H^model(z; β)` are assembled piecewise from the Fox-type
//! functions over three sectors each, separated by two discontinuity rays. The ladders
//! `G^{(ℓ)}(z) = G^model(z; R^λ(ℓ)) z^ℓ`, `H^{(ℓ)}(z) = H^model(z; R^β(ℓ)) z^ℓ` and their
//! tilde counterparts are biorthogonal under `(1/2πi)∮ H G dz/z`.
//!
//! With `T(λ) = −(α + 3/2)/(θ + 1) + λ`:
//!
//! * `G^model = √(2π) θ^T/√(θ+1) ×` `I⁽²⁾_{θ,T}(z)/(2π)` for `|arg z| < (π + θγ)/(θ+1)`,
//!   `−i e^{Tπi} I⁽¹⁾_{θ,T}((−z) e^{iθπ/(θ+1)})` above the upper ray and
//!   `i e^{−Tπi} I⁽¹⁾_{θ,T}((−z) e^{−iθπ/(θ+1)})` below the lower ray.
//! * `H^model = √(2π) θ^{−T}/√(θ+1) ×` `I⁽²⁾_{θ,−T}(−z)/(2π)` for `|arg(−z)| < θ(π + γ)/(θ+1)`,
//!   `e^{Tπi} I⁽³⁾_{θ,−T}(z e^{iπ/(θ+1)})` for `arg z ∈ (−(π − θγ)/(θ+1), 0)` and
//!   `e^{−Tπi} I⁽³⁾_{θ,−T}(z e^{−iπ/(θ+1)})` for `arg z ∈ (0, (π − θγ)/(θ+1))`.

use alloc::format;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::error::{NumError, Result};
use crate::quad::{gauss_legendre, quad_circle_arcs};
use crate::real::Real;
use crate::specfun::{FoxI, FoxIParams, FoxKind};

/// `(θ, α, γ)`: exponent, hard-edge weight and ray-opening angle.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrixParams {
    theta: Real,
    alpha: Real,
    gamma: Real,
}

impl ParametrixParams {
    /// Requires `θ > 0`, `α > −1` and `0 ≤ γ < min(π, π/θ)` so all six sectors are nonempty.
    pub fn new(theta: Real, alpha: Real, gamma: Real) -> Result<Self> {
        if !theta.is_positive() || !theta.is_finite() {
            return Err(NumError::InvalidParameter(format!(
                "θ must be positive, got {theta}"
            )));
        }
        if !(alpha.to_f64() > -1.0) || !alpha.is_finite() {
            return Err(NumError::InvalidParameter(format!(
                "α must exceed −1, got {alpha}"
            )));
        }
        let pi = Real::pi(theta.prec());
        let limit = pi.clone().min(&pi / &theta);
        if gamma.is_negative() || gamma >= limit {
            return Err(NumError::InvalidParameter(format!(
                "γ = {gamma} outside [0, min(π, π/θ))"
            )));
        }
        Ok(ParametrixParams {
            theta,
            alpha,
            gamma,
        })
    }

    pub fn from_f64(theta: f64, alpha: f64, prec: usize) -> Result<Self> {
        Self::new(
            Real::from_f64(theta, prec),
            Real::from_f64(alpha, prec),
            Real::zero(prec),
        )
    }

    pub fn with_gamma(&self, gamma: Real) -> Result<Self> {
        Self::new(self.theta.clone(), self.alpha.clone(), gamma)
    }

    pub fn theta(&self) -> &Real {
        &self.theta
    }

    pub fn alpha(&self) -> &Real {
        &self.alpha
    }

    pub fn gamma(&self) -> &Real {
        &self.gamma
    }

    /// `T(λ) = −(α + 3/2)/(θ + 1) + λ`.
    pub fn shift(&self, lambda: &Real) -> Real {
        let p = lambda.prec().max(self.theta.prec());
        let tp1 = &self.theta.with_prec(p) + &Real::one(p);
        lambda - &((&self.alpha.with_prec(p) + &Real::ratio(3, 2, p)) / &tp1)
    }

    /// Angle of the upper discontinuity ray of `G^model`: `(π + θγ)/(θ+1)`.
    pub fn g_ray(&self, prec: usize) -> Real {
        let th = self.theta.with_prec(prec);
        (&Real::pi(prec) + &(&th * &self.gamma.with_prec(prec))) / &(&th + &Real::one(prec))
    }

    /// Angle of the upper discontinuity ray of `H^model`: `(π − θγ)/(θ+1)`.
    pub fn h_ray(&self, prec: usize) -> Real {
        let th = self.theta.with_prec(prec);
        (&Real::pi(prec) - &(&th * &self.gamma.with_prec(prec))) / &(&th + &Real::one(prec))
    }
}

/// Integer offsets and fractional parts attached to a ladder index `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametrixIndex {
    pub ell: i64,
    pub m_ell: i64,
    pub n_ell: i64,
    pub m_tilde_ell: i64,
    pub n_tilde_ell: i64,
    /// `θℓ/(θ+1) + m_ℓ ∈ (0, 1]`.
    pub r_lambda: Real,
    /// `−θℓ/(θ+1) − n_ℓ ∈ (−θ/(θ+1), 1/(θ+1)]`.
    pub r_beta: Real,
    /// `1/(θ+1) + θℓ/(θ+1) + m̃_ℓ ∈ (0, 1]`.
    pub r_tilde_lambda: Real,
    /// `1/(θ+1) − θℓ/(θ+1) − ñ_ℓ ∈ (−θ/(θ+1), 1/(θ+1)]`.
    pub r_tilde_beta: Real,
}

/// `floor` that treats values within a few ulps of an integer as that integer.
fn snapped_floor(x: &Real) -> i64 {
    let r = x.round_i64().unwrap_or(0);
    let near = (x - &Real::from_i64(r, x.prec())).log2_abs() < -((x.prec() as f64) - 12.0);
    if near {
        r
    } else {
        x.floor().round_i64().unwrap_or(0)
    }
}

fn snapped_ceil(x: &Real) -> i64 {
    -snapped_floor(&-x)
}

/// Offsets and fractional parts for index `ℓ`.
pub fn index_for(ell: i64, theta: &Real) -> ParametrixIndex {
    let p = theta.prec();
    let one = Real::one(p);
    let tp1 = theta + &one;
    let x = &(theta * &Real::from_i64(ell, p)) / &tp1;
    let inv = tp1.recip();
    let slope = theta / &tp1;

    let m_ell = snapped_floor(&(&one - &x));
    let n_ell = snapped_ceil(&(&-&x - &inv));
    let n_tilde_ell = snapped_ceil(&-&x);
    let m_tilde_ell = snapped_floor(&(&slope - &x));
    ParametrixIndex {
        ell,
        m_ell,
        n_ell,
        m_tilde_ell,
        n_tilde_ell,
        r_lambda: &x + &Real::from_i64(m_ell, p),
        r_beta: -&x - Real::from_i64(n_ell, p),
        r_tilde_lambda: &(&inv + &x) + &Real::from_i64(m_tilde_ell, p),
        r_tilde_beta: &(&inv - &x) - &Real::from_i64(n_tilde_ell, p),
    }
}

/// One-sided limit on a discontinuity ray; `Plus` is the counterclockwise side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Sector in which a point lies, after resolving ray side tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sector {
    Upper,
    Central,
    Lower,
}

/// Classifies `phi ∈ (−π, π]` against rays at `±ray`; `central_inside` says whether the
/// central formula lives in `|phi| < ray` (as for `G`) or outside it (as for `H`).
fn classify(phi: &Real, ray: &Real, side: Option<Side>, central_inside: bool) -> Result<Sector> {
    let tol = -((phi.prec() as f64) / 2.0);
    let on_upper = (phi - ray).log2_abs() < tol;
    let on_lower = (phi + ray).log2_abs() < tol;
    if on_upper || on_lower {
        let s = side.ok_or_else(|| {
            NumError::OnRay(format!("arg z = {} on ray ±{}", phi.to_f64(), ray.to_f64()))
        })?;
        return Ok(match (central_inside, on_upper, s) {
            (true, true, Side::Plus) => Sector::Upper,
            (true, true, Side::Minus) => Sector::Central,
            (true, false, Side::Plus) => Sector::Central,
            (true, false, Side::Minus) => Sector::Lower,
            (false, true, Side::Plus) => Sector::Central,
            (false, true, Side::Minus) => Sector::Upper,
            (false, false, Side::Plus) => Sector::Lower,
            (false, false, Side::Minus) => Sector::Central,
        });
    }
    let inside = phi.abs() < *ray;
    Ok(if inside == central_inside {
        Sector::Central
    } else if phi.is_negative() {
        Sector::Lower
    } else {
        Sector::Upper
    })
}

fn log_point(z: &Complex, prec: usize) -> Result<(Real, Real)> {
    if z.is_zero() || !z.is_finite() {
        return Err(NumError::Domain("model functions need 0 < |z| < ∞".into()));
    }
    let z = z.with_prec(prec);
    Ok((z.norm_sqr().ln().div_i64(2), z.arg()))
}

/// `G^model(·; λ)` for fixed parameters.
pub struct GModel {
    t: Real,
    scale: Real,
    ray: Real,
    rot: Real,
    first: FoxI,
    second: FoxI,
    prec: usize,
}

impl GModel {
    pub fn new(params: &ParametrixParams, lambda: &Real, ctx: &PrecisionContext) -> Result<Self> {
        let p = ctx.mantissa_bits + 32;
        let th = params.theta.with_prec(p);
        let t = params.shift(&lambda.with_prec(p));
        let fp = FoxIParams::new(th.clone(), t.clone())?;
        let tp1 = &th + &Real::one(p);
        let scale = (Real::pi(p).mul_i64(2) / &tp1).sqrt() * th.pow(&t);
        Ok(GModel {
            scale,
            ray: params.g_ray(p),
            rot: Real::pi(p) / &tp1,
            first: FoxI::new(FoxKind::First, &fp, ctx)?,
            second: FoxI::new(FoxKind::Second, &fp, ctx)?,
            t,
            prec: p,
        })
    }

    pub fn ray(&self) -> &Real {
        &self.ray
    }

    pub fn eval(&mut self, z: &Complex, side: Option<Side>) -> Result<Complex> {
        let p = self.prec;
        let (lr, phi) = log_point(z, p)?;
        let pi = Real::pi(p);
        let v = match classify(&phi, &self.ray, side, true)? {
            Sector::Central => {
                let i2 = self.second.eval_log(&Complex::new(lr, phi))?;
                i2.scale(&(&self.scale / &pi.mul_i64(2)))
            }
            Sector::Upper => {
                // arg((−z) e^{iθπ/(θ+1)}) = φ − π/(θ+1).
                let w = Complex::new(lr, &phi - &self.rot);
                let i1 = self.first.eval_log(&w)?;
                let phase = Complex::cis(&(&self.t * &pi)).mul_i();
                -(&phase * &i1).scale(&self.scale)
            }
            Sector::Lower => {
                let w = Complex::new(lr, &phi + &self.rot);
                let i1 = self.first.eval_log(&w)?;
                let phase = Complex::cis(&-(&self.t * &pi)).mul_i();
                (&phase * &i1).scale(&self.scale)
            }
        };
        Ok(v)
    }
}

/// `H^model(·; β)` for fixed parameters.
pub struct HModel {
    t: Real,
    scale: Real,
    ray: Real,
    rot: Real,
    third: FoxI,
    second: FoxI,
    prec: usize,
}

impl HModel {
    pub fn new(params: &ParametrixParams, beta: &Real, ctx: &PrecisionContext) -> Result<Self> {
        let p = ctx.mantissa_bits + 32;
        let th = params.theta.with_prec(p);
        let t = params.shift(&beta.with_prec(p));
        let fp = FoxIParams::new(th.clone(), -&t)?;
        let tp1 = &th + &Real::one(p);
        let scale = (Real::pi(p).mul_i64(2) / &tp1).sqrt() * th.pow(&-&t);
        Ok(HModel {
            scale,
            ray: params.h_ray(p),
            rot: Real::pi(p) / &tp1,
            third: FoxI::new(FoxKind::Third, &fp, ctx)?,
            second: FoxI::new(FoxKind::Second, &fp, ctx)?,
            t,
            prec: p,
        })
    }

    pub fn ray(&self) -> &Real {
        &self.ray
    }

    pub fn eval(&mut self, z: &Complex, side: Option<Side>) -> Result<Complex> {
        let p = self.prec;
        let (lr, phi) = log_point(z, p)?;
        let pi = Real::pi(p);
        let v = match classify(&phi, &self.ray, side, false)? {
            Sector::Central => {
                // Principal arg of −z.
                let psi = if phi.is_positive() {
                    &phi - &pi
                } else {
                    &phi + &pi
                };
                let i2 = self.second.eval_log(&Complex::new(lr, psi))?;
                i2.scale(&(&self.scale / &pi.mul_i64(2)))
            }
            Sector::Upper => {
                let w = Complex::new(lr, &phi - &self.rot);
                let i3 = self.third.eval_log(&w)?;
                (&Complex::cis(&-(&self.t * &pi)) * &i3).scale(&self.scale)
            }
            Sector::Lower => {
                let w = Complex::new(lr, &phi + &self.rot);
                let i3 = self.third.eval_log(&w)?;
                (&Complex::cis(&(&self.t * &pi)) * &i3).scale(&self.scale)
            }
        };
        Ok(v)
    }
}

/// The two ladder pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `G^{(ℓ)}` against `H^{(ℓ)}`.
    Plain,
    /// `G̃^{(ℓ)}` against `H̃^{(ℓ)}`.
    Tilde,
}

enum Base {
    G(GModel),
    H(HModel),
}

/// A ladder member `F(z; r(ℓ)) z^ℓ`.
pub struct Ladder {
    ell: i64,
    base: Base,
}

impl Ladder {
    /// `G^{(ℓ)}` (plain) or `G̃^{(ℓ)}` (tilde): the functions being expanded.
    pub fn primal(
        family: Family,
        params: &ParametrixParams,
        ell: i64,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let idx = index_for(ell, &params.theta.with_prec(ctx.mantissa_bits + 32));
        let base = match family {
            Family::Plain => Base::G(GModel::new(params, &idx.r_lambda, ctx)?),
            Family::Tilde => Base::H(HModel::new(params, &idx.r_tilde_beta, ctx)?),
        };
        Ok(Ladder { ell, base })
    }

    /// `H^{(ℓ)}` (plain) or `H̃^{(ℓ)}` (tilde): the functionals.
    pub fn dual(
        family: Family,
        params: &ParametrixParams,
        ell: i64,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let idx = index_for(ell, &params.theta.with_prec(ctx.mantissa_bits + 32));
        let base = match family {
            Family::Plain => Base::H(HModel::new(params, &idx.r_beta, ctx)?),
            Family::Tilde => Base::G(GModel::new(params, &idx.r_tilde_lambda, ctx)?),
        };
        Ok(Ladder { ell, base })
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    /// Upper ray angle; the lower ray is its negative.
    pub fn ray(&self) -> &Real {
        match &self.base {
            Base::G(g) => g.ray(),
            Base::H(h) => h.ray(),
        }
    }

    /// Value of the model function alone, without `z^ℓ`.
    pub fn eval_model(&mut self, z: &Complex, side: Option<Side>) -> Result<Complex> {
        match &mut self.base {
            Base::G(g) => g.eval(z, side),
            Base::H(h) => h.eval(z, side),
        }
    }

    pub fn eval(&mut self, z: &Complex, side: Option<Side>) -> Result<Complex> {
        let m = self.eval_model(z, side)?;
        Ok(&m * &z.with_prec(m.prec()).powi(self.ell))
    }
}

/// Sorted break angles in `[−π, π)`, with near-duplicates merged.
fn break_angles(rays: &[Real], prec: usize) -> Vec<Real> {
    let mut all: Vec<Real> = Vec::new();
    for r in rays {
        let r = r.with_prec(prec);
        all.push(-&r);
        all.push(r);
    }
    all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut out: Vec<Real> = Vec::new();
    for r in all {
        if out
            .last()
            .map_or(true, |l| (&r - l).log2_abs() > -((prec as f64) / 2.0))
        {
            out.push(r);
        }
    }
    out
}

/// `(1/2πi) ∮_{|z|=R} dual(z) f(z) dz/z`, splitting the circle at every ray of `dual`
/// and at the extra break angles `f_rays` (given as upper angles; their negatives are added).
pub fn inner_product<F>(
    mut f: F,
    f_rays: &[Real],
    dual: &mut Ladder,
    radius: &Real,
    ctx: &PrecisionContext,
) -> Result<Complex>
where
    F: FnMut(&Complex) -> Result<Complex>,
{
    let p = ctx.mantissa_bits;
    let mut rays: Vec<Real> = f_rays.to_vec();
    rays.push(dual.ray().clone());
    let breaks = break_angles(&rays, p);
    quad_circle_arcs(
        |z| Ok(&dual.eval(z, None)? * &f(z)?),
        &radius.with_prec(p),
        &breaks,
        ctx,
    )
}

/// Matrix `⟨primal_j, dual_{−k}⟩` for `j, k ∈ 0..=jmax` on the circle `|z| = R`.
///
/// All ladder members are evaluated once per node; Gauss–Legendre order doubles per arc
/// until every entry agrees with the previous order to `rel_tol` (absolute below 1).
pub fn gram_matrix(
    family: Family,
    params: &ParametrixParams,
    jmax: usize,
    radius: &Real,
    ctx: &PrecisionContext,
) -> Result<Vec<Vec<Complex>>> {
    let p = ctx.mantissa_bits;
    let mut primal = Vec::with_capacity(jmax + 1);
    let mut dual = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        primal.push(Ladder::primal(family, params, j as i64, ctx)?);
        dual.push(Ladder::dual(family, params, -(j as i64), ctx)?);
    }
    let rays = [primal[0].ray().clone(), dual[0].ray().clone()];
    let breaks = break_angles(&rays, p);
    let radius = radius.with_prec(p);
    let two_pi = Real::pi(p).mul_i64(2);
    let n = jmax + 1;
    let mut total = alloc::vec![alloc::vec![Complex::zero(p); n]; n];
    for i in 0..breaks.len() {
        let a = &breaks[i];
        let b = if i + 1 < breaks.len() {
            breaks[i + 1].clone()
        } else {
            &breaks[0] + &two_pi
        };
        let mut order = (ctx.quad_points_circle / 2).max(8);
        let mut prev = arc_matrix(&mut primal, &mut dual, &radius, a, &b, order, p)?;
        loop {
            order *= 2;
            if order > 4096 {
                return Err(NumError::NonConvergence(format!("gram arc order {order}")));
            }
            let next = arc_matrix(&mut primal, &mut dual, &radius, a, &b, order, p)?;
            let settled = prev
                .iter()
                .flatten()
                .zip(next.iter().flatten())
                .all(|(x, y)| {
                    let scale = y.log2_abs().max(0.0);
                    (x - y).log2_abs() <= ctx.tol_bits() + scale
                });
            prev = next;
            if settled {
                break;
            }
        }
        for (row, add) in total.iter_mut().zip(prev.iter()) {
            for (t, v) in row.iter_mut().zip(add.iter()) {
                *t += v;
            }
        }
    }
    Ok(total)
}

fn arc_matrix(
    primal: &mut [Ladder],
    dual: &mut [Ladder],
    radius: &Real,
    a: &Real,
    b: &Real,
    order: usize,
    p: usize,
) -> Result<Vec<Vec<Complex>>> {
    let n = primal.len();
    let mut out = alloc::vec![alloc::vec![Complex::zero(p); n]; n];
    let half = (b - a).div_i64(2);
    let mid = (b + a).div_i64(2);
    let scale = &half / &Real::pi(p).mul_i64(2);
    for (x, w) in gauss_legendre(order, p) {
        let phi = &mid + &(&half * &x);
        let z = Complex::from_polar(radius, &phi);
        let g: Vec<Complex> = primal
            .iter_mut()
            .map(|f| f.eval(&z, None))
            .collect::<Result<_>>()?;
        let h: Vec<Complex> = dual
            .iter_mut()
            .map(|f| f.eval(&z, None))
            .collect::<Result<_>>()?;
        let ws = &w * &scale;
        for (j, gj) in g.iter().enumerate() {
            for (k, hk) in h.iter().enumerate() {
                out[j][k] += (gj * hk).scale(&ws);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: usize = 128;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(BITS).unwrap()
    }

    fn params(theta: f64, alpha: f64, gamma: f64) -> ParametrixParams {
        ParametrixParams::new(
            Real::from_f64(theta, BITS),
            Real::from_f64(alpha, BITS),
            Real::from_f64(gamma, BITS),
        )
        .unwrap()
    }

    fn polar(r: f64, phi: &Real) -> Complex {
        Complex::from_polar(&Real::from_f64(r, BITS), &phi.with_prec(BITS))
    }

    fn log2_rel(a: &Complex, b: &Complex) -> f64 {
        (a - b).log2_abs() - b.log2_abs()
    }

    #[test]
    fn index_at_zero_and_one() {
        let one = Real::one(BITS);
        let i0 = index_for(0, &one);
        assert_eq!((i0.m_ell, i0.n_ell), (1, 0));
        assert_eq!(i0.r_lambda.to_f64(), 1.0);
        assert_eq!(i0.r_beta.to_f64(), 0.0);
        let i1 = index_for(1, &one);
        assert_eq!((i1.m_ell, i1.n_ell), (0, -1));
        assert_eq!(i1.r_lambda.to_f64(), 0.5);
        assert_eq!(i1.r_beta.to_f64(), 0.5);
        // At θ = 2, ℓ = 3 lands exactly on an integer.
        let i3 = index_for(3, &Real::from_i64(2, BITS));
        assert_eq!(i3.m_ell, -1);
        assert_eq!(i3.r_lambda.to_f64(), 1.0);
    }

    #[test]
    fn index_ranges() {
        let th = Real::from_f64(core::f64::consts::SQRT_2, BITS);
        let t = th.to_f64();
        for ell in -12..=12 {
            let ix = index_for(ell, &th);
            let r = ix.r_lambda.to_f64();
            assert!(r > 0.0 && r <= 1.0 + 1e-30);
            let b = ix.r_beta.to_f64();
            assert!(b > -t / (t + 1.0) && b <= 1.0 / (t + 1.0) + 1e-30);
            let rt = ix.r_tilde_lambda.to_f64();
            assert!(rt > 0.0 && rt <= 1.0 + 1e-30);
            let bt = ix.r_tilde_beta.to_f64();
            assert!(bt > -t / (t + 1.0) && bt <= 1.0 / (t + 1.0) + 1e-30);
        }
    }

    #[test]
    fn rejects_wide_gamma() {
        let p = ParametrixParams::new(
            Real::from_i64(2, 64),
            Real::zero(64),
            Real::from_f64(1.6, 64),
        );
        assert!(matches!(p, Err(NumError::InvalidParameter(_))));
    }

    #[test]
    fn on_ray_needs_a_side() {
        let c = ctx();
        let p = params(2.0, 0.3, 0.0);
        let mut g = GModel::new(&p, &Real::one(BITS), &c).unwrap();
        let z = polar(1.5, &p.g_ray(BITS));
        assert!(matches!(g.eval(&z, None), Err(NumError::OnRay(_))));
        assert!(g.eval(&z, Some(Side::Plus)).is_ok());
    }

    #[test]
    fn g_jumps_on_both_rays() {
        let c = ctx();
        let p = params(core::f64::consts::SQRT_2, 0.3, 0.1);
        let lambda = Real::one(BITS);
        let mut g = GModel::new(&p, &lambda, &c).unwrap();
        let th = p.theta().with_prec(BITS);
        let tp1 = &th + &Real::one(BITS);
        let pi = Real::pi(BITS);
        let two_a3 = &p.alpha().mul_i64(2) + &Real::from_i64(3, BITS);
        let turn = pi.mul_i64(2) / &tp1;
        for (sign, r) in [(1i64, 0.7), (-1, 1.9)] {
            let ray = p.g_ray(BITS).mul_i64(sign);
            let z = polar(r, &ray);
            let jump =
                &g.eval(&z, Some(Side::Plus)).unwrap() - &g.eval(&z, Some(Side::Minus)).unwrap();
            let rotated = polar(r, &(&ray - &turn.mul_i64(sign)));
            let phase = &(&two_a3 * &pi) / &tp1 - &(&lambda * &pi).mul_i64(2);
            let want = (&Complex::cis(&phase.mul_i64(-sign)) * &g.eval(&rotated, None).unwrap())
                .scale(&Real::from_i64(-sign, BITS));
            assert!(log2_rel(&jump, &want) < -100.0, "sign {sign}");
        }
    }

    #[test]
    fn h_jumps_on_both_rays() {
        let c = ctx();
        let p = params(core::f64::consts::SQRT_2, 0.3, 0.1);
        let beta = Real::from_f64(0.2, BITS);
        let mut h = HModel::new(&p, &beta, &c).unwrap();
        let th = p.theta().with_prec(BITS);
        let tp1 = &th + &Real::one(BITS);
        let pi = Real::pi(BITS);
        let two_a3 = &p.alpha().mul_i64(2) + &Real::from_i64(3, BITS);
        let turn = pi.mul_i64(2) / &tp1;
        for (sign, r) in [(1i64, 0.8), (-1, 2.3)] {
            let ray = p.h_ray(BITS).mul_i64(sign);
            let z = polar(r, &ray);
            let jump =
                &h.eval(&z, Some(Side::Plus)).unwrap() - &h.eval(&z, Some(Side::Minus)).unwrap();
            let rotated = polar(r, &(&ray - &turn.mul_i64(sign)));
            let phase = &(&two_a3 * &pi) / &tp1 - &(&beta * &pi).mul_i64(2);
            let want = (&Complex::cis(&phase.mul_i64(sign)) * &h.eval(&rotated, None).unwrap())
                .scale(&Real::from_i64(-sign, BITS));
            assert!(log2_rel(&jump, &want) < -100.0, "sign {sign}");
        }
    }

    #[test]
    fn continuous_across_the_real_axes() {
        let c = ctx();
        let p = params(2.0, -0.4, 0.0);
        let eps = Real::from_f64(1e-25, BITS);
        let pi = Real::pi(BITS);
        let mut g = GModel::new(&p, &Real::from_f64(0.4, BITS), &c).unwrap();
        let mut h = HModel::new(&p, &Real::from_f64(-0.3, BITS), &c).unwrap();
        for phi in [&pi - &eps, &eps - &pi] {
            let a = g.eval(&polar(1.3, &phi), None).unwrap();
            let b = g.eval(&polar(1.3, &-&phi), None).unwrap();
            assert!(log2_rel(&a, &b) < -70.0);
        }
        let a = h.eval(&polar(0.9, &eps), None).unwrap();
        let b = h.eval(&polar(0.9, &-&eps), None).unwrap();
        assert!(log2_rel(&a, &b) < -70.0);
        // Real on the axes where a single formula applies.
        let gx = g.eval(&polar(1.3, &Real::zero(BITS)), None).unwrap();
        assert!(gx.im.log2_abs() < gx.re.log2_abs() - 100.0);
    }

    #[test]
    fn exponential_normalisation() {
        let c = ctx();
        let p = params(2.0, 0.3, 0.0);
        let phi = Real::from_f64(0.3, BITS);
        let z = polar(50.0, &phi);
        for ell in [0i64, 1, 4] {
            let ix = index_for(ell, p.theta());
            let mut g = GModel::new(&p, &ix.r_lambda, &c).unwrap();
            let mut h = HModel::new(&p, &ix.r_beta, &c).unwrap();
            let ge = &g.eval(&z, None).unwrap() * &z.exp();
            let he = &h.eval(&z, None).unwrap() * &(-&z).exp();
            let one = Complex::one(BITS);
            assert!(
                libm::exp2((&ge - &one).log2_abs()) < 10.0 / 50.0,
                "G ℓ={ell}"
            );
            assert!(
                libm::exp2((&he - &one).log2_abs()) < 10.0 / 50.0,
                "H ℓ={ell}"
            );
        }
    }

    #[test]
    fn small_z_exponent() {
        // T(1) ≈ 0.254 exceeds 1/(2(1+θ)), so the first residue family dominates.
        let c = ctx();
        let p = params(core::f64::consts::SQRT_2, 0.3, 0.0);
        let lambda = Real::one(BITS);
        let mut g = GModel::new(&p, &lambda, &c).unwrap();
        let t = p.shift(&lambda).to_f64();
        let th = p.theta().to_f64();
        let want = (1.0 + 1.0 / th) * (0.5 - t);
        let phi = Real::from_f64(0.2, BITS);
        let (r0, r1) = (1e-14, 1e-12);
        let g0 = g.eval(&polar(r0, &phi), None).unwrap().log2_abs();
        let g1 = g.eval(&polar(r1, &phi), None).unwrap().log2_abs();
        let slope = (g1 - g0) / libm::log2(r1 / r0);
        assert!((slope / want - 1.0).abs() < 0.05, "slope {slope} vs {want}");
    }

    #[test]
    fn circle_bound_is_uniform_in_ell() {
        let c = ctx();
        let p = params(2.0, 0.3, 0.0);
        let r = 2.0;
        let mut ratios = Vec::new();
        for ell in -4..=8 {
            let mut g = Ladder::primal(Family::Plain, &p, ell, &c).unwrap();
            let mut peak = f64::NEG_INFINITY;
            for i in 0..48 {
                let phi = Real::from_f64(-3.1 + 6.2 * (i as f64 + 0.5) / 48.0, BITS);
                match g.eval(&polar(r, &phi), None) {
                    Ok(v) => peak = peak.max(v.log2_abs()),
                    Err(NumError::OnRay(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
            ratios.push(peak - ell as f64 * libm::log2(r));
        }
        let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        // One constant C_r covers every ℓ; the spread reflects only the fractional parameter.
        assert!(hi - lo < 6.0, "log2 ratios {ratios:?}");
    }

    fn assert_identity(m: &[Vec<Complex>], tol_log2: f64) {
        for (j, row) in m.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let want = if j == k {
                    Complex::one(BITS)
                } else {
                    Complex::zero(BITS)
                };
                assert!(
                    (v - &want).log2_abs() < tol_log2,
                    "entry ({j},{k}) = {:?}",
                    v.to_f64()
                );
            }
        }
    }

    #[test]
    fn biorthogonal_plain_and_tilde() {
        let c = PrecisionContext::with_tol(BITS, 1e-20).unwrap();
        let p = params(core::f64::consts::SQRT_2, 0.3, 0.0);
        let r = Real::one(BITS);
        assert_identity(&gram_matrix(Family::Plain, &p, 2, &r, &c).unwrap(), -55.0);
        assert_identity(&gram_matrix(Family::Tilde, &p, 2, &r, &c).unwrap(), -55.0);
    }

    #[test]
    fn biorthogonal_with_opened_rays_and_other_radius() {
        let c = PrecisionContext::with_tol(BITS, 1e-20).unwrap();
        let p = params(0.5, -0.2, 0.05);
        assert_identity(
            &gram_matrix(Family::Plain, &p, 1, &Real::from_f64(2.5, BITS), &c).unwrap(),
            -55.0,
        );
    }

    #[test]
    fn inner_product_matches_gram_entry() {
        let c = PrecisionContext::with_tol(BITS, 1e-20).unwrap();
        let p = params(1.0, 0.0, 0.0);
        let mut gl = Ladder::primal(Family::Plain, &p, 1, &c).unwrap();
        let mut hl = Ladder::dual(Family::Plain, &p, -1, &c).unwrap();
        let rays = [gl.ray().clone()];
        let v = inner_product(|z| gl.eval(z, None), &rays, &mut hl, &Real::one(BITS), &c).unwrap();
        assert!((&v - &Complex::one(BITS)).log2_abs() < -55.0);
    }
}
