use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::halfline::{integrate_real, HalfLinePlan};
use crate::complex::Complex;
use crate::context::PrecisionContext;
use crate::equilibrium::Potential;
use crate::error::{NumError, Result};
use crate::real::Real;

/// Extra bits carried on top of the precision policy.
const GUARD: usize = 32;

/// Weight `x^α e^{−nV(x)}` and the exponent `θ` of the second variable.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleParams {
    potential: Potential,
    theta: Real,
    alpha: Real,
    n: u32,
}

impl EnsembleParams {
    pub fn new(potential: Potential, theta: Real, alpha: Real, n: u32) -> Result<Self> {
        if !theta.is_positive() {
            return Err(NumError::InvalidParameter(format!(
                "theta must be positive, got {theta}"
            )));
        }
        if !(alpha.to_f64() > -1.0) {
            return Err(NumError::InvalidParameter(format!(
                "alpha must exceed -1, got {alpha}"
            )));
        }
        if n == 0 {
            return Err(NumError::InvalidParameter("n must be at least 1".into()));
        }
        Ok(EnsembleParams {
            potential: potential.validated()?,
            theta,
            alpha,
            n,
        })
    }

    pub fn from_f64(
        potential: Potential,
        theta: f64,
        alpha: f64,
        n: u32,
        prec: usize,
    ) -> Result<Self> {
        Self::new(
            potential,
            Real::from_f64(theta, prec),
            Real::from_f64(alpha, prec),
            n,
        )
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn theta(&self) -> &Real {
        &self.theta
    }

    pub fn alpha(&self) -> &Real {
        &self.alpha
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `x^α e^{−nV(x)}` for `x > 0`.
    pub fn weight(&self, x: &Real) -> Real {
        let p = x.prec();
        let nv = self.potential.value_real(x).mul_i64(self.n as i64);
        (&(&self.alpha.with_prec(p) * &x.ln()) - &nv).exp()
    }

    /// Principal `z^α e^{−nV(z)}`.
    pub fn weight_complex(&self, z: &Complex) -> Complex {
        let p = z.prec();
        let nv = self
            .potential
            .value_at(z)
            .scale(&Real::from_i64(self.n as i64, p));
        let mut e = z.ln().scale(&self.alpha.with_prec(p));
        e -= &nv;
        e.exp()
    }

    /// Length on which `n(V(x) − V(0))` reaches 1.
    pub(crate) fn decay_scale(&self) -> f64 {
        let n = self.n as f64;
        let v0 = self.potential.value(0.0);
        let g = |x: f64| n * (self.potential.value(x) - v0) - 1.0;
        let (mut lo, mut hi) = (1e-12f64, 1e12f64);
        if !(g(lo) < 0.0 && g(hi) > 0.0) {
            return 1.0;
        }
        for _ in 0..200 {
            let mid = libm::sqrt(lo * hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        libm::sqrt(lo * hi)
    }

    /// Double-precision `ln(x^s e^{−nV(x)})`.
    pub(crate) fn log_envelope(&self, s: f64, x: f64) -> f64 {
        s * libm::log(x) - self.n as f64 * self.potential.value(x)
    }
}

/// `∫_0^∞ x^{j+θk} x^α e^{−nV(x)} dx` to the context tolerance.
pub fn mixed_moment(
    j: usize,
    k: usize,
    params: &EnsembleParams,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let p = ctx.prec();
    let s = Real::from_i64(j as i64, p)
        + &params.theta.with_prec(p).mul_i64(k as i64)
        + &params.alpha.with_prec(p);
    let sf = s.to_f64();
    let plan = HalfLinePlan::new(|x| params.log_envelope(sf, x), params.decay_scale(), sf, p)?;
    let nr = Real::from_i64(params.n as i64, p);
    integrate_real(&plan, p, ctx.tol_bits(), |x| {
        Ok((&(&s * &x.ln()) - &(&nr * &params.potential.value_real(x))).exp())
    })
}

/// Full moment matrix `M_{jk}`, `j, k < dim`, from one shared node set.
fn moment_matrix(params: &EnsembleParams, dim: usize, prec: usize) -> Result<Vec<Vec<Real>>> {
    let theta = params.theta.to_f64();
    let alpha = params.alpha.to_f64();
    let top = (dim - 1) as f64 * (1.0 + theta) + alpha;
    // The envelope of the largest exponent bounds the decay; the smallest fixes the edge.
    let plan = HalfLinePlan::new(
        |x| {
            params
                .log_envelope(top, x)
                .max(params.log_envelope(alpha, x))
        },
        params.decay_scale(),
        alpha,
        prec,
    )?;
    let th = params.theta.with_prec(prec);
    let mut raw = vec![vec![Real::zero(prec); dim]; dim];
    let mut prev: Option<Vec<Vec<Real>>> = None;
    for level in 0..=14u32 {
        for (x, w) in plan.nodes(level, prec) {
            let base = params.weight(&x) * w;
            let t = (&th * &x.ln()).exp();
            let mut row = base;
            for line in raw.iter_mut() {
                let mut cell = row.clone();
                for entry in line.iter_mut() {
                    *entry += &cell;
                    cell = &cell * &t;
                }
                row = &row * &x;
            }
        }
        let step = Real::from_f64(libm::exp2(-(level as f64)), prec);
        let est: Vec<Vec<Real>> = raw
            .iter()
            .map(|r| r.iter().map(|v| v * &step).collect())
            .collect();
        if level >= 3 {
            if let Some(p) = &prev {
                // every integrand is positive, so entrywise relative agreement is meaningful
                let settled = est.iter().flatten().zip(p.iter().flatten()).all(|(a, b)| {
                    let d = (a - b).abs();
                    d.is_zero() || d.log2_abs() <= a.log2_abs() - prec as f64 + 24.0
                });
                if settled {
                    return Ok(est);
                }
            }
        }
        prev = Some(est);
    }
    Err(NumError::NonConvergence("moment matrix quadrature".into()))
}

/// Monic `p_j`, `q_k` and the norms `κ_j`, at a precision at least `24·N` bits.
#[derive(Clone, Debug)]
pub struct BiorthogonalSystem {
    params: EnsembleParams,
    prec: usize,
    /// Row `j` holds `p_j` by ascending power of `x`.
    p_coeffs: Vec<Vec<Real>>,
    /// Row `k` holds `q_k` by ascending power of `t = x^θ`.
    q_coeffs: Vec<Vec<Real>>,
    kappas: Vec<Real>,
    moments: Vec<Vec<Real>>,
    loss_bits: f64,
}

/// Builds the system up to degree `degree` from the moment matrix.
pub fn build_system(
    params: &EnsembleParams,
    degree: usize,
    ctx: &PrecisionContext,
) -> Result<BiorthogonalSystem> {
    let prec = ctx.mantissa_bits.max(24 * degree) + GUARD;
    let moments = moment_matrix(params, degree + 1, prec)?;
    BiorthogonalSystem::factor(params.clone(), moments, prec)
}

/// `K_n(x, y) = x^α e^{−nV(x)} Σ_{j<n} p_j(x) q_j(y^θ) / κ_j`.
pub fn kernel_n(sys: &BiorthogonalSystem, x: &Real, y: &Real) -> Result<Real> {
    sys.kernel(x, y)
}

impl BiorthogonalSystem {
    /// LDU without pivoting: `P M Qᵀ = diag(κ)` with `P`, `Q` unit lower triangular.
    pub(crate) fn factor(
        params: EnsembleParams,
        moments: Vec<Vec<Real>>,
        prec: usize,
    ) -> Result<Self> {
        let dim = moments.len();
        let mut a: Vec<Vec<Real>> = moments
            .iter()
            .map(|r| r.iter().map(|v| v.with_prec(prec)).collect())
            .collect();
        let mut p: Vec<Vec<Real>> = (0..dim).map(|i| unit_row(i, dim, prec)).collect();
        let mut loss_bits: f64 = 0.0;
        for j in 0..dim {
            let pivot = a[j][j].clone();
            let loss = a[j][j].log2_abs() - moments[j][j].log2_abs();
            loss_bits = loss_bits.max(-loss);
            if !pivot.is_positive() || -loss > prec as f64 - 16.0 {
                return Err(NumError::SingularMoment { degree: j });
            }
            for i in j + 1..dim {
                let f = &a[i][j] / &pivot;
                for c in j..dim {
                    let d = &f * &a[j][c];
                    a[i][c] -= d;
                }
                for c in 0..=j {
                    let d = &f * &p[j][c];
                    p[i][c] -= d;
                }
            }
        }
        let kappas: Vec<Real> = (0..dim).map(|j| a[j][j].clone()).collect();
        // U = D⁻¹ A is unit upper triangular; column k of U⁻¹ holds q_k.
        let mut x: Vec<Vec<Real>> = (0..dim).map(|i| unit_row(i, dim, prec)).collect();
        for k in 0..dim {
            for i in (0..k).rev() {
                let mut s = Real::zero(prec);
                for m in i + 1..=k {
                    s += &(&a[i][m] / &kappas[i]) * &x[m][k];
                }
                x[i][k] = -s;
            }
        }
        let q: Vec<Vec<Real>> = (0..dim)
            .map(|k| (0..=k).map(|i| x[i][k].clone()).collect())
            .collect();
        let p: Vec<Vec<Real>> = p
            .into_iter()
            .enumerate()
            .map(|(j, row)| row.into_iter().take(j + 1).collect())
            .collect();
        Ok(BiorthogonalSystem {
            params,
            prec,
            p_coeffs: p,
            q_coeffs: q,
            kappas,
            moments,
            loss_bits,
        })
    }

    /// Reassembles a stored system; coefficient rows must be monic and triangular.
    pub fn from_parts(
        params: EnsembleParams,
        prec: usize,
        p_coeffs: Vec<Vec<Real>>,
        q_coeffs: Vec<Vec<Real>>,
        kappas: Vec<Real>,
        moments: Vec<Vec<Real>>,
    ) -> Result<Self> {
        let dim = kappas.len();
        let shaped = |rows: &Vec<Vec<Real>>| {
            rows.len() == dim
                && rows
                    .iter()
                    .enumerate()
                    .all(|(j, r)| r.len() == j + 1 && r[j] == Real::one(prec))
        };
        if dim == 0
            || !shaped(&p_coeffs)
            || !shaped(&q_coeffs)
            || moments.len() != dim
            || moments.iter().any(|r| r.len() != dim)
        {
            return Err(NumError::InvalidParameter(
                "stored system is not monic and triangular".into(),
            ));
        }
        if kappas.iter().any(|k| !k.is_positive()) {
            return Err(NumError::InvalidParameter(
                "stored κ must be positive".into(),
            ));
        }
        Ok(BiorthogonalSystem {
            params,
            prec,
            p_coeffs,
            q_coeffs,
            kappas,
            moments,
            loss_bits: 0.0,
        })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Highest available index `N`.
    pub fn degree(&self) -> usize {
        self.kappas.len() - 1
    }

    pub fn p_coeffs(&self) -> &[Vec<Real>] {
        &self.p_coeffs
    }

    pub fn q_coeffs(&self) -> &[Vec<Real>] {
        &self.q_coeffs
    }

    pub fn kappas(&self) -> &[Real] {
        &self.kappas
    }

    pub fn moments(&self) -> &[Vec<Real>] {
        &self.moments
    }

    /// Bits lost to cancellation in the factorization.
    pub fn loss_bits(&self) -> f64 {
        self.loss_bits
    }

    /// Whether the pivots lost more than half the working precision.
    pub fn ill_conditioned(&self) -> bool {
        self.loss_bits > self.prec as f64 / 2.0
    }

    fn index(&self, j: usize) -> Result<usize> {
        if j > self.degree() {
            return Err(NumError::DegreeTooLow {
                have: self.degree(),
                need: j,
            });
        }
        Ok(j)
    }

    pub fn p(&self, j: usize, x: &Real) -> Result<Real> {
        Ok(horner(
            &self.p_coeffs[self.index(j)?],
            &x.with_prec(self.prec),
        ))
    }

    /// `q_k(t)` in its own variable `t`.
    pub fn q(&self, k: usize, t: &Real) -> Result<Real> {
        Ok(horner(
            &self.q_coeffs[self.index(k)?],
            &t.with_prec(self.prec),
        ))
    }

    /// `q_k(x^θ)` for `x > 0`.
    pub fn q_at(&self, k: usize, x: &Real) -> Result<Real> {
        let x = x.with_prec(self.prec);
        let t = if x.is_zero() {
            x.clone()
        } else {
            (&self.params.theta.with_prec(self.prec) * &x.ln()).exp()
        };
        self.q(k, &t)
    }

    pub fn p_complex(&self, j: usize, z: &Complex) -> Result<Complex> {
        Ok(horner_complex(
            &self.p_coeffs[self.index(j)?],
            &z.with_prec(self.prec),
        ))
    }

    pub fn q_complex(&self, k: usize, t: &Complex) -> Result<Complex> {
        Ok(horner_complex(
            &self.q_coeffs[self.index(k)?],
            &t.with_prec(self.prec),
        ))
    }

    /// `P M Qᵀ − diag(κ)`.
    pub fn residual_matrix(&self) -> Vec<Vec<Real>> {
        let dim = self.kappas.len();
        let pm: Vec<Vec<Real>> = (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|c| {
                        self.p_coeffs[j]
                            .iter()
                            .enumerate()
                            .fold(Real::zero(self.prec), |s, (i, pji)| {
                                s + pji * &self.moments[i][c]
                            })
                    })
                    .collect()
            })
            .collect();
        (0..dim)
            .map(|j| {
                (0..dim)
                    .map(|k| {
                        let v = self.q_coeffs[k]
                            .iter()
                            .enumerate()
                            .fold(Real::zero(self.prec), |s, (i, qki)| s + &pm[j][i] * qki);
                        if j == k {
                            v - &self.kappas[j]
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn kappa_max(&self) -> Real {
        self.kappas
            .iter()
            .cloned()
            .fold(Real::zero(self.prec), Real::max)
    }

    /// Largest off-diagonal `|∫ p_j q_k w|`, relative to `max κ`.
    pub fn max_offdiag_residual(&self) -> Real {
        let r = self.residual_matrix();
        let mut worst = Real::zero(self.prec);
        for (j, row) in r.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if j != k {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst / self.kappa_max()
    }

    /// `∫ p_j(x) q_k(x^θ) x^α e^{−nV} dx` by quadrature of the polynomials themselves.
    pub fn inner_product(&self, j: usize, k: usize) -> Result<Real> {
        let (pj, qk) = (
            &self.p_coeffs[self.index(j)?],
            &self.q_coeffs[self.index(k)?],
        );
        let theta = self.params.theta.to_f64();
        let alpha = self.params.alpha.to_f64();
        let abs_poly = |c: &[Real], t: f64| {
            c.iter()
                .rev()
                .fold(0.0, |acc, v| acc * t + libm::fabs(v.to_f64()))
        };
        let plan = HalfLinePlan::new(
            |x| {
                libm::log(abs_poly(pj, x) * abs_poly(qk, libm::pow(x, theta)))
                    + self.params.log_envelope(alpha, x)
            },
            self.params.decay_scale(),
            alpha,
            self.prec,
        )?;
        integrate_real(&plan, self.prec, -(self.prec as f64) + 32.0, |x| {
            Ok(self.p(j, x)? * self.q_at(k, x)? * self.params.weight(x))
        })
    }

    /// `K_n` with `n` from the weight.
    pub fn kernel(&self, x: &Real, y: &Real) -> Result<Real> {
        let n = self.params.n as usize;
        self.index(n - 1)?;
        if !x.is_positive() || !y.is_positive() {
            return Err(NumError::Domain(format!(
                "kernel needs x, y > 0, got ({x}, {y})"
            )));
        }
        let (x, y) = (x.with_prec(self.prec), y.with_prec(self.prec));
        let mut s = Real::zero(self.prec);
        for j in 0..n {
            s += self.p(j, &x)? * self.q_at(j, &y)? / &self.kappas[j];
        }
        Ok(s * self.params.weight(&x))
    }
}

fn unit_row(i: usize, dim: usize, prec: usize) -> Vec<Real> {
    (0..dim)
        .map(|c| {
            if c == i {
                Real::one(prec)
            } else {
                Real::zero(prec)
            }
        })
        .collect()
}

fn horner(c: &[Real], x: &Real) -> Real {
    c.iter()
        .rev()
        .fold(Real::zero(x.prec()), |acc, v| acc * x + v)
}

fn horner_complex(c: &[Real], z: &Complex) -> Complex {
    c.iter().rev().fold(Complex::zero(z.prec()), |acc, v| {
        let mut next = &acc * z;
        next.re += v;
        next
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    fn linear(theta: f64, alpha: f64, n: u32) -> EnsembleParams {
        EnsembleParams::from_f64(Potential::Linear, theta, alpha, n, 256).unwrap()
    }

    fn rel(a: &Real, b: &Real) -> f64 {
        ((a - b) / b).log2_abs()
    }

    #[test]
    fn moments_against_gamma() {
        let ctx = PrecisionContext::with_tol(192, 1e-50).unwrap();
        for &(theta, alpha, n, j, k) in &[
            (1.0, 0.0, 1, 0, 0),
            (1.0, 0.5, 3, 2, 5),
            (2.0, -0.4, 4, 3, 3),
            (0.7, 1.3, 9, 6, 1),
        ] {
            let got = mixed_moment(j, k, &linear(theta, alpha, n), &ctx).unwrap();
            let s1 = Real::from_f64(theta, 192).mul_i64(k as i64)
                + Real::from_f64(alpha, 192)
                + Real::from_i64(j as i64 + 1, 192);
            let nr = Real::from_i64(n as i64, 192);
            let want = gamma(&s1).unwrap() / nr.pow(&s1);
            assert!(
                rel(&got, &want) < -160.0,
                "({theta},{alpha},{n},{j},{k}) {}",
                rel(&got, &want)
            );
        }
    }

    #[test]
    fn shared_nodes_match_single_moments() {
        let params =
            EnsembleParams::from_f64(Potential::Series(vec![0.0, 0.5, 0.25]), 1.5, 0.2, 5, 256)
                .unwrap();
        let m = moment_matrix(&params, 4, 200).unwrap();
        let ctx = PrecisionContext::with_tol(200, 1e-55).unwrap();
        for (j, k) in [(0, 0), (3, 1), (2, 3)] {
            let single = mixed_moment(j, k, &params, &ctx).unwrap();
            assert!(rel(&m[j][k], &single) < -170.0, "({j},{k})");
        }
        // θ-independent symmetry at θ = 1
        let sym = moment_matrix(&linear(1.0, 0.3, 2), 5, 128).unwrap();
        assert!(rel(&sym[1][3], &sym[3][1]) < -100.0);
    }

    #[test]
    fn degree_zero_system() {
        let ctx = PrecisionContext::new(128).unwrap();
        let sys = build_system(&linear(2.0, 0.0, 1), 0, &ctx).unwrap();
        assert_eq!(sys.p_coeffs()[0].len(), 1);
        assert!(rel(&sys.kappas()[0], &Real::one(128)) < -120.0);
    }

    #[test]
    fn laguerre_norms() {
        let ctx = PrecisionContext::new(256).unwrap();
        for &(alpha, n) in &[(0.0, 3u32), (0.7, 8)] {
            let sys = build_system(&linear(1.0, alpha, n), 10, &ctx).unwrap();
            let p = sys.prec();
            let a = Real::from_f64(alpha, p);
            let nr = Real::from_i64(n as i64, p);
            for j in 0..=10i64 {
                let fact = gamma(&Real::from_i64(j + 1, p)).unwrap();
                let want = fact * gamma(&a.add_f64(j as f64 + 1.0)).unwrap()
                    / nr.pow(&a.add_f64(2.0 * j as f64 + 1.0));
                assert!(
                    rel(&sys.kappas()[j as usize], &want) < -150.0,
                    "alpha={alpha} j={j}"
                );
            }
            // at θ = 1 the two families coincide
            for j in 0..=10 {
                for i in 0..=j {
                    assert!(
                        (&sys.p_coeffs()[j][i] - &sys.q_coeffs()[j][i]).log2_abs()
                            < sys.p_coeffs()[j][i].log2_abs() - 150.0
                    );
                }
            }
        }
    }

    #[test]
    fn residual_and_direct_integrals() {
        let ctx = PrecisionContext::new(128).unwrap();
        let sys = build_system(&linear(2.0, 0.0, 3), 3, &ctx).unwrap();
        let bound = libm::log2(10.0) * -(128.0 / 4.0);
        assert!(sys.max_offdiag_residual().log2_abs() < bound);
        for j in 0..=3 {
            for k in 0..=3 {
                let v = sys.inner_product(j, k).unwrap();
                if j == k {
                    assert!(rel(&v, &sys.kappas()[j]) < -100.0);
                } else {
                    assert!((&v / &sys.kappa_max()).log2_abs() < -100.0, "({j},{k})");
                }
            }
        }
    }

    #[test]
    fn kernel_trace_and_first_value() {
        let ctx = PrecisionContext::new(128).unwrap();
        let one = build_system(&linear(1.0, 0.0, 1), 0, &ctx).unwrap();
        let x = Real::from_f64(0.7, 128);
        let k = one.kernel(&x, &Real::from_f64(2.0, 128)).unwrap();
        assert!(rel(&k, &(-&x).exp()) < -110.0);

        let sys = build_system(&linear(1.0, 0.0, 3), 2, &ctx).unwrap();
        let plan =
            HalfLinePlan::new(|x| 4.0 * libm::log(1.0 + x) - 3.0 * x, 1.0 / 3.0, 0.0, 128).unwrap();
        let trace = integrate_real(&plan, sys.prec(), -90.0, |x| sys.kernel(x, x)).unwrap();
        assert!((trace.to_f64() - 3.0).abs() < 1e-8);
        assert!(matches!(
            sys.kernel(&x, &Real::from_f64(-1.0, 128)),
            Err(NumError::Domain(_))
        ));
        let short = build_system(&linear(1.0, 0.0, 3), 1, &ctx).unwrap();
        assert!(matches!(
            short.kernel(&x, &x),
            Err(NumError::DegreeTooLow { .. })
        ));
    }

    #[test]
    fn reproducing_property() {
        let ctx = PrecisionContext::new(128).unwrap();
        let sys = build_system(&linear(2.0, 0.5, 3), 2, &ctx).unwrap();
        let (x, y) = (Real::from_f64(0.5, 128), Real::from_f64(1.2, 128));
        let plan = HalfLinePlan::new(
            |t| 6.0 * libm::log(1.0 + t) + 0.5 * libm::log(t) - 3.0 * t,
            1.0 / 3.0,
            0.5,
            128,
        )
        .unwrap();
        let conv = integrate_real(&plan, sys.prec(), -90.0, |t| {
            Ok(sys.kernel(&x, t)? * sys.kernel(t, &y)?)
        })
        .unwrap();
        let direct = sys.kernel(&x, &y).unwrap();
        assert!((conv - direct).abs().to_f64() < 1e-8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EnsembleParams::from_f64(Potential::Linear, 0.0, 0.0, 1, 64).is_err());
        assert!(EnsembleParams::from_f64(Potential::Linear, 1.0, -1.0, 1, 64).is_err());
        assert!(EnsembleParams::from_f64(Potential::Linear, 1.0, 0.0, 0, 64).is_err());
    }
}
