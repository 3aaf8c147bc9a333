use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::potential::Potential;
use super::quad64::{integrate, integrate_scaled, integrate_vec, solve, Node};
use crate::error::{NumError, Result};

const QUAD_TOL: f64 = 1e-13;

/// Equilibrium measure `ψ(x) dx` on `[0, b]` and the constants derived from it.
///
/// Internally the measure is `h(τ)/√(1−τ) dτ` with `x = b τ^p`, `p = (θ+1)/θ`, and `h`
/// a Chebyshev series in `2τ − 1`. In this variable the hard-edge behaviour
/// `x^{−1/(θ+1)}` is absorbed by the Jacobian and the soft edge is explicit.
#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub potential: Potential,
    pub theta: f64,
    /// Right end of the support.
    pub b: f64,
    /// `lim_{x→0} ψ(x) x^{1/(θ+1)}`.
    pub d1: f64,
    /// `lim_{x→b} ψ(x) (b − x)^{−1/2}`.
    pub d2: f64,
    /// `bθ(1+θ)^{−1−1/θ}`.
    pub c: f64,
    /// `θ^{−1} d1 π / sin(π/(1+θ))`.
    pub rho: f64,
    /// `(θ+1)ρ`.
    pub varrho: f64,
    /// `min(1 + 1/θ, 2)`.
    pub m_theta: f64,
    /// Euler–Lagrange constant `ℓ`.
    pub lagrange_ell: f64,
    /// `Re g₊(0) = ∫ log y dμ(y)`.
    pub g0_re: f64,
    /// `Re g̃₊(0) = θ Re g₊(0)`.
    pub gtilde0_re: f64,
    /// Collocation nodes mapped to `x`, increasing in `(0, b)`.
    pub grid: Vec<f64>,
    /// `ψ` on `grid`.
    pub psi: Vec<f64>,
    coeffs: Vec<f64>,
}

/// `log|a^q − τ^q|` given `δ = |a − τ|` exactly; `a > 0`.
fn log_power_gap(a: f64, tau: f64, delta: f64, q: f64) -> f64 {
    let r = delta / a;
    let rel = if tau < a {
        -libm::expm1(q * libm::log1p(-r))
    } else {
        libm::expm1(q * libm::log1p(r))
    };
    q * libm::log(a) + libm::log(rel)
}

/// `T_k(y)` for `k < out.len()`.
fn chebyshev_values(y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = y;
    }
    for k in 2..out.len() {
        out[k] = 2.0 * y * out[k - 1] - out[k - 2];
    }
}

fn clenshaw(coeffs: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * y * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    y * b1 - b2 + coeffs.first().copied().unwrap_or(0.0)
}

/// Chebyshev nodes of the first kind mapped to `(0, 1)`, increasing.
fn collocation_nodes(k: usize) -> Vec<f64> {
    (0..k)
        .rev()
        .map(|i| 0.5 * (1.0 + libm::cos((2 * i + 1) as f64 * PI / (2 * k) as f64)))
        .collect()
}

/// `b`-independent part of the collocation system.
struct Collocation {
    p: f64,
    nodes: Vec<f64>,
    /// `(k+1) × (k+1)` row-major: `Σ A a − ℓ' = V`, then the mass row.
    matrix: Vec<f64>,
}

impl Collocation {
    fn new(theta: f64, k: usize) -> Result<Self> {
        let p = (theta + 1.0) / theta;
        let q2 = theta + 1.0;
        let nodes = collocation_nodes(k);
        let n = k + 1;
        let mut matrix = vec![0.0; n * n];
        let mut tk = vec![0.0; k];
        for (i, &a) in nodes.iter().enumerate() {
            let mut row = integrate_vec(0.0, a, k, QUAD_TOL, |nd, out| {
                let kern = log_power_gap(a, nd.x, nd.to_b, p) + log_power_gap(a, nd.x, nd.to_b, q2);
                let s = kern / libm::sqrt(1.0 - nd.x);
                chebyshev_values(2.0 * nd.x - 1.0, &mut tk);
                out.iter_mut().zip(tk.iter()).for_each(|(o, t)| *o = s * t);
            })?;
            let upper = integrate_vec(a, 1.0, k, QUAD_TOL, |nd, out| {
                let kern =
                    log_power_gap(a, nd.x, nd.from_a, p) + log_power_gap(a, nd.x, nd.from_a, q2);
                let s = kern / libm::sqrt(nd.to_b);
                chebyshev_values(2.0 * nd.x - 1.0, &mut tk);
                out.iter_mut().zip(tk.iter()).for_each(|(o, t)| *o = s * t);
            })?;
            row.iter_mut().zip(upper.iter()).for_each(|(r, u)| *r += u);
            matrix[i * n..i * n + k].copy_from_slice(&row);
            matrix[i * n + k] = -1.0;
        }
        let mass = integrate_vec(0.0, 1.0, k, QUAD_TOL, |nd, out| {
            let s = 1.0 / libm::sqrt(nd.to_b);
            chebyshev_values(2.0 * nd.x - 1.0, &mut tk);
            out.iter_mut().zip(tk.iter()).for_each(|(o, t)| *o = s * t);
        })?;
        matrix[k * n..k * n + k].copy_from_slice(&mass);
        Ok(Collocation { p, nodes, matrix })
    }

    /// Chebyshev coefficients of `h` and `ℓ' = ℓ − (1+θ) log b` for a trial `b`.
    fn solve_for(&self, v: &Potential, b: f64) -> Result<(Vec<f64>, f64)> {
        let k = self.nodes.len();
        let mut rhs: Vec<f64> = self
            .nodes
            .iter()
            .map(|&t| v.value(b * libm::pow(t, self.p)))
            .collect();
        rhs.push(1.0);
        let mut sol = solve(self.matrix.clone(), rhs)?;
        let ell = sol.pop().unwrap_or(0.0);
        debug_assert_eq!(sol.len(), k);
        Ok((sol, ell))
    }

    /// Coefficient of the `(1 − τ)^{−1/2}` edge singularity.
    fn edge_mass(&self, v: &Potential, b: f64) -> Result<f64> {
        Ok(self.solve_for(v, b)?.0.iter().sum())
    }
}

/// Solves the Euler–Lagrange equality by collocation with `grid_size` Chebyshev modes; the
/// support end `b` is the root of the edge-singularity coefficient.
pub fn solve_equilibrium(v: &Potential, theta: f64, grid_size: usize) -> Result<EquilibriumData> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(NumError::InvalidParameter(format!("θ = {theta}")));
    }
    if grid_size < 4 {
        return Err(NumError::InvalidParameter(format!(
            "grid_size = {grid_size} below 4"
        )));
    }
    let v = v.clone().validated()?;
    let col = Collocation::new(theta, grid_size)?;
    let b = find_support_end(&col, &v)?;
    let (coeffs, ell_shift) = col.solve_for(&v, b)?;
    let lagrange_ell = ell_shift + (1.0 + theta) * libm::log(b);
    let eq = EquilibriumData::assemble(v, theta, b, coeffs, lagrange_ell, &col)?;
    eq.check_one_cut()?;
    eq.check_edge_exponent()?;
    Ok(eq)
}

fn find_support_end(col: &Collocation, v: &Potential) -> Result<f64> {
    let f = |b: f64| col.edge_mass(v, b);
    let mut lo = 1.0;
    let mut flo = f(lo)?;
    let mut hi = lo;
    let mut fhi = flo;
    // Too short a support leaves positive mass piled at the edge.
    for _ in 0..200 {
        if flo > 0.0 && fhi < 0.0 {
            break;
        }
        if flo <= 0.0 {
            hi = lo;
            fhi = flo;
            lo *= 0.5;
            flo = f(lo)?;
        } else {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = f(hi)?;
        }
    }
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(NumError::NotOneCut(
            "no sign change of the edge coefficient".into(),
        ));
    }
    // Illinois false position on log b.
    let (mut a, mut fa, mut c, mut fc) = (libm::log(lo), flo, libm::log(hi), fhi);
    let mut side = 0i32;
    for _ in 0..200 {
        let m = (a * fc - c * fa) / (fc - fa);
        let fm = f(libm::exp(m))?;
        if fm == 0.0 || (c - a).abs() < 1e-15 * (1.0 + m.abs()) {
            return Ok(libm::exp(m));
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
            if side == 1 {
                fc *= 0.5;
            }
            side = 1;
        } else {
            c = m;
            fc = fm;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    Ok(libm::exp(0.5 * (a + c)))
}

impl EquilibriumData {
    fn assemble(
        potential: Potential,
        theta: f64,
        b: f64,
        coeffs: Vec<f64>,
        lagrange_ell: f64,
        col: &Collocation,
    ) -> Result<Self> {
        let p = col.p;
        let beta = libm::pow(b, 1.0 / p);
        let h0 = clenshaw(&coeffs, -1.0);
        let d1 = theta / (theta + 1.0) * h0 / beta;
        let dh1 = chebyshev_derivative_at_one(&coeffs);
        let d2 = -dh1 / libm::pow(b * p, 1.5);
        let c = b * theta * libm::pow(1.0 + theta, -1.0 - 1.0 / theta);
        let rho = d1 * PI / (theta * libm::sin(PI / (1.0 + theta)));
        let mut eq = EquilibriumData {
            potential,
            theta,
            b,
            d1,
            d2,
            c,
            rho,
            varrho: (theta + 1.0) * rho,
            m_theta: (1.0 + 1.0 / theta).min(2.0),
            lagrange_ell,
            g0_re: 0.0,
            gtilde0_re: 0.0,
            grid: col.nodes.iter().map(|&t| b * libm::pow(t, p)).collect(),
            psi: Vec::new(),
            coeffs,
        };
        eq.psi = eq.grid.iter().map(|&x| eq.psi_at(x)).collect();
        let log_tau = integrate(0.0, 1.0, QUAD_TOL, |nd| {
            libm::log(nd.from_a) * eq.density(nd)
        })?;
        eq.g0_re = libm::log(b) + p * log_tau;
        eq.gtilde0_re = theta * eq.g0_re;
        Ok(eq)
    }

    fn p(&self) -> f64 {
        (self.theta + 1.0) / self.theta
    }

    /// Density in `τ` at a node of a rule on `[·, 1]`.
    fn density(&self, nd: &Node) -> f64 {
        clenshaw(&self.coeffs, 2.0 * nd.x - 1.0) / libm::sqrt(nd.to_b)
    }

    /// `ψ(x)`; zero outside `(0, b)`.
    pub fn psi_at(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < self.b) {
            return 0.0;
        }
        let p = self.p();
        let tau = libm::pow(x / self.b, 1.0 / p);
        let h = clenshaw(&self.coeffs, 2.0 * tau - 1.0);
        h / libm::sqrt(1.0 - tau) * tau / (p * x)
    }

    /// `∫ψ`, by the same quadrature used for the potentials.
    pub fn mass(&self) -> f64 {
        integrate(0.0, 1.0, QUAD_TOL, |nd| self.density(nd)).unwrap_or(f64::NAN)
    }

    /// `∫ log|x−y| dμ + ∫ log|x^θ−y^θ| dμ − V(x) − ℓ` for real `x > 0`.
    pub fn el_residual(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(NumError::Domain(format!("x = {x}")));
        }
        let p = self.p();
        let q2 = self.theta + 1.0;
        let a = libm::pow(x / self.b, 1.0 / p);
        let kern = |tau: f64, delta: f64| {
            log_power_gap(a, tau, delta, p) + log_power_gap(a, tau, delta, q2)
        };
        let u = if a < 1.0 {
            integrate(0.0, a, QUAD_TOL, |nd| {
                kern(nd.x, nd.to_b) * clenshaw(&self.coeffs, 2.0 * nd.x - 1.0)
                    / libm::sqrt(1.0 - nd.x)
            })? + integrate(a, 1.0, QUAD_TOL, |nd| {
                kern(nd.x, nd.from_a) * self.density(nd)
            })?
        } else {
            integrate(0.0, 1.0, QUAD_TOL, |nd| {
                kern(nd.x, (a - 1.0) + nd.to_b) * self.density(nd)
            })?
        };
        let total = u + (1.0 + self.theta) * libm::log(self.b);
        Ok(total - self.potential.value(x) - self.lagrange_ell)
    }

    /// `∫ Log(z − y) dμ(y)`, analytic off `(−∞, b]`.
    pub fn g(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re <= self.b {
            return Err(NumError::BranchCut(format!("z = {z} on (−∞, b]")));
        }
        self.log_transform(z, |y| z - y)
    }

    /// `∫ Log(z^θ − y^θ) dμ(y)` with the principal `z^θ`.
    pub fn g_tilde(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re >= 0.0 && z.re <= self.b {
            return Err(NumError::BranchCut(format!("z = {z} on [0, b]")));
        }
        // The closed sector is allowed: on its edges `z^θ` lands just off the negative axis on
        // the side of `z`, which selects the matching boundary value.
        let angle = z.arg() * self.theta;
        if angle.abs() > PI * (1.0 + 1e-12) {
            return Err(NumError::BranchCut(format!(
                "θ arg z = {angle} outside [−π, π]"
            )));
        }
        let zt = Complex64::from_polar(libm::pow(z.norm(), self.theta), angle);
        let th = self.theta;
        self.log_transform(z, move |y| zt - libm::pow(y, th))
    }

    /// `g(z) + g̃(z) − V(z) − ℓ`.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.g(z)? + self.g_tilde(z)? - self.potential.value_complex(z) - self.lagrange_ell)
    }

    fn log_transform<F: Fn(f64) -> Complex64>(&self, z: Complex64, arg: F) -> Result<Complex64> {
        let p = self.p();
        let b = self.b;
        let parts = |lo: f64, hi: f64| -> Result<Complex64> {
            // Near the cut the imaginary part of one piece is tiny but the other is O(π).
            let re = integrate_scaled(lo, hi, 1e-13, 1.0, |nd| {
                arg(b * libm::pow(nd.x, p)).ln().re * self.density_any(nd, hi)
            })?;
            let im = integrate_scaled(lo, hi, 1e-13, 1.0, |nd| {
                arg(b * libm::pow(nd.x, p)).ln().im * self.density_any(nd, hi)
            })?;
            Ok(Complex64::new(re, im))
        };
        // Split where the kernel is nearly singular.
        let split = if z.re > 0.0 && z.re < b {
            libm::pow(z.re / b, 1.0 / p)
        } else {
            1.0
        };
        if split > 1e-6 && split < 1.0 - 1e-6 {
            Ok(parts(0.0, split)? + parts(split, 1.0)?)
        } else {
            parts(0.0, 1.0)
        }
    }

    fn density_any(&self, nd: &Node, hi: f64) -> f64 {
        let to_one = if hi >= 1.0 { nd.to_b } else { 1.0 - nd.x };
        clenshaw(&self.coeffs, 2.0 * nd.x - 1.0) / libm::sqrt(to_one)
    }

    /// Least-squares slope of `log ψ` against `log x` over `[lo·b, hi·b]`.
    pub fn edge_slope(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        let pts: Vec<(f64, f64)> = (0..samples)
            .map(|i| {
                let x = self.b * lo * libm::pow(hi / lo, i as f64 / (samples - 1) as f64);
                (libm::log(x), libm::log(self.psi_at(x)))
            })
            .collect();
        slope(&pts)
    }

    /// Same near the soft edge, against `log(b − x)` over `b − x ∈ [lo·b, hi·b]`.
    pub fn soft_edge_slope(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        let pts: Vec<(f64, f64)> = (0..samples)
            .map(|i| {
                let d = self.b * lo * libm::pow(hi / lo, i as f64 / (samples - 1) as f64);
                (libm::log(d), libm::log(self.psi_at(self.b - d)))
            })
            .collect();
        slope(&pts)
    }

    fn check_one_cut(&self) -> Result<()> {
        let samples = 400;
        let vals: Vec<f64> = (1..samples)
            .map(|i| clenshaw(&self.coeffs, 2.0 * (i as f64 / samples as f64) - 1.0))
            .collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        if vals.iter().any(|&h| h < 1e-8 * max) {
            return Err(NumError::NotOneCut(
                "density vanishes inside the support".into(),
            ));
        }
        for i in 1..=10 {
            let x = self.b * (1.0 + 0.2 * i as f64);
            if self.el_residual(x)? >= 0.0 {
                return Err(NumError::NotOneCut(format!(
                    "Euler–Lagrange inequality fails at x = {x}"
                )));
            }
        }
        Ok(())
    }

    fn check_edge_exponent(&self) -> Result<()> {
        let s = self.edge_slope(1e-4, 1e-2, 12);
        let want = -1.0 / (self.theta + 1.0);
        if ((s - want) / want).abs() > 0.1 {
            return Err(NumError::FitFailure(format!(
                "hard-edge slope {s} vs {want}"
            )));
        }
        Ok(())
    }
}

fn chebyshev_derivative_at_one(coeffs: &[f64]) -> f64 {
    // d/dτ T_k(2τ − 1) at τ = 1 is 2k².
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| 2.0 * (k * k) as f64 * c)
        .sum()
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::simplex_equilibrium;

    fn mp() -> EquilibriumData {
        solve_equilibrium(&Potential::Linear, 1.0, 32).unwrap()
    }

    #[test]
    fn marchenko_pastur_oracle() {
        let e = mp();
        assert!((e.b - 4.0).abs() < 1e-10);
        assert!((e.d1 - 1.0 / PI).abs() < 1e-10);
        assert!((e.rho - 1.0).abs() < 1e-10);
        assert!((e.c - 1.0).abs() < 1e-10);
        assert!((e.mass() - 1.0).abs() < 1e-12);
        for x in [0.01, 0.5, 2.0, 3.9] {
            let want = libm::sqrt((4.0 - x) / x) / (2.0 * PI);
            assert!((e.psi_at(x) / want - 1.0).abs() < 1e-10, "ψ({x})");
        }
        assert!((e.lagrange_ell + 2.0).abs() < 1e-10);
        assert!((e.g0_re + 1.0).abs() < 1e-10);
        assert!(e.el_residual(e.b / 2.0).unwrap().abs() < 1e-6);
    }

    #[test]
    fn linear_field_support_end() {
        for theta in [0.5, core::f64::consts::SQRT_2, 2.0, 3.0] {
            let e = solve_equilibrium(&Potential::Linear, theta, 32).unwrap();
            let b = libm::pow(1.0 + theta, 1.0 + 1.0 / theta);
            assert!((e.b / b - 1.0).abs() < 1e-10, "θ = {theta}");
            assert!((e.c / theta - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn euler_lagrange_on_and_off_support() {
        let e = solve_equilibrium(
            &Potential::Series(alloc::vec![0.0, 1.0, 0.3, 0.05]),
            2.0,
            32,
        )
        .unwrap();
        for i in 1..=20 {
            let x = e.b * i as f64 / 21.0;
            assert!(e.el_residual(x).unwrap().abs() <= 1e-6 * e.lagrange_ell.abs());
            assert!(e.el_residual(e.b * (1.0 + 0.1 * i as f64)).unwrap() < 0.0);
        }
    }

    #[test]
    fn edge_exponents() {
        let e = solve_equilibrium(&Potential::Monomial(2), 0.5, 32).unwrap();
        let hard = e.edge_slope(1e-4, 1e-2, 12);
        assert!((hard / (-1.0 / 1.5) - 1.0).abs() < 0.05);
        let soft = e.soft_edge_slope(1e-4, 1e-2, 12);
        assert!((soft / 0.5 - 1.0).abs() < 0.05);
        assert!(e.d2 > 0.0);
    }

    #[test]
    fn refinement_is_stable() {
        let v = Potential::Monomial(2);
        let a = solve_equilibrium(&v, 2.0, 16).unwrap();
        let b = solve_equilibrium(&v, 2.0, 32).unwrap();
        for (x, y) in [(a.b, b.b), (a.d1, b.d1), (a.lagrange_ell, b.lagrange_ell)] {
            assert!((x / y - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn g_functions() {
        let e = solve_equilibrium(&Potential::Linear, 2.0, 32).unwrap();
        let z = Complex64::from_polar(1e4, 0.5);
        assert!((e.g(z).unwrap() - z.ln()).norm() <= 1e-3);
        // Boundary relation of g̃ across the sector edges.
        let x = e.b / 3.0;
        let up = e.g_tilde(Complex64::from_polar(x, PI / 2.0)).unwrap();
        let down = e.g_tilde(Complex64::from_polar(x, -PI / 2.0)).unwrap();
        assert!((down - (up - Complex64::new(0.0, 2.0 * PI))).norm() < 1e-10);
        // Density from the jump of g′ across the cut.
        let (x, h, eps) = (e.b / 2.0, 1e-4, 1e-9);
        let d = |s: f64| {
            let f = |dx: f64| e.g(Complex64::new(x + dx, s * eps)).unwrap();
            (f(h) - f(-h)) / (2.0 * h)
        };
        let psi = -(d(1.0) - d(-1.0)) / Complex64::new(0.0, 2.0 * PI);
        assert!((psi.re - e.psi_at(x)).abs() < 1e-4 && psi.im.abs() < 1e-4);
    }

    #[test]
    fn phi_on_the_support() {
        let e = solve_equilibrium(&Potential::Linear, 2.0, 32).unwrap();
        for x in [0.3, 1.7, 4.1] {
            let eps = 1e-9;
            let phi = e.phi(Complex64::new(x, eps)).unwrap();
            assert!(phi.re.abs() < 1e-6, "Re φ₊({x}) = {}", phi.re);
            let h = 1e-5;
            let dphi = (e.phi(Complex64::new(x + h, eps)).unwrap()
                - e.phi(Complex64::new(x - h, eps)).unwrap())
                / (2.0 * h);
            assert!((-dphi.im / (2.0 * PI * e.psi_at(x)) - 1.0).abs() < 1e-4);
        }
        assert!(e.phi(Complex64::new(e.b * 1.5, 0.0)).unwrap().re < 0.0);
    }

    #[test]
    fn two_wells_are_not_one_cut() {
        // 5(x−1)²(x−3)²
        let v = Potential::Series(alloc::vec![45.0, -120.0, 110.0, -40.0, 5.0]);
        let r = solve_equilibrium(&v, 1.0, 32);
        assert!(
            matches!(
                r,
                Err(NumError::NotOneCut(_)) | Err(NumError::FitFailure(_))
            ),
            "{r:?}"
        );
    }

    #[test]
    fn simplex_cross_check() {
        let e = mp();
        let s = simplex_equilibrium(&Potential::Linear, 1.0, 6.0, 200).unwrap();
        assert!((s.support_end / e.b - 1.0).abs() < 0.01);
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
