use hardedge_core::biorthogonal::{build_system, cauchy_transform_p, EnsembleParams};
use hardedge_core::equilibrium::{solve_equilibrium, Potential};
use hardedge_core::specfun::{wright_bessel, WrightParams};
use hardedge_core::verify::{fit_rate, k_product};
use hardedge_core::{Complex, PrecisionContext, Real};
use proptest::prelude::*;

fn ctx(bits: usize) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

fn rel(a: &Complex, b: &Complex) -> f64 {
    (a - b).log2_abs() - b.log2_abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    /// `b(−x) J_{a+b,b}(x) = J_{a−1,b}(x) + (1−a) J_{a,b}(x)`, a contiguous relation of the
    /// Wright function that the series code never uses.
    #[test]
    fn wright_contiguous_relation(a in 0.2f64..3.0, b in 0.3f64..2.5, re in -3.0f64..3.0, im in -2.0f64..2.0) {
        let p = 128;
        let c = ctx(p);
        let z = Complex::from_f64(re, im, p);
        // Parameters are combined in full precision; f64 sums would dominate the residual.
        let (ar, br, one) = (Real::from_f64(a, p), Real::from_f64(b, p), Real::one(p));
        let eval = |a1: Real| wright_bessel(&WrightParams::new(a1, br.clone()).unwrap(), &z, &c).unwrap();
        let lhs = (-&z).scale(&br) * eval(&ar + &br);
        let rhs = eval(&ar - &one) + eval(ar.clone()).scale(&(&one - &ar));
        let size = eval(ar.clone()).log2_abs().max(eval(&ar - &one).log2_abs()).max(0.0);
        prop_assert!((&lhs - &rhs).log2_abs() < size - 100.0);
    }

    /// `k(x,y) k(x′,y′) = k(x,y′) k(x′,y)` for the rank-one product kernel.
    #[test]
    fn product_kernel_is_rank_one(x in 0.0f64..3.0, y in 0.0f64..3.0, x2 in 0.0f64..3.0, y2 in 0.0f64..3.0,
                                   alpha in -0.8f64..2.0, theta in 0.4f64..3.0) {
        let c = ctx(128);
        let k = |u: f64, v: f64| k_product(u, v, alpha, theta, &c).unwrap();
        let lhs = k(x, y) * k(x2, y2);
        let rhs = k(x, y2) * k(x2, y);
        let scale = lhs.log2_abs().max(rhs.log2_abs());
        prop_assert!((lhs - rhs).log2_abs() < scale - 100.0);
    }

    /// Decimal output read back at the same precision gives the same number.
    #[test]
    fn decimal_round_trip(m in -1.0e6f64..1.0e6, e in -200i64..200, prec in 64usize..600) {
        let x = Real::from_f64(m, prec) * Real::from_i64(3, prec).pow(&Real::from_i64(e, prec)).sqrt();
        prop_assert_eq!(Real::parse(&x.to_decimal_string(), prec).unwrap(), x);
    }

    /// The equilibrium measure has unit mass and its support end grows with θ as expected.
    #[test]
    fn equilibrium_mass(theta in 0.4f64..3.0) {
        let eq = solve_equilibrium(&Potential::Linear, theta, 32).unwrap();
        prop_assert!((eq.mass() - 1.0).abs() < 1e-10);
        prop_assert!(eq.b > 0.0 && eq.rho > 0.0);
        prop_assert!(eq.psi.iter().all(|v| *v > 0.0));
    }

    /// Exact power laws are fitted exactly.
    #[test]
    fn rate_fit_recovers_exponents(rate in -3.0f64..1.0, scale in 0.01f64..100.0) {
        let ns = [6u32, 9, 14, 20, 31];
        let errs: Vec<f64> = ns.iter().map(|&n| scale * (n as f64).powf(rate)).collect();
        prop_assert!((fit_rate(&ns, &errs) - rate).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, failure_persistence: None, ..ProptestConfig::default() })]

    /// Monic, biorthogonal and with positive norms for any admissible ensemble.
    #[test]
    fn systems_are_monic_and_biorthogonal(theta in 0.4f64..3.0, alpha in -0.8f64..2.0, n in 1u32..7, r in 1u32..3) {
        let c = ctx(96);
        let params = EnsembleParams::from_f64(Potential::Monomial(r), theta, alpha, n, 96).unwrap();
        let sys = build_system(&params, n as usize, &c).unwrap();
        let one = Real::one(sys.prec());
        prop_assert!(sys.p_coeffs().iter().chain(sys.q_coeffs()).enumerate().all(|(i, row)| *row.last().unwrap() == one || i > n as usize));
        prop_assert!(sys.kappas().iter().all(Real::is_positive));
        prop_assert!(sys.max_offdiag_residual().log2_abs() < -80.0);
    }

    /// `Cp(z̄) = −conj Cp(z)` off the positive axis.
    #[test]
    fn cauchy_transform_reflection(re in -1.0f64..2.0, im in 0.05f64..1.5) {
        let c = PrecisionContext::with_tol(128, 1e-25).unwrap();
        let params = EnsembleParams::from_f64(Potential::Linear, 1.0, 0.3, 2, 128).unwrap();
        let sys = build_system(&params, 2, &c).unwrap();
        let z = Complex::from_f64(re, im, sys.prec());
        let up = cauchy_transform_p(&sys, &z, None, &c).unwrap();
        let down = cauchy_transform_p(&sys, &z.conj(), None, &c).unwrap();
        prop_assert!(rel(&-&down.conj(), &up) < -70.0);
    }
}
