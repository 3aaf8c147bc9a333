//! Argument parsing and the six subcommands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hardedge_core::biorthogonal::{BiorthogonalSystem, EnsembleParams};
use hardedge_core::equilibrium::{solve_equilibrium, EquilibriumData};
use hardedge_core::parametrix::{gram_matrix, Family, ParametrixParams};
use hardedge_core::specfun::{fox_i, wright_bessel, FoxIParams, FoxKind, WrightParams};
use hardedge_core::verify::{
    default_z_samples, verify_kappa, verify_kernel_limit, verify_pn_asymptotics,
    verify_qn_asymptotics, KernelScaling,
};
use hardedge_core::{Complex, PrecisionContext, Real};
use serde_json::{json, Value};

use crate::cache::SystemCache;
use crate::config::{FamilyChoice, PotentialSpec, RunConfig, Target};
use crate::error::{CliError, CliResult};
use crate::format::{
    constants_json, convergence_json, convergence_table, emit, f64_str, real_str, report_document,
    Table,
};

#[derive(Parser, Debug)]
#[command(
    name = "hardedge",
    version,
    about = "Hard-edge asymptotics of biorthogonal ensembles, checked numerically"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON configuration document; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving <command>.csv and <command>.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for stored biorthogonal systems
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Mantissa bits (default: $MB_PREC_BITS, else 256)
    #[arg(long)]
    prec_bits: Option<usize>,
    /// Target relative tolerance (default: 2^(-bits/2))
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct Ensemble {
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// linear | monomial:R | series:c0,c1,... | inline JSON descriptor
    #[arg(long)]
    potential: Option<PotentialSpec>,
    /// Comma-separated increasing list of n
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u32>>,
    /// Collocation size of the equilibrium solver
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a Wright–Bessel or Fox-type function at one point
    Specfun {
        #[command(flatten)]
        common: Common,
        /// Wright parameters a1,a2
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        wright: Option<Vec<f64>>,
        /// Fox-type function of kind 1, 2 or 3 (needs --theta and --a)
        #[arg(long)]
        fox: Option<u8>,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        /// Real part of the argument
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        /// Imaginary part of the argument
        #[arg(long, allow_negative_numbers = true)]
        im: Option<f64>,
    },
    /// Gram matrix of the model ladders against the identity
    ParametrixCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        jmax: Option<usize>,
        /// Comma-separated circle radii
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        family: Option<FamilyChoice>,
        /// Largest accepted deviation from the identity
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Equilibrium measure and its constants
    Equilibrium {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
    },
    /// Build biorthogonal systems and report their norms
    Biortho {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
        /// Highest polynomial degree (default: n)
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Scaled correlation kernel against the hard-edge limit
    Kernel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
        /// Comma-separated first arguments
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Comma-separated second arguments, paired with --x
        #[arg(long, value_delimiter = ',')]
        y: Option<Vec<f64>>,
    },
    /// Convergence experiment over a list of n
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long, value_enum)]
        target: Option<Target>,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        y: Option<Vec<f64>>,
    },
}

/// What a subcommand produced before anything is written.
pub struct Outcome {
    pub stem: String,
    pub table: Table,
    pub config: Value,
    pub ctx: PrecisionContext,
    pub summary: String,
    pub result: Value,
    /// Set when a checked bound is exceeded; the run still writes its output.
    pub failed_check: Option<String>,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hardedge: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    let (common, flags) = flags_of(cli.command);
    let file = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.merged(flags.1);
    let outcome = match flags.0 {
        Kind::Specfun => specfun(&cfg)?,
        Kind::Parametrix => parametrix_check(&cfg)?,
        Kind::Equilibrium => equilibrium(&cfg)?,
        Kind::Biortho => biortho(&cfg)?,
        Kind::Kernel => kernel(&cfg)?,
        Kind::Verify => verify(&cfg)?,
    };
    if let Some(dir) = &cfg.out {
        let doc = report_document(
            &outcome.stem,
            &outcome.config,
            &outcome.ctx,
            &outcome.summary,
            outcome.result,
        );
        emit(dir, &outcome.stem, &outcome.table, &doc)?;
    }
    println!("{}", outcome.summary);
    match outcome.failed_check {
        Some(why) => {
            eprintln!("hardedge: check failed: {why}");
            Ok(2)
        }
        None => Ok(0),
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Specfun,
    Parametrix,
    Equilibrium,
    Biortho,
    Kernel,
    Verify,
}

fn ensemble_flags(e: Ensemble) -> RunConfig {
    RunConfig {
        theta: e.theta,
        alpha: e.alpha,
        potential: e.potential,
        n: e.n,
        grid: e.grid,
        ..Default::default()
    }
}

/// Splits the parsed command into its shared options and a configuration overlay.
fn flags_of(command: Command) -> (Common, (Kind, RunConfig)) {
    let with_common = |c: &Common, r: RunConfig| RunConfig {
        out: c.out.clone(),
        cache: c.cache.clone(),
        prec_bits: c.prec_bits,
        rel_tol: c.rel_tol,
        ..r
    };
    match command {
        Command::Specfun {
            common,
            wright,
            fox,
            theta,
            a,
            x,
            im,
        } => {
            let r = RunConfig {
                wright: wright.map(|w| {
                    [
                        w.first().copied().unwrap_or(f64::NAN),
                        w.get(1).copied().unwrap_or(f64::NAN),
                    ]
                }),
                fox,
                theta,
                a,
                x: x.map(|v| vec![v]),
                im,
                ..Default::default()
            };
            let r = with_common(&common, r);
            (common, (Kind::Specfun, r))
        }
        Command::ParametrixCheck {
            common,
            theta,
            alpha,
            jmax,
            radii,
            family,
            tolerance,
        } => {
            let r = with_common(
                &common,
                RunConfig {
                    theta,
                    alpha,
                    jmax,
                    radii,
                    family,
                    tolerance,
                    ..Default::default()
                },
            );
            (common, (Kind::Parametrix, r))
        }
        Command::Equilibrium { common, ensemble } => {
            let r = with_common(&common, ensemble_flags(ensemble));
            (common, (Kind::Equilibrium, r))
        }
        Command::Biortho {
            common,
            ensemble,
            degree,
        } => {
            let r = with_common(
                &common,
                RunConfig {
                    degree,
                    ..ensemble_flags(ensemble)
                },
            );
            (common, (Kind::Biortho, r))
        }
        Command::Kernel {
            common,
            ensemble,
            x,
            y,
        } => {
            let r = with_common(
                &common,
                RunConfig {
                    x,
                    y,
                    ..ensemble_flags(ensemble)
                },
            );
            (common, (Kind::Kernel, r))
        }
        Command::Verify {
            common,
            ensemble,
            target,
            x,
            y,
        } => {
            let r = with_common(
                &common,
                RunConfig {
                    target,
                    x,
                    y,
                    ..ensemble_flags(ensemble)
                },
            );
            (common, (Kind::Verify, r))
        }
    }
}

fn context(cfg: &RunConfig) -> CliResult<PrecisionContext> {
    let bits = cfg.prec_bits()?;
    let ctx = match cfg.rel_tol {
        Some(t) => PrecisionContext::with_tol(bits, t),
        None => PrecisionContext::new(bits),
    };
    ctx.map_err(|e| CliError::Validation(e.to_string()))
}

fn precision_json(ctx: &PrecisionContext) -> Value {
    json!({ "mantissa_bits": ctx.mantissa_bits, "rel_tol": ctx.rel_tol })
}

/// `d.ddd e±k` rewritten positionally when the exponent is moderate.
pub fn plain_decimal(s: &str) -> String {
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return s.to_string();
    };
    let Ok(exp) = exp.parse::<i64>() else {
        return s.to_string();
    };
    if !(-8..=20).contains(&exp) {
        return s.to_string();
    }
    let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let point = int.len() as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

fn specfun(cfg: &RunConfig) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let p = ctx.prec();
    let x = cfg
        .x
        .as_ref()
        .and_then(|v| v.first().copied())
        .ok_or_else(|| CliError::Usage("specfun needs --x".into()))?;
    let im = cfg.im.unwrap_or(0.0);
    let z = Complex::from_f64(x, im, p);
    let (label, params, value) = match (cfg.wright, cfg.fox) {
        (Some([a1, a2]), None) => {
            if !(a1.is_finite() && a2.is_finite()) {
                return Err(CliError::Usage("--wright takes two numbers a1,a2".into()));
            }
            let wp = WrightParams::from_f64(a1, a2, p)?;
            (
                "wright".to_string(),
                [a1, a2],
                wright_bessel(&wp, &z, &ctx)?,
            )
        }
        (None, Some(k)) => {
            let kind = FoxKind::from_index(k).map_err(|e| CliError::Usage(e.to_string()))?;
            let theta = cfg.theta()?;
            let a = cfg
                .a
                .ok_or_else(|| CliError::Usage("--fox needs --a".into()))?;
            let fp = FoxIParams::from_f64(theta, a, p)?;
            (format!("fox{k}"), [theta, a], fox_i(kind, &fp, &z, &ctx)?)
        }
        _ => {
            return Err(CliError::Usage(
                "specfun needs exactly one of --wright a1,a2 or --fox K".into(),
            ))
        }
    };
    let mut table = Table::new(&["function", "p1", "p2", "z_re", "z_im", "re", "im"]);
    table.push(vec![
        label.clone(),
        f64_str(params[0]),
        f64_str(params[1]),
        f64_str(x),
        f64_str(im),
        real_str(&value.re),
        real_str(&value.im),
    ]);
    let shown = if value.im.is_zero() {
        plain_decimal(&real_str(&value.re))
    } else {
        let im = plain_decimal(&real_str(&value.im));
        let (op, mag) = im
            .strip_prefix('-')
            .map_or(("+", im.as_str()), |m| ("-", m));
        format!("{} {op} {mag}i", plain_decimal(&real_str(&value.re)))
    };
    let summary = format!(
        "{label}({}, {}; {}) = {shown}",
        params[0],
        params[1],
        if im == 0.0 {
            x.to_string()
        } else {
            format!("{x}{im:+}i")
        }
    );
    let config = json!({ "function": label, "params": params, "z": [x, im], "precision": precision_json(&ctx) });
    let result = json!({ "re": real_str(&value.re), "im": real_str(&value.im) });
    Ok(Outcome {
        stem: "specfun".into(),
        table,
        config,
        ctx,
        summary,
        result,
        failed_check: None,
    })
}

fn parametrix_check(cfg: &RunConfig) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let p = ctx.prec();
    let theta = cfg.theta()?;
    let alpha = cfg.alpha()?;
    let jmax = cfg.jmax.unwrap_or(6);
    let radii = cfg.radii.clone().unwrap_or_else(|| vec![1.0]);
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(CliError::Validation(format!(
            "radii must be positive, got {radii:?}"
        )));
    }
    let tolerance = cfg.tolerance.unwrap_or(1e-10);
    let families: Vec<Family> = match cfg.family.unwrap_or(FamilyChoice::Both) {
        FamilyChoice::Plain => vec![Family::Plain],
        FamilyChoice::Tilde => vec![Family::Tilde],
        FamilyChoice::Both => vec![Family::Plain, Family::Tilde],
    };
    let params = ParametrixParams::from_f64(theta, alpha, p)?;
    let mut table = Table::new(&["family", "radius", "j", "k", "re", "im", "deviation"]);
    let (mut worst, mut spread) = (0.0f64, 0.0f64);
    for &family in &families {
        let name = match family {
            Family::Plain => "plain",
            Family::Tilde => "tilde",
        };
        let mut first: Option<Vec<Vec<Complex>>> = None;
        for &r in &radii {
            let g = gram_matrix(family, &params, jmax, &Real::from_f64(r, p), &ctx)?;
            for (j, row) in g.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    let delta = if j == k {
                        Complex::one(p)
                    } else {
                        Complex::zero(p)
                    };
                    let dev = (v - &delta).log2_abs().exp2();
                    worst = worst.max(dev);
                    if let Some(f) = &first {
                        spread = spread.max((v - &f[j][k]).log2_abs().exp2());
                    }
                    table.push(vec![
                        name.into(),
                        f64_str(r),
                        j.to_string(),
                        k.to_string(),
                        real_str(&v.re),
                        real_str(&v.im),
                        f64_str(dev),
                    ]);
                }
            }
            first.get_or_insert(g);
        }
    }
    let summary = format!("parametrix-check: max |<G,H> - delta| = {worst:.3e}, radius spread = {spread:.3e} (j,k <= {jmax}, tolerance {tolerance:e})");
    let failed_check = (worst > tolerance || spread > tolerance)
        .then(|| format!("deviation {worst:e} or spread {spread:e} exceeds {tolerance:e}"));
    let config = json!({
        "theta": theta, "alpha": alpha, "jmax": jmax, "radii": radii,
        "families": families.iter().map(|f| format!("{f:?}").to_lowercase()).collect::<Vec<_>>(),
        "tolerance": tolerance, "precision": precision_json(&ctx),
    });
    let result = json!({ "max_deviation": worst, "radius_spread": spread, "passed": failed_check.is_none() });
    Ok(Outcome {
        stem: "parametrix-check".into(),
        table,
        config,
        ctx,
        summary,
        result,
        failed_check,
    })
}

fn solve(cfg: &RunConfig, theta: f64) -> CliResult<(PotentialSpec, usize, EquilibriumData)> {
    let spec = cfg.potential();
    let grid = cfg.grid.unwrap_or(32);
    if grid < 4 {
        return Err(CliError::Validation(format!(
            "grid must be at least 4, got {grid}"
        )));
    }
    let v = spec.to_potential().validated()?;
    let eq = solve_equilibrium(&v, theta, grid)?;
    Ok((spec, grid, eq))
}

fn equilibrium(cfg: &RunConfig) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let theta = cfg.theta()?;
    let (spec, grid, eq) = solve(cfg, theta)?;
    let mut table = Table::new(&["x", "psi"]);
    let mut el_worst = 0.0f64;
    for (x, psi) in eq.grid.iter().zip(&eq.psi) {
        table.push(vec![f64_str(*x), f64_str(*psi)]);
        el_worst = el_worst.max(eq.el_residual(*x)?.abs());
    }
    let mass = eq.mass();
    let summary = format!(
        "equilibrium: b = {:.10}, d1 = {:.10}, rho = {:.10}, ell = {:.10}, mass - 1 = {:.1e}, max EL residual = {:.1e}",
        eq.b, eq.d1, eq.rho, eq.lagrange_ell, mass - 1.0, el_worst
    );
    let config = json!({ "theta": theta, "potential": spec, "grid": grid, "precision": precision_json(&ctx) });
    let result = json!({
        "b": eq.b, "d1": eq.d1, "d2": eq.d2, "c": eq.c, "rho": eq.rho, "varrho": eq.varrho,
        "m_theta": eq.m_theta, "ell": eq.lagrange_ell, "re_g_plus_0": eq.g0_re, "re_gtilde_plus_0": eq.gtilde0_re,
        "mass": mass, "max_el_residual": el_worst,
    });
    Ok(Outcome {
        stem: "equilibrium".into(),
        table,
        config,
        ctx,
        summary,
        result,
        failed_check: None,
    })
}

/// Builds (or loads) one system per `n`, in parallel when more than one core is available.
pub fn build_systems(
    spec: &PotentialSpec,
    theta: f64,
    alpha: f64,
    ns: &[u32],
    degree: impl Fn(u32) -> usize + Sync,
    ctx: &PrecisionContext,
    cache: &SystemCache,
) -> CliResult<Vec<BiorthogonalSystem>> {
    let potential = spec.to_potential().validated()?;
    let params: Vec<EnsembleParams> = ns
        .iter()
        .map(|&n| EnsembleParams::from_f64(potential.clone(), theta, alpha, n, ctx.prec()))
        .collect::<Result<_, _>>()?;
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(ns.len());
    if workers <= 1 {
        return params
            .iter()
            .map(|pr| cache.get_or_build(pr, degree(pr.n()), ctx))
            .collect();
    }
    let mut slots: Vec<Option<CliResult<BiorthogonalSystem>>> =
        (0..ns.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let params = &params;
                let degree = &degree;
                s.spawn(move || {
                    (w..params.len())
                        .step_by(workers)
                        .map(|i| {
                            (
                                i,
                                cache.get_or_build(&params[i], degree(params[i].n()), ctx),
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("system builder panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every slot is filled"))
        .collect()
}

fn biortho(cfg: &RunConfig) -> CliResult<Outcome> {
    let ctx = context(cfg)?;
    let theta = cfg.theta()?;
    let alpha = cfg.alpha()?;
    let ns = cfg.n_list(&[8])?;
    let spec = cfg.potential();
    let fixed = cfg.degree;
    let cache = SystemCache::new(cfg.cache.clone());
    let systems = build_systems(
        &spec,
        theta,
        alpha,
        &ns,
        |n| fixed.unwrap_or(n as usize),
        &ctx,
        &cache,
    )?;
    let mut table = Table::new(&["n", "j", "kappa"]);
    let mut per_n = Vec::new();
    let mut worst = 0.0f64;
    for sys in &systems {
        let n = sys.params().n();
        for (j, k) in sys.kappas().iter().enumerate() {
            table.push(vec![n.to_string(), j.to_string(), real_str(k)]);
        }
        let resid = sys.max_offdiag_residual().to_f64();
        worst = worst.max(resid);
        per_n.push(json!({
            "n": n, "degree": sys.degree(), "working_bits": sys.prec(), "loss_bits": sys.loss_bits(),
            "ill_conditioned": sys.ill_conditioned(), "max_offdiag_residual_rel": resid,
            "kappas": sys.kappas().iter().map(real_str).collect::<Vec<_>>(),
        }));
    }
    let summary = format!(
        "biortho: {} system(s), max off-diagonal residual / kappa_max = {worst:.3e}",
        systems.len()
    );
    let config = json!({
        "theta": theta, "alpha": alpha, "potential": spec, "n": ns, "degree": fixed, "precision": precision_json(&ctx),
    });
    let result = json!({ "systems": per_n, "max_offdiag_residual_rel": worst });
    Ok(Outcome {
        stem: "biortho".into(),
        table,
        config,
        ctx,
        summary,
        result,
        failed_check: None,
    })
}

fn points(cfg: &RunConfig) -> CliResult<Vec<(f64, f64)>> {
    let xs = cfg.x.clone().unwrap_or_else(|| vec![0.7]);
    let ys = cfg.y.clone().unwrap_or_else(|| vec![1.1]);
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(CliError::Usage(format!(
            "--x and --y must pair up, got {} and {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(&ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Validation(
            "kernel points must be positive".into(),
        ));
    }
    Ok(xs.into_iter().zip(ys).collect())
}

/// Common front half of `kernel` and `verify`.
struct Experiment {
    ctx: PrecisionContext,
    theta: f64,
    alpha: f64,
    spec: PotentialSpec,
    grid: usize,
    ns: Vec<u32>,
    eq: EquilibriumData,
    systems: Vec<BiorthogonalSystem>,
}

impl Experiment {
    fn prepare(cfg: &RunConfig, default_ns: &[u32]) -> CliResult<Self> {
        let ctx = context(cfg)?;
        let theta = cfg.theta()?;
        let alpha = cfg.alpha()?;
        let ns = cfg.n_list(default_ns)?;
        let (spec, grid, eq) = solve(cfg, theta)?;
        let cache = SystemCache::new(cfg.cache.clone());
        let systems = build_systems(&spec, theta, alpha, &ns, |n| n as usize, &ctx, &cache)?;
        Ok(Experiment {
            ctx,
            theta,
            alpha,
            spec,
            grid,
            ns,
            eq,
            systems,
        })
    }

    fn config(&self, extra: Value) -> Value {
        let mut v = json!({
            "theta": self.theta, "alpha": self.alpha, "potential": self.spec, "grid": self.grid,
            "n": self.ns, "precision": precision_json(&self.ctx),
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    }
}

fn kernel(cfg: &RunConfig) -> CliResult<Outcome> {
    let pts = points(cfg)?;
    let ex = Experiment::prepare(cfg, &[8, 16, 24])?;
    let rep = verify_kernel_limit(&ex.eq, &ex.systems, &pts, &ex.ctx)?;
    let mut table = Table::new(&["n", "x", "y", "scaling", "scaled", "limit", "error"]);
    for scaling in KernelScaling::ALL {
        let c = scaling as usize;
        for (i, n) in rep.n_values.iter().enumerate() {
            for (k, (x, y)) in rep.points.iter().enumerate() {
                table.push(vec![
                    n.to_string(),
                    f64_str(*x),
                    f64_str(*y),
                    scaling.label().into(),
                    f64_str(rep.scaled[c][i][k]),
                    f64_str(rep.limits[k]),
                    f64_str(rep.errors[c][i][k]),
                ]);
            }
        }
    }
    let last = rep.n_values.len() - 1;
    let worst = |c: usize| rep.errors[c][last].iter().cloned().fold(0.0, f64::max);
    let summary = format!(
        "kernel: n = {}, worst relative error {:.3e} ({}), {:.3e} ({})",
        rep.n_values[last],
        worst(0),
        KernelScaling::WithTheta.label(),
        worst(1),
        KernelScaling::Plain.label()
    );
    let config = ex.config(json!({ "points": pts }));
    let result = kernel_json(&rep);
    Ok(Outcome {
        stem: "kernel".into(),
        table,
        config,
        ctx: ex.ctx,
        summary,
        result,
        failed_check: None,
    })
}

fn kernel_json(rep: &hardedge_core::verify::KernelLimitReport) -> Value {
    let per_scaling: Vec<Value> = KernelScaling::ALL
        .iter()
        .map(|&s| {
            let c = s as usize;
            json!({
                "scaling": s.label(),
                "scaled": rep.scaled[c],
                "errors": rep.errors[c],
                "pointwise_decreasing": rep.pointwise_decreasing(s),
                "worst_point": convergence_json(&rep.reports[c]),
            })
        })
        .collect();
    json!({ "n_values": rep.n_values, "points": rep.points, "limits": rep.limits, "scalings": per_scaling })
}

fn verify(cfg: &RunConfig) -> CliResult<Outcome> {
    let target = cfg
        .target
        .ok_or_else(|| CliError::Usage("verify needs --target kappa|pn|qn|kernel".into()))?;
    let pts = if target == Target::Kernel {
        Some(points(cfg)?)
    } else {
        None
    };
    let ex = Experiment::prepare(cfg, &[8, 12, 16, 24])?;
    let stem = format!("verify-{}", target.label());
    let (table, result, summary) = match target {
        Target::Kernel => {
            let pts = pts.clone().expect("kernel points parsed above");
            let rep = verify_kernel_limit(&ex.eq, &ex.systems, &pts, &ex.ctx)?;
            let mut table = Table::new(&["n", "error", "ratio", "scaling"]);
            for s in KernelScaling::ALL {
                for row in convergence_table(&rep.reports[s as usize]).rows {
                    table.push(row.into_iter().chain([s.label().to_string()]).collect());
                }
            }
            let r = &rep.reports[KernelScaling::WithTheta as usize];
            let summary = format!(
                "verify kernel: worst-point errors {} ({}), fitted rate {:.4}",
                join_errors(&r.errors),
                KernelScaling::WithTheta.label(),
                r.fitted_rate
            );
            (table, kernel_json(&rep), summary)
        }
        _ => {
            let rep = match target {
                Target::Kappa => verify_kappa(&ex.eq, &ex.systems)?,
                Target::Pn => {
                    verify_pn_asymptotics(&ex.eq, &ex.systems, &default_z_samples(), &ex.ctx)?
                }
                _ => verify_qn_asymptotics(&ex.eq, &ex.systems, &default_z_samples(), &ex.ctx)?,
            };
            let summary = format!(
                "verify {}: errors {}, fitted rate {:.4}, predicted {:.4}, strictly decreasing: {}",
                target.label(),
                join_errors(&rep.errors),
                rep.fitted_rate,
                rep.predicted_rate,
                rep.strictly_decreasing()
            );
            let mut json = convergence_json(&rep);
            json["equilibrium"] = constants_json(&rep.constants);
            (convergence_table(&rep), json, summary)
        }
    };
    let extra = match &pts {
        Some(p) => json!({ "target": target, "points": p }),
        None => json!({ "target": target }),
    };
    let config = ex.config(extra);
    Ok(Outcome {
        stem,
        table,
        config,
        ctx: ex.ctx,
        summary,
        result,
        failed_check: None,
    })
}

fn join_errors(errors: &[f64]) -> String {
    errors
        .iter()
        .map(|e| format!("{e:.3e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positional_decimals() {
        assert_eq!(plain_decimal("2.2389e-1"), "0.22389");
        assert_eq!(plain_decimal("-1.5e2"), "-150");
        assert_eq!(plain_decimal("1.25e0"), "1.25");
        assert_eq!(plain_decimal("3.0e-12"), "3.0e-12");
        assert_eq!(plain_decimal("0"), "0");
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["hardedge", "no-such-command"]), 1);
        assert_eq!(run(["hardedge", "verify", "--n", "x"]), 1);
        assert_eq!(run(["hardedge", "specfun", "--x", "1"]), 1);
    }

    #[test]
    fn invariant_violations_exit_with_two() {
        assert_eq!(run(["hardedge", "equilibrium", "--theta", "-1"]), 2);
        assert_eq!(run(["hardedge", "biortho", "--n", "4,3"]), 2);
        assert_eq!(
            run([
                "hardedge",
                "specfun",
                "--wright",
                "1,1",
                "--x",
                "1",
                "--prec-bits",
                "32"
            ]),
            2
        );
    }
}
