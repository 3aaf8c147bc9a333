//! Run configuration: a JSON document whose fields are overridden by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use hardedge_core::equilibrium::Potential;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable holding the default mantissa width.
pub const PREC_ENV: &str = "MB_PREC_BITS";
pub const DEFAULT_PREC_BITS: usize = 256;

/// Serializable form of the external field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    // A struct variant, so that stray fields are rejected like in the other two.
    Linear {},
    Monomial { r: u32 },
    Series { coeffs: Vec<f64> },
}

impl PotentialSpec {
    pub fn to_potential(&self) -> Potential {
        match self {
            PotentialSpec::Linear {} => Potential::Linear,
            PotentialSpec::Monomial { r } => Potential::Monomial(*r),
            PotentialSpec::Series { coeffs } => Potential::Series(coeffs.clone()),
        }
    }
}

impl From<&Potential> for PotentialSpec {
    fn from(v: &Potential) -> Self {
        match v {
            Potential::Linear => PotentialSpec::Linear {},
            Potential::Monomial(r) => PotentialSpec::Monomial { r: *r },
            Potential::Series(c) => PotentialSpec::Series { coeffs: c.clone() },
        }
    }
}

/// Accepts `linear`, `monomial:R`, `series:c0,c1,...` or an inline JSON descriptor.
impl FromStr for PotentialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| format!("potential descriptor: {e}"));
        }
        let (head, tail) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "linear" if tail.is_empty() => Ok(PotentialSpec::Linear {}),
            "monomial" => tail
                .parse()
                .map(|r| PotentialSpec::Monomial { r })
                .map_err(|e| format!("monomial exponent: {e}")),
            "series" => tail
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(|coeffs| PotentialSpec::Series { coeffs })
                .map_err(|e| format!("series coefficient: {e}")),
            _ => Err(format!(
                "unknown potential {s:?}; expected linear, monomial:R or series:c0,c1,..."
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Kappa,
    Pn,
    Qn,
    Kernel,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Kappa => "kappa",
            Target::Pn => "pn",
            Target::Qn => "qn",
            Target::Kernel => "kernel",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    Plain,
    Tilde,
    Both,
}

/// Every field is optional; a command fills what it needs from its own defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub potential: Option<PotentialSpec>,
    pub n: Option<Vec<u32>>,
    pub degree: Option<usize>,
    pub prec_bits: Option<usize>,
    pub rel_tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub target: Option<Target>,
    pub jmax: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub family: Option<FamilyChoice>,
    pub tolerance: Option<f64>,
    pub grid: Option<usize>,
    pub wright: Option<[f64; 2]>,
    pub fox: Option<u8>,
    pub a: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub im: Option<f64>,
}

macro_rules! take_over {
    ($base:ident, $over:ident; $($f:ident),*) => {
        $( if $over.$f.is_some() { $base.$f = $over.$f; } )*
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merged(mut self, over: RunConfig) -> Self {
        take_over!(self, over; theta, alpha, potential, n, degree, prec_bits, rel_tol, out, cache, target,
            jmax, radii, family, tolerance, grid, wright, fox, a, x, y, im);
        self
    }

    pub fn theta(&self) -> CliResult<f64> {
        let t = self.theta.unwrap_or(1.0);
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Validation(format!(
                "theta must be positive, got {t}"
            )));
        }
        Ok(t)
    }

    pub fn alpha(&self) -> CliResult<f64> {
        let a = self.alpha.unwrap_or(0.0);
        if !(a.is_finite() && a > -1.0) {
            return Err(CliError::Validation(format!(
                "alpha must exceed -1, got {a}"
            )));
        }
        Ok(a)
    }

    pub fn potential(&self) -> PotentialSpec {
        self.potential.clone().unwrap_or(PotentialSpec::Linear {})
    }

    /// Flag or file value, then `MB_PREC_BITS`, then 256; at least 64.
    pub fn prec_bits(&self) -> CliResult<usize> {
        let bits = match self.prec_bits {
            Some(b) => b,
            None => match std::env::var(PREC_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("{PREC_ENV}={v:?} is not an integer")))?,
                Err(_) => DEFAULT_PREC_BITS,
            },
        };
        if bits < 64 {
            return Err(CliError::Validation(format!(
                "mantissa bits must be at least 64, got {bits}"
            )));
        }
        Ok(bits)
    }

    /// Nonempty, strictly increasing, every entry positive.
    pub fn n_list(&self, default: &[u32]) -> CliResult<Vec<u32>> {
        let ns = self.n.clone().unwrap_or_else(|| default.to_vec());
        if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Validation(format!(
                "n list must be nonempty, positive and increasing, got {ns:?}"
            )));
        }
        Ok(ns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_descriptors() {
        assert_eq!(
            "linear".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::Linear {}
        );
        assert_eq!(
            serde_json::to_string(&PotentialSpec::Linear {}).unwrap(),
            r#"{"type":"linear"}"#
        );
        assert_eq!(
            "monomial:2".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::Monomial { r: 2 }
        );
        assert_eq!(
            "series:0,1,0.5".parse::<PotentialSpec>().unwrap(),
            PotentialSpec::Series {
                coeffs: vec![0.0, 1.0, 0.5]
            }
        );
        assert_eq!(
            r#"{"type":"monomial","r":3}"#.parse::<PotentialSpec>().unwrap(),
            PotentialSpec::Monomial { r: 3 }
        );
        assert!("cubic".parse::<PotentialSpec>().is_err());
        assert!(r#"{"type":"linear","r":1}"#.parse::<PotentialSpec>().is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file: RunConfig = serde_json::from_str(r#"{"theta":2,"alpha":0.5,"n":[4,8]}"#).unwrap();
        let flags = RunConfig {
            theta: Some(1.5),
            ..Default::default()
        };
        let m = file.merged(flags);
        assert_eq!(m.theta, Some(1.5));
        assert_eq!(m.alpha, Some(0.5));
        assert_eq!(m.n, Some(vec![4, 8]));
    }

    #[test]
    fn invariants() {
        let bad = |c: RunConfig| c;
        assert!(bad(RunConfig {
            theta: Some(0.0),
            ..Default::default()
        })
        .theta()
        .is_err());
        assert!(bad(RunConfig {
            alpha: Some(-1.0),
            ..Default::default()
        })
        .alpha()
        .is_err());
        assert!(bad(RunConfig {
            prec_bits: Some(32),
            ..Default::default()
        })
        .prec_bits()
        .is_err());
        assert!(bad(RunConfig {
            n: Some(vec![8, 8]),
            ..Default::default()
        })
        .n_list(&[1])
        .is_err());
        assert!(bad(RunConfig {
            n: Some(vec![]),
            ..Default::default()
        })
        .n_list(&[1])
        .is_err());
        assert_eq!(RunConfig::default().n_list(&[2, 3]).unwrap(), vec![2, 3]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"thetta":1}"#).is_err());
    }
}
