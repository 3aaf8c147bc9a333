//! On-disk store of built systems, keyed by everything that determines the build.

use std::path::{Path, PathBuf};

use hardedge_core::biorthogonal::{build_system, BiorthogonalSystem, EnsembleParams};
use hardedge_core::PrecisionContext;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::PotentialSpec;
use crate::error::{CliError, CliResult};
use crate::format::{real_str, write_atomic, SystemDocument};

#[derive(Clone, Debug, Default)]
pub struct SystemCache {
    dir: Option<PathBuf>,
}

impl SystemCache {
    /// `None` disables caching.
    pub fn new(dir: Option<PathBuf>) -> Self {
        SystemCache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Hex SHA-256 of `(V, θ, α, n, N, mantissa bits, rel_tol)`.
    pub fn key(params: &EnsembleParams, degree: usize, ctx: &PrecisionContext) -> String {
        let id = json!({
            "potential": PotentialSpec::from(params.potential()),
            "theta": real_str(params.theta()),
            "alpha": real_str(params.alpha()),
            "n": params.n(),
            "degree": degree,
            "mantissa_bits": ctx.mantissa_bits,
            "rel_tol": ctx.rel_tol,
        });
        hex::encode(Sha256::digest(id.to_string().as_bytes()))
    }

    /// Loads the stored system when present and consistent, otherwise builds and stores it.
    pub fn get_or_build(
        &self,
        params: &EnsembleParams,
        degree: usize,
        ctx: &PrecisionContext,
    ) -> CliResult<BiorthogonalSystem> {
        let Some(dir) = &self.dir else {
            return Ok(build_system(params, degree, ctx)?);
        };
        let path = dir.join(format!("{}.json", Self::key(params, degree, ctx)));
        if let Some(sys) = Self::load(&path, params, degree) {
            return Ok(sys);
        }
        let sys = build_system(params, degree, ctx)?;
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let text = serde_json::to_vec(&SystemDocument::from_system(&sys))
            .expect("system document serializes");
        write_atomic(&path, &text)?;
        Ok(sys)
    }

    /// A corrupt or mismatched entry is treated as a miss and later overwritten.
    fn load(path: &Path, params: &EnsembleParams, degree: usize) -> Option<BiorthogonalSystem> {
        let text = std::fs::read(path).ok()?;
        let doc: SystemDocument = serde_json::from_slice(&text).ok()?;
        let sys = doc.to_system().ok()?;
        let same = sys.degree() == degree
            && sys.params().n() == params.n()
            && sys.params().potential() == params.potential()
            && real_str(sys.params().theta()) == real_str(params.theta())
            && real_str(sys.params().alpha()) == real_str(params.alpha());
        same.then_some(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hardedge_core::equilibrium::Potential;

    #[test]
    fn second_lookup_reads_the_stored_system() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SystemCache::new(Some(dir.path().to_path_buf()));
        let ctx = PrecisionContext::new(96).unwrap();
        let params = EnsembleParams::from_f64(Potential::Linear, 2.0, 0.0, 3, 96).unwrap();
        let built = cache.get_or_build(&params, 3, &ctx).unwrap();
        let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let loaded = cache.get_or_build(&params, 3, &ctx).unwrap();
        assert_eq!(loaded.kappas(), built.kappas());
        assert_eq!(loaded.q_coeffs(), built.q_coeffs());
    }

    #[test]
    fn keys_separate_configurations() {
        let ctx = PrecisionContext::new(96).unwrap();
        let a = EnsembleParams::from_f64(Potential::Linear, 2.0, 0.0, 3, 96).unwrap();
        let b = EnsembleParams::from_f64(Potential::Linear, 2.0, 0.5, 3, 96).unwrap();
        assert_ne!(SystemCache::key(&a, 3, &ctx), SystemCache::key(&b, 3, &ctx));
        assert_ne!(SystemCache::key(&a, 3, &ctx), SystemCache::key(&a, 4, &ctx));
        assert_ne!(
            SystemCache::key(&a, 3, &ctx),
            SystemCache::key(&a, 3, &PrecisionContext::new(128).unwrap())
        );
    }

    #[test]
    fn corrupt_entry_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = SystemCache::new(Some(dir.path().to_path_buf()));
        let ctx = PrecisionContext::new(96).unwrap();
        let params = EnsembleParams::from_f64(Potential::Linear, 1.0, 0.0, 2, 96).unwrap();
        let path = dir
            .path()
            .join(format!("{}.json", SystemCache::key(&params, 2, &ctx)));
        std::fs::write(&path, b"{not json").unwrap();
        assert!(cache.get_or_build(&params, 2, &ctx).is_ok());
        let doc: SystemDocument = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
        assert_eq!(doc.n, 2);
    }
}
