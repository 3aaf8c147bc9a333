//! Finite-`n` biorthogonal systems for the weight `x^α e^{−nV(x)}` on `[0, ∞)`.
//!
//! Monic `p_j(x)` and `q_k(t)` with `∫ p_j(x) q_k(x^θ) x^α e^{−nV(x)} dx = κ_j δ_{jk}`,
//! obtained by an LDU factorization of the mixed moment matrix.

mod cauchy;
mod halfline;
mod system;

pub use cauchy::{cauchy_transform_p, cauchy_transform_q, Approach};
pub use system::{build_system, kernel_n, mixed_moment, BiorthogonalSystem, EnsembleParams};
