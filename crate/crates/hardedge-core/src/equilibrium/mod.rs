//! Equilibrium measure of the two-kernel logarithmic energy
//! `½∬log|x−y|⁻¹ + ½∬log|x^θ−y^θ|⁻¹ + ∫V` on `[0, ∞)`, for one-cut regular `V`.
//!
//! This module works in double precision: the discretisation error of the measure, not
//! rounding, limits every downstream constant.

mod jc;
mod potential;
mod quad64;
mod simplex;
mod solver;

pub use jc::jc_map;
pub use potential::{check_one_cut_sufficient, Potential};
pub use simplex::{simplex_equilibrium, SimplexSolution};
pub use solver::{solve_equilibrium, EquilibriumData};
