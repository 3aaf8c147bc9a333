//! Coarse energy minimisation over the probability simplex, used as an independent check
//! of the collocation solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::potential::Potential;
use super::quad64::solve;
use crate::error::{NumError, Result};

/// Weights of the discrete minimiser on cells of `[0, xmax]`.
#[derive(Clone, Debug)]
pub struct SimplexSolution {
    /// Cell edges, `cells + 1` of them.
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    /// Right edge of the last cell with positive weight.
    pub support_end: f64,
}

/// Minimises the discretised energy with weights on `cells` cells graded quadratically
/// towards 0, by an active-set method on the KKT system.
///
/// Self-interaction of a cell of width `w` uses the exact mean `log w − 3/2` of `log|x−y|`.
pub fn simplex_equilibrium(
    v: &Potential,
    theta: f64,
    xmax: f64,
    cells: usize,
) -> Result<SimplexSolution> {
    if cells < 4 || !(xmax > 0.0) || !(theta > 0.0) {
        return Err(NumError::InvalidParameter(format!(
            "cells = {cells}, xmax = {xmax}, θ = {theta}"
        )));
    }
    let edges: Vec<f64> = (0..=cells)
        .map(|j| xmax * libm::pow(j as f64 / cells as f64, 2.0))
        .collect();
    let mids: Vec<f64> = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
    let n = cells;
    let mut energy = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            energy[i * n + j] = if i == j {
                let w = edges[i + 1] - edges[i];
                let self_log = libm::log(w) - 1.5;
                -(2.0 * self_log + libm::log(theta * libm::pow(mids[i], theta - 1.0)))
            } else {
                let (x, y) = (mids[i], mids[j]);
                -(libm::log((x - y).abs())
                    + libm::log((libm::pow(x, theta) - libm::pow(y, theta)).abs()))
            };
        }
    }
    let field: Vec<f64> = mids.iter().map(|&x| v.value(x)).collect();

    let mut active: Vec<bool> = vec![true; n];
    let mut weights = vec![0.0; n];
    for _ in 0..4 * n {
        let idx: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let m = idx.len();
        let mut a = vec![0.0; (m + 1) * (m + 1)];
        let mut rhs = vec![0.0; m + 1];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[r * (m + 1) + c] = energy[i * n + j];
            }
            a[r * (m + 1) + m] = -1.0;
            a[m * (m + 1) + r] = 1.0;
            rhs[r] = -field[i];
        }
        rhs[m] = 1.0;
        let sol = solve(a, rhs)?;
        let lambda = sol[m];
        if sol[..m].iter().any(|&w| w < 0.0) {
            for (r, &i) in idx.iter().enumerate() {
                if sol[r] < 0.0 {
                    active[i] = false;
                }
            }
            continue;
        }
        weights.iter_mut().for_each(|w| *w = 0.0);
        for (r, &i) in idx.iter().enumerate() {
            weights[i] = sol[r];
        }
        // KKT: the gradient off the support must not undercut the multiplier.
        let worst = (0..n)
            .filter(|&j| !active[j])
            .map(|j| {
                (
                    j,
                    (0..n).map(|i| energy[j * n + i] * weights[i]).sum::<f64>() + field[j] - lambda,
                )
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
        match worst {
            Some((j, g)) if g < -1e-12 => active[j] = true,
            _ => {
                let last = (0..n)
                    .rev()
                    .find(|&i| weights[i] > 1e-10 * weights.iter().cloned().fold(0.0, f64::max))
                    .unwrap_or(0);
                return Ok(SimplexSolution {
                    support_end: edges[last + 1],
                    edges,
                    weights,
                });
            }
        }
    }
    Err(NumError::NonConvergence("active set did not settle".into()))
}
