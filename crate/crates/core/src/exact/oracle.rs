//! Brute-force reference solver for two-dimensional feature spaces.
//!
//! With `D' = 2` every detector direction is an angle, and the objective is
//! piecewise constant in that angle with at most one breakpoint per draw and
//! direction. A uniform sweep fine enough to hit every cell finds the optimum.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::saa::{saa_objective, SaaInstance};

/// Minimum of the SAA objective over `angle_count` uniform directions.
pub fn oracle_grid_search(inst: &SaaInstance, angle_count: usize) -> Result<(f64, Vec<f64>)> {
    if inst.feature_dim() != 2 {
        return Err(Error::Argument(format!(
            "angular oracle needs feature dimension 2, got {}",
            inst.feature_dim()
        )));
    }
    if angle_count == 0 {
        return Err(Error::Argument("angle_count must be positive".into()));
    }
    let mut best = (f64::INFINITY, vec![0.0, 0.0]);
    for idx in 0..angle_count {
        let alpha = TAU * idx as f64 / angle_count as f64;
        let theta = vec![alpha.cos(), alpha.sin()];
        let v = saa_objective(inst, &theta)?.s_hat;
        if v < best.0 {
            best = (v, theta);
        }
    }
    Ok(best)
}
