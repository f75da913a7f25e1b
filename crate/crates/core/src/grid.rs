//! Sample grids: the graded half-line grid in the scaled normal variable and
//! a quadratic grid used by the finite-volume radial solver.

use crate::error::{LabError, Result};

/// Smallest positive node of [`graded_s_grid`].
pub const GRADED_START: f64 = 1e-6;
/// Geometric ratio on `(0, 1)`.
pub const GRADED_RATIO: f64 = 1.05;
/// Uniform spacing on `[1, s_max]`.
pub const UNIFORM_STEP: f64 = 0.05;

/// `0`, then geometric nodes from `1e-6` to `1`, then uniform to `s_max`.
pub fn graded_s_grid(s_max: f64) -> Result<Vec<f64>> {
    graded_grid_with(s_max, UNIFORM_STEP)
}

/// [`graded_s_grid`] with a custom uniform step.
pub fn graded_grid_with(s_max: f64, h: f64) -> Result<Vec<f64>> {
    if !(s_max > 1.0) || !(h > 0.0) {
        return Err(LabError::Validation(format!("graded grid needs s_max > 1 and h > 0 (s_max={s_max}, h={h})")));
    }
    let mut g = vec![0.0];
    let mut s = GRADED_START;
    while s < 1.0 / GRADED_RATIO.sqrt() {
        g.push(s);
        s *= GRADED_RATIO;
    }
    let m = ((s_max - 1.0) / h).ceil() as usize;
    let step = (s_max - 1.0) / m as f64;
    g.extend((0..=m).map(|i| 1.0 + i as f64 * step));
    Ok(g)
}

/// `s_i = S (i/M)²`, `i = 0..=M`.
pub fn quadratic_grid(s_max: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| s_max * (i as f64 / m as f64).powi(2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_grid_shape() {
        let g = graded_s_grid(20.0).unwrap();
        assert_eq!(g[0], 0.0);
        assert!(g[1] <= 1e-6);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g.last().unwrap() - 20.0).abs() < 1e-12);
        assert!(g.len() >= 16);
        assert!(graded_s_grid(0.5).is_err());
    }

    #[test]
    fn quadratic_grid_ends() {
        let g = quadratic_grid(4.0, 8);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[8], 4.0);
        assert_eq!(g[4], 1.0);
    }
}
