//! Tsallis characterization: `g` superadditive and concave forces
//! `g(x) = x / q`, i.e. `phi^{-1} = b ln_q - a`.

use serde::Serialize;

use super::functions::g_func;
use super::scans::{check_concave_g, check_superadditive_g};
use super::{unit_grid, validate_grid, CheckReport, Verdict};
use crate::deformed_exp::DeformedExponential;
use crate::error::Result;
use crate::scalar::Scalar;

/// Relative residual bound for accepting the linear fit of `g`.
pub const FIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Characterization {
    pub is_tsallis: Verdict,
    /// `1 / slope` of the least-squares line through the origin fitted to `(x, g(x))`.
    pub q_fit: f64,
    /// `max |g(x) - x / q_fit|` over the grid.
    pub max_residual: f64,
    pub superadditive: CheckReport,
    pub concave: CheckReport,
    pub dimension: usize,
}

/// Runs both `g` checks and fits `g(x) = x / q`; `dimension` is the number of
/// outcomes the conclusion is meant for, and the verdict is `Inconclusive`
/// below three.
pub fn characterize_tsallis<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
    dimension: usize,
) -> Result<Characterization> {
    validate_grid(grid_n, delta)?;
    let superadditive = check_superadditive_g(f, grid_n, delta)?;
    let concave = check_concave_g(f, grid_n, delta)?;
    let xs: Vec<T> = unit_grid(grid_n, delta);
    let gs = xs
        .iter()
        .map(|&x| g_func(f, x))
        .collect::<Result<Vec<T>>>()?;
    let (mut sxg, mut sxx) = (0.0f64, 0.0f64);
    for (x, g) in xs.iter().zip(&gs) {
        let (x, g) = (x.to_f64_lossy(), g.to_f64_lossy());
        sxg += x * g;
        sxx += x * x;
    }
    let slope = sxg / sxx;
    let q_fit = 1.0 / slope;
    let mut max_residual = 0.0f64;
    let mut max_g = 0.0f64;
    for (x, g) in xs.iter().zip(&gs) {
        let (x, g) = (x.to_f64_lossy(), g.to_f64_lossy());
        max_residual = max_residual.max((g - slope * x).abs());
        max_g = max_g.max(g.abs());
    }
    let fits = max_residual < FIT_TOL * max_g;
    let is_tsallis = if superadditive.passed() && concave.passed() && fits {
        if dimension < 3 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    } else {
        Verdict::Fail
    };
    Ok(Characterization {
        is_tsallis,
        q_fit,
        max_residual,
        superadditive,
        concave,
        dimension,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_q() {
        let f = DeformedExponential::<f64>::q_exponential(0.4).unwrap();
        let c = characterize_tsallis(&f, 50, 1e-3, 3).unwrap();
        assert_eq!(c.is_tsallis, Verdict::Pass);
        assert!((c.q_fit - 0.4).abs() < 1e-6);
    }

    #[test]
    fn exp_fits_one() {
        let e = DeformedExponential::<f64>::exponential();
        let c = characterize_tsallis(&e, 50, 1e-3, 3).unwrap();
        assert!((c.q_fit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_outcomes_is_inconclusive() {
        let e = DeformedExponential::<f64>::exponential();
        let c = characterize_tsallis(&e, 20, 1e-3, 2).unwrap();
        assert_eq!(c.is_tsallis, Verdict::Inconclusive);
    }
}
