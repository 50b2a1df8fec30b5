//! Grid scans of the one-dimensional conditions on `g` and `h` and of the
//! Hessian of `G`.

use serde::Serialize;

use super::functions::{g_func, h_func, hessian_g};
use super::{unit_grid, validate_grid, CheckReport, GridMeta, Witness, Worst, SLACK};
use crate::deformed_exp::DeformedExponential;
use crate::error::Result;
use crate::scalar::Scalar;

fn meta(grid_n: usize, delta: f64) -> GridMeta {
    GridMeta {
        resolution: Some(grid_n),
        delta: Some(delta),
        samples: 0,
    }
}

/// `g(x + y) >= g(x) + g(y)` over grid pairs `x <= y` with `x + y <= 1 - delta`.
pub fn check_superadditive_g<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<CheckReport> {
    validate_grid(grid_n, delta)?;
    let xs: Vec<T> = unit_grid(grid_n, delta);
    let gs = xs
        .iter()
        .map(|&x| g_func(f, x))
        .collect::<Result<Vec<T>>>()?;
    let upper = T::lit(1.0 - delta) * (T::one() + T::epsilon());
    let mut worst = Worst::new();
    let mut strict = true;
    for i in 0..grid_n {
        for j in i..grid_n {
            let s = xs[i] + xs[j];
            if s > upper {
                break;
            }
            let m = (g_func(f, s)? - gs[i] - gs[j]).to_f64_lossy();
            strict &= m > SLACK;
            worst.offer(m, || Witness::Pair {
                x: xs[i].to_f64_lossy(),
                y: xs[j].to_f64_lossy(),
            });
        }
    }
    let mut r = worst.report("superadditive_g", meta(grid_n, delta), None);
    r.strict = Some(strict);
    Ok(r)
}

/// Midpoint concavity `g((x+y)/2) >= (g(x) + g(y))/2` over grid pairs `x < y`.
pub fn check_concave_g<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<CheckReport> {
    validate_grid(grid_n, delta)?;
    let xs: Vec<T> = unit_grid(grid_n, delta);
    midpoint_scan("concave_g", |x| g_func(f, x), &xs, meta(grid_n, delta))
}

/// Midpoint concavity of `h` over `phi^{-1}` of the probability grid.
pub fn check_concave_h<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<CheckReport> {
    validate_grid(grid_n, delta)?;
    let ps: Vec<T> = unit_grid(grid_n, delta);
    let xs = ps
        .iter()
        .map(|&p| f.phi_inv(p))
        .collect::<Result<Vec<T>>>()?;
    midpoint_scan("concave_h", |x| h_func(f, x), &xs, meta(grid_n, delta))
}

fn midpoint_scan<T: Scalar, F: Fn(T) -> Result<T>>(
    check: &'static str,
    func: F,
    xs: &[T],
    grid: GridMeta,
) -> Result<CheckReport> {
    let vals = xs.iter().map(|&x| func(x)).collect::<Result<Vec<T>>>()?;
    let half = T::lit(0.5);
    let mut worst = Worst::new();
    let mut strict = true;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let mid = func((xs[i] + xs[j]) * half)?;
            let m = (mid - (vals[i] + vals[j]) * half).to_f64_lossy();
            strict &= m > SLACK;
            worst.offer(m, || Witness::Pair {
                x: xs[i].to_f64_lossy(),
                y: xs[j].to_f64_lossy(),
            });
        }
    }
    let mut r = worst.report(check, grid, None);
    r.strict = Some(strict);
    Ok(r)
}

/// Convexity of `G(x, y) = phi^{-1}(phi(x) + phi(y))` from its closed-form
/// Hessian: at `x = phi^{-1}(a)`, `y = phi^{-1}(b)` for grid pairs with
/// `a + b <= 1 - delta`, the margin is the smallest of the normalised
/// diagonal entries and the normalised determinant.
pub fn check_convex_compose<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<CheckReport> {
    validate_grid(grid_n, delta)?;
    let ps: Vec<T> = unit_grid(grid_n, delta);
    let xs = ps
        .iter()
        .map(|&p| f.phi_inv(p))
        .collect::<Result<Vec<T>>>()?;
    let upper = T::lit(1.0 - delta) * (T::one() + T::epsilon());
    let mut worst = Worst::new();
    for i in 0..grid_n {
        for j in i..grid_n {
            if ps[i] + ps[j] > upper {
                break;
            }
            let h = hessian_g(f, xs[i], xs[j])?;
            let m = (h.gxx / h.xx_scale)
                .min(h.gyy / h.yy_scale)
                .min(h.det / h.det_scale.abs())
                .to_f64_lossy();
            worst.offer(m, || Witness::Pair {
                x: ps[i].to_f64_lossy(),
                y: ps[j].to_f64_lossy(),
            });
        }
    }
    Ok(worst.report("convex_compose", meta(grid_n, delta), None))
}

/// Pointwise comparison of `sign(J_G)` with `sign(g(a + b) - g(a) - g(b))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignLink {
    pub points: usize,
    pub mismatches: usize,
    /// Largest `|J_G / |scale| - (g(a+b) - g(a) - g(b))|`.
    pub max_gap: f64,
    /// First mismatching probability pair, if any.
    pub first_mismatch: Option<(f64, f64)>,
}

/// For every grid pair `(a, b)` with `a + b <= 1 - delta`, compares the sign
/// of the normalised `J_G` at `(phi^{-1}(a), phi^{-1}(b))` with the sign of the
/// superadditivity margin of `g`. A point is a mismatch when the signs differ
/// and the margin exceeds the band `SLACK + r(a) + r(b)`, where `r` is the
/// residual of the identity `phi'^2/phi'' = g(phi)` (zero up to rounding for
/// closed-form kinds).
pub fn compose_sign_link<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<SignLink> {
    validate_grid(grid_n, delta)?;
    let ps: Vec<T> = unit_grid(grid_n, delta);
    let xs = ps
        .iter()
        .map(|&p| f.phi_inv(p))
        .collect::<Result<Vec<T>>>()?;
    let gs = ps
        .iter()
        .map(|&p| g_func(f, p))
        .collect::<Result<Vec<T>>>()?;
    let resid: Vec<f64> = if f.is_analytic() {
        vec![0.0; grid_n]
    } else {
        f.consistency_residuals(&ps)?
            .iter()
            .map(|r| r.forward.to_f64_lossy())
            .collect()
    };
    let upper = T::lit(1.0 - delta) * (T::one() + T::epsilon());
    let mut link = SignLink {
        points: 0,
        mismatches: 0,
        max_gap: 0.0,
        first_mismatch: None,
    };
    for i in 0..grid_n {
        for j in i..grid_n {
            if ps[i] + ps[j] > upper {
                break;
            }
            let h = hessian_g(f, xs[i], xs[j])?;
            let jn = (h.det / h.det_scale.abs()).to_f64_lossy();
            let gm = (g_func(f, ps[i] + ps[j])? - gs[i] - gs[j]).to_f64_lossy();
            let band = SLACK + resid[i] + resid[j];
            link.points += 1;
            link.max_gap = link.max_gap.max((jn - gm).abs());
            if gm.abs() > band && (jn >= 0.0) != (gm >= 0.0) {
                link.mismatches += 1;
                link.first_mismatch
                    .get_or_insert((ps[i].to_f64_lossy(), ps[j].to_f64_lossy()));
            }
        }
    }
    Ok(link)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::Verdict;

    #[test]
    fn exp_is_additive() {
        let e = DeformedExponential::<f64>::exponential();
        let r = check_superadditive_g(&e, 50, 1e-3).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.worst_margin.abs() < 1e-12);
        assert_eq!(r.strict, Some(false));
        let r = check_concave_g(&e, 50, 1e-3).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.worst_margin.abs() < 1e-12);
    }

    #[test]
    fn qexp_passes() {
        for &q in &[0.3, 0.7] {
            let f = DeformedExponential::<f64>::q_exponential(q).unwrap();
            assert!(check_superadditive_g(&f, 40, 1e-3).unwrap().passed());
            assert!(check_concave_g(&f, 40, 1e-3).unwrap().passed());
            assert!(check_concave_h(&f, 40, 1e-3).unwrap().passed());
            assert!(check_convex_compose(&f, 40, 1e-3).unwrap().passed());
        }
    }

    #[test]
    fn exp_sign_link() {
        let e = DeformedExponential::<f64>::exponential();
        let l = compose_sign_link(&e, 40, 1e-3).unwrap();
        assert_eq!(l.mismatches, 0);
        assert!(l.max_gap < 1e-10);
    }

    #[test]
    fn rejects_bad_grid() {
        let e = DeformedExponential::<f64>::exponential();
        assert!(check_superadditive_g(&e, 1, 1e-3).is_err());
        assert!(check_concave_g(&e, 10, 0.5).is_err());
    }
}
