//! Pinsker constant estimation and the Pinsker inequality check.

use serde::Serialize;

use super::{to_f64s, unit_grid, validate_grid, CheckReport, GridMeta, Verdict, Witness, Worst};
use crate::deformed_exp::DeformedExponential;
use crate::divergence::{d_phi_value, term};
use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::Scalar;
use crate::simplex::l1_distance;

const REFINE_ITERS: usize = 3;
const REFINE_HALF_WIDTH: i32 = 2;
/// Grid estimates are flagged when more than this share of pairs fails to evaluate.
const MAX_EXCLUDED_SHARE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinskerEstimate {
    pub c_hat: f64,
    /// `(p, q)` with `p < q` attaining `c_hat`.
    pub argmin_pair: (f64, f64),
    pub grid: GridMeta,
    /// Pairs dropped because a derivative could not be evaluated.
    pub excluded: usize,
    /// `Pass` for a positive estimate, `Fail` when `c_hat <= 0`,
    /// `Inconclusive` when too many grid pairs were excluded.
    pub verdict: Verdict,
}

/// `(1/8) (1/(q-p)) [ -(phi^{-1})'(q)/(phi^{-1})'(p) + (phi^{-1})'(1-q)/(phi^{-1})'(1-p) ]`.
pub fn pinsker_integrand<T: Scalar>(f: &DeformedExponential<T>, p: T, q: T) -> Result<T> {
    let one = T::one();
    let bracket = -f.dphi_inv(q)? / f.dphi_inv(p)? + f.dphi_inv(one - q)? / f.dphi_inv(one - p)?;
    Ok(bracket / (q - p) / T::lit(8.0))
}

/// Grid minimum of [`pinsker_integrand`] over `delta <= p < q <= 1 - delta`,
/// including the near-diagonal pairs `q = p + delta`, followed by three
/// local refinement passes at halved spacing around the argmin.
pub fn pinsker_constant<T: Scalar>(
    f: &DeformedExponential<T>,
    grid_n: usize,
    delta: f64,
) -> Result<PinskerEstimate> {
    validate_grid(grid_n, delta)?;
    let xs: Vec<f64> = unit_grid(grid_n, delta);
    let hi = 1.0 - delta;
    let mut best = (f64::INFINITY, (f64::NAN, f64::NAN));
    let mut evaluated = 0usize;
    let mut excluded = 0usize;
    let mut visit = |p: f64, q: f64, best: &mut (f64, (f64, f64))| match pinsker_integrand(
        f,
        T::lit(p),
        T::lit(q),
    ) {
        Ok(v) if v.is_finite() => {
            evaluated += 1;
            let v = v.to_f64_lossy();
            if v < best.0 {
                *best = (v, (p, q));
            }
        }
        _ => excluded += 1,
    };
    for i in 0..grid_n {
        for j in i + 1..grid_n {
            visit(xs[i], xs[j], &mut best);
        }
        let q = xs[i] + delta;
        if q <= hi {
            visit(xs[i], q, &mut best);
        }
    }
    let mut spacing = (1.0 - 2.0 * delta) / (grid_n as f64 - 1.0);
    for _ in 0..REFINE_ITERS {
        spacing *= 0.5;
        let (p0, q0) = best.1;
        if !p0.is_finite() {
            break;
        }
        for di in -REFINE_HALF_WIDTH..=REFINE_HALF_WIDTH {
            for dj in -REFINE_HALF_WIDTH..=REFINE_HALF_WIDTH {
                let p = p0 + di as f64 * spacing;
                let q = q0 + dj as f64 * spacing;
                if p >= delta && q <= hi && q - p >= delta * 0.125 {
                    visit(p, q, &mut best);
                }
            }
        }
    }
    let total = evaluated + excluded;
    let verdict = if total == 0 || excluded as f64 > MAX_EXCLUDED_SHARE * total as f64 {
        Verdict::Inconclusive
    } else if best.0 > 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(PinskerEstimate {
        c_hat: best.0,
        argmin_pair: best.1,
        grid: GridMeta {
            resolution: Some(grid_n),
            delta: Some(delta),
            samples: evaluated,
        },
        excluded,
        verdict,
    })
}

/// `D(p || q) - c ||p - q||_1^2` over `trials` seeded pairs (alternating
/// independent and near-diagonal draws).
pub fn check_pinsker<T: Scalar>(
    f: &DeformedExponential<T>,
    c: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<CheckReport> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Parameter(format!(
            "Pinsker constant must be positive, got {c}"
        )));
    }
    if n < 2 || trials == 0 {
        return Err(Error::Parameter(
            "need n >= 2 and at least one trial".into(),
        ));
    }
    let mut rng = sampling::seeded(seed);
    let cc = T::lit(c);
    let mut worst = Worst::new();
    for trial in 0..trials {
        let (p, q) = sampling::pair::<T, _>(n, trial, &mut rng);
        let d = d_phi_value(f, &p, &q)?;
        let l1 = l1_distance(&p, &q)?;
        let m = (d - cc * l1 * l1).to_f64_lossy();
        worst.offer(m, || Witness::Pinsker {
            p: to_f64s(p.weights()),
            q: to_f64s(q.weights()),
            divergence: d.to_f64_lossy(),
            l1: l1.to_f64_lossy(),
        });
    }
    Ok(worst.report("pinsker", GridMeta::default(), Some(seed)))
}

/// Binary reduction `F(q) = D((p, 1-p) || (q, 1-q)) - 4 c (p - q)^2`, which
/// is minimised (at zero) by `q = p` whenever `c` is a valid constant.
pub fn binary_pinsker_gap<T: Scalar>(f: &DeformedExponential<T>, c: T, p: T, q: T) -> Result<T> {
    let one = T::one();
    let d = term(f, p, q)? + term(f, one - p, one - q)?;
    Ok(d - T::lit(4.0) * c * (p - q) * (p - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_integrand_closed_form() {
        // -p/q + (1-p)/(1-q) over (q - p) is 1/(q(1-q))
        let e = DeformedExponential::<f64>::exponential();
        let v = pinsker_integrand(&e, 0.2, 0.7).unwrap();
        assert!((v - 1.0 / (8.0 * 0.7 * 0.3)).abs() < 1e-14);
    }

    #[test]
    fn coarse_constants() {
        let e = DeformedExponential::<f64>::exponential();
        let est = pinsker_constant(&e, 41, 1e-3).unwrap();
        assert!((est.c_hat - 0.5).abs() < 1e-3, "{}", est.c_hat);
        assert_eq!(est.verdict, Verdict::Pass);
        assert_eq!(est.excluded, 0);
        assert!(est.argmin_pair.0 < est.argmin_pair.1);
    }

    #[test]
    fn rejects_bad_constant() {
        let e = DeformedExponential::<f64>::exponential();
        assert!(check_pinsker(&e, 0.0, 2, 10, 0).is_err());
        assert!(check_pinsker(&e, f64::NAN, 2, 10, 0).is_err());
    }

    #[test]
    fn gap_vanishes_on_diagonal() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        assert_eq!(binary_pinsker_gap(&f, 0.25, 0.3, 0.3).unwrap(), 0.0);
    }
}
