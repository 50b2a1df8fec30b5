//! Sampling checks of the partition inequality and joint convexity directly
//! on `D_phi`.

use super::{to_f64s, CheckReport, GridMeta, Witness, Worst};
use crate::deformed_exp::DeformedExponential;
use crate::divergence::d_phi_value;
use crate::error::{Error, Result};
use crate::sampling;
use crate::scalar::Scalar;
use crate::simplex::{Distribution, Partition};

/// Exhaustive partition enumeration up to this size (Bell(6) = 203).
pub const ENUMERATION_LIMIT: usize = 6;
/// Random partitions per trial above the enumeration limit.
pub const SAMPLED_PARTITIONS: usize = 50;
const STRUCTURED_STEPS: usize = 9;

/// `D(p || q) - D(p^A || q^A)` over `trials` seeded pairs and every
/// non-identity partition (`n <= 6`) or 50 random partitions per pair.
pub fn check_partition_inequality<T: Scalar>(
    f: &DeformedExponential<T>,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<CheckReport> {
    check_sizes(n, 2, trials)?;
    let mut rng = sampling::seeded(seed);
    let all: Option<Vec<Partition>> =
        (n <= ENUMERATION_LIMIT).then(|| Partition::enumerate(n).collect());
    let mut worst = Worst::new();
    for trial in 0..trials {
        let (p, q) = sampling::pair::<T, _>(n, trial, &mut rng);
        let full = d_phi_value(f, &p, &q)?;
        let sampled: Vec<Partition>;
        let parts: &[Partition] = match &all {
            Some(v) => v,
            None => {
                sampled = (0..SAMPLED_PARTITIONS)
                    .map(|_| sampling::partition(n, &mut rng))
                    .collect();
                &sampled
            }
        };
        // The identity partition gives a zero margin by construction.
        for a in parts.iter().filter(|a| !a.is_identity()) {
            let coarse = d_phi_value(f, &p.coarsen(a)?, &q.coarsen(a)?)?;
            let m = (full - coarse).to_f64_lossy();
            worst.offer(m, || Witness::Partition {
                p: to_f64s(p.weights()),
                q: to_f64s(q.weights()),
                partition: a.one_based(),
            });
        }
    }
    Ok(worst.report("partition", GridMeta::default(), Some(seed)))
}

fn convexity_margin<T: Scalar>(
    f: &DeformedExponential<T>,
    p1: &Distribution<T>,
    p2: &Distribution<T>,
    q1: &Distribution<T>,
    q2: &Distribution<T>,
    lambda: T,
) -> Result<T> {
    let lhs = lambda * d_phi_value(f, p1, q1)? + (T::one() - lambda) * d_phi_value(f, p2, q2)?;
    let pm = p1.mix(p2, lambda)?;
    let qm = q1.mix(q2, lambda)?;
    Ok(lhs - d_phi_value(f, &pm, &qm)?)
}

/// Joint convexity over seeded quadruples and every `lambda`, combined with
/// [`structured_convexity_scan`] when `n >= 3`.
pub fn check_joint_convexity<T: Scalar>(
    f: &DeformedExponential<T>,
    n: usize,
    trials: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<CheckReport> {
    check_sizes(n, 2, trials)?;
    if let Some(l) = lambdas.iter().find(|l| !(**l >= 0.0 && **l <= 1.0)) {
        return Err(Error::Parameter(format!(
            "lambda must lie in [0, 1], got {l}"
        )));
    }
    let mut rng = sampling::seeded(seed);
    let mut worst = Worst::new();
    for trial in 0..trials {
        let (p1, q1) = sampling::pair::<T, _>(n, trial, &mut rng);
        let (p2, q2) = sampling::pair::<T, _>(n, trial, &mut rng);
        for &lambda in lambdas {
            let m = convexity_margin(f, &p1, &p2, &q1, &q2, T::lit(lambda))?.to_f64_lossy();
            worst.offer(m, || Witness::Convexity {
                p1: to_f64s(p1.weights()),
                p2: to_f64s(p2.weights()),
                q1: to_f64s(q1.weights()),
                q2: to_f64s(q2.weights()),
                lambda,
                structured: false,
            });
        }
    }
    if n >= 3 {
        let bases = (trials / 10).max(1);
        let s = structured_worst(f, n, bases, seed.wrapping_add(1))?;
        worst.merge(s);
    }
    Ok(worst.report("convexity", GridMeta::default(), Some(seed)))
}

/// The two-coordinate swap construction at `lambda = 1/2`:
/// `p1 = (a, b, c, t1)`, `p2 = (b, a, c, t2)`,
/// `q1 = (a + x, b + y, c - x - y, t1)`, `q2 = (b + y, a + x, c - x - y, t2)`,
/// scanning a 9x9 grid of perturbations `(x, y)` around each of `bases`
/// seeded base points.
pub fn structured_convexity_scan<T: Scalar>(
    f: &DeformedExponential<T>,
    n: usize,
    bases: usize,
    seed: u64,
) -> Result<CheckReport> {
    check_sizes(n, 3, bases)?;
    let w = structured_worst(f, n, bases, seed)?;
    Ok(w.report("convexity_structured", GridMeta::default(), Some(seed)))
}

fn structured_worst<T: Scalar>(
    f: &DeformedExponential<T>,
    n: usize,
    bases: usize,
    seed: u64,
) -> Result<Worst> {
    let mut rng = sampling::seeded(seed);
    let mut worst = Worst::new();
    let half = T::lit(0.5);
    for _ in 0..bases {
        let r: Distribution<T> = sampling::dirichlet(n, &mut rng);
        let w = r.weights();
        let (a, b, c) = (w[0], w[1], w[2]);
        let t1: Vec<T> = w[3..].to_vec();
        let t2: Vec<T> = if n > 3 {
            let other: Distribution<T> = sampling::dirichlet(n - 3, &mut rng);
            let mass: T = t1.iter().copied().sum();
            other.weights().iter().map(|&v| v * mass).collect()
        } else {
            Vec::new()
        };
        let build = |head: [T; 3], tail: &[T]| -> Result<Distribution<T>> {
            let mut v = head.to_vec();
            v.extend_from_slice(tail);
            Distribution::from_unnormalized(v)
        };
        let p1 = build([a, b, c], &t1)?;
        let p2 = build([b, a, c], &t2)?;
        let radius = T::lit(0.45) * a.min(b).min(c * half);
        for i in 0..STRUCTURED_STEPS {
            for j in 0..STRUCTURED_STEPS {
                if 2 * i == STRUCTURED_STEPS - 1 && i == j {
                    // q = p: both sides vanish.
                    continue;
                }
                let step = |k: usize| {
                    radius * (T::lit(2.0 * k as f64 / (STRUCTURED_STEPS - 1) as f64) - T::one())
                };
                let (x, y) = (step(i), step(j));
                let q1 = build([a + x, b + y, c - x - y], &t1)?;
                let q2 = build([b + y, a + x, c - x - y], &t2)?;
                let m = convexity_margin(f, &p1, &p2, &q1, &q2, half)?.to_f64_lossy();
                worst.offer(m, || Witness::Convexity {
                    p1: to_f64s(p1.weights()),
                    p2: to_f64s(p2.weights()),
                    q1: to_f64s(q1.weights()),
                    q2: to_f64s(q2.weights()),
                    lambda: 0.5,
                    structured: true,
                });
            }
        }
    }
    Ok(worst)
}

fn check_sizes(n: usize, min_n: usize, trials: usize) -> Result<()> {
    if n < min_n {
        return Err(Error::Parameter(format!(
            "n must be at least {min_n}, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::Parameter("at least one trial is required".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properties::Verdict;

    #[test]
    fn exp_partition_small() {
        let e = DeformedExponential::<f64>::exponential();
        let r = check_partition_inequality(&e, 4, 20, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.grid.samples, 20 * 14);
    }

    #[test]
    fn sampled_partitions_above_limit() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let r = check_partition_inequality(&f, 8, 5, 2).unwrap();
        assert_eq!(r.grid.samples, 5 * SAMPLED_PARTITIONS);
        assert!(r.passed());
    }

    #[test]
    fn degenerate_lambdas_are_equalities() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let r = check_joint_convexity(&f, 2, 30, &[0.0, 1.0], 9).unwrap();
        assert!(r.worst_margin.abs() < 1e-12, "{}", r.worst_margin);
    }

    #[test]
    fn structured_needs_three_coordinates() {
        let e = DeformedExponential::<f64>::exponential();
        assert!(structured_convexity_scan(&e, 2, 3, 0).is_err());
        let r = structured_convexity_scan(&e, 3, 3, 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.grid.samples, 3 * (STRUCTURED_STEPS * STRUCTURED_STEPS - 1));
    }

    #[test]
    fn bad_parameters() {
        let e = DeformedExponential::<f64>::exponential();
        assert!(check_partition_inequality(&e, 1, 5, 0).is_err());
        assert!(check_partition_inequality(&e, 3, 0, 0).is_err());
        assert!(check_joint_convexity(&e, 3, 5, &[1.5], 0).is_err());
    }
}
