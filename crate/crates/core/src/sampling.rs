//! Seeded random draws used by the property checks.
//!
//! Distributions are symmetric Dirichlet(1) draws (normalized exponential
//! variates) lifted to the interior floor. Checks that need near-diagonal
//! pairs use multiplicative log-normal perturbations of a base draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::scalar::Scalar;
use crate::simplex::{Distribution, Partition};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dirichlet<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Distribution<T> {
    let draws: Vec<T> = (0..n).map(|_| T::lit(rng.sample::<f64, _>(Exp1))).collect();
    Distribution::from_unnormalized(draws).expect("exponential draws are positive")
}

/// `q_i ∝ p_i exp(scale z_i)` with standard normal `z`.
pub fn perturb<T: Scalar, R: Rng + ?Sized>(
    p: &Distribution<T>,
    scale: f64,
    rng: &mut R,
) -> Distribution<T> {
    let w: Vec<T> = p
        .weights()
        .iter()
        .map(|&pi| {
            let z: f64 = rng.sample(StandardNormal);
            pi * T::lit(scale * z).exp()
        })
        .collect();
    Distribution::from_unnormalized(w).expect("perturbed weights are positive")
}

/// Log-uniform perturbation scale in `[1e-3, 1e-1]`.
pub fn local_scale<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    10f64.powf(rng.random_range(-3.0..-1.0))
}

/// A pair `(p, q)`: independent Dirichlet draws on even trials, a local
/// perturbation `q` of `p` on odd trials.
pub fn pair<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    trial: usize,
    rng: &mut R,
) -> (Distribution<T>, Distribution<T>) {
    let p = dirichlet(n, rng);
    let q = if trial.is_multiple_of(2) {
        dirichlet(n, rng)
    } else {
        let s = local_scale(rng);
        perturb(&p, s, rng)
    };
    (p, q)
}

/// Uniform block count in `1..=n`, then uniform labels.
pub fn partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a: Distribution<f64> = dirichlet(5, &mut seeded(3));
        let b: Distribution<f64> = dirichlet(5, &mut seeded(3));
        assert_eq!(a, b);
    }

    #[test]
    fn draws_are_interior() {
        let mut rng = seeded(11);
        for n in 2..9 {
            let p: Distribution<f64> = dirichlet(n, &mut rng);
            let q = perturb(&p, 0.1, &mut rng);
            assert_eq!(p.len(), n);
            let s: f64 = q.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_partitions_are_valid() {
        let mut rng = seeded(5);
        for _ in 0..100 {
            let a = partition(7, &mut rng);
            assert!(Partition::new(a.blocks().to_vec(), 7).is_ok());
        }
    }
}
