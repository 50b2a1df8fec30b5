#![allow(dead_code)]

use std::path::PathBuf;

use deformed_divergence::error::Error;
use deformed_divergence::sampling::{self, SeededRng};
use deformed_divergence::{DeformedExp64, Dist64, FamilyChart, Table64, TangentVector};
use rand::Rng;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/counterexample_phi.csv")
}

pub fn counterexample() -> DeformedExp64 {
    DeformedExp64::from_table(Table64::from_csv_path(fixture_path()).expect("fixture table"))
}

/// Closed-form kinds used across the tests.
pub fn analytic_kinds() -> Vec<(&'static str, DeformedExp64)> {
    vec![
        ("exp", DeformedExp64::exponential()),
        ("qexp(0.3)", DeformedExp64::q_exponential(0.3).unwrap()),
        ("qexp(0.5)", DeformedExp64::q_exponential(0.5).unwrap()),
        ("qexp(0.8)", DeformedExp64::q_exponential(0.8).unwrap()),
        (
            "affq(0.5,2,1)",
            DeformedExp64::affine_q_exp(0.5, 2.0, 1.0).unwrap(),
        ),
        (
            "affq(1.5,1,0)",
            DeformedExp64::affine_q_exp(1.5, 1.0, 0.0).unwrap(),
        ),
    ]
}

/// The five-member battery for the equivalence harnesses.
pub fn battery() -> Vec<(&'static str, DeformedExp64, bool)> {
    vec![
        ("exp", DeformedExp64::exponential(), true),
        (
            "qexp(0.3)",
            DeformedExp64::q_exponential(0.3).unwrap(),
            true,
        ),
        (
            "qexp(0.7)",
            DeformedExp64::q_exponential(0.7).unwrap(),
            true,
        ),
        (
            "affq(0.5,2,-1)",
            DeformedExp64::affine_q_exp(0.5, 2.0, -1.0).unwrap(),
            true,
        ),
        ("counterexample", counterexample(), false),
    ]
}

/// A random tangent vector of the chart, shrunk until the family member stays
/// inside the simplex interior.
pub fn random_tangent(chart: &FamilyChart<'_, f64>, rng: &mut SeededRng) -> TangentVector<f64> {
    let n = chart.dim();
    let mut scale = rng.random_range(0.05..2.0);
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    loop {
        let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
        let u = chart.project_tangent(&w).unwrap();
        match chart.normalizer(&u) {
            Ok(_) => return u,
            Err(Error::Boundary(_)) => scale *= 0.5,
            Err(e) => panic!("normalizer failed: {e}"),
        }
    }
}

pub fn random_distribution(n: usize, rng: &mut SeededRng) -> Dist64 {
    sampling::dirichlet(n, rng)
}
