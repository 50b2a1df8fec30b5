//! Numeric verification of the structural properties of `D_phi`.
//!
//! Every check scans a deterministic grid or a seeded sample, tracks the
//! smallest margin of the inequality under test and reports it together with
//! the point that produced it. A margin below `-SLACK` is a violation.
//!
//! All checks assume the sign convention `(phi^{-1})'' < 0`, under which
//! `g = -(phi^{-1})'/(phi^{-1})''` is positive.

mod brute;
mod characterize;
mod functions;
mod pinsker;
mod scans;

pub use brute::{check_joint_convexity, check_partition_inequality, structured_convexity_scan};
pub use characterize::{characterize_tsallis, Characterization};
pub use functions::{
    f_alpha, f_alpha_limit, f_alpha_quotient, g_compose, g_func, h_func, hessian_f_alpha,
    hessian_g, FAlphaHessian, GHessian,
};
pub use pinsker::{
    binary_pinsker_gap, check_pinsker, pinsker_constant, pinsker_integrand, PinskerEstimate,
};
pub use scans::{
    check_concave_g, check_concave_h, check_convex_compose, check_superadditive_g,
    compose_sign_link, SignLink,
};

use serde::Serialize;

use crate::scalar::Scalar;

/// Pass/Fail threshold on the worst margin.
pub const SLACK: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 200;
pub const DEFAULT_DELTA: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_margin(margin: f64) -> Self {
        if margin < -SLACK {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Where a check found its smallest margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Pair {
        x: f64,
        y: f64,
    },
    Partition {
        p: Vec<f64>,
        q: Vec<f64>,
        partition: Vec<Vec<usize>>,
    },
    Convexity {
        p1: Vec<f64>,
        p2: Vec<f64>,
        q1: Vec<f64>,
        q2: Vec<f64>,
        lambda: f64,
        structured: bool,
    },
    Pinsker {
        p: Vec<f64>,
        q: Vec<f64>,
        divergence: f64,
        l1: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct GridMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Number of evaluated cases.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: &'static str,
    pub verdict: Verdict,
    pub worst_margin: f64,
    pub witness: Option<Witness>,
    pub grid: GridMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Whether the inequality held strictly (margin above `SLACK`) on the
    /// interior grid. Informational only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Running minimum of margins. Ties keep the first witness offered, so a
/// fixed scan order gives reproducible witnesses.
pub(crate) struct Worst {
    margin: f64,
    witness: Option<Witness>,
    samples: usize,
}

impl Worst {
    pub(crate) fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            witness: None,
            samples: 0,
        }
    }

    pub(crate) fn offer<F: FnOnce() -> Witness>(&mut self, margin: f64, witness: F) {
        self.samples += 1;
        if margin < self.margin || (margin.is_nan() && !self.margin.is_nan()) {
            self.margin = margin;
            self.witness = Some(witness());
        }
    }

    pub(crate) fn merge(&mut self, other: Worst) {
        self.samples += other.samples;
        if other.margin < self.margin {
            self.margin = other.margin;
            self.witness = other.witness;
        }
    }

    pub(crate) fn report(
        self,
        check: &'static str,
        grid: GridMeta,
        seed: Option<u64>,
    ) -> CheckReport {
        let margin = if self.samples == 0 { 0.0 } else { self.margin };
        CheckReport {
            check,
            verdict: Verdict::from_margin(margin),
            worst_margin: margin,
            witness: self.witness,
            grid: GridMeta {
                samples: self.samples,
                ..grid
            },
            seed,
            strict: None,
        }
    }
}

/// `grid_n` equally spaced points on `[delta, 1 - delta]`.
pub fn unit_grid<T: Scalar>(grid_n: usize, delta: f64) -> Vec<T> {
    let step = (1.0 - 2.0 * delta) / (grid_n as f64 - 1.0);
    (0..grid_n)
        .map(|k| T::lit(delta + k as f64 * step))
        .collect()
}

pub fn validate_grid(grid_n: usize, delta: f64) -> crate::error::Result<()> {
    if grid_n < 2 {
        return Err(crate::error::Error::Parameter(format!(
            "grid resolution must be at least 2, got {grid_n}"
        )));
    }
    if !(delta > 0.0 && delta < 0.1) {
        return Err(crate::error::Error::Parameter(format!(
            "boundary margin delta must lie in (0, 0.1), got {delta}"
        )));
    }
    Ok(())
}

pub(crate) fn to_f64s<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}
