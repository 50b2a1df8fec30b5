//! Generalized divergences `D_phi(p || q)` built from deformed exponentials.
//!
//! | module | contents |
//! |---|---|
//! | [`deformed_exp`] | `phi`, its inverse and derivatives: `exp`, Tsallis `exp_q`, affine `exp_q`, tabulated |
//! | [`simplex`] | interior distributions, partitions and coarsening |
//! | [`divergence`] | `D_phi` and the KL / Tsallis closed forms |
//! | [`family`] | deformed exponential family charts and the normalizing function |
//! | [`properties`] | numeric checks of superadditivity, concavity, partition inequality, joint convexity, Pinsker |
//! | [`cli`] | the `dphi` command-line front end |
//!
//! Everything numeric is generic over [`Scalar`] (`f32` and `f64`); the
//! aliases below fix `f64` or `f32`.
//!
//! ```
//! use deformed_divergence::{d_phi, DeformedExp64, Dist64};
//!
//! let f = DeformedExp64::exponential();
//! let p = Dist64::new(vec![0.5, 0.5]).unwrap();
//! let q = Dist64::new(vec![0.25, 0.75]).unwrap();
//! let kl = d_phi(&f, &p, &q).unwrap().value;
//! assert!((kl - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
//! ```

// `!(x > 0)` is used on purpose so that NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod deformed_exp;
pub mod divergence;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod properties;
pub mod sampling;
pub mod scalar;
pub mod simplex;

pub use deformed_exp::{Branch, DeformedExponential, Kind, NumericTable, Order, PhiSpec};
pub use divergence::{d_phi, d_phi_value, kl_closed_form, tsallis_closed_form, DivergenceValue};
pub use error::{Error, Result};
pub use family::{chart_at, FamilyChart, Normalized, TangentVector, U0Spec};
pub use properties::{CheckReport, Verdict, Witness};
pub use scalar::Scalar;
pub use simplex::{coarsen, l1_distance, make_distribution, Distribution, Partition};

pub type DeformedExp64 = DeformedExponential<f64>;
pub type DeformedExp32 = DeformedExponential<f32>;
pub type Dist64 = Distribution<f64>;
pub type Dist32 = Distribution<f32>;
pub type Table64 = NumericTable<f64>;
pub type Table32 = NumericTable<f32>;
pub type Chart64<'a> = FamilyChart<'a, f64>;
pub type Chart32<'a> = FamilyChart<'a, f32>;
