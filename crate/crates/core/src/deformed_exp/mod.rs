//! Deformed exponential functions.
//!
//! A deformed exponential is a convex, non-decreasing `phi: R -> [0, inf)`
//! with `phi(-inf) = 0` and `phi(+inf) = inf`. Every routine in this crate
//! accesses `phi`, its inverse and their first two derivatives through
//! [`DeformedExponential`].
//!
//! Sign convention: the inverse `phi^{-1}` is concave, so `(phi^{-1})'' < 0`
//! on `(0, 1)` for all built-in kinds.

mod spec;
mod table;
pub mod tsallis;

pub use spec::PhiSpec;
pub use table::NumericTable;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// Which function to differentiate: `phi` or `phi^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind<T> {
    Exponential,
    /// Tsallis `exp_q`, `q` in `(0, 1]`.
    QExponential {
        q: T,
    },
    /// `phi^{-1}(x) = b ln_q(x) - a`, i.e. `phi(y) = exp_q((y + a)/b)`.
    AffineQExp {
        q: T,
        b: T,
        a: T,
    },
    NumericTable(NumericTable<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedExponential<T> {
    kind: Kind<T>,
}

/// Residuals of the two derivative identities linking `phi` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyResidual<T> {
    /// Probability-space grid point `y`.
    pub x: T,
    /// `| phi'(s)^2 / phi''(s) + (phi^{-1})'(y) / (phi^{-1})''(y) |` with `s = phi^{-1}(y)`.
    pub forward: T,
    /// `| (phi^{-1})'(y)^2 / (phi^{-1})''(y) + phi'(s) / phi''(s) |`.
    pub inverse: T,
}

impl<T: Scalar> DeformedExponential<T> {
    pub fn exponential() -> Self {
        Self {
            kind: Kind::Exponential,
        }
    }

    pub fn q_exponential(q: T) -> Result<Self> {
        if !(q > T::zero() && q <= T::one()) {
            return Err(Error::Parameter(format!(
                "q-exponential index must lie in (0, 1], got {q}"
            )));
        }
        Ok(Self {
            kind: Kind::QExponential { q },
        })
    }

    pub fn affine_q_exp(q: T, b: T, a: T) -> Result<Self> {
        if !(q > T::zero() && q.is_finite()) {
            return Err(Error::Parameter(format!(
                "affine q-exponential needs q > 0, got {q}"
            )));
        }
        if !(b > T::zero() && b.is_finite()) {
            return Err(Error::Parameter(format!(
                "affine q-exponential needs b > 0, got {b}"
            )));
        }
        if !a.is_finite() {
            return Err(Error::Parameter(
                "affine q-exponential needs a finite shift".into(),
            ));
        }
        Ok(Self {
            kind: Kind::AffineQExp { q, b, a },
        })
    }

    pub fn from_table(table: NumericTable<T>) -> Self {
        Self {
            kind: Kind::NumericTable(table),
        }
    }

    pub fn kind(&self) -> &Kind<T> {
        &self.kind
    }

    /// True for the closed-form kinds.
    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, Kind::NumericTable(_))
    }

    /// Infimum of `{x : phi(x) > 0}`; for tables, the first tabulated abscissa.
    pub fn support_lower(&self) -> T {
        match &self.kind {
            Kind::Exponential => T::neg_infinity(),
            Kind::QExponential { q } => tsallis::support_lower(*q),
            Kind::AffineQExp { q, b, a } => {
                if *q < T::one() {
                    -*b / (T::one() - *q) - *a
                } else {
                    T::neg_infinity()
                }
            }
            Kind::NumericTable(t) => t.x_range().0,
        }
    }

    /// Supremum of the region where `phi` is finite (the q-exponential pole
    /// for `q > 1`); for tables, the last tabulated abscissa.
    pub fn support_upper(&self) -> T {
        match &self.kind {
            Kind::AffineQExp { q, b, a } if *q > T::one() => *b * tsallis::support_upper(*q) - *a,
            Kind::NumericTable(t) => t.x_range().1,
            _ => T::infinity(),
        }
    }

    pub fn phi(&self, x: T) -> Result<T> {
        match &self.kind {
            Kind::Exponential => Ok(x.exp()),
            Kind::QExponential { q } => Ok(tsallis::exp_q(*q, x)),
            Kind::AffineQExp { q, b, a } => Ok(tsallis::exp_q(*q, (x + *a) / *b)),
            Kind::NumericTable(t) => t.eval(x),
        }
    }

    pub fn phi_inv(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::Domain(format!("phi^-1 needs x > 0, got {x}")));
        }
        match &self.kind {
            Kind::Exponential => Ok(x.ln()),
            Kind::QExponential { q } => tsallis::ln_q(*q, x),
            Kind::AffineQExp { q, b, a } => Ok(*b * tsallis::ln_q(*q, x)? - *a),
            Kind::NumericTable(t) => t.inverse(x),
        }
    }

    pub fn derivative(&self, x: T, order: Order, branch: Branch) -> Result<T> {
        match branch {
            Branch::Forward => self.forward_derivative(x, order),
            Branch::Inverse => self.inverse_derivative(x, order),
        }
    }

    #[inline]
    pub fn dphi(&self, x: T) -> Result<T> {
        self.forward_derivative(x, Order::First)
    }

    #[inline]
    pub fn d2phi(&self, x: T) -> Result<T> {
        self.forward_derivative(x, Order::Second)
    }

    #[inline]
    pub fn dphi_inv(&self, x: T) -> Result<T> {
        self.inverse_derivative(x, Order::First)
    }

    #[inline]
    pub fn d2phi_inv(&self, x: T) -> Result<T> {
        self.inverse_derivative(x, Order::Second)
    }

    fn forward_derivative(&self, x: T, order: Order) -> Result<T> {
        if !(x > self.support_lower() && x < self.support_upper()) {
            return Err(Error::Domain(format!(
                "derivative of phi requested at {x}, outside the open support ({}, {})",
                self.support_lower(),
                self.support_upper()
            )));
        }
        match (&self.kind, order) {
            (Kind::Exponential, _) => Ok(x.exp()),
            (Kind::QExponential { q }, Order::First) => tsallis::exp_q_d1(*q, x),
            (Kind::QExponential { q }, Order::Second) => tsallis::exp_q_d2(*q, x),
            (Kind::AffineQExp { q, b, a }, Order::First) => {
                Ok(tsallis::exp_q_d1(*q, (x + *a) / *b)? / *b)
            }
            (Kind::AffineQExp { q, b, a }, Order::Second) => {
                Ok(tsallis::exp_q_d2(*q, (x + *a) / *b)? / (*b * *b))
            }
            (Kind::NumericTable(t), _) => {
                central_difference(|s| t.eval(s), x, order, x.abs().max(T::one()))
            }
        }
    }

    fn inverse_derivative(&self, x: T, order: Order) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::Domain(format!(
                "derivative of phi^-1 requested at {x}, needs x > 0"
            )));
        }
        match (&self.kind, order) {
            (Kind::Exponential, Order::First) => Ok(x.recip()),
            (Kind::Exponential, Order::Second) => Ok(-(x * x).recip()),
            (Kind::QExponential { q }, Order::First) => tsallis::ln_q_d1(*q, x),
            (Kind::QExponential { q }, Order::Second) => tsallis::ln_q_d2(*q, x),
            (Kind::AffineQExp { q, b, .. }, Order::First) => Ok(*b * tsallis::ln_q_d1(*q, x)?),
            (Kind::AffineQExp { q, b, .. }, Order::Second) => Ok(*b * tsallis::ln_q_d2(*q, x)?),
            // Step scales with x itself: the domain is (0, inf) and the
            // stencil must stay positive.
            (Kind::NumericTable(t), _) => central_difference(|s| t.inverse(s), x, order, x),
        }
    }

    /// Residuals of `phi'^2/phi'' = -(phi^{-1})'/(phi^{-1})''` (composed with
    /// `phi^{-1}`) and `[(phi^{-1})']^2/(phi^{-1})'' = -phi'/phi''` (composed
    /// with `phi^{-1}`) at each probability-space grid point.
    pub fn consistency_residuals(&self, grid: &[T]) -> Result<Vec<ConsistencyResidual<T>>> {
        grid.iter()
            .map(|&y| {
                if !(y > T::zero() && y < T::one()) {
                    return Err(Error::Domain(format!(
                        "consistency grid point {y} is outside (0, 1)"
                    )));
                }
                let s = self.phi_inv(y)?;
                let d1 = self.dphi(s)?;
                let d2 = nonzero(self.d2phi(s)?, "phi''")?;
                let i1 = self.dphi_inv(y)?;
                let i2 = nonzero(self.d2phi_inv(y)?, "(phi^-1)''")?;
                Ok(ConsistencyResidual {
                    x: y,
                    forward: (d1 * d1 / d2 + i1 / i2).abs(),
                    inverse: (i1 * i1 / i2 + d1 / d2).abs(),
                })
            })
            .collect()
    }
}

fn nonzero<T: Scalar>(v: T, what: &str) -> Result<T> {
    if v == T::zero() {
        Err(Error::Singular(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

/// Central differences with `h = eps^{1/3} * scale` (first order) and
/// `h = eps^{1/4} * scale` (second order).
fn central_difference<T, F>(f: F, x: T, order: Order, scale: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    let eps = T::epsilon();
    match order {
        Order::First => {
            let h = eps.cbrt() * scale;
            let (xp, xm) = (x + h, x - h);
            Ok((f(xp)? - f(xm)?) / (xp - xm))
        }
        Order::Second => {
            let h = eps.sqrt().sqrt() * scale;
            let (xp, xm) = (x + h, x - h);
            let two = T::lit(2.0);
            Ok((f(xp)? - two * f(x)? + f(xm)?) / (h * h))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qexp(q: f64) -> DeformedExponential<f64> {
        DeformedExponential::<f64>::q_exponential(q).unwrap()
    }

    #[test]
    fn phi_examples() {
        let e = DeformedExponential::<f64>::exponential();
        assert_eq!(e.phi(0.0).unwrap(), 1.0);
        assert_eq!(qexp(0.5).phi(0.0).unwrap(), 1.0);
        assert_eq!(qexp(0.5).phi(-3.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_inv_examples() {
        let e = DeformedExponential::<f64>::exponential();
        assert_eq!(e.phi_inv(1.0).unwrap(), 0.0);
        assert!((qexp(0.5).phi_inv(0.25).unwrap() + 1.0).abs() < 1e-15);
        let aff = DeformedExponential::<f64>::affine_q_exp(0.5, 2.0, 1.0).unwrap();
        assert!((aff.phi_inv(1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(e.phi_inv(0.0), Err(Error::Domain(_))));
        assert!(matches!(qexp(0.5).phi_inv(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_examples() {
        let f = qexp(0.5);
        let d1 = f.derivative(0.25, Order::First, Branch::Inverse).unwrap();
        let d2 = f.derivative(0.25, Order::Second, Branch::Inverse).unwrap();
        assert!((d1 - 2.0).abs() < 1e-14);
        assert!((d2 + 4.0).abs() < 1e-13);
        let e = DeformedExponential::<f64>::exponential();
        assert_eq!(
            e.derivative(0.0, Order::Second, Branch::Forward).unwrap(),
            1.0
        );
    }

    #[test]
    fn derivative_at_support_boundary_is_an_error() {
        let f = qexp(0.5);
        assert_eq!(f.support_lower(), -2.0);
        assert!(matches!(f.dphi(-2.0), Err(Error::Domain(_))));
        assert!(matches!(f.d2phi(-5.0), Err(Error::Domain(_))));
        assert!(f.dphi(-1.999).is_ok());
    }

    #[test]
    fn affine_q_above_one_pole() {
        let f = DeformedExponential::<f64>::affine_q_exp(2.0, 1.0, 0.0).unwrap();
        assert_eq!(f.support_upper(), 1.0);
        assert!(f.phi(1.5).unwrap().is_infinite());
        assert!(f.dphi(1.0).is_err());
        for &x in &[0.1, 0.5, 0.9] {
            let y = f.phi_inv(x).unwrap();
            assert!((f.phi(y).unwrap() - x).abs() < 1e-14);
            assert!(f.d2phi_inv(x).unwrap() < 0.0);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(DeformedExponential::<f64>::q_exponential(0.0).is_err());
        assert!(DeformedExponential::<f64>::q_exponential(1.5).is_err());
        assert!(DeformedExponential::<f64>::affine_q_exp(0.5, 0.0, 1.0).is_err());
        assert!(DeformedExponential::<f64>::affine_q_exp(-0.5, 1.0, 1.0).is_err());
        assert!(DeformedExponential::<f64>::affine_q_exp(0.5, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn consistency_examples() {
        let e = DeformedExponential::<f64>::exponential();
        let r = e.consistency_residuals(&[0.5]).unwrap();
        assert!(r[0].forward < 1e-15 && r[0].inverse < 1e-15);
        let r = qexp(0.5).consistency_residuals(&[0.25, 0.5]).unwrap();
        assert!(r.iter().all(|c| c.forward < 1e-10 && c.inverse < 1e-10));
        assert!(e.consistency_residuals(&[1.0]).is_err());
    }

    #[test]
    fn consistency_of_sampled_exp_table() {
        let xs: Vec<f64> = (0..=12_000).map(|k| -10.0 + k as f64 * 1e-3).collect();
        let t = NumericTable::sample(xs, f64::exp).unwrap();
        let f = DeformedExponential::from_table(t);
        let r = f.consistency_residuals(&[0.5]).unwrap();
        assert!(r[0].forward < 1e-4, "{:?}", r[0]);
        assert!(r[0].inverse < 1e-4, "{:?}", r[0]);
    }

    #[test]
    fn works_in_single_precision() {
        let f = DeformedExponential::<f32>::q_exponential(0.5).unwrap();
        let y = f.phi_inv(0.25f32).unwrap();
        assert!((y + 1.0).abs() < 1e-6);
        assert!((f.phi(y).unwrap() - 0.25).abs() < 1e-6);
    }
}
