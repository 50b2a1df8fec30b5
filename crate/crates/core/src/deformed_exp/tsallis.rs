//! Tsallis q-exponential and q-logarithm with their derivatives.
//!
//! `exp_q(x) = [1 + (1-q) x]_+^{1/(1-q)}` and `ln_q(x) = (x^{1-q} - 1)/(1-q)`,
//! with the ordinary `exp`/`ln` at `q = 1`. Evaluation goes through
//! `ln_1p`/`exp_m1` so that the `q -> 1` limit stays accurate.
//!
//! For `q > 1` the q-exponential has a pole at `x = 1/(q-1)`; beyond it the
//! value is reported as `+inf`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `ln(1 + (1-q) x) / (1-q)`, the log of `exp_q(x)` inside its support.
#[inline]
fn log_exp_q<T: Scalar>(q: T, x: T) -> Option<T> {
    let k = T::one() - q;
    let base = k * x;
    if base <= -T::one() {
        None
    } else {
        Some(base.ln_1p() / k)
    }
}

pub fn exp_q<T: Scalar>(q: T, x: T) -> T {
    if q == T::one() {
        return x.exp();
    }
    match log_exp_q(q, x) {
        Some(l) => l.exp(),
        None if q < T::one() => T::zero(),
        None => T::infinity(),
    }
}

/// First derivative `[1+(1-q)x]^{q/(1-q)}`, i.e. `exp_q(x)^q`.
pub fn exp_q_d1<T: Scalar>(q: T, x: T) -> Result<T> {
    if q == T::one() {
        return Ok(x.exp());
    }
    let l = log_exp_q(q, x).ok_or_else(|| outside_support(q, x))?;
    Ok((q * l).exp())
}

/// Second derivative `q [1+(1-q)x]^{(2q-1)/(1-q)}`, i.e. `q exp_q(x)^{2q-1}`.
pub fn exp_q_d2<T: Scalar>(q: T, x: T) -> Result<T> {
    if q == T::one() {
        return Ok(x.exp());
    }
    let l = log_exp_q(q, x).ok_or_else(|| outside_support(q, x))?;
    let two = T::lit(2.0);
    Ok(q * ((two * q - T::one()) * l).exp())
}

pub fn ln_q<T: Scalar>(q: T, x: T) -> Result<T> {
    check_positive(x)?;
    if q == T::one() {
        return Ok(x.ln());
    }
    let k = T::one() - q;
    Ok((k * x.ln()).exp_m1() / k)
}

pub fn ln_q_d1<T: Scalar>(q: T, x: T) -> Result<T> {
    check_positive(x)?;
    Ok((-q * x.ln()).exp())
}

pub fn ln_q_d2<T: Scalar>(q: T, x: T) -> Result<T> {
    check_positive(x)?;
    Ok(-q * ((-q - T::one()) * x.ln()).exp())
}

/// Infimum of the support of `exp_q`: `-1/(1-q)` for `q < 1`, `-inf` otherwise.
pub fn support_lower<T: Scalar>(q: T) -> T {
    if q < T::one() {
        -T::one() / (T::one() - q)
    } else {
        T::neg_infinity()
    }
}

/// Location of the pole of `exp_q` for `q > 1`, `+inf` otherwise.
pub fn support_upper<T: Scalar>(q: T) -> T {
    if q > T::one() {
        T::one() / (q - T::one())
    } else {
        T::infinity()
    }
}

fn check_positive<T: Scalar>(x: T) -> Result<()> {
    if x > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("q-logarithm needs x > 0, got {x}")))
    }
}

fn outside_support<T: Scalar>(q: T, x: T) -> Error {
    Error::Domain(format!(
        "x = {x} is outside the open support of exp_q with q = {q}"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_below_support() {
        assert_eq!(exp_q(0.5f64, -3.0), 0.0);
        assert_eq!(exp_q(0.5f64, -2.0), 0.0);
        assert!(exp_q_d1(0.5f64, -2.0).is_err());
        assert!(exp_q_d2(0.5f64, -2.5).is_err());
    }

    #[test]
    fn pole_for_q_above_one() {
        assert!(exp_q(2.0f64, 1.0).is_infinite());
        assert!((exp_q(2.0f64, 0.5) - 2.0).abs() < 1e-15);
        assert_eq!(support_upper(2.0f64), 1.0);
    }

    #[test]
    fn closed_forms_at_half() {
        // ln_{1/2}(x) = 2(sqrt(x) - 1)
        assert!((ln_q(0.5f64, 0.25).unwrap() + 1.0).abs() < 1e-15);
        assert!((ln_q_d1(0.5f64, 0.25).unwrap() - 2.0).abs() < 1e-15);
        assert!((ln_q_d2(0.5f64, 0.25).unwrap() + 4.0).abs() < 1e-14);
        // exp_{1/2}(x) = (1 + x/2)^2
        assert!((exp_q(0.5f64, 1.0) - 2.25).abs() < 1e-15);
        assert!((exp_q_d1(0.5f64, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((exp_q_d2(0.5f64, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn near_one_is_accurate() {
        let q = 1.0 - 1e-9;
        let k = 1.0 - q;
        for &x in &[0.01, 0.3, 0.9, 2.0] {
            // ln_q(x) = ln x + k ln^2 x / 2 + O(k^2)
            let l = f64::ln(x);
            assert!((ln_q(q, x).unwrap() - (l + k * l * l / 2.0)).abs() < 1e-14);
        }
    }
}
