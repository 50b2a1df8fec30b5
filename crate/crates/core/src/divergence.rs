//! The generalized divergence
//!
//! `D_phi(p || q) = sum_i (phi^{-1}(p_i) - phi^{-1}(q_i)) / (phi^{-1})'(p_i)`
//!
//! together with closed-form Kullback–Leibler and Tsallis relative entropies
//! used as independent oracles.

use serde::Serialize;

use crate::deformed_exp::{tsallis, DeformedExponential};
use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, Scalar};
use crate::simplex::{check_len, Distribution};

/// Divergence value with its per-index summands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceValue<T> {
    pub value: T,
    pub terms: Vec<T>,
}

/// Summand `(phi^{-1}(p) - phi^{-1}(q)) / (phi^{-1})'(p)`.
#[inline]
pub fn term<T: Scalar>(f: &DeformedExponential<T>, p: T, q: T) -> Result<T> {
    if p == q {
        return Ok(T::zero());
    }
    Ok((f.phi_inv(p)? - f.phi_inv(q)?) / f.dphi_inv(p)?)
}

pub fn d_phi<T: Scalar>(
    f: &DeformedExponential<T>,
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<DivergenceValue<T>> {
    check_len(p, q)?;
    let terms = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(&pi, &qi)| term(f, pi, qi))
        .collect::<Result<Vec<T>>>()?;
    Ok(DivergenceValue {
        value: kahan_sum(terms.iter().copied()),
        terms,
    })
}

/// Value only; avoids keeping the term vector.
pub fn d_phi_value<T: Scalar>(
    f: &DeformedExponential<T>,
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<T> {
    d_phi(f, p, q).map(|d| d.value)
}

/// `-sum_i p_i ln(q_i / p_i)`.
pub fn kl_closed_form<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    check_len(p, q)?;
    Ok(kahan_sum(
        p.weights()
            .iter()
            .zip(q.weights())
            .map(|(&pi, &qi)| -pi * (qi / pi).ln()),
    ))
}

/// `-sum_i p_i ln_q(q_i / p_i)` for `q_index` in `(0, 1]`.
pub fn tsallis_closed_form<T: Scalar>(
    q_index: T,
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<T> {
    if !(q_index > T::zero() && q_index <= T::one()) {
        return Err(Error::Parameter(format!(
            "Tsallis index must lie in (0, 1], got {q_index}"
        )));
    }
    check_len(p, q)?;
    let terms = p
        .weights()
        .iter()
        .zip(q.weights())
        .map(|(&pi, &qi)| Ok(-pi * tsallis::ln_q(q_index, qi / pi)?))
        .collect::<Result<Vec<T>>>()?;
    Ok(kahan_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn exp_examples() {
        let e = DeformedExponential::<f64>::exponential();
        let p = d(&[0.3, 0.7]);
        assert_eq!(d_phi(&e, &p, &p).unwrap().value, 0.0);
        let v = d_phi(&e, &d(&[0.5, 0.5]), &d(&[0.25, 0.75])).unwrap();
        assert!((v.value - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((v.value - 0.1438).abs() < 1e-4);
        assert_eq!(v.terms.len(), 2);
    }

    #[test]
    fn tsallis_half_example() {
        // -0.5 * [2(sqrt(0.5) - 1) + 2(sqrt(1.5) - 1)]
        let expected = -(0.5f64.sqrt() - 1.0) - (1.5f64.sqrt() - 1.0);
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let (p, q) = (d(&[0.5, 0.5]), d(&[0.25, 0.75]));
        let v = d_phi(&f, &p, &q).unwrap().value;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.06815).abs() < 1e-5);
        assert!((tsallis_closed_form(0.5, &p, &q).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn kl_examples() {
        let p = d(&[0.9, 0.1]);
        let q = d(&[0.5, 0.5]);
        let expected = 0.9 * 1.8f64.ln() + 0.1 * 0.2f64.ln();
        assert!((kl_closed_form(&p, &q).unwrap() - expected).abs() < 1e-15);
        assert_eq!(kl_closed_form(&p, &p).unwrap(), 0.0);
        assert_eq!(
            tsallis_closed_form(1.0, &p, &q).unwrap(),
            kl_closed_form(&p, &q).unwrap()
        );
        assert_eq!(tsallis_closed_form(0.3, &q, &q).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let e = DeformedExponential::<f64>::exponential();
        assert!(matches!(
            d_phi(&e, &d(&[0.5, 0.5]), &d(&[0.2, 0.3, 0.5])),
            Err(Error::Shape { .. })
        ));
        assert!(tsallis_closed_form(1.5, &d(&[0.5, 0.5]), &d(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn terms_sum_to_value() {
        let f = DeformedExponential::<f64>::affine_q_exp(0.7, 2.0, -1.0).unwrap();
        let v = d_phi(&f, &d(&[0.1, 0.2, 0.3, 0.4]), &d(&[0.4, 0.3, 0.2, 0.1])).unwrap();
        let s: f64 = v.terms.iter().sum();
        assert!((s - v.value).abs() < 1e-12);
    }
}
