//! Deformed exponential family centered at a distribution `p`.
//!
//! With `c_i = phi^{-1}(p_i)` and positive weights `u0` satisfying
//! `sum_i u0_i phi'(c_i) = 1`, a tangent vector `u` (`sum_i u_i phi'(c_i) = 0`)
//! is mapped to `q_i = phi(c_i + u_i - psi(u) u0_i)` where the normalizing
//! function `psi(u) >= 0` is the unique root of
//! `G(lambda) = sum_i phi(c_i + u_i - lambda u0_i) = 1`.

use crate::deformed_exp::DeformedExponential;
use crate::divergence::d_phi_value;
use crate::error::{Error, Result};
use crate::scalar::{kahan_sum, Scalar};
use crate::simplex::{Distribution, INTERIOR_FLOOR};

/// Absolute tolerance for membership in the tangent subspace.
pub const TANGENT_TOL: f64 = 1e-10;
/// Tolerance on the `u0` constraint for user-supplied weights.
pub const U0_TOL: f64 = 1e-8;

const BISECT_WIDTH: f64 = 1e-3;
const ROOT_TOL: f64 = 1e-12;
const BRACKET_TOL: f64 = 1e-14;
const MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub enum U0Spec<T> {
    /// Constant vector scaled to satisfy the constraint.
    Uniform,
    Custom(Vec<T>),
}

#[derive(Debug, Clone)]
pub struct FamilyChart<'a, T> {
    f: &'a DeformedExponential<T>,
    center: Distribution<T>,
    c: Vec<T>,
    dphi_c: Vec<T>,
    u0: Vec<T>,
}

/// A vector of the tangent subspace of a particular chart.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T> {
    u: Vec<T>,
}

impl<T: Scalar> TangentVector<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.u
    }

    pub fn into_vec(self) -> Vec<T> {
        self.u
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|v| *v == T::zero())
    }
}

/// Output of the normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<T> {
    pub psi: T,
    pub q: Distribution<T>,
    /// Final root bracket.
    pub bracket: (T, T),
    pub iterations: usize,
}

pub fn chart_at<'a, T: Scalar>(
    f: &'a DeformedExponential<T>,
    p: &Distribution<T>,
    u0: U0Spec<T>,
) -> Result<FamilyChart<'a, T>> {
    FamilyChart::new(f, p, u0)
}

impl<'a, T: Scalar> FamilyChart<'a, T> {
    pub fn new(f: &'a DeformedExponential<T>, p: &Distribution<T>, u0: U0Spec<T>) -> Result<Self> {
        let c = p
            .weights()
            .iter()
            .map(|&pi| f.phi_inv(pi))
            .collect::<Result<Vec<T>>>()?;
        let dphi_c = c.iter().map(|&ci| f.dphi(ci)).collect::<Result<Vec<T>>>()?;
        if dphi_c.iter().any(|d| !(*d > T::zero())) {
            return Err(Error::Chart(
                "phi' must be positive at the chart center".into(),
            ));
        }
        let raw = match u0 {
            U0Spec::Uniform => vec![T::one(); p.len()],
            U0Spec::Custom(v) => {
                if v.len() != p.len() {
                    return Err(Error::Shape {
                        expected: p.len(),
                        got: v.len(),
                    });
                }
                if let Some(bad) = v.iter().find(|x| !(**x > T::zero()) || !x.is_finite()) {
                    return Err(Error::Chart(format!(
                        "u0 entries must be positive, got {bad}"
                    )));
                }
                let s = weighted_sum(&v, &dphi_c);
                if (s - T::one()).abs() > T::lit(U0_TOL) {
                    return Err(Error::Chart(format!(
                        "u0 violates sum u0_i phi'(c_i) = 1 (got {s})"
                    )));
                }
                v
            }
        };
        let s = weighted_sum(&raw, &dphi_c);
        let u0 = raw.into_iter().map(|v| v / s).collect();
        Ok(Self {
            f,
            center: p.clone(),
            c,
            dphi_c,
            u0,
        })
    }

    pub fn phi(&self) -> &DeformedExponential<T> {
        self.f
    }

    pub fn center(&self) -> &Distribution<T> {
        &self.center
    }

    pub fn coordinates(&self) -> &[T] {
        &self.c
    }

    /// `phi'(c_i)`, the weights defining the tangent subspace.
    pub fn tangent_weights(&self) -> &[T] {
        &self.dphi_c
    }

    pub fn u0(&self) -> &[T] {
        &self.u0
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// `sum_i u_i phi'(c_i)`.
    pub fn tangent_residual(&self, u: &[T]) -> T {
        weighted_sum(u, &self.dphi_c)
    }

    /// Wraps `u` after checking membership in the tangent subspace.
    pub fn tangent(&self, u: Vec<T>) -> Result<TangentVector<T>> {
        self.check_len(u.len())?;
        let r = self.tangent_residual(&u);
        if r.abs() > T::lit(TANGENT_TOL) {
            return Err(Error::Tangent {
                residual: r.to_f64_lossy(),
            });
        }
        Ok(TangentVector { u })
    }

    /// `v - lambda u0` with `lambda = sum v_i phi'(c_i) / sum u0_i phi'(c_i)`.
    pub fn project_tangent(&self, v: &[T]) -> Result<TangentVector<T>> {
        self.check_len(v.len())?;
        let lambda = weighted_sum(v, &self.dphi_c) / weighted_sum(&self.u0, &self.dphi_c);
        let u = v
            .iter()
            .zip(&self.u0)
            .map(|(&vi, &wi)| vi - lambda * wi)
            .collect();
        Ok(TangentVector { u })
    }

    /// `G(lambda) = sum_i phi(c_i + u_i - lambda u0_i)`.
    pub fn mass(&self, u: &TangentVector<T>, lambda: T) -> Result<T> {
        let vals = self
            .c
            .iter()
            .zip(&u.u)
            .zip(&self.u0)
            .map(|((&ci, &ui), &wi)| self.f.phi(ci + ui - lambda * wi))
            .collect::<Result<Vec<T>>>()?;
        Ok(kahan_sum(vals))
    }

    /// Largest `lambda` at which every argument of `phi` stays inside a
    /// tabulated range; `+inf` for closed-form kinds.
    fn lambda_cap(&self, u: &TangentVector<T>) -> T {
        if self.f.is_analytic() {
            return T::infinity();
        }
        let lo = self.f.support_lower();
        self.c
            .iter()
            .zip(&u.u)
            .zip(&self.u0)
            .map(|((&ci, &ui), &wi)| (ci + ui - lo) / wi)
            .fold(T::infinity(), T::min)
    }

    pub fn normalizer(&self, u: &TangentVector<T>) -> Result<Normalized<T>> {
        self.check_len(u.u.len())?;
        let r = self.tangent_residual(&u.u);
        if r.abs() > T::lit(TANGENT_TOL) {
            return Err(Error::Tangent {
                residual: r.to_f64_lossy(),
            });
        }
        if u.is_zero() {
            return Ok(Normalized {
                psi: T::zero(),
                q: self.center.clone(),
                bracket: (T::zero(), T::zero()),
                iterations: 0,
            });
        }
        let one = T::one();
        let g0 = self.mass(u, T::zero())?;
        let (psi, bracket, iterations) = if (g0 - one).abs() <= T::lit(ROOT_TOL) {
            (T::zero(), (T::zero(), T::zero()), 0)
        } else {
            let (lo, hi, glo, ghi) = self.bracket(u, g0)?;
            self.solve(u, lo, hi, glo - one, ghi - one)?
        };
        let q = self
            .c
            .iter()
            .zip(&u.u)
            .zip(&self.u0)
            .map(|((&ci, &ui), &wi)| self.f.phi(ci + ui - psi * wi))
            .collect::<Result<Vec<T>>>()?;
        let floor = T::lit(INTERIOR_FLOOR);
        if let Some((i, v)) = q.iter().enumerate().find(|(_, v)| !(**v > floor)) {
            return Err(Error::Boundary(format!(
                "family member has q_{} = {v} at or below the interior floor; \
                 the tangent vector is too large for this chart",
                i + 1
            )));
        }
        Ok(Normalized {
            psi,
            q: Distribution::new(q)?,
            bracket,
            iterations,
        })
    }

    /// Finds `lo < hi` with `G(lo) >= 1 > G(hi)`, doubling away from zero.
    fn bracket(&self, u: &TangentVector<T>, g0: T) -> Result<(T, T, T, T)> {
        let one = T::one();
        let two = T::lit(2.0);
        if g0 < one {
            // Only reachable through rounding in phi; search below zero.
            let mut lo = -one;
            let mut glo = self.mass(u, lo)?;
            let (mut hi, mut ghi) = (T::zero(), g0);
            for _ in 0..200 {
                if glo >= one {
                    return Ok((lo, hi, glo, ghi));
                }
                hi = lo;
                ghi = glo;
                lo *= two;
                glo = self.mass(u, lo)?;
            }
            return Err(Error::Domain(
                "failed to bracket the normalizing root".into(),
            ));
        }
        let cap = self.lambda_cap(u);
        let (mut lo, mut glo) = (T::zero(), g0);
        let mut hi = one;
        for _ in 0..200 {
            if hi >= cap {
                hi = cap;
                let ghi = self.mass(u, hi)?;
                if ghi >= one {
                    return Err(Error::Boundary(
                        "normalizing root lies outside the tabulated range of phi".into(),
                    ));
                }
                return Ok((lo, hi, glo, ghi));
            }
            let ghi = self.mass(u, hi)?;
            if ghi < one {
                return Ok((lo, hi, glo, ghi));
            }
            lo = hi;
            glo = ghi;
            hi *= two;
        }
        Err(Error::Domain(
            "failed to bracket the normalizing root".into(),
        ))
    }

    /// Bisection down to a bracket of width `1e-3`, then Illinois-modified
    /// secant steps that keep the bracket.
    fn solve(
        &self,
        u: &TangentVector<T>,
        mut a: T,
        mut b: T,
        mut fa: T,
        mut fb: T,
    ) -> Result<(T, (T, T), usize)> {
        let one = T::one();
        let half = T::lit(0.5);
        let tol = T::lit(ROOT_TOL);
        let bracket_tol = |a: T, b: T| {
            let scale = a.abs().max(b.abs()).max(one);
            T::lit(BRACKET_TOL).max(T::lit(8.0) * T::epsilon() * scale)
        };
        let mut side = 0i8;
        for it in 1..=MAX_ITER {
            let width = b - a;
            if width <= bracket_tol(a, b) {
                let best = if fa.abs() <= fb.abs() { a } else { b };
                return Ok((best, (a, b), it));
            }
            let secant = width < T::lit(BISECT_WIDTH) && fa.is_finite() && fb.is_finite();
            let mut x = if secant {
                let s = b - fb * (b - a) / (fb - fa);
                if s > a && s < b {
                    s
                } else {
                    a + width * half
                }
            } else {
                a + width * half
            };
            if x <= a || x >= b {
                x = a + width * half;
            }
            let fx = self.mass(u, x)? - one;
            if fx.abs() < tol {
                return Ok((x, (a, b), it));
            }
            if fx > T::zero() {
                a = x;
                fa = fx;
                if secant && side == 1 {
                    fb *= half;
                }
                side = 1;
            } else {
                b = x;
                fb = fx;
                if secant && side == -1 {
                    fa *= half;
                }
                side = -1;
            }
        }
        let best = if fa.abs() <= fb.abs() { a } else { b };
        Ok((best, (a, b), MAX_ITER))
    }

    /// `|psi(u) - D_phi(p || q)|` for the family member `q` of `u`.
    pub fn verify_psi_identity(&self, u: &TangentVector<T>) -> Result<T> {
        let n = self.normalizer(u)?;
        let d = d_phi_value(self.f, &self.center, &n.q)?;
        Ok((n.psi - d).abs())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            Err(Error::Shape {
                expected: self.dim(),
                got,
            })
        } else {
            Ok(())
        }
    }
}

fn weighted_sum<T: Scalar>(a: &[T], w: &[T]) -> T {
    kahan_sum(a.iter().zip(w).map(|(&x, &y)| x * y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn uniform_exp_chart() {
        let e = DeformedExponential::<f64>::exponential();
        let chart = chart_at(&e, &d(&[0.5, 0.5]), U0Spec::Uniform).unwrap();
        let l = 0.5f64.ln();
        assert_eq!(chart.coordinates(), &[l, l]);
        assert!((chart.u0()[0] - 1.0).abs() < 1e-15 && (chart.u0()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_ones_accepted_for_exp() {
        let e = DeformedExponential::<f64>::exponential();
        let p = d(&[0.1, 0.2, 0.3, 0.4]);
        assert!(chart_at(&e, &p, U0Spec::Custom(vec![1.0; 4])).is_ok());
        assert!(matches!(
            chart_at(&e, &p, U0Spec::Custom(vec![2.0; 4])),
            Err(Error::Chart(_))
        ));
        assert!(matches!(
            chart_at(&e, &p, U0Spec::Custom(vec![1.0, 1.0, 1.0, 0.0])),
            Err(Error::Chart(_))
        ));
    }

    #[test]
    fn qexp_chart_coordinates() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let chart = chart_at(&f, &d(&[0.25, 0.75]), U0Spec::Uniform).unwrap();
        let c = chart.coordinates();
        assert!((c[0] + 1.0).abs() < 1e-15);
        assert!((c[1] - 2.0 * (0.75f64.sqrt() - 1.0)).abs() < 1e-15);
        let s: f64 = chart
            .u0()
            .iter()
            .zip(chart.tangent_weights())
            .map(|(a, b)| a * b)
            .sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let e = DeformedExponential::<f64>::exponential();
        let chart = chart_at(&e, &d(&[0.5, 0.5]), U0Spec::Uniform).unwrap();
        let u = chart.project_tangent(&[1.0, 0.0]).unwrap();
        assert!((u.as_slice()[0] - 0.5).abs() < 1e-15 && (u.as_slice()[1] + 0.5).abs() < 1e-15);
        let again = chart.project_tangent(u.as_slice()).unwrap();
        assert_eq!(again, u);
        let z = chart.project_tangent(chart.u0()).unwrap();
        assert!(z.as_slice().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn zero_tangent_gives_center() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let p = d(&[0.2, 0.3, 0.5]);
        let chart = chart_at(&f, &p, U0Spec::Uniform).unwrap();
        let n = chart
            .normalizer(&chart.tangent(vec![0.0; 3]).unwrap())
            .unwrap();
        assert_eq!(n.psi, 0.0);
        assert_eq!(n.q, p);
        assert_eq!(
            chart
                .verify_psi_identity(&chart.tangent(vec![0.0; 3]).unwrap())
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn ln_cosh_one() {
        let e = DeformedExponential::<f64>::exponential();
        let chart = chart_at(&e, &d(&[0.5, 0.5]), U0Spec::Custom(vec![1.0, 1.0])).unwrap();
        let u = chart.tangent(vec![1.0, -1.0]).unwrap();
        let n = chart.normalizer(&u).unwrap();
        assert!((n.psi - 1f64.cosh().ln()).abs() < 1e-12);
        assert!((n.psi - 0.433781).abs() < 1e-6);
        let z = 1f64.exp() + (-1f64).exp();
        assert!((n.q.weights()[0] - 1f64.exp() / z).abs() < 1e-12);
        assert!(chart.verify_psi_identity(&u).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_non_tangent() {
        let e = DeformedExponential::<f64>::exponential();
        let chart = chart_at(&e, &d(&[0.5, 0.5]), U0Spec::Uniform).unwrap();
        assert!(matches!(
            chart.tangent(vec![1.0, 0.0]),
            Err(Error::Tangent { .. })
        ));
    }

    #[test]
    fn extreme_tangent_on_qexp_hits_boundary() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let chart = chart_at(&f, &d(&[0.5, 0.5]), U0Spec::Uniform).unwrap();
        let u = chart.project_tangent(&[5.0, -5.0]).unwrap();
        assert!(matches!(chart.normalizer(&u), Err(Error::Boundary(_))));
    }

    #[test]
    fn mass_sums_to_one_for_qexp() {
        let f = DeformedExponential::<f64>::q_exponential(0.5).unwrap();
        let chart = chart_at(&f, &d(&[0.1, 0.2, 0.3, 0.4]), U0Spec::Uniform).unwrap();
        let u = chart.project_tangent(&[0.05, -0.02, 0.03, -0.01]).unwrap();
        let n = chart.normalizer(&u).unwrap();
        let raw = chart.mass(&u, n.psi).unwrap();
        assert!((raw - 1.0).abs() < 1e-12);
        assert!(n.psi >= 0.0);
    }
}
