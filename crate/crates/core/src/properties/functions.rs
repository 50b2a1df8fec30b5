//! The scalar functions `g`, `h`, `F_alpha`, `G` and closed-form Hessians.

use crate::deformed_exp::DeformedExponential;
use crate::divergence::term;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `g(x) = -(phi^{-1})'(x) / (phi^{-1})''(x)`.
pub fn g_func<T: Scalar>(f: &DeformedExponential<T>, x: T) -> Result<T> {
    let d2 = f.d2phi_inv(x)?;
    if d2 == T::zero() {
        return Err(Error::Singular(format!("(phi^-1)'' vanishes at {x}")));
    }
    Ok(-f.dphi_inv(x)? / d2)
}

/// `h(x) = phi'(x) / phi''(x)`.
pub fn h_func<T: Scalar>(f: &DeformedExponential<T>, x: T) -> Result<T> {
    let d2 = f.d2phi(x)?;
    if d2 == T::zero() {
        return Err(Error::Singular(format!("phi'' vanishes at {x}")));
    }
    Ok(f.dphi(x)? / d2)
}

/// `F_alpha(x, y) = phi((1 - alpha) phi^{-1}(x) + alpha phi^{-1}(y))`.
pub fn f_alpha<T: Scalar>(f: &DeformedExponential<T>, alpha: T, x: T, y: T) -> Result<T> {
    f.phi(z_alpha(f, alpha, x, y)?)
}

fn z_alpha<T: Scalar>(f: &DeformedExponential<T>, alpha: T, x: T, y: T) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok((T::one() - alpha) * f.phi_inv(x)? + alpha * f.phi_inv(y)?)
}

/// `(y - F_alpha(x, y)) / (1 - alpha)`; tends to [`f_alpha_limit`] as `alpha -> 1`.
pub fn f_alpha_quotient<T: Scalar>(f: &DeformedExponential<T>, alpha: T, x: T, y: T) -> Result<T> {
    Ok((y - f_alpha(f, alpha, x, y)?) / (T::one() - alpha))
}

/// `(phi^{-1}(y) - phi^{-1}(x)) / (phi^{-1})'(y)`.
pub fn f_alpha_limit<T: Scalar>(f: &DeformedExponential<T>, x: T, y: T) -> Result<T> {
    term(f, y, x)
}

/// `G(x, y) = phi^{-1}(phi(x) + phi(y))`, defined where `phi(x) + phi(y)` lies in `(0, 1)`.
pub fn g_compose<T: Scalar>(f: &DeformedExponential<T>, x: T, y: T) -> Result<T> {
    let z = compose_arg(f, x, y)?;
    f.phi_inv(z)
}

fn compose_arg<T: Scalar>(f: &DeformedExponential<T>, x: T, y: T) -> Result<T> {
    let z = f.phi(x)? + f.phi(y)?;
    if !(z > T::zero() && z < T::one()) {
        return Err(Error::Domain(format!(
            "phi(x) + phi(y) = {z} is outside (0, 1)"
        )));
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHessian<T> {
    pub gxx: T,
    pub gyy: T,
    pub gxy: T,
    /// `gxx * gyy - gxy^2`.
    pub det: T,
    /// `(phi^{-1})'(z) (phi^{-1})''(z) phi''(x) phi''(y)`; `det` divided by
    /// its magnitude equals `g(z) - phi'(x)^2/phi''(x) - phi'(y)^2/phi''(y)`.
    pub det_scale: T,
    /// `-phi''(x) (phi^{-1})''(z)`, which normalises `gxx` to `g(z) - phi'(x)^2/phi''(x)`.
    pub xx_scale: T,
    pub yy_scale: T,
    pub z: T,
}

pub fn hessian_g<T: Scalar>(f: &DeformedExponential<T>, x: T, y: T) -> Result<GHessian<T>> {
    let z = compose_arg(f, x, y)?;
    let (d1x, d2x) = (f.dphi(x)?, f.d2phi(x)?);
    let (d1y, d2y) = (f.dphi(y)?, f.d2phi(y)?);
    let (i1, i2) = (f.dphi_inv(z)?, f.d2phi_inv(z)?);
    let gxx = d2x * i1 + d1x * d1x * i2;
    let gyy = d2y * i1 + d1y * d1y * i2;
    let gxy = d1x * d1y * i2;
    Ok(GHessian {
        gxx,
        gyy,
        gxy,
        det: gxx * gyy - gxy * gxy,
        det_scale: i1 * i2 * d2x * d2y,
        xx_scale: -d2x * i2,
        yy_scale: -d2y * i2,
        z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FAlphaHessian<T> {
    pub fxx: T,
    pub fyy: T,
    pub fxy: T,
    pub det: T,
    /// `alpha (1-alpha) phi'(z) phi''(z) (phi^{-1})''(x) (phi^{-1})''(y)`;
    /// `det / det_scale = h(z) + alpha [(phi^{-1})'(y)]^2/(phi^{-1})''(y)
    /// + (1-alpha) [(phi^{-1})'(x)]^2/(phi^{-1})''(x)`.
    pub det_scale: T,
    pub z_alpha: T,
}

pub fn hessian_f_alpha<T: Scalar>(
    f: &DeformedExponential<T>,
    alpha: T,
    x: T,
    y: T,
) -> Result<FAlphaHessian<T>> {
    let z = z_alpha(f, alpha, x, y)?;
    let a = T::one() - alpha;
    let b = alpha;
    let (p1, p2) = (f.dphi(z)?, f.d2phi(z)?);
    let (ax, ax2) = (f.dphi_inv(x)?, f.d2phi_inv(x)?);
    let (by, by2) = (f.dphi_inv(y)?, f.d2phi_inv(y)?);
    let fxx = a * ax2 * p1 + (a * ax) * (a * ax) * p2;
    let fyy = b * by2 * p1 + (b * by) * (b * by) * p2;
    let fxy = a * b * ax * by * p2;
    Ok(FAlphaHessian {
        fxx,
        fyy,
        fxy,
        det: fxx * fyy - fxy * fxy,
        det_scale: a * b * p1 * p2 * ax2 * by2,
        z_alpha: z,
    })
}
