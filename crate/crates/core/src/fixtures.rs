//! Reference tables used by the test battery.
//!
//! The counterexample is the deformed exponential whose `g` is
//! `x (1 + 0.3 sin^2(3 pi x))`. That `g` is neither superadditive
//! (`g(1/3) < 2 g(1/6)`) nor concave, so every check that depends on either
//! property should fail on it.

use crate::deformed_exp::NumericTable;
use crate::error::Result;

/// Amplitude of the oscillation in the counterexample `g`.
pub const COUNTEREXAMPLE_AMPLITUDE: f64 = 0.3;
/// Integration step in `t = ln p`.
const STEP: f64 = 1e-4;
/// Keep every `STRIDE`-th integration node.
const STRIDE: usize = 20;
const P_MIN: f64 = 1e-10;
const P_MAX: f64 = 4.0;

/// The `g` the counterexample table is built from.
pub fn counterexample_g(x: f64) -> f64 {
    let s = (3.0 * std::f64::consts::PI * x).sin();
    x * (1.0 + COUNTEREXAMPLE_AMPLITUDE * s * s)
}

/// Right-hand side in `t = ln p` for the state `(ln w, y)` with
/// `w = (phi^{-1})'(p)` and `y = phi^{-1}(p)`.
fn rhs(t: f64, state: [f64; 2]) -> [f64; 2] {
    let p = t.exp();
    [-p / counterexample_g(p), (state[0] + t).exp()]
}

fn rk4(t: f64, s: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], c: f64| [a[0] + c * b[0], a[1] + c * b[1]];
    let k1 = rhs(t, s);
    let k2 = rhs(t + h / 2.0, add(s, k1, h / 2.0));
    let k3 = rhs(t + h / 2.0, add(s, k2, h / 2.0));
    let k4 = rhs(t + h, add(s, k3, h));
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Integrates from `t0` towards `t_end`, returning `(p, phi^{-1}(p))` at
/// every `STRIDE`-th node (the start excluded).
fn integrate(t0: f64, t_end: f64, h: f64) -> Vec<(f64, f64)> {
    let steps = ((t_end - t0) / h).abs().ceil() as usize;
    let mut out = Vec::with_capacity(steps / STRIDE + 1);
    let mut s = [0.0, 0.0];
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        s = rk4(t, s, h);
        if (k + 1) % STRIDE == 0 || k + 1 == steps {
            out.push(((t + h).exp(), s[1]));
        }
    }
    out
}

/// Tabulates the counterexample as `(x, phi(x))` rows, normalized by
/// `phi^{-1}(1/2) = 0` and `(phi^{-1})'(1/2) = 1`, covering
/// `phi` values in `[1e-10, 4]`.
pub fn counterexample_table() -> Result<NumericTable<f64>> {
    let t0 = 0.5f64.ln();
    let mut lower = integrate(t0, P_MIN.ln(), -STEP);
    lower.reverse();
    let upper = integrate(t0, P_MAX.ln(), STEP);
    let rows: Vec<(f64, f64)> = lower
        .into_iter()
        .chain(std::iter::once((0.5, 0.0)))
        .chain(upper)
        .collect();
    let xs = rows.iter().map(|r| r.1).collect();
    let ys = rows.iter().map(|r| r.0).collect();
    NumericTable::new(xs, ys)
}
