//! Tabulated deformed exponentials: monotone cubic (Fritsch–Carlson)
//! interpolation of `phi`, bisection for its inverse.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Samples `(x_k, phi(x_k))` with strictly increasing `x` and `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Scalar> NumericTable<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::Parameter(
                "a table needs at least two samples".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("table entries must be finite".into()));
        }
        if ys[0] < T::zero() {
            return Err(Error::Parameter(
                "tabulated phi must be non-negative".into(),
            ));
        }
        for k in 1..xs.len() {
            if xs[k] <= xs[k - 1] {
                return Err(Error::Parameter(format!(
                    "x must be strictly increasing (row {})",
                    k + 1
                )));
            }
            if ys[k] <= ys[k - 1] {
                return Err(Error::Parameter(format!(
                    "phi must be strictly increasing (row {})",
                    k + 1
                )));
            }
        }
        let slopes = pchip_slopes(&xs, &ys);
        Ok(Self { xs, ys, slopes })
    }

    /// Tabulates `phi` at the given abscissae.
    pub fn sample<F: Fn(T) -> T>(xs: Vec<T>, phi: F) -> Result<Self> {
        let ys = xs.iter().map(|&x| phi(x)).collect();
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    /// Tabulated x range.
    pub fn x_range(&self) -> (T, T) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Tabulated phi range, i.e. the domain of the inverse.
    pub fn y_range(&self) -> (T, T) {
        (self.ys[0], self.ys[self.ys.len() - 1])
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain(format!(
                "x = {x} is outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let k = self.interval(&self.xs, x);
        Ok(self.hermite(k, x))
    }

    pub fn inverse(&self, y: T) -> Result<T> {
        let (lo, hi) = self.y_range();
        if !(y >= lo && y <= hi) {
            return Err(Error::Domain(format!(
                "phi value {y} is outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let k = self.interval(&self.ys, y);
        if y == self.ys[k] {
            return Ok(self.xs[k]);
        }
        if y == self.ys[k + 1] {
            return Ok(self.xs[k + 1]);
        }
        let (mut a, mut b) = (self.xs[k], self.xs[k + 1]);
        let two = T::lit(2.0);
        // The Hermite piece is monotone on [a, b]; bisect until the bracket
        // no longer shrinks in floating point.
        for _ in 0..256 {
            let mid = a + (b - a) / two;
            if mid <= a || mid >= b {
                break;
            }
            if self.hermite(k, mid) < y {
                a = mid;
            } else {
                b = mid;
            }
        }
        let (fa, fb) = (self.hermite(k, a), self.hermite(k, b));
        Ok(if (y - fa).abs() <= (fb - y).abs() {
            a
        } else {
            b
        })
    }

    /// Index `k` of the interval `[v_k, v_{k+1}]` that contains `t`.
    fn interval(&self, v: &[T], t: T) -> usize {
        let idx = v.partition_point(|&s| s <= t);
        idx.saturating_sub(1).min(v.len() - 2)
    }

    fn hermite(&self, k: usize, x: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let omt = one - t;
        let h00 = (one + two * t) * omt * omt;
        let h10 = t * omt * omt;
        let h01 = t * t * (three - two * t);
        let h11 = t * t * (t - one);
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }

    /// Reads a two-column CSV `x,phi(x)`. A non-numeric first row is taken
    /// as a header and skipped.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Parameter(format!(
                    "table row {} has {} columns, expected 2",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => {
                    xs.push(T::lit(x));
                    ys.push(T::lit(y));
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Parameter(format!(
                        "table row {} is not numeric",
                        row + 1
                    )))
                }
            }
        }
        Self::new(xs, ys)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["x", "phi"])?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            wtr.write_record([
                format!("{:.16e}", x.to_f64_lossy()),
                format!("{:.16e}", y.to_f64_lossy()),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Fritsch–Carlson derivative estimates: weighted harmonic mean of the
/// adjacent secants in the interior, and a shape-preserving three-point
/// formula at the ends.
fn pchip_slopes<T: Scalar>(xs: &[T], ys: &[T]) -> Vec<T> {
    let n = xs.len();
    let h: Vec<T> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut d = vec![T::zero(); n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] <= T::zero() {
            d[k] = T::zero();
        } else {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: T, h1: T, d0: T, d1: T| {
        let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            T::zero()
        } else if d0.signum() != d1.signum() && s.abs() > three * d0.abs() {
            three * d0
        } else {
            s
        }
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}
