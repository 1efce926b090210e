//! Cubic splines for tabulated angular functions.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// End conditions of a cubic spline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplineBoundary {
    Natural,
    /// First derivatives at the two endpoints.
    Clamped { start: f64, end: f64 },
    /// The table spans one period; first and last values must agree.
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
    boundary: SplineBoundary,
}

/// Endpoint mismatch tolerated for periodic tables.
pub const PERIODIC_MISMATCH: f64 = 1e-8;

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, boundary: SplineBoundary) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::Table("abscissa and value columns differ in length".into()));
        }
        if knots.len() < 4 {
            return Err(Error::Table("at least four samples are required".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Table("abscissa must be strictly increasing".into()));
        }
        if values.iter().chain(&knots).any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite sample".into()));
        }
        let second = match boundary {
            SplineBoundary::Natural => solve_open(&knots, &values, None),
            SplineBoundary::Clamped { start, end } => solve_open(&knots, &values, Some((start, end))),
            SplineBoundary::Periodic => {
                let n = values.len();
                let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                if (values[0] - values[n - 1]).abs() > PERIODIC_MISMATCH * scale {
                    return Err(Error::Table(format!(
                        "periodic table endpoints differ: {} vs {}",
                        values[0],
                        values[n - 1]
                    )));
                }
                solve_periodic(&knots, &values)
            }
        };
        Ok(Self {
            knots,
            values,
            second,
            boundary,
        })
    }

    /// Samples `f` on `count` uniform points of `[lo, hi]` (both ends included).
    pub fn sample(
        lo: f64,
        hi: f64,
        count: usize,
        boundary: SplineBoundary,
        mut f: impl FnMut(f64) -> f64,
    ) -> Result<Self> {
        let knots: Vec<f64> = (0..count)
            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
            .collect();
        let values = knots.iter().map(|&t| f(t)).collect();
        Self::new(knots, values, boundary)
    }

    /// Reads a two-column `theta,value` CSV table.
    pub fn from_csv_reader(reader: impl Read, boundary: SplineBoundary) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "theta" || &headers[1] != "value" {
            return Err(Error::Table(format!("expected header `theta,value`, found {headers:?}")));
        }
        let mut knots = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Table(format!("{s:?}: {e}")));
            knots.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::new(knots, values, boundary)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, boundary: SplineBoundary) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, boundary)
    }

    pub fn to_csv(&self, value_header: &str) -> String {
        let mut out = format!("theta,{value_header}\n");
        for (t, v) in self.knots.iter().zip(&self.values) {
            out.push_str(&format!("{t:?},{v:?}\n"));
        }
        out
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn boundary(&self) -> SplineBoundary {
        self.boundary
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundary, SplineBoundary::Periodic)
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.domain();
        let t = if self.is_periodic() {
            lo + (t - lo).rem_euclid(hi - lo)
        } else if t < lo || t > hi || !t.is_finite() {
            return Err(Error::OutsideTable { value: t, lo, hi });
        } else {
            t
        };
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(self.knots.len() - 2),
        };
        Ok((i, t))
    }

    /// Value, first and second derivative at `t`.
    pub fn eval_derivs(&self, t: f64) -> Result<[f64; 3]> {
        let (i, t) = self.locate(t)?;
        let h = self.knots[i + 1] - self.knots[i];
        let a = self.knots[i + 1] - t;
        let b = t - self.knots[i];
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let c0 = y0 / h - m0 * h / 6.0;
        let c1 = y1 / h - m1 * h / 6.0;
        let v = m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h) + c0 * a + c1 * b;
        let d1 = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - c0 + c1;
        let d2 = (m0 * a + m1 * b) / h;
        Ok([v, d1, d2])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_derivs(t)?[0])
    }
}

fn solve_open(x: &[f64], y: &[f64], clamped: Option<(f64, f64)>) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    match clamped {
        None => {
            diag[0] = 1.0;
            diag[n - 1] = 1.0;
        }
        Some((d0, dn)) => {
            diag[0] = 2.0 * h[0];
            sup[0] = h[0];
            rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - d0);
            sub[n - 1] = h[n - 2];
            diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / h[n - 2]);
        }
    }
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    thomas(&sub, &diag, &sup, &rhs)
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

/// Second derivatives of the periodic spline via Sherman–Morrison on the
/// cyclic tridiagonal system.
fn solve_periodic(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len() - 1; // unknowns M_0 .. M_{m-1}, M_m = M_0
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let hp = if i == 0 { h[m - 1] } else { h[i - 1] };
        let hn = h[i];
        let yp = if i == 0 { y[m - 1] } else { y[i - 1] };
        sub[i] = hp;
        diag[i] = 2.0 * (hp + hn);
        sup[i] = hn;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hn - (y[i] - yp) / hp);
    }
    // corner entries: A[0][m-1] = sub[0], A[m-1][0] = sup[m-1]
    let alpha = sup[m - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut d2 = diag.clone();
    d2[0] -= gamma;
    d2[m - 1] -= alpha * beta / gamma;
    let mut sub2 = sub.clone();
    sub2[0] = 0.0;
    let mut sup2 = sup.clone();
    sup2[m - 1] = 0.0;
    let xs = thomas(&sub2, &d2, &sup2, &rhs);
    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = alpha;
    let z = thomas(&sub2, &d2, &sup2, &u);
    let fact = (xs[0] + beta * xs[m - 1] / gamma) / (1.0 + z[0] + beta * z[m - 1] / gamma);
    let mut out: Vec<f64> = xs.iter().zip(&z).map(|(a, b)| a - fact * b).collect();
    out.push(out[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn periodic_spline_tracks_cosine() {
        let s = CubicSpline::sample(0.0, 2.0 * PI, 257, SplineBoundary::Periodic, |t| (3.0 * t).cos()).unwrap();
        for k in 0..50 {
            let t = -4.0 + 0.37 * k as f64;
            let [v, d1, d2] = s.eval_derivs(t).unwrap();
            assert!((v - (3.0 * t).cos()).abs() < 1e-6);
            assert!((d1 + 3.0 * (3.0 * t).sin()).abs() < 1e-3);
            assert!((d2 + 9.0 * (3.0 * t).cos()).abs() < 0.1);
        }
    }

    #[test]
    fn clamped_spline_reproduces_cubic() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let s = CubicSpline::sample(-1.0, 2.0, 7, SplineBoundary::Clamped { start: 1.0, end: 10.0 }, f).unwrap();
        for k in 0..31 {
            let t = -1.0 + 0.1 * k as f64;
            let [v, d1, d2] = s.eval_derivs(t).unwrap();
            assert!((v - f(t)).abs() < 1e-12, "t={t}");
            assert!((d1 - (3.0 * t * t - 2.0)).abs() < 1e-11);
            assert!((d2 - 6.0 * t).abs() < 1e-10);
        }
    }

    #[test]
    fn refuses_outside_domain() {
        let s = CubicSpline::sample(0.0, 1.0, 9, SplineBoundary::Natural, |t| t).unwrap();
        assert!(matches!(s.eval(1.5), Err(Error::OutsideTable { .. })));
    }

    #[test]
    fn csv_roundtrip_and_validation() {
        let s = CubicSpline::sample(0.0, 1.0, 6, SplineBoundary::Natural, |t| t * t).unwrap();
        let text = s.to_csv("value");
        let back = CubicSpline::from_csv_reader(text.as_bytes(), SplineBoundary::Natural).unwrap();
        assert_eq!(back.knots(), s.knots());
        assert_eq!(back.values(), s.values());
        let bad = "theta,value\n0,1\n0,2\n1,3\n2,4\n";
        assert!(CubicSpline::from_csv_reader(bad.as_bytes(), SplineBoundary::Natural).is_err());
        let bad_header = "t,v\n0,1\n1,2\n2,3\n3,4\n";
        assert!(CubicSpline::from_csv_reader(bad_header.as_bytes(), SplineBoundary::Natural).is_err());
    }
}
