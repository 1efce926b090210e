//! Dormand–Prince 5(4) with the standard fourth-order continuous extension.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

/// Decision returned by the step monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// One accepted step together with its interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> &[f64] {
        &self.rcont[0]
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = if self.h > 0.0 { (self.t0, self.t1()) } else { (self.t1(), self.t0) };
        t >= a && t <= b
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub steps: Vec<DenseStep>,
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Set when the monitor requested an early stop.
    pub stopped: bool,
}

impl Solution {
    pub fn t_start(&self) -> f64 {
        self.steps.first().map_or(self.t, |s| s.t0)
    }

    /// Dense value at `t` inside the integrated range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        if self.steps.is_empty() {
            return (t == self.t).then(|| self.y.clone());
        }
        let forward = self.steps[0].h > 0.0;
        let idx = self.steps.partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let step = self.steps.get(idx)?;
        step.contains(t).then(|| step.eval(t))
    }
}

fn error_norm(y0: &[f64], y1: &[f64], err: &[f64], o: &Options) -> f64 {
    let n = y0.len().max(1) as f64;
    let s: f64 = (0..y0.len())
        .map(|i| {
            let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// A failing right-hand side is treated like a rejected step. After every
/// accepted step `monitor(t, y)` may stop the integration.
pub fn dopri5<F, M>(mut f: F, t0: f64, y0: &[f64], t_end: f64, o: &Options, mut monitor: M) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    M: FnMut(f64, &[f64]) -> Control,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut sol = Solution {
        steps: Vec::new(),
        t: t0,
        y: y0.to_vec(),
        accepted: 0,
        rejected: 0,
        evaluations: 0,
        stopped: false,
    };
    if t_end == t0 {
        return Ok(sol);
    }
    let mut k1 = vec![0.0; n];
    f(t0, y0, &mut k1)?;
    sol.evaluations += 1;
    let mut h = o.h_init.unwrap_or_else(|| initial_step(&mut f, t0, y0, &k1, dir, o)).min(o.h_max) * dir;
    let mut k = vec![vec![0.0; n]; 6];
    let mut ys = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];
    let (mut t, mut y) = (t0, y0.to_vec());
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > o.max_steps {
            return Err(Error::StepUnderflow { t });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let stages = (|| -> Result<()> {
            let (k2, rest) = k.split_at_mut(1);
            let k2 = &mut k2[0];
            for i in 0..n {
                ys[i] = y[i] + h * A21 * k1[i];
            }
            f(t + C2 * h, &ys, k2)?;
            let (k3, rest) = rest.split_at_mut(1);
            let k3 = &mut k3[0];
            for i in 0..n {
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, &ys, k3)?;
            let (k4, rest) = rest.split_at_mut(1);
            let k4 = &mut k4[0];
            for i in 0..n {
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, &ys, k4)?;
            let (k5, rest) = rest.split_at_mut(1);
            let k5 = &mut k5[0];
            for i in 0..n {
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, &ys, k5)?;
            let (k6, rest) = rest.split_at_mut(1);
            let k6 = &mut k6[0];
            for i in 0..n {
                ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            f(t + h, &ys, k6)?;
            for i in 0..n {
                y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            let k7 = &mut rest[0];
            f(t + h, &y1, k7)?;
            Ok(())
        })();
        sol.evaluations += 6;
        let finite = stages.is_ok() && y1.iter().all(|v| v.is_finite());
        let e = if finite {
            for i in 0..n {
                err[i] = h
                    * (E1 * k1[i] + E3 * k[1][i] + E4 * k[2][i] + E5 * k[3][i] + E6 * k[4][i] + E7 * k[5][i]);
            }
            error_norm(&y, &y1, &err, o)
        } else {
            f64::INFINITY
        };
        if e <= 1.0 {
            let (k3, k4, k5, k6, k7) = (&k[1], &k[2], &k[3], &k[4], &k[5]);
            let r2: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
            let r3: Vec<f64> = (0..n).map(|i| h * k1[i] - r2[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| r2[i] - h * k7[i] - r3[i]).collect();
            let r5: Vec<f64> = (0..n)
                .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            sol.steps.push(DenseStep {
                t0: t,
                h,
                rcont: [y.clone(), r2, r3, r4, r5],
            });
            sol.accepted += 1;
            t += h;
            y.copy_from_slice(&y1);
            k1.copy_from_slice(k7);
            let fac = (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            h = (h.abs() * fac).min(o.h_max) * dir;
            if monitor(t, &y) == Control::Stop {
                sol.stopped = true;
                break;
            }
        } else {
            sol.rejected += 1;
            let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            if h.abs() < o.h_min {
                return Err(Error::StepUnderflow { t });
            }
        }
    }
    sol.t = t;
    sol.y = y;
    Ok(sol)
}

fn initial_step<F>(f: &mut F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, o: &Options) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let sc: Vec<f64> = y0.iter().map(|v| o.atol + o.rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / v.len().max(1) as f64).sqrt();
    let (d0, d1) = (norm(y0), norm(f0));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + dir * h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    if f(t0 + dir * h0, &y1, &mut f1).is_err() {
        return h0;
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).max(o.h_min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = y[1];
        dy[1] = -y[0];
        Ok(())
    }

    #[test]
    fn harmonic_oscillator_endpoint() {
        let sol = dopri5(harmonic, 0.0, &[0.0, 1.0], 10.0, &Options::default(), |_, _| Control::Continue).unwrap();
        assert!((sol.y[0] - 10f64.sin()).abs() < 1e-9);
        assert!((sol.y[1] - 10f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_tracks_solution() {
        let o = Options {
            rtol: 1e-9,
            atol: 1e-11,
            ..Options::default()
        };
        let sol = dopri5(harmonic, 0.0, &[0.0, 1.0], 6.0, &o, |_, _| Control::Continue).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=600 {
            let t = 0.01 * k as f64;
            let y = sol.eval(t).unwrap();
            worst = worst.max((y[0] - t.sin()).abs());
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn dense_interpolant_is_fourth_order() {
        // one fixed step of y' = y; interpolation error must shrink ~ h^5
        let run = |h: f64| {
            let o = Options {
                h_init: Some(h),
                rtol: 1.0,
                atol: 1.0,
                ..Options::default()
            };
            let sol = dopri5(
                |_, y, dy| {
                    dy[0] = y[0];
                    Ok(())
                },
                0.0,
                &[1.0],
                h,
                &o,
                |_, _| Control::Continue,
            )
            .unwrap();
            assert_eq!(sol.steps.len(), 1);
            (sol.steps[0].eval(0.5 * h)[0] - (0.5 * h).exp()).abs()
        };
        let (e1, e2) = (run(0.2), run(0.1));
        assert!(e1 / e2 > 20.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn backward_integration_and_stop() {
        let sol = dopri5(harmonic, 3.0, &[3f64.sin(), 3f64.cos()], 0.0, &Options::default(), |_, _| Control::Continue)
            .unwrap();
        assert!(sol.y[0].abs() < 1e-9);
        let sol = dopri5(harmonic, 0.0, &[0.0, 1.0], 10.0, &Options::default(), |t, _| {
            if t > 1.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(sol.stopped && sol.t < 10.0);
        assert!(sol.eval(0.5).is_some());
    }
}
