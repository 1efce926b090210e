//! The classical exotic family: a first-order ODE for `T(τ)` that is
//! quadratic in `T′`, and the closed-form solution in `z = tan((N−2)θ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AngularPart, PotentialSpec, RadialKind, TauKind};
use crate::error::{Error, Result};
use crate::jetfield::{CubicSpline, SplineBoundary};
use crate::linalg::least_squares;
use crate::ode::{dopri5, Control, Options};

/// `3τ²(τ²+1)T′² + 4τ(c₁τ+c₂)T′ + 2τTT′ − T(T+4c₂) + c₃/√(τ²+1) + c₄ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExoticOde {
    pub c: [f64; 4],
}

/// Root of the quadratic in `T′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl ExoticOde {
    pub fn new(c: [f64; 4]) -> Self {
        Self { c }
    }

    /// `(a, b, c)` of `a T′² + b T′ + c = 0`.
    pub fn quadratic(&self, tau: f64, t: f64) -> (f64, f64, f64) {
        let [c1, c2, c3, c4] = self.c;
        let a = 3.0 * tau * tau * (tau * tau + 1.0);
        let b = 4.0 * tau * (c1 * tau + c2) + 2.0 * tau * t;
        let c = -t * (t + 4.0 * c2) + c3 / (tau * tau + 1.0).sqrt() + c4;
        (a, b, c)
    }

    pub fn discriminant(&self, tau: f64, t: f64) -> f64 {
        let (a, b, c) = self.quadratic(tau, t);
        b * b - 4.0 * a * c
    }

    pub fn residual(&self, tau: f64, t: f64, dt: f64) -> f64 {
        let (a, b, c) = self.quadratic(tau, t);
        a * dt * dt + b * dt + c
    }

    /// Largest single term of the residual, for relative checks.
    pub fn residual_scale(&self, tau: f64, t: f64, dt: f64) -> f64 {
        let [c1, c2, c3, c4] = self.c;
        [
            3.0 * tau * tau * (tau * tau + 1.0) * dt * dt,
            4.0 * tau * (c1 * tau + c2) * dt,
            2.0 * tau * t * dt,
            t * (t + 4.0 * c2),
            c3 / (tau * tau + 1.0).sqrt(),
            c4,
        ]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `dT/dτ` on `branch`.
    pub fn slope(&self, tau: f64, t: f64, branch: Branch) -> Result<f64> {
        let (a, b, c) = self.quadratic(tau, t);
        let size = a.abs().max(b.abs()).max(c.abs()).max(f64::MIN_POSITIVE);
        if a.abs() <= 1e-12 * size {
            return Err(Error::Degenerate { tau, leading: a });
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NegativeDiscriminant { tau, discriminant: disc });
        }
        // stable form of the two roots
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * disc.sqrt());
        let (r1, r2) = if q != 0.0 { (q / a, c / q) } else { (0.0, 0.0) };
        let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        Ok(match branch {
            Branch::Plus => hi,
            Branch::Minus => lo,
        })
    }
}

/// A sampled solution of the exotic classical ODE, in `θ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExoticSolution {
    #[serde(rename = "N")]
    pub n: u32,
    pub ode: ExoticOde,
    pub tau_kind: TauKind,
    pub branch: Branch,
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    pub t: Vec<f64>,
    /// `S = dT/dθ`.
    pub s: Vec<f64>,
    pub discriminant: Vec<f64>,
    /// Samples where the discriminant came within `1e−8` (relative) of zero:
    /// a branch point the solution passed without switching roots.
    pub near_branch_points: Vec<f64>,
    /// Largest relative plug-back residual over the samples.
    pub max_residual: f64,
    pub steps: usize,
}

impl ExoticSolution {
    /// `S(θ)` as a spline table on the sampled window.
    pub fn angular_table(&self) -> Result<CubicSpline> {
        CubicSpline::new(self.theta.clone(), self.s.clone(), SplineBoundary::Natural)
    }

    /// `V = R + S/r²` restricted to the sampled angular window.
    pub fn to_potential(&self, radial: RadialKind) -> Result<PotentialSpec> {
        let mut spec = PotentialSpec::new(radial, AngularPart::Table(Arc::new(self.angular_table()?)))
            .with_family("exotic-classical")
            .with_order(self.n)
            .with_tau(self.tau_kind);
        for (i, c) in self.ode.c.iter().enumerate() {
            spec.params.insert(format!("c{}", i + 1), *c);
        }
        spec.flags
            .push(format!("angular table covers [{}, {}] only", self.theta[0], self.theta[self.theta.len() - 1]));
        for th in &self.near_branch_points {
            spec.flags.push(format!("discriminant near zero at theta = {th}"));
        }
        Ok(spec)
    }
}

/// Integrates the exotic ODE in `θ` from `T(θ₀) = t0` over `θ₀ → θ₁`
/// (`domain = (θ₀, θ₁)`), returning `samples` equally spaced values.
///
/// For odd `N` the constant `c₃` must vanish. Reaching a point with no real
/// slope is an error carrying the offending `τ`; the root is never switched
/// silently.
pub fn exotic_classical_t(
    n: u32,
    c: [f64; 4],
    tau_kind: TauKind,
    branch: Branch,
    t0: f64,
    domain: (f64, f64),
    samples: usize,
) -> Result<ExoticSolution> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("exotic family needs N >= 3, got {n}")));
    }
    if n % 2 == 1 && c[2] != 0.0 {
        return Err(Error::Constraint(format!("odd N = {n} requires c3 = 0, got {}", c[2])));
    }
    if samples < 2 {
        return Err(Error::InvalidSpec("need at least two samples".into()));
    }
    let ode = ExoticOde::new(c);
    let rhs = |theta: f64, t: f64| -> Result<f64> {
        let tau = tau_kind.tau(n, theta);
        Ok(ode.slope(tau, t, branch)? * tau_kind.dtau(n, theta))
    };
    // fail early on a bad start rather than through step underflow
    rhs(domain.0, t0)?;
    let mut last = (domain.0, t0);
    let opts = Options {
        rtol: 1e-12,
        atol: 1e-14,
        ..Options::default()
    };
    let sol = dopri5(
        |th, y, dy| {
            dy[0] = rhs(th, y[0])?;
            Ok(())
        },
        domain.0,
        &[t0],
        domain.1,
        &opts,
        |th, y| {
            last = (th, y[0]);
            Control::Continue
        },
    );
    let sol = match sol {
        Ok(s) => s,
        Err(Error::StepUnderflow { .. }) => {
            // the slope ceased to exist just past the last accepted point
            let (th, t) = last;
            let tau = tau_kind.tau(n, th);
            ode.slope(tau, t, branch)?;
            return Err(Error::NegativeDiscriminant {
                tau,
                discriminant: ode.discriminant(tau, t),
            });
        }
        Err(e) => return Err(e),
    };
    let mut out = ExoticSolution {
        n,
        ode,
        tau_kind,
        branch,
        theta: Vec::with_capacity(samples),
        tau: Vec::with_capacity(samples),
        t: Vec::with_capacity(samples),
        s: Vec::with_capacity(samples),
        discriminant: Vec::with_capacity(samples),
        near_branch_points: Vec::new(),
        max_residual: 0.0,
        steps: sol.accepted,
    };
    for i in 0..samples {
        let th = domain.0 + (domain.1 - domain.0) * i as f64 / (samples - 1) as f64;
        let t = sol.eval(th).ok_or(Error::StepUnderflow { t: th })?[0];
        let tau = tau_kind.tau(n, th);
        let dt = ode.slope(tau, t, branch)?;
        let (a, b, cc) = ode.quadratic(tau, t);
        let disc = b * b - 4.0 * a * cc;
        if disc.abs() <= 1e-8 * (b * b).max((4.0 * a * cc).abs()) {
            out.near_branch_points.push(th);
        }
        let scale = ode.residual_scale(tau, t, dt);
        if scale > 0.0 {
            out.max_residual = out.max_residual.max(ode.residual(tau, t, dt).abs() / scale);
        }
        out.theta.push(th);
        out.tau.push(tau);
        out.t.push(t);
        out.s.push(dt * tau_kind.dtau(n, th));
        out.discriminant.push(disc);
    }
    Ok(out)
}

fn closed_form_z(z: f64) -> f64 {
    let w = (4.0 + 3.0 * z * z).sqrt();
    z.cbrt() * (3.0 * z * z + 2.0 * w + 5.0).powf(1.0 / 6.0) / (w + 2.0).powf(2.0 / 3.0)
}

/// `dT/dz` of the closed form, `z ≠ 0`.
fn closed_form_dz(z: f64) -> f64 {
    let w = (4.0 + 3.0 * z * z).sqrt();
    let dw = 3.0 * z / w;
    let q = 3.0 * z * z + 2.0 * w + 5.0;
    let log_derivative = 1.0 / (3.0 * z) + (6.0 * z + 2.0 * dw) / (6.0 * q) - 2.0 * dw / (3.0 * (w + 2.0));
    closed_form_z(z) * log_derivative
}

/// `scale · z^{1/3}(3z² + 2√(4+3z²) + 5)^{1/6} / (√(4+3z²) + 2)^{2/3}` with
/// `z = tan((N−2)θ)`; negative `z` uses the real cube root, so `T` is odd
/// in `z`.
pub fn exotic_closedform_t(n: u32, theta: f64, scale: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("exotic family needs N >= 3, got {n}")));
    }
    let u = (n as f64 - 2.0) * theta;
    if u.cos().abs() < 1e-12 {
        return Err(Error::Pole { theta });
    }
    Ok(scale * closed_form_z(u.tan()))
}

/// Least-squares fit of `(c₁…c₄)` for one reading of `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingFit {
    pub tau_kind: TauKind,
    pub c: [f64; 4],
    /// `‖residual‖ / ‖term scale‖` over the samples.
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFit {
    #[serde(rename = "N")]
    pub n: u32,
    pub scale: f64,
    pub samples: usize,
    pub readings: Vec<ReadingFit>,
    /// The reading with the smallest residual.
    pub winner: TauKind,
}

/// Plugs the closed form into the exotic ODE under each reading of `τ`
/// and fits `(c₁…c₄)` by linear least squares.
///
/// Samples lie in `0 < (N−2)θ < π/2`, away from both ends.
pub fn fit_closed_form(n: u32, scale: f64, samples: usize) -> Result<ClosedFormFit> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("exotic family needs N >= 3, got {n}")));
    }
    if samples < 8 {
        return Err(Error::InvalidSpec("need at least 8 samples".into()));
    }
    let k = n as f64 - 2.0;
    let (u0, u1) = (0.05, std::f64::consts::FRAC_PI_2 - 0.05);
    let thetas: Vec<f64> = (0..samples)
        .map(|i| (u0 + (u1 - u0) * i as f64 / (samples - 1) as f64) / k)
        .collect();
    let mut readings = Vec::new();
    for kind in [TauKind::Tan, TauKind::Cos2Half, TauKind::Sin2Half] {
        let mut rows = Vec::with_capacity(samples);
        let mut rhs = Vec::with_capacity(samples);
        let mut scales = Vec::with_capacity(samples);
        for &th in &thetas {
            let z = (k * th).tan();
            let t = scale * closed_form_z(z);
            // dT/dτ = (dT/dz)(dz/dθ)/(dτ/dθ)
            let dz = k / (k * th).cos().powi(2);
            let dt = scale * closed_form_dz(z) * dz / kind.dtau(n, th);
            let tau = kind.tau(n, th);
            let root = (tau * tau + 1.0).sqrt();
            let row = [4.0 * tau * tau * dt, 4.0 * tau * dt - 4.0 * t, 1.0 / root, 1.0];
            let base = 3.0 * tau * tau * (tau * tau + 1.0) * dt * dt + 2.0 * tau * t * dt - t * t;
            let s = row
                .iter()
                .fold(base.abs().max((t * t).abs()).max((3.0 * tau * tau * (tau * tau + 1.0) * dt * dt).abs()), |m, x| {
                    m.max(x.abs())
                });
            rows.push(row);
            rhs.push(-base);
            scales.push(s);
        }
        // weight rows so each sample counts relative to its own size
        let a = nalgebra::DMatrix::from_fn(samples, 4, |i, j| rows[i][j] / scales[i]);
        let b: Vec<f64> = rhs.iter().zip(&scales).map(|(r, s)| r / s).collect();
        let c = least_squares(&a, &b)?;
        let res = (0..samples)
            .map(|i| {
                let fit: f64 = rows[i].iter().zip(&c).map(|(x, y)| x * y).sum();
                ((fit - rhs[i]) / scales[i]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
            / (samples as f64).sqrt();
        readings.push(ReadingFit {
            tau_kind: kind,
            c: [c[0], c[1], c[2], c[3]],
            relative_residual: res,
        });
    }
    let winner = readings
        .iter()
        .min_by(|a, b| a.relative_residual.total_cmp(&b.relative_residual))
        .map(|r| r.tau_kind)
        .unwrap_or(TauKind::Tan);
    Ok(ClosedFormFit {
        n,
        scale,
        samples,
        readings,
        winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_anchor_values() {
        // at z = 1: (3 + 2√7 + 5)^{1/6} / (√7 + 2)^{2/3}
        let s7 = 7f64.sqrt();
        let want = (8.0 + 2.0 * s7).powf(1.0 / 6.0) / (s7 + 2.0).powf(2.0 / 3.0);
        let th = std::f64::consts::FRAC_PI_4 / 2.0;
        assert!((exotic_closedform_t(4, th, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.552_787_704_769_129_0).abs() < 1e-15, "{want}");
        assert_eq!(exotic_closedform_t(3, 0.0, 2.0).unwrap(), 0.0);
        let a = exotic_closedform_t(3, 0.3, 1.0).unwrap();
        let b = exotic_closedform_t(3, -0.3, 1.0).unwrap();
        assert!((a + b).abs() < 1e-15);
        assert!(matches!(
            exotic_closedform_t(4, std::f64::consts::FRAC_PI_4, 1.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn closed_form_derivative_matches_differences() {
        for z in [-2.0, -0.4, 0.3, 1.0, 5.0] {
            let h = 1e-6;
            let fd = (closed_form_z(z + h) - closed_form_z(z - h)) / (2.0 * h);
            assert!((fd - closed_form_dz(z)).abs() < 1e-8 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn slope_roots_solve_the_quadratic() {
        let ode = ExoticOde::new([0.3, -0.2, 0.1, 0.4]);
        for (tau, t) in [(0.7, 0.2), (1.5, -0.4), (-0.8, 1.1)] {
            for br in [Branch::Plus, Branch::Minus] {
                if let Ok(d) = ode.slope(tau, t, br) {
                    assert!(ode.residual(tau, t, d).abs() < 1e-12 * ode.residual_scale(tau, t, d));
                }
            }
        }
        assert!(matches!(ode.slope(0.0, 1.0, Branch::Plus), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn zero_solution_needs_vanishing_constants() {
        let ode = ExoticOde::new([0.5, 0.0, 0.0, 0.0]);
        assert_eq!(ode.residual(0.9, 0.0, 0.0), 0.0);
        let ode = ExoticOde::new([0.0, 0.0, 0.3, 0.0]);
        assert!(ode.residual(0.9, 0.0, 0.0).abs() > 0.1);
    }

    #[test]
    fn odd_order_rejects_c3() {
        assert!(matches!(
            exotic_classical_t(5, [0.0, 0.0, 1.0, 0.0], TauKind::Tan, Branch::Plus, 0.5, (0.1, 0.3), 10),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn solver_follows_the_closed_form() {
        let (n, th0, th1) = (4u32, 0.1, 0.6);
        let t0 = exotic_closedform_t(n, th0, 1.0).unwrap();
        let fit = fit_closed_form(n, 1.0, 200).unwrap();
        let tan = fit.readings.iter().find(|r| r.tau_kind == TauKind::Tan).unwrap();
        // the closed form is increasing in z, and the solver picks the matching root
        let sol = [Branch::Plus, Branch::Minus]
            .into_iter()
            .filter_map(|b| exotic_classical_t(n, tan.c, TauKind::Tan, b, t0, (th0, th1), 41).ok())
            .min_by(|a, b| {
                let d = |s: &ExoticSolution| {
                    s.theta
                        .iter()
                        .zip(&s.t)
                        .map(|(&th, &t)| (t - exotic_closedform_t(n, th, 1.0).unwrap()).abs())
                        .fold(0.0f64, f64::max)
                };
                d(a).total_cmp(&d(b))
            })
            .unwrap();
        assert!(sol.max_residual < 1e-8, "{}", sol.max_residual);
        for (&th, &t) in sol.theta.iter().zip(&sol.t) {
            let want = exotic_closedform_t(n, th, 1.0).unwrap();
            assert!((t - want).abs() < 1e-5 * want.abs(), "{th}: {t} vs {want}");
        }
    }
}
