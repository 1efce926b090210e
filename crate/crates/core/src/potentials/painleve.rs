//! The quantum exotic family built on the sixth Painlevé transcendent.
//!
//! `P₆` is integrated along the real `τ` axis with a dense Dormand–Prince
//! solver. Near a movable pole (or a point where the equation's coefficients
//! blow up) the path leaves the axis on a semicircle in the upper half plane
//! and rejoins it past the singularity; the skipped stretch is flagged.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{AngularPart, PotentialSpec, RadialKind, TauKind};
use crate::error::{Error, Result};
use crate::jetfield::{CubicSpline, SplineBoundary};
use crate::ode::{dopri5, Control, Options, Solution};

/// `γ = (γ₂+γ₄) − (γ₁+γ₃) + √(2γ₁) − 3/4`.
pub fn composite_gamma(g: [f64; 4]) -> Result<f64> {
    Ok((g[1] + g[3]) - (g[0] + g[2]) + sqrt_2g1(g)? - 0.75)
}

/// `(γ₂+γ₃)(γ₁+γ₄−√(2γ₁))`, which must vanish for odd `N`.
pub fn odd_order_constraint(g: [f64; 4]) -> Result<f64> {
    Ok((g[1] + g[2]) * (g[0] + g[3] - sqrt_2g1(g)?))
}

fn sqrt_2g1(g: [f64; 4]) -> Result<f64> {
    if g[0] < 0.0 {
        return Err(Error::InvalidSpec(format!("gamma1 = {} must be non-negative", g[0])));
    }
    Ok((2.0 * g[0]).sqrt())
}

/// `P₆″` and the largest magnitude among its terms.
fn p6_rhs_c(g: [f64; 4], tau: C64, p: C64, dp: C64) -> Result<(C64, f64)> {
    let one = C64::new(1.0, 0.0);
    let (pm1, pmt, tm1) = (p - one, p - tau, tau - one);
    let tiny = |z: C64| z.norm() < 1e-300;
    if tiny(p) || tiny(pm1) || tiny(pmt) || tiny(tau) || tiny(tm1) {
        return Err(Error::Domain {
            what: "singular point of the Painleve VI equation".into(),
            at: [tau.re, p.re],
        });
    }
    let t1 = 0.5 * (1.0 / p + 1.0 / pm1 + 1.0 / pmt) * dp * dp;
    let t2 = -(1.0 / tau + 1.0 / tm1 + 1.0 / pmt) * dp;
    let pref = p * pm1 * pmt / (tau * tau * tm1 * tm1);
    let parts = [
        pref * g[0],
        pref * g[1] * tau / (p * p),
        pref * g[2] * tm1 / (pm1 * pm1),
        pref * g[3] * tau * tm1 / (pmt * pmt),
    ];
    let t3: C64 = parts.iter().sum();
    let scale = parts.iter().fold(t1.norm().max(t2.norm()), |m, z| m.max(z.norm()));
    let v = t1 + t2 + t3;
    if !v.is_finite() {
        return Err(Error::Domain {
            what: "non-finite Painleve VI right-hand side".into(),
            at: [tau.re, p.re],
        });
    }
    Ok((v, scale))
}

/// `P₆″(τ)` for real data.
pub fn p6_rhs(g: [f64; 4], tau: f64, p: f64, dp: f64) -> Result<f64> {
    Ok(p6_rhs_c(g, tau.into(), p.into(), dp.into())?.0.re)
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P6Options {
    pub rtol: f64,
    pub atol: f64,
    /// Leave the real axis when `max(|P|, 1/|P|, 1/|P−1|, 1/|P−τ|)` exceeds this.
    pub pole_threshold: f64,
    /// Smallest semicircle radius.
    pub min_detour: f64,
    /// Keep this far from the fixed singularities `τ = 0, 1`.
    pub edge_margin: f64,
}

impl Default for P6Options {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            pole_threshold: 1e3,
            min_detour: 1e-2,
            edge_margin: 1e-3,
        }
    }
}

/// Uniform output grid on `[lo, hi] ⊂ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct P6Grid {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl P6Grid {
    pub fn points(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.samples - 1).max(1) as f64)
            .collect()
    }
}

/// A stretch of the real axis that was integrated directly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct P6Segment {
    pub lo: f64,
    pub hi: f64,
    #[serde(skip)]
    dense: Option<Arc<Solution>>,
}

impl P6Segment {
    fn contains(&self, tau: f64) -> bool {
        tau >= self.lo && tau <= self.hi
    }

    /// `(P, P′)` at `tau`.
    fn eval(&self, tau: f64) -> Option<(f64, f64)> {
        let y = self.dense.as_ref()?.eval(tau)?;
        Some((y[0], y[2]))
    }
}

/// A semicircular excursion around a singular stretch of the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detour {
    pub from: f64,
    pub to: f64,
    /// `|Im P| + |Im P′|` on rejoining the axis.
    pub imag_on_return: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct P6Solution {
    pub gammas: [f64; 4],
    pub gamma: f64,
    pub tau0: f64,
    pub p0: f64,
    pub dp0: f64,
    pub grid: P6Grid,
    pub tau: Vec<f64>,
    /// `None` on flagged samples.
    pub p: Vec<Option<f64>>,
    pub dp: Vec<Option<f64>>,
    /// Sample lies in a skipped stretch near a pole.
    pub pole: Vec<bool>,
    pub segments: Vec<P6Segment>,
    pub detours: Vec<Detour>,
    /// Integration stopped before reaching the grid end (left, right).
    pub truncated: (Option<f64>, Option<f64>),
    /// Largest relative plug-back residual on pole-free samples.
    pub max_residual: f64,
}

impl P6Solution {
    /// `(P, P′)` at `tau` on a pole-free stretch.
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        self.segments
            .iter()
            .filter(|s| s.contains(tau))
            .find_map(|s| s.eval(tau))
            .ok_or(Error::Pole { theta: tau })
    }

    /// Pole-free `τ` windows covered by the solution.
    pub fn windows(&self) -> Vec<(f64, f64)> {
        self.segments.iter().map(|s| (s.lo, s.hi)).collect()
    }

    /// Relative plug-back residual of the equation at `tau`, with `P″`
    /// from a fourth-order difference of the dense `P′`.
    pub fn residual_at(&self, tau: f64) -> Result<f64> {
        let room = |s: &P6Segment| (tau - s.lo).min(s.hi - tau);
        let seg = self
            .segments
            .iter()
            .filter(|s| s.contains(tau) && s.dense.is_some())
            .max_by(|a, b| room(a).total_cmp(&room(b)))
            .ok_or(Error::Pole { theta: tau })?;
        let (p, dp) = seg.eval(tau).ok_or(Error::Pole { theta: tau })?;
        let d = |t: f64| seg.eval(t).map(|v| v.1).ok_or(Error::Pole { theta: t });
        let stencil = |h: f64| -> Result<f64> {
            Ok((-d(tau + 2.0 * h)? + 8.0 * d(tau + h)? - 8.0 * d(tau - h)? + d(tau - 2.0 * h)?) / (12.0 * h))
        };
        // halve the step while successive estimates keep converging
        let mut h = (room(seg) / 2.0).min(2e-3);
        if h < 1e-6 {
            return Err(Error::Pole { theta: tau });
        }
        let mut ddp = stencil(h)?;
        let mut change = f64::INFINITY;
        for _ in 0..10 {
            let next = stencil(h / 2.0)?;
            let c = (next - ddp).abs();
            if c >= change {
                break;
            }
            change = c;
            ddp = next;
            h /= 2.0;
        }
        let (rhs, scale) = p6_rhs_c(self.gammas, tau.into(), p.into(), dp.into())?;
        Ok((ddp - rhs.re).abs() / scale.max(ddp.abs()).max(f64::MIN_POSITIVE))
    }
}

fn indicator(tau: C64, p: C64) -> f64 {
    let one = C64::new(1.0, 0.0);
    p.norm()
        .max(1.0 / p.norm())
        .max(1.0 / (p - one).norm())
        .max(1.0 / (p - tau).norm())
}

/// Integrates `P₆` from `(τ₀, P₀, P₀′)` over the grid in both directions.
pub fn p6_solve(gammas: [f64; 4], tau0: f64, p0: f64, dp0: f64, grid: P6Grid, opts: &P6Options) -> Result<P6Solution> {
    let gamma = composite_gamma(gammas)?;
    if !(grid.lo > 0.0 && grid.hi < 1.0 && grid.lo < grid.hi && grid.samples >= 2) {
        return Err(Error::InvalidSpec(format!("grid [{}, {}] must lie inside (0, 1)", grid.lo, grid.hi)));
    }
    if !(tau0 >= grid.lo && tau0 <= grid.hi) {
        return Err(Error::InvalidSpec(format!("tau0 = {tau0} outside the grid")));
    }
    if p0 == 0.0 || p0 == 1.0 || p0 == tau0 || !p0.is_finite() || !dp0.is_finite() {
        return Err(Error::SingularInitialData(format!("P({tau0}) = {p0}")));
    }
    p6_rhs_c(gammas, tau0.into(), p0.into(), dp0.into())?;
    let mut segments = Vec::new();
    let mut detours = Vec::new();
    let right = sweep(gammas, tau0, [p0, 0.0, dp0, 0.0], grid.hi, opts, &mut segments, &mut detours)?;
    let left = sweep(gammas, tau0, [p0, 0.0, dp0, 0.0], grid.lo, opts, &mut segments, &mut detours)?;
    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    detours.sort_by(|a, b| a.from.min(a.to).total_cmp(&b.from.min(b.to)));
    let tau = grid.points();
    let mut sol = P6Solution {
        gammas,
        gamma,
        tau0,
        p0,
        dp0,
        grid,
        tau: tau.clone(),
        p: Vec::with_capacity(tau.len()),
        dp: Vec::with_capacity(tau.len()),
        pole: Vec::with_capacity(tau.len()),
        segments,
        detours,
        truncated: (left, right),
        max_residual: 0.0,
    };
    for &t in &tau {
        match sol.eval(t) {
            Ok((p, dp)) => {
                sol.p.push(Some(p));
                sol.dp.push(Some(dp));
                sol.pole.push(false);
            }
            Err(_) => {
                sol.p.push(None);
                sol.dp.push(None);
                sol.pole.push(true);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (&t, &flag) in tau.iter().zip(&sol.pole) {
        if !flag {
            if let Ok(r) = sol.residual_at(t) {
                worst = worst.max(r);
            }
        }
    }
    sol.max_residual = worst;
    Ok(sol)
}

/// Real-axis integration from `start` towards `end`, detouring around
/// singular stretches. Returns the point where integration had to stop
/// early, if any.
fn sweep(
    g: [f64; 4],
    start: f64,
    y0: [f64; 4],
    end: f64,
    opts: &P6Options,
    segments: &mut Vec<P6Segment>,
    detours: &mut Vec<Detour>,
) -> Result<Option<f64>> {
    let dir = if end >= start { 1.0 } else { -1.0 };
    let ode_opts = Options {
        rtol: opts.rtol,
        atol: opts.atol,
        ..Options::default()
    };
    let mut tau = start;
    let mut y = y0.to_vec();
    while (end - tau) * dir > 0.0 {
        let sol = dopri5(
            |t, y, dy| real_axis_rhs(g, t, y, dy),
            tau,
            &y,
            end,
            &ode_opts,
            |t, y| {
                if indicator(t.into(), C64::new(y[0], y[1])) > opts.pole_threshold {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        );
        let sol = match sol {
            Ok(s) => s,
            Err(Error::StepUnderflow { t }) => return Ok(Some(t)),
            Err(e) => return Err(e),
        };
        let reached = sol.t;
        let (lo, hi) = if dir > 0.0 { (tau, reached) } else { (reached, tau) };
        let state = sol.y.clone();
        let stopped = sol.stopped;
        if hi > lo {
            segments.push(P6Segment {
                lo,
                hi,
                dense: Some(Arc::new(sol)),
            });
        }
        if !stopped {
            return Ok(None);
        }
        // back off from the stop point, which sits next to the singularity
        let back = back_off(&segments[segments.len() - 1], reached, dir);
        let (t_back, y_back) = match back {
            Some(v) => v,
            None => (reached, state),
        };
        if let Some(seg) = segments.last_mut() {
            if dir > 0.0 {
                seg.hi = t_back;
            } else {
                seg.lo = t_back;
            }
        }
        let distance = singular_distance(t_back, &y_back);
        let rho = (2.0 * distance).max(opts.min_detour);
        let landing = t_back + dir * 2.0 * rho;
        if landing <= opts.edge_margin || landing >= 1.0 - opts.edge_margin {
            return Ok(Some(t_back));
        }
        let y_new = detour(g, t_back, &y_back, rho, dir, &ode_opts)?;
        let imag = y_new[1].abs() + y_new[3].abs();
        detours.push(Detour {
            from: t_back,
            to: landing,
            imag_on_return: imag,
        });
        tau = landing;
        y = vec![y_new[0], 0.0, y_new[2], 0.0];
        if (end - tau) * dir <= 0.0 {
            return Ok(None);
        }
    }
    Ok(None)
}

/// The last point of `seg` where the indicator is below a tenth of its
/// value at `reached`, so the detour starts in a well-resolved region.
fn back_off(seg: &P6Segment, reached: f64, dir: f64) -> Option<(f64, Vec<f64>)> {
    let dense = seg.dense.as_ref()?;
    let y_end = dense.eval(reached)?;
    let target = indicator(reached.into(), C64::new(y_end[0], y_end[1])) / 10.0;
    let len = seg.hi - seg.lo;
    let mut step = len / 64.0;
    let mut t = reached;
    for _ in 0..64 {
        let tn = t - dir * step;
        if tn < seg.lo || tn > seg.hi {
            break;
        }
        let y = dense.eval(tn)?;
        t = tn;
        if indicator(tn.into(), C64::new(y[0], y[1])) <= target {
            return Some((t, y));
        }
        step *= 1.3;
    }
    dense.eval(t).map(|y| (t, y))
}

/// Distance to the nearest zero of `1/P`, `P`, `P − 1` or `P − τ` from a
/// first-order estimate at `tau`.
fn singular_distance(tau: f64, y: &[f64]) -> f64 {
    let (p, dp) = (y[0], y[2]);
    let mut d = f64::INFINITY;
    // simple pole: P ≈ A/(τ − τ*) gives τ* − τ = P/P′
    if dp != 0.0 {
        d = d.min((p / dp).abs());
        d = d.min(((p - 1.0) / dp).abs());
    }
    if dp != 1.0 {
        d = d.min(((p - tau) / (dp - 1.0)).abs());
    }
    d
}

fn real_axis_rhs(g: [f64; 4], t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
    let p = C64::new(y[0], y[1]);
    let dp = C64::new(y[2], y[3]);
    let (ddp, _) = p6_rhs_c(g, t.into(), p, dp)?;
    dy[0] = dp.re;
    dy[1] = dp.im;
    dy[2] = ddp.re;
    dy[3] = ddp.im;
    Ok(())
}

/// Follows `τ(φ) = c + ρ e^{iφ}` through the upper half plane from `start`
/// to `start + 2ρ·dir`.
fn detour(g: [f64; 4], start: f64, y: &[f64], rho: f64, dir: f64, o: &Options) -> Result<Vec<f64>> {
    let c = start + dir * rho;
    // forward: φ from π to 0; backward: φ from 0 to π
    let (phi0, phi1) = if dir > 0.0 { (std::f64::consts::PI, 0.0) } else { (0.0, std::f64::consts::PI) };
    let sol = dopri5(
        |phi, y, dy| {
            let e = C64::from_polar(rho, phi);
            let tau = c + e;
            let dtau = C64::i() * e;
            let p = C64::new(y[0], y[1]);
            let dp = C64::new(y[2], y[3]);
            let (ddp, _) = p6_rhs_c(g, tau, p, dp)?;
            let a = dp * dtau;
            let b = ddp * dtau;
            dy[0] = a.re;
            dy[1] = a.im;
            dy[2] = b.re;
            dy[3] = b.im;
            Ok(())
        },
        phi0,
        y,
        phi1,
        o,
        |_, _| Control::Continue,
    )?;
    Ok(sol.y)
}

/// `W(τ)` from the solution, reading the stray `z` in the last factor as `τ`.
pub fn w_of_p6(sol: &P6Solution, tau: f64) -> Result<f64> {
    let (p, dp) = sol.eval(tau)?;
    w_value(sol.gammas, tau, p, dp)
}

fn w_value(g: [f64; 4], tau: f64, p: f64, dp: f64) -> Result<f64> {
    if p == 0.0 || p == 1.0 || p == tau {
        return Err(Error::Domain {
            what: "W is singular where P6 equals 0, 1 or tau".into(),
            at: [tau, p],
        });
    }
    let a = tau * tau * (tau - 1.0).powi(2) / (4.0 * p * (p - 1.0) * (p - tau));
    let bracket = dp - p * (p - 1.0) / (tau * (tau - 1.0));
    let s = sqrt_2g1(g)?;
    Ok(a * bracket * bracket + 0.125 * (1.0 - s).powi(2) * (1.0 - 2.0 * p)
        - 0.25 * g[1] * (1.0 - 2.0 * tau / p)
        - 0.25 * g[2] * (1.0 - 2.0 * (tau - 1.0) / (p - 1.0))
        + (0.125 - 0.25 * g[3]) * (1.0 - 2.0 * tau * (p - 1.0) / (p - tau)))
}

/// `T(θ)`, `S = T′(θ)` and the intermediate `τ`, `W` on a uniform `θ` grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantumTable {
    #[serde(rename = "N")]
    pub n: u32,
    pub hbar: f64,
    pub gammas: [f64; 4],
    pub gamma: f64,
    pub tau_kind: TauKind,
    pub theta: Vec<f64>,
    pub tau: Vec<f64>,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub flags: Vec<String>,
}

/// Default table density, points per angular period `2π/(N−2)`.
pub const TABLE_POINTS_PER_PERIOD: usize = 1024;

/// `T(τ) = ħ²(N−2)[W/√(τ(1−τ)) + γ(1−2τ)/(4√(τ(1−τ)))]`.
fn t_of_tau(n: u32, hbar: f64, gamma: f64, tau: f64, w: f64) -> f64 {
    let root = (tau * (1.0 - tau)).sqrt();
    hbar * hbar * (n as f64 - 2.0) * (w / root + gamma * (1.0 - 2.0 * tau) / (4.0 * root))
}

impl QuantumTable {
    /// The potential `R + S/r²` on the tabulated window. Odd `N` admits no
    /// radial part; even `N` pairs with `b r²`, and a Kepler term is
    /// accepted but flagged as an unverified pairing.
    pub fn to_potential(&self, radial: RadialKind) -> Result<PotentialSpec> {
        if self.n % 2 == 1 && !radial.is_zero() {
            return Err(Error::Constraint(format!("odd N = {} admits no radial part", self.n)));
        }
        let spline = CubicSpline::new(self.theta.clone(), self.s.clone(), SplineBoundary::Natural)?;
        let mut flags = self.flags.clone();
        match radial {
            RadialKind::Zero | RadialKind::Oscillator { .. } => {}
            RadialKind::Kepler { .. } => flags.push("unverified pairing: kepler radial part with a Painleve VI profile".into()),
            ref other => {
                return Err(Error::InvalidSpec(format!(
                    "radial part {} cannot pair with the exotic quantum family",
                    other.label()
                )))
            }
        }
        let mut spec = PotentialSpec::new(radial, AngularPart::Table(Arc::new(spline)))
            .with_family("exotic-quantum")
            .with_order(self.n)
            .with_hbar(self.hbar)
            .with_tau(self.tau_kind);
        for (i, g) in self.gammas.iter().enumerate() {
            spec.params.insert(format!("gamma{}", i + 1), *g);
        }
        spec.flags = flags;
        Ok(spec)
    }
}

/// Tabulates `T` and `S = dT/dθ` for the exotic quantum family on the
/// largest `θ` window whose `τ` values stay inside one pole-free stretch of
/// `sol`. `S` comes from sixth-order central differences of `T`.
pub fn exotic_quantum_t(n: u32, sol: &P6Solution, hbar: f64, tau_kind: TauKind) -> Result<QuantumTable> {
    if n < 3 {
        return Err(Error::InvalidSpec(format!("exotic family needs N >= 3, got {n}")));
    }
    if tau_kind == TauKind::Tan {
        return Err(Error::InvalidSpec("the quantum family uses the cos2 or sin2 reading of tau".into()));
    }
    if n % 2 == 1 {
        let v = odd_order_constraint(sol.gammas)?;
        if v.abs() > 1e-10 {
            return Err(Error::Constraint(format!(
                "odd N = {n} requires (g2+g3)(g1+g4-sqrt(2 g1)) = 0, got {v:.3e}"
            )));
        }
    }
    let k = n as f64 - 2.0;
    let period = 2.0 * std::f64::consts::PI / k;
    let h = period / TABLE_POINTS_PER_PERIOD as f64;
    // on 0 < u < π, τ = cos²(u/2) decreases and sin²(u/2) increases
    let theta_of = |tau: f64| -> f64 {
        let u = match tau_kind {
            TauKind::Cos2Half => 2.0 * tau.sqrt().acos(),
            _ => 2.0 * tau.sqrt().asin(),
        };
        u / k
    };
    let (lo, hi) = sol
        .windows()
        .into_iter()
        .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
        .ok_or(Error::Pole { theta: sol.tau0 })?;
    let (t_a, t_b) = {
        let (a, b) = (theta_of(lo), theta_of(hi));
        (a.min(b), a.max(b))
    };
    // three guard points each side for the difference stencil
    let first = (t_a / h).ceil() as i64 + 3;
    let last = (t_b / h).floor() as i64 - 3;
    if last - first < 8 {
        return Err(Error::InvalidSpec("pole-free window too short for a table".into()));
    }
    let mut theta_ext = Vec::new();
    let mut tau_ext = Vec::new();
    let mut w_ext = Vec::new();
    let mut t_ext = Vec::new();
    for i in (first - 3)..=(last + 3) {
        let th = i as f64 * h;
        let tau = tau_kind.tau(n, th).clamp(lo, hi);
        let w = w_of_p6(sol, tau)?;
        theta_ext.push(th);
        tau_ext.push(tau);
        w_ext.push(w);
        t_ext.push(t_of_tau(n, hbar, sol.gamma, tau, w));
    }
    let m = t_ext.len();
    let s: Vec<f64> = (3..m - 3)
        .map(|i| {
            let f = |j: i64| t_ext[(i as i64 + j) as usize];
            (-f(-3) + 9.0 * f(-2) - 45.0 * f(-1) + 45.0 * f(1) - 9.0 * f(2) + f(3)) / (60.0 * h)
        })
        .collect();
    let trim = |v: &[f64]| v[3..m - 3].to_vec();
    Ok(QuantumTable {
        n,
        hbar,
        gammas: sol.gammas,
        gamma: sol.gamma,
        tau_kind,
        theta: trim(&theta_ext),
        tau: trim(&tau_ext),
        w: trim(&w_ext),
        t: trim(&t_ext),
        s,
        flags: vec![
            "W evaluated with z read as tau".into(),
            format!("angular table covers theta in [{}, {}] only", theta_ext[3], theta_ext[m - 4]),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GENERIC: [f64; 4] = [0.125, -0.125, 0.125, 0.375];

    #[test]
    fn composite_gamma_value() {
        assert_eq!(composite_gamma([0.0; 4]).unwrap(), -0.75);
        let g = composite_gamma(GENERIC).unwrap();
        assert!((g - (0.25 - 0.25 + 0.5 - 0.75)).abs() < 1e-15);
        assert!(composite_gamma([-1.0, 0.0, 0.0, 0.0]).is_err());
        assert_eq!(odd_order_constraint([0.5, 0.0, 0.0, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn w_vanishes_for_constant_solution() {
        for c in [-0.7, 0.3, 2.5] {
            for i in 1..50 {
                let tau = i as f64 / 50.0;
                if (tau - c).abs() < 1e-3 {
                    continue;
                }
                assert!(w_value([0.0; 4], tau, c, 0.0).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gamma1_half_kills_second_summand() {
        let (tau, p, dp) = (0.4, 0.7, 0.2);
        let a = w_value([0.5, 0.1, 0.2, 0.3], tau, p, dp).unwrap();
        let first = tau * tau * (tau - 1.0f64).powi(2) / (4.0 * p * (p - 1.0) * (p - tau))
            * (dp - p * (p - 1.0) / (tau * (tau - 1.0))).powi(2);
        let rest = -0.25 * 0.1 * (1.0 - 2.0 * tau / p) - 0.25 * 0.2 * (1.0 - 2.0 * (tau - 1.0) / (p - 1.0))
            + (0.125 - 0.25 * 0.3) * (1.0 - 2.0 * tau * (p - 1.0) / (p - tau));
        assert!((a - first - rest).abs() < 1e-15);
    }

    #[test]
    fn constant_solution_is_preserved() {
        let grid = P6Grid {
            lo: 0.1,
            hi: 0.9,
            samples: 81,
        };
        let sol = p6_solve([0.0; 4], 0.5, 2.0, 0.0, grid, &P6Options::default()).unwrap();
        assert!(sol.pole.iter().all(|f| !f));
        for p in sol.p.iter().flatten() {
            assert!((p - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn generic_solution_plugs_back() {
        let grid = P6Grid {
            lo: 0.05,
            hi: 0.95,
            samples: 181,
        };
        let sol = p6_solve(GENERIC, 0.5, 0.3, 0.1, grid, &P6Options::default()).unwrap();
        assert!(sol.pole.iter().filter(|f| !**f).count() > 40);
        assert!(sol.max_residual < 1e-7, "{}", sol.max_residual);
    }

    #[test]
    fn reversal_returns_to_initial_data() {
        let grid = P6Grid {
            lo: 0.2,
            hi: 0.6,
            samples: 41,
        };
        let fwd = p6_solve(GENERIC, 0.3, 0.45, -0.2, grid, &P6Options::default()).unwrap();
        let (p, dp) = fwd.eval(0.44).unwrap();
        let back = p6_solve(GENERIC, 0.44, p, dp, grid, &P6Options::default()).unwrap();
        let (p0, dp0) = back.eval(0.3).unwrap();
        assert!((p0 - 0.45).abs() < 1e-6 && (dp0 + 0.2).abs() < 1e-6, "{p0} {dp0}");
    }

    #[test]
    fn constant_data_gives_the_closed_form_table() {
        let grid = P6Grid {
            lo: 0.02,
            hi: 0.98,
            samples: 97,
        };
        let sol = p6_solve([0.0; 4], 0.5, -0.5, 0.0, grid, &P6Options::default()).unwrap();
        for kind in [TauKind::Cos2Half, TauKind::Sin2Half] {
            let q = exotic_quantum_t(4, &sol, 1.0, kind).unwrap();
            for (&tau, &t) in q.tau.iter().zip(&q.t) {
                let want = -3.0 / 16.0 * 2.0 * (1.0 - 2.0 * tau) / (tau * (1.0 - tau)).sqrt();
                assert!((t - want).abs() < 1e-9 * want.abs().max(1.0), "{tau}: {t} vs {want}");
            }
        }
        let q = exotic_quantum_t(4, &sol, 0.0, TauKind::Cos2Half).unwrap();
        assert!(q.t.iter().chain(&q.s).all(|v| *v == 0.0));
    }

    #[test]
    fn radial_pairings() {
        let grid = P6Grid {
            lo: 0.02,
            hi: 0.98,
            samples: 49,
        };
        let sol = p6_solve([0.0; 4], 0.5, -0.5, 0.0, grid, &P6Options::default()).unwrap();
        let even = exotic_quantum_t(4, &sol, 1.0, TauKind::Cos2Half).unwrap();
        assert!(even.to_potential(RadialKind::Oscillator { b: 1.0 }).is_ok());
        let k = even.to_potential(RadialKind::Kepler { a: -1.0 }).unwrap();
        assert!(k.flags.iter().any(|f| f.contains("unverified pairing")));
        let odd = exotic_quantum_t(3, &sol, 1.0, TauKind::Cos2Half).unwrap();
        assert!(odd.to_potential(RadialKind::Oscillator { b: 1.0 }).is_err());
        assert!(odd.to_potential(RadialKind::Zero).is_ok());
    }

    #[test]
    fn odd_order_requires_the_gamma_relation() {
        let grid = P6Grid {
            lo: 0.1,
            hi: 0.9,
            samples: 21,
        };
        let sol = p6_solve([0.125, 0.25, 0.0, 0.0], 0.5, 0.3, 0.1, grid, &P6Options::default()).unwrap();
        assert!(matches!(exotic_quantum_t(5, &sol, 1.0, TauKind::Cos2Half), Err(Error::Constraint(_))));
    }
}
