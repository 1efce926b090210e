//! Classical trajectories, conserved-quantity drift, orbit closure and
//! polynomial dependence among integral values.
//!
//! The flow of `H = ½|p|² + V(x, y)` is integrated with a fixed-step
//! kick-drift-kick splitting, optionally composed to fourth order. The step
//! is only ever changed by a global restart at half the step.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jetfield::FieldExpr;
use crate::observables::{MomentumPolynomial, PhasePoint};
use crate::potentials::PotentialSpec;

/// Relative drift is measured against `max(|O(0)|, DRIFT_FLOOR)`.
pub const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Second-order kick-drift-kick.
    Leapfrog,
    /// Triple-jump composition of the leapfrog step.
    Yoshida4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Control {
    pub dt: f64,
    pub scheme: Scheme,
    /// Largest relative energy drift accepted before halving the step.
    pub drift_budget: f64,
    pub min_dt: f64,
    /// Singularity guard.
    pub r_min: f64,
    /// Keep every `stride`-th step.
    pub stride: usize,
    pub seed: u64,
}

impl Default for Control {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            scheme: Scheme::Yoshida4,
            drift_budget: 1e-10,
            min_dt: 1e-6,
            r_min: 1e-4,
            stride: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: u64,
    /// Global restarts at half the step.
    pub rejections: u32,
    pub dt: f64,
    pub min_r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub potential: String,
    pub init: PhasePoint,
    pub t: Vec<f64>,
    pub samples: Vec<PhasePoint>,
    pub stats: IntegratorStats,
    /// Largest relative drift of `H` over the samples.
    pub energy_drift: f64,
}

impl TrajectoryRecord {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "x", "y", "px", "py"]).map_err(csv_error)?;
        for (t, p) in self.t.iter().zip(&self.samples) {
            out.write_record([t, &p.x, &p.y, &p.px, &p.py].map(|v| format!("{v:?}")))
                .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// A short identifier of the potential, for records and reports.
pub fn potential_id(v: &PotentialSpec) -> String {
    let params: Vec<String> = v.params.iter().map(|(k, x)| format!("{k}={x}")).collect();
    format!("{}[{}]({})", v.family, v.radial.label(), params.join(","))
}

/// `−∇V` and `H` evaluation for one potential.
struct Flow {
    v: FieldExpr,
    r_min: f64,
}

impl Flow {
    fn new(v: &PotentialSpec, r_min: f64) -> Result<Self> {
        if !v.is_classical() {
            return Err(Error::InvalidSpec("dynamics needs a classical potential (hbar = 0)".into()));
        }
        Ok(Self { v: v.v_field()?, r_min })
    }

    fn force(&self, q: [f64; 2]) -> Result<[f64; 2]> {
        let j = self.v.jet(q, 1)?;
        Ok([-j.partial(1, 0), -j.partial(0, 1)])
    }

    fn energy(&self, p: &PhasePoint) -> Result<f64> {
        Ok(0.5 * (p.px * p.px + p.py * p.py) + self.v.eval(p.x, p.y)?)
    }
}

/// Position, momentum and the force at the current position.
#[derive(Debug, Clone, Copy)]
struct State {
    q: [f64; 2],
    p: [f64; 2],
    f: [f64; 2],
}

impl State {
    fn new(flow: &Flow, pt: PhasePoint) -> Result<Self> {
        let q = [pt.x, pt.y];
        Ok(Self {
            q,
            p: [pt.px, pt.py],
            f: flow.force(q)?,
        })
    }

    fn point(&self) -> PhasePoint {
        PhasePoint::new(self.q[0], self.q[1], self.p[0], self.p[1])
    }

    fn r(&self) -> f64 {
        self.q[0].hypot(self.q[1])
    }

    fn kdk(&mut self, flow: &Flow, h: f64) -> Result<()> {
        for k in 0..2 {
            self.p[k] += 0.5 * h * self.f[k];
            self.q[k] += h * self.p[k];
        }
        if self.r() < flow.r_min {
            return Err(Error::RadiusTooSmall {
                r: self.r(),
                r_min: flow.r_min,
            });
        }
        self.f = flow.force(self.q)?;
        for k in 0..2 {
            self.p[k] += 0.5 * h * self.f[k];
        }
        Ok(())
    }

    fn step(&mut self, flow: &Flow, scheme: Scheme, h: f64) -> Result<()> {
        match scheme {
            Scheme::Leapfrog => self.kdk(flow, h),
            Scheme::Yoshida4 => {
                let c = 2f64.cbrt();
                let w1 = 1.0 / (2.0 - c);
                let w0 = -c / (2.0 - c);
                self.kdk(flow, w1 * h)?;
                self.kdk(flow, w0 * h)?;
                self.kdk(flow, w1 * h)
            }
        }
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let Some(&v0) = values.first() else {
        return 0.0;
    };
    let d = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    d / v0.abs().max(DRIFT_FLOOR)
}

/// Steps between in-flight energy checks.
const ENERGY_CHECK_EVERY: u64 = 64;

/// Relative energy error of `s`, infinite when `V` cannot be evaluated.
fn energy_error(flow: &Flow, e0: f64, s: &State) -> f64 {
    match flow.energy(&s.point()) {
        Ok(e) if e.is_finite() => (e - e0).abs() / e0.abs().max(DRIFT_FLOOR),
        _ => f64::INFINITY,
    }
}

fn check_init(v: &PotentialSpec, init: &PhasePoint, control: &Control) -> Result<Flow> {
    if !(control.dt > 0.0 && control.min_dt > 0.0 && control.stride >= 1) {
        return Err(Error::InvalidSpec("dt, min_dt and stride must be positive".into()));
    }
    if init.r() <= control.r_min {
        return Err(Error::RadiusTooSmall {
            r: init.r(),
            r_min: control.r_min,
        });
    }
    Flow::new(v, control.r_min)
}

/// Integrates from `init` over `[0, t_end]`, halving the step until the
/// energy drift fits `control.drift_budget`.
pub fn integrate(v: &PotentialSpec, init: PhasePoint, t_end: f64, control: &Control) -> Result<TrajectoryRecord> {
    let flow = check_init(v, &init, control)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidSpec(format!("t_end = {t_end} must be positive")));
    }
    let mut dt = control.dt;
    let mut rejections = 0;
    loop {
        let steps = (t_end / dt).ceil().max(1.0) as u64;
        let h = t_end / steps as f64;
        let mut s = State::new(&flow, init)?;
        let mut t = vec![0.0];
        let mut samples = vec![init];
        let mut min_r = init.r();
        let e0 = flow.energy(&init)?;
        let mut early: f64 = 0.0;
        for k in 1..=steps {
            s.step(&flow, control.scheme, h).map_err(|e| singular(e, k as f64 * h))?;
            min_r = min_r.min(s.r());
            if k % ENERGY_CHECK_EVERY == 0 {
                early = energy_error(&flow, e0, &s);
                if !(early <= control.drift_budget) {
                    break;
                }
            }
            if k % control.stride as u64 == 0 || k == steps {
                t.push(k as f64 * h);
                samples.push(s.point());
            }
        }
        let drift = if early <= control.drift_budget {
            let energies = samples.par_iter().map(|p| flow.energy(p)).collect::<Result<Vec<_>>>()?;
            relative_drift(&energies)
        } else {
            early
        };
        if drift <= control.drift_budget {
            return Ok(TrajectoryRecord {
                potential: potential_id(v),
                init,
                t,
                samples,
                stats: IntegratorStats {
                    steps,
                    rejections,
                    dt: h,
                    min_r,
                },
                energy_drift: drift,
            });
        }
        dt /= 2.0;
        rejections += 1;
        if dt < control.min_dt {
            return Err(Error::DriftBudget {
                budget: control.drift_budget,
                dt: 2.0 * dt,
                drift,
            });
        }
    }
}

fn singular(e: Error, t: f64) -> Error {
    match e {
        Error::RadiusTooSmall { r, .. } => Error::Singularity { r, t },
        e => e,
    }
}

/// Largest relative drift of each named observable along the trajectory.
pub fn drift_report(
    traj: &TrajectoryRecord,
    observables: &[(String, MomentumPolynomial)],
) -> Result<BTreeMap<String, f64>> {
    observables
        .iter()
        .map(|(name, o)| {
            let vals = traj.samples.par_iter().map(|p| o.evaluate(p)).collect::<Result<Vec<_>>>()?;
            Ok((name.clone(), relative_drift(&vals)))
        })
        .collect()
}

/// `p/q` from continued fractions, with its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: u64,
    pub error: f64,
}

/// The first convergent of `x` within `tol` whose denominator is at most
/// `q_max`; failing that, the last convergent with `q <= q_max`.
pub fn rational_approximant(x: f64, q_max: u64, tol: f64) -> Rational {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rem = x;
    let mut best = Rational {
        p: x.round() as i64,
        q: 1,
        error: (x - x.round()).abs(),
    };
    for _ in 0..64 {
        let a = rem.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 as u64 > q_max || k2 <= 0 {
            break;
        }
        best = Rational {
            p: h2,
            q: k2 as u64,
            error: (x - h2 as f64 / k2 as f64).abs(),
        };
        if best.error < tol {
            break;
        }
        let frac = rem - a;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngularMotion {
    /// `θ` advances monotonically.
    Rotation,
    /// `θ` oscillates inside a wedge (`L_z` changes sign).
    Libration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitOptions {
    pub control: Control,
    pub q_max: u64,
    pub closure_tol: f64,
    pub rational_tol: f64,
    /// Give up looking for section crossings after this time.
    pub horizon: f64,
    /// Motion counts as unbounded once `r` exceeds this multiple of `r(0)`.
    pub escape_factor: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            control: Control::default(),
            q_max: 32,
            closure_tol: 1e-5,
            rational_tol: 1e-6,
            horizon: 1e4,
            escape_factor: 1e3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitReport {
    pub potential: String,
    pub bounded: bool,
    pub closed: bool,
    /// Minimum scaled phase distance between the first section point and
    /// the later ones.
    pub closure_distance: Option<f64>,
    /// Number of section crossing at which `closure_distance` is attained.
    pub closure_crossing: Option<usize>,
    /// Mean radial period.
    pub period_estimate: Option<f64>,
    pub angular_motion: Option<AngularMotion>,
    /// Angular frequency over radial frequency.
    pub rotation_number: Option<f64>,
    pub rational: Option<Rational>,
    pub radial_periods: usize,
    pub drift: BTreeMap<String, f64>,
    pub q_max: u64,
    pub closure_tol: f64,
    pub rational_tol: f64,
    /// Closure is only a superintegrability test for confining potentials.
    pub advisory: bool,
    pub dt: f64,
}

impl OrbitReport {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Section crossing time and the state there.
#[derive(Debug, Clone, Copy)]
struct Crossing {
    t: f64,
    state: State,
}

/// Root of `g` along a partial step from `s` (where `g > 0`) to the end of
/// the step (where `g <= 0`), by bisection on the step fraction.
fn refine(flow: &Flow, scheme: Scheme, s: &State, h: f64, g: impl Fn(&State) -> f64) -> Result<(f64, State)> {
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > 1e-15 * h.max(1.0) {
        let mid = 0.5 * (lo + hi);
        let mut m = *s;
        m.step(flow, scheme, mid)?;
        if g(&m) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut end = *s;
    end.step(flow, scheme, hi)?;
    Ok((hi, end))
}

fn radial_momentum(s: &State) -> f64 {
    s.q[0] * s.p[0] + s.q[1] * s.p[1]
}

fn angular_momentum(s: &State) -> f64 {
    s.q[0] * s.p[1] - s.q[1] * s.p[0]
}

struct OrbitRun {
    record: TrajectoryRecord,
    radial: Vec<Crossing>,
    angular: Vec<f64>,
    theta_unwrapped: Vec<f64>,
    lz_sign_change: bool,
    escaped: bool,
}

fn run_orbit(flow: &Flow, v: &PotentialSpec, init: PhasePoint, periods: usize, dt: f64, o: &OrbitOptions) -> Result<OrbitRun> {
    let scheme = o.control.scheme;
    let mut s = State::new(flow, init)?;
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut samples = vec![init];
    let mut radial = Vec::new();
    let mut angular = Vec::new();
    let mut theta_unwrapped = Vec::new();
    let mut wrapped = init.y.atan2(init.x);
    let mut theta = wrapped;
    let mut min_r = init.r();
    let lz0 = init.lz();
    let mut lz_sign_change = false;
    let mut escaped = false;
    let mut steps = 0u64;
    let e0 = flow.energy(&init)?;
    let mut early: f64 = 0.0;
    while radial.len() <= periods && t < o.horizon {
        let prev = s;
        s.step(flow, scheme, dt).map_err(|e| singular(e, t + dt))?;
        steps += 1;
        if steps % ENERGY_CHECK_EVERY == 0 {
            early = energy_error(flow, e0, &s);
            if !(early <= o.control.drift_budget) {
                break;
            }
        }
        let unwrap = |q: [f64; 2]| theta + (q[1].atan2(q[0]) - wrapped + PI).rem_euclid(2.0 * PI) - PI;
        min_r = min_r.min(s.r());
        if radial_momentum(&prev) > 0.0 && radial_momentum(&s) <= 0.0 {
            let (h, at) = refine(flow, scheme, &prev, dt, radial_momentum)?;
            radial.push(Crossing { t: t + h, state: at });
            theta_unwrapped.push(unwrap(at.q));
        }
        theta = unwrap(s.q);
        wrapped = s.q[1].atan2(s.q[0]);
        if angular_momentum(&prev) > 0.0 && angular_momentum(&s) <= 0.0 {
            let (h, _) = refine(flow, scheme, &prev, dt, angular_momentum)?;
            angular.push(t + h);
        }
        if angular_momentum(&s).signum() != lz0.signum() {
            lz_sign_change = true;
        }
        t += dt;
        if steps % o.control.stride as u64 == 0 {
            times.push(t);
            samples.push(s.point());
        }
        if s.r() > o.escape_factor * init.r() {
            escaped = true;
            break;
        }
    }
    if *times.last().unwrap() != t {
        times.push(t);
        samples.push(s.point());
    }
    let energy_drift = if early <= o.control.drift_budget {
        let energies = samples.par_iter().map(|p| flow.energy(p)).collect::<Result<Vec<_>>>()?;
        relative_drift(&energies)
    } else {
        early
    };
    Ok(OrbitRun {
        record: TrajectoryRecord {
            potential: potential_id(v),
            init,
            t: times,
            samples,
            stats: IntegratorStats {
                steps,
                rejections: 0,
                dt,
                min_r,
            },
            energy_drift,
        },
        radial,
        angular,
        theta_unwrapped,
        lz_sign_change,
        escaped,
    })
}

/// Closure and rotation-number analysis of the orbit through `init` over up
/// to `max_radial_periods` radial periods, with the drift of `H` and
/// `X = L_z² + 2S` along the way. The trajectory is returned alongside.
pub fn orbit_report(
    v: &PotentialSpec,
    init: PhasePoint,
    max_radial_periods: usize,
    o: &OrbitOptions,
) -> Result<(OrbitReport, TrajectoryRecord)> {
    let flow = check_init(v, &init, &o.control)?;
    if max_radial_periods == 0 {
        return Err(Error::InvalidSpec("need at least one radial period".into()));
    }
    let mut dt = o.control.dt;
    let mut rejections = 0;
    let mut run = loop {
        let run = run_orbit(&flow, v, init, max_radial_periods, dt, o)?;
        // an escape only counts if energy held; blowing up through a
        // singularity also looks like one
        if run.record.energy_drift <= o.control.drift_budget {
            break run;
        }
        dt /= 2.0;
        rejections += 1;
        if dt < o.control.min_dt {
            return Err(Error::DriftBudget {
                budget: o.control.drift_budget,
                dt: 2.0 * dt,
                drift: run.record.energy_drift,
            });
        }
    };
    run.record.stats.rejections = rejections;
    let observables = vec![("H".to_string(), v.hamiltonian()?), ("X".to_string(), v.x_integral()?)];
    let drift = drift_report(&run.record, &observables)?;
    let mut report = OrbitReport {
        potential: potential_id(v),
        bounded: !run.escaped,
        closed: false,
        closure_distance: None,
        closure_crossing: None,
        period_estimate: None,
        angular_motion: None,
        rotation_number: None,
        rational: None,
        radial_periods: run.radial.len().saturating_sub(1),
        drift,
        q_max: o.q_max,
        closure_tol: o.closure_tol,
        rational_tol: o.rational_tol,
        advisory: !v.radial.is_confining(),
        dt,
    };
    if run.escaped {
        return Ok((report, run.record));
    }
    if run.radial.len() < 2 {
        return Err(Error::NoSectionCrossing);
    }
    let n = run.radial.len() - 1;
    let period = (run.radial[n].t - run.radial[0].t) / n as f64;
    report.period_estimate = Some(period);
    let (motion, nu) = if run.lz_sign_change {
        // libration: angular phase counts L_z sections and is interpolated
        // linearly between them, then read at the radial sections; the
        // sections need not be evenly spaced within one period
        let ang = &run.angular;
        if ang.len() < 2 {
            return Err(Error::NoSectionCrossing);
        }
        let phase = |t: f64| {
            let k = ang.partition_point(|&a| a <= t).clamp(1, ang.len() - 1) - 1;
            k as f64 + (t - ang[k]) / (ang[k + 1] - ang[k])
        };
        let inside: Vec<f64> = run
            .radial
            .iter()
            .map(|c| c.t)
            .filter(|&t| t >= ang[0] && t <= ang[ang.len() - 1])
            .collect();
        if inside.len() < 2 {
            return Err(Error::NoSectionCrossing);
        }
        let spans = (inside.len() - 1) as f64;
        (
            AngularMotion::Libration,
            (phase(inside[inside.len() - 1]) - phase(inside[0])) / spans,
        )
    } else {
        let dtheta = run.theta_unwrapped[n] - run.theta_unwrapped[0];
        (AngularMotion::Rotation, (dtheta / n as f64 / (2.0 * PI)).abs())
    };
    report.angular_motion = Some(motion);
    report.rotation_number = Some(nu);
    let rational = rational_approximant(nu, o.q_max, o.rational_tol);
    report.rational = Some(rational);
    let scale = amplitude(&run.record.samples);
    let first = run.radial[0].state.point();
    let (k, dist) = run.radial[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| (k + 1, scaled_distance(&first, &c.state.point(), &scale)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two crossings");
    report.closure_distance = Some(dist);
    report.closure_crossing = Some(k);
    report.closed = dist < o.closure_tol && rational.error < o.rational_tol && rational.q <= o.q_max;
    Ok((report, run.record))
}

/// Per-component amplitude `max |·|` over the samples.
fn amplitude(samples: &[PhasePoint]) -> [f64; 4] {
    let mut a = [0.0f64; 4];
    for p in samples {
        for (ai, v) in a.iter_mut().zip(p.as_array()) {
            *ai = ai.max(v.abs());
        }
    }
    a.map(|v| if v > 0.0 { v } else { 1.0 })
}

fn scaled_distance(a: &PhasePoint, b: &PhasePoint, scale: &[f64; 4]) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .zip(scale)
        .map(|((x, y), s)| ((x - y) / s).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Exponent vectors of all monomials in `vars` variables of total degree
/// `1..=max_degree`, graded, preceded by the constant.
pub fn monomials(vars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; vars]];
    for d in 1..=max_degree {
        let mut cur = vec![0u32; vars];
        degree_exponents(vars, d, 0, &mut cur, &mut out);
    }
    out
}

fn degree_exponents(vars: usize, left: u32, i: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i + 1 == vars {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        degree_exponents(vars, left - e, i + 1, cur, out);
    }
    cur[i] = 0;
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Syzygy {
    pub degree: u32,
    pub monomials: Vec<Vec<u32>>,
    /// Unit-norm coefficients in the original observable units.
    pub coefficients: Vec<f64>,
    /// `σ_min / σ_max` of the scale-normalized monomial matrix.
    pub relative_sigma: f64,
}

impl Syzygy {
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.monomials
            .iter()
            .zip(&self.coefficients)
            .map(|(m, c)| c * monomial_value(m, values))
            .sum()
    }

    /// Coefficient of the monomial with exponents `m`.
    pub fn coefficient(&self, m: &[u32]) -> f64 {
        self.monomials
            .iter()
            .position(|x| x == m)
            .map(|i| self.coefficients[i])
            .unwrap_or(0.0)
    }

    /// Human-readable form with the given observable names.
    pub fn display(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        for (m, c) in self.monomials.iter().zip(&self.coefficients) {
            if c.abs() < 1e-12 {
                continue;
            }
            let mono: Vec<String> = m
                .iter()
                .zip(names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
                .collect();
            let mono = if mono.is_empty() { "1".into() } else { mono.join("*") };
            parts.push(format!("{c:+.6e}*{mono}"));
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub max_degree: u32,
    pub monomial_count: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub relative_sigma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Dependence {
    Syzygy(Syzygy),
    Independent(IndependenceCertificate),
}

/// Singular values at or below this fraction of the largest mark a syzygy.
pub const SYZYGY_THRESHOLD: f64 = 1e-8;

fn monomial_value(m: &[u32], v: &[f64]) -> f64 {
    m.iter().zip(v).map(|(&e, &x)| x.powi(e as i32)).product()
}

struct DegreeFit {
    relative_sigma: f64,
    sigma_min: f64,
    sigma_max: f64,
    nullvector: Vec<f64>,
}

/// SVD of the monomial matrix of `rows`, columns scaled to unit norm.
fn fit_degree(rows: &[Vec<f64>], monos: &[Vec<u32>]) -> Result<(DegreeFit, Vec<f64>)> {
    let mut a = DMatrix::from_fn(rows.len(), monos.len(), |i, j| monomial_value(&monos[j], &rows[i]));
    let mut norms = Vec::with_capacity(monos.len());
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
        norms.push(if n > 0.0 { n } else { 1.0 });
    }
    let svd = a.svd(false, true);
    let vt = svd
        .v_t
        .ok_or_else(|| Error::IllConditioned("SVD did not converge".into()))?;
    let (imin, smin) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let smax = svd.singular_values.max();
    let v: Vec<f64> = vt.row(imin).iter().copied().collect();
    Ok((
        DegreeFit {
            relative_sigma: smin / smax,
            sigma_min: smin,
            sigma_max: smax,
            nullvector: v,
        },
        norms,
    ))
}

/// Looks for a polynomial relation among the observable values (one row per
/// phase point, one column per observable) of total degree at most
/// `max_degree`.
///
/// Observable columns are normalized to unit max-abs first, so rescaling an
/// observable never changes the verdict. The decision is repeated on the
/// even and odd rows; disagreement is reported as ill-conditioned sampling.
pub fn dependence_detect(values: &[Vec<f64>], max_degree: u32) -> Result<Dependence> {
    let vars = values.first().map(Vec::len).unwrap_or(0);
    if vars == 0 || max_degree == 0 {
        return Err(Error::InvalidSpec("need at least one observable and degree >= 1".into()));
    }
    if values.iter().any(|r| r.len() != vars || r.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidSpec("observable values must be finite and rectangular".into()));
    }
    let total = monomials(vars, max_degree).len();
    if values.len() < 3 * total {
        return Err(Error::InvalidSpec(format!(
            "{} samples for {total} monomials; need at least {}",
            values.len(),
            3 * total
        )));
    }
    let mut col_scale = vec![0.0f64; vars];
    for r in values {
        for (s, v) in col_scale.iter_mut().zip(r) {
            *s = s.max(v.abs());
        }
    }
    let col_scale: Vec<f64> = col_scale.into_iter().map(|s| if s > 0.0 { s } else { 1.0 }).collect();
    let rows: Vec<Vec<f64>> = values
        .iter()
        .map(|r| r.iter().zip(&col_scale).map(|(v, s)| v / s).collect())
        .collect();
    let even: Vec<Vec<f64>> = rows.iter().step_by(2).cloned().collect();
    let odd: Vec<Vec<f64>> = rows.iter().skip(1).step_by(2).cloned().collect();
    let mut last = None;
    for d in 1..=max_degree {
        let monos = monomials(vars, d);
        let (fit, norms) = fit_degree(&rows, &monos)?;
        let found = fit.relative_sigma < SYZYGY_THRESHOLD;
        if even.len() >= monos.len() && odd.len() >= monos.len() {
            let a = fit_degree(&even, &monos)?.0.relative_sigma < SYZYGY_THRESHOLD;
            let b = fit_degree(&odd, &monos)?.0.relative_sigma < SYZYGY_THRESHOLD;
            if a != found || b != found {
                return Err(Error::IllConditioned(format!(
                    "degree {d}: full and half samples disagree on dependence"
                )));
            }
        }
        if found {
            // undo column norms and observable scaling
            let mut c: Vec<f64> = fit
                .nullvector
                .iter()
                .zip(&norms)
                .zip(&monos)
                .map(|((x, n), m)| x / n / monomial_value(m, &col_scale))
                .collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            // the first clearly nonzero coefficient is made positive; picking
            // the largest one flips on near ties
            let max = c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let lead = c.iter().copied().find(|v| v.abs() > 1e-3 * max).unwrap_or(1.0);
            let sign = lead.signum() / norm;
            c.iter_mut().for_each(|v| *v *= sign);
            return Ok(Dependence::Syzygy(Syzygy {
                degree: d,
                monomials: monos,
                coefficients: c,
                relative_sigma: fit.relative_sigma,
            }));
        }
        last = Some((fit, monos.len()));
    }
    let (fit, count) = last.expect("max_degree >= 1");
    Ok(Dependence::Independent(IndependenceCertificate {
        max_degree,
        monomial_count: count,
        sigma_min: fit.sigma_min,
        sigma_max: fit.sigma_max,
        relative_sigma: fit.relative_sigma,
    }))
}

/// `count` phase points with positions uniform in the annulus
/// `r_lo <= r <= r_hi` and momenta uniform in `[−p_max, p_max]²`.
pub fn random_phase_points(seed: u64, count: usize, r_lo: f64, r_hi: f64, p_max: f64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(r_lo..=r_hi);
            let th = rng.gen_range(-PI..PI);
            PhasePoint::new(
                r * th.cos(),
                r * th.sin(),
                rng.gen_range(-p_max..=p_max),
                rng.gen_range(-p_max..=p_max),
            )
        })
        .collect()
}

/// Values of the observables at each point, one row per point.
pub fn observable_values(points: &[PhasePoint], observables: &[MomentumPolynomial]) -> Result<Vec<Vec<f64>>> {
    points
        .par_iter()
        .map(|p| observables.iter().map(|o| o.evaluate(p)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{ttw, ttw_k, RadialKind};

    fn free() -> PotentialSpec {
        PotentialSpec::radial_only(RadialKind::Zero)
    }

    #[test]
    fn free_motion_is_straight() {
        let init = PhasePoint::new(1.0, 0.5, 0.3, -0.7);
        let tr = integrate(&free(), init, 5.0, &Control::default()).unwrap();
        let end = tr.samples.last().unwrap();
        assert!((end.x - (1.0 + 0.3 * 5.0)).abs() < 1e-12);
        assert!((end.y - (0.5 - 0.7 * 5.0)).abs() < 1e-12);
        assert!(tr.energy_drift < 1e-13);
        let obs = vec![
            ("H".to_string(), free().hamiltonian().unwrap()),
            ("px".to_string(), MomentumPolynomial::px()),
            ("py".to_string(), MomentumPolynomial::py()),
            ("Lz".to_string(), MomentumPolynomial::lz()),
        ];
        for (name, d) in drift_report(&tr, &obs).unwrap() {
            assert!(d < 1e-12, "{name}: {d}");
        }
    }

    #[test]
    fn oscillator_period() {
        // H = ½p² + r², x(t) = cos(√2 t)
        let v = PotentialSpec::radial_only(RadialKind::Oscillator { b: 1.0 });
        let period = PI * 2f64.sqrt();
        let tr = integrate(&v, PhasePoint::new(1.0, 0.0, 0.0, 0.0), period, &Control::default()).unwrap();
        let end = tr.samples.last().unwrap();
        assert!((end.x - 1.0).abs() < 1e-10 && end.px.abs() < 1e-10, "{end:?}");
    }

    #[test]
    fn singularity_guard() {
        let v = PotentialSpec::radial_only(RadialKind::Zero);
        let c = Control {
            r_min: 0.05,
            ..Control::default()
        };
        let e = integrate(&v, PhasePoint::new(1.0, 0.0, -1.0, 0.0), 2.0, &c).unwrap_err();
        assert!(matches!(e, Error::Singularity { .. }), "{e}");
    }

    #[test]
    fn leapfrog_is_second_order() {
        let v = PotentialSpec::radial_only(RadialKind::Kepler { a: -1.0 });
        let init = PhasePoint::new(1.0, 0.0, 0.0, 0.8);
        let run = |dt: f64, scheme| {
            let c = Control {
                dt,
                scheme,
                drift_budget: 1.0,
                ..Control::default()
            };
            integrate(&v, init, 10.0, &c).unwrap().energy_drift
        };
        let r2 = run(4e-3, Scheme::Leapfrog) / run(2e-3, Scheme::Leapfrog);
        assert!((3.0..5.5).contains(&r2), "{r2}");
        let r4 = run(2e-2, Scheme::Yoshida4) / run(1e-2, Scheme::Yoshida4);
        assert!((11.0..22.0).contains(&r4), "{r4}");
    }

    #[test]
    fn drift_budget_forces_restarts() {
        let v = PotentialSpec::radial_only(RadialKind::Kepler { a: -1.0 });
        let c = Control {
            dt: 0.1,
            scheme: Scheme::Leapfrog,
            drift_budget: 1e-6,
            ..Control::default()
        };
        let tr = integrate(&v, PhasePoint::new(1.0, 0.0, 0.0, 0.8), 5.0, &c).unwrap();
        assert!(tr.stats.rejections > 0 && tr.energy_drift <= 1e-6);
        let c = Control { min_dt: 0.05, ..c };
        assert!(matches!(
            integrate(&v, PhasePoint::new(1.0, 0.0, 0.0, 0.8), 5.0, &c),
            Err(Error::DriftBudget { .. })
        ));
    }

    #[test]
    fn time_reversal() {
        let v = ttw(1.0, 0.1, 0.1, 2, 1).unwrap();
        let init = PhasePoint::from_polar(crate::observables::PolarPoint {
            r: 1.0,
            theta: 0.4,
            pr: 0.3,
            lz: 0.5,
        });
        let c = Control::default();
        let fwd = integrate(&v, init, 3.0, &c).unwrap();
        let mut back = *fwd.samples.last().unwrap();
        back.px = -back.px;
        back.py = -back.py;
        let rev = integrate(&v, back, 3.0, &c).unwrap();
        let end = rev.samples.last().unwrap();
        let d = scaled_distance(&init, &PhasePoint::new(end.x, end.y, -end.px, -end.py), &amplitude(&fwd.samples));
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rational_approximant(0.5, 32, 1e-9), Rational { p: 1, q: 2, error: 0.0 });
        let r = rational_approximant(1.0 / 3.0 + 1e-12, 32, 1e-9);
        assert_eq!((r.p, r.q), (1, 3));
        let r = rational_approximant(2f64.sqrt() - 1.0, 32, 1e-9);
        assert!(r.q <= 32 && r.error > 1e-6);
        assert_eq!(rational_approximant(3.0, 8, 1e-9).q, 1);
    }

    #[test]
    fn kepler_and_oscillator_close() {
        let o = OrbitOptions::default();
        let kep = PotentialSpec::radial_only(RadialKind::Kepler { a: -1.0 });
        let (rep, _) = orbit_report(&kep, PhasePoint::new(1.0, 0.0, 0.1, 0.7), 5, &o).unwrap();
        assert!(rep.closed, "{rep:?}");
        assert_eq!(rep.rational.map(|r| (r.p, r.q)), Some((1, 1)));
        assert_eq!(rep.angular_motion, Some(AngularMotion::Rotation));
        let osc = PotentialSpec::radial_only(RadialKind::Oscillator { b: 1.0 });
        let (rep, _) = orbit_report(&osc, PhasePoint::new(1.0, 0.2, 0.1, 0.6), 5, &o).unwrap();
        assert!(rep.closed, "{rep:?}");
        assert_eq!(rep.rational.map(|r| (r.p, r.q)), Some((1, 2)));
    }

    #[test]
    fn unbounded_motion_is_reported() {
        let (rep, _) = orbit_report(&free(), PhasePoint::new(1.0, 0.0, 1.0, 0.5), 3, &OrbitOptions::default()).unwrap();
        assert!(!rep.bounded && !rep.closed && rep.advisory);
    }

    #[test]
    fn incommensurate_ttw_precesses() {
        let v = ttw_k(1.0, 0.1, 0.1, 2f64.sqrt());
        let init = PhasePoint::from_polar(crate::observables::PolarPoint {
            r: 1.0,
            theta: 0.5,
            pr: 0.2,
            lz: 0.4,
        });
        let (rep, _) = orbit_report(&v, init, 10, &OrbitOptions::default()).unwrap();
        assert!(!rep.closed);
        assert_eq!(rep.angular_motion, Some(AngularMotion::Libration));
    }

    #[test]
    fn monomial_enumeration() {
        let m = monomials(3, 2);
        assert_eq!(m.len(), 10);
        assert_eq!(m[0], vec![0, 0, 0]);
        assert_eq!(m[1], vec![1, 0, 0]);
        assert!(m[4..].iter().all(|e| e.iter().sum::<u32>() == 2));
    }

    #[test]
    fn planted_product_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let (h, x): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                vec![h, x, x * h]
            })
            .collect();
        let Dependence::Syzygy(s) = dependence_detect(&values, 2).unwrap() else {
            panic!("no relation found");
        };
        assert_eq!(s.degree, 2);
        let c = 0.5f64.sqrt();
        assert!((s.coefficient(&[0, 0, 1]).abs() - c).abs() < 1e-8);
        assert!((s.coefficient(&[0, 0, 1]) + s.coefficient(&[1, 1, 0])).abs() < 1e-8);
        // rescaling a column keeps the verdict
        let scaled: Vec<Vec<f64>> = values.iter().map(|r| vec![r[0] * 1e4, r[1], r[2]]).collect();
        assert!(matches!(dependence_detect(&scaled, 2).unwrap(), Dependence::Syzygy(_)));
    }

    #[test]
    fn too_few_samples() {
        let values = vec![vec![1.0, 2.0]; 10];
        assert!(dependence_detect(&values, 2).is_err());
    }
}
