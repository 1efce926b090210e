//! Separable potentials `V = R(r) + S(θ)/r²` and the families built on them.

mod exotic;
mod painleve;
mod standard;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jetfield::{CubicSpline, FieldExpr, SplineBoundary};
use crate::observables::{angle_field, hamiltonian, x_of_unchecked, MomentumPolynomial};

pub use exotic::{
    exotic_classical_t, exotic_closedform_t, fit_closed_form, Branch, ClosedFormFit, ExoticOde, ExoticSolution,
    ReadingFit,
};
pub use painleve::{
    composite_gamma, exotic_quantum_t, odd_order_constraint, p6_rhs, p6_solve, w_of_p6, Detour, P6Grid, P6Options,
    P6Segment, P6Solution, QuantumTable, TABLE_POINTS_PER_PERIOD,
};
pub use standard::{near_poles, quotient_derivative, standard_quantum_t, AngularFamily, TrigPoly, TrigTerm};

/// Radial part `R(r)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RadialKind {
    Zero,
    Kepler {
        a: f64,
    },
    Oscillator {
        b: f64,
    },
    /// `√(a² r² + d) / r²`.
    Onofri {
        a: f64,
        d: f64,
    },
    /// Arbitrary `R(r)` as a field in variable 0.
    #[serde(skip)]
    Custom(FieldExpr),
}

impl RadialKind {
    pub fn label(&self) -> String {
        match self {
            RadialKind::Zero => "zero".into(),
            RadialKind::Kepler { a } => format!("kepler(a={a})"),
            RadialKind::Oscillator { b } => format!("oscillator(b={b})"),
            RadialKind::Onofri { a, d } => format!("onofri(a={a}, d={d})"),
            RadialKind::Custom(_) => "custom".into(),
        }
    }

    /// `R` as a function of variable 0.
    pub fn field(&self) -> FieldExpr {
        let r = FieldExpr::var(0);
        match self {
            RadialKind::Zero => FieldExpr::zero(),
            RadialKind::Kepler { a } => r.powi(-1).scale(*a),
            RadialKind::Oscillator { b } => r.powi(2).scale(*b),
            RadialKind::Onofri { a, d } => (r.powi(2).scale(a * a) + *d).sqrt() / r.powi(2),
            RadialKind::Custom(f) => f.clone(),
        }
    }

    /// `R(√(x² + y²))` in Cartesian variables.
    pub fn cartesian(&self) -> Result<FieldExpr> {
        let (x, y) = (FieldExpr::x(), FieldExpr::y());
        let r2 = &x * &x + &y * &y;
        Ok(match self {
            RadialKind::Zero => FieldExpr::zero(),
            RadialKind::Kepler { a } => r2.powf(-0.5).scale(*a),
            RadialKind::Oscillator { b } => r2.scale(*b),
            RadialKind::Onofri { a, d } => (r2.scale(a * a) + *d).sqrt() / r2,
            RadialKind::Custom(f) => f.compose(&r2.sqrt())?,
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RadialKind::Zero => true,
            RadialKind::Kepler { a } => *a == 0.0,
            RadialKind::Oscillator { b } => *b == 0.0,
            RadialKind::Onofri { .. } => false,
            RadialKind::Custom(f) => f.is_zero(),
        }
    }

    /// Whether bounded motion is guaranteed (for the closure criterion).
    pub fn is_confining(&self) -> bool {
        match self {
            RadialKind::Kepler { a } => *a < 0.0,
            RadialKind::Oscillator { b } => *b > 0.0,
            RadialKind::Onofri { a, .. } => *a != 0.0,
            _ => false,
        }
    }
}

/// Angular part `S(θ)`.
#[derive(Debug, Clone)]
pub enum AngularPart {
    /// Closed form in variable 0.
    Field(FieldExpr),
    /// Cubic-spline table.
    Table(Arc<CubicSpline>),
}

impl AngularPart {
    pub fn field(&self) -> FieldExpr {
        match self {
            AngularPart::Field(f) => f.clone(),
            AngularPart::Table(sp) => FieldExpr::tabulated(sp.clone(), &FieldExpr::var(0)),
        }
    }
}

/// The choice of `τ(θ)` for the exotic families, with `u = (N−2)θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TauKind {
    /// `τ = cos²(u/2)`.
    #[serde(rename = "cos2")]
    Cos2Half,
    /// `τ = sin²(u/2)`.
    #[serde(rename = "sin2")]
    Sin2Half,
    /// `τ = tan u`.
    #[serde(rename = "tan")]
    Tan,
}

impl TauKind {
    pub fn name(self) -> &'static str {
        match self {
            TauKind::Cos2Half => "cos2",
            TauKind::Sin2Half => "sin2",
            TauKind::Tan => "tan",
        }
    }

    pub fn tau(self, n: u32, theta: f64) -> f64 {
        let u = (n as f64 - 2.0) * theta;
        match self {
            TauKind::Cos2Half => (0.5 * u).cos().powi(2),
            TauKind::Sin2Half => (0.5 * u).sin().powi(2),
            TauKind::Tan => u.tan(),
        }
    }

    /// `dτ/dθ`.
    pub fn dtau(self, n: u32, theta: f64) -> f64 {
        let k = n as f64 - 2.0;
        let u = k * theta;
        match self {
            TauKind::Cos2Half => -0.5 * k * u.sin(),
            TauKind::Sin2Half => 0.5 * k * u.sin(),
            TauKind::Tan => k / u.cos().powi(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub radial: RadialKind,
    pub angular: AngularPart,
    pub hbar: f64,
    pub n_tag: Option<u32>,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub tau_kind: Option<TauKind>,
    /// Caveats raised during construction (poles, interpretations, ...).
    pub flags: Vec<String>,
}

impl PotentialSpec {
    pub fn new(radial: RadialKind, angular: AngularPart) -> Self {
        Self {
            radial,
            angular,
            hbar: 0.0,
            n_tag: None,
            family: "separable".into(),
            params: BTreeMap::new(),
            tau_kind: None,
            flags: Vec::new(),
        }
    }

    /// A purely radial potential.
    pub fn radial_only(radial: RadialKind) -> Self {
        Self::new(radial, AngularPart::Field(FieldExpr::zero())).with_family("radial")
    }

    pub fn with_family(mut self, name: &str) -> Self {
        self.family = name.into();
        self
    }

    pub fn with_order(mut self, n: u32) -> Self {
        self.n_tag = Some(n);
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_tau(mut self, tau: TauKind) -> Self {
        self.tau_kind = Some(tau);
        self
    }

    pub fn is_classical(&self) -> bool {
        self.hbar == 0.0
    }

    /// `S(θ)` as a field in variable 0.
    pub fn angular_field(&self) -> Result<FieldExpr> {
        Ok(self.angular.field())
    }

    /// `V(x, y)`.
    pub fn v_field(&self) -> Result<FieldExpr> {
        let (x, y) = (FieldExpr::x(), FieldExpr::y());
        let r2 = &x * &x + &y * &y;
        let s = self.angular.field();
        let ang = if s.is_zero() {
            FieldExpr::zero()
        } else {
            s.compose(&angle_field())? / r2
        };
        Ok(self.radial.cartesian()? + ang)
    }

    pub fn value(&self, r: f64, theta: f64) -> Result<f64> {
        Ok(self.radial.field().eval1(r)? + self.angular.field().eval1(theta)? / (r * r))
    }

    pub fn hamiltonian(&self) -> Result<MomentumPolynomial> {
        Ok(hamiltonian(&self.v_field()?))
    }

    /// `X = L_z² + 2S(θ)`, with `θ = atan2(y, x)`.
    pub fn x_integral(&self) -> Result<MomentumPolynomial> {
        x_of_unchecked(&self.angular.field())
    }

    pub fn is_angular_periodic(&self) -> bool {
        match &self.angular {
            AngularPart::Field(f) => f.is_periodic(-PI, 2.0 * PI, 64, 1e-9),
            AngularPart::Table(sp) => sp.is_periodic(),
        }
    }

    pub fn header(&self) -> PotentialHeader {
        PotentialHeader {
            schema: 1,
            family: self.family.clone(),
            params: self.params.clone(),
            radial: match &self.radial {
                RadialKind::Custom(_) => None,
                r => Some(r.clone()),
            },
            hbar: self.hbar,
            n_tag: self.n_tag,
            tau_kind: self.tau_kind,
            angular: match self.angular {
                AngularPart::Field(_) => AngularSource::ClosedForm,
                AngularPart::Table(_) => AngularSource::Table,
            },
            flags: self.flags.clone(),
        }
    }

    /// `theta,S` samples on `samples` uniform points of `[0, 2π)` (table
    /// potentials write their knots); failing evaluations are written as NaN.
    pub fn angular_csv(&self, samples: usize) -> String {
        match &self.angular {
            AngularPart::Table(sp) => sp.to_csv("S"),
            AngularPart::Field(f) => {
                let mut out = String::from("theta,S\n");
                for k in 0..samples {
                    let t = 2.0 * PI * k as f64 / samples as f64;
                    let v = f.eval1(t).unwrap_or(f64::NAN);
                    out.push_str(&format!("{t:?},{v:?}\n"));
                }
                out
            }
        }
    }

    /// Writes `<stem>.json` (header) and `<stem>.csv` (angular samples).
    pub fn export(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&json, serde_json::to_string_pretty(&self.header())?)?;
        std::fs::write(&csv, self.angular_csv(1024))?;
        Ok((json, csv))
    }

    /// Reads a header and, for tabulated potentials, the `theta,S` table next to it.
    pub fn import(json: &Path) -> Result<Self> {
        let header: PotentialHeader = serde_json::from_str(&std::fs::read_to_string(json)?)?;
        let table = match header.angular {
            AngularSource::Table => {
                let csv = json.with_extension("csv");
                let raw = std::fs::read_to_string(&csv)?;
                // accept either header name for the value column
                let raw = raw.replacen("theta,S\n", "theta,value\n", 1);
                let mut knots = Vec::new();
                let mut values = Vec::new();
                let sp = CubicSpline::from_csv_reader(raw.as_bytes(), SplineBoundary::Natural)?;
                knots.extend_from_slice(sp.knots());
                values.extend_from_slice(sp.values());
                let periodic = (values[0] - values[values.len() - 1]).abs()
                    <= crate::jetfield::PERIODIC_MISMATCH * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let boundary = if periodic { SplineBoundary::Periodic } else { SplineBoundary::Natural };
                Some(Arc::new(CubicSpline::new(knots, values, boundary)?))
            }
            AngularSource::ClosedForm => None,
        };
        Self::from_header(&header, table)
    }

    /// Rebuilds a potential from its header (closed-form families) or from
    /// the header plus an angular table.
    pub fn from_header(h: &PotentialHeader, table: Option<Arc<CubicSpline>>) -> Result<Self> {
        let radial = h
            .radial
            .clone()
            .ok_or_else(|| Error::InvalidSpec("custom radial parts cannot be rebuilt from a header".into()))?;
        let p = |k: &str| {
            h.params
                .get(k)
                .copied()
                .ok_or_else(|| Error::InvalidSpec(format!("header lacks parameter {k}")))
        };
        let mut spec = match (h.angular, h.family.as_str()) {
            (AngularSource::Table, _) => {
                let sp = table.ok_or_else(|| Error::InvalidSpec("angular table missing".into()))?;
                let mut s = PotentialSpec::new(radial, AngularPart::Table(sp));
                s.family = h.family.clone();
                s
            }
            (AngularSource::ClosedForm, "radial") => PotentialSpec::radial_only(radial),
            (AngularSource::ClosedForm, "ttw") => {
                let mut s = ttw_k(0.0, p("alpha")?, p("beta")?, p("k")?);
                s.radial = radial;
                s
            }
            (AngularSource::ClosedForm, "pw") => {
                let mut s = pw_k(0.0, p("mu")?, p("nu")?, p("k")?);
                s.radial = radial;
                s
            }
            (AngularSource::ClosedForm, name) if AngularFamily::from_name(name).is_some() => {
                PotentialSpec::new(radial, AngularPart::Field(standard::angular_from_params(&h.params)?))
                    .with_family(name)
            }
            (AngularSource::ClosedForm, other) => {
                return Err(Error::InvalidSpec(format!(
                    "family {other} has no closed-form rebuild; export it with a table"
                )))
            }
        };
        spec.params = h.params.clone();
        spec.hbar = h.hbar;
        spec.n_tag = h.n_tag;
        spec.tau_kind = h.tau_kind;
        spec.flags = h.flags.clone();
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularSource {
    ClosedForm,
    Table,
}

/// JSON header of an exported potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialHeader {
    pub schema: u32,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub radial: Option<RadialKind>,
    pub hbar: f64,
    #[serde(rename = "N_tag")]
    pub n_tag: Option<u32>,
    pub tau_kind: Option<TauKind>,
    pub angular: AngularSource,
    #[serde(default)]
    pub flags: Vec<String>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn check_ratio(m: u32, n: u32) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidSpec("k = m/n needs m, n >= 1".into()));
    }
    if gcd(m, n) != 1 {
        return Err(Error::InvalidSpec(format!("m = {m} and n = {n} are not coprime")));
    }
    Ok(())
}

fn sec2_csc2(alpha: f64, beta: f64, k: f64) -> FieldExpr {
    let u = FieldExpr::var(0).scale(k);
    let mut terms = Vec::new();
    if alpha != 0.0 {
        terms.push((alpha, u.cos().powi(-2)));
    }
    if beta != 0.0 {
        terms.push((beta, u.sin().powi(-2)));
    }
    FieldExpr::linear(terms)
}

/// `b r² + [α/cos²(kθ) + β/sin²(kθ)]/r²` with `k = m/n`; tagged with
/// `N = 2(m + n − 1)`.
pub fn ttw(b: f64, alpha: f64, beta: f64, m: u32, n: u32) -> Result<PotentialSpec> {
    check_ratio(m, n)?;
    let mut s = ttw_k(b, alpha, beta, m as f64 / n as f64);
    s.n_tag = Some(2 * (m + n - 1));
    s.params.insert("m".into(), m as f64);
    s.params.insert("n".into(), n as f64);
    if !s.is_angular_periodic() {
        s.flags.push("angular part is not 2π-periodic; motion is confined to a wedge".into());
    }
    Ok(s)
}

/// [`ttw`] with an arbitrary real `k` (no coprimality check, no order tag).
pub fn ttw_k(b: f64, alpha: f64, beta: f64, k: f64) -> PotentialSpec {
    let params = BTreeMap::from([
        ("b".to_string(), b),
        ("alpha".to_string(), alpha),
        ("beta".to_string(), beta),
        ("k".to_string(), k),
    ]);
    PotentialSpec::new(RadialKind::Oscillator { b }, AngularPart::Field(sec2_csc2(alpha, beta, k)))
        .with_family("ttw")
        .with_params(params)
}

/// `a/r + [μ/cos²(kθ/2) + ν/sin²(kθ/2)]/r²` with `k = m/n`.
pub fn pw(a: f64, mu: f64, nu: f64, m: u32, n: u32) -> Result<PotentialSpec> {
    check_ratio(m, n)?;
    let mut s = pw_k(a, mu, nu, m as f64 / n as f64);
    s.params.insert("m".into(), m as f64);
    s.params.insert("n".into(), n as f64);
    if !s.is_angular_periodic() {
        s.flags.push("angular part is not 2π-periodic; motion is confined to a wedge".into());
    }
    Ok(s)
}

/// [`pw`] with an arbitrary real `k`.
pub fn pw_k(a: f64, mu: f64, nu: f64, k: f64) -> PotentialSpec {
    let params = BTreeMap::from([
        ("a".to_string(), a),
        ("mu".to_string(), mu),
        ("nu".to_string(), nu),
        ("k".to_string(), k),
    ]);
    PotentialSpec::new(RadialKind::Kepler { a }, AngularPart::Field(sec2_csc2(mu, nu, 0.5 * k)))
        .with_family("pw")
        .with_params(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{poisson, PhasePoint};

    #[test]
    fn ttw_order_tag_and_coprimality() {
        assert_eq!(ttw(1.0, 0.1, 0.1, 2, 1).unwrap().n_tag, Some(4));
        assert_eq!(ttw(1.0, 0.1, 0.1, 1, 1).unwrap().n_tag, Some(2));
        assert!(ttw(1.0, 0.1, 0.1, 2, 4).is_err());
    }

    #[test]
    fn ttw_without_angular_is_oscillator() {
        let v = ttw(1.0, 0.0, 0.0, 3, 2).unwrap().v_field().unwrap();
        assert!((v.eval(0.3, -0.4).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pw_without_angular_is_kepler() {
        let v = pw(-1.0, 0.0, 0.0, 1, 1).unwrap().v_field().unwrap();
        assert!((v.eval(0.6, 0.8).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn separability_bracket() {
        let spec = pw(-1.0, 1.0, 1.0, 1, 1).unwrap();
        let b = poisson(&spec.x_integral().unwrap(), &spec.hamiltonian().unwrap());
        for pt in [PhasePoint::new(0.3, 0.7, 0.2, -0.5), PhasePoint::new(-0.9, 0.4, 1.0, 0.3)] {
            assert!(b.evaluate(&pt).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn header_round_trip_is_bit_exact() {
        let spec = ttw(1.0, 0.1, 0.1, 2, 1).unwrap();
        let a = serde_json::to_string(&spec.header()).unwrap();
        let back: PotentialHeader = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
        let rebuilt = PotentialSpec::from_header(&back, None).unwrap();
        let (v1, v2) = (spec.v_field().unwrap(), rebuilt.v_field().unwrap());
        assert_eq!(v1.eval(0.4, 0.3).unwrap(), v2.eval(0.4, 0.3).unwrap());
    }

    #[test]
    fn tau_derivatives() {
        for tau in [TauKind::Cos2Half, TauKind::Sin2Half, TauKind::Tan] {
            let (n, t, h) = (5, 0.21, 1e-6);
            let fd = (tau.tau(n, t + h) - tau.tau(n, t - h)) / (2.0 * h);
            assert!((fd - tau.dtau(n, t)).abs() < 1e-6, "{tau:?}");
        }
    }
}
