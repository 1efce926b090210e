//! Standard angular families: `T(θ)` a ratio of trigonometric polynomials
//! whose denominator is read off the `Y_I` slots of the leading term, and
//! `S = T′`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AngularPart, PotentialSpec, RadialKind};
use crate::error::{Error, Result};
use crate::integrals::{split_i_ii, PolarLeadingSpec};
use crate::jetfield::FieldExpr;

/// `c0 + Σ_s (a_s cos sθ + b_s sin sθ)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub c0: f64,
    pub cos: BTreeMap<u32, f64>,
    pub sin: BTreeMap<u32, f64>,
}

impl TrigPoly {
    pub fn add_term(&mut self, term: TrigTerm, value: f64) {
        match term {
            TrigTerm::Const => self.c0 += value,
            TrigTerm::Cos(s) => *self.cos.entry(s).or_insert(0.0) += value,
            TrigTerm::Sin(s) => *self.sin.entry(s).or_insert(0.0) += value,
        }
    }

    pub fn from_terms(terms: &[TrigTerm], values: &[f64]) -> Self {
        let mut p = Self::default();
        for (&t, &v) in terms.iter().zip(values) {
            p.add_term(t, v);
        }
        p
    }

    pub fn coefficient(&self, term: TrigTerm) -> f64 {
        match term {
            TrigTerm::Const => self.c0,
            TrigTerm::Cos(s) => self.cos.get(&s).copied().unwrap_or(0.0),
            TrigTerm::Sin(s) => self.sin.get(&s).copied().unwrap_or(0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0.0 && self.cos.values().all(|&v| v == 0.0) && self.sin.values().all(|&v| v == 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.c0
            + self.cos.iter().map(|(&s, a)| a * (s as f64 * theta).cos()).sum::<f64>()
            + self.sin.iter().map(|(&s, b)| b * (s as f64 * theta).sin()).sum::<f64>()
    }

    pub fn derivative(&self) -> Self {
        let mut d = Self::default();
        for (&s, &a) in &self.cos {
            d.add_term(TrigTerm::Sin(s), -(s as f64) * a);
        }
        for (&s, &b) in &self.sin {
            d.add_term(TrigTerm::Cos(s), s as f64 * b);
        }
        d
    }

    pub fn max_abs_on_grid(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| self.eval(2.0 * std::f64::consts::PI * k as f64 / samples as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Stores the coefficients as `{prefix}c0`, `{prefix}cos{s}`, `{prefix}sin{s}`.
    pub fn write_params(&self, prefix: &str, out: &mut BTreeMap<String, f64>) {
        out.insert(format!("{prefix}c0"), self.c0);
        for (s, a) in &self.cos {
            out.insert(format!("{prefix}cos{s}"), *a);
        }
        for (s, b) in &self.sin {
            out.insert(format!("{prefix}sin{s}"), *b);
        }
    }

    /// Inverse of [`Self::write_params`]; other keys are ignored.
    pub fn read_params(prefix: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut p = Self::default();
        for (key, &v) in params {
            let Some(rest) = key.strip_prefix(prefix) else { continue };
            let harmonic = |tail: &str| {
                tail.parse::<u32>()
                    .map_err(|_| Error::InvalidSpec(format!("bad trigonometric parameter {key}")))
            };
            let term = if rest == "c0" {
                TrigTerm::Const
            } else if let Some(t) = rest.strip_prefix("cos") {
                TrigTerm::Cos(harmonic(t)?)
            } else if let Some(t) = rest.strip_prefix("sin") {
                TrigTerm::Sin(harmonic(t)?)
            } else {
                return Err(Error::InvalidSpec(format!("bad trigonometric parameter {key}")));
            };
            p.add_term(term, v);
        }
        Ok(p)
    }

    /// The polynomial as a field in variable 0.
    pub fn to_field(&self) -> FieldExpr {
        let t = FieldExpr::var(0);
        let mut terms = vec![(self.c0, FieldExpr::constant(1.0))];
        for (&s, &a) in &self.cos {
            terms.push((a, t.scale(s as f64).cos()));
        }
        for (&s, &b) in &self.sin {
            terms.push((b, t.scale(s as f64).sin()));
        }
        FieldExpr::linear(terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigTerm {
    Const,
    Cos(u32),
    Sin(u32),
}

/// The four standard families; the first two carry a confining radial part
/// and need even `N`, the last two are scale free and need odd `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularFamily {
    /// `R = a/r`; numerator harmonics `0, 1, 3, …, N−1`; denominator
    /// `Σ_{odd s} B1 cos sθ + B2 sin sθ`.
    DeformedKepler,
    /// `R = b r²`; numerator harmonics `0, 2, …, N`; denominator
    /// `Σ_{even s} s (B2 cos sθ − B1 sin sθ)`.
    DeformedOscillator,
    /// `R = 0`; numerator harmonics `1, 3, …, N`; denominator
    /// `Σ_{odd s} s (B2 cos sθ − B1 sin sθ)`.
    OddScaleFree,
    /// `R = 0`; numerator harmonics `0, 2, …, N−1`; denominator
    /// `Σ_{even s} B1 cos sθ + B2 sin sθ`.
    EvenScaleFree,
}

impl AngularFamily {
    pub const ALL: [AngularFamily; 4] = [
        AngularFamily::DeformedKepler,
        AngularFamily::DeformedOscillator,
        AngularFamily::OddScaleFree,
        AngularFamily::EvenScaleFree,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            AngularFamily::DeformedKepler => "deformed-kepler",
            AngularFamily::DeformedOscillator => "deformed-oscillator",
            AngularFamily::OddScaleFree => "odd-scale-free",
            AngularFamily::EvenScaleFree => "even-scale-free",
        }
    }

    pub fn needs_even_order(self) -> bool {
        matches!(self, AngularFamily::DeformedKepler | AngularFamily::DeformedOscillator)
    }

    fn odd_harmonics(self) -> bool {
        matches!(self, AngularFamily::DeformedKepler | AngularFamily::OddScaleFree)
    }

    pub fn check_order(self, n: u32) -> Result<()> {
        if (n % 2 == 0) != self.needs_even_order() {
            return Err(Error::InvalidSpec(format!(
                "family {} is not defined for N = {n}",
                self.name()
            )));
        }
        Ok(())
    }

    /// Numerator basis in a fixed order.
    pub fn numerator_terms(self, n: u32) -> Vec<TrigTerm> {
        let (with_const, first, last) = match self {
            AngularFamily::DeformedKepler => (true, 1, n.saturating_sub(1)),
            AngularFamily::DeformedOscillator => (true, 2, n),
            AngularFamily::OddScaleFree => (false, 1, n),
            AngularFamily::EvenScaleFree => (true, 2, n.saturating_sub(1)),
        };
        let mut v = Vec::new();
        if with_const {
            v.push(TrigTerm::Const);
        }
        let mut s = first;
        while s <= last {
            v.push(TrigTerm::Cos(s));
            v.push(TrigTerm::Sin(s));
            s += 2;
        }
        v
    }

    /// Denominator built from the `Y_I` slots of `spec`.
    pub fn denominator(self, spec: &PolarLeadingSpec) -> TrigPoly {
        let (y_i, _) = split_i_ii(spec);
        let mut d = TrigPoly::default();
        for (slot, b) in y_i.populated() {
            let s = slot.s;
            if s == 0 || (s % 2 == 1) != self.odd_harmonics() {
                continue;
            }
            let sf = s as f64;
            let (cos_term, sin_term) = match (self, slot.component) {
                (AngularFamily::DeformedKepler | AngularFamily::EvenScaleFree, 1) => (b, 0.0),
                (AngularFamily::DeformedKepler | AngularFamily::EvenScaleFree, _) => (0.0, b),
                // s (B2 cos − B1 sin)
                (_, 1) => (0.0, -sf * b),
                (_, _) => (sf * b, 0.0),
            };
            d.add_term(TrigTerm::Cos(s), cos_term);
            d.add_term(TrigTerm::Sin(s), sin_term);
        }
        d.cos.retain(|_, v| *v != 0.0);
        d.sin.retain(|_, v| *v != 0.0);
        d
    }

    pub fn radial(self, coefficient: f64) -> RadialKind {
        match self {
            AngularFamily::DeformedKepler => RadialKind::Kepler { a: coefficient },
            AngularFamily::DeformedOscillator => RadialKind::Oscillator { b: coefficient },
            _ => RadialKind::Zero,
        }
    }
}

/// `S = (T)′` for `T = num/den`, as a field in variable 0.
pub fn quotient_derivative(num: &TrigPoly, den: &TrigPoly) -> FieldExpr {
    let (n, d) = (num.to_field(), den.to_field());
    let (dn, dd) = (num.derivative().to_field(), den.derivative().to_field());
    (&dn * &d - &n * &dd) / (&d * &d)
}

/// Angles on a uniform grid of `samples` points where `|den|` drops below
/// `rel` times its maximum.
pub fn near_poles(den: &TrigPoly, samples: usize, rel: f64) -> Vec<f64> {
    let m = den.max_abs_on_grid(samples.max(64));
    (0..samples)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / samples as f64)
        .filter(|&t| den.eval(t).abs() < rel * m)
        .collect()
}

/// A standard family potential `R + T′/r²` with `T = num/den`.
///
/// `numerator` lists the coefficients of [`AngularFamily::numerator_terms`];
/// `radial` is `a` or `b` for the confining families and ignored otherwise.
pub fn standard_quantum_t(
    spec: &PolarLeadingSpec,
    family: AngularFamily,
    numerator: &[f64],
    radial: f64,
    hbar: f64,
) -> Result<PotentialSpec> {
    let n = spec.order();
    family.check_order(n)?;
    let terms = family.numerator_terms(n);
    if numerator.len() != terms.len() {
        return Err(Error::InvalidSpec(format!(
            "family {} at N = {n} takes {} numerator constants, got {}",
            family.name(),
            terms.len(),
            numerator.len()
        )));
    }
    let den = family.denominator(spec);
    if den.is_zero() {
        return Err(Error::InvalidSpec("denominator vanishes identically".into()));
    }
    if hbar < 0.0 {
        return Err(Error::InvalidSpec("hbar must be non-negative".into()));
    }
    let num = TrigPoly::from_terms(&terms, numerator);
    let s = if num.is_zero() {
        FieldExpr::zero()
    } else {
        quotient_derivative(&num, &den)
    };
    let poles = near_poles(&den, 1024, 1e-6);
    let mut params = BTreeMap::new();
    num.write_params("num_", &mut params);
    den.write_params("den_", &mut params);
    params.insert("radial".into(), radial);
    let mut p = PotentialSpec::new(family.radial(radial), AngularPart::Field(s))
        .with_family(family.name())
        .with_order(n)
        .with_hbar(hbar)
        .with_params(params);
    if !poles.is_empty() {
        p.flags.push(format!("angular poles near {} grid angles", poles.len()));
    }
    Ok(p)
}

/// `S = (num/den)′` from parameters written by [`standard_quantum_t`].
pub(crate) fn angular_from_params(params: &BTreeMap<String, f64>) -> Result<FieldExpr> {
    let num = TrigPoly::read_params("num_", params)?;
    let den = TrigPoly::read_params("den_", params)?;
    if num.is_zero() {
        return Ok(FieldExpr::zero());
    }
    if den.is_zero() {
        return Err(Error::InvalidSpec("header lacks a denominator".into()));
    }
    Ok(quotient_derivative(&num, &den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerator_bases() {
        use TrigTerm::*;
        assert_eq!(AngularFamily::DeformedKepler.numerator_terms(4), vec![Const, Cos(1), Sin(1), Cos(3), Sin(3)]);
        assert_eq!(AngularFamily::DeformedOscillator.numerator_terms(2), vec![Const, Cos(2), Sin(2)]);
        assert_eq!(AngularFamily::OddScaleFree.numerator_terms(3), vec![Cos(1), Sin(1), Cos(3), Sin(3)]);
        assert_eq!(AngularFamily::EvenScaleFree.numerator_terms(3), vec![Const, Cos(2), Sin(2)]);
    }

    #[test]
    fn oscillator_denominator_for_cartesian_slot() {
        // p_x² − p_y² = P² cos 2Φ
        let spec = PolarLeadingSpec::new(2).unwrap().with_b1(2, 0, 1.0).unwrap();
        let d = AngularFamily::DeformedOscillator.denominator(&spec);
        assert_eq!(d.coefficient(TrigTerm::Sin(2)), -2.0);
        assert_eq!(d.coefficient(TrigTerm::Cos(2)), 0.0);
    }

    #[test]
    fn export_import_roundtrip() {
        let spec = PolarLeadingSpec::new(4).unwrap().with_b1(4, 0, 1.0).unwrap().with_b2(2, 0, 0.3).unwrap();
        let p = standard_quantum_t(&spec, AngularFamily::DeformedOscillator, &[0.1, 0.2, 0.3, 0.1, 0.05], 1.0, 0.5)
            .unwrap();
        let dir = std::env::temp_dir().join(format!("sepint-standard-{}", std::process::id()));
        let (json, _) = p.export(&dir, "std").unwrap();
        let q = PotentialSpec::import(&json).unwrap();
        assert_eq!(q.family, "deformed-oscillator");
        assert_eq!(q.hbar, 0.5);
        for k in 0..40 {
            let (r, th) = (0.5 + 0.03 * k as f64, -3.0 + 0.15 * k as f64);
            let (a, b) = (p.value(r, th), q.value(r, th));
            match (a, b) {
                (Ok(a), Ok(b)) => assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}"),
                (a, b) => assert_eq!(a.is_err(), b.is_err()),
            }
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn zero_numerator_gives_radial_only() {
        let spec = PolarLeadingSpec::new(2).unwrap().with_b1(2, 0, 1.0).unwrap();
        let p = standard_quantum_t(&spec, AngularFamily::DeformedOscillator, &[0.0; 3], 1.0, 0.0).unwrap();
        assert!(p.angular_field().unwrap().is_zero());
        assert!(matches!(p.radial, RadialKind::Oscillator { b } if b == 1.0));
    }

    #[test]
    fn quotient_rule() {
        let mut num = TrigPoly::default();
        num.add_term(TrigTerm::Cos(2), 1.0);
        let mut den = TrigPoly::default();
        den.add_term(TrigTerm::Sin(2), 1.0);
        // (cot 2θ)′ = −2/sin² 2θ
        let s = quotient_derivative(&num, &den);
        let t = 0.4f64;
        assert!((s.eval1(t).unwrap() + 2.0 / (2.0 * t).sin().powi(2)).abs() < 1e-12);
    }
}
