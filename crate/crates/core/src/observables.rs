//! Phase-space points, momentum polynomials and the canonical Poisson bracket.
//!
//! Cartesian `(x, y, p_x, p_y)` is the canonical chart; polar quantities are
//! derived on demand.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jetfield::FieldExpr;

/// Smallest radius at which polar quantities are computed.
pub const R_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

/// Polar chart `(r, θ, p_r, L_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
    pub pr: f64,
    pub lz: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self { x, y, px, py }
    }

    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn lz(&self) -> f64 {
        self.x * self.py - self.y * self.px
    }

    pub fn to_polar(&self) -> Result<PolarPoint> {
        let r = self.r();
        if r <= 0.0 {
            return Err(Error::RadiusTooSmall { r, r_min: 0.0 });
        }
        Ok(PolarPoint {
            r,
            theta: self.y.atan2(self.x),
            pr: (self.x * self.px + self.y * self.py) / r,
            lz: self.lz(),
        })
    }

    pub fn from_polar(p: PolarPoint) -> Self {
        let (s, c) = p.theta.sin_cos();
        Self {
            x: p.r * c,
            y: p.r * s,
            px: c * p.pr - s / p.r * p.lz,
            py: s * p.pr + c / p.r * p.lz,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.px, self.py]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// `Σ c_{ij}(x, y) p_x^i p_y^j` with `i + j <= degree`.
#[derive(Debug, Clone)]
pub struct MomentumPolynomial {
    degree: u32,
    coeffs: BTreeMap<(u32, u32), FieldExpr>,
}

impl MomentumPolynomial {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The configuration-space field `f` as a degree-0 observable.
    pub fn scalar(f: FieldExpr) -> Self {
        let mut m = Self::zero(0);
        m.add_coeff(0, 0, f);
        m
    }

    pub fn px() -> Self {
        let mut m = Self::zero(1);
        m.add_coeff(1, 0, FieldExpr::constant(1.0));
        m
    }

    pub fn py() -> Self {
        let mut m = Self::zero(1);
        m.add_coeff(0, 1, FieldExpr::constant(1.0));
        m
    }

    /// Angular momentum `L_z = x p_y − y p_x`.
    pub fn lz() -> Self {
        let mut m = Self::zero(1);
        m.add_coeff(0, 1, FieldExpr::x());
        m.add_coeff(1, 0, -FieldExpr::y());
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Adds `f` to the coefficient of `p_x^i p_y^j`.
    pub fn add_coeff(&mut self, i: u32, j: u32, f: FieldExpr) {
        assert!(i + j <= self.degree, "monomial ({i},{j}) exceeds degree {}", self.degree);
        if f.is_zero() {
            return;
        }
        let merged = match self.coeffs.remove(&(i, j)) {
            Some(old) => old + f,
            None => f,
        };
        if !merged.is_zero() {
            self.coeffs.insert((i, j), merged);
        }
    }

    /// Coefficient field of `p_x^i p_y^j` (zero when absent).
    pub fn coeff(&self, i: u32, j: u32) -> FieldExpr {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(FieldExpr::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &FieldExpr)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, pt: &PhasePoint) -> Result<f64> {
        let mut acc = 0.0;
        for ((i, j), f) in self.terms() {
            acc += f.eval(pt.x, pt.y)? * pt.px.powi(i as i32) * pt.py.powi(j as i32);
        }
        Ok(acc)
    }

    /// Value of the `(i, j)` coefficient field at a configuration point.
    pub fn coefficient_of(&self, i: u32, j: u32, config: [f64; 2]) -> Result<f64> {
        if i + j > self.degree {
            return Err(Error::InvalidSpec(format!(
                "monomial ({i},{j}) beyond degree {}",
                self.degree
            )));
        }
        self.coeff(i, j).eval(config[0], config[1])
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.degree);
        for ((i, j), f) in self.terms() {
            out.add_coeff(i, j, f.scale(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree.max(other.degree));
        for ((i, j), f) in self.terms().chain(other.terms()) {
            out.add_coeff(i, j, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<(u32, u32), Vec<(f64, FieldExpr)>> = BTreeMap::new();
        for ((i1, j1), f) in self.terms() {
            for ((i2, j2), g) in other.terms() {
                acc.entry((i1 + i2, j1 + j2)).or_default().push((1.0, f * g));
            }
        }
        Self::collect(self.degree + other.degree, acc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::scalar(FieldExpr::constant(1.0));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    fn collect(degree: u32, acc: BTreeMap<(u32, u32), Vec<(f64, FieldExpr)>>) -> Self {
        let mut out = Self::zero(degree);
        for ((i, j), terms) in acc {
            out.add_coeff(i, j, FieldExpr::linear(terms));
        }
        out
    }
}

/// Canonical bracket `{F, G} = Σ_q ∂F/∂q ∂G/∂p_q − ∂F/∂p_q ∂G/∂q`.
///
/// Coefficient fields are lazy derivative nodes over the inputs'
/// coefficients; the result has degree `deg F + deg G − 1`.
pub fn poisson(f: &MomentumPolynomial, g: &MomentumPolynomial) -> MomentumPolynomial {
    let degree = (f.degree + g.degree).saturating_sub(1);
    let mut acc: BTreeMap<(u32, u32), Vec<(f64, FieldExpr)>> = BTreeMap::new();
    let mut push = |key: (u32, u32), c: f64, e: FieldExpr| {
        if !e.is_zero() {
            acc.entry(key).or_default().push((c, e));
        }
    };
    for ((i1, j1), a) in f.terms() {
        let ax = a.partial(1, 0);
        let ay = a.partial(0, 1);
        for ((i2, j2), b) in g.terms() {
            if i2 >= 1 {
                push((i1 + i2 - 1, j1 + j2), i2 as f64, &ax * b);
            }
            if j2 >= 1 {
                push((i1 + i2, j1 + j2 - 1), j2 as f64, &ay * b);
            }
            if i1 >= 1 {
                push((i1 - 1 + i2, j1 + j2), -(i1 as f64), a * &b.partial(1, 0));
            }
            if j1 >= 1 {
                push((i1 + i2, j1 - 1 + j2), -(j1 as f64), a * &b.partial(0, 1));
            }
        }
    }
    MomentumPolynomial::collect(degree, acc)
}

/// `r = √(x² + y²)` as a field.
pub fn radius_field() -> FieldExpr {
    let (x, y) = (FieldExpr::x(), FieldExpr::y());
    (&x * &x + &y * &y).sqrt()
}

/// `θ = atan2(y, x)` as a field.
pub fn angle_field() -> FieldExpr {
    FieldExpr::y().atan2(&FieldExpr::x())
}

/// `H = ½(p_x² + p_y²) + V(x, y)`.
pub fn hamiltonian(v: &FieldExpr) -> MomentumPolynomial {
    let mut h = MomentumPolynomial::zero(2);
    h.add_coeff(2, 0, FieldExpr::constant(0.5));
    h.add_coeff(0, 2, FieldExpr::constant(0.5));
    h.add_coeff(0, 0, v.clone());
    h
}

/// `X = L_z² + 2 S(θ)` for an angular field `S` (a function of variable 0).
///
/// `S` must be 2π-periodic; this is checked by sampling.
pub fn x_of(s: &FieldExpr) -> Result<MomentumPolynomial> {
    if !s.is_periodic(-PI, 2.0 * PI, 64, 1e-9) {
        return Err(Error::InvalidSpec("angular field is not 2π-periodic".into()));
    }
    x_of_unchecked(s)
}

/// [`x_of`] without the periodicity check, for fields confined to a wedge.
pub fn x_of_unchecked(s: &FieldExpr) -> Result<MomentumPolynomial> {
    let lz = MomentumPolynomial::lz();
    let mut x = lz.mul(&lz);
    x.add_coeff(0, 0, s.compose(&angle_field())?.scale(2.0));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let lz = MomentumPolynomial::lz();
        assert_eq!(lz.evaluate(&PhasePoint::new(1.0, 0.0, 0.0, 2.0)).unwrap(), 2.0);
        let p2 = MomentumPolynomial::px().pow(2).add(&MomentumPolynomial::py().pow(2));
        assert_eq!(p2.evaluate(&PhasePoint::new(0.0, 0.0, 3.0, 4.0)).unwrap(), 25.0);
        let s = FieldExpr::x().sin().powi(2);
        let x = x_of(&s).unwrap();
        assert!((x.evaluate(&PhasePoint::new(0.0, 1.0, 1.0, 0.0)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_of_simple_products() {
        // {x p_y, y p_x} = y p_y − x p_x
        let mut a = MomentumPolynomial::zero(1);
        a.add_coeff(0, 1, FieldExpr::x());
        let mut b = MomentumPolynomial::zero(1);
        b.add_coeff(1, 0, FieldExpr::y());
        let c = poisson(&a, &b);
        for (x, y) in [(0.3, -1.2), (2.0, 0.5)] {
            assert!((c.coefficient_of(0, 1, [x, y]).unwrap() - y).abs() < 1e-14);
            assert!((c.coefficient_of(1, 0, [x, y]).unwrap() + x).abs() < 1e-14);
        }
        assert_eq!(c.degree(), 1);
    }

    #[test]
    fn x_coefficient_from_lz_square() {
        let x = x_of(&FieldExpr::zero()).unwrap();
        let (px, py) = (0.7, -0.4);
        assert!((x.coefficient_of(2, 0, [px, py]).unwrap() - py * py).abs() < 1e-14);
    }

    #[test]
    fn polar_roundtrip() {
        let p = PhasePoint::new(-0.3, 1.7, 0.9, -2.2);
        let back = PhasePoint::from_polar(p.to_polar().unwrap());
        for (a, b) in p.as_array().iter().zip(back.as_array()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lz_conserved_for_radial_potential() {
        let v = radius_field().powi(2).scale(0.7) + radius_field().powi(-1).scale(-1.0);
        let c = poisson(&MomentumPolynomial::lz(), &hamiltonian(&v));
        for k in 0..20 {
            let t = k as f64 * 0.37;
            let pt = PhasePoint::new(1.0 + t.cos(), 0.5 + t.sin(), t, 1.0 - t);
            assert!(c.evaluate(&pt).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn non_periodic_angular_field_rejected() {
        let s = FieldExpr::x().scale(2f64.sqrt()).cos().powi(-2);
        assert!(x_of(&s).is_err());
        assert!(x_of_unchecked(&s).is_ok());
    }
}
