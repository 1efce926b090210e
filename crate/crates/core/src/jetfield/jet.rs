//! Bivariate truncated Taylor series.
//!
//! A [`Jet2`] of order `K` at base point `(u0, v0)` holds the coefficients
//! `c[i][j]` of `Σ c[i][j] du^i dv^j` for `i + j <= K`, stored densely in a
//! triangular layout ordered by total degree.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Number of coefficients of a bivariate jet of the given order.
pub const fn jet_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
const fn slot(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    base: [f64; 2],
    order: usize,
    coeffs: Vec<f64>,
}

impl Jet2 {
    pub fn zero(base: [f64; 2], order: usize) -> Self {
        Self {
            base,
            order,
            coeffs: vec![0.0; jet_len(order)],
        }
    }

    pub fn constant(base: [f64; 2], order: usize, value: f64) -> Self {
        let mut jet = Self::zero(base, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The identity jet of coordinate `which` (0 for u, 1 for v).
    pub fn variable(base: [f64; 2], order: usize, which: usize) -> Self {
        let mut jet = Self::constant(base, order, base[which]);
        if order >= 1 {
            let k = if which == 0 { slot(1, 0) } else { slot(0, 1) };
            jet.coeffs[k] = 1.0;
        }
        jet
    }

    /// Builds a jet from a closure giving `c[i][j]`.
    pub fn from_fn(base: [f64; 2], order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut jet = Self::zero(base, order);
        for d in 0..=order {
            for j in 0..=d {
                jet.coeffs[slot(d - j, j)] = f(d - j, j);
            }
        }
        jet
    }

    pub fn base(&self) -> [f64; 2] {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Scaled coefficient `c[i][j]`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.coeffs[slot(i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.order, "coefficient ({i},{j}) beyond order {}", self.order);
        self.coeffs[slot(i, j)] = value;
    }

    /// Partial derivative `∂^{i+j} f / ∂u^i ∂v^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    /// The jet of `∂^{di+dj} f / ∂u^di ∂v^dj`, of order `K - di - dj`.
    pub fn differentiate(&self, di: usize, dj: usize) -> Result<Jet2> {
        if di + dj > self.order {
            return Err(Error::OrderOverflow {
                requested: di + dj,
                available: self.order,
            });
        }
        let order = self.order - di - dj;
        Ok(Jet2::from_fn(self.base, order, |i, j| {
            let mut c = self.coeffs[slot(i + di, j + dj)];
            for k in 1..=di {
                c *= (i + k) as f64;
            }
            for k in 1..=dj {
                c *= (j + k) as f64;
            }
            c
        }))
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        let order = order.min(self.order);
        Jet2 {
            base: self.base,
            order,
            coeffs: self.coeffs[..jet_len(order)].to_vec(),
        }
    }

    pub fn scale(&self, factor: f64) -> Jet2 {
        Jet2 {
            base: self.base,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Jet2, factor: f64) {
        self.check_base(other);
        let n = jet_len(self.order.min(other.order));
        self.truncate_in_place(self.order.min(other.order));
        for (a, b) in self.coeffs[..n].iter_mut().zip(&other.coeffs[..n]) {
            *a += factor * b;
        }
    }

    fn truncate_in_place(&mut self, order: usize) {
        if order < self.order {
            self.order = order;
            self.coeffs.truncate(jet_len(order));
        }
    }

    fn check_base(&self, other: &Jet2) {
        assert!(
            self.base == other.base,
            "jet base points differ: {:?} vs {:?}",
            self.base,
            other.base
        );
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn mul_jet(&self, other: &Jet2) -> Jet2 {
        self.check_base(other);
        let order = self.order.min(other.order);
        let mut out = Jet2::zero(self.base, order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = 0.0;
                for d1 in 0..=d {
                    for j1 in 0..=d1.min(j) {
                        let i1 = d1 - j1;
                        if i1 > i {
                            continue;
                        }
                        acc += self.coeffs[slot(i1, j1)] * other.coeffs[slot(i - i1, j - j1)];
                    }
                }
                out.coeffs[slot(i, j)] = acc;
            }
        }
        out
    }

    pub fn div_jet(&self, other: &Jet2) -> Result<Jet2> {
        self.check_base(other);
        let b0 = other.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::DivisionByZero { at: self.base });
        }
        let order = self.order.min(other.order);
        let mut q = Jet2::zero(self.base, order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = self.coeffs[slot(i, j)];
                for d1 in 1..=d {
                    for j1 in 0..=d1.min(j) {
                        let i1 = d1 - j1;
                        if i1 > i {
                            continue;
                        }
                        acc -= other.coeffs[slot(i1, j1)] * q.coeffs[slot(i - i1, j - j1)];
                    }
                }
                q.coeffs[slot(i, j)] = acc / b0;
            }
        }
        Ok(q)
    }

    /// Composes a univariate Taylor series `Σ t_k h^k` about `value()` with
    /// this jet, i.e. returns `g(self)` given the coefficients of `g` at the
    /// jet's constant term. Coefficients beyond `series.len()` are taken as zero.
    pub fn compose(&self, series: &[f64]) -> Jet2 {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = series.len().min(self.order + 1);
        if top == 0 {
            return Jet2::zero(self.base, self.order);
        }
        let mut acc = Jet2::constant(self.base, self.order, series[top - 1]);
        for k in (0..top - 1).rev() {
            acc = acc.mul_jet(&h);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn powi(&self, n: i32) -> Result<Jet2> {
        if n < 0 {
            let pos = self.powi(-n)?;
            return Jet2::constant(self.base, self.order, 1.0).div_jet(&pos);
        }
        let mut result = Jet2::constant(self.base, self.order, 1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        Ok(result)
    }

    /// Real power; the base must be strictly positive.
    pub fn powf(&self, p: f64) -> Result<Jet2> {
        let u0 = self.value();
        if !(u0 > 0.0) {
            return Err(Error::NegativeBase { value: u0, at: self.base });
        }
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = u0.powf(p);
        series.push(term);
        for k in 1..=self.order {
            term *= (p - (k - 1) as f64) / (k as f64 * u0);
            series.push(term);
        }
        Ok(self.compose(&series))
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        if self.value() == 0.0 && self.order == 0 {
            return Ok(Jet2::zero(self.base, 0));
        }
        self.powf(0.5)
    }

    pub fn sin(&self) -> Jet2 {
        self.compose(&trig_series(self.value(), self.order, false))
    }

    pub fn cos(&self) -> Jet2 {
        self.compose(&trig_series(self.value(), self.order, true))
    }

    /// `atan(self)` for a jet with zero constant term.
    fn atan_nilpotent(&self) -> Jet2 {
        let series: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k % 2 == 0 {
                    0.0
                } else if (k / 2) % 2 == 0 {
                    1.0 / k as f64
                } else {
                    -1.0 / k as f64
                }
            })
            .collect();
        self.compose(&series)
    }

    /// Two-argument arctangent `atan2(self, x)` with range (−π, π].
    pub fn atan2(&self, x: &Jet2) -> Result<Jet2> {
        let (y0, x0) = (self.value(), x.value());
        let rho = y0.hypot(x0);
        if rho == 0.0 {
            return Err(Error::Domain {
                what: "atan2 at the origin".into(),
                at: self.base,
            });
        }
        let theta0 = y0.atan2(x0);
        let (c, s) = (x0 / rho, y0 / rho);
        // rotate by -theta0 so the argument of (u + i v) is near zero
        let mut u = x.scale(c);
        u.add_scaled(self, s);
        let mut v = self.scale(c);
        v.add_scaled(x, -s);
        v.coeffs[0] = 0.0;
        let ratio = v.div_jet(&u)?;
        let mut out = ratio.atan_nilpotent();
        out.coeffs[0] = theta0;
        Ok(out)
    }
}

/// Taylor coefficients of sin (or cos) about `x0`.
fn trig_series(x0: f64, order: usize, cosine: bool) -> Vec<f64> {
    let (s, c) = x0.sin_cos();
    // derivatives cycle: sin, cos, -sin, -cos
    let cycle = if cosine { [c, -s, -c, s] } else { [s, c, -s, -c] };
    let mut out = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(cycle[k % 4] / fact);
    }
    out
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_has_triangular_count() {
        for k in 0..8 {
            assert_eq!(Jet2::zero([0.0, 0.0], k).coeffs().len(), (k + 1) * (k + 2) / 2);
        }
    }

    #[test]
    fn product_of_variables() {
        let b = [1.0, 2.0];
        let x = Jet2::variable(b, 2, 0);
        let y = Jet2::variable(b, 2, 1);
        let p = &x * &y;
        assert_eq!(p.coeff(0, 0), 2.0);
        assert_eq!(p.coeff(1, 0), 2.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        assert_eq!(p.coeff(0, 2), 0.0);
    }

    #[test]
    fn division_inverts_multiplication() {
        let b = [0.3, -0.7];
        let x = Jet2::variable(b, 6, 0);
        let y = Jet2::variable(b, 6, 1);
        let num = (&x * &y).sin();
        let den = (&(&x * &x) + &Jet2::constant(b, 6, 2.0)).cos();
        let q = num.div_jet(&den).unwrap();
        let back = &q * &den;
        for (a, b) in back.coeffs().iter().zip(num.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn atan2_matches_closed_form_derivatives() {
        let b = [-0.8, 0.5];
        let x = Jet2::variable(b, 3, 0);
        let y = Jet2::variable(b, 3, 1);
        let t = y.atan2(&x).unwrap();
        let r2 = b[0] * b[0] + b[1] * b[1];
        assert!((t.value() - b[1].atan2(b[0])).abs() < 1e-15);
        assert!((t.partial(1, 0) + b[1] / r2).abs() < 1e-14);
        assert!((t.partial(0, 1) - b[0] / r2).abs() < 1e-14);
        // ∂²θ/∂x² = 2xy / r^4
        assert!((t.partial(2, 0) - 2.0 * b[0] * b[1] / (r2 * r2)).abs() < 1e-13);
    }

    #[test]
    fn powf_rejects_nonpositive_base() {
        let j = Jet2::constant([0.0, 0.0], 2, -1.0);
        assert!(matches!(j.powf(0.5), Err(Error::NegativeBase { .. })));
    }

    #[test]
    fn differentiate_shifts_and_rescales() {
        let b = [0.5, 0.25];
        let x = Jet2::variable(b, 5, 0);
        let y = Jet2::variable(b, 5, 1);
        let f = (&(&x * &x) * &y).powi(2).unwrap(); // x^4 y^2
        let d = f.differentiate(2, 1).unwrap(); // 24 x^2 y
        assert_eq!(d.order(), 2);
        assert!((d.value() - 24.0 * 0.25 * 0.25).abs() < 1e-14);
        assert!((d.partial(0, 1) - 24.0 * 0.25).abs() < 1e-13);
    }
}
