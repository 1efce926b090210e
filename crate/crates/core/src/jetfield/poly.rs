//! Bivariate polynomials with real coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use super::{FieldExpr, Jet2};

/// Polynomial `Σ c_{ab} u^a v^b`; absent exponents are zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, a: u32, b: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// `x` and `y` as polynomials.
    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((a, b)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> f64 {
        self.terms.get(&(a, b)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut p = Self::zero();
        for ((a, b), v) in self.terms() {
            p.add_term(a, b, c * v);
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .map(|((a, b), c)| c * x.powi(a as i32) * y.powi(b as i32))
            .sum()
    }

    /// Exact Taylor jet of the polynomial at `point` (binomial shift).
    pub fn jet(&self, point: [f64; 2], order: usize) -> Jet2 {
        let [x0, y0] = point;
        let mut out = Jet2::zero(point, order);
        for ((a, b), c) in self.terms() {
            let (a, b) = (a as usize, b as usize);
            for i in 0..=a.min(order) {
                let cx = binom(a, i) * x0.powi((a - i) as i32);
                for j in 0..=b.min(order - i) {
                    let v = out.coeff(i, j) + c * cx * binom(b, j) * y0.powi((b - j) as i32);
                    out.set_coeff(i, j, v);
                }
            }
        }
        out
    }

    pub fn to_field(&self) -> FieldExpr {
        let x = FieldExpr::var(0);
        let y = FieldExpr::var(1);
        FieldExpr::linear(
            self.terms()
                .map(|((a, b), c)| (c, x.powi(a as i32) * y.powi(b as i32)))
                .collect(),
        )
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for ((a, b), c) in rhs.terms() {
            p.add_term(a, b, c);
        }
        p
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut p = self.clone();
        for ((a, b), c) in rhs.terms() {
            p.add_term(a, b, -c);
        }
        p
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut p = Poly2::zero();
        for ((a1, b1), c1) in self.terms() {
            for ((a2, b2), c2) in rhs.terms() {
                p.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_of_polynomial_is_exact() {
        // (x - 2y)^3
        let p = (&Poly2::x() - &Poly2::y().scale(2.0)).pow(3);
        let j = p.jet([0.5, 1.5], 3);
        assert!((j.value() - p.eval(0.5, 1.5)).abs() < 1e-12);
        assert!((j.partial(3, 0) - 6.0).abs() < 1e-12);
        assert!((j.partial(0, 3) + 48.0).abs() < 1e-12);
        assert!((j.partial(2, 1) + 12.0).abs() < 1e-12);
    }
}
