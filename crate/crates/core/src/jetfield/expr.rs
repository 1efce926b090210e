//! Scalar field expressions over two formal variables.
//!
//! A [`FieldExpr`] is an immutable, reference-counted DAG. Every node can be
//! evaluated on plain reals and on [`Jet2`] values; derivative nodes are kept
//! lazy and resolved at evaluation time by raising the jet order of their
//! operand.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::spline::CubicSpline;
use super::Jet2;
use crate::error::{Error, Result};

/// Default cap on the jet order accepted by [`FieldExpr::jet`].
pub const DEFAULT_MAX_ORDER: usize = 12;

/// Highest derivative order a tabulated node will produce.
pub const TABULATED_MAX_ORDER: usize = 2;

#[derive(Debug)]
enum Node {
    Const(f64),
    Var(u8),
    Linear(Vec<(f64, FieldExpr)>),
    Product(FieldExpr, FieldExpr),
    Quotient(FieldExpr, FieldExpr),
    PowF(FieldExpr, f64),
    PowI(FieldExpr, i32),
    Sqrt(FieldExpr),
    Sin(FieldExpr),
    Cos(FieldExpr),
    /// `atan2(y, x)`, range (−π, π].
    Atan2(FieldExpr, FieldExpr),
    Tabulated(Arc<CubicSpline>, FieldExpr),
    Deriv(FieldExpr, u8, u8),
}

#[derive(Debug, Clone)]
pub struct FieldExpr(Arc<Node>);

impl FieldExpr {
    fn node(n: Node) -> Self {
        FieldExpr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// Formal variable 0 (`x`, or the single argument of a univariate field)
    /// or 1 (`y`).
    pub fn var(which: u8) -> Self {
        assert!(which < 2, "only two formal variables exist");
        Self::node(Node::Var(which))
    }

    pub fn x() -> Self {
        Self::var(0)
    }

    pub fn y() -> Self {
        Self::var(1)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// `Σ c_k e_k`, dropping zero terms and flattening nested sums.
    pub fn linear(terms: Vec<(f64, FieldExpr)>) -> Self {
        let mut flat: Vec<(f64, FieldExpr)> = Vec::with_capacity(terms.len());
        let mut offset = 0.0;
        for (c, e) in terms {
            if c == 0.0 {
                continue;
            }
            match &*e.0 {
                Node::Const(v) => offset += c * v,
                Node::Linear(inner) => flat.extend(inner.iter().map(|(ci, ei)| (c * ci, ei.clone()))),
                _ => flat.push((c, e)),
            }
        }
        if offset != 0.0 {
            flat.push((offset, Self::constant(1.0)));
        }
        match flat.len() {
            0 => Self::zero(),
            1 if flat[0].0 == 1.0 => flat.pop().unwrap().1,
            _ => Self::node(Node::Linear(flat)),
        }
    }

    pub fn sum(terms: impl IntoIterator<Item = FieldExpr>) -> Self {
        Self::linear(terms.into_iter().map(|e| (1.0, e)).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 1.0 {
            return self.clone();
        }
        Self::linear(vec![(c, self.clone())])
    }

    pub fn mul(&self, other: &FieldExpr) -> Self {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), _) => other.scale(a),
            (_, Some(b)) => self.scale(b),
            _ => Self::node(Node::Product(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &FieldExpr) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        match other.as_constant() {
            Some(b) if b != 0.0 => self.scale(1.0 / b),
            _ => Self::node(Node::Quotient(self.clone(), other.clone())),
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        if p == 1.0 {
            return self.clone();
        }
        if p == 0.0 {
            return Self::constant(1.0);
        }
        Self::node(Node::PowF(self.clone(), p))
    }

    pub fn powi(&self, n: i32) -> Self {
        match (n, self.as_constant()) {
            (0, _) => Self::constant(1.0),
            (1, _) => self.clone(),
            (_, Some(c)) => Self::constant(c.powi(n)),
            _ => Self::node(Node::PowI(self.clone(), n)),
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::node(Node::Sqrt(self.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        Self::node(Node::Cos(self.clone()))
    }

    /// `atan2(self, x)`.
    pub fn atan2(&self, x: &FieldExpr) -> Self {
        Self::node(Node::Atan2(self.clone(), x.clone()))
    }

    /// The tabulated function `spline` applied to `arg`.
    pub fn tabulated(spline: Arc<CubicSpline>, arg: &FieldExpr) -> Self {
        Self::node(Node::Tabulated(spline, arg.clone()))
    }

    /// Lazy partial derivative `∂^{i+j}/∂x^i ∂y^j`.
    pub fn partial(&self, i: u8, j: u8) -> Self {
        if i == 0 && j == 0 {
            return self.clone();
        }
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Var(w) => {
                let one = if *w == 0 { (i, j) == (1, 0) } else { (i, j) == (0, 1) };
                Self::constant(if one { 1.0 } else { 0.0 })
            }
            Node::Deriv(inner, a, b) => Self::node(Node::Deriv(inner.clone(), a + i, b + j)),
            _ => Self::node(Node::Deriv(self.clone(), i, j)),
        }
    }

    pub fn has_derivative_nodes(&self) -> bool {
        self.any_node(&|n| matches!(n, Node::Deriv(..)))
    }

    pub fn has_tabulated_nodes(&self) -> bool {
        self.any_node(&|n| matches!(n, Node::Tabulated(..)))
    }

    fn any_node(&self, pred: &dyn Fn(&Node) -> bool) -> bool {
        if pred(&self.0) {
            return true;
        }
        self.children().iter().any(|c| c.any_node(pred))
    }

    fn children(&self) -> Vec<&FieldExpr> {
        match &*self.0 {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Linear(t) => t.iter().map(|(_, e)| e).collect(),
            Node::Product(a, b) | Node::Quotient(a, b) | Node::Atan2(a, b) => vec![a, b],
            Node::PowF(a, _)
            | Node::PowI(a, _)
            | Node::Sqrt(a)
            | Node::Sin(a)
            | Node::Cos(a)
            | Node::Tabulated(_, a)
            | Node::Deriv(a, _, _) => vec![a],
        }
    }

    /// Replaces variable 0 by `u` and variable 1 by `v`.
    pub fn substitute(&self, u: &FieldExpr, v: &FieldExpr) -> Result<FieldExpr> {
        let mut memo = HashMap::new();
        self.subst_inner(u, v, &mut memo)
    }

    /// Composes a univariate field (a function of variable 0) with `arg`.
    pub fn compose(&self, arg: &FieldExpr) -> Result<FieldExpr> {
        self.substitute(arg, &FieldExpr::y())
    }

    fn subst_inner(
        &self,
        u: &FieldExpr,
        v: &FieldExpr,
        memo: &mut HashMap<usize, FieldExpr>,
    ) -> Result<FieldExpr> {
        let key = Arc::as_ptr(&self.0) as usize;
        if let Some(e) = memo.get(&key) {
            return Ok(e.clone());
        }
        let mut s = |e: &FieldExpr| e.subst_inner(u, v, memo);
        let out = match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(0) => u.clone(),
            Node::Var(_) => v.clone(),
            Node::Linear(t) => {
                let mut terms = Vec::with_capacity(t.len());
                for (c, e) in t {
                    terms.push((*c, s(e)?));
                }
                FieldExpr::linear(terms)
            }
            Node::Product(a, b) => FieldExpr::mul(&s(a)?, &s(b)?),
            Node::Quotient(a, b) => FieldExpr::div(&s(a)?, &s(b)?),
            Node::PowF(a, p) => s(a)?.powf(*p),
            Node::PowI(a, n) => s(a)?.powi(*n),
            Node::Sqrt(a) => s(a)?.sqrt(),
            Node::Sin(a) => s(a)?.sin(),
            Node::Cos(a) => s(a)?.cos(),
            Node::Atan2(a, b) => s(a)?.atan2(&s(b)?),
            Node::Tabulated(sp, a) => FieldExpr::tabulated(sp.clone(), &s(a)?),
            Node::Deriv(..) => {
                return Err(Error::InvalidSpec(
                    "cannot substitute into a lazy derivative node".into(),
                ))
            }
        };
        memo.insert(key, out.clone());
        Ok(out)
    }

    /// Value at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let at = [x, y];
        Ok(match &*self.0 {
            Node::Const(c) => *c,
            Node::Var(w) => at[*w as usize],
            Node::Linear(t) => {
                let mut acc = 0.0;
                for (c, e) in t {
                    acc += c * e.eval(x, y)?;
                }
                acc
            }
            Node::Product(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            Node::Quotient(a, b) => {
                let d = b.eval(x, y)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero { at });
                }
                a.eval(x, y)? / d
            }
            Node::PowF(a, p) => {
                let base = a.eval(x, y)?;
                if !(base > 0.0) {
                    return Err(Error::NegativeBase { value: base, at });
                }
                base.powf(*p)
            }
            Node::PowI(a, n) => {
                let base = a.eval(x, y)?;
                if *n < 0 && base == 0.0 {
                    return Err(Error::DivisionByZero { at });
                }
                base.powi(*n)
            }
            Node::Sqrt(a) => {
                let base = a.eval(x, y)?;
                if base < 0.0 {
                    return Err(Error::NegativeBase { value: base, at });
                }
                base.sqrt()
            }
            Node::Sin(a) => a.eval(x, y)?.sin(),
            Node::Cos(a) => a.eval(x, y)?.cos(),
            Node::Atan2(a, b) => {
                let (yy, xx) = (a.eval(x, y)?, b.eval(x, y)?);
                if yy == 0.0 && xx == 0.0 {
                    return Err(Error::Domain {
                        what: "atan2 at the origin".into(),
                        at,
                    });
                }
                yy.atan2(xx)
            }
            Node::Tabulated(sp, a) => sp.eval(a.eval(x, y)?)?,
            Node::Deriv(..) => self.jet_unchecked([x, y], 0)?.value(),
        })
    }

    /// Univariate evaluation (variable 0 = `t`).
    pub fn eval1(&self, t: f64) -> Result<f64> {
        self.eval(t, 0.0)
    }

    /// Taylor jet of the field at `point` up to `order <= DEFAULT_MAX_ORDER`.
    pub fn jet(&self, point: [f64; 2], order: usize) -> Result<Jet2> {
        self.jet_with_limit(point, order, DEFAULT_MAX_ORDER)
    }

    pub fn jet_with_limit(&self, point: [f64; 2], order: usize, max_order: usize) -> Result<Jet2> {
        if order > max_order {
            return Err(Error::OrderOverflow {
                requested: order,
                available: max_order,
            });
        }
        self.jet_unchecked(point, order)
    }

    fn jet_unchecked(&self, point: [f64; 2], order: usize) -> Result<Jet2> {
        JetEval {
            point,
            cache: HashMap::new(),
        }
        .eval(self, order)
    }

    /// `∂^{i+j} f / ∂x^i ∂y^j` at `point`.
    pub fn deriv_at(&self, point: [f64; 2], i: usize, j: usize) -> Result<f64> {
        Ok(self.jet(point, i + j)?.partial(i, j))
    }

    /// Checks `f(t + period) = f(t)` on `samples` points of `[lo, lo + period)`;
    /// points where either side fails to evaluate are skipped.
    pub fn is_periodic(&self, lo: f64, period: f64, samples: usize, tol: f64) -> bool {
        (0..samples).all(|k| {
            let t = lo + period * (k as f64 + 0.5) / samples as f64;
            match (self.eval1(t), self.eval1(t + period)) {
                (Ok(a), Ok(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
                _ => true,
            }
        })
    }
}

struct JetEval {
    point: [f64; 2],
    cache: HashMap<(usize, usize), Jet2>,
}

impl JetEval {
    fn eval(&mut self, e: &FieldExpr, order: usize) -> Result<Jet2> {
        let p = self.point;
        match &*e.0 {
            Node::Const(c) => return Ok(Jet2::constant(p, order, *c)),
            Node::Var(w) => return Ok(Jet2::variable(p, order, *w as usize)),
            _ => {}
        }
        let key = (Arc::as_ptr(&e.0) as usize, order);
        if let Some(j) = self.cache.get(&key) {
            return Ok(j.clone());
        }
        let out = match &*e.0 {
            Node::Const(_) | Node::Var(_) => unreachable!(),
            Node::Linear(t) => {
                let mut acc = Jet2::zero(p, order);
                for (c, sub) in t {
                    let j = self.eval(sub, order)?;
                    acc.add_scaled(&j, *c);
                }
                acc
            }
            Node::Product(a, b) => self.eval(a, order)?.mul_jet(&self.eval(b, order)?),
            Node::Quotient(a, b) => {
                let num = self.eval(a, order)?;
                let den = self.eval(b, order)?;
                num.div_jet(&den).map_err(|_| Error::DivisionByZero { at: p })?
            }
            Node::PowF(a, pw) => self.eval(a, order)?.powf(*pw)?,
            Node::PowI(a, n) => {
                let base = self.eval(a, order)?;
                if *n < 0 && base.value() == 0.0 {
                    return Err(Error::DivisionByZero { at: p });
                }
                base.powi(*n)?
            }
            Node::Sqrt(a) => {
                let base = self.eval(a, order)?;
                if base.value() < 0.0 || (base.value() == 0.0 && order > 0) {
                    return Err(Error::NegativeBase { value: base.value(), at: p });
                }
                base.sqrt()?
            }
            Node::Sin(a) => self.eval(a, order)?.sin(),
            Node::Cos(a) => self.eval(a, order)?.cos(),
            Node::Atan2(a, b) => {
                let yy = self.eval(a, order)?;
                let xx = self.eval(b, order)?;
                yy.atan2(&xx)?
            }
            Node::Tabulated(sp, a) => {
                if order > TABULATED_MAX_ORDER {
                    return Err(Error::TabulatedOrder { requested: order });
                }
                let arg = self.eval(a, order)?;
                let [v, d1, d2] = sp.eval_derivs(arg.value())?;
                arg.compose(&[v, d1, 0.5 * d2])
            }
            Node::Deriv(a, i, j) => {
                let (i, j) = (*i as usize, *j as usize);
                self.eval(a, order + i + j)?.differentiate(i, j)?
            }
        };
        self.cache.insert(key, out.clone());
        Ok(out)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl $tr<&FieldExpr> for &FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: &FieldExpr) -> FieldExpr {
                FieldExpr::$call(self, rhs)
            }
        }
        impl $tr<FieldExpr> for FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: FieldExpr) -> FieldExpr {
                FieldExpr::$call(&self, &rhs)
            }
        }
        impl $tr<&FieldExpr> for FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: &FieldExpr) -> FieldExpr {
                FieldExpr::$call(&self, rhs)
            }
        }
        impl $tr<FieldExpr> for &FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: FieldExpr) -> FieldExpr {
                FieldExpr::$call(self, &rhs)
            }
        }
        impl $tr<f64> for &FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: f64) -> FieldExpr {
                FieldExpr::$call(self, &FieldExpr::constant(rhs))
            }
        }
        impl $tr<f64> for FieldExpr {
            type Output = FieldExpr;
            fn $method(self, rhs: f64) -> FieldExpr {
                FieldExpr::$call(&self, &FieldExpr::constant(rhs))
            }
        }
        impl $tr<FieldExpr> for f64 {
            type Output = FieldExpr;
            fn $method(self, rhs: FieldExpr) -> FieldExpr {
                FieldExpr::$call(&FieldExpr::constant(self), &rhs)
            }
        }
    };
}

impl FieldExpr {
    fn add_impl(a: &FieldExpr, b: &FieldExpr) -> FieldExpr {
        FieldExpr::linear(vec![(1.0, a.clone()), (1.0, b.clone())])
    }

    fn sub_impl(a: &FieldExpr, b: &FieldExpr) -> FieldExpr {
        FieldExpr::linear(vec![(1.0, a.clone()), (-1.0, b.clone())])
    }
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        self.scale(-1.0)
    }
}

impl Neg for &FieldExpr {
    type Output = FieldExpr;
    fn neg(self) -> FieldExpr {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetfield::spline::SplineBoundary;

    #[test]
    fn bilinear_monomial_jet() {
        let f = FieldExpr::x() * FieldExpr::y();
        let j = f.jet([1.0, 2.0], 2).unwrap();
        assert_eq!(j.coeff(0, 0), 2.0);
        assert_eq!(j.coeff(1, 0), 2.0);
        assert_eq!(j.coeff(0, 1), 1.0);
        assert_eq!(j.coeff(1, 1), 1.0);
        assert_eq!(j.coeff(2, 0), 0.0);
        assert_eq!(j.coeff(0, 2), 0.0);
    }

    #[test]
    fn sine_taylor_series() {
        let j = FieldExpr::x().sin().jet([0.0, 0.0], 3).unwrap();
        assert_eq!(j.coeff(0, 0), 0.0);
        assert!((j.coeff(1, 0) - 1.0).abs() < 1e-15);
        assert!(j.coeff(2, 0).abs() < 1e-15);
        assert!((j.coeff(3, 0) + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn simple_partials() {
        let x = FieldExpr::x();
        let y = FieldExpr::y();
        let f = &(&x * &x) * &y;
        for p in [[0.3, 1.0], [-2.0, 5.0]] {
            assert!((f.deriv_at(p, 2, 1).unwrap() - 2.0).abs() < 1e-13);
        }
        let g = &(&x * &x) + &(&y * &y);
        assert!((g.deriv_at([3.0, 4.0], 1, 0).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn lazy_derivative_nodes_compose() {
        let x = FieldExpr::x();
        let y = FieldExpr::y();
        let f = (&x * &y).sin();
        let fxy = f.partial(1, 0).partial(0, 1);
        let p = [0.4, -1.3];
        let direct = f.deriv_at(p, 1, 1).unwrap();
        assert!((fxy.eval(p[0], p[1]).unwrap() - direct).abs() < 1e-14);
        let j = fxy.jet(p, 2).unwrap();
        assert!((j.partial(1, 0) - f.deriv_at(p, 2, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn errors_are_reported() {
        let x = FieldExpr::x();
        let q = FieldExpr::constant(1.0) / x.clone();
        assert!(matches!(q.eval(0.0, 1.0), Err(Error::DivisionByZero { .. })));
        assert!(matches!(q.jet([0.0, 1.0], 2), Err(Error::DivisionByZero { .. })));
        assert!(matches!(x.sqrt().eval(-1.0, 0.0), Err(Error::NegativeBase { .. })));
        assert!(matches!(x.powf(1.5).jet([-1.0, 0.0], 1), Err(Error::NegativeBase { .. })));
        assert!(matches!(x.jet([0.0, 0.0], 13), Err(Error::OrderOverflow { .. })));
    }

    #[test]
    fn tabulated_order_limit() {
        let sp = Arc::new(
            CubicSpline::sample(0.0, 1.0, 11, SplineBoundary::Natural, |t| t * t).unwrap(),
        );
        let f = FieldExpr::tabulated(sp, &FieldExpr::x());
        assert!(f.jet([0.5, 0.0], 2).is_ok());
        assert!(matches!(f.jet([0.5, 0.0], 3), Err(Error::TabulatedOrder { requested: 3 })));
        assert!(matches!(f.eval(1.5, 0.0), Err(Error::OutsideTable { .. })));
    }

    #[test]
    fn substitution_builds_composites() {
        let r = (FieldExpr::x() * FieldExpr::x() + FieldExpr::y() * FieldExpr::y()).sqrt();
        let radial = FieldExpr::x().powi(2).scale(3.0); // 3 t^2
        let v = radial.compose(&r).unwrap();
        assert!((v.eval(3.0, 4.0).unwrap() - 75.0).abs() < 1e-12);
        assert!(v.partial(1, 0).substitute(&r, &r).is_err());
    }
}
