//! The leading term `Y^(N)` of an Nth-order polynomial integral.
//!
//! Two parametrisations are supported:
//!
//! * [`LeadingTermSpec`], the Cartesian form `Σ A_{N−m−n,m,n} L_z^{N−m−n} p_x^m p_y^n`;
//! * [`PolarLeadingSpec`], the polar form
//!   `Σ L_z^{N−s−2k} P^{s+2k} [B1 cos sΦ + B2 sin sΦ]` with `P = |p|`,
//!   `Φ = arg(p_x + i p_y)`.
//!
//! The conversion is an exact block-diagonal linear map (one block per power
//! of `L_z`), see [`basis`].

pub mod basis;

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jetfield::Poly2;
use crate::observables::{MomentumPolynomial, PhasePoint};

pub use basis::Harmonic;

/// Largest supported integral order.
pub const N_MAX: u32 = 8;

fn check_order(n: u32) -> Result<()> {
    if n == 0 || n > N_MAX {
        return Err(Error::InvalidSpec(format!("order N = {n} outside 1..={N_MAX}")));
    }
    Ok(())
}

/// Cartesian leading-term coefficients, keyed by the momentum powers `(m, n)`;
/// the power of `L_z` is `N − m − n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadingTermSpec {
    order: u32,
    a: BTreeMap<(u32, u32), f64>,
}

impl LeadingTermSpec {
    pub fn new(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order,
            a: BTreeMap::new(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Sets `A_{N−m−n,m,n}`.
    pub fn set(&mut self, m: u32, n: u32, value: f64) -> Result<()> {
        if m + n > self.order {
            return Err(Error::InvalidSpec(format!("slot (m={m}, n={n}) beyond N = {}", self.order)));
        }
        if value == 0.0 {
            self.a.remove(&(m, n));
        } else {
            self.a.insert((m, n), value);
        }
        Ok(())
    }

    pub fn with(mut self, m: u32, n: u32, value: f64) -> Result<Self> {
        self.set(m, n, value)?;
        Ok(self)
    }

    pub fn get(&self, m: u32, n: u32) -> f64 {
        self.a.get(&(m, n)).copied().unwrap_or(0.0)
    }

    /// All `(N+1)(N+2)/2` slots `(m, n)`, populated or not.
    pub fn slots(order: u32) -> Vec<(u32, u32)> {
        let mut v = Vec::new();
        for m in 0..=order {
            for n in 0..=order - m {
                v.push((m, n));
            }
        }
        v
    }

    pub fn populated(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.a.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_abs(&self) -> f64 {
        self.a.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `λ·self + other`.
    pub fn axpy(&self, lambda: f64, other: &Self) -> Result<Self> {
        let mut out = other.clone();
        for ((m, n), v) in self.populated() {
            out.set(m, n, lambda * v + other.get(m, n))?;
        }
        Ok(out)
    }

    /// Direct evaluation `Σ A L_z^{N−m−n} p_x^m p_y^n` at a phase point.
    pub fn evaluate(&self, pt: &PhasePoint) -> f64 {
        let lz = pt.lz();
        self.populated()
            .map(|((m, n), a)| {
                a * lz.powi((self.order - m - n) as i32) * pt.px.powi(m as i32) * pt.py.powi(n as i32)
            })
            .sum()
    }

    /// Coefficient polynomials of every momentum monomial `p_x^i p_y^j`
    /// (all with `i + j = N`), obtained by expanding the `L_z` powers.
    pub fn monomial_coefficients(&self) -> BTreeMap<(u32, u32), Poly2> {
        let mut out: BTreeMap<(u32, u32), Poly2> = BTreeMap::new();
        for ((m, n), a) in self.populated() {
            let l = self.order - m - n;
            // L_z^l = Σ_t C(l,t) x^{l−t} (−y)^t p_x^t p_y^{l−t}
            for t in 0..=l {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                let c = a * sign * binomial(l, t);
                let key = (t + m, l - t + n);
                let term = Poly2::monomial(c, l - t, t);
                let e = out.entry(key).or_default();
                *e = &*e + &term;
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Polar leading-term coefficients keyed by `(s, k)`; `B2` at `s = 0` is
/// identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarLeadingSpec {
    order: u32,
    b1: BTreeMap<(u32, u32), f64>,
    b2: BTreeMap<(u32, u32), f64>,
}

/// One polar slot: a harmonic together with its `L_z` power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolarSlot {
    pub component: u8,
    pub s: u32,
    pub k: u32,
}

impl PolarSlot {
    pub fn weight(&self) -> u32 {
        self.s + 2 * self.k
    }

    pub fn is_singlet(&self) -> bool {
        self.s == 0
    }
}

impl PolarLeadingSpec {
    pub fn new(order: u32) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order,
            b1: BTreeMap::new(),
            b2: BTreeMap::new(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Every slot `(component, s, k)` with `s + 2k <= N`; `(N+1)(N+2)/2` in total.
    pub fn all_slots(order: u32) -> Vec<PolarSlot> {
        let mut v = Vec::new();
        for k in 0..=order / 2 {
            for s in 0..=order - 2 * k {
                v.push(PolarSlot { component: 1, s, k });
                if s > 0 {
                    v.push(PolarSlot { component: 2, s, k });
                }
            }
        }
        v
    }

    pub fn set(&mut self, slot: PolarSlot, value: f64) -> Result<()> {
        if slot.weight() > self.order {
            return Err(Error::InvalidSpec(format!("slot {slot:?} beyond N = {}", self.order)));
        }
        let map = match slot.component {
            1 => &mut self.b1,
            2 if slot.s > 0 => &mut self.b2,
            2 => return Err(Error::InvalidSpec("B2 with s = 0 is identically zero".into())),
            c => return Err(Error::InvalidSpec(format!("component {c} is not 1 or 2"))),
        };
        if value == 0.0 {
            map.remove(&(slot.s, slot.k));
        } else {
            map.insert((slot.s, slot.k), value);
        }
        Ok(())
    }

    pub fn set_b1(&mut self, s: u32, k: u32, value: f64) -> Result<()> {
        self.set(PolarSlot { component: 1, s, k }, value)
    }

    pub fn set_b2(&mut self, s: u32, k: u32, value: f64) -> Result<()> {
        self.set(PolarSlot { component: 2, s, k }, value)
    }

    pub fn with_b1(mut self, s: u32, k: u32, value: f64) -> Result<Self> {
        self.set_b1(s, k, value)?;
        Ok(self)
    }

    pub fn with_b2(mut self, s: u32, k: u32, value: f64) -> Result<Self> {
        self.set_b2(s, k, value)?;
        Ok(self)
    }

    pub fn get(&self, slot: PolarSlot) -> f64 {
        let map = if slot.component == 1 { &self.b1 } else { &self.b2 };
        map.get(&(slot.s, slot.k)).copied().unwrap_or(0.0)
    }

    pub fn b1(&self, s: u32, k: u32) -> f64 {
        self.b1.get(&(s, k)).copied().unwrap_or(0.0)
    }

    pub fn b2(&self, s: u32, k: u32) -> f64 {
        self.b2.get(&(s, k)).copied().unwrap_or(0.0)
    }

    pub fn populated(&self) -> Vec<(PolarSlot, f64)> {
        let mut v: Vec<(PolarSlot, f64)> = self
            .b1
            .iter()
            .map(|(&(s, k), &x)| (PolarSlot { component: 1, s, k }, x))
            .chain(self.b2.iter().map(|(&(s, k), &x)| (PolarSlot { component: 2, s, k }, x)))
            .collect();
        v.sort_by_key(|(slot, _)| *slot);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.b1.is_empty() && self.b2.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.b1.values().chain(self.b2.values()).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Keeps only the slots accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(PolarSlot) -> bool) -> Self {
        let mut out = Self {
            order: self.order,
            b1: BTreeMap::new(),
            b2: BTreeMap::new(),
        };
        for (slot, v) in self.populated() {
            if keep(slot) {
                out.set(slot, v).expect("slot already validated");
            }
        }
        out
    }

    /// Slot-wise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::InvalidSpec("orders differ".into()));
        }
        let mut out = self.clone();
        for (slot, v) in other.populated() {
            out.set(slot, out.get(slot) + v)?;
        }
        Ok(out)
    }

    /// Direct evaluation of the polar form at a phase point.
    pub fn evaluate(&self, pt: &PhasePoint) -> f64 {
        let lz = pt.lz();
        let p = pt.px.hypot(pt.py);
        let phi = pt.py.atan2(pt.px);
        self.populated()
            .into_iter()
            .map(|(slot, b)| {
                let trig = if slot.component == 1 {
                    (slot.s as f64 * phi).cos()
                } else {
                    (slot.s as f64 * phi).sin()
                };
                b * lz.powi((self.order - slot.weight()) as i32) * p.powi(slot.weight() as i32) * trig
            })
            .sum()
    }

    /// The spec of `z ↦ Y(R_φ z)`: each doublet `(B1, B2)` at harmonic `s`
    /// rotates by the angle `sφ`.
    pub fn rotated(&self, phi: f64) -> Self {
        let mut out = self.filtered(|slot| slot.s == 0);
        for (slot, _) in self.populated() {
            if slot.s == 0 || slot.component == 2 && self.b1(slot.s, slot.k) != 0.0 {
                continue;
            }
            let (b1, b2) = (self.b1(slot.s, slot.k), self.b2(slot.s, slot.k));
            let (sn, cs) = (slot.s as f64 * phi).sin_cos();
            out.set_b1(slot.s, slot.k, b1 * cs + b2 * sn).unwrap();
            out.set_b2(slot.s, slot.k, -b1 * sn + b2 * cs).unwrap();
        }
        out
    }
}

/// Σ A L_z^{N−m−n} p_x^m p_y^n expanded into momentum monomials with
/// polynomial coefficient fields.
pub fn build_leading_cartesian(spec: &LeadingTermSpec) -> MomentumPolynomial {
    let mut y = MomentumPolynomial::zero(spec.order());
    for ((i, j), poly) in spec.monomial_coefficients() {
        y.add_coeff(i, j, poly.to_field());
    }
    y
}

/// Cartesian → polar coefficients.
pub fn a_to_b(spec: &LeadingTermSpec) -> PolarLeadingSpec {
    let n = spec.order();
    let mut out = PolarLeadingSpec::new(n).expect("order already validated");
    for d in 0..=n {
        let block = basis::degree_block(d);
        let mono: Vec<f64> = (0..=d).map(|m| spec.get(m, d - m)).collect();
        if mono.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (c, h) in block.harmonics.iter().enumerate() {
            let v: f64 = block.to_harmonic[c].iter().zip(&mono).map(|(a, b)| a * b).sum();
            out.set(PolarSlot { component: h.component, s: h.s, k: h.k }, v).unwrap();
        }
    }
    out
}

/// Polar → Cartesian coefficients.
pub fn b_to_a(spec: &PolarLeadingSpec) -> LeadingTermSpec {
    let n = spec.order();
    let mut out = LeadingTermSpec::new(n).expect("order already validated");
    for d in 0..=n {
        let block = basis::degree_block(d);
        let harm: Vec<f64> = block
            .harmonics
            .iter()
            .map(|h| spec.get(PolarSlot { component: h.component, s: h.s, k: h.k }))
            .collect();
        if harm.iter().all(|&v| v == 0.0) {
            continue;
        }
        for m in 0..=d {
            let v: f64 = block.to_monomial[m as usize].iter().zip(&harm).map(|(a, b)| a * b).sum();
            out.set(m, d - m, v).unwrap();
        }
    }
    out
}

/// Splits into the `Y_I` part (`N−1 <= s+2k <= N`) and the `Y_II` part
/// (`s+2k <= N−2`).
pub fn split_i_ii(spec: &PolarLeadingSpec) -> (PolarLeadingSpec, PolarLeadingSpec) {
    let n = spec.order();
    let first = spec.filtered(|slot| slot.weight() + 1 >= n);
    let second = spec.filtered(|slot| slot.weight() + 2 <= n);
    (first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotClass {
    pub slot: PolarSlot,
    pub value: f64,
    /// Scaling weight `β = s + 2k`: the slot scales as `σ^{−β}` under dilation.
    pub weight: u32,
    pub lz_power: u32,
    /// Parity of `N − 2k`.
    pub parity: Parity,
    pub in_y_i: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub order: u32,
    pub slots: Vec<SlotClass>,
    /// Populated slots grouped by scaling weight.
    pub by_weight: BTreeMap<u32, Vec<PolarSlot>>,
    /// `Y_I` vanishes while the spec does not.
    pub exotic: bool,
    pub singlets: Vec<PolarSlot>,
}

pub fn classify(spec: &PolarLeadingSpec) -> Classification {
    let n = spec.order();
    let mut by_weight: BTreeMap<u32, Vec<PolarSlot>> = BTreeMap::new();
    let mut slots = Vec::new();
    let mut singlets = Vec::new();
    for (slot, value) in spec.populated() {
        let weight = slot.weight();
        by_weight.entry(weight).or_default().push(slot);
        if slot.is_singlet() {
            singlets.push(slot);
        }
        slots.push(SlotClass {
            slot,
            value,
            weight,
            lz_power: n - weight,
            parity: if (n - 2 * slot.k) % 2 == 0 { Parity::Even } else { Parity::Odd },
            in_y_i: weight + 1 >= n,
        });
    }
    let (y_i, _) = split_i_ii(spec);
    Classification {
        order: n,
        slots,
        by_weight,
        exotic: y_i.is_zero() && !spec.is_zero(),
        singlets,
    }
}

/// Removes the singlet sector `Σ_k B1(0,k) L_z^{N−2k} P^{2k}` for even `N`.
///
/// Returns the reduced spec and the table `a_{ij}` such that the leading
/// term of `Y − Σ a_{ij} X^i H^j` has no singlet part; `X → L_z²` and
/// `H → P²/2` at leading order, so `a_{(N−2k)/2, k} = 2^k B1(0, k)`.
pub fn singlet_reduce(spec: &PolarLeadingSpec) -> Result<(PolarLeadingSpec, BTreeMap<(u32, u32), f64>)> {
    let n = spec.order();
    if n % 2 == 1 {
        return Err(Error::InvalidSpec(
            "singlet reduction needs even N; odd-N singlets go to dependence detection".into(),
        ));
    }
    let mut table = BTreeMap::new();
    for k in 0..=n / 2 {
        let b = spec.b1(0, k);
        if b != 0.0 {
            table.insert(((n - 2 * k) / 2, k), 2f64.powi(k as i32) * b);
        }
    }
    Ok((spec.filtered(|slot| !slot.is_singlet()), table))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CartesianWire {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "A")]
    a: Vec<(u32, u32, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolarWire {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "B1", default)]
    b1: Vec<(u32, u32, f64)>,
    #[serde(rename = "B2", default)]
    b2: Vec<(u32, u32, f64)>,
}

impl Serialize for LeadingTermSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CartesianWire {
            n: self.order,
            a: self.populated().map(|((m, n), v)| (m, n, v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LeadingTermSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CartesianWire::deserialize(d)?;
        let mut spec = LeadingTermSpec::new(w.n).map_err(serde::de::Error::custom)?;
        for (m, n, v) in w.a {
            spec.set(m, n, spec.get(m, n) + v).map_err(serde::de::Error::custom)?;
        }
        Ok(spec)
    }
}

impl Serialize for PolarLeadingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolarWire {
            n: self.order,
            b1: self.b1.iter().map(|(&(a, b), &v)| (a, b, v)).collect(),
            b2: self.b2.iter().map(|(&(a, b), &v)| (a, b, v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolarLeadingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PolarWire::deserialize(d)?;
        let mut spec = PolarLeadingSpec::new(w.n).map_err(serde::de::Error::custom)?;
        for (s, k, v) in w.b1 {
            spec.set_b1(s, k, v).map_err(serde::de::Error::custom)?;
        }
        for (s, k, v) in w.b2 {
            spec.set_b2(s, k, v).map_err(serde::de::Error::custom)?;
        }
        Ok(spec)
    }
}

/// Either parametrisation, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnySpec {
    Cartesian(LeadingTermSpec),
    Polar(PolarLeadingSpec),
}

impl AnySpec {
    pub fn to_cartesian(&self) -> LeadingTermSpec {
        match self {
            AnySpec::Cartesian(a) => a.clone(),
            AnySpec::Polar(b) => b_to_a(b),
        }
    }

    pub fn to_polar(&self) -> PolarLeadingSpec {
        match self {
            AnySpec::Cartesian(a) => a_to_b(a),
            AnySpec::Polar(b) => b.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64, px: f64, py: f64) -> PhasePoint {
        PhasePoint::new(x, y, px, py)
    }

    #[test]
    fn slot_counts() {
        for n in 1..=N_MAX {
            let expected = ((n + 1) * (n + 2) / 2) as usize;
            assert_eq!(LeadingTermSpec::slots(n).len(), expected);
            assert_eq!(PolarLeadingSpec::all_slots(n).len(), expected);
        }
    }

    #[test]
    fn lz_and_lz_squared() {
        let l = build_leading_cartesian(&LeadingTermSpec::new(1).unwrap().with(0, 0, 1.0).unwrap());
        let p = pt(0.3, -0.8, 1.1, 0.4);
        assert!((l.evaluate(&p).unwrap() - p.lz()).abs() < 1e-15);
        let l2 = build_leading_cartesian(&LeadingTermSpec::new(2).unwrap().with(0, 0, 1.0).unwrap());
        let (x, y) = (0.3, -0.8);
        assert!((l2.coefficient_of(0, 2, [x, y]).unwrap() - x * x).abs() < 1e-15);
        assert!((l2.coefficient_of(1, 1, [x, y]).unwrap() + 2.0 * x * y).abs() < 1e-15);
        assert!((l2.coefficient_of(2, 0, [x, y]).unwrap() - y * y).abs() < 1e-15);
    }

    #[test]
    fn px_maps_to_cos_doublet() {
        let a = LeadingTermSpec::new(1).unwrap().with(1, 0, 1.0).unwrap();
        let b = a_to_b(&a);
        assert_eq!(b.populated(), vec![(PolarSlot { component: 1, s: 1, k: 0 }, 1.0)]);
    }

    #[test]
    fn px2_minus_py2_is_cos_two_phi() {
        let a = LeadingTermSpec::new(2).unwrap().with(2, 0, 1.0).unwrap().with(0, 2, -1.0).unwrap();
        let b = a_to_b(&a);
        assert_eq!(b.populated(), vec![(PolarSlot { component: 1, s: 2, k: 0 }, 1.0)]);
    }

    #[test]
    fn split_examples() {
        let s4 = PolarLeadingSpec::new(4).unwrap().with_b1(2, 0, 1.0).unwrap();
        let (i, ii) = split_i_ii(&s4);
        assert!(i.is_zero());
        assert_eq!(ii, s4);
        let s4b = PolarLeadingSpec::new(4).unwrap().with_b1(4, 0, 1.0).unwrap();
        assert_eq!(split_i_ii(&s4b).0, s4b);
        let s3 = PolarLeadingSpec::new(3)
            .unwrap()
            .with_b1(1, 1, 1.0)
            .unwrap()
            .with_b1(3, 0, 2.0)
            .unwrap()
            .with_b1(1, 0, 3.0)
            .unwrap();
        let (i, ii) = split_i_ii(&s3);
        assert_eq!(i.b1(1, 1), 1.0);
        assert_eq!(i.b1(3, 0), 2.0);
        assert_eq!(i.b1(1, 0), 0.0);
        assert_eq!(ii.b1(1, 0), 3.0);
    }

    #[test]
    fn classify_examples() {
        let c = classify(&PolarLeadingSpec::new(4).unwrap().with_b1(2, 0, 1.0).unwrap());
        assert!(c.exotic);
        assert_eq!(c.by_weight.keys().copied().collect::<Vec<_>>(), vec![2]);
        let c = classify(&PolarLeadingSpec::new(4).unwrap().with_b1(4, 0, 1.0).unwrap());
        assert!(!c.exotic);
        assert_eq!(c.by_weight.keys().copied().collect::<Vec<_>>(), vec![4]);
    }

    #[test]
    fn singlet_examples() {
        let s = PolarLeadingSpec::new(2).unwrap().with_b1(0, 1, 1.0).unwrap();
        let (r, t) = singlet_reduce(&s).unwrap();
        assert!(r.is_zero());
        assert_eq!(t.get(&(0, 1)), Some(&2.0));
        let s = PolarLeadingSpec::new(4).unwrap().with_b1(0, 0, 1.0).unwrap();
        assert_eq!(singlet_reduce(&s).unwrap().1.get(&(2, 0)), Some(&1.0));
        let s = PolarLeadingSpec::new(4).unwrap().with_b1(0, 1, 3.0).unwrap();
        assert_eq!(singlet_reduce(&s).unwrap().1.get(&(1, 1)), Some(&6.0));
        assert!(singlet_reduce(&PolarLeadingSpec::new(3).unwrap()).is_err());
    }

    #[test]
    fn json_wire_formats() {
        let a: LeadingTermSpec = serde_json::from_str(r#"{"N": 2, "A": [[0, 0, 1.5], [1, 1, -2]]}"#).unwrap();
        assert_eq!(a.get(0, 0), 1.5);
        assert_eq!(a.get(1, 1), -2.0);
        let back: LeadingTermSpec = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        let b: PolarLeadingSpec = serde_json::from_str(r#"{"N": 4, "B1": [[2, 0, 1.0]], "B2": []}"#).unwrap();
        assert_eq!(b.b1(2, 0), 1.0);
        assert!(serde_json::from_str::<PolarLeadingSpec>(r#"{"N": 4, "B2": [[0, 1, 1.0]]}"#).is_err());
        assert!(serde_json::from_str::<PolarLeadingSpec>(r#"{"N": 4, "B3": []}"#).is_err());
        let any: AnySpec = serde_json::from_str(r#"{"N": 4, "B1": [[2, 0, 1.0]]}"#).unwrap();
        assert!(matches!(any, AnySpec::Polar(_)));
    }
}
