//! The linear compatibility condition (LCC) on the potential and the
//! nullspace scans built on it.
//!
//! For a leading term with Cartesian coefficients `A` the LCC reads
//!
//! ```text
//! Σ_{j=0}^{N−1} (−1)^j ∂_x^{N−1−j} ∂_y^j [ (j+1) f_{j+1} ∂_x V + (N−j) f_j ∂_y V ] = 0
//! ```
//!
//! with polynomial weights `f_j` fixed by `A`. The polar form used for
//! separable potentials is obtained by evaluating the Cartesian form at
//! `(r cos θ, r sin θ)`, with all chain rules carried by jets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{b_to_a, binomial, split_i_ii, LeadingTermSpec, PolarLeadingSpec, PolarSlot};
use crate::jetfield::{default_nodes, node_angle, project_samples, FieldExpr, Jet2, Poly2, Trig, DEFAULT_MAX_ORDER};
use crate::linalg::{nullspace, Nullspace, RankPolicy};
use crate::observables::{angle_field, radius_field, R_MIN};
use crate::potentials::{quotient_derivative, AngularFamily, RadialKind, TrigPoly, TrigTerm};

/// The weights `f_{j,0}`, `j = 0..=N`.
pub fn f_polys(spec: &LeadingTermSpec) -> Vec<Poly2> {
    let n = spec.order();
    (0..=n)
        .map(|j| {
            let mut f = Poly2::zero();
            for nn in 0..=n - j {
                for m in 0..=j {
                    let a = spec.get(m, nn);
                    if a == 0.0 {
                        continue;
                    }
                    let sign = if (j - m) % 2 == 0 { 1.0 } else { -1.0 };
                    f.add_term(n - j - nn, j - m, sign * binomial(n - m - nn, j - m) * a);
                }
            }
            f
        })
        .collect()
}

/// A residual value together with the magnitude of the largest term that
/// entered it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LccValue {
    pub value: f64,
    pub scale: f64,
}

impl LccValue {
    /// `|value| / scale`, zero when every term vanished.
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            if self.value == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.value.abs() / self.scale
        }
    }
}

/// The LCC applied to a jet of `V` of order `N + m`; returns the residual
/// as a jet of order `m` and a roundoff scale for its value.
///
/// The scale bounds each term by the same derivative of the product of
/// majorant jets: `f` by its absolute coefficients, `∂V` by the largest
/// coefficient of each total degree. Cancellation inside a term, or in
/// the jet of `V` itself, therefore does not shrink it.
pub fn lcc_jet(f: &[Poly2], vjet: &Jet2) -> Result<(Jet2, f64)> {
    let n = f.len() - 1;
    let k = vjet.order();
    if k < n {
        return Err(Error::OrderOverflow {
            requested: n,
            available: k,
        });
    }
    let base = vjet.base();
    let vx = vjet.differentiate(1, 0)?;
    let vy = vjet.differentiate(0, 1)?;
    let (vx_abs, vy_abs) = (degree_majorant(&vx), degree_majorant(&vy));
    let mut acc = Jet2::zero(base, k - n);
    let mut scale = 0.0;
    let fj: Vec<Option<Jet2>> = f
        .iter()
        .map(|p| (!p.is_zero()).then(|| p.jet(base, k - 1)))
        .collect();
    let mut term = |fjet: &Jet2, v: &Jet2, v_abs: &Jet2, c: f64, j: usize| -> Result<()> {
        let t = fjet.mul_jet(v).differentiate(n - 1 - j, j)?;
        acc.add_scaled(&t, c);
        scale += c.abs() * abs_jet(fjet).mul_jet(v_abs).partial(n - 1 - j, j);
        Ok(())
    };
    for j in 0..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        if let Some(f1) = &fj[j + 1] {
            term(f1, &vx, &vx_abs, sign * (j + 1) as f64, j)?;
        }
        if let Some(f0) = &fj[j] {
            term(f0, &vy, &vy_abs, sign * (n - j) as f64, j)?;
        }
    }
    Ok((acc, scale))
}

fn abs_jet(j: &Jet2) -> Jet2 {
    Jet2::from_fn(j.base(), j.order(), |a, b| j.coeff(a, b).abs())
}

fn degree_majorant(j: &Jet2) -> Jet2 {
    let top: Vec<f64> = (0..=j.order())
        .map(|d| (0..=d).fold(0.0f64, |m, a| m.max(j.coeff(a, d - a).abs())))
        .collect();
    Jet2::from_fn(j.base(), j.order(), |a, b| top[a + b])
}

/// The Cartesian LCC for `spec` and potential `v` at `point`.
pub fn lcc_cartesian(spec: &LeadingTermSpec, v: &FieldExpr, point: [f64; 2]) -> Result<LccValue> {
    let f = f_polys(spec);
    lcc_cartesian_with(&f, v, point)
}

fn lcc_cartesian_with(f: &[Poly2], v: &FieldExpr, point: [f64; 2]) -> Result<LccValue> {
    let vjet = v.jet(point, f.len() - 1)?;
    let (j, scale) = lcc_jet(f, &vjet)?;
    Ok(LccValue { value: j.value(), scale })
}

/// `R(r) + S(θ)/r²` in Cartesian variables, for `R`, `S` fields in variable 0.
pub fn separable_field(radial: &FieldExpr, angular: &FieldExpr) -> Result<FieldExpr> {
    let (x, y) = (FieldExpr::x(), FieldExpr::y());
    let r2 = &x * &x + &y * &y;
    let rad = if radial.is_zero() {
        FieldExpr::zero()
    } else {
        radial.compose(&radius_field())?
    };
    let ang = if angular.is_zero() {
        FieldExpr::zero()
    } else {
        angular.compose(&angle_field())? / r2
    };
    Ok(rad + ang)
}

/// The LCC for the separable potential `R(r) + S(θ)/r²` at polar `(r, θ)`.
pub fn lcc_polar(
    spec: &LeadingTermSpec,
    radial: &FieldExpr,
    angular: &FieldExpr,
    polar: (f64, f64),
) -> Result<LccValue> {
    let (r, theta) = polar;
    check_radius(r)?;
    let v = separable_field(radial, angular)?;
    lcc_cartesian(spec, &v, [r * theta.cos(), r * theta.sin()])
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > R_MIN) {
        return Err(Error::RadiusTooSmall { r, r_min: R_MIN });
    }
    Ok(())
}

/// `∂²_r [r^{N+2} L](r, θ)` from a Cartesian residual jet of order 2.
fn second_radial_derivative(l: &Jet2, n: usize, r: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let lr = c * l.partial(1, 0) + s * l.partial(0, 1);
    let lrr = c * c * l.partial(2, 0) + 2.0 * c * s * l.partial(1, 1) + s * s * l.partial(0, 2);
    let nf = n as f64;
    let t0 = (nf + 2.0) * (nf + 1.0) * r.powi(n as i32) * l.value();
    let t1 = 2.0 * (nf + 2.0) * r.powi(n as i32 + 1) * lr;
    let t2 = r.powi(n as i32 + 2) * lrr;
    (t0 + t1 + t2, t0.abs().max(t1.abs()).max(t2.abs()))
}

/// Harmonic components of `∂²_r [r^{N+2} LCC]` at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialResiduals {
    /// `[cos 1θ, sin 1θ, cos 2θ, sin 2θ, …, cos Nθ, sin Nθ]`.
    pub values: Vec<f64>,
    /// Largest term magnitude seen while assembling.
    pub scale: f64,
}

/// Computes `∂²_r [r^{N+2} LCC]` for `V = R + probe/r²` on `4N + 8` angles at
/// radius `r`, projected onto `cos sθ`, `sin sθ` for `s = 1..=N`.
pub fn radial_residuals(
    spec: &PolarLeadingSpec,
    radial: &FieldExpr,
    r: f64,
    probe: &FieldExpr,
) -> Result<RadialResiduals> {
    check_radius(r)?;
    let n = spec.order() as usize;
    if n + 2 > DEFAULT_MAX_ORDER {
        return Err(Error::OrderOverflow {
            requested: n + 2,
            available: DEFAULT_MAX_ORDER,
        });
    }
    let f = f_polys(&b_to_a(spec));
    let v = separable_field(radial, probe)?;
    let rows = radial_rows(&[f], &v, n, r, default_nodes(n))?;
    Ok(RadialResiduals {
        values: rows.values.into_iter().map(|c| c[0]).collect(),
        scale: rows.scale,
    })
}

struct RadialRows {
    /// `values[row][column]`.
    values: Vec<Vec<f64>>,
    scale: f64,
}

/// Residual rows at one radius for several weight sets sharing one potential.
fn radial_rows(columns: &[Vec<Poly2>], v: &FieldExpr, n: usize, r: f64, nodes: usize) -> Result<RadialRows> {
    let mut samples = vec![vec![0.0; nodes]; columns.len()];
    let mut scale: f64 = 0.0;
    for k in 0..nodes {
        let theta = node_angle(k, nodes);
        let point = [r * theta.cos(), r * theta.sin()];
        let vjet = v.jet(point, n + 2)?;
        for (c, f) in columns.iter().enumerate() {
            let (l, sc) = lcc_jet(f, &vjet)?;
            let (g, gs) = second_radial_derivative(&l, n, r, theta);
            samples[c][k] = g;
            scale = scale.max(gs).max(sc * r.powi(n as i32));
        }
    }
    let mut values = Vec::with_capacity(2 * n);
    for s in 1..=n {
        for kind in [Trig::Cos, Trig::Sin] {
            values.push(samples.iter().map(|col| project_samples(col, s, kind)).collect());
        }
    }
    Ok(RadialRows { values, scale })
}

/// Radius grid and quadrature settings for the radial scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGrid {
    pub count: usize,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            count: 16,
            r_lo: 0.5,
            r_hi: 4.0,
        }
    }
}

impl RadialGrid {
    /// Log-spaced radii.
    pub fn radii(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.r_lo];
        }
        let (a, b) = (self.r_lo.ln(), self.r_hi.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowLabel {
    pub radius: f64,
    pub harmonic: u32,
    pub kind: Trig,
}

/// The linear map from non-singlet B-slots to radial residuals, and its
/// numerical nullspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialResidualSystem {
    #[serde(rename = "N")]
    pub n: u32,
    pub radial: String,
    pub grid: RadialGrid,
    pub sample_radii: Vec<f64>,
    pub nodes: usize,
    pub slots: Vec<PolarSlot>,
    pub rows: Vec<RowLabel>,
    /// Rows normalised to unit max-abs (rows that vanish stay zero).
    pub matrix: Vec<Vec<f64>>,
    /// Largest row difference between two probe functions, relative to
    /// the residual scale.
    pub probe_difference: f64,
    pub policy: RankPolicy,
    pub spectrum: Vec<f64>,
    pub rank: usize,
    pub gap: f64,
    pub nullspace: Vec<Vec<f64>>,
}

impl RadialResidualSystem {
    pub fn dimension(&self) -> usize {
        self.nullspace.len()
    }

    /// Nullspace vector `k` as a polar spec.
    pub fn nullspace_spec(&self, k: usize) -> Result<PolarLeadingSpec> {
        let mut spec = PolarLeadingSpec::new(self.n)?;
        for (slot, v) in self.slots.iter().zip(&self.nullspace[k]) {
            if v.abs() > 1e-14 {
                spec.set(*slot, *v)?;
            }
        }
        Ok(spec)
    }
}

/// Non-singlet slots, in canonical order.
pub fn non_singlet_slots(n: u32) -> Vec<PolarSlot> {
    PolarLeadingSpec::all_slots(n)
        .into_iter()
        .filter(|s| !s.is_singlet())
        .collect()
}

fn unit_columns(n: u32, slots: &[PolarSlot]) -> Result<Vec<Vec<Poly2>>> {
    slots
        .iter()
        .map(|&slot| {
            let mut spec = PolarLeadingSpec::new(n)?;
            spec.set(slot, 1.0)?;
            Ok(f_polys(&b_to_a(&spec)))
        })
        .collect()
}

/// Assembles the radial residual system over non-singlet B-slots and
/// returns it with its nullspace.
///
/// Singlet slots are leading terms of products of `X`, `H` (and `L_z` for
/// radial potentials) and are admissible for every radial part, so they
/// are left out of the scan.
pub fn admissible_b_space(n: u32, radial: &RadialKind, grid: RadialGrid, policy: RankPolicy) -> Result<RadialResidualSystem> {
    if n == 0 || n > crate::integrals::N_MAX {
        return Err(Error::InvalidSpec(format!("order N = {n} outside 1..={}", crate::integrals::N_MAX)));
    }
    let nn = n as usize;
    let slots = non_singlet_slots(n);
    let columns = unit_columns(n, &slots)?;
    let radii = grid.radii();
    for &r in &radii {
        check_radius(r)?;
    }
    let nodes = default_nodes(nn);
    let rfield = radial.field();
    let v0 = separable_field(&rfield, &FieldExpr::zero())?;
    let probe = FieldExpr::var(0).scale(3.0).cos();
    let v1 = separable_field(&rfield, &probe)?;
    let per_radius: Vec<(RadialRows, RadialRows)> = radii
        .par_iter()
        .map(|&r| Ok((radial_rows(&columns, &v0, nn, r, nodes)?, radial_rows(&columns, &v1, nn, r, nodes)?)))
        .collect::<Result<_>>()?;
    let mut matrix = Vec::new();
    let mut rows = Vec::new();
    let mut probe_difference: f64 = 0.0;
    for (&r, (a, b)) in radii.iter().zip(&per_radius) {
        let scale = a.scale.max(b.scale);
        for (i, (ra, rb)) in a.values.iter().zip(&b.values).enumerate() {
            let d = ra.iter().zip(rb).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if scale > 0.0 {
                probe_difference = probe_difference.max(d / scale);
            }
            // entries at roundoff level relative to the assembly scale are zero
            let row: Vec<f64> = ra.iter().map(|&x| if x.abs() <= 1e-13 * scale { 0.0 } else { x }).collect();
            let m = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            matrix.push(if m > 0.0 { row.iter().map(|x| x / m).collect() } else { row });
            rows.push(RowLabel {
                radius: r,
                harmonic: (i / 2 + 1) as u32,
                kind: if i % 2 == 0 { Trig::Cos } else { Trig::Sin },
            });
        }
    }
    let a = nalgebra::DMatrix::from_fn(matrix.len(), slots.len(), |i, j| matrix[i][j]);
    let Nullspace {
        spectrum,
        rank,
        gap,
        basis,
    } = nullspace(&a, policy)?;
    Ok(RadialResidualSystem {
        n,
        radial: radial.label(),
        grid,
        sample_radii: radii,
        nodes,
        slots,
        rows,
        matrix,
        probe_difference,
        policy,
        spectrum,
        rank,
        gap,
        nullspace: basis,
    })
}

/// Admissible numerator constants of a standard family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularNullspace {
    pub family: AngularFamily,
    #[serde(rename = "N")]
    pub n: u32,
    /// Numerator terms, followed by the radial weight when present.
    pub terms: Vec<TrigTerm>,
    pub has_radial_column: bool,
    pub denominator: TrigPoly,
    pub samples: usize,
    pub spectrum: Vec<f64>,
    pub gap: f64,
    /// Full nullspace dimension.
    pub dimension: usize,
    /// Dimension of the part spanned by `T = const` and the bare radial
    /// term.
    pub trivial_dimension: usize,
    /// Orthonormal nullspace vectors orthogonal to the trivial part.
    pub nontrivial_basis: Vec<Vec<f64>>,
}

impl AngularNullspace {
    pub fn nontrivial_dimension(&self) -> usize {
        self.nontrivial_basis.len()
    }

    /// `S = T′` for a coefficient vector over [`Self::terms`] (the radial
    /// weight, if any, is ignored).
    pub fn profile(&self, coeffs: &[f64]) -> FieldExpr {
        let num = TrigPoly::from_terms(&self.terms, coeffs);
        quotient_derivative(&num, &self.denominator)
    }
}

/// Samples the LCC of a standard family at a pole-free `(r, θ)` grid and
/// returns the nullspace of the numerator constants.
///
/// The residual is affine in the constants when the family has a radial
/// part, so the radial weight enters as one more column.
pub fn standard_angular_nullspace(
    spec: &PolarLeadingSpec,
    family: AngularFamily,
    radial: f64,
    policy: RankPolicy,
) -> Result<AngularNullspace> {
    let n = spec.order();
    family.check_order(n)?;
    let (y_i, _) = split_i_ii(spec);
    if y_i.is_zero() {
        return Err(Error::InvalidSpec("the leading term has no Y_I part".into()));
    }
    let den = family.denominator(spec);
    if den.is_zero() {
        return Err(Error::InvalidSpec(format!(
            "family {} has an identically zero denominator for this spec",
            family.name()
        )));
    }
    let a = b_to_a(spec);
    let f = f_polys(&a);
    let terms = family.numerator_terms(n);
    let mut fields: Vec<(FieldExpr, FieldExpr)> = terms
        .iter()
        .map(|&t| {
            let num = TrigPoly::from_terms(&[t], &[1.0]);
            (FieldExpr::zero(), quotient_derivative(&num, &den))
        })
        .collect();
    let radial_field = family.radial(radial).field();
    let has_radial_column = !radial_field.is_zero();
    if has_radial_column {
        fields.push((radial_field, FieldExpr::zero()));
    }
    let potentials: Vec<FieldExpr> = fields
        .iter()
        .map(|(r, s)| separable_field(r, s))
        .collect::<Result<_>>()?;
    let ncols = potentials.len();
    let dmax = den.max_abs_on_grid(512);
    let radii = [0.6, 0.9, 1.3, 1.9, 2.7];
    let per_radius = (3 * ncols).div_ceil(radii.len()).max(8) * 2;
    let mut points = Vec::new();
    for (ir, &r) in radii.iter().enumerate() {
        let mut k = 0;
        let mut taken = 0;
        while taken < per_radius && k < 64 * per_radius {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.31 + 0.17 * ir as f64) / (2 * per_radius) as f64;
            k += 1;
            if den.eval(theta).abs() < 0.1 * dmax {
                continue;
            }
            points.push((r, theta));
            taken += 1;
        }
    }
    if points.len() < 3 * ncols {
        return Err(Error::InvalidSpec("denominator leaves too few pole-free sample angles".into()));
    }
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(r, theta)| {
            let pt = [r * theta.cos(), r * theta.sin()];
            let vals: Vec<LccValue> = potentials
                .iter()
                .map(|v| lcc_cartesian_with(&f, v, pt))
                .collect::<Result<_>>()?;
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.scale));
            Ok(vals
                .iter()
                .map(|v| if scale > 0.0 && v.value.abs() > 1e-13 * scale { v.value / scale } else { 0.0 })
                .collect())
        })
        .collect::<Result<_>>()?;
    // unit column norms for the rank decision
    let norms: Vec<f64> = (0..ncols)
        .map(|j| rows.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    let mat = nalgebra::DMatrix::from_fn(rows.len(), ncols, |i, j| {
        if norms[j] > 0.0 {
            rows[i][j] / norms[j]
        } else {
            0.0
        }
    });
    let ns = nullspace(&mat, policy)?;
    let basis: Vec<Vec<f64>> = ns
        .basis
        .iter()
        .map(|v| {
            let w: Vec<f64> = v
                .iter()
                .zip(&norms)
                .map(|(x, nrm)| if *nrm > 0.0 { x / nrm } else { *x })
                .collect();
            normalized(&w)
        })
        .collect();
    let basis = gram_schmidt(basis, 1e-6);
    // Trivial directions: a numerator proportional to the denominator (`T`
    // constant) and the bare radial part. Each counts only when it lies in
    // the nullspace.
    let mut candidates = Vec::new();
    let den_in_span = den.cos.keys().all(|s| terms.contains(&TrigTerm::Cos(*s)))
        && den.sin.keys().all(|s| terms.contains(&TrigTerm::Sin(*s)))
        && (den.c0 == 0.0 || terms.contains(&TrigTerm::Const));
    if den_in_span {
        let mut t: Vec<f64> = terms.iter().map(|&term| den.coefficient(term)).collect();
        if has_radial_column {
            t.push(0.0);
        }
        candidates.push(normalized(&t));
    }
    if has_radial_column {
        let mut t = vec![0.0; ncols];
        t[ncols - 1] = 1.0;
        candidates.push(t);
    }
    let trivial: Vec<Vec<f64>> = gram_schmidt(
        candidates.into_iter().filter(|c| {
            let mut w = c.clone();
            for u in &basis {
                axpy_project(&mut w, u);
            }
            w.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8
        }),
        1e-6,
    );
    let nontrivial = gram_schmidt(
        basis.iter().map(|v| {
            let mut w = v.clone();
            for u in &trivial {
                axpy_project(&mut w, u);
            }
            w
        }),
        1e-6,
    );
    let trivial_dimension = basis.len() - nontrivial.len();
    Ok(AngularNullspace {
        family,
        n,
        terms,
        has_radial_column,
        denominator: den,
        samples: points.len(),
        spectrum: ns.spectrum,
        gap: ns.gap,
        dimension: basis.len(),
        trivial_dimension,
        nontrivial_basis: nontrivial,
    })
}

/// Orthonormalises `vs`, dropping vectors whose remainder is below `tol`.
fn gram_schmidt(vs: impl IntoIterator<Item = Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut w in vs {
        let before = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for u in &out {
            axpy_project(&mut w, u);
        }
        let nrm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > tol * before.max(1.0) {
            out.push(w.iter().map(|x| x / nrm).collect());
        }
    }
    out
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// `w ← w − (w·u) u` for unit `u`.
fn axpy_project(w: &mut [f64], u: &[f64]) {
    let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
    for (a, b) in w.iter_mut().zip(u) {
        *a -= d * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::build_leading_cartesian;

    #[test]
    fn f_polys_examples() {
        let a = LeadingTermSpec::new(2).unwrap().with(0, 0, 1.0).unwrap();
        let f = f_polys(&a);
        assert_eq!(f[0], Poly2::monomial(1.0, 2, 0));
        assert_eq!(f[1], Poly2::monomial(-2.0, 1, 1));
        assert_eq!(f[2], Poly2::monomial(1.0, 0, 2));
        let a = LeadingTermSpec::new(2).unwrap().with(2, 0, 1.0).unwrap();
        let f = f_polys(&a);
        assert!(f[0].is_zero() && f[1].is_zero());
        assert_eq!(f[2], Poly2::constant(1.0));
        assert!(f_polys(&LeadingTermSpec::new(3).unwrap()).iter().all(Poly2::is_zero));
    }

    #[test]
    fn f_polys_match_momentum_coefficients() {
        // f_j is the coefficient of p_x^j p_y^{N−j} in the leading term
        let a = LeadingTermSpec::new(3)
            .unwrap()
            .with(0, 0, 0.5)
            .unwrap()
            .with(1, 1, -2.0)
            .unwrap()
            .with(2, 1, 1.5)
            .unwrap()
            .with(0, 2, 0.25)
            .unwrap();
        let y = build_leading_cartesian(&a);
        for (j, f) in f_polys(&a).iter().enumerate() {
            for pt in [[0.3, -0.7], [1.1, 0.4]] {
                let c = y.coefficient_of(j as u32, 3 - j as u32, pt).unwrap();
                assert!((c - f.eval(pt[0], pt[1])).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_potential_has_zero_lcc() {
        let a = LeadingTermSpec::new(4).unwrap().with(0, 4, 1.0).unwrap().with(1, 1, 2.0).unwrap();
        let v = lcc_cartesian(&a, &FieldExpr::constant(3.0), [0.4, 0.2]).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn exotic_leading_term_is_blind_to_the_angular_part() {
        let b = PolarLeadingSpec::new(4).unwrap().with_b1(2, 0, 1.0).unwrap();
        let a = b_to_a(&b);
        let s = FieldExpr::var(0).sin() * 0.7 + FieldExpr::var(0).scale(2.0).cos().powi(3) + 1.3;
        for (r, t) in [(0.7, 0.3), (1.4, 2.9), (2.2, -1.1)] {
            let v = lcc_polar(&a, &FieldExpr::zero(), &s, (r, t)).unwrap();
            assert!(v.relative() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn standard_leading_term_sees_generic_potential() {
        let b = PolarLeadingSpec::new(4).unwrap().with_b1(4, 0, 1.0).unwrap();
        let a = b_to_a(&b);
        let (x, y) = (FieldExpr::x(), FieldExpr::y());
        let v = (&x * 0.3 + &y * &y * 0.2 + 0.1).sin() * &x + (&y * 1.7).cos();
        let l = lcc_cartesian(&a, &v, [0.3, 0.8]).unwrap();
        assert!(l.relative() > 1e-3, "{l:?}");
    }

    #[test]
    fn radius_guard() {
        let a = LeadingTermSpec::new(2).unwrap().with(0, 0, 1.0).unwrap();
        assert!(matches!(
            lcc_polar(&a, &FieldExpr::zero(), &FieldExpr::zero(), (1e-7, 0.0)),
            Err(Error::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn zero_spec_has_zero_radial_residuals() {
        let spec = PolarLeadingSpec::new(3).unwrap();
        let r = radial_residuals(&spec, &RadialKind::Kepler { a: -1.0 }.field(), 1.3, &FieldExpr::zero()).unwrap();
        assert_eq!(r.values.len(), 6);
        assert!(r.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn radii_are_log_spaced() {
        let r = RadialGrid::default().radii();
        assert_eq!(r.len(), 16);
        assert!((r[0] - 0.5).abs() < 1e-15 && (r[15] - 4.0).abs() < 1e-12);
        assert!((r[1] / r[0] - r[15] / r[14]).abs() < 1e-12);
    }

    fn oscillator_n2() -> PolarLeadingSpec {
        PolarLeadingSpec::new(2).unwrap().with_b1(2, 0, 1.0).unwrap()
    }

    #[test]
    fn oscillator_family_recovers_cartesian_separation() {
        let ns = standard_angular_nullspace(&oscillator_n2(), AngularFamily::DeformedOscillator, 1.0, RankPolicy::default())
            .unwrap();
        assert!(ns.nontrivial_dimension() >= 1);
        // every admissible profile is α sec²θ + β csc²θ + c
        for v in &ns.nontrivial_basis {
            let s = ns.profile(&v[..ns.terms.len()]);
            let thetas: Vec<f64> = (0..40).map(|i| 0.2 + 1.1 * i as f64 / 39.0).collect();
            let a = nalgebra::DMatrix::from_fn(thetas.len(), 3, |i, j| {
                let t = thetas[i];
                [1.0 / t.cos().powi(2), 1.0 / t.sin().powi(2), 1.0][j]
            });
            let b: Vec<f64> = thetas.iter().map(|&t| s.eval1(t).unwrap()).collect();
            let c = crate::linalg::least_squares(&a, &b).unwrap();
            let bn = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let res = (0..thetas.len())
                .map(|i| (a.row(i).iter().zip(&c).map(|(x, y)| x * y).sum::<f64>() - b[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10 * bn.max(1.0), "{res}");
        }
    }

    #[test]
    fn numerator_outside_the_family_violates_the_lcc() {
        let spec = oscillator_n2();
        let a = b_to_a(&spec);
        let den = AngularFamily::DeformedOscillator.denominator(&spec);
        let num = TrigPoly::from_terms(&[TrigTerm::Cos(1)], &[1.0]);
        let s = quotient_derivative(&num, &den);
        let l = lcc_polar(&a, &FieldExpr::zero(), &s, (0.9, 0.4)).unwrap();
        assert!(l.relative() > 1e-4, "{l:?}");
    }

    #[test]
    fn bare_radial_term_is_trivial() {
        let spec = PolarLeadingSpec::new(2).unwrap().with_b1(1, 0, 1.0).unwrap();
        let ns = standard_angular_nullspace(&spec, AngularFamily::DeformedKepler, -1.0, RankPolicy::default()).unwrap();
        assert!(ns.has_radial_column);
        assert_eq!(ns.trivial_dimension, 2);
        for v in &ns.nontrivial_basis {
            assert!(v[ns.terms.len()].abs() < 1e-8);
        }
    }

    #[test]
    fn exotic_spec_is_rejected_by_the_angular_scan() {
        let spec = PolarLeadingSpec::new(4).unwrap().with_b1(2, 0, 1.0).unwrap();
        assert!(standard_angular_nullspace(&spec, AngularFamily::DeformedOscillator, 1.0, RankPolicy::default()).is_err());
    }

    #[test]
    fn radial_scan_separates_onofri_from_kepler() {
        let grid = RadialGrid::default();
        let k = admissible_b_space(3, &RadialKind::Kepler { a: -1.0 }, grid, RankPolicy::default()).unwrap();
        assert!(k.dimension() >= 1 && k.probe_difference < 1e-8);
        let o = admissible_b_space(3, &RadialKind::Onofri { a: 1.0, d: 1.0 }, grid, RankPolicy::default()).unwrap();
        assert_eq!(o.dimension(), 0);
        assert!(o.gap >= 1e2);
    }
}
