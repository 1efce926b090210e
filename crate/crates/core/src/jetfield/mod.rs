//! Jets, scalar-field expressions, tabulated functions and Fourier projection.

mod expr;
mod fourier;
mod jet;
mod poly;
mod spline;

pub use expr::{FieldExpr, DEFAULT_MAX_ORDER, TABULATED_MAX_ORDER};
pub use fourier::{default_nodes, fourier_project, node_angle, project_samples, sample_periodic, Trig};
pub use jet::{jet_len, Jet2};
pub use poly::Poly2;
pub use spline::{CubicSpline, SplineBoundary, PERIODIC_MISMATCH};

/// Taylor coefficients of `f` at `point` up to `order`.
pub fn jet_eval(f: &FieldExpr, point: [f64; 2], order: usize) -> crate::Result<Jet2> {
    f.jet(point, order)
}

/// `∂^{i+j} f / ∂u^i ∂v^j` at `point`.
pub fn deriv_at(f: &FieldExpr, point: [f64; 2], multi_index: (usize, usize)) -> crate::Result<f64> {
    f.deriv_at(point, multi_index.0, multi_index.1)
}
