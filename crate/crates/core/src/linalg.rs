//! Rank-revealing helpers on top of nalgebra's SVD.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank decision parameters: singular values at or below
/// `rel_tol * σ_max` count as zero, and the spectrum must show a gap of at
/// least `min_gap` around that threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    pub rel_tol: f64,
    pub min_gap: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            min_gap: 1e2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nullspace {
    /// Singular values, descending.
    pub spectrum: Vec<f64>,
    pub rank: usize,
    /// Ratio between the smallest retained and the largest discarded
    /// singular value (or the threshold, at full rank).
    pub gap: f64,
    /// Orthonormal basis vectors of the numerical nullspace.
    pub basis: Vec<Vec<f64>>,
}

impl Nullspace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Numerical nullspace of `a` under `policy`.
pub fn nullspace(a: &DMatrix<f64>, policy: RankPolicy) -> Result<Nullspace> {
    let n = a.ncols();
    if n == 0 {
        return Ok(Nullspace {
            spectrum: vec![],
            rank: 0,
            gap: f64::INFINITY,
            basis: vec![],
        });
    }
    // pad so the right singular vectors span all of R^n
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let mut svd = padded.svd(false, true);
    svd.sort_by_singular_values();
    let spectrum: Vec<f64> = svd.singular_values.iter().copied().collect();
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = spectrum[0];
    let threshold = policy.rel_tol * smax;
    let rank = if smax == 0.0 {
        0
    } else {
        spectrum.iter().filter(|&&s| s > threshold).count()
    };
    let gap = if rank == 0 {
        f64::INFINITY
    } else if rank < n {
        spectrum[rank - 1] / spectrum[rank].max(f64::MIN_POSITIVE)
    } else {
        spectrum[n - 1] / threshold
    };
    if gap < policy.min_gap {
        return Err(Error::IndeterminateRank {
            gap,
            required: policy.min_gap,
            spectrum,
        });
    }
    let basis = (rank..n)
        .map(|k| v_t.row(k).iter().copied().collect())
        .collect();
    Ok(Nullspace {
        spectrum,
        rank,
        gap,
        basis,
    })
}

/// Least-squares solution of `a x ≈ b`.
pub fn least_squares(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-14 * svd.singular_values.max())
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_matrix_has_codim_one_nullspace() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, -1.0, -2.0, -3.0]);
        let ns = nullspace(&a, RankPolicy::default()).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.dimension(), 2);
        for v in &ns.basis {
            let av = &a * nalgebra::DVector::from_column_slice(v);
            assert!(av.norm() < 1e-12);
        }
    }

    #[test]
    fn full_rank_and_zero_matrix() {
        let eye = DMatrix::<f64>::identity(4, 4);
        assert_eq!(nullspace(&eye, RankPolicy::default()).unwrap().dimension(), 0);
        let z = DMatrix::<f64>::zeros(5, 3);
        assert_eq!(nullspace(&z, RankPolicy::default()).unwrap().dimension(), 3);
    }

    #[test]
    fn ambiguous_spectrum_is_surfaced() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-7, 1e-9]));
        assert!(matches!(
            nullspace(&a, RankPolicy::default()),
            Err(Error::IndeterminateRank { .. })
        ));
    }

    #[test]
    fn wide_matrix_is_padded() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&a, RankPolicy::default()).unwrap();
        assert_eq!(ns.dimension(), 2);
    }
}
