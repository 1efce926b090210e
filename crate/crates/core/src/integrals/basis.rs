//! Exact change of basis between momentum monomials and the polar harmonic
//! basis `P^{2k} Re/Im (p_x + i p_y)^s`, one block per momentum degree.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Ratio;

type Q = Ratio<i128>;

/// Harmonic basis element of a fixed momentum degree `d = s + 2k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Harmonic {
    /// 1 for the cosine (real part) member, 2 for the sine (imaginary part).
    pub component: u8,
    pub s: u32,
    pub k: u32,
}

/// Basis-change block for homogeneous momentum polynomials of degree `d`.
#[derive(Debug)]
pub struct DegreeBlock {
    pub degree: u32,
    /// Column order of the harmonic basis.
    pub harmonics: Vec<Harmonic>,
    /// `to_monomial[m][c]`: coefficient of `p_x^m p_y^{d-m}` in harmonic `c`.
    pub to_monomial: Vec<Vec<f64>>,
    /// Inverse map, `to_harmonic[c][m]`.
    pub to_harmonic: Vec<Vec<f64>>,
}

fn binom(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Monomial coefficients (indexed by the power of `p_x`) of one harmonic.
fn harmonic_monomials(h: Harmonic) -> Vec<i128> {
    let d = h.s + 2 * h.k;
    let mut trig = vec![0i128; h.s as usize + 1]; // by power of p_x within (p_x + i p_y)^s
    for t in 0..=h.s {
        // term binom(s,t) p_x^{s-t} (i p_y)^t
        let keep = match h.component {
            1 => t % 2 == 0,
            _ => t % 2 == 1,
        };
        if keep {
            let sign = if (t / 2) % 2 == 0 { 1 } else { -1 };
            trig[(h.s - t) as usize] += sign * binom(h.s, t);
        }
    }
    let mut out = vec![0i128; d as usize + 1];
    for a in 0..=h.k {
        let c = binom(h.k, a);
        for (px_pow, &tc) in trig.iter().enumerate() {
            if tc != 0 {
                out[px_pow + 2 * a as usize] += c * tc;
            }
        }
    }
    out
}

fn harmonics_of_degree(d: u32) -> Vec<Harmonic> {
    let mut out = Vec::new();
    for k in 0..=d / 2 {
        let s = d - 2 * k;
        out.push(Harmonic { component: 1, s, k });
        if s > 0 {
            out.push(Harmonic { component: 2, s, k });
        }
    }
    out
}

fn invert(mut m: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::from_integer(1) } else { Q::from_integer(0) }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| *m[r][col].numer() != 0)
            .expect("harmonic basis change is invertible");
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && *m[r][col].numer() != 0 {
                let f = m[r][col];
                for j in 0..n {
                    let (a, b) = (m[col][j], inv[col][j]);
                    m[r][j] -= f * a;
                    inv[r][j] -= f * b;
                }
            }
        }
    }
    inv
}

impl DegreeBlock {
    fn build(d: u32) -> Self {
        let harmonics = harmonics_of_degree(d);
        let n = d as usize + 1;
        debug_assert_eq!(harmonics.len(), n);
        let cols: Vec<Vec<i128>> = harmonics.iter().map(|&h| harmonic_monomials(h)).collect();
        let exact: Vec<Vec<Q>> = (0..n)
            .map(|m| (0..n).map(|c| Q::from_integer(cols[c][m])).collect())
            .collect();
        let inv = invert(exact.clone());
        let to_f = |q: &Q| *q.numer() as f64 / *q.denom() as f64;
        Self {
            degree: d,
            harmonics,
            to_monomial: exact.iter().map(|row| row.iter().map(to_f).collect()).collect(),
            to_harmonic: inv.iter().map(|row| row.iter().map(to_f).collect()).collect(),
        }
    }
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<DegreeBlock>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<DegreeBlock>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The cached basis-change block for momentum degree `d`.
pub fn degree_block(d: u32) -> Arc<DegreeBlock> {
    if let Some(b) = cache().read().expect("basis cache poisoned").get(&d) {
        return b.clone();
    }
    let mut w = cache().write().expect("basis cache poisoned");
    w.entry(d).or_insert_with(|| Arc::new(DegreeBlock::build(d))).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_harmonics() {
        // P^2 cos 2Φ = p_x^2 - p_y^2
        let h = harmonic_monomials(Harmonic { component: 1, s: 2, k: 0 });
        assert_eq!(h, vec![-1, 0, 1]);
        // P^2 sin 2Φ = 2 p_x p_y
        let h = harmonic_monomials(Harmonic { component: 2, s: 2, k: 0 });
        assert_eq!(h, vec![0, 2, 0]);
        // P^2 (k = 1, s = 0) = p_x^2 + p_y^2
        let h = harmonic_monomials(Harmonic { component: 1, s: 0, k: 1 });
        assert_eq!(h, vec![1, 0, 1]);
    }

    #[test]
    fn blocks_are_mutual_inverses() {
        for d in 0..=9 {
            let b = degree_block(d);
            let n = d as usize + 1;
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n).map(|k| b.to_monomial[i][k] * b.to_harmonic[k][j]).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((s - e).abs() < 1e-12, "d={d}");
                }
            }
        }
    }
}
