//! Real symmetric tridiagonal eigensolver (implicit-shift QL with Wilkinson shifts).

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric
/// tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column-major: column `k` is the eigenvector of `values[k]`,
    /// stored at `vectors[k * n .. (k + 1) * n]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn component(&self, row: usize, col: usize) -> f64 {
        self.vectors[col * self.order() + row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        let n = self.order();
        &self.vectors[col * n..(col + 1) * n]
    }
}

/// Diagonalizes the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
///
/// Each eigenvector has its first nonzero component made positive.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<SymmetricEigen> {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    // Row-major accumulation: z[row * n + col].
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * 0.5 * scale {
                    e[m] = 0.0;
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::TridiagonalNoConvergence { index: l });
            }
            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[k * n + i + 1];
                    let zk = z[k * n + i];
                    z[k * n + i + 1] = s * zk + c * zk1;
                    z[k * n + i] = c * zk - s * zk1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let dst = &mut vectors[col * n..(col + 1) * n];
        for row in 0..n {
            dst[row] = z[row * n + k];
        }
        if let Some(first) = dst.iter().find(|v| **v != 0.0) {
            if *first < 0.0 {
                dst.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(eig: &SymmetricEigen, i: usize, j: usize) -> f64 {
        (0..eig.order())
            .map(|k| eig.component(i, k) * eig.component(j, k) * eig.values[k])
            .sum()
    }

    #[test]
    fn one_by_one() {
        let eig = symmetric_tridiagonal_eigen(&[3.5], &[]).unwrap();
        assert_eq!(eig.values, vec![3.5]);
        assert_eq!(eig.vectors, vec![1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, -1], [-1, 2]] -> 1, 3
        let eig = symmetric_tridiagonal_eigen(&[2.0, 2.0], &[-1.0]).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 3.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eig.component(0, 0) - h).abs() < 1e-15);
        assert!((eig.component(1, 0) - h).abs() < 1e-15);
        assert!((eig.component(0, 1) - h).abs() < 1e-15);
        assert!((eig.component(1, 1) + h).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_random_matrix() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| ((i * 13 % 7) as f64) * 0.5 - 1.0).collect();
        let eig = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for i in 0..n {
            assert!((reconstruct(&eig, i, i) - diag[i]).abs() < 1e-12);
            if i + 1 < n {
                assert!((reconstruct(&eig, i, i + 1) - off[i]).abs() < 1e-12);
            }
            if i + 2 < n {
                assert!(reconstruct(&eig, i, i + 2).abs() < 1e-12);
            }
        }
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = eig.column(a).iter().zip(eig.column(b)).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn decoupled_blocks_and_sign_convention() {
        let eig = symmetric_tridiagonal_eigen(&[5.0, 1.0, 3.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.values, vec![1.0, 3.0, 5.0]);
        for k in 0..3 {
            let first = eig.column(k).iter().find(|v| **v != 0.0).unwrap();
            assert!(*first > 0.0);
        }
    }
}
