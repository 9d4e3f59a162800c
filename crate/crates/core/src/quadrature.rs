//! Gauss quadrature in the orthonormal Laguerre basis.
//!
//! The coordinate operator `x` is tridiagonal in the basis
//! `A_n x^{(nu+1)/2} e^{-x/2} L_n^nu(x)`. Its eigenvalues are the zeros of
//! `L_M^nu`, and the products of eigenvector components `Lambda_{nk} Lambda_{mk}`
//! act as quadrature weights for matrix elements of any function of `x`:
//!
//! `<n| f(x) |m> ~= sum_k Lambda_{nk} Lambda_{mk} f(mu_k)`.
//!
//! The off-diagonal sign is negative. This is the sign of the true
//! `x`-representation, and the odd-`n + m` weight products depend on it.

use crate::error::{Error, Result};
use crate::tridiagonal::{symmetric_tridiagonal_eigen, SymmetricEigen};

/// Real symmetric tridiagonal `J` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl JMatrix {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i + 1 == j {
            self.off[i]
        } else if j + 1 == i {
            self.off[j]
        } else {
            0.0
        }
    }

    /// `(J^2)_{ij}`.
    pub fn squared(&self, i: usize, j: usize) -> f64 {
        let lo = i.max(j).saturating_sub(1);
        let hi = (i.min(j) + 1).min(self.order() - 1);
        (lo..=hi).map(|k| self.get(i, k) * self.get(k, j)).sum()
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu.is_finite() && nu > -1.0) {
        return Err(Error::InvalidChannel(format!("nu = {nu} must exceed -1")));
    }
    Ok(())
}

/// `J_{n,n} = 2n + nu + 1`, `J_{n,n+1} = -sqrt((n + 1)(n + nu + 1))`.
pub fn build_j_matrix(size: usize, nu: f64) -> Result<JMatrix> {
    check_nu(nu)?;
    if size == 0 {
        return Err(Error::InvalidChannel("quadrature size must be at least 1".into()));
    }
    let diag = (0..size).map(|n| 2.0 * n as f64 + nu + 1.0).collect();
    let off = (0..size - 1)
        .map(|n| {
            let n = n as f64;
            -((n + 1.0) * (n + nu + 1.0)).sqrt()
        })
        .collect();
    Ok(JMatrix { diag, off })
}

/// Nodes `mu_k` (ascending) and orthonormal eigenvectors `Lambda` of the `J` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nu: f64,
    eigen: SymmetricEigen,
}

impl QuadratureRule {
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn size(&self) -> usize {
        self.eigen.order()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.eigen.values
    }

    /// `Lambda_{nk}`: component `n` of the eigenvector for node `k`.
    #[inline]
    pub fn lambda(&self, n: usize, k: usize) -> f64 {
        self.eigen.component(n, k)
    }

    /// Eigenvector of node `k`.
    pub fn column(&self, k: usize) -> &[f64] {
        self.eigen.column(k)
    }

    /// `sum_k Lambda_{nk} Lambda_{mk} f(mu_k)`.
    pub fn integrate(&self, n: usize, m: usize, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.size())
            .map(|k| self.lambda(n, k) * self.lambda(m, k) * f(self.eigen.values[k]))
            .sum()
    }
}

/// Diagonalizes `build_j_matrix(size, nu)`.
pub fn gauss_rule(size: usize, nu: f64) -> Result<QuadratureRule> {
    let j = build_j_matrix(size, nu)?;
    let eigen = symmetric_tridiagonal_eigen(&j.diag, &j.off)?;
    Ok(QuadratureRule { nu, eigen })
}
