//! Dense complex eigensolver for the (non-Hermitian) charge operator.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, single-shift complex QR with Wilkinson shifts for the eigenvalues,
//! then inverse iteration on the Hessenberg matrix for each requested
//! eigenvector, back-transformed to the original coordinates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Tridiagonal};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_QR_SWEEPS_PER_EIGENVALUE: usize = 60;
const EXCEPTIONAL_SHIFT: f64 = 0.75;

#[inline]
fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Orders eigenvalues by real part, then imaginary part.
pub fn sort_key_cmp(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues, unit right eigenvectors and their residuals.
#[derive(Debug, Clone)]
pub struct EigenSet {
    pub values: Vec<Complex64>,
    /// `vectors[n]` pairs with `values[n]`.
    pub vectors: Vec<Vec<Complex64>>,
    /// `|| M x_n - Z_n x_n ||_2`.
    pub residual_norms: Vec<f64>,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }
}

/// Balanced Hessenberg form of a matrix, `A = D Q H Q^H D^{-1}`.
#[derive(Debug, Clone)]
pub struct EigenSolver {
    n: usize,
    /// Row-major upper Hessenberg matrix.
    hess: Vec<Complex64>,
    /// Householder vectors `v_k` (unit norm) for `I - 2 v v^H`, acting on rows `k + 1..n`.
    reflectors: Vec<Vec<Complex64>>,
    scale: Vec<f64>,
    norm: f64,
}

impl EigenSolver {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let n = m.order();
        if n == 0 {
            return Err(Error::InvalidChannel("matrix of order zero".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix has non-finite entries".into()));
        }
        let mut a = m.as_slice().to_vec();
        let scale = balance(n, &mut a);
        let reflectors = reduce_to_hessenberg(n, &mut a);
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self { n, hess: a, reflectors, scale, norm })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// All eigenvalues, sorted by real then imaginary part.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut values = hessenberg_qr(self.n, self.hess.clone())?;
        values.sort_by(sort_key_cmp);
        Ok(values)
    }

    /// Unit right eigenvector for the eigenvalue `z`, with its largest
    /// component made real and positive.
    pub fn eigenvector(&self, z: Complex64) -> Vec<Complex64> {
        let y = self.inverse_iteration(z);
        self.back_transform(y)
    }

    fn inverse_iteration(&self, z: Complex64) -> Vec<Complex64> {
        let n = self.n;
        let tiny = f64::EPSILON * self.norm.max(f64::MIN_POSITIVE);
        // LU of the Hessenberg H - zI with adjacent-row partial pivoting.
        let mut lu = self.hess.clone();
        for i in 0..n {
            lu[i * n + i] -= z;
        }
        let mut swapped = vec![false; n];
        let mut mult = vec![ZERO; n];
        for k in 0..n {
            if k + 1 < n && abs1(lu[(k + 1) * n + k]) > abs1(lu[k * n + k]) {
                for j in k..n {
                    lu.swap(k * n + j, (k + 1) * n + j);
                }
                swapped[k] = true;
            }
            if lu[k * n + k] == ZERO {
                lu[k * n + k] = Complex64::new(tiny, 0.0);
            }
            if k + 1 < n {
                let f = lu[(k + 1) * n + k] / lu[k * n + k];
                mult[k] = f;
                lu[(k + 1) * n + k] = ZERO;
                if f != ZERO {
                    for j in (k + 1)..n {
                        let u = lu[k * n + j];
                        lu[(k + 1) * n + j] -= f * u;
                    }
                }
            }
        }
        let back_solve = |x: &mut [Complex64]| {
            for i in (0..n).rev() {
                let mut s = x[i];
                for j in (i + 1)..n {
                    s -= lu[i * n + j] * x[j];
                }
                x[i] = s / lu[i * n + i];
            }
        };
        let forward = |x: &mut [Complex64]| {
            for k in 0..n.saturating_sub(1) {
                if swapped[k] {
                    x.swap(k, k + 1);
                }
                let xk = x[k];
                x[k + 1] -= mult[k] * xk;
            }
        };
        let normalize = |x: &mut [Complex64]| {
            let s = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 && s.is_finite() {
                x.iter_mut().for_each(|v| *v /= s);
            } else {
                x.iter_mut().for_each(|v| *v = ONE);
            }
        };
        // First pass solves U x = 1 directly; later passes use the full LU.
        // For strongly non-normal H the first pass is often the best
        // pseudo-eigenvector of z and further passes drift towards the exact
        // eigenvector of a nearby eigenvalue, so the smallest residual wins.
        let mut x = vec![ONE; n];
        back_solve(&mut x);
        normalize(&mut x);
        let mut best_residual = self.hessenberg_residual(z, &x);
        let mut best = x.clone();
        for _ in 0..2 {
            forward(&mut x);
            back_solve(&mut x);
            normalize(&mut x);
            let r = self.hessenberg_residual(z, &x);
            if r < best_residual {
                best_residual = r;
                best.copy_from_slice(&x);
            }
        }
        best
    }

    fn hessenberg_residual(&self, z: Complex64, x: &[Complex64]) -> f64 {
        let n = self.n;
        let mut sum = 0.0;
        for i in 0..n {
            let row = &self.hess[i * n..(i + 1) * n];
            let mut acc = -z * x[i];
            for j in i.saturating_sub(1)..n {
                acc += row[j] * x[j];
            }
            sum += acc.norm_sqr();
        }
        if sum.is_finite() {
            sum.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn back_transform(&self, mut y: Vec<Complex64>) -> Vec<Complex64> {
        let n = self.n;
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut y[k + 1..n];
            let s: Complex64 = v.iter().zip(tail.iter()).map(|(vi, yi)| vi.conj() * yi).sum();
            let s2 = s * 2.0;
            for (yi, vi) in tail.iter_mut().zip(v) {
                *yi -= vi * s2;
            }
        }
        for (yi, d) in y.iter_mut().zip(&self.scale) {
            *yi *= *d;
        }
        fix_phase(&mut y);
        y
    }
}

/// Unit norm, largest-magnitude component real positive.
fn fix_phase(x: &mut [Complex64]) {
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, v) in x.iter().enumerate() {
        let m = v.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if norm == 0.0 || !norm.is_finite() {
        return;
    }
    let phase = x[best].conj() / x[best].norm();
    for v in x.iter_mut() {
        *v = *v * phase / norm;
    }
    x[best] = Complex64::new(x[best].re, 0.0);
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Returns the scale `D` with `B = D^{-1} A D`.
fn balance(n: usize, a: &mut [Complex64]) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let mut scale = vec![1.0; n];
    if n < 2 {
        return scale;
    }
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[j * n + i]);
                    r += abs1(a[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                scale[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= inv;
                    a[j * n + i] *= f;
                }
            }
        }
        if converged {
            return scale;
        }
    }
}

/// In-place Householder reduction; returns the reflector vectors.
fn reduce_to_hessenberg(n: usize, a: &mut [Complex64]) -> Vec<Vec<Complex64>> {
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut s = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = ((k + 1)..n).map(|i| a[i * n + k]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            reflectors.push(vec![ZERO; n - k - 1]);
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(vec![ZERO; n - k - 1]);
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vnorm);

        // Left: A[k+1.., k..] -= 2 v (v^H A)
        s[k..n].iter_mut().for_each(|z| *z = ZERO);
        for (vi, i) in v.iter().zip((k + 1)..n) {
            let cv = vi.conj();
            let row = &a[i * n..(i + 1) * n];
            for j in k..n {
                s[j] += cv * row[j];
            }
        }
        for (vi, i) in v.iter().zip((k + 1)..n) {
            let f = vi * 2.0;
            let row = &mut a[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= f * s[j];
            }
        }
        // Right: A[.., k+1..] -= 2 (A v) v^H
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let t: Complex64 = row[k + 1..].iter().zip(&v).map(|(x, vi)| x * vi).sum();
            let t2 = t * 2.0;
            for (x, vi) in row[k + 1..].iter_mut().zip(&v) {
                *x -= t2 * vi.conj();
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in (k + 2)..n {
            a[i * n + k] = ZERO;
        }
        reflectors.push(v);
    }
    reflectors
}

/// Givens rotation `[[c, s], [-conj(s), c]]` annihilating `b` in `(a, b)`.
#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, ONE);
    }
    let nu = na.hypot(nb);
    let c = na / nu;
    let s = (a / na) * b.conj() / nu;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let r1 = mean + disc;
    let r2 = mean - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR.
fn hessenberg_qr(n: usize, mut h: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let mut values = Vec::with_capacity(n);
    let norm_total: f64 = h.iter().map(|z| abs1(*z)).sum();
    let mut shifts: Vec<Complex64> = Vec::new();
    let mut rot_c = vec![0.0; n];
    let mut rot_s = vec![ZERO; n];
    let mut hi = n as isize - 1;
    let mut its = 0;
    while hi >= 0 {
        let hiu = hi as usize;
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hiu;
        while lo > 0 {
            let sub = abs1(h[lo * n + lo - 1]);
            let mut diag = abs1(h[(lo - 1) * n + lo - 1]) + abs1(h[lo * n + lo]);
            if diag == 0.0 {
                diag = norm_total;
            }
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[lo * n + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hiu {
            values.push(h[hiu * n + hiu]);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > MAX_QR_SWEEPS_PER_EIGENVALUE {
            let tail = shifts.len().saturating_sub(8);
            return Err(Error::NoConvergence { order: n, shifts: shifts[tail..].to_vec() });
        }
        let shift = if its % 10 == 0 {
            let s = EXCEPTIONAL_SHIFT * h[hiu * n + hiu - 1].re.abs();
            h[hiu * n + hiu] + s
        } else {
            wilkinson_shift(
                h[(hiu - 1) * n + hiu - 1],
                h[(hiu - 1) * n + hiu],
                h[hiu * n + hiu - 1],
                h[hiu * n + hiu],
            )
        };
        shifts.push(shift);

        for k in lo..=hiu {
            h[k * n + k] -= shift;
        }
        // H - sI = QR, rows rotated in place.
        for k in lo..hiu {
            let (c, s) = givens(h[k * n + k], h[(k + 1) * n + k]);
            rot_c[k] = c;
            rot_s[k] = s;
            for j in k..=hiu {
                let x = h[k * n + j];
                let y = h[(k + 1) * n + j];
                h[k * n + j] = x * c + s * y;
                h[(k + 1) * n + j] = -s.conj() * x + y * c;
            }
        }
        // RQ + sI.
        for k in lo..hiu {
            let c = rot_c[k];
            let s = rot_s[k];
            let sc = s.conj();
            for i in lo..=(k + 1) {
                let x = h[i * n + k];
                let y = h[i * n + k + 1];
                h[i * n + k] = x * c + y * sc;
                h[i * n + k + 1] = -x * s + y * c;
            }
        }
        for k in lo..=hiu {
            h[k * n + k] += shift;
        }
    }
    Ok(values)
}

/// Eigenvalues only, sorted by real then imaginary part.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    EigenSolver::new(m)?.eigenvalues()
}

/// Full eigendecomposition with residual norms against `m`.
pub fn eigen_decompose(m: &CMatrix) -> Result<EigenSet> {
    let solver = EigenSolver::new(m)?;
    let values = solver.eigenvalues()?;
    let vectors: Vec<Vec<Complex64>> = values.iter().map(|&z| solver.eigenvector(z)).collect();
    let residual_norms = values
        .iter()
        .zip(&vectors)
        .map(|(&z, x)| residual_norm(m, z, x))
        .collect();
    Ok(EigenSet { values, vectors, residual_norms })
}

/// `|| M x - z x ||_2`.
pub fn residual_norm(m: &CMatrix, z: Complex64, x: &[Complex64]) -> f64 {
    m.mul_vec(x)
        .iter()
        .zip(x)
        .map(|(mx, xi)| (mx - z * xi).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// A matrix usable in the bilinear form `x^T A y`.
pub trait BilinearForm {
    fn bilinear(&self, x: &[Complex64], y: &[Complex64]) -> Complex64;
}

impl BilinearForm for Tridiagonal {
    fn bilinear(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        Tridiagonal::bilinear(self, x, y)
    }
}

impl BilinearForm for CMatrix {
    fn bilinear(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }
}

/// First-order eigenvalue derivative `x^T M' x / x^T x` for a complex
/// symmetric family, whose left eigenvectors are the transposed right ones.
pub fn eigenvalue_derivative<M: BilinearForm + ?Sized>(m_prime: &M, x: &[Complex64]) -> Result<Complex64> {
    let xx: Complex64 = x.iter().map(|v| v * v).sum();
    let norm_sq: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    if xx.norm() < 1e-8 * norm_sq {
        return Err(Error::QuasiNullVector { bilinear: xx.norm() });
    }
    Ok(m_prime.bilinear(x, x) / xx)
}
