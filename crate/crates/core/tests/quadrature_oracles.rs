//! Quadrature checked against explicit Laguerre polynomials.

use num_complex::Complex64;
use zplane_core::hamiltonian::potential_matrix_scaled;
use zplane_core::quadrature::gauss_rule;
use zplane_core::PotentialModel;

/// `L_n^nu(x)` by the three-term recurrence.
fn laguerre(n: usize, nu: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + nu - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + nu - x) * cur - (k + nu) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn ln_gamma_int(n: usize) -> f64 {
    (1..n).map(|k| (k as f64).ln()).sum()
}

/// Basis function for integer `nu`, orthonormal under `dx / x`.
fn basis(n: usize, nu: usize, x: f64) -> f64 {
    let ln_a = 0.5 * (ln_gamma_int(n + 1) - ln_gamma_int(n + nu + 1));
    let alpha = (nu as f64 + 1.0) / 2.0;
    (ln_a + alpha * x.ln() - x / 2.0).exp() * laguerre(n, nu as f64, x)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[test]
fn nodes_are_laguerre_zeros() {
    for nu in [1.0, 3.0, 7.0, 0.5] {
        for m in 1..=5usize {
            let rule = gauss_rule(m, nu).unwrap();
            let f = |x: f64| laguerre(m, nu, x);
            let upper = 4.0 * m as f64 + 2.0 * nu + 10.0;
            let samples = 20_000;
            let mut roots = Vec::new();
            for i in 0..samples {
                let a = upper * i as f64 / samples as f64;
                let b = upper * (i + 1) as f64 / samples as f64;
                if f(a).signum() != f(b).signum() {
                    roots.push(bisect(f, a, b));
                }
            }
            assert_eq!(roots.len(), m, "nu = {nu}, M = {m}");
            for (got, want) in rule.nodes().iter().zip(&roots) {
                assert!((got - want).abs() <= 1e-12 * want.max(1.0), "nu = {nu}, M = {m}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn moments_up_to_two_are_exact() {
    for nu in [1.0, 3.0, 7.0] {
        let size = 50;
        let rule = gauss_rule(size, nu).unwrap();
        let j = |a: usize, b: usize| -> f64 {
            if a == b {
                2.0 * a as f64 + nu + 1.0
            } else if a.abs_diff(b) == 1 {
                let n = a.min(b) as f64;
                -((n + 1.0) * (n + nu + 1.0)).sqrt()
            } else {
                0.0
            }
        };
        let j2 = |a: usize, b: usize| (0..size).map(|k| j(a, k) * j(k, b)).sum::<f64>();
        let exact = |p: usize, a: usize, b: usize| match p {
            0 => f64::from(u8::from(a == b)),
            1 => j(a, b),
            _ => j2(a, b),
        };
        // Errors are measured against the Cauchy-Schwarz bound of each entry,
        // sqrt(|X_nn X_mm|); an exact zero surrounded by entries of order
        // mu_max^2 cannot be resolved better than rounding allows.
        let mut worst = [0.0f64; 3];
        for n in 0..size {
            for m in 0..size {
                for (p, w) in worst.iter_mut().enumerate() {
                    let got = rule.integrate(n, m, |x| x.powi(p as i32));
                    let scale = (exact(p, n, n) * exact(p, m, m)).abs().sqrt().max(1.0);
                    *w = w.max((got - exact(p, n, m)).abs() / scale);
                }
            }
        }
        for (p, w) in worst.iter().enumerate() {
            assert!(*w <= 1e-11, "nu = {nu}, j = {p}: error {w:e}");
        }
    }
}

/// Composite Simpson on `[0, upper]`.
fn simpson(f: impl Fn(f64) -> f64, upper: f64, panels: usize) -> f64 {
    let h = upper / panels as f64;
    let mut sum = f(0.0) + f(upper);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn potential_matrix_matches_direct_integration() {
    let size = 4;
    let nu = 1;
    let lambda = 2.5;
    let model = PotentialModel::quadratic_exponential();
    let rule = gauss_rule(200, nu as f64).unwrap();
    let scale = Complex64::new(lambda, 0.0);
    let quad = potential_matrix_scaled(size, scale, &model, &rule).unwrap();
    for n in 0..size {
        for m in 0..size {
            let integrand = |x: f64| {
                if x == 0.0 {
                    return 0.0;
                }
                basis(n, nu, x) * basis(m, nu, x) * model.eval_real(x / lambda)
            };
            let direct = -simpson(integrand, 150.0, 300_000) / lambda;
            let got = quad[(n, m)];
            assert!(got.im.abs() < 1e-15);
            let rel = (got.re - direct).abs() / direct.abs();
            assert!(rel < 1e-10, "({n}, {m}): {} vs {direct}, rel {rel:e}", got.re);
        }
    }
}
