//! Assembly of the complex-scaled charge operator.
//!
//! Multiplying the radial equation by `-r` turns the Coulomb strength `Z` into
//! an eigenvalue: `(H0 + V - Z) chi = 0` with
//! `H0 = (r/2) d^2/dr^2 - l(l+1)/(2r) + r E` and `V = -r V(r)`.
//! In the Laguerre basis with `nu = 2l + 1`, `H0` is tridiagonal and `V` is
//! evaluated by Gauss quadrature. Complex scaling `r -> r e^{i theta}` is the
//! single substitution `lambda -> lambda' = lambda e^{-i theta}` applied to
//! both pieces.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Tridiagonal};
use crate::potential::PotentialModel;
use crate::quadrature::{gauss_rule, QuadratureRule};

/// Angular momentum, basis size, scale and rotation angle for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub l: u32,
    #[serde(rename = "n")]
    pub basis_size: usize,
    pub lambda: f64,
    pub theta: f64,
    /// Quadrature size; defaults to the basis size.
    #[serde(rename = "m", default, skip_serializing_if = "Option::is_none")]
    pub quadrature_size: Option<usize>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self { l: 0, basis_size: 200, lambda: 20.0, theta: 0.7, quadrature_size: None }
    }
}

impl ChannelConfig {
    pub fn new(l: u32, basis_size: usize, lambda: f64, theta: f64) -> Self {
        Self { l, basis_size, lambda, theta, quadrature_size: None }
    }

    pub fn with_quadrature_size(mut self, m: usize) -> Self {
        self.quadrature_size = Some(m);
        self
    }

    /// `nu = 2l + 1`.
    pub fn nu(&self) -> f64 {
        2.0 * self.l as f64 + 1.0
    }

    pub fn quadrature_size(&self) -> usize {
        self.quadrature_size.unwrap_or(self.basis_size)
    }

    /// `lambda e^{-i theta}`.
    pub fn complex_scale(&self) -> Complex64 {
        Complex64::from_polar(self.lambda, -self.theta)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidChannel(msg));
        if self.basis_size == 0 {
            return bad("basis size must be at least 1".into());
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda = {} must be positive", self.lambda));
        }
        if !(self.theta.is_finite() && (0.0..FRAC_PI_2).contains(&self.theta)) {
            return bad(format!("theta = {} must lie in [0, pi/2)", self.theta));
        }
        if self.quadrature_size() < self.basis_size {
            return bad(format!(
                "quadrature size {} is smaller than basis size {}",
                self.quadrature_size(),
                self.basis_size
            ));
        }
        Ok(())
    }
}

fn sqrt_coupling(n: usize, nu: f64) -> f64 {
    // J_{n,n+1} magnitude: sqrt((n + 1)(n + nu + 1)).
    let n = n as f64;
    ((n + 1.0) * (n + nu + 1.0)).sqrt()
}

/// Reference operator at an arbitrary complex scale `lambda'`.
pub fn reference_matrix_scaled(l: u32, size: usize, scale: Complex64, energy: Complex64) -> Tridiagonal {
    let nu = 2.0 * l as f64 + 1.0;
    let ratio = energy / (scale * scale);
    let diag_coef = scale * (ratio - 0.125);
    let off_coef = -scale * (ratio + 0.125);
    Tridiagonal {
        diag: (0..size).map(|n| diag_coef * (2.0 * n as f64 + nu + 1.0)).collect(),
        off: (0..size.saturating_sub(1)).map(|n| off_coef * sqrt_coupling(n, nu)).collect(),
    }
}

/// Rotated reference operator `H0` at energy `energy`.
pub fn reference_matrix(cfg: &ChannelConfig, energy: Complex64) -> Result<Tridiagonal> {
    cfg.validate()?;
    Ok(reference_matrix_scaled(cfg.l, cfg.basis_size, cfg.complex_scale(), energy))
}

/// `dH/dE = J / lambda'` at an arbitrary complex scale.
pub fn energy_derivative_scaled(l: u32, size: usize, scale: Complex64) -> Tridiagonal {
    let nu = 2.0 * l as f64 + 1.0;
    let inv = scale.inv();
    Tridiagonal {
        diag: (0..size).map(|n| inv * (2.0 * n as f64 + nu + 1.0)).collect(),
        off: (0..size.saturating_sub(1)).map(|n| -inv * sqrt_coupling(n, nu)).collect(),
    }
}

/// Energy derivative of the rotated operator; independent of `E`.
pub fn energy_derivative_matrix(cfg: &ChannelConfig) -> Result<Tridiagonal> {
    cfg.validate()?;
    Ok(energy_derivative_scaled(cfg.l, cfg.basis_size, cfg.complex_scale()))
}

/// Potential operator `-r V(r)` at an arbitrary complex scale.
pub fn potential_matrix_scaled(
    size: usize,
    scale: Complex64,
    model: &PotentialModel,
    rule: &QuadratureRule,
) -> Result<CMatrix> {
    if rule.size() < size {
        return Err(Error::RuleMismatch(format!(
            "quadrature size {} is smaller than basis size {size}",
            rule.size()
        )));
    }
    if model.is_zero() {
        return Ok(CMatrix::zeros(size));
    }
    let inv = scale.inv();
    // w_k = -(1/lambda') mu_k V(mu_k / lambda')
    let weights: Vec<Complex64> = rule
        .nodes()
        .iter()
        .map(|&mu| -inv * mu * model.eval_unchecked(inv * mu))
        .collect();
    if weights.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
        return Err(Error::NonFinite(
            "potential overflows on the rotated ray; reduce theta".into(),
        ));
    }
    let nodes = rule.size();
    // rows[n * nodes + k] = Lambda_{nk}
    let mut rows = vec![0.0; size * nodes];
    for k in 0..nodes {
        let column = rule.column(k);
        for n in 0..size {
            rows[n * nodes + k] = column[n];
        }
    }
    let mut out = CMatrix::zeros(size);
    let mut weighted = vec![Complex64::new(0.0, 0.0); nodes];
    for n in 0..size {
        let row_n = &rows[n * nodes..(n + 1) * nodes];
        for ((a, w), l) in weighted.iter_mut().zip(&weights).zip(row_n) {
            *a = w * l;
        }
        for m in n..size {
            let row_m = &rows[m * nodes..(m + 1) * nodes];
            let acc = weighted
                .iter()
                .zip(row_m)
                .fold(Complex64::new(0.0, 0.0), |acc, (a, l)| acc + a * l);
            out[(n, m)] = acc;
            out[(m, n)] = acc;
        }
    }
    Ok(out)
}

fn check_rule(cfg: &ChannelConfig, rule: &QuadratureRule) -> Result<()> {
    if rule.nu() != cfg.nu() {
        return Err(Error::RuleMismatch(format!(
            "rule has nu = {}, channel needs nu = {}",
            rule.nu(),
            cfg.nu()
        )));
    }
    if rule.size() < cfg.basis_size {
        return Err(Error::RuleMismatch(format!(
            "rule size {} is smaller than basis size {}",
            rule.size(),
            cfg.basis_size
        )));
    }
    Ok(())
}

/// Rejects rotation angles at which a Gaussian term grows along the rotated ray.
pub fn check_gaussian_angle(cfg: &ChannelConfig, model: &PotentialModel) -> Result<()> {
    if model.has_gaussian() && cfg.theta >= std::f64::consts::FRAC_PI_4 {
        return Err(Error::InvalidChannel(format!(
            "theta = {} is at or above pi/4; Gaussian terms diverge on the rotated ray",
            cfg.theta
        )));
    }
    Ok(())
}

/// Rotated potential operator, dense.
pub fn potential_matrix(
    cfg: &ChannelConfig,
    model: &PotentialModel,
    rule: &QuadratureRule,
) -> Result<CMatrix> {
    cfg.validate()?;
    check_rule(cfg, rule)?;
    check_gaussian_angle(cfg, model)?;
    potential_matrix_scaled(cfg.basis_size, cfg.complex_scale(), model, rule)
}

/// `H0 + V` at energy `energy`.
pub fn full_matrix(
    cfg: &ChannelConfig,
    model: &PotentialModel,
    rule: &QuadratureRule,
    energy: Complex64,
) -> Result<CMatrix> {
    let mut m = potential_matrix(cfg, model, rule)?;
    add_tridiagonal(&mut m, &reference_matrix(cfg, energy)?);
    Ok(m)
}

fn add_tridiagonal(m: &mut CMatrix, t: &Tridiagonal) {
    for (i, d) in t.diag.iter().enumerate() {
        m[(i, i)] += d;
    }
    for (i, o) in t.off.iter().enumerate() {
        m[(i, i + 1)] += o;
        m[(i + 1, i)] += o;
    }
}

/// The charge operator for one channel and potential, with the
/// energy-independent pieces assembled once.
#[derive(Debug, Clone)]
pub struct ChannelOperator {
    cfg: ChannelConfig,
    potential: CMatrix,
    derivative: Tridiagonal,
}

impl ChannelOperator {
    pub fn new(cfg: ChannelConfig, model: &PotentialModel) -> Result<Self> {
        cfg.validate()?;
        model.validate()?;
        check_gaussian_angle(&cfg, model)?;
        let rule = gauss_rule(cfg.quadrature_size(), cfg.nu())?;
        Self::with_rule(cfg, model, &rule)
    }

    /// Uses a precomputed quadrature rule.
    pub fn with_rule(cfg: ChannelConfig, model: &PotentialModel, rule: &QuadratureRule) -> Result<Self> {
        let potential = potential_matrix(&cfg, model, rule)?;
        let derivative = energy_derivative_scaled(cfg.l, cfg.basis_size, cfg.complex_scale());
        Ok(Self { cfg, potential, derivative })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.cfg
    }

    pub fn potential(&self) -> &CMatrix {
        &self.potential
    }

    /// `dH/dE`.
    pub fn derivative(&self) -> &Tridiagonal {
        &self.derivative
    }

    /// Full operator at `energy`.
    pub fn matrix_at(&self, energy: Complex64) -> Result<CMatrix> {
        if !(energy.re.is_finite() && energy.im.is_finite()) {
            return Err(Error::NonFinite(format!("energy {energy}")));
        }
        let mut m = self.potential.clone();
        let reference =
            reference_matrix_scaled(self.cfg.l, self.cfg.basis_size, self.cfg.complex_scale(), energy);
        add_tridiagonal(&mut m, &reference);
        Ok(m)
    }
}
