//! Analytic radial potentials built from terms `c * r^p * exp(-b (r - s)^q)`.
//!
//! Every admissible term is an entire function of `r`, so the potential can be
//! evaluated on the rotated ray `r e^{i theta}` without branch cuts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `c * r^p * exp(-b (r - s)^q)` (atomic units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialTerm {
    pub c: f64,
    #[serde(default)]
    pub p: u32,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default = "default_q")]
    pub q: u32,
}

fn default_q() -> u32 {
    1
}

impl PotentialTerm {
    pub fn new(c: f64, p: u32, b: f64, s: f64, q: u32) -> Self {
        Self { c, p, b, s, q }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidTerm { index, reason });
        if !(self.c.is_finite() && self.b.is_finite() && self.s.is_finite()) {
            return bad("coefficients must be finite".into());
        }
        if self.q != 1 && self.q != 2 {
            return bad(format!("exponent q = {} is not 1 or 2", self.q));
        }
        if self.b < 0.0 {
            return bad(format!("decay rate b = {} is negative", self.b));
        }
        Ok(())
    }

    #[inline]
    fn eval_unchecked(&self, r: Complex64) -> Complex64 {
        let mut power = Complex64::new(1.0, 0.0);
        for _ in 0..self.p {
            power *= r;
        }
        let shifted = r - self.s;
        let arg = if self.q == 1 { shifted } else { shifted * shifted };
        power * (-self.b * arg).exp() * self.c
    }
}

/// Sum of [`PotentialTerm`]s; an empty model is `V = 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialModel {
    #[serde(default)]
    pub terms: Vec<PotentialTerm>,
}

impl PotentialModel {
    /// Builds a model, rejecting inadmissible terms.
    pub fn new(terms: Vec<PotentialTerm>) -> Result<Self> {
        let model = Self { terms };
        model.validate()?;
        Ok(model)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `7.5 r^2 e^{-r}`.
    pub fn quadratic_exponential() -> Self {
        Self { terms: vec![PotentialTerm::new(7.5, 2, 1.0, 0.0, 1)] }
    }

    /// `5 e^{-(r - 1/2)^2 / 4} - 8 e^{-r^2 / 5}`.
    pub fn double_gaussian() -> Self {
        Self {
            terms: vec![
                PotentialTerm::new(5.0, 0, 0.25, 0.5, 2),
                PotentialTerm::new(-8.0, 0, 0.2, 0.0, 2),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.terms.iter().enumerate().try_for_each(|(i, t)| t.validate(i))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.c == 0.0)
    }

    /// True when some term is Gaussian in `r` (`q = 2`).
    pub fn has_gaussian(&self) -> bool {
        self.terms.iter().any(|t| t.q == 2 && t.b > 0.0 && t.c != 0.0)
    }

    /// Evaluates `V(r)` at a complex radius.
    pub fn eval(&self, r: Complex64) -> Result<Complex64> {
        if !(r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::NonFinite(format!("potential evaluated at r = {r}")));
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: Complex64) -> Complex64 {
        self.terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, t| acc + t.eval_unchecked(r))
    }

    /// Evaluates `V(r)` for real `r` in real arithmetic.
    pub fn eval_real(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let shifted = r - t.s;
                let arg = if t.q == 1 { shifted } else { shifted * shifted };
                t.c * r.powi(t.p as i32) * (-t.b * arg).exp()
            })
            .sum()
    }
}

/// Parses a `terms = [...]` configuration fragment into a validated model.
pub fn parse_potential(text: &str) -> Result<PotentialModel> {
    let model: PotentialModel =
        toml::from_str(text).map_err(|e| Error::Config(format!("potential: {e}")))?;
    model.validate()?;
    Ok(model)
}
