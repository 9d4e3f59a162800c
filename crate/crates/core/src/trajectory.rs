//! Eigenvalue trajectories `Z_n(E)` over an energy grid.
//!
//! A sweep runs in two phases: the eigensolves at each grid energy are
//! independent and run in parallel, then the eigenvalue sets are stitched into
//! branches sequentially, so the result does not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::EigenSolver;
use crate::error::{Error, Result};
use crate::hamiltonian::{ChannelConfig, ChannelOperator};
use crate::potential::PotentialModel;

/// Uniform grid in `Re E` (endpoints included) at a fixed `Im E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub re_start: f64,
    pub re_end: f64,
    pub steps: usize,
    #[serde(default)]
    pub im_part: f64,
}

impl EnergyGrid {
    pub fn new(re_start: f64, re_end: f64, steps: usize, im_part: f64) -> Self {
        Self { re_start, re_end, steps, im_part }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.re_start.is_finite() && self.re_end.is_finite() && self.im_part.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if self.re_start >= self.re_end {
            return Err(Error::InvalidGrid(format!(
                "re_start = {} must be below re_end = {}",
                self.re_start, self.re_end
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidGrid(format!("steps = {} must be at least 2", self.steps)));
        }
        Ok(())
    }

    /// Sample `k` of the grid.
    ///
    /// Computed as `start + width * k / (steps - 1)` so that a grid with
    /// `2 * (steps - 1) + 1` samples reproduces these points exactly.
    pub fn energy(&self, k: usize) -> Complex64 {
        let width = self.re_end - self.re_start;
        let re = if k + 1 == self.steps {
            self.re_end
        } else {
            self.re_start + width * k as f64 / (self.steps - 1) as f64
        };
        Complex64::new(re, self.im_part)
    }

    pub fn energies(&self) -> Vec<Complex64> {
        (0..self.steps).map(|k| self.energy(k)).collect()
    }
}

/// One continued eigenvalue branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub branch_id: usize,
    /// `(E, Z)` for every grid sample, in grid order.
    pub points: Vec<(Complex64, Complex64)>,
    /// Sample indices `k` at which the step from `k - 1` exceeded the
    /// matching threshold.
    pub discontinuities: Vec<usize>,
}

impl Trajectory {
    /// Largest `|Im Z|` along the branch; zero for a branch lying on the real axis.
    pub fn max_abs_im(&self) -> f64 {
        self.points.iter().map(|(_, z)| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn charges(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().map(|(_, z)| *z)
    }
}

/// Result of pairing two consecutive eigenvalue sets.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMatch {
    /// `permutation[i]` is the index in `next` continuing `prev[i]`.
    pub permutation: Vec<usize>,
    /// Indices into `prev` whose jump exceeded the threshold.
    pub discontinuities: Vec<usize>,
}

/// Multiple of the median pair distance above which a jump is flagged.
pub const DISCONTINUITY_FACTOR: f64 = 5.0;

/// Greedy global closest-pair assignment of `prev` to `next`.
pub fn match_step(prev: &[Complex64], next: &[Complex64]) -> StepMatch {
    assert_eq!(prev.len(), next.len(), "eigenvalue sets must have equal length");
    let n = prev.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push(((p - q).norm(), i, j));
        }
    }
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut permutation = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut matched = 0;
    let mut distances = vec![0.0; n];
    for (d, i, j) in pairs {
        if matched == n {
            break;
        }
        if permutation[i] == usize::MAX && !taken[j] {
            permutation[i] = j;
            taken[j] = true;
            distances[i] = d;
            matched += 1;
        }
    }

    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if n == 0 {
        0.0
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let threshold = DISCONTINUITY_FACTOR * median;
    let discontinuities = (0..n).filter(|&i| distances[i] > threshold).collect();
    StepMatch { permutation, discontinuities }
}

/// Stitches per-sample eigenvalue sets into branches. Branch ids follow the
/// sorted order of the first sample.
pub fn stitch(energies: &[Complex64], sets: &[Vec<Complex64>]) -> Vec<Trajectory> {
    assert_eq!(energies.len(), sets.len());
    let Some(first) = sets.first() else {
        return Vec::new();
    };
    let mut branches: Vec<Trajectory> = first
        .iter()
        .enumerate()
        .map(|(b, &z)| Trajectory {
            branch_id: b,
            points: vec![(energies[0], z)],
            discontinuities: Vec::new(),
        })
        .collect();
    let mut current: Vec<Complex64> = first.clone();
    for (k, set) in sets.iter().enumerate().skip(1) {
        let step = match_step(&current, set);
        for &b in &step.discontinuities {
            branches[b].discontinuities.push(k);
        }
        for (b, &j) in step.permutation.iter().enumerate() {
            current[b] = set[j];
            branches[b].points.push((energies[k], set[j]));
        }
    }
    branches
}

/// Sorted eigenvalues at each grid energy (parallel over samples).
pub fn eigenvalue_sets(op: &ChannelOperator, energies: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    energies
        .par_iter()
        .map(|&e| {
            op.matrix_at(e)
                .and_then(|m| EigenSolver::new(&m)?.eigenvalues())
                .map_err(|err| err.at_energy(e))
        })
        .collect()
}

/// Sweeps a prepared operator over the grid.
pub fn sweep_operator(op: &ChannelOperator, grid: &EnergyGrid) -> Result<Vec<Trajectory>> {
    grid.validate()?;
    let energies = grid.energies();
    let sets = eigenvalue_sets(op, &energies)?;
    Ok(stitch(&energies, &sets))
}

/// Eigenvalue trajectories of the rotated charge operator over `grid`.
pub fn sweep(cfg: &ChannelConfig, model: &PotentialModel, grid: &EnergyGrid) -> Result<Vec<Trajectory>> {
    grid.validate()?;
    let op = ChannelOperator::new(*cfg, model)?;
    sweep_operator(&op, grid)
}
