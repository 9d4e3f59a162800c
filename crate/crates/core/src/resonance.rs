//! Resonances as real-axis crossings of charge-plane trajectories.
//!
//! A resonance of charge `Z_t` is a complex energy `E` at which some
//! eigenvalue of the rotated operator equals `Z_t`. Candidates come from sign
//! changes of `Im Z` along a sweep; each is refined by Newton iteration on the
//! selected eigenvalue branch and then re-refined over a grid of `(lambda,
//! theta, N)` to check that the pole is physical rather than an artifact of
//! the discretized continuum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigenvalue_derivative, EigenSolver};
use crate::error::{Error, Result};
use crate::hamiltonian::{ChannelConfig, ChannelOperator};
use crate::potential::PotentialModel;
use crate::trajectory::{sweep_operator, EnergyGrid, Trajectory};

/// `|Im Z|` at or below this is treated as lying on the real axis.
pub const REAL_AXIS_TOLERANCE: f64 = 1e-8;

/// Resonances closer than this in `E` are the same resonance.
pub const DEDUP_TOLERANCE: f64 = 1e-6;

/// `Im E` ladder used when no schedule is given.
pub const DEFAULT_IM_SCHEDULE: [f64; 8] = [-0.025, -0.1, -0.4, -1.6, -3.2, -6.4, -12.8, -25.6];

/// A sign change of `Im Z` along one branch, near a target charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingCandidate {
    pub branch_id: usize,
    pub e_lo: Complex64,
    pub e_hi: Complex64,
    /// Interpolated real-axis crossing `Re Z`.
    pub z_at_crossing: f64,
    pub z_target: f64,
    /// Energy interpolated to the crossing; the starting guess for refinement.
    pub energy_estimate: Complex64,
}

/// Finds real-axis crossings within `window` of each target.
pub fn detect_crossings(trajectories: &[Trajectory], targets: &[f64], window: f64) -> Vec<CrossingCandidate> {
    let mut out = Vec::new();
    for branch in trajectories {
        for pair in branch.points.windows(2) {
            let (e0, z0) = pair[0];
            let (e1, z1) = pair[1];
            if z0.im.abs() <= REAL_AXIS_TOLERANCE || z1.im.abs() <= REAL_AXIS_TOLERANCE {
                continue;
            }
            if z0.im.signum() == z1.im.signum() {
                continue;
            }
            let t = z0.im / (z0.im - z1.im);
            let z_cross = z0.re + t * (z1.re - z0.re);
            let energy_estimate = e0 + (e1 - e0) * t;
            for &target in targets {
                if (z_cross - target).abs() <= window {
                    out.push(CrossingCandidate {
                        branch_id: branch.branch_id,
                        e_lo: e0,
                        e_hi: e1,
                        z_at_crossing: z_cross,
                        z_target: target,
                        energy_estimate,
                    });
                }
            }
        }
    }
    out
}

/// Newton iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub residual_tolerance: f64,
    pub step_tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Two eigenvalues whose distances to the target differ by less than this
    /// make the selection ambiguous.
    pub ambiguity_tolerance: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            residual_tolerance: 1e-10,
            step_tolerance: 1e-13,
            max_iterations: 50,
            max_halvings: 8,
            ambiguity_tolerance: 1e-9,
        }
    }
}

/// A refined pole `E = E_r - i Gamma / 2` at charge `z_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub z_target: f64,
    pub l: u32,
    pub energy: Complex64,
    pub converged: bool,
    pub iterations: usize,
    /// `|Z_sel(E) - z_target|` at the final iterate.
    pub residual: f64,
    pub stability: Option<StabilityReport>,
}

impl Resonance {
    pub fn e_r(&self) -> f64 {
        self.energy.re
    }

    /// `-2 Im E`.
    pub fn gamma(&self) -> f64 {
        -2.0 * self.energy.im
    }
}

/// One re-refinement in a stability scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub lambda: f64,
    pub theta: f64,
    pub n: usize,
    pub energy: Complex64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub grid: Vec<StabilityPoint>,
    /// Largest pairwise `|E_a - E_b|` over converged points.
    pub max_deviation: f64,
    pub plateau: bool,
}

/// Parameter grid for a stability scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityGrid {
    pub lambdas: Vec<f64>,
    pub thetas: Vec<f64>,
    #[serde(rename = "sizes")]
    pub basis_sizes: Vec<usize>,
    #[serde(default = "default_plateau_tolerance")]
    pub tolerance: f64,
}

fn default_plateau_tolerance() -> f64 {
    1e-8
}

impl Default for StabilityGrid {
    fn default() -> Self {
        Self {
            lambdas: vec![10.0, 20.0, 40.0],
            thetas: vec![0.5, 0.7, 0.9],
            basis_sizes: vec![200],
            tolerance: default_plateau_tolerance(),
        }
    }
}

impl StabilityGrid {
    pub fn single(lambda: f64, theta: f64, n: usize) -> Self {
        Self { lambdas: vec![lambda], thetas: vec![theta], basis_sizes: vec![n], tolerance: 1e-8 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.thetas.is_empty() || self.basis_sizes.is_empty() {
            return Err(Error::InvalidGrid("stability grid must be non-empty".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(Error::InvalidGrid("stability tolerance must be non-negative".into()));
        }
        Ok(())
    }

    fn points(&self) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::new();
        for &lambda in &self.lambdas {
            for &theta in &self.thetas {
                for &n in &self.basis_sizes {
                    out.push((lambda, theta, n));
                }
            }
        }
        out
    }
}

/// Eigenvalue nearest `target` at energy `energy`.
fn select(op: &ChannelOperator, energy: Complex64, target: f64, opts: &RefineOptions) -> Result<(Complex64, EigenSolver)> {
    let m = op.matrix_at(energy)?;
    let solver = EigenSolver::new(&m)?;
    let values = solver.eigenvalues().map_err(|e| e.at_energy(energy))?;
    let t = Complex64::new(target, 0.0);
    let mut best = 0;
    let mut second: Option<usize> = None;
    for (i, z) in values.iter().enumerate().skip(1) {
        let d = (z - t).norm();
        if d < (values[best] - t).norm() {
            second = Some(best);
            best = i;
        } else if second.is_none_or(|s| d < (values[s] - t).norm()) {
            second = Some(i);
        }
    }
    if let Some(s) = second {
        let d0 = (values[best] - t).norm();
        let d1 = (values[s] - t).norm();
        if (d1 - d0).abs() <= opts.ambiguity_tolerance && values[best] != values[s] {
            return Err(Error::AmbiguousSelection { target, first: values[best], second: values[s] });
        }
    }
    Ok((values[best], solver))
}

/// Newton refinement on a prepared operator.
pub fn refine_with_operator(
    op: &ChannelOperator,
    guess: Complex64,
    z_target: f64,
    opts: &RefineOptions,
) -> Result<Resonance> {
    let target = Complex64::new(z_target, 0.0);
    let mut energy = guess;
    let (mut z, mut solver) = select(op, energy, z_target, opts)?;
    let mut residual = (z - target).norm();
    let mut previous: Option<(Complex64, Complex64)> = None;
    // At least one step is taken, so a guess that already meets the residual
    // tolerance at other (lambda, theta, N) is still polished there.
    let mut converged = false;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let slope = match eigenvalue_derivative(op.derivative(), &solver.eigenvector(z)) {
            Ok(d) => d,
            Err(Error::QuasiNullVector { .. }) => match previous {
                Some((e_prev, z_prev)) if e_prev != energy => (z - z_prev) / (energy - e_prev),
                _ => {
                    let h = 1e-6 * energy.norm().max(1.0);
                    let (z_h, _) = select(op, energy + h, z_target, opts)?;
                    (z_h - z) / h
                }
            },
            Err(e) => return Err(e),
        };
        if !(slope.re.is_finite() && slope.im.is_finite()) || slope == Complex64::new(0.0, 0.0) {
            converged = residual <= opts.residual_tolerance;
            break;
        }
        let mut step = (target - z) / slope;
        let mut halvings = 0;
        let (e_new, z_new, solver_new, r_new) = loop {
            let e_try = energy + step;
            let (z_try, s_try) = select(op, e_try, z_target, opts)?;
            let r_try = (z_try - target).norm();
            if r_try <= residual || halvings >= opts.max_halvings {
                break (e_try, z_try, s_try, r_try);
            }
            step *= 0.5;
            halvings += 1;
        };
        previous = Some((energy, z));
        energy = e_new;
        z = z_new;
        solver = solver_new;
        residual = r_new;
        converged = residual <= opts.residual_tolerance || step.norm() <= opts.step_tolerance;
    }

    Ok(Resonance {
        z_target,
        l: op.config().l,
        energy,
        converged,
        iterations,
        residual,
        stability: None,
    })
}

/// Refines `guess` to an energy where an eigenvalue equals `z_target`.
pub fn refine_resonance(
    guess: Complex64,
    z_target: f64,
    cfg: &ChannelConfig,
    model: &PotentialModel,
    opts: &RefineOptions,
) -> Result<Resonance> {
    let op = ChannelOperator::new(*cfg, model)?;
    refine_with_operator(&op, guess, z_target, opts)
}

/// Re-refines a converged resonance at every `(lambda, theta, N)` of `grid`.
pub fn stability_scan(
    res: &Resonance,
    grid: &StabilityGrid,
    cfg: &ChannelConfig,
    model: &PotentialModel,
    opts: &RefineOptions,
) -> Result<StabilityReport> {
    grid.validate()?;
    if !res.converged {
        return Err(Error::NotConverged(res.energy));
    }
    let points: Vec<StabilityPoint> = grid
        .points()
        .into_par_iter()
        .map(|(lambda, theta, n)| {
            let point_cfg = ChannelConfig {
                l: res.l,
                basis_size: n,
                lambda,
                theta,
                quadrature_size: cfg.quadrature_size.map(|m| m.max(n)),
            };
            let outcome = ChannelOperator::new(point_cfg, model)
                .and_then(|op| refine_with_operator(&op, res.energy, res.z_target, opts));
            match outcome {
                Ok(r) => StabilityPoint {
                    lambda,
                    theta,
                    n,
                    energy: r.energy,
                    converged: r.converged,
                    failure: (!r.converged).then(|| "did not converge".to_string()),
                },
                Err(e) => StabilityPoint {
                    lambda,
                    theta,
                    n,
                    energy: res.energy,
                    converged: false,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(summarize(points, grid.tolerance))
}

fn summarize(grid: Vec<StabilityPoint>, tolerance: f64) -> StabilityReport {
    let converged: Vec<Complex64> = grid.iter().filter(|p| p.converged).map(|p| p.energy).collect();
    let mut max_deviation = 0.0f64;
    for (i, a) in converged.iter().enumerate() {
        for b in &converged[i + 1..] {
            max_deviation = max_deviation.max((a - b).norm());
        }
    }
    let all_converged = converged.len() == grid.len();
    StabilityReport { grid, max_deviation, plateau: all_converged && max_deviation <= tolerance }
}

/// Settings for [`auto_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub z_targets: Vec<f64>,
    pub im_schedule: Vec<f64>,
    pub re_start: f64,
    pub re_end: f64,
    pub steps: usize,
    pub window: f64,
    /// Stability grid applied to every survivor; `None` skips the scan.
    pub stability: Option<StabilityGrid>,
    pub refine: RefineOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            z_targets: vec![0.0],
            im_schedule: DEFAULT_IM_SCHEDULE.to_vec(),
            re_start: 0.0,
            re_end: 10.0,
            steps: 101,
            window: 0.5,
            stability: Some(StabilityGrid::default()),
            refine: RefineOptions::default(),
        }
    }
}

/// A candidate that did not yield a resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchFailure {
    pub im_part: f64,
    pub candidate: CrossingCandidate,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchOutcome {
    /// Ordered by target charge, then `E_r`.
    pub resonances: Vec<Resonance>,
    pub failures: Vec<SearchFailure>,
}

/// Sweeps each `Im E` of the schedule, refines every crossing near a target
/// and keeps the distinct converged poles with `Im E <= 0`.
pub fn auto_search(cfg: &ChannelConfig, model: &PotentialModel, opts: &SearchOptions) -> Result<SearchOutcome> {
    let mut outcome = SearchOutcome::default();
    if opts.z_targets.is_empty() {
        return Ok(outcome);
    }
    if opts.im_schedule.is_empty() {
        return Err(Error::InvalidGrid("empty Im E schedule".into()));
    }
    if !(opts.window > 0.0) {
        return Err(Error::InvalidGrid("crossing window must be positive".into()));
    }
    if let Some(grid) = &opts.stability {
        grid.validate()?;
    }
    let op = ChannelOperator::new(*cfg, model)?;
    let mut found: Vec<Resonance> = Vec::new();

    for &im_part in &opts.im_schedule {
        let grid = EnergyGrid::new(opts.re_start, opts.re_end, opts.steps, im_part);
        let branches = sweep_operator(&op, &grid)?;
        let candidates = detect_crossings(&branches, &opts.z_targets, opts.window);
        let refined: Vec<(CrossingCandidate, Result<Resonance>)> = candidates
            .into_par_iter()
            .map(|cand| {
                let r = refine_with_operator(&op, cand.energy_estimate, cand.z_target, &opts.refine);
                (cand, r)
            })
            .collect();
        for (candidate, result) in refined {
            let reason = match result {
                Ok(r) if !r.converged => "did not converge".to_string(),
                Ok(r) if r.energy.im > REAL_AXIS_TOLERANCE => {
                    format!("converged to E = {} above the real axis", r.energy)
                }
                Ok(r) => {
                    let duplicate = found.iter().any(|f| {
                        f.z_target == r.z_target && (f.energy - r.energy).norm() < DEDUP_TOLERANCE
                    });
                    if !duplicate {
                        found.push(r);
                    }
                    continue;
                }
                Err(e) => e.to_string(),
            };
            outcome.failures.push(SearchFailure { im_part, candidate, reason });
        }
    }

    if let Some(grid) = &opts.stability {
        let reports: Vec<Result<StabilityReport>> = found
            .par_iter()
            .map(|r| stability_scan(r, grid, cfg, model, &opts.refine))
            .collect();
        for (r, report) in found.iter_mut().zip(reports) {
            r.stability = Some(report?);
        }
    }
    sort_resonances(&mut found);
    outcome.resonances = found;
    Ok(outcome)
}

/// Orders by target charge, then `E_r`, then `Gamma`.
pub fn sort_resonances(list: &mut [Resonance]) {
    list.sort_by(|a, b| {
        a.z_target
            .total_cmp(&b.z_target)
            .then(a.e_r().total_cmp(&b.e_r()))
            .then(a.gamma().total_cmp(&b.gamma()))
    });
}
