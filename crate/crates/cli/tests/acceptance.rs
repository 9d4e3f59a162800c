//! Acceptance run. Prints one `PASS` / `FAIL` line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zplane_cli::reference::{run_rows, ReferenceData, RowResult};
use zplane_core::eigen::residual_norm;
use zplane_core::hamiltonian::{potential_matrix_scaled, reference_matrix};
use zplane_core::io::TableMode;
use zplane_core::quadrature::gauss_rule;
use zplane_core::resonance::{detect_crossings, refine_resonance, stability_scan};
use zplane_core::trajectory::sweep;
use zplane_core::{
    eigen_decompose, eigenvalue_derivative, eigenvalues, CMatrix, ChannelConfig, ChannelOperator, EnergyGrid,
    PotentialModel, RefineOptions, StabilityGrid, Trajectory,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn failed(detail: impl Into<String>) -> Self {
        Self::new(false, detail)
    }
}

/// An operator and energy whose assembled matrix was used by a criterion.
struct Assembled {
    label: String,
    cfg: ChannelConfig,
    model: PotentialModel,
    energy: Complex64,
}

#[derive(Default)]
struct Log {
    matrices: Vec<Assembled>,
}

impl Log {
    fn record(&mut self, label: impl Into<String>, cfg: ChannelConfig, model: &PotentialModel, energy: Complex64) {
        self.matrices.push(Assembled { label: label.into(), cfg, model: model.clone(), energy });
    }
}

fn table_channel() -> ChannelConfig {
    ChannelConfig::new(0, 200, 20.0, 0.7).with_quadrature_size(200)
}

fn rows(log: &mut Log, mode: TableMode) -> Outcome {
    let data = ReferenceData::embedded();
    let results = run_rows(&data, mode, &table_channel(), None);
    let mut worst = (0.0f64, 0.0f64);
    let mut failing = Vec::new();
    for r in &results {
        if let Some(res) = &r.computed {
            let cfg = ChannelConfig { l: r.row.l, ..table_channel() };
            log.record(format!("{} Z={} l={}", r.row.source, r.row.z, r.row.l), cfg, &data.potential, res.energy);
        }
        match r.deltas() {
            Some((de, dg)) => {
                worst.0 = worst.0.max(de / r.tolerance.0);
                worst.1 = worst.1.max(dg / r.tolerance.1);
            }
            None => worst = (f64::INFINITY, f64::INFINITY),
        }
        if !r.passed() {
            failing.push(describe(r));
        }
    }
    let detail = format!(
        "{} rows, worst |dE_r|/tol = {:.2}, worst |dGamma|/tol = {:.2}{}",
        results.len(),
        worst.0,
        worst.1,
        if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(", ")) }
    );
    Outcome::new(failing.is_empty() && !results.is_empty(), detail)
}

fn describe(r: &RowResult) -> String {
    match &r.computed {
        Some(res) => format!("{} Z={} l={} got {:.10}/{:.10}", r.row.source, r.row.z, r.row.l, res.e_r(), res.gamma()),
        None => format!("{} Z={} l={} ({})", r.row.source, r.row.z, r.row.l, r.error.as_deref().unwrap_or("?")),
    }
}

fn criterion_1(log: &mut Log) -> Outcome {
    rows(log, TableMode::Table1)
}

fn criterion_2(log: &mut Log) -> Outcome {
    let cfg = ChannelConfig::default();
    let model = PotentialModel::quadratic_exponential();
    let grid = EnergyGrid::new(0.0, 10.0, 101, -3.0);
    let branches = match sweep(&cfg, &model, &grid) {
        Ok(b) => b,
        Err(e) => return Outcome::failed(format!("sweep: {e}")),
    };
    for e in grid.energies() {
        log.record("sweep Im E = -3", cfg, &model, e);
    }
    let expected = [
        (-8.0, c(1.287274955, -2.971759279)),
        (-4.0, c(3.125581370, -3.023378045)),
        (9.0, c(9.733679948, -2.988524088)),
    ];
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (target, pole) in expected {
        let candidates = detect_crossings(&branches, &[target], 0.5);
        let best = candidates
            .iter()
            .filter_map(|cand| refine_resonance(cand.energy_estimate, target, &cfg, &model, &RefineOptions::default()).ok())
            .filter(|r| r.converged)
            .min_by(|a, b| (a.energy - pole).norm().total_cmp(&(b.energy - pole).norm()));
        match best {
            Some(r) => {
                log.record(format!("Z_t = {target}"), cfg, &model, r.energy);
                let err = (r.energy - pole).norm();
                worst = worst.max(err);
                notes.push(format!("Z_t={target}: {:.9}{:+.9}i", r.energy.re, r.energy.im));
            }
            None => {
                worst = f64::INFINITY;
                notes.push(format!("Z_t={target}: no converged crossing ({} candidates)", candidates.len()));
            }
        }
    }
    Outcome::new(worst <= 1e-7, format!("max |dE| = {worst:.2e}; {}", notes.join(", ")))
}

fn criterion_3(log: &mut Log) -> Outcome {
    let model = PotentialModel::double_gaussian();
    let cfg = ChannelConfig::new(3, 200, 20.0, 0.5);
    let expected = c(7.09172304, -2.00173429);
    let mut detail = Vec::new();
    if let Ok(op) = ChannelOperator::new(cfg, &model) {
        if let Ok(values) = op.matrix_at(expected).and_then(|m| eigenvalues(&m)) {
            let nearest = values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            log.record("l=3 at published energy", cfg, &model, expected);
            detail.push(format!("min |Z| at published E = {nearest:.3e}"));
        }
    }
    match refine_resonance(c(7.1, -2.0), 0.0, &cfg, &model, &RefineOptions::default()) {
        Ok(r) => {
            log.record("l=3 refined", cfg, &model, r.energy);
            let err = (r.energy - expected).norm();
            detail.insert(
                0,
                format!("refined {:.8}{:+.8}i (converged {}), |dE| = {err:.2e}", r.energy.re, r.energy.im, r.converged),
            );
            Outcome::new(r.converged && err <= 1e-5, detail.join("; "))
        }
        Err(e) => {
            detail.insert(0, format!("refinement failed: {e}"));
            Outcome::failed(detail.join("; "))
        }
    }
}

fn criterion_4(log: &mut Log) -> Outcome {
    rows(log, TableMode::Table2Spot)
}

fn criterion_5(log: &mut Log) -> Outcome {
    let model = PotentialModel::quadratic_exponential();
    let cfg = table_channel();
    let opts = RefineOptions::default();
    let first = match refine_resonance(c(3.43, -0.013), 0.0, &cfg, &model, &opts) {
        Ok(r) if r.converged => r,
        Ok(r) => return Outcome::failed(format!("row 1 did not converge: {}", r.energy)),
        Err(e) => return Outcome::failed(format!("row 1: {e}")),
    };
    let grid = StabilityGrid::default();
    let coarse = StabilityGrid { basis_sizes: vec![150], ..grid.clone() };
    let (full, small) = match (
        stability_scan(&first, &grid, &cfg, &model, &opts),
        stability_scan(&first, &coarse, &cfg, &model, &opts),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::failed(format!("scan: {e}")),
    };
    for p in full.grid.iter().chain(&small.grid) {
        let point = ChannelConfig { lambda: p.lambda, theta: p.theta, basis_size: p.n, quadrature_size: None, ..cfg };
        log.record(format!("plateau lambda={} theta={} N={}", p.lambda, p.theta, p.n), point, &model, p.energy);
    }
    let all_converged = full.grid.iter().chain(&small.grid).all(|p| p.converged);
    let shift = full
        .grid
        .iter()
        .zip(&small.grid)
        .map(|(a, b)| (a.energy - b.energy).norm())
        .fold(0.0f64, f64::max);
    Outcome::new(
        all_converged && full.max_deviation <= 1e-8 && shift <= 1e-8,
        format!(
            "N=200 max pairwise |dE| = {:.2e}, N=150 vs N=200 max |dE| = {shift:.2e}, all converged: {all_converged}",
            full.max_deviation
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut worst_off = 0.0f64;
    let mut worst_value = 0.0f64;
    for l in 0..=3u32 {
        for e in [-0.5f64, -0.125] {
            let k = (-2.0 * e).sqrt();
            let cfg = ChannelConfig::new(l, 100, 2.0 * k, 0.0);
            let t = match reference_matrix(&cfg, c(e, 0.0)) {
                Ok(t) => t,
                Err(err) => return Outcome::failed(err.to_string()),
            };
            worst_off = t.off.iter().map(|o| o.norm()).fold(worst_off, f64::max);
            for (n, d) in t.diag.iter().enumerate() {
                let expected = -k * (n as f64 + l as f64 + 1.0);
                worst_value = worst_value.max((d - expected).norm());
            }
        }
    }
    Outcome::new(
        worst_off <= 1e-13 && worst_value <= 1e-13,
        format!("max |off-diagonal| = {worst_off:.2e}, max |Z_n - exact| = {worst_value:.2e}"),
    )
}

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

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Basis function for integer `nu`, orthonormal under `dx / x`.
fn basis(n: usize, nu: usize, x: f64) -> f64 {
    let ln_a = 0.5 * (ln_factorial(n) - ln_factorial(n + nu));
    (ln_a + (nu as f64 + 1.0) / 2.0 * x.ln() - x / 2.0).exp() * laguerre(n, nu as f64, x)
}

fn simpson(f: impl Fn(f64) -> f64, upper: f64, panels: usize) -> f64 {
    let h = upper / panels as f64;
    let mut sum = f(0.0) + f(upper);
    for i in 1..panels {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    sum * h / 3.0
}

fn criterion_7() -> Outcome {
    let size = 50;
    let mut worst_scaled = [0.0f64; 3];
    let mut worst_abs = [0.0f64; 3];
    for nu in [1.0, 3.0, 7.0] {
        let rule = match gauss_rule(size, nu) {
            Ok(r) => r,
            Err(e) => return Outcome::failed(e.to_string()),
        };
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
        for n in 0..size {
            for m in 0..size {
                for p in 0..3 {
                    let err = (rule.integrate(n, m, |x| x.powi(p as i32)) - exact(p, n, m)).abs();
                    // relative to the Cauchy-Schwarz bound sqrt(|X_nn X_mm|) of the entry
                    let scale = (exact(p, n, n) * exact(p, m, m)).abs().sqrt().max(1.0);
                    worst_abs[p] = worst_abs[p].max(err);
                    worst_scaled[p] = worst_scaled[p].max(err / scale);
                }
            }
        }
    }

    let (size, nu, lambda) = (4, 1, 2.5);
    let model = PotentialModel::quadratic_exponential();
    let quad = match gauss_rule(200, nu as f64)
        .and_then(|rule| potential_matrix_scaled(size, c(lambda, 0.0), &model, &rule))
    {
        Ok(q) => q,
        Err(e) => return Outcome::failed(e.to_string()),
    };
    let mut worst_direct = 0.0f64;
    for n in 0..size {
        for m in 0..size {
            let integrand =
                |x: f64| if x == 0.0 { 0.0 } else { basis(n, nu, x) * basis(m, nu, x) * model.eval_real(x / lambda) };
            let direct = -simpson(integrand, 150.0, 300_000) / lambda;
            worst_direct = worst_direct.max((quad[(n, m)] - direct).norm() / direct.abs());
        }
    }
    let pass = worst_scaled.iter().all(|&w| w <= 1e-11) && worst_direct <= 1e-10;
    Outcome::new(
        pass,
        format!(
            "moment errors j=0,1,2: {:.1e}, {:.1e}, {:.1e} (absolute {:.1e}, {:.1e}, {:.1e}); \
             N=4 potential vs direct integration: {worst_direct:.1e} relative",
            worst_scaled[0], worst_scaled[1], worst_scaled[2], worst_abs[0], worst_abs[1], worst_abs[2]
        ),
    )
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    m
}

fn criterion_8(log: &Log) -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut worst_label = String::new();
    for entry in &log.matrices {
        let m = match ChannelOperator::new(entry.cfg, &entry.model).and_then(|op| op.matrix_at(entry.energy)) {
            Ok(m) => m,
            Err(e) => return Outcome::failed(format!("{}: {e}", entry.label)),
        };
        let set = match eigen_decompose(&m) {
            Ok(s) => s,
            Err(e) => return Outcome::failed(format!("{}: {e}", entry.label)),
        };
        let ratio = set.max_residual() / m.frobenius_norm();
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_label.clone_from(&entry.label);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = 1e-6;
    let mut worst_derivative = 0.0f64;
    let mut worst_family_residual = 0.0f64;
    for _ in 0..100 {
        let a = random_symmetric(&mut rng, 20);
        let b = random_symmetric(&mut rng, 20);
        let e = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let at = |e: Complex64| a.add(&b.scaled(e));
        let (set, lo, hi) = match (eigen_decompose(&at(e)), eigenvalues(&at(e - h)), eigenvalues(&at(e + h))) {
            (Ok(s), Ok(l), Ok(u)) => (s, l, u),
            _ => return Outcome::failed("random family eigensolve failed"),
        };
        let nearest = |list: &[Complex64], z: Complex64| {
            *list.iter().min_by(|p, q| (*p - z).norm().total_cmp(&(*q - z).norm())).unwrap()
        };
        let norm = at(e).frobenius_norm();
        for (z, x) in set.values.iter().zip(&set.vectors) {
            let d = match eigenvalue_derivative(&b, x) {
                Ok(d) => d,
                Err(err) => return Outcome::failed(err.to_string()),
            };
            let fd = (nearest(&hi, *z) - nearest(&lo, *z)) / (2.0 * h);
            worst_derivative = worst_derivative.max((d - fd).norm() / d.norm());
            worst_family_residual = worst_family_residual.max(residual_norm(&at(e), *z, x) / norm);
        }
    }
    Outcome::new(
        worst_ratio <= 1e-10 && worst_family_residual <= 1e-10 && worst_derivative <= 1e-6,
        format!(
            "{} assembled matrices, worst residual/|M|_F = {worst_ratio:.1e} ({worst_label}); \
             random families: residual {worst_family_residual:.1e}, derivative vs FD {worst_derivative:.1e}",
            log.matrices.len()
        ),
    )
}

fn sign_changes(branches: &[Trajectory]) -> usize {
    branches
        .iter()
        .flat_map(|b| b.points.windows(2))
        .filter(|w| {
            let (a, b) = (w[0].1.im, w[1].1.im);
            a.abs() > 1e-8 && b.abs() > 1e-8 && a.signum() != b.signum()
        })
        .count()
}

fn criterion_9() -> Outcome {
    let grid = EnergyGrid::new(0.1, 10.0, 100, 0.0);
    match sweep(&ChannelConfig::default(), &PotentialModel::quadratic_exponential(), &grid) {
        Ok(branches) => {
            let n = sign_changes(&branches);
            Outcome::new(n == 0, format!("{n} real-axis crossings over {} branches", branches.len()))
        }
        Err(e) => Outcome::failed(e.to_string()),
    }
}

fn main() -> ExitCode {
    let mut log = Log::default();
    let mut failed = Vec::new();
    let mut report = |k: usize, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k}: {status} ({:.1} s) {}", start.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(k);
        }
    };
    report(1, &mut || criterion_1(&mut log));
    report(2, &mut || criterion_2(&mut log));
    report(3, &mut || criterion_3(&mut log));
    report(4, &mut || criterion_4(&mut log));
    report(5, &mut || criterion_5(&mut log));
    report(6, &mut criterion_6);
    report(7, &mut criterion_7);
    report(8, &mut || criterion_8(&log));
    report(9, &mut criterion_9);
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
