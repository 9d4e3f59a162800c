//! Command implementations behind the `zplane` binary.
//!
//! Every command reads one TOML run configuration, prints its primary result
//! on stdout and, when an output directory is given, writes the same result
//! to a file there. Exit codes: 0 success, 1 tolerance failure, 2
//! configuration error, 3 solver failure.

pub mod reference;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use zplane_core::io::{
    render_trajectories_svg, resonances_to_json, trajectories_csv_string, PlotWindow, RunConfig,
};
use zplane_core::resonance::{auto_search, refine_resonance, stability_scan, sort_resonances};
use zplane_core::trajectory::sweep;
use zplane_core::{eigenvalues, ChannelOperator, RefineOptions, Resonance, StabilityGrid};

use reference::{format_table, run_rows, ReferenceData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("tolerance failure:\n{0}")]
    Tolerance(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Tolerance(_) => EXIT_TOLERANCE,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<zplane_core::Error> for Failure {
    fn from(e: zplane_core::Error) -> Self {
        if e.is_solver_failure() || matches!(e, zplane_core::Error::NotConverged(_)) {
            Failure::Solver(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eigs,
    Sweep,
    Find,
    Scan,
    Stability,
    Table,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub svg: bool,
}

/// Loads the configuration and runs `command`, writing the primary result to
/// `stdout`.
pub fn run(command: Command, config: &Path, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = RunConfig::load(config)?;
    run_config(command, &cfg, opts, stdout)
}

pub fn run_config(command: Command, cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    if let Some(dir) = &opts.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    }
    match command {
        Command::Eigs => cmd_eigs(cfg, opts, stdout),
        Command::Sweep => cmd_sweep(cfg, opts, stdout),
        Command::Find => cmd_find(cfg, opts, stdout),
        Command::Scan => cmd_scan(cfg, opts, stdout),
        Command::Stability => cmd_stability(cfg, opts, stdout),
        Command::Table => cmd_table(cfg, opts, stdout),
    }
}

fn emit(opts: &Options, name: &str, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    stdout.write_all(text.as_bytes()).map_err(|e| Failure::Config(format!("stdout: {e}")))?;
    write_file(opts, name, text)
}

fn write_file(opts: &Options, name: &str, text: &str) -> Result<(), Failure> {
    if let Some(dir) = &opts.out {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Sorted eigenvalues at `[energy]`, one `re im` pair per line.
pub fn cmd_eigs(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let energy = cfg.require_energy()?;
    let op = ChannelOperator::new(cfg.channel, &cfg.potential)?;
    let values = eigenvalues(&op.matrix_at(energy)?).map_err(|e| Failure::from(e.at_energy(energy)))?;
    let mut text = String::new();
    for z in values {
        text.push_str(&format!("{:?} {:?}\n", z.re, z.im));
    }
    emit(opts, "eigenvalues.txt", &text, stdout)
}

/// Trajectory CSV over `[sweep]`, plus an SVG plot when requested.
pub fn cmd_sweep(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let grid = cfg.require_sweep()?;
    let want_svg = opts.svg || cfg.output.as_ref().is_some_and(|o| o.svg);
    if want_svg && opts.out.is_none() {
        return Err(Failure::Config("SVG output needs --out".into()));
    }
    let branches = sweep(&cfg.channel, &cfg.potential, &grid)?;
    emit(opts, "trajectories.csv", &trajectories_csv_string(&branches), stdout)?;
    if want_svg {
        let mut window = PlotWindow::default();
        if let Some(o) = &cfg.output {
            window.re = o.plot_re.unwrap_or(window.re);
            window.im = o.plot_im.unwrap_or(window.im);
        }
        write_file(opts, "trajectories.svg", &render_trajectories_svg(&branches, &window))?;
    }
    Ok(())
}

fn with_stability(mut res: Resonance, cfg: &RunConfig, grid: Option<&StabilityGrid>) -> Result<Resonance, Failure> {
    if let Some(grid) = grid {
        if res.converged {
            let report = stability_scan(&res, grid, &cfg.channel, &cfg.potential, &RefineOptions::default())?;
            res.stability = Some(report);
        }
    }
    Ok(res)
}

/// Newton refinement from `[find]`; stability only when `[stability]` is given.
pub fn cmd_find(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let find = cfg.require_find()?;
    let res = refine_resonance(find.guess(), find.z_target, &cfg.channel, &cfg.potential, &RefineOptions::default())?;
    let res = with_stability(res, cfg, cfg.stability.as_ref())?;
    emit(opts, "resonances.json", &resonances_to_json(&[res]), stdout)
}

/// Automatic search over `[scan]`; every survivor gets a stability scan.
pub fn cmd_scan(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let scan = cfg.require_scan()?;
    let grid = cfg.stability.clone().unwrap_or_default();
    let outcome = auto_search(&cfg.channel, &cfg.potential, &scan.search_options(Some(grid)))?;
    let mut found = outcome.resonances;
    sort_resonances(&mut found);
    emit(opts, "resonances.json", &resonances_to_json(&found), stdout)
}

/// Refinement from `[find]` followed by a stability scan (default grid unless
/// `[stability]` is given).
pub fn cmd_stability(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let find = cfg.require_find()?;
    let res = refine_resonance(find.guess(), find.z_target, &cfg.channel, &cfg.potential, &RefineOptions::default())?;
    let grid = cfg.stability.clone().unwrap_or_default();
    let res = with_stability(res, cfg, Some(&grid))?;
    emit(opts, "resonances.json", &resonances_to_json(&[res]), stdout)
}

/// Refines the embedded reference rows and compares.
pub fn cmd_table(cfg: &RunConfig, opts: &Options, stdout: &mut dyn Write) -> Result<(), Failure> {
    let section = cfg.table.unwrap_or_default();
    let data = ReferenceData::embedded();
    let results = run_rows(&data, section.mode, &cfg.channel, section.tolerance);
    let mut text = format_table(&results);
    text.push_str(&format!("reference: {}\n", data.citation));
    emit(opts, "table.txt", &text, stdout)?;
    let failing: Vec<String> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("  {} (Z = {}, l = {})", r.row.source, r.row.z, r.row.l))
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Tolerance(failing.join("\n")))
    }
}
