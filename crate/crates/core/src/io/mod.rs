//! Run configuration and output formats.

pub mod config;
pub mod csv;
pub mod json;
pub mod svg;

pub use config::{EnergyPoint, FindSection, OutputSection, RunConfig, ScanSection, TableMode, TableSection};
pub use csv::{trajectories_csv_string, write_trajectories_csv, TRAJECTORY_HEADER};
pub use json::{resonances_to_json, significant};
pub use svg::{render_trajectories_svg, PlotWindow};
