//! Trajectory CSV: `branch_id,e_re,e_im,z_re,z_im`, one row per branch and
//! grid sample, LF line endings.

use std::io::Write;

use crate::trajectory::Trajectory;

pub const TRAJECTORY_HEADER: &str = "branch_id,e_re,e_im,z_re,z_im";

/// Rows are ordered by branch id, then grid order.
pub fn write_trajectories_csv<W: Write>(out: &mut W, trajectories: &[Trajectory]) -> std::io::Result<()> {
    let mut order: Vec<&Trajectory> = trajectories.iter().collect();
    order.sort_by_key(|t| t.branch_id);
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for t in order {
        for (e, z) in &t.points {
            writeln!(out, "{},{:?},{:?},{:?},{:?}", t.branch_id, e.re, e.im, z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn trajectories_csv_string(trajectories: &[Trajectory]) -> String {
    let mut buf = Vec::new();
    write_trajectories_csv(&mut buf, trajectories).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
