//! Complex-Z-plane trajectory plot as a standalone SVG document.

use std::fmt::Write;

use crate::trajectory::Trajectory;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Visible region of the Z plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotWindow {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Default for PlotWindow {
    fn default() -> Self {
        Self { re: [-12.0, 12.0], im: [-8.0, 8.0] }
    }
}

impl PlotWindow {
    fn contains(&self, re: f64, im: f64) -> bool {
        (self.re[0]..=self.re[1]).contains(&re) && (self.im[0]..=self.im[1]).contains(&im)
    }

    fn x(&self, re: f64) -> f64 {
        MARGIN + (re - self.re[0]) / (self.re[1] - self.re[0]) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, im: f64) -> f64 {
        HEIGHT - MARGIN - (im - self.im[0]) / (self.im[1] - self.im[0]) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// One polyline per branch, split where the branch leaves the window, over a
/// real-axis rule with integer tick marks.
pub fn render_trajectories_svg(trajectories: &[Trajectory], window: &PlotWindow) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="gray"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );

    if window.im[0] <= 0.0 && window.im[1] >= 0.0 {
        let y0 = window.y(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{MARGIN}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black" stroke-width="1"/>"#,
            WIDTH - MARGIN
        );
        let first = window.re[0].ceil() as i64;
        let last = window.re[1].floor() as i64;
        let label_every = if last - first > 30 { 5 } else { 1 };
        for k in first..=last {
            let x = window.x(k as f64);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                y0 - 4.0,
                y0 + 4.0
            );
            if k % label_every == 0 {
                let _ = writeln!(
                    s,
                    r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{k}</text>"#,
                    y0 + 16.0
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">Re Z</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">Im Z</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let mut order: Vec<&Trajectory> = trajectories.iter().collect();
    order.sort_by_key(|t| t.branch_id);
    for t in order {
        let color = PALETTE[t.branch_id % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, s: &mut String| {
            if segment.len() >= 2 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                    segment.join(" ")
                );
            } else if segment.len() == 1 {
                let mut xy = segment[0].split(',');
                let (x, y) = (xy.next().unwrap_or("0"), xy.next().unwrap_or("0"));
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="1.5" fill="{color}"/>"#);
            }
            segment.clear();
        };
        for (_, z) in &t.points {
            if window.contains(z.re, z.im) {
                segment.push(format!("{:.2},{:.2}", window.x(z.re), window.y(z.im)));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn splits_and_ticks() {
        let t = Trajectory {
            branch_id: 0,
            points: vec![
                (Complex64::new(0.0, 0.0), Complex64::new(-1.0, 1.0)),
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)),
                (Complex64::new(2.0, 0.0), Complex64::new(50.0, 0.0)),
                (Complex64::new(3.0, 0.0), Complex64::new(1.0, -0.5)),
            ],
            discontinuities: vec![],
        };
        let svg = render_trajectories_svg(std::slice::from_ref(&t), &PlotWindow::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches(">0</text>").count(), 1);
        assert_eq!(svg, render_trajectories_svg(&[t], &PlotWindow::default()));
    }
}
