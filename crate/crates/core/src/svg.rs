//! SVG 1.1 route plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Instance, Point, Solution};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Depot as a square, terminals as circles with area proportional to demand,
/// one polyline per tour in evenly spaced hues. Output is deterministic.
pub fn render_svg(instance: &Instance, solution: &Solution) -> String {
    let mut points = vec![instance.depot()];
    points.extend(instance.terminals().iter().map(|t| t.location));
    let lines: Vec<Vec<Point>> = solution
        .tours
        .iter()
        .map(|t| t.polyline(instance))
        .collect();
    points.extend(lines.iter().flatten().copied());

    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &points {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    // SVG y grows downwards.
    let map = |p: &Point| (MARGIN + (p.x - lo_x) * scale, SIZE - MARGIN - (p.y - lo_y) * scale);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let count = lines.len().max(1);
    for (k, line) in lines.iter().enumerate() {
        let hue = 360.0 * k as f64 / count as f64;
        let coords: Vec<String> = line
            .iter()
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="tour" fill="none" stroke="hsl({hue:.1},70%,45%)" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }
    for t in instance.terminals() {
        let (x, y) = map(&t.location);
        let r = 2.0 + 6.0 * t.demand.sqrt();
        let _ = writeln!(
            out,
            r#"<circle class="terminal" cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="steelblue" fill-opacity="0.6"/>"#
        );
    }
    let (x, y) = map(&instance.depot());
    let _ = writeln!(
        out,
        r#"<rect class="depot" x="{:.3}" y="{:.3}" width="10" height="10" fill="black"/>"#,
        x - 5.0,
        y - 5.0
    );
    out.push_str("</svg>\n");
    out
}

pub fn emit_svg(instance: &Instance, solution: &Solution, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(instance, solution))
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Stop, Tour};

    fn polyline_vertices(svg: &str) -> Vec<usize> {
        svg.lines()
            .filter(|l| l.contains("class=\"tour\""))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                l[start..].split('"').next().unwrap().split(' ').count()
            })
            .collect()
    }

    #[test]
    fn empty_solution_draws_only_the_depot() {
        let i = Instance::new(Point::ORIGIN, []).unwrap();
        let svg = render_svg(&i, &Solution::default());
        assert!(svg.contains("class=\"depot\""));
        assert!(polyline_vertices(&svg).is_empty());
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn one_tour_one_polyline() {
        let i = Instance::new(Point::ORIGIN, [(Point::new(1.0, 2.0), 0.5)]).unwrap();
        let svg = render_svg(&i, &Solution::new(vec![Tour::from_visits([0])]));
        assert_eq!(polyline_vertices(&svg), vec![3]);
    }

    #[test]
    fn excursions_add_two_vertices() {
        let i = Instance::new(
            Point::ORIGIN,
            [(Point::new(1.0, 0.5), 0.2), (Point::new(2.0, 0.0), 0.2)],
        )
        .unwrap();
        let tour = Tour::new(vec![
            Stop::Waypoint(Point::new(1.0, 0.0)),
            Stop::RoundTrip(0),
            Stop::Visit(1),
        ]);
        let svg = render_svg(&i, &Solution::new(vec![tour]));
        assert_eq!(polyline_vertices(&svg), vec![2 + 2 + 2]);
        assert_eq!(svg, render_svg(&i, &Solution::new(vec![Tour::new(vec![
            Stop::Waypoint(Point::new(1.0, 0.0)),
            Stop::RoundTrip(0),
            Stop::Visit(1),
        ])])));
    }
}
