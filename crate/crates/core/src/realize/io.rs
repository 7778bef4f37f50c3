//! Coordinate files and OFF export.

use std::fmt::Write;

use super::{CoordinateAssignment, Point3};
use crate::classify::coherent_orientation;
use crate::complex::TriangleSet;
use crate::error::{invalid, Error, Result};

/// One line `<vertex> <x> <y> <z>` per vertex.
pub fn write_coordinates(coords: &CoordinateAssignment) -> String {
    let mut out = String::new();
    for (i, p) in coords.points.iter().enumerate() {
        writeln!(out, "{} {} {} {}", i + 1, p.x, p.y, p.z).unwrap();
    }
    out
}

/// Parses a coordinate file. Vertex ids must cover `1..=n` exactly once,
/// in any order. Blank lines and `#` comments are ignored.
pub fn parse_coordinates(text: &str) -> Result<CoordinateAssignment> {
    let mut rows: Vec<(usize, Point3)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let mut nums = [0i64; 4];
        for (j, f) in fields.iter().enumerate() {
            nums[j] = f.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: line.find(f).map_or(1, |c| c + 1),
                message: format!("`{f}` is not an integer"),
            })?;
        }
        if nums[0] < 1 {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: "vertex ids start at 1".into(),
            });
        }
        rows.push((nums[0] as usize, Point3::new(nums[1], nums[2], nums[3])));
    }
    let n = rows.len();
    let mut points = vec![None; n];
    for (v, p) in rows {
        if v > n {
            return Err(invalid(format!("vertex {v} out of range for {n} points")));
        }
        if points[v - 1].replace(p).is_some() {
            return Err(invalid(format!("vertex {v} listed twice")));
        }
    }
    Ok(CoordinateAssignment::new(points.into_iter().map(|p| p.expect("all ids present")).collect()))
}

/// OFF mesh with coherently oriented faces and 0-based indices.
pub fn to_off(c: &TriangleSet, coords: &CoordinateAssignment) -> Result<String> {
    if coords.n() != c.n() {
        return Err(invalid(format!("{} points for {} vertices", coords.n(), c.n())));
    }
    let faces = coherent_orientation(c).ok_or_else(|| invalid("surface is not orientable"))?;
    let mut out = String::from("OFF\n");
    writeln!(out, "{} {} 0", c.n(), faces.len()).unwrap();
    for p in &coords.points {
        writeln!(out, "{:.1} {:.1} {:.1}", p.x as f64, p.y as f64, p.z as f64).unwrap();
    }
    for [a, b, x] in faces {
        writeln!(out, "3 {} {} {}", a - 1, b - 1, x - 1).unwrap();
    }
    Ok(out)
}
