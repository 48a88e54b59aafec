//! Quad mesh of a surface over the parameter grid. Vertices carry the
//! spatial coordinates `(x2, x3, x4)`; the time coordinate `x1` goes to a
//! sidecar file with one value per vertex, in vertex order.

use super::Grid;
use crate::error::{Error, Result};
use crate::expr::ImmersionSpec;
use std::fmt::Write as _;

pub struct Mesh {
    /// `v x2 x3 x4` lines followed by 1-based `f a b c d` quads.
    pub text: String,
    /// One `x1` value per line.
    pub x1: String,
    pub vertices: usize,
    pub faces: usize,
}

pub fn to_mesh(spec: &ImmersionSpec, grid: &Grid) -> Result<Mesh> {
    if spec.n_params() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: spec.n_params(),
        });
    }
    let (a, b) = (grid.counts[0], grid.counts[1]);
    let mut text = String::new();
    let mut x1 = String::new();
    let _ = writeln!(text, "# {a}x{b} grid, vertex = (x2, x3, x4), x1 in sidecar");
    for i in 0..a {
        for j in 0..b {
            let x = spec.eval_point(&grid.point(&[i, j]))?;
            let _ = writeln!(text, "v {} {} {}", x[1], x[2], x[3]);
            let _ = writeln!(x1, "{}", x[0]);
        }
    }
    let id = |i: usize, j: usize| i * b + j + 1;
    let mut faces = 0;
    for i in 0..a.saturating_sub(1) {
        for j in 0..b.saturating_sub(1) {
            let _ = writeln!(text, "f {} {} {} {}", id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces += 1;
        }
    }
    Ok(Mesh {
        text,
        x1,
        vertices: a * b,
        faces,
    })
}
