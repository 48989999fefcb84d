//! Grid file format.
//!
//! ```text
//! # fm-grid v1 nx=<int> ny=<int> x0=<f64> x1=<f64> y0=<f64> y1=<f64>
//! x,y,f
//! <x>,<y>,<f>        one line per node, row-major, x fastest, boundary included
//! ```
//!
//! Numbers are written in Rust's shortest round-trip decimal form, so a
//! written file reads back bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::Grid;

pub const GRID_TAG: &str = "fm-grid v1";
pub const GRID_COLUMNS: &str = "x,y,f";

fn io_err(e: std::io::Error) -> Error {
    Error::GridFormat(e.to_string())
}

pub fn write_grid<W: Write>(mut w: W, grid: &Grid, f: &[f64]) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::Argument(format!("field has {} values, grid has {} nodes", f.len(), grid.len())));
    }
    writeln!(
        w,
        "# {GRID_TAG} nx={} ny={} x0={} x1={} y0={} y1={}",
        grid.nx, grid.ny, grid.x0, grid.x1, grid.y0, grid.y1
    )
    .map_err(io_err)?;
    writeln!(w, "{GRID_COLUMNS}").map_err(io_err)?;
    for j in 0..grid.ny + 2 {
        for i in 0..grid.nx + 2 {
            writeln!(w, "{},{},{}", grid.x(i), grid.y(j), f[grid.node(i, j)]).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

fn header_field<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let prefix = format!("{key}=");
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(prefix.as_str()))
        .ok_or_else(|| Error::GridFormat(format!("header is missing '{key}'")))?
        .parse()
        .map_err(|_| Error::GridFormat(format!("header field '{key}' is malformed")))
}

pub fn read_grid<R: BufRead>(r: R) -> Result<(Grid, Vec<f64>)> {
    let mut lines = r.lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::GridFormat(format!("unexpected end of file, expected {what}")))?
            .map_err(io_err)
    };
    let header = next("the version comment")?;
    let body = header
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|h| h.strip_prefix(GRID_TAG))
        .ok_or_else(|| Error::GridFormat(format!("first line must start with '# {GRID_TAG}', got '{header}'")))?;
    let grid = Grid::new(
        header_field(body, "x0")?,
        header_field(body, "x1")?,
        header_field(body, "y0")?,
        header_field(body, "y1")?,
        header_field(body, "nx")?,
        header_field(body, "ny")?,
    )
    .map_err(|e| Error::GridFormat(e.to_string()))?;
    let cols = next("the column header")?;
    if cols.trim() != GRID_COLUMNS {
        return Err(Error::GridFormat(format!("column header must be '{GRID_COLUMNS}', got '{cols}'")));
    }
    let mut f = Vec::with_capacity(grid.len());
    for j in 0..grid.ny + 2 {
        for i in 0..grid.nx + 2 {
            let line = next("a node row")?;
            let line_no = f.len() + 3;
            let vals: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::GridFormat(format!("line {line_no}: cannot parse '{line}'")))?;
            if vals.len() != 3 {
                return Err(Error::GridFormat(format!("line {line_no}: expected 3 columns, got {}", vals.len())));
            }
            let (x, y) = (grid.x(i), grid.y(j));
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
            if !close(vals[0], x) || !close(vals[1], y) {
                return Err(Error::GridFormat(format!(
                    "line {line_no}: node ({i}, {j}) should be at ({x}, {y}), found ({}, {})",
                    vals[0], vals[1]
                )));
            }
            f.push(vals[2]);
        }
    }
    for rest in lines {
        if !rest.map_err(io_err)?.trim().is_empty() {
            return Err(Error::GridFormat("trailing rows after the last node".into()));
        }
    }
    Ok((grid, f))
}

pub fn save_grid(path: &Path, grid: &Grid, f: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::GridFormat(format!("{}: {e}", path.display())))?;
    write_grid(BufWriter::new(file), grid, f)
}

pub fn load_grid(path: &Path) -> Result<(Grid, Vec<f64>)> {
    let file = File::open(path).map_err(|e| Error::GridFormat(format!("{}: {e}", path.display())))?;
    read_grid(BufReader::new(file))
}
