//! Plain (P2) PGM masks, members 255 and others 0.
//!
//! Image rows run top to bottom, so the first row is the largest axis-1
//! coordinate. A 1D grid is one row; a 3D grid stacks its axis-2 slices,
//! slice 0 first.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::grid::{CellSet, GridDomain};

const MAXVAL: u32 = 255;

fn shape(g: &GridDomain) -> (usize, usize, usize) {
    let d = g.dims();
    (d[0], d.get(1).copied().unwrap_or(1), d.get(2).copied().unwrap_or(1))
}

fn cell_of(g: &GridDomain, x: usize, y: usize, z: usize) -> usize {
    let coords = [x, y, z];
    g.cell_index(&coords[..g.ndim()]).expect("inside the grid")
}

pub fn write_mask(set: &CellSet) -> String {
    let g = set.domain();
    let (nx, ny, nz) = shape(g);
    let mut out = format!("P2\n{} {}\n{MAXVAL}\n", nx, ny * nz);
    for z in 0..nz {
        for y in (0..ny).rev() {
            let row: Vec<&str> = (0..nx)
                .map(|x| if set.contains(cell_of(g, x, y, z)) { "255" } else { "0" })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

/// Reads a mask for `g`; any nonzero sample is a member.
pub fn read_mask(text: &str, g: &GridDomain) -> Result<CellSet> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |msg: &str| Error::Validation(format!("PGM: {msg}"));
    if tokens.next() != Some("P2") {
        return Err(bad("expected plain PGM magic P2"));
    }
    let mut num = |what: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("missing {what}")))?
            .parse()
            .map_err(|_| bad(&format!("{what} is not a number")))
    };
    let (w, h, maxval) = (num("width")?, num("height")?, num("maxval")?);
    let (nx, ny, nz) = shape(g);
    if (w as usize, h as usize) != (nx, ny * nz) {
        return Err(bad(&format!(
            "size {w}x{h} does not match grid {} (expected {nx}x{})",
            g.label(),
            ny * nz
        )));
    }
    let mut set = CellSet::empty(g);
    for z in 0..nz {
        for y in (0..ny).rev() {
            for x in 0..nx {
                let v = num("sample")?;
                if v > maxval {
                    return Err(bad(&format!("sample {v} exceeds maxval {maxval}")));
                }
                set.set(cell_of(g, x, y, z), v > 0);
            }
        }
    }
    if tokens.next().is_some() {
        return Err(bad("trailing data"));
    }
    Ok(set)
}
