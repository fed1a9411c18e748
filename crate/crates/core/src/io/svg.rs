//! SVG 1.1 figures: cells as unit squares (members filled), measure faces as
//! thick colored segments, measure cells as dots, each with its weight.
//!
//! Axis 0 runs right and axis 1 up. A 1D grid is drawn as one row; a 3D grid
//! as its axis-2 slices side by side.

use std::fmt::Write;

use crate::grid::{CellSet, GridDomain};
use crate::measure::{MeasureData, SignedPair};

const UNIT: usize = 24;
const MARGIN: usize = 16;
const TITLE: usize = 20;
const MINUS: &str = "#c0392b";
const PLUS: &str = "#2471a3";

struct Layout {
    nx: usize,
    ny: usize,
    nz: usize,
}

impl Layout {
    fn of(g: &GridDomain) -> Layout {
        let d = g.dims();
        Layout {
            nx: d[0],
            ny: d.get(1).copied().unwrap_or(1),
            nz: d.get(2).copied().unwrap_or(1),
        }
    }

    /// Pixel position of lattice point `(x, y)` in slice `z`.
    fn point(&self, x: usize, y: usize, z: usize) -> (usize, usize) {
        let ox = MARGIN + z * (self.nx + 1) * UNIT;
        (ox + x * UNIT, MARGIN + TITLE + (self.ny - y) * UNIT)
    }

    fn width(&self) -> usize {
        2 * MARGIN + (self.nz * (self.nx + 1) - 1) * UNIT
    }

    fn height(&self) -> usize {
        2 * MARGIN + TITLE + self.ny * UNIT
    }
}

fn coords3(c: &[usize]) -> (usize, usize, usize) {
    (c[0], c.get(1).copied().unwrap_or(0), c.get(2).copied().unwrap_or(0))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_measure(out: &mut String, lay: &Layout, mu: &MeasureData, color: &str) {
    let g = mu.domain();
    for (f, w) in mu.face_weights() {
        let face = g.face(f);
        let (x, y, z) = coords3(&face.coords);
        // axis-2 faces lie in the slice plane; draw them as a square outline
        let (p, q) = match face.axis {
            0 => (lay.point(x, y, z), lay.point(x, y + 1, z)),
            1 => (lay.point(x, y, z), lay.point(x + 1, y, z)),
            _ => {
                let z = z.min(lay.nz - 1);
                let (x0, y0) = lay.point(x, y + 1, z);
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{color}" stroke-width="3" stroke-dasharray="4 2"/>"#,
                    x0 + 3,
                    y0 + 3,
                    UNIT - 6,
                    UNIT - 6
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="8" fill="{color}">{w}</text>"#,
                    x0 + 4,
                    y0 + UNIT - 4
                );
                continue;
            }
        };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="4" stroke-linecap="round"/>"#,
            p.0, p.1, q.0, q.1
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="9" fill="{color}">{w}</text>"#,
            (p.0 + q.0) / 2 + 3,
            (p.1 + q.1) / 2 - 3
        );
    }
    for (c, w) in mu.cell_weights() {
        let (x, y, z) = coords3(&g.cell_coords(c));
        let (px, py) = lay.point(x, y + 1, z);
        let (cx, cy) = (px + UNIT / 2, py + UNIT / 2);
        let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="4" fill="{color}"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="9" fill="{color}">{w}</text>"#,
            cx + 5,
            cy - 4
        );
    }
}

/// Renders an optional set over the measure pair's grid.
pub fn render(set: Option<&CellSet>, pair: &SignedPair, title: &str) -> String {
    let g = pair.domain();
    let lay = Layout::of(g);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = lay.width(),
        h = lay.height()
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-size="12" font-family="monospace">{}</text>"#,
        MARGIN + 10,
        escape(title)
    );
    for cell in 0..g.cell_count() {
        let (x, y, z) = coords3(&g.cell_coords(cell));
        let (px, py) = lay.point(x, y + 1, z);
        let fill = if set.is_some_and(|s| s.contains(cell)) { "#9e9e9e" } else { "none" };
        let _ = writeln!(
            out,
            r##"<rect x="{px}" y="{py}" width="{UNIT}" height="{UNIT}" fill="{fill}" stroke="#d0d0d0" stroke-width="1"/>"##
        );
    }
    draw_measure(&mut out, &lay, &pair.minus, MINUS);
    draw_measure(&mut out, &lay, &pair.plus, PLUS);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::hyperplane_measure;
    use crate::rat;

    #[test]
    fn draws_cells_and_faces() {
        let g = GridDomain::new(&[3, 2]).unwrap();
        let mu = hyperplane_measure(&g, 1, 1, rat(9, 4)).unwrap();
        let set = CellSet::from_indices(&g, [0]).unwrap();
        let svg = render(Some(&set), &SignedPair::minus_only(mu), "a < b");
        assert_eq!(svg.matches("<rect x=").count(), 6);
        assert_eq!(svg.matches("#9e9e9e").count(), 1);
        assert_eq!(svg.matches("<line ").count(), 3);
        assert!(svg.contains(">9/4</text>"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn one_and_three_dimensions() {
        for dims in [&[4usize][..], &[2, 2, 2]] {
            let g = GridDomain::new(dims).unwrap();
            let mu = hyperplane_measure(&g, 0, 1, rat(1, 1)).unwrap();
            let svg = render(None, &SignedPair::minus_only(mu), "");
            assert_eq!(svg.matches("<rect x=").count(), g.cell_count());
        }
    }
}
