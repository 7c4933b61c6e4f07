//! Text grids and SVG staircases for small tables and regions.

use std::fmt::Write;

use crate::region::UpwardClosedRegion;

/// Renders `f` on `[lo, hi]ⁿ` for `n ∈ {1, 2}`: `s1` runs horizontally and,
/// for two variables, `s2` vertically with the origin at the lower left.
pub fn ascii_grid(n: usize, lo: i64, hi: i64, f: impl Fn(&[i64]) -> i64) -> Option<String> {
    let cells: Vec<i64> = (lo..=hi).collect();
    let rows: Vec<Option<i64>> = match n {
        1 => vec![None],
        2 => (lo..=hi).rev().map(Some).collect(),
        _ => return None,
    };
    let mut width = [lo.to_string().len(), hi.to_string().len()].into_iter().max().unwrap_or(1);
    for r in &rows {
        for &c in &cells {
            let p = match r {
                Some(y) => vec![c, *y],
                None => vec![c],
            };
            width = width.max(f(&p).to_string().len());
        }
    }
    let label = if n == 2 { "s2" } else { "h" };
    let margin = [label.len(), lo.to_string().len(), hi.to_string().len()].into_iter().max().unwrap_or(2);
    let mut out = String::new();
    if n == 2 {
        let _ = writeln!(out, "{label:>margin$}");
    }
    for r in &rows {
        let head = match r {
            Some(y) => y.to_string(),
            None => label.to_string(),
        };
        let _ = write!(out, "{head:>margin$} |");
        for &c in &cells {
            let p = match r {
                Some(y) => vec![c, *y],
                None => vec![c],
            };
            let _ = write!(out, " {:>width$}", f(&p));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{:>margin$} +{}", "", "-".repeat(cells.len() * (width + 1)));
    let _ = write!(out, "{:>margin$}  ", "");
    for &c in &cells {
        let _ = write!(out, " {c:>width$}");
    }
    out.push_str("  s1\n");
    Some(out)
}

const CELL: i64 = 40;
const PAD: i64 = 40;

/// SVG of a two-variable region on `[0, extent]²`: the complement is shaded,
/// the boundary staircase drawn, and lattice points in the region filled.
pub fn svg_staircase(region: &UpwardClosedRegion, extent: i64, title: &str) -> Option<String> {
    if region.n() != 2 {
        return None;
    }
    let size = extent * CELL + 2 * PAD;
    let x = |v: i64| PAD + v * CELL;
    let y = |v: i64| size - PAD - v * CELL;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(title));
    let _ = writeln!(out, r##"  <rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>"##);

    // complement of the region inside the box
    let mut gens: Vec<Vec<i64>> = region.generators().to_vec();
    gens.sort();
    let mut path = format!("M {} {}", x(0), y(extent));
    if gens.is_empty() {
        let _ = write!(path, " L {} {} L {} {} L {} {}", x(extent), y(extent), x(extent), y(0), x(0), y(0));
    } else {
        for g in &gens {
            let (gx, gy) = (g[0].clamp(0, extent), g[1].clamp(0, extent));
            let _ = write!(path, " L {} {} L {} {}", x(gx), y(extent.min(prev_height(&gens, g, extent))), x(gx), y(gy));
        }
        let last = gens.last().expect("nonempty");
        let _ = write!(path, " L {} {} L {} {} L {} {}", x(extent), y(last[1].clamp(0, extent)), x(extent), y(0), x(0), y(0));
    }
    path.push_str(" Z");
    let _ = writeln!(out, r##"  <path d="{path}" fill="#d9d9d9" stroke="none"/>"##);

    for v in 0..=extent {
        let _ = writeln!(
            out,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-width="1"/>"##,
            x(v), y(0), x(v), y(extent)
        );
        let _ = writeln!(
            out,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-width="1"/>"##,
            x(0), y(v), x(extent), y(v)
        );
    }

    if !gens.is_empty() {
        let first = &gens[0];
        let mut stair = format!("M {} {}", x(first[0].clamp(0, extent)), y(extent));
        for (i, g) in gens.iter().enumerate() {
            let (gx, gy) = (g[0].clamp(0, extent), g[1].clamp(0, extent));
            if i > 0 {
                let _ = write!(stair, " L {} {}", x(gx), y(gens[i - 1][1].clamp(0, extent)));
            }
            let _ = write!(stair, " L {} {}", x(gx), y(gy));
        }
        let _ = write!(stair, " L {} {}", x(extent), y(gens.last().expect("nonempty")[1].clamp(0, extent)));
        let _ = writeln!(out, r##"  <path d="{stair}" fill="none" stroke="#1f4e9e" stroke-width="3"/>"##);
    }

    for a in 0..=extent {
        for b in 0..=extent {
            let inside = region.contains(&[a, b]);
            let fill = if inside { "#1f4e9e" } else { "#ffffff" };
            let _ = writeln!(
                out,
                r##"  <circle cx="{}" cy="{}" r="4" fill="{fill}" stroke="#1f4e9e" stroke-width="1.5"/>"##,
                x(a),
                y(b)
            );
        }
    }
    let _ = writeln!(
        out,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="end">s1</text>"##,
        x(extent),
        y(0) + 28
    );
    let _ = writeln!(
        out,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="14">s2</text>"##,
        x(0) - 28,
        y(extent) + 5
    );
    let _ = writeln!(
        out,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">0</text>"##,
        x(0) - 8,
        y(0) + 16
    );
    out.push_str("</svg>\n");
    Some(out)
}

fn prev_height(gens: &[Vec<i64>], g: &[i64], extent: i64) -> i64 {
    let idx = gens.iter().position(|h| h.as_slice() == g).unwrap_or(0);
    if idx == 0 {
        extent
    } else {
        gens[idx - 1][1]
    }
}

/// Default plotting extent: two past the largest generator coordinate.
pub fn default_extent(region: &UpwardClosedRegion) -> i64 {
    region.generators().iter().flatten().copied().max().unwrap_or(0) + 2
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let g = ascii_grid(2, 0, 1, |p| p[0] + 10 * p[1]).unwrap();
        let lines: Vec<&str> = g.lines().collect();
        assert_eq!(lines[0], "s2");
        assert_eq!(lines[1], " 1 | 10 11");
        assert_eq!(lines[2], " 0 |  0  1");
        assert!(lines[4].ends_with("0  1  s1"));
        let one = ascii_grid(1, -2, 1, |p| (-p[0]).max(0)).unwrap();
        assert!(one.starts_with(" h |  2  1  0  0\n"), "{one}");
        assert!(ascii_grid(3, 0, 1, |_| 0).is_none());
    }

    #[test]
    fn svg_shape() {
        let r = UpwardClosedRegion::new(2, vec![vec![0, 2], vec![1, 1]]);
        let s = svg_staircase(&r, default_extent(&r), "mirror <L7a3>").unwrap();
        assert!(s.starts_with("<svg"));
        assert!(s.contains("&lt;L7a3&gt;"));
        assert_eq!(s.matches("<circle").count(), 25);
        // outside: the s1 axis and (0,1)
        assert_eq!(s.matches(r##"fill="#1f4e9e" stroke"##).count(), 25 - 6);
        assert!(svg_staircase(&UpwardClosedRegion::orthant(3), 3, "x").is_none());
    }
}
