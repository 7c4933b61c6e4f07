//! Browser bindings: an h-grid, a region staircase and a cable transform for
//! catalog links. Each export wraps a plain function so the logic is testable
//! off the browser.

use hflink::cable::{cable_consistency_check, CableSpec};
use hflink::hfunction::{HOptions, HTable};
use hflink::linkcat::{self, LinkDescriptor};
use hflink::region::{maximal_lattice_points, region_from_h};
use hflink::render::{ascii_grid, default_extent, svg_staircase};
use wasm_bindgen::prelude::*;

// keeps a page from asking for a huge table
const MAX_RADIUS: i64 = 40;

fn load(key: &str) -> Result<LinkDescriptor, String> {
    linkcat::catalog_from_spec(key).map_err(|e| e.to_string())
}

fn table(d: &LinkDescriptor) -> Result<HTable, String> {
    let t = HTable::build(d, &HOptions::default()).map_err(|e| e.to_string())?;
    if t.radius() > MAX_RADIUS {
        return Err(format!("box radius {} is too large for the demo", t.radius()));
    }
    Ok(t)
}

/// Text grid of h on `[lo, hi]ⁿ` for a one- or two-component catalog link.
pub fn h_grid_text(key: &str, lo: i64, hi: i64) -> Result<String, String> {
    if lo > hi || hi - lo > 40 {
        return Err("choose a window with lo <= hi and at most 40 wide".into());
    }
    let d = load(key)?;
    let t = table(&d)?;
    ascii_grid(t.n(), lo, hi, |s| t.h(s)).ok_or_else(|| "grids need one or two components".to_string())
}

/// SVG staircase of the h-region of a two-component catalog link.
pub fn region_svg_text(key: &str) -> Result<String, String> {
    let d = load(key)?;
    let t = table(&d)?;
    let r = region_from_h(&t).map_err(|e| e.to_string())?;
    svg_staircase(&r, default_extent(&r), &d.name).ok_or_else(|| format!("{} is not a two-component link", d.name))
}

/// Cables a catalog link and reports both routes to the region.
pub fn cable_report_text(key: &str, spec: &str) -> Result<String, String> {
    let d = load(key)?;
    let spec: CableSpec = spec.parse().map_err(|e: hflink::cable::CableError| e.to_string())?;
    let rep = cable_consistency_check(&d, &spec, &HOptions::default()).map_err(|e| e.to_string())?;
    let t = table(&rep.cabled)?;
    let maximal = maximal_lattice_points(&t).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for w in &rep.warnings {
        out += &format!("warning: {w}\n");
    }
    out += &format!("{} cabled by {spec}\n", d.name);
    out += &format!("direct region:  {}\n", rep.direct);
    out += &format!("T-image region: {}\n", rep.via_t);
    out += &format!("maximal points: {maximal:?}\n");
    out += &format!("agree: {}\n", rep.consistent());
    if let Some(g) = rep.direct.min_coordinate_sum() {
        out += &format!("4-genus lower bound: {g}\n");
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn h_grid(key: &str, lo: i32, hi: i32) -> Result<String, JsValue> {
    h_grid_text(key, lo.into(), hi.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn region_svg(key: &str) -> Result<String, JsValue> {
    region_svg_text(key).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cable_report(key: &str, spec: &str) -> Result<String, JsValue> {
    cable_report_text(key, spec).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid() {
        let g = h_grid_text("whitehead", 0, 2).unwrap();
        assert!(g.contains(" 0 | 1 0 0"), "{g}");
        assert!(h_grid_text("borromean", 0, 1).is_err());
        assert!(h_grid_text("whitehead", 3, 0).is_err());
    }

    #[test]
    fn svg() {
        let s = region_svg_text("two_bridge:2").unwrap();
        assert!(s.starts_with("<svg"));
        assert!(region_svg_text("trefoil_rh").is_err());
        assert!(region_svg_text("no_such_link").is_err());
    }

    #[test]
    fn cable() {
        let r = cable_report_text("whitehead", "2:7,1:1").unwrap();
        assert!(r.contains("direct region:  {(3,1), (5,0)}"), "{r}");
        assert!(r.contains("agree: true"));
        assert!(r.contains("4-genus lower bound: 4"));
        assert!(cable_report_text("two_bridge:2", "2:5,3:7").is_err());
        assert!(cable_report_text("whitehead", "2:7").is_err());
    }
}
