//! Genus inequalities, 4-genus lower bounds and d-invariant formulas.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::hfunction::HTable;
use crate::region::{dominated, nonneg_points, region_from_h, RegionError, UpwardClosedRegion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("box radius {radius} too small: genus {genus} needs at least {needed}")]
    BoxTooSmall { radius: i64, genus: i64, needed: i64 },
    #[error("genus vector must be nonnegative with {expected} entries")]
    BadGenus { expected: usize },
    #[error("no admissible genus vector with entries up to {0}")]
    NoAdmissible(i64),
    #[error("admissible genus vector {0:?} lies outside the h-region")]
    Containment(Vec<i64>),
    #[error("4-genus of component {} is unknown", .0 + 1)]
    MissingG4(usize),
    #[error("empty region")]
    EmptyRegion,
    #[error("need m >= 1 and |k| <= m/2 (got m = {m}, k = {k})")]
    LensRange { m: i64, k: i64 },
    #[error("framing needs {expected} positive entries")]
    BadFraming { expected: usize },
    #[error("framing q{} = {q} is not large: need q > {needed} (use force)", .i + 1)]
    NotLarge { i: usize, q: i64, needed: i64 },
    #[error("v{} = {v} is outside the domain |2v| <= q = {q}", .i + 1)]
    OutsideDomain { i: usize, v: i64, q: i64 },
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// `⌈(g − |v|)/2⌉` for `|v| ≤ g`, else 0.
pub fn f_cap(g: i64, v: i64) -> i64 {
    let a = v.abs();
    if a <= g {
        (g - a + 1).div_euclid(2)
    } else {
        0
    }
}

fn check_genus(table: &HTable, g: &[i64]) -> Result<(), BoundsError> {
    if g.len() != table.n() || g.iter().any(|&x| x < 0) {
        return Err(BoundsError::BadGenus { expected: table.n() });
    }
    let genus = g.iter().copied().max().unwrap_or(0);
    let needed = table.support_radius() + genus + 2;
    if table.radius() < needed {
        return Err(BoundsError::BoxTooSmall { radius: table.radius(), genus, needed });
    }
    Ok(())
}

fn positive_h(table: &HTable) -> Vec<(Vec<i64>, i64)> {
    table
        .points()
        .filter_map(|v| {
            let h = table.h(&v);
            (h > 0).then_some((v, h))
        })
        .collect()
}

fn admissible_against(positive: &[(Vec<i64>, i64)], g: &[i64]) -> bool {
    positive
        .iter()
        .all(|(v, h)| *h <= g.iter().zip(v).map(|(&gi, &vi)| f_cap(gi, vi)).sum::<i64>())
}

/// Whether `h(v) ≤ Σ f_{gᵢ}(vᵢ)` holds for every `v` in the box.
pub fn genus_admissible(table: &HTable, g: &[i64]) -> Result<bool, BoundsError> {
    check_genus(table, g)?;
    Ok(admissible_against(&positive_h(table), g))
}

/// Minimal admissible genus vectors with entries up to the table's genus margin.
pub fn admissible_region(table: &HTable) -> Result<UpwardClosedRegion, BoundsError> {
    let n = table.n();
    let limit = table.genus_margin();
    check_genus(table, &vec![limit; n])?;
    let positive = positive_h(table);
    let found: Vec<Vec<i64>> = nonneg_points(n, limit).filter(|g| admissible_against(&positive, g)).collect();
    let region = UpwardClosedRegion::new(n, found);
    if region.is_empty() {
        return Err(BoundsError::NoAdmissible(limit));
    }
    let hf = region_from_h(table)?;
    if let Some(g) = region.generators().iter().find(|g| !hf.contains(g)) {
        return Err(BoundsError::Containment(g.clone()));
    }
    Ok(region)
}

/// Smallest coordinate sum over the h-region generators.
pub fn bound_min_region(table: &HTable) -> Result<i64, BoundsError> {
    region_from_h(table)?.min_coordinate_sum().ok_or(BoundsError::EmptyRegion)
}

/// `2 max h − n` over the box.
pub fn bound_max_h(table: &HTable) -> Result<i64, BoundsError> {
    region_from_h(table)?;
    let max = table.points().map(|s| table.h(&s)).max().unwrap_or(0);
    Ok(2 * max - table.n() as i64)
}

/// `max 2h(s) − n + Σ|sᵢ|` over `|sᵢ| ≤ g₄(Lᵢ)`.
pub fn bound_weighted(table: &HTable, component_g4: &[i64]) -> Result<i64, BoundsError> {
    region_from_h(table)?;
    let n = table.n();
    if component_g4.len() != n || component_g4.iter().any(|&g| g < 0) {
        return Err(BoundsError::BadGenus { expected: n });
    }
    let mut best = i64::MIN;
    let sides: Vec<i64> = component_g4.to_vec();
    let total: usize = sides.iter().map(|&g| (2 * g + 1) as usize).product();
    for mut idx in 0..total {
        let mut s = vec![0; n];
        for k in (0..n).rev() {
            let side = (2 * sides[k] + 1) as usize;
            s[k] = (idx % side) as i64 - sides[k];
            idx /= side;
        }
        let val = 2 * table.h(&s) - n as i64 + s.iter().map(|x| x.abs()).sum::<i64>();
        best = best.max(val);
    }
    Ok(best)
}

/// Component 4-genera recorded in the table's descriptor.
pub fn component_g4(table: &HTable) -> Result<Vec<i64>, BoundsError> {
    table
        .link()
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| c.g4.map(i64::from).ok_or(BoundsError::MissingG4(i)))
        .collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Smallest generator sum of the h-region.
    MinRegion,
    /// `2 max h − n`.
    MaxH,
    /// Weighted by the component 4-genera.
    Weighted,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundKind::MinRegion => "min-region",
            BoundKind::MaxH => "max-h",
            BoundKind::Weighted => "weighted",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub min_region: i64,
    pub max_h: i64,
    pub weighted: Option<i64>,
    /// Largest bound, floored at 0.
    pub best: i64,
    pub provenance: BoundKind,
}

/// Best of the three bounds; ties go to the earlier kind.
pub fn best_lower_bound(table: &HTable) -> Result<BoundReport, BoundsError> {
    let min_region = bound_min_region(table)?;
    let max_h = bound_max_h(table)?;
    let weighted = match component_g4(table) {
        Ok(g) => Some(bound_weighted(table, &g)?),
        Err(_) => None,
    };
    let mut best = (min_region, BoundKind::MinRegion);
    for (v, k) in [(Some(max_h), BoundKind::MaxH), (weighted, BoundKind::Weighted)] {
        if let Some(v) = v {
            if v > best.0 {
                best = (v, k);
            }
        }
    }
    Ok(BoundReport { min_region, max_h, weighted, best: best.0.max(0), provenance: best.1 })
}

/// Whether h vanishes on the whole box.
pub fn unlink_test(table: &HTable) -> Result<bool, BoundsError> {
    region_from_h(table)?;
    Ok(table.points().all(|s| table.h(&s) == 0))
}

pub const UNLINK_NOTE: &str =
    "h vanishes identically: consistent with an unlink; a slice L-space link with this h-function is the unlink";

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `E(m, k) = 1/4 − (m − 2|k|)²/(4m)`.
pub fn lens_d(m: i64, k: i64) -> Result<BigRational, BoundsError> {
    if m < 1 || 2 * k.abs() > m {
        return Err(BoundsError::LensRange { m, k });
    }
    let a = m - 2 * k.abs();
    Ok(rat(1, 4) - rat(a * a, 4 * m))
}

/// d-invariant of the circle bundle with Euler number `m` over a genus-`g` surface.
///
/// Returns the value and warnings.
pub fn circle_bundle_d(m: i64, g: i64, k: i64) -> Result<(BigRational, Vec<String>), BoundsError> {
    let e = lens_d(m, k)?;
    let mut warnings = Vec::new();
    if m <= 2 * g + 2 {
        warnings.push(format!("m = {m} is not large compared to g = {g} (want m > {})", 2 * g + 2));
    }
    let val = if k.abs() <= g {
        e - rat(g, 1) + rat(2 * f_cap(g, k), 1)
    } else {
        e - rat(g, 1)
    };
    Ok((val, warnings))
}

/// `Σ (2vᵢ − qᵢ)²/(4qᵢ) − n/4 − 2H(v)` for a large diagonal framing `q`.
pub fn large_surgery_d(table: &HTable, q: &[i64], v: &[i64], force: bool) -> Result<BigRational, BoundsError> {
    let n = table.n();
    if q.len() != n || v.len() != n || q.iter().any(|&x| x < 1) {
        return Err(BoundsError::BadFraming { expected: n });
    }
    let needed = 2 * table.support_radius();
    for (i, (&qi, &vi)) in q.iter().zip(v).enumerate() {
        if 2 * vi.abs() > qi {
            return Err(BoundsError::OutsideDomain { i, v: vi, q: qi });
        }
        if qi <= needed && !force {
            return Err(BoundsError::NotLarge { i, q: qi, needed });
        }
    }
    let mut total = BigRational::zero();
    for (&qi, &vi) in q.iter().zip(v) {
        let c = 2 * vi - qi;
        total += rat(c * c, 4 * qi);
    }
    total -= rat(n as i64, 4);
    total -= rat(2 * table.big_h(v), 1);
    Ok(total)
}

/// `"num/den"`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Checks `admissible ⊆ region` generator by generator.
pub fn containment_holds(admissible: &UpwardClosedRegion, region: &UpwardClosedRegion) -> bool {
    admissible.generators().iter().all(|g| region.generators().iter().any(|r| dominated(r, g)))
}
