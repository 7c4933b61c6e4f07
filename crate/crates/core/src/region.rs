//! Upward-closed subsets of the nonnegative lattice, stored as antichains of
//! minimal generators.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::hfunction::{HError, HOptions, HTable, ValidationReport};
use crate::linkcat::{sublink, LinkDescriptor, LinkError, Subset};

/// `a ⪯ b` componentwise.
pub fn dominated(a: &[i64], b: &[i64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpwardClosedRegion {
    n: usize,
    generators: Vec<Vec<i64>>,
}

impl UpwardClosedRegion {
    /// Minimalizes `points` and sorts the survivors lexicographically.
    pub fn new(n: usize, points: Vec<Vec<i64>>) -> Self {
        assert!(points.iter().all(|p| p.len() == n), "generator dimension mismatch");
        let mut pts = points;
        pts.sort();
        pts.dedup();
        let mut generators: Vec<Vec<i64>> = Vec::new();
        // sorting by coordinate sum puts every dominating point after the points it dominates
        pts.sort_by_key(|p| p.iter().sum::<i64>());
        for p in pts {
            if !generators.iter().any(|g| dominated(g, &p)) {
                generators.push(p);
            }
        }
        generators.sort();
        UpwardClosedRegion { n, generators }
    }

    pub fn empty(n: usize) -> Self {
        UpwardClosedRegion { n, generators: Vec::new() }
    }

    /// The whole nonnegative orthant.
    pub fn orthant(n: usize) -> Self {
        UpwardClosedRegion { n, generators: vec![vec![0; n]] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.generators.iter().any(|g| dominated(g, x))
    }

    pub fn is_antichain(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators.iter().enumerate().all(|(j, b)| i == j || !dominated(a, b))
        })
    }

    /// Smallest coordinate sum over the generators.
    pub fn min_coordinate_sum(&self) -> Option<i64> {
        self.generators.iter().map(|g| g.iter().sum()).min()
    }

    /// `self × other` in `ℤ^{n₁+n₂}`.
    pub fn product(&self, other: &UpwardClosedRegion) -> UpwardClosedRegion {
        let mut pts = Vec::with_capacity(self.generators.len() * other.generators.len());
        for a in &self.generators {
            for b in &other.generators {
                pts.push(a.iter().chain(b).copied().collect());
            }
        }
        UpwardClosedRegion::new(self.n + other.n, pts)
    }

    /// Image of the generators under a coordinatewise map.
    pub fn map_generators(&self, f: impl Fn(&[i64]) -> Vec<i64>) -> UpwardClosedRegion {
        UpwardClosedRegion::new(self.n, self.generators.iter().map(|g| f(g)).collect())
    }

    /// Drops coordinate `i` from a point.
    pub fn project(x: &[i64], i: usize) -> Vec<i64> {
        x.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| *v).collect()
    }
}

impl fmt::Display for UpwardClosedRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("({})", g.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("H-function failed validation ({} issue(s)); first: {}", .0.count, .0.issues.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid(ValidationReport),
    #[error("maximal point {z:?}: coefficient at z + 1 is {chi}, expected {expected}")]
    Certificate { z: Vec<i64>, chi: BigInt, expected: i64 },
    #[error(transparent)]
    H(#[from] HError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

fn ensure_valid(table: &HTable) -> Result<(), RegionError> {
    let report = table.validate();
    if report.is_ok() {
        Ok(())
    } else {
        Err(RegionError::Invalid(report))
    }
}

/// Minimal points of `{s ⪰ 0 : h(s) = 0}` found on the table box.
pub fn region_from_h(table: &HTable) -> Result<UpwardClosedRegion, RegionError> {
    ensure_valid(table)?;
    Ok(region_from_h_unchecked(table))
}

fn region_from_h_unchecked(table: &HTable) -> UpwardClosedRegion {
    let n = table.n();
    let m = table.radius();
    let zeros: Vec<Vec<i64>> = nonneg_points(n, m).filter(|s| table.h(s) == 0).collect();
    UpwardClosedRegion::new(n, zeros)
}

/// Points of `[0, m]ⁿ`, last coordinate fastest.
pub fn nonneg_points(n: usize, m: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (m.max(-1) + 1) as usize;
    (0..side.pow(n as u32)).map(move |mut idx| {
        let mut p = vec![0; n];
        for k in (0..n).rev() {
            p[k] = (idx % side) as i64;
            idx /= side;
        }
        p
    })
}

/// Points `z ⪰ 0` with `h(z) ≠ 0` and `h(z + eᵢ) = 0` for every `i`.
///
/// Each is checked against the coefficient identity `χ(z + 1) = (−1)^{n−1}`.
pub fn maximal_lattice_points(table: &HTable) -> Result<Vec<Vec<i64>>, RegionError> {
    ensure_valid(table)?;
    let n = table.n();
    let full = Subset::full(n);
    let expected = if n % 2 == 1 { 1 } else { -1 };
    let mut out = Vec::new();
    for z in nonneg_points(n, table.radius() - 1) {
        if table.h(&z) == 0 {
            continue;
        }
        let upper_zero = (0..n).all(|i| {
            let mut y = z.clone();
            y[i] += 1;
            table.h(&y) == 0
        });
        if upper_zero {
            let u: Vec<i64> = z.iter().map(|x| x + 1).collect();
            let chi = table.chi(full, &u);
            if chi != BigInt::from(expected) {
                return Err(RegionError::Certificate { z, chi, expected });
            }
            out.push(z);
        }
    }
    out.sort();
    Ok(out)
}

/// Regions of the sublinks obtained by deleting one component.
pub fn sublink_regions(d: &LinkDescriptor, opts: &HOptions) -> Result<Vec<UpwardClosedRegion>, RegionError> {
    let n = d.n();
    if n < 2 {
        return Ok(Vec::new());
    }
    (0..n)
        .map(|i| {
            let sub = sublink(d, Subset::full(n).without(i))?;
            let opts = HOptions { radius: None, genus_margin: Some(0), ..opts.clone() };
            region_from_h(&HTable::build(&sub, &opts)?)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProjectionReport {
    /// (generator, deleted component) pairs whose projection leaves the sublink region.
    pub violations: Vec<(Vec<i64>, usize)>,
}

impl ProjectionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every generator projects into the region of each
/// one-component-deleted sublink.
pub fn projection_check(
    d: &LinkDescriptor,
    r: &UpwardClosedRegion,
    opts: &HOptions,
) -> Result<ProjectionReport, RegionError> {
    let subs = sublink_regions(d, opts)?;
    let mut report = ProjectionReport::default();
    for g in r.generators() {
        for (i, sr) in subs.iter().enumerate() {
            if !sr.contains(&UpwardClosedRegion::project(g, i)) {
                report.violations.push((g.clone(), i));
            }
        }
    }
    Ok(report)
}

/// Rebuilds membership on `[0, M]ⁿ` from the maximal points and the
/// sublink regions, and compares it with the region itself.
/// Returns the points where the two disagree.
pub fn reconstruction_check(table: &HTable, opts: &HOptions) -> Result<Vec<Vec<i64>>, RegionError> {
    let region = region_from_h(table)?;
    let maximal = maximal_lattice_points(table)?;
    let subs = sublink_regions(table.link(), opts)?;
    let n = table.n();
    let mut mismatches = Vec::new();
    for x in nonneg_points(n, table.radius()) {
        let outside = maximal.iter().any(|z| dominated(&x, z))
            || subs.iter().enumerate().any(|(i, sr)| !sr.contains(&UpwardClosedRegion::project(&x, i)));
        if outside == region.contains(&x) {
            mismatches.push(x);
        }
    }
    Ok(mismatches)
}
