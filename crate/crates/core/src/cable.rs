//! Cables of links: Alexander polynomials, the T-transform of genus regions,
//! and a check that both routes give the same region.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

use crate::hfunction::{HOptions, HTable};
use crate::laurent::{embed_variable, geometric_cable_factor, LaurentError, LaurentPoly};
use crate::linkcat::{disjoint_union, Component, LinkDescriptor, Structure, Subset};
use crate::region::{region_from_h, RegionError, UpwardClosedRegion};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CableError {
    #[error("cable pair ({p}, {q}) must be coprime positive integers")]
    BadPair { p: u32, q: u32 },
    #[error("cannot parse cable spec {0:?}: expected p1:q1,p2:q2,...")]
    Parse(String),
    #[error("cable spec has {got} pairs but the link has {expected} components")]
    Length { expected: usize, got: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Coprime `(pᵢ, qᵢ)` per component; `(1, q)` leaves a component alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CableSpec {
    pairs: Vec<(u32, u32)>,
}

impl CableSpec {
    pub fn new(pairs: Vec<(u32, u32)>) -> Result<Self, CableError> {
        for &(p, q) in &pairs {
            if p == 0 || q == 0 || p.gcd(&q) != 1 {
                return Err(CableError::BadPair { p, q });
            }
        }
        Ok(CableSpec { pairs })
    }

    pub fn identity(n: usize) -> Self {
        CableSpec { pairs: vec![(1, 1); n] }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|&(p, _)| p == 1)
    }

    /// Pairs of the components in `b`.
    pub fn restrict(&self, b: Subset) -> CableSpec {
        CableSpec { pairs: b.members().iter().map(|&i| self.pairs[i]).collect() }
    }

    /// `(p − 1)(q − 1)/2` for each component.
    pub fn offsets(&self) -> Vec<i64> {
        self.pairs.iter().map(|&(p, q)| (i64::from(p) - 1) * (i64::from(q) - 1) / 2).collect()
    }

    /// Warnings for nontrivial pairs with `q/p < 3`.
    pub fn largeness_warnings(&self) -> Vec<String> {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, &(p, q))| p > 1 && q < 3 * p)
            .map(|(i, &(p, q))| {
                format!("component {}: q/p = {q}/{p} < 3, the cable may fail to be an L-space link", i + 1)
            })
            .collect()
    }
}

impl FromStr for CableSpec {
    type Err = CableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CableError::Parse(s.to_string());
        let pairs = s
            .split(',')
            .map(|pair| {
                let (p, q) = pair.trim().split_once(':').ok_or_else(bad)?;
                Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>, CableError>>()?;
        CableSpec::new(pairs)
    }
}

impl fmt::Display for CableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(p, q)| format!("{p}:{q}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct CableResult {
    pub link: LinkDescriptor,
    pub warnings: Vec<String>,
}

/// Alexander polynomial of the `(p, q)`-cable of a knot.
pub fn cable_knot_polynomial(delta: &LaurentPoly, p: u32, q: u32) -> Result<LaurentPoly, CableError> {
    let factor = geometric_cable_factor(p, q)?;
    if p == 1 {
        return Ok(delta.clone());
    }
    let t_minus_one = LaurentPoly::variable_power(1, 0, 2) - LaurentPoly::one(1);
    let tp_minus_one = LaurentPoly::variable_power(1, 0, 2 * i64::from(p)) - LaurentPoly::one(1);
    let numer = delta.substitute_powers(&[p])? * factor * t_minus_one;
    Ok(numer.exact_div(&tp_minus_one)?.normalize_symmetric()?)
}

/// Alexander polynomial of a cable for a sublink with two or more components.
pub fn cable_link_polynomial(delta: &LaurentPoly, pairs: &[(u32, u32)]) -> Result<LaurentPoly, CableError> {
    if delta.is_zero() {
        return Ok(delta.clone());
    }
    let n = delta.nvars();
    let powers: Vec<u32> = pairs.iter().map(|&(p, _)| p).collect();
    let mut out = delta.substitute_powers(&powers)?;
    for (i, &(p, q)) in pairs.iter().enumerate() {
        out = out * embed_variable(&geometric_cable_factor(p, q)?, n, i);
    }
    Ok(out.normalize_symmetric()?)
}

fn cable_atomic(d: &LinkDescriptor, spec: &CableSpec) -> Result<LinkDescriptor, CableError> {
    let Structure::Atomic(map) = &d.structure else {
        unreachable!("atomic parts only")
    };
    let mut out = BTreeMap::new();
    for (&b, delta) in map {
        let sub = spec.restrict(b);
        let poly = if b.len() == 1 {
            let (p, q) = sub.pairs[0];
            cable_knot_polynomial(delta, p, q)?
        } else {
            cable_link_polynomial(delta, &sub.pairs)?
        };
        out.insert(b, poly);
    }
    let components = d
        .components
        .iter()
        .zip(&spec.pairs)
        .map(|(c, &(p, q))| {
            if p == 1 {
                return c.clone();
            }
            let g4 = c.g4.map(|g| p * g + (p - 1) * (q - 1) / 2);
            Component::new(format!("{}({p},{q})", c.label), g4)
        })
        .collect();
    let name = if spec.is_identity() { d.name.clone() } else { format!("{}_cable({spec})", d.name) };
    Ok(LinkDescriptor::atomic(name, components, out, d.lspace))
}

/// Cables every component of `d` according to `spec`.
pub fn cable_alexander(d: &LinkDescriptor, spec: &CableSpec) -> Result<CableResult, CableError> {
    if spec.len() != d.n() {
        return Err(CableError::Length { expected: d.n(), got: spec.len() });
    }
    let link = match &d.structure {
        Structure::Atomic(_) => cable_atomic(d, spec)?,
        Structure::DisjointUnion(_) => {
            let mut acc: Option<LinkDescriptor> = None;
            for (off, part) in d.parts() {
                let local = CableSpec { pairs: spec.pairs[off..off + part.n()].to_vec() };
                let c = cable_atomic(part, &local)?;
                acc = Some(match acc {
                    None => c,
                    Some(a) => disjoint_union(&a, &c),
                });
            }
            let mut link = acc.expect("at least one part");
            link.name = format!("{}_cable({spec})", d.name);
            link
        }
    };
    Ok(CableResult { link, warnings: spec.largeness_warnings() })
}

/// `T(s)ᵢ = pᵢ sᵢ + (pᵢ − 1)(qᵢ − 1)/2`.
pub fn t_transform(spec: &CableSpec, s: &[i64]) -> Vec<i64> {
    assert_eq!(s.len(), spec.len(), "dimension mismatch");
    spec.pairs
        .iter()
        .zip(spec.offsets())
        .zip(s)
        .map(|((&(p, _), off), &x)| i64::from(p) * x + off)
        .collect()
}

/// Region generated by the T-images of the generators of `r`.
pub fn region_via_t(r: &UpwardClosedRegion, spec: &CableSpec) -> UpwardClosedRegion {
    r.map_generators(|g| t_transform(spec, g))
}

#[derive(Clone, Debug)]
pub struct CableReport {
    pub cabled: LinkDescriptor,
    /// Region of the cabled link computed from its own H-function.
    pub direct: UpwardClosedRegion,
    /// T-image of the original link's region.
    pub via_t: UpwardClosedRegion,
    pub warnings: Vec<String>,
}

impl CableReport {
    pub fn consistent(&self) -> bool {
        self.direct == self.via_t
    }
}

#[derive(Debug, Error)]
pub enum CableCheckError {
    #[error(transparent)]
    Cable(#[from] CableError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    H(#[from] crate::hfunction::HError),
}

/// Runs both routes to the cable's region.
pub fn cable_consistency_check(
    d: &LinkDescriptor,
    spec: &CableSpec,
    opts: &HOptions,
) -> Result<CableReport, CableCheckError> {
    let CableResult { link, warnings } = cable_alexander(d, spec)?;
    let base = region_from_h(&HTable::build(d, opts)?)?;
    let opts = HOptions { radius: None, ..opts.clone() };
    let direct = region_from_h(&HTable::build(&link, &opts)?)?;
    Ok(CableReport { cabled: link, direct, via_t: region_via_t(&base, spec), warnings })
}
