//! H-functions of L-space links from the Alexander polynomials of all
//! sublinks, tabulated on a lattice box.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::laurent::{Exponent, KnotChiSeries, LaurentError, LaurentPoly};
use crate::linkcat::{validate_descriptor, LinkDescriptor, Structure, Subset, Violation};

/// Largest number of lattice points a table may hold.
pub const MAX_TABLE_POINTS: usize = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HError {
    #[error("invalid descriptor: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidDescriptor(Vec<Violation>),
    #[error("link {0:?} is not asserted to be an L-space link (use force to compute anyway)")]
    NotLSpace(String),
    #[error("polynomial for sublink {0} has non-integral exponents after the half-shift")]
    NonIntegralShift(Subset),
    #[error("coefficient of sublink {0} does not fit in 64 bits")]
    CoefficientOverflow(Subset),
    #[error("invalid input: not an L-space link with either sign of the polynomial for sublink {0}")]
    SignUnresolved(Subset),
    #[error("box radius {requested} is below the minimum {minimum}")]
    BoxTooSmall { requested: i64, minimum: i64 },
    #[error("lattice box with radius {radius} in dimension {n} is too large")]
    BoxTooLarge { n: usize, radius: i64 },
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Sign chosen for a multivariable polynomial during resolution.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Stored,
    Flipped,
    /// Neither sign produced a valid H-function; kept as stored (forced).
    Unresolved,
}

impl fmt::Display for SignChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignChoice::Stored => "stored",
            SignChoice::Flipped => "flipped",
            SignChoice::Unresolved => "unresolved",
        })
    }
}

/// `Δ̃` of a sublink with two or more components.
pub fn tilde_alexander(delta: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
    let shifted = delta.shift(&Exponent::from_doubled(vec![1; delta.nvars()]));
    if shifted.terms().all(|(e, _)| e.is_integral()) {
        Ok(shifted)
    } else {
        Err(LaurentError::BadExponent(format!("{shifted}")))
    }
}

/// Upward sums `Σ_{u ≥ x} χ(u)` for a knot.
#[derive(Clone, Debug)]
struct KnotSums {
    series: KnotChiSeries,
    bottom: i64,
    top: i64,
    sums: Vec<i64>,
    slope: i64,
}

impl KnotSums {
    fn new(delta: &LaurentPoly, subset: Subset) -> Result<Self, HError> {
        let (lo, hi) = delta.support_box()?;
        let lo = lo.to_integers().ok_or(HError::NonIntegralShift(subset))?[0];
        let hi = hi.to_integers().ok_or(HError::NonIntegralShift(subset))?[0];
        let series = KnotChiSeries::new(delta, lo)?;
        let conv = |b: BigInt| b.to_i64().ok_or(HError::CoefficientOverflow(subset));
        let sums = (lo..=hi).map(|x| conv(series.upward_sum(x))).collect::<Result<Vec<_>, _>>()?;
        let slope = conv(delta.eval_at_one())?;
        Ok(KnotSums { series, bottom: lo, top: hi, sums, slope })
    }

    fn upward(&self, x: i64) -> i64 {
        if x > self.top {
            0
        } else if x >= self.bottom {
            self.sums[(x - self.bottom) as usize]
        } else {
            self.sums[0] + (self.bottom - x) * self.slope
        }
    }

    fn radius(&self) -> i64 {
        self.top.abs().max(self.bottom.abs())
    }
}

#[derive(Clone, Debug)]
struct MultiTerms {
    subset: Subset,
    members: Vec<usize>,
    poly: LaurentPoly,
    terms: Vec<(Vec<i64>, i64)>,
    radius: i64,
}

impl MultiTerms {
    fn new(subset: Subset, tilde: LaurentPoly) -> Result<Self, HError> {
        let mut terms = Vec::with_capacity(tilde.len());
        let mut radius = 0;
        for (e, c) in tilde.terms() {
            let exp = e.to_integers().ok_or(HError::NonIntegralShift(subset))?;
            radius = exp.iter().fold(radius, |r, x| r.max(x.abs()));
            terms.push((exp, c.to_i64().ok_or(HError::CoefficientOverflow(subset))?));
        }
        Ok(MultiTerms { subset, members: subset.members(), poly: tilde, terms, radius })
    }

    fn negated(&self) -> Self {
        MultiTerms {
            poly: -self.poly.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    /// `Σ_{u ⪰ π_B(s + 1)} χ_B(u)`; `s` has full length.
    fn upward(&self, s: &[i64]) -> i64 {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().zip(&self.members).all(|(&u, &i)| u > s[i]))
            .map(|(_, c)| c)
            .sum()
    }
}

/// Closed-form H-function of one atomic link.
#[derive(Clone, Debug)]
struct AtomicH {
    n: usize,
    knots: Vec<KnotSums>,
    multi: Vec<MultiTerms>,
    signs: BTreeMap<Subset, SignChoice>,
}

impl AtomicH {
    fn raw(d: &LinkDescriptor) -> Result<Self, HError> {
        let Structure::Atomic(map) = &d.structure else {
            unreachable!("atomic parts only")
        };
        let n = d.n();
        let mut knots = Vec::with_capacity(n);
        let mut multi = Vec::new();
        for s in Subset::all_nonempty(n) {
            let delta = &map[&s];
            if s.len() == 1 {
                knots.push(KnotSums::new(delta, s)?);
            } else if !delta.is_zero() {
                let tilde = tilde_alexander(delta).map_err(|_| HError::NonIntegralShift(s))?;
                multi.push(MultiTerms::new(s, tilde)?);
            }
        }
        Ok(AtomicH { n, knots, multi, signs: BTreeMap::new() })
    }

    fn build(d: &LinkDescriptor, resolve: bool, force: bool) -> Result<Self, HError> {
        let mut h = Self::raw(d)?;
        for idx in 0..h.multi.len() {
            let subset = h.multi[idx].subset;
            let choice = if !resolve || h.sublink_valid(subset) {
                SignChoice::Stored
            } else {
                h.multi[idx] = h.multi[idx].negated();
                if h.sublink_valid(subset) {
                    SignChoice::Flipped
                } else if force {
                    h.multi[idx] = h.multi[idx].negated();
                    SignChoice::Unresolved
                } else {
                    return Err(HError::SignUnresolved(subset));
                }
            };
            h.signs.insert(subset, choice);
        }
        Ok(h)
    }

    fn radius_within(&self, b: Subset) -> i64 {
        let k = b.members().iter().map(|&i| self.knots[i].radius()).max().unwrap_or(0);
        self.multi.iter().filter(|m| m.subset.is_subset_of(b)).map(|m| m.radius).fold(k, i64::max)
    }

    fn radius(&self) -> i64 {
        self.radius_within(Subset::full(self.n))
    }

    /// H of the sublink `L_b`, reading only the coordinates in `b`.
    fn value_within(&self, b: Subset, s: &[i64]) -> i64 {
        let mut total = 0;
        for i in b.members() {
            total += self.knots[i].upward(s[i] + 1);
        }
        for m in &self.multi {
            if m.subset.is_subset_of(b) {
                let sign = if m.subset.len() % 2 == 1 { 1 } else { -1 };
                total += sign * m.upward(s);
            }
        }
        total
    }

    fn value(&self, s: &[i64]) -> i64 {
        self.value_within(Subset::full(self.n), s)
    }

    fn sublink_valid(&self, b: Subset) -> bool {
        let members = b.members();
        let radius = self.radius_within(b) + 2;
        let mut full = vec![0; self.n];
        let report = validate_values(members.len(), radius, |p| {
            for (k, &i) in members.iter().enumerate() {
                full[i] = p[k];
            }
            self.value_within(b, &full)
        });
        report.is_ok()
    }

    fn chi(&self, b: Subset, u: &[i64]) -> BigInt {
        if b.len() == 1 {
            return self.knots[b.members()[0]].series.coefficient(u[0]);
        }
        match self.multi.iter().find(|m| m.subset == b) {
            Some(m) => m.poly.coeff(&Exponent::from_integers(u)),
            None => BigInt::zero(),
        }
    }
}

/// H-function evaluator for an atomic link or a split union of atomic links.
#[derive(Clone, Debug)]
pub struct HFunction {
    n: usize,
    parts: Vec<(usize, AtomicH)>,
}

impl HFunction {
    /// Builds the evaluator, choosing the sign of each multivariable
    /// polynomial so that the H-function of every sublink is valid.
    pub fn new(d: &LinkDescriptor, force: bool) -> Result<Self, HError> {
        Self::build(d, true, force)
    }

    /// Uses the stored signs as given, without any validity check.
    pub fn with_stored_signs(d: &LinkDescriptor, force: bool) -> Result<Self, HError> {
        Self::build(d, false, force)
    }

    fn build(d: &LinkDescriptor, resolve: bool, force: bool) -> Result<Self, HError> {
        let violations = validate_descriptor(d);
        if !violations.is_empty() {
            return Err(HError::InvalidDescriptor(violations));
        }
        let mut parts = Vec::new();
        for (off, part) in d.parts() {
            if !part.lspace && !force {
                return Err(HError::NotLSpace(part.name.clone()));
            }
            parts.push((off, AtomicH::build(part, resolve, force)?));
        }
        Ok(HFunction { n: d.n(), parts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest absolute exponent over all `Δ̃` supports (knots: `Δ`).
    pub fn support_radius(&self) -> i64 {
        self.parts.iter().map(|(_, p)| p.radius()).max().unwrap_or(0)
    }

    /// Sign resolution record, keyed by subsets of the whole link.
    pub fn signs(&self) -> BTreeMap<Subset, SignChoice> {
        let mut out = BTreeMap::new();
        for (off, p) in &self.parts {
            for (s, c) in &p.signs {
                out.insert(Subset::from_bits(s.bits() << off), *c);
            }
        }
        out
    }

    pub fn big_h(&self, s: &[i64]) -> i64 {
        assert_eq!(s.len(), self.n, "dimension mismatch");
        self.parts.iter().map(|(off, p)| p.value(&s[*off..*off + p.n])).sum()
    }

    /// `H_O(s) = Σ max(0, −sᵢ)`, the H-function of the unlink.
    pub fn unlink_h(s: &[i64]) -> i64 {
        s.iter().map(|&x| (-x).max(0)).sum()
    }

    pub fn h(&self, s: &[i64]) -> i64 {
        self.big_h(s) - Self::unlink_h(s)
    }

    /// Coefficient of `t^u` in `Δ̃` of the sublink `b`; `u` has `|b|` entries.
    /// Split sublinks with several components have coefficient 0.
    pub fn chi(&self, b: Subset, u: &[i64]) -> BigInt {
        assert_eq!(u.len(), b.len(), "dimension mismatch");
        for (off, p) in &self.parts {
            let mask = Subset::full(p.n).bits() << off;
            if b.bits() & !mask == 0 {
                return p.chi(Subset::from_bits(b.bits() >> off), u);
            }
        }
        BigInt::zero()
    }

    /// `Σ_{B ⊆ [n]} (−1)^{|B|−1} H(s − e_B)`, the empty set included.
    pub fn chi_from_h(&self, s: &[i64]) -> i64 {
        let mut total = 0;
        let mut p = s.to_vec();
        for bits in 0..(1u32 << self.n) {
            for (i, x) in p.iter_mut().enumerate() {
                *x = s[i] - i64::from((bits >> i) & 1);
            }
            let sign = if bits.count_ones() % 2 == 1 { 1 } else { -1 };
            total += sign * self.big_h(&p);
        }
        total
    }
}

/// Options for tabulating an H-function.
#[derive(Clone, Debug, Default)]
pub struct HOptions {
    /// Largest genus coordinate the table must support; defaults to the
    /// support radius when no box radius is given.
    pub genus_margin: Option<i64>,
    /// Explicit box radius; must be at least the automatic minimum.
    pub radius: Option<i64>,
    /// Compute even without the L-space assertion or a resolvable sign.
    pub force: bool,
    /// Worker threads for the fill; 0 or 1 means sequential.
    pub jobs: usize,
}

/// Dense table of H on the box `[−M, M]ⁿ`.
#[derive(Clone, Debug)]
pub struct HTable {
    link: LinkDescriptor,
    func: HFunction,
    radius: i64,
    genus_margin: i64,
    values: Vec<i64>,
}

/// Iterates the points of `[−m, m]ⁿ` in row-major order (last coordinate fastest).
pub fn box_points(n: usize, m: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * m + 1) as usize;
    let total = side.pow(n as u32);
    (0..total).map(move |idx| decode(idx, n, m))
}

fn decode(mut idx: usize, n: usize, m: i64) -> Vec<i64> {
    let side = (2 * m + 1) as usize;
    let mut p = vec![0; n];
    for k in (0..n).rev() {
        p[k] = (idx % side) as i64 - m;
        idx /= side;
    }
    p
}

impl HTable {
    pub fn build(d: &LinkDescriptor, opts: &HOptions) -> Result<Self, HError> {
        let func = HFunction::new(d, opts.force)?;
        Self::from_function(d, func, opts)
    }

    /// Tabulates an already-built evaluator.
    pub fn from_function(d: &LinkDescriptor, func: HFunction, opts: &HOptions) -> Result<Self, HError> {
        let dr = func.support_radius();
        let (radius, genus_margin) = match (opts.radius, opts.genus_margin) {
            (None, g) => {
                let g = g.unwrap_or(dr).max(0);
                (dr + g + 2, g)
            }
            (Some(m), None) => {
                if m < dr + 2 {
                    return Err(HError::BoxTooSmall { requested: m, minimum: dr + 2 });
                }
                (m, m - dr - 2)
            }
            (Some(m), Some(g)) => {
                let g = g.max(0);
                if m < dr + g + 2 {
                    return Err(HError::BoxTooSmall { requested: m, minimum: dr + g + 2 });
                }
                (m, g)
            }
        };
        let n = func.n();
        let side = (2 * radius + 1) as usize;
        let total = side
            .checked_pow(n as u32)
            .filter(|&t| t <= MAX_TABLE_POINTS)
            .ok_or(HError::BoxTooLarge { n, radius })?;
        let mut values = vec![0i64; total];
        let jobs = opts.jobs.max(1);
        if jobs == 1 || total < 4096 {
            for (idx, v) in values.iter_mut().enumerate() {
                *v = func.big_h(&decode(idx, n, radius));
            }
        } else {
            let chunk = total.div_ceil(jobs);
            std::thread::scope(|scope| {
                for (c, slice) in values.chunks_mut(chunk).enumerate() {
                    let func = &func;
                    scope.spawn(move || {
                        for (k, v) in slice.iter_mut().enumerate() {
                            *v = func.big_h(&decode(c * chunk + k, n, radius));
                        }
                    });
                }
            });
        }
        Ok(HTable { link: d.clone(), func, radius, genus_margin, values })
    }

    pub fn link(&self) -> &LinkDescriptor {
        &self.link
    }

    pub fn function(&self) -> &HFunction {
        &self.func
    }

    pub fn n(&self) -> usize {
        self.func.n()
    }

    /// Box half-width `M`.
    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn support_radius(&self) -> i64 {
        self.func.support_radius()
    }

    pub fn genus_margin(&self) -> i64 {
        self.genus_margin
    }

    pub fn in_box(&self, s: &[i64]) -> bool {
        s.len() == self.n() && s.iter().all(|x| x.abs() <= self.radius)
    }

    fn index(&self, s: &[i64]) -> usize {
        let side = (2 * self.radius + 1) as usize;
        s.iter().fold(0, |acc, &x| acc * side + (x + self.radius) as usize)
    }

    /// H at any lattice point; off-box values are computed on demand.
    pub fn big_h(&self, s: &[i64]) -> i64 {
        if self.in_box(s) {
            self.values[self.index(s)]
        } else {
            self.func.big_h(s)
        }
    }

    pub fn h(&self, s: &[i64]) -> i64 {
        self.big_h(s) - HFunction::unlink_h(s)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> {
        box_points(self.n(), self.radius)
    }

    pub fn chi(&self, b: Subset, u: &[i64]) -> BigInt {
        self.func.chi(b, u)
    }

    pub fn chi_from_h(&self, s: &[i64]) -> i64 {
        let mut total = 0;
        let mut p = s.to_vec();
        for bits in 0..(1u32 << self.n()) {
            for (i, x) in p.iter_mut().enumerate() {
                *x = s[i] - i64::from((bits >> i) & 1);
            }
            let sign = if bits.count_ones() % 2 == 1 { 1 } else { -1 };
            total += sign * self.big_h(&p);
        }
        total
    }

    pub fn signs(&self) -> BTreeMap<Subset, SignChoice> {
        self.func.signs()
    }

    /// Checks nonnegativity, unit steps and stabilization on the box.
    pub fn validate(&self) -> ValidationReport {
        validate_values(self.n(), self.radius, |s| self.values[self.index(s)])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HIssue {
    Negative { s: Vec<i64>, value: i64 },
    Step { s: Vec<i64>, i: usize, diff: i64 },
    TopNonzero { s: Vec<i64>, value: i64 },
    NotStable { s: Vec<i64>, i: usize },
}

impl fmt::Display for HIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HIssue::Negative { s, value } => write!(f, "negative H({s:?}) = {value}"),
            HIssue::Step { s, i, diff } => {
                write!(f, "H(s - e{}) - H(s) = {diff} at s = {s:?}, expected 0 or 1", i + 1)
            }
            HIssue::TopNonzero { s, value } => write!(f, "H({s:?}) = {value} at the top corner, expected 0"),
            HIssue::NotStable { s, i } => write!(f, "H not constant in s{} at the box edge {s:?}", i + 1),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// First few issues found.
    pub issues: Vec<HIssue>,
    /// Total number of issues.
    pub count: usize,
}

impl ValidationReport {
    const KEEP: usize = 20;

    pub fn is_ok(&self) -> bool {
        self.count == 0
    }

    fn push(&mut self, issue: HIssue) {
        if self.issues.len() < Self::KEEP {
            self.issues.push(issue);
        }
        self.count += 1;
    }

    pub fn has_negative(&self) -> bool {
        self.issues.iter().any(|i| matches!(i, HIssue::Negative { .. }))
    }
}

/// Validates values of a would-be H-function on `[−m, m]ⁿ`.
pub fn validate_values(n: usize, m: i64, mut f: impl FnMut(&[i64]) -> i64) -> ValidationReport {
    let side = (2 * m + 1) as usize;
    let total = side.pow(n as u32);
    let vals: Vec<i64> = (0..total).map(|idx| f(&decode(idx, n, m))).collect();
    let stride = |i: usize| side.pow((n - 1 - i) as u32);
    let mut report = ValidationReport::default();
    for (idx, &v) in vals.iter().enumerate() {
        let s = decode(idx, n, m);
        if v < 0 {
            report.push(HIssue::Negative { s: s.clone(), value: v });
        }
        for i in 0..n {
            if s[i] > -m {
                let diff = vals[idx - stride(i)] - v;
                if diff != 0 && diff != 1 {
                    report.push(HIssue::Step { s: s.clone(), i, diff });
                }
            }
            if s[i] == m && vals[idx - stride(i)] != v {
                report.push(HIssue::NotStable { s: s.clone(), i });
            }
        }
        if s.iter().all(|&x| x >= m - 1) && v != 0 {
            report.push(HIssue::TopNonzero { s, value: v });
        }
    }
    report
}
