//! Exact multivariate Laurent polynomials over the integers.
//!
//! Exponents live in the half-integer lattice (½ℤ)ⁿ. They are stored doubled,
//! so `t^{1/2}` has stored exponent `1` and all arithmetic stays integral.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("exponent has {got} coordinates, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("cable parameters ({p}, {q}) must be coprime positive integers")]
    BadCableParameters { p: u32, q: u32 },
    #[error("substitution powers must be positive")]
    NonPositivePower,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    InexactDivision,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("no unit multiple of the polynomial is symmetric")]
    NotSymmetric,
    #[error("knot polynomial cannot be normalized to value 1 at t = 1 (value {0})")]
    KnotNormalization(BigInt),
    #[error("invalid exponent {0:?}: must be an integer or a half-integer")]
    BadExponent(String),
}

/// A point of (½ℤ)ⁿ, stored as doubled integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Vec<i64>);

impl Exponent {
    pub fn from_doubled(doubled: Vec<i64>) -> Self {
        Exponent(doubled)
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Exponent(coords.iter().map(|c| 2 * c).collect())
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn doubled(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|d| d % 2 == 0)
    }

    /// The exponent as an integer lattice point, if every coordinate is integral.
    pub fn to_integers(&self) -> Option<Vec<i64>> {
        self.is_integral().then(|| self.0.iter().map(|d| d / 2).collect())
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn negated(&self) -> Exponent {
        Exponent(self.0.iter().map(|d| -d).collect())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|&d| format_half(d)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Renders a doubled coordinate as `"3"` or `"-1/2"`.
pub fn format_half(doubled: i64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{doubled}/2")
    }
}

/// Parses `"3"`, `"-1/2"`, `"5/2"` into a doubled coordinate.
pub fn parse_half(s: &str) -> Result<i64, LaurentError> {
    let bad = || LaurentError::BadExponent(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<i64>().map(|v| 2 * v).map_err(|_| bad()),
        Some((num, den)) => {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            match den {
                1 => Ok(2 * num),
                2 => Ok(num),
                _ => Err(bad()),
            }
        }
    }
}

/// Integer-coefficient Laurent polynomial in `nvars` variables with
/// half-integer exponents. No zero coefficient is ever stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(nvars, c, Exponent::zero(nvars))
    }

    /// `c · t^e`. Panics if `e` has the wrong number of coordinates.
    pub fn monomial(nvars: usize, c: impl Into<BigInt>, e: Exponent) -> Self {
        assert_eq!(e.len(), nvars, "exponent length must match nvars");
        let mut p = Self::zero(nvars);
        p.add_term(e, c.into());
        p
    }

    /// `t_i^{doubled/2}`.
    pub fn variable_power(nvars: usize, i: usize, doubled: i64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = doubled;
        Self::monomial(nvars, 1, Exponent(e))
    }

    /// `t_i^{1/2} − t_i^{−1/2}`, the building block of the catalog polynomials.
    pub fn half_difference(nvars: usize, i: usize) -> Self {
        Self::variable_power(nvars, i, 1) - Self::variable_power(nvars, i, -1)
    }

    pub fn from_terms<I, C>(nvars: usize, terms: I) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (Exponent, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(LaurentError::ShapeMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(e, c.into());
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    fn leading(&self) -> Option<(&Exponent, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn check_same(&self, other: &LaurentPoly) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_same(other)?;
        let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(ea.add(eb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(LaurentPoly { nvars: self.nvars, terms: acc })
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `t^shift`.
    pub fn shift(&self, shift: &Exponent) -> LaurentPoly {
        assert_eq!(shift.len(), self.nvars);
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.add(shift), c.clone())).collect(),
        }
    }

    /// `f(t_1^{p_1}, …, t_n^{p_n})`.
    pub fn substitute_powers(&self, powers: &[u32]) -> Result<LaurentPoly, LaurentError> {
        if powers.len() != self.nvars {
            return Err(LaurentError::ShapeMismatch { expected: self.nvars, got: powers.len() });
        }
        if powers.contains(&0) {
            return Err(LaurentError::NonPositivePower);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let scaled = e.0.iter().zip(powers).map(|(d, &p)| d * i64::from(p)).collect();
                (Exponent(scaled), c.clone())
            })
            .collect();
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    /// `f(t_1^{-1}, …, t_n^{-1})`.
    pub fn involution(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.negated(), c.clone())).collect(),
        }
    }

    /// Value at `t_1 = … = t_n = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Componentwise minimum and maximum of the support (doubled coordinates).
    pub fn support_box(&self) -> Result<(Exponent, Exponent), LaurentError> {
        let mut it = self.terms.keys();
        let first = it.next().ok_or(LaurentError::ZeroPolynomial)?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for e in it {
            for (i, &d) in e.0.iter().enumerate() {
                lo[i] = lo[i].min(d);
                hi[i] = hi[i].max(d);
            }
        }
        Ok((Exponent(lo), Exponent(hi)))
    }

    /// Largest absolute coordinate over the support, in doubled units.
    pub fn max_abs_doubled(&self) -> i64 {
        self.terms.keys().flat_map(|e| e.0.iter().map(|d| d.abs())).max().unwrap_or(0)
    }

    /// Exact quotient `self / divisor`, failing if the remainder is nonzero.
    ///
    /// Leading-term elimination in lexicographic order. The quotient's support
    /// box is forced to be `box(f) − box(g)` (Newton polytope faces multiply),
    /// so any candidate term outside it proves the division inexact and the
    /// loop terminates.
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check_same(divisor)?;
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        let (flo, fhi) = self.support_box()?;
        let (glo, ghi) = divisor.support_box()?;
        let qlo = flo.sub(&glo);
        let qhi = fhi.sub(&ghi);
        if qlo.0.iter().zip(&qhi.0).any(|(a, b)| a > b) {
            return Err(LaurentError::InexactDivision);
        }
        let (gexp, gcoef) = divisor.leading().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rexp, rcoef)) = rem.leading() {
            let e = rexp.sub(&gexp);
            let inside = e.0.iter().enumerate().all(|(i, &d)| qlo.0[i] <= d && d <= qhi.0[i]);
            if !inside {
                return Err(LaurentError::InexactDivision);
            }
            let (c, r) = rcoef.div_rem(&gcoef);
            if !r.is_zero() {
                return Err(LaurentError::InexactDivision);
            }
            let step = Self::monomial(self.nvars, c, e);
            rem = rem.try_sub(&step.try_mul(divisor)?)?;
            quot = quot.try_add(&step)?;
        }
        Ok(quot)
    }

    /// Re-centres `self` by a unit `±t^a` so that inverting every variable
    /// multiplies it by `(−1)^nvars` (by 1 for a single variable).
    ///
    /// One-variable inputs additionally get the sign with value 1 at `t = 1`.
    /// For several variables both signs are symmetric and the input sign is
    /// kept; callers resolve it from the H-function.
    pub fn normalize_symmetric(&self) -> Result<LaurentPoly, LaurentError> {
        let (lo, hi) = self.support_box()?;
        let mut shift = Vec::with_capacity(self.nvars);
        for (a, b) in lo.0.iter().zip(&hi.0) {
            let s = a + b;
            if s % 2 != 0 {
                return Err(LaurentError::NotSymmetric);
            }
            shift.push(-s / 2);
        }
        let centred = self.shift(&Exponent(shift));
        let inv = centred.involution();
        let expected = if self.symmetry_sign() > 0 { centred.clone() } else { -centred.clone() };
        if inv != expected {
            return Err(LaurentError::NotSymmetric);
        }
        if self.nvars == 1 {
            let v = centred.eval_at_one();
            if v.is_one() {
                return Ok(centred);
            }
            if (-&v).is_one() {
                return Ok(-centred);
            }
            return Err(LaurentError::KnotNormalization(v));
        }
        Ok(centred)
    }

    /// True if `self` already satisfies `f(t^{-1}) = ±f(t)` with the sign above.
    pub fn is_symmetric(&self) -> bool {
        let inv = self.involution();
        if self.symmetry_sign() > 0 {
            inv == *self
        } else {
            inv == -self.clone()
        }
    }

    /// `(−1)^n` for links with `n ≥ 2` components; knots are palindromic.
    fn symmetry_sign(&self) -> i32 {
        if self.nvars == 1 || self.nvars.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// `Σ_{j=0}^{p−1} t^{q(p−1−2j)/2}`, the quotient
/// `(t^{pq/2} − t^{−pq/2}) / (t^{q/2} − t^{−q/2})` in one variable.
pub fn geometric_cable_factor(p: u32, q: u32) -> Result<LaurentPoly, LaurentError> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(LaurentError::BadCableParameters { p, q });
    }
    let (p, q) = (i64::from(p), i64::from(q));
    let terms = (0..p).map(|j| (Exponent(vec![q * (p - 1 - 2 * j)]), 1));
    LaurentPoly::from_terms(1, terms)
}

/// Lifts a one-variable polynomial to variable `i` of an `nvars`-variable ring.
pub fn embed_variable(f: &LaurentPoly, nvars: usize, i: usize) -> LaurentPoly {
    assert_eq!(f.nvars(), 1);
    let terms = f.terms().map(|(e, c)| {
        let mut v = vec![0; nvars];
        v[i] = e.0[0];
        (Exponent(v), c.clone())
    });
    LaurentPoly::from_terms(nvars, terms).expect("lengths match")
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

// Operator forms panic on a variable-count mismatch; use the `try_*` methods
// where the shapes come from untrusted input.
macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$try(&rhs).expect("variable count mismatch")
            }
        }
        impl<'a> $tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                self.$try(rhs).expect("variable count mismatch")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &d)| d != 0)
                .map(|(i, &d)| {
                    let var = if self.nvars == 1 { "t".to_string() } else { format!("t{}", i + 1) };
                    if d == 2 {
                        var
                    } else if d % 2 == 0 {
                        format!("{var}^{}", d / 2)
                    } else {
                        format!("{var}^({d}/2)")
                    }
                })
                .collect();
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

/// `Δ(t) / (1 − t^{−1})` for a one-variable Δ with integral exponents,
/// expanded as `Δ · (1 + t^{−1} + t^{−2} + …)`.
///
/// The coefficient at degree `d` is the tail sum `Σ_{u ≥ d} Δ_u`; it vanishes
/// above `deg Δ` and is constant (equal to `Δ(1)`) below the bottom degree.
/// Coefficients are materialized from the top degree down to a floor.
#[derive(Clone, Debug)]
pub struct KnotChiSeries {
    poly: LaurentPoly,
    top: i64,
    floor: i64,
    // tails[k] is the coefficient at degree top - k
    tails: Vec<BigInt>,
    below: BigInt,
}

impl KnotChiSeries {
    pub fn new(delta: &LaurentPoly, floor: i64) -> Result<Self, LaurentError> {
        if delta.nvars() != 1 {
            return Err(LaurentError::ShapeMismatch { expected: 1, got: delta.nvars() });
        }
        let (lo, hi) = delta.support_box()?;
        if !lo.is_integral() || !hi.is_integral() || !delta.terms().all(|(e, _)| e.is_integral()) {
            return Err(LaurentError::BadExponent(lo.to_string()));
        }
        let (bottom, top) = (lo.0[0] / 2, hi.0[0] / 2);
        let floor = floor.min(bottom);
        let mut tails = Vec::with_capacity((top - floor + 1) as usize);
        let mut acc = BigInt::zero();
        for d in (floor..=top).rev() {
            acc += delta.coeff(&Exponent(vec![2 * d]));
            tails.push(acc.clone());
        }
        Ok(KnotChiSeries { poly: delta.clone(), top, floor, tails, below: acc })
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.poly
    }

    pub fn top_degree(&self) -> i64 {
        self.top
    }

    pub fn coefficient(&self, d: i64) -> BigInt {
        if d > self.top {
            BigInt::zero()
        } else if d >= self.floor {
            self.tails[(self.top - d) as usize].clone()
        } else {
            self.below.clone()
        }
    }

    /// `Σ_{u ≥ x} coefficient(u)`, a finite sum.
    pub fn upward_sum(&self, x: i64) -> BigInt {
        if x > self.top {
            return BigInt::zero();
        }
        let mut acc = BigInt::zero();
        let start = x.max(self.floor);
        for d in start..=self.top {
            acc += &self.tails[(self.top - d) as usize];
        }
        if x < self.floor {
            acc += &self.below * BigInt::from(self.floor - x);
        }
        acc
    }
}
