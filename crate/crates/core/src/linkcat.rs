//! Link descriptors: components with vanishing pairwise linking numbers and
//! the symmetrized Alexander polynomial of every nonempty sublink.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cable::{cable_alexander, CableSpec};
use crate::laurent::{format_half, parse_half, Exponent, LaurentError, LaurentPoly};

/// Nonempty set of component indices, stored as a bitmask over 0-based indices.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Subset(u32);

impl Subset {
    pub const MAX_COMPONENTS: usize = 16;

    pub fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Subset(indices.iter().fold(0, |acc, &i| acc | (1 << i)))
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn full(n: usize) -> Self {
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    /// Members in increasing order, 0-based.
    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// Nonempty subsets of `{0..n}`, ordered by size then by members.
    pub fn all_nonempty(n: usize) -> Vec<Subset> {
        let mut v: Vec<Subset> = (1..(1u64 << n)).map(|b| Subset(b as u32)).collect();
        v.sort_by_key(|s| (s.len(), s.members()));
        v
    }

    /// Nonempty subsets of `self`, ordered by size then by members.
    pub fn nonempty_subsets(self) -> Vec<Subset> {
        let members = self.members();
        Subset::all_nonempty(members.len())
            .into_iter()
            .map(|local| Subset::from_indices(&local.members().iter().map(|&k| members[k]).collect::<Vec<_>>()))
            .collect()
    }

    /// Re-index `self ⊆ parent` to positions within `parent`.
    pub fn relative_to(self, parent: Subset) -> Subset {
        let pm = parent.members();
        Subset::from_indices(
            &self.members().iter().map(|i| pm.iter().position(|p| p == i).expect("subset")).collect::<Vec<_>>(),
        )
    }

    /// `"1,3"`: 1-based, comma-joined.
    pub fn key(self) -> String {
        self.members().iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_key(key: &str, n: usize) -> Option<Subset> {
        let mut bits = 0u32;
        for part in key.split(',') {
            let i: usize = part.trim().parse().ok()?;
            if i == 0 || i > n || bits & (1 << (i - 1)) != 0 {
                return None;
            }
            bits |= 1 << (i - 1);
        }
        (bits != 0).then_some(Subset(bits))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub label: String,
    /// Known 4-genus of the component knot, if any.
    pub g4: Option<u32>,
}

impl Component {
    pub fn new(label: impl Into<String>, g4: Option<u32>) -> Self {
        Component { label: label.into(), g4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    /// Polynomial data for every nonempty sublink; polynomial for subset `B`
    /// has `|B|` variables in increasing component order.
    Atomic(BTreeMap<Subset, LaurentPoly>),
    /// Split link. Parts are atomic and listed in component order.
    DisjointUnion(Vec<LinkDescriptor>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDescriptor {
    pub name: String,
    pub components: Vec<Component>,
    pub linking: Vec<Vec<i64>>,
    /// The caller vouches that the link is an L-space link.
    pub lspace: bool,
    pub structure: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoComponents,
    TooManyComponents(usize),
    LinkingShape,
    NonzeroLinking { i: usize, j: usize, value: i64 },
    IncompleteSublinkData(Subset),
    VariableCount { subset: Subset, expected: usize, got: usize },
    NotSymmetric(Subset),
    KnotNotNormalized(Subset),
    ZeroKnotPolynomial(Subset),
    ComponentMismatch,
    NestedUnion,
    Part { index: usize, violation: Box<Violation> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoComponents => write!(f, "link has no components"),
            Violation::TooManyComponents(n) => write!(f, "too many components: {n}"),
            Violation::LinkingShape => write!(f, "linking matrix has the wrong shape"),
            Violation::NonzeroLinking { i, j, value } => {
                write!(f, "nonzero linking number lk({},{}) = {value}", i + 1, j + 1)
            }
            Violation::IncompleteSublinkData(s) => write!(f, "incomplete sublink data: missing {s}"),
            Violation::VariableCount { subset, expected, got } => {
                write!(f, "polynomial for {subset} has {got} variables, expected {expected}")
            }
            Violation::NotSymmetric(s) => write!(f, "polynomial for {s} is not symmetrized"),
            Violation::KnotNotNormalized(s) => {
                write!(f, "knot polynomial for {s} is not normalized (symmetric with value 1 at t = 1)")
            }
            Violation::ZeroKnotPolynomial(s) => write!(f, "knot polynomial for {s} is zero"),
            Violation::ComponentMismatch => write!(f, "components do not match the disjoint-union parts"),
            Violation::NestedUnion => write!(f, "disjoint-union parts must be atomic"),
            Violation::Part { index, violation } => write!(f, "part {}: {violation}", index + 1),
        }
    }
}

impl LinkDescriptor {
    /// Atomic descriptor with zero linking matrix.
    pub fn atomic(
        name: impl Into<String>,
        components: Vec<Component>,
        alexander: BTreeMap<Subset, LaurentPoly>,
        lspace: bool,
    ) -> Self {
        let n = components.len();
        LinkDescriptor {
            name: name.into(),
            components,
            linking: vec![vec![0; n]; n],
            lspace,
            structure: Structure::Atomic(alexander),
        }
    }

    pub fn knot(name: impl Into<String>, label: impl Into<String>, g4: Option<u32>, delta: LaurentPoly) -> Self {
        let mut map = BTreeMap::new();
        map.insert(Subset::singleton(0), delta);
        Self::atomic(name, vec![Component::new(label, g4)], map, true)
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.structure, Structure::Atomic(_))
    }

    /// Stored polynomial for `subset` (atomic descriptors only).
    pub fn alexander(&self, subset: Subset) -> Option<&LaurentPoly> {
        match &self.structure {
            Structure::Atomic(map) => map.get(&subset),
            Structure::DisjointUnion(_) => None,
        }
    }

    /// Atomic parts with their component offsets.
    pub fn parts(&self) -> Vec<(usize, &LinkDescriptor)> {
        match &self.structure {
            Structure::Atomic(_) => vec![(0, self)],
            Structure::DisjointUnion(parts) => {
                let mut off = 0;
                parts
                    .iter()
                    .map(|p| {
                        let o = off;
                        off += p.n();
                        (o, p)
                    })
                    .collect()
            }
        }
    }

    /// Same link data, ignoring the display name.
    pub fn same_link(&self, other: &LinkDescriptor) -> bool {
        if self.components != other.components || self.linking != other.linking || self.lspace != other.lspace {
            return false;
        }
        match (&self.structure, &other.structure) {
            (Structure::Atomic(a), Structure::Atomic(b)) => a == b,
            (Structure::DisjointUnion(a), Structure::DisjointUnion(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_link(y))
            }
            _ => false,
        }
    }

    /// Replaces the polynomial for `subset` (atomic only).
    pub fn with_alexander(mut self, subset: Subset, poly: LaurentPoly) -> Self {
        if let Structure::Atomic(map) = &mut self.structure {
            map.insert(subset, poly);
        }
        self
    }
}

/// Checks the standing hypotheses; an empty list means valid.
pub fn validate_descriptor(d: &LinkDescriptor) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = d.n();
    if n == 0 {
        out.push(Violation::NoComponents);
        return out;
    }
    if n > Subset::MAX_COMPONENTS {
        out.push(Violation::TooManyComponents(n));
        return out;
    }
    if d.linking.len() != n || d.linking.iter().any(|row| row.len() != n) {
        out.push(Violation::LinkingShape);
    } else {
        for i in 0..n {
            for j in 0..n {
                if d.linking[i][j] != 0 && (i <= j) {
                    out.push(Violation::NonzeroLinking { i, j, value: d.linking[i][j] });
                }
            }
        }
    }
    match &d.structure {
        Structure::Atomic(map) => {
            for s in Subset::all_nonempty(n) {
                let Some(p) = map.get(&s) else {
                    out.push(Violation::IncompleteSublinkData(s));
                    continue;
                };
                if p.nvars() != s.len() {
                    out.push(Violation::VariableCount { subset: s, expected: s.len(), got: p.nvars() });
                    continue;
                }
                if s.len() == 1 {
                    if p.is_zero() {
                        out.push(Violation::ZeroKnotPolynomial(s));
                    } else if p.normalize_symmetric().ok().as_ref() != Some(p) {
                        out.push(Violation::KnotNotNormalized(s));
                    }
                } else if !p.is_zero() && !p.is_symmetric() {
                    out.push(Violation::NotSymmetric(s));
                }
            }
        }
        Structure::DisjointUnion(parts) => {
            let joined: Vec<Component> = parts.iter().flat_map(|p| p.components.iter().cloned()).collect();
            if joined != d.components {
                out.push(Violation::ComponentMismatch);
            }
            for (index, part) in parts.iter().enumerate() {
                if !part.is_atomic() {
                    out.push(Violation::NestedUnion);
                }
                for v in validate_descriptor(part) {
                    out.push(Violation::Part { index, violation: Box::new(v) });
                }
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkError {
    #[error("empty sublink")]
    EmptySublink,
    #[error("subset {0} exceeds the component count")]
    SubsetOutOfRange(Subset),
    #[error("unknown catalog key {0:?}")]
    UnknownKey(String),
    #[error("invalid catalog parameters for {key}: {reason}")]
    BadParams { key: String, reason: String },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Cable(#[from] crate::cable::CableError),
}

/// Descriptor for the sublink `L_B`.
pub fn sublink(d: &LinkDescriptor, b: Subset) -> Result<LinkDescriptor, LinkError> {
    if b.is_empty() {
        return Err(LinkError::EmptySublink);
    }
    if !b.is_subset_of(Subset::full(d.n())) {
        return Err(LinkError::SubsetOutOfRange(b));
    }
    if b == Subset::full(d.n()) {
        return Ok(d.clone());
    }
    match &d.structure {
        Structure::Atomic(map) => {
            let members = b.members();
            let components: Vec<Component> = members.iter().map(|&i| d.components[i].clone()).collect();
            let name = format!("{}[{}]", d.name, b.key());
            let mut sub = BTreeMap::new();
            for c in b.nonempty_subsets() {
                if let Some(p) = map.get(&c) {
                    sub.insert(c.relative_to(b), p.clone());
                }
            }
            let split = b.len() >= 2
                && sub.iter().filter(|(s, _)| s.len() >= 2).all(|(_, p)| p.is_zero());
            if split {
                let parts = members
                    .iter()
                    .map(|&i| {
                        let mut m = BTreeMap::new();
                        if let Some(p) = map.get(&Subset::singleton(i)) {
                            m.insert(Subset::singleton(0), p.clone());
                        }
                        let label = d.components[i].label.clone();
                        LinkDescriptor::atomic(
                            format!("{}[{}]", d.name, i + 1),
                            vec![d.components[i].clone()],
                            m,
                            d.lspace,
                        )
                        .renamed_if_empty(&label)
                    })
                    .collect();
                return Ok(union_of(name, parts));
            }
            Ok(LinkDescriptor::atomic(name, components, sub, d.lspace))
        }
        Structure::DisjointUnion(parts) => {
            let mut kept = Vec::new();
            let mut off = 0;
            for p in parts {
                let local = Subset::from_bits((b.bits() >> off) & Subset::full(p.n()).bits());
                if !local.is_empty() {
                    kept.push(sublink(p, local)?);
                }
                off += p.n();
            }
            if kept.len() == 1 {
                return Ok(kept.pop().unwrap());
            }
            Ok(union_of(format!("{}[{}]", d.name, b.key()), kept))
        }
    }
}

impl LinkDescriptor {
    fn renamed_if_empty(mut self, label: &str) -> Self {
        if self.name.is_empty() {
            self.name = label.to_string();
        }
        self
    }
}

fn flatten(d: &LinkDescriptor) -> Vec<LinkDescriptor> {
    match &d.structure {
        Structure::Atomic(_) => vec![d.clone()],
        Structure::DisjointUnion(parts) => parts.iter().flat_map(flatten).collect(),
    }
}

fn union_of(name: String, parts: Vec<LinkDescriptor>) -> LinkDescriptor {
    let parts: Vec<LinkDescriptor> = parts.iter().flat_map(flatten).collect();
    let components: Vec<Component> = parts.iter().flat_map(|p| p.components.iter().cloned()).collect();
    let n = components.len();
    LinkDescriptor {
        name,
        lspace: parts.iter().all(|p| p.lspace),
        components,
        linking: vec![vec![0; n]; n],
        structure: Structure::DisjointUnion(parts),
    }
}

/// Split union `a ⊔ b`; components of `b` follow those of `a`.
pub fn disjoint_union(a: &LinkDescriptor, b: &LinkDescriptor) -> LinkDescriptor {
    union_of(format!("{}+{}", a.name, b.name), vec![a.clone(), b.clone()])
}

// ---------------------------------------------------------------------------
// Catalog

pub fn trefoil_polynomial() -> LaurentPoly {
    LaurentPoly::variable_power(1, 0, 2) - LaurentPoly::one(1) + LaurentPoly::variable_power(1, 0, -2)
}

pub fn unknot() -> LinkDescriptor {
    LinkDescriptor::knot("unknot", "unknot", Some(0), LaurentPoly::one(1))
}

pub fn trefoil() -> LinkDescriptor {
    LinkDescriptor::knot("trefoil_rh", "trefoil", Some(1), trefoil_polynomial())
}

pub fn unlink(n: usize) -> LinkDescriptor {
    if n == 1 {
        return unknot();
    }
    let parts = (0..n)
        .map(|i| LinkDescriptor::knot(format!("unknot{}", i + 1), format!("unknot{}", i + 1), Some(0), LaurentPoly::one(1)))
        .collect();
    union_of(format!("unlink({n})"), parts)
}

/// `(−1)^k Σ_{|i+1/2|+|j+1/2| ≤ k} (−1)^{i+j} t₁^{i+1/2} t₂^{j+1/2}`.
pub fn two_bridge_polynomial(k: u32) -> LaurentPoly {
    let k = i64::from(k);
    let mut terms = Vec::new();
    for i in -k - 1..=k {
        for j in -k - 1..=k {
            // doubled: |2i+1| + |2j+1| <= 2k
            let (a, b) = (2 * i + 1, 2 * j + 1);
            if a.abs() + b.abs() <= 2 * k {
                let sign = if (i + j + k).rem_euclid(2) == 0 { 1 } else { -1 };
                terms.push((Exponent::from_doubled(vec![a, b]), sign));
            }
        }
    }
    LaurentPoly::from_terms(2, terms).expect("two variables")
}

fn two_unknots() -> Vec<Component> {
    vec![Component::new("unknot1", Some(0)), Component::new("unknot2", Some(0))]
}

pub fn two_bridge(k: u32) -> LinkDescriptor {
    let mut m = BTreeMap::new();
    m.insert(Subset::singleton(0), LaurentPoly::one(1));
    m.insert(Subset::singleton(1), LaurentPoly::one(1));
    m.insert(Subset::full(2), two_bridge_polynomial(k));
    LinkDescriptor::atomic(format!("two_bridge({k})"), two_unknots(), m, true)
}

pub fn whitehead() -> LinkDescriptor {
    let mut d = two_bridge(1);
    d.name = "whitehead".into();
    d
}

pub fn borromean() -> LinkDescriptor {
    let mut m = BTreeMap::new();
    for s in Subset::all_nonempty(3) {
        let p = match s.len() {
            1 => LaurentPoly::one(1),
            2 => LaurentPoly::zero(2),
            _ => {
                LaurentPoly::half_difference(3, 0)
                    * LaurentPoly::half_difference(3, 1)
                    * LaurentPoly::half_difference(3, 2)
            }
        };
        m.insert(s, p);
    }
    let comps = (1..=3).map(|i| Component::new(format!("unknot{i}"), Some(0))).collect();
    LinkDescriptor::atomic("borromean", comps, m, true)
}

/// Mirror of L7a3. The trefoil factor `(t₂ + t₂⁻¹)` sits on the second
/// variable, so component 2 is the right-handed trefoil.
pub fn mirror_l7a3() -> LinkDescriptor {
    let t2_sum = LaurentPoly::variable_power(2, 1, 2) + LaurentPoly::variable_power(2, 1, -2);
    let delta = -(LaurentPoly::half_difference(2, 0) * LaurentPoly::half_difference(2, 1) * t2_sum);
    let mut m = BTreeMap::new();
    m.insert(Subset::singleton(0), LaurentPoly::one(1));
    m.insert(Subset::singleton(1), trefoil_polynomial());
    m.insert(Subset::full(2), delta);
    let comps = vec![Component::new("unknot", Some(0)), Component::new("trefoil", Some(1))];
    LinkDescriptor::atomic("mirror_L7a3", comps, m, true)
}

/// Catalog keys with parameter hints.
pub const CATALOG_KEYS: &[(&str, &str, &str)] = &[
    ("unknot", "", "the unknot"),
    ("trefoil_rh", "", "right-handed trefoil"),
    ("unlink", "n", "n-component unlink (split)"),
    ("two_bridge", "k", "two-bridge link b(4k^2+4k, -2k-1)"),
    ("whitehead", "", "Whitehead link (two_bridge with k = 1)"),
    ("borromean", "", "Borromean rings"),
    ("mirror_L7a3", "", "mirror of L7a3; component 2 is the trefoil"),
    ("whitehead_cable", "p,q", "(p,q)-cable on the first Whitehead component"),
    ("two_bridge_cable", "k,p1,q1,p2,q2", "both components of two_bridge(k) cabled"),
];

fn parse_params(key: &str, raw: &str) -> Result<Vec<u32>, LinkError> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|s| {
            s.trim().parse::<u32>().map_err(|_| LinkError::BadParams {
                key: key.to_string(),
                reason: format!("{s:?} is not a nonnegative integer"),
            })
        })
        .collect()
}

/// Looks up `key` with parameters, e.g. `catalog("two_bridge", &[3])`.
pub fn catalog(key: &str, params: &[u32]) -> Result<LinkDescriptor, LinkError> {
    let bad = |reason: &str| LinkError::BadParams { key: key.to_string(), reason: reason.to_string() };
    let arity = |k: usize| -> Result<(), LinkError> {
        if params.len() == k {
            Ok(())
        } else {
            Err(bad(&format!("expected {k} parameter(s), got {}", params.len())))
        }
    };
    match key {
        "unknot" => arity(0).map(|_| unknot()),
        "trefoil_rh" | "trefoil" => arity(0).map(|_| trefoil()),
        "unlink" => {
            arity(1)?;
            if params[0] == 0 || params[0] as usize > Subset::MAX_COMPONENTS {
                return Err(bad("n must be between 1 and 16"));
            }
            Ok(unlink(params[0] as usize))
        }
        "two_bridge" => {
            arity(1)?;
            if params[0] == 0 {
                return Err(bad("k must be positive"));
            }
            Ok(two_bridge(params[0]))
        }
        "whitehead" => arity(0).map(|_| whitehead()),
        "borromean" => arity(0).map(|_| borromean()),
        "mirror_L7a3" | "mirror_l7a3" => arity(0).map(|_| mirror_l7a3()),
        "whitehead_cable" => {
            arity(2)?;
            let spec = CableSpec::new(vec![(params[0], params[1]), (1, 1)]).map_err(|e| bad(&e.to_string()))?;
            let mut d = cable_alexander(&whitehead(), &spec)?.link;
            d.name = format!("whitehead_cable({},{})", params[0], params[1]);
            Ok(d)
        }
        "two_bridge_cable" => {
            arity(5)?;
            if params[0] == 0 {
                return Err(bad("k must be positive"));
            }
            let spec = CableSpec::new(vec![(params[1], params[2]), (params[3], params[4])])
                .map_err(|e| bad(&e.to_string()))?;
            let mut d = cable_alexander(&two_bridge(params[0]), &spec)?.link;
            d.name = format!(
                "two_bridge_cable({},{},{},{},{})",
                params[0], params[1], params[2], params[3], params[4]
            );
            Ok(d)
        }
        _ => Err(LinkError::UnknownKey(key.to_string())),
    }
}

/// Parses `KEY`, `KEY:1,2` or `KEY(1,2)` and builds the descriptor.
pub fn catalog_from_spec(spec: &str) -> Result<LinkDescriptor, LinkError> {
    let spec = spec.trim();
    let (key, raw) = if let Some((k, rest)) = spec.split_once(':') {
        (k, rest)
    } else if let Some((k, rest)) = spec.split_once('(') {
        (k, rest.trim_end_matches(')'))
    } else {
        (spec, "")
    };
    let params = parse_params(key, raw)?;
    catalog(key.trim(), &params)
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation failure: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTerm {
    exp: Vec<String>,
    coef: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonComponent {
    label: String,
    g4: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum JsonStructure {
    Atomic,
    DisjointUnion(Vec<JsonLink>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonLink {
    name: String,
    components: Vec<JsonComponent>,
    linking: Vec<Vec<i64>>,
    lspace: bool,
    #[serde(default)]
    alexander: BTreeMap<String, Vec<JsonTerm>>,
    structure: JsonStructure,
}

fn coef_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

fn coef_from_json(v: &serde_json::Value) -> Result<BigInt, JsonError> {
    let bad = || JsonError::Schema(format!("coefficient {v} is not an integer"));
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
        serde_json::Value::String(s) => s.parse::<BigInt>().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn to_json_link(d: &LinkDescriptor) -> JsonLink {
    let (alexander, structure) = match &d.structure {
        Structure::Atomic(map) => {
            let alex = map
                .iter()
                .map(|(s, p)| {
                    let terms = p
                        .terms()
                        .map(|(e, c)| JsonTerm {
                            exp: e.doubled().iter().map(|&x| format_half(x)).collect(),
                            coef: coef_to_json(c),
                        })
                        .collect();
                    (s.key(), terms)
                })
                .collect();
            (alex, JsonStructure::Atomic)
        }
        Structure::DisjointUnion(parts) => {
            (BTreeMap::new(), JsonStructure::DisjointUnion(parts.iter().map(to_json_link).collect()))
        }
    };
    JsonLink {
        name: d.name.clone(),
        components: d.components.iter().map(|c| JsonComponent { label: c.label.clone(), g4: c.g4 }).collect(),
        linking: d.linking.clone(),
        lspace: d.lspace,
        alexander,
        structure,
    }
}

fn from_json_link(j: JsonLink) -> Result<LinkDescriptor, JsonError> {
    let n = j.components.len();
    if n == 0 || n > Subset::MAX_COMPONENTS {
        return Err(JsonError::Schema(format!("component count {n} out of range")));
    }
    let components: Vec<Component> = j.components.into_iter().map(|c| Component { label: c.label, g4: c.g4 }).collect();
    let structure = match j.structure {
        JsonStructure::Atomic => {
            let mut map = BTreeMap::new();
            for (key, terms) in j.alexander {
                let s = Subset::parse_key(&key, n)
                    .ok_or_else(|| JsonError::Schema(format!("bad subset key {key:?}")))?;
                let mut parsed = Vec::with_capacity(terms.len());
                for t in terms {
                    if t.exp.len() != s.len() {
                        return Err(JsonError::Schema(format!(
                            "exponent for subset {key:?} has {} entries, expected {}",
                            t.exp.len(),
                            s.len()
                        )));
                    }
                    let exp = t
                        .exp
                        .iter()
                        .map(|x| parse_half(x))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| JsonError::Schema(e.to_string()))?;
                    parsed.push((Exponent::from_doubled(exp), coef_from_json(&t.coef)?));
                }
                let p = LaurentPoly::from_terms(s.len(), parsed).map_err(|e| JsonError::Schema(e.to_string()))?;
                map.insert(s, p);
            }
            Structure::Atomic(map)
        }
        JsonStructure::DisjointUnion(parts) => {
            if !j.alexander.is_empty() {
                return Err(JsonError::Schema("disjoint unions carry polynomial data in their parts only".into()));
            }
            Structure::DisjointUnion(parts.into_iter().map(from_json_link).collect::<Result<_, _>>()?)
        }
    };
    Ok(LinkDescriptor { name: j.name, components, linking: j.linking, lspace: j.lspace, structure })
}

/// Canonical JSON text (sorted keys, trailing newline).
pub fn to_json_string(d: &LinkDescriptor) -> String {
    let v = serde_json::to_value(to_json_link(d)).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn to_json_value(d: &LinkDescriptor) -> serde_json::Value {
    serde_json::to_value(to_json_link(d)).expect("serializable")
}

/// Parses and validates a descriptor.
pub fn from_json_str(text: &str) -> Result<LinkDescriptor, JsonError> {
    let j: JsonLink = serde_json::from_str(text)?;
    let d = from_json_link(j)?;
    let violations = validate_descriptor(&d);
    if !violations.is_empty() {
        return Err(JsonError::Validation(violations));
    }
    Ok(d)
}

pub fn load_json(path: impl AsRef<Path>) -> Result<LinkDescriptor, JsonError> {
    from_json_str(&std::fs::read_to_string(path)?)
}

pub fn save_json(d: &LinkDescriptor, path: impl AsRef<Path>) -> Result<(), JsonError> {
    std::fs::write(path, to_json_string(d))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unlink_atomic(n: usize) -> LinkDescriptor {
        let mut m = BTreeMap::new();
        for s in Subset::all_nonempty(n) {
            let p = if s.len() == 1 { LaurentPoly::one(1) } else { LaurentPoly::zero(s.len()) };
            m.insert(s, p);
        }
        let comps = (0..n).map(|i| Component::new(format!("u{i}"), Some(0))).collect();
        LinkDescriptor::atomic("unlink", comps, m, true)
    }

    #[test]
    fn subsets() {
        let s = Subset::from_indices(&[0, 2]);
        assert_eq!(s.key(), "1,3");
        assert_eq!(Subset::parse_key("1,3", 3), Some(s));
        assert_eq!(Subset::parse_key("1,4", 3), None);
        assert_eq!(Subset::parse_key("1,1", 3), None);
        assert_eq!(Subset::all_nonempty(3).len(), 7);
        assert_eq!(Subset::all_nonempty(3)[3], Subset::from_indices(&[0, 1]));
        assert_eq!(s.nonempty_subsets().len(), 3);
        assert_eq!(Subset::from_indices(&[2]).relative_to(s), Subset::singleton(1));
    }

    #[test]
    fn validation_examples() {
        assert!(validate_descriptor(&unlink_atomic(3)).is_empty());
        assert!(validate_descriptor(&whitehead()).is_empty());

        let mut bad = whitehead();
        bad.linking[0][1] = 1;
        bad.linking[1][0] = 1;
        let v = validate_descriptor(&bad);
        assert_eq!(v, vec![Violation::NonzeroLinking { i: 0, j: 1, value: 1 }]);
        assert!(v[0].to_string().contains("nonzero linking number"));

        let mut missing = whitehead();
        if let Structure::Atomic(m) = &mut missing.structure {
            m.remove(&Subset::singleton(0));
        }
        assert_eq!(validate_descriptor(&missing), vec![Violation::IncompleteSublinkData(Subset::singleton(0))]);

        let shifted = whitehead().with_alexander(
            Subset::full(2),
            two_bridge_polynomial(1).shift(&Exponent::from_doubled(vec![1, 1])),
        );
        assert_eq!(validate_descriptor(&shifted), vec![Violation::NotSymmetric(Subset::full(2))]);

        let neg_knot = whitehead().with_alexander(Subset::singleton(1), -LaurentPoly::one(1));
        assert_eq!(validate_descriptor(&neg_knot), vec![Violation::KnotNotNormalized(Subset::singleton(1))]);
    }

    #[test]
    fn catalog_entries_are_valid() {
        for spec in [
            "unknot",
            "trefoil_rh",
            "unlink:3",
            "two_bridge:1",
            "two_bridge:4",
            "whitehead",
            "borromean",
            "mirror_L7a3",
            "whitehead_cable:2,7",
            "two_bridge_cable(2,2,5,3,7)",
        ] {
            let d = catalog_from_spec(spec).unwrap();
            assert!(validate_descriptor(&d).is_empty(), "{spec}: {:?}", validate_descriptor(&d));
        }
        assert!(matches!(catalog_from_spec("figure_eight"), Err(LinkError::UnknownKey(_))));
        assert!(matches!(catalog_from_spec("whitehead_cable:2,4"), Err(LinkError::BadParams { .. })));
        assert!(matches!(catalog_from_spec("two_bridge"), Err(LinkError::BadParams { .. })));
    }

    #[test]
    fn two_bridge_polynomials() {
        let delta = -(LaurentPoly::half_difference(2, 0) * LaurentPoly::half_difference(2, 1));
        assert_eq!(two_bridge_polynomial(1), delta);
        // half-integer points with |a| + |b| <= 2
        assert_eq!(two_bridge_polynomial(2).len(), 12);
        assert_eq!(two_bridge_polynomial(3).len(), 24);
        for k in 1..6 {
            assert!(two_bridge_polynomial(k).is_symmetric());
        }
    }

    #[test]
    fn sublinks() {
        let m = mirror_l7a3();
        let tref = sublink(&m, Subset::singleton(1)).unwrap();
        assert_eq!(tref.alexander(Subset::singleton(0)), Some(&trefoil_polynomial()));
        assert_eq!(tref.components[0].label, "trefoil");
        assert_eq!(sublink(&m, Subset::full(2)).unwrap(), m);
        assert_eq!(sublink(&m, Subset::from_bits(0)), Err(LinkError::EmptySublink));

        let b12 = sublink(&borromean(), Subset::from_indices(&[0, 1])).unwrap();
        match &b12.structure {
            Structure::DisjointUnion(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(parts.iter().all(|p| p.alexander(Subset::singleton(0)) == Some(&LaurentPoly::one(1))));
            }
            _ => panic!("expected split sublink"),
        }
        let direct = sublink(&borromean(), Subset::singleton(1)).unwrap();
        let nested = sublink(&b12, Subset::singleton(1)).unwrap();
        assert!(direct.same_link(&nested));
    }

    #[test]
    fn unions() {
        let u = disjoint_union(&unknot(), &unknot());
        assert_eq!(u.n(), 2);
        assert!(validate_descriptor(&u).is_empty());
        let w = disjoint_union(&whitehead(), &whitehead());
        assert_eq!(w.n(), 4);
        assert_eq!(w.parts().iter().map(|(o, _)| *o).collect::<Vec<_>>(), vec![0, 2]);
        let nested = disjoint_union(&w, &trefoil());
        assert_eq!(nested.parts().len(), 3);
        assert!(validate_descriptor(&nested).is_empty());
    }

    #[test]
    fn json_roundtrip_and_errors() {
        for d in [whitehead(), borromean(), disjoint_union(&trefoil(), &whitehead())] {
            let text = to_json_string(&d);
            assert_eq!(from_json_str(&text).unwrap(), d);
        }
        let text = to_json_string(&whitehead()).replace("\"-1/2\"", "\"1/3\"");
        assert!(matches!(from_json_str(&text), Err(JsonError::Schema(_))));

        let mut v = to_json_value(&whitehead());
        v["alexander"].as_object_mut().unwrap().remove("1");
        match from_json_str(&v.to_string()) {
            Err(JsonError::Validation(vs)) => {
                assert!(vs[0].to_string().contains("incomplete sublink data"))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(from_json_str("{not json"), Err(JsonError::Parse(_))));
    }

    #[test]
    fn json_big_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let d = LinkDescriptor::knot("k", "k", None, LaurentPoly::constant(1, big.clone()));
        let text = to_json_string(&d);
        assert!(text.contains("\"123456789012345678901234567890\""));
        // invalid as a knot, but parses
        match from_json_str(&text) {
            Err(JsonError::Validation(_)) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(BigInt::from(1) < big);
    }
}
