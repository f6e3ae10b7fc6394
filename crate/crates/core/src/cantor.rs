//! Finite words, cones and rational points of the Cantor space `X^ω`.
//!
//! A cone is written as its address (a digit string, `^` for the empty
//! address). A rational point is written `alpha(beta)` for `alpha·beta·beta·…`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::automata::MAX_ALPHABET;
use crate::error::{Error, Result};

fn digits(word: &[u8]) -> String {
    word.iter().map(|&x| char::from(b'0' + x)).collect()
}

fn parse_digits(text: &str, column: usize) -> Result<Vec<u8>> {
    text.chars()
        .enumerate()
        .map(|(i, c)| {
            c.to_digit(10).map(|v| v as u8).ok_or_else(|| {
                Error::parse(1, column + i, format!("expected a digit, found `{c}`"))
            })
        })
        .collect()
}

fn check_letters(word: &[u8], d: usize) -> Result<()> {
    match word.iter().find(|&&x| x as usize >= d) {
        Some(&letter) => Err(Error::LetterOutOfRange { letter, d }),
        None => Ok(()),
    }
}

/// `true` when one word is a prefix of the other.
pub fn comparable(a: &[u8], b: &[u8]) -> bool {
    a.starts_with(b) || b.starts_with(a)
}

/// The cone of all sequences starting with `address`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    address: Vec<u8>,
}

impl Cone {
    pub fn new(address: Vec<u8>) -> Self {
        Cone { address }
    }

    pub fn root() -> Self {
        Cone::default()
    }

    pub fn address(&self) -> &[u8] {
        &self.address
    }

    pub fn depth(&self) -> usize {
        self.address.len()
    }

    pub fn child(&self, x: u8) -> Cone {
        let mut address = self.address.clone();
        address.push(x);
        Cone { address }
    }

    pub fn extend(&self, suffix: &[u8]) -> Cone {
        let mut address = self.address.clone();
        address.extend_from_slice(suffix);
        Cone { address }
    }

    /// `true` when this cone contains `other` (as sets).
    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.address.starts_with(&self.address)
    }

    pub fn overlaps(&self, other: &Cone) -> bool {
        comparable(&self.address, &other.address)
    }

    pub fn contains_point(&self, p: &RationalPoint) -> bool {
        self.address
            .iter()
            .enumerate()
            .all(|(i, &x)| p.letter(i) == x)
    }
}

impl From<&[u8]> for Cone {
    fn from(address: &[u8]) -> Self {
        Cone::new(address.to_vec())
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.address.is_empty() {
            f.write_str("^")
        } else {
            f.write_str(&digits(&self.address))
        }
    }
}

impl Serialize for Cone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Cone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "^" {
            return Ok(Cone::root());
        }
        if s.is_empty() {
            return Err(Error::parse(1, 1, "empty cone address (use `^`)"));
        }
        Ok(Cone::new(parse_digits(s, 1)?))
    }
}

/// An eventually periodic sequence `pre·period·period·…`, stored canonically:
/// the period is primitive and the preperiod is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pre: Vec<u8>,
    period: Vec<u8>,
}

/// Length of the primitive root of a nonempty word.
fn primitive_root_len(word: &[u8]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| word[i] == word[i - p]))
        .unwrap_or(n)
}

impl RationalPoint {
    /// Canonical representation of `pre·period^ω`.
    pub fn canonicalize(pre: &[u8], period: &[u8]) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut pre = pre.to_vec();
        let mut period = period[..primitive_root_len(period)].to_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Ok(RationalPoint { pre, period })
    }

    /// Same as [`RationalPoint::canonicalize`], also checking letters against `d`.
    pub fn with_alphabet(pre: &[u8], period: &[u8], d: usize) -> Result<Self> {
        check_letters(pre, d)?;
        check_letters(period, d)?;
        Self::canonicalize(pre, period)
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Preperiod made nonempty by absorbing one copy of the period if needed.
    pub fn nonempty_preperiod(&self) -> Vec<u8> {
        if self.pre.is_empty() {
            self.period.clone()
        } else {
            self.pre.clone()
        }
    }

    pub fn letter(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.letter(i)).collect()
    }

    pub fn max_letter(&self) -> u8 {
        self.pre
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(0)
    }

    pub fn check_alphabet(&self, d: usize) -> Result<()> {
        check_letters(&self.pre, d)?;
        check_letters(&self.period, d)
    }

    pub fn in_cone(&self, cone: &Cone) -> bool {
        cone.contains_point(self)
    }

    /// The point with the cone address stripped off.
    pub fn tail(&self, cone: &Cone) -> Result<RationalPoint> {
        if !self.in_cone(cone) {
            return Err(Error::NotInCone {
                point: self.to_string(),
                cone: cone.to_string(),
            });
        }
        Ok(self.drop_prefix(cone.depth()))
    }

    /// The suffix after the first `n` letters.
    pub fn drop_prefix(&self, n: usize) -> RationalPoint {
        if n <= self.pre.len() {
            Self::canonicalize(&self.pre[n..], &self.period).expect("period is nonempty")
        } else {
            let mut period = self.period.clone();
            period.rotate_left((n - self.pre.len()) % self.period.len());
            Self::canonicalize(&[], &period).expect("period is nonempty")
        }
    }

    /// The point `prefix·self`.
    pub fn prepend(&self, prefix: &[u8]) -> RationalPoint {
        let mut pre = prefix.to_vec();
        pre.extend_from_slice(&self.pre);
        Self::canonicalize(&pre, &self.period).expect("period is nonempty")
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", digits(&self.pre), digits(&self.period))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for RationalPoint {
    type Err = Error;

    /// Parses `alpha(beta)`, e.g. `0(01)` or `(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::parse(1, 1, format!("expected `alpha(beta)`, got `{s}`")))?;
        if !s.ends_with(')') {
            return Err(Error::parse(1, s.len().max(1), "missing closing `)`"));
        }
        let pre = parse_digits(&s[..open], 1)?;
        let period = parse_digits(&s[open + 1..s.len() - 1], open + 2)?;
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if pre
            .iter()
            .chain(&period)
            .any(|&x| x as usize >= MAX_ALPHABET)
        {
            return Err(Error::parse(1, 1, "letters must be decimal digits"));
        }
        RationalPoint::canonicalize(&pre, &period)
    }
}

fn check_disjoint(cones: &[Cone]) -> Result<()> {
    for (i, a) in cones.iter().enumerate() {
        for b in &cones[i + 1..] {
            if a.overlaps(b) {
                return Err(Error::OverlappingCones(a.to_string(), b.to_string()));
            }
        }
    }
    Ok(())
}

/// Cones partitioning the complement of a disjoint union of cones, listed
/// depth-first in lexicographic order.
pub fn complement_partition(d: usize, cones: &[Cone]) -> Result<Vec<Cone>> {
    for c in cones {
        check_letters(c.address(), d)?;
    }
    check_disjoint(cones)?;
    fn walk(d: usize, node: Cone, cones: &[Cone], out: &mut Vec<Cone>) {
        if cones.contains(&node) {
            return;
        }
        if cones.iter().any(|c| node.contains_cone(c)) {
            for x in 0..d as u8 {
                walk(d, node.child(x), cones, out);
            }
        } else {
            out.push(node);
        }
    }
    let mut out = Vec::new();
    walk(d, Cone::root(), cones, &mut out);
    Ok(out)
}

/// Splits the lexicographically last cone until there are `target` cones.
/// Each split adds `d - 1` cones; the result is sorted.
pub fn refine_to_count(d: usize, cones: &[Cone], target: usize) -> Result<Vec<Cone>> {
    let n = cones.len();
    if n == 0 {
        if target == 0 {
            return Ok(Vec::new());
        }
        return Err(Error::InfeasibleRefinement(format!(
            "cannot refine an empty list to {target} cones"
        )));
    }
    if target < n || !(target - n).is_multiple_of(d - 1) {
        return Err(Error::InfeasibleRefinement(format!(
            "cannot reach {target} cones from {n} by splits of size {d}"
        )));
    }
    let mut out = cones.to_vec();
    out.sort();
    while out.len() < target {
        let last = out.pop().expect("nonempty");
        out.extend((0..d as u8).map(|x| last.child(x)));
    }
    Ok(out)
}

/// A pairwise disjoint list of cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConePartition {
    d: usize,
    cones: Vec<Cone>,
}

impl ConePartition {
    pub fn new(d: usize, cones: Vec<Cone>) -> Result<Self> {
        for c in &cones {
            check_letters(c.address(), d)?;
        }
        check_disjoint(&cones)?;
        Ok(ConePartition { d, cones })
    }

    /// A partition that must cover the whole space.
    pub fn complete(d: usize, cones: Vec<Cone>) -> Result<Self> {
        let p = Self::new(d, cones)?;
        if !p.is_complete() {
            return Err(Error::InvalidPartition(format!(
                "cones {} do not cover the space",
                p.cones
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )));
        }
        Ok(p)
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn into_cones(self) -> Vec<Cone> {
        self.cones
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        complement_partition(self.d, &self.cones)
            .map(|c| c.is_empty())
            .unwrap_or(false)
    }

    /// The cone containing `p`, if any.
    pub fn locate(&self, p: &RationalPoint) -> Option<usize> {
        self.cones.iter().position(|c| p.in_cone(c))
    }
}

/// The complete partition into `k` cones obtained by splitting from the root.
pub fn standard_partition(d: usize, k: usize) -> Result<ConePartition> {
    if k == 0 || !(k - 1).is_multiple_of(d - 1) {
        return Err(Error::InfeasibleRefinement(format!(
            "a complete partition of a {d}-ary space cannot have {k} cones"
        )));
    }
    Ok(ConePartition {
        d,
        cones: refine_to_count(d, &[Cone::root()], k)?,
    })
}

/// The finest common refinement of two complete partitions: every address in
/// either that has no proper extension in the other.
pub fn common_refinement(a: &[Cone], b: &[Cone]) -> Vec<Cone> {
    let mut out: Vec<Cone> = a
        .iter()
        .filter(|x| !b.iter().any(|y| x.contains_cone(y) && x != &y))
        .chain(b.iter().filter(|y| !a.iter().any(|x| y.contains_cone(x))))
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}
