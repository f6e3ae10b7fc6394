//! Röver–Nekrashevych group elements.
//!
//! An element is a table of rows `(domain, range, action)`: the domain cones
//! and the range cones each partition the space, and the row maps
//! `domain·ψ ↦ range·action(ψ)`. Tables are not normalized; two tables are
//! compared on a common refinement using the word problem of the group.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::automata::format_tokens;
use crate::automata::{AutomatonGroup, GroupWord};
use crate::cantor::{
    common_refinement, complement_partition, refine_to_count, Cone, ConePartition, RationalPoint,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub domain: Cone,
    pub range: Cone,
    pub action: GroupWord,
}

#[derive(Serialize)]
struct RowView {
    domain: Cone,
    range: Cone,
    action: String,
}

impl Row {
    pub fn new(domain: Cone, range: Cone, action: GroupWord) -> Self {
        Row {
            domain,
            range,
            action,
        }
    }

    /// The row describing the same map on the subcone `domain·suffix`.
    fn descend(&self, group: &AutomatonGroup, suffix: &[u8]) -> Row {
        let (image, action) = group
            .apply_and_restrict(&self.action, suffix)
            .expect("row letters are validated");
        Row {
            domain: self.domain.extend(suffix),
            range: self.range.extend(&image),
            action,
        }
    }

    fn children<'a>(&'a self, group: &'a AutomatonGroup) -> impl Iterator<Item = Row> + 'a {
        (0..group.degree() as u8).map(move |x| self.descend(group, &[x]))
    }
}

/// Image of a rational point under a group element. The tail is processed one
/// period at a time until the current restriction repeats.
pub fn act_on_point(
    group: &AutomatonGroup,
    w: &GroupWord,
    p: &RationalPoint,
) -> Result<RationalPoint> {
    let (mut pre, mut cur) = group.apply_and_restrict(w, p.preperiod())?;
    group.check_path(p.period())?;
    let mut seen: HashMap<GroupWord, usize> = HashMap::new();
    let mut blocks: Vec<Vec<u8>> = Vec::new();
    loop {
        if let Some(&start) = seen.get(&cur) {
            pre.extend(blocks[..start].concat());
            let period = blocks[start..].concat();
            return RationalPoint::canonicalize(&pre, &period);
        }
        seen.insert(cur.clone(), blocks.len());
        let (image, next) = group.apply_and_restrict(&cur, p.period())?;
        blocks.push(image);
        cur = next;
    }
}

/// An element of the Röver–Nekrashevych group of a self-similar group.
#[derive(Clone, Debug)]
pub struct RnElement {
    group: Arc<AutomatonGroup>,
    rows: Vec<Row>,
}

fn same_group(a: &Arc<AutomatonGroup>, b: &Arc<AutomatonGroup>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::MismatchedGroups(
            a.name().to_string(),
            b.name().to_string(),
        ))
    }
}

/// Splits rows at every child until `done` accepts them. Order is depth-first.
fn split_until(group: &AutomatonGroup, rows: Vec<Row>, done: impl Fn(&Row) -> bool) -> Vec<Row> {
    let mut out = Vec::new();
    let mut stack: Vec<Row> = rows.into_iter().rev().collect();
    while let Some(row) = stack.pop() {
        if done(&row) {
            out.push(row);
        } else {
            let mut kids: Vec<Row> = row.children(group).collect();
            kids.reverse();
            stack.extend(kids);
        }
    }
    out
}

impl RnElement {
    pub fn identity(group: Arc<AutomatonGroup>) -> Self {
        RnElement {
            group,
            rows: vec![Row::new(Cone::root(), Cone::root(), GroupWord::identity())],
        }
    }

    /// The tree automorphism `w` acting on the whole space.
    pub fn from_word(group: Arc<AutomatonGroup>, w: GroupWord) -> Self {
        RnElement {
            group,
            rows: vec![Row::new(Cone::root(), Cone::root(), w)],
        }
    }

    /// Builds an element from a table, checking that domains and ranges are
    /// complete partitions of equal size. Rows are sorted by domain.
    pub fn from_rows(group: Arc<AutomatonGroup>, mut rows: Vec<Row>) -> Result<Self> {
        let d = group.degree();
        for row in &rows {
            group.check_path(row.domain.address())?;
            group.check_path(row.range.address())?;
        }
        let domains: Vec<Cone> = rows.iter().map(|r| r.domain.clone()).collect();
        let ranges: Vec<Cone> = rows.iter().map(|r| r.range.clone()).collect();
        for (what, cones) in [("domain", domains), ("range", ranges)] {
            ConePartition::complete(d, cones)
                .map_err(|e| Error::InvalidElement(format!("{what} cones: {e}")))?;
        }
        rows.sort_by(|a, b| a.domain.cmp(&b.domain));
        Ok(RnElement { group, rows })
    }

    pub fn group(&self) -> &Arc<AutomatonGroup> {
        &self.group
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn domain(&self) -> Vec<Cone> {
        self.rows.iter().map(|r| r.domain.clone()).collect()
    }

    fn with_rows(&self, mut rows: Vec<Row>) -> RnElement {
        rows.sort_by(|a, b| a.domain.cmp(&b.domain));
        RnElement {
            group: self.group.clone(),
            rows,
        }
    }

    /// How the element acts on `cone`, when the cone lies inside one domain cone.
    pub fn row_for(&self, cone: &Cone) -> Option<Row> {
        self.rows
            .iter()
            .find(|r| r.domain.contains_cone(cone))
            .map(|r| r.descend(&self.group, &cone.address()[r.domain.depth()..]))
    }

    /// Re-expresses the element over a finer complete domain partition.
    pub fn expand(&self, finer: &[Cone]) -> Result<RnElement> {
        let d = self.group.degree();
        ConePartition::complete(d, finer.to_vec())
            .map_err(|e| Error::NotRefining(e.to_string()))?;
        let rows = finer
            .iter()
            .map(|c| {
                self.row_for(c).ok_or_else(|| {
                    Error::NotRefining(format!("cone {c} is not inside a single domain cone"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_rows(rows))
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &RnElement) -> Result<RnElement> {
        same_group(&self.group, &other.group)?;
        let group = &self.group;
        let aligned = split_until(group, other.rows.clone(), |r| {
            self.rows.iter().any(|s| s.domain.contains_cone(&r.range))
        });
        let rows = aligned
            .into_iter()
            .map(|r| {
                let outer = self
                    .row_for(&r.range)
                    .expect("range aligned to a domain cone");
                Row::new(r.domain, outer.range, group.mul(&outer.action, &r.action))
            })
            .collect();
        Ok(self.with_rows(rows))
    }

    pub fn invert(&self) -> RnElement {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Row::new(
                    r.range.clone(),
                    r.domain.clone(),
                    self.group.inverse(&r.action),
                )
            })
            .collect();
        self.with_rows(rows)
    }

    /// `self^k` for any integer `k`.
    pub fn power(&self, k: i64) -> RnElement {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = RnElement::identity(self.group.clone());
        for _ in 0..k.unsigned_abs() {
            out = base.compose(&out).expect("same group");
        }
        out
    }

    /// Equality as homeomorphisms: compare on the common refinement of the
    /// two domain partitions.
    pub fn equal(&self, other: &RnElement) -> Result<bool> {
        same_group(&self.group, &other.group)?;
        let common = common_refinement(&self.domain(), &other.domain());
        let a = self.expand(&common)?;
        let b = other.expand(&common)?;
        Ok(a.rows
            .iter()
            .zip(&b.rows)
            .all(|(x, y)| x.range == y.range && self.group.equal(&x.action, &y.action)))
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.domain == r.range && self.group.is_trivial(&r.action))
    }

    /// The row whose domain contains `p`: a regular cone at `p` and the local
    /// action there.
    pub fn regular_cone(&self, p: &RationalPoint) -> (Cone, GroupWord) {
        let row = self.row_containing(p);
        (row.domain.clone(), row.action.clone())
    }

    pub(crate) fn row_containing(&self, p: &RationalPoint) -> &Row {
        self.rows
            .iter()
            .find(|r| p.in_cone(&r.domain))
            .expect("domain cones cover the space")
    }

    pub fn evaluate(&self, p: &RationalPoint) -> Result<RationalPoint> {
        let row = self.row_containing(p);
        let tail = p.tail(&row.domain)?;
        let image = act_on_point(&self.group, &row.action, &tail)?;
        Ok(image.prepend(row.range.address()))
    }

    /// `true` when the element is the identity on every given cone.
    pub fn is_identity_on(&self, cones: &[Cone]) -> bool {
        cones.iter().all(|c| {
            self.rows.iter().filter(|r| r.domain.overlaps(c)).all(|r| {
                let piece = if r.domain.contains_cone(c) {
                    r.descend(&self.group, &c.address()[r.domain.depth()..])
                } else {
                    r.clone()
                };
                piece.domain == piece.range && self.group.is_trivial(&piece.action)
            })
        })
    }

    /// Splits rows until every domain and every range lies inside a cone of
    /// the complete partition `cones`.
    pub fn align_to(&self, cones: &[Cone]) -> Vec<Row> {
        let inside = |c: &Cone| cones.iter().any(|p| p.contains_cone(c));
        let rows = split_until(&self.group, self.rows.clone(), |r| inside(&r.domain));
        split_until(&self.group, rows, |r| inside(&r.range))
    }

    /// An element mapping each `domain_i` onto `range_i` with local action
    /// `action_i`, completed by identity rows between the two complements.
    ///
    /// The smaller complement is refined (last cone first) to match the size
    /// of the larger one, and the complements are paired in lexicographic order.
    pub fn make_element(group: Arc<AutomatonGroup>, pairs: &[Row]) -> Result<RnElement> {
        let d = group.degree();
        let domains: Vec<Cone> = pairs.iter().map(|r| r.domain.clone()).collect();
        let ranges: Vec<Cone> = pairs.iter().map(|r| r.range.clone()).collect();
        let mut dc = complement_partition(d, &domains)?;
        let mut rc = complement_partition(d, &ranges)?;
        if dc.is_empty() || rc.is_empty() {
            return Err(Error::CoveringCones);
        }
        let target = dc.len().max(rc.len());
        dc = refine_to_count(d, &dc, target)?;
        rc = refine_to_count(d, &rc, target)?;
        let mut rows = pairs.to_vec();
        rows.extend(
            dc.into_iter()
                .zip(rc)
                .map(|(a, b)| Row::new(a, b, GroupWord::identity())),
        );
        RnElement::from_rows(group, rows)
    }

    /// The element in the text format, e.g. `row 0 -> 01 act a`.
    pub fn to_text(&self, name: &str) -> String {
        let mut out = format!("rn {} over {}\n", name, self.group.name());
        for r in &self.rows {
            out.push_str(&format!(
                "row {} -> {} act {}\n",
                r.domain,
                r.range,
                self.group.format_word(&r.action)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<RowView> = self
            .rows
            .iter()
            .map(|r| RowView {
                domain: r.domain.clone(),
                range: r.range.clone(),
                action: self.group.format_word(&r.action),
            })
            .collect();
        serde_json::json!({ "group": self.group.name(), "rows": rows })
    }
}

impl fmt::Display for RnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{} -> {} : {}",
                    r.domain,
                    r.range,
                    self.group.format_word(&r.action)
                )
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Parses the element text format:
///
/// ```text
/// rn <name> over <groupname>
/// row <alpha> -> <beta> act <word>
/// ```
pub fn parse_element(text: &str, group: Arc<AutomatonGroup>) -> Result<(String, RnElement)> {
    let mut name = None;
    let mut rows = Vec::new();
    let mut last_line = 1;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = format_tokens(line);
        let Some(&(col, directive)) = toks.first() else {
            continue;
        };
        last_line = lineno;
        match directive {
            "rn" => {
                if toks.len() != 4 || toks[2].1 != "over" {
                    return Err(Error::parse(
                        lineno,
                        col,
                        "expected `rn <name> over <group>`",
                    ));
                }
                if toks[3].1 != group.name() {
                    return Err(Error::parse(
                        lineno,
                        toks[3].0,
                        format!("element is over `{}`, not `{}`", toks[3].1, group.name()),
                    ));
                }
                if name.is_some() {
                    return Err(Error::parse(lineno, col, "duplicate `rn` header"));
                }
                name = Some(toks[1].1.to_string());
            }
            "row" => {
                if name.is_none() {
                    return Err(Error::parse(lineno, col, "`rn` header must come first"));
                }
                if toks.len() != 6 || toks[2].1 != "->" || toks[4].1 != "act" {
                    return Err(Error::parse(
                        lineno,
                        col,
                        "expected `row <alpha> -> <beta> act <word>`",
                    ));
                }
                let cone = |(c, tok): (usize, &str)| -> Result<Cone> {
                    let cone: Cone = tok.parse().map_err(|e| relocate(e, lineno, c))?;
                    group
                        .check_path(cone.address())
                        .map_err(|e| Error::parse(lineno, c, e.to_string()))?;
                    Ok(cone)
                };
                let domain = cone(toks[1])?;
                let range = cone(toks[3])?;
                let action = group
                    .parse_word(toks[5].1)
                    .map_err(|e| relocate(e, lineno, toks[5].0))?;
                rows.push(Row::new(domain, range, action));
            }
            other => {
                return Err(Error::parse(
                    lineno,
                    col,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }
    let name = name.ok_or_else(|| Error::parse(1, 1, "missing `rn` header"))?;
    let element =
        RnElement::from_rows(group, rows).map_err(|e| Error::parse(last_line, 1, e.to_string()))?;
    Ok((name, element))
}

/// Shifts a single-line parse error to its position in a file.
fn relocate(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Parse {
            column: c, message, ..
        } => Error::parse(line, column + c - 1, message),
        other => Error::parse(line, column, other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn cone(s: &str) -> Cone {
        s.parse().unwrap()
    }

    fn point(s: &str) -> RationalPoint {
        s.parse().unwrap()
    }

    fn row(g: &AutomatonGroup, a: &str, b: &str, w: &str) -> Row {
        Row::new(cone(a), cone(b), g.parse_word(w).unwrap())
    }

    fn table(h: &RnElement) -> Vec<(String, String, String)> {
        h.rows()
            .iter()
            .map(|r| {
                (
                    r.domain.to_string(),
                    r.range.to_string(),
                    h.group().format_word(&r.action),
                )
            })
            .collect()
    }

    fn t(a: &str, b: &str, w: &str) -> (String, String, String) {
        (a.into(), b.into(), w.into())
    }

    #[test]
    fn identity_laws() {
        let g = Arc::new(builtin::odometer());
        let id = RnElement::identity(g.clone());
        assert_eq!(id.evaluate(&point("(1)")).unwrap(), point("(1)"));
        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        assert!(id.compose(&a).unwrap().equal(&a).unwrap());
        assert!(id.invert().equal(&id).unwrap());
    }

    #[test]
    fn expand_examples() {
        let g = Arc::new(builtin::odometer());
        let id = RnElement::identity(g.clone());
        let e = id.expand(&[cone("0"), cone("1")]).unwrap();
        assert_eq!(table(&e), [t("0", "0", "id"), t("1", "1", "id")]);
        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        let e = a.expand(&[cone("0"), cone("1")]).unwrap();
        assert_eq!(table(&e), [t("0", "1", "id"), t("1", "0", "a")]);
        assert!(matches!(e.expand(&[cone("^")]), Err(Error::NotRefining(_))));
        assert!(matches!(e.expand(&[cone("0")]), Err(Error::NotRefining(_))));
    }

    #[test]
    fn expand_reflection_row() {
        let g = Arc::new(builtin::reflection());
        let h = RnElement::make_element(g.clone(), &[row(&g, "0", "01", "a")]).unwrap();
        let finer = [cone("00"), cone("01"), cone("10"), cone("11")];
        let e = h.expand(&finer).unwrap();
        assert_eq!(table(&e)[..2], [t("00", "011", "a"), t("01", "010", "a")]);
        assert!(e.equal(&h).unwrap());
    }

    #[test]
    fn odometer_square_at_zero() {
        let g = Arc::new(builtin::odometer());
        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        let aa = a.compose(&a).unwrap();
        // 000… plus two, least significant digit first.
        assert_eq!(aa.evaluate(&point("(0)")).unwrap(), point("01(0)"));
        assert_eq!(a.evaluate(&point("(1)")).unwrap(), point("(0)"));
        assert!(a
            .invert()
            .compose(&a)
            .unwrap()
            .equal(&RnElement::identity(g))
            .unwrap());
    }

    #[test]
    fn make_element_thompson_example() {
        let g = Arc::new(builtin::odometer());
        let h = RnElement::make_element(g.clone(), &[row(&g, "0", "10", "id")]).unwrap();
        assert_eq!(
            table(&h),
            [t("0", "10", "id"), t("10", "0", "id"), t("11", "11", "id")]
        );
        assert!(RnElement::make_element(g.clone(), &[])
            .unwrap()
            .equal(&RnElement::identity(g.clone()))
            .unwrap());
        assert!(matches!(
            RnElement::make_element(
                g.clone(),
                &[row(&g, "0", "0", "id"), row(&g, "1", "1", "id")]
            ),
            Err(Error::CoveringCones)
        ));
        assert!(matches!(
            RnElement::make_element(
                g.clone(),
                &[row(&g, "0", "0", "id"), row(&g, "01", "1", "id")]
            ),
            Err(Error::OverlappingCones(..))
        ));
    }

    #[test]
    fn remark_element() {
        let g = Arc::new(builtin::reflection());
        let h = RnElement::make_element(g.clone(), &[row(&g, "0", "01", "a")]).unwrap();
        assert_eq!(
            table(&h),
            [t("0", "01", "a"), t("10", "00", "id"), t("11", "1", "id")]
        );
        let p = point("(01)");
        assert_eq!(h.evaluate(&p).unwrap(), p);
        assert_eq!(h.evaluate(&p).unwrap().prefix(20), p.prefix(20));
        let (c, w) = h.regular_cone(&p);
        assert_eq!(c, cone("0"));
        assert_eq!(g.format_word(&w), "a");
        assert!(h
            .compose(&h.invert())
            .unwrap()
            .equal(&RnElement::identity(g.clone()))
            .unwrap());
        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        assert!(!a.equal(&RnElement::identity(g)).unwrap());
    }

    #[test]
    fn identity_table_variants_are_equal() {
        let g = Arc::new(builtin::grigorchuk());
        let id = RnElement::identity(g.clone());
        let e = id.expand(&[cone("0"), cone("1")]).unwrap();
        assert!(id.equal(&e).unwrap());
        let (c, _) = e.regular_cone(&point("(1)"));
        assert_eq!(c, cone("1"));
    }

    #[test]
    fn act_on_point_cycles() {
        let g = builtin::odometer();
        let a = g.parse_word("a").unwrap();
        assert_eq!(act_on_point(&g, &a, &point("(1)")).unwrap(), point("(0)"));
        assert_eq!(
            act_on_point(&g, &a, &point("1(0)")).unwrap(),
            point("01(0)")
        );
        let r = builtin::reflection();
        let ra = r.parse_word("a").unwrap();
        assert_eq!(
            act_on_point(&r, &ra, &point("(01)")).unwrap(),
            point("(10)")
        );
    }

    #[test]
    fn text_format_round_trip() {
        let g = Arc::new(builtin::reflection());
        let h = RnElement::make_element(g.clone(), &[row(&g, "0", "01", "a")]).unwrap();
        let text = h.to_text("remark");
        let (name, parsed) = parse_element(&text, g.clone()).unwrap();
        assert_eq!(name, "remark");
        assert_eq!(parsed.rows(), h.rows());
    }

    #[test]
    fn text_format_errors() {
        let g = Arc::new(builtin::reflection());
        let err = parse_element(
            "rn x over reflection\nrow 0 -> 1 act b\nrow 1 -> 0 act id\n",
            g.clone(),
        )
        .unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 16,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = parse_element("rn x over grigorchuk\n", g.clone()).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 1,
                column: 11,
                ..
            }
        ));
        let err =
            parse_element("rn x over reflection\nrow 0 -> 1 act id\n", g.clone()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_element("rn x over reflection\nrow 0 -> 2 act id\n", g).unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                line: 2,
                column: 10,
                ..
            }
        ));
    }

    #[test]
    fn mismatched_groups() {
        let a = RnElement::identity(Arc::new(builtin::odometer()));
        let b = RnElement::identity(Arc::new(builtin::reflection()));
        assert!(matches!(a.compose(&b), Err(Error::MismatchedGroups(..))));
        assert!(matches!(a.equal(&b), Err(Error::MismatchedGroups(..))));
    }

    #[test]
    fn identity_on_cones() {
        let g = Arc::new(builtin::odometer());
        let h = RnElement::make_element(g.clone(), &[row(&g, "0", "10", "id")]).unwrap();
        assert!(h.is_identity_on(&[cone("11"), cone("110")]));
        assert!(!h.is_identity_on(&[cone("1")]));
        assert!(RnElement::identity(g).is_identity_on(&[cone("0101")]));
    }
}
