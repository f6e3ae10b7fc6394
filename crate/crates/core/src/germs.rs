//! Germs at rational points.
//!
//! For `h` fixing `p = αβ̄`, the local actions of `h` on the cones `αβ^{Mi}`
//! eventually settle on an element of the β-periodic part of the nucleus,
//! while the image cones are prefixes of `p` whose length differs from the
//! source length by a constant displacement. The pair (nucleus component,
//! displacement) determines the germ of `h` at `p`.

use serde::Serialize;

use crate::automata::{AutomatonGroup, ElementIndex, GroupWord, NucleusResult};
use crate::cantor::{Cone, RationalPoint};
use crate::error::{Error, Result};
use crate::rn::RnElement;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The elements of the nucleus that are periodic under `g ↦ g|_β`, and the
/// least common multiple of their periods.
#[derive(Clone, Debug)]
pub struct PeriodicNucleusData {
    beta: Vec<u8>,
    index: ElementIndex,
    periods: Vec<usize>,
    lcm: usize,
}

impl PeriodicNucleusData {
    pub fn beta(&self) -> &[u8] {
        &self.beta
    }

    pub fn elements(&self) -> &[GroupWord] {
        self.index.reps()
    }

    /// Period of each element, in the order of [`Self::elements`].
    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    /// The lcm of the periods (`M`).
    pub fn period_lcm(&self) -> usize {
        self.lcm
    }

    pub fn find(&self, group: &AutomatonGroup, w: &GroupWord) -> Option<usize> {
        self.index.find(group, w)
    }

    /// `β^M` as a word.
    pub fn block(&self) -> Vec<u8> {
        self.beta.repeat(self.lcm)
    }
}

/// Iterates `g ↦ g|_β` on the nucleus and keeps the elements on cycles.
pub fn periodic_nucleus(
    group: &AutomatonGroup,
    nucleus: &NucleusResult,
    beta: &[u8],
) -> Result<PeriodicNucleusData> {
    if beta.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    group.check_path(beta)?;
    let elems = nucleus.elements();
    let next: Vec<usize> = elems
        .iter()
        .map(|e| {
            let r = group.restrict(e, beta)?;
            nucleus.find(group, &r).ok_or_else(|| {
                Error::ContractViolation(format!(
                    "nucleus is not closed: {} restricted along the period leaves it",
                    group.format_word(e)
                ))
            })
        })
        .collect::<Result<_>>()?;

    // An element is periodic iff iterating from it returns to it within |N| steps.
    let n = elems.len();
    let mut index = ElementIndex::new();
    let mut periods = Vec::new();
    for start in 0..n {
        let mut cur = next[start];
        let mut steps = 1;
        while cur != start && steps <= n {
            cur = next[cur];
            steps += 1;
        }
        if cur == start {
            index.insert(group, elems[start].clone());
            periods.push(steps);
        }
    }
    let lcm = periods.iter().fold(1, |acc, &p| acc / gcd(acc, p) * p);
    Ok(PeriodicNucleusData {
        beta: beta.to_vec(),
        index,
        periods,
        lcm,
    })
}

/// The stabilized invariant of the germ of an element at a rational point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermSignature {
    pub point: RationalPoint,
    /// Preperiod used for the cones `αβ^{Mi}`; never empty.
    pub alpha: Vec<u8>,
    pub nucleus_component: GroupWord,
    /// Position of the nucleus component in [`PeriodicNucleusData::elements`].
    pub component_index: usize,
    /// Image address length minus source address length.
    pub delta: i64,
    /// The index `i` of the cone `αβ^{Mi}` where the signature was read.
    pub stabilized_at: usize,
    /// Address length of that cone.
    pub depth: usize,
}

#[derive(Serialize)]
struct SignatureView {
    point: String,
    n: String,
    delta: i64,
    depth: usize,
    stabilized_at: usize,
}

impl GermSignature {
    fn point_text(&self) -> String {
        let digits = |w: &[u8]| w.iter().map(|x| x.to_string()).collect::<String>();
        format!("{}({})", digits(&self.alpha), digits(self.point.period()))
    }

    /// `germ(point=01(01), n=a, delta=1, depth=2)`.
    pub fn render(&self, group: &AutomatonGroup) -> String {
        format!(
            "germ(point={}, n={}, delta={}, depth={})",
            self.point_text(),
            group.format_word(&self.nucleus_component),
            self.delta,
            self.depth
        )
    }

    pub fn to_json(&self, group: &AutomatonGroup) -> serde_json::Value {
        serde_json::to_value(SignatureView {
            point: self.point_text(),
            n: group.format_word(&self.nucleus_component),
            delta: self.delta,
            depth: self.depth,
            stabilized_at: self.stabilized_at,
        })
        .expect("signature serializes")
    }
}

struct Probe {
    component: usize,
    delta: i64,
}

fn germ_cone(alpha: &[u8], block: &[u8], i: usize) -> Cone {
    let mut address = alpha.to_vec();
    for _ in 0..i {
        address.extend_from_slice(block);
    }
    Cone::new(address)
}

fn check_setup(h: &RnElement, p: &RationalPoint, data: &PeriodicNucleusData) -> Result<()> {
    if p.period() != data.beta() {
        return Err(Error::ContractViolation(format!(
            "periodic nucleus data was computed for another period than that of {p}"
        )));
    }
    p.check_alphabet(h.group().degree())?;
    if h.evaluate(p)? != *p {
        return Err(Error::FixedPointViolation(p.to_string()));
    }
    Ok(())
}

fn probe(
    h: &RnElement,
    p: &RationalPoint,
    data: &PeriodicNucleusData,
    cone: &Cone,
) -> Result<Option<Probe>> {
    let Some(row) = h.row_for(cone) else {
        return Ok(None);
    };
    if !p.in_cone(&row.range) {
        return Err(Error::FixedPointViolation(p.to_string()));
    }
    let Some(component) = data.find(h.group(), &row.action) else {
        return Ok(None);
    };
    let delta = row.range.depth() as i64 - cone.depth() as i64;
    Ok(Some(Probe { component, delta }))
}

/// Reads the germ signature of `h` at the fixed point `p`: the least `i ≤ cap`
/// at which the cone `αβ^{Mi}` is regular, its local action lies in the
/// periodic nucleus, and depth `i + 1` reproduces the same data.
pub fn germ_signature(
    h: &RnElement,
    p: &RationalPoint,
    data: &PeriodicNucleusData,
    cap: usize,
) -> Result<GermSignature> {
    check_setup(h, p, data)?;
    let alpha = p.nonempty_preperiod();
    let block = data.block();
    for i in 0..=cap {
        let cone = germ_cone(&alpha, &block, i);
        let Some(here) = probe(h, p, data, &cone)? else {
            continue;
        };
        let Some(there) = probe(h, p, data, &germ_cone(&alpha, &block, i + 1))? else {
            continue;
        };
        if here.component == there.component && here.delta == there.delta {
            return Ok(GermSignature {
                point: p.clone(),
                alpha,
                nucleus_component: data.elements()[here.component].clone(),
                component_index: here.component,
                delta: here.delta,
                stabilized_at: i,
                depth: cone.depth(),
            });
        }
    }
    Err(Error::NotStabilized(cap))
}

/// Whether `h1` and `h2` agree on a neighbourhood of `p`: at a common
/// stabilized depth the image cones coincide and the local actions are equal.
pub fn germ_equal(
    h1: &RnElement,
    h2: &RnElement,
    p: &RationalPoint,
    data: &PeriodicNucleusData,
    cap: usize,
) -> Result<bool> {
    let s1 = germ_signature(h1, p, data, cap)?;
    let s2 = germ_signature(h2, p, data, cap)?;
    let i = s1.stabilized_at.max(s2.stabilized_at);
    let cone = germ_cone(&s1.alpha, &data.block(), i);
    let r1 = h1.row_for(&cone).expect("stabilized cones stay regular");
    let r2 = h2.row_for(&cone).expect("stabilized cones stay regular");
    Ok(r1.range == r2.range && h1.group().equal(&r1.action, &r2.action))
}

/// For `h1`, `h2` with equal nucleus components, the exponent `k` with
/// `(h2)_p = (f)_p^k (h1)_p`. Returns `None` when the components differ.
pub fn coset_witness(
    h1: &RnElement,
    h2: &RnElement,
    p: &RationalPoint,
    f: &RnElement,
    data: &PeriodicNucleusData,
    cap: usize,
) -> Result<Option<i64>> {
    let beta_len = data.beta().len() as i64;
    let sf = germ_signature(f, p, data, cap)?;
    if sf.delta != beta_len || !sf.nucleus_component.is_empty() {
        return Err(Error::ContractViolation(format!(
            "f must shift by one period with trivial local action, got {}",
            sf.render(f.group())
        )));
    }
    let s1 = germ_signature(h1, p, data, cap)?;
    let s2 = germ_signature(h2, p, data, cap)?;
    if s1.component_index != s2.component_index {
        return Ok(None);
    }
    let diff = s2.delta - s1.delta;
    if diff % beta_len != 0 {
        return Err(Error::ContractViolation(format!(
            "displacements {} and {} with the same nucleus component differ by a non-multiple of the period",
            s1.delta, s2.delta
        )));
    }
    let k = diff / beta_len;
    let shifted = f.power(k).compose(h1)?;
    if !germ_equal(h2, &shifted, p, data, cap)? {
        return Err(Error::ContractViolation(format!(
            "germ of h2 differs from f^{k}·h1 although the nucleus components agree"
        )));
    }
    Ok(Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::rn::Row;
    use std::sync::Arc;

    fn point(s: &str) -> RationalPoint {
        s.parse().unwrap()
    }

    fn remark_h(g: &Arc<AutomatonGroup>) -> RnElement {
        let row = Row::new(
            "0".parse().unwrap(),
            "01".parse().unwrap(),
            g.parse_word("a").unwrap(),
        );
        RnElement::make_element(g.clone(), &[row]).unwrap()
    }

    fn shift(g: &Arc<AutomatonGroup>, alpha: &str, beta: &str) -> RnElement {
        let row = Row::new(
            alpha.parse().unwrap(),
            format!("{alpha}{beta}").parse().unwrap(),
            GroupWord::identity(),
        );
        RnElement::make_element(g.clone(), &[row]).unwrap()
    }

    #[test]
    fn periodic_nucleus_examples() {
        let t = builtin::trivial();
        let data = periodic_nucleus(&t, &t.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        assert_eq!(data.elements().len(), 1);
        assert_eq!(data.period_lcm(), 1);

        let r = builtin::reflection();
        let data = periodic_nucleus(&r, &r.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        let names: Vec<String> = data.elements().iter().map(|w| r.format_word(w)).collect();
        assert_eq!(names, ["id", "a"]);
        assert_eq!(data.period_lcm(), 1);

        let g = builtin::grigorchuk();
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), &[1]).unwrap();
        let names: Vec<String> = data.elements().iter().map(|w| g.format_word(w)).collect();
        assert_eq!(names, ["id", "b", "c", "d"]);
        assert_eq!(data.periods(), [1, 3, 3, 3]);
        assert_eq!(data.period_lcm(), 3);
    }

    #[test]
    fn signatures() {
        let g = Arc::new(builtin::reflection());
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        let p = point("(01)");

        let id = RnElement::identity(g.clone());
        let s = germ_signature(&id, &p, &data, 8).unwrap();
        assert!(s.nucleus_component.is_empty());
        assert_eq!(s.delta, 0);

        let f = shift(&g, "01", "01");
        let s = germ_signature(&f, &p, &data, 8).unwrap();
        assert!(s.nucleus_component.is_empty());
        assert_eq!(s.delta, 2);

        let h = remark_h(&g);
        let s = germ_signature(&h, &p, &data, 8).unwrap();
        assert_eq!(g.format_word(&s.nucleus_component), "a");
        assert_eq!(s.delta, 1);
        assert_eq!(s.render(&g), "germ(point=01(01), n=a, delta=1, depth=2)");
    }

    #[test]
    fn fixed_point_violation() {
        let g = Arc::new(builtin::reflection());
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        assert!(matches!(
            germ_signature(&a, &point("(01)"), &data, 4),
            Err(Error::FixedPointViolation(_))
        ));
    }

    #[test]
    fn not_stabilized_with_zero_cap() {
        let g = Arc::new(builtin::reflection());
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        // Regular only from the cone 0101 onwards.
        let deep = shift(&g, "0101", "01");
        assert!(matches!(
            germ_signature(&deep, &point("(01)"), &data, 0),
            Err(Error::NotStabilized(0))
        ));
        assert!(germ_signature(&deep, &point("(01)"), &data, 2).is_ok());
    }

    #[test]
    fn germ_equality_and_cosets() {
        let g = Arc::new(builtin::reflection());
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), &[0, 1]).unwrap();
        let p = point("(01)");
        let f = shift(&g, "01", "01");
        let h = remark_h(&g);
        let fh = f.compose(&h).unwrap();
        assert!(germ_equal(&h, &h, &p, &data, 8).unwrap());
        assert!(!germ_equal(&h, &fh, &p, &data, 8).unwrap());
        assert!(!germ_equal(&h, &f, &p, &data, 8).unwrap());
        assert_eq!(coset_witness(&h, &h, &p, &f, &data, 8).unwrap(), Some(0));
        assert_eq!(coset_witness(&h, &fh, &p, &f, &data, 8).unwrap(), Some(1));
        let ffh = f.compose(&fh).unwrap();
        assert_eq!(coset_witness(&h, &ffh, &p, &f, &data, 8).unwrap(), Some(2));
        assert_eq!(coset_witness(&fh, &h, &p, &f, &data, 8).unwrap(), Some(-1));
        assert_eq!(coset_witness(&h, &f, &p, &f, &data, 8).unwrap(), None);
    }
}
