//! Explicit elements used for the oligomorphy and stabilizer arguments:
//! transporters between tuples of points, the contraction element `f`, the
//! set `E'` with its cone exchange `z`, and the embedding `φ` of the whole
//! group into the pointwise stabilizer of `E'`.

use std::sync::Arc;

use serde::Serialize;

use crate::automata::{AutomatonGroup, GroupWord};
use crate::cantor::{complement_partition, standard_partition, Cone, RationalPoint};
use crate::error::{Error, Result};
use crate::rn::{RnElement, Row};

/// Guards the cone-shrinking loops; distinct rational points separate long before this.
const MAX_EXTENSION: usize = 4096;

/// True if no two of the cones overlap.
pub fn cones_disjoint(cones: &[Cone]) -> bool {
    cones
        .iter()
        .enumerate()
        .all(|(i, a)| cones[i + 1..].iter().all(|b| !a.overlaps(b)))
}

fn disjoint_and_proper(d: usize, cones: &[Cone]) -> bool {
    cones_disjoint(cones)
        && complement_partition(d, cones)
            .map(|c| !c.is_empty())
            .unwrap_or(false)
}

fn check_distinct(points: &[RationalPoint]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(Error::DuplicatePoint(p.to_string()));
        }
    }
    Ok(())
}

/// Points `p_i = α_i β̄_i` with pairwise disjoint cones `α_i` whose union `E`
/// is not the whole space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatedSystem {
    pub points: Vec<RationalPoint>,
    pub cones: Vec<Cone>,
}

impl SeparatedSystem {
    /// The period following `cones[i]` along `points[i]`.
    pub fn period(&self, i: usize) -> &[u8] {
        self.points[i].period()
    }
}

/// Extends every preperiod by the same number of whole periods until the
/// cones are pairwise disjoint and leave part of the space uncovered.
pub fn separate_points(d: usize, points: &[RationalPoint]) -> Result<SeparatedSystem> {
    check_distinct(points)?;
    for p in points {
        p.check_alphabet(d)?;
    }
    let alphas: Vec<Vec<u8>> = points.iter().map(|p| p.nonempty_preperiod()).collect();
    for t in 0..MAX_EXTENSION {
        let cones: Vec<Cone> = alphas
            .iter()
            .zip(points)
            .map(|(a, p)| {
                let mut address = a.clone();
                for _ in 0..t {
                    address.extend_from_slice(p.period());
                }
                Cone::new(address)
            })
            .collect();
        if disjoint_and_proper(d, &cones) {
            return Ok(SeparatedSystem {
                points: points.to_vec(),
                cones,
            });
        }
    }
    Err(Error::BoundExceeded(format!(
        "points not separated after {MAX_EXTENSION} period extensions"
    )))
}

/// An element sending `p_i` to `q_i` for every `i`, assembled from the
/// movers' local actions on small enough regular cones.
pub fn tuple_transporter(
    group: &Arc<AutomatonGroup>,
    pairs: &[(RationalPoint, RationalPoint)],
    movers: &[RnElement],
) -> Result<RnElement> {
    if pairs.len() != movers.len() {
        return Err(Error::ContractViolation(format!(
            "{} pairs but {} movers",
            pairs.len(),
            movers.len()
        )));
    }
    let d = group.degree();
    let sources: Vec<RationalPoint> = pairs.iter().map(|(p, _)| p.clone()).collect();
    let targets: Vec<RationalPoint> = pairs.iter().map(|(_, q)| q.clone()).collect();
    check_distinct(&sources)?;
    check_distinct(&targets)?;
    for ((p, q), h) in pairs.iter().zip(movers) {
        if h.group() != group {
            return Err(Error::MismatchedGroups(
                group.name().to_string(),
                h.group().name().to_string(),
            ));
        }
        let image = h.evaluate(p)?;
        if image != *q {
            return Err(Error::ContractViolation(format!(
                "mover sends {p} to {image}, not {q}"
            )));
        }
    }

    // Start from each mover's regular cone at p_i and descend along p_i.
    let mut depths: Vec<usize> = pairs
        .iter()
        .zip(movers)
        .map(|((p, _), h)| h.regular_cone(p).0.depth())
        .collect();
    for _ in 0..MAX_EXTENSION {
        let rows: Vec<Row> = pairs
            .iter()
            .zip(movers)
            .zip(&depths)
            .map(|(((p, _), h), &n)| {
                h.row_for(&Cone::new(p.prefix(n)))
                    .expect("cone lies inside the regular cone")
            })
            .collect();
        let domains: Vec<Cone> = rows.iter().map(|r| r.domain.clone()).collect();
        let ranges: Vec<Cone> = rows.iter().map(|r| r.range.clone()).collect();
        if disjoint_and_proper(d, &domains) && disjoint_and_proper(d, &ranges) {
            return RnElement::make_element(group.clone(), &rows);
        }
        for n in &mut depths {
            *n += 1;
        }
    }
    Err(Error::BoundExceeded(format!(
        "transporter cones not separated after {MAX_EXTENSION} steps"
    )))
}

/// The element with `f(α_i ψ) = α_i β_i ψ` on every cone of the system.
pub fn build_f(group: &Arc<AutomatonGroup>, system: &SeparatedSystem) -> Result<RnElement> {
    let rows: Vec<Row> = system
        .cones
        .iter()
        .enumerate()
        .map(|(i, c)| Row::new(c.clone(), c.extend(system.period(i)), GroupWord::identity()))
        .collect();
    RnElement::make_element(group.clone(), &rows)
}

/// The image of `cone` under `h`, when `h` maps it onto a single cone.
pub fn image_cone(h: &RnElement, cone: &Cone) -> Option<Cone> {
    h.row_for(cone).map(|r| r.range)
}

/// The cones `γ_1..γ_{m+k}` removed from the space to form `E'`, and the
/// standard partition `δ_1..δ_{m+k}` that `z` maps them onto (`γ_i ψ ↦ δ_i ψ`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EPrimeData {
    pub gamma: Vec<Cone>,
    /// Number of complement cones of `E`; the remaining `gamma` entries lie inside `E`.
    pub m: usize,
    pub k: usize,
    pub delta: Vec<Cone>,
    /// Cones partitioning `E'`.
    pub e_prime: Vec<Cone>,
}

impl EPrimeData {
    /// `z(γ_i ψ) = δ_i ψ` on cones; `None` outside the domain of `z`.
    pub fn z(&self, cone: &Cone) -> Option<Cone> {
        self.gamma
            .iter()
            .zip(&self.delta)
            .find(|(g, _)| g.contains_cone(cone))
            .map(|(g, d)| d.extend(&cone.address()[g.depth()..]))
    }

    fn z_inverse(&self, cone: &Cone) -> Option<Cone> {
        self.delta
            .iter()
            .zip(&self.gamma)
            .find(|(d, _)| d.contains_cone(cone))
            .map(|(d, g)| g.extend(&cone.address()[d.depth()..]))
    }
}

pub fn build_e_prime(d: usize, system: &SeparatedSystem) -> Result<EPrimeData> {
    let complement = complement_partition(d, &system.cones)?;
    let m = complement.len();
    let k = (d - 1 - (m - 1) % (d - 1)) % (d - 1);

    // Extra cones branch off each point's path inside its own cone.
    let mut extras = Vec::with_capacity(k);
    'outer: for (p, c) in system.points.iter().zip(&system.cones) {
        for depth in c.depth()..c.depth() + MAX_EXTENSION {
            if extras.len() == k {
                break 'outer;
            }
            let on_path = p.letter(depth);
            for x in (0..d as u8).filter(|&x| x != on_path) {
                if extras.len() == k {
                    break 'outer;
                }
                let mut address = p.prefix(depth);
                address.push(x);
                extras.push(Cone::new(address));
            }
        }
    }
    if extras.len() != k {
        return Err(Error::ContractViolation(format!(
            "could not place {k} extra cones"
        )));
    }
    let mut gamma = complement;
    gamma.extend(extras);
    let delta = standard_partition(d, m + k)?.into_cones();
    let e_prime = complement_partition(d, &gamma)?;
    Ok(EPrimeData {
        gamma,
        m,
        k,
        delta,
        e_prime,
    })
}

/// The element that is the identity on `E'` and agrees with `z⁻¹ h z` off `E'`.
pub fn phi(h: &RnElement, data: &EPrimeData) -> Result<RnElement> {
    let mut rows: Vec<Row> = h
        .align_to(&data.delta)
        .into_iter()
        .map(|r| {
            let domain = data.z_inverse(&r.domain).expect("aligned to δ");
            let range = data.z_inverse(&r.range).expect("aligned to δ");
            Row::new(domain, range, r.action)
        })
        .collect();
    rows.extend(
        data.e_prime
            .iter()
            .map(|c| Row::new(c.clone(), c.clone(), GroupWord::identity())),
    );
    RnElement::from_rows(h.group().clone(), rows)
}

/// Least `i ≤ max_i` such that `f^{-i} h f^i` is the identity on `E`.
pub fn kernel_exhaustion_index(
    h: &RnElement,
    f: &RnElement,
    system: &SeparatedSystem,
    max_i: usize,
) -> Result<Option<usize>> {
    let mut fi = RnElement::identity(h.group().clone());
    for i in 0..=max_i {
        let conj = fi.invert().compose(&h.compose(&fi)?)?;
        if conj.is_identity_on(&system.cones) {
            return Ok(Some(i));
        }
        fi = f.compose(&fi)?;
    }
    Ok(None)
}

/// Checks `E ⊋ f(E) ⊋ f²(E) ⊋ …` for `levels` steps by comparing the image
/// addresses `α_i β_i^j` cone by cone.
pub fn check_nesting(f: &RnElement, system: &SeparatedSystem, levels: usize) -> Result<bool> {
    let mut fk = RnElement::identity(f.group().clone());
    let mut previous: Vec<Cone> = system.cones.clone();
    for _ in 0..levels {
        fk = f.compose(&fk)?;
        for (i, (c, prev)) in system.cones.iter().zip(&previous).enumerate() {
            let Some(image) = image_cone(&fk, c) else {
                return Ok(false);
            };
            let expected = prev.extend(system.period(i));
            if image != expected || !prev.contains_cone(&image) || image == *prev {
                return Ok(false);
            }
        }
        previous = system
            .cones
            .iter()
            .map(|c| image_cone(&fk, c).expect("checked above"))
            .collect();
    }
    Ok(true)
}

/// A Thompson-group element sending `r` to `q` when their tails agree
/// (equal periods up to rotation), by exchanging prefixes.
pub fn prefix_exchange(
    group: &Arc<AutomatonGroup>,
    r: &RationalPoint,
    q: &RationalPoint,
) -> Result<Option<RnElement>> {
    let n = r.period().len();
    if n != q.period().len() {
        return Ok(None);
    }
    let Some(shift) = (0..n)
        .find(|&s| r.drop_prefix(r.preperiod().len() + s) == q.drop_prefix(q.preperiod().len()))
    else {
        return Ok(None);
    };
    let mut u = r.prefix(r.preperiod().len() + shift);
    let mut v = q.prefix(q.preperiod().len());
    if u.is_empty() || v.is_empty() {
        u.extend_from_slice(&r.drop_prefix(u.len()).prefix(n));
        v.extend_from_slice(q.period());
    }
    let row = Row::new(Cone::new(u), Cone::new(v), GroupWord::identity());
    RnElement::make_element(group.clone(), &[row]).map(Some)
}

/// Best-effort search for an element sending `p` to `q`: a tree automorphism
/// given by a word of length at most `max_len`, followed by a prefix exchange.
/// `None` means nothing was found within the bound, not that no mover exists.
pub fn search_mover(
    group: &Arc<AutomatonGroup>,
    p: &RationalPoint,
    q: &RationalPoint,
    max_len: usize,
) -> Result<Option<RnElement>> {
    let d = group.degree();
    p.check_alphabet(d)?;
    q.check_alphabet(d)?;
    let gens: Vec<_> = group.all_gens().collect();
    let mut seen = std::collections::HashSet::new();
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..=max_len {
        let mut next = Vec::new();
        for w in layer {
            if !seen.insert(w.clone()) {
                continue;
            }
            let r = crate::rn::act_on_point(group, &w, p)?;
            if let Some(t) = prefix_exchange(group, &r, q)? {
                let mover = t.compose(&RnElement::from_word(group.clone(), w))?;
                return Ok(Some(mover));
            }
            next.extend(gens.iter().map(|&g| group.mul(&group.word([g]), &w)));
        }
        layer = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::germs::{germ_signature, periodic_nucleus};

    fn point(s: &str) -> RationalPoint {
        s.parse().unwrap()
    }

    fn cone(s: &str) -> Cone {
        s.parse().unwrap()
    }

    fn names(cones: &[Cone]) -> Vec<String> {
        cones.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn separation_examples() {
        let s = separate_points(2, &[point("(01)")]).unwrap();
        assert_eq!(names(&s.cones), ["01"]);
        let s = separate_points(2, &[point("(0)"), point("(1)")]).unwrap();
        assert_eq!(names(&s.cones), ["00", "11"]);
        let s = separate_points(2, &[point("(01)"), point("(10)")]).unwrap();
        assert_eq!(names(&s.cones), ["01", "10"]);
        assert!(matches!(
            separate_points(2, &[point("(1)"), point("1(1)")]),
            Err(Error::DuplicatePoint(_))
        ));
    }

    #[test]
    fn transporter_identity_mover() {
        let g = Arc::new(builtin::odometer());
        let id = RnElement::identity(g.clone());
        let h = tuple_transporter(
            &g,
            &[(point("(0)"), point("(0)"))],
            std::slice::from_ref(&id),
        )
        .unwrap();
        assert_eq!(h.evaluate(&point("(0)")).unwrap(), point("(0)"));
        assert!(h.equal(&id).unwrap());
    }

    #[test]
    fn transporter_swap() {
        let g = Arc::new(builtin::odometer());
        let swap = RnElement::from_rows(
            g.clone(),
            vec![
                Row::new(cone("0"), cone("1"), GroupWord::identity()),
                Row::new(cone("1"), cone("0"), GroupWord::identity()),
            ],
        )
        .unwrap();
        let pairs = [
            (point("(01)"), point("1(10)")),
            (point("(10)"), point("0(01)")),
        ];
        let h = tuple_transporter(&g, &pairs, &[swap.clone(), swap]).unwrap();
        for (p, q) in &pairs {
            assert_eq!(h.evaluate(p).unwrap(), *q);
        }
    }

    #[test]
    fn transporter_rejects_bad_mover() {
        let g = Arc::new(builtin::odometer());
        let id = RnElement::identity(g.clone());
        assert!(matches!(
            tuple_transporter(&g, &[(point("(0)"), point("(1)"))], &[id]),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn transporter_keeps_local_action() {
        let g = Arc::new(builtin::reflection());
        let remark = RnElement::make_element(
            g.clone(),
            &[Row::new(cone("0"), cone("01"), g.parse_word("a").unwrap())],
        )
        .unwrap();
        let p = point("(01)");
        let h = tuple_transporter(&g, &[(p.clone(), p.clone())], &[remark]).unwrap();
        assert_eq!(h.evaluate(&p).unwrap(), p);
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), p.period()).unwrap();
        let sig = germ_signature(&h, &p, &data, 8).unwrap();
        assert_eq!(g.format_word(&sig.nucleus_component), "a");
    }

    #[test]
    fn mover_search() {
        let g = Arc::new(builtin::reflection());
        let (p, q) = (point("(0)"), point("01(1)"));
        assert!(search_mover(&g, &p, &q, 0).unwrap().is_none());
        let h = search_mover(&g, &p, &q, 3).unwrap().unwrap();
        assert_eq!(h.evaluate(&p).unwrap(), q);
        let (p, q) = (point("0(01)"), point("(10)"));
        let h = search_mover(&g, &p, &q, 0).unwrap().unwrap();
        assert_eq!(h.evaluate(&p).unwrap(), q);
    }

    #[test]
    fn f_examples() {
        let g = Arc::new(builtin::reflection());
        let p = point("(01)");
        let s = separate_points(2, std::slice::from_ref(&p)).unwrap();
        let f = build_f(&g, &s).unwrap();
        let data = periodic_nucleus(&g, &g.nucleus(10, 10).unwrap(), p.period()).unwrap();
        let sig = germ_signature(&f, &p, &data, 8).unwrap();
        assert!(sig.nucleus_component.is_empty());
        assert_eq!(sig.delta, 2);

        let s = separate_points(2, &[point("(01)"), point("(10)")]).unwrap();
        let f = build_f(&g, &s).unwrap();
        for p in &s.points {
            assert_eq!(f.evaluate(p).unwrap(), *p);
        }
        assert!(check_nesting(&f, &s, 5).unwrap());
        let f3 = f.power(3);
        assert_eq!(image_cone(&f3, &cone("01")), Some(cone("01010101")));
    }

    #[test]
    fn e_prime_examples() {
        let s = separate_points(2, &[point("(01)")]).unwrap();
        let e = build_e_prime(2, &s).unwrap();
        assert_eq!(names(&e.gamma), ["00", "1"]);
        assert_eq!((e.m, e.k), (2, 0));
        assert_eq!(names(&e.delta), ["0", "1"]);
        assert_eq!(names(&e.e_prime), ["01"]);

        let s = separate_points(3, &[point("(0)")]).unwrap();
        let e = build_e_prime(3, &s).unwrap();
        assert_eq!((e.m, e.k), (2, 1));
        assert_eq!(names(&e.gamma), ["1", "2", "01"]);
        assert_eq!(names(&e.delta), ["0", "1", "2"]);
        assert_eq!(names(&e.e_prime), ["00", "02"]);
        assert!(s
            .points
            .iter()
            .all(|p| e.e_prime.iter().any(|c| p.in_cone(c))));
        assert_eq!(e.z(&cone("011")), Some(cone("21")));
    }

    #[test]
    fn phi_examples() {
        let g = Arc::new(builtin::grigorchuk());
        let s = separate_points(2, &[point("(1)")]).unwrap();
        let e = build_e_prime(2, &s).unwrap();
        let id = RnElement::identity(g.clone());
        assert!(phi(&id, &e).unwrap().equal(&id).unwrap());

        let a = RnElement::from_word(g.clone(), g.parse_word("a").unwrap());
        let pa = phi(&a, &e).unwrap();
        assert!(pa.is_identity_on(&e.e_prime));
        assert_eq!(pa.evaluate(&point("00(1)")).unwrap(), point("01(1)"));
        assert_eq!(pa.evaluate(&point("1(0)")).unwrap(), point("1(0)"));
    }

    #[test]
    fn kernel_exhaustion_example() {
        let g = Arc::new(builtin::grigorchuk());
        let s = separate_points(2, &[point("(1)")]).unwrap();
        let f = build_f(&g, &s).unwrap();
        // Identity on 111, swaps 0 and 10 elsewhere.
        let h = RnElement::make_element(
            g.clone(),
            &[
                Row::new(cone("111"), cone("111"), GroupWord::identity()),
                Row::new(cone("0"), cone("10"), g.parse_word("b").unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(kernel_exhaustion_index(&h, &f, &s, 8).unwrap(), Some(1));
        assert_eq!(kernel_exhaustion_index(&h, &f, &s, 0).unwrap(), None);
    }
}
