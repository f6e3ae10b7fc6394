//! Seeded random generation of words, points and elements for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::{AutomatonGroup, GroupWord};
use crate::cantor::{complement_partition, Cone, RationalPoint};
use crate::error::{Error, Result};
use crate::rn::{RnElement, Row};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A reduced word built from `len` uniformly chosen generators.
pub fn random_word(rng: &mut SampleRng, group: &AutomatonGroup, len: usize) -> GroupWord {
    let gens: Vec<_> = group.all_gens().collect();
    group.word((0..len).map(|_| *gens.choose(rng).expect("groups have states")))
}

pub fn random_point(
    rng: &mut SampleRng,
    d: usize,
    max_pre: usize,
    max_period: usize,
) -> RationalPoint {
    let pre_len = rng.gen_range(0..=max_pre);
    let per_len = rng.gen_range(1..=max_period.max(1));
    let pre: Vec<u8> = (0..pre_len).map(|_| rng.gen_range(0..d as u8)).collect();
    let period: Vec<u8> = (0..per_len).map(|_| rng.gen_range(0..d as u8)).collect();
    RationalPoint::canonicalize(&pre, &period).expect("period is nonempty")
}

/// `count` pairwise distinct random points.
pub fn distinct_points(
    rng: &mut SampleRng,
    d: usize,
    count: usize,
    max_pre: usize,
    max_period: usize,
) -> Vec<RationalPoint> {
    let mut points: Vec<RationalPoint> = Vec::with_capacity(count);
    while points.len() < count {
        let p = random_point(rng, d, max_pre, max_period);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}

/// Splits `splits` randomly chosen cones of `cones` into their children.
pub fn random_refinement(
    rng: &mut SampleRng,
    d: usize,
    cones: &[Cone],
    splits: usize,
) -> Vec<Cone> {
    let mut out = cones.to_vec();
    for _ in 0..splits {
        let i = rng.gen_range(0..out.len());
        let c = out.swap_remove(i);
        out.extend((0..d as u8).map(|x| c.child(x)));
    }
    out.sort();
    out
}

/// A random element that is the identity on each cone of `fixed` (which must
/// be pairwise disjoint and not cover the space). Elsewhere it maps a random
/// refinement of the complement onto another one with random local actions of
/// length up to `word_len`; `word_len = 0` gives a Thompson-group element.
pub fn random_element_fixing(
    rng: &mut SampleRng,
    group: &Arc<AutomatonGroup>,
    fixed: &[Cone],
    splits: usize,
    word_len: usize,
) -> Result<RnElement> {
    let d = group.degree();
    let rest = complement_partition(d, fixed)?;
    if rest.is_empty() {
        return Err(Error::CoveringCones);
    }
    let n = rng.gen_range(0..=splits);
    let domains = random_refinement(rng, d, &rest, n);
    let mut ranges = random_refinement(rng, d, &rest, n);
    ranges.shuffle(rng);
    let mut rows: Vec<Row> = domains
        .into_iter()
        .zip(ranges)
        .map(|(a, b)| {
            let len = rng.gen_range(0..=word_len);
            Row::new(a, b, random_word(rng, group, len))
        })
        .collect();
    rows.extend(
        fixed
            .iter()
            .map(|c| Row::new(c.clone(), c.clone(), GroupWord::identity())),
    );
    RnElement::from_rows(group.clone(), rows)
}

pub fn random_element(
    rng: &mut SampleRng,
    group: &Arc<AutomatonGroup>,
    splits: usize,
    word_len: usize,
) -> RnElement {
    random_element_fixing(rng, group, &[], splits, word_len)
        .expect("the root partition is complete")
}

/// A random element fixing `p`: a row `p[..i] → p[..j]` with a local action
/// sending the tail of `p` after `i` to its tail after `j`, completed by
/// `make_element`, then composed with an element that is the identity near `p`.
///
/// With `thompson_only` every local action is trivial.
pub fn random_stabilizer(
    rng: &mut SampleRng,
    group: &Arc<AutomatonGroup>,
    p: &RationalPoint,
    word_len: usize,
    thompson_only: bool,
) -> Result<RnElement> {
    let span = p.preperiod().len() + p.period().len();
    // A few attempts with fresh local actions; the identity always succeeds.
    for attempt in 0..16 {
        let g = if thompson_only || attempt == 15 {
            GroupWord::identity()
        } else {
            let len = rng.gen_range(0..=word_len);
            random_word(rng, group, len)
        };
        let i = rng.gen_range(1..=span + 1);
        let image = crate::rn::act_on_point(group, &g, &p.drop_prefix(i))?;
        let targets: Vec<usize> = (1..=span + 1)
            .filter(|&j| p.drop_prefix(j) == image)
            .collect();
        let Some(&j) = targets.choose(rng) else {
            continue;
        };
        let j = j + p.period().len() * rng.gen_range(0..3);
        let row = Row::new(Cone::new(p.prefix(i)), Cone::new(p.prefix(j)), g);
        let base = RnElement::make_element(group.clone(), &[row])?;
        let guard = Cone::new(p.prefix(i.max(j) + 1));
        let noise = random_element_fixing(
            rng,
            group,
            &[guard],
            2,
            if thompson_only { 0 } else { word_len },
        )?;
        return noise.compose(&base);
    }
    unreachable!("the trivial local action always has a target")
}

/// Tree automorphisms `(ε, ε, w)` with `w` fixing `p`, from up to `tries` random words.
pub fn group_stabilizers(
    rng: &mut SampleRng,
    group: &Arc<AutomatonGroup>,
    p: &RationalPoint,
    word_len: usize,
    tries: usize,
) -> Result<Vec<RnElement>> {
    let mut out = Vec::new();
    for _ in 0..tries {
        let len = rng.gen_range(0..=word_len);
        let w = random_word(rng, group, len);
        if crate::rn::act_on_point(group, &w, p)? == *p {
            out.push(RnElement::from_word(group.clone(), w));
        }
    }
    Ok(out)
}

/// Admissible input for `make_element`: `n` disjoint, non-covering domain
/// cones, as many range cones, and random local actions.
pub fn random_pair_list(
    rng: &mut SampleRng,
    group: &AutomatonGroup,
    n: usize,
    word_len: usize,
) -> Vec<Row> {
    let d = group.degree();
    let pick = |rng: &mut SampleRng| -> Vec<Cone> {
        // Enough splits to leave at least one cone unused.
        let splits = n.div_ceil(d - 1) + rng.gen_range(0..3);
        let mut cones = random_refinement(rng, d, &[Cone::root()], splits);
        cones.shuffle(rng);
        cones.truncate(n);
        cones
    };
    let domains = pick(rng);
    let ranges = pick(rng);
    domains
        .into_iter()
        .zip(ranges)
        .map(|(a, b)| {
            let len = rng.gen_range(0..=word_len);
            Row::new(a, b, random_word(rng, group, len))
        })
        .collect()
}

/// Source/target pairs together with one mover per pair.
pub type TransportInstance = (Vec<(RationalPoint, RationalPoint)>, Vec<RnElement>);

/// Distinct sources, random movers, and distinct targets `q_i = h_i(p_i)`.
pub fn random_transport_instance(
    rng: &mut SampleRng,
    group: &Arc<AutomatonGroup>,
    n: usize,
) -> Result<TransportInstance> {
    let d = group.degree();
    let sources = distinct_points(rng, d, n, 3, 3);
    let mut pairs = Vec::with_capacity(n);
    let mut movers = Vec::with_capacity(n);
    for p in sources {
        loop {
            let h = random_element(rng, group, 3, 3);
            let q = h.evaluate(&p)?;
            if pairs.iter().all(|(_, other)| *other != q) {
                pairs.push((p, q));
                movers.push(h);
                break;
            }
        }
    }
    Ok((pairs, movers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn same_seed_same_sample() {
        let g = Arc::new(builtin::grigorchuk());
        let a = random_element(&mut rng(7), &g, 3, 3);
        let b = random_element(&mut rng(7), &g, 3, 3);
        assert_eq!(a.rows(), b.rows());
    }

    #[test]
    fn stabilizers_fix_the_point() {
        let g = Arc::new(builtin::reflection());
        let p: RationalPoint = "(01)".parse().unwrap();
        let mut r = rng(1);
        for _ in 0..30 {
            let h = random_stabilizer(&mut r, &g, &p, 3, false).unwrap();
            assert_eq!(h.evaluate(&p).unwrap(), p);
            let t = random_stabilizer(&mut r, &g, &p, 3, true).unwrap();
            assert!(t.rows().iter().all(|row| row.action.is_empty()));
        }
    }

    #[test]
    fn fixing_elements_are_identity_on_fixed_cones() {
        let g = Arc::new(builtin::odometer());
        let fixed: Vec<Cone> = vec!["01".parse().unwrap(), "110".parse().unwrap()];
        let mut r = rng(3);
        for _ in 0..20 {
            let h = random_element_fixing(&mut r, &g, &fixed, 3, 2).unwrap();
            assert!(h.is_identity_on(&fixed));
        }
    }

    #[test]
    fn pair_lists_are_admissible() {
        let g = builtin::gupta_sidki_3();
        let mut r = rng(5);
        for n in 1..5 {
            let rows = random_pair_list(&mut r, &g, n, 2);
            let domains: Vec<Cone> = rows.iter().map(|r| r.domain.clone()).collect();
            assert!(!complement_partition(3, &domains).unwrap().is_empty());
        }
    }
}
