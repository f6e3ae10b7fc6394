//! Finite-state automorphisms of the rooted d-ary tree.
//!
//! A group is presented by an invertible Mealy automaton: every state carries a
//! permutation of the alphabet and, for each letter, the state that acts on the
//! subtree below that letter. Group elements are words over states and their
//! formal inverses. The rightmost letter of a word acts first, so
//! `apply(u·v, path) = apply(u, apply(v, path))`.

mod format;
mod nucleus;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::parse_group;
pub(crate) use format::tokens as format_tokens;
pub use nucleus::NucleusResult;

/// Largest supported alphabet: addresses are written as decimal digit strings.
pub const MAX_ALPHABET: usize = 10;

/// A state or the formal inverse of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gen {
    pub state: u32,
    pub inverse: bool,
}

impl Gen {
    pub fn new(state: u32, inverse: bool) -> Self {
        Gen { state, inverse }
    }

    pub fn inv(self) -> Self {
        Gen {
            state: self.state,
            inverse: !self.inverse,
        }
    }

    fn slot(self) -> usize {
        2 * self.state as usize + self.inverse as usize
    }
}

/// A reduced word over states and formal inverses. The empty word is the identity.
///
/// Words are only built through [`AutomatonGroup`], which reduces them eagerly.
/// Ordering is shortlex: shorter words first, then lexicographic on generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupWord {
    gens: Vec<Gen>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord { gens: Vec::new() }
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gens
            .len()
            .cmp(&other.gens.len())
            .then_with(|| self.gens.cmp(&other.gens))
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One state as written in a group definition: names instead of indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpec {
    pub name: String,
    pub perm: Vec<u8>,
    pub trans: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct State {
    name: String,
    perm: Vec<u8>,
    inv_perm: Vec<u8>,
    /// `None` is the implicit identity state.
    trans: Vec<Option<u32>>,
}

/// A self-similar group presented by a finite invertible automaton.
#[derive(Clone, Debug)]
pub struct AutomatonGroup {
    name: String,
    d: usize,
    states: Vec<State>,
    /// Generators that act trivially; dropped during reduction.
    dead: Vec<bool>,
    /// `cancels[x * width + y]` is set when the product `x·y` is trivial.
    cancels: Vec<bool>,
}

impl PartialEq for AutomatonGroup {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.d == other.d && self.states == other.states
    }
}

impl Eq for AutomatonGroup {}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl AutomatonGroup {
    pub fn new(name: impl Into<String>, d: usize, specs: Vec<StateSpec>) -> Result<Self> {
        let name = name.into();
        if !(2..=MAX_ALPHABET).contains(&d) {
            return Err(Error::InvalidAutomaton(format!(
                "alphabet size {d} outside 2..={MAX_ALPHABET}"
            )));
        }
        let mut by_name = HashMap::new();
        for (i, spec) in specs.iter().enumerate() {
            if spec.name == "id" || !is_identifier(&spec.name) {
                return Err(Error::InvalidAutomaton(format!(
                    "invalid state name `{}`",
                    spec.name
                )));
            }
            if by_name.insert(spec.name.clone(), i as u32).is_some() {
                return Err(Error::InvalidAutomaton(format!(
                    "duplicate state `{}`",
                    spec.name
                )));
            }
        }
        let mut states = Vec::with_capacity(specs.len());
        for spec in specs {
            if spec.perm.len() != d || spec.trans.len() != d {
                return Err(Error::InvalidAutomaton(format!(
                    "state `{}` needs {d} permutation entries and {d} transitions",
                    spec.name
                )));
            }
            let mut inv_perm = vec![u8::MAX; d];
            for (x, &y) in spec.perm.iter().enumerate() {
                if y as usize >= d || inv_perm[y as usize] != u8::MAX {
                    return Err(Error::InvalidAutomaton(format!(
                        "permutation of state `{}` is not a bijection",
                        spec.name
                    )));
                }
                inv_perm[y as usize] = x as u8;
            }
            let trans = spec
                .trans
                .iter()
                .map(|t| {
                    if t == "id" {
                        Ok(None)
                    } else {
                        by_name
                            .get(t)
                            .map(|&i| Some(i))
                            .ok_or_else(|| Error::UnknownState(t.clone()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            states.push(State {
                name: spec.name,
                perm: spec.perm,
                inv_perm,
                trans,
            });
        }

        let width = 2 * states.len();
        let mut group = AutomatonGroup {
            name,
            d,
            states,
            dead: vec![false; width],
            cancels: vec![false; width * width],
        };
        for g in group.all_gens() {
            group.cancels[g.slot() * width + g.inv().slot()] = true;
        }
        let dead: Vec<bool> = group
            .all_gens()
            .map(|g| group.is_trivial(&group.word([g])))
            .collect();
        group.dead = dead;
        for x in group.all_gens().collect::<Vec<_>>() {
            for y in group.all_gens().collect::<Vec<_>>() {
                if !group.dead[x.slot()] && !group.dead[y.slot()] {
                    let w = group.word([x, y]);
                    if group.is_trivial(&w) {
                        group.cancels[x.slot() * width + y.slot()] = true;
                    }
                }
            }
        }
        Ok(group)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Alphabet size.
    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, state: u32) -> &str {
        &self.states[state as usize].name
    }

    pub fn state_index(&self, name: &str) -> Option<u32> {
        self.states
            .iter()
            .position(|s| s.name == name)
            .map(|i| i as u32)
    }

    pub fn state_specs(&self) -> Vec<StateSpec> {
        self.states
            .iter()
            .map(|s| StateSpec {
                name: s.name.clone(),
                perm: s.perm.clone(),
                trans: s
                    .trans
                    .iter()
                    .map(|t| match t {
                        Some(i) => self.states[*i as usize].name.clone(),
                        None => "id".to_string(),
                    })
                    .collect(),
            })
            .collect()
    }

    /// Every generator: each state followed by its inverse.
    pub fn all_gens(&self) -> impl Iterator<Item = Gen> {
        (0..self.states.len() as u32).flat_map(|s| [Gen::new(s, false), Gen::new(s, true)])
    }

    /// Builds a word, applying free reduction and cancelling generators and
    /// adjacent pairs known to act trivially.
    pub fn word(&self, gens: impl IntoIterator<Item = Gen>) -> GroupWord {
        let width = 2 * self.states.len();
        let mut out: Vec<Gen> = Vec::new();
        for g in gens {
            if self.dead[g.slot()] {
                continue;
            }
            match out.last() {
                Some(&top) if self.cancels[top.slot() * width + g.slot()] => {
                    out.pop();
                }
                _ => out.push(g),
            }
        }
        GroupWord { gens: out }
    }

    pub fn generator(&self, name: &str) -> Result<GroupWord> {
        let s = self
            .state_index(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))?;
        Ok(self.word([Gen::new(s, false)]))
    }

    /// Parses `a.b'.c` (apostrophe marks an inverse; `id` is the identity).
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let text = text.trim();
        let mut gens = Vec::new();
        if text.is_empty() {
            return Ok(GroupWord::identity());
        }
        let mut column = 1;
        for token in text.split('.') {
            let (name, inverse) = match token.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (token, false),
            };
            if name == "id" {
                column += token.len() + 1;
                continue;
            }
            let s = self.state_index(name).ok_or_else(|| {
                Error::parse(
                    1,
                    column,
                    format!("unknown state `{name}` in word `{text}`"),
                )
            })?;
            gens.push(Gen::new(s, inverse));
            column += token.len() + 1;
        }
        Ok(self.word(gens))
    }

    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "id".to_string();
        }
        w.gens
            .iter()
            .map(|g| {
                let name = self.state_name(g.state);
                if g.inverse {
                    format!("{name}'")
                } else {
                    name.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn mul(&self, left: &GroupWord, right: &GroupWord) -> GroupWord {
        self.word(left.gens.iter().chain(right.gens.iter()).copied())
    }

    pub fn inverse(&self, w: &GroupWord) -> GroupWord {
        self.word(w.gens.iter().rev().map(|g| g.inv()))
    }

    /// `w^k` for any integer `k`.
    pub fn power(&self, w: &GroupWord, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse(w) } else { w.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    pub fn check_path(&self, path: &[u8]) -> Result<()> {
        match path.iter().find(|&&x| x as usize >= self.d) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, d: self.d }),
            None => Ok(()),
        }
    }

    /// Image of a single letter together with the restriction at that letter.
    /// The right factor is restricted first; each generator to its left sees
    /// the image letter produced so far.
    pub fn step(&self, w: &GroupWord, x: u8) -> (u8, GroupWord) {
        let mut cur = x as usize;
        let mut restricted = Vec::with_capacity(w.gens.len());
        for g in w.gens.iter().rev() {
            let st = &self.states[g.state as usize];
            if g.inverse {
                let pre = st.inv_perm[cur] as usize;
                if let Some(t) = st.trans[pre] {
                    restricted.push(Gen::new(t, true));
                }
                cur = pre;
            } else {
                if let Some(t) = st.trans[cur] {
                    restricted.push(Gen::new(t, false));
                }
                cur = st.perm[cur] as usize;
            }
        }
        restricted.reverse();
        (cur as u8, self.word(restricted))
    }

    /// Image of `path` and the local action `w|_path`.
    pub fn apply_and_restrict(&self, w: &GroupWord, path: &[u8]) -> Result<(Vec<u8>, GroupWord)> {
        self.check_path(path)?;
        let mut cur = w.clone();
        let mut image = Vec::with_capacity(path.len());
        for &x in path {
            let (y, next) = self.step(&cur, x);
            image.push(y);
            cur = next;
        }
        Ok((image, cur))
    }

    pub fn apply(&self, w: &GroupWord, path: &[u8]) -> Result<Vec<u8>> {
        self.apply_and_restrict(w, path).map(|(image, _)| image)
    }

    pub fn restrict(&self, w: &GroupWord, path: &[u8]) -> Result<GroupWord> {
        self.apply_and_restrict(w, path).map(|(_, r)| r)
    }

    /// Root permutation of `w` as an image list.
    pub fn root_perm(&self, w: &GroupWord) -> Vec<u8> {
        (0..self.d as u8).map(|x| self.step(w, x).0).collect()
    }

    /// Decides whether `w` acts trivially on the whole tree by exploring its
    /// (finite) set of restrictions and checking every root permutation.
    pub fn is_trivial(&self, w: &GroupWord) -> bool {
        let mut seen: HashSet<GroupWord> = HashSet::new();
        let mut queue = VecDeque::new();
        if !w.is_empty() {
            seen.insert(w.clone());
            queue.push_back(w.clone());
        }
        while let Some(u) = queue.pop_front() {
            for x in 0..self.d as u8 {
                let (y, r) = self.step(&u, x);
                if y != x {
                    return false;
                }
                if !r.is_empty() && seen.insert(r.clone()) {
                    queue.push_back(r);
                }
            }
        }
        true
    }

    pub fn equal(&self, a: &GroupWord, b: &GroupWord) -> bool {
        a == b || self.is_trivial(&self.mul(a, &self.inverse(b)))
    }

    /// Action on every vertex down to a fixed level, listed depth-first.
    /// Equal elements have equal fingerprints.
    pub(crate) fn fingerprint(&self, w: &GroupWord) -> Vec<u8> {
        fn walk(g: &AutomatonGroup, w: &GroupWord, depth: usize, out: &mut Vec<u8>) {
            for x in 0..g.d as u8 {
                let (y, r) = g.step(w, x);
                out.push(y);
                if depth > 1 {
                    walk(g, &r, depth - 1, out);
                }
            }
        }
        let mut depth = 1;
        while self.d.pow(depth as u32 + 1) <= 64 {
            depth += 1;
        }
        let mut out = Vec::new();
        walk(self, w, depth, &mut out);
        out
    }
}

/// A set of group elements kept pairwise inequivalent, each represented by
/// the shortlex-least word seen for it.
#[derive(Clone, Debug, Default)]
pub(crate) struct ElementIndex {
    reps: Vec<GroupWord>,
    buckets: HashMap<Vec<u8>, Vec<usize>>,
}

impl ElementIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[GroupWord] {
        &self.reps
    }

    pub fn get(&self, i: usize) -> &GroupWord {
        &self.reps[i]
    }

    fn lookup(&self, g: &AutomatonGroup, w: &GroupWord, fp: &[u8]) -> Option<usize> {
        self.buckets
            .get(fp)?
            .iter()
            .copied()
            .find(|&i| g.equal(&self.reps[i], w))
    }

    pub fn find(&self, g: &AutomatonGroup, w: &GroupWord) -> Option<usize> {
        self.lookup(g, w, &g.fingerprint(w))
    }

    /// Returns the index of the class of `w` and whether it was new.
    pub fn insert(&mut self, g: &AutomatonGroup, w: GroupWord) -> (usize, bool) {
        let fp = g.fingerprint(&w);
        if let Some(i) = self.lookup(g, &w, &fp) {
            if w < self.reps[i] {
                self.reps[i] = w;
            }
            return (i, false);
        }
        let i = self.reps.len();
        self.reps.push(w);
        self.buckets.entry(fp).or_default().push(i);
        (i, true)
    }
}

impl fmt::Display for AutomatonGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {}", self.name)?;
        writeln!(f, "alphabet {}", self.d)?;
        for spec in self.state_specs() {
            let perm: Vec<String> = spec.perm.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "state {} perm {} -> {}",
                spec.name,
                perm.join(" "),
                spec.trans.join(" ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn w(g: &AutomatonGroup, s: &str) -> GroupWord {
        g.parse_word(s).unwrap()
    }

    #[test]
    fn restrict_identity_is_identity() {
        let g = builtin::odometer();
        assert!(g
            .restrict(&GroupWord::identity(), &[0, 1, 1, 0])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn odometer_restrictions() {
        let g = builtin::odometer();
        let a = w(&g, "a");
        assert!(g.restrict(&a, &[0]).unwrap().is_empty());
        assert_eq!(g.restrict(&a, &[1]).unwrap(), a);
    }

    #[test]
    fn grigorchuk_b_restricts_to_a() {
        let g = builtin::grigorchuk();
        assert_eq!(g.restrict(&w(&g, "b"), &[0]).unwrap(), w(&g, "a"));
    }

    #[test]
    fn odometer_apply() {
        let g = builtin::odometer();
        assert_eq!(
            g.apply(&GroupWord::identity(), &[0, 1, 0]).unwrap(),
            vec![0, 1, 0]
        );
        assert_eq!(g.apply(&w(&g, "a"), &[1, 1, 1]).unwrap(), vec![0, 0, 0]);
        // Two increments of the least-significant-first counter 10 give 11.
        let aa = g.apply(&w(&g, "a.a"), &[1, 0]).unwrap();
        let twice = g
            .apply(&w(&g, "a"), &g.apply(&w(&g, "a"), &[1, 0]).unwrap())
            .unwrap();
        assert_eq!(aa, twice);
        assert_eq!(aa, vec![1, 1]);
    }

    #[test]
    fn letter_out_of_range() {
        let g = builtin::odometer();
        assert_eq!(
            g.apply(&w(&g, "a"), &[0, 2]),
            Err(Error::LetterOutOfRange { letter: 2, d: 2 })
        );
        assert!(g.restrict(&w(&g, "a"), &[5]).is_err());
    }

    #[test]
    fn word_problem_examples() {
        let odo = builtin::odometer();
        let gri = builtin::grigorchuk();
        assert!(odo.is_trivial(&w(&odo, "a.a'")));
        assert!(gri.is_trivial(&w(&gri, "a.a")));
        assert!(gri.is_trivial(&w(&gri, "b.c.d")));
        assert!(!odo.is_trivial(&w(&odo, "a.a")));
        assert!(gri.equal(&w(&gri, "b.c"), &w(&gri, "d")));
        assert!(!odo.equal(&w(&odo, "a"), &w(&odo, "a'")));
        let x = w(&gri, "a.b.a.c");
        assert!(gri.equal(&x, &x));
    }

    #[test]
    fn free_reduction_is_eager() {
        let g = builtin::odometer();
        assert!(w(&g, "a.a'.a'.a").is_empty());
        assert_eq!(w(&g, "a.a.a'"), w(&g, "a"));
    }

    #[test]
    fn word_round_trip() {
        let g = builtin::grigorchuk();
        let x = w(&g, "a.b'.c");
        assert_eq!(w(&g, &g.format_word(&x)), x);
        assert_eq!(g.format_word(&GroupWord::identity()), "id");
        assert!(g.parse_word("a.q").is_err());
    }

    #[test]
    fn rejects_bad_automata() {
        let spec = |name: &str, perm: Vec<u8>, trans: &[&str]| StateSpec {
            name: name.into(),
            perm,
            trans: trans.iter().map(|s| s.to_string()).collect(),
        };
        assert!(AutomatonGroup::new("x", 2, vec![spec("a", vec![0, 0], &["id", "id"])]).is_err());
        assert!(AutomatonGroup::new("x", 2, vec![spec("a", vec![1, 0], &["b", "id"])]).is_err());
        assert!(AutomatonGroup::new(
            "x",
            2,
            vec![
                spec("a", vec![1, 0], &["id", "id"]),
                spec("a", vec![0, 1], &["id", "id"])
            ]
        )
        .is_err());
        assert!(AutomatonGroup::new("x", 1, vec![]).is_err());
    }

    #[test]
    fn shortlex_order() {
        let g = builtin::grigorchuk();
        assert!(w(&g, "d") < w(&g, "a.b"));
        assert!(w(&g, "a.b") < w(&g, "a.c"));
        assert!(GroupWord::identity() < w(&g, "a"));
    }
}
