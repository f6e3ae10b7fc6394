use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::{AutomatonGroup, ElementIndex, Gen, GroupWord};
use crate::error::{Error, Result};

/// A certified nucleus: pairwise inequivalent representatives, closed under
/// restriction, with the depth past which every restriction of a pairwise
/// product lies in the set.
#[derive(Clone, Debug)]
pub struct NucleusResult {
    index: ElementIndex,
    depth_certificate: usize,
}

#[derive(Serialize)]
struct NucleusView<'a> {
    elements: Vec<String>,
    depth_certificate: usize,
    group: &'a str,
}

impl NucleusResult {
    pub fn elements(&self) -> &[GroupWord] {
        self.index.reps()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.len() == 0
    }

    pub fn depth_certificate(&self) -> usize {
        self.depth_certificate
    }

    /// Position of the element equal to `w`, if any.
    pub fn find(&self, group: &AutomatonGroup, w: &GroupWord) -> Option<usize> {
        self.index.find(group, w)
    }

    pub fn contains(&self, group: &AutomatonGroup, w: &GroupWord) -> bool {
        self.find(group, w).is_some()
    }

    pub fn to_json(&self, group: &AutomatonGroup) -> serde_json::Value {
        serde_json::to_value(NucleusView {
            elements: self
                .elements()
                .iter()
                .map(|w| group.format_word(w))
                .collect(),
            depth_certificate: self.depth_certificate,
            group: group.name(),
        })
        .expect("nucleus view serializes")
    }
}

/// Restriction graph of one element, vertices taken up to equality.
struct RestrictionGraph {
    nodes: Vec<GroupWord>,
    edges: Vec<Vec<usize>>,
}

impl RestrictionGraph {
    /// Vertices lying on a cycle, together with everything reachable from them.
    fn recurrent(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let reaches = |from: usize, target: usize| -> bool {
            let mut seen = vec![false; n];
            let mut stack = vec![from];
            while let Some(v) = stack.pop() {
                if v == target {
                    return true;
                }
                if !std::mem::replace(&mut seen[v], true) {
                    stack.extend(self.edges[v].iter().copied());
                }
            }
            false
        };
        let mut marked = vec![false; n];
        let mut stack: Vec<usize> = (0..n)
            .filter(|&v| self.edges[v].iter().any(|&s| reaches(s, v)))
            .collect();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut marked[v], true) {
                stack.extend(self.edges[v].iter().copied());
            }
        }
        (0..n).filter(|&v| marked[v]).collect()
    }
}

impl AutomatonGroup {
    fn restriction_graph(&self, w: &GroupWord, max_depth: usize) -> Result<RestrictionGraph> {
        let mut index = ElementIndex::new();
        let mut depth = vec![0usize];
        let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
        index.insert(self, w.clone());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            let word = index.get(v).clone();
            for x in 0..self.d as u8 {
                let (_, r) = self.step(&word, x);
                let (t, new) = index.insert(self, r);
                if new {
                    if depth[v] + 1 > max_depth {
                        return Err(Error::NotContractingWithinBounds(format!(
                            "restriction graph of `{}` deeper than {max_depth}",
                            self.format_word(w)
                        )));
                    }
                    depth.push(depth[v] + 1);
                    edges.push(Vec::new());
                    queue.push_back(t);
                }
                edges[v].push(t);
            }
        }
        Ok(RestrictionGraph {
            nodes: index.reps().to_vec(),
            edges,
        })
    }

    /// Computes the nucleus by closing the recurrent parts of restriction
    /// graphs of generators and of pairwise products until nothing new appears.
    ///
    /// This is a semi-algorithm: for a group that is not contracting it fails
    /// with [`Error::NotContractingWithinBounds`] once a cap is hit.
    pub fn nucleus(&self, max_size: usize, max_depth: usize) -> Result<NucleusResult> {
        if max_size == 0 || max_depth == 0 {
            return Err(Error::BoundExceeded(
                "nucleus bounds must be positive".into(),
            ));
        }
        let mut index = ElementIndex::new();
        let too_big = |len: usize| {
            Error::NotContractingWithinBounds(format!(
                "candidate nucleus grew past {max_size} elements (reached {len})"
            ))
        };
        let seeds: Vec<GroupWord> = std::iter::once(GroupWord::identity())
            .chain(self.all_gens().map(|g: Gen| self.word([g])))
            .collect();
        for seed in seeds {
            let graph = self.restriction_graph(&seed, max_depth)?;
            for v in graph.recurrent() {
                index.insert(self, graph.nodes[v].clone());
            }
            if index.len() > max_size {
                return Err(too_big(index.len()));
            }
        }

        let mut done = 0;
        while index.len() > done {
            let n = index.len();
            for i in 0..n {
                for j in 0..n {
                    if i < done && j < done {
                        continue;
                    }
                    let product = self.mul(index.get(i), index.get(j));
                    let graph = self.restriction_graph(&product, max_depth)?;
                    for v in graph.recurrent() {
                        index.insert(self, graph.nodes[v].clone());
                    }
                    if index.len() > max_size {
                        return Err(too_big(index.len()));
                    }
                }
            }
            done = n;
        }

        let mut reps = index.reps().to_vec();
        reps.sort();
        let mut sorted = ElementIndex::new();
        for r in reps {
            sorted.insert(self, r);
        }
        let mut result = NucleusResult {
            index: sorted,
            depth_certificate: 0,
        };
        let mut certificate = 0;
        for a in result.elements() {
            for b in result.elements() {
                let depth = self.contraction_depth(&self.mul(a, b), &result, max_depth)?;
                certificate = certificate.max(depth);
            }
        }
        result.depth_certificate = certificate;
        Ok(result)
    }

    /// Least `m` such that every restriction of `w` at depth `m` equals a
    /// nucleus element. Fails once `cap` levels have been explored.
    pub fn contraction_depth(
        &self,
        w: &GroupWord,
        nucleus: &NucleusResult,
        cap: usize,
    ) -> Result<usize> {
        let mut level: HashSet<GroupWord> = HashSet::from([w.clone()]);
        let mut depth = 0;
        loop {
            level.retain(|u| !nucleus.contains(self, u));
            if level.is_empty() {
                return Ok(depth);
            }
            if depth >= cap {
                return Err(Error::BoundExceeded(format!(
                    "restrictions of `{}` not inside the nucleus by depth {cap}",
                    self.format_word(w)
                )));
            }
            level = level
                .iter()
                .flat_map(|u| (0..self.d as u8).map(move |x| (u, x)))
                .map(|(u, x)| self.step(u, x).1)
                .collect();
            depth += 1;
        }
    }
}
