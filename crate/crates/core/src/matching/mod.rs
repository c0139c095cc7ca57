// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Substructure patterns and circular fingerprints.

mod morgan;
mod smarts;
mod target;
mod vf2;

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::molgraph::Molecule;

pub use morgan::{
    environment_counts, morgan_fingerprint, tanimoto, Fingerprint, FingerprintError, DEFAULT_RADIUS, DEFAULT_WIDTH,
};
pub use smarts::{parse_smarts, SmartsError, SmartsErrorKind, SmartsPattern};
pub use target::MatchTarget;

/// Distinct matched atom sets of `pattern` in `mol`, one mapping each,
/// indexed by pattern atom.
pub fn find_matches(pattern: &SmartsPattern, mol: &Molecule) -> Vec<Vec<usize>> {
    find_matches_in(pattern, &MatchTarget::new(mol), true)
}

/// All embeddings into a prepared target, or one per atom set when
/// `uniquify` is set.
pub fn find_matches_in(pattern: &SmartsPattern, target: &MatchTarget, uniquify: bool) -> Vec<Vec<usize>> {
    let hits = recursive_hits(pattern, target);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    run(pattern, target, &hits, None, |map| {
        if uniquify {
            let mut key = map.to_vec();
            key.sort_unstable();
            if !seen.insert(key) {
                return ControlFlow::Continue(());
            }
        }
        out.push(map.to_vec());
        ControlFlow::Continue(())
    });
    out
}

pub fn has_match(pattern: &SmartsPattern, target: &MatchTarget) -> bool {
    let hits = recursive_hits(pattern, target);
    let mut found = false;
    run(pattern, target, &hits, None, |_| {
        found = true;
        ControlFlow::Break(())
    });
    found
}

/// Number of distinct matched atom sets.
pub fn count_matches(pattern: &SmartsPattern, target: &MatchTarget) -> usize {
    find_matches_in(pattern, target, true).len()
}

/// Target atoms that pattern atom 0 can occupy in some complete match.
pub fn root_matches(pattern: &SmartsPattern, target: &MatchTarget) -> Vec<bool> {
    let hits = recursive_hits(pattern, target);
    root_hits(pattern, target, &hits, None)
}

/// Like [`root_matches`] but only tries the target atoms flagged in
/// `candidates`.
pub fn root_matches_among(pattern: &SmartsPattern, target: &MatchTarget, candidates: &[bool]) -> Vec<bool> {
    if !candidates.iter().any(|&c| c) {
        return vec![false; target.atom_count()];
    }
    let hits = recursive_hits(pattern, target);
    root_hits(pattern, target, &hits, Some(candidates))
}

fn root_hits(
    pattern: &SmartsPattern,
    target: &MatchTarget,
    hits: &[Vec<bool>],
    candidates: Option<&[bool]>,
) -> Vec<bool> {
    let mut out = vec![false; target.atom_count()];
    if pattern.atom_count() == 0 {
        return out;
    }
    for (t, slot) in out.iter_mut().enumerate() {
        if candidates.is_some_and(|c| !c.get(t).copied().unwrap_or(false)) {
            continue;
        }
        if !pattern.atom_matches(0, &target.atoms[t], t, hits) {
            continue;
        }
        run(pattern, target, hits, Some(t), |_| {
            *slot = true;
            ControlFlow::Break(())
        });
    }
    out
}

fn recursive_hits(pattern: &SmartsPattern, target: &MatchTarget) -> Vec<Vec<bool>> {
    pattern.recursive.iter().map(|sub| root_hits(sub, target, &[], None)).collect()
}

fn run<V: FnMut(&[usize]) -> ControlFlow<()>>(
    pattern: &SmartsPattern,
    target: &MatchTarget,
    hits: &[Vec<bool>],
    root: Option<usize>,
    visit: V,
) {
    vf2::search(
        &pattern.adjacency,
        &target.adjacency,
        |p, t| pattern.atom_matches(p, &target.atoms[t], t, hits),
        |pe, te| pattern.bond_matches(pe, &target.bonds[te]),
        root,
        visit,
    );
}

/// A node- and edge-labelled simple graph for exercising the matcher
/// directly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    pub labels: Vec<u32>,
    pub edges: Vec<(usize, usize, u32)>,
}

impl LabeledGraph {
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for (k, &(a, b, _)) in self.edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        adj
    }
}

/// Every label-preserving injection of `pattern` into `target` that maps
/// each pattern edge onto a target edge with the same label.
pub fn monomorphisms(pattern: &LabeledGraph, target: &LabeledGraph) -> Vec<Vec<usize>> {
    let (pa, ta) = (pattern.adjacency(), target.adjacency());
    let mut out = Vec::new();
    vf2::search(
        &pa,
        &ta,
        |p, t| pattern.labels[p] == target.labels[t],
        |pe, te| pattern.edges[pe].2 == target.edges[te].2,
        None,
        |map| {
            out.push(map.to_vec());
            ControlFlow::Continue(())
        },
    );
    out
}
