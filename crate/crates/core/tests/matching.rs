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

mod common;

use std::collections::BTreeSet;

use molbench::matching::{
    find_matches, has_match, monomorphisms, morgan_fingerprint, parse_smarts, tanimoto, LabeledGraph, MatchTarget,
    SmartsPattern,
};
use molbench::smiles::parse_molecule;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random labelled graph with at most `max_nodes` nodes.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, labels: u32) -> LabeledGraph {
    let n = rng.gen_range(1..=max_nodes);
    let density = rng.gen_range(0.1..0.8);
    let mut g = LabeledGraph { labels: (0..n).map(|_| rng.gen_range(0..labels)).collect(), edges: Vec::new() };
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                g.edges.push((a, b, rng.gen_range(0..2)));
            }
        }
    }
    g
}

/// All injective label- and edge-preserving maps by exhaustive search.
pub fn brute_force(p: &LabeledGraph, t: &LabeledGraph) -> BTreeSet<Vec<usize>> {
    fn edge(g: &LabeledGraph, a: usize, b: usize) -> Option<u32> {
        g.edges.iter().find(|&&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)).map(|e| e.2)
    }
    let mut out = BTreeSet::new();
    let mut map = Vec::new();
    fn rec(p: &LabeledGraph, t: &LabeledGraph, map: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let i = map.len();
        if i == p.labels.len() {
            let ok = p.edges.iter().all(|&(a, b, l)| edge(t, map[a], map[b]) == Some(l));
            if ok {
                out.insert(map.clone());
            }
            return;
        }
        for j in 0..t.labels.len() {
            if !map.contains(&j) && p.labels[i] == t.labels[j] {
                map.push(j);
                rec(p, t, map, out);
                map.pop();
            }
        }
    }
    rec(p, t, &mut map, &mut out);
    out
}

#[test]
fn vf2_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nonempty = 0;
    for case in 0..300 {
        let t = random_graph(&mut rng, 8, 2);
        let p = random_graph(&mut rng, t.labels.len().min(5), 2);
        let ours: BTreeSet<Vec<usize>> = monomorphisms(&p, &t).into_iter().collect();
        let expected = brute_force(&p, &t);
        assert_eq!(ours, expected, "case {case}: {p:?} in {t:?}");
        nonempty += usize::from(!expected.is_empty());
    }
    assert!(nonempty > 50);
}

#[test]
fn molecules_match_themselves() {
    for s in common::zinc_head(300).iter().chain(&common::qm9_head(300)) {
        let m = parse_molecule(s).unwrap();
        assert!(has_match(&SmartsPattern::from_molecule(&m), &MatchTarget::new(&m)), "{s}");
    }
}

#[test]
fn smarts_counts() {
    let count = |p: &str, m: &str| find_matches(&parse_smarts(p).unwrap(), &parse_molecule(m).unwrap()).len();
    assert_eq!(count("[CX3](=O)[OX2H1]", "CC(=O)O"), 1);
    assert_eq!(count("c1ccccc1", "c1ccc2ccccc2c1"), 2);
    assert_eq!(count("[#7]", "NCCN"), 2);
    assert_eq!(count("[R2]", "c1ccc2ccccc2c1"), 2);
    assert!(parse_smarts("[C").is_err());
}

fn pool() -> &'static [String] {
    static P: std::sync::OnceLock<Vec<String>> = std::sync::OnceLock::new();
    P.get_or_init(|| common::zinc_head(200))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fingerprints_ignore_atom_order(s in proptest::sample::select(pool()), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let m = parse_molecule(&s).unwrap();
        let mut order: Vec<usize> = (0..m.atom_count()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = m.permuted(&order);
        prop_assert_eq!(morgan_fingerprint(&m, 2, 2048), morgan_fingerprint(&p, 2, 2048));
    }

    #[test]
    fn tanimoto_is_symmetric_and_bounded(a in proptest::sample::select(pool()), b in proptest::sample::select(pool())) {
        let fa = morgan_fingerprint(&parse_molecule(&a).unwrap(), 2, 2048);
        let fb = morgan_fingerprint(&parse_molecule(&b).unwrap(), 2, 2048);
        let (x, y) = (tanimoto(&fa, &fb).unwrap(), tanimoto(&fb, &fa).unwrap());
        prop_assert_eq!(x, y);
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert_eq!(tanimoto(&fa, &fa).unwrap(), 1.0);
    }
}
