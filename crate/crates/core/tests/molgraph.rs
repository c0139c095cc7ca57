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

use molbench::molgraph::{cycle_rank, kekulize, perceive_aromaticity, Atom, BondOrder, Element, Molecule, RingInfo};
use molbench::smiles::{canonical_smiles, parse_molecule, write};
use proptest::prelude::*;

fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..14).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 0..3 * n)))
}

fn carbon_graph(n: usize, pairs: &[(usize, usize)]) -> Molecule {
    let mut m = Molecule::new();
    for _ in 0..n {
        m.add_atom(Atom::new(Element::C));
    }
    for &(a, b) in pairs {
        if a != b && m.bond_between(a, b).is_none() {
            m.add_bond(a, b, BondOrder::Single).unwrap();
        }
    }
    m
}

/// Components by union-find, independent of the library.
fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut c = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            c -= 1;
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_count_is_cycle_rank((n, pairs) in random_graph()) {
        let m = carbon_graph(n, &pairs);
        let edges: Vec<(usize, usize)> = m.bonds().iter().map(|b| (b.a, b.b)).collect();
        let expected = edges.len() + components(n, &edges) - n;
        prop_assert_eq!(RingInfo::new(&m).num_rings(), expected);
        prop_assert_eq!(cycle_rank(n, &edges), expected);
    }

    #[test]
    fn rings_are_closed_cycles((n, pairs) in random_graph()) {
        let m = carbon_graph(n, &pairs);
        for ring in RingInfo::new(&m).rings() {
            prop_assert!(ring.len() >= 3);
            for k in 0..ring.len() {
                prop_assert!(m.bond_between(ring[k], ring[(k + 1) % ring.len()]).is_some());
            }
        }
    }
}

/// Degree sum of the hydrogen-completed graph: per-atom valence of every
/// atom plus one for each attached hydrogen.
fn hydrogen_completed_degree_sum(m: &Molecule) -> u32 {
    (0..m.atom_count()).map(|i| m.total_valence(i) + m.total_h(i)).sum()
}

fn incident_order_sum(m: &Molecule, i: usize) -> u32 {
    m.neighbors(i).iter().map(|&(_, b)| m.kekule_order(b).valence_contribution()).sum()
}

#[test]
fn degree_sum_parity_and_aromaticity_on_datasets() {
    let mut checked = 0;
    for (m, _) in common::qm9().train().chain(common::zinc().train()).step_by(7) {
        for i in 0..m.atom_count() {
            assert_eq!(m.total_valence(i), incident_order_sum(m, i) + m.total_h(i));
        }
        assert_eq!(hydrogen_completed_degree_sum(m) % 2, 0);
        let k = kekulize(m).unwrap();
        assert!(k.bonds().iter().all(|b| b.order != BondOrder::Aromatic));
        let again = perceive_aromaticity(&k);
        let flags = |x: &Molecule| x.atoms().iter().map(|a| a.aromatic).collect::<Vec<_>>();
        assert_eq!(flags(&again), flags(m), "{}", write(m));
        checked += 1;
    }
    assert!(checked > 20_000);
}

#[test]
fn sanitization_is_deterministic() {
    for s in common::zinc_head(300) {
        let (a, b) = (parse_molecule(&s).unwrap(), parse_molecule(&s).unwrap());
        assert_eq!(write(&a), write(&b));
        assert_eq!(canonical_smiles(&a), canonical_smiles(&b));
    }
}

#[test]
fn valence_rules() {
    assert!(parse_molecule("C(C)(C)(C)(C)C").is_err());
    assert!(parse_molecule("O=S(=O)(O)O").is_ok());
    assert!(parse_molecule("C[N+](C)(C)C").is_ok());
    assert!(parse_molecule("c1cccc1").is_err());
    assert_eq!(parse_molecule("CC").unwrap().total_h(0), 3);
    assert!((parse_molecule("O").unwrap().molecular_weight() - 18.015).abs() < 1e-9);
}
