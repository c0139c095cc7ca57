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

use std::collections::HashSet;

use molbench::matching::{has_match, MatchTarget, SmartsPattern};
use molbench::molgraph::Molecule;
use molbench::smiles::{canonical_smiles, canonicalize, parse, parse_molecule, write};
use proptest::prelude::*;
use proptest::sample::select;

/// Same atom and bond counts plus a constitution-exact embedding.
pub fn isomorphic(a: &Molecule, b: &Molecule) -> bool {
    a.atom_count() == b.atom_count()
        && a.bond_count() == b.bond_count()
        && has_match(&SmartsPattern::from_molecule(a), &MatchTarget::new(b))
}

fn pool() -> &'static [String] {
    static P: std::sync::OnceLock<Vec<String>> = std::sync::OnceLock::new();
    P.get_or_init(|| {
        let mut v = common::zinc_head(150);
        v.extend(common::qm9_head(150));
        v
    })
}

fn relabeled(m: &Molecule, seed: u64) -> Molecule {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..m.atom_count()).collect();
    order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    m.permuted(&order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonical_form_ignores_atom_order(s in select(pool()), seed in any::<u64>()) {
        let m = parse_molecule(&s).unwrap();
        let text = write(&relabeled(&m, seed));
        prop_assert_eq!(canonicalize(&text).unwrap(), canonicalize(&s).unwrap());
    }

    #[test]
    fn canonicalize_is_idempotent(s in select(pool())) {
        let c = canonicalize(&s).unwrap();
        let again = canonical_smiles(&parse_molecule(&write(&parse_molecule(c.as_str()).unwrap())).unwrap());
        prop_assert_eq!(again, c);
    }

    #[test]
    fn write_round_trips_isomorphically(s in select(pool()), seed in any::<u64>()) {
        let m = relabeled(&parse_molecule(&s).unwrap(), seed);
        let back = parse_molecule(&write(&m)).unwrap();
        prop_assert!(isomorphic(&m, &back));
    }

    #[test]
    fn parser_is_total_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..40)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse(&text).map(|m| m.sanitize());
    }

    #[test]
    fn parser_is_total_on_smiles_alphabet(s in "[CNOcnos()=#\\[\\]@+\\-0-9%H/\\\\.]{0,30}") {
        if let Ok(m) = parse_molecule(&s) {
            let _ = canonical_smiles(&m);
            prop_assert!(parse_molecule(&write(&m)).is_ok(), "{s}");
        }
    }
}

#[test]
fn distinct_dataset_molecules_have_distinct_keys() {
    let smiles = common::zinc_head(1000);
    let keys: HashSet<String> = smiles.iter().map(|s| canonicalize(s).unwrap().into_string()).collect();
    assert_eq!(keys.len(), smiles.len());
}

#[test]
fn every_spelling_in_a_group_shares_one_key() {
    let mut seen = HashSet::new();
    for group in common::CANNED {
        let keys: HashSet<String> = group.iter().map(|s| canonicalize(s).unwrap().into_string()).collect();
        assert_eq!(keys.len(), 1, "{group:?}");
        assert!(seen.insert(keys.into_iter().next().unwrap()), "{group:?} collides with another group");
    }
    for s in common::INVALID {
        assert!(canonicalize(s).is_err(), "{s:?} should be rejected");
    }
}

#[test]
fn reasons_are_readable() {
    assert_eq!(canonicalize("C(").unwrap_err().reason(), "unclosed branch");
    assert_eq!(canonicalize("").unwrap_err().reason(), "empty input");
}
