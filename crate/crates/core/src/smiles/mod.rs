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

//! SMILES reading, writing and canonical identity keys.
//!
//! The accepted grammar is documented in `docs/smiles.ebnf` at the
//! repository root.

mod parser;
mod writer;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{self, Molecule, SanitizeError};

pub use parser::{parse, ParseError, ParseErrorKind};
use writer::{write_components, WriteOptions};

/// Why a string is not a valid molecule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidMolecule {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sanitize(#[from] SanitizeError),
}

impl InvalidMolecule {
    /// Short human-readable reason without offsets.
    pub fn reason(&self) -> String {
        match self {
            InvalidMolecule::Parse(e) => e.kind.to_string(),
            InvalidMolecule::Sanitize(e) => e.to_string(),
        }
    }
}

/// Canonical SMILES text; equal values mean the same constitution.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalSmiles {
    text: String,
}

impl CanonicalSmiles {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl fmt::Display for CanonicalSmiles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl AsRef<str> for CanonicalSmiles {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

/// Parse and sanitize in one step.
pub fn parse_molecule(text: &str) -> Result<Molecule, InvalidMolecule> {
    Ok(parse(text)?.sanitize()?)
}

/// SMILES in input atom order, keeping isotopes and stereo markers.
pub fn write(mol: &Molecule) -> String {
    let rank: Vec<u32> = (0..mol.atom_count() as u32).collect();
    write_components(mol, &rank, WriteOptions { isotopes: true, stereo: true }).join(".")
}

pub fn canonicalize(text: &str) -> Result<CanonicalSmiles, InvalidMolecule> {
    let mut mol = parse(text)?;
    for i in 0..mol.atom_count() {
        let a = mol.atom_mut(i);
        a.isotope = None;
        a.chirality = None;
        a.stereo_refs.clear();
    }
    let mol = mol.sanitize()?;
    Ok(canonical_smiles(&mol))
}

/// Canonical key of a sanitized molecule.
pub fn canonical_smiles(mol: &Molecule) -> CanonicalSmiles {
    let labelled_h = mol.atoms().iter().any(|a| a.element == molgraph::Element::H && a.isotope.is_some());
    if labelled_h {
        if let Ok(mut plain) = molgraph::kekulize(mol) {
            for i in 0..plain.atom_count() {
                let a = plain.atom_mut(i);
                a.isotope = None;
                if a.element != molgraph::Element::H {
                    a.explicit_h = None;
                }
            }
            if let Ok(plain) = plain.sanitize() {
                return canonical_smiles(&plain);
            }
        }
    }
    let rank = canonical_ranks(mol);
    let mut parts = write_components(mol, &rank, WriteOptions { isotopes: false, stereo: false });
    parts.sort();
    CanonicalSmiles { text: parts.join(".") }
}

/// A total order on atoms invariant under relabeling: refined symmetry
/// classes with ties broken by repeatedly singling out one member of the
/// lowest tied class.
pub fn canonical_ranks(mol: &Molecule) -> Vec<u32> {
    let mut ranks = molgraph::symmetry_classes(mol);
    let n = ranks.len();
    loop {
        let mut counts = vec![0u32; n];
        for &r in &ranks {
            counts[r as usize] += 1;
        }
        let Some(tied) = (0..n).find(|&r| counts[r] > 1) else { return ranks };
        let pick = (0..n).find(|&i| ranks[i] as usize == tied).unwrap();
        let keys: Vec<(u32, bool)> = (0..n).map(|i| (ranks[i], i != pick)).collect();
        ranks = molgraph::refine(mol, molgraph::dense_ranks(&keys));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::BondOrder;

    fn canon(s: &str) -> String {
        canonicalize(s).unwrap().into_string()
    }

    #[test]
    fn acetic_acid_shape() {
        let m = parse("CC(=O)O").unwrap();
        assert_eq!(m.atom_count(), 4);
        assert_eq!(m.bond_count(), 3);
        assert_eq!(m.bonds().iter().filter(|b| b.order == BondOrder::Double).count(), 1);
    }

    #[test]
    fn cyclopropane_ring_closure() {
        let m = parse("C1CC1").unwrap();
        assert_eq!((m.atom_count(), m.bond_count()), (3, 3));
    }

    #[test]
    fn unclosed_branch_offset() {
        let e = parse("C(").unwrap_err();
        assert_eq!(e.offset, 1);
        assert_eq!(e.kind, ParseErrorKind::UnclosedBranch);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("C1CC").unwrap_err().kind, ParseErrorKind::DanglingRingBond);
        assert!(matches!(parse("[Xx]").unwrap_err().kind, ParseErrorKind::UnknownElement(_)));
        assert!(matches!(parse("[Na+]").unwrap_err().kind, ParseErrorKind::UnknownElement(_)));
        assert!(matches!(parse("[CH4").unwrap_err().kind, ParseErrorKind::MalformedBracket(_)));
        assert_eq!(parse("C)").unwrap_err().kind, ParseErrorKind::UnmatchedParenthesis);
        assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::EmptyInput);
        assert_eq!(parse("=C").unwrap_err().kind, ParseErrorKind::BondWithoutAtom);
        assert_eq!(parse("C=").unwrap_err().kind, ParseErrorKind::DanglingBond);
        assert_eq!(parse("C11").unwrap_err().kind, ParseErrorKind::RingBondToSameAtom);
        assert_eq!(parse("C12CC12").unwrap_err().kind, ParseErrorKind::DuplicateBond);
        assert_eq!(parse("[C+5]").unwrap_err().kind, ParseErrorKind::ChargeOutOfRange);
    }

    #[test]
    fn bracket_fields() {
        let m = parse("[13CH4]").unwrap();
        let a = m.atom(0);
        assert_eq!(a.isotope, Some(13));
        assert_eq!(a.explicit_h, Some(4));
        let m = parse("[NH4+]").unwrap();
        assert_eq!(m.atom(0).formal_charge, 1);
        let m = parse("[O-2]").unwrap();
        assert_eq!(m.atom(0).formal_charge, -2);
        let m = parse("[Fe]").map(|_| ()).unwrap_err();
        assert!(matches!(m.kind, ParseErrorKind::UnknownElement(ref s) if s == "Fe"));
    }

    #[test]
    fn percent_ring_labels() {
        let m = parse("C%12CC%12").unwrap();
        assert_eq!(m.bond_count(), 3);
    }

    #[test]
    fn write_simple() {
        assert_eq!(write(&parse_molecule("O").unwrap()), "O");
        assert_eq!(write(&parse_molecule("[13CH4]").unwrap()), "[13CH4]");
        let benzene = write(&parse_molecule("c1ccccc1").unwrap());
        assert_eq!(canon(&benzene), canon("c1ccccc1"));
    }

    #[test]
    fn canonical_equivalence() {
        assert_eq!(canon("OCC"), canon("CCO"));
        assert_eq!(canon("C1=CC=CC=C1"), canon("c1ccccc1"));
        assert_eq!(canon("[H]C([H])([H])[H]"), "C");
        assert_ne!(canon("CCO"), canon("COC"));
        assert_eq!(canon("C.O"), canon("O.C"));
    }

    #[test]
    fn canonical_idempotent() {
        for s in ["CC(=O)Oc1ccccc1C(=O)O", "c1ccc2[nH]ccc2c1", "C[N+](C)(C)C.[Cl-]", "O=S(=O)(N)c1ccccc1"] {
            let c = canon(s);
            assert_eq!(canon(&c), c, "{s}");
        }
    }

    #[test]
    fn stereo_is_ignored_in_identity() {
        assert_eq!(canon("C[C@H](N)O"), canon("C[C@@H](N)O"));
        assert_eq!(canon("F/C=C/F"), canon("F/C=C\\F"));
        assert_eq!(canon("[13CH4]"), canon("C"));
    }

    #[test]
    fn stereo_round_trip_keeps_parity() {
        let m = parse_molecule("N[C@@H](C)C(=O)O").unwrap();
        let rev: Vec<usize> = (0..m.atom_count()).rev().collect();
        let text = write(&m.permuted(&rev));
        let back = parse_molecule(&text).unwrap().permuted(&rev);
        assert_eq!(write(&back), write(&m));
        assert_eq!(write(&m), "N[C@@H](C)C(=O)O");
    }
}
