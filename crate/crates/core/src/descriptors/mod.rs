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

//! Physico-chemical descriptors and the property scores built on them.
//!
//! All parameters come from the files loaded into [`ParameterTables`];
//! nothing numeric about a descriptor is compiled in except the TPSA
//! fallback shape and the SA rescaling.

mod crippen;
mod fragments;
mod normalize;
mod qed;
mod tables;
mod tpsa;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::Molecule;

pub use crippen::{crippen, crippen_logp, CrippenResult};
pub use fragments::{np_score, sa_score, sa_terms, SaTerms};
pub use normalize::{normalize, NormalizationError, NormalizationSpec, PropertyPercentages, Range};
pub use qed::{
    count_features, desirabilities, qed, qed_from_desirabilities, qed_weights, Features, ALIPHATIC_RING_ATOM_SMARTS,
    HBD_SMARTS, ROTATABLE_SMARTS,
};
pub use tables::{
    CrippenType, Desirability, ParameterTables, QedParams, TableError, TpsaDefault, TpsaRule, TpsaTable,
    ACCEPTORS_FILE, ALERTS_FILE, CRIPPEN_FILE, NP_FILE, QED_FILE, QED_PROPERTIES, SA_FILE, TPSA_FILE,
};
pub use tpsa::{tpsa, tpsa_contributions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("parameter table {0} is not loaded")]
    MissingTable(&'static str),
    #[error("molecule has no atoms")]
    EmptyMolecule,
}

/// Every raw descriptor of one molecule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawDescriptors {
    pub logp: f64,
    pub tpsa: f64,
    pub mw: f64,
    pub hbd: u32,
    pub hba: u32,
    pub rot_bonds: u32,
    pub aromatic_rings: u32,
    pub alerts: u32,
    pub sa_raw: f64,
    pub qed_raw: f64,
    pub np_raw: f64,
    /// Atoms no Crippen type matched.
    pub untyped_atoms: u32,
}

pub fn describe(mol: &Molecule, t: &ParameterTables) -> Result<RawDescriptors, DescriptorError> {
    if mol.atom_count() == 0 {
        return Err(DescriptorError::EmptyMolecule);
    }
    let c = crippen(mol, t);
    let polar = tpsa(mol, t);
    let f = count_features(mol, t);
    let d = desirabilities(t, &f, c.logp, polar);
    Ok(RawDescriptors {
        logp: c.logp,
        tpsa: polar,
        mw: f.mw,
        hbd: f.hbd,
        hba: f.hba,
        rot_bonds: f.rot_bonds,
        aromatic_rings: f.aromatic_rings,
        alerts: f.alerts,
        sa_raw: sa_score(mol, t)?,
        qed_raw: qed_from_desirabilities(&d, &qed_weights(t)),
        np_raw: np_score(mol, t)?,
        untyped_atoms: c.untyped as u32,
    })
}

/// Sum that does not depend on the order of the terms.
pub(crate) fn stable_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_molecule;

    fn tables() -> ParameterTables {
        ParameterTables::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/params")).unwrap()
    }

    #[test]
    fn hydrocarbons_have_no_polar_surface() {
        let t = tables();
        for s in ["c1ccccc1", "CCCCCC", "C1CCCCC1", "CC(C)(C)C", "C=CC=C"] {
            assert_eq!(tpsa(&parse_molecule(s).unwrap(), &t), 0.0, "{s}");
        }
    }

    #[test]
    fn simple_counts() {
        let t = tables();
        let f = count_features(&parse_molecule("CCO").unwrap(), &t);
        assert_eq!((f.hbd, f.hba, f.rot_bonds, f.aromatic_rings), (1, 1, 0, 0));
        let f = count_features(&parse_molecule("c1ccccc1").unwrap(), &t);
        assert_eq!((f.aromatic_rings, f.hbd), (1, 0));
    }

    #[test]
    fn longer_chains_are_more_lipophilic() {
        let t = tables();
        assert!(
            crippen_logp(&parse_molecule("CCCCCC").unwrap(), &t) > crippen_logp(&parse_molecule("CC").unwrap(), &t)
        );
    }

    #[test]
    fn every_atom_is_typed() {
        let t = tables();
        let c = crippen(&parse_molecule("OC(=O)c1ccc[nH]1").unwrap(), &t);
        assert_eq!(c.untyped, 0);
        assert!((c.atom_contributions.iter().sum::<f64>() - c.logp).abs() < 1e-9);
    }

    #[test]
    fn fragment_tables_are_required() {
        let mut t = tables();
        t.sa_fragments = None;
        let m = parse_molecule("CCO").unwrap();
        assert_eq!(sa_score(&m, &t), Err(DescriptorError::MissingTable("sa_fragments")));
        assert_eq!(describe(&Molecule::new(), &tables()), Err(DescriptorError::EmptyMolecule));
    }

    #[test]
    fn equal_desirabilities() {
        let d = [0.5; 8];
        let w = [0.66, 0.46, 0.05, 0.61, 0.06, 0.65, 0.48, 0.95];
        assert!((qed_from_desirabilities(&d, &w) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn table_hashes_are_recorded() {
        let t = tables();
        assert_eq!(t.hashes().len(), 7);
        assert!(t.hashes().values().all(|h| h.len() == 64));
    }
}
