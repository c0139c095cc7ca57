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

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::molgraph::Molecule;
use crate::smiles::{canonical_smiles, parse_molecule, CanonicalSmiles};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetName {
    Qm9,
    Zinc,
    Custom(String),
}

impl DatasetName {
    /// Largest heavy-atom count expected in the dataset.
    pub fn heavy_atom_limit(&self) -> Option<usize> {
        match self {
            DatasetName::Qm9 => Some(9),
            DatasetName::Zinc => Some(38),
            DatasetName::Custom(_) => None,
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetName::Qm9 => f.write_str("qm9"),
            DatasetName::Zinc => f.write_str("zinc"),
            DatasetName::Custom(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Split(#[from] SplitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("line {line}: expected an index, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("index {index} is outside a dataset of {len} molecules")]
    OutOfRange { index: usize, len: usize },
    #[error("index {index} is listed more than once")]
    Duplicate { index: usize },
    #[error("index {index} is in both train and test")]
    Overlap { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    /// Parse a split file. A file with `[train]` / `[test]` section
    /// headers lists both parts; a bare list of indices is the test part
    /// and everything else is training data.
    pub fn parse(text: &str, len: usize) -> Result<Split, SplitError> {
        #[derive(PartialEq)]
        enum Part {
            None,
            Train,
            Test,
        }
        let mut part = Part::None;
        let mut sectioned = false;
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[train]" => {
                    part = Part::Train;
                    sectioned = true;
                    continue;
                }
                "[test]" => {
                    part = Part::Test;
                    sectioned = true;
                    continue;
                }
                _ => {}
            }
            let index: usize =
                line.parse().map_err(|_| SplitError::Malformed { line: n + 1, text: line.to_string() })?;
            if index >= len {
                return Err(SplitError::OutOfRange { index, len });
            }
            match part {
                Part::Train => train.push(index),
                Part::Test | Part::None => test.push(index),
            }
        }
        let split = if sectioned {
            Split { train, test }
        } else {
            let mut seen = HashSet::new();
            if let Some(&index) = test.iter().find(|&&i| !seen.insert(i)) {
                return Err(SplitError::Duplicate { index });
            }
            Split { train: (0..len).filter(|i| !seen.contains(i)).collect(), test }
        };
        split.check()?;
        Ok(split)
    }

    fn check(&self) -> Result<(), SplitError> {
        let mut train = HashSet::new();
        for &i in &self.train {
            if !train.insert(i) {
                return Err(SplitError::Duplicate { index: i });
            }
        }
        let mut test = HashSet::new();
        for &i in &self.test {
            if !test.insert(i) {
                return Err(SplitError::Duplicate { index: i });
            }
            if train.contains(&i) {
                return Err(SplitError::Overlap { index: i });
            }
        }
        Ok(())
    }
}

/// One dataset line; `molecule` is `None` when the line was rejected.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub raw: String,
    pub molecule: Option<(Molecule, CanonicalSmiles)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub index: usize,
    pub line: usize,
    pub smiles: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LoadReport {
    pub rejected: Vec<Rejection>,
    /// (index, heavy atoms) of molecules above the dataset's atom limit.
    pub oversized: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: PathBuf,
    pub sha256: String,
    pub split_path: Option<PathBuf>,
    pub split_sha256: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: DatasetName,
    pub entries: Vec<DatasetEntry>,
    pub split: Split,
    pub provenance: Provenance,
    pub report: LoadReport,
}

fn read(path: &Path) -> Result<(String, String), DatasetError> {
    let bytes = fs::read(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8_lossy(&bytes).into_owned();
    Ok((text, hash))
}

impl Dataset {
    /// Load a SMILES file (one molecule per line, first whitespace field,
    /// `#` comments) and optionally its split file. Without a split every
    /// molecule is training data.
    pub fn load(name: DatasetName, path: impl AsRef<Path>, split_path: Option<&Path>) -> Result<Dataset, DatasetError> {
        let path = path.as_ref();
        let (text, sha256) = read(path)?;
        let mut dataset = Dataset::from_text(name, &text);
        dataset.provenance.path = path.to_path_buf();
        dataset.provenance.sha256 = sha256;
        if let Some(sp) = split_path {
            let (split_text, split_hash) = read(sp)?;
            dataset.split = Split::parse(&split_text, dataset.entries.len())?;
            dataset.provenance.split_path = Some(sp.to_path_buf());
            dataset.provenance.split_sha256 = Some(split_hash);
        }
        Ok(dataset)
    }

    /// Build an all-training dataset from in-memory text.
    pub fn from_text(name: DatasetName, text: &str) -> Dataset {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(n, l)| (n + 1, l.split_whitespace().next().unwrap_or("")))
            .collect();
        let parsed: Vec<_> = lines
            .par_iter()
            .map(|(_, s)| {
                parse_molecule(s).map(|m| {
                    let c = canonical_smiles(&m);
                    (m, c)
                })
            })
            .collect();
        let mut report = LoadReport::default();
        let limit = name.heavy_atom_limit();
        let mut entries = Vec::with_capacity(lines.len());
        for (index, ((line, smiles), result)) in lines.iter().zip(parsed).enumerate() {
            let molecule = match result {
                Ok((m, c)) => {
                    let heavy = m.heavy_atom_count();
                    if limit.is_some_and(|l| heavy > l) {
                        report.oversized.push((index, heavy));
                    }
                    Some((m, c))
                }
                Err(e) => {
                    report.rejected.push(Rejection {
                        index,
                        line: *line,
                        smiles: smiles.to_string(),
                        reason: e.reason(),
                    });
                    None
                }
            };
            entries.push(DatasetEntry { raw: smiles.to_string(), molecule });
        }
        let split = Split { train: (0..entries.len()).collect(), test: Vec::new() };
        let provenance = Provenance {
            path: PathBuf::new(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
            split_path: None,
            split_sha256: None,
        };
        Dataset { name, entries, split, provenance, report }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Valid molecules among `indices`, in order.
    pub fn molecules<'a>(
        &'a self,
        indices: &'a [usize],
    ) -> impl Iterator<Item = (&'a Molecule, &'a CanonicalSmiles)> + 'a {
        indices.iter().filter_map(|&i| self.entries[i].molecule.as_ref().map(|(m, c)| (m, c)))
    }

    pub fn train(&self) -> impl Iterator<Item = (&Molecule, &CanonicalSmiles)> + '_ {
        self.molecules(&self.split.train)
    }

    pub fn test(&self) -> impl Iterator<Item = (&Molecule, &CanonicalSmiles)> + '_ {
        self.molecules(&self.split.test)
    }

    /// Raw SMILES of valid molecules among `indices`.
    pub fn smiles(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().filter(|&&i| self.entries[i].molecule.is_some()).map(|&i| self.entries[i].raw.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sectioned_split() {
        let s = Split::parse("# header\n[train]\n0\n1\n[test]\n2\n", 3).unwrap();
        assert_eq!(s, Split { train: vec![0, 1], test: vec![2] });
    }

    #[test]
    fn plain_split_lists_test_indices() {
        let s = Split::parse("2\n0\n", 4).unwrap();
        assert_eq!(s, Split { train: vec![1, 3], test: vec![2, 0] });
    }

    #[test]
    fn split_errors() {
        assert_eq!(Split::parse("[train]\n0\n[test]\n0\n", 2), Err(SplitError::Overlap { index: 0 }));
        assert_eq!(Split::parse("5\n", 2), Err(SplitError::OutOfRange { index: 5, len: 2 }));
        assert_eq!(Split::parse("1\n1\n", 2), Err(SplitError::Duplicate { index: 1 }));
        assert!(matches!(Split::parse("x\n", 2), Err(SplitError::Malformed { line: 1, .. })));
    }

    #[test]
    fn rejected_lines_keep_their_slot() {
        let d = Dataset::from_text(DatasetName::Custom("t".into()), "# c\nCCO\nC(\nc1ccccc1 extra\n");
        assert_eq!(d.len(), 3);
        assert_eq!(d.report.rejected.len(), 1);
        assert_eq!(d.report.rejected[0].index, 1);
        assert_eq!(d.report.rejected[0].line, 3);
        assert_eq!(d.train().count(), 2);
        assert_eq!(d.entries[2].raw, "c1ccccc1");
    }

    #[test]
    fn load_with_split() {
        let dir = tempfile::tempdir().unwrap();
        let smi = dir.path().join("t.smi");
        let split = dir.path().join("t.split");
        fs::write(&smi, "C\nCC\nCCC\n").unwrap();
        fs::write(&split, "[train]\n0\n1\n[test]\n2\n").unwrap();
        let d = Dataset::load(DatasetName::Qm9, &smi, Some(&split)).unwrap();
        assert_eq!((d.train().count(), d.test().count()), (2, 1));
        assert_eq!(d.provenance.sha256.len(), 64);
        assert!(d.provenance.split_sha256.is_some());
        fs::write(&split, "[train]\n0\n2\n[test]\n2\n").unwrap();
        assert!(matches!(
            Dataset::load(DatasetName::Qm9, &smi, Some(&split)),
            Err(DatasetError::Split(SplitError::Overlap { index: 2 }))
        ));
    }

    #[test]
    fn heavy_atom_limit_is_reported() {
        let d = Dataset::from_text(DatasetName::Qm9, "CCCCCCCCCC\nCCC\n");
        assert_eq!(d.report.oversized, vec![(0, 10)]);
    }
}
