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

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::matching::{parse_smarts, SmartsPattern};
use crate::molgraph::Element;

pub const CRIPPEN_FILE: &str = "crippen.tsv";
pub const TPSA_FILE: &str = "tpsa.tsv";
pub const QED_FILE: &str = "qed.tsv";
pub const ACCEPTORS_FILE: &str = "qed_acceptors.smarts";
pub const ALERTS_FILE: &str = "qed_alerts.smarts";
pub const SA_FILE: &str = "sa_fragments.tsv.gz";
pub const NP_FILE: &str = "np_fragments.tsv.gz";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{file}: missing entry for {what}")]
    Incomplete { file: String, what: String },
}

/// One ordered Crippen atom type.
#[derive(Debug, Clone)]
pub struct CrippenType {
    pub label: String,
    pub pattern: SmartsPattern,
    pub contribution: f64,
}

/// Value constraint in a TPSA rule; `None` matches anything.
pub type Slot = Option<i32>;

#[derive(Debug, Clone, PartialEq)]
pub struct TpsaRule {
    pub element: Element,
    pub neighbors: Slot,
    pub hydrogens: Slot,
    pub single: Slot,
    pub double: Slot,
    pub triple: Slot,
    pub aromatic: Slot,
    pub charge: Slot,
    pub in_three_ring: Option<bool>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpsaDefault {
    pub element: Element,
    pub base: f64,
    pub per_neighbor: f64,
    pub per_h: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TpsaTable {
    pub rules: Vec<TpsaRule>,
    pub defaults: Vec<TpsaDefault>,
}

/// Asymmetric double sigmoid desirability curve for one QED property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desirability {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub dmax: f64,
    pub weight: f64,
}

impl Desirability {
    pub fn eval(&self, x: f64) -> f64 {
        let s1 = 1.0 + (-(x - self.c + self.d / 2.0) / self.e).exp();
        let s2 = 1.0 + (-(x - self.c - self.d / 2.0) / self.f).exp();
        (self.a + self.b / s1 * (1.0 - 1.0 / s2)) / self.dmax
    }
}

/// QED curves in the order mw, logp, hba, hbd, tpsa, rot_bonds,
/// aromatic_rings, alerts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QedParams {
    pub curves: [Desirability; 8],
}

pub const QED_PROPERTIES: [&str; 8] = ["MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"];

/// Every parameter file the descriptors need, loaded once and shared.
#[derive(Debug, Clone)]
pub struct ParameterTables {
    pub crippen: Vec<CrippenType>,
    pub tpsa: TpsaTable,
    pub qed: QedParams,
    pub acceptors: Vec<SmartsPattern>,
    pub alerts: Vec<SmartsPattern>,
    pub sa_fragments: Option<HashMap<u32, f64>>,
    pub np_fragments: Option<HashMap<u32, f64>>,
    hashes: BTreeMap<String, String>,
}

impl ParameterTables {
    /// Load all tables from a directory. The fragment score files are
    /// optional; the rest are required.
    pub fn load(dir: impl AsRef<Path>) -> Result<ParameterTables, TableError> {
        let dir = dir.as_ref();
        let mut hashes = BTreeMap::new();
        let mut text = |name: &str| -> Result<String, TableError> {
            let bytes = read_bytes(&dir.join(name))?;
            hashes.insert(name.to_string(), hex::encode(Sha256::digest(&bytes)));
            decode(name, &bytes)
        };
        let crippen = parse_crippen(&text(CRIPPEN_FILE)?)?;
        let tpsa = parse_tpsa(&text(TPSA_FILE)?)?;
        let qed = parse_qed(&text(QED_FILE)?)?;
        let acceptors = parse_patterns(ACCEPTORS_FILE, &text(ACCEPTORS_FILE)?)?;
        let alerts = parse_patterns(ALERTS_FILE, &text(ALERTS_FILE)?)?;
        let mut optional = |name: &str| -> Result<Option<HashMap<u32, f64>>, TableError> {
            if !dir.join(name).exists() {
                return Ok(None);
            }
            Ok(Some(parse_fragments(name, &text(name)?)?))
        };
        let sa_fragments = optional(SA_FILE)?;
        let np_fragments = optional(NP_FILE)?;
        Ok(ParameterTables { crippen, tpsa, qed, acceptors, alerts, sa_fragments, np_fragments, hashes })
    }

    /// SHA-256 of each loaded file as stored on disk, keyed by file name.
    pub fn hashes(&self) -> &BTreeMap<String, String> {
        &self.hashes
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, TableError> {
    fs::read(path).map_err(|source| TableError::Io { path: path.to_path_buf(), source })
}

fn decode(name: &str, bytes: &[u8]) -> Result<String, TableError> {
    let parse_err = |message: String| TableError::Parse { file: name.to_string(), line: 0, message };
    if name.ends_with(".gz") {
        let mut s = String::new();
        GzDecoder::new(bytes).read_to_string(&mut s).map_err(|e| parse_err(e.to_string()))?;
        Ok(s)
    } else {
        String::from_utf8(bytes.to_vec()).map_err(|e| parse_err(e.to_string()))
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn err(file: &str, line: usize, message: impl Into<String>) -> TableError {
    TableError::Parse { file: file.to_string(), line, message: message.into() }
}

fn number(file: &str, line: usize, s: &str) -> Result<f64, TableError> {
    s.trim().parse::<f64>().map_err(|_| err(file, line, format!("bad number {s:?}")))
}

pub fn parse_crippen(text: &str) -> Result<Vec<CrippenType>, TableError> {
    let mut out = Vec::new();
    for (n, line) in data_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(err(CRIPPEN_FILE, n, "expected 3 tab-separated fields"));
        }
        let pattern = parse_smarts(f[1]).map_err(|e| err(CRIPPEN_FILE, n, e.to_string()))?;
        out.push(CrippenType { label: f[0].to_string(), pattern, contribution: number(CRIPPEN_FILE, n, f[2])? });
    }
    Ok(out)
}

pub fn parse_tpsa(text: &str) -> Result<TpsaTable, TableError> {
    let mut table = TpsaTable::default();
    let element =
        |n: usize, s: &str| Element::from_symbol(s).ok_or_else(|| err(TPSA_FILE, n, format!("unknown element {s:?}")));
    for (n, line) in data_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        if f[0] == "default" {
            if f.len() != 5 {
                return Err(err(TPSA_FILE, n, "expected 5 fields in a default row"));
            }
            table.defaults.push(TpsaDefault {
                element: element(n, f[1])?,
                base: number(TPSA_FILE, n, f[2])?,
                per_neighbor: number(TPSA_FILE, n, f[3])?,
                per_h: number(TPSA_FILE, n, f[4])?,
            });
            continue;
        }
        if f.len() != 10 {
            return Err(err(TPSA_FILE, n, "expected 10 fields in a rule row"));
        }
        let slot = |s: &str| -> Result<Slot, TableError> {
            if s == "*" {
                Ok(None)
            } else {
                s.parse::<i32>().map(Some).map_err(|_| err(TPSA_FILE, n, format!("bad count {s:?}")))
            }
        };
        let in_three_ring = match f[8] {
            "*" => None,
            "y" => Some(true),
            "n" => Some(false),
            other => return Err(err(TPSA_FILE, n, format!("bad ring3 flag {other:?}"))),
        };
        table.rules.push(TpsaRule {
            element: element(n, f[0])?,
            neighbors: slot(f[1])?,
            hydrogens: slot(f[2])?,
            single: slot(f[3])?,
            double: slot(f[4])?,
            triple: slot(f[5])?,
            aromatic: slot(f[6])?,
            charge: slot(f[7])?,
            in_three_ring,
            value: number(TPSA_FILE, n, f[9])?,
        });
    }
    Ok(table)
}

pub fn parse_qed(text: &str) -> Result<QedParams, TableError> {
    let mut curves: [Option<Desirability>; 8] = [None; 8];
    for (n, line) in data_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 9 {
            return Err(err(QED_FILE, n, "expected 9 tab-separated fields"));
        }
        let Some(k) = QED_PROPERTIES.iter().position(|&p| p == f[0]) else {
            return Err(err(QED_FILE, n, format!("unknown property {:?}", f[0])));
        };
        let v: Vec<f64> = f[1..].iter().map(|s| number(QED_FILE, n, s)).collect::<Result<_, _>>()?;
        curves[k] =
            Some(Desirability { a: v[0], b: v[1], c: v[2], d: v[3], e: v[4], f: v[5], dmax: v[6], weight: v[7] });
    }
    let curves: Vec<Desirability> = curves
        .iter()
        .enumerate()
        .map(|(k, c)| {
            c.ok_or_else(|| TableError::Incomplete { file: QED_FILE.to_string(), what: QED_PROPERTIES[k].to_string() })
        })
        .collect::<Result<_, _>>()?;
    Ok(QedParams { curves: curves.try_into().expect("one curve per property") })
}

pub fn parse_patterns(file: &str, text: &str) -> Result<Vec<SmartsPattern>, TableError> {
    data_lines(text).map(|(n, line)| parse_smarts(line.trim()).map_err(|e| err(file, n, e.to_string()))).collect()
}

pub fn parse_fragments(file: &str, text: &str) -> Result<HashMap<u32, f64>, TableError> {
    let mut out = HashMap::new();
    for (n, line) in data_lines(text) {
        let (id, score) = line.split_once('\t').ok_or_else(|| err(file, n, "expected id and score"))?;
        let id = id.parse::<u32>().map_err(|_| err(file, n, format!("bad environment id {id:?}")))?;
        out.insert(id, number(file, n, score)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desirability_peak_is_one() {
        let d = Desirability { a: 0.0, b: 2.0, c: 0.0, d: 1e-9, e: 1.0, f: 1.0, dmax: 0.5, weight: 1.0 };
        assert!((d.eval(0.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(parse_crippen("C1\t[CH4\t0.1\n").is_err());
        assert!(parse_crippen("C1\t[CH4]\n").is_err());
        assert!(parse_tpsa("N\t1\t0\t*\t*\t1\t*\t0\tq\t23.79\n").is_err());
        assert!(parse_fragments("x", "12\n").is_err());
        assert!(matches!(parse_qed("MW\t1\t1\t1\t1\t1\t1\t1\t1\n"), Err(TableError::Incomplete { .. })));
    }
}
