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

use molbench::descriptors::*;
use molbench::smiles::parse_molecule;
use proptest::prelude::*;

fn tables() -> &'static ParameterTables {
    static T: std::sync::OnceLock<ParameterTables> = std::sync::OnceLock::new();
    T.get_or_init(|| ParameterTables::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/params")).unwrap())
}

struct OracleRow {
    smiles: String,
    values: [f64; 11],
}

fn oracle(name: &str) -> Vec<OracleRow> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let mut values = [0.0; 11];
            for (k, v) in values.iter_mut().enumerate() {
                *v = f[k + 1].parse().unwrap();
            }
            OracleRow { smiles: f[0].to_string(), values }
        })
        .collect()
}

fn ours(d: &RawDescriptors) -> [f64; 11] {
    [
        d.mw,
        d.logp,
        d.tpsa,
        d.hbd as f64,
        d.hba as f64,
        d.rot_bonds as f64,
        d.aromatic_rings as f64,
        d.alerts as f64,
        d.qed_raw,
        d.sa_raw,
        d.np_raw,
    ]
}

const COLUMNS: [&str; 11] = ["mw", "logp", "tpsa", "hbd", "hba", "rotb", "arom", "alerts", "qed", "sa", "np"];

#[test]
fn reference_molecules_match_oracle() {
    let t = tables();
    for row in oracle("reference_molecules.tsv") {
        let d = describe(&parse_molecule(&row.smiles).unwrap(), t).unwrap();
        for (k, (a, b)) in ours(&d).iter().zip(row.values).enumerate() {
            assert!((a - b).abs() < 1e-6, "{} {}: {a} vs {b}", row.smiles, COLUMNS[k]);
        }
    }
}

#[test]
fn zinc_sample_agrees_with_oracle() {
    let t = tables();
    let rows = oracle("zinc_oracle_1000.tsv");
    assert_eq!(rows.len(), 1000);
    let (mut logp_dev, mut tpsa_exact, mut qed_close, mut sa_close) = (0.0, 0, 0, 0);
    for row in &rows {
        let d = describe(&parse_molecule(&row.smiles).unwrap(), t).unwrap();
        logp_dev += (d.logp - row.values[1]).abs();
        tpsa_exact += usize::from((d.tpsa - row.values[2]).abs() <= 1e-6);
        qed_close += usize::from((d.qed_raw - row.values[8]).abs() <= 0.02);
        sa_close += usize::from((d.sa_raw - row.values[9]).abs() <= 0.3);
    }
    assert!(logp_dev / 1000.0 <= 0.1);
    assert!(tpsa_exact >= 980);
    assert!(qed_close >= 950);
    assert!(sa_close >= 950);
}

#[test]
fn methane_weight_from_standard_atomic_weights() {
    let mw = count_features(&parse_molecule("C").unwrap(), tables()).mw;
    assert!((mw - (12.011 + 4.0 * 1.008)).abs() < 1e-9);
    assert!((mw - 16.04).abs() <= 0.01);
}

#[test]
fn bridged_cage_is_harder_to_make_than_a_chain() {
    let t = tables();
    let cage = sa_score(&parse_molecule("C1C2CC3CC1CC(C2)C3").unwrap(), t).unwrap();
    let chain = sa_score(&parse_molecule("CCCCCC").unwrap(), t).unwrap();
    assert!(cage > chain);
}

#[test]
fn normalization_defaults() {
    let spec = NormalizationSpec::default();
    let mut raw = describe(&parse_molecule("CCO").unwrap(), tables()).unwrap();
    raw.qed_raw = 0.5;
    raw.sa_raw = 5.0;
    raw.logp = -2.12178879609;
    let p = normalize(&raw, &spec);
    assert_eq!(p.qed, 50.0);
    assert_eq!(p.sas, 0.0);
    assert_eq!(p.sol, 0.0);
    raw.sa_raw = 1.5;
    assert_eq!(normalize(&raw, &spec).sas, 100.0);
}

const POOL: &[&str] = &[
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1CC[C@]23c4c5ccc(O)c4O[C@H]2[C@@H](O)C=C[C@H]3[C@H]1C5",
    "c1ccc2[nH]ccc2c1",
    "O=C(NC1CC1)c1cccc(Cl)c1",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "C1C2CC3CC1CC(C2)C3",
    "OCC1OC(O)C(O)C(O)C1O",
    "N#Cc1ccc(S(=O)(=O)N2CCOCC2)cc1",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptors_ignore_atom_order(pick in 0..POOL.len(), seed in any::<u64>()) {
        let t = tables();
        let m = parse_molecule(POOL[pick]).unwrap();
        let mut order: Vec<usize> = (0..m.atom_count()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let shuffled = parse_molecule(&molbench::smiles::write(&m.permuted(&order))).unwrap();
        prop_assert_eq!(describe(&m, t).unwrap(), describe(&shuffled, t).unwrap());
    }

    #[test]
    fn percentages_stay_in_range(pick in 0..POOL.len(), sa in -20.0f64..20.0, logp in -20.0f64..20.0) {
        let t = tables();
        let mut raw = describe(&parse_molecule(POOL[pick]).unwrap(), t).unwrap();
        raw.sa_raw = sa;
        raw.logp = logp;
        let p = normalize(&raw, &NormalizationSpec::default());
        for v in [p.np, p.sol, p.sas, p.qed] {
            prop_assert!((0.0..=100.0).contains(&v));
        }
    }

    #[test]
    fn qed_is_monotone_in_each_desirability(
        d in prop::array::uniform8(0.001f64..1.0),
        k in 0usize..8,
        bump in 0.0f64..1.0,
    ) {
        let w = [0.66, 0.46, 0.05, 0.61, 0.06, 0.65, 0.48, 0.95];
        let mut e = d;
        e[k] = (d[k] + bump).min(1.0);
        let (a, b) = (qed_from_desirabilities(&d, &w), qed_from_desirabilities(&e, &w));
        prop_assert!(b >= a - 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }
}
