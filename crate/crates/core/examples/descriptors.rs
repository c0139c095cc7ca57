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

//! Raw descriptors and their normalized property scores.

use molbench::descriptors::{describe, normalize, NormalizationSpec};
use molbench::harness::{data_dir, load_tables};
use molbench::smiles::parse_molecule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = load_tables(&data_dir())?;
    let spec = NormalizationSpec::default();
    for s in ["c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O", "CN1CCC23C4C1CC5=C2C(=C(C=C5)O)OC3C(C=C4)O"] {
        let mol = parse_molecule(s)?;
        let d = describe(&mol, &tables)?;
        let p = normalize(&d, &spec);
        println!("{s}");
        println!("  logP {:.3}  TPSA {:.2}  MW {:.2}  HBD {}  HBA {}", d.logp, d.tpsa, d.mw, d.hbd, d.hba);
        println!("  SA {:.3}  QED {:.3}  NP {:.3}", d.sa_raw, d.qed_raw, d.np_raw);
        println!("  NP {:.2}%  Sol. {:.2}%  SAS {:.2}%  QED {:.2}%", p.np, p.sol, p.sas, p.qed);
    }
    Ok(())
}
