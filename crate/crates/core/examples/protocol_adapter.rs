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

//! A subprocess adapter speaking the wire protocol on stdin/stdout. Run it
//! under the harness with
//!
//! `molbench evaluate --dataset qm9 --generator "exec:cargo run -q --example protocol_adapter"`

use std::io::{self, BufRead, Write};

use molbench::harness::wire::{CapabilityFlags, Hello, Item, Request};

fn main() -> io::Result<()> {
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let pool = ["CCO", "CC(C)O", "c1ccccc1", "C1CC1", "OC=O", "CC#N"];
    for line in stdin.lock().lines() {
        let req: Request = match serde_json::from_str(&line?) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("bad request: {e}");
                std::process::exit(1);
            }
        };
        match req {
            Request::Capabilities => send(
                &mut out,
                &Hello {
                    capabilities: CapabilityFlags { sample: true, reconstruct: true },
                    name: "protocol-demo".into(),
                    version: "0.1".into(),
                },
            )?,
            Request::Sample { n, seed } => {
                for i in 0..n {
                    let smiles = pool[(i + seed as usize) % pool.len()].to_string();
                    send(&mut out, &Item::Smiles { smiles })?;
                }
                send(&mut out, &Item::Done { done: true })?;
            }
            Request::Reconstruct { smiles, samples_per_input, .. } => {
                for (index, s) in smiles.into_iter().enumerate() {
                    send(&mut out, &Item::Outputs { index, outputs: vec![s; samples_per_input] })?;
                }
                send(&mut out, &Item::Done { done: true })?;
            }
        }
        out.flush()?;
    }
    Ok(())
}

fn send(out: &mut impl Write, msg: &impl serde::Serialize) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string(msg).expect("serializable"))
}
