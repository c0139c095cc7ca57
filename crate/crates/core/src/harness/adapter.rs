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

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Capabilities {
    pub can_sample: bool,
    pub can_reconstruct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdapterKind {
    Subprocess,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterIdentity {
    pub kind: AdapterKind,
    pub name: String,
    pub version: String,
}

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("cannot start adapter {command:?}: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("adapter did not answer within {0:?}")]
    Timeout(Duration),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("adapter exited{}: {stderr}", status.map(|s| format!(" with status {s}")).unwrap_or_default())]
    Exited { status: Option<i32>, stderr: String },
    #[error("adapter does not support {0}")]
    Unsupported(&'static str),
    #[error("training set is empty")]
    EmptyTrainingSet,
}

/// Output of one sample request; `short` is set when the generator
/// finished with fewer items than requested.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleOutcome {
    pub received: usize,
    pub short: bool,
}

/// A molecule generator the harness can query.
///
/// `sample` and `reconstruct` deliver items through a callback as they
/// arrive so that scoring can overlap with generation.
pub trait Generator: Send {
    /// Name and capabilities; called once before any other request.
    fn handshake(&mut self) -> Result<(AdapterIdentity, Capabilities), AdapterError>;

    fn sample(&mut self, n: usize, seed: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError>;

    /// One output list per input, in any order, as `(index, outputs)`.
    fn reconstruct(
        &mut self,
        smiles: &[String],
        samples_per_input: usize,
        seed: u64,
        sink: &mut dyn FnMut(usize, Vec<String>),
    ) -> Result<(), AdapterError>;
}

/// A generator after a successful handshake. Requests outside the
/// advertised capabilities are refused here and never reach the
/// generator.
pub struct GeneratorAdapter {
    inner: Box<dyn Generator>,
    identity: AdapterIdentity,
    capabilities: Capabilities,
}

impl std::fmt::Debug for GeneratorAdapter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeneratorAdapter")
            .field("identity", &self.identity)
            .field("capabilities", &self.capabilities)
            .finish()
    }
}

impl GeneratorAdapter {
    pub fn handshake(mut inner: Box<dyn Generator>) -> Result<GeneratorAdapter, AdapterError> {
        let (identity, capabilities) = inner.handshake()?;
        Ok(GeneratorAdapter { inner, identity, capabilities })
    }

    pub fn identity(&self) -> &AdapterIdentity {
        &self.identity
    }

    pub fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    pub fn sample(&mut self, n: usize, seed: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError> {
        if !self.capabilities.can_sample {
            return Err(AdapterError::Unsupported("sample"));
        }
        self.inner.sample(n, seed, sink)
    }

    /// Outputs for every input in input order. Missing, repeated or
    /// out-of-range indices are protocol errors.
    pub fn reconstruct(
        &mut self,
        smiles: &[String],
        samples_per_input: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, AdapterError> {
        if !self.capabilities.can_reconstruct {
            return Err(AdapterError::Unsupported("reconstruct"));
        }
        let mut slots: Vec<Option<Vec<String>>> = vec![None; smiles.len()];
        let mut bad = None;
        self.inner.reconstruct(smiles, samples_per_input, seed, &mut |i, outs| match slots.get_mut(i) {
            Some(slot @ None) => *slot = Some(outs),
            Some(Some(_)) => bad = bad.take().or(Some(format!("index {i} answered twice"))),
            None => bad = bad.take().or(Some(format!("index {i} out of range"))),
        })?;
        if let Some(msg) = bad {
            return Err(AdapterError::Protocol(msg));
        }
        slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| AdapterError::Protocol(format!("no outputs for index {i}"))))
            .collect()
    }
}

/// Wire messages, one JSON object per line.
pub mod wire {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(tag = "cmd", rename_all = "lowercase")]
    pub enum Request {
        Capabilities,
        Sample { n: usize, seed: u64 },
        Reconstruct { smiles: Vec<String>, samples_per_input: usize, seed: u64 },
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct CapabilityFlags {
        pub sample: bool,
        pub reconstruct: bool,
    }

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Hello {
        pub capabilities: CapabilityFlags,
        pub name: String,
        pub version: String,
    }

    #[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Item {
        Smiles { smiles: String },
        Outputs { index: usize, outputs: Vec<String> },
        Done { done: bool },
    }
}

#[cfg(test)]
mod tests {
    use super::wire::*;

    #[test]
    fn request_encoding() {
        assert_eq!(serde_json::to_string(&Request::Capabilities).unwrap(), r#"{"cmd":"capabilities"}"#);
        assert_eq!(
            serde_json::to_string(&Request::Sample { n: 3, seed: 7 }).unwrap(),
            r#"{"cmd":"sample","n":3,"seed":7}"#
        );
        let r = Request::Reconstruct { smiles: vec!["C".into()], samples_per_input: 20, seed: 1 };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"cmd":"reconstruct","smiles":["C"],"samples_per_input":20,"seed":1}"#
        );
    }

    #[test]
    fn item_decoding() {
        assert_eq!(serde_json::from_str::<Item>(r#"{"smiles":"CCO"}"#).unwrap(), Item::Smiles { smiles: "CCO".into() });
        assert_eq!(serde_json::from_str::<Item>(r#"{"done":true}"#).unwrap(), Item::Done { done: true });
        assert_eq!(
            serde_json::from_str::<Item>(r#"{"index":2,"outputs":["C"]}"#).unwrap(),
            Item::Outputs { index: 2, outputs: vec!["C".into()] }
        );
        assert!(serde_json::from_str::<Item>("{}").is_err());
        let h: Hello =
            serde_json::from_str(r#"{"capabilities":{"sample":true,"reconstruct":false},"name":"x","version":"1"}"#)
                .unwrap();
        assert!(h.capabilities.sample && !h.capabilities.reconstruct);
    }
}
