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

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adapter::{AdapterError, AdapterIdentity, AdapterKind, Capabilities, Generator, SampleOutcome};

pub const NGRAM_ORDER: usize = 10;
const PAD: u8 = 0;
const END: u8 = b'\n';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinKind {
    Replay,
    RandomChars,
    Ngram,
    Echo,
}

impl BuiltinKind {
    pub const ALL: [BuiltinKind; 4] =
        [BuiltinKind::Replay, BuiltinKind::RandomChars, BuiltinKind::Ngram, BuiltinKind::Echo];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::Replay => "replay",
            BuiltinKind::RandomChars => "random_chars",
            BuiltinKind::Ngram => "ngram",
            BuiltinKind::Echo => "echo",
        }
    }
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown builtin generator {s:?} (expected replay, random_chars, ngram or echo)"))
    }
}

/// Character n-gram model over SMILES strings.
#[derive(Debug, Clone)]
pub struct NgramModel {
    order: usize,
    /// Context of `order - 1` bytes to next-byte counts.
    table: HashMap<Vec<u8>, (Vec<u8>, WeightedIndex<u32>)>,
    max_len: usize,
}

impl NgramModel {
    pub fn fit<S: AsRef<str>>(training: &[S], order: usize) -> NgramModel {
        assert!(order >= 1, "n-gram order must be positive");
        let ctx = order - 1;
        let mut counts: HashMap<Vec<u8>, Vec<(u8, u32)>> = HashMap::new();
        let mut max_len = 0;
        for s in training {
            let s = s.as_ref().as_bytes();
            max_len = max_len.max(s.len());
            let mut padded = vec![PAD; ctx];
            padded.extend_from_slice(s);
            padded.push(END);
            for i in ctx..padded.len() {
                let entry = counts.entry(padded[i - ctx..i].to_vec()).or_default();
                match entry.iter_mut().find(|(c, _)| *c == padded[i]) {
                    Some((_, n)) => *n += 1,
                    None => entry.push((padded[i], 1)),
                }
            }
        }
        let table = counts
            .into_iter()
            .map(|(k, mut v)| {
                v.sort_unstable();
                let chars = v.iter().map(|&(c, _)| c).collect();
                let dist = WeightedIndex::new(v.iter().map(|&(_, n)| n)).expect("positive counts");
                (k, (chars, dist))
            })
            .collect();
        NgramModel { order, table, max_len: 2 * max_len.max(1) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Ancestral sample; strings are cut at twice the longest training
    /// string.
    pub fn generate(&self, rng: &mut impl Rng) -> String {
        let ctx = self.order - 1;
        let mut buf = vec![PAD; ctx];
        while buf.len() - ctx < self.max_len {
            let Some((chars, dist)) = self.table.get(&buf[buf.len() - ctx..]) else { break };
            let c = chars[dist.sample(rng)];
            if c == END {
                break;
            }
            buf.push(c);
        }
        String::from_utf8_lossy(&buf[ctx..]).into_owned()
    }
}

#[derive(Debug, Clone)]
enum Model {
    Replay,
    RandomChars { alphabet: Vec<char>, lengths: Vec<usize> },
    Ngram(NgramModel),
    Echo,
}

/// Reference generators fitted on training SMILES. All output is a pure
/// function of the training list and the request seed.
#[derive(Debug, Clone)]
pub struct BuiltinGenerator {
    kind: BuiltinKind,
    training: Vec<String>,
    model: Model,
}

impl BuiltinGenerator {
    pub fn new(kind: BuiltinKind, training: Vec<String>) -> Result<BuiltinGenerator, AdapterError> {
        if training.is_empty() {
            return Err(AdapterError::EmptyTrainingSet);
        }
        let model = match kind {
            BuiltinKind::Replay => Model::Replay,
            BuiltinKind::Echo => Model::Echo,
            BuiltinKind::RandomChars => {
                let alphabet: BTreeSet<char> = training.iter().flat_map(|s| s.chars()).collect();
                let lengths = training.iter().map(|s| s.chars().count()).collect();
                Model::RandomChars { alphabet: alphabet.into_iter().collect(), lengths }
            }
            BuiltinKind::Ngram => Model::Ngram(NgramModel::fit(&training, NGRAM_ORDER)),
        };
        Ok(BuiltinGenerator { kind, training, model })
    }

    pub fn kind(&self) -> BuiltinKind {
        self.kind
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> String {
        match &self.model {
            Model::Replay | Model::Echo => self.training.choose(rng).expect("non-empty").clone(),
            Model::RandomChars { alphabet, lengths } => {
                let len = *lengths.choose(rng).expect("non-empty");
                if alphabet.is_empty() {
                    return String::new();
                }
                (0..len).map(|_| *alphabet.choose(rng).expect("non-empty")).collect()
            }
            Model::Ngram(m) => m.generate(rng),
        }
    }
}

impl Generator for BuiltinGenerator {
    fn handshake(&mut self) -> Result<(AdapterIdentity, Capabilities), AdapterError> {
        Ok((
            AdapterIdentity {
                kind: AdapterKind::Builtin,
                name: self.kind.name().to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            Capabilities { can_sample: true, can_reconstruct: self.kind == BuiltinKind::Echo },
        ))
    }

    fn sample(&mut self, n: usize, seed: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..n {
            sink(self.draw(&mut rng));
        }
        Ok(SampleOutcome { received: n, short: false })
    }

    fn reconstruct(
        &mut self,
        smiles: &[String],
        samples_per_input: usize,
        _seed: u64,
        sink: &mut dyn FnMut(usize, Vec<String>),
    ) -> Result<(), AdapterError> {
        if self.kind != BuiltinKind::Echo {
            return Err(AdapterError::Unsupported("reconstruct"));
        }
        for (i, s) in smiles.iter().enumerate() {
            sink(i, vec![s.clone(); samples_per_input]);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn training() -> Vec<String> {
        ["CCO", "c1ccccc1", "CC(=O)O", "CCN", "OCCO"].iter().map(|s| s.to_string()).collect()
    }

    fn sample(kind: BuiltinKind, n: usize, seed: u64) -> Vec<String> {
        let mut g = BuiltinGenerator::new(kind, training()).unwrap();
        let mut out = Vec::new();
        g.sample(n, seed, &mut |s| out.push(s)).unwrap();
        out
    }

    #[test]
    fn replay_is_seeded() {
        assert_eq!(sample(BuiltinKind::Replay, 50, 3), sample(BuiltinKind::Replay, 50, 3));
        assert_ne!(sample(BuiltinKind::Replay, 50, 3), sample(BuiltinKind::Replay, 50, 4));
        assert!(sample(BuiltinKind::Replay, 50, 3).iter().all(|s| training().contains(s)));
    }

    #[test]
    fn random_chars_uses_training_alphabet_and_lengths() {
        let alphabet: BTreeSet<char> = training().iter().flat_map(|s| s.chars()).collect();
        let lengths: BTreeSet<usize> = training().iter().map(|s| s.len()).collect();
        for s in sample(BuiltinKind::RandomChars, 100, 1) {
            assert!(s.chars().all(|c| alphabet.contains(&c)));
            assert!(lengths.contains(&s.len()));
        }
    }

    #[test]
    fn ngram_on_distinct_prefixes_reproduces_training() {
        let out = sample(BuiltinKind::Ngram, 100, 9);
        assert!(out.iter().all(|s| training().contains(s)), "{out:?}");
    }

    #[test]
    fn unigram_model_stops() {
        let m = NgramModel::fit(&["CC", "C"], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert!(m.generate(&mut rng).len() <= 4);
        }
    }

    #[test]
    fn capabilities() {
        for kind in BuiltinKind::ALL {
            let (id, caps) = BuiltinGenerator::new(kind, training()).unwrap().handshake().unwrap();
            assert_eq!(id.name, kind.name());
            assert!(caps.can_sample);
            assert_eq!(caps.can_reconstruct, kind == BuiltinKind::Echo);
        }
        assert!(matches!(BuiltinGenerator::new(BuiltinKind::Replay, vec![]), Err(AdapterError::EmptyTrainingSet)));
    }
}
