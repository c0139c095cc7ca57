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
use std::time::Duration;

use molbench::harness::*;
use molbench::metrics::{Metric, MetricReport};

fn builtin(kind: BuiltinKind, d: &Dataset) -> GeneratorAdapter {
    GeneratorAdapter::handshake(Box::new(BuiltinGenerator::new(kind, d.smiles(&d.split.train)).unwrap())).unwrap()
}

fn sample(kind: BuiltinKind, d: &Dataset, n: usize, seed: u64) -> MetricReport {
    let cfg = RunConfig { n_samples: n, seed, ..RunConfig::default() };
    let refs = reference_sets(d, &cfg.metrics);
    run_sampling_process(&mut builtin(kind, d), &cfg, &refs, common::tables()).unwrap()
}

fn mean(r: &MetricReport, m: Metric) -> f64 {
    r.get(m).unwrap().mean
}

#[test]
fn replay_contract() {
    let d = common::qm9();
    let r = sample(BuiltinKind::Replay, d, 5000, 7);
    assert_eq!(mean(&r, Metric::Validity), 100.0);
    assert_eq!(mean(&r, Metric::Novelty), 0.0);
    let mut adapter = builtin(BuiltinKind::Replay, d);
    let mut drawn = Vec::new();
    adapter.sample(5000, 7, &mut |s| drawn.push(molbench::smiles::canonicalize(&s).unwrap())).unwrap();
    let distinct = drawn.iter().collect::<HashSet<_>>().len();
    assert!((mean(&r, Metric::Uniqueness) - 100.0 * distinct as f64 / 5000.0).abs() < 1e-9);
    assert_eq!(r.counts.n_generated, 5000);
    assert!(!r.counts.short_batch);
}

#[test]
fn builtins_are_deterministic() {
    let d = common::qm9();
    for kind in [BuiltinKind::Replay, BuiltinKind::Ngram, BuiltinKind::RandomChars] {
        assert_eq!(sample(kind, d, 300, 3), sample(kind, d, 300, 3), "{kind}");
    }
    assert_ne!(sample(BuiltinKind::Ngram, d, 300, 3), sample(BuiltinKind::Ngram, d, 300, 4));
}

#[test]
fn ngram_beats_random_characters() {
    let d = common::zinc();
    let ngram = sample(BuiltinKind::Ngram, d, 2000, 1);
    let random = sample(BuiltinKind::RandomChars, d, 2000, 1);
    assert!(mean(&ngram, Metric::Validity) > mean(&random, Metric::Validity));
    if let Some(n) = random.get(Metric::Novelty) {
        assert!(n.mean >= 99.0);
    }
}

#[test]
fn zero_samples_is_rejected() {
    let d = common::qm9();
    let cfg = RunConfig { n_samples: 0, ..RunConfig::default() };
    let refs = ReferenceSets::default();
    let err = run_sampling_process(&mut builtin(BuiltinKind::Replay, d), &cfg, &refs, common::tables()).unwrap_err();
    assert!(matches!(err, HarnessError::Config(_)));
}

use molbench::metrics::ReferenceSets;

#[test]
fn echo_reconstructs_everything() {
    let d = common::zinc();
    let cfg = RunConfig { reconstruction_limit: Some(100), ..RunConfig::default() };
    let r = run_reconstruction_process(&mut builtin(BuiltinKind::Echo, d), &cfg, d, common::tables()).unwrap();
    assert_eq!(mean(&r, Metric::Reconstruction), 100.0);
    assert_eq!(r.counts.n_reconstruction_pairs, 100 * 20);
}

#[test]
fn no_encoder_means_na() {
    let d = common::qm9();
    let mut replay = builtin(BuiltinKind::Replay, d);
    assert_eq!(replay.capabilities(), Capabilities { can_sample: true, can_reconstruct: false });
    let r = run_reconstruction_process(&mut replay, &RunConfig::default(), d, common::tables()).unwrap();
    assert_eq!(r.get(Metric::Reconstruction), None);
    assert!(matches!(replay.reconstruct(&["C".into()], 1, 0), Err(AdapterError::Unsupported(_))));
}

struct Constant;

impl Generator for Constant {
    fn handshake(&mut self) -> Result<(AdapterIdentity, Capabilities), AdapterError> {
        Ok((
            AdapterIdentity { kind: AdapterKind::Builtin, name: "constant".into(), version: "0".into() },
            Capabilities { can_sample: true, can_reconstruct: true },
        ))
    }

    fn sample(&mut self, n: usize, _: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError> {
        for _ in 0..n / 2 {
            sink("C".into());
        }
        Ok(SampleOutcome { received: n / 2, short: true })
    }

    fn reconstruct(
        &mut self,
        s: &[String],
        k: usize,
        _: u64,
        sink: &mut dyn FnMut(usize, Vec<String>),
    ) -> Result<(), AdapterError> {
        for i in 0..s.len() {
            sink(i, vec!["C".into(); k]);
        }
        Ok(())
    }
}

#[test]
fn constant_generator() {
    let d = common::zinc();
    let mut adapter = GeneratorAdapter::handshake(Box::new(Constant)).unwrap();
    let cfg = RunConfig { n_samples: 100, reconstruction_limit: Some(50), ..RunConfig::default() };
    let refs = reference_sets(d, &cfg.metrics);
    let runs = evaluate(&mut adapter, &cfg, d, &refs, common::tables()).unwrap();
    let r = &runs[0];
    assert_eq!(mean(r, Metric::Reconstruction), 0.0);
    assert_eq!(r.counts.n_generated, 50);
    assert!(r.counts.short_batch);
    assert_eq!(mean(r, Metric::Uniqueness), 2.0);
}

#[test]
fn repeats_use_consecutive_seeds() {
    let d = common::qm9();
    let cfg = RunConfig { n_samples: 200, repeats: 2, seed: 10, ..RunConfig::default() };
    let refs = reference_sets(d, &cfg.metrics);
    let runs = evaluate(&mut builtin(BuiltinKind::Ngram, d), &cfg, d, &refs, common::tables()).unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[1], sample(BuiltinKind::Ngram, d, 200, 11));
}

fn spawn(script: &str, timeout: Duration) -> Result<GeneratorAdapter, AdapterError> {
    GeneratorAdapter::handshake(Box::new(SubprocessGenerator::spawn(script, timeout)?))
}

const HELLO: &str = r#"{"capabilities":{"sample":true,"reconstruct":false},"name":"t","version":"1"}"#;

#[test]
fn garbage_handshake_is_a_protocol_error() {
    let err = spawn("read x; echo 'not json'", Duration::from_secs(10)).unwrap_err();
    assert!(matches!(err, AdapterError::Protocol(_)), "{err}");
}

#[test]
fn crashing_adapter_reports_exit_and_stderr() {
    let err = spawn("read x; echo boom >&2; exit 3", Duration::from_secs(10)).unwrap_err();
    match err {
        AdapterError::Exited { status, stderr } => {
            assert_eq!(status, Some(3));
            assert!(stderr.contains("boom"));
        }
        other => panic!("{other}"),
    }
    let script = format!("read x; echo '{HELLO}'; read y; echo '{{\"smiles\":\"C\"}}'; exit 1");
    let mut a = spawn(&script, Duration::from_secs(10)).unwrap();
    assert!(matches!(a.sample(5, 0, &mut |_| {}), Err(AdapterError::Exited { .. })));
}

#[test]
fn short_batch_is_flagged() {
    let script =
        format!("read x; echo '{HELLO}'; read y; echo '{{\"smiles\":\"CCO\"}}'; echo '{{\"done\":true}}'; read z");
    let mut a = spawn(&script, Duration::from_secs(10)).unwrap();
    let mut got = Vec::new();
    let out = a.sample(3, 0, &mut |s| got.push(s)).unwrap();
    assert_eq!(out, SampleOutcome { received: 1, short: true });
    assert_eq!(got, vec!["CCO"]);
}

#[test]
fn silent_adapter_times_out() {
    let err = spawn("sleep 30", Duration::from_millis(300)).unwrap_err();
    assert!(matches!(err, AdapterError::Timeout(_)), "{err}");
}

#[test]
fn unknown_message_in_stream_is_rejected() {
    let script = format!("read x; echo '{HELLO}'; read y; echo '{{\"index\":0,\"outputs\":[]}}'");
    let mut a = spawn(&script, Duration::from_secs(10)).unwrap();
    assert!(matches!(a.sample(3, 0, &mut |_| {}), Err(AdapterError::Protocol(_))));
}

#[test]
fn served_builtin_round_trips_over_the_protocol() {
    let bin = env!("CARGO_BIN_EXE_molbench");
    let data = common::data_dir();
    let smi = data.join("zinc/zinc_moses_25k.smi");
    let cmd = format!("'{bin}' adapter echo --dataset '{}'", smi.display());
    let mut a = spawn(&cmd, Duration::from_secs(60)).unwrap();
    assert_eq!(a.identity().name, "echo");
    assert_eq!(a.identity().kind, AdapterKind::Subprocess);
    assert_eq!(a.capabilities(), Capabilities { can_sample: true, can_reconstruct: true });
    let outs = a.reconstruct(&["CCO".into(), "c1ccccc1".into()], 3, 0).unwrap();
    assert_eq!(outs, vec![vec!["CCO".to_string(); 3], vec!["c1ccccc1".to_string(); 3]]);
    let mut got = Vec::new();
    assert_eq!(a.sample(10, 4, &mut |s| got.push(s)).unwrap(), SampleOutcome { received: 10, short: false });
    let mut direct =
        BuiltinGenerator::new(BuiltinKind::Echo, common::zinc().smiles(&common::zinc().split.train)).unwrap();
    let mut expected = Vec::new();
    direct.sample(10, 4, &mut |s| expected.push(s)).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn dataset_examples() {
    let dir = tempfile::tempdir().unwrap();
    let smi = dir.path().join("t.smi");
    std::fs::write(&smi, "C\nCC\nC1CC\nCCC\n").unwrap();
    let split = dir.path().join("t.split");
    std::fs::write(&split, "[train]\n0\n1\n[test]\n3\n").unwrap();
    let d = Dataset::load(DatasetName::Custom("t".into()), &smi, Some(&split)).unwrap();
    assert_eq!((d.train().count(), d.test().count()), (2, 1));
    assert_eq!(d.report.rejected.len(), 1);
    let by_name = load_named_dataset(smi.to_str().unwrap(), dir.path()).unwrap();
    assert_eq!(by_name.split, d.split);
    assert!(matches!(load_named_dataset("nope", dir.path()), Err(HarnessError::UnknownDataset(_))));
}

#[test]
fn datasets_respect_atom_limits() {
    assert!(common::qm9().report.oversized.is_empty());
    assert!(common::zinc().report.oversized.is_empty());
    assert!(common::qm9().report.rejected.is_empty());
    assert!(common::zinc().report.rejected.is_empty());
}
