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

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use super::adapter::wire::{CapabilityFlags, Hello, Item, Request};
use super::adapter::{AdapterError, AdapterIdentity, AdapterKind, Capabilities, Generator, SampleOutcome};

const STDERR_TAIL: usize = 4096;

enum Line {
    Text(String),
    Eof,
    Failed(String),
}

/// An external generator spoken to over newline-delimited JSON on its
/// standard streams. The command runs through `sh -c`.
pub struct SubprocessGenerator {
    command: String,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<Line>,
    stderr: Arc<Mutex<Vec<u8>>>,
    timeout: Duration,
}

impl SubprocessGenerator {
    pub fn spawn(command: &str, timeout: Duration) -> Result<SubprocessGenerator, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| AdapterError::Spawn { command: command.to_string(), source })?;
        let stdout = child.stdout.take().expect("piped stdout");
        let mut err = child.stderr.take().expect("piped stderr");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                let msg = match line {
                    Ok(l) => Line::Text(l),
                    Err(e) => Line::Failed(e.to_string()),
                };
                let stop = matches!(msg, Line::Failed(_));
                if tx.send(msg).is_err() || stop {
                    return;
                }
            }
            let _ = tx.send(Line::Eof);
        });
        let stderr = Arc::new(Mutex::new(Vec::new()));
        let sink = Arc::clone(&stderr);
        thread::spawn(move || {
            let mut buf = [0u8; 1024];
            while let Ok(n) = err.read(&mut buf) {
                if n == 0 {
                    break;
                }
                let mut tail = sink.lock().unwrap_or_else(|p| p.into_inner());
                tail.extend_from_slice(&buf[..n]);
                if tail.len() > STDERR_TAIL {
                    let cut = tail.len() - STDERR_TAIL;
                    tail.drain(..cut);
                }
            }
        });
        let stdin = child.stdin.take();
        Ok(SubprocessGenerator { command: command.to_string(), child, stdin, lines: rx, stderr, timeout })
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn send(&mut self, req: &Request) -> Result<(), AdapterError> {
        let mut line = serde_json::to_string(req).expect("requests serialize");
        line.push('\n');
        let ok = match self.stdin.as_mut() {
            Some(stdin) => stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()).is_ok(),
            None => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.exited())
        }
    }

    fn exited(&mut self) -> AdapterError {
        self.stdin = None;
        let status = match self.child.wait() {
            Ok(s) => s.code(),
            Err(_) => None,
        };
        // Give the stderr reader a moment to drain.
        thread::sleep(Duration::from_millis(50));
        let tail = self.stderr.lock().unwrap_or_else(|p| p.into_inner());
        AdapterError::Exited { status, stderr: String::from_utf8_lossy(&tail).trim().to_string() }
    }

    /// Next non-empty line, each waited for at most the timeout.
    fn recv(&mut self) -> Result<String, AdapterError> {
        loop {
            match self.lines.recv_timeout(self.timeout) {
                Ok(Line::Text(t)) if t.trim().is_empty() => continue,
                Ok(Line::Text(t)) => return Ok(t),
                Ok(Line::Failed(e)) => return Err(AdapterError::Protocol(format!("unreadable output: {e}"))),
                Ok(Line::Eof) | Err(RecvTimeoutError::Disconnected) => return Err(self.exited()),
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(AdapterError::Timeout(self.timeout));
                }
            }
        }
    }

    fn recv_item(&mut self) -> Result<Item, AdapterError> {
        let line = self.recv()?;
        serde_json::from_str(&line).map_err(|e| AdapterError::Protocol(format!("bad message {}: {e}", snippet(&line))))
    }
}

fn snippet(line: &str) -> String {
    let mut s: String = line.chars().take(80).collect();
    if s.len() < line.len() {
        s.push_str("...");
    }
    format!("{s:?}")
}

impl Generator for SubprocessGenerator {
    fn handshake(&mut self) -> Result<(AdapterIdentity, Capabilities), AdapterError> {
        self.send(&Request::Capabilities)?;
        let line = self.recv()?;
        let hello: Hello = serde_json::from_str(&line)
            .map_err(|e| AdapterError::Protocol(format!("bad handshake {}: {e}", snippet(&line))))?;
        let CapabilityFlags { sample, reconstruct } = hello.capabilities;
        Ok((
            AdapterIdentity { kind: AdapterKind::Subprocess, name: hello.name, version: hello.version },
            Capabilities { can_sample: sample, can_reconstruct: reconstruct },
        ))
    }

    fn sample(&mut self, n: usize, seed: u64, sink: &mut dyn FnMut(String)) -> Result<SampleOutcome, AdapterError> {
        self.send(&Request::Sample { n, seed })?;
        let mut received = 0;
        loop {
            match self.recv_item()? {
                Item::Smiles { smiles } => {
                    if received == n {
                        return Err(AdapterError::Protocol(format!("more than the {n} requested samples")));
                    }
                    received += 1;
                    sink(smiles);
                }
                Item::Done { done: true } => return Ok(SampleOutcome { received, short: received < n }),
                other => return Err(AdapterError::Protocol(format!("unexpected message {other:?} in sample stream"))),
            }
        }
    }

    fn reconstruct(
        &mut self,
        smiles: &[String],
        samples_per_input: usize,
        seed: u64,
        sink: &mut dyn FnMut(usize, Vec<String>),
    ) -> Result<(), AdapterError> {
        self.send(&Request::Reconstruct { smiles: smiles.to_vec(), samples_per_input, seed })?;
        loop {
            match self.recv_item()? {
                Item::Outputs { index, outputs } => sink(index, outputs),
                Item::Done { done: true } => return Ok(()),
                other => {
                    return Err(AdapterError::Protocol(format!("unexpected message {other:?} in reconstruct stream")))
                }
            }
        }
    }
}

impl Drop for SubprocessGenerator {
    fn drop(&mut self) {
        self.stdin = None;
        if matches!(self.child.try_wait(), Ok(None)) {
            thread::sleep(Duration::from_millis(20));
            if matches!(self.child.try_wait(), Ok(None)) {
                let _ = self.child.kill();
            }
        }
        let _ = self.child.wait();
    }
}

/// Answer protocol requests from `input` until it closes.
pub fn serve(generator: &mut dyn Generator, input: impl BufRead, mut output: impl Write) -> Result<(), AdapterError> {
    let (identity, caps) = generator.handshake()?;
    for line in input.lines() {
        let line = line.map_err(|e| AdapterError::Protocol(format!("read failed: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let req: Request = serde_json::from_str(&line)
            .map_err(|e| AdapterError::Protocol(format!("bad request {}: {e}", snippet(&line))))?;
        let mut failed = None;
        match req {
            Request::Capabilities => {
                let hello = Hello {
                    capabilities: CapabilityFlags { sample: caps.can_sample, reconstruct: caps.can_reconstruct },
                    name: identity.name.clone(),
                    version: identity.version.clone(),
                };
                emit(&mut output, &hello, &mut failed);
            }
            Request::Sample { n, seed } => {
                generator.sample(n, seed, &mut |smiles| emit(&mut output, &Item::Smiles { smiles }, &mut failed))?;
                emit(&mut output, &Item::Done { done: true }, &mut failed);
            }
            Request::Reconstruct { smiles, samples_per_input, seed } => {
                generator.reconstruct(&smiles, samples_per_input, seed, &mut |index, outputs| {
                    emit(&mut output, &Item::Outputs { index, outputs }, &mut failed)
                })?;
                emit(&mut output, &Item::Done { done: true }, &mut failed);
            }
        }
        if failed.is_none() {
            failed = output.flush().err();
        }
        if let Some(e) = failed {
            return Err(AdapterError::Protocol(format!("write failed: {e}")));
        }
    }
    Ok(())
}

fn emit<T: serde::Serialize>(out: &mut impl Write, msg: &T, failed: &mut Option<std::io::Error>) {
    if failed.is_some() {
        return;
    }
    let mut line = serde_json::to_string(msg).expect("messages serialize");
    line.push('\n');
    *failed = out.write_all(line.as_bytes()).err();
}
