// SPDX-License-Identifier: Apache-2.0

//! Subcommand bodies. Each writes its report to `out` and returns an exit
//! code.

use std::fs;
use std::io::Write;
use std::path::Path;

use tlss_core::chain::{validate_chain, BlockStatus, ChainStore, ValidationMode, World};
use tlss_core::protocol::{
    identify_cheaters, run_session, ActorId, Outcome, RecoveredValues, Role, View,
};
use tlss_core::FieldElement;

use crate::config::{self, ChainScenario, Scenario, SharingScenario};
use crate::examples;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ABORT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SELF_CHECK: i32 = 3;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub allow_abort: bool,
    pub reveal: bool,
}

pub fn paper_example(which: u8, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match examples::run_example(which) {
        None => {
            let _ = writeln!(err, "error: unknown example {which} (expected 1 or 2)");
            EXIT_USAGE
        }
        Some(Err(e)) => {
            let _ = writeln!(err, "error: example {which} failed to run: {e}");
            EXIT_SELF_CHECK
        }
        Some(Ok(report)) => {
            let _ = write!(out, "{}", report.render());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_SELF_CHECK
            }
        }
    }
}

pub fn run(path: &Path, opts: &RunOptions, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let loaded = match config::load(path) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &loaded.scenario {
        Scenario::Sharing(s) => run_sharing(s, loaded.transcript_path.as_deref(), opts, out),
        Scenario::Chain(c) => run_chain(
            c,
            loaded.transcript_path.as_deref(),
            loaded.chain_path.as_deref(),
            out,
        ),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            if message.starts_with("cannot write") {
                EXIT_USAGE
            } else {
                EXIT_ABORT
            }
        }
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn join(values: &[FieldElement]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn actor_label(actor: &ActorId, reveal: bool) -> String {
    match actor.role {
        Role::Participant(i) if reveal => format!("participant-{}:{}", i + 1, actor.alias),
        _ => actor.alias.clone(),
    }
}

fn run_sharing(
    s: &SharingScenario,
    transcript: Option<&Path>,
    opts: &RunOptions,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let run = run_session(
        &s.params,
        &s.oneway,
        &s.secret,
        &s.profiles,
        &s.active,
        s.seed,
        s.config,
    )
    .map_err(|e| e.to_string())?;
    if let Some(path) = transcript {
        let view = if opts.reveal {
            View::Private
        } else {
            View::Public
        };
        write_file(path, run.transcript.to_jsonl(view).as_bytes())?;
    }
    let mut line = format!("ticks={} mode={:?}", run.ticks, run.mode);
    let code = match &run.outcome {
        Outcome::Recovered(values) => {
            line = format!("outcome=Recovered {line}");
            if opts.reveal {
                match values {
                    RecoveredValues::Single(v) => line.push_str(&format!(" secret={v}")),
                    RecoveredValues::Multi(r) => {
                        line.push_str(&format!(" message=[{}]", join(&r.message)))
                    }
                }
            }
            EXIT_OK
        }
        Outcome::Aborted(reason) => {
            line = format!("outcome=Aborted({reason}) {line}");
            if let Ok(cheaters) = identify_cheaters(&run) {
                let names: Vec<String> = cheaters
                    .iter()
                    .map(|a| actor_label(a, opts.reveal))
                    .collect();
                line.push_str(&format!(" cheaters=[{}]", names.join(",")));
            }
            if opts.allow_abort {
                EXIT_OK
            } else {
                EXIT_ABORT
            }
        }
    };
    let _ = writeln!(out, "{line}");
    Ok(code)
}

fn run_chain(
    c: &ChainScenario,
    transcript: Option<&Path>,
    chain_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let mut world = World::new(c.world.clone()).map_err(|e| e.to_string())?;
    if let Some(path) = chain_path {
        write_file(path, &[])?;
    }
    let mut jsonl = String::new();
    for _ in 0..c.intervals {
        let outcome = world.step().map_err(|e| e.to_string())?;
        let block = world
            .store()
            .get(&outcome.block_hash)
            .expect("block was appended");
        if let Some(path) = chain_path {
            ChainStore::append_record(path, block).map_err(|e| e.to_string())?;
        }
        jsonl.push_str(&outcome.transcript.to_jsonl(View::Public));
        for attempt in &outcome.attempts {
            jsonl.push_str(&attempt.run.transcript.to_jsonl(View::Public));
        }
        let validation = match outcome.validation {
            ValidationMode::Recovered => "recovered",
            ValidationMode::TimeoutValidated => "timeout_validated",
        };
        let _ = writeln!(
            out,
            "block height={} hash={} validation={} committee={} evicted={:?} attempts={} consistent={}/{}",
            outcome.height,
            hex(&outcome.block_hash),
            validation,
            outcome.committee.len(),
            outcome.evicted,
            outcome.attempts.len(),
            outcome.consistent_submitters(),
            outcome.threshold,
        );
    }
    if let Some(path) = transcript {
        write_file(path, jsonl.as_bytes())?;
    }
    let store = world.store();
    let _ = writeln!(
        out,
        "chain height={} tip={}",
        store.tip_height(),
        hex(&store.tip_hash())
    );
    Ok(EXIT_OK)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Exit 0 when every block validates, 1 when any fails, 2 when the file
/// cannot be read or decoded.
pub fn chain_inspect(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let store = match ChainStore::load(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = validate_chain(&store);
    let _ = writeln!(
        out,
        "height={} tip={} blocks={}",
        store.tip_height(),
        hex(&store.tip_hash()),
        store.len()
    );
    for entry in &report.entries {
        let status = match &entry.status {
            BlockStatus::Valid => "valid".to_string(),
            BlockStatus::Invalid(e) => format!("invalid ({e})"),
            BlockStatus::DescendantOfInvalid => "invalid (descendant of invalid block)".to_string(),
        };
        let _ = writeln!(
            out,
            "  height={} hash={} timeout_validated={} {status}",
            entry.height,
            hex(&entry.hash),
            entry.timeout_validated
        );
    }
    if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_ABORT
    }
}
