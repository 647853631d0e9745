// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tlss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const SINGLE: &str = r#"
scheme = "single"
prime = 199
oneway = "modexp:3"
seed = 2024
threshold = 3
public_keys = [1, 2, 3, 4, 5]
secret = 42

[output]
transcript = "out/t.jsonl"
"#;

#[test]
fn paper_examples_self_check() {
    for which in ["1", "2"] {
        let o = tlss(&["paper-example", which]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("self-check: pass"));
    }
    let o = tlss(&["paper-example", "2"]);
    assert!(stdout(&o)
        .contains("[101, 83, 44, 108, 1, 65, 66, 89, 100, 37, 3, 105, 19, 27, 45, 25, 0]"));
    assert_eq!(tlss(&["paper-example", "3"]).status.code(), Some(2));
}

#[test]
fn honest_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", SINGLE);
    let o = tlss(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("outcome=Recovered"), "{text}");
    assert!(!text.contains("secret="));

    let transcript = fs::read_to_string(dir.path().join("out/t.jsonl")).unwrap();
    assert!(transcript.lines().count() > 5);
    assert!(!transcript.contains("participant-"));

    let o = tlss(&["run", cfg.to_str().unwrap(), "--reveal"]);
    assert!(stdout(&o).contains("secret=42"));
    let transcript = fs::read_to_string(dir.path().join("out/t.jsonl")).unwrap();
    assert!(transcript.contains("participant-1"));
}

#[test]
fn strict_cheater_run() {
    let dir = tempfile::tempdir().unwrap();
    let text = SINGLE.replace(
        "seed = 2024",
        "seed = 2024\nmode = \"strict\"\nactive = [1, 2, 3]",
    ) + "\n[behaviors]\n2 = \"corrupt:5\"\n";
    let cfg = write(dir.path(), "s.toml", &text);
    let o = tlss(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = tlss(&["run", cfg.to_str().unwrap(), "--allow-abort", "--reveal"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Aborted(level1_mismatch)"), "{text}");
    assert!(text.contains("cheaters=[participant-2:anon-"), "{text}");
    assert!(!text.contains("participant-1:"));
}

#[test]
fn malformed_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.toml", "scheme = \n"),
        ("unknown.toml", &*format!("colour = 1\n{SINGLE}")),
        ("prime.toml", &*SINGLE.replace("prime = 199", "prime = 198")),
        (
            "threshold.toml",
            &*SINGLE.replace("threshold = 3", "threshold = 9"),
        ),
    ];
    for (name, text) in cases {
        let cfg = write(dir.path(), name, text);
        let o = tlss(&["run", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("error:"),
            "{name}"
        );
    }
    let o = tlss(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = tlss(&["run"]);
    assert_eq!(o.status.code(), Some(2));
}

const CHAIN: &str = r#"
scheme = "chain"
prime = "2305843009213693951"
oneway = "sha256"
seed = 5

[chain]
nodes = 40
intervals = 5
txs_per_interval = 8

[output]
chain = "chain.bin"
transcript = "chain.jsonl"
"#;

#[test]
fn chain_run_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CHAIN);
    let o = tlss(&["run", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("chain height=5"));
    let store = dir.path().join("chain.bin");
    let first = fs::read(&store).unwrap();

    let o = tlss(&["chain-inspect", store.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.ends_with(" valid")).count(),
        5,
        "{text}"
    );
    assert!(text.contains("timeout_validated=false"));

    // same seed, same bytes
    tlss(&["run", cfg.to_str().unwrap()]);
    assert_eq!(fs::read(&store).unwrap(), first);
}

#[test]
fn inspect_tampered_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CHAIN);
    tlss(&["run", cfg.to_str().unwrap()]);
    let store = dir.path().join("chain.bin");
    let mut bytes = fs::read(&store).unwrap();

    // walk to the third record and flip the last byte of its final transaction
    let mut pos = 0;
    for _ in 0..2 {
        let len = u32::from_be_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        pos += 4 + len;
    }
    let len = u32::from_be_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
    bytes[pos + 4 + len - 1] ^= 0x01;
    let tampered = write(dir.path(), "tampered.bin", "");
    fs::write(&tampered, &bytes).unwrap();

    let o = tlss(&["chain-inspect", tampered.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(
        text.contains("height=3 ") && text.contains("merkle root does not match"),
        "{text}"
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.contains("descendant of invalid"))
            .count(),
        2
    );
    assert_eq!(text.lines().filter(|l| l.ends_with(" valid")).count(), 2);

    let o = tlss(&[
        "chain-inspect",
        dir.path().join("nope.bin").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let truncated = write(dir.path(), "short.bin", "");
    fs::write(&truncated, &fs::read(&store).unwrap()[..50]).unwrap();
    let o = tlss(&["chain-inspect", truncated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("corrupt chain store"));
}
