use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use gomoku_engine::engine_io::protocol::run_protocol;
use gomoku_engine::engine_io::EngineConfig;

const TRANSCRIPTS: [&str; 3] = ["opening", "upload", "errors"];

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn pinned() -> EngineConfig {
    EngineConfig::parse(&golden("pinned.conf"), None).unwrap()
}

#[test]
fn transcripts_replay_through_the_library() {
    for name in TRANSCRIPTS {
        let mut out = Vec::new();
        let status = run_protocol(golden(&format!("{name}.in")).as_bytes(), &mut out, pinned()).unwrap();
        assert_eq!(status, 0);
        assert_eq!(String::from_utf8(out).unwrap(), golden(&format!("{name}.out")), "{name}");
    }
}

#[test]
fn transcripts_replay_through_the_binary() {
    let conf = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/pinned.conf");
    for name in TRANSCRIPTS {
        let mut child = Command::new(env!("CARGO_BIN_EXE_gomoku"))
            .arg("--config")
            .arg(&conf)
            .env_remove("GOMOKU_PORT")
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        child.stdin.take().unwrap().write_all(golden(&format!("{name}.in")).as_bytes()).unwrap();
        let out = child.wait_with_output().unwrap();
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden(&format!("{name}.out")), "{name}");
    }
}

#[test]
fn replies_respect_the_turn_time() {
    let config = EngineConfig::parse("time_ms = none\ndepth = 30", None).unwrap();
    let script = "START 15\nINFO timeout_turn 300\nTURN 7,7\nTURN 8,9\nTURN 5,5\nEND\n";
    let started = Instant::now();
    let mut out = Vec::new();
    run_protocol(script.as_bytes(), &mut out, config).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(!text.contains("ERROR"), "{text}");
    // three replies, each within its budget plus a generous grace
    assert!(started.elapsed() < Duration::from_millis(3 * 300 + 1500), "{:?}", started.elapsed());
}
