use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

const SCC: &str = env!("CARGO_BIN_EXE_scc");

fn design() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../sim/design/robot.scc"))
}

fn scc(args: &[&str]) -> Output {
    Command::new(SCC).args(args).output().unwrap()
}

fn design_arg() -> String {
    design().display().to_string()
}

#[test]
fn check_reports_component_and_connection_counts() {
    let out = scc(&["check", &design_arg()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).trim().ends_with("robot.scc: ok (12 components, 12 connections)"));
}

#[test]
fn violations_exit_one_and_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scc");
    fs::write(&bad, "context A as Float { context B; }\ncontext B as Float { context A; }\n").unwrap();
    let out = scc(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.scc:1:") && err.contains("error[R4]"), "{err}");

    let syntax = dir.path().join("syntax.scc");
    fs::write(&syntax, "entity {").unwrap();
    assert_eq!(scc(&["check", syntax.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(scc(&["check", "/nonexistent/robot.scc"]).status.code(), Some(2));
    assert_eq!(scc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(scc(&["simulate", &design_arg(), "--map", "atlantis"]).status.code(), Some(2));
}

#[test]
fn graph_goes_to_stdout_without_output_file() {
    let out = scc(&["graph", &design_arg()]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 11);
}

#[test]
fn compile_writes_framework_and_scaffold_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fw");
    let stubs = dir.path().join("stubs");
    let run = || scc(&["compile", &design_arg(), "-o", out.to_str().unwrap(), "--scaffold", stubs.to_str().unwrap()]);
    assert!(run().status.success());
    assert!(out.join("manifest.json").is_file());
    assert!(out.join("generated/mod.rs").is_file());
    assert!(out.join("generated/motion.rs").is_file());
    let stub = stubs.join("motion.rs");
    assert!(stub.is_file());

    fs::write(&stub, "// mine\n").unwrap();
    assert!(run().status.success());
    assert_eq!(fs::read_to_string(&stub).unwrap(), "// mine\n");
}

#[test]
fn headless_simulation_prints_summary() {
    let out = scc(&["simulate", &design_arg(), "--map", "room", "--steps", "50", "--sequential"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("ticks 50  mode RANDOM  collisions 0"), "{summary}");
}

#[test]
fn trace_lines_are_json() {
    let out = scc(&["simulate", &design_arg(), "--map", "room", "--steps", "5", "--trace"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(!stdout.is_empty());
    for line in stdout.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["ts", "producer", "channel", "seq"] {
            assert!(v.get(key).is_some(), "{line}");
        }
    }
    // the summary moves to stderr
    assert!(String::from_utf8_lossy(&out.stderr).contains("ticks 5"));
}

struct Killed(Child);

impl Drop for Killed {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn start_console() -> (Killed, String) {
    let mut child = Command::new(SCC)
        .args(["simulate", &design_arg(), "--map", "office", "--console", "0"])
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line
        .trim()
        .strip_prefix("operator console at http://")
        .and_then(|s| s.strip_suffix('/'))
        .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
        .to_owned();
    (Killed(child), addr)
}

#[test]
fn console_serves_page_and_state_over_websocket() {
    let (_child, addr) = start_console();

    let mut http = TcpStream::connect(&addr).unwrap();
    write!(http, "GET / HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut page = String::new();
    http.read_to_string(&mut page).unwrap();
    assert!(page.starts_with("HTTP/1.1 200"), "{page}");
    assert!(page.contains("<canvas"));

    let (mut ws, _) = tungstenite::connect(format!("ws://{addr}/ws")).unwrap();
    let mut next_state = || loop {
        let msg = ws.read().unwrap();
        if let tungstenite::Message::Text(text) = msg {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["type"], "state");
            return v;
        }
    };
    let first = next_state();
    assert_eq!(first["mode"], "RANDOM");
    for key in ["tick", "pose", "lightOn", "width", "height", "known", "frontiers", "pictures"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(first["known"].as_array().unwrap().len() as u64, first["height"].as_u64().unwrap());
    drop(next_state);

    ws.send(tungstenite::Message::text(r#"{"type":"setMode","mode":"EXPLORATION"}"#)).unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    loop {
        assert!(Instant::now() < deadline, "mode change not observed");
        if let tungstenite::Message::Text(text) = ws.read().unwrap() {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            if v["mode"] == "EXPLORATION" {
                break;
            }
        }
    }
}

#[test]
fn console_rejects_unknown_paths() {
    let (_child, addr) = start_console();
    let mut http = TcpStream::connect(&addr).unwrap();
    write!(http, "GET /nope HTTP/1.1\r\nHost: {addr}\r\n\r\n").unwrap();
    let mut reply = String::new();
    http.read_to_string(&mut reply).unwrap();
    assert!(reply.starts_with("HTTP/1.1 404"), "{reply}");
}
