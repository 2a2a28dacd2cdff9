use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/topic_barr_letter.json")
}

fn biaslens() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_biaslens"));
    c.env_remove("BIASLENS_CONFIG")
        .env_remove("BIASLENS_DATA_DIR")
        .env_remove("BIASLENS_PORT")
        .env("RUST_LOG", "error");
    c
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn get(port: u16, path: &str) -> String {
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => panic!("server never came up: {e}"),
        }
    };
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    resp
}

#[test]
fn data_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let summary = ok(biaslens()
        .env("BIASLENS_DATA_DIR", dir.path())
        .arg("analyze")
        .arg(fixture())
        .output()
        .unwrap());
    let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["topic_id"], "barr-letter");
    let hash = summary["engine_config_hash"].as_str().unwrap();
    assert!(dir
        .path()
        .join(format!("analyses/barr-letter/{hash}.json"))
        .is_file());

    let exported = ok(biaslens()
        .arg("--data-dir")
        .arg(dir.path())
        .args(["export", "barr-letter"])
        .output()
        .unwrap());
    let by_hash = ok(biaslens()
        .env("BIASLENS_DATA_DIR", dir.path())
        .args(["export", "barr-letter", "--hash", hash])
        .output()
        .unwrap());
    assert_eq!(exported, by_hash);
}

#[test]
fn missing_topic_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = biaslens()
        .arg("--data-dir")
        .arg(dir.path())
        .args(["export", "nope"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
    let out = biaslens()
        .arg("--data-dir")
        .arg(dir.path())
        .args(["analyze", "/no/such/topic.json"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn config_prints_toml_and_hash() {
    let out = biaslens().arg("config").output().unwrap();
    let stdout = ok(out.clone());
    let parsed: toml::Table = stdout.parse().unwrap();
    assert!(parsed.contains_key("grouping"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.trim_start().starts_with("hash "));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("engine.toml");
    std::fs::write(&path, &stdout).unwrap();
    let again = biaslens()
        .env("BIASLENS_CONFIG", &path)
        .arg("config")
        .output()
        .unwrap();
    assert_eq!(ok(again.clone()), stdout);
    assert_eq!(again.stderr, stderr.as_bytes());
}

#[test]
fn serve_answers_on_the_configured_port() {
    let dir = tempfile::tempdir().unwrap();
    ok(biaslens()
        .arg("--data-dir")
        .arg(dir.path())
        .arg("analyze")
        .arg(fixture())
        .output()
        .unwrap());
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let _server = Server(
        biaslens()
            .env("BIASLENS_DATA_DIR", dir.path())
            .env("BIASLENS_PORT", port.to_string())
            .arg("serve")
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let resp = get(port, "/topics");
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("\"barr-letter\""), "{resp}");
    assert!(get(port, "/export/nope").starts_with("HTTP/1.1 404"));
}

#[test]
fn fetch_with_no_reachable_url_fails() {
    let dir = tempfile::tempdir().unwrap();
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let out = biaslens()
        .args(["fetch", "--topic-id", "t1", "--timeout-secs", "2", "-o"])
        .arg(dir.path().join("t1.json"))
        .arg(format!("http://127.0.0.1:{port}/gone"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!dir.path().join("t1.json").exists());
}
