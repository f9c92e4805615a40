use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use sha2::{Digest, Sha256};
use usf_core::packing::format::{read_packing, write_packing};

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_usf-lab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    lab().args(args).current_dir(dir).output().unwrap()
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(
            &["gen", "tess", "--p", "3", "--q", "7", "--depth", "2", "--bogus"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn generated_ball_packs_through_a_pipe() {
    let mut gen = lab()
        .args(["gen", "tess", "--p", "3", "--q", "7", "--depth", "2"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let pack = lab()
        .args(["pack", "--model", "disc"])
        .stdin(gen.stdout.take().unwrap())
        .stderr(Stdio::null())
        .output()
        .unwrap();
    assert!(gen.wait().unwrap().success());
    assert!(pack.status.success());
    let text = String::from_utf8(pack.stdout).unwrap();
    let p = read_packing(&text).unwrap();
    assert_eq!(write_packing(&p), text);
    assert!(p.residuals.tangency < 1e-7);
}

#[test]
fn manifest_digests_match_the_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--out",
            "m",
            "gen",
            "tube",
            "--rings",
            "5",
            "--c",
            "0.5",
            "-o",
            "tube.pnet",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let m = manifest(&dir.path().join("m"));
    let file = std::fs::read(dir.path().join("tube.pnet")).unwrap();
    assert_eq!(m["outputs"][0]["path"], "tube.pnet");
    assert_eq!(m["outputs"][0]["sha256"], hex(&file));
    assert_eq!(m["versions"]["usf-core"], usf_core::VERSION);

    let out = run(
        &["--out", "m2", "pack", "tube.pnet", "-o", "tube.dcp"],
        dir.path(),
    );
    assert!(out.status.success());
    let m = manifest(&dir.path().join("m2"));
    assert_eq!(m["inputs"][0]["sha256"], hex(&file));
    let dcp = std::fs::read(dir.path().join("tube.dcp")).unwrap();
    assert_eq!(m["outputs"][0]["sha256"], hex(&dcp));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("lab.toml"), "seed = 5\n[sample]\nn = 10\n").unwrap();
    std::fs::write(
        dir.path().join("g.pnet"),
        run(&["gen", "grid", "--n", "3"], dir.path()).stdout,
    )
    .unwrap();
    let base = ["--config", "lab.toml", "sample", "ust", "g.pnet"];

    assert!(run(&[&base[..], &["--out", "a"]].concat(), dir.path())
        .status
        .success());
    let m = manifest(&dir.path().join("a"));
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config"]["options"]["n"], 10);

    let flags = ["--out", "b", "--seed", "9", "--n", "20"];
    assert!(run(&[&base[..], &flags].concat(), dir.path())
        .status
        .success());
    let m = manifest(&dir.path().join("b"));
    assert_eq!(m["seed"], 9);
    assert_eq!(m["config"]["options"]["n"], 20);

    std::fs::write(dir.path().join("bad.toml"), "sede = 5\n").unwrap();
    let out = run(&["--config", "bad.toml", "selftest"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_reports_its_location() {
    let mut child = lab()
        .args(["pack"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"planenet v1\nvertices x\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2, column 10"), "{err}");
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["selftest"], dir.path());
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(!report.contains("FAIL"));
    assert!(report.contains("dual complement law"));
}

#[test]
fn sample_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(
        &["gen", "tess", "--p", "3", "--q", "7", "--depth", "3", "-o", "b.pnet"],
        d
    )
    .status
    .success());
    assert!(run(&["pack", "b.pnet", "-o", "b.dcp"], d).status.success());
    assert!(run(
        &["sample", "ust", "b.pnet", "--n", "3", "--forest", "f.txt", "-o", "m.csv"],
        d
    )
    .status
    .success());
    let out = run(
        &[
            "render", "b.dcp", "--graph", "b.pnet", "--forest", "f.txt", "-o", "fig.svg",
        ],
        d,
    );
    assert!(out.status.success());
    let svg = std::fs::read_to_string(d.join("fig.svg")).unwrap();
    // a spanning tree of 85 vertices has 84 edges
    assert_eq!(svg.matches("<line").count(), 84);
    assert_eq!(
        run(&["render", "b.dcp", "--forest", "f.txt"], d)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn experiment_csvs_do_not_depend_on_the_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = |threads: &'static str, out: &'static str| {
        [
            "--threads",
            threads,
            "--seed",
            "3",
            "exp",
            "wired-diam",
            "--depth",
            "5",
            "--n",
            "2000",
            "--bootstrap",
            "20",
            "-o",
            out,
        ]
    };
    for (t, o) in [("1", "one"), ("3", "three")] {
        let out = run(&args(t, o), dir.path());
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for f in ["samples.csv", "fit.csv"] {
        let a = std::fs::read(dir.path().join("one").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("three").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    assert!(dir.path().join("one/manifest.json").exists());
}
