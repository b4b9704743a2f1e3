use std::path::PathBuf;
use std::process::{Command, Output};

fn input(name: &str) -> String {
    format!("{}/inputs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn linkfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkfix"))
        .args(args)
        .env_remove("LINKFIX_SEED")
        .output()
        .expect("run linkfix")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn analyze_hexagon_and_star() {
    for (file, lk) in [
        ("hexagon.json", 1),
        ("hexagon_points.json", 1),
        ("star13.json", 2),
        ("perturbed.json", 1),
    ] {
        let out = linkfix(&["analyze", &input(file), "--json"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["linking"]["lk"], lk, "{file}");
        assert_eq!(v["exit_code"], 0);
        assert!(v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["passed"] == true));
    }
}

#[test]
fn text_report_has_json_block() {
    let out = linkfix(&["analyze", &input("star13.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lk = 2 mod 13"));
    let json = &text[text.find("\n{").unwrap()..];
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["faces"].as_array().unwrap().len(), 15);
}

#[test]
fn uncertified_composition_is_an_input_error() {
    let out = linkfix(&["analyze", &input("composition_uncertified.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not certified"), "{err}");
    assert!(err.contains("rotation k=1.732051"), "{err}");
}

#[test]
fn bad_inputs_exit_2() {
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{\"map\": 3}").unwrap();
    assert_eq!(
        linkfix(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        linkfix(&["analyze", "/nonexistent/input.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        linkfix(&["analyze", &input("hexagon.json"), "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(linkfix(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn half_turn_degenerates() {
    let out = linkfix(&[
        "analyze",
        &input("rotation_pi.json"),
        "--allow-uncertified",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let svg = tmp("pi.svg");
    let out = linkfix(&[
        "render",
        &input("rotation_pi.json"),
        "-o",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!svg.exists());
}

#[test]
fn half_turn_verify_is_informational() {
    assert_eq!(
        linkfix(&["verify", &input("rotation_pi.json")])
            .status
            .code(),
        Some(2)
    );
    let out = linkfix(&[
        "verify",
        &input("rotation_pi.json"),
        "--allow-uncertified",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let seg = &v["suites"][0];
    assert_eq!(seg["outcome"], "informational");
    assert!(seg["failures"].as_u64().unwrap() > 0);
}

#[test]
fn seed_env_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_linkfix"));
        c.args([
            "verify",
            &input("hexagon.json"),
            "--seed",
            seed,
            "--trials",
            "5",
            "--json",
        ]);
        match env {
            Some(s) => c.env("LINKFIX_SEED", s),
            None => c.env_remove("LINKFIX_SEED"),
        };
        c.output().unwrap()
    };
    let a = run(Some("7"), "1");
    let b = run(None, "7");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(run(Some("nope"), "1").status.code(), Some(2));
}

#[test]
fn render_matches_golden_files() {
    for name in ["hexagon", "star13"] {
        let out = tmp(&format!("{name}.svg"));
        let status = linkfix(&[
            "render",
            &input(&format!("{name}.json")),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(status.status.code(), Some(0));
        let got = std::fs::read_to_string(&out).unwrap();
        let want = std::fs::read_to_string(format!(
            "{}/tests/golden/{name}.svg",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        assert_eq!(got, want, "{name}.svg differs from the golden file");
    }
}

#[test]
fn star_render_labels_every_bounded_face() {
    let svg = std::fs::read_to_string(format!(
        "{}/tests/golden/star13.svg",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    assert_eq!(svg.matches("<polygon").count(), 14);
    assert_eq!(svg.matches("ω=").count(), 14);
    assert!(svg.starts_with("<?xml") && svg.contains(r#"version="1.1""#));
}
