use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quadrange::geometry::{Membership, MembershipVerdict};
use quadrange::report::{to_canonical_json, AnalysisReport};
use tempfile::TempDir;

const CIRCLE: &str =
    r#"{"a":[0,0],"b":[2,0],"c":[-1,0],"model":{"type":"matrix","rows":1,"cols":1,"entries":[[1,0]]}}"#;
const CIRCLE_NOT_ATTAINED: &str = r#"{"a":[0,0],"b":[2,0],"c":[-1,0],"model":{"type":"diagonal","values":[0,0.5,0.75,0.9],"sup":1,"sup_attained":false}}"#;
const SEGMENT: &str =
    r#"{"a":[0,0],"b":[2,0],"c":[1,0],"model":{"type":"matrix","rows":1,"cols":1,"entries":[[1,0]]}}"#;

fn quadrange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadrange"))
        .args(args)
        .env_remove("QUADRANGE_CONFIG")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn analyze_is_deterministic_and_canonical() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "circle.json", CIRCLE);
    let first = quadrange(&["analyze", arg(&model)]);
    let second = quadrange(&["analyze", arg(&model)]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    let parsed: AnalysisReport = serde_json::from_str(text.trim_end()).unwrap();
    assert_eq!(to_canonical_json(&parsed).unwrap(), text.trim_end());
    assert!(parsed.region.is_closed());
    assert!(text.contains(r#""union_case":"interior_plus_ab","union_case_hypothetical":true"#));
}

#[test]
fn member_on_non_attaining_model() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "open.json", CIRCLE_NOT_ATTAINED);
    let verdict = |z: &str| {
        let out = quadrange(&["member", arg(&model), "--z", z]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        serde_json::from_str::<MembershipVerdict>(stdout(&out).trim_end()).unwrap().value
    };
    assert_eq!(verdict("2,0"), Membership::OnBoundaryIncluded);
    assert_eq!(verdict("1,1"), Membership::OnBoundaryExcluded);
    assert_eq!(verdict("1,-0.5"), Membership::Inside);
    assert_eq!(verdict("-1,0"), Membership::Outside);
}

#[test]
fn decompose_reports_impossibility() {
    let dir = TempDir::new().unwrap();
    let out = quadrange(&["decompose", arg(&write(&dir, "c.json", CIRCLE))]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with(r#"{"outcome":"impossible""#), "{text}");

    let out = quadrange(&["decompose", arg(&write(&dir, "s.json", SEGMENT))]);
    assert!(stdout(&out).contains(r#""case_tag":"scalar_case2""#));
}

#[test]
fn boundary_csv() {
    let dir = TempDir::new().unwrap();
    let out = quadrange(&["boundary", arg(&write(&dir, "c.json", CIRCLE)), "--n", "4"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "re,im");
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1], "2,0");
}

#[test]
fn verify_passes_and_exports_cloud() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "c.json", CIRCLE);
    let cloud = dir.path().join("cloud.csv");
    let out = quadrange(&[
        "verify",
        arg(&model),
        "--samples",
        "500",
        "--angles",
        "90",
        "--seed",
        "4",
        "--cloud",
        arg(&cloud),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains(r#""passed":true"#));
    assert_eq!(std::fs::read_to_string(&cloud).unwrap().lines().count(), 501);
}

#[test]
fn numerical_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    let model = write(
        &dir,
        "r.json",
        r#"{"a":[0.3,1.1],"b":[-0.7,0.2],"c":[0.4,-0.9],"model":{"type":"matrix","rows":3,"cols":3,"entries":[[1,0.5],[0.2,-1],[0,1.5],[0.3,0.3],[1,1],[2,0],[0,0.1],[0.5,0.5],[1,-2]]}}"#,
    );
    let out = quadrange(&["--max-sweeps", "1", "analyze", arg(&model)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
    assert!(quadrange(&["analyze", arg(&model)]).status.success());
}

#[test]
fn malformed_input_exits_two_with_location() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"a\":[0,0],\n\"b\": oops}");
    let out = quadrange(&["analyze", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json:2:"), "{err}");

    let spectrum = write(
        &dir,
        "spectrum.json",
        r#"{"a":[0,0],"b":[0,0],"c":[0,0],"model":{"type":"diagonal","values":[2],"sup":1,"sup_attained":false}}"#,
    );
    assert_eq!(quadrange(&["analyze", arg(&spectrum)]).status.code(), Some(2));
    assert_eq!(quadrange(&["analyze", "/nonexistent/model.json"]).status.code(), Some(2));
    assert_eq!(quadrange(&["member", arg(&spectrum), "--z", "1"]).status.code(), Some(2));
    assert_eq!(quadrange(&["frobnicate"]).status.code(), Some(2));

    let open = write(&dir, "open.json", CIRCLE_NOT_ATTAINED);
    assert_eq!(quadrange(&["verify", arg(&open)]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "c.json", CIRCLE);
    let config = write(&dir, "q.toml", "seed = 11\nsamples = 300\nangles = 30\n");
    let via_file = quadrange(&["--config", arg(&config), "verify", arg(&model)]);
    let text = stdout(&via_file);
    assert!(text.contains(r#""samples":300,"angles":30,"seed":11"#), "{text}");

    let overridden = quadrange(&["--config", arg(&config), "verify", arg(&model), "--seed", "12"]);
    assert!(stdout(&overridden).contains(r#""seed":12"#));

    let via_env = Command::new(env!("CARGO_BIN_EXE_quadrange"))
        .args(["verify", arg(&model)])
        .env("QUADRANGE_CONFIG", &config)
        .output()
        .unwrap();
    assert!(stdout(&via_env).contains(r#""samples":300"#));

    let broken = write(&dir, "broken.toml", "[tolerances]\neq_tol = -1\n");
    assert_eq!(quadrange(&["--config", arg(&broken), "analyze", arg(&model)]).status.code(), Some(2));
}

fn region_paths(svg: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants()
        .filter(|n| n.tag_name().name() == "path")
        .count()
}

#[test]
fn plot_writes_well_formed_svg() {
    let dir = TempDir::new().unwrap();
    for (name, body, samples) in [
        ("circle", CIRCLE, "200"),
        ("open", CIRCLE_NOT_ATTAINED, "0"),
        ("segment", SEGMENT, "50"),
    ] {
        let model = write(&dir, &format!("{name}.json"), body);
        let svg_path = dir.path().join(format!("{name}.svg"));
        let out = quadrange(&["plot", arg(&model), "--out", arg(&svg_path), "--samples", samples]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let svg = std::fs::read_to_string(&svg_path).unwrap();
        assert_eq!(region_paths(&svg), 1, "{name}");
    }
}

#[test]
fn selftest_passes() {
    let out = quadrange(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains(", 0 failed"));
}
