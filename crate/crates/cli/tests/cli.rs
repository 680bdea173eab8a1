//! End-to-end command tests: file contracts, determinism, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hotspot"))
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hotspot-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Deterministic fixture: a stress scale jumping at t=50 and a sensing
/// series shifting mean and spread at t=55, from a tiny inline generator.
fn write_fixture(path: &Path) {
    let mut state: u64 = 0x9E3779B97F4A7C15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut text = String::from("t,stress,sensing\n");
    for t in 1..=100u32 {
        let u = next();
        let stress = if t <= 50 {
            1 + (u * 2.0) as u32 // codes 1-2
        } else {
            4 + (u * 2.0) as u32 // codes 4-5
        };
        let noise = next() - 0.5;
        let sensing = if t <= 55 {
            noise * 0.6
        } else {
            2.0 + noise * 1.6
        };
        text.push_str(&format!("{t},{stress},{sensing}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("command runs")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

const DETECT_ARGS: &[&str] = &[
    "detect",
    "--input",
    "data.csv",
    "--stress-col",
    "stress",
    "--sensing-col",
    "sensing",
    "--discrete",
    "--transform-seed",
    "11",
    "--bandwidth",
    "20",
    "--seed",
    "9",
    "--out",
    "out",
];

#[test]
fn detect_writes_traces_and_reports() {
    let dir = work_dir("detect");
    write_fixture(&dir.join("data.csv"));
    let output = run_in(&dir, DETECT_ARGS);
    assert_success(&output);

    for token in ["y", "x", "yx", "yx2", "y2x", "y2x2"] {
        assert!(dir.join(format!("out/trace_{token}.csv")).exists());
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("out/changepoints_{token}.json"))).unwrap(),
        )
        .unwrap();
        assert!(report["points"].is_array());
        assert_eq!(report["config"]["bandwidth"], 20);
        assert_eq!(report["config"]["seed"], 9);
    }
    assert!(dir.join("out/transform_record.json").exists());

    // The stress jump at 50 is unmissable with this fixture.
    let y: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("out/changepoints_y.json")).unwrap(),
    )
    .unwrap();
    let points: Vec<u64> = y["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(
        points.iter().any(|&p| (45..=55).contains(&p)),
        "stress change not localized: {points:?}"
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = work_dir("rerun-a");
    let dir_b = work_dir("rerun-b");
    write_fixture(&dir_a.join("data.csv"));
    write_fixture(&dir_b.join("data.csv"));
    assert_success(&run_in(&dir_a, DETECT_ARGS));
    assert_success(&run_in(&dir_b, DETECT_ARGS));
    for name in ["out/changepoints_y.json", "out/trace_yx2.csv"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn pinned_seed_output_matches_the_golden_file() {
    let dir = work_dir("golden");
    write_fixture(&dir.join("data.csv"));
    assert_success(&run_in(&dir, DETECT_ARGS));
    let got = std::fs::read_to_string(dir.join("out/changepoints_y.json")).unwrap();
    let golden = include_str!("golden/changepoints_y.json");
    assert_eq!(
        got, golden,
        "pinned-seed output drifted from the golden file"
    );
}

#[test]
fn bandwidth_too_large_fails_with_exit_code_one() {
    let dir = work_dir("широкий");
    let mut text = String::from("t,stress\n");
    for t in 1..=50 {
        text.push_str(&format!("{t},{}\n", 1 + t % 5));
    }
    std::fs::write(dir.join("data.csv"), text).unwrap();
    let output = run_in(
        &dir,
        &[
            "detect",
            "--input",
            "data.csv",
            "--stress-col",
            "stress",
            "--discrete",
            "--bandwidth",
            "40",
            "--out",
            "out",
        ],
    );
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("bandwidth too large"), "stderr: {stderr}");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let dir = work_dir("usage");
    let output = run_in(&dir, &["simulate", "--table", "5", "--out", "out"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_column_is_a_runtime_error() {
    let dir = work_dir("missing-col");
    std::fs::write(dir.join("data.csv"), "t,stress\n1,2\n2,3\n").unwrap();
    let output = run_in(
        &dir,
        &[
            "detect",
            "--input",
            "data.csv",
            "--stress-col",
            "anxiety",
            "--discrete",
            "--bandwidth",
            "1",
            "--out",
            "out",
        ],
    );
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("anxiety"));
}

#[test]
fn hotspot_ci_mode_reports_intervals_and_cis() {
    let dir = work_dir("hotspot-ci");
    write_fixture(&dir.join("data.csv"));
    let output = run_in(
        &dir,
        &[
            "hotspot",
            "--input",
            "data.csv",
            "--stress-col",
            "stress",
            "--sensing-col",
            "sensing",
            "--discrete",
            "--transform-seed",
            "11",
            "--bandwidth",
            "20",
            "--seed",
            "9",
            "--mode",
            "ci",
            "--boot-reps",
            "150",
            "--out",
            "out",
        ],
    );
    assert_success(&output);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/hotspots.json")).unwrap())
            .unwrap();
    assert_eq!(report["mode"], "ci");
    let intervals = report["hotspots"]["intervals"].as_array().unwrap();
    assert!(
        !intervals.is_empty(),
        "expected a hotspot near the joint change"
    );
    let anchor = report["changepoints"]
        .as_array()
        .unwrap()
        .iter()
        .find(|k| k["kind"] == "y")
        .unwrap();
    assert!(anchor["cis"].is_array());
    assert!(dir.join("out/shading.csv").exists());
}

#[test]
fn empty_detection_still_succeeds() {
    let dir = work_dir("empty");
    let mut text = String::from("t,stress,sensing\n");
    for t in 1..=100 {
        text.push_str(&format!("{t},5.0,1.0\n"));
    }
    std::fs::write(dir.join("data.csv"), text).unwrap();
    let output = run_in(
        &dir,
        &[
            "hotspot",
            "--input",
            "data.csv",
            "--stress-col",
            "stress",
            "--sensing-col",
            "sensing",
            "--bandwidth",
            "20",
            "--mode",
            "threshold",
            "--out",
            "out",
        ],
    );
    assert_success(&output);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/hotspots.json")).unwrap())
            .unwrap();
    assert_eq!(report["hotspots"]["intervals"].as_array().unwrap().len(), 0);
}

#[test]
fn threshold_cache_hits_on_the_second_run() {
    let dir = work_dir("cache");
    let args = &[
        "threshold-cache",
        "--n",
        "100",
        "--seed",
        "3",
        "--threshold-reps",
        "200",
        "--cache-dir",
        "cache",
    ];
    let first = run_in(&dir, args);
    assert_success(&first);
    assert!(String::from_utf8_lossy(&first.stdout).contains("(computed)"));
    let second = run_in(&dir, args);
    assert_success(&second);
    assert!(String::from_utf8_lossy(&second.stdout).contains("(cached)"));
    assert!(dir.join("cache/thresholds.json").exists());
}

#[test]
fn simulate_smoke_run_emits_a_grid() {
    let dir = work_dir("simulate");
    let output = run_in(
        &dir,
        &[
            "simulate",
            "--table",
            "1",
            "--replications",
            "5",
            "--threshold-reps",
            "100",
            "--bandwidths",
            "20",
            "--cases",
            "1,6",
            "--seed",
            "4",
            "--out",
            "out",
        ],
    );
    assert_success(&output);
    let grid = std::fs::read_to_string(dir.join("out/table1.csv")).unwrap();
    let data_lines: Vec<&str> = grid.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data_lines[0], "row,metric,case_1,case_6");
    // Three jump layouts, power and fdr rows each.
    assert_eq!(data_lines.len(), 1 + 6);
}

#[test]
fn illustrate_writes_the_full_bundle() {
    let dir = work_dir("illustrate");
    let output = run_in(
        &dir,
        &[
            "illustrate",
            "--scenario",
            "variance",
            "--seed",
            "7",
            "--boot-reps",
            "150",
            "--out",
            "out",
        ],
    );
    assert_success(&output);
    for name in [
        "data.csv",
        "stress_latent.csv",
        "transform_record.json",
        "trace_y.csv",
        "hotspots_threshold.json",
        "hotspots_ci.json",
        "shading_threshold.csv",
        "shading_ci.csv",
    ] {
        assert!(dir.join("out").join(name).exists(), "missing {name}");
    }
}
