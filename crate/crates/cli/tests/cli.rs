use std::process::{Command, Output};

fn sector_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sector-lab")).args(args).env_remove("SECTOR_LAB_OUT").output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn presets_are_listed() {
    let out = sector_lab(&["presets"]);
    assert!(out.status.success());
    let names: Vec<String> =
        stdout_json(&out).as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap().to_string()).collect();
    for wanted in ["ab-circle", "identical-particles-s3", "von-neumann-uniqueness", "free-group-holes"] {
        assert!(names.iter().any(|n| n == wanted), "{wanted}");
    }
}

#[test]
fn build_round_trips_through_pi1() {
    let dir = tempfile::tempdir().unwrap();
    let out = sector_lab(&["build", "--preset", "grid:4x4:holes=1,1,1,1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let file = dir.path().join("complex.txt");
    let out = sector_lab(&["pi1", file.to_str().unwrap()]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["generators"].as_array().unwrap().len(), 1);
    assert_eq!(report["backend_guess"], "free(1)");
}

#[test]
fn spectrum_csv_matches_the_closed_form() {
    let out = sector_lab(&["spectrum", "cycle:8", "--rep", "theta:0.25", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue,multiplicity"));
    let got: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let mut expected: Vec<f64> =
        (0..8).map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * (k as f64 + 0.25) / 8.0).cos()).collect();
    expected.sort_by(f64::total_cmp);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() < 1e-10);
    }
}

#[test]
fn run_writes_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sector-lab"))
        .args(["run", "identical-particles-s3"])
        .env("SECTOR_LAB_OUT", d)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = std::fs::read(dir.path().join("summary.json")).unwrap();
    assert!(dir.path().join("spectra.csv").exists());
    let out = sector_lab(&["run", "identical-particles-s3", "--out", d]);
    assert!(out.status.success());
    assert_eq!(first, std::fs::read(dir.path().join("summary.json")).unwrap());
}

#[test]
fn failed_assertions_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(
        &path,
        "name = \"wrong\"\n[complex]\nkind = \"cycle\"\nn = 6\n[[steps]]\nstep = \"amenability\"\nexpect_amenable = false\n",
    )
    .unwrap();
    let out = sector_lab(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], false);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "name = \"x\"\n[complex]\nkind = \"moebius\"\n").unwrap();
    for args in [
        vec!["run", path.to_str().unwrap()],
        vec!["run", "no-such-preset"],
        vec!["spectrum", "cycle:8", "--rep", "irrep:0"],
        vec!["pi1", "torus:3"],
        vec!["nonl2", "present:a,b;", "--rep", "trivial"],
        vec!["frobnicate"],
    ] {
        let out = sector_lab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn group_commands_report() {
    let out = sector_lab(&["decompose", "present:a,b;a2,b2,(ab)3"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["group_order"], 6);

    let out = sector_lab(&["amenability", "present:a,b;", "--radii", "3,5"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["amenable"], false);
    assert_eq!(report["estimates"].as_array().unwrap().len(), 2);

    let out = sector_lab(&["nonl2", "present:a,b;a2,b2,(ab)3", "--rep", "irrep:2", "--form", "trace"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["quotient_dim"], 4);

    let out = sector_lab(&["cover", "present:a,b;", "--radius", "3", "--k", "4"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["covering_defects"], 0);
    assert_eq!(report["elements"], 53);

    let out = sector_lab(&["holonomy", "cycle:8", "--rep", "theta:0.5", "--check", "cocycle,ls"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["passed"], true);
}
