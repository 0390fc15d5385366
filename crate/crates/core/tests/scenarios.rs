use sector_lab::error::Error;
use sector_lab::scenario::{list_presets, preset, run, Scenario};

#[test]
fn every_preset_passes() {
    for p in list_presets() {
        let out = run(&p.scenario().unwrap()).unwrap();
        let failed: Vec<_> = out.assertions.iter().filter(|a| !a.passed).map(|a| &a.name).collect();
        assert!(out.passed, "{}: {failed:?}", p.name);
        assert!(!out.assertions.is_empty());
    }
}

#[test]
fn assertions_record_their_oracle() {
    let out = run(&preset("identical-particles-s3").unwrap()).unwrap();
    for a in &out.assertions {
        assert!(["closed-form", "brute-force", "cross-module"].contains(&a.oracle.as_str()), "{}", a.name);
    }
    let names: Vec<&str> = out.assertions.iter().map(|a| a.name.as_str()).collect();
    for wanted in ["cover.multiset-identity", "cover.conjugacy", "particles.sum-of-squares", "nonl2.quotient-dim"] {
        assert!(names.contains(&wanted), "{wanted}");
    }
}

#[test]
fn free_group_holes_is_non_amenable() {
    let out = run(&preset("free-group-holes").unwrap()).unwrap();
    let summary = out.summary();
    let steps = summary["steps"].as_array().unwrap();
    let amen = steps.iter().find(|s| s["step"] == "amenability").unwrap();
    assert_eq!(amen["report"]["amenable"], false);
    assert_eq!(amen["report"]["backend"], "free(2)");
}

#[test]
fn ab_circle_csv_has_sixteen_closed_form_spectra() {
    let out = run(&preset("ab-circle").unwrap()).unwrap();
    let sweep: Vec<_> = out.spectra.iter().filter(|r| r.label == "sweep").collect();
    assert_eq!(sweep.len(), 16 * 8);
    for k in 0..16 {
        let theta = k as f64 / 16.0;
        let mut expected: Vec<f64> = (0..8)
            .map(|j| 2.0 - 2.0 * (std::f64::consts::TAU * (j as f64 + theta) / 8.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        let got: Vec<f64> = sweep.iter().filter(|r| r.theta == Some(theta)).map(|r| r.value).collect();
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-10, "theta {theta}: {g} vs {e}");
        }
    }
}

#[test]
fn failing_expectations_fail_the_run() {
    let text = r#"
name = "wrong"
reps = ["theta:0.25"]
[complex]
kind = "cycle"
n = 6
[[steps]]
step = "amenability"
expect_amenable = false
"#;
    let out = run(&Scenario::from_toml(text).unwrap()).unwrap();
    assert!(!out.passed);
    assert!(out.assertions.iter().any(|a| a.name == "amenability.verdict" && !a.passed));
}

#[test]
fn configuration_errors_are_rejected_before_running() {
    let base = "name = \"x\"\n[complex]\nkind = \"cycle\"\nn = 6\n";
    let bad_rep = "name = \"x\"\nreps = [\"irrep:0\"]\n[complex]\nkind = \"cycle\"\nn = 6\n";
    assert!(matches!(run(&Scenario::from_toml(bad_rep).unwrap()), Err(Error::UnsupportedGroup(_))));
    let infinite_cover = format!("{base}[[steps]]\nstep = \"cover-decompose\"\n");
    assert!(run(&Scenario::from_toml(&infinite_cover).unwrap()).is_err());
    let bad_form = format!("{base}[[steps]]\nstep = \"nonl2\"\nrep = \"trivial\"\nform = \"weird\"\nsupport_radius = 2\n");
    assert!(matches!(run(&Scenario::from_toml(&bad_form).unwrap()), Err(Error::InvalidParameter(_))));
}

#[test]
fn scenario_files_resolve_complex_paths() {
    let dir = tempfile::tempdir().unwrap();
    let complex = "[vertices]\na\nb\nc\n[edges]\nab a b\nbc b c\nca c a\n[faces]\n";
    std::fs::write(dir.path().join("tri.txt"), complex).unwrap();
    let scenario = "name = \"tri\"\nreps = [\"theta:0.5\"]\n[complex]\nkind = \"file\"\npath = \"tri.txt\"\n[[steps]]\nstep = \"pi1\"\n[[steps]]\nstep = \"holonomy-checks\"\n";
    let path = dir.path().join("tri.toml");
    std::fs::write(&path, scenario).unwrap();
    let out = run(&Scenario::from_file(&path).unwrap()).unwrap();
    assert!(out.passed);
    let written = out.write(&dir.path().join("out")).unwrap();
    assert_eq!(written.len(), 1);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&written[0]).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "tri");
    assert_eq!(summary["info"]["vertices"], 3);
}

#[test]
fn summaries_have_sorted_keys() {
    let out = run(&preset("ab-circle").unwrap()).unwrap();
    let json = out.summary_json().unwrap();
    let top: Vec<&str> = json
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort_unstable();
    assert_eq!(top, sorted);
}
