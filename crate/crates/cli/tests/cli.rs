//! End-to-end tests of the binary: formats, exit codes, manifest ingestion,
//! and the byte-level determinism gate across runs and thread counts.

use std::io::Write;
use std::process::{Command, Output};

fn flatspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatspec"))
        .args(args)
        .env_remove("FLATSPEC_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn catalog_counts_match_the_dual_descriptions() {
    let out = flatspec(&["catalog", "--n", "3", "--weight-bound", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out).lines().count(), 4);

    let out = flatspec(&["catalog", "--n", "2", "--weight-bound", "0"]);
    assert_eq!(stdout_of(&out).lines().count(), 2);

    // O(1) has exactly the trivial and determinant characters
    let out = flatspec(&["catalog", "--n", "1", "--weight-bound", "5"]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("tau[1;();+1] dim=1"));
    assert!(text.contains("tau[1;();-1] dim=1"));
}

#[test]
fn branch_prints_both_embeddings() {
    let out = flatspec(&["branch", "--n", "3", "--weight", "2", "--delta", "1"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(
        text.lines()
            .filter(|l| l.trim_start().starts_with("tau[2;"))
            .count(),
        6,
        "three constituents per embedding:\n{text}"
    );

    let out = flatspec(&["branch", "--n", "4", "--weight", "1,1", "--delta", "0"]);
    let text = stdout_of(&out);
    assert!(text.contains("tau[3;(1);+1]"));
    assert!(text.contains("tau[3;(1);-1]"));
}

#[test]
fn character_command_evaluates_reflections() {
    let out = flatspec(&[
        "character",
        "--n",
        "3",
        "--weight",
        "1",
        "--delta",
        "-1",
        "--matrix",
        "-1,0,0;0,-1,0;0,0,-1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("character of tau[3;(1);-1]: -3.0000000000"), "{text}");
}

#[test]
fn spectrum_zero_cutoff_keeps_the_zero_row() {
    let out = flatspec(&[
        "spectrum", "--group", "torus-z2", "--weight", "0", "--delta", "1", "--nu-max", "0",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("nu_num"))
        .collect();
    assert_eq!(data_rows, vec!["0,1,0.000000000000e0,1"]);
}

#[test]
fn spectrum_json_embeds_provenance_and_cutoffs() {
    let out = flatspec(&[
        "spectrum", "--group", "klein-bottle", "--weight", "0", "--delta", "1", "--nu-max",
        "4", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["group"], "klein-bottle");
    assert_eq!(v["nu_max"], "4");
    assert_eq!(v["convention"], "A");
    assert!(v["manifest_sha256"].as_str().unwrap().len() == 64);
    assert_eq!(v["entries"][0]["nu"], "0");
    assert_eq!(v["entries"][0]["multiplicity"], 1);
    assert_eq!(v["entries"][1]["multiplicity"], 1);
}

#[test]
fn compare_exit_codes_and_consistency() {
    let out = flatspec(&[
        "compare", "--group1", "torus-z2", "--group2", "klein-bottle", "--nu-max", "3",
        "--weight-bound", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["representation_equivalent"], false);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["witness"]["pi"]["type"], "tau");

    let out = flatspec(&[
        "compare", "--group1", "torus-z2", "--group2", "torus-z2", "--nu-max", "3",
        "--weight-bound", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = flatspec(&[
        "compare", "--group1", "torus-z2", "--group2", "no-such-group", "--nu-max", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manifest_groups_resolve_in_both_coordinate_systems() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("groups.json");
    let manifest = r#"{
      "version": "1",
      "groups": {
        "my-klein": {
          "n": 2,
          "basis": [["1", "0"], ["0", "1"]],
          "generators": [
            {"matrix": [["1", "0"], ["0", "-1"]], "coords": "ambient", "translation": ["1/2", "0"]}
          ]
        },
        "stretched-torus": {
          "n": 2,
          "basis": [["2", "0"], ["0", "1/2"]],
          "generators": []
        }
      },
      "jobs": [
        {"command": "spectrum", "groups": ["my-klein"], "nu_max": "4"}
      ]
    }"#;
    std::fs::File::create(&path)
        .unwrap()
        .write_all(manifest.as_bytes())
        .unwrap();
    let p = path.to_str().unwrap();

    // the manifest Klein bottle is isospectral to the preset one
    let from_manifest = flatspec(&[
        "spectrum", "--manifest", p, "--group", "my-klein", "--weight", "0", "--delta", "1",
        "--nu-max", "6",
    ]);
    assert!(from_manifest.status.success());
    let preset = flatspec(&[
        "spectrum", "--group", "klein-bottle", "--weight", "0", "--delta", "1", "--nu-max",
        "6",
    ]);
    let strip = |s: &Output| {
        stdout_of(s)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&from_manifest), strip(&preset));

    let rect = flatspec(&[
        "spectrum", "--manifest", p, "--group", "stretched-torus", "--weight", "0", "--delta",
        "1", "--nu-max", "1",
    ]);
    assert!(stdout_of(&rect).contains("1,4,")); // the nu = 1/4 row

    // rational cutoffs are exact: 9/4 includes the nu = 9/4 shell, 2 does not
    let tight = flatspec(&[
        "spectrum", "--manifest", p, "--group", "stretched-torus", "--weight", "0", "--delta",
        "1", "--nu-max", "9/4",
    ]);
    assert!(stdout_of(&tight).contains("9,4,"));
    let below = flatspec(&[
        "spectrum", "--manifest", p, "--group", "stretched-torus", "--weight", "0", "--delta",
        "1", "--nu-max", "2",
    ]);
    assert!(!stdout_of(&below).contains("9,4,"));

    // unknown job group names are rejected
    let bad = manifest.replace("\"my-klein\"]", "\"missing\"]");
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad).unwrap();
    let out = flatspec(&[
        "spectrum", "--manifest", bad_path.to_str().unwrap(), "--group", "my-klein",
        "--weight", "0", "--delta", "1", "--nu-max", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reconstruct_reports_a_green_round_trip() {
    let out = flatspec(&[
        "reconstruct", "--group", "halfturn-3", "--weight-bound", "2", "--nu-max", "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["round_trip"]["ok"], true);
    assert!(v["round_trip"]["bundles_checked"].as_u64().unwrap() >= 6);
}

#[test]
fn presets_emit_a_manifest_that_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("presets.json");
    let out = flatspec(&["presets", "--emit-manifest"]);
    assert!(out.status.success());
    std::fs::write(&path, stdout_of(&out)).unwrap();
    let through_manifest = flatspec(&[
        "spectrum", "--manifest", path.to_str().unwrap(), "--group", "hantzsche-wendt",
        "--weight", "1", "--delta", "-1", "--nu-max", "4",
    ]);
    assert!(through_manifest.status.success());
    let direct = flatspec(&[
        "spectrum", "--group", "hantzsche-wendt", "--weight", "1", "--delta", "-1", "--nu-max",
        "4",
    ]);
    let strip = |s: &Output| {
        stdout_of(s)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&through_manifest), strip(&direct));
}

/// Acceptance criterion 8: spectrum and compare outputs are byte-identical
/// across repeated runs and across --threads ∈ {1, 4}.
#[test]
fn acceptance_criterion_8_byte_determinism() {
    let spectrum_args = [
        "spectrum", "--group", "z2xz2-4d", "--weight", "1,1", "--delta", "0", "--nu-max", "8",
        "--format", "json",
    ];
    let compare_args = [
        "compare", "--group1", "halfturn-3", "--group2", "hantzsche-wendt", "--nu-max", "5",
        "--weight-bound", "2", "--format", "json",
    ];
    for (base, expect_code) in [(&spectrum_args[..], 0), (&compare_args[..], 1)] {
        let mut outputs = Vec::new();
        for threads in ["1", "1", "4", "4"] {
            let mut args = vec!["--threads", threads];
            args.extend_from_slice(base);
            let out = flatspec(&args);
            assert_eq!(out.status.code(), Some(expect_code), "{base:?}");
            outputs.push(out.stdout);
        }
        assert!(
            outputs.windows(2).all(|w| w[0] == w[1]),
            "outputs differ across runs or thread counts for {base:?}"
        );
    }
    println!("acceptance criterion 8 (CLI byte determinism across runs and threads): PASS");
}

#[test]
fn compare_names_the_first_distinguishing_bundle() {
    // the flat Laplacian itself already separates these two
    let out = flatspec(&[
        "compare", "--group1", "klein-bottle", "--group2", "torus-z2", "--nu-max", "2",
        "--weight-bound", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["first_distinguishing_tau"]["weight"][0], 0);
    assert_eq!(v["first_distinguishing_tau"]["delta"], 1);
    assert_eq!(v["per_tau"][0]["first_mismatch"]["nu"], "1");
    assert_eq!(v["per_tau"][0]["first_mismatch"]["d1"], 1);
    assert_eq!(v["per_tau"][0]["first_mismatch"]["d2"], 4);
}

#[test]
fn search_reruns_are_byte_identical() {
    let args = [
        "search", "--n", "2", "--max-point-group", "4", "--denominator", "2", "--nu-max",
        "4", "--weight-bound", "2", "--cap", "1000",
    ];
    let a = flatspec(&args);
    let b = flatspec(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&a)).unwrap();
    assert!(v["valid_groups"].as_u64().unwrap() >= 2);
    // reported groups carry full manifest data, so verdicts are reproducible
    assert!(v["groups"].as_object().unwrap().values().all(|g| g["basis"].is_array()));
}

#[test]
fn search_pairs_are_reproducible_from_the_emitted_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("search.json");
    let out = flatspec(&[
        "search", "--n", "3", "--max-point-group", "4", "--denominator", "2", "--nu-max",
        "2", "--weight-bound", "1", "--cap", "60000", "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    if pairs.is_empty() {
        return; // nothing reported at these cutoffs; determinism is covered elsewhere
    }
    // turn the reported groups into a manifest and re-run the comparison
    let manifest = serde_json::json!({
        "version": "1",
        "groups": v["groups"],
    });
    let man_path = dir.path().join("searched.json");
    std::fs::write(&man_path, serde_json::to_string(&manifest).unwrap()).unwrap();
    let pair = &pairs[0];
    let cmp = flatspec(&[
        "compare",
        "--manifest",
        man_path.to_str().unwrap(),
        "--group1",
        pair["left"].as_str().unwrap(),
        "--group2",
        pair["right"].as_str().unwrap(),
        "--nu-max",
        "2",
        "--weight-bound",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(cmp.status.code(), Some(1), "reported pair must stay distinguished");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&cmp)).unwrap();
    // the trivial bundles agree (same bucket), some higher bundle differs
    assert_eq!(report["per_tau"][0]["isospectral"], true);
    assert_eq!(report["all_tau_isospectral"], false);
}

#[test]
fn groups_of_unequal_dimension_cannot_be_compared() {
    let out = flatspec(&[
        "compare", "--group1", "torus-z2", "--group2", "torus-z3", "--nu-max", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn irrational_basis_entries_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hex.json");
    let manifest = r#"{
      "version": "1",
      "groups": {
        "hexagonal": {
          "n": 2,
          "basis": [["1", "0"], ["0.5", "0.8660254"], ["sqrt(3)/2", "1"]],
          "generators": []
        }
      }
    }"#;
    std::fs::write(&path, manifest).unwrap();
    let out = flatspec(&[
        "spectrum", "--manifest", path.to_str().unwrap(), "--group", "hexagonal", "--weight",
        "0", "--delta", "1", "--nu-max", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn character_cache_directory_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("memo");
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_flatspec"))
            .args(args)
            .env("FLATSPEC_CACHE", &cache)
            .output()
            .expect("binary runs")
    };
    let args = [
        "spectrum", "--group", "hantzsche-wendt", "--weight", "2", "--delta", "1", "--nu-max",
        "6",
    ];
    let first = run(&args);
    assert!(first.status.success());
    assert!(cache.join("characters.json").exists());
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout, "cached run must not change bytes");
}
