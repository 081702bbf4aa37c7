use std::path::Path;
use std::process::{Command, Output};

fn tspforge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tspforge"))
        .current_dir(dir)
        .env_remove("TSPFORGE_SEED")
        .args(args)
        .output()
        .expect("run tspforge")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = tspforge(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

const SQUARE: &str = "NAME : square\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\n3 1 0\n4 0 1\nEOF\n";

#[test]
fn gen_random_is_reproducible_and_named_by_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["gen-random", "--count", "1", "--seed", "31", "--out", "a"],
    );
    ok(
        dir.path(),
        &["gen-random", "--count", "1", "--seed", "31", "--out", "b"],
    );
    let a = read(dir.path().join("a/rand_31_0.tsp"));
    assert_eq!(a, read(dir.path().join("b/rand_31_0.tsp")));
    assert!(a.contains("master_seed=31"));
    assert!(a.contains(&format!("tspforge {}", tspforge::VERSION)));
}

#[test]
fn three_city_instances_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen-random",
            "--count",
            "2",
            "--cities",
            "3",
            "--seed",
            "1",
            "--out",
            "r",
        ],
    );
    ok(dir.path(), &["solve", "--out", "s.csv", "r"]);
    assert_eq!(data_rows(&read(dir.path().join("s.csv"))).len(), 2);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tspforge"))
        .current_dir(dir.path())
        .env("TSPFORGE_SEED", "404")
        .args(["gen-random", "--cities", "5", "--out", "r"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("r/rand_404_0.tsp").exists());
}

#[test]
fn solving_the_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("square.tsp"), SQUARE).unwrap();
    for variant in ["clk", "lk-cc"] {
        ok(
            dir.path(),
            &[
                "solve",
                "--variant",
                variant,
                "--seeds",
                "2",
                "--out",
                "s.csv",
                "square.tsp",
            ],
        );
        let first = read(dir.path().join("s.csv"));
        let rows = data_rows(&first);
        assert_eq!(rows.len(), 2);
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields[0], "square");
            assert_eq!(fields[3], "4");
        }
        ok(
            dir.path(),
            &[
                "solve",
                "--variant",
                variant,
                "--seeds",
                "2",
                "--out",
                "s.csv",
                "square.tsp",
            ],
        );
        assert_eq!(first, read(dir.path().join("s.csv")));
    }
}

#[test]
fn malformed_instance_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SQUARE.replace("2 1 1", "2 1 x");
    std::fs::write(dir.path().join("bad.tsp"), bad).unwrap();
    let out = tspforge(dir.path(), &["solve", "--out", "s.csv", "bad.tsp"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 7"), "{err}");
}

#[test]
fn missing_inputs_are_all_listed() {
    let dir = tempfile::tempdir().unwrap();
    let out = tspforge(dir.path(), &["cluster", "--out", "c", "nope1.tsp", "nope2"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nope1.tsp") && err.contains("nope2"), "{err}");
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"solver": {"max_dpeth": 3}}"#).unwrap();
    let out = tspforge(
        dir.path(),
        &["solve", "--config", "c.json", "--out", "s.csv", "x.tsp"],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_dpeth"));

    std::fs::write(
        dir.path().join("e.json"),
        r#"{"ea": {"population_size": 10}}"#,
    )
    .unwrap();
    let out = tspforge(dir.path(), &["evolve", "--config", "e.json", "--out", "o"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("offspring_per_generation"));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("g.json"),
        r#"{"count": 3, "n_cities": 7, "master_seed": 5}"#,
    )
    .unwrap();
    ok(
        dir.path(),
        &[
            "gen-random",
            "--config",
            "g.json",
            "--count",
            "2",
            "--out",
            "r",
        ],
    );
    let names: Vec<_> = std::fs::read_dir(dir.path().join("r")).unwrap().collect();
    assert_eq!(names.len(), 2);
    assert!(read(dir.path().join("r/rand_5_1.tsp")).contains("DIMENSION : 7"));
}

#[test]
fn zero_generation_evolve_emits_valid_records() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "evolve",
            "--generations",
            "0",
            "--cities",
            "10",
            "--population",
            "4",
            "--seed",
            "2",
            "--out",
            "o",
        ],
    );
    let doc: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("o/run_000.json"))).unwrap();
    assert_eq!(doc["meta"]["master_seed"], 2);
    assert_eq!(doc["generations"].as_array().unwrap().len(), 1);
    assert_eq!(doc["solver_invocations"], 4);
    let evolved = read(dir.path().join("o/evolved/run_000.tsp"));
    assert!(evolved.starts_with("NAME : clk_evolved_000"));
}

#[test]
fn evolve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        ok(
            dir.path(),
            &[
                "evolve",
                "--runs",
                "2",
                "--generations",
                "2",
                "--cities",
                "10",
                "--population",
                "4",
                "--variant",
                "lk-cc",
                "--out",
                out,
            ],
        );
    }
    for f in [
        "run_000.json",
        "run_001.json",
        "run_001_fitness.csv",
        "evolved/run_001.tsp",
    ] {
        assert_eq!(
            read(dir.path().join("a").join(f)),
            read(dir.path().join("b").join(f)),
            "{f}"
        );
    }
}

#[test]
fn exact_matches_known_optimum() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("square.tsp"), SQUARE).unwrap();
    ok(dir.path(), &["exact", "--out", "e.csv", "square.tsp"]);
    let csv = read(dir.path().join("e.csv"));
    assert_eq!(data_rows(&csv), vec!["square,4,brute-force,4,0 2 1 3"]);
}

#[test]
fn one_blob_sweeps_to_a_single_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from(
        "NAME : blob\nTYPE : TSP\nDIMENSION : 25\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n",
    );
    for k in 0..25 {
        text += &format!("{} {} {}\n", k + 1, 200 + k % 5, 200 + k / 5);
    }
    text += "EOF\n";
    std::fs::write(dir.path().join("blob.tsp"), text).unwrap();
    ok(dir.path(), &["cluster", "--out", "c", "blob.tsp"]);
    let agg = read(dir.path().join("c/aggregate.csv"));
    assert!(data_rows(&agg).contains(&"1,71"), "{agg}");
    assert_eq!(
        data_rows(&read(dir.path().join("c/per_instance.csv"))).len(),
        71
    );
}

#[test]
fn analyze_and_report() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen-random",
            "--count",
            "3",
            "--cities",
            "9",
            "--seed",
            "1",
            "--out",
            "a",
        ],
    );
    ok(
        dir.path(),
        &[
            "gen-random",
            "--count",
            "3",
            "--cities",
            "9",
            "--seed",
            "2",
            "--out",
            "b",
        ],
    );
    ok(
        dir.path(),
        &["analyze", "--set", "a=a", "--set", "b=b", "--out", "an"],
    );
    for f in [
        "analysis.json",
        "swap.csv",
        "orderings.csv",
        "gaps.csv",
        "pairwise_a.csv",
        "segments_b.csv",
    ] {
        assert!(dir.path().join("an").join(f).exists(), "{f}");
    }
    let swap = read(dir.path().join("an/swap.csv"));
    assert_eq!(data_rows(&swap).len(), 4);

    let out = tspforge(
        dir.path(),
        &[
            "analyze",
            "--set",
            "a=a",
            "--tour-source",
            "exact",
            "--out",
            "x",
        ],
    );
    assert!(out.status.success());

    ok(dir.path(), &["report", "--out", "bundle.json", "an"]);
    let bundle: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("bundle.json"))).unwrap();
    assert!(bundle["artifacts"]["an/analysis.json"]["swap"].is_object());
    assert_eq!(bundle["artifacts"]["an/swap.csv"]["header"][0], "set");
}

#[test]
fn analyze_rejects_exact_tours_for_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["gen-random", "--count", "1", "--cities", "25", "--out", "a"],
    );
    let out = tspforge(
        dir.path(),
        &[
            "analyze",
            "--set",
            "a=a",
            "--tour-source",
            "exact",
            "--out",
            "x",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn report_over_an_empty_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("empty")).unwrap();
    let out = tspforge(dir.path(), &["report", "--out", "r.json", "empty"]);
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&tspforge(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&tspforge(dir.path(), &["--version"])), 0);
}
