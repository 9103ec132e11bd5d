use std::process::{Command, Output};

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse"))
        .args(args)
        .env_remove("HASSE_CACHE_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn certify_selmer_exits_zero_with_certificate() {
    let o = hasse(&["certify", "--a", "3", "--b", "4", "--c", "5", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["everywhere"], true);
    assert_eq!(v["result"]["primes"].as_array().unwrap().len(), 34);
    assert_eq!(v["config"]["command"]["subcommand"], "certify");
    assert!(v["version"].is_string());
}

#[test]
fn insoluble_local_verdict_exits_one() {
    let o = hasse(&["local", "--a", "2", "--b", "151", "--k", "3", "--p", "151"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["soluble"], false);
}

#[test]
fn negative_coefficients_parse() {
    let o = hasse(&[
        "local", "--a", "431", "--b", "-107", "--k", "3", "--p", "3", "--format", "text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("431x^3 - 107y^3 = 1: soluble at p = 3"));
    let o = hasse(&["abc-quality", "--u", "1", "--v", "8", "--w", "-9"]);
    assert_eq!(stdout(&o), "1.226294\n");
}

#[test]
fn count_quadruples_prints_one() {
    let o = hasse(&[
        "count-quadruples",
        "--k",
        "3",
        "--X",
        "2",
        "--Y",
        "1",
        "--Z",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hasse(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        hasse(&["certify", "--a", "3", "--b", "4", "--k", "3", "--nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hasse(&["certify", "--a", "0", "--b", "4", "--k", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hasse(&["census-thue", "--k", "3", "--H", "600"])
            .status
            .code(),
        Some(2)
    );
    // numbers are plain decimal
    assert_eq!(
        hasse(&[
            "count-quadruples",
            "--k",
            "3",
            "--X",
            "2e0",
            "--Y",
            "1",
            "--Z",
            "64"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn budget_errors_exit_two() {
    let o = hasse(&[
        "local",
        "--a",
        "1",
        "--b",
        "1",
        "--k",
        "4",
        "--p",
        "97",
        "--strategy",
        "exhaustive",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn search_reports_solutions_and_absence() {
    let o = hasse(&[
        "search", "--a", "3", "--b", "4", "--k", "3", "--bound", "10",
    ]);
    assert_eq!(
        (o.status.code(), stdout(&o)),
        (Some(0), "[-1, 1]\n".to_string())
    );
    let o = hasse(&[
        "search", "--a", "2", "--b", "151", "--k", "3", "--bound", "100",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn census_files_embed_config_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let plot = dir.path().join("plot.dat");
    let args = |o: &str, p: &str| {
        vec![
            "census-thue".to_string(),
            "--k".into(),
            "3".into(),
            "--H".into(),
            "1,4".into(),
            "--out".into(),
            o.into(),
            "--plot-data".into(),
            p.into(),
        ]
    };
    let run = |o: &std::path::Path, p: &std::path::Path| {
        let a = args(o.to_str().unwrap(), p.to_str().unwrap());
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(hasse(&a).status.code(), Some(0));
    };
    run(&out, &plot);
    let first = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    assert!(lines[0].starts_with("# hasse ") && lines[0].contains("\"census-thue\""));
    assert_eq!(lines[1], "H,k,loc,glob,bound_B,ratio,conditional");
    assert!(lines[2].starts_with("1,3,4,4,"));
    assert_eq!(
        std::fs::read_to_string(&plot).unwrap().lines().nth(1),
        Some("1 1.000000")
    );
    run(&out, &plot);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn persistent_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hasse"))
            .args(["census-thue", "--k", "3", "--H", "3"])
            .env("HASSE_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let a = run();
    assert_eq!(a.status.code(), Some(0));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() == 1);
    let b = run();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn io_errors_exit_two() {
    let o = hasse(&[
        "count-quadruples",
        "--k",
        "3",
        "--X",
        "2",
        "--Y",
        "1",
        "--Z",
        "64",
        "--out",
        "/nonexistent-hasse-dir/x",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-hasse-dir/x"));
}

#[test]
fn families_emit_json() {
    let o = hasse(&[
        "families-pairs",
        "--k",
        "3",
        "--count",
        "2",
        "--limit",
        "5000",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["items"].as_array().unwrap().len(), 2);
    let o = hasse(&[
        "families-triples",
        "--k",
        "3",
        "--count",
        "1000",
        "--limit",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
