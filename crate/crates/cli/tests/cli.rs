use std::process::{Command, Output};

fn diffseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffseq"))
        .args(args)
        .env_remove("DIFFSEQ_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = diffseq(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn compute_exact_values() {
    for (set, k, want) in [
        ("s_m(5)", "4", 7),
        ("primes+2", "5", 33),
        ("powers(2)", "6", 25),
        ("s_m(3)", "4", 11),
    ] {
        let v = json(&["compute", "--set", set, "--k", k, "--format", "json"]);
        assert_eq!(v["status"], "Exact");
        assert_eq!(v["value"], want, "{set} k={k}");
        assert_eq!(v["certificate"].as_str().unwrap().len() as u64, want - 1);
    }
}

#[test]
fn compute_without_a_value_exits_two() {
    let out = diffseq(&[
        "compute",
        "--set",
        "explicit(1)",
        "--k",
        "3",
        "--nmax",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("NotFoundUpTo(50)"));

    let out = diffseq(&[
        "compute",
        "--set",
        "powers(2)",
        "--k",
        "8",
        "--max-nodes",
        "500",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["status"].as_str().unwrap().starts_with("Timeout("));
}

#[test]
fn bad_input_exits_one() {
    let out = diffseq(&["compute", "--set", "union(primes, bogus)", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(
        diffseq(&["witness", "chi_k", "--k", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        diffseq(&["verify", "--coloring", "01-", "--set", "primes", "--k", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn table_rows_match() {
    let out = diffseq(&["table1", "--rows", "T,S5", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "row,spec,k,expected,value,status,nodes,elapsed_ms,citation"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 14);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[5], "match", "{row}");
        assert_eq!(fields[3], fields[4], "{row}");
    }
}

#[test]
fn table_skips_unknown_cells() {
    let out = diffseq(&["table1", "--rows", "P+7", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.contains(",match,")).count(), 2);
    assert_eq!(text.lines().filter(|l| l.contains(",skipped,")).count(), 5);
}

#[test]
fn verify_pass_and_fail() {
    let out = diffseq(&[
        "verify",
        "--coloring",
        "011001",
        "--set",
        "s_m(3)",
        "--k",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = diffseq(&[
        "verify",
        "--coloring",
        "0110011",
        "--set",
        "s_m(3)",
        "--k",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_output_verifies() {
    let dir = std::env::temp_dir().join(format!("diffseq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("record.json");
    let out = diffseq(&[
        "compute",
        "--set",
        "odds_plus_two",
        "--k",
        "9",
        "--format",
        "json",
    ]);
    std::fs::write(&path, &out.stdout).unwrap();
    let check = diffseq(&["verify", "--file", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn witness_dump() {
    let out = diffseq(&["witness", "chi_k", "--k", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["name"], "chi_k");
    assert_eq!(header["set_spec"], "powers(2)");
    assert_eq!(lines.next().unwrap(), "10010110".repeat(3));

    let v = json(&[
        "witness", "thm35", "--m", "5", "--k", "7", "--format", "json",
    ]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["n"], 14);
}

#[test]
fn chain_search() {
    let v = json(&["chain", "--t", "1", "--k", "5", "--format", "json"]);
    assert_eq!(v["elements"], serde_json::json!([2, 5, 11, 17, 23]));
    let out = diffseq(&["chain", "--t", "1", "--k", "6", "--bound", "20"]);
    assert_eq!(out.status.code(), Some(2));
    let out = diffseq(&["chain", "--t", "2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_and_sets() {
    let v = json(&["bounds", "--set", "s_m(3)", "--k", "5", "--format", "json"]);
    assert_eq!(v["exact"], 15);
    let out = diffseq(&["bounds", "--registry"]);
    assert!(stdout(&out).starts_with("family,params,k_range,kind,formula,citation"));
    let out = diffseq(&["sets", "--enumerate", "primes+1", "--upto", "12"]);
    assert_eq!(stdout(&out).trim(), "primes+1: 3,4,6,8,12");
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_diffseq"))
            .args([
                "compute", "--set", "primes+3", "--k", "5", "--format", "json",
            ])
            .env("DIFFSEQ_WORKERS", workers)
            .output()
            .unwrap();
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let one = run("1");
    assert_eq!(one["value"], 42);
    assert_eq!(run("4"), one);
    assert_eq!(run("8"), one);
}
