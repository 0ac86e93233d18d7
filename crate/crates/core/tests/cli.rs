use std::process::{Command, Output};

fn solve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table1_csv_has_header_and_twenty_records() {
    let out = solve(&["--preset", "table1", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 21);
    assert!(lines[0].starts_with("x,y,y_display,err_e4,j_used,j_n,j_s"));
    assert!(lines[1].starts_with("0.05,") && lines[1].contains(",0.0513,"));
    assert!(!text.contains('\r'));
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let a = solve(&["--preset", "table2", "--output", "csv"]);
    let b = solve(&["--preset", "table2", "--output", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn jsonl_records_carry_the_schema() {
    let out = solve(&["--preset", "table1", "--output", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 20);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["x", "y", "err_e4", "j_used", "j_n", "j_s", "certified", "y_lo", "y_hi", "evals"] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
        assert_eq!(v["certified"], serde_json::Value::Bool(true));
    }
}

#[test]
fn table_output_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t4.txt");
    let out = solve(&["--preset", "table4", "--out-path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let row = text.lines().find(|l| l.trim_start().starts_with("1.45")).unwrap();
    assert!(row.contains("1.8182"), "{row}");
    assert!(row.contains("0.104"), "{row}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# per-node two-pass\nproblem = riccati\nalgorithm = two\nmesh = 0.4, 0.8, 1.2\neps = 1e-3\n").unwrap();
    let out = solve(&["--config", cfg.to_str().unwrap(), "--eps", "1e-4", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(3).unwrap().starts_with("1.2,"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "preset = table1\neps: 1e-4\n").unwrap();
    let out = solve(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2"));

    assert_eq!(solve(&["--preset", "table1", "--mesh-count", "0"]).status.code(), Some(2));
    assert_eq!(solve(&["--preset", "table7"]).status.code(), Some(2));
    assert_eq!(solve(&["--eps", "-1"]).status.code(), Some(2));
    assert_eq!(solve(&["--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
    assert_eq!(solve(&["--out-path", "/nonexistent/dir/out.csv"]).status.code(), Some(2));
}

#[test]
fn unknown_flag_is_rejected() {
    let out = solve(&["--colour", "red"]);
    assert_eq!(out.status.code(), Some(2));
}
