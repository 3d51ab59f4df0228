use std::process::{Command, Output};

const CODE: &str = "rs(16,8,4)xrs(16,8,6)";

fn prodcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodcode"))
        .args(args)
        .env_remove("PRODCODE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("decoder,code,orientation,p,frames,frame_errors,failures,miscorrections,pp_invocations,fer,ser,gamma,fer_ci95")
    );
    lines.collect()
}

/// Splits a CSV row, honouring the quoted code field.
fn fields(row: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in row.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    out.push(cur);
    out
}

#[test]
fn simulate_single_point_gives_one_row() {
    let o = prodcode(&[
        "simulate", "--code", CODE, "--decoder", "iterative", "--p-list", "0.1",
        "--max-frames", "512",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 1);
    let f = fields(rows[0]);
    assert_eq!(f.len(), 13);
    assert_eq!(&f[..4], &["iterative", CODE, "column-first", "0.1"]);
    assert_eq!(f[4], "512");
}

#[test]
fn simulate_with_pp_and_range() {
    let o = prodcode(&[
        "simulate", "--code", CODE, "--decoder", "iterative", "--pp", "proposed",
        "--p-range", "0.08:0.12:3", "--max-frames", "256", "--orientation", "row-first",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    let ps: Vec<f64> = rows.iter().map(|r| fields(r)[3].parse().unwrap()).collect();
    assert_eq!(ps.len(), 3);
    assert!(ps.windows(2).all(|w| w[0] > w[1]));
    assert!(rows.iter().all(|r| r.starts_with("iterative+proposed,") && r.contains("row-first")));
}

#[test]
fn compare_rows_share_frame_counts() {
    let o = prodcode(&[
        "compare", "--code", CODE, "--decoders",
        "iterative,kreshchuk,emmadi,condo,proposed", "--p-list", "0.12",
        "--min-errors", "5",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 5);
    let frames: Vec<String> = rows.iter().map(|r| fields(r)[4].clone()).collect();
    assert!(frames.iter().all(|f| *f == frames[0]));
}

#[test]
fn compare_gd_correct_whenever_gmd_correct() {
    // paired counts: gd can only be wrong on frames where gmd is also wrong
    let o = prodcode(&[
        "compare", "--code", CODE, "--decoders", "gmd,gd", "--p-list", "0.1,0.14",
        "--max-frames", "2048", "--min-errors", "1000000",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows = data_rows(&out);
    for pair in rows.chunks(2) {
        let gmd: u64 = fields(pair[0])[5].parse().unwrap();
        let gd: u64 = fields(pair[1])[5].parse().unwrap();
        assert!(gd <= gmd);
    }
}

#[test]
fn same_seed_same_bytes_and_thread_independent() {
    let args = |t: &'static str| {
        vec![
            "compare", "--code", CODE, "--decoders", "iterative,gmd", "--p-list", "0.12",
            "--max-frames", "1024", "--seed", "9", "--threads", t,
        ]
    };
    let a = prodcode(&args("1"));
    let b = prodcode(&args("2"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unpaired_mode_runs() {
    let o = prodcode(&[
        "compare", "--code", CODE, "--decoders", "iterative,gmd", "--p-list", "0.1",
        "--max-frames", "256", "--unpaired",
    ]);
    assert!(o.status.success());
    assert_eq!(data_rows(&stdout(&o)).len(), 2);
}

#[test]
fn out_file_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = prodcode(&[
        "simulate", "--code", CODE, "--decoder", "gmd", "--p-list", "0.05,0.1",
        "--max-frames", "256", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(data_rows(&text).len(), 2);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["simulate", "--code", "rs(16,8,9)xrs(16,8,6)", "--p-list", "0.1"],
        vec!["simulate", "--code", "rs(16,8,4)xrs(32,8,6)", "--p-list", "0.1"],
        vec!["simulate", "--code", CODE],
        vec!["simulate", "--code", CODE, "--p-list", "0.1", "--decoder", "bogus"],
        vec!["simulate", "--code", CODE, "--p-list", "0.1", "--decoder", "gd", "--pp", "proposed"],
        vec!["simulate", "--code", CODE, "--p-list", "1.5"],
        vec!["compare", "--code", CODE, "--p-list", "0.1"],
        vec!["frobnicate"],
    ] {
        let o = prodcode(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn selftest_passes_and_reports_each_property() {
    let o = prodcode(&["selftest", "--quick"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn selftest_fault_injection_exits_two() {
    for (fault, property) in [
        ("relaxed-acceptance", "acceptance-uniqueness"),
        ("odd-parity-skip", "skip-soundness"),
        ("ignore-reliability", "wd-bound"),
        ("punctured-weight", "mds-weights"),
    ] {
        let o = prodcode(&["selftest", "--quick", "--inject-fault", fault]);
        assert_eq!(o.status.code(), Some(2), "{fault}");
        let out = stdout(&o);
        let failed: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
        assert_eq!(failed.len(), 1);
        assert!(failed[0].contains(property));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(prodcode(&["--help"]).status.code(), Some(0));
}
