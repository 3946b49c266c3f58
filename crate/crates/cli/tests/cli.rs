use std::path::Path;
use std::process::{Command, Output};

fn hyperpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperpath"))
        .args(args)
        .env_remove("HYPERPATH_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn classify_running_example() {
    let o = hyperpath(&["classify", "--n", "13", "--c", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["is_hypertree"], false);
    assert_eq!(v["codim"], 3);
    assert_eq!(v["witness_k"], 1);
    assert_eq!(v["o_c"], 4);
}

#[test]
fn classify_rejects_ineligible_c() {
    let o = hyperpath(&["classify", "--n", "13", "--c", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c = -1 is excluded"), "{}", stderr(&o));
    let o = hyperpath(&["classify", "--n", "15", "--c", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not a prime"));
    let o = hyperpath(&["classify", "--n", "13"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_both_methods_agree() {
    let o = hyperpath(&["classify", "--n", "13", "--c", "2", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["is_hypertree"], true);
}

#[test]
fn scan_is_independent_of_job_count() {
    let one = hyperpath(&["scan", "--min", "11", "--max", "31", "--jobs", "1"]);
    let four = hyperpath(&["scan", "--min", "11", "--max", "31", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_hyperpath"))
        .args(["scan", "--min", "11", "--max", "31"])
        .env("HYPERPATH_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(env.stdout, one.stdout);
    let text = stdout(&one);
    assert!(text.starts_with("n,c,o_c,log_c,predicted,codim,hypertree,witness_k\n"));
    assert!(text.contains("\n13,5,4,9,1,3,0,1\n"));
    let json = hyperpath(&["scan", "--min", "11", "--max", "13", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7 + 9);
}

#[test]
fn scan_range_limits() {
    assert_eq!(
        hyperpath(&["scan", "--min", "7", "--max", "31"])
            .status
            .code(),
        Some(2)
    );
    let o = hyperpath(&["scan", "--min", "11", "--max", "1501"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1500"));
}

#[test]
fn table_cell_for_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    let o = hyperpath(&[
        "table",
        "--min",
        "11",
        "--max",
        "17",
        "--records",
        records.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,11,13,17"));
    let row5: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("5,"))
        .unwrap()
        .split(',')
        .collect();
    assert!(row5[2].parse::<usize>().unwrap() > 0);
    assert!(text.contains("\n11,X,X,"));
    assert!(std::fs::read_to_string(records)
        .unwrap()
        .contains("\n13,5,4,9,1,3,0,1\n"));
}

fn phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

#[test]
fn ratios_bound_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperpath(&[
        "ratios",
        "--max",
        "59",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("ratios.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,A_n,N_n,E_n,acyclic_ratio,nonacyclic_ratio,bound")
    );
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let n: u64 = f[0].parse().unwrap();
        let h = (n - 1) / 2;
        let bound = phi(h) as f64 / h as f64;
        assert!((f[6].parse::<f64>().unwrap() - bound).abs() < 5e-7, "n={n}");
        assert!(f[4].parse::<f64>().unwrap() <= bound);
        let (a, nn, e): (u64, u64, u64) = (
            f[1].parse().unwrap(),
            f[2].parse().unwrap(),
            f[3].parse().unwrap(),
        );
        assert_eq!(a + nn, n - 4);
        assert_eq!(f[5].is_empty(), e == 0);
        count += 1;
    }
    assert_eq!(count, 13);
    assert!(Path::new(&dir.path().join("conditional_ratios.csv")).exists());
    assert!(std::fs::read_to_string(dir.path().join("ratios.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn verify_kernel_command() {
    let o = hyperpath(&["verify-kernel", "--n", "13", "--c", "5", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["leaders"], serde_json::json!([2, 4, 8, 3, 6]));
    assert_eq!(
        hyperpath(&["verify-kernel", "--n", "13", "--c", "5", "--k", "4"])
            .status
            .code(),
        Some(2)
    );
    let o = hyperpath(&["verify-kernel", "--n", "11", "--c", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn fullrank_command() {
    let o = hyperpath(&["fullrank", "--n", "13", "--c", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,c,rank_F,full,hypertree,implication_holds\n"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[2].parse::<u64>().unwrap() < 156);
    assert_eq!(&row[3..], ["0", "0", "1"]);
    let o = hyperpath(&["fullrank", "--min", "11", "--max", "13"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 7 + 9);
    assert_eq!(hyperpath(&["fullrank", "--n", "13"]).status.code(), Some(2));
}

#[test]
fn bench_small_instance() {
    let start = std::time::Instant::now();
    let o = hyperpath(&["bench", "--n-list", "13", "--c", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(start.elapsed().as_secs_f64() < 1.0);
    let text = stdout(&o);
    assert!(text.starts_with("n,method,median_ms\n"));
    for m in ["fast", "exact", "modp"] {
        assert!(text.contains(&format!("\n13,{m},")));
    }
    assert_eq!(
        hyperpath(&["bench", "--n-list", "15"]).status.code(),
        Some(2)
    );
}

#[test]
fn selftest_passes_and_names_corrupted_files() {
    let o = hyperpath(&["selftest", "--instances", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = hyperpath(&["selftest", "--instances", "20", "--verbose"]);
    let text = stdout(&o);
    assert!(text.contains("ok: v_{13,3} S(w_3) = 0"));
    assert!(text.contains("ok: block [3,4] is P^2"));

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/golden");
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(&golden).unwrap() {
        let p = entry.unwrap().path();
        std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    let table = dir.path().join("table_11_59.csv");
    let text = std::fs::read_to_string(&table).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // row c = 5, column n = 13
    let mut cells: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(cells[0], "5");
    cells[2] = "0";
    lines[4] = cells.join(",");
    std::fs::write(&table, lines.join("\n") + "\n").unwrap();
    let o = hyperpath(&[
        "selftest",
        "--instances",
        "5",
        "--golden-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("table_11_59.csv"), "{}", stderr(&o));
}
