use std::path::Path;
use std::process::{Command, Output};

fn klnn(dir: &Path, args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klnn"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .env_remove("KLNN_OUT_DIR")
        .output()
        .expect("failed to launch klnn")
}

fn ok(dir: &Path, args: &str) -> Output {
    let out = klnn(dir, args);
    assert!(
        out.status.success(),
        "klnn {args} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn experiment_csv_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let base = "experiment --experiment 1 --r-list 0.9,0.999 --trials 12 --seed 5 --plot";
    for (threads, out) in [("1", "a.csv"), ("4", "b.csv"), ("4", "c.csv")] {
        ok(dir.path(), &format!("{base} --threads {threads} --out {out}"));
    }
    let a = read(dir.path().join("a.csv"));
    assert_eq!(a, read(dir.path().join("b.csv")));
    assert_eq!(a, read(dir.path().join("c.csv")));
    assert_eq!(read(dir.path().join("a.svg")), read(dir.path().join("b.svg")));
    assert_eq!(a.lines().count(), 1 + 2 * 3);
    assert!(read(dir.path().join("b.csv.run")).contains("threads = 4"));
}

#[test]
fn bias_table_and_estimate_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for (threads, out) in [("1", "t1.csv"), ("3", "t3.csv")] {
        ok(
            dir.path(),
            &format!(
                "bias-table --k-list 4,5 --d-list 2 --alpha-list 2 --trials 2000 --m-trunc 20 --seed 9 \
                 --threads {threads} --out {out}"
            ),
        );
    }
    let table = read(dir.path().join("t1.csv"));
    assert_eq!(table, read(dir.path().join("t3.csv")));
    assert_eq!(table.lines().count(), 1 + 4);

    ok(dir.path(), "sample --family gauss2d --r 0.5 --n 200 --out x.csv");
    let mut results = Vec::new();
    for threads in ["1", "3"] {
        for method in ["klnn", "kde"] {
            let out = ok(
                dir.path(),
                &format!("estimate --input x.csv --method {method} --k 5 --bias-table t1.csv --threads {threads}"),
            );
            results.push(String::from_utf8(out.stdout).unwrap());
        }
    }
    assert_eq!(results[0], results[2]);
    assert_eq!(results[1], results[3]);
    let lines: Vec<&str> = results[0].lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "method,n,d,k,alpha,value");
    assert!(lines[1].starts_with("klnn,200,2,5,2,"));
}

#[test]
fn run_file_replays_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        "experiment --experiment 4 --r-list 0.99 --trials 8 --seed 3 --out first.csv",
    );
    ok(dir.path(), "--config first.csv.run --out second.csv");
    assert_eq!(read(dir.path().join("first.csv")), read(dir.path().join("second.csv")));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("gt.cfg"),
        "# closed-form value\ncommand = ground-truth\nfamily = gauss2d\nalpha = 2\nr = 0\n",
    )
    .unwrap();
    let out = ok(dir.path(), "--config gt.cfg");
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let j: f64 = row[3].parse().unwrap();
    assert!((j - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);

    let out = ok(dir.path(), "--config gt.cfg ground-truth --r 0.9");
    assert!(String::from_utf8(out.stdout).unwrap().contains(",0.9,"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_klnn"))
        .args("experiment --experiment 2 --r-list 0.9 --trials 4 --methods leonenko".split_whitespace())
        .current_dir(dir.path())
        .env("KLNN_OUT_DIR", dir.path().join("results"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("results/exp2.csv").exists());
}

#[test]
fn missing_bias_entry_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        "bias-table --k-list 5 --d-list 2 --alpha-list 2 --estimator llde --trials 100 --out small.csv",
    );
    let out = klnn(
        dir.path(),
        "experiment --experiment 3 --bias-table small.csv --out exp3.csv",
    );
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing bias entry"), "{err}");
    assert!(err.contains("k=5") && err.contains("d=6"), "{err}");
    assert!(!dir.path().join("exp3.csv").exists());
}

#[test]
fn rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = klnn(dir.path(), "ground-truth --family mixture2d --alpha 3 --r 0.5");
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no closed-form ground truth"));

    std::fs::write(dir.path().join("p.csv"), "1,2\n3,4\n5,6\n").unwrap();
    assert!(!klnn(dir.path(), "estimate --input p.csv --alpha 1 --renyi")
        .status
        .success());
    assert!(!klnn(dir.path(), "experiment --experiment 7").status.success());
}
