use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const INST1: &str = r#"{"P": [[1,1],[2,3]], "Q": [[0,2],[3,-1]],
  "constraints": [{"a": 1, "b": 0, "c": 3, "op": ">="}],
  "objective": {"type": "linear", "coeffs": [0, 1]},
  "query": {"kind": "select", "value": 1}}"#;

fn minksum(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_minksum"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_line(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(&text).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn inst1_selects_two() {
    let v = json_line(&minksum(&["select", "-"], INST1));
    assert_eq!(v["answer"], 2);
    assert_eq!(v["engine"], "selection_1");
    assert_eq!(v["witness"]["p"], 1);
    assert_eq!(v["witness"]["q"], 1);
    assert!(v["elapsed_ms"].as_f64().unwrap() >= 0.0);
    assert!(v.get("distance").is_none());
    let v = json_line(&minksum(&["select", "-", "--k", "2"], INST1));
    assert_eq!(v["answer"], 0);
}

#[test]
fn oracle_answer_field_is_byte_identical() {
    let answer = |engine: &str, args: &[&str]| {
        let mut all = vec!["--engine", engine];
        all.extend_from_slice(args);
        let v = json_line(&minksum(&all, INST1));
        serde_json::to_string(&v["answer"]).unwrap()
    };
    for args in [&["select", "-"][..], &["rank", "-", "--t", "1"], &["find", "-", "--delta", "1.6"]] {
        assert_eq!(answer("oracle", args), answer("auto", args), "{args:?}");
    }
}

#[test]
fn rank_and_find_examples() {
    let v = json_line(&minksum(&["rank", "-", "--t", "1"], INST1));
    assert_eq!(v["answer"], 2);
    assert!(v["witness"].is_null());
    let v = json_line(&minksum(&["find", "-", "--delta", "1.6"], INST1));
    assert_eq!(v["answer"], 2);
    assert_eq!(v["distance"], "2/5");
    let v = json_line(&minksum(&["find", "-", "--delta", "-1/2"], INST1));
    assert_eq!(v["answer"], 0);
    assert_eq!(v["distance"], "1/2");
}

#[test]
fn exit_codes() {
    let out = minksum(&["select", "-"], "{\"P\": [[1,1]");
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("problem file"));
    let out = minksum(&["select", "-"], r#"{"P": [[1,1]], "Q": [[0,0]], "objective": {"type": "linear", "coeffs": [0, 1]}, "extra": 1}"#);
    assert_eq!(code(&out), 4);
    assert_eq!(code(&minksum(&["select", "-", "--k", "3"], INST1)), 3);
    assert_eq!(code(&minksum(&["select", "-", "--k", "0"], INST1)), 3);
    let empty = INST1.replace("\"c\": 3", "\"c\": 100");
    assert_eq!(code(&minksum(&["select", "-"], &empty)), 2);
    let degenerate = INST1.replace("\"a\": 1", "\"a\": 0");
    assert_eq!(code(&minksum(&["select", "-"], &degenerate)), 4);
    assert_eq!(code(&minksum(&["--engine", "randomized", "select", "-"], INST1)), 4);
    assert_eq!(code(&minksum(&["--epsilon", "0.5", "--mode", "int", "select", "-"], INST1)), 4);
    assert_eq!(code(&minksum(&["select"], "")), 4);
    assert_eq!(code(&minksum(&["frobnicate"], "")), 4);
    assert_eq!(code(&minksum(&["select", "/nonexistent/problem.json"], "")), 4);
    assert_eq!(code(&minksum(&["--help"], "")), 0);
}

#[test]
fn float_problems() {
    let text = INST1.replace("[[1,1],[2,3]]", "[[1.5,1.25],[2,3]]");
    let v = json_line(&minksum(&["select", "-"], &text));
    assert_eq!(v["answer"], 2.0);
    let v = json_line(&minksum(&["--mode", "float", "select", "-"], INST1));
    assert_eq!(v["answer"], 2.0);
    assert_eq!(code(&minksum(&["--mode", "int", "select", "-"], &text)), 4);
}

#[test]
fn sequence_commands() {
    let s = file("3\n-1\n2\n");
    let p = s.path().to_str().unwrap();
    let v = json_line(&minksum(&["lcss", p, "--l", "1", "--u", "2", "--k", "2"], ""));
    assert_eq!(v["answer"], 2);
    let v = json_line(&minksum(&["sum-select", p, "--k", "1"], ""));
    assert_eq!(v["answer"], 4);
    assert_eq!(v["witness"]["i"], 1);
    assert_eq!(v["witness"]["j"], 3);
    assert_eq!(code(&minksum(&["lcss", p, "--l", "0", "--u", "2", "--k", "1"], "")), 4);
    assert_eq!(code(&minksum(&["lcss", p, "--l", "1", "--u", "2", "--k", "6"], "")), 3);

    let w = file("2,1\n-1,1\n3,1\n");
    let v = json_line(&minksum(&["density", w.path().to_str().unwrap(), "--l", "1", "--u", "2", "--delta", "1"], ""));
    assert_eq!(v["answer"], 1);
    assert_eq!(v["distance"], 0);
    let z = file("2,1\n-1,0\n3,1\n");
    let out = minksum(&["density", z.path().to_str().unwrap(), "--l", "1", "--u", "2", "--delta", "1"], "");
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = minksum(&["density", w.path().to_str().unwrap(), "--l", "5", "--u", "9", "--delta", "1"], "");
    assert_eq!(code(&out), 2);
}

#[test]
fn bench_records_and_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let plot_path = dir.path().join("plot.csv");
    let out = minksum(
        &[
            "bench",
            "--sizes",
            "1024,2048",
            "--engines",
            "selection_1,selection_2_randomized",
            "--seeds",
            "3,4",
            "--out",
            csv_path.to_str().unwrap(),
            "--plot-data",
            plot_path.to_str().unwrap(),
        ],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rd = csv::Reader::from_path(&csv_path).unwrap();
    let header = rd.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for engine in ["selection_1", "selection_2_randomized"] {
        for seed in ["3", "4"] {
            let mine: Vec<_> = rows.iter().filter(|r| &r[col("engine")] == engine && &r[col("seed")] == seed).collect();
            assert_eq!(mine.len(), 2, "two records per seed");
            assert_eq!(&mine[0][col("n")], "1024");
            assert!(mine[0][col("doubling_ratio")].is_empty());
            let ratio: f64 = mine[1][col("doubling_ratio")].parse().unwrap();
            let t0: f64 = mine[0][col("wall_ms")].parse().unwrap();
            let t1: f64 = mine[1][col("wall_ms")].parse().unwrap();
            assert!((ratio - t1 / t0).abs() < 1e-9 * ratio.max(1.0));
            let repeats = &mine[0][col("repeats")];
            if engine == "selection_2_randomized" {
                assert!(repeats.parse::<u64>().unwrap() >= 1);
            } else {
                assert!(repeats.is_empty());
            }
        }
    }
    let plot = std::fs::read_to_string(&plot_path).unwrap();
    assert_eq!(plot.lines().count(), 5);
}

#[test]
fn bench_is_deterministic_in_answers() {
    let run = || {
        let out = minksum(&["bench", "--sizes", "300", "--engines", "selection_2,selection_2_randomized,lcss", "--seeds", "9"], "");
        assert!(out.status.success());
        let mut rd = csv::Reader::from_reader(&out.stdout[..]);
        rd.records().map(|r| r.unwrap()[7].to_string()).collect::<Vec<_>>()
    };
    let a = run();
    assert_eq!(a.len(), 3);
    assert_eq!(a[0], a[1], "randomized and deterministic answers agree");
    assert_eq!(a, run());
}
