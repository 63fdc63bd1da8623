use std::fs;
use std::process::{Command, Output};

use eulertour::report::Report;
use eulertour::{Count, Multigraph};

fn eulertour(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulertour")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_graph(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const TRIANGLE: &str = "3 3\n0 1\n1 2\n2 0\n";
const BIDIRECTED: &str = "3 6\n0 1\n1 0\n1 2\n2 1\n2 0\n0 2\n";

#[test]
fn count_known_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let o = eulertour(&["count", "--graph", &write_graph(&dir, "t", TRIANGLE)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "arbs=1 tours=1 acceptance=1/1\n");
    let o = eulertour(&["count", "--graph", &write_graph(&dir, "b", BIDIRECTED)]);
    assert_eq!(stdout(&o), "arbs=3 tours=3 acceptance=3/8\n");
}

#[test]
fn count_output_round_trips() {
    let o = eulertour(&["count", "--n", "40", "--d", "2", "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let tours = text.split_whitespace().find_map(|f| f.strip_prefix("tours=")).unwrap();
    let c: Count = tours.parse().unwrap();
    assert_eq!(c.to_string(), tours);
    let o = eulertour(&["count", "--n", "40", "--d", "2", "--seed", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tours"].as_str().unwrap(), tours);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(&dir, "bad", "2 2\n0 1\n");
    assert_eq!(eulertour(&["count", "--graph", &bad]).status.code(), Some(1));
    let star = write_graph(&dir, "star", "2 1\n1 0\n");
    assert_eq!(eulertour(&["count", "--graph", &star]).status.code(), Some(2));
    assert_eq!(eulertour(&["estimate", "--graph", &star]).status.code(), Some(2));
    let o = eulertour(&["generate", "--n", "3", "--d", "2", "--max-attempts", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(eulertour(&["count", "--graph", &star, "--n", "3", "--d", "2"]).status.code(), Some(1));
    assert_eq!(eulertour(&["count"]).status.code(), Some(1));
    assert_eq!(eulertour(&["experiment", "--preset", "nope"]).status.code(), Some(1));
    assert_eq!(eulertour(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_default_corpus_passes() {
    let o = eulertour(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn generate_writes_a_simple_eulerian_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let o = eulertour(&["generate", "--degrees", "2,3,2,3,2", "--seed", "9", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let g = Multigraph::parse(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(g.out_degrees(), vec![2, 3, 2, 3, 2]);
    assert!(eulertour::is_simple(&g) && eulertour::is_eulerian(&g));
    let again = eulertour(&["generate", "--degrees", "2,3,2,3,2", "--seed", "9"]);
    assert_eq!(stdout(&again), fs::read_to_string(&path).unwrap());
}

#[test]
fn sample_and_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(&dir, "b", BIDIRECTED);
    let o = eulertour(&["sample", "--graph", &g, "--kappa", "5", "--seed", "2"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stdout(&o).lines().all(|l| l.split(' ').count() == 6 && l.starts_with("0 ")));
    let o = eulertour(&["sample", "--graph", &g, "--kappa", "20", "--naive", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sampler"], "naive");
    assert_eq!(v["tours"].as_array().unwrap().len(), 20);
    let o = eulertour(&["estimate", "--graph", &g, "--kappa", "2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"], "3/8");
    assert!(v["estimate"].as_str().unwrap().contains('/'));
}

#[test]
fn estimate_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(&dir, "b", BIDIRECTED);
    let a = eulertour(&["estimate", "--graph", &g, "--kappa", "5000", "--workers", "1"]);
    let b = eulertour(&["estimate", "--graph", &g, "--kappa", "5000", "--workers", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn experiment_reports_are_byte_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, name: &str| {
        let path = dir.path().join(name);
        let o = eulertour(&[
            "experiment", "--preset", "smoke", "--seed", "11", "--workers", workers, "--out", path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        fs::read(path).unwrap()
    };
    let one = run("1", "a.json");
    assert_eq!(one, run("4", "b.json"));
    let report = Report::from_json(std::str::from_utf8(&one).unwrap()).unwrap();
    assert_eq!(report.schema, "report_v1");
    assert_eq!(report.preset, "smoke");
    assert_eq!(report.seed, 11);
}

#[test]
fn experiment_csv_with_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let o = eulertour(&[
        "experiment", "--preset", "w-d2", "--trials", "200", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("name,sample_count,mean,variance,standard_error,theory_value,z_score"));
    assert_eq!(csv.lines().count(), 3);
    let samples = fs::read_to_string(dir.path().join("w.csv.samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 201);
}
