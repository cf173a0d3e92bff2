use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use strent::synthetic::{circular_benchmark, CircularNoise};
use strent::RngState;
use tempfile::TempDir;

const MONTHS: [&str; 12] = [
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
];

fn strent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_months(path: &Path, n: usize, seed: u64) {
    let data = circular_benchmark(n, 12, CircularNoise::default(), &mut RngState::from_seed(seed)).unwrap();
    let mut text = String::from("x,month,y\n");
    for (row, &c) in data.features().outer_iter().zip(data.labels()) {
        text.push_str(&format!("{},{},{}\n", row[0], MONTHS[c], row[1]));
    }
    std::fs::write(path, text).unwrap();
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        write_months(&dir.path().join("train.csv"), 300, 1);
        write_months(&dir.path().join("test.csv"), 400, 2);
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn metric(report: &str, name: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no {name} in {report}"))
        .parse()
        .unwrap()
}

fn train_args<'a>(f: &'a Fixture, out: &'a str, extra: &[&'a str]) -> Vec<String> {
    let mut args: Vec<String> = [
        "train",
        "--data",
        &f.p("train.csv"),
        "--label",
        "month",
        "--classes",
        &MONTHS.join(","),
        "--rounds",
        "15",
        "--seed",
        "11",
        "--out",
        out,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

fn run(args: &[String]) -> Output {
    strent(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn train_with_circular_structure_writes_model_and_metrics() {
    let f = Fixture::new();
    let model = f.p("m.json");
    let o = run(&train_args(
        &f,
        &model,
        &["--circular", "12,3", "--p0", "0.3", "--test-data", &f.p("test.csv")],
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(f.path("m.json").exists());
    let metrics = std::fs::read_to_string(f.path("m.metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert!(lines.next().unwrap().starts_with("# seed=11 loss=fixed"));
    assert_eq!(lines.next().unwrap(), "round,train_log_loss,test_log_loss");
    assert_eq!(lines.count(), 15);
}

#[test]
fn missing_label_column_is_a_data_error() {
    let f = Fixture::new();
    let o = strent(&["train", "--data", &f.p("train.csv"), "--label", "season", "--out", &f.p("m.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'season'"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_one() {
    let f = Fixture::new();
    let cases: [&[&str]; 4] = [
        &["train", "--data", "x.csv"],
        &["train", "--data", "x.csv", "--out", "m", "--circular", "12,3", "--graph", "g.txt"],
        &["train", "--data", "x.csv", "--out", "m", "--p0", "0.5"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(strent(args).status.code(), Some(1), "{args:?}");
    }
    let o = run(&train_args(&f, &f.p("m.json"), &["--circular", "12,3", "--p0", "0.2,0.3"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sweep"), "{}", stderr(&o));
    assert_eq!(strent(&["--help"]).status.code(), Some(0));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let f = Fixture::new();
    for (name, extra) in [
        ("a", vec!["--graph", "cycle.txt", "--partition-size", "4", "--p0", "0.5"]),
        ("b", vec!["--circular", "12,3", "--p0", "0.3"]),
    ] {
        let mut cycle = String::from("12\n");
        for v in 0..12 {
            cycle.push_str(&format!("{v} {}\n", (v + 1) % 12));
        }
        std::fs::write(f.path("cycle.txt"), cycle).unwrap();
        let extra: Vec<String> = extra
            .iter()
            .map(|s| if *s == "cycle.txt" { f.p("cycle.txt") } else { s.to_string() })
            .collect();
        let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
        let first = f.p(&format!("{name}1.json"));
        let second = f.p(&format!("{name}2.json"));
        assert!(run(&train_args(&f, &first, &extra)).status.success());
        assert!(run(&train_args(&f, &second, &extra)).status.success());
        let read = |p: &str| std::fs::read(p).unwrap();
        assert_eq!(read(&first), read(&second));
        assert_eq!(
            read(&f.p(&format!("{name}1.metrics.csv"))),
            read(&f.p(&format!("{name}2.metrics.csv")))
        );
    }
}

#[test]
fn eval_on_training_data_reproduces_final_train_loss() {
    let f = Fixture::new();
    let model = f.p("m.json");
    assert!(run(&train_args(&f, &model, &[])).status.success());
    let o = strent(&["eval", "--model", &model, "--data", &f.p("train.csv"), "--label", "month"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    let metrics = std::fs::read_to_string(f.path("m.metrics.csv")).unwrap();
    let last = metrics.lines().last().unwrap().split(',').nth(1).unwrap();
    assert!((metric(&report, "log_loss") - last.parse::<f64>().unwrap()).abs() < 1e-12);
    assert!(!report.contains("structured_log_loss"));
    assert!(!report.contains("coarsened_accuracy"));

    let o = strent(&[
        "eval", "--model", &model, "--data", &f.p("test.csv"), "--label", "month", "--circular",
        "12,3", "--p0", "0.3",
    ]);
    let report = stdout(&o);
    assert!(report.contains("structured_log_loss"));
    assert!(report.contains("coarsened_accuracy_3"));
}

#[test]
fn eval_rejects_class_count_mismatch() {
    let f = Fixture::new();
    let model = f.p("m.json");
    assert!(run(&train_args(&f, &model, &[])).status.success());
    let o = strent(&[
        "eval", "--model", &model, "--data", &f.p("test.csv"), "--label", "month", "--circular",
        "10,2", "--p0", "0.3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("10 classes"), "{}", stderr(&o));

    std::fs::write(f.path("other.csv"), "x,month,z\n0,jan,1\n").unwrap();
    let o = strent(&["eval", "--model", &model, "--data", &f.p("other.csv"), "--label", "month"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_table_shape_and_single_trial_composition() {
    let f = Fixture::new();
    let months = MONTHS.join(",");
    let base = [
        "sweep", "--data", &f.p("train.csv"), "--test-data", &f.p("test.csv"), "--label", "month",
        "--classes", &months, "--rounds", "5", "--seed", "4",
    ];
    let mut grid = base.to_vec();
    grid.extend([
        "--circular", "12,3", "--p0", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "--trials", "1",
        "--train-sizes", "100,300",
    ]);
    let o = strent(&grid);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("# seed=4"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 11);
    assert_eq!(header[..3], ["train_size", "standard", "p0=0.1"]);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("100,") && rows[1].starts_with("300,"));

    let mut single = base.to_vec();
    single.extend(["--circular", "12,3", "--p0", "0.3", "--trials", "1"]);
    let table = stdout(&strent(&single));
    let swept: f64 = table.lines().nth(2).unwrap().split(',').nth(2).unwrap().parse().unwrap();

    let model = f.p("m.json");
    let o = strent(&[
        "train", "--data", &f.p("train.csv"), "--label", "month", "--classes", &months, "--rounds",
        "5", "--seed", "4", "--circular", "12,3", "--p0", "0.3", "--out", &model,
    ]);
    assert!(o.status.success());
    let report = stdout(&strent(&["eval", "--model", &model, "--data", &f.p("test.csv"), "--label", "month"]));
    assert_eq!(swept, metric(&report, "log_loss"));
}

#[test]
fn missing_seed_is_recorded() {
    let f = Fixture::new();
    let mut args = train_args(&f, &f.p("m.json"), &[]);
    let i = args.iter().position(|a| a == "--seed").unwrap();
    args.drain(i..i + 2);
    assert!(run(&args).status.success());
    let metrics = std::fs::read_to_string(f.path("m.metrics.csv")).unwrap();
    let seed: u64 = metrics
        .strip_prefix("# seed=")
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    let model = std::fs::read_to_string(f.path("m.json")).unwrap();
    assert!(model.contains(&format!("\"seed\": {seed}")));
}

#[test]
fn entropy_reports() {
    let o = strent(&["entropy", "--dist", "0.25,0.25,0.5", "--three-state", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let value = |q: &str| -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(&format!("{q},,")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((value("structured_entropy_bits") - 1.25).abs() < 1e-12);
    assert!(out.contains("random_block,0 1,0.25"));

    let out = stdout(&strent(&["entropy", "--dist", "0.1,0.2,0.3,0.4"]));
    let get = |q: &str| out.lines().find_map(|l| l.strip_prefix(&format!("{q},,"))).unwrap().to_string();
    assert_eq!(get("structured_entropy_nats"), get("shannon_entropy_nats"));

    let out = stdout(&strent(&["entropy", "--dist", "0,1,0", "--three-state", "0.3"]));
    assert!(out.contains("structured_entropy_bits,,0\n"), "{out}");

    assert_eq!(strent(&["entropy", "--dist", "0.5,0.6"]).status.code(), Some(1));
}

#[test]
fn entropy_from_label_column() {
    let f = Fixture::new();
    std::fs::write(f.path("d.csv"), "v,label\n0,a\n0,b\n0,c\n0,c\n").unwrap();
    let o = strent(&["entropy", "--data", &f.p("d.csv"), "--three-state", "0.5", "--classes", "a,b,c"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("structured_entropy_bits,,1.25\n"));
    assert!(stdout(&o).contains("random_block,a b,0.25"));
}

#[test]
fn generated_structures_feed_back_into_training() {
    let f = Fixture::new();
    let months = MONTHS.join(",");
    let o = strent(&[
        "gen-structure", "--circular", "12,3", "--p0", "0.3", "--classes", &months, "--out",
        &f.p("s.json"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let from_file = f.p("a.json");
    let from_flags = f.p("b.json");
    assert!(run(&train_args(&f, &from_file, &["--structure", &f.p("s.json")])).status.success());
    assert!(run(&train_args(&f, &from_flags, &["--circular", "12,3", "--p0", "0.3"])).status.success());
    let trees = |p: &str| {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["model"]["trees"].clone()
    };
    assert_eq!(trees(&from_file), trees(&from_flags));

    std::fs::write(f.path("c.txt"), "4\n0 1\n1 2\n2 3\n3 0\n").unwrap();
    let draw = |seed: &str| {
        stdout(&strent(&[
            "gen-structure", "--graph", &f.p("c.txt"), "--partition-size", "2", "--p0", "0.5",
            "--seed", seed,
        ]))
    };
    assert_eq!(draw("5"), draw("5"));
    assert!(draw("5").contains("\"seed\": 5"));
}
