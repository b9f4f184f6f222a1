use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gview(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gview"))
        .args(args)
        .env_remove("GVIEW_SEED")
        .output()
        .expect("binary runs")
}

fn repo(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(path)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn row_count(text: &str) -> usize {
    text.lines()
        .find_map(|l| l.strip_prefix("rows: "))
        .expect("row count line")
        .parse()
        .unwrap()
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let o = gview(&[
        "select",
        "--graph",
        "g.json",
        "--workload",
        "w.json",
        "--algorithm",
        "simplex",
        "--budget",
        "1",
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--algorithm"), "{err}");
    assert!(err.contains("gga"), "{err}");
}

#[test]
fn missing_graph_fails_with_message() {
    let o = gview(&["validate", "--graph", "/nonexistent/g.json"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("loading graph"));
}

#[test]
fn select_materialize_and_query_through_views() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let manifest = dir.path().join("views.json");
    let workload = repo("workloads/copurchase.json");
    stdout(&gview(&[
        "gen-graph",
        "--generator",
        "copurchase",
        "--products",
        "60",
        "--seed",
        "4",
        "--out",
        s(&graph),
    ]));
    let v = stdout(&gview(&["validate", "--graph", s(&graph), "--workload", s(&workload)]));
    assert!(v.contains("12 queries"));
    stdout(&gview(&[
        "select",
        "--graph",
        s(&graph),
        "--workload",
        s(&workload),
        "--algorithm",
        "greedy",
        "--budget",
        "1000000",
        "--out",
        s(&manifest),
    ]));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let views = m["views"].as_array().unwrap();
    assert!(!views.is_empty());

    let out = dir.path().join("views");
    stdout(&gview(&[
        "materialize",
        "--graph",
        s(&graph),
        "--manifest",
        s(&manifest),
        "--out-dir",
        s(&out),
    ]));
    for v in views {
        assert!(out.join(v["file"].as_str().unwrap()).exists());
    }

    let mut through_views = 0;
    for q in ["book_pair", "book_chain", "dvd_pair", "music_fan_out", "pair"] {
        let via = stdout(&gview(&[
            "query",
            "--graph",
            s(&graph),
            "--workload",
            s(&workload),
            "--name",
            q,
            "--manifest",
            s(&manifest),
        ]));
        let base = stdout(&gview(&[
            "query",
            "--graph",
            s(&graph),
            "--workload",
            s(&workload),
            "--name",
            q,
        ]));
        assert!(base.starts_with("source: base"));
        assert_eq!(row_count(&via), row_count(&base), "{q}");
        through_views += via.starts_with("source: views") as usize;
    }
    assert!(through_views > 0);
}

#[test]
fn bench_rows_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let config = repo("configs/copurchase.json");
    stdout(&gview(&["bench", "--config", s(&config), "--out", s(&a)]));
    stdout(&gview(&["bench", "--config", s(&config), "--out", s(&b)]));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("algorithm,budget,total_benefit,covered_fraction,candidate_views,selected_bytes,runtime_ms")
    );
    // four algorithms at three budgets
    assert_eq!(lines.clone().count(), 12);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let budget: u64 = cols[1].parse().unwrap();
        let selected: u64 = cols[5].parse().unwrap();
        let frac: f64 = cols[3].parse().unwrap();
        assert!(selected <= budget);
        assert!((0.0..=1.0).contains(&frac));
    }
}

#[test]
fn seed_variable_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let config = repo("configs/copurchase.json");
    let run = |out: &Path, seed: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_gview"))
            .args(["bench", "--config", s(&config), "--out", s(out)])
            .env("GVIEW_SEED", seed)
            .output()
            .unwrap();
        assert!(o.status.success());
    };
    run(&a, "1");
    run(&b, "2");
    assert_ne!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
    let o = Command::new(env!("CARGO_BIN_EXE_gview"))
        .args(["bench", "--config", s(&config), "--out", s(&a)])
        .env("GVIEW_SEED", "abc")
        .output()
        .unwrap();
    assert!(!o.status.success());
}
