use std::path::Path;
use std::process::{Command, Output};

fn nalbn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nalbn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CHAIN: &str = r#"{
  "variables": [{"name": "x", "cardinality": 2}, {"name": "y", "cardinality": 2}, {"name": "z", "cardinality": 3}],
  "parents": [[], [0], [1]],
  "cpt": [
    [[0.5, 0.5]],
    [[0.9, 0.1], [0.1, 0.9]],
    [[0.8, 0.1, 0.1], [0.1, 0.1, 0.8]]
  ]
}"#;

#[test]
fn sample_mask_learn_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("net.json"), CHAIN).unwrap();

    let o = nalbn(&["sample", "--net", "net.json", "--n", "5000", "--seed", "1", "--out", "full.csv"], d);
    assert!(o.status.success(), "{o:?}");
    let again = nalbn(&["sample", "--net", "net.json", "--n", "5000", "--seed", "1", "--out", "again.csv"], d);
    assert!(again.status.success());
    assert_eq!(std::fs::read(d.join("full.csv")).unwrap(), std::fs::read(d.join("again.csv")).unwrap());

    let o = nalbn(&["mask", "--in", "full.csv", "--mode", "kper", "--k", "1", "--seed", "2", "--out", "m.csv"], d);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(d.join("m.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.matches("NA").count() == 1));

    let o = nalbn(
        &["learn", "--data", "m.csv", "--schema", "net.json", "--penalty", "power", "--alpha", "0.3",
          "--out", "est.json", "--profile", "profile.csv"],
        d,
    );
    assert!(o.status.success(), "{o:?}");
    assert!(std::fs::read_to_string(d.join("profile.csv")).unwrap().starts_with("t,score,edges\n"));

    let o = nalbn(&["compare", "--truth", "net.json", "--estimate", "est.json"], d);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.contains("equivalent"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("f") && l.trim_end().ends_with('1')), "{out}");

    let o = nalbn(&["score", "--net-structure", "est.json", "--data", "m.csv", "--penalty", "bic"], d);
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.starts_with("node,parents,n_i,nal,df,score\n"), "{out}");
    assert!(out.lines().last().unwrap().starts_with("total"));
}

#[test]
fn population_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("net.json"), CHAIN).unwrap();
    let o = nalbn(&["population", "--net", "net.json", "--candidates", "all", "--missing", "bernoulli:0.9,0.8,1"], dir.path());
    assert!(o.status.success(), "{o:?}");
    let out = stdout(&o);
    assert!(out.starts_with("dag_id,df,nal,superset_of_true,maximizer,minimal_maximizer\n"), "{out}");
    assert_eq!(out.lines().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).count(), 25);
    assert!(out.contains("# beta="));
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.json"), r#"{"kind":"two-node","sample_sizes":[100],"typo":true}"#).unwrap();
    assert_eq!(nalbn(&["experiment", "--config", "bad.json"], d).status.code(), Some(2));

    std::fs::write(d.join("grid.json"), r#"{"kind":"rate-probe","sample_sizes":[100],"replicates":5}"#).unwrap();
    assert_eq!(nalbn(&["experiment", "--config", "grid.json"], d).status.code(), Some(2));

    let o = nalbn(&["sample", "--net", "missing.json", "--n", "5", "--out", "x.csv"], d);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("cfg.json"),
        r#"{"kind":"two-node","sample_sizes":[100],"missing":[{"type":"beta","beta":1.0}],
            "penalties":[{"type":"aic"}],"replicates":50,"seed":1,"out":"res"}"#,
    )
    .unwrap();
    let o = nalbn(&["experiment", "--config", "cfg.json"], d);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(d.join("res/table1.csv")).unwrap();
    assert!(text.starts_with("beta,n,penalty,wrong_pct,mc_se\n"), "{text}");
}
