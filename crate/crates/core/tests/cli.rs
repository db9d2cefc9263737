use std::path::Path;
use std::process::{Command, Output};

fn trigraph(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigraph"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn oracle_edge_probability() {
    let dir = tempfile::tempdir().unwrap();
    let o = trigraph(&["oracle", "--degrees", "1,1,1,1", "--edge", "0,1"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.333333\n1/3\n");

    let o = trigraph(&["oracle", "--degrees", "2,2,2,2", "--edge", "0,1", "--given", "0,2"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("1/2"));
}

#[test]
fn pipeline_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let o = trigraph(&["generate-degrees", "--n", "300", "--tau", "2.5", "--out", "d.txt"], p);
    assert!(o.status.success());
    let o = trigraph(&["sample", "--model", "uniform", "--degrees", "d.txt", "--seed", "3", "--out", "g.edges"], p);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("g.edges.stats.json")).unwrap()).unwrap();
    assert!(stats["attempted"].as_u64().unwrap() > 0);

    let a = trigraph(&["triangles", "g.edges"], p);
    let b = trigraph(&["--threads", "1", "triangles", "g.edges"], p);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).trim().parse::<u64>().is_ok());

    let o = trigraph(&["ck", "g.edges"], p);
    assert!(stdout(&o).starts_with("k,N_k,triangles_k,c_k\n"));

    // same seed, same graph
    let o = trigraph(&["sample", "--model", "uniform", "--degrees", "d.txt", "--seed", "3", "--out", "h.edges"], p);
    assert!(o.status.success());
    assert_eq!(std::fs::read(p.join("g.edges")).unwrap(), std::fs::read(p.join("h.edges")).unwrap());
}

#[test]
fn theory_prints_json_and_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let o = trigraph(
        &["theory", "--tau", "2.5", "--n", "10000", "--k-list", "3,100,2000", "--rel-tol", "1e-5"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    let json: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert!((json["A"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!(json["I_ecm"].as_f64().unwrap() > json["I_unif"].as_f64().unwrap());
    assert_eq!(lines.next(), Some("k,range,f_scale,predicted_ck"));
    let ranges: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ranges, ["I", "III", "IV"]);
}

#[test]
fn usage_errors_exit_one_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for args in [
        &["sample", "--model", "ecm", "--degrees", "2,2,2", "--switches", "5", "--out", "x.edges"][..],
        &["sample", "--model", "nope", "--degrees", "2,2,2", "--out", "x.edges"],
        &["theory", "--tau", "2.5", "--k-list", "5", "--out", "x.csv"],
        &["experiment", "--replicates", "0", "--out", "outdir"],
        &["frobnicate"],
    ] {
        let o = trigraph(args, p);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(std::fs::read_dir(p).unwrap().count(), 0);
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = trigraph(&["triangles", "missing.edges"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = trigraph(&["oracle", "--degrees", "1,1,1,1,1,1,1,1,1,1,1,1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = trigraph(&["generate-degrees", "--n", "10", "--tau", "3.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("cfg"), "# small sweep\nn_grid = 200, 400\nreplicates = 2\nmodels = uniform, grg\n").unwrap();
    let o = trigraph(&["experiment", "--config", "cfg", "--k-list", "2,3", "--epsilon", "0.2", "--out", "out"], p);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tri = std::fs::read_to_string(p.join("out/triangles.csv")).unwrap();
    assert_eq!(tri.lines().count(), 1 + 2 * 2 * 2);
    for name in ["ck.csv", "summary.json", "window_share.csv"] {
        assert!(p.join("out").join(name).exists(), "{name}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("out/summary.json")).unwrap()).unwrap();
    assert!(summary["calibration"].is_object());
}
