//! End-to-end runs of the `vrjp-lab` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vrjp-lab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&read(dir, "report.json")).unwrap()
}

const SMALL_SAMPLE: &[&str] = &["--seed", "5", "sample", "--kind", "box", "--n", "2", "--samples", "2000", "--chains", "2", "--burn-in", "100", "--y", "1,0", "--y", "2,1"];

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    assert!(lab(&out, SMALL_SAMPLE).status.code().is_some());
    let first = (read(&out, "estimates.csv"), read(&out, "report.json"));
    lab(&out, SMALL_SAMPLE);
    assert_eq!(first, (read(&out, "estimates.csv"), read(&out, "report.json")));

    let mut other = SMALL_SAMPLE.to_vec();
    other[1] = "6";
    lab(&out, &other);
    assert_ne!(first.0, read(&out, "estimates.csv"));
}

#[test]
fn estimates_table_has_the_documented_columns() {
    let tmp = tempfile::tempdir().unwrap();
    lab(tmp.path(), SMALL_SAMPLE);
    let text = read(tmp.path(), "estimates.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,y_x,y_y,s,estimate,stderr,ess,chains"));
    assert!(lines.next().unwrap().starts_with("2,1,0,1.0,"));
    assert!(lines.next().unwrap().starts_with("2,2,1,1.0,"));
}

#[test]
fn embedded_config_reproduces_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("decay");
    let args = ["--seed", "9", "decay", "--n", "2", "--samples", "2000", "--chains", "2", "--burn-in", "100", "--y", "1,0", "--y", "2,2"];
    lab(&out, &args);
    let original = read(&out, "report.json");
    let decay = read(&out, "decay.csv");
    let config = report(&out)["metadata"]["config"].as_str().unwrap().to_owned();
    let path = tmp.path().join("rerun.toml");
    fs::write(&path, config).unwrap();
    fs::remove_dir_all(&out).unwrap();

    let rerun = Command::new(env!("CARGO_BIN_EXE_vrjp-lab"))
        .arg("--config")
        .arg(&path)
        .arg("decay")
        .output()
        .unwrap();
    assert!(rerun.status.code().is_some());
    assert_eq!(read(&out, "report.json"), original);
    assert_eq!(read(&out, "decay.csv"), decay);
}

#[test]
fn decay_bound_column_follows_from_r_s_and_wbar() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["decay", "--n", "2", "--samples", "1000", "--chains", "2", "--burn-in", "50", "--y", "1,0", "--y", "2,0", "--y", "1,1", "--y", "2,2"];
    lab(tmp.path(), &args);
    let mut rdr = csv::Reader::from_path(tmp.path().join("decay.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header.join(","), "N,y_x,y_y,s,Wbar,R,eta_instance,eta_asymptotic,bound,estimate,stderr,pass");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let f = |name: &str| rec[col(name)].parse::<f64>().unwrap();
        let (r, s, wbar) = (f("R"), f("s"), f("Wbar"));
        let q = 1.0 / (1.0 - s);
        let bound = (-r * s * s / (8.0 * q * q * (wbar + 1.0))).exp();
        assert!((f("bound") - bound).abs() <= 1e-15, "{} vs {bound}", f("bound"));
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn resistance_row_for_a_box_site() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(tmp.path(), &["resistance", "--n", "3", "--y", "2,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(tmp.path(), "resistance.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,y_x,y_y,R,nash_williams,max_current"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&row[..3], &[3.0, 2.0, 0.0]);
    // Nash-Williams with |y|_inf = 2 is the single term 1/12
    assert!((row[4] - 1.0 / 12.0).abs() < 1e-15);
    assert!(row[3] >= row[4] && row[5] <= 1.0 + 1e-8);
}

#[test]
fn first_jump_is_proportional_to_conductance() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = tmp.path().join("star.edges");
    fs::write(&edges, "# a star\n0 1 0.5\n0 2 1.5\n0 3 2\n").unwrap();
    let out = lab(tmp.path(), &["vrjp", "--edges", edges.to_str().unwrap(), "--k", "1", "--runs", "200000", "--trajectory"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let law: serde_json::Value = serde_json::from_str(&read(tmp.path(), "jump_chain_law.json")).unwrap();
    for (v, w) in [("1", 0.5), ("2", 1.5), ("3", 2.0)] {
        let p = law["law"][v]["prob"].as_f64().unwrap();
        let se = law["law"][v]["stderr"].as_f64().unwrap();
        assert!((p - w / 4.0).abs() < 4.0 * se, "{v}: {p}");
    }
    let traj = read(tmp.path(), "trajectory.csv");
    assert_eq!(traj.lines().count(), 3);
    assert!(traj.starts_with("time,vertex\n0.0,0\n"));
}

#[test]
fn two_vertex_sampler_passes_ks() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(tmp.path(), &["--seed", "3", "sample", "--kind", "two-vertex", "--samples", "40000", "--chains", "4"]);
    let r = report(tmp.path());
    let ks = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "KS distance to quadrature marginal").unwrap();
    assert_eq!(ks["status"], "pass", "{ks}");
    assert!(ks["observed"].as_f64().unwrap() < 0.02);
    assert_ne!(out.status.code(), Some(1));
}

#[test]
fn graph_command_writes_a_parseable_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab(tmp.path(), &["graph", "--n", "2", "--wh", "1", "--wv", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let meta: serde_json::Value = serde_json::from_str(&read(tmp.path(), "graph.json")).unwrap();
    assert_eq!(meta["vertices"], 26);
    let edges = read(tmp.path(), "graph.edges");
    let g = vrjp_lab::graphs::parse_edge_list(&edges, Some(meta["root"].as_u64().unwrap())).unwrap();
    assert_eq!(g.n_vertices(), 26);
    let vertices = read(tmp.path(), "vertices.csv");
    assert!(vertices.starts_with("index,label,degree\n"));
    assert!(vertices.contains(",boundary,"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = lab(tmp.path(), &["resistance", "--n", "2", "--y", "1,1"]);
    assert_eq!(ok.status.code(), Some(0));

    // the origin is the root
    let bad = lab(tmp.path(), &["decay", "--y", "0,0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("decay.y"));

    let outside = lab(tmp.path(), &["resistance", "--n", "2", "--y", "5,0"]);
    assert_eq!(outside.status.code(), Some(1));

    let usage = lab(tmp.path(), &["sample", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(1));

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[sampler]\nchains = \"four\"\n").unwrap();
    let parse = Command::new(env!("CARGO_BIN_EXE_vrjp-lab")).arg("--config").arg(&cfg).arg("graph").output().unwrap();
    assert_eq!(parse.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&parse.stderr);
    assert!(msg.contains("chains") && msg.contains("line 2"), "{msg}");

    // too few samples for the effective-sample-size floor
    let thin = lab(tmp.path(), &["decay", "--n", "2", "--samples", "200", "--chains", "2", "--burn-in", "20", "--y", "2,0"]);
    assert_eq!(thin.status.code(), Some(2), "{}", String::from_utf8_lossy(&thin.stdout));

    let help = Command::new(env!("CARGO_BIN_EXE_vrjp-lab")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
