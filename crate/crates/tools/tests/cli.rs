//! End-to-end runs of the `bellpoly` binary.

use std::path::Path;
use std::process::{Command, Output};

use bellpoly::formats::{inequalities_from_csv, inequality_to_csv, read_vertex_file, Catalog};
use bellpoly::reproduce::FileCheckpoint;
use bellpoly_core::polytope::{enumerate_facets_with, RelabelingGroup};
use bellpoly_core::vertices::enumerate_local;
use bellpoly_core::{catalog, BellInequality, Rational, Scenario, Space};

fn bellpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellpoly")).args(args).output().expect("runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = bellpoly(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

#[test]
fn vertex_counts() {
    for (model, count) in [("L[3]", 64), ("PTO[A<B]", 256), ("PTO[2/1]", 1216), ("SV[2|1]", 2944), ("NS[2/2]", 1216)] {
        let o = bellpoly(&["vertices", model]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stderr(&o).trim(), format!("{model} count={count}"));
        let text = stdout(&o);
        let v = read_vertex_file(text.as_bytes(), "stdout").unwrap();
        assert_eq!(v.len(), count);
    }
}

#[test]
fn vertex_output_is_deterministic_and_traced() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.txt");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = ok(&["--out", path.to_str().unwrap(), "vertices", "PTO[order=A<B<C]"]);
        assert_eq!(out.trim(), "PTO[order=A<B<C] count=640");
        runs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let ta = runs.pop().unwrap();
    let text = String::from_utf8(ta).unwrap();
    let manifest = text.lines().nth(1).unwrap();
    assert!(manifest.starts_with("# manifest: {\"command\":\"bellpoly --out"), "{manifest}");
    assert!(!manifest.contains("wall_time"));
}

#[test]
fn evaluations() {
    assert!(ok(&["eval", "i_opt", "PSI_OPT"]).starts_with("28.8885438200 bound 19"));
    assert_eq!(ok(&["eval", "chsh", "uniform:2"]).trim(), "0 bound 2");
    assert!(ok(&["eval", "svetlichny", "GHZ3_paper"]).starts_with("5.6568542495"));
}

#[test]
fn visibilities_and_membership() {
    let v = |m: &str| ok(&["visibility", "W3_paper", m]);
    assert_eq!(v("PTO[order=B<C<A]").trim(), "v_max PTO[order=B<C<A] 0.9137699706");
    assert!(v("NS[2/1]").trim().starts_with("v_max NS[2/1] 0.8477"));
    let inside = |w: &str| ok(&["membership", "GHZ3_paper", "L[3]", "--mix", w]);
    assert_eq!(inside("0.70").trim(), "inside L[3]");
    assert_eq!(inside("0.71").trim(), "outside L[3]");
    // exact backend on a rational table
    assert_eq!(ok(&["--backend", "rational", "visibility", "uniform:3", "L[3]"]).trim(), "v_max L[3] 1 (1.0000000000)");
}

#[test]
fn facets_and_families() {
    let dir = tempfile::tempdir().unwrap();
    let facets = dir.path().join("l2.csv");
    let o = bellpoly(&["--out", facets.to_str().unwrap(), "facets", "L[2]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stderr(&o).trim(), "facets=24 equalities=0 dim=8");
    let ineqs = inequalities_from_csv::<Rational>(&std::fs::read_to_string(&facets).unwrap(), "l2.csv").unwrap();
    assert_eq!(ineqs.len(), 24);

    let cat = dir.path().join("families.json");
    let out = ok(&["--out", cat.to_str().unwrap(), "canon", facets.to_str().unwrap()]);
    assert!(out.ends_with("families=2\n"));
    let catalog = Catalog::from_json(&std::fs::read_to_string(&cat).unwrap()).unwrap();
    let mut orbits: Vec<usize> = catalog.families.iter().map(|f| f.orbit_size).collect();
    orbits.sort();
    assert_eq!(orbits, vec![8, 16]);
}

#[test]
fn relabeled_inequalities_share_a_hash() {
    let chsh = catalog::chsh();
    let group = RelabelingGroup::new(Scenario::bipartite());
    let images: Vec<BellInequality> = [0, 7, 55, 127]
        .iter()
        .map(|&g| BellInequality::new(chsh.scenario(), Space::Correlator, group.apply(g, chsh.coeffs()), chsh.bound().clone()).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.csv");
    std::fs::write(&path, images.iter().map(inequality_to_csv).collect::<String>()).unwrap();
    let catalog = Catalog::from_json(&ok(&["canon", path.to_str().unwrap()])).unwrap();
    assert_eq!(catalog.families.len(), 1);
    assert_eq!(catalog.families[0].orbit_size, 8);
    let input_hash = catalog.manifest.unwrap().inputs.values().next().cloned().unwrap();
    assert_eq!(input_hash, bellpoly::manifest::sha256_hex(&std::fs::read(&path).unwrap()));
}

#[test]
fn seesaw_is_thread_count_independent() {
    let one = ok(&["--threads", "1", "seesaw", "chsh", "--restarts", "6"]);
    let three = ok(&["--threads", "3", "seesaw", "chsh", "--restarts", "6"]);
    assert_eq!(one, three);
    assert!(one.starts_with("value 2.8284271247 bound 2"), "{one}");
}

#[test]
fn facets_resume_from_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("dd.json");
    let points: Vec<Vec<Rational>> =
        enumerate_local(Scenario::bipartite()).points().iter().map(|p| p.to_rationals()).collect();
    let mut obs = FileCheckpoint { interval: 4, ..FileCheckpoint::new(ckpt.clone()) };
    enumerate_facets_with(&points, None, &mut obs).unwrap();
    assert!(Path::new(&ckpt).is_file());
    let fresh = bellpoly(&["facets", "L[2]"]);
    let resumed = bellpoly(&["facets", "L[2]", "--checkpoint", ckpt.to_str().unwrap(), "--resume"]);
    assert_eq!(resumed.status.code(), Some(0), "{}", stderr(&resumed));
    // identical facets; only the manifest's command line differs
    let body = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("# manifest")).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&fresh), body(&resumed));
}

#[test]
fn exit_codes() {
    assert_eq!(bellpoly(&["--help"]).status.code(), Some(0));
    assert_eq!(bellpoly(&["--version"]).status.code(), Some(0));
    let o = bellpoly(&["vertices", "L[9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
    assert_eq!(bellpoly(&["eval", "chsh", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(bellpoly(&["facets", "L[3]"]).status.code(), Some(2), "64 points need --long");
    assert_eq!(bellpoly(&["reproduce", "sym-facets"]).status.code(), Some(2));
    let o = bellpoly(&["reproduce", "sym-vertices", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn reproduce_reports_failures_with_exit_one() {
    let o = bellpoly(&["reproduce", "table1"]);
    let text = stdout(&o);
    let failed: Vec<&str> = text.lines().filter(|l| l.ends_with("FAIL")).collect();
    // exit code follows the report
    assert_eq!(o.status.code(), Some(if failed.is_empty() { 0 } else { 1 }));
    assert_eq!(text.lines().filter(|l| l.ends_with("PASS") || l.ends_with("FAIL")).count(), 18);
}
