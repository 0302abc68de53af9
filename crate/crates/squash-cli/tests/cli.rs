use std::path::Path;
use std::process::{Command, Output};

use squash_core::geom::p3;
use squash_core::io::{read_off, read_xyz, write_xyz};
use squash_core::report::VerificationReport;
use squash_core::PointCloud;
use tempfile::TempDir;

fn squash(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squash")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn report(p: &str) -> VerificationReport {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn sample(dir: &TempDir, name: &str, surface: &str, eps: &str, seed: &str) -> String {
    let out = path(dir, name);
    let o = squash(&["sample", "--surface", surface, "--eps", eps, "--seed", seed, "-o", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn sampling_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = sample(&dir, "a.xyz", "sphere r=1", "0.2", "7");
    let b = sample(&dir, "b.xyz", "sphere r=1", "0.2", "7");
    let c = sample(&dir, "c.xyz", "sphere r=1", "0.2", "8");
    let bytes = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&c));
    let ply = path(&dir, "a.ply");
    assert_eq!(code(&squash(&["sample", "--surface", "sphere r=1", "--eps", "0.2", "--seed", "7", "-o", &ply])), 0);
    let from_ply = squash_core::io::read_ply_cloud(std::io::BufReader::new(std::fs::File::open(&ply).unwrap())).unwrap();
    let from_xyz = read_xyz(std::io::BufReader::new(std::fs::File::open(&a).unwrap())).unwrap();
    assert_eq!(from_ply.points, from_xyz.points);
}

#[test]
fn practical_reconstruction_writes_every_artifact() {
    let dir = TempDir::new().unwrap();
    let cloud = sample(&dir, "s.xyz", "sphere r=1", "0.15", "7");
    let mesh = path(&dir, "s.off");
    let o = squash(&["reconstruct", "--mode", "practical", "--alpha-ratio", "0.207", "-i", &cloud, "--surface", "sphere r=1", "-o", &mesh, "--snapshot-every", "1"]);
    // the report is written whatever the gate says
    assert!(matches!(code(&o), 0 | 2), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&path(&dir, "s.report.json"));
    assert_eq!(r.topology.as_ref().unwrap().euler_characteristic, 2);
    assert!(r.topology.as_ref().unwrap().matches_expected);
    assert_eq!(r.config.alpha_ratio, Some(0.207));
    assert_eq!(r.resolved.alpha, Some(0.207));
    let k = read_off(std::io::BufReader::new(std::fs::File::open(&mesh).unwrap())).unwrap();
    assert_eq!(k.euler_characteristic(), 2);
    assert!(Path::new(&path(&dir, "s.trace.jsonl")).exists());
    assert!(Path::new(&path(&dir, "s.snapshots.jsonl")).exists());

    // practical mode runs without a surface
    let bare = path(&dir, "bare.off");
    let o = squash(&["reconstruct", "--mode", "practical", "--alpha", "0.207", "-i", &cloud, "-o", &bare]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&bare).unwrap(), std::fs::read(&mesh).unwrap());
}

#[test]
fn naive_reconstruction_and_verification_agree() {
    let dir = TempDir::new().unwrap();
    let cloud = sample(&dir, "s.xyz", "sphere r=1", "0.2", "1");
    let mesh = path(&dir, "s.ply");
    let dot = path(&dir, "dual.dot");
    let o = squash(&["reconstruct", "--surface", "sphere r=1", "--eps-ratio", "0.2", "--alpha-ratio", "0.359", "-i", &cloud, "-o", &mesh, "--dump-dual", &dot]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let out = path(&dir, "v.json");
    let o = squash(&["verify", "--surface", "sphere r=1", "--eps-ratio", "0.2", "--alpha-ratio", "0.359", "-i", &cloud, "--mesh", &mesh, "-o", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r.hypotheses_hold(), Some(true));
    assert!(r.topology.unwrap().matches_expected);
    assert_eq!(r.restricted.unwrap().output_equals_core, Some(true));
}

#[test]
fn circle_reconstruction_writes_an_edge_list() {
    let dir = TempDir::new().unwrap();
    let cloud = sample(&dir, "c.xyz", "circle r=1", "0.2", "3");
    let edges = path(&dir, "c.edges");
    let o = squash(&["reconstruct", "--surface", "circle r=1", "--eps", "0.2", "--alpha", "0.3", "-i", &cloud, "-o", &edges]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let k = squash_core::io::read_edge_list(std::io::BufReader::new(std::fs::File::open(&edges).unwrap())).unwrap();
    assert_eq!(k.count(1), k.count(0));
}

#[test]
fn region_csv_has_header_and_probes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "region.csv");
    assert_eq!(code(&squash(&["region", "--mode", "both", "--grid", "50", "-o", &out])), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eps_over_R,alpha_over_R,naive_feasible,practical_feasible"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50 * 50 + 3);
    assert!(rows.contains(&"0.225,0.359,true,false"));
    assert!(rows.contains(&"0.5,0.5,false,false"));
    // the quoted practical point lies just outside the computed region
    assert!(rows.contains(&"0.178,0.207,false,false"));

    let naive = path(&dir, "naive.csv");
    assert_eq!(code(&squash(&["region", "--mode", "naive", "--grid", "5", "--sequential", "-o", &naive])), 0);
    assert!(std::fs::read_to_string(&naive).unwrap().starts_with("eps_over_R,alpha_over_R,naive_feasible\n"));
}

#[test]
fn schema_validates_a_cli_report() {
    let dir = TempDir::new().unwrap();
    let schema_path = path(&dir, "schema.json");
    assert_eq!(code(&squash(&["schema", "-o", &schema_path])), 0);
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&schema_path).unwrap()).unwrap();
    let printed = squash(&["schema"]);
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&printed.stdout).unwrap(), schema);

    let cloud = sample(&dir, "s.xyz", "sphere r=1", "0.25", "2");
    let mesh = path(&dir, "s.off");
    squash(&["reconstruct", "--surface", "sphere r=1", "--alpha", "0.359", "-i", &cloud, "-o", &mesh]);
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path(&dir, "s.report.json")).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errs: Vec<String> = v.iter_errors(&rep).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{errs:#?}");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = path(&dir, "missing.xyz");
    let out = path(&dir, "o.off");
    // 1: unreadable input, bad arguments, malformed files
    assert_eq!(code(&squash(&["reconstruct", "--mode", "practical", "--alpha", "0.2", "-i", &missing, "-o", &out])), 1);
    assert_eq!(code(&squash(&["reconstruct", "--bogus"])), 1);
    assert_eq!(code(&squash(&["sample", "--surface", "cube", "--eps", "0.2", "-o", &out])), 1);
    let junk = path(&dir, "junk.xyz");
    std::fs::write(&junk, "1 2 x\n").unwrap();
    assert_eq!(code(&squash(&["reconstruct", "--mode", "practical", "--alpha", "0.2", "-i", &junk, "-o", &out])), 1);
    assert_eq!(code(&squash(&["reconstruct", "--alpha", "0.2", "-i", &junk, "-o", &out])), 1);
    assert_eq!(code(&squash(&["--version"])), 0);

    // 2: hypotheses fail, artifacts still written
    let cloud = sample(&dir, "sparse.xyz", "sphere r=1", "0.5", "4");
    let mesh = path(&dir, "sparse.off");
    let o = squash(&["reconstruct", "--surface", "sphere r=1", "--eps", "0.5", "--alpha", "0.5", "-i", &cloud, "-o", &mesh]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(&mesh).exists());
    assert_eq!(report(&path(&dir, "sparse.report.json")).hypotheses_hold(), Some(false));

    // 3: a Voronoi vertex on the surface breaks the non-crossing contract
    let r = 0.3 / 3f64.sqrt();
    let pts = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        .iter()
        .map(|v| p3(1.0 + v[0] * r, v[1] * r, v[2] * r))
        .collect();
    let tet = path(&dir, "tet.xyz");
    let mut f = std::fs::File::create(&tet).unwrap();
    write_xyz(&mut f, &PointCloud::external(3, pts).unwrap()).unwrap();
    let o = squash(&["reconstruct", "--mode", "noncrossing", "--surface", "sphere r=1", "--alpha", "10", "-i", &tet, "-o", &out]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}
