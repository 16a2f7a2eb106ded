use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eitff_cli::format::{CertificateFile, FrameFile};
use tempfile::TempDir;

fn eitff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eitff")).args(args).output().expect("spawn eitff")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build_to(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut all = vec!["build"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = eitff(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn rho_reports() {
    assert_eq!(stdout(&eitff(&["rho", "--field", "R", "--r", "8"])).trim(), "rho=8 a=0 b=0 c=3");
    assert_eq!(stdout(&eitff(&["rho", "--field", "C", "--r", "2"])).trim(), "rho=4 a=0 b=0 c=1");
    assert_eq!(stdout(&eitff(&["rho", "--field", "R", "--r", "48"])).trim(), "rho=9 a=1 b=1 c=0");
    assert_eq!(code(&eitff(&["rho", "--field", "Q", "--r", "2"])), 2);
    assert_eq!(code(&eitff(&["rho", "--field", "R", "--r", "0"])), 2);
}

#[test]
fn build_to_stdout_parses() {
    let o = eitff(&["build", "--field", "R", "--r", "2", "--n", "4"]);
    assert_eq!(code(&o), 0);
    let f: FrameFile = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((f.d, f.r, f.n), (4, 2, 4));
    assert_eq!(f.metadata.variant.as_deref(), Some("generic"));
    assert_eq!(f.metadata.params["r"], 2);
}

#[test]
fn build_infeasible_names_the_bound() {
    let o = eitff(&["build", "--field", "R", "--r", "2", "--n", "5"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("n <= rho+2 violated"));

    let o = eitff(&["build", "--field", "C", "--r", "1", "--n", "4", "--variant", "skew"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("n <= rho+1 violated"));

    let o = eitff(&["build", "--field", "R", "--r", "4", "--n", "6", "--variant", "totally-symmetric"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&eitff(&["build", "--field", "R", "--r", "2", "--n", "2"])), 2);
}

#[test]
fn build_verify_every_variant() {
    let dir = TempDir::new().unwrap();
    for (args, name) in [
        (["--field", "C", "--r", "4", "--n", "8", "--variant", "generic"], "c48.json"),
        (["--field", "R", "--r", "4", "--n", "5", "--variant", "skew"], "r45.json"),
        (["--field", "R", "--r", "2", "--n", "4", "--variant", "totally-symmetric"], "r24.json"),
    ] {
        let path = build_to(dir.path(), name, &args);
        let o = eitff(&["verify", p(&path)]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let text = stdout(&o);
        let first = text.lines().next().unwrap();
        for key in ["tightness=", "equiisoclinic=", "welch_gap=", "coherence=", "gerzon=ok"] {
            assert!(first.contains(key), "{first}");
        }
        assert!(text.contains("result=pass"));
    }
}

#[test]
fn verify_failures_and_format_errors() {
    let dir = TempDir::new().unwrap();
    let path = build_to(dir.path(), "ex.json", &["--field", "R", "--r", "2", "--n", "4"]);

    let mut f: FrameFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    f.isometries[1].data[2][0] += 0.25;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&f).unwrap()).unwrap();
    let o = eitff(&["verify", p(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("result=fail"));

    let text = std::fs::read_to_string(&path).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&eitff(&["verify", p(&cut)])), 4);

    let mut g = f.clone();
    g.d = 5;
    let shape = dir.path().join("shape.json");
    std::fs::write(&shape, serde_json::to_string(&g).unwrap()).unwrap();
    assert_eq!(code(&eitff(&["verify", p(&shape)])), 4);

    assert_eq!(code(&eitff(&["verify", p(&dir.path().join("missing.json"))])), 4);
    assert_eq!(code(&eitff(&["verify"])), 2);
    assert_eq!(code(&eitff(&["nonsense"])), 2);
}

#[test]
fn tighter_tolerance_can_fail() {
    let dir = TempDir::new().unwrap();
    let path = build_to(dir.path(), "c.json", &["--field", "C", "--r", "4", "--n", "8"]);
    assert_eq!(code(&eitff(&["verify", p(&path), "--tol", "1e-30"])), 1);
}

#[test]
fn naimark_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = build_to(dir.path(), "f.json", &["--field", "R", "--r", "4", "--n", "6"]);
    let comp = dir.path().join("comp.json");
    assert_eq!(code(&eitff(&["naimark", p(&path), "--out", p(&comp)])), 0);
    let f: FrameFile = serde_json::from_str(&std::fs::read_to_string(&comp).unwrap()).unwrap();
    assert_eq!((f.d, f.r, f.n), (16, 4, 6));
    assert_eq!(code(&eitff(&["verify", p(&comp), "--tol", "1e-9"])), 0);
}

#[test]
fn angles_are_constant() {
    let dir = TempDir::new().unwrap();
    let path = build_to(dir.path(), "f.json", &["--field", "R", "--r", "2", "--n", "4"]);
    let o = eitff(&["angles", p(&path)]);
    assert_eq!(code(&o), 0);
    let want = (1.0f64 / 3f64.sqrt()).acos();
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 6);
    for line in lines {
        let list = line.split("angles=").nth(1).unwrap();
        for a in list.split(',') {
            assert!((a.parse::<f64>().unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn symmetry_commands() {
    let dir = TempDir::new().unwrap();
    let ex = build_to(dir.path(), "ex.json", &["--field", "R", "--r", "2", "--n", "4"]);
    let o = eitff(&["sym", "probe", p(&ex)]);
    assert_eq!(stdout(&o).trim(), "symmetry=total (numerically-decided)");

    let c = build_to(dir.path(), "c.json", &["--field", "C", "--r", "1", "--n", "4"]);
    assert_eq!(stdout(&eitff(&["sym", "probe", p(&c)])).trim(), "symmetry=alternating (numerically-decided)");
    let o = eitff(&["sym", "witness", p(&c), "--perm", "2 1 3 4"]);
    assert_eq!(code(&o), 1);

    let cert = dir.path().join("cert.json");
    let o = eitff(&["sym", "witness", p(&ex), "--perm", "1 3 2 4", "--seed", "3", "--out", p(&cert)]);
    assert_eq!(code(&o), 0);
    let file: CertificateFile = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(file.sigma, "1 3 2 4");
    let o = eitff(&["sym", "check", p(&ex), p(&cert)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("result=pass"));

    // the same unitary does not realize a different permutation
    let mut wrong = file.clone();
    wrong.sigma = "2 1 3 4".into();
    let wpath = dir.path().join("wrong.json");
    std::fs::write(&wpath, serde_json::to_string(&wrong).unwrap()).unwrap();
    assert_eq!(code(&eitff(&["sym", "check", p(&ex), p(&wpath)])), 1);

    assert_eq!(code(&eitff(&["sym", "witness", p(&ex), "--perm", "(1 2)"])), 2);
    assert_eq!(code(&eitff(&["sym", "witness", p(&ex), "--perm", "2 1 3"])), 2);
}

#[test]
fn witness_output_is_seed_deterministic() {
    let dir = TempDir::new().unwrap();
    let ex = build_to(dir.path(), "ex.json", &["--field", "R", "--r", "2", "--n", "4"]);
    let a = stdout(&eitff(&["sym", "witness", p(&ex), "--perm", "4 3 2 1", "--seed", "11"]));
    let b = stdout(&eitff(&["sym", "witness", p(&ex), "--perm", "4 3 2 1", "--seed", "11"]));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn exists_answers() {
    let line = |args: &[&str]| {
        let o = eitff(args);
        (code(&o), stdout(&o).split(':').next().unwrap().to_string())
    };
    assert_eq!(line(&["exists", "--field", "R", "--r", "4", "--n", "6", "--total"]), (0, "unknown".into()));
    assert_eq!(line(&["exists", "--field", "R", "--r", "2", "--n", "4", "--total"]), (0, "yes".into()));
    assert_eq!(line(&["exists", "--field", "C", "--r", "1", "--n", "4", "--total"]), (3, "no".into()));
    assert_eq!(line(&["exists", "--field", "C", "--r", "4", "--n", "8"]), (0, "yes".into()));
    assert_eq!(line(&["exists", "--field", "C", "--r", "4", "--n", "9"]), (3, "no".into()));
    assert_eq!(code(&eitff(&["exists", "--field", "C", "--r", "4", "--n", "1"])), 2);
}

#[test]
fn omp_demo() {
    let dir = TempDir::new().unwrap();
    let ex = build_to(dir.path(), "ex.json", &["--field", "R", "--r", "2", "--n", "4"]);
    let o = eitff(&["omp", "demo", p(&ex), "--k", "1", "--trials", "200", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next().unwrap(), "recovered=200/200");
    assert_eq!(code(&eitff(&["omp", "demo", p(&ex), "--k", "9"])), 2);
}

#[test]
fn build_is_deterministic_and_round_trips() {
    let a = stdout(&eitff(&["build", "--field", "C", "--r", "2", "--n", "6"]));
    let b = stdout(&eitff(&["build", "--field", "C", "--r", "2", "--n", "6"]));
    assert_eq!(a, b);
    let f: FrameFile = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&f).unwrap() + "\n", a);
}
