use std::fs;
use std::path::Path;
use std::process::Command;

const FULL_TWO_VAR: &str = "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n";
const RES_PROOF: &str = "a 1\na 2\nr 1 2 2\na 3\na 4\nr 4 5 2\nr 3 6 1\n";
const CP_PROOF: &str = "a 1\na 2\nl 1 2 1 1\nd 3 2\na 3\na 4\nl 5 6 1 1\nd 7 2\nl 4 8 1 1\n";

struct Run {
    code: i32,
    stdout: String,
}

fn liftkit(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_liftkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("LIFTKIT_OUT_DIR")
        .env_remove("LIFTKIT_JOBS")
        .output()
        .expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).expect("utf-8 report") }
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.cnf"), FULL_TWO_VAR).unwrap();
    fs::write(dir.path().join("p.res"), RES_PROOF).unwrap();
    fs::write(dir.path().join("p.cpp"), CP_PROOF).unwrap();
    dir
}

fn has_line(run: &Run, line: &str) -> bool {
    run.stdout.lines().any(|l| l == line)
}

#[test]
fn oracle_depth_of_full_two_variable_contradiction() {
    let d = workspace();
    let r = liftkit(d.path(), &["oracle", "--cnf", "f.cnf", "--measure", "depth"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("report=oracle version=1\n"));
    assert!(has_line(&r, "depth=2"));
}

#[test]
fn measure_reports_every_measure() {
    let d = workspace();
    let r = liftkit(d.path(), &["measure", "--cnf", "f.cnf", "--jobs", "4"]);
    assert_eq!(r.code, 0);
    for line in ["depth=2", "tree_size=7", "width=2", "block_width=2", "relation_depth=2"] {
        assert!(has_line(&r, line), "missing {line} in\n{}", r.stdout);
    }
}

#[test]
fn compose_writes_artifacts_deterministically() {
    let d = workspace();
    let r = liftkit(d.path(), &["compose", "--cnf", "f.cnf", "--m", "4"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(has_line(&r, "clauses=64"));
    let cnf = fs::read(d.path().join("f.lifted.cnf")).unwrap();
    let manifest = fs::read(d.path().join("f.manifest.json")).unwrap();
    let out = tempfile::tempdir().unwrap();
    let r2 = liftkit(d.path(), &["compose", "--cnf", "f.cnf", "--m", "4", "--out-dir", out.path().to_str().unwrap()]);
    assert_eq!(r2.code, 0);
    assert_eq!(fs::read(out.path().join("f.lifted.cnf")).unwrap(), cnf);
    assert_eq!(fs::read(out.path().join("f.manifest.json")).unwrap(), manifest);
}

#[test]
fn verify_cp_exit_codes() {
    let d = workspace();
    let ok = liftkit(d.path(), &["verify-cp", "--cnf", "f.cnf", "--proof", "p.cpp", "--mode", "semantic"]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    fs::write(d.path().join("bad.cpp"), "a 1\nd 1 2\n").unwrap();
    let bad = liftkit(d.path(), &["verify-cp", "--cnf", "f.cnf", "--proof", "bad.cpp"]);
    assert_eq!(bad.code, 1);
    assert!(has_line(&bad, "status=fail"));
    fs::write(d.path().join("junk.cpp"), "x y z\n").unwrap();
    assert_eq!(liftkit(d.path(), &["verify-cp", "--cnf", "f.cnf", "--proof", "junk.cpp"]).code, 2);
    assert_eq!(liftkit(d.path(), &["verify-cp", "--cnf", "missing.cnf", "--proof", "p.cpp"]).code, 2);
}

#[test]
fn usage_errors_exit_two() {
    let d = workspace();
    assert_eq!(liftkit(d.path(), &["oracle", "--cnf", "f.cnf", "--measure", "nope"]).code, 2);
    assert_eq!(liftkit(d.path(), &["no-such-command"]).code, 2);
}

#[test]
fn resolution_lifting_round_trip() {
    let d = workspace();
    let res = liftkit(d.path(), &["verify-res", "--cnf", "f.cnf", "--proof", "p.res"]);
    assert_eq!(res.code, 0);
    assert!(has_line(&res, "length=7"));
    let lift = liftkit(d.path(), &["lift-dag", "--cnf", "f.cnf", "--proof", "p.res", "--m", "2", "--verify"]);
    assert_eq!(lift.code, 0, "{}", lift.stdout);
    assert!(has_line(&lift, "within_bound=true") && has_line(&lift, "verified=true"));
    assert_eq!(liftkit(d.path(), &["compose", "--cnf", "f.cnf", "--m", "2"]).code, 0);
    let dag = liftkit(d.path(), &["verify-dag", "--cnf", "f.cnf", "--dag", "p.lifted.dag", "--manifest", "f.manifest.json"]);
    assert_eq!(dag.code, 0, "{}", dag.stdout);
    let plain = liftkit(d.path(), &["verify-dag", "--cnf", "f.cnf", "--dag", "p.lifted.dag"]);
    assert_eq!(plain.code, 1);
}

#[test]
fn lift_tree_meets_depth_bound() {
    let d = workspace();
    let r = liftkit(d.path(), &["lift-tree", "--cnf", "f.cnf", "--m", "4", "--verify"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(has_line(&r, "depth_bound=6") && has_line(&r, "verified=true"));
}

#[test]
fn simulate_every_assignment() {
    let d = workspace();
    let r = liftkit(d.path(), &["simulate", "--cnf", "f.cnf", "--m", "2", "--jobs", "2"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.stdout.lines().filter(|l| l.contains("falsified=true")).count(), 4);
    let one = liftkit(d.path(), &["simulate", "--cnf", "f.cnf", "--m", "2", "--z", "01"]);
    assert!(one.stdout.lines().any(|l| l.starts_with("step=1 node=0")));
}

#[test]
fn entropy_partition_and_fourier() {
    let d = workspace();
    fs::write(d.path().join("x.dist"), "coord a 4\ncoord b 4\np 0 0 1/4\np 0 1 1/4\np 1 2 1/4\np 2 3 1/4\n").unwrap();
    let e = liftkit(d.path(), &["entropy", "--dist", "x.dist"]);
    assert!(has_line(&e, "min_entropy=2") && has_line(&e, "blockwise_min_entropy=1"));
    let p = liftkit(d.path(), &["partition", "--dist", "x.dist"]);
    assert_eq!(p.code, 0, "{}", p.stdout);
    assert!(has_line(&p, "theta=19/10"));
    fs::write(d.path().join("lam.dist"), "coord a 2\ncoord b 2\np 0 0 1/4\np 0 1 1/4\np 1 0 1/4\np 1 1 1/4\n").unwrap();
    fs::write(d.path().join("gam.dist"), "coord a 4\ncoord b 4\np 1 2 1/2\np 2 1 1/2\n").unwrap();
    let f = liftkit(d.path(), &["fourier", "--lambda", "lam.dist", "--gamma", "gam.dist", "--subset", "0,1"]);
    assert_eq!(f.code, 0);
    assert!(has_line(&f, "bound=25/8") && has_line(&f, "expectation=0"));
}

#[test]
fn round_and_cleanup() {
    let d = workspace();
    fs::write(d.path().join("b.box"), "box n 1 ell 1 m 4\nx 0\nx 1\nx 2\nx 3\ny 0 0 0110\ny 0 0 1001\n").unwrap();
    let r = liftkit(d.path(), &["round", "--box", "b.box", "--micro"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(has_line(&r, "coords=[]"));
    let mut sx = String::from("simplex\npart x 2 order 0 1\npart r 4 order 0 1 2 3\n");
    for a in 0..2 {
        for b in 0..4 {
            if a + b <= 2 {
                sx.push_str(&format!("member {a} {b}\n"));
            }
        }
    }
    fs::write(d.path().join("t.sx"), sx).unwrap();
    let c = liftkit(d.path(), &["cleanup", "--simplex", "t.sx", "--m", "2", "--n", "1"]);
    assert_eq!(c.code, 0, "{}", c.stdout);
    assert!(has_line(&c, "condition=empty_or_heavy measured=0 threshold=0 pass=true"));
}
