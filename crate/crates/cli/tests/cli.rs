use std::fs;
use std::path::PathBuf;
use std::process::Command;

use tempfile::TempDir;

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn csa(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let mut full = vec!["csa"];
    full.extend_from_slice(args);
    let code = csa_cli::run(full, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

#[test]
fn split_writes_the_golden_system() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("qs.sys");
    let r = csa(&[
        "split",
        "--variant",
        "ode4",
        "--in",
        &fixture("base/quadratic_source.ode"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let got = csa::DifferentialSystem::parse(&fs::read_to_string(&out).unwrap()).unwrap();
    let want = csa::DifferentialSystem::parse(&fs::read_to_string(fixture("golden/quadratic_source_ode4.sys")).unwrap())
        .unwrap();
    assert_eq!(got.equations, want.equations);
}

#[test]
fn three_equation_split_reports_recipe_residuals() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.sys");
    let r = csa(&[
        "split",
        "--variant",
        "ode3",
        "--in",
        &fixture("base/quadratic_source.ode"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("recipe residual 1: (y^2 - z^2)/s^5"), "{}", r.stdout);
}

#[test]
fn check_cr_exit_codes_and_json() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("r.json");
    let ok = csa(&["check-cr", "--in", &fixture("golden/emden_fowler_pde4x2.sys")]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let bad = csa(&[
        "check-cr",
        "--in",
        &fixture("golden/quadratic_source_ode3_printed.sys"),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.contains("k_z = -l_y"), "{}", bad.stderr);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["verdict"], false);
    assert!(v["conditions"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn perturbed_system_names_the_failing_condition() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.sys");
    let ode = csa::ScalarODE::parse("s", "u", "u^2 + s*u'").unwrap();
    let sys = csa::split(&ode, csa::SplitVariant::Ode2).unwrap().system;
    let bent = csa::cr::perturb(&sys, 1).unwrap();
    fs::write(&path, bent.to_string()).unwrap();
    let r = csa(&["check-cr", "--in", path.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let id = csa::cr::point_condition_id(&sys, 1).unwrap();
    assert_eq!(r.stderr.trim(), format!("failing conditions: {id}"));
}

#[test]
fn reconstruct_recovers_the_base() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("base.ode");
    let r = csa(&["reconstruct", "--in", &fixture("golden/emden_fowler_ode4.sys"), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ode = csa::ScalarODE::from_system(&csa::DifferentialSystem::parse(&fs::read_to_string(&out).unwrap()).unwrap())
        .unwrap();
    assert_eq!(ode.rhs.to_string(), "(-s*u^2 - 5*u')/s");
    let refused = csa(&[
        "reconstruct",
        "--in",
        &fixture("golden/quadratic_source_ode3_printed.sys"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(refused.code, 1);
}

#[test]
fn symmetry_verify_and_solve() {
    let ok = csa(&[
        "symmetry",
        "verify",
        "--gen",
        &fixture("generators/emden_fowler_ode4.gen"),
        "--sys",
        &fixture("golden/emden_fowler_ode4.sys"),
    ]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let no = csa(&[
        "symmetry",
        "verify",
        "--gen",
        &fixture("generators/quadratic_source_ode3.gen"),
        "--sys",
        &fixture("golden/quadratic_source_ode3_printed.sys"),
    ]);
    assert_eq!(no.code, 1);
    assert!(no.stdout.contains("not a symmetry [2*y*z/s^5, 2*x*z/s^5, 2*x*y/s^5]"), "{}", no.stdout);

    let dir = TempDir::new().unwrap();
    let gens = dir.path().join("free.gen");
    let solved = csa(&[
        "symmetry",
        "solve",
        "--degree",
        "2",
        "--sys",
        &fixture("base/free_particle.ode"),
        "--out",
        gens.to_str().unwrap(),
    ]);
    assert_eq!(solved.code, 0);
    assert!(solved.stdout.starts_with("8 generators"));
    let closure = csa(&["closure", "--gens", gens.to_str().unwrap()]);
    assert_eq!(closure.stdout.trim(), "closure dimension 8");
}

#[test]
fn xcheck_passes_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let sys = dir.path().join("ef2.sys");
    let init = dir.path().join("init.txt");
    let csv = dir.path().join("t.csv");
    fs::write(&init, "u = 1, 0.1\nu' = 0, 0\n").unwrap();
    assert_eq!(
        csa(&["split", "--variant", "ode2", "--in", &fixture("base/emden_fowler.ode"), "--out", sys.to_str().unwrap()]).code,
        0
    );
    let r = csa(&[
        "xcheck",
        "--base",
        &fixture("base/emden_fowler.ode"),
        "--sys",
        sys.to_str().unwrap(),
        "--r0",
        "1",
        "--r1",
        "2",
        "--step",
        "0.001",
        "--init",
        init.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1002);
    assert!(text.starts_with("s,"));
}

#[test]
fn audit_lists_deviations() {
    let exact = csa(&["audit", "--group", "ode4"]);
    assert_eq!((exact.code, exact.stdout.trim()), (0, "ode4: exact"));
    let typo = csa(&["audit", "--group", "pde4x2-point"]);
    assert_eq!(typo.code, 1);
    assert!(typo.stdout.contains("printed `k_z = -l_w` is not derived"));
    assert_eq!(csa(&["audit", "--group", "nope"]).code, 2);
}

#[test]
fn fmt_is_idempotent() {
    let first = csa(&["fmt", "--in", &fixture("golden/emden_fowler_pde4x2.sys")]);
    assert_eq!(first.code, 0);
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("a.sys");
    fs::write(&p, &first.stdout).unwrap();
    assert_eq!(csa(&["fmt", "--in", p.to_str().unwrap()]).stdout, first.stdout);
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    assert_eq!(csa(&["split"]).code, 2);
    assert_eq!(csa(&["fmt", "--in", "/nonexistent/file.sys"]).code, 2);
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.sys");
    fs::write(&p, "indep: s\ndep: u\neq: u'' = (\n").unwrap();
    let r = csa(&["fmt", "--in", p.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error:"));
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_csa"))
        .args(["audit", "--group", "ode2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ode2: exact");
}
