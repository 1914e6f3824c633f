use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn config(name: &str) -> PathBuf {
    root().join("configs").join(name)
}

fn golden(name: &str) -> PathBuf {
    root().join("tests/golden").join(name)
}

fn hspec(name: &str) -> PathBuf {
    root().join("../core/hspec").join(name)
}

fn ccsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccsim"))
        .args(args)
        .env_remove("CCSIM_BLESS")
        .output()
        .expect("spawn ccsim")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn default_cavity_run_passes() {
    let out = ccsim(&["run", p(&config("boson_cavity_default.toml"))]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("check,residual,tolerance,passed,context\r\n"));
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(3) == Some("true")));
}

#[test]
fn half_pulse_fails_with_exit_1() {
    let out = ccsim(&["run", p(&config("boson_cavity_half_tau.toml"))]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("pulse_condition,")).unwrap();
    assert_eq!(row.split(',').nth(3), Some("false"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pulse_condition"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ccsim(&["run", p(&dir.path().join("missing.toml"))])), 2);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[scenario]\nscheme = \"two_axis\"\n[model]\nlambda = 3.0\n").unwrap();
    let out = ccsim(&["run", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));

    let out = ccsim(&["scan", p(&config("two_axis.toml")), "--param", "nope", "--grid", "0.1"]);
    assert_eq!(code(&out), 2);
    let out = ccsim(&["scan", p(&config("two_axis.toml")), "--param", "ratio", "--grid", ","]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&ccsim(&["derive", p(&dir.path().join("missing.hspec"))])), 2);
    assert_eq!(code(&ccsim(&["frobnicate"])), 2);
}

#[test]
fn unitarity_loss_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.toml");
    let text = std::fs::read_to_string(config("fermion.toml"))
        .unwrap()
        .replace("steps_per_period = 64", "steps_per_period = 64\nunitarity_bound = 1e-300");
    std::fs::write(&path, text).unwrap();
    let out = ccsim(&["run", p(&path)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("numerical failure"));
}

#[test]
fn derive_two_axis_gives_three_terms() {
    let out = ccsim(&["derive", p(&hspec("two_axis.hspec")), "--project", "q=g"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let terms: Vec<&str> = text.lines().filter(|l| l.starts_with("term ")).collect();
    assert_eq!(terms.len(), 3, "{text}");
    // the output is itself a valid spec
    let spec = ccsim_core::hspec::parse(&text).unwrap();
    let list = ccsim_core::hspec::lower(&spec).unwrap();
    assert!(list.terms().iter().all(|t| t.frequency == 0.0));
}

#[test]
fn derive_of_commuting_drives_is_empty() {
    // every kept product is a commutator of an operator with its own adjoint,
    // and these operators are normal, so nothing survives
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("off.hspec");
    std::fs::write(&path, "mode a(3);\nqubit q;\nterm 1 * sz(q) @ 5 +h.c.;\nterm 2 * adag(a)*a(a) @ 7 +h.c.;\n").unwrap();
    let out = ccsim(&["derive", p(&path)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("term "), "{text}");
    assert!(text.contains("# dropped 12 of 16 products"));
    assert!(ccsim_core::hspec::parse(&text).is_ok());

    // a one-sided term is rejected before any products are formed
    std::fs::write(&path, "mode a(3);\nqubit q;\nterm 1 * a(a)*sp(q) @ 5;\n").unwrap();
    let out = ccsim(&["derive", p(&path)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("conjugate"));
}

#[test]
fn derive_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/eff.hspec");
    let out = ccsim(&["derive", p(&hspec("fermion_two_ion.hspec")), "-o", p(&target)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(ccsim_core::hspec::parse(&text).is_ok());
}

#[test]
fn output_is_identical_across_job_counts() {
    let cfg = config("two_axis.toml");
    let one = ccsim(&["--jobs", "1", "scan", p(&cfg), "--param", "ratio", "--grid", "0.1,0.05,0.025"]);
    let many = ccsim(&["--jobs", "4", "scan", p(&cfg), "--param", "ratio", "--grid", "0.1,0.05,0.025"]);
    assert_eq!(code(&one), 0);
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(strip(&one), strip(&many));

    let a = ccsim(&["--jobs", "1", "run", p(&cfg)]);
    let b = ccsim(&["--jobs", "3", "run", p(&cfg)]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn goldens_reproduce() {
    let (cavity, fermion, two_axis) = (
        config("boson_cavity_default.toml"),
        config("fermion.toml"),
        config("two_axis.toml"),
    );
    let cases: [(&[&str], &str); 3] = [
        (&["run", p(&cavity)], "boson_cavity_default_run.csv"),
        (&["verify", p(&fermion)], "fermion_verify.csv"),
        (
            &["scan", p(&two_axis), "--param", "ratio", "--grid", "0.1,0.05,0.025"],
            "two_axis_scan.csv",
        ),
    ];
    for (args, name) in cases {
        let g = golden(name);
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--golden", p(&g)]);
        let out = ccsim(&full);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn golden_mismatch_and_bless() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let cfg = config("fermion.toml");
    // no golden yet
    assert_eq!(code(&ccsim(&["verify", p(&cfg), "--golden", p(&g)])), 2);
    assert_eq!(code(&ccsim(&["verify", p(&cfg), "--golden", p(&g), "--bless"])), 0);
    assert_eq!(code(&ccsim(&["verify", p(&cfg), "--golden", p(&g)])), 0);
    let edited = std::fs::read_to_string(&g).unwrap().replacen("true", "false", 1);
    std::fs::write(&g, edited).unwrap();
    let out = ccsim(&["verify", p(&cfg), "--golden", p(&g)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("golden mismatch"));
}

#[test]
fn report_path_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    let report = dir.path().join("out/report.csv");
    let text = std::fs::read_to_string(config("fermion.toml")).unwrap()
        + &format!("\n[output]\nreport = {:?}\n", report.to_str().unwrap());
    std::fs::write(&path, text).unwrap();
    let out = ccsim(&["verify", p(&path)]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 5);
}

#[test]
fn cutoff_scan_reports_sensitivity() {
    let out = ccsim(&["scan", p(&config("two_axis.toml")), "--param", "cutoff", "--grid", "2,3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let inf: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    // higher Fock states couple more strongly, so the RWA error grows
    assert_eq!(inf.len(), 2);
    assert!(inf[1] > inf[0]);
    assert_eq!(code(&ccsim(&["scan", p(&config("two_axis.toml")), "--param", "cutoff", "--grid", "2.5"])), 2);
}
