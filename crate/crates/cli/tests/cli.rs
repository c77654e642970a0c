use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn softhard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softhard")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn converge_writes_a_reproducible_report() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let names = ["convergence.csv", "convergence.svg", "config.txt", "manifest.txt"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = softhard(&["converge", "--nlist", "10,20", "--out", &out_arg(&a)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(names.map(|n| fs::read(a.join(n)).unwrap()));
    }
    assert!(runs[0] == runs[1]);
    let csv = fs::read_to_string(a.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("n,N,scale,E,precision\n"));
    assert_eq!(csv.lines().count(), 3);
    let config = fs::read_to_string(a.join("config.txt")).unwrap();
    assert!(config.contains("nlist = 10,20") && config.contains("# n = 20: N = "));
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# small run\nnlist = 8,16\nL = 0.5\nwindow = 0.5,3\n").unwrap();
    let out = tmp.path().join("out");
    let o = softhard(&["converge", "--config", cfg.to_str().unwrap(), "--L", "0", "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("L = 0.0") && echo.contains("window = 0.5,3.0") && echo.contains("nlist = 8,16"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("s = 0,"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(&tmp.path().join("x"));
    for args in [
        vec!["converge", "--nlist", "20,10", "--out", &out],
        vec!["converge", "--c", "0.7", "--out", &out],
        vec!["converge", "--window", "0,2", "--out", &out],
        vec!["fredholm", "--alpha", "0.5", "--out", &out],
        vec!["selftest", "--criterion", "9"],
        vec!["converge", "--config", "/nonexistent/cfg"],
        vec!["nosuchcommand"],
    ] {
        assert_eq!(softhard(&args).status.code(), Some(2), "{args:?}");
    }
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn unwritable_output_is_a_failure_without_partial_files() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = softhard(&["eqdensity", "--out", &out_arg(&blocker.join("sub"))]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn figure_densities() {
    let tmp = tempfile::tempdir().unwrap();
    let o = softhard(&["eqdensity", "--points", "100", "--out", &out_arg(tmp.path())]);
    assert!(o.status.success());
    for c in ["0.7", "1", "1.2"] {
        let csv = fs::read_to_string(tmp.path().join(format!("density_c{c}.csv"))).unwrap();
        assert!(csv.starts_with("x,psi\n"));
        assert_eq!(csv.lines().count(), 101);
    }
    let manifest = fs::read_to_string(tmp.path().join("manifest.txt")).unwrap();
    assert_eq!(manifest.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn module_subcommands_emit_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |args: &[&str], file: &str, header: &str| {
        let dir = tmp.path().join(args[0]);
        let mut full = args.to_vec();
        let d = out_arg(&dir);
        full.extend(["--out", &d]);
        let o = softhard(&full);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(dir.join(file)).unwrap();
        assert!(text.starts_with(header), "{file}: {}", &text[..40.min(text.len())]);
    };
    run(&["recurrence", "--n", "6"], "recurrence.csv", "k,a_k,b_k\n");
    run(&["kernel", "--nlist", "10"], "finite_kernel_diagonal_n10.csv", "x,Kxx\n");
    run(&["hm", "--nu", "0"], "hm_nu0.csv", "s,q,q_prime\n");
    run(&["limitkernel"], "limit_kernel_alpha0_s0.csv", "x,y,K\n");
    run(&["fredholm", "--x", "0.5,1"], "gap.csv", "x,gap,tw_ratio,abs_diff\n");
}

#[test]
fn selftest_single_criterion() {
    let o = softhard(&["selftest", "--criterion", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("criterion 2 [PASS]"), "{text}");
}
