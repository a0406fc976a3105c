use std::process::Command;

use qread::verify::{run_verify, Evaluators};
use qread_core::discrimination::ln_thermal_weight;
use qread_core::LnProb;

fn qread() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qread"))
}

/// Drops the `p_m'` term of the closed form.
fn corrupted(m: usize, _mp: usize, n_b: f64, copies: usize) -> qread_core::Result<LnProb> {
    Ok(LnProb::half_power(ln_thermal_weight(n_b, m) - 4f64.ln(), copies))
}

#[test]
fn corrupted_closed_form_is_named() {
    let report = run_verify(&Evaluators { mm_closed: corrupted });
    assert!(!report.all_passed());
    let c = report.check("oracle-mm-closed-form").unwrap();
    assert!(!c.passed);
    assert!(!c.detail.starts_with("error"), "{}", c.detail);
    assert!(report.render().contains("FAIL oracle-mm-closed-form"));
}

#[test]
fn bounds_prints_key_values() {
    let out = qread().args(["bounds", "--transmitter", "mm", "--m", "2", "--m-prime", "0", "--n-b", "0.1"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let get = |k: &str| text.lines().find_map(|l| l.strip_prefix(&format!("{k}="))).unwrap().to_string();
    let p: f64 = get("ln_p_qcb").parse().unwrap();
    assert!((p.exp() - 0.114575507137490608).abs() < 1e-10);
    assert_eq!(get("p_qcb.method"), "pure-fidelity");
    assert_eq!(get("p_qcb_closed.method"), "closed-form");
    assert!(text.contains("p_helstrom="));
    assert!(text.contains("gain="));
}

#[test]
fn bounds_rejects_mismatched_signal_mean() {
    let out = qread().args(["bounds", "--transmitter", "mm", "--m", "2", "--m-prime", "0", "--n-s", "3", "--n-b", "0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "name = \"demo\"\nn_s = 1.0\nn_b = 0.01\noutputs = [\"csv\", \"svg\"]\n[copies]\nstart = 1\nend = 9\nstep = 2\n\
         [[transmitter]]\nkind = \"photon-coherent\"\n[[transmitter]]\nkind = \"fock\"\n",
    )
    .unwrap();
    let out = qread().args(["sweep"]).arg(&cfg).env("QREAD_OUT_DIR", dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("demo.csv")).unwrap();
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 6);
    assert!(data[0].starts_with("M,log10_P_qcb_psi_a1,"));
    assert!(dir.path().join("demo_bounds.svg").exists());
    assert!(dir.path().join("demo_info.svg").exists());
}

#[test]
fn sweep_config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "n_s = 1.0\nn_b = 0.1\n[copies]\nstart = 4\nend = 1\n[[transmitter]]\nkind = \"fock\"\n").unwrap();
    let out = qread().args(["sweep"]).arg(&cfg).env("QREAD_OUT_DIR", dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("copies") && err.contains("line 3"), "{err}");
}

#[test]
fn unknown_figure_is_rejected() {
    let out = qread().args(["figure", "9z"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn figure_3a_has_fock_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = qread().args(["figure", "3a"]).env("QREAD_OUT_DIR", dir.path()).output().unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("3a.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.contains("log10_P_qcb_fock"));
    assert!(csv.contains("# n_b: 0.01"));
}
