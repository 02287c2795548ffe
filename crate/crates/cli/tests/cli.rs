//! End-to-end runs of the `tori` binary: output schemas, determinism and
//! the exit-status contract.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tori"))
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn tmpdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tori-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn profile_pendulum_outputs_and_determinism() {
    let dir = tmpdir("profile");
    let cfg = write_cfg(
        &dir,
        "p.cfg",
        "[hamiltonian]\nfamily = pendulum\n[experiment]\nname = profile\nh_cap = 9.0\n",
    );
    for run in ["a", "b"] {
        let out = bin()
            .args(["profile", "--config", &cfg, "--out"])
            .arg(dir.join(run))
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    // byte-identical CSVs on identical configs
    for name in ["profile_e0_osc.csv", "profile_e1_rotu.csv", "profile_summary.txt"] {
        let a = std::fs::read(dir.join("a").join(name)).unwrap();
        let b = std::fs::read(dir.join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} not deterministic");
    }
    let csv = std::fs::read_to_string(dir.join("a/profile_e0_osc.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "h,I,H_I,K,f_1,f_3,f_5,f_7,f_9,Ktilde_1,Ktilde_3,Ktilde_5,Ktilde_7,Ktilde_9,F_1,F_3,F_5,F_7,F_9"
    );
    // 17 significant digits
    let first_cell = csv.lines().nth(1).unwrap().split(',').next().unwrap();
    assert!(first_cell.contains('e') && first_cell.split('e').next().unwrap().len() >= 18);
    assert!(dir.join("a/kappa_vs_h.svg").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_errors_exit_2() {
    let dir = tmpdir("cfgerr");
    // unknown key
    let cfg = write_cfg(&dir, "bad.cfg", "[hamiltonian]\nfamily = harmonic\nbogus = 1\n");
    let out = bin().args(["profile", "--config", &cfg, "--out"]).arg(dir.join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus") && err.contains("bad.cfg:3"), "{err}");

    // empty edge window: cap below the rotation edges
    let cfg = write_cfg(
        &dir,
        "empty.cfg",
        "[hamiltonian]\nfamily = pendulum\n[experiment]\nh_cap = 0.5\n",
    );
    let out = bin().args(["profile", "--config", &cfg, "--out"]).arg(dir.join("o2")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no data"));

    // mismatched experiment name
    let cfg = write_cfg(&dir, "mis.cfg", "[experiment]\nname = scan\n");
    let out = bin().args(["profile", "--config", &cfg, "--out"]).arg(dir.join("o3")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn wk_inadmissible_temperature_exits_3_naming_the_value() {
    let dir = tmpdir("wkadm");
    // the pendulum Κ̃₃ saddle limit is 8/9; pick T right on it
    let cfg = write_cfg(
        &dir,
        "wk.cfg",
        "[hamiltonian]\nfamily = pendulum\n[thermostat]\nvariant = wk\nk = 3\nl = 1\n\
         temperature = 0.888888888888\nepsilon = 0.05\n[experiment]\nh_cap = 9.0\n",
    );
    let out = bin().args(["averaged", "--config", &cfg, "--out"]).arg(dir.join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("inadmissible"), "{err}");
    assert!(err.contains("8.88") || err.contains("0.888"), "should name the excluded value: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn averaged_emits_twist_and_equilibria() {
    let dir = tmpdir("avg");
    let cfg = write_cfg(
        &dir,
        "a.cfg",
        "[hamiltonian]\nfamily = harmonic\n[thermostat]\nvariant = nh\nepsilon = 0.05\n\
         temperature = 1.0\n[experiment]\nh_cap = 6.0\n[output]\nformat = csv\n",
    );
    let out = bin().args(["averaged", "--config", &cfg, "--out"]).arg(dir.join("o")).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let eq = std::fs::read_to_string(dir.join("o/equilibria.csv")).unwrap();
    assert!(eq.lines().count() >= 2);
    let summary = std::fs::read_to_string(dir.join("o/averaged_summary.txt")).unwrap();
    assert!(summary.contains("e0_r0_twist_significant=true"), "{summary}");
    // no SVG requested
    assert!(!dir.join("o/potential_e0_r0.svg").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn scan_epsilon_zero_is_all_tori() {
    let dir = tmpdir("scan0");
    let cfg = write_cfg(
        &dir,
        "s.cfg",
        "[hamiltonian]\nfamily = harmonic\n[thermostat]\nvariant = nh\nepsilon = 0.0\n\
         temperature = 1.0\n[experiment]\nname = scan\nh_cap = 6.0\nnh_grid = 7\nnxi_grid = 7\n\
         n_iters = 200\ncompanion_iters = 50\nwindow_h = 0.6,1.4\nwindow_xi = -0.5,0.5\n",
    );
    let out = bin()
        .args(["scan", "--config", &cfg, "--threads", "2", "--out"])
        .arg(dir.join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.join("o/scan_summary.txt")).unwrap();
    let frac = summary
        .lines()
        .find(|l| l.starts_with("fraction_torus="))
        .and_then(|l| l.split('=').nth(1))
        .and_then(|v| v.parse::<f64>().ok())
        .unwrap();
    assert_eq!(frac, 1.0, "{summary}");
    let points = std::fs::read_to_string(dir.join("o/scan_points.csv")).unwrap();
    assert!(points.lines().next().unwrap().starts_with("h0,xi0,class,rho"));
    assert_eq!(points.lines().count(), 50); // header + 49 points
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn reconstruct_checks_line_up() {
    let dir = tmpdir("recon");
    let cfg = write_cfg(&dir, "r.cfg", "[experiment]\nname = reconstruct\nbeta = 1.0\n");
    let out = bin().args(["reconstruct", "--config", &cfg, "--out"]).arg(dir.join("o")).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.join("o/reconstruct_summary.txt")).unwrap();
    let get = |key: &str| -> f64 {
        summary
            .lines()
            .find(|l| l.starts_with(&format!("{key}=")))
            .and_then(|l| l.split('=').nth(1))
            .and_then(|v| v.parse().ok())
            .unwrap()
    };
    // √(π/4) ≈ 0.886227 from both routes
    assert!((get("integral_full_quadrature") - 0.886_226_925_452_758).abs() < 1e-8);
    assert!((get("integral_full_quadrature") - get("integral_full_closed")).abs() < 1e-8);
    assert!(get("round_trip_residual") <= 1e-6);
    assert!(get("width_max_dev_from_sqrt_u") <= 1e-8);
    let width = std::fs::read_to_string(dir.join("o/width.csv")).unwrap();
    assert!(width.lines().next().unwrap() == "u,delta,delta_over_sqrt_u");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn agreement_reports_defect_table() {
    let dir = tmpdir("agree");
    let cfg = write_cfg(
        &dir,
        "g.cfg",
        "[hamiltonian]\nfamily = harmonic\n[thermostat]\nvariant = nh\nepsilon = 0.05\n\
         temperature = 1.0\n[experiment]\nh_cap = 6.0\neps_list = 0.1,0.05\n",
    );
    let out = bin().args(["agreement", "--config", &cfg, "--out"]).arg(dir.join("o")).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("o/agreement.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let summary = std::fs::read_to_string(dir.join("o/agreement_summary.txt")).unwrap();
    assert!(summary.contains("slope="), "{summary}");
    let _ = std::fs::remove_dir_all(&dir);
}
