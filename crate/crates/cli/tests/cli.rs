use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = "\
k_per_km = 4250
beta = 3.52
sigma_db = 12
cell_radius_km = 0.26
n_side = 6
noise_dbm = -93
power_dbm = 58.5
bandwidth_hz = 10e6
c = 21.45
d_watts = 354.44
seed = 3
realizations = 2
samples = 400
";

fn setup(config: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, config).unwrap();
    (dir, path)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellgeom"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn run_ok(args: &[&str], config: &Path, out: &Path) -> String {
    let o = run(args, config, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn header(csv: &str) -> &str {
    csv.lines().next().unwrap()
}

#[test]
fn fig_sir_header_and_explicit_column() {
    let (dir, cfg) = setup(SMALL);
    let csv = run_ok(&["fig-sir"], &cfg, &dir.path().join("sir.csv"));
    assert_eq!(header(&csv), "sir_db,cdf_hex_sim,cdf_poisson_analytic,cdf_explicit_eq13");
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 91);
    for r in &rows {
        let db: f64 = r[0].parse().unwrap();
        assert_eq!(r[3].is_empty(), db < 0.0, "{r:?}");
    }
}

#[test]
fn fig_sinr_header() {
    let (dir, cfg) = setup(SMALL);
    let csv = run_ok(&["fig-sinr"], &cfg, &dir.path().join("sinr.csv"));
    assert_eq!(
        header(&csv),
        "sinr_db,cdf_hex_shadow,cdf_hex_noshadow,cdf_poisson_finite,cdf_poisson_infinite,cdf_explicit_eq18"
    );
}

#[test]
fn fig_energy_reports_argmax() {
    let (dir, cfg) = setup(SMALL);
    let csv = run_ok(&["fig-energy", "--p-grid-dbm", "20,30,40"], &cfg, &dir.path().join("ee.csv"));
    assert_eq!(header(&csv), "P_dbm,ee_hex_shadow_sim,ee_hex_noshadow_sim,ee_poisson_analytic");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("# argmax_dbm ee_hex_shadow_sim="), "{last}");
}

#[test]
fn converge_is_deterministic_per_seed() {
    let (dir, cfg) = setup(SMALL);
    let a = run_ok(&["converge", "--sigma-db", "0,12"], &cfg, &dir.path().join("a.csv"));
    let b = run_ok(&["converge", "--sigma-db", "0,12"], &cfg, &dir.path().join("b.csv"));
    assert_eq!(a, b);
    assert_eq!(header(&a), "sigma_db,pass_fraction,median_ks_d,realizations");
    assert_eq!(a.lines().count(), 3);
    let c = run_ok(&["converge", "--sigma-db", "0,12", "--seed", "4"], &cfg, &dir.path().join("c.csv"));
    assert_ne!(a, c);
}

#[test]
fn bad_config_exits_with_usage_code() {
    let (dir, cfg) = setup(&format!("{SMALL}colour = red\n"));
    let o = run(&["fig-sir"], &cfg, &dir.path().join("x.csv"));
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());

    let (dir, cfg) = setup(&SMALL.replace("beta = 3.52", "beta = 1.5"));
    assert_eq!(run(&["fig-sir"], &cfg, &dir.path().join("x.csv")).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let (dir, cfg) = setup(SMALL);
    let out = dir.path().join("missing").join("out.csv");
    assert_eq!(run(&["converge", "--sigma-db", "0"], &cfg, &out).status.code(), Some(4));
}

#[test]
fn misplaced_flag_is_rejected() {
    let (dir, cfg) = setup(SMALL);
    let o = run(&["fig-sir", "--sigma-db", "3"], &cfg, &dir.path().join("x.csv"));
    assert_eq!(o.status.code(), Some(2));
}
