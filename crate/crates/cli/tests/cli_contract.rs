use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use idtlab::processes::io::{read_binary, read_csv, MAGIC};
use idtlab_cli::ThresholdTable;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_idtlab"))
}

fn shipped_table() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../calibration/thresholds.json").canonicalize().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("IDTLAB_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn table_config(spec: &str, tests: &str) -> String {
    format!(
        "seed = 4242\nn_paths = 20000\ngrid = [0.5, 1.0, 2.0]\nthreshold_table = {:?}\n\n[spec]\n{spec}\n{tests}",
        shipped_table().display().to_string()
    )
}

#[test]
fn cauchy_line_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &table_config("kind = \"stable_line\"\nalpha = 1.0", "[[tests]]\nkind = \"idt\"\nn = 2\n"));
    let out = dir.path().join("out");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out.join("summary.json")).unwrap();
    assert!(summary.contains("\"all_pass\": true"));
    let tap = std::fs::read_to_string(out.join("summary.tap")).unwrap();
    assert!(tap.starts_with("1..1\nok 1 - idt_test"), "{tap}");
    let report = std::fs::read_to_string(out.join("reports/00_idt.json")).unwrap();
    assert!(report.contains("\"config\"") && report.contains("\"threshold_source\""));
    // `report` re-renders the same verdict.
    let r = run(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    assert!(String::from_utf8_lossy(&r.stdout).contains("1 of 1 tests passed"));
}

#[test]
fn fbm_at_wrong_exponent_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = "kind = \"gaussian_kernel\"\nkernel = { kind = \"fbm\", hurst = 0.3 }";
    let cfg = write_config(dir.path(), "f.toml", &table_config(spec, "[[tests]]\nkind = \"idt\"\nn = 2\nalpha = 1.0\n"));
    let out = dir.path().join("out");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("not ok 1"));
    assert_eq!(code(&run(&["report", out.to_str().unwrap()])), 1);
}

#[test]
fn config_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let good = "seed = 1\nn_paths = 200\ngrid = [1.0]\n[spec]\nkind = \"stable_line\"\nalpha = 1.0\n[[tests]]\nkind = \"idt\"\nn = 2\nthreshold = 1.0\n";
    let cases = [
        ("missing_seed", good.replace("seed = 1\n", ""), "seed"),
        ("bad_spec", good.replace("\"stable_line\"", "\"wobbly\""), "wobbly"),
        ("bad_test", good.replace("kind = \"idt\"", "kind = \"nonsense\""), "nonsense"),
        ("missing_n", good.replace("n = 2\n", ""), "tests[0].n"),
        ("few_paths", good.replace("n_paths = 200", "n_paths = 99"), "n_paths"),
    ];
    for (name, body, needle) in cases {
        let cfg = write_config(dir.path(), &format!("{name}.toml"), &body);
        let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().join(name).to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{name}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    assert_eq!(code(&run(&["run", dir.path().join("absent.toml").to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    // Sanity: the unmodified config is accepted.
    let cfg = write_config(dir.path(), "good.toml", good);
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("good").to_str().unwrap()])), 0);
}

#[test]
fn missing_table_entry_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &table_config("kind = \"stable_line\"\nalpha = 1.0", "[[tests]]\nkind = \"idt\"\nn = 7\n"));
    let o = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("tests[0]"));
}

#[test]
fn calibrate_is_reproducible_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 3\nn_paths = 200\ngrid = [0.5, 1.0, 2.0]\nthreshold_table = \"table.json\"\n\
                [calibration]\nreps = 200\nquantile = 0.99\nquantiles = [0.9, 0.99]\nseed = 77\n\
                [spec]\nkind = \"stable_line\"\nalpha = 1.0\n[[tests]]\nkind = \"idt\"\nn = 2\n";
    let cfg = write_config(dir.path(), "cal.toml", body);
    assert_eq!(code(&run(&["calibrate", cfg.to_str().unwrap()])), 0);
    let first = std::fs::read(dir.path().join("table.json")).unwrap();
    std::fs::remove_file(dir.path().join("table.json")).unwrap();
    assert_eq!(code(&run(&["--threads", "3", "calibrate", cfg.to_str().unwrap()])), 0);
    let second = std::fs::read(dir.path().join("table.json")).unwrap();
    assert_eq!(first, second);

    let table = ThresholdTable::load(&dir.path().join("table.json")).unwrap();
    assert_eq!(table.entries.len(), 2);
    let by_q = |q: f64| table.entries.iter().find(|e| e.key.quantile == q).unwrap().threshold;
    assert!(by_q(0.99) > 0.0);
    assert!(by_q(0.9) <= by_q(0.99));

    // Re-running merges rather than duplicating.
    assert_eq!(code(&run(&["calibrate", cfg.to_str().unwrap()])), 0);
    assert_eq!(ThresholdTable::load(&dir.path().join("table.json")).unwrap().entries.len(), 2);

    // And `run` picks the entry up.
    let out = dir.path().join("out");
    let o = run(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(out.join("reports/00_idt.json")).unwrap();
    assert!(report.contains(&format!("{:?}", by_q(0.99))), "{report}");
}

#[test]
fn export_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 5\nn_paths = 150\ngrid = [0.5, 1, 2]\n[spec]\nkind = \"stable_line\"\nalpha = 1.5\n";
    let cfg = write_config(dir.path(), "e.toml", body);
    let out = dir.path().join("x");
    assert_eq!(code(&run(&["export", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    let csv_text = std::fs::read_to_string(out.join("paths.csv")).unwrap();
    assert_eq!(csv_text.lines().next().unwrap(), "t=0.5,t=1,t=2");
    let bytes = std::fs::read(out.join("paths.idt")).unwrap();
    assert_eq!(&bytes[..4], MAGIC);
    let from_bin = read_binary(&bytes[..]).unwrap();
    let from_csv = read_csv(csv_text.as_bytes()).unwrap();
    assert_eq!(from_bin.n_paths(), 150);
    assert!(from_bin.values().iter().zip(&from_csv.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    // --seed changes the data, the same seed reproduces it.
    let again = dir.path().join("y");
    run(&["export", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(again.join("paths.idt")).unwrap(), bytes);
    let other = dir.path().join("z");
    run(&["export", cfg.to_str().unwrap(), "--out", other.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(std::fs::read(other.join("paths.idt")).unwrap(), bytes);
}

#[test]
fn paths_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let body = "seed = 9\nn_paths = 5000\ngrid = [1.0]\n[spec]\nkind = \"stable_line\"\nalpha = 1.0\n[[tests]]\nkind = \"idt\"\nn = 2\nthreshold = 1.0\n";
    let cfg = write_config(dir.path(), "p.toml", body);
    let out = dir.path().join("o");
    assert_eq!(code(&run(&["run", cfg.to_str().unwrap(), "--paths", "300", "--out", out.to_str().unwrap()])), 0);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("reports/00_idt.json")).unwrap()).unwrap();
    assert_eq!(report["n_samples"], 300);
    assert_eq!(report["details"]["config"]["n_paths"], 300);
}
