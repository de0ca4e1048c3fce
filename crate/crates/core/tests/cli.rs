use std::path::Path;
use std::process::{Command, Output};

fn pibreak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pibreak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const DECOMPOSE: &str = "[decompose]\nn_half = 6\nphi_a_steps = 4\n";

const VALIDATE: &str = r#"
[ensemble]
members = [{ n_spins = 2, theta = 1.5, phi = 0.0 }, { n_spins = 1, theta = 0.7, phi = 2.0 }]

[btc]
omega_x = 1.5
kappa = 1.0
j_xx = 0.3

[numerics]
t_final = 3.0
samples = 6
"#;

#[test]
fn decompose_is_byte_stable_and_has_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", DECOMPOSE);
    let mut files = vec![];
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = pibreak(&[
            "decompose",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "1",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push(std::fs::read(out.join("p_offdiag.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.starts_with("phi_a,S,S_prime,p_off\n") && !text.contains('\r'));

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "decompose");
    assert_eq!(
        manifest["config_sha256"].as_str().unwrap(),
        pibreak::cli::output::sha256_hex(DECOMPOSE.as_bytes())
    );
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", DECOMPOSE);
    let out = dir.path().join("o");
    let o = pibreak(&[
        "decompose",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let t: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("decompose_summary.json")).unwrap())
            .unwrap();
    assert_eq!(t["columns"][1], "mean_S");
    assert_eq!(t["rows"].as_array().unwrap().len(), 5);
    assert!((t["rows"][0][1].as_f64().unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[decompose]\nn_half = 6\nphi_a_steps = 4\ncolour = 1\n",
    );
    let o = pibreak(&["decompose", "--config", &bad, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let syntax = write(dir.path(), "syntax.toml", "[decompose\nn_half = 6\n");
    assert_eq!(
        pibreak(&["decompose", "--config", &syntax, "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pibreak(&["decompose", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pibreak(&["transmogrify", "--config", &syntax])
            .status
            .code(),
        Some(1)
    );

    let no_model = write(dir.path(), "m.toml", "[ensemble]\nn_half = 2\n");
    assert_eq!(
        pibreak(&["spectrum", "--config", &no_model, "--out", out])
            .status
            .code(),
        Some(1)
    );

    let three = write(
        dir.path(),
        "three.toml",
        "[ensemble]\nmembers = [{ n_spins = 1, theta = 1.0, phi = 0.0 }, { n_spins = 1, theta = 1.0, phi = 1.0 }, \
         { n_spins = 1, theta = 1.0, phi = 2.0 }]\n[btc]\nomega_x = 1.0\nkappa = 1.0\n",
    );
    assert_eq!(
        pibreak(&["evolve-exact", "--config", &three, "--out", out])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn validate_passes_then_fails_numerically_at_an_impossible_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write(dir.path(), "v.toml", VALIDATE);
    let o = pibreak(&["validate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let strict = write(
        dir.path(),
        "s.toml",
        &format!("{VALIDATE}\n[validate]\ntolerance = 1e-30\n"),
    );
    let o = pibreak(&[
        "validate",
        "--config",
        &strict,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_command_writes_its_tables() {
    use pibreak::cli::{compute, parse_config, Command};
    let cfg = parse_config(
        r#"
[ensemble]
n_half = 3
phi_a = 1.0
[dicke]
omega_z = 0.1
omega_0 = 1.0
kappa = 1.0
g_over_gcr = 1.5
[numerics]
t_final = 200.0
samples = 256
[gap_scan]
sizes = [6, 8, 10, 12]
[phase_diagram]
parameter = "g_over_gcr"
values = [0.5, 1.5]
n_half = 3
phi_a = [0.0, 1.0]
[spectrum]
pairs = [[3.0, 2.0]]
"#,
    )
    .unwrap();
    let expect = [
        (Command::EvolveExact, vec!["observables", "block_norms"]),
        (Command::GapScan, vec!["gap_scan", "gap_fit"]),
        (
            Command::Meanfield,
            vec!["trajectory", "classification", "peaks", "norm_drift"],
        ),
        (Command::PhaseDiagram, vec!["phase_diagram"]),
        (Command::Spectrum, vec!["eigenvalues", "gaps"]),
    ];
    for (cmd, names) in expect {
        let (tables, _) = compute(cmd, &cfg).unwrap_or_else(|e| panic!("{}: {e}", cmd.name()));
        assert_eq!(
            tables.iter().map(|t| t.name.as_str()).collect::<Vec<_>>(),
            names
        );
        assert!(tables.iter().all(|t| !t.rows.is_empty()), "{}", cmd.name());
    }
    let (tables, _) = compute(Command::Spectrum, &cfg).unwrap();
    assert_eq!(tables[0].rows.len(), 7 * 5);
}
