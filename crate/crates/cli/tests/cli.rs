use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-reduce"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a whitespace field file, header skipped.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|f| f.parse().unwrap()).collect())
        .collect()
}

const PT: &str = "model = \"poschl_teller\"\n[poschl_teller]\ndelta = 0.8660254037844386\n";

#[test]
fn band_index_above_bound_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{PT}n = [4]\n"));
    let o = run(&["spectrum"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n > 4δ²"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{PT}colour = 2\n"));
    let o = run(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn missing_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify"], &dir.path().join("absent.toml"), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn conflicting_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["perturb", "--spin-orbit", "--bilayer"],
        &configs().join("custom.toml"),
        dir.path(),
    );
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn sweep_is_symmetric_in_k_y() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["spectrum"], &configs().join("poschl_teller.toml"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("bands.csv")).unwrap();
    let table: Vec<(usize, f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(!table.is_empty());
    for &(n, k, e) in &table {
        let mirror = table
            .iter()
            .find(|&&(m, k2, _)| m == n && (k2 + k).abs() < 1e-12)
            .unwrap_or_else(|| panic!("no mirror of n={n}, k_y={k}"));
        assert!((mirror.2 - e).abs() < 1e-12);
    }
}

#[test]
fn spectrum_csv_has_contract_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    run(&["spectrum"], &configs().join("poschl_teller.toml"), &out);
    let text = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k_y,E_analytic,E_numeric,abs_err"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // 17 significant digits: d.dddddddddddddddde±x
    let mantissa = first[2].split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17, "{}", first[2]);
}

#[test]
fn modes_are_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["modes"], &configs().join("crossed_combs.toml"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dens = rows(&out.join("Psi_density.dat"));
    // x, y, density on a uniform 161 x 161 grid of spacing 0.1.
    let h = 0.1;
    let total: f64 = dens
        .iter()
        .map(|r| {
            let wx = if r[0].abs() > 7.999 { 0.5 } else { 1.0 };
            let wy = if r[1].abs() > 7.999 { 0.5 } else { 1.0 };
            wx * wy * r[2]
        })
        .sum::<f64>()
        * h
        * h;
    assert!((total - 1.0).abs() < 1e-8, "{total}");
}

#[test]
fn spin_orbit_flag_gives_sigma2_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "model = \"custom\"\n[grid]\nx = { min = -1.0, max = 1.0, n = 9 }\n\
         [perturb.v2]\nre = [{ shape = \"tanh\", amplitude = 0.7 }]\n\
         [perturb.v3]\nre = [{ shape = \"tanh\", amplitude = -0.7 }]\n",
    );
    let out = dir.path().join("out");
    let o = run(&["perturb", "--spin-orbit"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in rows(&out.join("perturbation.dat")) {
        let v2 = 0.7 * r[0].tanh();
        let entry = |i: usize, j: usize| (r[3 + 2 * (4 * i + j)], r[4 + 2 * (4 * i + j)]);
        for i in 0..4 {
            for j in 0..4 {
                // v2 σ0 ⊗ σ2: (1,2) = −i v2, (2,1) = i v2, same in the lower block.
                let expected = match (i, j) {
                    (0, 1) | (2, 3) => (0.0, -v2),
                    (1, 0) | (3, 2) => (0.0, v2),
                    _ => (0.0, 0.0),
                };
                let (re, im) = entry(i, j);
                assert!(
                    (re - expected.0).abs() < 1e-12 && (im - expected.1).abs() < 1e-12,
                    "({i},{j})"
                );
            }
        }
    }
}

#[test]
fn bilayer_flag_puts_minus_re_v1_first() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "model = \"custom\"\n[perturb.v1]\nre = [{ shape = \"gauss\", amplitude = 0.4 }]\nim = 0.3\n\
         [perturb.v4]\nim = 0.2\n",
    );
    let out = dir.path().join("out");
    let o = run(&["perturb", "--bilayer"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in rows(&out.join("perturbation.dat")) {
        assert!((r[3] + 0.4 * (-r[0] * r[0]).exp()).abs() < 1e-12);
    }
}

#[test]
fn zero_block_gives_zero_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "model = \"custom\"\n");
    let out = dir.path().join("out");
    assert_eq!(run(&["perturb"], &cfg, &out).status.code(), Some(0));
    assert!(rows(&out.join("perturbation.dat"))
        .iter()
        .all(|r| r[3..].iter().all(|v| *v == 0.0)));
}

#[test]
fn broken_hermiticity_in_detect_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    run(&["assemble"], &configs().join("custom.toml"), &out);
    let path = out.join("potential.dat");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[3].split_whitespace().map(String::from).collect();
    // V13 real part, data line 3 (point 2).
    fields[3 + 2 * 2] = "9.0".into();
    lines[3] = fields.join(" ");
    std::fs::write(&path, lines.join("\n")).unwrap();
    let cfg = write(
        dir.path(),
        "d.toml",
        "model = \"custom\"\n[reduction]\nepsilon = -1\n[detect]\ninput = \"a/potential.dat\"\n",
    );
    let o = run(&["detect"], &cfg, &dir.path().join("d"));
    assert_eq!(o.status.code(), Some(3));
    assert!(
        stderr(&o).contains("not Hermitian at point 2, entry (1,3)"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn model_fixed_reduction_conflict_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "model = \"soliton\"\n[reduction]\nepsilon = -1\n[soliton]\nm = 0.5\nomega = 0.5\ndelta = 1.0\n",
    );
    assert_eq!(run(&["verify"], &cfg, &dir.path().join("o")).status.code(), Some(2));
}
