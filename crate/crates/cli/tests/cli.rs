use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use katokit::grid::{make_bump, save_field, BoxRegion};
use katokit::psido::{families, operator_grid};
use katokit::sobolev::h_norm;
use katokit::{Complex64, Field, GridSpec, MultiOrder};

fn katokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_katokit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn number(o: &Output) -> f64 {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o).trim().parse().unwrap()
}

fn save(field: &Field, dir: &Path, name: &str) -> String {
    let p = dir.join(name);
    save_field(field, &p).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn h_norm_of_constant_is_sqrt_period() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
    let f = save(&Field::constant(&g, Complex64::new(1.0, 0.0)), dir.path(), "one.fld");
    let out = katokit(&["compute", "h-norm", "--field", &f, "--order", "1"]);
    let text = stdout(&out);
    assert!(text.trim().starts_with("2.506628274631"), "{text}");
    assert!((number(&out) - (2.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn kato_norm_of_constant_is_window_norm_times_sqrt_period() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::isotropic(1, 128, 2.0 * PI).unwrap();
    let f = save(&Field::constant(&g, Complex64::new(1.0, 0.0)), dir.path(), "one.fld");
    let got = number(&katokit(&["compute", "kato-norm", "--field", &f, "--order", "1.5", "--p", "2"]));
    // default window: bump on the middle half of the period
    let chi = make_bump(&g, &BoxRegion::cube(1, 0.25 * g.period(), 0.75 * g.period()), None).unwrap().field;
    let want = g.period().sqrt() * h_norm(&chi, &MultiOrder::uniform(1.5, &[1])).unwrap();
    assert!((got - want).abs() <= 1e-10 * want, "{got} vs {want}");
}

#[test]
fn schatten_two_is_scaled_symbol_l2_norm() {
    let dir = tempfile::tempdir().unwrap();
    let xs = operator_grid(1, 16).unwrap();
    let a = families::gaussian(&xs, MultiOrder::uniform(2.0, &[1, 1]), 1.0, 1.5).unwrap();
    let f = save(a.field(), dir.path(), "symbol.fld");
    let cell = (xs.period() / 16.0).powi(2);
    let l2 = (a.field().samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt();
    let want = l2 / (2.0 * PI).sqrt();
    for tau in ["0", "0.5", "1"] {
        let got = number(&katokit(&["compute", "schatten", "--field", &f, "--p", "2", "--tau", tau]));
        assert!((got - want).abs() <= 1e-8 * want, "tau {tau}: {got} vs {want}");
    }
}

#[test]
fn compute_json_and_bad_kind() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::isotropic(1, 32, 2.0 * PI).unwrap();
    let f = save(&Field::constant(&g, Complex64::new(2.0, 0.0)), dir.path(), "two.fld");
    let out = katokit(&["compute", "h-norm", "--field", &f, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "h-norm");
    assert_eq!(v["samples"], 32);
    assert_eq!(katokit(&["compute", "volume", "--field", &f]).status.code(), Some(2));
    assert_eq!(katokit(&["compute", "h-norm", "--field", "/nonexistent.fld"]).status.code(), Some(2));
}

#[test]
fn report_summary_csv_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(katokit(&["verify", "mollifier-rate", "--out", out]).status.code(), Some(0));
    let json = dir.path().join("mollifier-rate.json");
    let json = json.to_str().unwrap();

    let summary = stdout(&katokit(&["report", json]));
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 4, "{summary}");
    assert!(lines[..3].iter().all(|l| l.starts_with("PASS")));

    let csv = stdout(&katokit(&["report", json, "--csv"]));
    assert!(csv.starts_with("# eps\ns,s_prime,eps,error,bound\n"), "{csv}");
    assert_eq!(csv.lines().count(), 2 + 3 * 4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"suite\": \"x\",\n  oops}").unwrap();
    let o = katokit(&["report", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("byte offset 17"), "{err}");
}

#[test]
fn verify_writes_index_and_refuses_bad_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"schatten": {"order": [2.0, 0.5]}}"#).unwrap();
    let o = katokit(&["verify", "schatten-bound", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis violated"));

    let out = dir.path().join("out");
    let o = katokit(&["verify", "peetre", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let index: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("index.json")).unwrap()).unwrap();
    assert_eq!(index[0]["suite"], "peetre");
    assert_eq!(index[0]["verdict"], "PASS");
}
