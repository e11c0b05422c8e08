//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are printed on every run.

use std::path::Path;
use std::process::{Command, ExitCode};

use katokit::Verdict;
use katokit_cli::config::SuiteConfig;
use katokit_cli::report::Report;
use serde_json::Value;

type Outcome = Result<(), String>;

fn run_suite(id: &str, cfg: &SuiteConfig) -> Result<Report, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut reports = katokit_cli::verify(id, cfg, dir.path()).map_err(|e| e.to_string())?;
    reports.pop().ok_or_else(|| format!("{id}: no report"))
}

/// Every case in the listed suites must PASS.
fn all_pass(cfg: &SuiteConfig, suites: &[&str]) -> Outcome {
    for id in suites {
        let r = run_suite(id, cfg)?;
        if r.cases.is_empty() {
            return Err(format!("{id}: no cases"));
        }
        let bad: Vec<_> = r.cases.iter().filter(|c| c.result.verdict != Verdict::Pass).map(|c| c.id.clone()).collect();
        if !bad.is_empty() {
            return Err(format!("{id}: {bad:?}"));
        }
    }
    Ok(())
}

fn value(r: &Report, case: &str, key: &str) -> Result<f64, String> {
    let c = r.cases.iter().find(|c| c.id == case).ok_or_else(|| format!("missing case {case}"))?;
    c.result.get(key).ok_or_else(|| format!("{case}: missing {key}"))
}

fn criterion_1(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["spectral"])
}

fn criterion_2(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["identities"])?;
    let r = run_suite("identities", cfg)?;
    let hs = r.cases.iter().find(|c| c.id.starts_with("hilbert-schmidt")).ok_or("no Hilbert-Schmidt case")?;
    if hs.inputs.get("taus") != Some(&serde_json::json!([0.0, 0.5, 1.0])) {
        return Err(format!("tau sweep {:?}", hs.inputs.get("taus")));
    }
    Ok(())
}

fn criterion_3(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["peetre", "window-product", "weight-convolution", "mollifier-rate", "young-bound"])?;
    let peetre = run_suite("peetre", cfg)?;
    if value(&peetre, "peetre", "samples")? < 1e5 {
        return Err("fewer than 1e5 Peetre draws".into());
    }
    // Refit each slope from the raw sweep rather than trusting the suite's fit.
    let moll = run_suite("mollifier-rate", cfg)?;
    let eps = moll.series.iter().find(|s| s.name == "eps").ok_or("no eps series")?;
    for (s, sp) in [(2.0, 1.0), (1.5, 1.0), (1.0, 0.75)] {
        let pts: Vec<(f64, f64)> = eps
            .rows
            .iter()
            .filter(|r| r[0] == s && r[1] == sp)
            .map(|r| (r[2].ln(), r[3].ln()))
            .collect();
        if pts.len() < 3 {
            return Err(format!("({s}, {sp}): {} sweep points", pts.len()));
        }
        let m = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
        let slope = sxy / sxx;
        let theta = f64::min(s - sp, 1.0);
        if (slope - theta).abs() > 0.1 {
            return Err(format!("({s}, {sp}): refit slope {slope} vs {theta}"));
        }
    }
    Ok(())
}

fn criterion_4(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["equivalence"])?;
    let r = run_suite("schatten-bound", cfg)?;
    let c = r.cases.iter().find(|c| c.id == "schatten-ratio").ok_or("no schatten-ratio case")?;
    if c.result.verdict != Verdict::Pass {
        return Err(format!("schatten-ratio {:?}: {:?}", c.result.verdict, c.result.note));
    }
    let members = value(&r, "schatten-ratio", "ensemble")?;
    if !(50.0..=100.0).contains(&members) {
        return Err(format!("{members} ensemble members"));
    }
    Ok(())
}

fn criterion_5(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["calculus"])?;
    let r = run_suite("calculus", cfg)?;
    for f in ["z", "z^2", "exp", "1/z"] {
        for field in ["cosine", "random"] {
            value(&r, &format!("calderon-{field}-{f}"), "pointwise_error")?;
        }
    }
    value(&r, "joint-spectrum-refusal", "distance")?;
    Ok(())
}

fn criterion_6(cfg: &SuiteConfig) -> Outcome {
    all_pass(cfg, &["coordinate-change"])?;
    let r = run_suite("coordinate-change", cfg)?;
    let isometries = (0..8).filter(|i| r.cases.iter().any(|c| c.id.starts_with(&format!("isometry-{i}-")))).count();
    if isometries != 8 {
        return Err(format!("{isometries} isometries"));
    }
    Ok(())
}

fn katokit(args: &[&str], threads: &str) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_katokit"))
        .args(args)
        .env("KATOKIT_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().ok_or("killed by signal")?;
    Ok((code, String::from_utf8_lossy(&out.stderr).into_owned()))
}

fn without_environment(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if let Value::Object(m) = &mut v {
        m.remove("environment");
    }
    Ok(v)
}

fn criterion_7() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let pa = a.path().to_str().ok_or("non-utf8 tempdir")?;
    let pb = b.path().to_str().ok_or("non-utf8 tempdir")?;
    // different thread counts must not change a single byte
    let (ca, _) = katokit(&["verify", "all", "--out", pa], "1")?;
    let (cb, _) = katokit(&["verify", "all", "--out", pb], "4")?;
    if ca != 0 || cb != 0 {
        return Err(format!("verify all exited {ca}, {cb}"));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.file_name()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    names.sort();
    if names.len() < 14 {
        return Err(format!("only {} report files", names.len()));
    }
    for name in &names {
        let (fa, fb) = (a.path().join(name), b.path().join(name));
        let same = if name.to_string_lossy().ends_with(".json") {
            without_environment(&fa)? == without_environment(&fb)?
        } else {
            std::fs::read(&fa).map_err(|e| e.to_string())? == std::fs::read(&fb).map_err(|e| e.to_string())?
        };
        if !same {
            return Err(format!("{} differs between runs", name.to_string_lossy()));
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, body: &str| -> Result<String, String> {
        let p = dir.path().join(name);
        std::fs::write(&p, body).map_err(|e| e.to_string())?;
        Ok(p.to_string_lossy().into_owned())
    };
    let out = dir.path().join("out");
    let out = out.to_str().ok_or("non-utf8 tempdir")?;
    let tight = write("tight.json", r#"{"mollifier": {"slope_tolerance": 0.001}}"#)?;
    let refused = write("refused.json", r#"{"schatten": {"order": [1.0, 2.0]}}"#)?;
    let unknown = write("unknown.json", r#"{"bogus": 1}"#)?;
    let expect = [
        (vec!["verify", "mollifier-rate", "--config", &tight, "--out", out], 1, ""),
        (vec!["verify", "schatten-bound", "--config", &refused, "--out", out], 2, "hypothesis"),
        (vec!["verify", "no-such-suite", "--out", out], 2, "unknown suite"),
        (vec!["verify", "peetre", "--config", &unknown, "--out", out], 2, "config"),
        (vec!["frobnicate"], 2, ""),
    ];
    for (args, want, needle) in expect {
        let (code, err) = katokit(&args, "2")?;
        if code != want || !err.contains(needle) {
            return Err(format!("{args:?}: exit {code} (want {want}), stderr {err:?}"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let criteria: [(&str, Box<dyn Fn() -> Outcome>); 7] = [
        ("plane-wave eigenrelations", Box::new(|| criterion_1(&cfg))),
        ("exact identities", Box::new(|| criterion_2(&cfg))),
        ("inequalities", Box::new(|| criterion_3(&cfg))),
        ("bounded and resolution-stable ratios", Box::new(|| criterion_4(&cfg))),
        ("holomorphic calculus", Box::new(|| criterion_5(&cfg))),
        ("coordinate change", Box::new(|| criterion_6(&cfg))),
        ("determinism and exit codes", Box::new(criterion_7)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
