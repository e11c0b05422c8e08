//! Check outcomes shared by every module.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Worst of two verdicts; FAIL dominates INCONCLUSIVE dominates PASS.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of one numerical check: what was claimed, what was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub claim: String,
    pub verdict: Verdict,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, claim: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            claim: claim.into(),
            verdict: Verdict::Pass,
            values: BTreeMap::new(),
            note: None,
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn set(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Summary of a ratio measured over an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl EnsembleStats {
    pub fn from_values(values: &[f64]) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        EnsembleStats {
            count: values.len(),
            min,
            max,
            mean: if values.is_empty() { f64::NAN } else { sum / values.len() as f64 },
        }
    }

    pub fn finite(&self) -> bool {
        self.count > 0 && self.min.is_finite() && self.max.is_finite()
    }

    /// Largest relative change of min and max between two resolutions.
    pub fn drift(&self, other: &EnsembleStats) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        rel(self.min, other.min).max(rel(self.max, other.max))
    }
}

/// Verdict for an existential-constant check measured at two resolutions:
/// the ratio must stay finite and positive and move by at most `tol`.
pub fn stability_report(
    check: &str,
    claim: &str,
    coarse: (usize, EnsembleStats),
    fine: (usize, EnsembleStats),
    tol: f64,
) -> CheckReport {
    let (n0, a) = coarse;
    let (n1, b) = fine;
    let drift = a.drift(&b);
    let bounded = a.finite() && b.finite() && a.min > 0.0 && b.min > 0.0;
    let mut r = CheckReport::new(check, claim)
        .value("coarse_n", n0 as f64)
        .value("fine_n", n1 as f64)
        .value("coarse_min", a.min)
        .value("coarse_max", a.max)
        .value("fine_min", b.min)
        .value("fine_max", b.max)
        .value("spread", b.max / b.min)
        .value("drift", drift)
        .value("tolerance", tol)
        .value("ensemble", b.count as f64);
    r.verdict = if !bounded {
        Verdict::Fail
    } else if drift <= tol {
        Verdict::Pass
    } else {
        r.note = Some("ratio not yet resolution-stable".into());
        Verdict::Inconclusive
    };
    r
}
