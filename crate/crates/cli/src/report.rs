//! Suite reports: JSON on disk, one-line summaries, CSV extraction.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use katokit::{CheckReport, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// One measured claim together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, Value>,
    #[serde(flatten)]
    pub result: CheckReport,
}

impl Case {
    pub fn new(id: impl Into<String>, result: CheckReport) -> Self {
        Case { id: id.into(), inputs: BTreeMap::new(), result }
    }

    pub fn input(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }
}

/// Tabular plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Where and with what the report was produced. Excluded when reports are
/// compared for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    /// The claim the suite exercises, in words.
    pub citation: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub cases: Vec<Case>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<Series>,
    pub environment: Environment,
}

impl Report {
    pub fn new(suite: &str, citation: &str, seed: u64, cases: Vec<Case>, series: Vec<Series>) -> Self {
        let verdict = cases.iter().fold(Verdict::Pass, |v, c| v.and(c.result.verdict));
        Report {
            suite: suite.to_string(),
            citation: citation.to_string(),
            seed,
            verdict,
            cases,
            series,
            environment: Environment::current(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `id,check,verdict,key,value` for every recorded value.
    pub fn cases_csv(&self) -> String {
        let mut out = String::from("id,check,verdict,key,value\n");
        for c in &self.cases {
            for (k, v) in &c.result.values {
                let _ = writeln!(out, "{},{},{},{},{}", c.id, c.result.check, c.result.verdict, k, v);
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let put = |name: String, body: String| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        };
        put(format!("{}.json", self.suite), self.to_json())?;
        put(format!("{}.csv", self.suite), self.cases_csv())?;
        for s in &self.series {
            put(format!("{}.{}.csv", self.suite, s.name), s.to_csv())?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let offset = byte_offset(text, e.line(), e.column());
            CliError::Parse(format!("byte offset {offset}: {e}"))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Report::parse(&text)
    }

    /// One line per case: verdict, suite, citation, check and headline value.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let headline = headline(&c.result).map(|(k, v)| format!("{k}={v:.6e}")).unwrap_or_default();
            let _ = writeln!(out, "{:<12} {} [{}] {} {}", c.result.verdict.as_str(), self.suite, self.citation, c.id, headline);
        }
        let _ = writeln!(out, "{:<12} {} ({} cases)", self.verdict.as_str(), self.suite, self.cases.len());
        out
    }

    /// Every series as CSV, each preceded by `# name`; the case table when there are none.
    pub fn extract_csv(&self) -> String {
        if self.series.is_empty() {
            return self.cases_csv();
        }
        let mut out = String::new();
        for s in &self.series {
            let _ = writeln!(out, "# {}", s.name);
            out.push_str(&s.to_csv());
        }
        out
    }
}

const HEADLINE_KEYS: [&str; 9] = [
    "ratio",
    "max_ratio",
    "fine_max",
    "relative_error",
    "sup_error",
    "residual",
    "pointwise_error",
    "relative_l2_discrepancy",
    "max_error",
];

fn headline(r: &CheckReport) -> Option<(&str, f64)> {
    HEADLINE_KEYS
        .iter()
        .find_map(|k| r.get(k).map(|v| (*k, v)))
        .or_else(|| r.values.iter().next().map(|(k, v)| (k.as_str(), *v)))
}

/// 1-based `line`/`column` to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let ok = CheckReport::new("demo", "x <= y").value("ratio", 0.5).verdict(Verdict::Pass);
        let shaky = CheckReport::new("demo", "x ~ y").value("drift", 0.2).verdict(Verdict::Inconclusive);
        let series = Series { name: "sweep".into(), columns: vec!["eps".into(), "error".into()], rows: vec![vec![0.4, 1.0], vec![0.2, 0.5]] };
        Report::new("demo", "a demo claim", 1, vec![Case::new("a", ok).input("n", 128), Case::new("b", shaky)], vec![series])
    }

    #[test]
    fn verdict_is_the_worst_case() {
        assert_eq!(sample().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn json_roundtrip() {
        let r = sample();
        let back = Report::parse(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.cases[0].inputs["n"], Value::from(128));
    }

    #[test]
    fn summary_has_one_line_per_case() {
        let s = sample().summary();
        assert_eq!(s.lines().count(), 3);
        assert!(s.lines().next().unwrap().contains("ratio=5.000000e-1"));
    }

    #[test]
    fn csv_extraction() {
        let csv = sample().extract_csv();
        assert_eq!(csv, "# sweep\neps,error\n0.4,1\n0.2,0.5\n");
    }

    #[test]
    fn parse_error_reports_byte_offset() {
        let text = "{\n  \"suite\": \"x\",\n  oops\n}";
        let err = Report::parse(text).unwrap_err().to_string();
        assert!(err.contains("byte offset 20"), "{err}");
    }

    #[test]
    fn offsets() {
        assert_eq!(byte_offset("ab\ncd", 2, 2), 4);
        assert_eq!(byte_offset("ab", 1, 1), 0);
    }
}
