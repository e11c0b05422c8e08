//! Named verification suites. Each suite builds a list of independent cases,
//! runs them in parallel and assembles the report in case order.

mod calculus;
mod coords;
mod equivalence;
mod identities;
mod inequalities;
mod operators;
mod spectral;

use katokit::{CheckReport, Error, Verdict};
use rayon::prelude::*;

use crate::config::SuiteConfig;
use crate::report::{Case, Report, Series};
use crate::CliError;

type CaseFn<'a> = Box<dyn Fn() -> Result<Vec<Case>, Error> + Send + Sync + 'a>;

/// Cases and plot data collected by a suite before assembly.
#[derive(Default)]
pub(crate) struct Plan<'a> {
    cases: Vec<(String, CaseFn<'a>)>,
    series: Vec<Box<dyn Fn() -> Result<Series, Error> + Send + Sync + 'a>>,
}

impl<'a> Plan<'a> {
    pub(crate) fn case<F>(&mut self, id: impl Into<String>, f: F)
    where
        F: Fn() -> Result<Vec<Case>, Error> + Send + Sync + 'a,
    {
        self.cases.push((id.into(), Box::new(f)));
    }

    pub(crate) fn single<F>(&mut self, id: impl Into<String>, f: F)
    where
        F: Fn() -> Result<CheckReport, Error> + Send + Sync + 'a,
    {
        let id = id.into();
        let name = id.clone();
        self.case(id, move || Ok(vec![Case::new(name.clone(), f()?)]));
    }

    pub(crate) fn series<F>(&mut self, f: F)
    where
        F: Fn() -> Result<Series, Error> + Send + Sync + 'a,
    {
        self.series.push(Box::new(f));
    }
}

pub struct Suite {
    pub id: &'static str,
    pub citation: &'static str,
    build: for<'a> fn(&'a SuiteConfig, &mut Plan<'a>) -> Result<(), CliError>,
}

pub const SUITES: &[Suite] = &[
    Suite { id: "spectral", citation: "plane waves diagonalize Bessel potentials, derivatives and Fourier multipliers", build: spectral::build },
    Suite { id: "identities", citation: "derivative splitting, retraction roundtrip and the Hilbert-Schmidt identity", build: identities::build },
    Suite { id: "peetre", citation: "Peetre inequality for multi-order weights", build: inequalities::peetre },
    Suite { id: "window-product", citation: "multiplication by a smooth window is bounded on H^s", build: inequalities::window_product },
    Suite { id: "weight-convolution", citation: "convolution of multi-order weights", build: inequalities::weight_convolution },
    Suite { id: "mollifier-rate", citation: "mollifier convergence rate eps^min(s-s',1)", build: inequalities::mollifier_rate },
    Suite { id: "young-bound", citation: "Young bound for uniformly local norms", build: inequalities::young_bound },
    Suite { id: "equivalence", citation: "equivalence constants of uniformly local norms", build: equivalence::build },
    Suite { id: "schatten-bound", citation: "Schatten class membership of tau-quantized operators", build: operators::schatten_bound },
    Suite { id: "modulation", citation: "modulation norm under dilations", build: operators::modulation },
    Suite { id: "calculus", citation: "holomorphic functional calculus through the polydisc contour integral", build: calculus::build },
    Suite { id: "threshold", citation: "calculus near the Sobolev order threshold 3/4", build: calculus::threshold },
    Suite { id: "coordinate-change", citation: "radial multipliers commute with grid isometries", build: coords::build },
];

pub fn find(id: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.id == id)
}

/// Discretization limits are not counterexamples.
fn limited(e: &Error) -> bool {
    matches!(e, Error::Resolution(_) | Error::SmoothingFloor { .. } | Error::QuadratureNonConvergence { .. } | Error::SvdNonConvergence)
}

fn failed_case(id: &str, e: &Error) -> Case {
    let verdict = if limited(e) { Verdict::Inconclusive } else { Verdict::Fail };
    Case::new(id, CheckReport::new("error", "case completed").verdict(verdict).note(e.to_string()))
}

impl Suite {
    /// Hypothesis violations in the configured parameters refuse the whole
    /// suite; any other error only marks its case.
    pub fn run(&self, cfg: &SuiteConfig) -> Result<Report, CliError> {
        let mut plan = Plan::default();
        (self.build)(cfg, &mut plan)?;
        let outcomes: Vec<Result<Vec<Case>, (String, Error)>> =
            plan.cases.par_iter().map(|(id, f)| f().map_err(|e| (id.clone(), e))).collect();
        let mut cases = Vec::new();
        for o in outcomes {
            match o {
                Ok(c) => cases.extend(c),
                Err((id, e @ Error::Hypothesis(_))) => return Err(CliError::Refused(format!("{}: case {id}: {e}", self.id))),
                Err((id, e)) => cases.push(failed_case(&id, &e)),
            }
        }
        let series: Vec<Result<Series, Error>> = plan.series.par_iter().map(|f| f()).collect();
        let mut kept = Vec::new();
        for s in series {
            match s {
                Ok(s) => kept.push(s),
                Err(e) => cases.push(failed_case("series", &e)),
            }
        }
        Ok(Report::new(self.id, self.citation, cfg.seed, cases, kept))
    }
}

/// A ratio measured at two resolutions, judged by [`katokit::report::stability_report`].
pub(crate) fn stability_case(
    id: &str,
    claim: &str,
    coarse: (usize, katokit::EnsembleStats),
    fine: (usize, katokit::EnsembleStats),
    tol: f64,
) -> Case {
    Case::new(id, katokit::report::stability_report(id, claim, coarse, fine, tol)).input("ensemble", fine.1.count)
}

/// Per-case seed derived from the config seed and a case label.
pub(crate) fn seed_for(cfg: &SuiteConfig, label: &str) -> u64 {
    // FNV-1a, stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ cfg.seed;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_are_unique() {
        let mut ids: Vec<&str> = SUITES.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), SUITES.len());
        assert!(find("all").is_none());
    }

    #[test]
    fn case_seeds_differ_by_label() {
        let cfg = SuiteConfig::default();
        assert_ne!(seed_for(&cfg, "a"), seed_for(&cfg, "b"));
        assert_eq!(seed_for(&cfg, "a"), seed_for(&cfg, "a"));
    }

    #[test]
    fn resolution_errors_are_inconclusive() {
        let c = failed_case("x", &Error::Resolution("coarse".into()));
        assert_eq!(c.result.verdict, Verdict::Inconclusive);
        let c = failed_case("x", &Error::Postcondition("off".into()));
        assert_eq!(c.result.verdict, Verdict::Fail);
    }
}
