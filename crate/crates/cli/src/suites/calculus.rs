use std::f64::consts::PI;

use katokit::calculus::{calderon_apply, chain_rule_check, divide, invert, joint_spectrum_witness, ContourSpec, HoloFn};
use katokit::grid::{make_bump, BoxRegion};
use katokit::kato::{rate_field, AmalgamNormSpec, Exponent};
use katokit::sobolev::h_norm;
use katokit::{ensemble, CheckReport, Complex64, Error, Field, GridSpec, MultiOrder, Verdict};
use serde_json::json;

use super::{seed_for, Plan};
use crate::config::SuiteConfig;
use crate::report::{Case, Series};
use crate::CliError;

const FUNCTIONS: [&str; 4] = ["z", "z^2", "exp", "1/z"];

fn grid(n: usize) -> Result<GridSpec, Error> {
    GridSpec::isotropic(1, n, 2.0 * PI)
}

fn cosine(g: &GridSpec) -> Field {
    Field::from_real_fn(g, |x| 2.0 + x[0].cos())
}

/// Cut of the reciprocal's excluded disc; the test fields stay above 1.
const CUT: f64 = 0.5;

pub(super) fn build<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let n = cfg.grids.coarse;
    let spec = ContourSpec::default();
    let random_seed = seed_for(cfg, "calculus-random");
    let field = move |which: &str| -> Result<Field, Error> {
        let g = grid(n)?;
        match which {
            "cosine" => Ok(cosine(&g)),
            _ => ensemble::smooth_with_margin(&g, &mut ensemble::rng(random_seed), 6, Complex64::new(2.0, 0.0), 0.8),
        }
    };

    for which in ["cosine", "random"] {
        for name in FUNCTIONS {
            let id = format!("calderon-{which}-{name}");
            let spec = spec.clone();
            plan.single(id.clone(), move || {
                let u = field(which)?;
                let phi = HoloFn::by_name(name, CUT)?;
                let mut r = calderon_apply(&[u], &phi, &spec)?.report(&phi);
                r.check = id.clone();
                Ok(r)
            });
        }
    }

    let s = spec.clone();
    plan.single("inversion", move || {
        let u = field("random")?;
        let inv = invert(&u, &s)?;
        let chi = make_bump(u.spec(), &BoxRegion::cube(1, 1.0, 3.0), None)?.field;
        inv.report(&AmalgamNormSpec::continuous(MultiOrder::uniform(1.0, &[1]), Exponent::Finite(2.0), chi)?)
    });

    let s = spec.clone();
    plan.single("division", move || {
        // the cutoff and the division need a finer grid than the rest
        let g = grid(4 * n)?;
        let u = make_bump(&g, &BoxRegion::cube(1, 1.0, 2.0), None)?.field;
        let phi = make_bump(&g, &BoxRegion::cube(1, 0.2, 3.0), Some(&BoxRegion::cube(1, 0.95, 2.05)))?.field;
        let v = cosine(&g);
        let d = divide(&u, &v, &phi, 1.5, &s)?;
        Ok(CheckReport::new("division", "|v| >= c on supp u gives u/v with the cutoff construction")
            .value("residual", d.residual)
            .value("w_min", d.w_min)
            .value("samples", g.samples() as f64)
            .verdict(Verdict::from_bool(d.residual <= 1e-7)))
    });

    for name in ["z", "z^2", "exp", "1/z"] {
        let id = format!("chain-rule-{name}");
        let s = spec.clone();
        plan.single(id, move || {
            let g = grid(n)?;
            let u = Field::from_real_fn(&g, |x| 1.0 + 0.1 * x[0].cos());
            chain_rule_check(&[u], &HoloFn::by_name(name, CUT)?, &s)
        });
    }
    let s = ContourSpec { nodes: 32, ..spec.clone() };
    plan.single("chain-rule-z1*z2", move || {
        let g = grid(n)?;
        let u = Field::from_real_fn(&g, |x| 1.0 + 0.1 * x[0].cos());
        let v = Field::from_real_fn(&g, |x| x[0].sin());
        chain_rule_check(&[u, v], &HoloFn::product(), &s)
    });

    let s = spec.clone();
    plan.case("joint-spectrum", move || {
        let g = grid(n)?;
        let c = Field::from_real_fn(&g, |x| x[0].cos());
        let sn = Field::from_real_fn(&g, |x| x[0].sin());
        let lambda = [Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)];
        let witness = Case::new("joint-spectrum-outside", joint_spectrum_witness(&[c.clone(), sn.clone()], &lambda, &s)?)
            .input("lambda", json!([[2.0, 0.0], [2.0, 0.0]]));
        let hit = [c.samples()[5], sn.samples()[5]];
        let refusal = match joint_spectrum_witness(&[c, sn], &hit, &s) {
            Err(Error::LambdaInSpectrum { distance, min_u_lambda }) => CheckReport::new("joint-spectrum-refusal", "lambda in the joint range has no witness")
                .value("distance", distance)
                .value("min_u_lambda", min_u_lambda)
                .verdict(Verdict::Pass),
            Err(e) => return Err(e),
            Ok(r) => r.verdict(Verdict::Fail).note("a witness was produced for lambda in the range"),
        };
        Ok(vec![witness, Case::new("joint-spectrum-refusal", refusal).input("sample", 5)])
    });

    let s = spec.clone();
    plan.series(move || {
        let u = field("cosine")?;
        let phi = HoloFn::reciprocal(CUT);
        let mut rows = Vec::new();
        for nodes in [16, 24, 32, 48, 64] {
            let loose = ContourSpec { nodes, drift_tol: f64::INFINITY, tolerance: f64::INFINITY, ..s.clone() };
            let h = calderon_apply(std::slice::from_ref(&u), &phi, &loose)?;
            rows.push(vec![nodes as f64, h.pointwise_error, h.drift]);
        }
        Ok(Series { name: "nodes".into(), columns: ["nodes", "pointwise_error", "doubling_drift"].map(String::from).to_vec(), rows })
    });
    Ok(())
}

/// Records `||1/u||_{H^s}` for rough `u` with `s` on both sides of 3/4.
pub(super) fn threshold<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    for &s in &cfg.threshold_orders {
        for n in [cfg.grids.coarse, cfg.grids.fine] {
            let id = format!("threshold-s{s}-n{n}");
            let seed = seed_for(cfg, &format!("threshold-{s}"));
            plan.single(id.clone(), move || {
                let g = grid(n)?;
                let w = rate_field(&g, &mut ensemble::rng(seed), s, 0.02)?;
                let amp = 0.1 / w.sup_norm();
                let u = w.map(|z| Complex64::new(2.0 + amp * z.re, 0.0));
                let spec = ContourSpec { report_order: s, ..ContourSpec::default() };
                let phi = HoloFn::reciprocal(CUT);
                let h = calderon_apply(std::slice::from_ref(&u), &phi, &spec)?;
                let order = MultiOrder::uniform(s, &[1]);
                Ok(CheckReport::new(id.clone(), "Phi(u) in H^s for u in H^s near the order threshold")
                    .value("s", s)
                    .value("u_norm", h_norm(&u, &order)?)
                    .value("phi_u_norm", h_norm(&h.value, &order)?)
                    .value("smoothing_norm", h.smoothing_norm)
                    .value("pointwise_error", h.pointwise_error)
                    .verdict(Verdict::Inconclusive)
                    .note("recorded only; no conclusion is drawn about the threshold"))
            });
        }
    }
    Ok(())
}
