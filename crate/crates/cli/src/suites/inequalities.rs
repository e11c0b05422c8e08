use std::f64::consts::PI;

use katokit::grid::{make_bump, BoxRegion, Mollifier};
use katokit::kato::{mollifier_rate_check, rate_field, young_bound_check, AmalgamNormSpec, Exponent};
use katokit::sobolev::{product_bound_check, ProductMode};
use katokit::weights::{peetre_check, weight_conv_check, ConvBox, SigmaParams};
use katokit::{ensemble, CheckReport, Complex64, Field, GridSpec, MultiOrder, Verdict};
use serde_json::json;

use super::{seed_for, Plan};
use crate::config::SuiteConfig;
use crate::report::{Case, Series};
use crate::CliError;

pub(super) fn peetre<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let seed = seed_for(cfg, "peetre");
    plan.case("peetre", move || Ok(vec![Case::new("peetre", peetre_check(cfg.peetre_samples, seed)).input("samples", cfg.peetre_samples)]));
    Ok(())
}

pub(super) fn window_product<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let setups: [(&str, usize, usize, Vec<usize>, Vec<f64>); 3] = [
        ("line", 1, cfg.grids.coarse, vec![1], vec![1.5]),
        ("line-negative", 1, cfg.grids.coarse, vec![1], vec![-1.0]),
        ("plane", 2, 32, vec![1, 1], vec![1.0, 0.5]),
    ];
    for (name, dim, n, blocks, s) in setups {
        let id = format!("window-product-{name}");
        let seed = seed_for(cfg, &id);
        plan.case(id.clone(), move || {
            let g = GridSpec::new(dim, n, 2.0 * PI, blocks.clone())?;
            let order = MultiOrder::new(s.clone(), blocks.clone())?;
            let chi = make_bump(&g, &BoxRegion::cube(dim, 1.0, 4.0), Some(&BoxRegion::cube(dim, 1.8, 3.2)))?.field;
            let mut rng = ensemble::rng(seed);
            let (mut worst, mut violations, mut constant) = (0.0f64, 0usize, 0.0);
            for _ in 0..cfg.ensemble {
                let u = ensemble::band_limited(&g, &mut rng, (n / 4) as i64, 1.0, false)?;
                let r = product_bound_check(&u, ProductMode::SmoothWindow(&chi), &order)?;
                worst = worst.max(r.get("ratio").unwrap_or(f64::NAN));
                constant = r.get("constant").unwrap_or(f64::NAN);
                violations += usize::from(r.verdict != Verdict::Pass);
            }
            let rep = CheckReport::new(id.clone(), "||chi u||_{H^s} <= C(s,n,chi) ||u||_{H^s}")
                .value("max_ratio", worst)
                .value("constant", constant)
                .value("violations", violations as f64)
                .verdict(Verdict::from_bool(violations == 0));
            Ok(vec![Case::new(id.clone(), rep).input("samples", n).input("order", json!(s)).input("ensemble", cfg.ensemble)])
        });
    }
    Ok(())
}

pub(super) fn weight_convolution<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let tol = cfg.tolerances.convolution;
    let setups: [(&str, Vec<f64>, Vec<f64>, Vec<f64>, Vec<usize>); 5] = [
        ("s1-t1", vec![1.0], vec![1.0], vec![0.25], vec![1]),
        ("s1.5-t0.75", vec![1.5], vec![0.75], vec![0.1], vec![1]),
        ("negative-s", vec![-0.5], vec![2.0], vec![0.25], vec![1]),
        ("two-blocks", vec![1.0, 0.8], vec![1.0, 1.2], vec![0.25, 0.25], vec![1, 1]),
        ("joint-plane", vec![1.5], vec![1.5], vec![0.25], vec![2]),
    ];
    for (name, s, t, eps, blocks) in setups {
        let id = format!("weight-convolution-{name}");
        plan.case(id.clone(), move || {
            let params = SigmaParams::new(MultiOrder::new(s.clone(), blocks.clone())?, MultiOrder::new(t.clone(), blocks.clone())?, eps.clone())?;
            let boxes: Vec<ConvBox> = blocks.iter().map(|&b| ConvBox::for_dim(b)).collect();
            let r = weight_conv_check(&params, &boxes, tol)?;
            Ok(vec![Case::new(id.clone(), r)
                .input("s", json!(s))
                .input("t", json!(t))
                .input("eps", json!(eps))
                .input("blocks", json!(blocks))])
        });
    }
    Ok(())
}

pub(super) fn mollifier_rate<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let m = &cfg.mollifier;
    let run = move |s: f64, sp: f64| -> Result<katokit::kato::MollifierRate, katokit::Error> {
        let g = GridSpec::isotropic(1, m.samples, 2.0 * PI)?;
        let u = rate_field(&g, &mut ensemble::rng(seed_for(cfg, &format!("rate-{s}-{sp}"))), s, m.delta)?;
        mollifier_rate_check(&u, s, sp, &m.eps, Some(m.slope_tolerance))
    };
    for &[s, sp] in &m.pairs {
        let id = format!("mollifier-rate-s{s}-s{sp}");
        plan.case(id.clone(), move || {
            let r = run(s, sp)?;
            Ok(vec![Case::new(id.clone(), r.report)
                .input("samples", m.samples)
                .input("eps", json!(m.eps))
                .input("delta", m.delta)])
        });
    }
    plan.series(move || {
        let mut rows = Vec::new();
        for &[s, sp] in &m.pairs {
            for p in run(s, sp)?.points {
                rows.push(vec![s, sp, p.eps, p.error, p.bound]);
            }
        }
        Ok(Series { name: "eps".into(), columns: ["s", "s_prime", "eps", "error", "bound"].map(String::from).to_vec(), rows })
    });
    Ok(())
}

pub(super) fn young_bound<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let n = cfg.grids.fine;
    for (kernel, p) in [("mollifier-0.4", 2.0), ("mollifier-0.1", 1.0), ("signed-bump", f64::INFINITY), ("signed-bump", 3.0)] {
        let id = format!("young-{kernel}-p{p}");
        let seed = seed_for(cfg, &id);
        plan.case(id.clone(), move || {
            let g = GridSpec::isotropic(1, n, 2.0 * PI)?;
            let phi = match kernel {
                "mollifier-0.4" => Mollifier::new(&g, 0.4)?.kernel().clone(),
                "mollifier-0.1" => Mollifier::new(&g, 0.1)?.kernel().clone(),
                _ => {
                    let b = make_bump(&g, &BoxRegion::cube(1, 0.3, 1.5), None)?.field;
                    let wave = Field::from_real_fn(&g, |x| (3.0 * x[0]).cos());
                    b.mul(&wave)?
                }
            };
            let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 3.0), None)?.field;
            let exp = if p.is_finite() { Exponent::Finite(p) } else { Exponent::Infinity };
            let spec = AmalgamNormSpec::continuous(MultiOrder::uniform(1.0, &[1]), exp, chi)?;
            let mut rng = ensemble::rng(seed);
            (0..5)
                .map(|i| {
                    let u = ensemble::band_limited(&g, &mut rng, 20, 1.0, false)?;
                    let u = u.add(&Field::constant(&g, Complex64::new(0.5, 0.0)))?;
                    Ok(Case::new(format!("{id}-{i}"), young_bound_check(&u, &phi, &spec)?)
                        .input("samples", n)
                        .input("p", exp.to_string()))
                })
                .collect()
        });
    }
    Ok(())
}
