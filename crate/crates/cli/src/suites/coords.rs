use std::f64::consts::PI;

use katokit::psido::{coordinate_change_check, multiplier_change_check, GridIsometry};
use katokit::{ensemble, Complex64, GridSpec};

use super::{seed_for, Plan};
use crate::config::SuiteConfig;
use crate::report::Case;
use crate::CliError;

const RADIAL: [(&str, fn(f64) -> f64); 3] = [("t", |t| t), ("sqrt(1+t)", |t| (1.0 + t).sqrt()), ("exp(-t)", |t| (-t).exp())];

pub(super) fn build<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let seed = seed_for(cfg, "coordinate-change");
    for (i, lambda) in GridIsometry::all(2).into_iter().enumerate() {
        let id = format!("isometry-{i}");
        plan.case(id.clone(), move || {
            let g = GridSpec::isotropic(2, 32, 2.0 * PI)?;
            let u = ensemble::band_limited(&g, &mut ensemble::rng(seed), 10, 1.0, false)?;
            let desc = format!("{lambda:?}");
            let mut out = Vec::new();
            for (name, b) in RADIAL {
                let r = coordinate_change_check(&u, b, &lambda)?;
                out.push(Case::new(format!("{id}-b={name}"), r).input("isometry", desc.clone()).input("b", name));
            }
            let a = |xi: &[f64]| Complex64::new(xi[0] + 0.3 * xi[1] * xi[1], (-(xi[0] - 1.0).powi(2)).exp());
            let r = multiplier_change_check(&u, a, &lambda)?;
            out.push(Case::new(format!("{id}-general-multiplier"), r).input("isometry", desc));
            Ok(out)
        });
    }
    Ok(())
}
