use std::f64::consts::PI;

use katokit::kato::{retraction_roundtrip, Exponent, Retraction};
use katokit::psido::{families, hilbert_schmidt_check, operator_grid, Tau};
use katokit::sobolev::{derivative_split_check, Lattice};
use katokit::{ensemble, GridSpec, MultiOrder};
use serde_json::json;

use super::{seed_for, Plan};
use crate::config::SuiteConfig;
use crate::report::Case;
use crate::CliError;

const FIELDS_PER_CASE: usize = 5;

pub(super) fn build<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let split: [(&str, usize, usize, Vec<usize>, Vec<f64>, usize); 4] = [
        ("line", 1, 128, vec![1], vec![1.5], 0),
        ("plane-x", 2, 32, vec![1, 1], vec![1.0, 2.0], 0),
        ("plane-y", 2, 32, vec![1, 1], vec![1.0, 2.0], 1),
        ("plane-joint", 2, 32, vec![2], vec![-0.5], 0),
    ];
    for (name, dim, n, blocks, s, l) in split {
        let id = format!("derivative-split-{name}");
        let seed = seed_for(cfg, &id);
        plan.case(id.clone(), move || {
            let g = GridSpec::new(dim, n, 2.0 * PI, blocks.clone())?;
            let order = MultiOrder::new(s.clone(), blocks.clone())?;
            let mut rng = ensemble::rng(seed);
            (0..FIELDS_PER_CASE)
                .map(|i| {
                    let u = ensemble::band_limited(&g, &mut rng, (n / 4) as i64, 1.0, false)?;
                    Ok(Case::new(format!("{id}-{i}"), derivative_split_check(&u, &order, l)?)
                        .input("samples", n)
                        .input("order", json!(s))
                        .input("block", l))
                })
                .collect()
        });
    }

    for (dim, n, cells, p) in [(1usize, 256usize, 4usize, 2.0), (1, 256, 2, f64::INFINITY), (2, 64, 2, 1.0)] {
        let id = format!("retraction-{dim}d-c{cells}");
        let seed = seed_for(cfg, &id);
        plan.case(id.clone(), move || {
            let g = GridSpec::isotropic(dim, n, 2.0 * PI)?;
            let r = Retraction::new(&g, Lattice::new(cells)?)?;
            let order = MultiOrder::uniform(1.0, &vec![1; dim]);
            let exp = if p.is_finite() { Exponent::Finite(p) } else { Exponent::Infinity };
            let mut rng = ensemble::rng(seed);
            (0..FIELDS_PER_CASE)
                .map(|i| {
                    let u = ensemble::band_limited(&g, &mut rng, 12, 1.0, false)?;
                    Ok(Case::new(format!("{id}-{i}"), retraction_roundtrip(&u, &r, &order, exp)?)
                        .input("samples", n)
                        .input("cells", cells)
                        .input("p", exp.to_string()))
                })
                .collect()
        });
    }

    for (n, samples) in [(1usize, 16usize), (2, 8)] {
        let id = format!("hilbert-schmidt-n{n}");
        let seed = seed_for(cfg, &id);
        let taus = &cfg.taus;
        plan.case(id.clone(), move || {
            let xs = operator_grid(n, samples)?;
            let taus: Vec<Tau> = taus.iter().map(|&t| Tau::scalar(n, t)).collect::<Result<_, _>>()?;
            let mut rng = ensemble::rng(seed);
            (0..FIELDS_PER_CASE)
                .map(|i| {
                    let a = families::wave_packets(&xs, MultiOrder::uniform(2.5, &[n, n]), &mut rng, 3)?;
                    Ok(Case::new(format!("{id}-{i}"), hilbert_schmidt_check(&a, &taus)?)
                        .input("samples", samples)
                        .input("taus", json!(cfg.taus)))
                })
                .collect()
        });
    }
    Ok(())
}
