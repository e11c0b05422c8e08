use std::f64::consts::PI;

use katokit::grid::{make_bump, BoxRegion};
use katokit::kato::{h_equals_k2_check, kato_norm, kato_product_check, window_ratio_check, AmalgamNormSpec, Exponent, TranslationScheme};
use katokit::psido::sw_embedding_check;
use katokit::sobolev::{build_partition, h_norm, lattice_decomposition_check, Lattice};
use katokit::weights::SigmaParams;
use katokit::{ensemble, EnsembleStats, Error, Field, GridSpec, MultiOrder};
use rayon::prelude::*;

use super::{seed_for, stability_case, Plan};
use crate::config::SuiteConfig;
use crate::CliError;

const KMAX: i64 = 12;

fn grid(n: usize) -> Result<GridSpec, Error> {
    GridSpec::isotropic(1, n, 2.0 * PI)
}

fn fields(g: &GridSpec, seed: u64, count: usize) -> Result<Vec<Field>, Error> {
    let mut rng = ensemble::rng(seed);
    (0..count).map(|_| ensemble::band_limited(g, &mut rng, KMAX, 1.0, false)).collect()
}

fn bump(g: &GridSpec, lo: f64, hi: f64, plateau: Option<(f64, f64)>) -> Result<Field, Error> {
    let p = plateau.map(|(a, b)| BoxRegion::cube(1, a, b));
    Ok(make_bump(g, &BoxRegion::cube(1, lo, hi), p.as_ref())?.field)
}

type Measure = dyn Fn(&GridSpec, &[Field]) -> Result<EnsembleStats, Error> + Send + Sync;

pub(super) fn build<'a>(cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let order = MultiOrder::uniform(1.5, &[1]);
    let o1 = order.clone();
    let o2 = order.clone();
    let o3 = order.clone();
    let measures: Vec<(&str, &str, Box<Measure>)> = vec![
        (
            "h-equals-k2",
            "||u||_{s,2,Gamma,h} / ||u||_{H^s} is bounded above and below",
            Box::new(move |g, us| h_equals_k2_check(us, &build_partition(g, Lattice::new(2)?)?, &o1)),
        ),
        (
            "lattice-decomposition",
            "(sum_gamma ||(tau_gamma h) u||^2_{H^s})^{1/2} / ||u||_{H^s} is bounded above and below",
            Box::new(move |g, us| lattice_decomposition_check(us, &build_partition(g, Lattice::new(2)?)?, &o2)),
        ),
        (
            "window-ratio-p2",
            "||u||_{s,p,chi~} / ||u||_{s,p,chi} is bounded above and below",
            Box::new(move |g, us| window_pair(g, &o3, Exponent::Finite(2.0)).and_then(|(a, b)| window_ratio_check(us, &a, &b))),
        ),
        (
            "window-ratio-pinf",
            "||u||_{s,inf,chi~} / ||u||_{s,inf,chi} is bounded above and below",
            Box::new(move |g, us| {
                window_pair(g, &MultiOrder::uniform(1.0, &[1]), Exponent::Infinity).and_then(|(a, b)| window_ratio_check(us, &a, &b))
            }),
        ),
        (
            "kato-product",
            "||uv||_{sigma,r,chi^2} <= C ||u||_{s,p,chi} ||v||_{t,q,chi}, p = q = 2, r = 1",
            Box::new(|g, us| {
                // s = t = 1 and eps = 3/4 give sigma = 3/4
                let params = SigmaParams::uniform(1.0, 1.0, 0.75, &[1])?;
                let chi = bump(g, 1.0, 3.0, None)?;
                let pairs: Vec<(Field, Field)> = us.chunks_exact(2).map(|w| (w[0].clone(), w[1].clone())).collect();
                let two = Exponent::Finite(2.0);
                let scheme = TranslationScheme::Continuous { points: g.samples() };
                kato_product_check(&pairs, &params, (two, two, Exponent::Finite(1.0)), &chi, scheme)
            }),
        ),
        (
            "uniformly-local-times-sobolev",
            "||uv||_{H^sigma} <= C ||u||_{s,inf,chi} ||v||_{H^t}",
            Box::new(|g, us| {
                let params = SigmaParams::uniform(1.0, 1.0, 0.75, &[1])?;
                let ul = AmalgamNormSpec::continuous(params.s.clone(), Exponent::Infinity, bump(g, 1.0, 3.0, None)?)?;
                let r: Vec<f64> = us
                    .par_chunks_exact(2)
                    .map(|w| Ok(h_norm(&w[0].mul(&w[1])?, &params.sigma)? / (kato_norm(&w[0], &ul)? * h_norm(&w[1], &params.t)?)))
                    .collect::<Result<_, Error>>()?;
                Ok(EnsembleStats::from_values(&r))
            }),
        ),
        (
            "modulation-embedding",
            "||u||_{S_w^p,chi} <= C ||chi||_{H^s} ||<<.>>^{-s}||_{L^1} ||u||_{s,p,chi~}",
            Box::new(|g, us| {
                let chi = bump(g, 1.0, 2.5, None)?;
                let outer = bump(g, 0.6, 2.9, Some((0.95, 2.55)))?;
                let spec = AmalgamNormSpec::continuous(MultiOrder::uniform(1.5, &[1]), Exponent::Finite(2.0), outer)?;
                sw_embedding_check(us, &chi, &spec)
            }),
        ),
    ];
    let (n0, n1) = (cfg.grids.coarse, cfg.grids.fine);
    let tol = cfg.tolerances.stability;
    let seed = seed_for(cfg, "equivalence");
    for (id, claim, measure) in measures {
        plan.case(id, move || {
            let at = |n: usize| -> Result<EnsembleStats, Error> {
                let g = grid(n)?;
                measure(&g, &fields(&g, seed, cfg.ensemble)?)
            };
            Ok(vec![stability_case(id, claim, (n0, at(n0)?), (n1, at(n1)?), tol)])
        });
    }
    Ok(())
}

/// Two admissible windows of different size and position.
fn window_pair(g: &GridSpec, order: &MultiOrder, p: Exponent) -> Result<(AmalgamNormSpec, AmalgamNormSpec), Error> {
    let a = AmalgamNormSpec::continuous(order.clone(), p, bump(g, 0.5, 2.0, None)?)?;
    let b = AmalgamNormSpec::continuous(order.clone(), p, bump(g, 1.0, 4.0, Some((1.5, 3.5)))?)?;
    Ok((a, b))
}
