//! The modulation norm
//! `||u||_{S_w^p, chi} = int (int |(u tau_y chi)^(xi)|^p dy)^{1/p} d xi`
//! and its comparison with amalgam norms and dilations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::kato::{kato_norm, AmalgamNormSpec, Exponent, TranslationScheme};
use crate::report::EnsembleStats;
use crate::sobolev::{h_norm, Lattice};
use crate::weights::bracket_l1_norm;

const CHUNK: usize = 64;

/// `sum_k U(xi_k) (2 pi / L)^n` with
/// `U(xi_k) = ((L/M)^n sum_y |L^n c_k(u tau_y chi)|^p)^{1/p}` over `M^n`
/// equispaced translations (`max` over them for `p = inf`).
pub fn sw_norm(u: &Field, window: &Field, p: Exponent, points: usize) -> Result<f64> {
    let spec = u.spec();
    spec.check_same(window.spec())?;
    if points == 0 || !spec.samples().is_multiple_of(points) {
        return Err(Error::InvalidParameter(format!("{points} translation points do not divide {} samples", spec.samples())));
    }
    let shifts = Lattice::new(points)?.shifts(spec)?;
    let vol = spec.volume();
    let mut acc = vec![0.0f64; spec.len()];
    for chunk in shifts.chunks(CHUNK) {
        let spectra: Vec<Vec<f64>> = chunk
            .par_iter()
            .map(|s| {
                let f = window.cyclic_shift(s).mul(u)?;
                Ok(f.to_spectrum().coeffs().iter().map(|c| c.norm() * vol).collect())
            })
            .collect::<Result<_>>()?;
        for sp in &spectra {
            for (a, v) in acc.iter_mut().zip(sp) {
                match p {
                    Exponent::Infinity => *a = a.max(*v),
                    Exponent::Finite(p) => *a += v.powf(p),
                }
            }
        }
    }
    let weight = (spec.period() / points as f64).powi(spec.dim() as i32);
    let dxi = spec.frequency_step().powi(spec.dim() as i32);
    let total: f64 = acc
        .iter()
        .map(|a| match p {
            Exponent::Infinity => *a,
            Exponent::Finite(p) => (weight * a).powf(1.0 / p),
        })
        .sum();
    Ok(total * dxi)
}

/// `||u||_{S_w^p,chi} / (||chi||_{H^s} ||<<.>>^{-s}||_{L^1} ||u||_{s,p,chi~})`.
/// Needs `s_l > n_l` and `chi~ = 1` on `supp chi`; translations on every sample.
pub fn sw_embedding_ratio(u: &Field, chi: &Field, outer: &AmalgamNormSpec) -> Result<f64> {
    let order = outer.order();
    for (l, (&s, &nl)) in order.s().iter().zip(order.blocks()).enumerate() {
        if s <= nl as f64 {
            return Err(Error::Hypothesis(format!("block {l}: s = {s} must exceed n_l = {nl}")));
        }
    }
    let bad = chi
        .samples()
        .iter()
        .zip(outer.window().samples())
        .filter(|(c, w)| c.norm() > 0.0 && (*w - 1.0).norm() > 1e-14)
        .count();
    if bad > 0 {
        return Err(Error::Hypothesis(format!("outer window differs from 1 at {bad} samples of supp chi")));
    }
    let points = match outer.scheme() {
        TranslationScheme::Continuous { points } => points,
        TranslationScheme::Lattice(_) => {
            return Err(Error::InvalidParameter("the embedding compares continuous-translation norms".into()));
        }
    };
    let weight_l1: f64 = order
        .s()
        .iter()
        .zip(order.blocks())
        .map(|(&s, &nl)| bracket_l1_norm(0.5 * s, nl))
        .product::<Result<f64>>()?;
    let lhs = sw_norm(u, chi, outer.p(), points)?;
    Ok(lhs / (h_norm(chi, order)? * weight_l1 * kato_norm(u, outer)?))
}

pub fn sw_embedding_check(ensemble: &[Field], chi: &Field, outer: &AmalgamNormSpec) -> Result<EnsembleStats> {
    let r: Vec<f64> = ensemble.iter().map(|u| sw_embedding_ratio(u, chi, outer)).collect::<Result<_>>()?;
    Ok(EnsembleStats::from_values(&r))
}

/// `(u o lambda)(x) = u(c + k (x - c))` for `lambda = k I` about the torus
/// center `c`, read as zero where `c + k (x - c)` leaves the period. Exact
/// index arithmetic; `N (k - 1) / 2` must be an integer.
pub fn dilate(u: &Field, factor: usize) -> Result<Field> {
    let spec = u.spec();
    let big = spec.samples();
    if factor == 0 || !(big * (factor - 1)).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("dilation by {factor} is not grid-compatible for N = {big}")));
    }
    let off = (big * (factor - 1) / 2) as i64;
    let samples = (0..spec.len())
        .map(|flat| {
            let idx = spec.multi_index(flat);
            let src: Option<Vec<usize>> = idx
                .iter()
                .map(|&i| {
                    let j = factor as i64 * i as i64 - off;
                    (0..big as i64).contains(&j).then_some(j as usize)
                })
                .collect();
            src.map_or(num_complex::Complex64::new(0.0, 0.0), |s| u.samples()[spec.flat_index(&s)])
        })
        .collect();
    Field::new(spec.clone(), samples)
}

/// Ratios `||u o lambda||_{S_w^p} / (|det lambda|^{-e/p} (1 + ||lambda||)^n ||u||_{S_w^p})`
/// for `e = n` and `e = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationRatios {
    pub scale: f64,
    pub exponent_n: EnsembleStats,
    pub exponent_one: EnsembleStats,
}

/// Dilations `lambda = 2 I` (`u -> u o 2`), `lambda = I/2` (`u o 2 -> u`) and
/// the identity. Fields should be supported in the middle half of the torus.
pub fn dilation_check(ensemble: &[Field], chi: &Field, p: Exponent, points: usize) -> Result<Vec<DilationRatios>> {
    let spec = chi.spec();
    let n = spec.dim() as f64;
    let mut by_scale: Vec<(f64, Vec<f64>, Vec<f64>)> = vec![(1.0, vec![], vec![]), (2.0, vec![], vec![]), (0.5, vec![], vec![])];
    for u in ensemble {
        let d = dilate(u, 2)?;
        let nu = sw_norm(u, chi, p, points)?;
        let nd = sw_norm(&d, chi, p, points)?;
        for (scale, en, e1) in by_scale.iter_mut() {
            let (num, den) = match *scale {
                s if s == 1.0 => (nu, nu),
                s if s == 2.0 => (nd, nu),
                _ => (nu, nd),
            };
            let det = scale.powf(n);
            let growth = (1.0 + *scale).powf(n);
            en.push(num / (det.powf(-n * p.reciprocal()) * growth * den));
            e1.push(num / (det.powf(-p.reciprocal()) * growth * den));
        }
    }
    Ok(by_scale
        .into_iter()
        .map(|(scale, en, e1)| DilationRatios {
            scale,
            exponent_n: EnsembleStats::from_values(&en),
            exponent_one: EnsembleStats::from_values(&e1),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::grid::{make_bump, BoxRegion, GridSpec};
    use crate::weights::MultiOrder;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::isotropic(1, n, 2.0 * PI).unwrap()
    }

    fn brute(u: &Field, chi: &Field, p: f64) -> f64 {
        let g = u.spec();
        let len = g.len();
        let mut total = 0.0;
        for k in 0..len {
            let xi = g.wavevector(k);
            let mut acc = 0.0;
            for m in 0..len {
                let y = g.position(m);
                let w = chi.translate(&y).unwrap();
                // continuum transform by the rectangle rule
                let mut f = Complex64::new(0.0, 0.0);
                for j in 0..len {
                    let x = g.position(j)[0];
                    f += u.samples()[j] * w.samples()[j] * Complex64::from_polar(1.0, -xi[0] * x);
                }
                acc += (f * g.cell_volume()).norm().powf(p);
            }
            total += (g.cell_volume() * acc).powf(1.0 / p);
        }
        total * g.frequency_step()
    }

    #[test]
    fn zero_and_constant_fields() {
        let g = grid(32);
        let chi = make_bump(&g, &BoxRegion::cube(1, 0.5, 2.5), None).unwrap().field;
        assert_eq!(sw_norm(&Field::zeros(&g), &chi, Exponent::Finite(2.0), 32).unwrap(), 0.0);
        let one = Field::constant(&g, Complex64::new(1.0, 0.0));
        // U(xi) = (L |chi^(xi)|^p)^{1/p} for every y, so the norm is L^{1/p} ||chi^||_{L^1}
        let chi_l1: f64 = chi.to_spectrum().coeffs().iter().map(|c| c.norm() * g.volume()).sum::<f64>() * g.frequency_step();
        let got = sw_norm(&one, &chi, Exponent::Finite(2.0), 32).unwrap();
        assert!((got - (2.0 * PI).sqrt() * chi_l1).abs() < 1e-12 * got);
        let got_inf = sw_norm(&one, &chi, Exponent::Infinity, 32).unwrap();
        assert!((got_inf - chi_l1).abs() < 1e-12 * got_inf);
    }

    #[test]
    fn matches_brute_force_loop() {
        let g = grid(16);
        let chi = make_bump(&g, &BoxRegion::cube(1, 0.5, 3.0), None).unwrap().field;
        let u = ensemble::band_limited(&g, &mut ensemble::rng(2), 5, 1.0, false).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let want = brute(&u, &chi, p);
            let got = sw_norm(&u, &chi, Exponent::Finite(p), 16).unwrap();
            assert!((got - want).abs() <= 1e-10 * want, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn embedding_hypotheses() {
        let g = grid(64);
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 2.0), None).unwrap().field;
        let outer_w = make_bump(&g, &BoxRegion::cube(1, 0.5, 2.5), Some(&BoxRegion::cube(1, 0.9, 2.1))).unwrap().field;
        let outer = AmalgamNormSpec::continuous(MultiOrder::uniform(1.5, &[1]), Exponent::Finite(2.0), outer_w).unwrap();
        let u = ensemble::band_limited(&g, &mut ensemble::rng(1), 8, 1.0, false).unwrap();
        let r = sw_embedding_ratio(&u, &chi, &outer).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let low = outer.with_order(MultiOrder::uniform(1.0, &[1])).unwrap();
        assert!(matches!(sw_embedding_ratio(&u, &chi, &low), Err(Error::Hypothesis(_))));
        let swapped = AmalgamNormSpec::continuous(MultiOrder::uniform(1.5, &[1]), Exponent::Finite(2.0), chi.clone()).unwrap();
        assert!(matches!(sw_embedding_ratio(&u, outer.window(), &swapped), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn plane_wave_embedding() {
        let g = grid(64);
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 2.0), None).unwrap().field;
        let outer_w = make_bump(&g, &BoxRegion::cube(1, 0.5, 2.5), Some(&BoxRegion::cube(1, 0.9, 2.1))).unwrap().field;
        let outer = AmalgamNormSpec::continuous(MultiOrder::uniform(1.5, &[1]), Exponent::Finite(2.0), outer_w).unwrap();
        let u = Field::plane_wave(&g, &[3]);
        // |(u tau_y chi)^(xi)| = |chi^(xi - 3)| for every y
        let chi_l1: f64 = chi.to_spectrum().coeffs().iter().map(|c| c.norm() * g.volume()).sum::<f64>() * g.frequency_step();
        let sw = sw_norm(&u, &chi, Exponent::Finite(2.0), 64).unwrap();
        assert!((sw - (2.0 * PI).sqrt() * chi_l1).abs() < 1e-12 * sw);
        assert!(sw_embedding_ratio(&u, &chi, &outer).unwrap() > 0.0);
    }

    #[test]
    fn dilation_is_exact_index_map() {
        let g = grid(64);
        let u = make_bump(&g, &BoxRegion::cube(1, 2.0, 4.0), None).unwrap().field;
        let d = dilate(&u, 2).unwrap();
        for i in 0..64 {
            let j = 2 * i as i64 - 32;
            let want = if (0..64).contains(&j) { u.samples()[j as usize] } else { Complex64::new(0.0, 0.0) };
            assert_eq!(d.samples()[i], want);
        }
        assert!(dilate(&u, 0).is_err());
    }

    #[test]
    fn identity_dilation_ratio_is_two_to_minus_n() {
        let g = grid(64);
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 2.5), None).unwrap().field;
        let window = make_bump(&g, &BoxRegion::cube(1, 1.6, 4.6), None).unwrap().field;
        let u = ensemble::band_limited(&g, &mut ensemble::rng(3), 6, 1.0, false).unwrap().mul(&window).unwrap();
        let r = dilation_check(&[u], &chi, Exponent::Finite(2.0), 64).unwrap();
        assert_eq!(r[0].scale, 1.0);
        assert!((r[0].exponent_n.max - 0.5).abs() < 1e-14);
        assert!(r[1].exponent_n.max.is_finite() && r[2].exponent_one.max.is_finite());
    }
}
