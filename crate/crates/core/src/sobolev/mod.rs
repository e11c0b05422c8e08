//! Multi-order Sobolev norms `||u||_{H^s} = ||<<D>>^s u||_{L^2}` and the
//! estimates built on them.

mod partition;
mod periodization;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Spectrum};
use crate::report::{CheckReport, Verdict};
use crate::weights::{MultiOrder, SigmaParams};

pub use partition::{build_partition, lattice_decomposition_check, lattice_decomposition_ratio, DecompositionRatio, Lattice, PartitionOfUnity};
pub use periodization::{twisted_periodization, TwistedPeriodization};

/// Table of `<<xi_k>>^{2s}` for one grid and order; evaluates `H^s` norms
/// without rebuilding the weights.
#[derive(Debug, Clone)]
pub struct SobolevWeights {
    spec: GridSpec,
    squared: Vec<f64>,
}

impl SobolevWeights {
    pub fn new(spec: &GridSpec, order: &MultiOrder) -> Result<Self> {
        order.check_blocks(spec.blocks())?;
        let squared = spec.real_multiplier(|xi| order.weight(xi).powi(2));
        Ok(SobolevWeights { spec: spec.clone(), squared })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn squared(&self) -> &[f64] {
        &self.squared
    }

    pub fn norm_of_spectrum(&self, s: &Spectrum) -> f64 {
        (self.spec.volume() * s.weighted_energy(&self.squared)).sqrt()
    }

    pub fn norm(&self, u: &Field) -> Result<f64> {
        self.spec.check_same(u.spec())?;
        Ok(self.norm_of_spectrum(&u.to_spectrum()))
    }
}

/// `<<D>>^s u`.
pub fn bessel_apply(u: &Field, order: &MultiOrder) -> Result<Field> {
    order.check_blocks(u.spec().blocks())?;
    let mult = u.spec().multiplier(|xi| Complex64::new(order.weight(xi), 0.0));
    let mut s = u.to_spectrum();
    s.apply(&mult);
    Ok(s.to_field())
}

/// `(L^n sum_k <<xi_k>>^{2s} |c_k|^2)^{1/2}`.
pub fn h_norm(u: &Field, order: &MultiOrder) -> Result<f64> {
    SobolevWeights::new(u.spec(), order)?.norm(u)
}

/// Check of `||u||^2_{H^s} = ||u||^2_{H^{s - delta_l}} + sum_{k in N_l} ||d_k u||^2_{H^{s - delta_l}}`.
pub fn derivative_split_check(u: &Field, order: &MultiOrder, l: usize) -> Result<CheckReport> {
    let spec = u.spec();
    let lower = order.minus_delta(l)?;
    let axes = spec.block_ranges()[l].clone();
    let lhs = h_norm(u, order)?.powi(2);
    let low = SobolevWeights::new(spec, &lower)?;
    let mut rhs = low.norm(u)?.powi(2);
    for k in axes {
        rhs += low.norm(&u.derivative(k))?.powi(2);
    }
    let rel = (lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE);
    Ok(CheckReport::new("derivative-split", "||u||^2_{H^s} = ||u||^2_{H^{s-d_l}} + sum_k ||d_k u||^2_{H^{s-d_l}}")
        .value("lhs", lhs)
        .value("rhs", rhs)
        .value("relative_error", rel)
        .verdict(Verdict::from_bool(rel <= 1e-10)))
}

/// `C(s, n, chi) = (2 pi)^{-n} 2^{|s|_1/2} int <eta>^{|s|_1} |chi^(eta)| d eta`,
/// with the integral replaced by its grid sum (`chi^(xi_k) = L^n c_k`,
/// `d eta = (2 pi / L)^n`), which reduces to `2^{|s|_1/2} sum_k <xi_k>^{|s|_1} |c_k|`.
pub fn window_product_constant(chi: &Field, order: &MultiOrder) -> Result<f64> {
    order.check_blocks(chi.spec().blocks())?;
    let l1 = order.l1();
    let w = chi.spec().real_multiplier(|xi| (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).powf(0.5 * l1));
    let sum: f64 = chi.to_spectrum().coeffs().iter().zip(&w).map(|(c, w)| w * c.norm()).sum();
    Ok(2f64.powf(0.5 * l1) * sum)
}

/// Which multiplication estimate [`product_bound_check`] evaluates.
#[derive(Debug, Clone, Copy)]
pub enum ProductMode<'a> {
    /// `||chi u||_{H^s} <= C(s, n, chi) ||u||_{H^s}` for a smooth window.
    SmoothWindow(&'a Field),
    /// `||psi u||_{H^s} / ||u||_{H^s}` for a lattice-periodic multiplier.
    PeriodicMultiplier(&'a Field),
    /// `||psi u||_{H^s} / ||u||_{H^s}` for a smooth bounded multiplier.
    BoundedMultiplier(&'a Field),
    /// `||uv||_{H^sigma} / (||u||_{H^s} ||v||_{H^t})`.
    Sobolev { v: &'a Field, params: &'a SigmaParams },
}

pub fn product_bound_check(u: &Field, mode: ProductMode<'_>, order: &MultiOrder) -> Result<CheckReport> {
    match mode {
        ProductMode::SmoothWindow(chi) => {
            let w = SobolevWeights::new(u.spec(), order)?;
            let lhs = w.norm(&chi.mul(u)?)?;
            let c = window_product_constant(chi, order)?;
            let rhs = c * w.norm(u)?;
            Ok(CheckReport::new("window-product", "||chi u||_{H^s} <= C(s,n,chi) ||u||_{H^s}")
                .value("lhs", lhs)
                .value("rhs", rhs)
                .value("constant", c)
                .value("ratio", lhs / rhs)
                .verdict(Verdict::from_bool(lhs <= rhs * (1.0 + 1e-8))))
        }
        ProductMode::PeriodicMultiplier(psi) | ProductMode::BoundedMultiplier(psi) => {
            let w = SobolevWeights::new(u.spec(), order)?;
            let ratio = w.norm(&psi.mul(u)?)? / w.norm(u)?;
            let (name, claim) = match mode {
                ProductMode::PeriodicMultiplier(_) => ("periodic-multiplier", "||psi u||_{H^s} <= C ||u||_{H^s}, psi periodic"),
                _ => ("bounded-multiplier", "||psi u||_{H^s} <= C ||u||_{H^s}, psi in BC^{m_s}"),
            };
            Ok(CheckReport::new(name, claim)
                .value("ratio", ratio)
                .verdict(Verdict::from_bool(ratio.is_finite())))
        }
        ProductMode::Sobolev { v, params } => {
            let est = sobolev_product(u, v, params)?;
            let mut r = CheckReport::new("sobolev-product", "||uv||_{H^sigma} <= C ||u||_{H^s} ||v||_{H^t}")
                .value("ratio", est.ratio);
            let ok = match est.discrete_bound {
                Some(b) => {
                    r.set("discrete_bound", b);
                    est.ratio <= b * (1.0 + 1e-8)
                }
                None => est.ratio.is_finite(),
            };
            Ok(r.verdict(Verdict::from_bool(ok)))
        }
    }
}

/// Ratio `||uv||_{H^sigma} / (||u||_{H^s} ||v||_{H^t})` together with the
/// exact grid constant from Cauchy-Schwarz on the coefficient convolution,
/// `(L^{-n} sup_k sum_j <<xi_k>>^{2 sigma} <<xi_j>>^{-2s} <<xi_{k-j}>>^{-2t})^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductEstimate {
    pub ratio: f64,
    /// Only computed for grids with at most [`DISCRETE_BOUND_LIMIT`] samples.
    pub discrete_bound: Option<f64>,
}

pub const DISCRETE_BOUND_LIMIT: usize = 8192;

pub fn sobolev_product(u: &Field, v: &Field, params: &SigmaParams) -> Result<ProductEstimate> {
    let spec = u.spec();
    spec.check_same(v.spec())?;
    let ws = SobolevWeights::new(spec, &params.s)?;
    let wt = SobolevWeights::new(spec, &params.t)?;
    let wsig = SobolevWeights::new(spec, &params.sigma)?;
    let ratio = wsig.norm(&u.mul(v)?)? / (ws.norm(u)? * wt.norm(v)?);
    let discrete_bound = (spec.len() <= DISCRETE_BOUND_LIMIT).then(|| {
        let n = spec.samples();
        let sup = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let ki = spec.multi_index(k);
                let mut acc = 0.0;
                let mut diff = vec![0usize; spec.dim()];
                for j in 0..spec.len() {
                    let ji = spec.multi_index(j);
                    for a in 0..spec.dim() {
                        diff[a] = (ki[a] + n - ji[a]) % n;
                    }
                    acc += wt.squared()[spec.flat_index(&diff)].recip() / ws.squared()[j];
                }
                acc * wsig.squared()[k]
            })
            .reduce(|| 0.0, f64::max);
        (sup / spec.volume()).sqrt()
    });
    Ok(ProductEstimate { ratio, discrete_bound })
}

/// Chain `||u||_inf <= sum_k |c_k| <= (L^{-n} sum_k <<xi_k>>^{-2s})^{1/2} ||u||_{H^s}`.
pub fn rl_sup_bound_check(u: &Field, order: &MultiOrder) -> Result<CheckReport> {
    for (l, (&s, &nl)) in order.s().iter().zip(order.blocks()).enumerate() {
        if s <= nl as f64 / 2.0 {
            return Err(Error::Hypothesis(format!(
                "block {l}: s = {s} must exceed n_l/2 = {}",
                nl as f64 / 2.0
            )));
        }
    }
    let spec = u.spec();
    let w = SobolevWeights::new(spec, order)?;
    let sup = u.sup_norm();
    let s = u.to_spectrum();
    let l1: f64 = s.coeffs().iter().map(|c| c.norm()).sum();
    let dual = (w.squared().iter().map(|v| v.recip()).sum::<f64>() / spec.volume()).sqrt();
    let hs = w.norm_of_spectrum(&s);
    let chain = dual * hs;
    let ok = sup <= l1 * (1.0 + 1e-12) && l1 <= chain * (1.0 + 1e-12);
    Ok(CheckReport::new("sup-bound", "||u||_inf <= ||u^||_{L^1} <= ||<<.>>^{-s}||_{L^2} ||u||_{H^s}")
        .value("sup", sup)
        .value("fourier_l1", l1)
        .value("weight_l2", dual)
        .value("h_norm", hs)
        .value("bound", chain)
        .verdict(Verdict::from_bool(ok)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble;
    use crate::grid::{make_bump, BoxRegion};
    use std::f64::consts::PI;

    fn grid1(n: usize) -> GridSpec {
        GridSpec::isotropic(1, n, 2.0 * PI).unwrap()
    }

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    // h_norm by an explicit loop over frequencies
    fn h_norm_oracle(u: &Field, order: &MultiOrder) -> f64 {
        let spec = u.spec();
        let s = u.to_spectrum();
        let mut acc = 0.0;
        for k in 0..spec.len() {
            let xi = spec.wavevector(k);
            let mut w = 1.0;
            let mut start = 0;
            for (l, &b) in order.blocks().iter().enumerate() {
                let r2: f64 = xi[start..start + b].iter().map(|v| v * v).sum();
                w *= (1.0 + r2).powf(order.s()[l]);
                start += b;
            }
            acc += w * s.coeffs()[k].norm_sqr();
        }
        (spec.volume() * acc).sqrt()
    }

    #[test]
    fn bessel_on_plane_waves() {
        let g = grid1(32);
        let u = ensemble::band_limited(&g, &mut ensemble::rng(1), 8, 0.0, false).unwrap();
        let zero = MultiOrder::zero(&[1]);
        assert!(bessel_apply(&u, &zero).unwrap().max_diff(&u) < 1e-13);
        let w = Field::plane_wave(&g, &[3]);
        let out = bessel_apply(&w, &MultiOrder::uniform(2.0, &[1])).unwrap();
        assert!(out.max_diff(&w.scale(Complex64::new(10.0, 0.0))) < 1e-12);
        let s = MultiOrder::uniform(1.7, &[1]);
        let back = bessel_apply(&bessel_apply(&u, &s).unwrap(), &s.neg()).unwrap();
        assert!(back.max_diff(&u) < 1e-11);
    }

    #[test]
    fn h_norm_values() {
        let g = grid1(32);
        let one = Field::constant(&g, c1());
        for s in [-1.0, 0.0, 2.5] {
            let v = h_norm(&one, &MultiOrder::uniform(s, &[1])).unwrap();
            assert!((v - (2.0 * PI).sqrt()).abs() < 1e-12);
        }
        let w = Field::plane_wave(&g, &[3]);
        let v = h_norm(&w, &MultiOrder::uniform(1.0, &[1])).unwrap();
        assert!((v - 10f64.sqrt() * (2.0 * PI).sqrt()).abs() < 1e-12);

        let g2 = GridSpec::new(2, 16, 2.0 * PI, vec![1, 1]).unwrap();
        let u = ensemble::band_limited(&g2, &mut ensemble::rng(2), 5, 0.5, false).unwrap();
        let s = MultiOrder::new(vec![1.5, -0.5], vec![1, 1]).unwrap();
        let a = h_norm(&u, &s).unwrap();
        let b = h_norm_oracle(&u, &s);
        assert!((a - b).abs() < 1e-12 * b);
        let l2 = h_norm(&u, &MultiOrder::zero(&[1, 1])).unwrap();
        assert!((l2 - u.l2_norm()).abs() < 1e-12 * l2);
    }

    #[test]
    fn block_mismatch_is_rejected() {
        let g = GridSpec::new(2, 8, 2.0 * PI, vec![2]).unwrap();
        let u = Field::zeros(&g);
        assert!(h_norm(&u, &MultiOrder::uniform(1.0, &[1, 1])).is_err());
    }

    #[test]
    fn derivative_split_examples() {
        let g = grid1(32);
        let s = MultiOrder::uniform(2.0, &[1]);
        let one = Field::constant(&g, c1());
        let r = derivative_split_check(&one, &s, 0).unwrap();
        assert!((r.get("lhs").unwrap() - 2.0 * PI).abs() < 1e-12);
        let w = Field::plane_wave(&g, &[3]);
        let r = derivative_split_check(&w, &s, 0).unwrap();
        assert!((r.get("lhs").unwrap() - 200.0 * PI).abs() < 1e-9);
        assert_eq!(r.verdict, Verdict::Pass);

        let g2 = GridSpec::new(3, 8, 2.0 * PI, vec![2, 1]).unwrap();
        let u = ensemble::band_limited(&g2, &mut ensemble::rng(3), 3, 0.0, false).unwrap();
        let s = MultiOrder::new(vec![0.7, -1.2], vec![2, 1]).unwrap();
        for l in 0..2 {
            assert_eq!(derivative_split_check(&u, &s, l).unwrap().verdict, Verdict::Pass);
        }
    }

    #[test]
    fn window_product_bound() {
        let g = grid1(128);
        let chi = make_bump(&g, &BoxRegion::cube(1, 1.0, 4.0), Some(&BoxRegion::cube(1, 2.0, 3.0))).unwrap().field;
        let s = MultiOrder::uniform(1.5, &[1]);
        let w = Field::plane_wave(&g, &[3]);
        let r = product_bound_check(&w, ProductMode::SmoothWindow(&chi), &s).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let mut rng = ensemble::rng(5);
        for _ in 0..20 {
            let u = ensemble::band_limited(&g, &mut rng, 20, 0.5, false).unwrap();
            for order in [-1.0, 0.5, 2.0] {
                let r = product_bound_check(&u, ProductMode::SmoothWindow(&chi), &MultiOrder::uniform(order, &[1])).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
            }
        }
    }

    #[test]
    fn unit_multiplier_is_isometric() {
        let g = grid1(64);
        let u = ensemble::band_limited(&g, &mut ensemble::rng(6), 10, 0.0, false).unwrap();
        let one = Field::constant(&g, c1());
        let r = product_bound_check(&u, ProductMode::PeriodicMultiplier(&one), &MultiOrder::uniform(1.0, &[1])).unwrap();
        assert!((r.get("ratio").unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sobolev_product_within_grid_constant() {
        let g = grid1(64);
        let p = SigmaParams::uniform(1.0, 1.0, 0.25, &[1]).unwrap();
        let mut rng = ensemble::rng(7);
        for _ in 0..10 {
            let u = ensemble::band_limited(&g, &mut rng, 12, 0.5, false).unwrap();
            let v = ensemble::band_limited(&g, &mut rng, 12, 0.5, false).unwrap();
            let r = product_bound_check(&u, ProductMode::Sobolev { v: &v, params: &p }, &p.s).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            assert!(r.get("ratio").unwrap() <= r.get("discrete_bound").unwrap());
        }
    }

    #[test]
    fn sup_chain() {
        let g = grid1(64);
        let s = MultiOrder::uniform(1.0, &[1]);
        let one = Field::constant(&g, c1());
        let r = rl_sup_bound_check(&one, &s).unwrap();
        assert!((r.get("sup").unwrap() - r.get("fourier_l1").unwrap()).abs() < 1e-14);
        let w = Field::plane_wave(&g, &[3]);
        let r = rl_sup_bound_check(&w, &s).unwrap();
        assert!((r.get("sup").unwrap() - 1.0).abs() < 1e-13);
        assert!((r.get("fourier_l1").unwrap() - 1.0).abs() < 1e-13);
        let u = ensemble::band_limited(&g, &mut ensemble::rng(8), 20, 0.0, false).unwrap();
        assert_eq!(rl_sup_bound_check(&u, &s).unwrap().verdict, Verdict::Pass);
        assert!(rl_sup_bound_check(&u, &MultiOrder::uniform(0.5, &[1])).is_err());
    }

    #[test]
    fn h_norm_monotone_in_order() {
        let g = GridSpec::new(2, 16, 2.0 * PI, vec![1, 1]).unwrap();
        let u = ensemble::band_limited(&g, &mut ensemble::rng(9), 6, 0.0, false).unwrap();
        let lo = MultiOrder::new(vec![0.5, -1.0], vec![1, 1]).unwrap();
        let hi = MultiOrder::new(vec![1.0, -0.5], vec![1, 1]).unwrap();
        assert!(h_norm(&u, &lo).unwrap() <= h_norm(&u, &hi).unwrap());
    }
}
