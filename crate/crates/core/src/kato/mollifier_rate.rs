//! Convergence of `phi_eps * u -> u` in `H^{s'}` at the rate `eps^{min(s - s', 1)}`.

use rand_chacha::ChaCha8Rng;

use crate::ensemble;
use crate::error::{Error, Result};
use crate::grid::{mollify, Field, GridSpec, Mollifier};
use crate::report::{CheckReport, Verdict};
use crate::sobolev::SobolevWeights;
use crate::weights::MultiOrder;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub eps: f64,
    pub error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct MollifierRate {
    pub theta: f64,
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub report: CheckReport,
}

/// Random-phase real field with `|c_k| = <k>^{-(s + n/2 + delta)}` on the
/// whole resolved band. It lies in `H^{s + delta}` but in no better space, so
/// the mollification error decays like `eps^{theta + delta}`; a smooth field
/// would show `eps^2` regardless of `s`.
pub fn rate_field(spec: &GridSpec, rng: &mut ChaCha8Rng, s: f64, delta: f64) -> Result<Field> {
    let kmax = spec.samples() as i64 / 2 - 1;
    ensemble::power_law(spec, rng, kmax, s + 0.5 * spec.dim() as f64 + delta, true)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Checks `||phi_eps * u - u||_{H^{s'}} <= 2^{1 - theta} eps^theta ||u||_{H^s}`
/// at every `eps` and fits the observed rate. With `slope_tolerance` the fitted
/// slope must also lie within that distance of `theta`.
pub fn mollifier_rate_check(u: &Field, s: f64, s_prime: f64, eps: &[f64], slope_tolerance: Option<f64>) -> Result<MollifierRate> {
    if s_prime > s {
        return Err(Error::InvalidParameter(format!("need s' <= s, got s' = {s_prime}, s = {s}")));
    }
    if eps.len() < 2 {
        return Err(Error::InvalidParameter("the sweep needs at least two values of eps".into()));
    }
    let spec = u.spec();
    let blocks = [spec.dim()];
    let hs = SobolevWeights::new(spec, &MultiOrder::uniform(s, &blocks))?.norm(u)?;
    let low = SobolevWeights::new(spec, &MultiOrder::uniform(s_prime, &blocks))?;
    let theta = (s - s_prime).min(1.0);
    let points = eps
        .iter()
        .map(|&e| {
            let phi = Mollifier::new(spec, e)?;
            let error = low.norm(&mollify(u, &phi)?.sub(u)?)?;
            let bound = 2f64.powf(1.0 - theta) * e.powf(theta) * hs;
            Ok(RatePoint { eps: e, error, bound })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.eps).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error).collect();
    let slope = fitted_slope(&xs, &ys);
    let worst = points.iter().map(|p| p.error / p.bound).fold(0.0, f64::max);
    let mut ok = worst <= 1.0;
    let mut report = CheckReport::new(
        "mollifier-rate",
        "||phi_eps * u - u||_{H^{s'}} <= 2^{1-theta} eps^theta ||u||_{H^s}, theta = min(s - s', 1)",
    )
    .value("s", s)
    .value("s_prime", s_prime)
    .value("theta", theta)
    .value("slope", slope)
    .value("worst_bound_ratio", worst);
    if let Some(tol) = slope_tolerance {
        report.set("slope_tolerance", tol);
        ok &= (slope - theta).abs() <= tol;
    }
    let report = report.verdict(Verdict::from_bool(ok));
    Ok(MollifierRate { theta, points, slope, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn slope_of_exact_power() {
        let x = [0.4, 0.2, 0.1];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.75)).collect();
        assert!((fitted_slope(&x, &y) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn equal_orders_bound_is_twice_the_norm() {
        let g = GridSpec::isotropic(1, 512, 2.0 * PI).unwrap();
        let u = rate_field(&g, &mut ensemble::rng(1), 1.0, 0.02).unwrap();
        let r = mollifier_rate_check(&u, 1.0, 1.0, &[0.4, 0.2, 0.1], None).unwrap();
        assert_eq!(r.report.verdict, Verdict::Pass);
        let hs = crate::sobolev::h_norm(&u, &MultiOrder::uniform(1.0, &[1])).unwrap();
        assert!(r.points.iter().all(|p| (p.bound - 2.0 * hs).abs() < 1e-12 * hs));
    }

    #[test]
    fn single_mode_error_is_explicit() {
        let g = GridSpec::isotropic(1, 512, 2.0 * PI).unwrap();
        let u = Field::plane_wave(&g, &[3]);
        let r = mollifier_rate_check(&u, 2.0, 1.0, &[0.4, 0.2], None).unwrap();
        for p in &r.points {
            let phi = Mollifier::new(&g, p.eps).unwrap();
            let sym = phi.symbol()[3];
            let expect = (sym - 1.0).norm() * 10f64.sqrt() * (2.0 * PI).sqrt();
            assert!((p.error - expect).abs() < 1e-12);
            assert!(p.error <= p.bound);
        }
    }

    #[test]
    fn rough_field_rate() {
        let g = GridSpec::isotropic(1, 2048, 2.0 * PI).unwrap();
        for (s, sp) in [(2.0, 1.0), (1.5, 1.0), (1.0, 0.75)] {
            let u = rate_field(&g, &mut ensemble::rng(7), s, 0.02).unwrap();
            let r = mollifier_rate_check(&u, s, sp, &[0.4, 0.2, 0.1, 0.05], Some(0.1)).unwrap();
            assert_eq!(r.report.verdict, Verdict::Pass, "{:?}", r.report);
        }
    }

    #[test]
    fn unresolved_eps_is_rejected() {
        let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
        let u = Field::plane_wave(&g, &[1]);
        assert!(matches!(mollifier_rate_check(&u, 2.0, 1.0, &[0.4, 0.05], None), Err(Error::Resolution(_))));
        assert!(mollifier_rate_check(&u, 1.0, 2.0, &[0.4, 0.2], None).is_err());
    }
}
