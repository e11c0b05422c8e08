//! Twisted periodization `phi_theta = sum_gamma e^{i<gamma, theta>} tau_gamma phi`.

use num_complex::Complex64;

use super::Lattice;
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::report::{CheckReport, Verdict};

#[derive(Debug, Clone)]
pub struct TwistedPeriodization {
    pub field: Field,
    /// The twist actually used: the nearest point of `(2 pi / cells) Z^n`.
    pub theta: Vec<f64>,
    /// `theta_requested - theta`.
    pub offset: Vec<f64>,
    pub report: CheckReport,
}

/// Builds `phi_theta` by summing lattice translates in sample space and
/// checks its spectrum: it must live on the coset `k = q (mod cells)` with
/// coefficients `cells^n c_k(phi)`, the grid form of
/// `(2 pi)^n sum_gamma phi^(2 pi gamma + theta) delta_{2 pi gamma + theta}`.
///
/// `theta` is measured against integer lattice coordinates. On the torus only
/// twists in `(2 pi / cells) Z^n` are consistent; others are projected.
pub fn twisted_periodization(phi: &Field, lattice: Lattice, theta: &[f64]) -> Result<TwistedPeriodization> {
    let spec = phi.spec();
    if theta.len() != spec.dim() {
        return Err(Error::ShapeMismatch("theta must have one entry per axis".into()));
    }
    let cells = lattice.cells() as i64;
    let unit = std::f64::consts::TAU / cells as f64;
    let q: Vec<i64> = theta.iter().map(|t| ((t / unit).round() as i64).rem_euclid(cells)).collect();
    let used: Vec<f64> = q.iter().map(|&v| v as f64 * unit).collect();
    let offset: Vec<f64> = theta
        .iter()
        .zip(&used)
        .map(|(t, u)| {
            let d = t - u;
            d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()
        })
        .collect();

    let step = lattice.step(spec)? as i64;
    let mut field = Field::zeros(spec);
    for shift in lattice.shifts(spec)? {
        let phase: f64 = shift.iter().zip(&used).map(|(s, t)| (s / step) as f64 * t).sum();
        field = field.add(&phi.cyclic_shift(&shift).scale(Complex64::from_polar(1.0, phase)))?;
    }

    let s = field.to_spectrum();
    let base = phi.to_spectrum();
    let count = (cells as f64).powi(spec.dim() as i32);
    let (mut on, mut off, mut err, mut peak) = (0.0, 0.0, 0.0f64, 0.0f64);
    for k in 0..spec.len() {
        let freq = spec.frequency(k);
        let on_coset = freq.iter().zip(&q).all(|(f, qi)| (f - qi).rem_euclid(cells) == 0);
        let c = s.coeffs()[k];
        if on_coset {
            on += c.norm_sqr();
            let expect = base.coeffs()[k] * count;
            err = err.max((c - expect).norm());
            peak = peak.max(expect.norm());
        } else {
            off += c.norm_sqr();
        }
    }
    let off_ratio = if on > 0.0 { (off / on).sqrt() } else { f64::INFINITY };
    let coeff_err = err / peak.max(f64::MIN_POSITIVE);
    let report = CheckReport::new(
        "twisted-periodization",
        "phi_theta has spectrum (2pi)^n sum phi^(2 pi gamma + theta) on the coset 2 pi Gamma* + theta",
    )
    .value("off_coset_ratio", off_ratio)
    .value("coefficient_error", coeff_err)
    .value("theta_offset", offset.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    .verdict(Verdict::from_bool(off_ratio <= 1e-10 && coeff_err <= 1e-10));
    Ok(TwistedPeriodization { field, theta: used, offset, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_bump, BoxRegion, GridSpec};
    use std::f64::consts::PI;

    fn bump(g: &GridSpec, lo: f64, hi: f64) -> Field {
        make_bump(g, &BoxRegion::cube(g.dim(), lo, hi), None).unwrap().field
    }

    #[test]
    fn plain_periodization_lives_on_dual_lattice() {
        let g = GridSpec::isotropic(1, 128, 2.0 * PI).unwrap();
        let phi = bump(&g, 0.3, 1.2);
        let t = twisted_periodization(&phi, Lattice::new(4).unwrap(), &[0.0]).unwrap();
        assert_eq!(t.report.verdict, Verdict::Pass, "{:?}", t.report);
        let s = t.field.to_spectrum();
        assert!(s.coeff(&[1]).norm() < 1e-14);
        assert!(s.coeff(&[4]).norm() > 1e-6);
    }

    #[test]
    fn periodic_input_is_multiplied_by_point_count() {
        let g = GridSpec::isotropic(2, 32, 2.0 * PI).unwrap();
        let lat = Lattice::new(4).unwrap();
        let phi = lat.periodize(&bump(&g, 0.2, 1.3)).unwrap();
        let t = twisted_periodization(&phi, lat, &[0.0, 0.0]).unwrap();
        assert!(t.field.max_diff(&phi.scale(Complex64::new(16.0, 0.0))) < 1e-12);
    }

    #[test]
    fn twisted_spectrum_on_coset() {
        let g = GridSpec::isotropic(2, 64, 2.0 * PI).unwrap();
        let phi = bump(&g, 0.4, 2.5);
        let lat = Lattice::new(4).unwrap();
        let t = twisted_periodization(&phi, lat, &[PI / 2.0, 3.0 * PI / 2.0]).unwrap();
        assert_eq!(t.report.verdict, Verdict::Pass, "{:?}", t.report);
        assert!(t.offset.iter().all(|v| v.abs() < 1e-15));
        // the spectrum sits on k = (1, 3) mod 4
        let s = t.field.to_spectrum();
        assert!(s.coeff(&[1, 3]).norm() > 1e-8);
        assert!(s.coeff(&[0, 0]).norm() < 1e-14);
    }

    #[test]
    fn off_lattice_theta_is_projected() {
        let g = GridSpec::isotropic(1, 64, 2.0 * PI).unwrap();
        let t = twisted_periodization(&bump(&g, 0.5, 1.5), Lattice::new(4).unwrap(), &[0.8]).unwrap();
        assert!((t.theta[0] - PI / 2.0).abs() < 1e-15);
        assert!((t.offset[0] - (0.8 - PI / 2.0)).abs() < 1e-15);
    }
}
