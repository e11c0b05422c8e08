//! Inversion, division, the chain rule and joint-spectrum witnesses, all
//! routed through [`calderon_apply`].

use num_complex::Complex64;

use super::{calderon_apply, check_fields, sample, Calderon, ContourSpec, HoloFn};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::kato::{kato_norm, AmalgamNormSpec};
use crate::report::{CheckReport, Verdict};
use crate::sobolev::h_norm;

/// Smallest `min |u|` accepted by [`invert`].
pub const MIN_LOWER_BOUND: f64 = 1e-8;
/// Smallest distance from `lambda` to the range accepted by [`joint_spectrum_witness`].
pub const MIN_SPECTRAL_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Inversion {
    pub value: Field,
    /// Measured `c = min |u|`.
    pub lower_bound: f64,
    /// `||u (1/u) - 1||_inf`.
    pub residual: f64,
    pub calderon: Calderon,
}

impl Inversion {
    /// Finiteness witnesses: `H^s` and amalgam norms of `1/u`.
    pub fn report(&self, norm: &AmalgamNormSpec) -> Result<CheckReport> {
        let hs = h_norm(&self.value, norm.order())?;
        let ks = kato_norm(&self.value, norm)?;
        Ok(CheckReport::new("inversion", "|u| >= c > 0 implies 1/u in H_ul^s")
            .value("lower_bound", self.lower_bound)
            .value("residual", self.residual)
            .value("h_norm", hs)
            .value("kato_norm", ks)
            .value("drift", self.calderon.drift)
            .verdict(Verdict::from_bool(self.residual <= 1e-8 && hs.is_finite() && ks.is_finite())))
    }
}

/// `1/u` through the contour representation on `Omega = {|z| > c/2}`.
pub fn invert(u: &Field, spec: &ContourSpec) -> Result<Inversion> {
    let c = u.min_abs();
    if c < MIN_LOWER_BOUND {
        return Err(Error::Hypothesis(format!("min |u| = {c:e} is below {MIN_LOWER_BOUND:e}")));
    }
    let calderon = calderon_apply(std::slice::from_ref(u), &HoloFn::reciprocal(0.5 * c), spec)?;
    let residual = calderon
        .value
        .samples()
        .iter()
        .zip(u.samples())
        .map(|(h, v)| (h * v - 1.0).norm())
        .fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::Postcondition(format!("||u (1/u) - 1||_inf = {residual:e}")));
    }
    Ok(Inversion { value: calderon.value.clone(), lower_bound: c, residual, calderon })
}

#[derive(Debug, Clone)]
pub struct Division {
    pub value: Field,
    /// `min w`, at least `c^2/4`.
    pub w_min: f64,
    /// `max |(u/v) v - u|` over `supp u`.
    pub residual: f64,
}

/// `u/v = conj(v) u / w` with `w = phi |v|^2 + c^2 (1 - phi) / 4`, which is
/// bounded below by `c^2/4` everywhere even where `v` vanishes.
pub fn divide(u: &Field, v: &Field, phi: &Field, c: f64, spec: &ContourSpec) -> Result<Division> {
    check_fields(&[u.clone(), v.clone(), phi.clone()])?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("lower bound c = {c} must be positive")));
    }
    for m in 0..u.spec().len() {
        let (um, vm, pm) = (u.samples()[m], v.samples()[m], phi.samples()[m]);
        if pm.im != 0.0 || pm.re < 0.0 || pm.re > 1.0 {
            return Err(Error::Hypothesis(format!("cutoff leaves [0, 1] at sample {m}")));
        }
        if um.norm() > 0.0 {
            if vm.norm() < c {
                return Err(Error::Hypothesis(format!("|v| = {} < c on supp u at sample {m}", vm.norm())));
            }
            if (pm.re - 1.0).abs() > 1e-14 {
                return Err(Error::Hypothesis(format!("cutoff is not 1 on supp u at sample {m}")));
            }
        }
        if pm.re > 0.0 && vm.norm() < 0.5 * c {
            return Err(Error::Hypothesis(format!("|v| < c/2 on supp phi at sample {m}")));
        }
    }
    let quarter = 0.25 * c * c;
    let w = Field::new(
        u.spec().clone(),
        v.samples()
            .iter()
            .zip(phi.samples())
            .map(|(vm, pm)| Complex64::new(pm.re * vm.norm_sqr() + quarter * (1.0 - pm.re), 0.0))
            .collect(),
    )?;
    let w_min = w.samples().iter().fold(f64::INFINITY, |m, z| m.min(z.re));
    if w_min < quarter * (1.0 - 1e-15) {
        return Err(Error::Postcondition(format!("min w = {w_min:e} below c^2/4 = {quarter:e}")));
    }
    let inv = invert(&w, spec)?;
    let value = v.conj().mul(u)?.mul(&inv.value)?;
    let residual = value
        .samples()
        .iter()
        .zip(v.samples())
        .zip(u.samples())
        .filter(|(_, um)| um.norm() > 0.0)
        .map(|((q, vm), um)| (q * vm - um).norm())
        .fold(0.0, f64::max);
    if residual > 1e-7 {
        return Err(Error::Postcondition(format!("division residual {residual:e} on supp u")));
    }
    Ok(Division { value, w_min, residual })
}

/// `d_j Phi(u) = sum_k dPhi/dz_k(u) d_j u_k`: spectral derivative of the
/// contour result against the sample-wise right side.
pub fn chain_rule_check(u: &[Field], phi: &HoloFn, spec: &ContourSpec) -> Result<CheckReport> {
    let h = calderon_apply(u, phi, spec)?;
    let grid = u[0].spec();
    let (mut diff2, mut rhs2) = (0.0, 0.0);
    for j in 0..grid.dim() {
        let lhs = h.value.derivative(j);
        let du: Vec<Field> = u.iter().map(|f| f.derivative(j)).collect();
        for m in 0..grid.len() {
            let z = sample(u, m);
            let rhs: Complex64 = (0..u.len()).map(|k| phi.partial(k, &z) * du[k].samples()[m]).sum();
            diff2 += (lhs.samples()[m] - rhs).norm_sqr();
            rhs2 += rhs.norm_sqr();
        }
    }
    let rel = if rhs2 > 0.0 { (diff2 / rhs2).sqrt() } else { diff2.sqrt() };
    Ok(CheckReport::new("chain-rule", "d_j Phi(u) = sum_k dPhi/dz_k(u) d_j u_k")
        .value("relative_l2_discrepancy", rel)
        .value("drift", h.drift)
        .verdict(Verdict::from_bool(rel <= 1e-6))
        .note(format!("Phi = {}", phi.name())))
}

/// Bezout witness `sum_k v_k (u_k - lambda_k) = 1` with
/// `v_k = conj(u_k - lambda_k) / u_lambda`, `u_lambda = sum_k |u_k - lambda_k|^2`.
pub fn joint_spectrum_witness(u: &[Field], lambda: &[Complex64], spec: &ContourSpec) -> Result<CheckReport> {
    check_fields(u)?;
    if lambda.len() != u.len() {
        return Err(Error::ShapeMismatch(format!("lambda in C^{} for {} fields", lambda.len(), u.len())));
    }
    let grid = u[0].spec();
    let shifted: Vec<Field> = u
        .iter()
        .zip(lambda)
        .map(|(f, &l)| f.map(|z| z - l))
        .collect();
    let (mut distance, mut min_u_lambda) = (f64::INFINITY, f64::INFINITY);
    let mut u_lambda = Vec::with_capacity(grid.len());
    for m in 0..grid.len() {
        let z = sample(&shifted, m);
        distance = distance.min(z.iter().map(|w| w.norm()).fold(0.0, f64::max));
        let ul: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        min_u_lambda = min_u_lambda.min(ul);
        u_lambda.push(Complex64::new(ul, 0.0));
    }
    if distance < MIN_SPECTRAL_DISTANCE {
        return Err(Error::LambdaInSpectrum { distance, min_u_lambda });
    }
    let inv = invert(&Field::new(grid.clone(), u_lambda)?, spec)?;
    let mut sum = Field::zeros(grid);
    for s in &shifted {
        let vk = s.conj().mul(&inv.value)?;
        sum = sum.add(&vk.mul(s)?)?;
    }
    let one = Field::constant(grid, Complex64::new(1.0, 0.0));
    let residual = sum.max_diff(&one);
    Ok(CheckReport::new("joint-spectrum-witness", "lambda outside the closed joint range has a Bezout witness")
        .value("distance", distance)
        .value("min_u_lambda", min_u_lambda)
        .value("residual", residual)
        .verdict(Verdict::from_bool(residual <= 1e-8)))
}
