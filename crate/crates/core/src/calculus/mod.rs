//! Holomorphic functional calculus on fields through the polydisc Cauchy
//! representation
//! `Phi(u) = (2 pi i)^{-d} int_{Gamma(r)} Phi(zeta + v) / prod_k (zeta_k + v_k - u_k) d zeta`,
//! with `v` a mollified copy of `u` and `Gamma(r) = (dD(0, 3r))^d`.

mod domain;
mod ops;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::ensemble;
use crate::error::{Error, Result};
use crate::grid::{mollify, Field, Mollifier};
use crate::report::{CheckReport, Verdict};
use crate::sobolev::h_norm;
use crate::weights::MultiOrder;

pub use domain::{Domain, ScalarDomain};
pub use ops::{chain_rule_check, divide, invert, joint_spectrum_witness, Division, Inversion};

type ScalarFn = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// A holomorphic `Phi : Omega -> C`, `Omega in C^d`.
#[derive(Clone)]
pub struct HoloFn {
    name: String,
    domain: Domain,
    eval: ScalarFn,
    partials: Option<Vec<ScalarFn>>,
}

impl fmt::Debug for HoloFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloFn")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("partials", &self.partials.is_some())
            .finish()
    }
}

impl HoloFn {
    pub fn new<F>(name: impl Into<String>, domain: Domain, eval: F) -> Self
    where
        F: Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        HoloFn { name: name.into(), domain, eval: Arc::new(eval), partials: None }
    }

    pub fn with_partials(mut self, partials: Vec<ScalarFn>) -> Result<Self> {
        if partials.len() != self.arity() {
            return Err(Error::ShapeMismatch(format!("{} partials for arity {}", partials.len(), self.arity())));
        }
        self.partials = Some(partials);
        Ok(self)
    }

    pub fn identity() -> Self {
        let one: ScalarFn = Arc::new(|_| Complex64::new(1.0, 0.0));
        HoloFn::new("z", Domain::entire(1), |z| z[0]).with_partials(vec![one]).expect("arity 1")
    }

    pub fn square() -> Self {
        let d: ScalarFn = Arc::new(|z| 2.0 * z[0]);
        HoloFn::new("z^2", Domain::entire(1), |z| z[0] * z[0]).with_partials(vec![d]).expect("arity 1")
    }

    pub fn exp() -> Self {
        let d: ScalarFn = Arc::new(|z| z[0].exp());
        HoloFn::new("exp", Domain::entire(1), |z| z[0].exp()).with_partials(vec![d]).expect("arity 1")
    }

    /// `1/z` on `|z| > cut`.
    pub fn reciprocal(cut: f64) -> Self {
        let d: ScalarFn = Arc::new(|z| -(z[0] * z[0]).inv());
        let dom = Domain::Product(vec![ScalarDomain::DiscComplement { c: Complex64::new(0.0, 0.0), r: cut }]);
        HoloFn::new("1/z", dom, |z| z[0].inv()).with_partials(vec![d]).expect("arity 1")
    }

    /// `z_1 z_2`.
    pub fn product() -> Self {
        let d1: ScalarFn = Arc::new(|z| z[1]);
        let d2: ScalarFn = Arc::new(|z| z[0]);
        HoloFn::new("z1*z2", Domain::entire(2), |z| z[0] * z[1]).with_partials(vec![d1, d2]).expect("arity 2")
    }

    /// Library function by name: `z`, `z^2`, `exp`, `1/z` (cut `c/2` chosen
    /// by the caller through `cut`), `z1*z2`.
    pub fn by_name(name: &str, cut: f64) -> Result<Self> {
        match name {
            "z" => Ok(Self::identity()),
            "z^2" => Ok(Self::square()),
            "exp" => Ok(Self::exp()),
            "1/z" => Ok(Self::reciprocal(cut)),
            "z1*z2" => Ok(Self::product()),
            _ => Err(Error::InvalidParameter(format!("unknown function {name:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.domain.arity()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        (self.eval)(z)
    }

    /// `dPhi/dz_k`, by symmetric difference with step `1e-6 max(1, |z_k|)`
    /// when no partials were supplied.
    pub fn partial(&self, k: usize, z: &[Complex64]) -> Complex64 {
        if let Some(p) = &self.partials {
            return p[k](z);
        }
        self.numeric_partial(k, z)
    }

    fn numeric_partial(&self, k: usize, z: &[Complex64]) -> Complex64 {
        let h = 1e-6 * z[k].norm().max(1.0);
        let mut a = z.to_vec();
        let mut b = z.to_vec();
        a[k] += h;
        b[k] -= h;
        (self.eval(&a) - self.eval(&b)) / (2.0 * h)
    }

    /// `Phi(0)`, or `None` when `0` is outside the domain.
    pub fn value_at_zero(&self) -> Option<Complex64> {
        let z = vec![Complex64::new(0.0, 0.0); self.arity()];
        self.domain.contains(&z).then(|| self.eval(&z))
    }

    /// Largest relative gap between supplied partials and central differences
    /// at random points of the domain near `center`.
    pub fn partials_consistency(&self, center: &[Complex64], spread: f64, seed: u64) -> f64 {
        let mut rng = ensemble::rng(seed);
        let mut worst: f64 = 0.0;
        let mut taken = 0;
        let mut tries = 0;
        while taken < 100 && tries < 10_000 {
            tries += 1;
            let z: Vec<Complex64> = center
                .iter()
                .map(|c| c + Complex64::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread)))
                .collect();
            if self.domain.distance(&z) <= 1e-3 {
                continue;
            }
            taken += 1;
            for k in 0..self.arity() {
                let a = self.partial(k, &z);
                let b = self.numeric_partial(k, &z);
                worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(1.0));
            }
        }
        worst
    }
}

/// Parameters of the contour representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    /// `r = margin_factor * dist(range, C^d \ Omega)`; 1/8 by default.
    pub margin_factor: f64,
    /// Circles of radius `radius_multiple * r`; 3 by default.
    pub radius_multiple: f64,
    /// Trapezoid nodes per circle.
    pub nodes: usize,
    pub eps_start: f64,
    pub eps_factor: f64,
    /// Sup-norm change allowed when the node count is doubled.
    pub drift_tol: f64,
    /// Allowed `max_x |h(x) - Phi(u(x))|`.
    pub tolerance: f64,
    /// Order of the Sobolev norm reported for `u - v`.
    pub report_order: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            margin_factor: 0.125,
            radius_multiple: 3.0,
            nodes: 64,
            eps_start: 0.4,
            eps_factor: 0.5,
            drift_tol: 1e-9,
            tolerance: 1e-8,
            report_order: 1.0,
        }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidParameter(format!("need at least 16 nodes per circle, got {}", self.nodes)));
        }
        if !(self.margin_factor > 0.0) {
            return Err(Error::InvalidParameter("margin factor must be positive".into()));
        }
        if self.radius_multiple <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "contour radius {} r does not exceed the smoothing margin r, so u - v may leave the polydisc",
                self.radius_multiple
            )));
        }
        if (self.radius_multiple + 1.0) * self.margin_factor >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "zeta + v can reach distance {} r from the range, which is not below the domain distance {} r",
                self.radius_multiple + 1.0,
                1.0 / self.margin_factor
            )));
        }
        if !(self.eps_factor > 0.0 && self.eps_factor < 1.0 && self.eps_start > 0.0) {
            return Err(Error::InvalidParameter("the eps schedule must start positive and shrink".into()));
        }
        Ok(())
    }
}

fn check_fields(u: &[Field]) -> Result<()> {
    let first = u.first().ok_or_else(|| Error::InvalidParameter("need at least one field".into()))?;
    for f in &u[1..] {
        first.spec().check_same(f.spec())?;
    }
    Ok(())
}

fn sample(u: &[Field], m: usize) -> Vec<Complex64> {
    u.iter().map(|f| f.samples()[m]).collect()
}

/// Margin `r`: `margin_factor` times the smallest sup-norm distance from
/// the sampled range to the complement of `Omega`. For `Omega = C^d` the
/// distance is replaced by `1 + diam(range)`.
pub fn range_distance(u: &[Field], domain: &Domain, margin_factor: f64) -> Result<f64> {
    check_fields(u)?;
    if domain.arity() != u.len() {
        return Err(Error::ShapeMismatch(format!("{} fields for a domain in C^{}", u.len(), domain.arity())));
    }
    if domain.is_entire() {
        let diam = u
            .iter()
            .map(|f| {
                let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
                for z in f.samples() {
                    lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
                    hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
                }
                (hi - lo).norm()
            })
            .fold(0.0, f64::max);
        return Ok(margin_factor * (1.0 + diam));
    }
    let len = u[0].spec().len();
    let dist: Vec<f64> = (0..len).into_par_iter().map(|m| domain.distance(&sample(u, m))).collect();
    let bad: Vec<usize> = dist.iter().enumerate().filter(|(_, d)| **d <= 0.0).map(|(m, _)| m).collect();
    if !bad.is_empty() {
        return Err(Error::OutOfDomain { count: bad.len(), first: bad.into_iter().take(8).collect() });
    }
    Ok(margin_factor * dist.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Output of [`calderon_apply`] with the numbers that certify it.
#[derive(Debug, Clone)]
pub struct Calderon {
    pub value: Field,
    pub margin: f64,
    pub radius: f64,
    pub eps: f64,
    /// `max_k ||u_k - v_k||_inf`.
    pub smoothing_gap: f64,
    /// `max_k ||u_k - v_k||_{H^{report_order}}`.
    pub smoothing_norm: f64,
    pub nodes: usize,
    pub drift: f64,
    /// `max_x |h(x) - Phi(u(x))|`.
    pub pointwise_error: f64,
}

impl Calderon {
    pub fn report(&self, phi: &HoloFn) -> CheckReport {
        CheckReport::new("calderon", "Phi(u) equals the polydisc contour integral of Phi(zeta + v)")
            .value("margin", self.margin)
            .value("radius", self.radius)
            .value("eps", self.eps)
            .value("smoothing_gap", self.smoothing_gap)
            .value("smoothing_norm", self.smoothing_norm)
            .value("nodes", self.nodes as f64)
            .value("drift", self.drift)
            .value("pointwise_error", self.pointwise_error)
            .verdict(Verdict::Pass)
            .note(format!("Phi = {}", phi.name()))
    }
}

/// Smallest eps of the schedule with `max_k ||u_k - phi_eps * u_k||_inf < margin`.
fn smooth(u: &[Field], margin: f64, spec: &ContourSpec) -> Result<(f64, Vec<Field>, f64)> {
    let mut eps = spec.eps_start;
    let (mut last_eps, mut last_gap) = (eps, f64::INFINITY);
    loop {
        let phi = match Mollifier::new(u[0].spec(), eps) {
            Ok(phi) => phi,
            Err(Error::Resolution(_)) => {
                return Err(Error::SmoothingFloor { eps: last_eps, gap: last_gap, margin });
            }
            Err(e) => return Err(e),
        };
        let v: Vec<Field> = u.iter().map(|f| mollify(f, &phi)).collect::<Result<_>>()?;
        let gap = u.iter().zip(&v).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max);
        if gap < margin {
            return Ok((eps, v, gap));
        }
        (last_eps, last_gap) = (eps, gap);
        eps *= spec.eps_factor;
    }
}

/// Tensor trapezoid rule on the circles `|zeta_k| = radius`: node weight
/// `zeta_k / (M (zeta_k - (u_k - v_k)))` per factor.
fn contour_sum(u: &[Field], v: &[Field], phi: &HoloFn, radius: f64, nodes: usize) -> Field {
    let d = u.len();
    let spec = u[0].spec();
    let circle: Vec<Complex64> = (0..nodes)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / nodes as f64))
        .collect();
    let total = nodes.pow(d as u32);
    let m_c = nodes as f64;
    let samples: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .map(|m| {
            let um = sample(u, m);
            let vm = sample(v, m);
            let gap: Vec<Complex64> = um.iter().zip(&vm).map(|(a, b)| a - b).collect();
            let mut z = vec![Complex64::new(0.0, 0.0); d];
            let mut acc = Complex64::new(0.0, 0.0);
            for flat in 0..total {
                let mut rest = flat;
                let mut w = Complex64::new(1.0, 0.0);
                for k in (0..d).rev() {
                    let zeta = circle[rest % nodes];
                    rest /= nodes;
                    z[k] = zeta + vm[k];
                    w *= zeta / (m_c * (zeta - gap[k]));
                }
                acc += phi.eval(&z) * w;
            }
            acc
        })
        .collect();
    Field::new(spec.clone(), samples).expect("same grid")
}

/// `Phi(u)` through the contour representation. Fails when the range leaves
/// `Omega`, when smoothing cannot get within the margin, when doubling the
/// nodes moves the result by more than `drift_tol`, or when the result misses
/// `Phi(u(x))` by more than `tolerance`.
pub fn calderon_apply(u: &[Field], phi: &HoloFn, spec: &ContourSpec) -> Result<Calderon> {
    spec.validate()?;
    let margin = range_distance(u, phi.domain(), spec.margin_factor)?;
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidParameter(format!("margin r = {margin} must be positive and finite")));
    }
    let (eps, v, gap) = smooth(u, margin, spec)?;
    let order = MultiOrder::uniform(spec.report_order, u[0].spec().blocks());
    let smoothing_norm = u
        .iter()
        .zip(&v)
        .map(|(a, b)| h_norm(&a.sub(b)?, &order))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let radius = spec.radius_multiple * margin;
    let coarse = contour_sum(u, &v, phi, radius, spec.nodes);
    let fine = contour_sum(u, &v, phi, radius, 2 * spec.nodes);
    let drift = coarse.max_diff(&fine);
    if drift > spec.drift_tol {
        return Err(Error::QuadratureNonConvergence { drift });
    }
    let len = u[0].spec().len();
    let pointwise_error = (0..len)
        .map(|m| (fine.samples()[m] - phi.eval(&sample(u, m))).norm())
        .fold(0.0, f64::max);
    if pointwise_error > spec.tolerance {
        return Err(Error::Postcondition(format!(
            "contour result misses Phi(u) by {pointwise_error:e} > {:e}",
            spec.tolerance
        )));
    }
    Ok(Calderon {
        value: fine,
        margin,
        radius,
        eps,
        smoothing_gap: gap,
        smoothing_norm,
        nodes: 2 * spec.nodes,
        drift,
        pointwise_error,
    })
}

/// Sample-wise `Phi(u(x))`.
pub fn pointwise(u: &[Field], phi: &HoloFn) -> Result<Field> {
    check_fields(u)?;
    let spec = u[0].spec();
    let samples = (0..spec.len()).map(|m| phi.eval(&sample(u, m))).collect();
    Field::new(spec.clone(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_bump, BoxRegion, GridSpec};
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::isotropic(1, n, 2.0 * PI).unwrap()
    }

    fn cos_field(g: &GridSpec, a: f64, b: f64) -> Field {
        Field::from_real_fn(g, |x| a + b * x[0].cos())
    }

    #[test]
    fn identity_reproduces_field() {
        let g = grid(128);
        let u = cos_field(&g, 2.0, 1.0);
        let h = calderon_apply(std::slice::from_ref(&u), &HoloFn::identity(), &ContourSpec::default()).unwrap();
        assert!(h.value.max_diff(&u) < 1e-10);
        assert!(h.drift <= 1e-9);
    }

    #[test]
    fn square_and_exp_match_pointwise() {
        let g = grid(128);
        let u = cos_field(&g, 1.0, 0.1);
        for f in [HoloFn::square(), HoloFn::exp()] {
            let h = calderon_apply(std::slice::from_ref(&u), &f, &ContourSpec::default()).unwrap();
            assert!(h.value.max_diff(&pointwise(std::slice::from_ref(&u), &f).unwrap()) < 1e-8, "{}", f.name());
        }
    }

    #[test]
    fn reciprocal_margin_and_residual() {
        let g = grid(128);
        let u = cos_field(&g, 2.0, 1.0);
        let f = HoloFn::reciprocal(0.5);
        // min |u| = 1, excluded disc radius 1/2
        let r = range_distance(std::slice::from_ref(&u), f.domain(), 0.125).unwrap();
        assert!((r - 1.0 / 16.0).abs() < 1e-14);
        let h = calderon_apply(std::slice::from_ref(&u), &f, &ContourSpec::default()).unwrap();
        let one = Field::constant(&g, Complex64::new(1.0, 0.0));
        assert!(h.value.mul(&u).unwrap().max_diff(&one) < 1e-8);
    }

    #[test]
    fn entire_margin_uses_diameter() {
        let g = grid(64);
        let u = cos_field(&g, 0.0, 1.0);
        let r = range_distance(&[u], &Domain::entire(1), 0.125).unwrap();
        assert!((r - 3.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_lists_samples() {
        let g = grid(64);
        let u = cos_field(&g, 0.0, 1.0);
        match calderon_apply(&[u], &HoloFn::reciprocal(0.5), &ContourSpec::default()) {
            Err(Error::OutOfDomain { count, first }) => {
                assert!(count > 0 && !first.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contour_parameters_are_validated() {
        let bad = ContourSpec { radius_multiple: 1.0, ..ContourSpec::default() };
        assert!(bad.validate().unwrap_err().to_string().contains("margin"));
        let bad = ContourSpec { radius_multiple: 7.0, ..ContourSpec::default() };
        assert!(bad.validate().is_err());
        let bad = ContourSpec { nodes: 8, ..ContourSpec::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn coarse_grid_hits_smoothing_floor() {
        // a tiny margin cannot be met before eps drops below the grid
        let g = grid(128);
        let u = Field::from_real_fn(&g, |x| 2.0 + (8.0 * x[0]).cos());
        let f = HoloFn::reciprocal(0.999);
        assert!(matches!(calderon_apply(&[u], &f, &ContourSpec::default()), Err(Error::SmoothingFloor { .. })));
    }

    #[test]
    fn two_variable_product() {
        let g = grid(64);
        let a = cos_field(&g, 1.0, 0.3);
        let b = Field::from_real_fn(&g, |x| x[0].sin());
        let h = calderon_apply(&[a.clone(), b.clone()], &HoloFn::product(), &ContourSpec { nodes: 32, ..ContourSpec::default() }).unwrap();
        assert!(h.value.max_diff(&a.mul(&b).unwrap()) < 1e-8);
    }

    #[test]
    fn random_smooth_field_with_margin() {
        let g = grid(128);
        let u = ensemble::smooth_with_margin(&g, &mut ensemble::rng(3), 6, Complex64::new(2.0, 0.0), 0.8).unwrap();
        for f in [HoloFn::square(), HoloFn::exp(), HoloFn::reciprocal(0.6)] {
            let h = calderon_apply(std::slice::from_ref(&u), &f, &ContourSpec::default()).unwrap();
            assert!(h.pointwise_error < 1e-8);
        }
    }

    #[test]
    fn zero_preserving_function_keeps_support() {
        let g = grid(128);
        let u = make_bump(&g, &BoxRegion::cube(1, 1.0, 2.5), None).unwrap().field;
        let f = HoloFn::square();
        assert_eq!(f.value_at_zero(), Some(Complex64::new(0.0, 0.0)));
        let h = calderon_apply(std::slice::from_ref(&u), &f, &ContourSpec::default()).unwrap();
        for (hv, uv) in h.value.samples().iter().zip(u.samples()) {
            if uv.norm() == 0.0 {
                assert!(hv.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn smoothing_sequence_converges_monotonically() {
        let g = grid(512);
        let u = ensemble::smooth_with_margin(&g, &mut ensemble::rng(8), 8, Complex64::new(2.0, 0.0), 0.9).unwrap();
        let f = HoloFn::exp();
        let target = pointwise(std::slice::from_ref(&u), &f).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1, 0.05] {
            let ue = mollify(&u, &Mollifier::new(&g, eps).unwrap()).unwrap();
            let h = calderon_apply(&[ue], &f, &ContourSpec::default()).unwrap();
            let dist = h.value.max_diff(&target);
            assert!(dist <= prev + 1e-10);
            prev = dist;
        }
    }

    #[test]
    fn supplied_partials_agree_with_differences() {
        for f in [HoloFn::square(), HoloFn::exp(), HoloFn::reciprocal(0.5)] {
            let gap = f.partials_consistency(&[Complex64::new(2.0, 0.5)], 1.0, 1);
            assert!(gap < 1e-6, "{}: {gap}", f.name());
        }
        assert!(HoloFn::product().partials_consistency(&[Complex64::new(1.0, 0.0); 2], 1.0, 2) < 1e-6);
        let numeric = HoloFn::new("cube", Domain::entire(1), |z| z[0] * z[0] * z[0]);
        let d = numeric.partial(0, &[Complex64::new(2.0, 1.0)]);
        assert!((d - 3.0 * Complex64::new(2.0, 1.0).powi(2)).norm() < 1e-6);
    }
}
