//! Window independence, embeddings, `H^s = K_2^s`, products and the Young
//! bound for amalgam norms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{kato_norm, AmalgamNormSpec, Exponent, TranslationScheme};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::report::{CheckReport, EnsembleStats, Verdict};
use crate::sobolev::{h_norm, PartitionOfUnity};
use crate::weights::{MultiOrder, SigmaParams};

/// `||u||_{s,p,chi~} / ||u||_{s,p,chi}`.
pub fn window_ratio(u: &Field, base: &AmalgamNormSpec, other: &AmalgamNormSpec) -> Result<f64> {
    Ok(kato_norm(u, other)? / kato_norm(u, base)?)
}

pub fn window_ratio_check(ensemble: &[Field], base: &AmalgamNormSpec, other: &AmalgamNormSpec) -> Result<EnsembleStats> {
    let r: Vec<f64> = ensemble.par_iter().map(|u| window_ratio(u, base, other)).collect::<Result<_>>()?;
    Ok(EnsembleStats::from_values(&r))
}

/// Lattice-scheme monotonicity `||u||_{s,q,Gamma,chi} <= ||u||_{s,p,Gamma,chi}`
/// along the given exponents, and `||u||_{s',p} <= ||u||_{s,p}` for `s' <= s`.
pub fn embedding_chain_check(u: &Field, spec: &AmalgamNormSpec, exponents: &[Exponent], lower: &MultiOrder) -> Result<CheckReport> {
    if !matches!(spec.scheme(), TranslationScheme::Lattice(_)) {
        return Err(Error::InvalidParameter("the l^p chain needs the lattice scheme".into()));
    }
    if !lower.le(spec.order()) {
        return Err(Error::InvalidParameter("lower order must not exceed the base order".into()));
    }
    let mut report = CheckReport::new("embedding-chain", "K_p^s in K_q^s for p <= q and K_p^s in K_p^{s'} for s' <= s");
    let terms = spec.terms(u)?;
    let mut ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for &p in exponents {
        let v = p.aggregate(&terms, 1.0);
        report.set(&format!("norm_p{p}"), v);
        if let Some((pp, pv)) = prev {
            if p.value() < pp {
                return Err(Error::InvalidParameter("exponents must be nondecreasing".into()));
            }
            ok &= v <= pv * (1.0 + 1e-12);
        }
        prev = Some((p.value(), v));
    }
    let high = spec.aggregate(&terms);
    let low = kato_norm(u, &spec.with_order(lower.clone())?)?;
    report.set("norm_s", high);
    report.set("norm_s_lower", low);
    ok &= low <= high * (1.0 + 1e-12);
    Ok(report.verdict(Verdict::from_bool(ok)))
}

/// `||u||_{s,2,Gamma,h} / ||u||_{H^s}` with the partition master bump `h`.
pub fn h_equals_k2_ratio(u: &Field, part: &PartitionOfUnity, order: &MultiOrder) -> Result<f64> {
    let spec = AmalgamNormSpec::new(order.clone(), Exponent::Finite(2.0), part.master.clone(), TranslationScheme::Lattice(part.lattice))?;
    Ok(kato_norm(u, &spec)? / h_norm(u, order)?)
}

pub fn h_equals_k2_check(ensemble: &[Field], part: &PartitionOfUnity, order: &MultiOrder) -> Result<EnsembleStats> {
    let r: Vec<f64> = ensemble.par_iter().map(|u| h_equals_k2_ratio(u, part, order)).collect::<Result<_>>()?;
    Ok(EnsembleStats::from_values(&r))
}

/// Ratio `||uv||_{sigma,r,chi^2} / (||u||_{s,p,chi} ||v||_{t,q,chi})`
/// with `1/p + 1/q = 1/r`.
pub fn kato_product_ratio(
    u: &Field,
    v: &Field,
    params: &SigmaParams,
    exps: (Exponent, Exponent, Exponent),
    window: &Field,
    scheme: TranslationScheme,
) -> Result<f64> {
    let (p, q, r) = exps;
    let gap = p.reciprocal() + q.reciprocal() - r.reciprocal();
    if gap.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("1/p + 1/q - 1/r = {gap}, expected 0")));
    }
    let su = AmalgamNormSpec::new(params.s.clone(), p, window.clone(), scheme)?;
    let sv = AmalgamNormSpec::new(params.t.clone(), q, window.clone(), scheme)?;
    let suv = AmalgamNormSpec::new(params.sigma.clone(), r, window.mul(window)?, scheme)?;
    Ok(kato_norm(&u.mul(v)?, &suv)? / (kato_norm(u, &su)? * kato_norm(v, &sv)?))
}

pub fn kato_product_check(
    pairs: &[(Field, Field)],
    params: &SigmaParams,
    exps: (Exponent, Exponent, Exponent),
    window: &Field,
    scheme: TranslationScheme,
) -> Result<EnsembleStats> {
    let r: Vec<f64> = pairs
        .par_iter()
        .map(|(u, v)| kato_product_ratio(u, v, params, exps, window, scheme))
        .collect::<Result<_>>()?;
    Ok(EnsembleStats::from_values(&r))
}

/// `||phi * u||_{s,p,chi} <= ||phi||_{L^1} ||u||_{s,p,chi}` with the discrete
/// convolution; exact on the grid when the translation points are the samples.
pub fn young_bound_check(u: &Field, phi: &Field, spec: &AmalgamNormSpec) -> Result<CheckReport> {
    match spec.scheme() {
        TranslationScheme::Continuous { points } if points == spec.spec().samples() => {}
        _ => return Err(Error::InvalidParameter("Young bound needs translations on every sample".into())),
    }
    u.spec().check_same(phi.spec())?;
    let vol = u.spec().volume();
    let cp = phi.to_spectrum();
    let mut su = u.to_spectrum();
    let mult: Vec<Complex64> = cp.coeffs().iter().map(|c| c * vol).collect();
    su.apply(&mult);
    let conv = su.to_field();
    let lhs = kato_norm(&conv, spec)?;
    let l1 = phi.l1_norm();
    let rhs = l1 * kato_norm(u, spec)?;
    Ok(CheckReport::new("young-bound", "||phi * u||_{s,ul,chi} <= ||phi||_{L^1} ||u||_{s,ul,chi}")
        .value("lhs", lhs)
        .value("rhs", rhs)
        .value("phi_l1", l1)
        .value("ratio", lhs / rhs)
        .verdict(Verdict::from_bool(lhs <= rhs * (1.0 + 1e-10))))
}
