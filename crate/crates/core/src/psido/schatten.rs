//! Schatten norms of quantized symbols and the bounds they satisfy.

use rayon::prelude::*;

use super::{quantize, OperatorMatrix, Symbol, Tau};
use crate::error::{Error, Result};
use crate::kato::{kato_norm, pairwise_sum, AmalgamNormSpec, Exponent};
use crate::report::{CheckReport, EnsembleStats, Verdict};

/// `(sum sigma_i^p)^{1/p}`, or `sigma_max` for `p = inf`. The matrix acts on
/// samples with the uniform weight `(L/N)^n` on both sides, so its singular
/// values are those of the operator on `L^2(grid)`.
pub fn schatten_norm(op: &OperatorMatrix, p: Exponent) -> Result<f64> {
    let s = op.singular_values()?;
    Ok(match p {
        Exponent::Infinity => s.first().copied().unwrap_or(0.0),
        Exponent::Finite(p) => {
            let pw: Vec<f64> = s.iter().map(|v| v.powf(p)).collect();
            pairwise_sum(&pw).powf(1.0 / p)
        }
    })
}

/// `||Op_tau(a)||_{B_2} = (2 pi)^{-n/2} ||a||_{L^2}` for each `tau`.
pub fn hilbert_schmidt_check(a: &Symbol, taus: &[Tau]) -> Result<CheckReport> {
    let n = a.x_spec().dim() as i32;
    let rhs = (std::f64::consts::TAU).powf(-0.5 * n as f64) * a.l2_norm();
    let mut report = CheckReport::new("hilbert-schmidt", "||Op_tau(a)||_{B_2} = (2 pi)^{-n/2} ||a||_{L^2}").value("rhs", rhs);
    let mut worst: f64 = 0.0;
    for (i, t) in taus.iter().enumerate() {
        let lhs = schatten_norm(&quantize(a, t)?, Exponent::Finite(2.0))?;
        let rel = (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE);
        report.set(&format!("lhs_{i}"), lhs);
        worst = worst.max(rel);
    }
    report.set("relative_error", worst);
    Ok(report.verdict(Verdict::from_bool(worst <= 1e-8)))
}

/// `max |a|` on the outer shell of the symbol torus (some `|x_a - c| >= 0.4 L`
/// or `|xi_a| >= 0.4 L`) over `max |a|`. A symbol that does not decay there is
/// not a faithful finite-grid model of a compact operator.
pub fn localization(a: &Symbol) -> f64 {
    let xs = a.x_spec();
    let len = xs.len();
    let l = xs.period();
    let c = 0.5 * l;
    let (mut shell, mut all) = (0.0f64, 0.0f64);
    for (flat, v) in a.field().samples().iter().enumerate() {
        let x = xs.position(flat / len);
        let xi = xs.wavevector(flat % len);
        let outer = x.iter().any(|p| (p - c).abs() >= 0.4 * l) || xi.iter().any(|p| p.abs() >= 0.4 * l);
        all = all.max(v.norm());
        if outer {
            shell = shell.max(v.norm());
        }
    }
    if all > 0.0 {
        shell / all
    } else {
        0.0
    }
}

/// Which Schatten estimate is probed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchattenBranch {
    /// `a in K_{p,V}^s` with `s_l > dim V_l`.
    Weighted,
    /// `a in K_{p,V}^{mu n |1 - 2/p|}`, `mu > 1`, one order on every block.
    Interpolated { mu: f64 },
}

fn check_branch(norm: &AmalgamNormSpec, n: usize, branch: SchattenBranch) -> Result<()> {
    let order = norm.order();
    match branch {
        SchattenBranch::Weighted => {
            for (l, (&s, &d)) in order.s().iter().zip(order.blocks()).enumerate() {
                if s <= d as f64 {
                    return Err(Error::Hypothesis(format!("block {l}: s = {s} must exceed dim V = {d}")));
                }
            }
        }
        SchattenBranch::Interpolated { mu } => {
            if mu <= 1.0 {
                return Err(Error::Hypothesis(format!("mu = {mu} must exceed 1")));
            }
            let want = mu * n as f64 * (1.0 - 2.0 * norm.p().reciprocal()).abs();
            if order.s().iter().any(|&s| (s - want).abs() > 1e-12) {
                return Err(Error::Hypothesis(format!("order must be mu n |1 - 2/p| = {want} on every block")));
            }
        }
    }
    Ok(())
}

/// `||Op_tau(a)||_{B_p} / ||a||_{K_{p,V}^s}` with the `p` of `norm`.
pub fn schatten_ratio(a: &Symbol, tau: &Tau, norm: &AmalgamNormSpec) -> Result<f64> {
    let op = quantize(a, tau)?;
    Ok(schatten_norm(&op, norm.p())? / kato_norm(a.field(), norm)?)
}

pub fn schatten_bound_check(symbols: &[Symbol], tau: &Tau, norm: &AmalgamNormSpec, branch: SchattenBranch) -> Result<EnsembleStats> {
    let n = symbols.first().map(|a| a.x_spec().dim()).unwrap_or(1);
    check_branch(norm, n, branch)?;
    let r: Vec<f64> = symbols.par_iter().map(|a| schatten_ratio(a, tau, norm)).collect::<Result<_>>()?;
    Ok(EnsembleStats::from_values(&r))
}

/// `||Op_tau(a) - Op_0(a)||_{B_p}` along `tau in {1/4, 1/2, 3/4, 1}`; the
/// distances should shrink with `|tau|`. A non-monotone sweep is reported
/// INCONCLUSIVE since only continuity is asserted.
pub fn tau_continuity_check(a: &Symbol, p: Exponent) -> Result<CheckReport> {
    let n = a.x_spec().dim();
    let base = quantize(a, &Tau::scalar(n, 0.0)?)?;
    let mut report = CheckReport::new("tau-continuity", "tau -> Op_tau(a) is continuous into B_p");
    let mut prev = 0.0;
    let mut monotone = true;
    for t in [0.25, 0.5, 0.75, 1.0] {
        let d = schatten_norm(&quantize(a, &Tau::scalar(n, t)?)?.sub(&base)?, p)?;
        report.set(&format!("distance_tau_{t}"), d);
        monotone &= d >= prev * (1.0 - 1e-12);
        prev = d;
    }
    Ok(if monotone {
        report.verdict(Verdict::Pass)
    } else {
        report.verdict(Verdict::Inconclusive).note("distances not monotone on the sweep")
    })
}
