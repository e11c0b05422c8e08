use std::f64::consts::PI;

use katokit::psido::{families, operator_grid, quantize, Symbol, Tau};
use katokit::sobolev::{bessel_apply, h_norm};
use katokit::{CheckReport, Complex64, Field, GridSpec, MultiOrder, Verdict};

use super::Plan;
use crate::config::SuiteConfig;
use crate::CliError;

const TOL: f64 = 1e-10;

fn grids() -> Result<Vec<(&'static str, GridSpec, Vec<Vec<i64>>)>, katokit::Error> {
    Ok(vec![
        ("line", GridSpec::isotropic(1, 64, 2.0 * PI)?, vec![vec![0], vec![3], vec![-17], vec![31]]),
        ("long-line", GridSpec::isotropic(1, 128, 7.5)?, vec![vec![1], vec![-40]]),
        ("plane", GridSpec::new(2, 32, 2.0 * PI, vec![1, 1])?, vec![vec![0, 0], vec![2, -5], vec![-15, 11]]),
        ("plane-joint", GridSpec::new(2, 32, 4.0, vec![2])?, vec![vec![1, 1], vec![-7, 12]]),
    ])
}

fn eigen_case(name: &str, g: &GridSpec, waves: &[Vec<i64>]) -> Result<CheckReport, katokit::Error> {
    let blocks = g.blocks().to_vec();
    let orders = [
        MultiOrder::uniform(1.0, &blocks),
        MultiOrder::uniform(-0.75, &blocks),
        MultiOrder::new(blocks.iter().enumerate().map(|(l, _)| 2.5 - l as f64).collect(), blocks.clone())?,
    ];
    let step = g.frequency_step();
    let (mut bessel, mut deriv, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for k in waves {
        let e = Field::plane_wave(g, k);
        let xi: Vec<f64> = k.iter().map(|&v| v as f64 * step).collect();
        for order in &orders {
            let w = order.weight(&xi);
            let want = e.scale(Complex64::new(w, 0.0));
            bessel = bessel.max(bessel_apply(&e, order)?.max_diff(&want) / w);
            let hn = g.volume().sqrt() * w;
            norm = norm.max((h_norm(&e, order)? - hn).abs() / hn);
        }
        for (a, &x) in xi.iter().enumerate() {
            let want = e.scale(Complex64::new(0.0, x));
            deriv = deriv.max(e.derivative(a).max_diff(&want) / x.abs().max(1.0));
        }
    }
    Ok(CheckReport::new(format!("plane-wave-{name}"), "<<D>>^s e_k = <<xi_k>>^s e_k and d_a e_k = i xi_a e_k")
        .value("bessel_error", bessel)
        .value("derivative_error", deriv)
        .value("h_norm_error", norm)
        .verdict(Verdict::from_bool(bessel.max(deriv).max(norm) <= TOL)))
}

/// Quantizations of `g(xi)` act on plane waves by `g(xi_k)` for every tau.
fn multiplier_case(n: usize, samples: usize) -> Result<CheckReport, katokit::Error> {
    let xs = operator_grid(n, samples)?;
    let order = MultiOrder::uniform(2.5, &[n, n]);
    let g = |xi: &[f64]| Complex64::new(1.0 / (1.0 + xi.iter().map(|v| v * v).sum::<f64>()), xi.iter().sum::<f64>().sin());
    let a: Symbol = families::separable(&xs, order, |_| Complex64::new(1.0, 0.0), g)?;
    let step = xs.frequency_step();
    let half = samples as i64 / 2;
    let mut worst = 0.0f64;
    let mut across_tau = 0.0f64;
    let mut first: Option<katokit::psido::OperatorMatrix> = None;
    for t in [0.0, 0.5, 1.0, 0.3] {
        let op = quantize(&a, &Tau::scalar(n, t)?)?;
        for flat in 0..xs.len() {
            let k: Vec<i64> = xs.frequency(flat);
            if k.iter().any(|&v| v == -half) {
                continue;
            }
            let xi: Vec<f64> = k.iter().map(|&v| v as f64 * step).collect();
            let e = Field::plane_wave(&xs, &k);
            worst = worst.max(op.apply(&e)?.max_diff(&e.scale(g(&xi))));
        }
        if let Some(f) = &first {
            across_tau = across_tau.max((op.entries() - f.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max));
        } else {
            first = Some(op);
        }
    }
    Ok(CheckReport::new(format!("multiplier-quantization-n{n}"), "Op_tau(g(xi)) e_k = g(xi_k) e_k for every tau")
        .value("eigen_error", worst)
        .value("tau_spread", across_tau)
        .verdict(Verdict::from_bool(worst <= TOL && across_tau <= 1e-9)))
}

pub(super) fn build<'a>(_cfg: &'a SuiteConfig, plan: &mut Plan<'a>) -> Result<(), CliError> {
    let gs = grids().map_err(|e| CliError::Config(e.to_string()))?;
    for (name, g, waves) in gs {
        plan.single(format!("plane-wave-{name}"), move || eigen_case(name, &g, &waves));
    }
    plan.single("multiplier-quantization-n1", || multiplier_case(1, 16));
    plan.single("multiplier-quantization-n2", || multiplier_case(2, 8));
    Ok(())
}
