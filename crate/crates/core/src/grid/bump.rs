//! Smooth compactly supported bumps built from the `e^{-1/t}` transition.

use num_complex::Complex64;

use super::{Field, GridSpec};
use crate::error::{Error, Result};

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        BoxRegion { lo, hi }
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BoxRegion { lo: vec![lo; dim], hi: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&xi, (&a, &b))| a <= xi && xi <= b)
    }

    pub fn translated(&self, y: &[f64]) -> BoxRegion {
        BoxRegion {
            lo: self.lo.iter().zip(y).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(y).map(|(a, b)| a + b).collect(),
        }
    }

    fn strictly_contains(&self, inner: &BoxRegion) -> bool {
        self.lo.iter().zip(&inner.lo).all(|(a, b)| a < b)
            && self.hi.iter().zip(&inner.hi).all(|(a, b)| b < a)
    }
}

/// A smooth bump sampled on a grid, with the box outside of which it vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub field: Field,
    pub support: BoxRegion,
    pub profile: String,
}

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `g(t) = psi(t) / (psi(t) + psi(1 - t))`: 0 for `t <= 0`, 1 for `t >= 1`,
/// smooth and strictly increasing in between.
pub fn transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

fn axis_profile(x: f64, a: f64, c: f64, d: f64, b: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    transition((x - a) / (c - a)) * transition((b - x) / (b - d))
}

/// Tensor-product bump equal to 1 on `plateau` and 0 outside `support`.
/// Without a plateau the bump peaks (value 1) at the centre of the support.
pub fn make_bump(spec: &GridSpec, support: &BoxRegion, plateau: Option<&BoxRegion>) -> Result<Window> {
    let dim = spec.dim();
    if support.dim() != dim || plateau.is_some_and(|p| p.dim() != dim) {
        return Err(Error::InvalidWindow("box dimension does not match the grid".into()));
    }
    let cell = BoxRegion::cube(dim, 0.0, spec.period());
    if !support.lo.iter().zip(&support.hi).all(|(a, b)| a < b) || !cell.strictly_contains(support) {
        return Err(Error::InvalidWindow(format!(
            "support {support:?} is not strictly inside the cell [0, {})^{dim}",
            spec.period()
        )));
    }
    let plateau = match plateau {
        Some(p) => {
            if !p.lo.iter().zip(&p.hi).all(|(a, b)| a <= b) || !support.strictly_contains(p) {
                return Err(Error::InvalidWindow(format!(
                    "plateau {p:?} is not strictly inside the support {support:?}"
                )));
            }
            p.clone()
        }
        None => {
            let mid: Vec<f64> = support.lo.iter().zip(&support.hi).map(|(a, b)| 0.5 * (a + b)).collect();
            BoxRegion::new(mid.clone(), mid)
        }
    };
    let field = Field::from_fn(spec, |x| {
        let mut v = 1.0;
        for i in 0..dim {
            v *= axis_profile(x[i], support.lo[i], plateau.lo[i], plateau.hi[i], support.hi[i]);
            if v == 0.0 {
                break;
            }
        }
        Complex64::new(v, 0.0)
    });
    Ok(Window { field, support: support.clone(), profile: "exp-transition".into() })
}
