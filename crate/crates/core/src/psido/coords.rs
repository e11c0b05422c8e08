//! Grid isometries `lambda` (signed axis permutations) and the identity
//! `(a o lambda)(D)(u o lambda) = (a(D) u) o lambda`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::report::{CheckReport, Verdict};

/// `(lambda x)_a = sign_a x_{perm_a}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridIsometry {
    perm: Vec<usize>,
    flip: Vec<bool>,
}

impl GridIsometry {
    pub fn new(perm: Vec<usize>, flip: Vec<bool>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if flip.len() != perm.len() {
            return Err(Error::ShapeMismatch("one sign per axis".into()));
        }
        Ok(GridIsometry { perm, flip })
    }

    pub fn identity(n: usize) -> Self {
        GridIsometry { perm: (0..n).collect(), flip: vec![false; n] }
    }

    /// All `2^n n!` signed permutations.
    pub fn all(n: usize) -> Vec<Self> {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut out = Vec::new();
        for p in perms(n) {
            for mask in 0..(1usize << n) {
                let flip = (0..n).map(|a| mask >> a & 1 == 1).collect();
                out.push(GridIsometry { perm: p.clone(), flip });
            }
        }
        out.sort_by(|a, b| (&a.perm, &a.flip).cmp(&(&b.perm, &b.flip)));
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.perm.iter().zip(&self.flip).map(|(&p, &f)| if f { -x[p] } else { x[p] }).collect()
    }

    /// `map[i]` is the sample index of `lambda x_i`.
    pub fn index_map(&self, spec: &GridSpec) -> Vec<usize> {
        let n = spec.samples();
        (0..spec.len())
            .map(|flat| {
                let idx = spec.multi_index(flat);
                let img: Vec<usize> = self
                    .perm
                    .iter()
                    .zip(&self.flip)
                    .map(|(&p, &f)| if f { (n - idx[p]) % n } else { idx[p] })
                    .collect();
                spec.flat_index(&img)
            })
            .collect()
    }

    /// `u o lambda`.
    pub fn compose(&self, u: &Field) -> Result<Field> {
        if self.perm.len() != u.spec().dim() {
            return Err(Error::ShapeMismatch(format!("isometry of R^{} on a {}-dimensional grid", self.perm.len(), u.spec().dim())));
        }
        let map = self.index_map(u.spec());
        Field::new(u.spec().clone(), map.iter().map(|&j| u.samples()[j]).collect())
    }
}

fn apply_multiplier<F>(u: &Field, a: F) -> Field
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut s = u.to_spectrum();
    s.apply(&u.spec().multiplier(a));
    s.to_field()
}

/// `(a o lambda)(D)(u o lambda)` against `(a(D) u) o lambda`.
pub fn multiplier_change_check<F>(u: &Field, a: F, lambda: &GridIsometry) -> Result<CheckReport>
where
    F: Fn(&[f64]) -> Complex64,
{
    let lhs = apply_multiplier(&lambda.compose(u)?, |xi| a(&lambda.apply(xi)));
    let rhs = lambda.compose(&apply_multiplier(u, &a))?;
    let err = lhs.max_diff(&rhs);
    let scale = rhs.sup_norm().max(1.0);
    Ok(CheckReport::new("multiplier-change", "(a o lambda)(D)(u o lambda) = (a(D) u) o lambda")
        .value("sup_error", err)
        .verdict(Verdict::from_bool(err <= 1e-11 * scale)))
}

/// `b(|D|^2)(u o lambda) = (b(|D|^2) u) o lambda`.
pub fn coordinate_change_check<B>(u: &Field, b: B, lambda: &GridIsometry) -> Result<CheckReport>
where
    B: Fn(f64) -> f64,
{
    let m = |xi: &[f64]| Complex64::new(b(xi.iter().map(|v| v * v).sum()), 0.0);
    let lhs = apply_multiplier(&lambda.compose(u)?, m);
    let rhs = lambda.compose(&apply_multiplier(u, m))?;
    let err = lhs.max_diff(&rhs);
    let scale = rhs.sup_norm().max(1.0);
    Ok(CheckReport::new("coordinate-change", "b(|D|^2)(u o lambda) = (b(|D|^2) u) o lambda")
        .value("sup_error", err)
        .verdict(Verdict::from_bool(err <= 1e-11 * scale)))
}
