//! tau-quantization of symbols `a(x, xi)` on the torus, with operator
//! matrices, Schatten norms, the modulation norm `S_w^p` and coordinate
//! changes by grid isometries.
//!
//! Symbols live on a `2n`-dimensional grid whose `xi` axes sample exactly the
//! frequencies `eta_k = (2 pi / L) k` of the `x` grid. That forces the common
//! period `L = sqrt(2 pi N)`, so sample index `j` on a `xi` axis is frequency
//! `k = j (mod N)`.

mod coords;
mod modulation;
mod schatten;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Spectrum};
use crate::weights::MultiOrder;

pub use coords::{coordinate_change_check, multiplier_change_check, GridIsometry};
pub use modulation::{dilate, dilation_check, sw_embedding_check, sw_embedding_ratio, sw_norm, DilationRatios};
pub use schatten::{hilbert_schmidt_check, localization, schatten_bound_check, schatten_norm, schatten_ratio, tau_continuity_check, SchattenBranch};

/// The `x` grid of an operator with `samples^dim` points and self-dual period.
pub fn operator_grid(dim: usize, samples: usize) -> Result<GridSpec> {
    GridSpec::isotropic(dim, samples, (std::f64::consts::TAU * samples as f64).sqrt())
}

fn self_dual(spec: &GridSpec) -> bool {
    let l2 = spec.period() * spec.period();
    let want = std::f64::consts::TAU * spec.samples() as f64;
    (l2 - want).abs() <= 1e-12 * want
}

/// A sampled symbol `a(x, xi)` with its block partition `V` and order.
#[derive(Debug, Clone)]
pub struct Symbol {
    field: Field,
    x_spec: GridSpec,
    order: MultiOrder,
}

impl Symbol {
    pub fn new(field: Field, order: MultiOrder) -> Result<Self> {
        let spec = field.spec();
        if !spec.dim().is_multiple_of(2) {
            return Err(Error::ShapeMismatch(format!("symbol grid has odd dimension {}", spec.dim())));
        }
        if !self_dual(spec) {
            return Err(Error::InvalidGrid(format!(
                "symbol period {} is not sqrt(2 pi N) for N = {}",
                spec.period(),
                spec.samples()
            )));
        }
        order.check_blocks(spec.blocks())?;
        let x_spec = operator_grid(spec.dim() / 2, spec.samples())?;
        Ok(Symbol { field, x_spec, order })
    }

    /// Samples `f(x, xi)` at `x_i` and the signed frequencies `eta_k`.
    pub fn from_fn<F>(x_spec: &GridSpec, order: MultiOrder, f: F) -> Result<Self>
    where
        F: Fn(&[f64], &[f64]) -> Complex64 + Sync,
    {
        if !self_dual(x_spec) {
            return Err(Error::InvalidGrid("x grid is not self-dual; build it with operator_grid".into()));
        }
        let n = x_spec.dim();
        let spec = GridSpec::new(2 * n, x_spec.samples(), x_spec.period(), order.blocks().to_vec())?;
        let len = x_spec.len();
        let samples: Vec<Complex64> = (0..spec.len())
            .into_par_iter()
            .map(|flat| {
                let (xi_flat, eta_flat) = (flat / len, flat % len);
                f(&x_spec.position(xi_flat), &x_spec.wavevector(eta_flat))
            })
            .collect();
        Symbol::new(Field::new(spec, samples)?, order)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn x_spec(&self) -> &GridSpec {
        &self.x_spec
    }

    pub fn order(&self) -> &MultiOrder {
        &self.order
    }

    /// `||a||_{L^2(R^{2n})}` with `dx = (L/N)^n`, `d xi = (2 pi / L)^n`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.x_spec.dim() as i32;
        let measure = self.x_spec.cell_volume() * self.x_spec.frequency_step().powi(n);
        (measure * self.field.samples().iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// Named symbol families.
pub mod families {
    use super::*;

    fn center(x_spec: &GridSpec) -> f64 {
        0.5 * x_spec.period()
    }

    /// `exp(-|x - c|^2 / (2 wx^2) - |xi|^2 / (2 wxi^2))`, `c` the torus center.
    pub fn gaussian(x_spec: &GridSpec, order: MultiOrder, wx: f64, wxi: f64) -> Result<Symbol> {
        let c = center(x_spec);
        Symbol::from_fn(x_spec, order, move |x, xi| {
            let r2: f64 = x.iter().map(|v| (v - c).powi(2)).sum();
            let k2: f64 = xi.iter().map(|v| v * v).sum();
            Complex64::new((-0.5 * r2 / (wx * wx) - 0.5 * k2 / (wxi * wxi)).exp(), 0.0)
        })
    }

    /// `f(x) g(xi)`.
    pub fn separable<F, G>(x_spec: &GridSpec, order: MultiOrder, f: F, g: G) -> Result<Symbol>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
        G: Fn(&[f64]) -> Complex64 + Sync,
    {
        Symbol::from_fn(x_spec, order, |x, xi| f(x) * g(xi))
    }

    /// Sum of `count` Gaussian wave packets of width 1 with random centers
    /// `|x - c|_inf, |xi|_inf <= 1.5`, random modulations and complex
    /// amplitudes. Defined on `R^{2n}`, so the same seed gives the same
    /// symbol on every grid that resolves it.
    pub fn wave_packets(x_spec: &GridSpec, order: MultiOrder, rng: &mut ChaCha8Rng, count: usize) -> Result<Symbol> {
        let n = x_spec.dim();
        let c = center(x_spec);
        let packets: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, Complex64)> = (0..count)
            .map(|_| {
                let x0: Vec<f64> = (0..n).map(|_| c + rng.random_range(-1.5..1.5)).collect();
                let k0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let m0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (x0, k0, m0, amp)
            })
            .collect();
        Symbol::from_fn(x_spec, order, move |x, xi| {
            packets
                .iter()
                .map(|(x0, k0, m0, amp)| {
                    let mut e = 0.0;
                    let mut ph = 0.0;
                    for a in 0..n {
                        e += (x[a] - x0[a]).powi(2) + (xi[a] - k0[a]).powi(2);
                        ph += m0[a] * (x[a] - x0[a]);
                    }
                    amp * Complex64::from_polar((-0.5 * e).exp(), ph)
                })
                .sum()
        })
    }

    /// Parses `gaussian`, `gaussian WX WXI`, `separable`, `random`
    /// (wave packets, three per symbol).
    pub fn by_name(name: &str, x_spec: &GridSpec, order: MultiOrder, rng: &mut ChaCha8Rng) -> Result<Symbol> {
        let parts: Vec<&str> = name.split_whitespace().collect();
        match parts.as_slice() {
            ["gaussian"] => gaussian(x_spec, order, 1.0, 1.0),
            ["gaussian", wx, wxi] => {
                let p = |s: &str| s.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad width {s:?}")));
                gaussian(x_spec, order, p(wx)?, p(wxi)?)
            }
            ["separable"] => {
                let c = center(x_spec);
                separable(
                    x_spec,
                    order,
                    move |x| Complex64::new((-0.5 * x.iter().map(|v| (v - c).powi(2)).sum::<f64>()).exp(), 0.0),
                    |xi| Complex64::new(1.0 / (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).powi(2), 0.0),
                )
            }
            ["random"] => wave_packets(x_spec, order, rng, 3),
            _ => Err(Error::InvalidParameter(format!("unknown symbol family {name:?}"))),
        }
    }
}

/// The quantization parameter: an `n x n` real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tau {
    n: usize,
    entries: Vec<f64>,
}

impl Tau {
    pub fn scalar(n: usize, t: f64) -> Result<Self> {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = t;
        }
        Self::matrix(n, entries)
    }

    pub fn matrix(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!("tau needs {} entries, got {}", n * n, entries.len())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tau must be finite".into()));
        }
        Ok(Tau { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn apply(&self, d: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entries[i * self.n + j] * d[j]).sum()).collect()
    }
}

/// Matrix of an operator on the samples of a grid, with cached singular values.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    spec: GridSpec,
    entries: DMatrix<Complex64>,
    tau: Option<Tau>,
    singular: OnceLock<Vec<f64>>,
}

impl OperatorMatrix {
    pub fn new(spec: GridSpec, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != spec.len() || entries.ncols() != spec.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix on a grid of {} samples",
                entries.nrows(),
                entries.ncols(),
                spec.len()
            )));
        }
        Ok(OperatorMatrix { spec, entries, tau: None, singular: OnceLock::new() })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Mutable access; drops the cached singular values.
    pub fn entries_mut(&mut self) -> &mut DMatrix<Complex64> {
        self.singular = OnceLock::new();
        &mut self.entries
    }

    pub fn tau(&self) -> Option<&Tau> {
        self.tau.as_ref()
    }

    pub fn apply(&self, v: &Field) -> Result<Field> {
        self.spec.check_same(v.spec())?;
        let x = nalgebra::DVector::from_column_slice(v.samples());
        let y = &self.entries * x;
        Field::new(self.spec.clone(), y.as_slice().to_vec())
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.spec.check_same(other.spec())?;
        OperatorMatrix::new(self.spec.clone(), &self.entries - &other.entries)
    }

    /// Nonincreasing singular values.
    pub fn singular_values(&self) -> Result<&[f64]> {
        if let Some(s) = self.singular.get() {
            return Ok(s);
        }
        let s = compute_singular_values(&self.entries)?;
        Ok(self.singular.get_or_init(|| s))
    }
}

pub(crate) fn compute_singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let svd = m.clone().try_svd(false, false, f64::EPSILON, 0).ok_or(Error::SvdNonConvergence)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Signed minimal-image offset index in `[-N/2, N/2)`.
fn signed(j: usize, n: usize) -> i64 {
    let j = j as i64;
    let n = n as i64;
    if j < n / 2 {
        j
    } else {
        j - n
    }
}

/// `M[i][j] = (L/N)^n K(x_i, y_j)` with
/// `K(x, y) = L^{-n} sum_k e^{i <x - y, eta_k>} a(x + tau (y - x), eta_k)`,
/// `y - x` taken as the minimal image and `a` interpolated spectrally in `x`.
///
/// Writing `a(z, eta) = sum_m c_m(eta) e^{i <mu_m, z>}`, each kernel diagonal
/// `d = y - x` is an inverse FFT in `m` of `e^{i <mu_m, tau d>} B_m(d)`, where
/// `B_m(d) = sum_k c_m(eta_k) e^{-i <d, eta_k>}` is the forward FFT of the
/// symbol over both blocks.
pub fn quantize(a: &Symbol, tau: &Tau) -> Result<OperatorMatrix> {
    let x_spec = a.x_spec().clone();
    let n = x_spec.dim();
    if tau.dim() != n {
        return Err(Error::ShapeMismatch(format!("tau is {0}x{0} for an operator on R^{n}", tau.dim())));
    }
    let big = x_spec.samples();
    let len = x_spec.len();
    // FFT_{2n}(a) / N^n in terms of the normalized coefficients
    let scale_b = len as f64;
    let spectrum = a.field().to_spectrum();
    let coeffs = spectrum.coeffs();
    let h = x_spec.spacing();
    let mu: Vec<Vec<f64>> = (0..len).map(|m| x_spec.wavevector(m)).collect();
    let prefactor = x_spec.cell_volume() / x_spec.volume();

    let diagonals: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|dflat| {
            let didx = x_spec.multi_index(dflat);
            let d: Vec<f64> = didx.iter().map(|&j| signed(j, big) as f64 * h).collect();
            let td = tau.apply(&d);
            let c: Vec<Complex64> = (0..len)
                .map(|m| {
                    let phase: f64 = mu[m].iter().zip(&td).map(|(a, b)| a * b).sum();
                    coeffs[m * len + dflat] * scale_b * Complex64::from_polar(1.0, phase)
                })
                .collect();
            let k = Spectrum::new(x_spec.clone(), c).expect("same grid").to_field();
            k.into_samples().into_iter().map(|v| v * prefactor).collect()
        })
        .collect();

    let mut entries = DMatrix::<Complex64>::zeros(len, len);
    for (dflat, diag) in diagonals.iter().enumerate() {
        let shift: Vec<i64> = x_spec.multi_index(dflat).iter().map(|&j| j as i64).collect();
        for (i, &v) in diag.iter().enumerate() {
            let j = x_spec.shifted_index(&x_spec.multi_index(i), &shift);
            entries[(i, j)] = v;
        }
    }
    let mut op = OperatorMatrix::new(x_spec, entries)?;
    op.tau = Some(tau.clone());
    Ok(op)
}
