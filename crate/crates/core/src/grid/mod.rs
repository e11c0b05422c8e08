//! Periodized grids, sampled fields and their Fourier-series coefficients.
//!
//! A field on `[0, L)^n` is stored as `N^n` complex samples at `x_m = (L/N) m`,
//! row-major with axis 0 slowest. Its spectrum holds the Fourier-series
//! coefficients `c_k = N^{-n} sum_m u(x_m) e^{-i<x_m, xi_k>}` in FFT order,
//! so index `j` on an axis carries the integer frequency `j` for `j < N/2`
//! and `j - N` otherwise.

mod bump;
mod fft;
mod io;
mod mollifier;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use bump::{make_bump, transition, BoxRegion, Window};
pub use io::{load_field, read_field, save_field, write_field};
pub use mollifier::{mollify, Mollifier};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    samples: usize,
    period: f64,
    blocks: Vec<usize>,
}

impl GridSpec {
    pub fn new(dim: usize, samples: usize, period: f64, blocks: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if samples < 2 || !samples.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "samples per axis must be a positive even number, got {samples}"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidGrid("block sizes must be at least 1".into()));
        }
        let total: usize = blocks.iter().sum();
        if total != dim {
            return Err(Error::InvalidGrid(format!(
                "blocks sum to {total} but dimension is {dim}"
            )));
        }
        samples
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::DimensionOverflow(format!("{samples}^{dim} samples")))?;
        Ok(GridSpec { dim, samples, period, blocks })
    }

    /// One block per axis.
    pub fn isotropic(dim: usize, samples: usize, period: f64) -> Result<Self> {
        Self::new(dim, samples, period, vec![1; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn with_blocks(&self, blocks: Vec<usize>) -> Result<Self> {
        Self::new(self.dim, self.samples, self.period, blocks)
    }

    pub fn with_samples(&self, samples: usize) -> Result<Self> {
        Self::new(self.dim, samples, self.period, self.blocks.clone())
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.samples as f64
    }

    /// Quadrature weight of one sample, `(L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the fundamental cell, `L^n`.
    pub fn volume(&self) -> f64 {
        self.period.powi(self.dim as i32)
    }

    /// Spacing of the frequency lattice, `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Integer frequency carried by FFT index `j` on one axis.
    pub fn freq_index(&self, j: usize) -> i64 {
        let n = self.samples as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// FFT index of an integer frequency, if it lies in `[-N/2, N/2)`.
    pub fn index_of_freq(&self, k: i64) -> Option<usize> {
        let n = self.samples as i64;
        if k < -n / 2 || k >= n / 2 {
            None
        } else {
            Some(k.rem_euclid(n) as usize)
        }
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.samples;
            flat /= self.samples;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.samples + i)
    }

    /// Flat index of `idx + shift`, wrapped per axis.
    pub fn shifted_index(&self, idx: &[usize], shift: &[i64]) -> usize {
        let n = self.samples as i64;
        idx.iter()
            .zip(shift)
            .fold(0, |acc, (&i, &s)| acc * self.samples + (i as i64 + s).rem_euclid(n) as usize)
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(flat).into_iter().map(|i| i as f64 * h).collect()
    }

    pub fn frequency(&self, flat: usize) -> Vec<i64> {
        self.multi_index(flat).into_iter().map(|j| self.freq_index(j)).collect()
    }

    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        let step = self.frequency_step();
        self.frequency(flat).into_iter().map(|k| k as f64 * step).collect()
    }

    /// Wavenumbers of one axis in FFT order.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        let step = self.frequency_step();
        (0..self.samples).map(|j| self.freq_index(j) as f64 * step).collect()
    }

    /// Axis ranges of each block.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|&b| {
                let r = start..start + b;
                start += b;
                r
            })
            .collect()
    }

    /// Evaluate `f(xi_k)` at every frequency, in FFT order.
    pub fn multiplier<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let axis = self.axis_wavenumbers();
        let mut xi = vec![0.0; self.dim];
        (0..self.len())
            .map(|flat| {
                let mut rest = flat;
                for a in (0..self.dim).rev() {
                    xi[a] = axis[rest % self.samples];
                    rest /= self.samples;
                }
                f(&xi)
            })
            .collect()
    }

    /// Real-valued version of [`GridSpec::multiplier`].
    pub fn real_multiplier<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64,
    {
        self.multiplier(|xi| Complex64::new(f(xi), 0.0))
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!("grid {self:?} vs {other:?}")))
        }
    }

    /// Lattice translation in samples for a displacement `y`, if `y` lies on
    /// the sample lattice.
    pub fn lattice_shift(&self, y: &[f64]) -> Option<Vec<i64>> {
        let h = self.spacing();
        y.iter()
            .map(|&yi| {
                let m = (yi / h).round();
                ((yi / h - m).abs() <= 1e-12 * (1.0 + m.abs())).then_some(m as i64)
            })
            .collect()
    }
}

/// Complex samples of a function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    samples: Vec<Complex64>,
}

/// Fourier-series coefficients of a field, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples, got {}",
                spec.len(),
                samples.len()
            )));
        }
        Ok(Field { spec, samples })
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        Self::constant(spec, Complex64::new(0.0, 0.0))
    }

    pub fn constant(spec: &GridSpec, c: Complex64) -> Self {
        Field { spec: spec.clone(), samples: vec![c; spec.len()] }
    }

    pub fn from_fn<F>(spec: &GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let samples = (0..spec.len()).map(|m| f(&spec.position(m))).collect();
        Field { spec: spec.clone(), samples }
    }

    pub fn from_real_fn<F>(spec: &GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::from_fn(spec, |x| Complex64::new(f(x), 0.0))
    }

    /// `e^{i<k, x>}` for an integer frequency vector `k`.
    pub fn plane_wave(spec: &GridSpec, k: &[i64]) -> Self {
        let step = spec.frequency_step();
        Self::from_fn(spec, |x| {
            let phase: f64 = x.iter().zip(k).map(|(xi, &ki)| xi * ki as f64 * step).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn to_spectrum(&self) -> Spectrum {
        let mut data = self.samples.clone();
        fft::forward(&self.spec, &mut data);
        let scale = 1.0 / self.spec.len() as f64;
        for c in &mut data {
            *c *= scale;
        }
        Spectrum { spec: self.spec.clone(), coeffs: data }
    }

    /// `tau_y u = u(. - y)`. Lattice displacements are exact index shifts;
    /// anything else goes through the spectral phase `e^{-i<y, xi_k>}`.
    pub fn translate(&self, y: &[f64]) -> Result<Field> {
        if y.len() != self.spec.dim {
            return Err(Error::ShapeMismatch(format!(
                "translation of length {} on a {}-dimensional grid",
                y.len(),
                self.spec.dim
            )));
        }
        if let Some(shift) = self.spec.lattice_shift(y) {
            return Ok(self.cyclic_shift(&shift));
        }
        Ok(self.translate_spectral(y))
    }

    /// Translation through the spectral phase, regardless of `y`.
    pub fn translate_spectral(&self, y: &[f64]) -> Field {
        let spec = &self.spec;
        let mut s = self.to_spectrum();
        let phase = spec.multiplier(|xi| {
            let t: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, -t)
        });
        for (c, p) in s.coeffs.iter_mut().zip(&phase) {
            *c *= p;
        }
        s.to_field()
    }

    /// `tau_y u` with `y = shift * (L/N)`: `out[m] = u[m - shift]`.
    pub fn cyclic_shift(&self, shift: &[i64]) -> Field {
        let spec = &self.spec;
        let neg: Vec<i64> = shift.iter().map(|s| -s).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); spec.len()];
        let mut idx = vec![0usize; spec.dim];
        for (m, o) in out.iter_mut().enumerate() {
            let mut rest = m;
            for a in (0..spec.dim).rev() {
                idx[a] = rest % spec.samples;
                rest /= spec.samples;
            }
            *o = self.samples[spec.shifted_index(&idx, &neg)];
        }
        Field { spec: spec.clone(), samples: out }
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.spec.check_same(&other.spec)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.spec.check_same(&other.spec)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.spec.check_same(&other.spec)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|z| z * c)
    }

    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(Complex64) -> Complex64,
    {
        Field { spec: self.spec.clone(), samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    fn zip_with<F>(&self, other: &Field, f: F) -> Field
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Field { spec: self.spec.clone(), samples }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn min_abs(&self) -> f64 {
        self.samples.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()))
    }

    /// Discrete `L^2` norm, `((L/N)^n sum |u|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.spec.cell_volume() * self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Discrete `L^1` norm.
    pub fn l1_norm(&self) -> f64 {
        self.spec.cell_volume() * self.samples.iter().map(|z| z.norm()).sum::<f64>()
    }

    /// Sup-norm distance to another field on the same grid.
    pub fn max_diff(&self, other: &Field) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Spectral derivative `d/dx_axis` (multiplier `i xi_axis`).
    pub fn derivative(&self, axis: usize) -> Field {
        let mut s = self.to_spectrum();
        let mult = self.spec.multiplier(|xi| Complex64::new(0.0, xi[axis]));
        for (c, m) in s.coeffs.iter_mut().zip(&mult) {
            *c *= m;
        }
        s.to_field()
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        self.to_spectrum().evaluate(x)
    }
}

/// Sample-wise product, `f * g`.
pub fn pointwise_mul(f: &Field, g: &Field) -> Result<Field> {
    f.mul(g)
}

/// Sample-wise application of a scalar function.
pub fn pointwise_apply<F>(f: &Field, g: F) -> Field
where
    F: Fn(Complex64) -> Complex64,
{
    f.map(g)
}

impl Spectrum {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coeffs.len()
            )));
        }
        Ok(Spectrum { spec, coeffs })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the integer frequency `k`, zero if outside the grid.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let idx: Option<Vec<usize>> = k.iter().map(|&ki| self.spec.index_of_freq(ki)).collect();
        match idx {
            Some(idx) => self.coeffs[self.spec.flat_index(&idx)],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_field(&self) -> Field {
        let mut data = self.coeffs.clone();
        fft::inverse(&self.spec, &mut data);
        Field { spec: self.spec.clone(), samples: data }
    }

    /// Multiply by a precomputed multiplier table (FFT order).
    pub fn apply(&mut self, multiplier: &[Complex64]) {
        for (c, m) in self.coeffs.iter_mut().zip(multiplier) {
            *c *= m;
        }
    }

    /// `sum_k w_k |c_k|^2` for a weight table.
    pub fn weighted_energy(&self, weights: &[f64]) -> f64 {
        self.coeffs.iter().zip(weights).map(|(c, w)| w * c.norm_sqr()).sum()
    }

    /// `sum_k c_k e^{i<x, xi_k>}` at an arbitrary point.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let spec = &self.spec;
        let step = spec.frequency_step();
        let axis_phase: Vec<Vec<Complex64>> = x
            .iter()
            .map(|&xa| {
                (0..spec.samples)
                    .map(|j| Complex64::from_polar(1.0, xa * spec.freq_index(j) as f64 * step))
                    .collect()
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        let mut idx = vec![0usize; spec.dim];
        for (flat, c) in self.coeffs.iter().enumerate() {
            let mut rest = flat;
            for a in (0..spec.dim).rev() {
                idx[a] = rest % spec.samples;
                rest /= spec.samples;
            }
            let mut p = *c;
            for a in 0..spec.dim {
                p *= axis_phase[a][idx[a]];
            }
            total += p;
        }
        total
    }
}
