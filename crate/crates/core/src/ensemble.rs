//! Seeded random test fields.
//!
//! Fields are specified by their Fourier coefficients at integer frequencies
//! and drawn in a fixed order, so the same seed gives the same function on
//! every grid that resolves it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Spectrum};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frequency_box(dim: usize, kmax: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-kmax..=kmax).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

fn from_coefficients(spec: &GridSpec, kmax: i64, coeff: &[(Vec<i64>, Complex64)], real: bool) -> Result<Field> {
    if 2 * kmax >= spec.samples() as i64 {
        return Err(Error::Resolution(format!(
            "band limit {kmax} needs more than {} samples per axis",
            2 * kmax
        )));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); spec.len()];
    for (k, v) in coeff {
        let idx: Vec<usize> = k.iter().map(|&ki| spec.index_of_freq(ki).unwrap()).collect();
        c[spec.flat_index(&idx)] = *v;
    }
    if real {
        let mut sym = c.clone();
        for (k, _) in coeff {
            let idx: Vec<usize> = k.iter().map(|&ki| spec.index_of_freq(ki).unwrap()).collect();
            let neg: Vec<usize> = k.iter().map(|&ki| spec.index_of_freq(-ki).unwrap()).collect();
            let (a, b) = (spec.flat_index(&idx), spec.flat_index(&neg));
            sym[a] = 0.5 * (c[a] + c[b].conj());
        }
        c = sym;
    }
    Ok(Spectrum::new(spec.clone(), c)?.to_field())
}

/// Random band-limited field: Gaussian coefficients of size `<k>^{-decay}`
/// for `|k_i| <= kmax`.
pub fn band_limited(spec: &GridSpec, rng: &mut ChaCha8Rng, kmax: i64, decay: f64, real: bool) -> Result<Field> {
    let coeff: Vec<(Vec<i64>, Complex64)> = frequency_box(spec.dim(), kmax)
        .into_iter()
        .map(|k| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let r2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
            let amp = (1.0 + r2).powf(-0.5 * decay);
            (k, Complex64::new(re, im) * amp)
        })
        .collect();
    from_coefficients(spec, kmax, &coeff, real)
}

/// Random-phase field with `|c_k| = <k>^{-exponent}` for `|k_i| <= kmax`.
/// With `exponent = s + n/2 + delta` it sits just inside `H^{s + delta}`.
pub fn power_law(spec: &GridSpec, rng: &mut ChaCha8Rng, kmax: i64, exponent: f64, real: bool) -> Result<Field> {
    let coeff: Vec<(Vec<i64>, Complex64)> = frequency_box(spec.dim(), kmax)
        .into_iter()
        .map(|k| {
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
            let amp = (1.0 + r2).powf(-0.5 * exponent);
            (k, Complex64::from_polar(amp, phase))
        })
        .collect();
    from_coefficients(spec, kmax, &coeff, real)
}

/// Smooth real field `center + amplitude * w / ||w||_inf` for a random
/// band-limited `w`; its range stays within `amplitude` of `center`.
pub fn smooth_with_margin(
    spec: &GridSpec,
    rng: &mut ChaCha8Rng,
    kmax: i64,
    center: Complex64,
    amplitude: f64,
) -> Result<Field> {
    let w = band_limited(spec, rng, kmax, 1.0, true)?;
    let scale = amplitude / w.sup_norm();
    Ok(w.map(|z| center + Complex64::new(z.re * scale, 0.0)))
}

/// Rescale a field to unit `L^2` norm.
pub fn normalized(u: Field) -> Field {
    let n = u.l2_norm();
    u.scale(Complex64::new(1.0 / n, 0.0))
}
