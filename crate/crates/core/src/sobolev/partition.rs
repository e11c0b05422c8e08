//! Lattice translates, the explicit partition of unity, and the
//! lattice-decomposition ratio.

use num_complex::Complex64;
use rayon::prelude::*;

use super::SobolevWeights;
use crate::error::{Error, Result};
use crate::grid::{make_bump, BoxRegion, Field, GridSpec, Window};
use crate::report::EnsembleStats;
use crate::weights::MultiOrder;

/// Minimum samples per lattice cell for [`build_partition`].
pub const MIN_SAMPLES_PER_CELL: usize = 32;

/// The lattice `Gamma = (L / cells) Z^n` inside the torus `[0, L)^n`.
///
/// `cells` lattice cells fit along each axis; on the torus `Gamma` has
/// `cells^n` points and every translate by a lattice vector is an exact
/// index shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    cells: usize,
}

impl Lattice {
    pub fn new(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidParameter("lattice needs at least one cell".into()));
        }
        Ok(Lattice { cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Side of a lattice cell.
    pub fn spacing(&self, spec: &GridSpec) -> f64 {
        spec.period() / self.cells as f64
    }

    /// Samples per lattice cell along one axis.
    pub fn step(&self, spec: &GridSpec) -> Result<usize> {
        if !spec.samples().is_multiple_of(self.cells) {
            return Err(Error::InvalidParameter(format!(
                "{} samples per axis are not divisible into {} lattice cells",
                spec.samples(),
                self.cells
            )));
        }
        Ok(spec.samples() / self.cells)
    }

    /// Lattice points as sample shifts, `gamma = step * g`, `g in {0..cells}^n`.
    pub fn shifts(&self, spec: &GridSpec) -> Result<Vec<Vec<i64>>> {
        let step = self.step(spec)? as i64;
        let mut out = vec![Vec::new()];
        for _ in 0..spec.dim() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..self.cells as i64).map(move |g| {
                        let mut q = p.clone();
                        q.push(g * step);
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// `sum_gamma tau_gamma f`.
    pub fn periodize(&self, f: &Field) -> Result<Field> {
        let mut acc = Field::zeros(f.spec());
        for shift in self.shifts(f.spec())? {
            acc = acc.add(&f.cyclic_shift(&shift))?;
        }
        Ok(acc)
    }
}

/// Smooth partition of unity adapted to a lattice:
/// `h_i = tau_{x_i} h~ / H~`, `chi_i = sum_gamma tau_gamma h_i`, `h = sum_i h_i`.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub lattice: Lattice,
    /// Shifts `x_i in {-1/3, 0, 1/3}^n` (in lattice units) around the base cell.
    pub shifts: Vec<Vec<f64>>,
    pub pieces: Vec<Window>,
    pub periodic_pieces: Vec<Field>,
    pub master: Field,
    /// `H~ = sum_i sum_gamma tau_{gamma + x_i} h~`.
    pub cover: Field,
}

/// Builds the partition with `h~ = 1` on `o + [1/3, 2/3]^n`, supported in
/// `o + [1/4, 3/4]^n` (lattice units), where the base cell starts at
/// `o = 1/2` so that all shifted pieces sit strictly inside the torus.
pub fn build_partition(spec: &GridSpec, lattice: Lattice) -> Result<PartitionOfUnity> {
    let step = lattice.step(spec)?;
    if step < MIN_SAMPLES_PER_CELL {
        return Err(Error::Resolution(format!(
            "{step} samples per lattice cell, need at least {MIN_SAMPLES_PER_CELL}"
        )));
    }
    if lattice.cells() < 2 {
        return Err(Error::InvalidParameter("the partition needs at least two lattice cells per axis".into()));
    }
    let dim = spec.dim();
    let ell = lattice.spacing(spec);
    let origin = 0.5 * ell;
    let mut shifts = vec![Vec::new()];
    for _ in 0..dim {
        shifts = shifts
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                [-1.0 / 3.0, 0.0, 1.0 / 3.0].into_iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }

    let mut bumps = Vec::with_capacity(shifts.len());
    for x in &shifts {
        let at = |frac: f64| -> Vec<f64> { x.iter().map(|xi| origin + (xi + frac) * ell).collect() };
        let support = BoxRegion::new(at(0.25), at(0.75));
        let plateau = BoxRegion::new(at(1.0 / 3.0), at(2.0 / 3.0));
        bumps.push(make_bump(spec, &support, Some(&plateau))?);
    }

    let mut cover = Field::zeros(spec);
    for b in &bumps {
        cover = cover.add(&lattice.periodize(&b.field)?)?;
    }
    let min_cover = cover.samples().iter().fold(f64::INFINITY, |m, z| m.min(z.re));
    if min_cover < 1.0 - 1e-12 {
        return Err(Error::Resolution(format!("cover function dips to {min_cover} < 1")));
    }

    let pieces: Vec<Window> = bumps
        .into_iter()
        .map(|b| {
            let field = b.field.zip_div(&cover);
            Window { field, support: b.support, profile: "partition-piece".into() }
        })
        .collect();
    let periodic_pieces = pieces
        .iter()
        .map(|p| lattice.periodize(&p.field))
        .collect::<Result<Vec<_>>>()?;
    let mut master = Field::zeros(spec);
    for p in &pieces {
        master = master.add(&p.field)?;
    }

    let one = Field::constant(spec, Complex64::new(1.0, 0.0));
    let mut sum_chi = Field::zeros(spec);
    for c in &periodic_pieces {
        sum_chi = sum_chi.add(c)?;
    }
    let dev = sum_chi.max_diff(&one).max(lattice.periodize(&master)?.max_diff(&one));
    if dev > 1e-10 {
        return Err(Error::Resolution(format!("partition sums deviate from 1 by {dev:e}")));
    }
    Ok(PartitionOfUnity { lattice, shifts, pieces, periodic_pieces, master, cover })
}

impl Field {
    /// Sample-wise quotient by a nonvanishing field; zeros stay exact zeros.
    fn zip_div(&self, den: &Field) -> Field {
        let samples = self
            .samples()
            .iter()
            .zip(den.samples())
            .map(|(a, b)| if *a == Complex64::new(0.0, 0.0) { *a } else { a / b })
            .collect();
        Field::new(self.spec().clone(), samples).expect("same grid")
    }
}

/// Lattice decomposition ratios of one field.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionRatio {
    /// `(sum_gamma ||(tau_gamma h) u||^2_{H^s})^{1/2} / ||u||_{H^s}`.
    pub master: f64,
    /// Per piece: `(sum_gamma ||(tau_gamma h_i) u||^2)^{1/2} / ||chi_i u||`,
    /// NaN when `chi_i u` vanishes.
    pub pieces: Vec<f64>,
}

fn lattice_energy(u: &Field, window: &Field, shifts: &[Vec<i64>], w: &SobolevWeights) -> Result<f64> {
    let parts: Vec<f64> = shifts
        .par_iter()
        .map(|g| w.norm(&window.cyclic_shift(g).mul(u)?).map(|v| v * v))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

pub fn lattice_decomposition_ratio(u: &Field, part: &PartitionOfUnity, order: &MultiOrder) -> Result<DecompositionRatio> {
    let spec = u.spec();
    let w = SobolevWeights::new(spec, order)?;
    let shifts = part.lattice.shifts(spec)?;
    let master = (lattice_energy(u, &part.master, &shifts, &w)?).sqrt() / w.norm(u)?;
    let mut pieces = Vec::with_capacity(part.pieces.len());
    for (p, chi) in part.pieces.iter().zip(&part.periodic_pieces) {
        let den = w.norm(&chi.mul(u)?)?;
        let num = lattice_energy(u, &p.field, &shifts, &w)?.sqrt();
        pieces.push(if den > 0.0 { num / den } else { f64::NAN });
    }
    Ok(DecompositionRatio { master, pieces })
}

/// Master-bump ratio over an ensemble.
pub fn lattice_decomposition_check(ensemble: &[Field], part: &PartitionOfUnity, order: &MultiOrder) -> Result<EnsembleStats> {
    let spec = part.master.spec();
    let w = SobolevWeights::new(spec, order)?;
    let shifts = part.lattice.shifts(spec)?;
    let ratios = ensemble
        .iter()
        .map(|u| Ok(lattice_energy(u, &part.master, &shifts, &w)?.sqrt() / w.norm(u)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EnsembleStats::from_values(&ratios))
}
