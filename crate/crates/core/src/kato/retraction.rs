//! The coretraction `S u = ((tau_k chi_Z) u)_k` into sequences of localized
//! pieces and the retraction `R_chi (f_k) = sum_k (tau_k chi) f_k`.

use num_complex::Complex64;

use super::{AmalgamNormSpec, Exponent, TranslationScheme};
use crate::error::{Error, Result};
use crate::grid::{make_bump, BoxRegion, Field, GridSpec};
use crate::report::{CheckReport, Verdict};
use crate::sobolev::{build_partition, Lattice, SobolevWeights};
use crate::weights::MultiOrder;

#[derive(Debug, Clone)]
pub struct Retraction {
    lattice: Lattice,
    shifts: Vec<Vec<i64>>,
    chi_z: Field,
    chi: Field,
}

impl Retraction {
    /// `chi_Z` is the partition master bump; `chi` is a bump equal to 1 on
    /// `o + [-l/6, 7l/6]^n`, which contains `supp chi_Z`.
    pub fn new(spec: &GridSpec, lattice: Lattice) -> Result<Self> {
        let part = build_partition(spec, lattice)?;
        let ell = lattice.spacing(spec);
        let o = 0.5 * ell;
        let dim = spec.dim();
        let support = BoxRegion::cube(dim, o - ell / 4.0, o + 5.0 * ell / 4.0);
        let plateau = BoxRegion::cube(dim, o - ell / 6.0, o + 7.0 * ell / 6.0);
        let chi = make_bump(spec, &support, Some(&plateau))?.field;
        Self::from_windows(lattice, part.master, chi)
    }

    pub fn from_windows(lattice: Lattice, chi_z: Field, chi: Field) -> Result<Self> {
        let spec = chi_z.spec();
        spec.check_same(chi.spec())?;
        let shifts = lattice.shifts(spec)?;
        let one = Field::constant(spec, Complex64::new(1.0, 0.0));
        let dev = lattice.periodize(&chi_z)?.max_diff(&one);
        if dev > 1e-10 {
            return Err(Error::Hypothesis(format!("lattice translates of chi_Z sum to 1 only within {dev:e}")));
        }
        let bad = chi_z
            .samples()
            .iter()
            .zip(chi.samples())
            .filter(|(z, c)| z.norm() > 0.0 && (*c - 1.0).norm() > 1e-14)
            .count();
        if bad > 0 {
            return Err(Error::Hypothesis(format!("chi differs from 1 at {bad} samples of supp chi_Z")));
        }
        Ok(Retraction { lattice, shifts, chi_z, chi })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn chi_z(&self) -> &Field {
        &self.chi_z
    }

    pub fn chi(&self) -> &Field {
        &self.chi
    }

    pub fn coretract(&self, u: &Field) -> Result<Vec<Field>> {
        self.shifts.iter().map(|s| self.chi_z.cyclic_shift(s).mul(u)).collect()
    }

    pub fn retract(&self, pieces: &[Field]) -> Result<Field> {
        if pieces.len() != self.shifts.len() {
            return Err(Error::ShapeMismatch(format!("{} pieces for {} lattice points", pieces.len(), self.shifts.len())));
        }
        let mut acc = Field::zeros(self.chi.spec());
        for (s, f) in self.shifts.iter().zip(pieces) {
            acc = acc.add(&self.chi.cyclic_shift(s).mul(f)?)?;
        }
        Ok(acc)
    }
}

/// `R_chi S u = u`, plus the `l^p(H^s)` size of `S u` relative to
/// `||u||_{s,p,Gamma,chi}` and back.
pub fn retraction_roundtrip(u: &Field, r: &Retraction, order: &MultiOrder, p: Exponent) -> Result<CheckReport> {
    let pieces = r.coretract(u)?;
    let back = r.retract(&pieces)?;
    let err = back.max_diff(u);
    let scale = u.sup_norm().max(f64::MIN_POSITIVE);
    let w = SobolevWeights::new(u.spec(), order)?;
    let seq: Vec<f64> = pieces.iter().map(|f| w.norm(f)).collect::<Result<_>>()?;
    let seq_norm = p.aggregate(&seq, 1.0);
    let k = AmalgamNormSpec::new(order.clone(), p, r.chi.clone(), TranslationScheme::Lattice(r.lattice))?;
    let k_norm = k.aggregate(&k.terms(u)?);
    let back_norm = k.aggregate(&k.terms(&back)?);
    Ok(CheckReport::new("retraction-roundtrip", "R_chi S = Id")
        .value("max_error", err)
        .value("relative_error", err / scale)
        .value("coretraction_ratio", seq_norm / k_norm)
        .value("retraction_ratio", back_norm / seq_norm)
        .verdict(Verdict::from_bool(err <= 1e-10 * scale.max(1.0))))
}
