//! Scaled mollifiers `phi_eps = eps^{-n} phi(./eps)` and spectral convolution.

use num_complex::Complex64;

use super::{Field, GridSpec};
use crate::error::{Error, Result};

/// Minimum number of samples across the support of `phi_eps`.
const MIN_SAMPLES_ACROSS: f64 = 8.0;

/// Radial bump `exp(-1/(1 - r^2))` on the unit ball, scaled by `eps` and
/// renormalized to unit discrete mass. Centered at the origin of the torus.
#[derive(Debug, Clone)]
pub struct Mollifier {
    epsilon: f64,
    kernel: Field,
}

impl Mollifier {
    pub fn new(spec: &GridSpec, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        let across = 2.0 * epsilon / spec.spacing();
        if across < MIN_SAMPLES_ACROSS {
            return Err(Error::Resolution(format!(
                "mollifier with eps = {epsilon} spans {across:.2} samples, need at least {MIN_SAMPLES_ACROSS}"
            )));
        }
        if 2.0 * epsilon >= spec.period() {
            return Err(Error::Resolution(format!(
                "mollifier with eps = {epsilon} does not fit in a cell of period {}",
                spec.period()
            )));
        }
        let period = spec.period();
        let mut kernel = Field::from_real_fn(spec, |x| {
            let r2: f64 = x
                .iter()
                .map(|&xi| {
                    let d = xi - period * (xi / period).round();
                    (d / epsilon).powi(2)
                })
                .sum();
            if r2 < 1.0 {
                (-1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        });
        let mass: f64 = kernel.samples().iter().map(|z| z.re).sum::<f64>() * spec.cell_volume();
        for z in kernel.samples_mut() {
            *z /= mass;
        }
        Ok(Mollifier { epsilon, kernel })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kernel(&self) -> &Field {
        &self.kernel
    }

    /// `phi_eps^(xi_k) = L^n c_k(phi_eps)`, in FFT order.
    pub fn symbol(&self) -> Vec<Complex64> {
        let spec = self.kernel.spec();
        let vol = spec.volume();
        self.kernel.to_spectrum().coeffs().iter().map(|c| c * vol).collect()
    }
}

/// Circular convolution `phi_eps * u`.
pub fn mollify(u: &Field, phi: &Mollifier) -> Result<Field> {
    u.spec().check_same(phi.kernel.spec())?;
    let mut s = u.to_spectrum();
    s.apply(&phi.symbol());
    Ok(s.to_field())
}
