//! Multi-dimensional FFT on the row-major sample layout.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::GridSpec;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

/// Unnormalized forward transform, kernel `e^{-i...}`.
pub(crate) fn forward(spec: &GridSpec, data: &mut [Complex64]) {
    transform(spec, data, FftDirection::Forward);
}

/// Unnormalized inverse transform, kernel `e^{+i...}`.
pub(crate) fn inverse(spec: &GridSpec, data: &mut [Complex64]) {
    transform(spec, data, FftDirection::Inverse);
}

fn transform(spec: &GridSpec, data: &mut [Complex64], dir: FftDirection) {
    let n = spec.samples();
    let dim = spec.dim();
    let fft = plan(n, dir);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let outer = data.len() / (n * stride);
        // gather every line along `axis` into contiguous storage
        let mut line = 0;
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for j in 0..n {
                    lines[line * n + j] = data[base + j * stride];
                }
                line += 1;
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut line = 0;
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for j in 0..n {
                    data[base + j * stride] = lines[line * n + j];
                }
                line += 1;
            }
        }
    }
}
