//! Thin 2D wrapper over `rustfft` with a thread-local plan cache.
//!
//! Transforms here are the raw unnormalized DFTs; normalization and the
//! centered-coordinate phase convention live in [`crate::field`].

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Unnormalized DFT along the contiguous (y) axis of a row-major nx x ny array.
fn fft_rows(data: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    let p = plan(ny, forward);
    for ix in 0..nx {
        p.process(&mut data[ix * ny..(ix + 1) * ny]);
    }
}

/// Unnormalized DFT along the strided (x) axis.
fn fft_cols(data: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    let p = plan(nx, forward);
    let mut col = vec![Complex64::default(); nx];
    for iy in 0..ny {
        for ix in 0..nx {
            col[ix] = data[ix * ny + iy];
        }
        p.process(&mut col);
        for ix in 0..nx {
            data[ix * ny + iy] = col[ix];
        }
    }
}

/// In-place unnormalized 2D DFT (forward = negative exponent).
pub fn fft2(data: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    debug_assert_eq!(data.len(), nx * ny);
    fft_rows(data, nx, ny, forward);
    fft_cols(data, nx, ny, forward);
}

/// In-place unnormalized 1D DFT along the chosen axis only.
pub fn fft_axis(data: &mut [Complex64], nx: usize, ny: usize, axis: usize, forward: bool) {
    debug_assert_eq!(data.len(), nx * ny);
    if axis == 0 {
        fft_cols(data, nx, ny, forward);
    } else {
        fft_rows(data, nx, ny, forward);
    }
}
