//! Shared helpers for the integration tests: independent oracles and random
//! data generators.

#![allow(dead_code)]

use gzk_core::field::{Field, Repr};
use gzk_core::grid::GridSpec;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_field(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Field {
    let mut f = Field::zeros(grid, Repr::Physical);
    for v in &mut f.data {
        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    f
}

pub fn random_real_field(grid: &GridSpec, rng: &mut ChaCha8Rng) -> Field {
    let mut f = Field::zeros(grid, Repr::Physical);
    for v in &mut f.data {
        *v = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    }
    f
}

/// Smooth band-limited random real field: a few low modes with random
/// amplitudes (safe for quadrature comparisons).
pub fn random_band_limited(grid: &GridSpec, max_mode: i64, rng: &mut ChaCha8Rng) -> Field {
    let mut modes = Vec::new();
    for jx in -max_mode..=max_mode {
        for jy in -max_mode..=max_mode {
            modes.push((jx, jy, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)));
        }
    }
    Field::from_real_fn(grid, |x, y| {
        modes
            .iter()
            .map(|&(jx, jy, a, ph)| {
                let xi = 2.0 * std::f64::consts::PI * jx as f64 / grid.lx;
                let eta = 2.0 * std::f64::consts::PI * jy as f64 / grid.ly;
                a * (xi * x + eta * y + ph).cos()
            })
            .sum()
    })
}

pub fn rel_l2(a: &Field, b: &Field) -> f64 {
    let d = a.sub(b);
    let denom = b.l2();
    if denom == 0.0 {
        d.l2()
    } else {
        d.l2() / denom
    }
}

pub fn max_abs_diff(a: &Field, b: &Field) -> f64 {
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Naive O(N^4) double-sum DFT with the same normalization and centered
/// conventions as the fast transform: the independent transform oracle.
pub fn naive_forward(f: &Field) -> Field {
    assert_eq!(f.repr, Repr::Physical);
    let g = &f.grid;
    let mut out = Field::zeros(g, Repr::Spectral);
    for kx in 0..g.nx {
        let xi = g.xi(kx);
        for ky in 0..g.ny {
            let eta = g.eta(ky);
            let mut acc = Complex64::default();
            for ix in 0..g.nx {
                let x = g.x(ix);
                for iy in 0..g.ny {
                    let y = g.y(iy);
                    acc += f.data[ix * g.ny + iy] * Complex64::from_polar(1.0, -(xi * x + eta * y));
                }
            }
            out.data[kx * g.ny + ky] = acc / (g.nx * g.ny) as f64;
        }
    }
    out
}

/// Fit the slope of log(y) against log(x) by least squares.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
