use crate::error::{GzkError, Result};
use serde::{Deserialize, Serialize};

/// Periodic box geometry and spectral mode layout.
///
/// Physical coordinates are box-centered, `x in [-lx/2, lx/2)`, so the
/// anisotropic weights `|x|^{r1}`, `|y|^{r2}` attain their minimum where the
/// data is concentrated. Frequencies are stored in FFT order
/// (`0, 1, ..., n/2-1, -n/2, ..., -1` scaled by `2*pi/l`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Area element of the physical quadrature.
    pub fn da(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, ix: usize) -> f64 {
        -self.lx / 2.0 + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        -self.ly / 2.0 + iy as f64 * self.dy()
    }

    /// Signed integer mode index for FFT-ordered slot `i` of an axis of size `n`.
    pub fn mode_index(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Frequency xi_j = 2*pi*j/lx at FFT-ordered slot `ix`.
    pub fn xi(&self, ix: usize) -> f64 {
        2.0 * std::f64::consts::PI * Self::mode_index(ix, self.nx) as f64 / self.lx
    }

    /// Frequency eta_j = 2*pi*j/ly at FFT-ordered slot `iy`.
    pub fn eta(&self, iy: usize) -> f64 {
        2.0 * std::f64::consts::PI * Self::mode_index(iy, self.ny) as f64 / self.ly
    }

    /// `xi` with the Nyquist slot replaced by zero, for use inside odd-order
    /// multipliers (xi^3, xi): the Nyquist mode has no well-defined sign on an
    /// even grid.
    pub fn xi_odd(&self, ix: usize) -> f64 {
        if ix == self.nx / 2 {
            0.0
        } else {
            self.xi(ix)
        }
    }

    pub fn eta_odd(&self, iy: usize) -> f64 {
        if iy == self.ny / 2 {
            0.0
        } else {
            self.eta(iy)
        }
    }

    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lx
    }

    pub fn deta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Construct a grid, validating the size and box constraints.
pub fn make_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<GridSpec> {
    if nx < 8 || ny < 8 || !power_of_two(nx) || !power_of_two(ny) {
        return Err(GzkError::Grid(format!(
            "nx, ny must be powers of two >= 8 (got {nx}, {ny})"
        )));
    }
    if !(lx > 0.0) || !(ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
        return Err(GzkError::Grid(format!(
            "lx, ly must be positive finite (got {lx}, {ly})"
        )));
    }
    Ok(GridSpec { nx, ny, lx, ly })
}
