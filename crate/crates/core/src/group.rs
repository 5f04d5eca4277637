//! The unitary group W(t) of the linearized ZK equation, realized as the
//! spectral multiplier exp(i t (xi^3 + xi eta^2)).

use crate::error::Result;
use crate::field::{forward, inverse, Field, Repr};
use crate::grid::GridSpec;
use num_complex::Complex64;

/// Dispersion phase phi(xi, eta) = xi^3 + xi*eta^2. Odd under
/// (xi, eta) -> (-xi, -eta), which is what makes W(t) reality-preserving.
pub fn phase(xi: f64, eta: f64) -> f64 {
    xi * (xi * xi + eta * eta)
}

/// The unit-modulus multiplier e^{i t phi(xi, eta)}.
pub fn symbol(xi: f64, eta: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t * phase(xi, eta))
}

/// Multiply a spectral field by e^{i t phi} in place. The Nyquist slot of the
/// xi axis is treated as zero frequency inside the odd symbol.
pub fn apply_symbol(f: &mut Field, t: f64) {
    debug_assert_eq!(f.repr, Repr::Spectral);
    let grid = f.grid.clone();
    f.apply_multiplier(|ix, iy| symbol(grid.xi_odd(ix), grid.eta_odd(iy), t));
}

/// W(t)u: exact propagation of the linear part. Accepts either representation
/// and returns the same representation it was given.
pub fn propagate(u: &Field, t: f64) -> Result<Field> {
    u.assert_finite("propagate input")?;
    match u.repr {
        Repr::Spectral => {
            let mut out = u.clone();
            apply_symbol(&mut out, t);
            Ok(out)
        }
        Repr::Physical => {
            let mut hat = forward(u)?;
            apply_symbol(&mut hat, t);
            inverse(&hat)
        }
    }
}

/// Table of e^{i t phi} over the grid (optional cache for repeated use at one t).
pub fn symbol_table(grid: &GridSpec, t: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx {
        let xi = grid.xi_odd(ix);
        for iy in 0..grid.ny {
            out.push(symbol(xi, grid.eta_odd(iy), t));
        }
    }
    out
}
