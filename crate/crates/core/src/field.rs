use crate::error::{GzkError, Result};
use crate::fft;
use crate::grid::GridSpec;
use num_complex::Complex64;
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Physical,
    Spectral,
}

impl Repr {
    pub fn name(self) -> &'static str {
        match self {
            Repr::Physical => "physical",
            Repr::Spectral => "spectral",
        }
    }
}

/// A complex-valued function sampled on the grid, in either physical or
/// spectral representation.
///
/// Conventions (fixed once, because Plancherel constants enter every norm):
/// the forward transform carries the 1/(nx*ny) factor and the inverse none,
/// and the (-1)^(jx+jy) phase attached to both directions makes the
/// coefficients true Fourier-series coefficients with respect to the
/// box-centered coordinates. Under this normalization
/// `sqrt(dA * sum |f|^2) = sqrt(lx*ly * sum |fhat|^2)`.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: GridSpec,
    pub repr: Repr,
    pub data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &GridSpec, repr: Repr) -> Field {
        Field {
            grid: grid.clone(),
            repr,
            data: vec![Complex64::default(); grid.len()],
        }
    }

    /// Sample a physical-space function on the grid.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Field {
        let mut data = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for iy in 0..grid.ny {
                data.push(f(x, grid.y(iy)));
            }
        }
        Field {
            grid: grid.clone(),
            repr: Repr::Physical,
            data,
        }
    }

    pub fn from_real_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Field {
        Field::from_fn(grid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    /// Centered (or shifted) Gaussian `amp * exp(-((x-cx)^2+(y-cy)^2)/(2 sigma^2))`.
    pub fn gaussian(grid: &GridSpec, sigma: f64, amp: f64, center: (f64, f64)) -> Field {
        Field::from_real_fn(grid, |x, y| {
            let dx = x - center.0;
            let dy = y - center.1;
            amp * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
        })
    }

    pub fn expect_repr(&self, want: Repr) -> Result<()> {
        if self.repr != want {
            return Err(GzkError::Representation {
                expected: want.name(),
                got: self.repr.name(),
            });
        }
        Ok(())
    }

    pub fn assert_finite(&self, ctx: &'static str) -> Result<()> {
        if self.data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GzkError::NonFinite(ctx));
        }
        Ok(())
    }

    fn phase_sign(i: usize, n: usize) -> f64 {
        // (-1)^j for the signed mode/sample index; parity of the slot index
        // equals the parity of the signed index.
        let _ = n;
        if i % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn apply_checkerboard(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for ix in 0..nx {
            let sx = Self::phase_sign(ix, nx);
            for iy in 0..ny {
                self.data[ix * ny + iy] *= sx * Self::phase_sign(iy, ny);
            }
        }
    }

    pub fn l2(&self) -> f64 {
        let s: f64 = self.data.iter().map(|c| c.norm_sqr()).sum();
        let factor = match self.repr {
            Repr::Physical => self.grid.da(),
            Repr::Spectral => self.grid.lx * self.grid.ly,
        };
        (s * factor).sqrt()
    }

    pub fn scale(&mut self, a: Complex64) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    pub fn scaled(&self, a: Complex64) -> Field {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn add_scaled(&mut self, a: Complex64, other: &Field) {
        assert_eq!(self.repr, other.repr);
        assert_eq!(self.grid, other.grid);
        for (v, w) in self.data.iter_mut().zip(&other.data) {
            *v += a * w;
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// Apply a spectral multiplier `m(ix, iy)`; field must be spectral.
    pub fn apply_multiplier(&mut self, mut m: impl FnMut(usize, usize) -> Complex64) {
        debug_assert_eq!(self.repr, Repr::Spectral);
        let ny = self.grid.ny;
        for ix in 0..self.grid.nx {
            for iy in 0..ny {
                self.data[ix * ny + iy] *= m(ix, iy);
            }
        }
    }

    /// Pointwise multiply by a physical-space function; field must be physical.
    pub fn apply_weight(&mut self, mut w: impl FnMut(f64, f64) -> f64) {
        debug_assert_eq!(self.repr, Repr::Physical);
        let ny = self.grid.ny;
        for ix in 0..self.grid.nx {
            let x = self.grid.x(ix);
            for iy in 0..ny {
                self.data[ix * ny + iy] *= w(x, self.grid.y(iy));
            }
        }
    }

    /// Enforce the Hermitian symmetry of a spectral field whose physical
    /// counterpart is real: c(-k) = conj(c(k)).
    pub fn hermitian_symmetrize(&mut self) {
        debug_assert_eq!(self.repr, Repr::Spectral);
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for ix in 0..nx {
            let jx = (nx - ix) % nx;
            for iy in 0..ny {
                let jy = (ny - iy) % ny;
                if (ix, iy) <= (jx, jy) {
                    let a = self.data[ix * ny + iy];
                    let b = self.data[jx * ny + jy].conj();
                    let avg = 0.5 * (a + b);
                    self.data[ix * ny + iy] = avg;
                    self.data[jx * ny + jy] = avg.conj();
                }
            }
        }
    }

    /// Drop the imaginary part of a physical field (round-off cleanup for
    /// real-valued solutions).
    pub fn take_real(&mut self) {
        debug_assert_eq!(self.repr, Repr::Physical);
        for v in &mut self.data {
            v.im = 0.0;
        }
    }

    /// Fraction of the discrete L2 mass lying in the outer 10% shell of the box.
    pub fn boundary_tail_fraction(&self) -> f64 {
        debug_assert_eq!(self.repr, Repr::Physical);
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (x_lim, y_lim) = (0.9 * self.grid.lx / 2.0, 0.9 * self.grid.ly / 2.0);
        let mut shell = 0.0;
        let mut total = 0.0;
        for ix in 0..nx {
            let x = self.grid.x(ix);
            for iy in 0..ny {
                let m = self.data[ix * ny + iy].norm_sqr();
                total += m;
                if x.abs() >= x_lim || self.grid.y(iy).abs() >= y_lim {
                    shell += m;
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }

    pub const TAIL_LIMIT: f64 = 1e-6;

    pub fn check_boundary_tail(&self) -> Result<()> {
        let fraction = self.boundary_tail_fraction();
        if fraction > Self::TAIL_LIMIT {
            return Err(GzkError::TailViolation {
                fraction,
                limit: Self::TAIL_LIMIT,
            });
        }
        Ok(())
    }
}

/// Forward transform: physical samples to centered Fourier-series coefficients.
pub fn forward(f: &Field) -> Result<Field> {
    f.expect_repr(Repr::Physical)?;
    let mut out = f.clone();
    fft::fft2(&mut out.data, out.grid.nx, out.grid.ny, true);
    let norm = 1.0 / (out.grid.nx * out.grid.ny) as f64;
    out.scale(Complex64::new(norm, 0.0));
    out.apply_checkerboard();
    out.repr = Repr::Spectral;
    Ok(out)
}

/// Inverse transform: coefficients back to physical samples. Exact inverse of
/// [`forward`] up to round-off.
pub fn inverse(f: &Field) -> Result<Field> {
    f.expect_repr(Repr::Spectral)?;
    let mut out = f.clone();
    out.apply_checkerboard();
    fft::fft2(&mut out.data, out.grid.nx, out.grid.ny, false);
    out.repr = Repr::Physical;
    Ok(out)
}

/// Convenience: return the spectral representation whatever the input tag.
pub fn to_spectral(f: &Field) -> Result<Field> {
    match f.repr {
        Repr::Spectral => Ok(f.clone()),
        Repr::Physical => forward(f),
    }
}

pub fn to_physical(f: &Field) -> Result<Field> {
    match f.repr {
        Repr::Physical => Ok(f.clone()),
        Repr::Spectral => inverse(f),
    }
}

/// Zero all modes with |j| >= n/(p+1) on either axis: the generalized 2/3
/// rule for products of degree `p` (p = k+1 for the gZK nonlinearity).
pub fn dealias(f: &Field, product_degree: u32) -> Result<Field> {
    f.expect_repr(Repr::Spectral)?;
    if product_degree < 2 {
        return Err(GzkError::Validation(format!(
            "dealias product degree must be >= 2 (got {product_degree})"
        )));
    }
    let mut out = f.clone();
    let (nx, ny) = (out.grid.nx, out.grid.ny);
    let cut_x = nx as i64 / (product_degree as i64 + 1);
    let cut_y = ny as i64 / (product_degree as i64 + 1);
    for ix in 0..nx {
        let jx = GridSpec::mode_index(ix, nx).abs();
        for iy in 0..ny {
            let jy = GridSpec::mode_index(iy, ny).abs();
            if jx >= cut_x || jy >= cut_y {
                out.data[ix * ny + iy] = Complex64::default();
            }
        }
    }
    Ok(out)
}

const MAGIC: &[u8; 8] = b"GZKF0001";

impl Field {
    /// Serialize in the stable binary record format:
    /// magic "GZKF0001", u64 nx, u64 ny, f64 lx, f64 ly, u8 repr tag
    /// (0 physical / 1 spectral), then nx*ny (re, im) f64 pairs row-major,
    /// all little-endian.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.grid.nx as u64).to_le_bytes())?;
        w.write_all(&(self.grid.ny as u64).to_le_bytes())?;
        w.write_all(&self.grid.lx.to_le_bytes())?;
        w.write_all(&self.grid.ly.to_le_bytes())?;
        w.write_all(&[match self.repr {
            Repr::Physical => 0u8,
            Repr::Spectral => 1u8,
        }])?;
        for c in &self.data {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Field> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(GzkError::Serde("bad field magic".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let nx = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let ny = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let lx = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let ly = f64::from_le_bytes(b8);
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let repr = match tag[0] {
            0 => Repr::Physical,
            1 => Repr::Spectral,
            t => return Err(GzkError::Serde(format!("bad repr tag {t}"))),
        };
        let grid = crate::grid::make_grid(nx, ny, lx, ly)?;
        let mut data = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            data.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        Ok(Field { grid, repr, data })
    }
}
