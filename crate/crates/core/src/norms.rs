//! Norm functionals: H^s, anisotropic weighted L2, the Z-space norm, nested
//! mixed space-time norms, and the mu_{1,k} / mu_{2,k} families.

use crate::error::{GzkError, Result};
use crate::field::{inverse, to_physical, to_spectral, Field};
use crate::fracops::WeightParams;
use crate::grid::GridSpec;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

/// Named norm values plus run metadata, the common output record of the
/// verification operations and experiments.
#[derive(Debug, Clone, Default, Serialize)]
pub struct NormReport {
    pub values: BTreeMap<String, f64>,
    pub metadata: BTreeMap<String, String>,
}

impl NormReport {
    pub fn set(&mut self, name: &str, value: f64) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    /// Flat text form: one `name = value` pair per line, metadata prefixed
    /// with `#`. Deterministic ordering (sorted keys).
    pub fn write_text(&self, w: &mut impl Write) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        for (k, v) in &self.values {
            writeln!(w, "{k} = {v:.12e}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| GzkError::Serde(e.to_string()))
    }
}

/// A uniformly sampled solution path: fields u(t_m) on a shared grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<Field>) -> Result<Trajectory> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(GzkError::Validation(
                "trajectory needs equally many (>=1) times and fields".into(),
            ));
        }
        let grid = fields[0].grid.clone();
        for f in &fields {
            if f.grid != grid {
                return Err(GzkError::Validation(
                    "all trajectory fields must share one grid".into(),
                ));
            }
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            if dt <= 0.0 {
                return Err(GzkError::Validation("times must be increasing".into()));
            }
            for m in 1..times.len() {
                let step = times[m] - times[m - 1];
                if (step - dt).abs() > 1e-9 * dt.max(1.0) {
                    return Err(GzkError::Validation(
                        "trajectory time samples must be uniformly spaced".into(),
                    ));
                }
            }
        }
        Ok(Trajectory { times, fields })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.fields[0].grid
    }

    pub fn scaled(&self, a: Complex64) -> Trajectory {
        Trajectory {
            times: self.times.clone(),
            fields: self.fields.iter().map(|f| f.scaled(a)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Inf,
}

impl Exponent {
    fn validate(self) -> Result<()> {
        match self {
            Exponent::Finite(p) if p >= 1.0 && p.is_finite() => Ok(()),
            Exponent::Inf => Ok(()),
            Exponent::Finite(p) => Err(GzkError::Validation(format!(
                "mixed-norm exponent must be in [1, inf] (got {p})"
            ))),
        }
    }
}

/// A group of axes measured jointly at one nesting level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSet {
    T,
    X,
    Y,
    XY,
    YT,
    XT,
    XYT,
}

impl AxisSet {
    fn mask(self) -> [bool; 3] {
        // [T, X, Y]
        match self {
            AxisSet::T => [true, false, false],
            AxisSet::X => [false, true, false],
            AxisSet::Y => [false, false, true],
            AxisSet::XY => [false, true, true],
            AxisSet::YT => [true, false, true],
            AxisSet::XT => [true, true, false],
            AxisSet::XYT => [true, true, true],
        }
    }
}

/// Operator applied to each time slice before the norm is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerOp {
    Identity,
    /// d/dx
    Dx,
    /// D_x^s d/dx
    DxsDx(f64),
    /// D_y^s d/dx
    DysDx(f64),
}

/// A nested space-time norm `L^{e0}_{g0} L^{e1}_{g1} ...` written from the
/// outermost level inwards; the groups must partition {T, x, y}.
#[derive(Debug, Clone)]
pub struct MixedNormSpec {
    pub levels: Vec<(AxisSet, Exponent)>,
    pub inner_op: InnerOp,
}

impl MixedNormSpec {
    pub fn new(levels: Vec<(AxisSet, Exponent)>) -> MixedNormSpec {
        MixedNormSpec {
            levels,
            inner_op: InnerOp::Identity,
        }
    }

    pub fn with_op(mut self, op: InnerOp) -> MixedNormSpec {
        self.inner_op = op;
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = [false; 3];
        for (set, e) in &self.levels {
            e.validate()?;
            for (i, used) in set.mask().iter().enumerate() {
                if *used {
                    if seen[i] {
                        return Err(GzkError::Validation(
                            "mixed-norm axis groups must not overlap".into(),
                        ));
                    }
                    seen[i] = true;
                }
            }
        }
        if seen != [true; 3] {
            return Err(GzkError::Validation(
                "mixed-norm levels must cover all of T, x, y".into(),
            ));
        }
        Ok(())
    }
}

fn apply_inner_op(f: &Field, op: InnerOp) -> Result<Field> {
    match op {
        InnerOp::Identity => to_physical(f),
        _ => {
            let mut hat = to_spectral(f)?;
            let grid = hat.grid.clone();
            hat.apply_multiplier(|ix, iy| {
                let xi_odd = grid.xi_odd(ix);
                let dx = Complex64::new(0.0, xi_odd);
                match op {
                    InnerOp::Dx => dx,
                    InnerOp::DxsDx(s) => dx * grid.xi(ix).abs().powf(s),
                    InnerOp::DysDx(s) => dx * grid.eta(iy).abs().powf(s),
                    InnerOp::Identity => unreachable!(),
                }
            });
            inverse(&hat)
        }
    }
}

/// Nested discrete mixed norm, evaluated in exactly the given nesting order.
///
/// Finite temporal exponents use the left-endpoint Riemann sum on the uniform
/// time grid (the last sample carries no weight); the essential supremum is
/// taken over all samples. Spatial integrals are the plain grid quadrature.
pub fn mixed_norm(traj: &Trajectory, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    if traj.is_empty() {
        return Err(GzkError::Validation("empty trajectory".into()));
    }
    let nt = traj.len();
    let grid = traj.grid().clone();
    let (nx, ny) = (grid.nx, grid.ny);

    let needs_dt = spec
        .levels
        .iter()
        .any(|(s, e)| s.mask()[0] && matches!(e, Exponent::Finite(_)));
    if needs_dt && nt < 2 {
        return Err(GzkError::Validation(
            "finite temporal exponent requires at least 2 time samples".into(),
        ));
    }

    // |inner_op u| cube, index order [t][x][y]
    let mut cube = Vec::with_capacity(nt * nx * ny);
    for f in &traj.fields {
        let g = apply_inner_op(f, spec.inner_op)?;
        cube.extend(g.data.iter().map(|c| c.norm()));
    }

    // axis sample weights for finite exponents
    let dt = traj.dt();
    let wt: Vec<f64> = (0..nt)
        .map(|it| if it + 1 < nt { dt } else { 0.0 })
        .collect();
    let weights: [Vec<f64>; 3] = [wt, vec![grid.dx(); nx], vec![grid.dy(); ny]];

    // fold levels from the innermost outwards
    let dims = [nt, nx, ny];
    let mut present = [true; 3];
    let mut data = cube;
    for (set, exp) in spec.levels.iter().rev() {
        let mask = set.mask();
        let keep: Vec<usize> = (0..3).filter(|&a| present[a] && !mask[a]).collect();
        let drop: Vec<usize> = (0..3).filter(|&a| present[a] && mask[a]).collect();
        let keep_len: usize = keep.iter().map(|&a| dims[a]).product();
        let drop_len: usize = drop.iter().map(|&a| dims[a]).product();
        // strides of the current packed layout (order T, X, Y among present axes)
        let axes: Vec<usize> = (0..3).filter(|&a| present[a]).collect();
        let mut strides = [0usize; 3];
        let mut acc = 1;
        for &a in axes.iter().rev() {
            strides[a] = acc;
            acc *= dims[a];
        }
        let mut out = vec![0.0f64; keep_len];
        let mut kidx = vec![0usize; keep.len()];
        for slot in out.iter_mut() {
            let base: usize = keep.iter().zip(&kidx).map(|(&a, &i)| strides[a] * i).sum();
            let mut didx = vec![0usize; drop.len()];
            let mut agg = match exp {
                Exponent::Finite(_) => 0.0f64,
                Exponent::Inf => f64::NEG_INFINITY,
            };
            for _ in 0..drop_len {
                let off: usize = drop.iter().zip(&didx).map(|(&a, &i)| strides[a] * i).sum();
                let v = data[base + off];
                match exp {
                    Exponent::Finite(p) => {
                        let w: f64 = drop.iter().zip(&didx).map(|(&a, &i)| weights[a][i]).product();
                        agg += w * v.powf(*p);
                    }
                    Exponent::Inf => agg = agg.max(v),
                }
                // advance drop multi-index
                for d in (0..drop.len()).rev() {
                    didx[d] += 1;
                    if didx[d] < dims[drop[d]] {
                        break;
                    }
                    didx[d] = 0;
                }
            }
            *slot = match exp {
                Exponent::Finite(p) => agg.powf(1.0 / *p),
                Exponent::Inf => {
                    if agg == f64::NEG_INFINITY {
                        0.0
                    } else {
                        agg
                    }
                }
            };
            for d in (0..keep.len()).rev() {
                kidx[d] += 1;
                if kidx[d] < dims[keep[d]] {
                    break;
                }
                kidx[d] = 0;
            }
        }
        for a in 0..3 {
            if mask[a] {
                present[a] = false;
            }
        }
        data = out;
    }
    debug_assert_eq!(data.len(), 1);
    Ok(data[0])
}

/// Equivalent-norm form of H^s used throughout the estimates:
/// `||u||_2 + ||D_x^s u||_2 + ||D_y^s u||_2`.
///
/// Note s = 0 therefore returns 3*||u||_2, not ||u||_2.
pub fn hs_norm(u: &Field, s: f64) -> Result<f64> {
    let hat = to_spectral(u)?;
    let grid = hat.grid.clone();
    let mut plain = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for ix in 0..grid.nx {
        let mx = grid.xi(ix).abs().powf(s);
        for iy in 0..grid.ny {
            let m = hat.data[ix * grid.ny + iy].norm_sqr();
            plain += m;
            dx += mx * mx * m;
            let my = grid.eta(iy).abs().powf(s);
            dy += my * my * m;
        }
    }
    let a = grid.lx * grid.ly;
    Ok((plain * a).sqrt() + (dx * a).sqrt() + (dy * a).sqrt())
}

/// Bessel-potential form `||(1+xi^2+eta^2)^{s/2} uhat||_2`, provided as a
/// cross-check on the three-term form (equivalent up to fixed constants).
pub fn bessel_hs_norm(u: &Field, s: f64) -> Result<f64> {
    let hat = to_spectral(u)?;
    let grid = hat.grid.clone();
    let mut acc = 0.0;
    for ix in 0..grid.nx {
        let xi2 = grid.xi(ix).powi(2);
        for iy in 0..grid.ny {
            let m = (1.0 + xi2 + grid.eta(iy).powi(2)).powf(s);
            acc += m * hat.data[ix * grid.ny + iy].norm_sqr();
        }
    }
    Ok((acc * grid.lx * grid.ly).sqrt())
}

/// `( integral (|x|^{2 r1} + |y|^{2 r2}) |u|^2 )^{1/2}` by grid quadrature.
pub fn weighted_l2(u: &Field, r1: f64, r2: f64) -> Result<f64> {
    let f = to_physical(u)?;
    f.check_boundary_tail()?;
    let grid = f.grid.clone();
    let mut acc = 0.0;
    for ix in 0..grid.nx {
        let wx = grid.x(ix).abs().powf(2.0 * r1);
        for iy in 0..grid.ny {
            let w = wx + grid.y(iy).abs().powf(2.0 * r2);
            acc += w * f.data[ix * grid.ny + iy].norm_sqr();
        }
    }
    Ok((acc * grid.da()).sqrt())
}

/// `|| (|x|^{r1} + |y|^{r2}) u ||_2`, the sum-form weight used by mu_{2,k}.
pub fn weighted_l2_sum_form(u: &Field, r1: f64, r2: f64) -> Result<f64> {
    let f = to_physical(u)?;
    f.check_boundary_tail()?;
    let grid = f.grid.clone();
    let mut acc = 0.0;
    for ix in 0..grid.nx {
        let wx = grid.x(ix).abs().powf(r1);
        for iy in 0..grid.ny {
            let w = wx + grid.y(iy).abs().powf(r2);
            acc += w * w * f.data[ix * grid.ny + iy].norm_sqr();
        }
    }
    Ok((acc * grid.da()).sqrt())
}

/// The Z_{s,(r1,r2)} norm: H^s plus the anisotropic weighted L2 norm.
pub fn z_norm(u: &Field, w: &WeightParams) -> Result<f64> {
    Ok(hs_norm(u, w.s)? + weighted_l2(u, w.r1, w.r2)?)
}

/// Configuration knobs the mu_{1,k} families leave open.
#[derive(Debug, Clone, Copy)]
pub struct MuOptions {
    /// Contraction exponent of the 3 <= k <= 7 family, in (0, 1/12).
    pub gamma: f64,
    /// Realization of the `+` in the L_T^{3k/2 +} exponent of the k >= 8 family.
    pub epsilon: f64,
}

impl Default for MuOptions {
    fn default() -> Self {
        MuOptions {
            gamma: 1.0 / 24.0,
            epsilon: 0.1,
        }
    }
}

fn sup_t(traj: &Trajectory, mut f: impl FnMut(&Field) -> Result<f64>) -> Result<f64> {
    let mut best = 0.0f64;
    for u in &traj.fields {
        best = best.max(f(u)?);
    }
    Ok(best)
}

/// The k-dependent contraction norm mu_{1,k}^T: a sum of mixed space-time
/// norms of u and its derivatives, selected by w.k.
pub fn mu1(traj: &Trajectory, w: &WeightParams, opt: &MuOptions) -> Result<f64> {
    w.validate()?;
    use AxisSet::*;
    use Exponent::*;
    let s = w.s;
    let smoothing = |op| MixedNormSpec::new(vec![(X, Inf), (YT, Finite(2.0))]).with_op(op);
    // shared leading terms: L_T^inf H^s + the two smoothing norms
    let mut total = sup_t(traj, |u| hs_norm(u, s))?;
    total += mixed_norm(traj, &smoothing(InnerOp::DxsDx(s)))?;
    total += mixed_norm(traj, &smoothing(InnerOp::DysDx(s)))?;
    let strichartz = |r| MixedNormSpec::new(vec![(T, Finite(r)), (XY, Inf)]);
    let maximal = |p| MixedNormSpec::new(vec![(X, Finite(p)), (YT, Inf)]);
    match w.k {
        1 => {
            total += mixed_norm(traj, &strichartz(2.0).with_op(InnerOp::Dx))?;
            total += mixed_norm(traj, &maximal(2.0))?;
        }
        2 => {
            total += mixed_norm(traj, &strichartz(3.0))?;
            total += mixed_norm(traj, &strichartz(9.0 / 4.0).with_op(InnerOp::Dx))?;
            total += mixed_norm(traj, &maximal(2.0))?;
        }
        k @ 3..=7 => {
            if !(opt.gamma > 0.0 && opt.gamma < 1.0 / 12.0) {
                return Err(GzkError::Validation(format!(
                    "gamma must lie in (0, 1/12) for the 3<=k<=7 family (got {})",
                    opt.gamma
                )));
            }
            let p_k = 12.0 * (k as f64 - 1.0) / (7.0 - 12.0 * opt.gamma);
            total += mixed_norm(traj, &strichartz(p_k))?;
            total += mixed_norm(traj, &strichartz(12.0 / 5.0).with_op(InnerOp::Dx))?;
            total += mixed_norm(traj, &maximal(4.0))?;
        }
        k => {
            if !(opt.epsilon > 0.0) {
                return Err(GzkError::Validation(
                    "epsilon must be positive for the k >= 8 family".into(),
                ));
            }
            total += mixed_norm(traj, &smoothing(InnerOp::Dx))?;
            total += mixed_norm(traj, &strichartz(1.5 * k as f64 + opt.epsilon))?;
            total += mixed_norm(
                traj,
                &strichartz(3.0 * k as f64 / (k as f64 + 2.0)).with_op(InnerOp::Dx),
            )?;
            total += mixed_norm(traj, &maximal(k as f64 / 2.0))?;
        }
    }
    Ok(total)
}

/// mu_{2,k}^T = mu_{1,k}^T + sup_t || (|x|^{r1}+|y|^{r2}) u(t) ||_2.
pub fn mu2(traj: &Trajectory, w: &WeightParams, opt: &MuOptions) -> Result<f64> {
    let base = mu1(traj, w, opt)?;
    let weighted = sup_t(traj, |u| weighted_l2_sum_form(u, w.r1, w.r2))?;
    Ok(base + weighted)
}
