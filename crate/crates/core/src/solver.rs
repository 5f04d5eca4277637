//! Local-in-time solution of the gZK equation `u_t + d_x Lap u + u^k u_x = 0`:
//! Picard iteration on the Duhamel integral equation (the constructive scheme
//! the well-posedness theory rests on) and a production ETDRK4 stepper whose
//! linear part is exact through the group W(t).

use crate::error::{GzkError, Result};
use crate::field::{dealias, forward, inverse, to_physical, Field, Repr};
use crate::grid::GridSpec;
use crate::group;
use crate::norms::{hs_norm, Trajectory};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Nonlinearity power.
    pub k: u32,
    /// Sobolev index used for contraction norms and the time rule.
    pub s: f64,
    /// Time horizon; 0 means "use the local existence time".
    pub t_horizon: f64,
    /// Number of uniform steps (trajectory has steps+1 samples).
    pub steps: usize,
    pub picard_max_iter: usize,
    pub picard_tol: f64,
    /// Order of the Duhamel quadrature; 4 (composite Simpson) is implemented.
    pub duhamel_order: u32,
    /// Contraction constant c of the time rule.
    pub c: f64,
    /// Contraction exponent gamma of the time rule (1/2 for k = 1).
    pub gamma: f64,
    /// Horizon returned for zero data, whose local time is unbounded.
    pub t_max: f64,
    /// Allow t_horizon beyond the local existence time.
    pub allow_long_time: bool,
    /// Disable the nonlinear term (exact linear integration; for testing).
    pub linear_only: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 1,
            s: 1.0,
            t_horizon: 0.0,
            steps: 32,
            picard_max_iter: 25,
            picard_tol: 1e-10,
            duhamel_order: 4,
            c: 1.0,
            gamma: 0.5,
            t_max: 1.0,
            allow_long_time: false,
            linear_only: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(GzkError::Validation("k must be >= 1".into()));
        }
        if self.steps == 0 {
            return Err(GzkError::Validation("steps must be >= 1".into()));
        }
        if self.duhamel_order != 4 {
            return Err(GzkError::Validation(
                "only the order-4 (composite Simpson) Duhamel quadrature is implemented".into(),
            ));
        }
        if !(self.gamma > 0.0) || !(self.c > 0.0) {
            return Err(GzkError::Validation(
                "contraction constants must satisfy c > 0, gamma > 0".into(),
            ));
        }
        if !(self.picard_tol > 0.0) {
            return Err(GzkError::Validation("picard_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Conserved functionals per time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantRecord {
    /// M = integral u^2
    pub mass: f64,
    /// E = integral ( |grad u|^2 / 2 - u^{k+2} / ((k+1)(k+2)) )
    pub energy: f64,
}

fn expect_real(u: &Field) -> Result<()> {
    let scale = u
        .data
        .iter()
        .map(|c| c.re.abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    if u.data.iter().any(|c| c.im.abs() > 1e-10 * scale) {
        return Err(GzkError::Validation(
            "solver operations require real-valued physical data".into(),
        ));
    }
    Ok(())
}

/// Dealias-protected evaluation of `u^k d_x u`: differentiate spectrally,
/// truncate both factors to the degree-(k+1) alias-free band, multiply in
/// physical space, truncate the product again.
pub fn nonlinearity(u: &Field, k: u32) -> Result<Field> {
    u.expect_repr(Repr::Physical)?;
    expect_real(u)?;
    if k < 1 {
        return Err(GzkError::Validation("k must be >= 1".into()));
    }
    let hat = forward(u)?;
    nonlinearity_spectral(&hat, k).and_then(|p| inverse(&p))
}

/// Same, spectral in / spectral out (the form the steppers consume).
pub fn nonlinearity_spectral(u_hat: &Field, k: u32) -> Result<Field> {
    let grid = u_hat.grid.clone();
    let band = dealias(u_hat, k + 1)?;
    let mut dx_hat = band.clone();
    dx_hat.apply_multiplier(|ix, _| Complex64::new(0.0, grid.xi_odd(ix)));
    let ub = inverse(&band)?;
    let du = inverse(&dx_hat)?;
    let mut prod = ub;
    for (p, d) in prod.data.iter_mut().zip(&du.data) {
        let v = p.re.powi(k as i32) * d.re;
        *p = Complex64::new(v, 0.0);
    }
    let mut out = dealias(&forward(&prod)?, k + 1)?;
    out.hermitian_symmetrize();
    Ok(out)
}

/// Mass and energy by grid quadrature.
pub fn invariants(u: &Field, k: u32) -> Result<InvariantRecord> {
    let f = to_physical(u)?;
    expect_real(&f)?;
    let grid = f.grid.clone();
    let hat = forward(&f)?;
    let mut gx = hat.clone();
    gx.apply_multiplier(|ix, _| Complex64::new(0.0, grid.xi_odd(ix)));
    let mut gy = hat;
    gy.apply_multiplier(|_, iy| Complex64::new(0.0, grid.eta_odd(iy)));
    let gx = inverse(&gx)?;
    let gy = inverse(&gy)?;
    let mut mass = 0.0;
    let mut energy = 0.0;
    let denom = ((k + 1) * (k + 2)) as f64;
    for i in 0..f.data.len() {
        let v = f.data[i].re;
        mass += v * v;
        energy += 0.5 * (gx.data[i].norm_sqr() + gy.data[i].norm_sqr()) - v.powi(k as i32 + 2) / denom;
    }
    let da = grid.da();
    Ok(InvariantRecord {
        mass: mass * da,
        energy: energy * da,
    })
}

/// The local existence time from the contraction rule `c a^k T^gamma <= 1/2`
/// with ball radius `a = 2 c ||u0||_{H^s}`, solved at equality.
pub fn local_time(u0: &Field, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let norm = hs_norm(u0, cfg.s)?;
    if norm == 0.0 {
        return Ok(cfg.t_max);
    }
    let a = 2.0 * cfg.c * norm;
    Ok((2.0 * cfg.c * a.powi(cfg.k as i32)).powf(-1.0 / cfg.gamma))
}

fn resolve_horizon(u0: &Field, cfg: &SolverConfig) -> Result<f64> {
    let t_local = local_time(u0, cfg)?;
    let t = if cfg.t_horizon > 0.0 {
        cfg.t_horizon
    } else {
        t_local.min(cfg.t_max)
    };
    if t > t_local && !cfg.allow_long_time {
        return Err(GzkError::Validation(format!(
            "t_horizon {t} exceeds the local existence time {t_local:.6e}; \
             set the long-time override to proceed"
        )));
    }
    Ok(t)
}

// phi-functions of the exponential integrator: phi_j(z) = sum z^n / (n+j)!
fn phi_funcs(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < 1.0 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = p1;
        let mut p3 = p1;
        let mut zp = Complex64::new(1.0, 0.0);
        let mut fact = 1.0f64; // n!
        for n in 0..24u32 {
            if n > 0 {
                fact *= n as f64;
                zp *= z;
            }
            let f1 = fact * (n as f64 + 1.0);
            let f2 = f1 * (n as f64 + 2.0);
            let f3 = f2 * (n as f64 + 3.0);
            p1 += zp / f1;
            p2 += zp / f2;
            p3 += zp / f3;
        }
        (p1, p2, p3)
    } else {
        let ez = z.exp();
        let one = Complex64::new(1.0, 0.0);
        let p1 = (ez - one) / z;
        let p2 = (ez - one - z) / (z * z);
        let p3 = (ez - one - z - z * z / 2.0) / (z * z * z);
        (p1, p2, p3)
    }
}

struct Etdrk4Tables {
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    q_half: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

fn etdrk4_tables(grid: &GridSpec, dt: f64) -> Etdrk4Tables {
    let n = grid.len();
    let mut t = Etdrk4Tables {
        e_full: Vec::with_capacity(n),
        e_half: Vec::with_capacity(n),
        q_half: Vec::with_capacity(n),
        f1: Vec::with_capacity(n),
        f2: Vec::with_capacity(n),
        f3: Vec::with_capacity(n),
    };
    for ix in 0..grid.nx {
        let xi = grid.xi_odd(ix);
        for iy in 0..grid.ny {
            // uhat_t = i phi uhat + N
            let l = Complex64::new(0.0, group::phase(xi, grid.eta_odd(iy)));
            let z = l * dt;
            let (p1h, _, _) = phi_funcs(z / 2.0);
            let (p1, p2, p3) = phi_funcs(z);
            t.e_full.push(z.exp());
            t.e_half.push((z / 2.0).exp());
            t.q_half.push(dt / 2.0 * p1h);
            t.f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            t.f2.push(dt * 2.0 * (p2 - 2.0 * p3));
            t.f3.push(dt * (4.0 * p3 - p2));
        }
    }
    t
}

/// Production integrator: fourth-order exponential time differencing (ETDRK4)
/// with the linear part exact. Returns the trajectory at uniform steps.
pub fn evolve(u0: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let f0 = to_physical(u0)?;
    expect_real(&f0)?;
    f0.check_boundary_tail()?;
    let t_end = resolve_horizon(&f0, cfg)?;
    let m_steps = cfg.steps;
    let dt = t_end / m_steps as f64;
    let grid = f0.grid.clone();
    let tables = etdrk4_tables(&grid, dt);
    let mut hat = forward(&f0)?;
    hat.hermitian_symmetrize();
    let norm0 = hat.l2().max(1e-300);

    let nonlin = |h: &Field| -> Result<Field> {
        if cfg.linear_only {
            Ok(Field::zeros(&grid, Repr::Spectral))
        } else {
            // uhat_t = i phi uhat - F[u^k u_x]
            let mut n = nonlinearity_spectral(h, cfg.k)?;
            n.scale(Complex64::new(-1.0, 0.0));
            Ok(n)
        }
    };

    let mut times = Vec::with_capacity(m_steps + 1);
    let mut fields = Vec::with_capacity(m_steps + 1);
    let push = |fields: &mut Vec<Field>, hat: &Field| -> Result<()> {
        let mut f = inverse(hat)?;
        f.take_real();
        fields.push(f);
        Ok(())
    };
    times.push(0.0);
    push(&mut fields, &hat)?;
    for m in 0..m_steps {
        let n_u = nonlin(&hat)?;
        let mut a = Field::zeros(&grid, Repr::Spectral);
        for i in 0..a.data.len() {
            a.data[i] = tables.e_half[i] * hat.data[i] + tables.q_half[i] * n_u.data[i];
        }
        let n_a = nonlin(&a)?;
        let mut b = Field::zeros(&grid, Repr::Spectral);
        for i in 0..b.data.len() {
            b.data[i] = tables.e_half[i] * hat.data[i] + tables.q_half[i] * n_a.data[i];
        }
        let n_b = nonlin(&b)?;
        let mut c = Field::zeros(&grid, Repr::Spectral);
        for i in 0..c.data.len() {
            c.data[i] =
                tables.e_half[i] * a.data[i] + tables.q_half[i] * (2.0 * n_b.data[i] - n_u.data[i]);
        }
        let n_c = nonlin(&c)?;
        for i in 0..hat.data.len() {
            hat.data[i] = tables.e_full[i] * hat.data[i]
                + tables.f1[i] * n_u.data[i]
                + tables.f2[i] * (n_a.data[i] + n_b.data[i])
                + tables.f3[i] * n_c.data[i];
        }
        hat.hermitian_symmetrize();
        let norm = hat.l2();
        if !norm.is_finite() || norm > 1e6 * norm0 {
            return Err(GzkError::Instability {
                factor: norm / norm0,
            });
        }
        times.push((m + 1) as f64 * dt);
        push(&mut fields, &hat)?;
    }
    Trajectory::new(times, fields)
}

/// Quadrature weights for `int_0^{t_m}` on the uniform grid: composite
/// Simpson, with a Simpson-3/8 block absorbing an odd final panel and a
/// trapezoid for the degenerate single-interval case.
fn duhamel_weights(m: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![0.0f64; m + 1];
    if m == 0 {
        return w;
    }
    if m == 1 {
        w[0] = dt / 2.0;
        w[1] = dt / 2.0;
        return w;
    }
    let simpson_upto = if m % 2 == 0 { m } else { m - 3 };
    if simpson_upto >= 2 {
        for j in 0..=simpson_upto {
            let c = if j == 0 || j == simpson_upto {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w[j] += c * dt / 3.0;
        }
    }
    if m % 2 == 1 {
        // 3/8 rule over the last three intervals
        let base = m - 3;
        for (off, c) in [(0usize, 1.0), (1, 3.0), (2, 3.0), (3, 1.0)] {
            w[base + off] += c * 3.0 * dt / 8.0;
        }
    }
    w
}

/// Picard iteration on the Duhamel formula
/// `Psi(u)(t) = W(t)u0 - int_0^t W(t-t') (u^k u_x)(t') dt'`,
/// iterated from `u^(0)(t) = W(t)u0` until the sup-in-time H^s difference of
/// successive iterates falls below the tolerance.
///
/// Returns the fixed point and the per-iteration difference norms.
pub fn picard_solve(u0: &Field, cfg: &SolverConfig) -> Result<(Trajectory, Vec<f64>)> {
    cfg.validate()?;
    let f0 = to_physical(u0)?;
    expect_real(&f0)?;
    f0.check_boundary_tail()?;
    let t_end = resolve_horizon(&f0, cfg)?;
    let m_steps = cfg.steps;
    let dt = t_end / m_steps as f64;
    let mut hat0 = forward(&f0)?;
    hat0.hermitian_symmetrize();

    // free evolution W(t_m) u0, the zeroth iterate and the inhomogeneous term
    let free: Vec<Field> = (0..=m_steps)
        .map(|m| group::propagate(&hat0, m as f64 * dt))
        .collect::<Result<_>>()?;
    let weights: Vec<Vec<f64>> = (0..=m_steps).map(|m| duhamel_weights(m, dt)).collect();
    let mut current = free.clone();
    let mut history = Vec::new();
    let zero_data = hat0.l2() == 0.0;

    for _iter in 0..cfg.picard_max_iter {
        // g_j = F[u^k u_x](t_j) of the current iterate
        let g: Vec<Field> = current
            .iter()
            .map(|h| nonlinearity_spectral(h, cfg.k))
            .collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(m_steps + 1);
        for m in 0..=m_steps {
            let mut acc = free[m].clone();
            let w = &weights[m];
            for (j, wj) in w.iter().enumerate() {
                if *wj == 0.0 {
                    continue;
                }
                let lag = (m - j) as f64 * dt;
                let mut term = group::propagate(&g[j], lag)?;
                term.scale(Complex64::new(-wj, 0.0));
                acc.add_scaled(Complex64::new(1.0, 0.0), &term);
            }
            acc.hermitian_symmetrize();
            acc.assert_finite("picard iterate")?;
            next.push(acc);
        }
        let mut diff = 0.0f64;
        for m in 0..=m_steps {
            diff = diff.max(hs_norm(&next[m].sub(&current[m]), cfg.s)?);
        }
        history.push(diff);
        current = next;
        if diff < cfg.picard_tol || zero_data {
            let times = (0..=m_steps).map(|m| m as f64 * dt).collect();
            let fields = current
                .iter()
                .map(|h| {
                    let mut f = inverse(h)?;
                    f.take_real();
                    Ok(f)
                })
                .collect::<Result<_>>()?;
            return Ok((Trajectory::new(times, fields)?, history));
        }
    }
    Err(GzkError::NonConvergence {
        max_iter: cfg.picard_max_iter,
        last_diff: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// One application of the Duhamel map `Psi` to a trajectory (for fixed-point
/// residual checks).
pub fn duhamel_apply(u0: &Field, traj: &Trajectory, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let m_steps = traj.len() - 1;
    let dt = traj.dt();
    let mut hat0 = forward(&to_physical(u0)?)?;
    hat0.hermitian_symmetrize();
    let g: Vec<Field> = traj
        .fields
        .iter()
        .map(|f| nonlinearity_spectral(&forward(&to_physical(f)?)?, cfg.k))
        .collect::<Result<_>>()?;
    let mut fields = Vec::with_capacity(m_steps + 1);
    for m in 0..=m_steps {
        let mut acc = group::propagate(&hat0, m as f64 * dt)?;
        for (j, wj) in duhamel_weights(m, dt).iter().enumerate() {
            if *wj == 0.0 {
                continue;
            }
            let mut term = group::propagate(&g[j], (m - j) as f64 * dt)?;
            term.scale(Complex64::new(-wj, 0.0));
            acc.add_scaled(Complex64::new(1.0, 0.0), &term);
        }
        let mut f = inverse(&acc)?;
        f.take_real();
        fields.push(f);
    }
    Trajectory::new(traj.times.clone(), fields)
}
