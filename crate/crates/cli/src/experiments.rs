//! The experiment runners behind each CLI subcommand: build the scene from a
//! parsed configuration, compute, and return a report plus a plot table.

use crate::config::Config;
use gzk_core::error::{GzkError, Result};
use gzk_core::field::{forward, inverse, Field};
use gzk_core::fracops::{
    commutator_check, commutator_check_beta, frac_deriv_x, frac_deriv_y, phi_operator,
    stein_deriv, SteinQuadrature, WeightParams,
};
use gzk_core::grid::{make_grid, GridSpec};
use gzk_core::norms::{hs_norm, weighted_l2, NormReport};
use gzk_core::solver::{duhamel_apply, evolve, picard_solve, SolverConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

pub const EXPERIMENTS: &[&str] = &[
    "commutator",
    "commutator-beta",
    "phi-growth",
    "persistence",
    "picard-contraction",
    "convergence",
    "stein-calibration",
];

/// A comma-separated table with a header row; every data row is stamped with
/// the configuration digest.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        let mut header: Vec<String> = columns.iter().map(|s| s.to_string()).collect();
        header.push("config_hash".into());
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>, hash: &str) {
        let mut row = cells;
        row.push(hash.to_string());
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

#[derive(Debug)]
pub struct Outcome {
    pub report: NormReport,
    pub table: Table,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, message: String) {
        if !ok {
            self.passed = false;
            self.failures.push(message);
        }
    }
}

pub struct Scene {
    pub cfg: Config,
    pub grid: GridSpec,
    pub data: Field,
    pub seed: u64,
    pub hash: String,
}

impl Scene {
    pub fn build(cfg: Config) -> Result<Scene> {
        let nx = cfg.usize_or("grid.nx", 128)?;
        let ny = cfg.usize_or("grid.ny", nx)?;
        let lx = cfg.f64_or("grid.lx", 40.0)?;
        let ly = cfg.f64_or("grid.ly", lx)?;
        let grid = make_grid(nx, ny, lx, ly)?;
        let seed = cfg.u64_or("experiment.seed", 0)?;
        let data = build_data(&cfg, &grid, seed)?;
        let hash = {
            let mut with_seed = cfg.clone();
            with_seed.set("experiment.seed", seed.to_string());
            with_seed.digest()
        };
        Ok(Scene {
            cfg,
            grid,
            data,
            seed,
            hash,
        })
    }

    pub fn weights(&self) -> Result<WeightParams> {
        WeightParams::new(
            self.cfg.f64_or("weights.s", 1.0)?,
            self.cfg.f64_or("weights.r1", 0.5)?,
            self.cfg.f64_or("weights.r2", 0.5)?,
            self.cfg.f64_or("weights.beta", 0.0)?,
            self.cfg.u32_or("weights.k", 1)?,
        )
    }

    pub fn solver(&self, override_time: bool) -> Result<SolverConfig> {
        let base = SolverConfig::default();
        let cfg = SolverConfig {
            k: self.cfg.u32_or("solver.k", base.k)?,
            s: self.cfg.f64_or("solver.s", base.s)?,
            t_horizon: self.cfg.f64_or("solver.t_horizon", base.t_horizon)?,
            steps: self.cfg.usize_or("solver.steps", base.steps)?,
            picard_max_iter: self.cfg.usize_or("solver.picard_max_iter", base.picard_max_iter)?,
            picard_tol: self.cfg.f64_or("solver.picard_tol", base.picard_tol)?,
            duhamel_order: self.cfg.u32_or("solver.duhamel_order", base.duhamel_order)?,
            c: self.cfg.f64_or("solver.c", base.c)?,
            gamma: self.cfg.f64_or("solver.gamma", base.gamma)?,
            t_max: self.cfg.f64_or("solver.t_max", base.t_max)?,
            allow_long_time: override_time
                || self.cfg.bool_or("solver.allow_long_time", base.allow_long_time)?,
            linear_only: self.cfg.bool_or("solver.linear_only", base.linear_only)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn outcome(&self, table: Table) -> Outcome {
        let mut report = NormReport::default();
        report.meta("config_hash", self.hash.clone());
        report.meta("seed", self.seed.to_string());
        report.meta(
            "grid",
            format!(
                "{}x{} on {}x{}",
                self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly
            ),
        );
        Outcome {
            report,
            table,
            passed: true,
            failures: Vec::new(),
        }
    }
}

fn build_data(cfg: &Config, grid: &GridSpec, seed: u64) -> Result<Field> {
    let kind = cfg.string_or("data.kind", "gaussian");
    let amp = cfg.f64_or("data.amplitude", 1.0)?;
    match kind.as_str() {
        "gaussian" => {
            let sigma = cfg.f64_or("data.sigma", 2.0)?;
            if sigma <= 0.0 {
                return Err(GzkError::Validation(format!(
                    "data.sigma must be positive (got {sigma})"
                )));
            }
            let cx = cfg.f64_or("data.center_x", 0.0)?;
            let cy = cfg.f64_or("data.center_y", 0.0)?;
            Ok(Field::gaussian(grid, sigma, amp, (cx, cy)))
        }
        "mode" => {
            let a = cfg.f64_or("data.a", 1.0)?;
            let b = cfg.f64_or("data.b", 1.0)?;
            let (kx, ky) = (
                 2.0 * std::f64::consts::PI * a / grid.lx,
                 2.0 * std::f64::consts::PI * b / grid.ly,
            );
            Ok(Field::from_real_fn(grid, |x, y| amp * (kx * x + ky * y).cos()))
        }
        "random" => {
            // localized random bump: Gaussian envelope with low-mode content
            let sigma = cfg.f64_or("data.sigma", 2.0)?;
            let max_mode = cfg.usize_or("data.max_mode", 2)? as i64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut modes = Vec::new();
            for jx in -max_mode..=max_mode {
                for jy in -max_mode..=max_mode {
                    modes.push((
                        jx as f64 * 2.0 * std::f64::consts::PI / grid.lx,
                        jy as f64 * 2.0 * std::f64::consts::PI / grid.ly,
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    ));
                }
            }
            let norm = modes.len() as f64;
            Ok(Field::from_real_fn(grid, |x, y| {
                let env = (-(x * x + y * y) / (2.0 * sigma * sigma)).exp();
                let sum: f64 = modes
                    .iter()
                    .map(|&(kx, ky, a, ph)| a * (kx * x + ky * y + ph).cos())
                    .sum();
                amp * env * (1.0 + sum / norm)
            }))
        }
        "file" => {
            let path = cfg
                .raw("data.path")
                .ok_or_else(|| GzkError::Validation("data.path is required for data.kind = file".into()))?;
            let mut f = std::fs::File::open(path)
                .map_err(|e| GzkError::Validation(format!("cannot open {path}: {e}")))?;
            let field = Field::read_from(&mut f)?;
            if field.grid != *grid {
                return Err(GzkError::Validation(format!(
                    "field in {path} was saved on a {}x{} grid; config asks for {}x{}",
                    field.grid.nx, field.grid.ny, grid.nx, grid.ny
                )));
            }
            Ok(field)
        }
        other => Err(GzkError::Validation(format!(
            "data.kind must be gaussian, mode, random, or file (got `{other}`)"
        ))),
    }
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

pub fn run(name: &str, scene: &Scene, override_time: bool) -> Result<Outcome> {
    match name {
        "commutator" => commutator(scene, false),
        "commutator-beta" => commutator(scene, true),
        "phi-growth" => phi_growth(scene),
        "persistence" => persistence(scene, override_time),
        "picard-contraction" => picard_contraction(scene, override_time),
        "convergence" => convergence(scene, override_time),
        "stein-calibration" => stein_calibration(scene),
        other => Err(GzkError::Validation(format!(
            "unknown experiment `{other}`; expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
    }
}

fn commutator(scene: &Scene, with_beta: bool) -> Result<Outcome> {
    let w = scene.weights()?;
    let default_tol = if with_beta { 1e-3 } else { 1e-4 };
    let tol = scene.cfg.f64_or("experiment.tolerance", default_tol)?;
    let times = scene.cfg.f64_list_or("experiment.times", &[0.1, 1.0])?;
    let mut table = Table::new(&[
        "t",
        "residual_x",
        "residual_y",
        "phi_l2_x",
        "phi_l2_y",
        "bound_ratio_x",
        "bound_ratio_y",
    ]);
    let mut out = scene.outcome(Table::default());
    let mut worst = 0.0f64;
    for &t in &times {
        let rep = if with_beta {
            commutator_check_beta(&scene.data, t, &w)?
        } else {
            commutator_check(&scene.data, t, &w)?
        };
        let cells: Vec<String> = ["residual_x", "residual_y", "phi_l2_x", "phi_l2_y", "bound_ratio_x", "bound_ratio_y"]
            .iter()
            .map(|k| fmt(rep.get(k).unwrap_or(f64::NAN)))
            .collect();
        let mut row = vec![fmt(t)];
        row.extend(cells);
        table.push(row, &scene.hash);
        let res = rep
            .get("residual_x")
            .unwrap_or(f64::NAN)
            .max(rep.get("residual_y").unwrap_or(f64::NAN));
        worst = worst.max(res);
        out.check(
            res.is_finite() && res <= tol,
            format!("t={t}: residual {res:.3e} exceeds tolerance {tol:.1e}"),
        );
    }
    out.table = table;
    out.report.set("worst_residual", worst);
    out.report.set("tolerance", tol);
    out.report.meta("experiment", if with_beta { "commutator-beta" } else { "commutator" });
    Ok(out)
}

fn phi_growth(scene: &Scene) -> Result<Outcome> {
    let w = scene.weights()?;
    let alpha = scene.cfg.f64_or("experiment.alpha", w.r1)?;
    let axis = scene.cfg.usize_or("experiment.axis", 0)?;
    if axis > 1 {
        return Err(GzkError::Validation(format!(
            "experiment.axis must be 0 (x) or 1 (y), got {axis}"
        )));
    }
    let max_slope = scene.cfg.f64_or("experiment.max_slope", 1.05)?;
    let times = scene.cfg.f64_list_or("experiment.times", &[1.0, 2.0, 4.0, 8.0])?;
    let hat = forward(&scene.data)?;
    let base = hs_norm(&scene.data, w.s)?;
    let mut table = Table::new(&["t", "phi_l2", "bound_ratio"]);
    let mut norms = Vec::new();
    for &t in &times {
        let p = phi_operator(&hat, axis, t, alpha)?;
        let nrm = inverse(&p)?.l2();
        norms.push(nrm);
        table.push(
            vec![fmt(t), fmt(nrm), fmt(nrm / ((1.0 + t.abs()) * base))],
            &scene.hash,
        );
    }
    let mut out = scene.outcome(table);
    out.report.meta("experiment", "phi-growth");
    out.report.set("alpha", alpha);
    if times.len() >= 2 {
        let slope = loglog_slope(&times, &norms);
        out.report.set("slope", slope);
        out.check(
            slope <= max_slope,
            format!("fitted growth slope {slope:.3} exceeds {max_slope}"),
        );
    }
    Ok(out)
}

fn persistence(scene: &Scene, override_time: bool) -> Result<Outcome> {
    let w = scene.weights()?;
    let cfg = scene.solver(override_time)?;
    let k_limit = scene.cfg.f64_or("experiment.k_limit", 10.0)?;
    let traj = evolve(&scene.data, &cfg)?;
    let data_z = hs_norm(&scene.data, w.s)? + weighted_l2(&scene.data, w.r1, w.r2)?;
    let t_end = *traj.times.last().unwrap();
    let mut table = Table::new(&["t", "hs_norm", "weighted_l2", "z_norm"]);
    let mut sup_w = 0.0f64;
    for (i, f) in traj.fields.iter().enumerate() {
        let h = hs_norm(f, w.s)?;
        let wt = weighted_l2(f, w.r1, w.r2)?;
        sup_w = sup_w.max(wt);
        table.push(
            vec![fmt(traj.times[i]), fmt(h), fmt(wt), fmt(h + wt)],
            &scene.hash,
        );
    }
    let fitted_k = if data_z == 0.0 {
        0.0
    } else {
        sup_w / ((1.0 + t_end) * data_z)
    };
    let mut out = scene.outcome(table);
    out.report.meta("experiment", "persistence");
    out.report.set("sup_weighted_l2", sup_w);
    out.report.set("fitted_k", fitted_k);
    out.report.set("t_end", t_end);
    out.check(
        fitted_k.is_finite() && fitted_k <= k_limit,
        format!("persistence constant {fitted_k:.3} exceeds limit {k_limit}"),
    );
    Ok(out)
}

fn picard_contraction(scene: &Scene, override_time: bool) -> Result<Outcome> {
    let cfg = scene.solver(override_time)?;
    let ratio_limit = scene.cfg.f64_or("experiment.ratio_limit", 0.5)?;
    let (traj, history) = picard_solve(&scene.data, &cfg)?;
    let mut table = Table::new(&["iteration", "difference", "ratio"]);
    let mut worst_ratio = 0.0f64;
    for (i, d) in history.iter().enumerate() {
        let ratio = if i == 0 || history[i - 1] < 1e-13 {
            f64::NAN
        } else {
            let r = d / history[i - 1];
            worst_ratio = worst_ratio.max(r);
            r
        };
        table.push(vec![i.to_string(), fmt(*d), fmt(ratio)], &scene.hash);
    }
    let mapped = duhamel_apply(&scene.data, &traj, &cfg)?;
    let mut fp_resid = 0.0f64;
    for (a, b) in traj.fields.iter().zip(&mapped.fields) {
        fp_resid = fp_resid.max(hs_norm(&a.sub(b), cfg.s)?);
    }
    let mut out = scene.outcome(table);
    out.report.meta("experiment", "picard-contraction");
    out.report.set("iterations", history.len() as f64);
    out.report.set("worst_ratio", worst_ratio);
    out.report.set("fixed_point_residual", fp_resid);
    out.check(
        worst_ratio <= ratio_limit,
        format!("contraction ratio {worst_ratio:.3} exceeds {ratio_limit}"),
    );
    out.check(
        fp_resid <= 10.0 * cfg.picard_tol,
        format!(
            "fixed-point residual {fp_resid:.3e} exceeds 10x tolerance {:.1e}",
            cfg.picard_tol
        ),
    );
    Ok(out)
}

fn convergence(scene: &Scene, override_time: bool) -> Result<Outcome> {
    let cfg = scene.solver(override_time)?;
    let steps = scene.cfg.usize_list_or("experiment.steps", &[8, 16, 32])?;
    if steps.len() < 2 {
        return Err(GzkError::Validation(
            "experiment.steps needs at least two entries for a convergence fit".into(),
        ));
    }
    let target = scene.cfg.f64_or("experiment.order", 4.0)?;
    let band = scene.cfg.f64_or("experiment.order_tolerance", 0.3)?;
    let reference_steps = steps.iter().copied().max().unwrap() * 4;
    let run = |m: usize| -> Result<Field> {
        let c = SolverConfig { steps: m, ..cfg.clone() };
        Ok(evolve(&scene.data, &c)?.fields.last().unwrap().clone())
    };
    let reference = run(reference_steps)?;
    let ref_norm = reference.l2();
    let mut table = Table::new(&["steps", "dt", "final_error"]);
    let mut dts = Vec::new();
    let mut errs = Vec::new();
    for &m in &steps {
        let f = run(m)?;
        let err = f.sub(&reference).l2() / ref_norm;
        let dt = 1.0 / m as f64;
        dts.push(dt);
        errs.push(err);
        table.push(vec![m.to_string(), fmt(dt), fmt(err)], &scene.hash);
    }
    let order = loglog_slope(&dts, &errs);
    let mut out = scene.outcome(table);
    out.report.meta("experiment", "convergence");
    out.report.set("order", order);
    out.report.set("reference_steps", reference_steps as f64);
    out.check(
        (order - target).abs() <= band,
        format!("fitted order {order:.2} outside {target} +/- {band}"),
    );
    Ok(out)
}

fn stein_calibration(scene: &Scene) -> Result<Outcome> {
    let alphas = scene
        .cfg
        .f64_list_or("experiment.alphas", &[0.25, 0.5, 0.75])?;
    let axis = scene.cfg.usize_or("experiment.axis", 0)?;
    let oversample = scene.cfg.usize_or("experiment.oversample", 1)?;
    let tol = scene.cfg.f64_or("experiment.tolerance", 1e-3)?;
    let mut table = Table::new(&["alpha", "d_alpha", "relative_error"]);
    let mut out = scene.outcome(Table::default());
    let mut worst = 0.0f64;
    for &alpha in &alphas {
        let q = SteinQuadrature::new(&scene.grid, axis, alpha, oversample)?;
        let quad = stein_deriv(&scene.data, axis, alpha, &q)?;
        let mult_hat = if axis == 0 {
            frac_deriv_x(&scene.data, alpha)?
        } else {
            frac_deriv_y(&scene.data, alpha)?
        };
        let mult = gzk_core::field::to_physical(&mult_hat)?;
        let diff = quad.sub(&mult);
        let denom = mult.l2();
        let rel = if denom == 0.0 { diff.l2() } else { diff.l2() / denom };
        worst = worst.max(rel);
        table.push(vec![fmt(alpha), fmt(q.d_alpha), fmt(rel)], &scene.hash);
        out.check(
            rel <= tol,
            format!("alpha={alpha}: quadrature vs multiplier error {rel:.3e} exceeds {tol:.1e}"),
        );
    }
    out.table = table;
    out.report.meta("experiment", "stein-calibration");
    out.report.set("worst_relative_error", worst);
    Ok(out)
}

/// Write the outcome to `<out>/report.txt`, `<out>/report.json`, and
/// `<out>/table.csv`.
pub fn write_outputs(out_dir: &Path, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| GzkError::Validation(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut text = Vec::new();
    outcome.report.write_text(&mut text)?;
    std::fs::write(out_dir.join("report.txt"), &text)?;
    std::fs::write(out_dir.join("report.json"), outcome.report.to_json()?)?;
    std::fs::write(out_dir.join("table.csv"), outcome.table.render())?;
    Ok(())
}

/// Cartesian sweep: one row per parameter combination, followed by log-log
/// slope summary rows over any swept `t` axis.
pub fn sweep(base: &Config, grid_spec: &Config, override_time: bool) -> Result<(Table, i32)> {
    let name = base.string_or("experiment.name", "commutator");
    let ts = grid_spec.f64_list_or("t", &[])?;
    let r1s = grid_spec.f64_list_or("r1", &[])?;
    let r2s = grid_spec.f64_list_or("r2", &[])?;
    let ks = grid_spec.usize_list_or("k", &[])?;
    let ns = grid_spec.usize_list_or("resolution", &[])?;
    // degenerate axes fall back to the base configuration's value
    let opt = |v: Vec<f64>| if v.is_empty() { vec![f64::NAN] } else { v };
    let opti = |v: Vec<usize>| if v.is_empty() { vec![usize::MAX] } else { v };
    let (ts, r1s, r2s) = (opt(ts), opt(r1s), opt(r2s));
    let (ks, ns) = (opti(ks), opti(ns));

    let mut table = Table::new(&[
        "t", "r1", "r2", "k", "resolution", "metric", "phi_l2", "status",
    ]);
    let mut worst_code = 0i32;
    // (key without t, t, phi_l2) triples for the growth fits
    let mut growth: Vec<(String, f64, f64)> = Vec::new();
    for &n in &ns {
        for &k in &ks {
            for &r1 in &r1s {
                for &r2 in &r2s {
                    for &t in &ts {
                        let mut cfg = base.clone();
                        if !t.is_nan() {
                            cfg.set("experiment.times", format!("{t}"));
                        }
                        if !r1.is_nan() {
                            cfg.set("weights.r1", format!("{r1}"));
                        }
                        if !r2.is_nan() {
                            cfg.set("weights.r2", format!("{r2}"));
                        }
                        if k != usize::MAX {
                            cfg.set("weights.k", format!("{k}"));
                            cfg.set("solver.k", format!("{k}"));
                        }
                        if n != usize::MAX {
                            cfg.set("grid.nx", format!("{n}"));
                            cfg.set("grid.ny", format!("{n}"));
                        }
                        let cell = |v: f64| if v.is_nan() { "-".to_string() } else { fmt(v) };
                        let celli = |v: usize| {
                            if v == usize::MAX {
                                "-".to_string()
                            } else {
                                v.to_string()
                            }
                        };
                        let run_one = || -> Result<Outcome> {
                            let scene = Scene::build(cfg.clone())?;
                            run(&name, &scene, override_time)
                        };
                        let (metric, phi_l2, status, hash, code) = match run_one() {
                            Ok(out) => {
                                let metric = primary_metric(&name, &out);
                                let phi = out
                                    .report
                                    .get("phi_l2_x")
                                    .or_else(|| first_phi(&out))
                                    .unwrap_or(f64::NAN);
                                let (status, code) = if out.passed {
                                    ("ok".to_string(), 0)
                                } else {
                                    ("assertion-failed".to_string(), 1)
                                };
                                let hash = out
                                    .report
                                    .metadata
                                    .get("config_hash")
                                    .cloned()
                                    .unwrap_or_default();
                                (metric, phi, status, hash, code)
                            }
                            Err(e) => (f64::NAN, f64::NAN, format!("error: {e}"), String::new(), exit_code(&e)),
                        };
                        worst_code = worst_code.max(code);
                        table.rows.push(vec![
                            cell(t),
                            cell(r1),
                            cell(r2),
                            celli(k),
                            celli(n),
                            fmt(metric),
                            fmt(phi_l2),
                            status,
                            hash,
                        ]);
                        if !t.is_nan() && phi_l2.is_finite() {
                            growth.push((format!("{r1}/{r2}/{k}/{n}"), t, phi_l2));
                        }
                    }
                }
            }
        }
    }
    // slope summary rows: one per non-t combination with at least two times
    let mut keys: Vec<String> = growth.iter().map(|(k, _, _)| k.clone()).collect();
    keys.sort();
    keys.dedup();
    for key in keys {
        let pts: Vec<(f64, f64)> = growth
            .iter()
            .filter(|(k, _, _)| *k == key)
            .map(|(_, t, v)| (*t, *v))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let slope = loglog_slope(&xs, &ys);
        table.rows.push(vec![
            "slope-fit".into(),
            key,
            "-".into(),
            "-".into(),
            "-".into(),
            fmt(slope),
            "-".into(),
            "summary".into(),
            String::new(),
        ]);
    }
    Ok((table, worst_code))
}

fn first_phi(out: &Outcome) -> Option<f64> {
    // phi-growth tables carry phi_l2 in column 1 of the first row
    if out.table.header.get(1).map(|s| s.as_str()) == Some("phi_l2") {
        out.table
            .rows
            .first()
            .and_then(|r| r.get(1))
            .and_then(|s| s.parse().ok())
    } else {
        None
    }
}

fn primary_metric(name: &str, out: &Outcome) -> f64 {
    let key = match name {
        "commutator" | "commutator-beta" => "worst_residual",
        "phi-growth" => "slope",
        "persistence" => "fitted_k",
        "picard-contraction" => "worst_ratio",
        "convergence" => "order",
        "stein-calibration" => "worst_relative_error",
        _ => return f64::NAN,
    };
    out.report.get(key).unwrap_or(f64::NAN)
}

/// Exit-code mapping: validation problems are 2, numerical guards are 3.
pub fn exit_code(e: &GzkError) -> i32 {
    match e {
        GzkError::Validation(_)
        | GzkError::Grid(_)
        | GzkError::Representation { .. }
        | GzkError::Io(_)
        | GzkError::Serde(_) => 2,
        GzkError::NonFinite(_)
        | GzkError::TailViolation { .. }
        | GzkError::NonConvergence { .. }
        | GzkError::Instability { .. } => 3,
    }
}
