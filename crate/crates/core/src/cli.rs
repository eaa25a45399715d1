//! Run orchestration: every subcommand resolves to a [`RunConfig`], runs
//! deterministically, and emits CSV (one header row, full double
//! precision, LF line endings).

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::config::{Command, RunConfig, TimeStep};
use crate::diagnostics::{
    self, detect_front, estimate_speed, fit_rate, measure_jump, stability_monitors, FitMode,
};
use crate::freeboundary::{
    self, integrate_front, solve_r1_given_r, traveling_wave, LayerGeometry,
};
use crate::model::ModelParams;
use crate::pde1d::{self, Grid1D, SimState};
use crate::pde_radial::{self, RadialGrid, RadialState};
use crate::{Dim, Error, Result};

/// Format one float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Diagnostics series collected from one PDE run.
#[derive(Debug, Clone, Default)]
pub struct SimSeries {
    pub t: Vec<f64>,
    pub front: Vec<f64>,
    pub speed: Vec<f64>,
    pub jump: Vec<f64>,
    pub volume: Vec<f64>,
}

impl SimSeries {
    /// Mean speed over the trailing `fraction` of the run.
    pub fn tail_mean_speed(&self, fraction: f64) -> f64 {
        tail_mean(&self.t, &self.speed, fraction)
    }

    /// Median jump over the trailing `fraction` of the run.
    pub fn tail_median_jump(&self, fraction: f64) -> f64 {
        let cut = self.t.last().copied().unwrap_or(0.0) * (1.0 - fraction);
        let mut vals: Vec<f64> = self
            .t
            .iter()
            .zip(&self.jump)
            .filter(|(&t, _)| t >= cut)
            .map(|(_, &j)| j)
            .collect();
        if vals.is_empty() {
            return f64::NAN;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals[vals.len() / 2]
    }
}

fn tail_mean(t: &[f64], v: &[f64], fraction: f64) -> f64 {
    let cut = t.last().copied().unwrap_or(0.0) * (1.0 - fraction);
    let vals: Vec<f64> =
        t.iter().zip(v).filter(|(&t, _)| t >= cut).map(|(_, &x)| x).collect();
    if vals.is_empty() {
        f64::NAN
    } else {
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

/// Execute one resolved configuration. Returns the diagnostics series of
/// PDE-type commands (empty for the others).
pub fn run(cfg: &RunConfig) -> Result<SimSeries> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    match cfg.command {
        Command::Analytic => run_analytic(cfg).map(|_| SimSeries::default()),
        Command::Profile => run_profile(cfg).map(|_| SimSeries::default()),
        Command::Relation => run_relation(cfg).map(|_| SimSeries::default()),
        Command::Sim1d => run_sim1d(cfg),
        Command::SimRadial => run_simradial(cfg),
        Command::Compare => run_compare(cfg).map(|_| SimSeries::default()),
        Command::Sweep => run_sweep(cfg).map(|_| SimSeries::default()),
    }
}

fn analytic_dt(cfg: &RunConfig) -> f64 {
    match cfg.time_step {
        TimeStep::Fixed(dt) => dt,
        // the DAE has no CFL notion; default to a resolution-independent step
        TimeStep::Cfl(_) => cfg.t_end / 2000.0,
    }
}

fn run_analytic(cfg: &RunConfig) -> Result<()> {
    let series = integrate_front(cfg.dim, cfg.r0, &cfg.params, cfg.t_end, analytic_dt(cfg))?;
    let rows: Vec<Vec<String>> = (0..series.t.len())
        .map(|k| {
            vec![
                fmt_f64(series.t[k]),
                fmt_f64(series.r[k]),
                fmt_f64(series.r1[k]),
                fmt_f64(series.r[k] - series.r1[k]),
                fmt_f64(series.speed[k]),
                fmt_f64(series.jump[k]),
            ]
        })
        .collect();
    write_csv(&cfg.out_dir.join("front.csv"), "t,R,R1,R2,speed,jump", &rows)
}

fn resolve_geometry(cfg: &RunConfig) -> Result<LayerGeometry> {
    match cfg.r1_0 {
        Some(r1) => LayerGeometry::new(r1, cfg.r0),
        None => {
            let r1 = solve_r1_given_r(cfg.dim, cfg.r0, &cfg.params)?;
            LayerGeometry::new(r1, cfg.r0)
        }
    }
}

/// Padding that keeps `W` below 1e-8 of its maximum at the boundary
/// (`W` decays like `exp(-x/sqrt(c_z))` outside the support).
fn decay_padding(p: &ModelParams) -> f64 {
    19.0 * p.c_z.sqrt() + 0.5
}

fn default_domain(cfg: &RunConfig) -> f64 {
    let speed = traveling_wave(&cfg.params).map(|tw| tw.speed).unwrap_or(0.0);
    let speed = speed.max(
        cfg.r1_0
            .map(|r1| freeboundary::front_speed(cfg.dim, cfg.r0, r1.min(cfg.r0), &cfg.params))
            .unwrap_or(0.0),
    );
    cfg.r0 + 1.05 * speed * cfg.t_end + decay_padding(&cfg.params)
}

fn cell_count(cfg: &RunConfig, extent: f64) -> Result<usize> {
    match (cfg.n, cfg.dx) {
        (Some(n), None) => Ok(n),
        (None, Some(dx)) => {
            if dx <= 0.0 {
                return Err(Error::Config(format!("grid.dx must be positive, got {dx}")));
            }
            Ok((extent / dx).round().max(8.0) as usize)
        }
        (None, None) => Ok((extent / 0.0125).round() as usize),
        (Some(_), Some(_)) => unreachable!("rejected at resolution time"),
    }
}

fn run_profile(cfg: &RunConfig) -> Result<()> {
    let geom = resolve_geometry(cfg)?;
    let span = cfg.domain.unwrap_or(cfg.r0 + decay_padding(&cfg.params));
    let n = cell_count(cfg, if cfg.dim == Dim::One { 2.0 * span } else { span })?;
    let grid: Vec<f64> = if cfg.dim == Dim::One {
        (0..n).map(|j| -span + (j as f64 + 0.5) * 2.0 * span / n as f64).collect()
    } else {
        (0..n).map(|j| (j as f64 + 0.5) * span / n as f64).collect()
    };
    let prof = freeboundary::profile(cfg.dim, &geom, &cfg.params, cfg.params.eta, &grid)?;
    if prof.kink_warning {
        eprintln!(
            "warning: geometry (r1 = {}, r = {}) violates the boundary relation; \
             the profile has a kink at the outer interface",
            geom.r1, geom.r
        );
    }
    let rows: Vec<Vec<String>> = (0..grid.len())
        .map(|j| {
            vec![
                fmt_f64(prof.grid[j]),
                prof.zone[j].index().to_string(),
                fmt_f64(prof.w[j]),
                fmt_f64(prof.sigma[j]),
            ]
        })
        .collect();
    write_csv(&cfg.out_dir.join("profile.csv"), "x_or_r,zone,W,Sigma", &rows)
}

fn run_relation(cfg: &RunConfig) -> Result<()> {
    let (r_min, r_max, steps) = cfg.relation_range;
    if !(r_max > r_min && r_min > 0.0) {
        return Err(Error::Config(format!(
            "relation range needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    let mut rows = Vec::new();
    for k in 0..steps {
        let r = r_min + (r_max - r_min) * k as f64 / (steps - 1) as f64;
        // radii below the minimal ansatz radius have no row
        if let Ok(r1) = solve_r1_given_r(cfg.dim, r, &cfg.params) {
            rows.push(vec![fmt_f64(r), fmt_f64(r1), fmt_f64(r - r1)]);
        }
    }
    write_csv(&cfg.out_dir.join("relation.csv"), "R,R1,R2", &rows)
}

fn snapshot(
    out_dir: &Path,
    index: usize,
    nodes: &[f64],
    rho: &[f64],
    sigma: &[f64],
    w: &[f64],
) -> Result<()> {
    let rows: Vec<Vec<String>> = (0..nodes.len())
        .map(|j| vec![fmt_f64(nodes[j]), fmt_f64(rho[j]), fmt_f64(sigma[j]), fmt_f64(w[j])])
        .collect();
    write_csv(&out_dir.join(format!("snapshot_{index:04}.csv")), "x_or_r,rho,Sigma,W", &rows)
}

struct DiagAccumulator {
    t: Vec<f64>,
    front: Vec<f64>,
    jump: Vec<f64>,
    volume: Vec<f64>,
    l2_rho: Vec<f64>,
    l2_sigma: Vec<f64>,
    max_sigma: Vec<f64>,
    max_w: Vec<f64>,
}

impl DiagAccumulator {
    fn new() -> Self {
        DiagAccumulator {
            t: Vec::new(),
            front: Vec::new(),
            jump: Vec::new(),
            volume: Vec::new(),
            l2_rho: Vec::new(),
            l2_sigma: Vec::new(),
            max_sigma: Vec::new(),
            max_w: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        cfg: &RunConfig,
        t: f64,
        nodes: &[f64],
        rho: &[f64],
        sigma: &[f64],
        w: &[f64],
        dx: f64,
        radial: bool,
    ) {
        let front = detect_front(nodes, rho, cfg.front_threshold).unwrap_or(f64::NAN);
        let jump =
            measure_jump(nodes, rho, sigma, cfg.front_threshold, cfg.jump_median3)
                .unwrap_or(f64::NAN);
        let volume = if radial {
            diagnostics::volume_radial(rho, nodes, dx)
        } else {
            diagnostics::volume_1d(rho, dx)
        };
        let measure: Box<dyn Fn(usize) -> f64> = if radial {
            let nodes = nodes.to_vec();
            Box::new(move |j| 2.0 * std::f64::consts::PI * nodes[j] * dx)
        } else {
            Box::new(move |_| dx)
        };
        let rep = stability_monitors(rho, sigma, w, &measure, dx, &cfg.params);
        self.t.push(t);
        self.front.push(front);
        self.jump.push(jump);
        self.volume.push(volume);
        self.l2_rho.push(rep.l2_rho);
        self.l2_sigma.push(rep.l2_sigma);
        self.max_sigma.push(rep.max_sigma);
        self.max_w.push(rep.max_w);
    }

    fn finish(self, cfg: &RunConfig) -> Result<SimSeries> {
        let speed = estimate_speed(&self.t, &self.front, 5);
        let rows: Vec<Vec<String>> = (0..self.t.len())
            .map(|k| {
                vec![
                    fmt_f64(self.t[k]),
                    fmt_f64(self.front[k]),
                    fmt_f64(speed[k]),
                    fmt_f64(self.jump[k]),
                    fmt_f64(self.volume[k]),
                    fmt_f64(self.l2_rho[k]),
                    fmt_f64(self.l2_sigma[k]),
                    fmt_f64(self.max_sigma[k]),
                    fmt_f64(self.max_w[k]),
                ]
            })
            .collect();
        write_csv(
            &cfg.out_dir.join("diagnostics.csv"),
            diagnostics::DiagnosticsRecord::CSV_HEADER,
            &rows,
        )?;
        Ok(SimSeries {
            t: self.t,
            front: self.front,
            speed,
            jump: self.jump,
            volume: self.volume,
        })
    }
}

fn warn_domain(w: &[f64], what: &str) {
    let max_w = w.iter().cloned().fold(0.0f64, f64::max);
    let edge = w.last().copied().unwrap_or(0.0);
    if edge.abs() > 1e-8 * max_w.max(1e-300) {
        eprintln!(
            "warning: potential at the {what} boundary is {edge:.3e} \
             (> 1e-8 of its maximum); enlarge the domain"
        );
    }
}

fn run_sim1d(cfg: &RunConfig) -> Result<SimSeries> {
    let geom = resolve_geometry(cfg)?;
    let x_max = cfg.domain.unwrap_or_else(|| default_domain(cfg));
    let n = cell_count(cfg, 2.0 * x_max)?;
    let grid = Grid1D::new(-x_max, x_max, n)?;
    let nodes = grid.nodes();
    let mut state = pde1d::init_from_analytic(&geom, &cfg.params, &grid)?;

    let mut diag = DiagAccumulator::new();
    let mut snap_index = 0usize;
    let emit_snapshot = |state: &SimState, idx: &mut usize| -> Result<()> {
        snapshot(&cfg.out_dir, *idx, &nodes, &state.rho, &state.sigma, &state.w)?;
        *idx += 1;
        Ok(())
    };

    diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dx, false);
    if cfg.snapshot_stride > 0 {
        emit_snapshot(&state, &mut snap_index)?;
    }

    let mut step_index = 0usize;
    while state.t < cfg.t_end - 1e-12 * cfg.t_end {
        let dt = match cfg.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => {
                pde1d::admissible_dt(&state, &cfg.params) * c / pde1d::CFL_LIMIT
            }
        }
        .min(cfg.t_end - state.t);
        state = pde1d::step(&state, &cfg.params, dt)?;
        step_index += 1;
        if step_index % cfg.diag_stride == 0 {
            diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dx, false);
        }
        if cfg.snapshot_stride > 0 && step_index % cfg.snapshot_stride == 0 {
            emit_snapshot(&state, &mut snap_index)?;
        }
    }
    if step_index % cfg.diag_stride != 0 {
        diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dx, false);
    }
    if cfg.snapshot_stride > 0 && step_index % cfg.snapshot_stride != 0 {
        emit_snapshot(&state, &mut snap_index)?;
    }
    warn_domain(&state.w, "outer");
    diag.finish(cfg)
}

fn run_simradial(cfg: &RunConfig) -> Result<SimSeries> {
    let geom = resolve_geometry(cfg)?;
    let l_r = cfg.domain.unwrap_or_else(|| default_domain(cfg));
    let n = cell_count(cfg, l_r)?;
    let grid = RadialGrid::new(l_r, n)?;
    let nodes = grid.nodes();
    let mut state = pde_radial::init_from_analytic_radial(&geom, &cfg.params, &grid)?;

    let mut diag = DiagAccumulator::new();
    let mut snap_index = 0usize;
    let emit_snapshot = |state: &RadialState, idx: &mut usize| -> Result<()> {
        snapshot(&cfg.out_dir, *idx, &nodes, &state.rho, &state.sigma, &state.w)?;
        *idx += 1;
        Ok(())
    };

    diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dr, true);
    if cfg.snapshot_stride > 0 {
        emit_snapshot(&state, &mut snap_index)?;
    }

    let mut step_index = 0usize;
    while state.t < cfg.t_end - 1e-12 * cfg.t_end {
        let dt = match cfg.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(c) => {
                pde_radial::admissible_dt_radial(&state, &cfg.params) * c / pde1d::CFL_LIMIT
            }
        }
        .min(cfg.t_end - state.t);
        state = pde_radial::step_radial(&state, &cfg.params, dt, cfg.radial_derivative)?;
        step_index += 1;
        if step_index % cfg.diag_stride == 0 {
            diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dr, true);
        }
        if cfg.snapshot_stride > 0 && step_index % cfg.snapshot_stride == 0 {
            emit_snapshot(&state, &mut snap_index)?;
        }
    }
    if step_index % cfg.diag_stride != 0 {
        diag.push(cfg, state.t, &nodes, &state.rho, &state.sigma, &state.w, grid.dr, true);
    }
    if cfg.snapshot_stride > 0 && step_index % cfg.snapshot_stride != 0 {
        emit_snapshot(&state, &mut snap_index)?;
    }
    warn_domain(&state.w, "outer radial");
    diag.finish(cfg)
}

fn run_compare(cfg: &RunConfig) -> Result<()> {
    let series = match cfg.dim {
        Dim::One => run_sim1d(cfg)?,
        _ => run_simradial(cfg)?,
    };
    // DAE reference sampled at the PDE diagnostics times: integrate with
    // a step that subdivides the diagnostics interval
    let diag_dt = if series.t.len() > 1 { series.t[1] - series.t[0] } else { cfg.t_end };
    let sub = 4usize;
    let dae = integrate_front(cfg.dim, cfg.r0, &cfg.params, cfg.t_end, diag_dt / sub as f64)?;
    let mut rows = Vec::new();
    for (k, &t) in series.t.iter().enumerate() {
        // nearest DAE sample (the grids align except for the final row)
        let idx = ((t / (diag_dt / sub as f64)).round() as usize).min(dae.t.len() - 1);
        let r_pde = series.front[k];
        let r_dae = dae.r[idx];
        let j_pde = series.jump[k];
        let j_dae = dae.jump[idx];
        rows.push(vec![
            fmt_f64(t),
            fmt_f64(r_pde),
            fmt_f64(r_dae),
            fmt_f64(j_pde),
            fmt_f64(j_dae),
            fmt_f64((r_pde - r_dae).abs()),
            fmt_f64((r_pde - r_dae).abs() / r_dae.abs().max(1e-300)),
            fmt_f64((j_pde - j_dae).abs()),
            fmt_f64((j_pde - j_dae).abs() / j_dae.abs().max(1e-300)),
        ]);
    }
    write_csv(
        &cfg.out_dir.join("discrepancy.csv"),
        "t,R_pde,R_dae,jump_pde,jump_dae,abs_err_R,rel_err_R,abs_err_jump,rel_err_jump",
        &rows,
    )
}

fn sanitize_value(v: f64) -> String {
    let s = format!("{v}");
    s.replace(['.', '+'], "_").replace('-', "m")
}

fn run_sweep(cfg: &RunConfig) -> Result<()> {
    let spec = cfg.sweep.as_ref().expect("checked at resolution time");
    let limit = traveling_wave(&cfg.params).map(|tw| tw.speed);
    let jobs = cfg.jobs.min(spec.values.len()).max(1);

    let results: Mutex<Vec<Option<(f64, f64, f64, f64)>>> =
        Mutex::new(vec![None; spec.values.len()]);
    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= spec.values.len() {
                    break;
                }
                let value = spec.values[i];
                let mut sub = cfg.clone();
                sub.command = spec.run;
                sub.out_dir = cfg.out_dir.join(format!(
                    "{}_{}",
                    spec.parameter.replace('.', "_"),
                    sanitize_value(value)
                ));
                sub.sweep = None;
                let outcome = sub
                    .set_parameter(&spec.parameter, value)
                    .and_then(|()| std::fs::create_dir_all(&sub.out_dir).map_err(Error::from))
                    .and_then(|()| run(&sub));
                match outcome {
                    Ok(series) => {
                        let final_speed = series.tail_mean_speed(0.2);
                        let final_jump = series.tail_median_jump(0.2);
                        let rate = limit
                            .and_then(|v_inf| {
                                fit_rate(&series.t, &series.speed, FitMode::ExponentialInT, v_inf)
                                    .ok()
                            })
                            .map(|f| f.slope)
                            .unwrap_or(f64::NAN);
                        results.lock().unwrap()[i] = Some((value, final_speed, final_jump, rate));
                    }
                    Err(e) => {
                        failures.lock().unwrap().push(format!("value {value}: {e}"));
                    }
                }
            });
        }
    });

    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        return Err(Error::NoAnsatzSolution(format!(
            "sweep entries failed: {}",
            failures.join("; ")
        )));
    }
    let rows: Vec<Vec<String>> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .flatten()
        .map(|(v, s, j, r)| vec![fmt_f64(v), fmt_f64(s), fmt_f64(j), fmt_f64(r)])
        .collect();
    write_csv(
        &cfg.out_dir.join("summary.csv"),
        "value,final_speed,final_jump,fitted_rate",
        &rows,
    )
}
