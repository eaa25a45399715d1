//! Measurements taken from simulation states: front position, front
//! speed, pressure jump, volume, convergence-rate fits and the a-priori
//! stability monitors.

use crate::model::ModelParams;
use crate::{Error, Result};

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub front: f64,
    pub speed: f64,
    pub jump: f64,
    pub volume: f64,
    pub l2_rho: f64,
    pub l2_sigma: f64,
    pub max_sigma: f64,
    pub max_w: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,front,speed,jump,volume,l2_rho,l2_sigma,max_sigma,max_w";
}

/// Largest position where `rho` crosses `threshold`, located by linear
/// interpolation between the bracketing cells. Works on any ascending
/// node array (symmetric 1D grids and radial grids alike).
pub fn detect_front(nodes: &[f64], rho: &[f64], threshold: f64) -> Result<f64> {
    let n = nodes.len();
    if n != rho.len() || n == 0 {
        return Err(Error::Domain("front detection needs matching nonempty arrays".into()));
    }
    for j in (0..n - 1).rev() {
        if rho[j] >= threshold && rho[j + 1] < threshold {
            let frac = (rho[j] - threshold) / (rho[j] - rho[j + 1]);
            return Ok(nodes[j] + frac * (nodes[j + 1] - nodes[j]));
        }
    }
    Err(Error::NotDetected)
}

/// Pressure on the inside limit of the front: `Sigma` at the last cell
/// inside the detected front that carries positive pressure. With
/// `median3` the median over that cell and the two further inside is
/// returned, which damps the log-amplified oscillation next to the
/// interface.
pub fn measure_jump(
    nodes: &[f64],
    rho: &[f64],
    sigma: &[f64],
    threshold: f64,
    median3: bool,
) -> Result<f64> {
    let n = nodes.len();
    if n != rho.len() || n != sigma.len() || n == 0 {
        return Err(Error::Domain("jump measurement needs matching nonempty arrays".into()));
    }
    let mut j = (0..n - 1)
        .rev()
        .find(|&j| rho[j] >= threshold && rho[j + 1] < threshold)
        .ok_or(Error::NotDetected)?;
    // walk inward to the last positive-pressure cell
    while j > 0 && sigma[j] <= 0.0 {
        j -= 1;
    }
    if sigma[j] <= 0.0 {
        return Ok(0.0);
    }
    if !median3 || j < 2 {
        return Ok(sigma[j]);
    }
    let mut vals = [sigma[j - 2], sigma[j - 1], sigma[j]];
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals[1])
}

/// Midpoint-rule tumor volume in 1D: `sum(rho) dx`.
pub fn volume_1d(rho: &[f64], dx: f64) -> f64 {
    rho.iter().sum::<f64>() * dx
}

/// Midpoint-rule tumor volume in radial geometry: `2 pi sum(rho r) dr`.
pub fn volume_radial(rho: &[f64], nodes: &[f64], dr: f64) -> f64 {
    2.0 * std::f64::consts::PI
        * rho.iter().zip(nodes).map(|(&q, &r)| q * r).sum::<f64>()
        * dr
}

/// Front speed by centered differences over a sliding window (default
/// width 5 samples), one-sided at the ends. Wide windows suppress the
/// grid-snapping noise of the detected front positions.
pub fn estimate_speed(t: &[f64], front: &[f64], window: usize) -> Vec<f64> {
    let n = t.len().min(front.len());
    let half = (window.max(2) / 2).max(1);
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(n - 1);
            if hi == lo {
                0.0
            } else {
                (front[hi] - front[lo]) / (t[hi] - t[lo])
            }
        })
        .collect()
}

/// Which decay law a rate fit assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// `|speed - limit| ~ A exp(slope * t)`: fit `log` residual against `t`.
    ExponentialInT,
    /// `|speed - limit| ~ A front^slope`: fit `log` residual against
    /// `log front` (slope near -1, prefactor `A` reported).
    AlgebraicInR,
}

/// Least-squares rate fit of a speed residual.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    /// `exp(intercept)`: the fitted amplitude (the `A` of `A/R` in
    /// algebraic mode).
    pub prefactor: f64,
    pub r2fit: f64,
    pub samples: usize,
}

const NOISE_FLOOR: f64 = 1e-13;

/// Fit the decay rate of `|speed - limit|` against time (exponential
/// mode) or against the front position (algebraic mode). Samples at the
/// noise floor are discarded; fewer than 4 usable samples is an error.
pub fn fit_rate(
    abscissa: &[f64],
    speed: &[f64],
    mode: FitMode,
    limit: f64,
) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&x, &v) in abscissa.iter().zip(speed) {
        let res = (v - limit).abs();
        if res <= NOISE_FLOOR {
            continue;
        }
        let xv = match mode {
            FitMode::ExponentialInT => x,
            FitMode::AlgebraicInR => {
                if x <= 0.0 {
                    continue;
                }
                x.ln()
            }
        };
        xs.push(xv);
        ys.push(res.ln());
    }
    let m = xs.len();
    if m < 4 {
        return Err(Error::FitUnreliable(format!(
            "only {m} samples above the noise floor; need at least 4"
        )));
    }
    let mf = m as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|v| v * v).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = mf * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::FitUnreliable("degenerate abscissa".into()));
    }
    let slope = (mf * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / mf;
    let mean_y = sy / mf;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 =
        xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2fit = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit { slope, prefactor: intercept.exp(), r2fit, samples: m })
}

/// Stability monitors of the a-priori analysis, evaluated on one state.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    pub l2_rho: f64,
    pub l2_sigma: f64,
    pub max_sigma: f64,
    pub min_sigma: f64,
    pub max_w: f64,
    pub min_w: f64,
    /// Volume of the positive-pressure set.
    pub support_volume: f64,
    /// `max Sigma > c_p + tol` with `tol = 5 eta + 2 dx` (meaningful for
    /// normalized runs where the bound is `Sigma <= 1`).
    pub sigma_bound_violated: bool,
    /// `max W > c_p + tol`.
    pub w_bound_violated: bool,
}

/// Compute norms, extrema and normalized-case bound flags. `measure` is
/// the quadrature weight per cell (`dx` in 1D, `2 pi r_j dr` radially).
pub fn stability_monitors(
    rho: &[f64],
    sigma: &[f64],
    w: &[f64],
    measure: &dyn Fn(usize) -> f64,
    dx: f64,
    p: &ModelParams,
) -> StabilityReport {
    let mut l2_rho = 0.0;
    let mut l2_sigma = 0.0;
    let mut support = 0.0;
    for j in 0..rho.len() {
        let m = measure(j);
        l2_rho += rho[j] * rho[j] * m;
        l2_sigma += sigma[j] * sigma[j] * m;
        if sigma[j] > 0.0 {
            support += m;
        }
    }
    let max_sigma = sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_sigma = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_w = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_w = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 5.0 * p.eta + 2.0 * dx;
    StabilityReport {
        l2_rho: l2_rho.sqrt(),
        l2_sigma: l2_sigma.sqrt(),
        max_sigma,
        min_sigma,
        max_w,
        min_w,
        support_volume: support,
        sigma_bound_violated: max_sigma > p.c_p + tol,
        w_bound_violated: max_w > p.c_p + tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_of_indicator() {
        let n = 1000;
        let dx = 6.0 / n as f64;
        let nodes: Vec<f64> = (0..n).map(|j| -3.0 + (j as f64 + 0.5) * dx).collect();
        let rho: Vec<f64> =
            nodes.iter().map(|&x| if x.abs() <= 1.5 { 1.0 } else { 0.0 }).collect();
        let f = detect_front(&nodes, &rho, 0.5).unwrap();
        assert!((f - 1.5).abs() <= dx, "front {f}");
    }

    #[test]
    fn front_not_detected() {
        let nodes = [0.5, 1.5, 2.5];
        assert!(matches!(
            detect_front(&nodes, &[0.0, 0.0, 0.0], 0.5),
            Err(Error::NotDetected)
        ));
        assert!(matches!(
            detect_front(&nodes, &[1.0, 1.0, 1.0], 0.5),
            Err(Error::NotDetected)
        ));
    }

    #[test]
    fn front_monotone_under_growth() {
        let n = 400;
        let nodes: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * 0.01).collect();
        let dx = 0.01;
        let small: Vec<f64> = nodes.iter().map(|&x| if x < 1.0 { 1.0 } else { 0.0 }).collect();
        let big: Vec<f64> = nodes.iter().map(|&x| if x < 2.0 { 1.0 } else { 0.0 }).collect();
        let fa = detect_front(&nodes, &small, 0.5).unwrap();
        let fb = detect_front(&nodes, &big, 0.5).unwrap();
        assert!(fa <= fb + dx);
    }

    #[test]
    fn jump_on_clean_and_zero_states() {
        let nodes = [0.25, 0.75, 1.25, 1.75, 2.25];
        let rho = [1.1, 1.05, 1.02, 0.0, 0.0];
        let sigma = [0.9, 0.8, 0.63, 0.0, 0.0];
        let j = measure_jump(&nodes, &rho, &sigma, 0.5, false).unwrap();
        assert_eq!(j, 0.63);
        let j3 = measure_jump(&nodes, &rho, &sigma, 0.5, true).unwrap();
        assert_eq!(j3, 0.8);
        assert!(matches!(
            measure_jump(&nodes, &[0.0; 5], &[0.0; 5], 0.5, false),
            Err(Error::NotDetected)
        ));
    }

    #[test]
    fn volumes() {
        assert!((volume_1d(&[1.0; 7], 0.5) - 3.5).abs() < 1e-15);
        assert_eq!(volume_1d(&[0.0; 7], 0.5), 0.0);
        // rho = 1 on a disc of radius 1: volume ~ pi
        let n = 2000;
        let dr = 2.0 / n as f64;
        let nodes: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dr).collect();
        let rho: Vec<f64> = nodes.iter().map(|&r| if r <= 1.0 { 1.0 } else { 0.0 }).collect();
        let v = volume_radial(&rho, &nodes, dr);
        assert!((v - std::f64::consts::PI).abs() < 0.01, "v = {v}");
    }

    #[test]
    fn speed_of_linear_front_is_exact() {
        let t: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let r: Vec<f64> = t.iter().map(|&t| 0.7 * t + 1.0).collect();
        for v in estimate_speed(&t, &r, 5) {
            assert!((v - 0.7).abs() < 1e-12);
        }
        let flat: Vec<f64> = t.iter().map(|_| 2.0).collect();
        for v in estimate_speed(&t, &flat, 5) {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn speed_of_quadratic_front() {
        let t: Vec<f64> = (0..100).map(|k| 0.05 * k as f64).collect();
        let r: Vec<f64> = t.iter().map(|&t| t * t).collect();
        let v = estimate_speed(&t, &r, 5);
        // centered differencing of t^2 on a uniform grid is exact: 2 t
        for k in 3..97 {
            assert!((v[k] - 2.0 * t[k]).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn fit_recovers_synthetic_exponential() {
        let t: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
        let v_inf = 0.967;
        let speed: Vec<f64> = t.iter().map(|&t| v_inf + (-3.0 * t).exp()).collect();
        let fit = fit_rate(&t, &speed, FitMode::ExponentialInT, v_inf).unwrap();
        assert!((fit.slope + 3.0).abs() < 0.01, "slope {}", fit.slope);
        assert!(fit.r2fit > 0.999);
    }

    #[test]
    fn fit_recovers_synthetic_algebraic() {
        let r: Vec<f64> = (0..200).map(|k| 2.0 + 0.5 * k as f64).collect();
        let v_inf = 1.8586;
        let speed: Vec<f64> = r.iter().map(|&r| v_inf + 2.0 / r).collect();
        let fit = fit_rate(&r, &speed, FitMode::AlgebraicInR, v_inf).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.01, "slope {}", fit.slope);
        assert!((fit.prefactor - 2.0).abs() < 0.02, "prefactor {}", fit.prefactor);
    }

    #[test]
    fn fit_rejects_noise_floor() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let speed: Vec<f64> = t.iter().map(|_| 1.0 + 1e-15).collect();
        assert!(matches!(
            fit_rate(&t, &speed, FitMode::ExponentialInT, 1.0),
            Err(Error::FitUnreliable(_))
        ));
        assert!(matches!(
            fit_rate(&t[..3], &[1.5, 1.4, 1.3], FitMode::ExponentialInT, 1.0),
            Err(Error::FitUnreliable(_))
        ));
    }

    #[test]
    fn monitors_zero_state() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 5.0, 1e-3).unwrap();
        let dx = 0.01;
        let rep = stability_monitors(&[0.0; 10], &[0.0; 10], &[0.0; 10], &|_| dx, dx, &p);
        assert_eq!(rep.l2_rho, 0.0);
        assert_eq!(rep.support_volume, 0.0);
        assert!(!rep.sigma_bound_violated && !rep.w_bound_violated);
    }
}
