//! Closed-form three-zone solutions of the incompressible limit model, the
//! algebraic relation linking the inner radius `R1` to the outer radius
//! `R`, the front ODE, and the differential-algebraic integrator built
//! from the two.
//!
//! The space splits into `Omega1` (pressure pinned at `c_p`, radius `r1`),
//! the transition annulus `Omega2` (`0 < Sigma < c_p`, outer radius `r`)
//! and the exterior `Omega3` (`Sigma = 0`, `rho = 0`). Matching `W` and
//! its gradient across both interfaces fixes the profile coefficients and
//! couples `r1` to `r`; the remaining freedom is the front motion
//! `dR/dt = -c_s W'(R)`.
//!
//! All evaluation at large radii goes through exponentially scaled Bessel
//! ratios; no unscaled `I`/`K` value is formed.

use crate::model::ModelParams;
use crate::specfun::{bessel_i_scaled, bessel_k_scaled, ratio_large_z, spherical_i_scaled, RatioKind};
use crate::{Dim, Error, Result};

/// Radii of the three-zone decomposition at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerGeometry {
    /// Inner radius (interface `Gamma1`).
    pub r1: f64,
    /// Outer radius (interface `Gamma2`).
    pub r: f64,
    /// Layer width `r - r1`.
    pub r2: f64,
}

impl LayerGeometry {
    pub fn new(r1: f64, r: f64) -> Result<Self> {
        if !(r1 >= 0.0 && r >= r1 && r.is_finite()) {
            return Err(Error::Domain(format!(
                "layer geometry needs 0 <= r1 <= r, got r1 = {r1}, r = {r}"
            )));
        }
        Ok(LayerGeometry { r1, r, r2: r - r1 })
    }
}

/// Zone tag for one sample point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Omega1,
    Omega2,
    Omega3,
}

impl Zone {
    pub fn index(self) -> u8 {
        match self {
            Zone::Omega1 => 1,
            Zone::Omega2 => 2,
            Zone::Omega3 => 3,
        }
    }
}

/// Coefficients of the piecewise `W` profile. `a` and `b` belong to the
/// `Omega2` branch, `big_a` to the inner branch; `d` scales the outer
/// decay branch and is only available once the outer radius is known.
#[derive(Debug, Clone, Copy)]
pub struct ProfileCoefficients {
    pub a: f64,
    pub b: f64,
    pub big_a: f64,
    pub d: Option<f64>,
    pub dimension: Dim,
    pub eta_used: f64,
    /// Inner radius the coefficients were built for.
    pub r1: f64,
}

/// Sampled `W` and `Sigma` over a grid with zone tags.
#[derive(Debug, Clone)]
pub struct Profile {
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    pub sigma: Vec<f64>,
    pub zone: Vec<Zone>,
    /// Set when the supplied geometry violates the boundary relation, in
    /// which case `W` has a kink at `Gamma2`.
    pub kink_warning: bool,
}

/// Time series of the front DAE: positions, speeds and pressure jumps.
#[derive(Debug, Clone, Default)]
pub struct FrontSeries {
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub r1: Vec<f64>,
    pub speed: Vec<f64>,
    pub jump: Vec<f64>,
}

/// Traveling-wave limit quantities (infinite inner radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWave {
    pub speed: f64,
    pub width: f64,
    pub jump: f64,
}

/// Sign selector for the two roots of the leading-order width equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSign {
    Plus,
    Minus,
}

fn inner_ratio_kind(dim: Dim) -> RatioKind {
    match dim {
        Dim::One => unreachable!("1D uses tanh directly"),
        Dim::Two => RatioKind::I1OverI0,
        Dim::Three => RatioKind::SphericalI1OverI0,
    }
}

/// `I1/I0`-type ratio at `r1/s` in the given dimension; tanh in 1D.
fn inner_slope_ratio(dim: Dim, x: f64) -> f64 {
    match dim {
        Dim::One => x.tanh(),
        _ => ratio_large_z(inner_ratio_kind(dim), x),
    }
}

/// Profile coefficients `a`, `b`, `big_a` for inner radius `r1` at
/// regularization width `eta` (`eta = 0` selects the limit formulas).
/// `d` is attached by [`ProfileCoefficients::with_outer_radius`].
pub fn coefficients(dim: Dim, r1: f64, p: &ModelParams, eta: f64) -> Result<ProfileCoefficients> {
    if r1 < 0.0 || !r1.is_finite() {
        return Err(Error::Domain(format!("inner radius must be nonnegative, got {r1}")));
    }
    if eta < 0.0 || eta >= p.c_p {
        return Err(Error::Domain(format!("need 0 <= eta < c_p, got eta = {eta}")));
    }
    let s = (eta * p.c_s + p.c_z).sqrt();
    let x = r1 / s;
    let cs = p.c_s;
    let (a, b, big_a) = match dim {
        Dim::One => {
            let tau = x.tanh();
            let a = (r1 - s * tau) / cs;
            let b = p.c_p - eta - p.c_z / cs - r1 * r1 / (2.0 * cs) + r1 * s * tau / cs;
            // sech computed without the overflowing cosh
            let sech = 2.0 * (-x).exp() / (1.0 + (-2.0 * x).exp());
            (a, b, -(eta * cs + p.c_z) / cs * sech)
        }
        Dim::Two => {
            if r1 == 0.0 {
                // both terms of `a` vanish, killing the ln r singularity
                (0.0, p.c_p - eta - p.c_z / cs, -(eta * cs + p.c_z) / cs)
            } else {
                let rat = inner_slope_ratio(dim, x);
                let a = r1 * r1 / (2.0 * cs) - r1 * s * rat / cs;
                let b = p.c_p - eta - p.c_z / cs + r1 * r1 / (4.0 * cs)
                    - r1 * r1 * r1.ln() / (2.0 * cs)
                    + r1 * r1.ln() * s * rat / cs;
                let inv_i0 = (-x).exp() / bessel_i_scaled(0, x)?;
                (a, b, -(eta * cs + p.c_z) / cs * inv_i0)
            }
        }
        Dim::Three => {
            if r1 == 0.0 {
                (0.0, p.c_p - eta - p.c_z / cs, -(eta * cs + p.c_z) / cs)
            } else {
                let rat = inner_slope_ratio(dim, x);
                let a = -r1 * r1 * r1 / (3.0 * cs) + r1 * r1 * s * rat / cs;
                let b = p.c_p - eta - p.c_z / cs + r1 * r1 / (2.0 * cs) - r1 * s * rat / cs;
                let inv_i0 = (-x).exp() / spherical_i_scaled(0, x)?;
                (a, b, -(eta * cs + p.c_z) / cs * inv_i0)
            }
        }
    };
    Ok(ProfileCoefficients { a, b, big_a, d: None, dimension: dim, eta_used: eta })
}

impl ProfileCoefficients {
    /// Value of the `Omega2` branch of `W` at radius `x`.
    pub fn w_omega2(&self, x: f64, p: &ModelParams) -> f64 {
        let cs = p.c_s;
        match self.dimension {
            Dim::One => -x * x / (2.0 * cs) + self.a * x + self.b,
            Dim::Two => {
                let log_term = if self.a == 0.0 { 0.0 } else { self.a * x.ln() };
                -x * x / (4.0 * cs) + log_term + self.b
            }
            Dim::Three => {
                let inv_term = if self.a == 0.0 { 0.0 } else { self.a / x };
                -x * x / (6.0 * cs) + inv_term + self.b
            }
        }
    }

    /// Attach the outer-decay coefficient for outer radius `r`. In 2D/3D
    /// this divides by an exponentially small Bessel value and may
    /// overflow for very large `r`; profile evaluation never uses `d`
    /// directly and stays finite regardless.
    pub fn with_outer_radius(mut self, r: f64, p: &ModelParams) -> Self {
        let w_r = self.w_omega2(r, p);
        let sz = p.c_z.sqrt();
        let z = r / sz;
        self.d = Some(match self.dimension {
            Dim::One => w_r,
            Dim::Two => {
                let k0s = bessel_k_scaled(0, z).expect("r > 0");
                w_r * (z - k0s.ln()).exp()
            }
            Dim::Three => {
                // k0(z) = (pi/2) e^{-z} / z
                w_r * z * z.exp() / std::f64::consts::FRAC_PI_2
            }
        });
        self
    }
}

/// Ratio `inner(x/s) / inner(r1/s)` of the zone-1 basis function,
/// computed from scaled evaluations so it stays finite for huge radii.
fn omega1_basis_ratio(dim: Dim, x: f64, r1: f64, s: f64) -> f64 {
    let zx = x / s;
    let z1 = r1 / s;
    match dim {
        Dim::One => {
            // cosh(zx)/cosh(z1)
            (zx - z1).exp() * (1.0 + (-2.0 * zx).exp()) / (1.0 + (-2.0 * z1).exp())
        }
        Dim::Two => {
            let num = bessel_i_scaled(0, zx).expect("zx >= 0");
            let den = bessel_i_scaled(0, z1).expect("z1 >= 0");
            (zx - z1).exp() * num / den
        }
        Dim::Three => {
            let num = spherical_i_scaled(0, zx).expect("zx >= 0");
            let den = spherical_i_scaled(0, z1).expect("z1 >= 0");
            (zx - z1).exp() * num / den
        }
    }
}

/// Ratio `outer(x/sz) / outer(r/sz)` of the zone-3 decay basis.
fn omega3_decay_ratio(dim: Dim, x: f64, r: f64, sz: f64) -> f64 {
    let zx = x / sz;
    let zr = r / sz;
    match dim {
        Dim::One => (zr - zx).exp(),
        Dim::Two => {
            let num = bessel_k_scaled(0, zx).expect("zx > 0");
            let den = bessel_k_scaled(0, zr).expect("zr > 0");
            (zr - zx).exp() * num / den
        }
        Dim::Three => (zr - zx).exp() * r / x,
    }
}

/// `W` at a single point for the given geometry (point taken by absolute
/// value in 1D). Exposed so interface-matching probes can evaluate each
/// closed-form branch arbitrarily close to the interfaces.
pub fn w_at(dim: Dim, geom: &LayerGeometry, p: &ModelParams, eta: f64, x: f64) -> Result<f64> {
    let c = coefficients(dim, geom.r1, p, eta)?;
    Ok(w_at_with(dim, geom, p, eta, &c, x))
}

fn w_at_with(
    dim: Dim,
    geom: &LayerGeometry,
    p: &ModelParams,
    eta: f64,
    c: &ProfileCoefficients,
    x: f64,
) -> f64 {
    let ax = if dim == Dim::One { x.abs() } else { x };
    let s = (eta * p.c_s + p.c_z).sqrt();
    if ax <= geom.r1 {
        p.c_p - (eta * p.c_s + p.c_z) / p.c_s * omega1_basis_ratio(dim, ax, geom.r1, s)
    } else if ax <= geom.r {
        c.w_omega2(ax, p)
    } else {
        c.w_omega2(geom.r, p) * omega3_decay_ratio(dim, ax, geom.r, p.c_z.sqrt())
    }
}

fn sigma_at_with(
    dim: Dim,
    geom: &LayerGeometry,
    p: &ModelParams,
    eta: f64,
    c: &ProfileCoefficients,
    x: f64,
) -> f64 {
    let ax = if dim == Dim::One { x.abs() } else { x };
    let s = (eta * p.c_s + p.c_z).sqrt();
    if ax <= geom.r1 {
        // Sigma = c_p - eta * ratio; exactly c_p in the limit profile
        p.c_p - eta * omega1_basis_ratio(dim, ax, geom.r1, s)
    } else if ax <= geom.r {
        c.w_omega2(ax, p) + p.c_z / p.c_s
    } else {
        0.0
    }
}

/// Piecewise evaluation of `W` and `Sigma` over a grid. Grids whose
/// geometry violates the boundary relation are still evaluated, with
/// [`Profile::kink_warning`] set.
pub fn profile(
    dim: Dim,
    geom: &LayerGeometry,
    p: &ModelParams,
    eta: f64,
    grid: &[f64],
) -> Result<Profile> {
    if dim != Dim::One {
        if let Some(bad) = grid.iter().find(|&&x| x < 0.0) {
            return Err(Error::Domain(format!("radial grid must be nonnegative, got {bad}")));
        }
    }
    let c = coefficients(dim, geom.r1, p, eta)?.with_outer_radius(geom.r, p);
    let mut w = Vec::with_capacity(grid.len());
    let mut sigma = Vec::with_capacity(grid.len());
    let mut zone = Vec::with_capacity(grid.len());
    for &x in grid {
        let ax = if dim == Dim::One { x.abs() } else { x };
        zone.push(if ax <= geom.r1 {
            Zone::Omega1
        } else if ax <= geom.r {
            Zone::Omega2
        } else {
            Zone::Omega3
        });
        w.push(w_at_with(dim, geom, p, eta, &c, x));
        sigma.push(sigma_at_with(dim, geom, p, eta, &c, x));
    }
    let res = relation_residual_eta(dim, geom.r1, geom.r, p, eta);
    let kink_warning = res.abs() > 1e-8 * p.c_p.max(1.0);
    Ok(Profile { grid: grid.to_vec(), w, sigma, zone, kink_warning })
}

/// Residual of the `C^1` matching condition at `Gamma2` for arbitrary
/// regularization width. In 1D this is the quadratic-in-`r2` expression;
/// in 2D/3D it is `LHS - RHS` of the ratio form of the relation.
pub(crate) fn relation_residual_eta(dim: Dim, r1: f64, r: f64, p: &ModelParams, eta: f64) -> f64 {
    let cs = p.c_s;
    let sz = p.c_z.sqrt();
    let s = (eta * cs + p.c_z).sqrt();
    match dim {
        Dim::One => {
            let tau = (r1 / s).tanh();
            let r2 = r - r1;
            r2 * r2
                + 2.0 * (sz + s * tau) * r2
                + 2.0 * sz * s * tau
                + 2.0 * p.c_z
                - 2.0 * cs * (p.c_p - eta)
        }
        Dim::Two => {
            let c = coefficients(dim, r1, p, eta).expect("validated inputs");
            let q = ratio_large_z(RatioKind::K0OverK1, r / sz);
            let lhs = sz * q * (r / (2.0 * cs) - c.a / r);
            lhs - c.w_omega2(r, p)
        }
        Dim::Three => {
            let c = coefficients(dim, r1, p, eta).expect("validated inputs");
            let q = ratio_large_z(RatioKind::SphericalK0OverK1, r / sz);
            let lhs = sz * q * (r / (3.0 * cs) + c.a / (r * r));
            lhs - c.w_omega2(r, p)
        }
    }
}

/// Residual of the limit (`eta = 0`) boundary relation; zero exactly when
/// the profile is `C^1` at `Gamma2`.
pub fn boundary_relation_residual(dim: Dim, r1: f64, r: f64, p: &ModelParams) -> f64 {
    relation_residual_eta(dim, r1, r, p, 0.0)
}

fn residual_scale(p: &ModelParams) -> f64 {
    p.c_p.max(1.0)
}

/// Bisection plus a few Newton polishing steps on a bracketing interval.
/// `f(lo)` and `f(hi)` must have opposite signs.
fn refine_root<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64, scale: f64) -> f64 {
    let mut sign_lo = f_lo.signum();
    let tol_x = 1e-15 * (hi - lo).abs().max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo) < tol_x || fm.abs() < 1e-12 * scale {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == sign_lo {
            lo = mid;
            sign_lo = fm.signum();
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    // Newton with a central-difference derivative
    for _ in 0..3 {
        let h = 1e-7 * x.abs().max(1.0);
        let fp = (f(x + h) - f(x - h)) / (2.0 * h);
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let next = x - f(x) / fp;
        if next.is_finite() {
            x = next;
        }
    }
    x
}

/// Layer width `r2 >= 0` solving the boundary relation for a given inner
/// radius: closed-form quadratic root in 1D, bracketed bisection with
/// Newton polish in 2D/3D.
pub fn solve_r2_given_r1(dim: Dim, r1: f64, p: &ModelParams) -> Result<f64> {
    if r1 < 0.0 || !r1.is_finite() {
        return Err(Error::Domain(format!("inner radius must be nonnegative, got {r1}")));
    }
    match dim {
        Dim::One => {
            let sz = p.c_z.sqrt();
            let tau = (r1 / sz).tanh();
            let half_b = sz * (1.0 + tau);
            let c0 = 2.0 * p.c_z * (1.0 + tau) - 2.0 * p.c_p * p.c_s;
            let disc = half_b * half_b - c0;
            if disc < 0.0 {
                return Err(Error::NoAnsatzSolution(format!(
                    "1D width equation has no real root at r1 = {r1} (c_p c_s too small against c_z)"
                )));
            }
            let r2 = -half_b + disc.sqrt();
            if r2 < 0.0 {
                return Err(Error::NoAnsatzSolution(format!(
                    "1D width equation has no nonnegative root at r1 = {r1}"
                )));
            }
            Ok(r2)
        }
        _ => {
            let r2_max = 10.0 * (2.0 * p.c_p * p.c_s).sqrt();
            let f = |r2: f64| boundary_relation_residual(dim, r1, r1 + r2, p);
            let f_lo = f(0.0);
            let f_hi = f(r2_max);
            let scale = residual_scale(p);
            if f_lo == 0.0 {
                return Ok(0.0);
            }
            if f_lo.signum() == f_hi.signum() {
                if f_lo.abs() <= 1e-10 * scale {
                    return Ok(0.0);
                }
                return Err(Error::NoAnsatzSolution(format!(
                    "no sign change for the {dim}D width in [0, {r2_max:.3}] at r1 = {r1}"
                )));
            }
            Ok(refine_root(&f, 0.0, r2_max, f_lo, scale))
        }
    }
}

/// Inner radius `r1 in [0, r]` solving the boundary relation for a given
/// outer radius. Returns the degenerate `r1 = 0` only when the residual
/// already vanishes there; errors when no root exists (outer radius below
/// the minimal ansatz radius).
pub fn solve_r1_given_r(dim: Dim, r: f64, p: &ModelParams) -> Result<f64> {
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("outer radius must be positive, got {r}")));
    }
    let f = |r1: f64| boundary_relation_residual(dim, r1, r, p);
    let scale = residual_scale(p);
    let f0 = f(0.0);
    if f0.abs() <= 1e-10 * scale {
        return Ok(0.0);
    }
    let fr = f(r);
    if f0.signum() == fr.signum() {
        return Err(Error::NoAnsatzSolution(format!(
            "no inner radius matches outer radius {r} in {dim}D (below the minimal ansatz radius)"
        )));
    }
    Ok(refine_root(&f, 0.0, r, f0, scale).clamp(0.0, r))
}

/// Newton continuation for the DAE integrator: reuse the previous root as
/// the initial guess, falling back to the robust bracketed solve.
fn solve_r1_warm(dim: Dim, r: f64, p: &ModelParams, guess: f64) -> Result<f64> {
    let f = |r1: f64| boundary_relation_residual(dim, r1, r, p);
    let scale = residual_scale(p);
    let mut x = guess.clamp(0.0, r);
    for _ in 0..12 {
        let fx = f(x);
        if fx.abs() <= 1e-11 * scale {
            return Ok(x.clamp(0.0, r));
        }
        let h = 1e-7 * x.max(1.0);
        let fp = (f((x + h).min(r)) - f((x - h).max(0.0))) / ((x + h).min(r) - (x - h).max(0.0));
        if fp == 0.0 || !fp.is_finite() {
            break;
        }
        let next = x - fx / fp;
        if !next.is_finite() || next < 0.0 || next > r {
            break;
        }
        if (next - x).abs() < 1e-14 * r.max(1.0) {
            x = next;
            if f(x).abs() <= 1e-11 * scale {
                return Ok(x);
            }
            break;
        }
        x = next;
    }
    solve_r1_given_r(dim, r, p)
}

/// Front velocity `dR/dt = -c_s W'(R)` evaluated from the `Omega2`
/// branch; written in widths so large radii do not cancel
/// catastrophically.
pub fn front_speed(dim: Dim, r: f64, r1: f64, p: &ModelParams) -> f64 {
    let sz = p.c_z.sqrt();
    let r2 = r - r1;
    match dim {
        Dim::One => r2 + sz * (r1 / sz).tanh(),
        Dim::Two => {
            let rat = inner_slope_ratio(dim, r1 / sz);
            r2 * (r + r1) / (2.0 * r) + (r1 / r) * sz * rat
        }
        Dim::Three => {
            let rat = inner_slope_ratio(dim, r1 / sz);
            r2 * (r * r + r * r1 + r1 * r1) / (3.0 * r * r) + (r1 / r) * (r1 / r) * sz * rat
        }
    }
}

/// Pressure on the inside limit at `Gamma2` (the jump, since `Sigma = 0`
/// just outside).
pub fn pressure_jump(dim: Dim, r: f64, r1: f64, p: &ModelParams) -> f64 {
    let cs = p.c_s;
    let sz = p.c_z.sqrt();
    let r2 = r - r1;
    match dim {
        Dim::One => {
            let tau = (r1 / sz).tanh();
            p.c_p - r2 * r2 / (2.0 * cs) - r2 * sz * tau / cs
        }
        Dim::Two => {
            if r1 == 0.0 {
                return p.c_p - r * r / (4.0 * cs);
            }
            let rat = inner_slope_ratio(dim, r1 / sz);
            let a_cs = r1 * r1 / 2.0 - r1 * sz * rat; // c_s * a
            p.c_p + (-r2 * (r + r1) / 4.0 + a_cs * (r2 / r1).ln_1p()) / cs
        }
        Dim::Three => {
            let rat = inner_slope_ratio(dim, r1 / sz);
            p.c_p - r2 * r2 * (r + 2.0 * r1) / (6.0 * r * cs) - r1 * sz * rat * r2 / (r * cs)
        }
    }
}

/// Traveling-wave limit: speed, layer width and pressure jump for
/// `R1 -> infinity`, or `None` when the transition layer cannot persist
/// (`sqrt(2 c_p c_s) < 2 sqrt(c_z)`).
pub fn traveling_wave(p: &ModelParams) -> Option<TravelingWave> {
    let width = (2.0 * p.c_p * p.c_s).sqrt() - 2.0 * p.c_z.sqrt();
    if width < 0.0 {
        return None;
    }
    Some(TravelingWave {
        speed: (2.0 * p.c_p * p.c_s).sqrt() - p.c_z.sqrt(),
        width,
        jump: (2.0 * p.c_z * p.c_p / p.c_s).sqrt(),
    })
}

/// Leading-order layer width `alpha0^{+-}` of the large-`R1` expansion;
/// the same in every dimension (the `1/R1` correction is dimension
/// dependent and only observable numerically via
/// `solve_r2_given_r1(r1) - alpha0`).
pub fn asymptotic_width(dim: Dim, sign: RootSign, p: &ModelParams) -> f64 {
    let _ = dim;
    let lead = (2.0 * p.c_p * p.c_s).sqrt();
    let shift = 2.0 * p.c_z.sqrt();
    match sign {
        RootSign::Plus => lead - shift,
        RootSign::Minus => -lead - shift,
    }
}

/// Integrate the front DAE with classical RK4, re-solving the boundary
/// relation for `r1` at every stage. Emits one sample per step.
pub fn integrate_front(
    dim: Dim,
    r0: f64,
    p: &ModelParams,
    t_end: f64,
    dt: f64,
) -> Result<FrontSeries> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::Config(format!("front integration needs dt > 0, got {dt}")));
    }
    if t_end < 0.0 {
        return Err(Error::Config(format!("t_end must be nonnegative, got {t_end}")));
    }
    let mut series = FrontSeries::default();
    let mut r = r0;
    let mut r1 = solve_r1_given_r(dim, r0, p)?;
    let mut t = 0.0;

    let push = |t: f64, r: f64, r1: f64, series: &mut FrontSeries| {
        series.t.push(t);
        series.r.push(r);
        series.r1.push(r1);
        series.speed.push(front_speed(dim, r, r1, p));
        series.jump.push(pressure_jump(dim, r, r1, p));
    };
    push(t, r, r1, &mut series);

    let eps = 1e-12 * t_end.max(1.0);
    while t < t_end - eps {
        let h = dt.min(t_end - t);
        let rhs = |radius: f64, guess: f64| -> Result<(f64, f64)> {
            let inner = solve_r1_warm(dim, radius, p, guess)?;
            Ok((front_speed(dim, radius, inner, p), inner))
        };
        let (k1, g1) = rhs(r, r1)?;
        let (k2, g2) = rhs(r + 0.5 * h * k1, g1)?;
        let (k3, g3) = rhs(r + 0.5 * h * k2, g2)?;
        let (k4, g4) = rhs(r + h * k3, g3)?;
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        r1 = solve_r1_warm(dim, r, p, g4)?;
        push(t, r, r1, &mut series);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c_s: f64, c_z: f64, c_p: f64) -> ModelParams {
        ModelParams::new(c_s, c_z, c_p, 200.0, 1e-3).unwrap()
    }

    #[test]
    fn coefficient_a_1d_example() {
        // a = r1 - sqrt(2) tanh(r1/sqrt(2)) at c_s = 1, c_z = 2
        let p = params(1.0, 2.0, 4.0);
        let c = coefficients(Dim::One, 1.2781, &p, 0.0).unwrap();
        let expect = 1.2781 - 2.0f64.sqrt() * (1.2781 / 2.0f64.sqrt()).tanh();
        assert!((c.a - expect).abs() < 1e-14);
        assert!((c.a - 0.262_524_321_760_178_5).abs() < 1e-9);
    }

    #[test]
    fn coefficient_a_saturates_1d() {
        let p = params(1.0, 2.0, 4.0);
        let c = coefficients(Dim::One, 80.0, &p, 0.0).unwrap();
        let expect = (80.0 - 2.0f64.sqrt()) / 1.0;
        assert!((c.a - expect).abs() < 1e-12);
    }

    #[test]
    fn coefficient_a_vanishes_at_origin_3d() {
        let p = params(1.0, 0.02, 2.0);
        let c = coefficients(Dim::Three, 0.0, &p, 0.0).unwrap();
        assert_eq!(c.a, 0.0);
        let c2 = coefficients(Dim::Two, 0.0, &p, 0.0).unwrap();
        assert_eq!(c2.a, 0.0);
    }

    #[test]
    fn big_a_always_negative() {
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            for r1 in [0.0, 0.3, 2.0, 30.0] {
                for eta in [0.0, 1e-3, 0.05] {
                    let p = params(0.7, 0.5, 3.0);
                    let c = coefficients(dim, r1, &p, eta).unwrap();
                    assert!(c.big_a < 0.0, "{dim:?} r1 = {r1} eta = {eta}: {}", c.big_a);
                }
            }
        }
    }

    #[test]
    fn relation_residual_fig2_values() {
        // R = 1.5, R1 = 1.2781 satisfy the 1D relation at
        // c_s = 1, c_z = 2, c_p = 4
        let p = params(1.0, 2.0, 4.0);
        let res = boundary_relation_residual(Dim::One, 1.2781, 1.5, &p);
        assert!(res.abs() < 1e-3, "residual {res}");
    }

    #[test]
    fn solve_r2_fig2() {
        let p = params(1.0, 2.0, 4.0);
        let r2 = solve_r2_given_r1(Dim::One, 1.2781, &p).unwrap();
        assert!((r2 - 0.2219).abs() < 1e-3, "r2 = {r2}");
    }

    #[test]
    fn solve_r2_travelling_limit_1d() {
        let p = params(1.0, 0.2, 1.0);
        let r2 = solve_r2_given_r1(Dim::One, 1e3, &p).unwrap();
        let expect = 2.0f64.sqrt() - 2.0 * 0.2f64.sqrt();
        assert!((r2 - expect).abs() < 1e-12);
        assert!((expect - 0.519_786_37).abs() < 1e-7);
    }

    #[test]
    fn solve_r2_2d_near_asymptotic_width() {
        let p = params(1.0, 0.02, 2.0);
        let r2 = solve_r2_given_r1(Dim::Two, 200.0, &p).unwrap();
        let alpha0 = asymptotic_width(Dim::Two, RootSign::Plus, &p);
        assert!((alpha0 - 1.717_157_287_525_380_9).abs() < 1e-12);
        assert!((r2 - alpha0).abs() <= 0.005, "r2 = {r2}");
        assert!(
            boundary_relation_residual(Dim::Two, 200.0, 200.0 + r2, &p).abs()
                <= 1e-10 * p.c_p.max(1.0)
        );
    }

    #[test]
    fn solve_round_trip() {
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            let p = params(1.0, 0.2, 1.0);
            for r1 in [0.4, 1.3, 5.0, 17.0] {
                let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
                let back = solve_r1_given_r(dim, r1 + r2, &p).unwrap();
                assert!((back - r1).abs() < 1e-8, "{dim:?} r1 = {r1}: back = {back}");
            }
        }
    }

    #[test]
    fn no_ansatz_when_layer_cannot_persist() {
        // normalized constants: sqrt(2) < 2 sqrt(1)
        let p = params(1.0, 1.0, 1.0);
        assert!(matches!(
            solve_r2_given_r1(Dim::One, 1.0, &p),
            Err(Error::NoAnsatzSolution(_))
        ));
        // outer radius below the minimal ansatz radius
        let p = params(1.0, 0.02, 2.0);
        assert!(matches!(solve_r1_given_r(Dim::Two, 1.0, &p), Err(Error::NoAnsatzSolution(_))));
    }

    #[test]
    fn front_speed_examples() {
        let p = params(1.0, 0.2, 1.0);
        // 3D with empty inner zone: R/3
        assert!((front_speed(Dim::Three, 0.9, 0.0, &p) - 0.3).abs() < 1e-15);
        // 1D traveling limit
        let sp = front_speed(Dim::One, 1e3 + 0.5197863713731793, 1e3, &p);
        let expect = 2.0f64.sqrt() - 0.2f64.sqrt();
        assert!((sp - expect).abs() < 1e-12);
        assert!((expect - 0.966_999_966_873_137_5).abs() < 1e-12);
    }

    #[test]
    fn pressure_jump_limits() {
        let p = params(1.0, 0.2, 1.0);
        let r1 = 1e3;
        let r2 = solve_r2_given_r1(Dim::One, r1, &p).unwrap();
        let j = pressure_jump(Dim::One, r1 + r2, r1, &p);
        let expect = (2.0 * 0.2 * 1.0f64).sqrt();
        assert!((j - expect).abs() < 1e-10, "jump = {j}");
        assert!((expect - 0.632_455_532_033_675_9).abs() < 1e-12);
        // Darcy limit: vanishing viscosity kills the jump
        let p = ModelParams::new(1.0, 1e-12, 1.0, 200.0, 1e-13).unwrap();
        let tw = traveling_wave(&p).unwrap();
        assert!(tw.jump < 2e-6);
    }

    #[test]
    fn traveling_wave_cases() {
        let p = params(1.0, 0.2, 1.0);
        let tw = traveling_wave(&p).unwrap();
        assert!((tw.speed - 0.966_999_966_873_137_5).abs() < 1e-12);
        assert!((tw.width - 0.519_786_371_373_179_3).abs() < 1e-12);
        assert!((tw.jump - 0.632_455_532_033_675_9).abs() < 1e-12);
        // borderline: 2 c_p c_s = 4 c_z gives width exactly zero
        let p = params(1.0, 2.0, 4.0);
        let tw = traveling_wave(&p).unwrap();
        assert_eq!(tw.width, 0.0);
        // dominant viscosity: no layer
        let p = params(1.0, 10.0, 1.0);
        assert!(traveling_wave(&p).is_none());
    }

    #[test]
    fn asymptotic_width_signs() {
        let p = params(1.0, 0.02, 2.0);
        let plus = asymptotic_width(Dim::Two, RootSign::Plus, &p);
        let minus = asymptotic_width(Dim::Two, RootSign::Minus, &p);
        assert!((plus - 1.71716).abs() < 1e-5);
        assert!((minus + 2.28284).abs() < 1e-5);
        // dimension independent at leading order
        assert_eq!(plus, asymptotic_width(Dim::One, RootSign::Plus, &p));
        assert_eq!(plus, asymptotic_width(Dim::Three, RootSign::Plus, &p));
    }

    /// One-sided second-order finite-difference derivative probes of the
    /// closed-form profile around an interface.
    fn one_sided_mismatch(
        dim: Dim,
        geom: &LayerGeometry,
        p: &ModelParams,
        eta: f64,
        at: f64,
    ) -> f64 {
        let h = 1e-6;
        let w = |x: f64| w_at(dim, geom, p, eta, x).unwrap();
        let inner = (3.0 * w(at) - 4.0 * w(at - h) + w(at - 2.0 * h)) / (2.0 * h);
        let outer = (-3.0 * w(at) + 4.0 * w(at + h) - w(at + 2.0 * h)) / (2.0 * h);
        (inner - outer).abs()
    }

    #[test]
    fn c1_matching_on_relation() {
        let p = params(1.0, 0.2, 1.0);
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            for r1 in [0.5, 2.0, 9.0] {
                let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
                let geom = LayerGeometry::new(r1, r1 + r2).unwrap();
                let at_inner = one_sided_mismatch(dim, &geom, &p, 0.0, r1);
                let at_outer = one_sided_mismatch(dim, &geom, &p, 0.0, geom.r);
                assert!(at_inner < 1e-7, "{dim:?} r1 = {r1}: Gamma1 mismatch {at_inner}");
                assert!(at_outer < 1e-7, "{dim:?} r1 = {r1}: Gamma2 mismatch {at_outer}");
            }
        }
    }

    #[test]
    fn kink_off_relation() {
        let p = params(1.0, 0.2, 1.0);
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            let r1 = 1.5;
            let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
            let geom = LayerGeometry::new(r1, r1 + r2 + 0.2).unwrap();
            let mismatch = one_sided_mismatch(dim, &geom, &p, 0.0, geom.r);
            assert!(mismatch >= 1e-2, "{dim:?}: kink too small: {mismatch}");
            let grid: Vec<f64> = (0..200).map(|k| k as f64 * 0.02).collect();
            let prof = profile(dim, &geom, &p, 0.0, &grid).unwrap();
            assert!(prof.kink_warning);
        }
    }

    #[test]
    fn profile_zones_and_bounds() {
        let p = params(1.0, 2.0, 4.0);
        let geom = LayerGeometry::new(1.2781, 1.5002).unwrap();
        let grid: Vec<f64> = (0..600).map(|k| -3.0 + k as f64 * 0.01).collect();
        let prof = profile(Dim::One, &geom, &p, 0.0, &grid).unwrap();
        for (i, &x) in prof.grid.iter().enumerate() {
            match prof.zone[i] {
                Zone::Omega1 => {
                    assert!(x.abs() <= geom.r1);
                    assert_eq!(prof.sigma[i], p.c_p);
                }
                Zone::Omega2 => {
                    assert!(prof.sigma[i] > 0.0 && prof.sigma[i] < p.c_p);
                }
                Zone::Omega3 => assert_eq!(prof.sigma[i], 0.0),
            }
            assert!(prof.sigma[i] >= 0.0 && prof.sigma[i] <= p.c_p);
        }
        // W at the center: c_p + A
        let c = coefficients(Dim::One, geom.r1, &p, 0.0).unwrap();
        let w0 = w_at(Dim::One, &geom, &p, 0.0, 0.0).unwrap();
        assert!((w0 - (p.c_p + c.big_a)).abs() < 1e-12);
        // continuity across zone changes
        for i in 1..prof.grid.len() {
            assert!((prof.w[i] - prof.w[i - 1]).abs() < 0.1);
        }
    }

    #[test]
    fn regularized_coefficients_converge_in_eta() {
        // coefficient difference between eta > 0 and the limit is O(eta)
        let p = params(1.0, 0.2, 1.0);
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            let c0 = coefficients(dim, 1.3, &p, 0.0).unwrap();
            let mut prev_gap = f64::INFINITY;
            for eta in [1e-2, 1e-3, 1e-4] {
                let c = coefficients(dim, 1.3, &p, eta).unwrap();
                let gap =
                    (c.a - c0.a).abs().max((c.b - c0.b).abs()).max((c.big_a - c0.big_a).abs());
                assert!(gap < 10.0 * eta, "{dim:?} eta = {eta}: gap = {gap}");
                assert!(gap < prev_gap);
                prev_gap = gap;
            }
        }
    }

    #[test]
    fn exponential_convergence_rate_1d() {
        // |speed - limit| decays like exp(-2 r1 / sqrt(c_z)): stepping r1
        // by sqrt(c_z) multiplies the residual by about e^{-2}
        let p = params(1.0, 0.2, 1.0);
        let sz = 0.2f64.sqrt();
        let v_inf = traveling_wave(&p).unwrap().speed;
        for r1 in [2.0, 2.8, 3.6] {
            let res = |r1: f64| {
                let r2 = solve_r2_given_r1(Dim::One, r1, &p).unwrap();
                (front_speed(Dim::One, r1 + r2, r1, &p) - v_inf).abs()
            };
            let ratio = res(r1 + sz) / res(r1);
            assert!(
                ratio > (-3.0f64).exp() && ratio < (-1.0f64).exp(),
                "r1 = {r1}: ratio = {ratio}"
            );
        }
    }

    #[test]
    fn algebraic_convergence_rate_multi_d() {
        // log-log slope of |r2 - alpha0| against r1 is -1
        let p = params(1.0, 0.02, 2.0);
        for dim in [Dim::Two, Dim::Three] {
            let alpha0 = asymptotic_width(dim, RootSign::Plus, &p);
            let r1s = [50.0, 100.0, 200.0, 400.0];
            let mut logs = Vec::new();
            for &r1 in &r1s {
                let gap = (solve_r2_given_r1(dim, r1, &p).unwrap() - alpha0).abs();
                assert!(gap > 0.0);
                logs.push((r1.ln(), gap.ln()));
            }
            let n = logs.len() as f64;
            let sx: f64 = logs.iter().map(|v| v.0).sum();
            let sy: f64 = logs.iter().map(|v| v.1).sum();
            let sxx: f64 = logs.iter().map(|v| v.0 * v.0).sum();
            let sxy: f64 = logs.iter().map(|v| v.0 * v.1).sum();
            let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            assert!((slope + 1.0).abs() <= 0.1, "{dim:?}: slope = {slope}");
            // the scaled gap approaches a finite nonzero constant
            let c_last = 400.0 * (solve_r2_given_r1(dim, 400.0, &p).unwrap() - alpha0).abs();
            assert!(c_last > 0.1 && c_last < 10.0, "{dim:?}: constant = {c_last}");
        }
    }

    #[test]
    fn integrator_fourth_order() {
        let p = params(1.0, 0.2, 1.0);
        let run = |dt: f64| {
            integrate_front(Dim::One, 1.5, &p, 2.0, dt).unwrap().r.last().copied().unwrap()
        };
        let r_coarse = run(0.2);
        let r_mid = run(0.1);
        let r_fine = run(0.05);
        let ratio = (r_mid - r_coarse).abs() / (r_fine - r_mid).abs();
        assert!(ratio > 8.0 && ratio < 32.0, "convergence ratio {ratio}");
    }

    #[test]
    fn front_series_monotone_and_consistent() {
        let p = params(1.0, 0.2, 1.0);
        let series = integrate_front(Dim::One, 1.5, &p, 5.0, 0.05).unwrap();
        for k in 1..series.t.len() {
            assert!(series.r[k] > series.r[k - 1]);
        }
        for k in 0..series.t.len() {
            let expect = front_speed(Dim::One, series.r[k], series.r1[k], &p);
            assert_eq!(series.speed[k], expect);
        }
        // speed approaches the traveling limit from below
        let v_inf = traveling_wave(&p).unwrap().speed;
        let last = *series.speed.last().unwrap();
        assert!(last < v_inf && (v_inf - last) < 1e-6);
    }

    #[test]
    fn integrate_front_rejects_bad_dt() {
        let p = params(1.0, 0.2, 1.0);
        assert!(matches!(integrate_front(Dim::One, 1.5, &p, 1.0, 0.0), Err(Error::Config(_))));
        assert!(matches!(integrate_front(Dim::One, 1.5, &p, 1.0, -0.1), Err(Error::Config(_))));
    }

    #[test]
    fn dimension_limits_match_traveling_wave_1d() {
        // exponential route: machine-exact at r1 = 1e3 sqrt(c_z)
        let p = params(1.0, 0.2, 1.0);
        let tw = traveling_wave(&p).unwrap();
        let r1 = 1e3 * 0.2f64.sqrt();
        let r2 = solve_r2_given_r1(Dim::One, r1, &p).unwrap();
        assert!((front_speed(Dim::One, r1 + r2, r1, &p) - tw.speed).abs() <= 1e-6);
        assert!((pressure_jump(Dim::One, r1 + r2, r1, &p) - tw.jump).abs() <= 1e-6);
    }

    #[test]
    fn dimension_limits_algebraic_in_multi_d() {
        // 2D/3D converge to the same limits but only at rate 1/r1: the
        // speed gap at r1 = 1e3 sqrt(c_z) is O(1e-4), not 1e-6
        let p = params(1.0, 0.2, 1.0);
        let tw = traveling_wave(&p).unwrap();
        let r1 = 1e3 * 0.2f64.sqrt();
        for dim in [Dim::Two, Dim::Three] {
            let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
            let speed_gap = (front_speed(dim, r1 + r2, r1, &p) - tw.speed).abs();
            let jump_gap = (pressure_jump(dim, r1 + r2, r1, &p) - tw.jump).abs();
            assert!(speed_gap > 1e-5 && speed_gap < 5e-3, "{dim:?}: {speed_gap}");
            assert!(jump_gap < 5e-3, "{dim:?}: {jump_gap}");
            // and the gap shrinks like 1/r1
            let r1b = 4.0 * r1;
            let r2b = solve_r2_given_r1(dim, r1b, &p).unwrap();
            let gap_b = (front_speed(dim, r1b + r2b, r1b, &p) - tw.speed).abs();
            assert!((speed_gap / gap_b - 4.0).abs() < 0.4, "{dim:?}: ratio {}", speed_gap / gap_b);
        }
    }
}
