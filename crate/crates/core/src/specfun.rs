//! Modified Bessel functions for the closed-form solutions: cylindrical
//! `I0, I1, K0, K1`, their spherical counterparts `i0, i1, k0, k1`, and the
//! exact large-argument ratios the boundary relations are written in.
//!
//! Evaluation strategy:
//! * `I0, I1`: ascending power series for `z <= 15`, the A&S 9.7.1
//!   asymptotic expansion (truncated at its smallest term) above;
//! * `K0, K1`: ascending series for `z <= 2`, the Thompson-Barnett CF2
//!   continued fraction (Steed's algorithm) above;
//! * spherical functions: elementary closed forms with a small-argument
//!   series switch where the closed form cancels.
//!
//! Every function also exists in an exponentially scaled form
//! (`e^{-z} I`, `e^{+z} K`) so ratios like `I1/I0` stay finite for
//! arguments up to 1e4 and beyond.

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// Largest argument for which the unscaled `I` functions fit in an f64.
pub const UNSCALED_I_MAX: f64 = 700.0;

/// A Bessel evaluation carrying both the plain value and the
/// exponentially scaled one (`value * e^{-z}` for `I`/`i`,
/// `value * e^{+z}` for `K`/`k`). The plain value may overflow to
/// infinity (or underflow to zero) where the scaled one is still exact.
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub value: f64,
    pub scaled: f64,
}

fn check_order(order: u8) -> Result<()> {
    if order > 1 {
        return Err(Error::Domain(format!("only orders 0 and 1 are supported, got {order}")));
    }
    Ok(())
}

fn check_nonneg(z: f64) -> Result<()> {
    if z < 0.0 || z.is_nan() {
        return Err(Error::Domain(format!("argument must be nonnegative, got {z}")));
    }
    Ok(())
}

fn check_positive(z: f64) -> Result<()> {
    if z <= 0.0 || z.is_nan() {
        return Err(Error::Domain(format!("argument must be positive, got {z}")));
    }
    Ok(())
}

// --- cylindrical I ---------------------------------------------------------

fn series_i0(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

fn series_i1(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    0.5 * z * sum
}

/// A&S 9.7.1, summed to its smallest term. Valid for z >= ~15.
fn asymptotic_i_scaled(order: u8, z: f64) -> f64 {
    let mu = 4.0 * f64::from(order) * f64::from(order);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev_abs = 1.0f64;
    for k in 1..1000 {
        let kf = k as f64;
        let c = 2.0 * kf - 1.0;
        term *= -(mu - c * c) / (8.0 * kf * z);
        if term.abs() > prev_abs {
            break; // divergent tail reached
        }
        sum += term;
        prev_abs = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

fn i_scaled(order: u8, z: f64) -> f64 {
    if z <= 15.0 {
        let raw = if order == 0 { series_i0(z) } else { series_i1(z) };
        raw * (-z).exp()
    } else {
        asymptotic_i_scaled(order, z)
    }
}

/// `I0` or `I1` with both plain and `e^{-z}`-scaled values.
pub fn bessel_i_eval(order: u8, z: f64) -> Result<BesselEval> {
    check_order(order)?;
    check_nonneg(z)?;
    let scaled = i_scaled(order, z);
    Ok(BesselEval { value: scaled * z.exp(), scaled })
}

/// `I0(z)` or `I1(z)`; errors above `z = 700` where the plain value
/// overflows (use [`bessel_i_scaled`] or [`ratio_large_z`] there).
pub fn bessel_i(order: u8, z: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(z)?;
    if z > UNSCALED_I_MAX {
        return Err(Error::BesselOverflow { z });
    }
    Ok(i_scaled(order, z) * z.exp())
}

/// `e^{-z} I0(z)` or `e^{-z} I1(z)`; finite for all `z >= 0`.
pub fn bessel_i_scaled(order: u8, z: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(z)?;
    Ok(i_scaled(order, z))
}

// --- cylindrical K ---------------------------------------------------------

/// Ascending series for K0 and K1; accurate for z <= ~3.5 before the
/// log cancellation bites.
fn series_k01(z: f64) -> (f64, f64) {
    let q = z * z / 4.0;
    let lg = (z / 2.0).ln();

    // K0 = -(ln(z/2) + gamma) I0 + sum_{k>=1} q^k/(k!)^2 H_k
    let mut term = 1.0;
    let mut hk = 0.0;
    let mut s0 = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * kf);
        hk += 1.0 / kf;
        s0 += term * hk;
        if term * hk < 1e-18 * s0.max(1.0) {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * series_i0(z) + s0;

    // K1 = ln(z/2) I1 + 1/z - (z/4) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    let mut term = 1.0;
    let mut hk = 0.0; // H_k
    let mut hk1 = 1.0; // H_{k+1}
    let mut s1 = -2.0 * EULER_GAMMA + 1.0; // k = 0 term
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        hk1 += 1.0 / (kf + 1.0);
        let p = -2.0 * EULER_GAMMA + hk + hk1;
        s1 += term * p;
        if (term * p).abs() < 1e-18 * s1.abs().max(1.0) {
            break;
        }
    }
    let k1 = lg * series_i1(z) + 1.0 / z - (z / 4.0) * s1;
    (k0, k1)
}

/// Steed's continued fraction CF2 (Thompson & Barnett 1987) for
/// `e^{z} K0(z)` and `e^{z} K1(z)`; converges quickly for z > 1.
fn cf2_k01_scaled(z: f64) -> (f64, f64) {
    let mut a = -0.25; // nu^2 - 1/4 at nu = 0
    let mut b = 2.0 * (z + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut q = 0.25;
    let mut c = 0.25;
    let mut s = 1.0 + q * delta;
    for k in 2..1000u32 {
        let kf = f64::from(k);
        a -= 2.0 * (kf - 1.0);
        b += 2.0;
        d = 1.0 / (a * d + b);
        delta *= b * d - 1.0;
        f += delta;
        let t = (prev - (b - 2.0) * cur) / a;
        prev = cur;
        cur = t;
        c *= -a / kf;
        q += c * t;
        s += q * delta;
        if (q * delta).abs() < s.abs() * 1e-17 {
            break;
        }
    }
    let k0s = (FRAC_PI_2 / z).sqrt() / s;
    let k1s = k0s * (0.5 + z - 0.25 * f) / z;
    (k0s, k1s)
}

fn k_scaled_pair(z: f64) -> (f64, f64) {
    if z <= 2.0 {
        let (k0, k1) = series_k01(z);
        let e = z.exp();
        (k0 * e, k1 * e)
    } else {
        cf2_k01_scaled(z)
    }
}

/// `K0` or `K1` with both plain and `e^{+z}`-scaled values.
pub fn bessel_k_eval(order: u8, z: f64) -> Result<BesselEval> {
    check_order(order)?;
    check_positive(z)?;
    let pair = k_scaled_pair(z);
    let scaled = if order == 0 { pair.0 } else { pair.1 };
    Ok(BesselEval { value: scaled * (-z).exp(), scaled })
}

/// `K0(z)` or `K1(z)` for `z > 0` (diverges at 0).
pub fn bessel_k(order: u8, z: f64) -> Result<f64> {
    bessel_k_eval(order, z).map(|e| e.value)
}

/// `e^{z} K0(z)` or `e^{z} K1(z)`.
pub fn bessel_k_scaled(order: u8, z: f64) -> Result<f64> {
    bessel_k_eval(order, z).map(|e| e.scaled)
}

// --- spherical -------------------------------------------------------------

fn sph_i_scaled(order: u8, z: f64) -> f64 {
    if z < 0.5 {
        // series times e^{-z}; the closed forms cancel near the origin.
        // i0 = sum z^{2k}/(2k+1)!, i1 = sum 2k z^{2k-1}/(2k+1)!
        let z2 = z * z;
        let raw = if order == 0 {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..30 {
                let kf = k as f64;
                term *= z2 / ((2.0 * kf) * (2.0 * kf + 1.0));
                sum += term;
                if term < 1e-18 * sum {
                    break;
                }
            }
            sum
        } else {
            let mut term = z / 3.0; // k = 1 term: 2 z / 3!
            let mut sum = term;
            for k in 2..30 {
                let kf = k as f64;
                // ratio of consecutive terms: z^2 k / ((k-1)(2k)(2k+1))
                term *= z2 * kf / ((kf - 1.0) * (2.0 * kf) * (2.0 * kf + 1.0));
                sum += term;
                if term < 1e-18 * sum {
                    break;
                }
            }
            sum
        };
        raw * (-z).exp()
    } else {
        let em = (-2.0 * z).exp();
        if order == 0 {
            // e^{-z} sinh(z)/z
            (1.0 - em) / (2.0 * z)
        } else {
            // e^{-z} (z cosh z - sinh z)/z^2
            ((z - 1.0) + (z + 1.0) * em) / (2.0 * z * z)
        }
    }
}

/// Spherical `i0`/`i1` with plain and scaled values.
pub fn spherical_i_eval(order: u8, z: f64) -> Result<BesselEval> {
    check_order(order)?;
    check_nonneg(z)?;
    let scaled = sph_i_scaled(order, z);
    Ok(BesselEval { value: scaled * z.exp(), scaled })
}

/// `i0(z) = sinh(z)/z` or `i1(z) = (z cosh z - sinh z)/z^2`.
pub fn spherical_i(order: u8, z: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(z)?;
    if z > UNSCALED_I_MAX {
        return Err(Error::BesselOverflow { z });
    }
    Ok(sph_i_scaled(order, z) * z.exp())
}

/// `e^{-z} i0(z)` or `e^{-z} i1(z)`.
pub fn spherical_i_scaled(order: u8, z: f64) -> Result<f64> {
    check_order(order)?;
    check_nonneg(z)?;
    Ok(sph_i_scaled(order, z))
}

/// Spherical `k0`/`k1` with plain and scaled values.
pub fn spherical_k_eval(order: u8, z: f64) -> Result<BesselEval> {
    check_order(order)?;
    check_positive(z)?;
    let scaled = if order == 0 {
        FRAC_PI_2 / z
    } else {
        FRAC_PI_2 * (z + 1.0) / (z * z)
    };
    Ok(BesselEval { value: scaled * (-z).exp(), scaled })
}

/// `k0(z) = (pi/2) e^{-z}/z` or `k1(z) = (pi/2) e^{-z} (z+1)/z^2`.
pub fn spherical_k(order: u8, z: f64) -> Result<f64> {
    spherical_k_eval(order, z).map(|e| e.value)
}

/// `e^{z} k0(z)` or `e^{z} k1(z)`.
pub fn spherical_k_scaled(order: u8, z: f64) -> Result<f64> {
    spherical_k_eval(order, z).map(|e| e.scaled)
}

// --- ratios ----------------------------------------------------------------

/// The four ratios the boundary relations and front speeds are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    I1OverI0,
    K0OverK1,
    SphericalI1OverI0,
    SphericalK0OverK1,
}

/// Exact Bessel ratio computed from scaled evaluations, never from the
/// truncated large-z expansion; finite for all admissible `z` up to 1e4
/// and beyond.
///
/// Limits at `z = 0`: `I1/I0 -> 0`, `i1/i0 -> 0`, `K0/K1 -> 0`,
/// `k0/k1 -> 0`.
pub fn ratio_large_z(kind: RatioKind, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    match kind {
        RatioKind::I1OverI0 => {
            if z == 0.0 {
                0.0
            } else {
                i_scaled(1, z) / i_scaled(0, z)
            }
        }
        RatioKind::K0OverK1 => {
            if z == 0.0 {
                0.0
            } else {
                let (k0s, k1s) = k_scaled_pair(z);
                k0s / k1s
            }
        }
        RatioKind::SphericalI1OverI0 => {
            // coth(z) - 1/z, series below z = 0.3
            if z < 0.3 {
                let z2 = z * z;
                z / 3.0 - z * z2 / 45.0 + 2.0 * z * z2 * z2 / 945.0 - z * z2 * z2 * z2 / 4725.0
            } else {
                let em = (-2.0 * z).exp();
                (1.0 + em) / (1.0 - em) - 1.0 / z
            }
        }
        RatioKind::SphericalK0OverK1 => z / (z + 1.0),
    }
}
