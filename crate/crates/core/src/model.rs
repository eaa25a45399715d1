//! Physical parameters, the constitutive law `Sigma(rho)`, its inverse, the
//! regularized Heaviside switch and the growth term.

use crate::{Error, Result};

/// The four physical constants of the model plus the Heaviside
/// regularization width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Mobility in the velocity law `v = -C_S grad W`.
    pub c_s: f64,
    /// Brinkman viscosity in `-C_z lap W + W = Sigma`.
    pub c_z: f64,
    /// Pressure threshold above which cell division stops.
    pub c_p: f64,
    /// Stiffness of the constitutive law `Sigma = C_nu ln(rho)`.
    pub c_nu: f64,
    /// Width of the regularized Heaviside; `0 < eta < c_p`.
    pub eta: f64,
}

impl ModelParams {
    pub fn new(c_s: f64, c_z: f64, c_p: f64, c_nu: f64, eta: f64) -> Result<Self> {
        let p = ModelParams { c_s, c_z, c_p, c_nu, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_s", self.c_s),
            ("c_z", self.c_z),
            ("c_p", self.c_p),
            ("c_nu", self.c_nu),
            ("eta", self.eta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be strictly positive, got {v}")));
            }
        }
        if self.eta >= self.c_p {
            return Err(Error::Domain(format!(
                "eta must be below c_p, got eta = {} >= c_p = {}",
                self.eta, self.c_p
            )));
        }
        Ok(())
    }
}

/// Elastic pressure: 0 for `rho <= 1`, `c_nu ln(rho)` above.
pub fn sigma_of_rho(rho: f64, p: &ModelParams) -> Result<f64> {
    if rho < 0.0 || rho.is_nan() {
        return Err(Error::Domain(format!("density must be nonnegative, got {rho}")));
    }
    Ok(if rho <= 1.0 { 0.0 } else { p.c_nu * rho.ln() })
}

/// Inverse of the constitutive law on the contact branch `rho >= 1`.
///
/// Points outside the tumor support carry `rho = 0`, not `exp(0) = 1`;
/// mapping those is the caller's job since `Sigma = 0` alone cannot tell
/// the two apart.
pub fn rho_of_sigma(sigma: f64, p: &ModelParams) -> Result<f64> {
    if sigma < 0.0 || sigma.is_nan() {
        return Err(Error::Domain(format!("pressure must be nonnegative, got {sigma}")));
    }
    Ok((sigma / p.c_nu).exp())
}

/// Piecewise-linear regularization of the Heaviside step, width `p.eta`.
pub fn heaviside_eta(u: f64, p: &ModelParams) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= p.eta {
        1.0
    } else {
        u / p.eta
    }
}

/// Growth term `rho * H_eta(c_p - sigma)`: exponential division below the
/// pressure threshold, none above it.
pub fn growth(rho: f64, sigma: f64, p: &ModelParams) -> f64 {
    rho * heaviside_eta(p.c_p - sigma, p)
}
