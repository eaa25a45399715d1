//! Tumor-front propagation under the Brinkman cell-density model.
//!
//! Two coupled views of the same tumor:
//!
//! * the **cell density model**: an advection-reaction PDE for the density
//!   `rho`, with velocity `-C_S grad W` where the potential `W` solves the
//!   screened elliptic (Brinkman) equation `-C_z lap W + W = Sigma(rho)`,
//!   discretized by a three-stage prediction-correction-projection scheme
//!   ([`pde1d`], [`pde_radial`]);
//! * the **free boundary model**: its incompressible limit, solved in closed
//!   form on a three-zone ansatz in 1D/2D/3D symmetry and reduced to a
//!   differential-algebraic system for the front radius ([`freeboundary`]).
//!
//! [`diagnostics`] extracts front position, speed, pressure jump and
//! stability monitors from simulation states, and [`cli`] drives
//! configuration-based runs that emit CSV for every experiment class.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod freeboundary;
pub mod model;
pub mod pde1d;
pub mod pde_radial;
pub mod specfun;

mod flux;
mod tridiag;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unscaled Bessel value overflows at z = {z}; use the scaled variant or a ratio")]
    BesselOverflow { z: f64 },
    #[error("no three-zone solution: {0}")]
    NoAnsatzSolution(String),
    #[error("time step {dt} violates the CFL bound; admissible dt = {admissible:.6e}")]
    CflViolation { dt: f64, admissible: f64 },
    #[error("front not detected")]
    NotDetected,
    #[error("rate fit unreliable: {0}")]
    FitUnreliable(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Spatial symmetry class: planar (1D), cylindrical (2D radial) or
/// spherical (3D radial).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub fn from_u8(d: u8) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {d}"))),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_u8())
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}
