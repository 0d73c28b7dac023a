//! Soliton dynamics of an anisotropic ferromagnetic spin chain in an oblique
//! magnetic field.
//!
//! The chain is an XXZ-type Heisenberg model with exchange `J`, anisotropy
//! `delta`, spin length `S`, and a uniform field of magnitude `B` tilted by an
//! angle `theta` against the chain axis. After a coherent-state reduction the
//! long-wavelength envelope obeys a cubic Schrödinger equation whose
//! nonlinearity
//!
//! ```text
//! c1 = J * delta * (3 cos^2 theta - 1) / 2
//! ```
//!
//! changes sign at the magic angle `theta0 = arccos(sqrt(1/3))`: below it the
//! chain carries bright solitons, above it dark solitons, and exactly at it
//! only linear spin waves. The crate implements
//!
//! * the tilt-dependent coefficient algebra and regime classification
//!   ([`model`]),
//! * closed-form bright/dark solitons, plane waves, and the gauge map between
//!   the lab and envelope frames ([`analytic`]),
//! * coherent-amplitude dynamics on the discrete chain, in a simplified
//!   (norm-conserving) and a full (norm-pumping) variant, with energy
//!   functionals generating both flows ([`lattice`]),
//! * method-of-lines evolution of the cubic and extended continuum equations
//!   ([`continuum`]),
//! * soliton diagnostics: peak tracking, widths, velocity fits, shape
//!   retention ([`observables`]),
//! * figure-style experiment presets and parameter sweeps ([`harness`]),
//! * config parsing and CSV/JSON trajectory persistence ([`io`]) plus the
//!   command-line front end ([`cli`]).
//!
//! Each major capability has a runnable demonstration under `examples/`:
//!
//! ```text
//! cargo run --release -p spin-soliton --example coefficients
//! cargo run --release -p spin-soliton --example analytic_profiles
//! cargo run --release -p spin-soliton --example bright_soliton
//! cargo run --release -p spin-soliton --example dark_soliton
//! cargo run --release -p spin-soliton --example magic_angle_spin_wave
//! cargo run --release -p spin-soliton --example lattice_conservation
//! cargo run --release -p spin-soliton --example extended_model
//! cargo run --release -p spin-soliton --example lambda_sweep
//! ```
//!
//! The same functionality is scriptable through the thin `spin-soliton`
//! binary (`coeffs`, `simulate`, `compare`, `sweep`, `experiment`).

pub mod analytic;
pub mod cli;
pub mod continuum;
pub mod error;
pub mod harness;
pub mod io;
pub mod lattice;
pub mod model;
pub mod observables;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Complex amplitude type used for every field sample and site amplitude.
pub type C64 = num_complex::Complex64;

/// Boundary handling shared by the discrete chain and the continuum grid.
///
/// `Periodic` identifies site/sample `n` with site/sample `0`. `FixedEnds`
/// holds the two edge samples at their initial values for the whole run;
/// it is the right choice for dark-soliton backgrounds, whose modulus does
/// not vanish at the edges and which therefore cannot close periodically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    FixedEnds,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "periodic"),
            Boundary::FixedEnds => write!(f, "fixed-ends"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "fixed-ends" => Ok(Boundary::FixedEnds),
            other => Err(Error::Validation(format!(
                "unknown boundary `{other}` (expected `periodic` or `fixed-ends`)"
            ))),
        }
    }
}
