//! Chain parameters, tilt-dependent coupling coefficients, and regime
//! classification.
//!
//! Rotating the spin quantization axis onto the oblique field direction and
//! expanding the exchange anisotropy produces four effective couplings. With
//! `s2 = sin^2 theta`:
//!
//! ```text
//! c0 = J (1 + delta s2 / 2)          hopping
//! c1 = J delta (3 cos^2 theta - 1)/2 cubic nonlinearity
//! c2 = J delta sin(2 theta) / 4      odd (one-magnon) coupling
//! c3 = J delta s2 / 4                pair-creation coupling
//! V  = 2 S c1 + B                    constant envelope potential
//! ```
//!
//! The sign of `c1` decides everything qualitative: `c1 > 0` supports bright
//! solitons, `c1 < 0` dark solitons, and `c1 = 0` — at the magic angle
//! `arccos(sqrt(1/3))` — leaves only linear spin waves.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Magic angle `arccos(sqrt(1/3))` in radians, where `c1` vanishes.
pub fn magic_angle() -> f64 {
    (1.0f64 / 3.0).sqrt().acos()
}

/// `c1` is treated as exactly zero when `|c1| <= REGIME_C1_TOL * J`.
pub const REGIME_C1_TOL: f64 = 1e-12;

/// Admissible field-to-exchange window `lambda = B/J` for the perturbative
/// reduction behind the envelope equations.
pub const LAMBDA_ADMISSIBLE: (f64, f64) = (10.0, 1000.0);

/// Physical parameters of the chain and the applied field.
///
/// Units are fixed by `J` (energy), the lattice constant (length), and
/// `hbar/J` (time); `hbar` is kept explicit so dimensional bookkeeping stays
/// visible in the formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Isotropic exchange, `J > 0`.
    pub j: f64,
    /// Dimensionless exchange anisotropy along the chain axis.
    pub delta: f64,
    /// Tilt of the field against the chain axis, radians.
    pub theta: f64,
    /// Field magnitude in energy units, `B > 0`.
    pub b: f64,
    /// Spin length, `S >= 1/2`.
    pub spin: f64,
    /// Reduced Planck constant; 1 in the natural units used throughout.
    pub hbar: f64,
}

impl ModelParams {
    pub fn new(j: f64, delta: f64, theta: f64, b: f64, spin: f64) -> Result<Self> {
        Self {
            j,
            delta,
            theta,
            b,
            spin,
            hbar: 1.0,
        }
        .validated()
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        let check = |name: &'static str, value: f64| -> Result<()> {
            if value.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                })
            }
        };
        check("J", self.j)?;
        check("delta", self.delta)?;
        check("theta", self.theta)?;
        check("B", self.b)?;
        check("S", self.spin)?;
        check("hbar", self.hbar)?;
        if self.j <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "J",
                value: self.j,
                reason: "exchange must be positive",
            });
        }
        if self.b <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "B",
                value: self.b,
                reason: "field magnitude must be positive",
            });
        }
        if self.spin < 0.5 {
            return Err(Error::InvalidParameter {
                name: "S",
                value: self.spin,
                reason: "spin length must be at least 1/2",
            });
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "hbar",
                value: self.hbar,
                reason: "must be positive",
            });
        }
        Ok(self)
    }
}

/// Effective couplings derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Constant envelope potential `V = 2 S c1 + B`.
    pub potential: f64,
    /// Gauge frequency `chi = V / hbar` removed by the envelope transform.
    pub chi: f64,
    /// The magic angle, for convenience of downstream consumers.
    pub theta_magic: f64,
}

/// Evaluate the four couplings and the constant potential.
pub fn compute_coefficients(params: &ModelParams) -> Result<Coefficients> {
    let (s, c) = params.theta.sin_cos();
    let s2 = s * s;
    let c0 = params.j * (1.0 + params.delta * s2 / 2.0);
    let c1 = params.j * params.delta * (3.0 * c * c - 1.0) / 2.0;
    let c2 = params.j * params.delta * (2.0 * s * c) / 4.0;
    let c3 = params.j * params.delta * s2 / 4.0;
    let potential = 2.0 * params.spin * c1 + params.b;
    Ok(Coefficients {
        c0,
        c1,
        c2,
        c3,
        potential,
        chi: potential / params.hbar,
        theta_magic: magic_angle(),
    })
}

/// Qualitative excitation regime set by the sign of `c1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    Bright,
    Dark,
    Linear,
}

impl std::fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeKind::Bright => write!(f, "bright"),
            RegimeKind::Dark => write!(f, "dark"),
            RegimeKind::Linear => write!(f, "linear"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    /// Field-to-exchange ratio `lambda = B / J`.
    pub lambda: f64,
    /// Whether `lambda` sits inside [`LAMBDA_ADMISSIBLE`].
    pub admissible: bool,
}

/// Classify the excitation regime of a parameter set.
pub fn classify_regime(params: &ModelParams) -> Result<Regime> {
    let coeffs = compute_coefficients(params)?;
    let tol = REGIME_C1_TOL * params.j;
    let kind = if coeffs.c1 > tol {
        RegimeKind::Bright
    } else if coeffs.c1 < -tol {
        RegimeKind::Dark
    } else {
        RegimeKind::Linear
    };
    let lambda = params.b / params.j;
    Ok(Regime {
        kind,
        lambda,
        admissible: (LAMBDA_ADMISSIBLE.0..=LAMBDA_ADMISSIBLE.1).contains(&lambda),
    })
}
