//! Closed-form solutions: bright and dark solitons, magic-angle plane waves,
//! and the gauge transform between the lab and envelope frames.
//!
//! Both soliton profiles solve the lab-frame equation
//! `i hbar phi_t + c0 S phi_xx + 2 c1 |phi|^2 phi = V phi` exactly:
//!
//! ```text
//! bright (c1 > 0): A e^{i(gamma x - omega t)} sech[A sqrt(c1/(c0 S)) (x - x0 - v t)]
//! dark   (c1 < 0): A e^{i(gamma x - omega t)} tanh[A sqrt(-c1/(c0 S)) (x - x0 - v t)]
//! ```
//!
//! with `v = v1 sqrt(c0 S / hbar)` and `gamma = hbar v / (2 c0 S)`. The carrier
//! frequencies differ between the two kinds; see [`soliton_kinematics`].
//! Positions are lab-frame `x`; the rescaled coordinate
//! `xi = x sqrt(hbar/(c0 S))` exists only inside [`gauge_transform`].

use crate::continuum::{Field, Grid};
use crate::model::{Coefficients, ModelParams, REGIME_C1_TOL};
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

/// Which closed-form soliton family is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolitonKind {
    Bright,
    Dark,
}

impl std::fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolitonKind::Bright => write!(f, "bright"),
            SolitonKind::Dark => write!(f, "dark"),
        }
    }
}

/// The three integration constants that pick one soliton out of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    /// Envelope amplitude `A > 0` (background level for the dark kind).
    pub amplitude: f64,
    /// Dimensionless velocity constant `v1`; the physical velocity is
    /// `v1 sqrt(c0 S / hbar)`.
    pub velocity_coeff: f64,
    /// Initial center `x0` in lattice-constant units.
    pub center: f64,
}

impl SolitonParams {
    pub fn new(amplitude: f64, velocity_coeff: f64, center: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidParameter {
                name: "A",
                value: amplitude,
                reason: "soliton amplitude must be positive and finite",
            });
        }
        if !velocity_coeff.is_finite() {
            return Err(Error::InvalidParameter {
                name: "v1",
                value: velocity_coeff,
                reason: "must be finite",
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x0",
                value: center,
                reason: "must be finite",
            });
        }
        Ok(Self {
            amplitude,
            velocity_coeff,
            center,
        })
    }
}

/// Derived kinematic parameters of one soliton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    /// Group velocity `v = v1 sqrt(c0 S / hbar)`.
    pub velocity: f64,
    /// Carrier wavenumber `gamma = hbar v / (2 c0 S)`.
    pub wavenumber: f64,
    /// Carrier frequency `omega`.
    pub frequency: f64,
    /// Envelope length scale: the sech/tanh argument reaches 1 at one width.
    pub width: f64,
}

/// Evaluate the kinematic closed forms for the requested soliton family.
///
/// Errors with a regime mismatch when the sign of `c1` cannot support the
/// requested kind (bright needs `c1 > 0`, dark `c1 < 0`).
pub fn soliton_kinematics(
    coeffs: &Coefficients,
    params: &ModelParams,
    sp: &SolitonParams,
    kind: SolitonKind,
) -> Result<Kinematics> {
    let c0s = coeffs.c0 * params.spin;
    let velocity = sp.velocity_coeff * (c0s / params.hbar).sqrt();
    let wavenumber = params.hbar * velocity / (2.0 * c0s);
    let kinetic = params.hbar * velocity * velocity / (4.0 * c0s);
    let a = sp.amplitude;
    let s = params.spin;
    match kind {
        SolitonKind::Bright => {
            if coeffs.c1 <= 0.0 {
                return Err(Error::RegimeMismatch(format!(
                    "bright soliton needs c1 > 0, got c1 = {:.6e} (theta past the magic angle?)",
                    coeffs.c1
                )));
            }
            Ok(Kinematics {
                velocity,
                wavenumber,
                frequency: coeffs.c1 * (2.0 * s - a * a) / params.hbar
                    + params.b / params.hbar
                    + kinetic,
                width: (c0s / coeffs.c1).sqrt() / a,
            })
        }
        SolitonKind::Dark => {
            if coeffs.c1 >= 0.0 {
                return Err(Error::RegimeMismatch(format!(
                    "dark soliton needs c1 < 0, got c1 = {:.6e} (theta below the magic angle?)",
                    coeffs.c1
                )));
            }
            Ok(Kinematics {
                velocity,
                wavenumber,
                frequency: 2.0 * coeffs.c1 * (s - a * a) / params.hbar
                    + params.b / params.hbar
                    + kinetic,
                width: (c0s / -coeffs.c1).sqrt() / a,
            })
        }
    }
}

/// Bright-soliton amplitude at one spacetime point. Requires `c1 > 0`.
pub fn bright_soliton(
    coeffs: &Coefficients,
    params: &ModelParams,
    sp: &SolitonParams,
    x: f64,
    t: f64,
) -> Result<C64> {
    let k = soliton_kinematics(coeffs, params, sp, SolitonKind::Bright)?;
    let arg = (x - sp.center - k.velocity * t) / k.width;
    // 1/cosh underflows cleanly to 0 in the far tails; no special casing.
    let envelope = sp.amplitude / arg.cosh();
    let phase = C64::new(0.0, k.wavenumber * x - k.frequency * t).exp();
    Ok(envelope * phase)
}

/// Dark-soliton amplitude at one spacetime point. Requires `c1 < 0`.
pub fn dark_soliton(
    coeffs: &Coefficients,
    params: &ModelParams,
    sp: &SolitonParams,
    x: f64,
    t: f64,
) -> Result<C64> {
    let k = soliton_kinematics(coeffs, params, sp, SolitonKind::Dark)?;
    let arg = (x - sp.center - k.velocity * t) / k.width;
    let envelope = sp.amplitude * arg.tanh();
    let phase = C64::new(0.0, k.wavenumber * x - k.frequency * t).exp();
    Ok(envelope * phase)
}

/// A plane wave `A e^{i(kx - Omega t)}` on the linear dispersion branch
/// `Omega = (c0 S k^2 + V)/hbar`.
///
/// This is an exact solution only where the cubic term vanishes;
/// [`PlaneWave::dispersion_exact`] records whether the coefficients put us
/// there (`|c1|` below the regime tolerance). In nonlinear regimes the wave
/// is still well defined but self-interaction shifts the true frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub amplitude: f64,
    pub wavenumber: f64,
    /// `Omega = (c0 S k^2 + V)/hbar`.
    pub frequency: f64,
    /// True when `c1` is zero to tolerance, i.e. the wave solves the full
    /// equation and not just its linear part.
    pub dispersion_exact: bool,
}

impl PlaneWave {
    pub fn new(coeffs: &Coefficients, params: &ModelParams, k: f64, amplitude: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "wavenumber must be finite",
            });
        }
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "A",
                value: amplitude,
                reason: "plane-wave amplitude must be nonnegative and finite",
            });
        }
        Ok(Self {
            amplitude,
            wavenumber: k,
            frequency: (coeffs.c0 * params.spin * k * k + coeffs.potential) / params.hbar,
            dispersion_exact: coeffs.c1.abs() <= REGIME_C1_TOL * params.j,
        })
    }

    pub fn eval(&self, x: f64, t: f64) -> C64 {
        self.amplitude * C64::new(0.0, self.wavenumber * x - self.frequency * t).exp()
    }
}

/// Convenience one-shot evaluation of [`PlaneWave`].
pub fn plane_wave(
    coeffs: &Coefficients,
    params: &ModelParams,
    k: f64,
    amplitude: f64,
    x: f64,
    t: f64,
) -> Result<C64> {
    Ok(PlaneWave::new(coeffs, params, k, amplitude)?.eval(x, t))
}

/// Direction of the frame change performed by [`gauge_transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeDirection {
    /// Envelope → lab: multiply by `e^{-i chi t}`, stretch coordinates by
    /// `sqrt(c0 S / hbar)`.
    ToLab,
    /// Lab → envelope: the inverse.
    ToEnvelope,
}

/// Coordinate stretch `sqrt(c0 S / hbar)` taking the envelope coordinate xi
/// to the lab coordinate x.
pub fn envelope_scale(coeffs: &Coefficients, params: &ModelParams) -> f64 {
    (coeffs.c0 * params.spin / params.hbar).sqrt()
}

/// Map a field between the lab frame and the envelope frame.
///
/// The phase factor `e^{-i chi t}` (ToLab) removes the constant potential
/// `V = 2 S c1 + B`; the grid is rescaled by [`envelope_scale`]. The phase
/// uses the field's own timestamp. Moduli are unchanged pointwise and the
/// round trip is the identity to machine precision.
pub fn gauge_transform(
    field: &Field,
    coeffs: &Coefficients,
    params: &ModelParams,
    direction: GaugeDirection,
) -> Field {
    let scale = envelope_scale(coeffs, params);
    let (phase_sign, coord) = match direction {
        GaugeDirection::ToLab => (-1.0, scale),
        GaugeDirection::ToEnvelope => (1.0, 1.0 / scale),
    };
    let phase = C64::new(0.0, phase_sign * coeffs.chi * field.time).exp();
    let grid = Grid {
        n_points: field.grid.n_points,
        x_min: field.grid.x_min * coord,
        x_max: field.grid.x_max * coord,
        boundary: field.grid.boundary,
    };
    Field {
        grid,
        values: field.values.iter().map(|v| v * phase).collect(),
        time: field.time,
    }
}
