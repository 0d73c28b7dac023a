//! Discrete coherent-amplitude dynamics of the chain.
//!
//! Two variants share one stepper:
//!
//! * `Simplified` keeps only the phase-symmetric couplings (hopping, on-site
//!   field, density-density, and the symmetric cubic hopping correction);
//! * `Full` adds the `c2 sqrt(2S)` one-magnon and `c3` pair-creation terms,
//!   which break the U(1) phase symmetry — norm is no longer conserved, only
//!   energy.
//!
//! Both right-hand sides are *defined* as the Wirtinger gradient of the
//! matching energy functional, `i hbar d(alpha_j)/dt = dE/d(alpha_j*)`, built
//! bond by bond. That guarantees exact energy conservation under the flow and
//! pins down every neighbor-sum ambiguity; for interior sites the simplified
//! gradient reproduces the familiar equation of motion
//!
//! ```text
//! i hbar d(alpha_j)/dt = -c0 S (alpha_{j+1} + alpha_{j-1} - 2 alpha_j)
//!   + (2 S c1 + B) alpha_j
//!   + (c0/4) (2|alpha_j|^2 (alpha_{j+1}+alpha_{j-1})
//!             + |alpha_{j+1}|^2 alpha_{j+1} + |alpha_{j-1}|^2 alpha_{j-1}
//!             + (alpha*_{j+1}+alpha*_{j-1}) alpha_j^2)
//!   - (c0+c1) alpha_j (|alpha_{j+1}|^2 + |alpha_{j-1}|^2)
//! ```
//!
//! term for term.

use crate::continuum::{Field, Grid, ModelTag, Trajectory, TrajectoryMeta};
use crate::model::{compute_coefficients, Coefficients, ModelParams};
use crate::{Boundary, C64, Error, Result};
use serde::{Deserialize, Serialize};

/// Default amplitude ceiling; see [`crate::continuum::DEFAULT_BLOWUP_CEILING`].
pub const DEFAULT_BLOWUP_CEILING: f64 = 1e6;

/// Coherent amplitudes of the chain at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    pub amplitudes: Vec<C64>,
    pub time: f64,
    pub boundary: Boundary,
}

impl LatticeState {
    pub fn new(amplitudes: Vec<C64>, boundary: Boundary) -> Result<Self> {
        if amplitudes.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: amplitudes.len() as f64,
                reason: "a chain needs at least 3 sites",
            });
        }
        let state = Self {
            amplitudes,
            time: 0.0,
            boundary,
        };
        state.check_finite(f64::INFINITY)?;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    fn check_finite(&self, ceiling: f64) -> Result<()> {
        check_sites(&self.amplitudes, self.time, ceiling)
    }
}

fn check_sites(amplitudes: &[C64], time: f64, ceiling: f64) -> Result<()> {
    let limit = ceiling * ceiling;
    for (j, a) in amplitudes.iter().enumerate() {
        let m = a.norm_sqr();
        if !m.is_finite() || m > limit {
            return Err(Error::NumericBlowup {
                time,
                location: format!("site {j}"),
                ceiling,
            });
        }
    }
    Ok(())
}

/// Which coupling set drives the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeVariant {
    Simplified,
    Full,
}

impl LatticeVariant {
    pub fn tag(&self) -> ModelTag {
        match self {
            LatticeVariant::Simplified => ModelTag::LatticeSimplified,
            LatticeVariant::Full => ModelTag::LatticeFull,
        }
    }
}

/// One variant bound to one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub variant: LatticeVariant,
    pub coeffs: Coefficients,
    pub params: ModelParams,
}

impl LatticeModel {
    pub fn new(variant: LatticeVariant, params: ModelParams) -> Result<Self> {
        Ok(Self {
            variant,
            coeffs: compute_coefficients(&params)?,
            params,
        })
    }
}

#[inline]
fn neighbor(j: usize, n: usize, boundary: Boundary, right: bool) -> Option<usize> {
    match boundary {
        Boundary::Periodic => Some(if right { (j + 1) % n } else { (j + n - 1) % n }),
        Boundary::FixedEnds => {
            if right {
                (j + 1 < n).then_some(j + 1)
            } else {
                j.checked_sub(1)
            }
        }
    }
}

fn rhs_into(
    variant: LatticeVariant,
    coeffs: &Coefficients,
    params: &ModelParams,
    boundary: Boundary,
    y: &[C64],
    out: &mut [C64],
) {
    let n = y.len();
    let s = params.spin;
    let h = params.hbar;
    let c0 = coeffs.c0;
    let c0s = c0 * s;
    let c01 = c0 + coeffs.c1;
    let full = variant == LatticeVariant::Full;
    let c2s = coeffs.c2 * (2.0 * s).sqrt();
    let c3s = 2.0 * coeffs.c3 * s;
    let inv4s = 1.0 / (4.0 * s);
    for j in 0..n {
        let a = y[j];
        let na = a.norm_sqr();
        let a2 = a * a;
        // On-site field; the 2S(c0+c1) piece rides on the right bond below,
        // because the energy assigns the density-background term to the left
        // site of each bond.
        let mut acc = params.b * a;
        if neighbor(j, n, boundary, true).is_some() {
            acc += 2.0 * s * c01 * a;
        }
        if full {
            acc += c2s * (C64::new(na - 2.0 * s, 0.0) + 0.5 * a2);
        }
        for right in [false, true] {
            let Some(k) = neighbor(j, n, boundary, right) else {
                continue;
            };
            let b = y[k];
            let nb = b.norm_sqr();
            acc += -c0s * b + 0.25 * c0 * (2.0 * na * b + nb * b + b.conj() * a2) - c01 * nb * a;
            if full {
                acc += c2s * (C64::new(nb, 0.0) + 2.0 * b.re * a);
                acc -= c3s * (b.conj() * (1.0 - (2.0 * na + nb) * inv4s) - inv4s * a2 * b);
            }
        }
        // d(alpha)/dt = (1/(i hbar)) dE/d(alpha*) = -i acc / hbar
        out[j] = C64::new(acc.im, -acc.re) / h;
    }
}

fn rhs_checked(state: &LatticeState, model: &LatticeModel, want: LatticeVariant) -> Result<Vec<C64>> {
    if model.variant != want {
        return Err(Error::Validation(format!(
            "model variant mismatch: asked for the {want:?} right-hand side on a {:?} model",
            model.variant
        )));
    }
    state.check_finite(f64::INFINITY)?;
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    rhs_into(
        model.variant,
        &model.coeffs,
        &model.params,
        state.boundary,
        &state.amplitudes,
        &mut out,
    );
    Ok(out)
}

/// Equation of motion of the simplified (phase-symmetric) model.
pub fn rhs_simplified(state: &LatticeState, model: &LatticeModel) -> Result<Vec<C64>> {
    rhs_checked(state, model, LatticeVariant::Simplified)
}

/// Equation of motion of the full model, `i hbar d(alpha)/dt = dE_full/d(alpha*)`.
pub fn rhs_full(state: &LatticeState, model: &LatticeModel) -> Result<Vec<C64>> {
    rhs_checked(state, model, LatticeVariant::Full)
}

fn energy_of(
    variant: LatticeVariant,
    coeffs: &Coefficients,
    params: &ModelParams,
    boundary: Boundary,
    y: &[C64],
) -> f64 {
    let n = y.len();
    let s = params.spin;
    let c0 = coeffs.c0;
    let c0s = c0 * s;
    let c01 = c0 + coeffs.c1;
    let full = variant == LatticeVariant::Full;
    let c2s = coeffs.c2 * (2.0 * s).sqrt();
    let c3s = 2.0 * coeffs.c3 * s;
    let inv4s = 1.0 / (4.0 * s);
    let mut e = 0.0;
    let bonds = match boundary {
        Boundary::Periodic => n,
        Boundary::FixedEnds => n - 1,
    };
    for k in 0..bonds {
        let a = y[k];
        let b = y[(k + 1) % n];
        let na = a.norm_sqr();
        let nb = b.norm_sqr();
        let hop = (a.conj() * b).re;
        e += -2.0 * c0s * hop - c01 * na * (nb - 2.0 * s) + 0.5 * c0 * (na + nb) * hop;
        if full {
            // -2 c3 S * 2 Re[ alpha*_k alpha*_{k+1} (1 - (n_k + n_{k+1})/(4S)) ]
            e += -c3s * 2.0 * (a * b).re * (1.0 - (na + nb) * inv4s);
        }
    }
    for j in 0..n {
        let a = y[j];
        let na = a.norm_sqr();
        e += params.b * na;
        if full {
            let mut occ = 0.0;
            for right in [false, true] {
                if let Some(k) = neighbor(j, n, boundary, right) {
                    occ += y[k].norm_sqr();
                }
            }
            e += c2s * (2.0 * a.re * occ + a.re * na - 4.0 * s * a.re);
        }
    }
    e
}

/// Energy functional of the simplified model (conserved together with norm).
pub fn energy_simplified(state: &LatticeState, model: &LatticeModel) -> Result<f64> {
    if model.variant != LatticeVariant::Simplified {
        return Err(Error::Validation(
            "energy_simplified needs a Simplified model".into(),
        ));
    }
    state.check_finite(f64::INFINITY)?;
    Ok(energy_of(
        model.variant,
        &model.coeffs,
        &model.params,
        state.boundary,
        &state.amplitudes,
    ))
}

/// Energy functional of the full model (conserved; norm is not).
pub fn energy_full(state: &LatticeState, model: &LatticeModel) -> Result<f64> {
    if model.variant != LatticeVariant::Full {
        return Err(Error::Validation("energy_full needs a Full model".into()));
    }
    state.check_finite(f64::INFINITY)?;
    Ok(energy_of(
        model.variant,
        &model.coeffs,
        &model.params,
        state.boundary,
        &state.amplitudes,
    ))
}

/// Total excitation number `sum |alpha_j|^2` — the spin deviation from
/// saturation.
pub fn norm(state: &LatticeState) -> f64 {
    state.amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Hard explicit-stepping bound: the continuum stability formula at `dx = 1`.
pub fn step_bound(state: &LatticeState, model: &LatticeModel) -> f64 {
    let m = state.max_modulus();
    let c = &model.coeffs;
    let p = &model.params;
    p.hbar
        / (4.0 * c.c0 * p.spin
            + c.potential.abs()
            + 2.0 * c.c1.abs() * m * m
            + 2.0 * c.c2.abs() * (2.0 * p.spin).sqrt() * (1.0 + m)
            + 4.0 * c.c3.abs() * p.spin)
}

/// Conservative default step,
/// `dt = 0.1 hbar / (4 c0 S + |V| + 2 |c1| max|alpha|^2)`.
pub fn default_dt(state: &LatticeState, model: &LatticeModel) -> f64 {
    let m = state.max_modulus();
    let c = &model.coeffs;
    let p = &model.params;
    0.1 * p.hbar
        / (4.0 * c.c0 * p.spin + c.potential.abs() + 2.0 * c.c1.abs() * m * m)
}

fn rk4_step_inplace(
    model: &LatticeModel,
    boundary: Boundary,
    y: &mut [C64],
    h: f64,
    buf: &mut [Vec<C64>; 5],
) {
    let n = y.len();
    let hold = boundary == Boundary::FixedEnds;
    let [k1, k2, k3, k4, tmp] = buf;
    let stage = |src: &[C64], out: &mut Vec<C64>| {
        rhs_into(model.variant, &model.coeffs, &model.params, boundary, src, out);
        if hold {
            out[0] = C64::new(0.0, 0.0);
            out[n - 1] = C64::new(0.0, 0.0);
        }
    };
    stage(y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    stage(tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    stage(tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    stage(tmp, k4);
    let w = h / 6.0;
    for i in 0..n {
        y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
}

/// One RK4 step. FixedEnds boundary amplitudes are returned bit-for-bit
/// unchanged.
pub fn step_rk4(state: &LatticeState, model: &LatticeModel, dt: f64) -> Result<LatticeState> {
    let bound = step_bound(state, model);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive and finite",
        });
    }
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, bound });
    }
    state.check_finite(DEFAULT_BLOWUP_CEILING)?;
    let n = state.len();
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut buf = [zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero];
    let mut y = state.amplitudes.clone();
    rk4_step_inplace(model, state.boundary, &mut y, dt, &mut buf);
    let next = LatticeState {
        amplitudes: y,
        time: state.time + dt,
        boundary: state.boundary,
    };
    next.check_finite(DEFAULT_BLOWUP_CEILING)?;
    Ok(next)
}

/// Knobs for [`evolve_with_options`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub blowup_ceiling: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            blowup_ceiling: DEFAULT_BLOWUP_CEILING,
        }
    }
}

/// Integrate the chain, recording states at the requested times (empty
/// request records only `t_end`). Snapshot landing shrinks the final public
/// sub-step so recorded states sit on the true RK4 trajectory.
pub fn evolve(
    model: &LatticeModel,
    initial: &LatticeState,
    dt: f64,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Vec<LatticeState>> {
    evolve_with_options(model, initial, dt, t_end, snapshot_times, &EvolveOptions::default())
}

pub fn evolve_with_options(
    model: &LatticeModel,
    initial: &LatticeState,
    dt: f64,
    t_end: f64,
    snapshot_times: &[f64],
    options: &EvolveOptions,
) -> Result<Vec<LatticeState>> {
    initial.check_finite(options.blowup_ceiling)?;
    let bound = step_bound(initial, model);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive and finite",
        });
    }
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, bound });
    }
    let t_start = initial.time;
    if !(t_end.is_finite() && t_end >= t_start) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "end time must be finite and not precede the initial time",
        });
    }
    let targets: Vec<f64> = if snapshot_times.is_empty() {
        vec![t_end]
    } else {
        for (k, &ts) in snapshot_times.iter().enumerate() {
            if !ts.is_finite() || ts < t_start - 1e-9 || ts > t_end + 1e-9 {
                return Err(Error::Validation(format!(
                    "snapshot time {ts} lies outside [{t_start}, {t_end}]"
                )));
            }
            if k > 0 && ts <= snapshot_times[k - 1] {
                return Err(Error::Validation(
                    "snapshot times must be strictly increasing".into(),
                ));
            }
        }
        snapshot_times.to_vec()
    };

    let n = initial.len();
    let zero = vec![C64::new(0.0, 0.0); n];
    let mut buf = [zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero];
    let mut y = initial.amplitudes.clone();
    let mut t = t_start;
    let mut snapshots = Vec::with_capacity(targets.len());
    for &target in &targets {
        let mut remaining = target - t;
        while remaining > dt * 1e-12 {
            let h = if remaining > dt { dt } else { remaining };
            rk4_step_inplace(model, initial.boundary, &mut y, h, &mut buf);
            t += h;
            remaining -= h;
            check_sites(&y, t, options.blowup_ceiling)?;
        }
        t = target;
        snapshots.push(LatticeState {
            amplitudes: y.clone(),
            time: target,
            boundary: initial.boundary,
        });
    }
    Ok(snapshots)
}

/// View a chain state as a continuum field on the unit-spacing grid starting
/// at `x_min`. Needs at least 16 sites (the continuum grid minimum).
pub fn to_field(state: &LatticeState, x_min: f64) -> Result<Field> {
    let n = state.len();
    let grid = match state.boundary {
        Boundary::Periodic => Grid::new(n, x_min, x_min + n as f64, Boundary::Periodic)?,
        Boundary::FixedEnds => {
            Grid::new(n, x_min, x_min + (n - 1) as f64, Boundary::FixedEnds)?
        }
    };
    Ok(Field {
        grid,
        values: state.amplitudes.clone(),
        time: state.time,
    })
}

/// Package recorded states as a [`Trajectory`] for persistence and
/// observables.
pub fn to_trajectory(
    model: &LatticeModel,
    states: &[LatticeState],
    dt: Option<f64>,
    x_min: f64,
) -> Result<Trajectory> {
    if states.is_empty() {
        return Err(Error::Validation(
            "cannot package an empty list of lattice states".into(),
        ));
    }
    let snapshots = states
        .iter()
        .map(|s| to_field(s, x_min))
        .collect::<Result<Vec<_>>>()?;
    let meta = TrajectoryMeta {
        model: model.variant.tag(),
        params: model.params,
        coeffs: model.coeffs,
        grid: snapshots[0].grid,
        dt,
        carrier_shift: None,
        c2_bracket_times_field: false,
    };
    Trajectory::new(meta, snapshots)
}
