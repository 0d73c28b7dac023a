//! Method-of-lines integration of the continuum envelope equations on a
//! uniform 1-D grid.
//!
//! Three right-hand sides share one second-order central Laplacian and one
//! classical RK4 stepper:
//!
//! * [`ContinuumModel::Nls`] — the lab-frame cubic equation
//!   `i hbar phi_t = -c0 S phi_xx - 2 c1 |phi|^2 phi + V phi`;
//! * [`ContinuumModel::NlsEnvelope`] — the same dynamics after the gauge
//!   transform, `i psi_t + psi_xixi + (2 c1/hbar)|psi|^2 psi = 0` on the
//!   rescaled coordinate;
//! * [`ContinuumModel::ExtendedNls`] — the richer equation carrying the `c2`
//!   and `c3` couplings, transcribed exactly as derived (including its
//!   dimensionally odd `c2` bracket; see
//!   [`ContinuumSystem::with_c2_bracket_times_field`]).
//!
//! A split-step spectral scheme would be natural for the cubic equation but
//! cannot absorb the `phi*`, `phi^2`, and constant source terms of the
//! extended model, so a single explicit scheme serves all three and keeps the
//! error model uniform.

use crate::model::{compute_coefficients, Coefficients, ModelParams};
use crate::{Boundary, C64, Error, Result};
use serde::{Deserialize, Serialize};

/// Default safety factor applied to [`stability_dt`].
///
/// 0.5 already integrates stably, but the RK4 modulus contraction
/// `(V dt/hbar)^6/72` per step then eats most of the 1e-8 norm-conservation
/// budget over `t = 3` at typical `V ~ 100`; 0.4 restores a ~3x margin.
pub const DEFAULT_SAFETY: f64 = 0.4;

/// Default amplitude ceiling beyond which evolution aborts with a
/// numeric-blowup error.
pub const DEFAULT_BLOWUP_CEILING: f64 = 1e6;

/// Uniform spatial grid in lattice-constant units.
///
/// For [`Boundary::FixedEnds`] the endpoints are both sampled and
/// `dx = (x_max - x_min)/(n_points - 1)`; for [`Boundary::Periodic`] the
/// right endpoint is the wrap point and `dx = (x_max - x_min)/n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub boundary: Boundary,
}

impl Grid {
    pub fn new(n_points: usize, x_min: f64, x_max: f64, boundary: Boundary) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: n_points as f64,
                reason: "grid needs at least 16 points",
            });
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidParameter {
                name: "x_max",
                value: x_max,
                reason: "domain must be finite with x_max > x_min",
            });
        }
        Ok(Self {
            n_points,
            x_min,
            x_max,
            boundary,
        })
    }

    pub fn dx(&self) -> f64 {
        let span = self.x_max - self.x_min;
        match self.boundary {
            Boundary::FixedEnds => span / (self.n_points - 1) as f64,
            Boundary::Periodic => span / self.n_points as f64,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|i| self.x_min + i as f64 * dx).collect()
    }
}

/// Complex field samples on a [`Grid`] at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub time: f64,
}

impl Field {
    pub fn zero(grid: Grid) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); grid.n_points],
            grid,
            time: 0.0,
        }
    }

    pub fn from_fn(grid: Grid, time: f64, mut f: impl FnMut(f64) -> C64) -> Self {
        let values = grid.coordinates().into_iter().map(&mut f).collect();
        Self { grid, values, time }
    }

    /// Like [`Field::from_fn`] for sample generators that can fail.
    pub fn try_from_fn(
        grid: Grid,
        time: f64,
        mut f: impl FnMut(f64) -> Result<C64>,
    ) -> Result<Self> {
        let values = grid
            .coordinates()
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, time })
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    /// Discrete `L2` norm squared, `sum |phi_i|^2 dx` — the conserved charge
    /// of the cubic models.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }
}

/// Which continuum equation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuumModel {
    Nls,
    NlsEnvelope,
    ExtendedNls,
}

impl ContinuumModel {
    pub fn tag(&self) -> ModelTag {
        match self {
            ContinuumModel::Nls => ModelTag::Nls,
            ContinuumModel::NlsEnvelope => ModelTag::NlsEnvelope,
            ContinuumModel::ExtendedNls => ModelTag::ExtendedNls,
        }
    }
}

/// Identifier naming the equation (or closed form) a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    Nls,
    NlsEnvelope,
    ExtendedNls,
    LatticeSimplified,
    LatticeFull,
    AnalyticBright,
    AnalyticDark,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelTag::Nls => "nls",
            ModelTag::NlsEnvelope => "nls-envelope",
            ModelTag::ExtendedNls => "extended-nls",
            ModelTag::LatticeSimplified => "lattice-simplified",
            ModelTag::LatticeFull => "lattice-full",
            ModelTag::AnalyticBright => "analytic-bright",
            ModelTag::AnalyticDark => "analytic-dark",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nls" => Ok(ModelTag::Nls),
            "nls-envelope" => Ok(ModelTag::NlsEnvelope),
            "extended-nls" => Ok(ModelTag::ExtendedNls),
            "lattice-simplified" => Ok(ModelTag::LatticeSimplified),
            "lattice-full" => Ok(ModelTag::LatticeFull),
            "analytic-bright" => Ok(ModelTag::AnalyticBright),
            "analytic-dark" => Ok(ModelTag::AnalyticDark),
            other => Err(Error::Validation(format!(
                "unknown model '{other}' (expected nls, nls-envelope, extended-nls, \
                 lattice-simplified, lattice-full, analytic-bright, or analytic-dark)"
            ))),
        }
    }
}

/// One equation bound to one parameter set, ready to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumSystem {
    pub model: ContinuumModel,
    pub coeffs: Coefficients,
    pub params: ModelParams,
    carrier_shift: f64,
    c2_bracket_times_field: bool,
}

impl ContinuumSystem {
    pub fn new(model: ContinuumModel, params: ModelParams) -> Result<Self> {
        Ok(Self {
            model,
            coeffs: compute_coefficients(&params)?,
            params,
            carrier_shift: 0.0,
            c2_bracket_times_field: false,
        })
    }

    pub(crate) fn from_parts(
        model: ContinuumModel,
        coeffs: Coefficients,
        params: ModelParams,
    ) -> Self {
        Self {
            model,
            coeffs,
            params,
            carrier_shift: 0.0,
            c2_bracket_times_field: false,
        }
    }

    /// Integrate in a frame co-rotating with a carrier of frequency `omega`:
    /// the potential becomes `V - hbar omega`, which multiplies the solution
    /// by the exact global phase `e^{i omega t}` and leaves every modulus
    /// unchanged.
    ///
    /// This makes pinned `FixedEnds` edges consistent with a rotating dark
    /// background (choose `omega` = the dark carrier frequency). Only the
    /// cubic lab-frame model is U(1)-gauge covariant, so the shift is
    /// rejected for the other models.
    pub fn with_carrier_shift(mut self, omega: f64) -> Result<Self> {
        if self.model != ContinuumModel::Nls {
            return Err(Error::Validation(
                "carrier shift is only meaningful for the gauge-covariant cubic model".into(),
            ));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "carrier_shift",
                value: omega,
                reason: "must be finite",
            });
        }
        self.carrier_shift = omega;
        Ok(self)
    }

    pub fn carrier_shift(&self) -> f64 {
        self.carrier_shift
    }

    /// Opt-in variant of the extended model that multiplies the `c2` bracket
    /// by the field, restoring dimensional homogeneity. This is a sensitivity
    /// study, not the transcribed equation; trajectories record the flag.
    pub fn with_c2_bracket_times_field(mut self) -> Result<Self> {
        if self.model != ContinuumModel::ExtendedNls {
            return Err(Error::Validation(
                "the c2-bracket variant only applies to the extended model".into(),
            ));
        }
        self.c2_bracket_times_field = true;
        Ok(self)
    }

    pub fn c2_bracket_times_field(&self) -> bool {
        self.c2_bracket_times_field
    }

    /// Largest stable step for this system on `field`'s grid, scaled by
    /// `safety`. Dispatches on the model because the envelope equation has
    /// unit-normalized kinetics and no constant potential.
    pub fn stability_bound(&self, field: &Field, safety: f64) -> f64 {
        match self.model {
            ContinuumModel::Nls | ContinuumModel::ExtendedNls => {
                stability_dt(&field.grid, &self.coeffs, &self.params, field, safety)
            }
            ContinuumModel::NlsEnvelope => {
                assert!(
                    safety > 0.0 && safety <= 1.0,
                    "safety factor must lie in (0, 1], got {safety}"
                );
                let dx = field.grid.dx();
                let m = field.max_modulus();
                let h = self.params.hbar;
                safety * h / (4.0 * h / (dx * dx) + 2.0 * self.coeffs.c1.abs() * m * m)
            }
        }
    }

    /// Validated right-hand side of this system's equation.
    pub fn rhs(&self, field: &Field) -> Result<Vec<C64>> {
        check_state(&field.values, field.time, f64::INFINITY, |i| {
            format!("x = {:.4} (index {i})", field.grid.x(i))
        })?;
        if field.values.len() != field.grid.n_points {
            return Err(Error::GridMismatch(format!(
                "field holds {} samples but its grid expects {}",
                field.values.len(),
                field.grid.n_points
            )));
        }
        let mut lap = vec![C64::new(0.0, 0.0); field.values.len()];
        let mut out = lap.clone();
        self.rhs_into(&field.grid, &field.values, &mut lap, &mut out);
        Ok(out)
    }

    /// Raw derivative kernel. Edges are NOT zeroed here; the stepper holds
    /// FixedEnds edges by zeroing stage derivatives.
    fn rhs_into(&self, grid: &Grid, y: &[C64], lap: &mut [C64], out: &mut [C64]) {
        laplacian_into(grid, y, lap);
        let h = self.params.hbar;
        let c0s = self.coeffs.c0 * self.params.spin;
        let c1 = self.coeffs.c1;
        match self.model {
            ContinuumModel::Nls => {
                let v_eff = self.coeffs.potential - h * self.carrier_shift;
                for i in 0..y.len() {
                    let a = y[i];
                    let r = -c0s * lap[i] + v_eff * a - 2.0 * c1 * a.norm_sqr() * a;
                    // (1/(i hbar)) r = -i r / hbar
                    out[i] = C64::new(r.im, -r.re) / h;
                }
            }
            ContinuumModel::NlsEnvelope => {
                let g = 2.0 * c1 / h;
                for i in 0..y.len() {
                    let a = y[i];
                    let r = lap[i] + g * a.norm_sqr() * a;
                    // d psi/dt = i (psi_xixi + g |psi|^2 psi)
                    out[i] = C64::new(-r.im, r.re);
                }
            }
            ContinuumModel::ExtendedNls => {
                let v = self.coeffs.potential;
                let c2b = 2.0 * self.coeffs.c2 * (2.0 * self.params.spin).sqrt();
                let c3 = self.coeffs.c3;
                let s = self.params.spin;
                for i in 0..y.len() {
                    let a = y[i];
                    let n = a.norm_sqr();
                    let mut bracket = 1.25 * (a * a) + C64::new(2.5 * n - s, 0.0);
                    if self.c2_bracket_times_field {
                        bracket *= a;
                    }
                    let conj = a.conj();
                    let r = -c0s * lap[i] + v * a - 2.0 * c1 * n * a + c2b * bracket
                        - c3 * (4.0 * s * conj - 3.0 * n * conj - a * a * a);
                    out[i] = C64::new(r.im, -r.re) / h;
                }
            }
        }
    }
}

/// Second-order central Laplacian. Periodic wraps; FixedEnds returns 0 at the
/// two edge points (the stepper holds edges, so their curvature is unused).
pub fn laplacian(field: &Field) -> Field {
    let mut out = vec![C64::new(0.0, 0.0); field.values.len()];
    laplacian_into(&field.grid, &field.values, &mut out);
    Field {
        grid: field.grid,
        values: out,
        time: field.time,
    }
}

fn laplacian_into(grid: &Grid, y: &[C64], out: &mut [C64]) {
    let n = y.len();
    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    for i in 1..n - 1 {
        out[i] = (y[i + 1] + y[i - 1] - 2.0 * y[i]) * inv_dx2;
    }
    match grid.boundary {
        Boundary::Periodic => {
            out[0] = (y[1] + y[n - 1] - 2.0 * y[0]) * inv_dx2;
            out[n - 1] = (y[0] + y[n - 2] - 2.0 * y[n - 1]) * inv_dx2;
        }
        Boundary::FixedEnds => {
            out[0] = C64::new(0.0, 0.0);
            out[n - 1] = C64::new(0.0, 0.0);
        }
    }
}

/// Lab-frame cubic right-hand side
/// `dphi/dt = (1/(i hbar)) [-c0 S lap(phi) + V phi - 2 c1 |phi|^2 phi]`.
pub fn rhs_nls(field: &Field, coeffs: &Coefficients, params: &ModelParams) -> Result<Vec<C64>> {
    ContinuumSystem::from_parts(ContinuumModel::Nls, *coeffs, *params).rhs(field)
}

/// Extended right-hand side with the `c2`/`c3` couplings, transcribed exactly
/// as derived.
pub fn rhs_full_continuum(
    field: &Field,
    coeffs: &Coefficients,
    params: &ModelParams,
) -> Result<Vec<C64>> {
    ContinuumSystem::from_parts(ContinuumModel::ExtendedNls, *coeffs, *params).rhs(field)
}

/// Conservative explicit-stepping bound
/// `dt = safety * hbar / (4 c0 S/dx^2 + |V| + 2|c1| max|phi|^2
///       + 2|c2| sqrt(2S) (1 + max|phi|) + 4|c3| S)`.
pub fn stability_dt(
    grid: &Grid,
    coeffs: &Coefficients,
    params: &ModelParams,
    field: &Field,
    safety: f64,
) -> f64 {
    assert!(
        safety > 0.0 && safety <= 1.0,
        "safety factor must lie in (0, 1], got {safety}"
    );
    let dx = grid.dx();
    let m = field.max_modulus();
    let denom = 4.0 * coeffs.c0 * params.spin / (dx * dx)
        + coeffs.potential.abs()
        + 2.0 * coeffs.c1.abs() * m * m
        + 2.0 * coeffs.c2.abs() * (2.0 * params.spin).sqrt() * (1.0 + m)
        + 4.0 * coeffs.c3.abs() * params.spin;
    safety * params.hbar / denom
}

/// Everything needed to reproduce a trajectory, persisted alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub model: ModelTag,
    pub params: ModelParams,
    pub coeffs: Coefficients,
    pub grid: Grid,
    /// None for analytic renders, which have no integration step.
    pub dt: Option<f64>,
    /// Co-rotating-frame frequency, when one was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_shift: Option<f64>,
    /// Whether the non-standard extended-model variant was active.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub c2_bracket_times_field: bool,
}

/// Ordered snapshots of one run, all on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub snapshots: Vec<Field>,
}

impl Trajectory {
    pub fn new(meta: TrajectoryMeta, snapshots: Vec<Field>) -> Result<Self> {
        for (k, snap) in snapshots.iter().enumerate() {
            if snap.grid != meta.grid {
                return Err(Error::GridMismatch(format!(
                    "snapshot {k} uses a different grid than the trajectory metadata"
                )));
            }
            if snap.values.len() != meta.grid.n_points {
                return Err(Error::GridMismatch(format!(
                    "snapshot {k} holds {} samples, grid expects {}",
                    snap.values.len(),
                    meta.grid.n_points
                )));
            }
            if k > 0 && snap.time <= snapshots[k - 1].time {
                return Err(Error::Validation(format!(
                    "snapshot times must be strictly increasing (snapshot {k} at t = {})",
                    snap.time
                )));
            }
        }
        Ok(Self { meta, snapshots })
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &Field {
        self.snapshots
            .last()
            .expect("a trajectory always records at least one snapshot")
    }
}

/// Knobs for [`evolve_with_options`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Evolution aborts with a numeric-blowup error once any |amplitude|
    /// exceeds this.
    pub blowup_ceiling: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            blowup_ceiling: DEFAULT_BLOWUP_CEILING,
        }
    }
}

/// Integrate `system` from `initial` to `t_end` with classical RK4, recording
/// the field at each requested snapshot time.
///
/// Snapshot times must be strictly increasing within
/// `[initial.time, t_end]`; each is landed on exactly by shrinking the final
/// sub-step, so snapshots sit on the true RK4 trajectory rather than being
/// interpolated. An empty request records only `t_end`. FixedEnds edge
/// samples are held at their initial values bit-for-bit.
pub fn evolve(
    system: &ContinuumSystem,
    initial: &Field,
    dt: f64,
    t_end: f64,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    evolve_with_options(system, initial, dt, t_end, snapshot_times, &EvolveOptions::default())
}

pub fn evolve_with_options(
    system: &ContinuumSystem,
    initial: &Field,
    dt: f64,
    t_end: f64,
    snapshot_times: &[f64],
    options: &EvolveOptions,
) -> Result<Trajectory> {
    let grid = initial.grid;
    if initial.values.len() != grid.n_points {
        return Err(Error::GridMismatch(format!(
            "initial field holds {} samples but its grid expects {}",
            initial.values.len(),
            grid.n_points
        )));
    }
    check_state(&initial.values, initial.time, options.blowup_ceiling, |i| {
        format!("x = {:.4} (index {i})", grid.x(i))
    })?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive and finite",
        });
    }
    let bound = system.stability_bound(initial, 1.0);
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

    let n = grid.n_points;
    let zero = C64::new(0.0, 0.0);
    let mut y = initial.values.clone();
    let mut t = t_start;
    let (mut lap, mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
    );
    let hold_edges = grid.boundary == Boundary::FixedEnds;
    let mut snapshots = Vec::with_capacity(targets.len());

    let mut march_to = |target: f64, y: &mut Vec<C64>, t: &mut f64| -> Result<()> {
        let mut remaining = target - *t;
        while remaining > dt * 1e-12 {
            let h = if remaining > dt { dt } else { remaining };
            rk4_step(
                system, &grid, y, h, hold_edges, &mut lap, &mut k1, &mut k2, &mut k3, &mut k4,
                &mut tmp,
            );
            *t += h;
            remaining -= h;
            check_state(y, *t, options.blowup_ceiling, |i| {
                format!("x = {:.4} (index {i})", grid.x(i))
            })?;
        }
        *t = target;
        Ok(())
    };

    for &target in &targets {
        march_to(target, &mut y, &mut t)?;
        snapshots.push(Field {
            grid,
            values: y.clone(),
            time: target,
        });
    }
    if t_end > t + dt * 1e-12 {
        march_to(t_end, &mut y, &mut t)?;
    }

    let meta = TrajectoryMeta {
        model: system.model.tag(),
        params: system.params,
        coeffs: system.coeffs,
        grid,
        dt: Some(dt),
        carrier_shift: (system.carrier_shift != 0.0).then_some(system.carrier_shift),
        c2_bracket_times_field: system.c2_bracket_times_field,
    };
    Trajectory::new(meta, snapshots)
}

#[allow(clippy::too_many_arguments)]
fn rk4_step(
    system: &ContinuumSystem,
    grid: &Grid,
    y: &mut [C64],
    h: f64,
    hold_edges: bool,
    lap: &mut [C64],
    k1: &mut [C64],
    k2: &mut [C64],
    k3: &mut [C64],
    k4: &mut [C64],
    tmp: &mut [C64],
) {
    let n = y.len();
    let stage = |sys: &ContinuumSystem, src: &[C64], lap: &mut [C64], out: &mut [C64]| {
        sys.rhs_into(grid, src, lap, out);
        if hold_edges {
            out[0] = C64::new(0.0, 0.0);
            out[n - 1] = C64::new(0.0, 0.0);
        }
    };
    stage(system, y, lap, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    stage(system, tmp, lap, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    stage(system, tmp, lap, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    stage(system, tmp, lap, k4);
    let w = h / 6.0;
    for i in 0..n {
        y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
}

/// Scan a state for non-finite or over-ceiling amplitudes.
fn check_state(
    values: &[C64],
    time: f64,
    ceiling: f64,
    describe: impl Fn(usize) -> String,
) -> Result<()> {
    let limit = ceiling * ceiling;
    for (i, v) in values.iter().enumerate() {
        let m = v.norm_sqr();
        if !m.is_finite() || m > limit {
            return Err(Error::NumericBlowup {
                time,
                location: describe(i),
                ceiling,
            });
        }
    }
    Ok(())
}
