//! Diagnostics extracted from trajectories: modulus-based L2 deviations,
//! peak/dip tracking with sub-grid refinement, least-squares velocity fits,
//! widths, and shape-retention scores.
//!
//! Everything here compares *moduli*, never complex values: the carrier
//! rotation (frequency ≈ 108 for the default bright parameters) is physically
//! uninteresting for shape claims, and modulus comparisons make every
//! diagnostic invariant under a global phase.

use serde::{Deserialize, Serialize};

use crate::continuum::{Field, Trajectory};
use crate::{Boundary, Error, Result};

/// Relative modulus spread below which a profile is treated as constant and
/// has no trackable extremum.
const DEGENERATE_SPREAD_TOL: f64 = 1e-12;

/// What to track: the modulus maximum of a bright soliton or the modulus
/// minimum of a dark one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumKind {
    Peak,
    Dip,
}

impl std::fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtremumKind::Peak => write!(f, "peak"),
            ExtremumKind::Dip => write!(f, "dip"),
        }
    }
}

/// One tracked extremum: where the peak (or dip) sat at one snapshot time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackPoint {
    pub time: f64,
    pub position: f64,
    /// Modulus at the refined extremum.
    pub amplitude: f64,
}

/// Bundle of scalar diagnostics for one run, evaluated at the final snapshot
/// (velocity uses the whole track).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonDiagnostics {
    pub peak_position: f64,
    pub peak_amplitude: f64,
    pub fwhm: f64,
    pub center_of_mass: f64,
    pub velocity_estimate: f64,
    /// Dimensionless L2 figure; see [`shape_retention`].
    pub shape_retention_error: f64,
}

/// L2 distance between the moduli of two fields on the same grid:
/// `sqrt(Σ (|a_i| − |b_i|)² dx)`.
///
/// Insensitive to carrier phase by construction. Errors with a grid-mismatch
/// when the two fields do not share a grid.
pub fn l2_deviation(a: &Field, b: &Field) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!(
            "cannot compare fields on different grids: \
             {} points on [{}, {}] ({}) vs {} points on [{}, {}] ({})",
            a.grid.n_points,
            a.grid.x_min,
            a.grid.x_max,
            a.grid.boundary,
            b.grid.n_points,
            b.grid.x_min,
            b.grid.x_max,
            b.grid.boundary,
        )));
    }
    let dx = a.grid.dx();
    let sum: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| {
            let d = u.norm() - v.norm();
            d * d
        })
        .sum();
    Ok((sum * dx).sqrt())
}

/// Locate the extremum of `mods` with ties broken toward smaller index
/// (hence smaller x, since grids are ascending).
fn extremum_index(mods: &[f64], kind: ExtremumKind) -> usize {
    let mut best = 0usize;
    for (i, &m) in mods.iter().enumerate().skip(1) {
        let better = match kind {
            ExtremumKind::Peak => m > mods[best],
            ExtremumKind::Dip => m < mods[best],
        };
        if better {
            best = i;
        }
    }
    best
}

/// Refine an extremum position by fitting a parabola through the sample and
/// its two neighbors. Returns `(offset_in_dx, refined_value)`.
///
/// Periodic grids wrap; on fixed ends an extremum sitting on the boundary is
/// left unrefined. A flat 3-point stencil (zero curvature) is also left
/// unrefined rather than dividing by ~0.
fn parabolic_refine(mods: &[f64], j: usize, boundary: Boundary, scale: f64) -> (f64, f64) {
    let n = mods.len();
    let (jm, jp) = match boundary {
        Boundary::Periodic => ((j + n - 1) % n, (j + 1) % n),
        Boundary::FixedEnds => {
            if j == 0 || j == n - 1 {
                return (0.0, mods[j]);
            }
            (j - 1, j + 1)
        }
    };
    let (ym, y0, yp) = (mods[jm], mods[j], mods[jp]);
    let curvature = ym - 2.0 * y0 + yp;
    if curvature.abs() <= DEGENERATE_SPREAD_TOL * scale {
        return (0.0, y0);
    }
    let offset = (0.5 * (ym - yp) / curvature).clamp(-0.5, 0.5);
    // Parabola value at the vertex.
    let refined = y0 - 0.25 * (ym - yp) * offset;
    (offset, refined)
}

fn extremum_of_field(field: &Field, kind: ExtremumKind) -> Result<(f64, f64)> {
    let mods = field.modulus();
    let max = mods.iter().copied().fold(f64::MIN, f64::max);
    let min = mods.iter().copied().fold(f64::MAX, f64::min);
    let scale = max.max(1.0);
    if max - min <= DEGENERATE_SPREAD_TOL * scale {
        return Err(Error::DegenerateProfile(format!(
            "modulus is constant within {:.1e} at t = {}; no extremum to track",
            DEGENERATE_SPREAD_TOL * scale,
            field.time,
        )));
    }
    let j = extremum_index(&mods, kind);
    let (offset, amplitude) = parabolic_refine(&mods, j, field.grid.boundary, scale);
    Ok((field.grid.x(j) + offset * field.grid.dx(), amplitude))
}

/// Track the modulus extremum through every snapshot of a trajectory.
///
/// Positions are refined by 3-point parabolic interpolation around the
/// extremal sample; ties break toward smaller x. Errors with a
/// degenerate-profile error if any snapshot is constant within `1e-12`
/// (relative to `max(1, max |φ|)`).
pub fn track_peak(traj: &Trajectory, kind: ExtremumKind) -> Result<Vec<TrackPoint>> {
    traj.snapshots
        .iter()
        .map(|field| {
            let (position, amplitude) = extremum_of_field(field, kind)?;
            Ok(TrackPoint {
                time: field.time,
                position,
                amplitude,
            })
        })
        .collect()
}

/// Least-squares slope of position vs time over a track.
///
/// Needs at least 3 points so that a fit is distinguishable from a chord.
pub fn estimate_velocity(track: &[TrackPoint]) -> Result<f64> {
    if track.len() < 3 {
        return Err(Error::Validation(format!(
            "velocity estimate needs at least 3 track points, got {}",
            track.len()
        )));
    }
    let n = track.len() as f64;
    let t_mean = track.iter().map(|p| p.time).sum::<f64>() / n;
    let x_mean = track.iter().map(|p| p.position).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for p in track {
        let dt = p.time - t_mean;
        num += dt * (p.position - x_mean);
        den += dt * dt;
    }
    if den == 0.0 {
        return Err(Error::Validation(
            "velocity estimate is undefined: all track points share one time".into(),
        ));
    }
    Ok(num / den)
}

/// Full width at half maximum, by linear interpolation between samples.
///
/// Bright peaks are measured on `|φ|²`; dark dips on the depth profile
/// `max|φ|² − |φ|²`, which turns the notch into a peak of the same shape.
/// Errors if the profile never crosses the half level on one side (e.g. an
/// extremum sitting on a fixed boundary).
pub fn fwhm(field: &Field, kind: ExtremumKind) -> Result<f64> {
    let mods = field.modulus();
    let intensity: Vec<f64> = mods.iter().map(|m| m * m).collect();
    let y: Vec<f64> = match kind {
        ExtremumKind::Peak => intensity,
        ExtremumKind::Dip => {
            let top = intensity.iter().copied().fold(f64::MIN, f64::max);
            intensity.iter().map(|v| top - v).collect()
        }
    };
    let max = y.iter().copied().fold(f64::MIN, f64::max);
    let min = y.iter().copied().fold(f64::MAX, f64::min);
    if max - min <= DEGENERATE_SPREAD_TOL * max.max(1.0) {
        return Err(Error::DegenerateProfile(format!(
            "profile is flat at t = {}; width is undefined",
            field.time
        )));
    }
    let j = extremum_index(&y, ExtremumKind::Peak);
    let level = 0.5 * max;
    let dx = field.grid.dx();

    let cross = |from: usize, step: isize| -> Option<f64> {
        let n = y.len() as isize;
        let mut i = from as isize;
        loop {
            let next = i + step;
            if next < 0 || next >= n {
                return None;
            }
            if y[next as usize] <= level {
                let (inside, outside) = (y[i as usize], y[next as usize]);
                let frac = (inside - level) / (inside - outside);
                return Some(field.grid.x(i as usize) + frac * dx * step as f64);
            }
            i = next;
        }
    };

    match (cross(j, -1), cross(j, 1)) {
        (Some(left), Some(right)) => Ok(right - left),
        _ => Err(Error::DegenerateProfile(format!(
            "profile never falls to half level on both sides of x = {:.4}; \
             width is undefined",
            field.grid.x(j)
        ))),
    }
}

/// Shape retention figure at the final snapshot: L2 deviation of `|φ|` from
/// `reference` re-centered on the tracked extremum, normalized by the
/// reference profile's own L2 norm on the grid.
///
/// `reference` maps a signed distance from the soliton center to the expected
/// modulus there. Zero means the final profile matches the reference exactly.
pub fn shape_retention(
    traj: &Trajectory,
    kind: ExtremumKind,
    reference: impl Fn(f64) -> f64,
) -> Result<f64> {
    let track = track_peak(traj, kind)?;
    let center = track
        .last()
        .expect("trajectory holds at least one snapshot")
        .position;
    let final_field = traj.last();
    let dx = final_field.grid.dx();
    let mut dev = 0.0;
    let mut norm = 0.0;
    for (i, value) in final_field.values.iter().enumerate() {
        let r = reference(final_field.grid.x(i) - center);
        let d = value.norm() - r;
        dev += d * d;
        norm += r * r;
    }
    if norm == 0.0 {
        return Err(Error::Validation(
            "reference profile is identically zero on the grid; \
             retention is undefined"
                .into(),
        ));
    }
    Ok((dev * dx).sqrt() / (norm * dx).sqrt())
}

fn center_of_mass(field: &Field, kind: ExtremumKind) -> Result<f64> {
    let intensity: Vec<f64> = field.values.iter().map(|v| v.norm_sqr()).collect();
    let weights: Vec<f64> = match kind {
        ExtremumKind::Peak => intensity,
        ExtremumKind::Dip => {
            let top = intensity.iter().copied().fold(f64::MIN, f64::max);
            intensity.iter().map(|v| top - v).collect()
        }
    };
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateProfile(format!(
            "field carries no weight at t = {}; center of mass is undefined",
            field.time
        )));
    }
    let first: f64 = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * field.grid.x(i))
        .sum();
    Ok(first / total)
}

/// Run the full diagnostic bundle over a trajectory.
///
/// Needs at least 3 snapshots so the velocity fit is meaningful. All scalar
/// figures except the velocity refer to the final snapshot.
pub fn diagnose(
    traj: &Trajectory,
    kind: ExtremumKind,
    reference: impl Fn(f64) -> f64,
) -> Result<SolitonDiagnostics> {
    if traj.snapshots.len() < 3 {
        return Err(Error::Validation(format!(
            "diagnostics need at least 3 snapshots for a velocity fit, got {}",
            traj.snapshots.len()
        )));
    }
    let track = track_peak(traj, kind)?;
    let velocity_estimate = estimate_velocity(&track)?;
    let last_point = track.last().expect("non-empty track");
    let final_field = traj.last();
    Ok(SolitonDiagnostics {
        peak_position: last_point.position,
        peak_amplitude: last_point.amplitude,
        fwhm: fwhm(final_field, kind)?,
        center_of_mass: center_of_mass(final_field, kind)?,
        velocity_estimate,
        shape_retention_error: shape_retention(traj, kind, reference)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{
        bright_soliton, dark_soliton, soliton_kinematics, SolitonKind, SolitonParams,
    };
    use crate::continuum::{
        evolve, ContinuumModel, ContinuumSystem, Grid, TrajectoryMeta, DEFAULT_SAFETY,
    };
    use crate::model::{compute_coefficients, Coefficients, ModelParams};
    use crate::C64;
    use proptest::prelude::*;

    fn bright_params() -> (ModelParams, Coefficients, SolitonParams) {
        let params = ModelParams::new(1.0, 0.1, 0.1, 100.0, 10.0).expect("valid params");
        let coeffs = compute_coefficients(&params).expect("coefficients");
        let soliton = SolitonParams::new(1.0, 5.0, 0.0).expect("valid soliton");
        (params, coeffs, soliton)
    }

    fn dark_params() -> (ModelParams, Coefficients, SolitonParams) {
        let params = ModelParams::new(1.0, 0.1, 1.5, 100.0, 10.0).expect("valid params");
        let coeffs = compute_coefficients(&params).expect("coefficients");
        let soliton = SolitonParams::new(1.0, 5.0, 0.0).expect("valid soliton");
        (params, coeffs, soliton)
    }

    fn render_trajectory(
        kind: SolitonKind,
        times: &[f64],
        grid: Grid,
    ) -> (Trajectory, f64, f64, f64) {
        let (params, coeffs, soliton) = match kind {
            SolitonKind::Bright => bright_params(),
            SolitonKind::Dark => dark_params(),
        };
        let kin = soliton_kinematics(&coeffs, &params, &soliton, kind).expect("kinematics");
        let snapshots: Vec<Field> = times
            .iter()
            .map(|&t| {
                Field::try_from_fn(grid, t, |x| match kind {
                    SolitonKind::Bright => bright_soliton(&coeffs, &params, &soliton, x, t),
                    SolitonKind::Dark => dark_soliton(&coeffs, &params, &soliton, x, t),
                })
                .expect("analytic render")
            })
            .collect();
        let meta = TrajectoryMeta {
            model: match kind {
                SolitonKind::Bright => crate::continuum::ModelTag::AnalyticBright,
                SolitonKind::Dark => crate::continuum::ModelTag::AnalyticDark,
            },
            params,
            coeffs,
            grid,
            dt: None,
            carrier_shift: None,
            c2_bracket_times_field: false,
        };
        let traj = Trajectory::new(meta, snapshots).expect("trajectory");
        (traj, kin.velocity, kin.width, soliton.center)
    }

    #[test]
    fn l2_deviation_of_field_with_itself_is_zero() {
        let grid = Grid::new(64, -10.0, 10.0, Boundary::Periodic).expect("grid");
        let f = Field::from_fn(grid, 0.0, |x| C64::new((-x * x).exp(), 0.3 * x));
        assert_eq!(
            l2_deviation(&f, &f).expect("same grid"),
            0.0,
            "a field must be at zero L2 distance from itself"
        );
    }

    #[test]
    fn l2_deviation_ignores_global_phase() {
        let grid = Grid::new(128, -20.0, 20.0, Boundary::Periodic).expect("grid");
        let f = Field::from_fn(grid, 0.0, |x| C64::new((-0.1 * x * x).exp(), 0.0));
        let phase = C64::new(0.0, 0.7).exp();
        let g = Field {
            grid,
            values: f.values.iter().map(|v| v * phase).collect(),
            time: 0.0,
        };
        let dev = l2_deviation(&f, &g).expect("same grid");
        assert!(
            dev < 1e-14,
            "global phase must not register as modulus deviation, got {dev:.3e}"
        );
    }

    #[test]
    fn l2_deviation_of_shifted_soliton_matches_quadrature_oracle() {
        // A unit sech against itself shifted by one width, on a domain wide
        // enough that the tails are negligible at the boundary.
        let grid = Grid::new(4097, -40.0, 40.0, Boundary::FixedEnds).expect("grid");
        let sech = |x: f64| 1.0 / x.cosh();
        let a = Field::from_fn(grid, 0.0, |x| C64::new(sech(x), 0.0));
        let b = Field::from_fn(grid, 0.0, |x| C64::new(sech(x - 1.0), 0.0));
        let dev = l2_deviation(&a, &b).expect("same grid");

        // Independent oracle: composite Simpson quadrature of
        // ∫ (sech(x) − sech(x−1))² dx at 8x the resolution.
        let m = 32768usize;
        let h = 80.0 / m as f64;
        let integrand = |x: f64| {
            let d = sech(x) - sech(x - 1.0);
            d * d
        };
        let mut simpson = integrand(-40.0) + integrand(40.0);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            simpson += w * integrand(-40.0 + i as f64 * h);
        }
        let oracle = (simpson * h / 3.0).sqrt();

        assert!(
            (dev - oracle).abs() <= 1e-3 * oracle,
            "shifted-sech deviation {dev:.6} disagrees with quadrature oracle {oracle:.6}"
        );
    }

    #[test]
    fn l2_deviation_rejects_mismatched_grids() {
        let g1 = Grid::new(64, -10.0, 10.0, Boundary::Periodic).expect("grid");
        let g2 = Grid::new(65, -10.0, 10.0, Boundary::Periodic).expect("grid");
        let g3 = Grid::new(64, -10.0, 10.0, Boundary::FixedEnds).expect("grid");
        let a = Field::zero(g1);
        let b = Field::zero(g2);
        let c = Field::zero(g3);
        assert!(
            matches!(l2_deviation(&a, &b), Err(Error::GridMismatch(_))),
            "differing point counts must be rejected"
        );
        assert!(
            matches!(l2_deviation(&a, &c), Err(Error::GridMismatch(_))),
            "differing boundary kinds must be rejected"
        );
    }

    #[test]
    fn track_peak_follows_analytic_bright_line() {
        let grid = Grid::new(2048, -100.0, 150.0, Boundary::Periodic).expect("grid");
        let times = [0.0, 1.0, 2.0, 3.0];
        let (traj, velocity, _, center) = render_trajectory(SolitonKind::Bright, &times, grid);
        let track = track_peak(&traj, ExtremumKind::Peak).expect("track");
        let dx = grid.dx();
        for point in &track {
            let expected = center + velocity * point.time;
            assert!(
                (point.position - expected).abs() <= 0.5 * dx,
                "bright peak at t = {} sits at {:.4}, expected {:.4} (dx = {:.4})",
                point.time,
                point.position,
                expected,
                dx
            );
            assert!(
                (point.amplitude - 1.0).abs() <= 1e-3,
                "refined peak amplitude {} strays from A = 1",
                point.amplitude
            );
        }
    }

    #[test]
    fn track_peak_follows_analytic_dark_line() {
        let grid = Grid::new(2048, -150.0, 200.0, Boundary::FixedEnds).expect("grid");
        let times = [0.0, 1.0, 2.0, 3.0];
        let (traj, velocity, _, center) = render_trajectory(SolitonKind::Dark, &times, grid);
        let track = track_peak(&traj, ExtremumKind::Dip).expect("track");
        let dx = grid.dx();
        for point in &track {
            let expected = center + velocity * point.time;
            assert!(
                (point.position - expected).abs() <= 0.5 * dx,
                "dark dip at t = {} sits at {:.4}, expected {:.4} (dx = {:.4})",
                point.time,
                point.position,
                expected,
                dx
            );
        }
    }

    #[test]
    fn track_peak_rejects_constant_profile() {
        let grid = Grid::new(64, 0.0, 10.0, Boundary::Periodic).expect("grid");
        let flat = Field::from_fn(grid, 0.0, |_| C64::new(0.5, 0.5));
        let meta = TrajectoryMeta {
            model: crate::continuum::ModelTag::Nls,
            params: bright_params().0,
            coeffs: bright_params().1,
            grid,
            dt: None,
            carrier_shift: None,
            c2_bracket_times_field: false,
        };
        let traj = Trajectory::new(meta, vec![flat]).expect("trajectory");
        assert!(
            matches!(
                track_peak(&traj, ExtremumKind::Peak),
                Err(Error::DegenerateProfile(_))
            ),
            "a constant field has no extremum and must be rejected"
        );
    }

    #[test]
    fn track_peak_breaks_ties_toward_smaller_x() {
        let grid = Grid::new(64, 0.0, 64.0, Boundary::Periodic).expect("grid");
        // Two identical discrete bumps centered on sites 10 and 40.
        let bump = |i: usize, c: usize| {
            let d = i as f64 - c as f64;
            (-0.5 * d * d).exp()
        };
        let values: Vec<C64> = (0..64)
            .map(|i| C64::new(bump(i, 10) + bump(i, 40), 0.0))
            .collect();
        let field = Field {
            grid,
            values,
            time: 0.0,
        };
        let (position, _) = super::extremum_of_field(&field, ExtremumKind::Peak).expect("track");
        assert!(
            (position - grid.x(10)).abs() <= 0.5 * grid.dx(),
            "tie must resolve to the leftmost of two equal peaks, got x = {position:.4}"
        );
    }

    #[test]
    fn velocity_recovers_bright_kinematics() {
        let grid = Grid::new(2048, -100.0, 150.0, Boundary::Periodic).expect("grid");
        let times = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let (traj, velocity, _, _) = render_trajectory(SolitonKind::Bright, &times, grid);
        let track = track_peak(&traj, ExtremumKind::Peak).expect("track");
        let fitted = estimate_velocity(&track).expect("fit");
        assert!(
            (fitted - velocity).abs() <= 1e-2,
            "fitted velocity {fitted:.6} strays from kinematic value {velocity:.6}"
        );
        assert!(
            (fitted - 15.8153).abs() <= 1e-2,
            "fitted velocity {fitted:.6} strays from the frozen value 15.8153"
        );
    }

    #[test]
    fn velocity_of_stationary_soliton_is_zero() {
        let (params, coeffs, _) = bright_params();
        let soliton = SolitonParams::new(1.0, 0.0, 0.0).expect("valid soliton");
        let grid = Grid::new(1024, -80.0, 80.0, Boundary::Periodic).expect("grid");
        let snapshots: Vec<Field> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&t| {
                Field::try_from_fn(grid, t, |x| bright_soliton(&coeffs, &params, &soliton, x, t))
                    .expect("render")
            })
            .collect();
        let meta = TrajectoryMeta {
            model: crate::continuum::ModelTag::AnalyticBright,
            params,
            coeffs,
            grid,
            dt: None,
            carrier_shift: None,
            c2_bracket_times_field: false,
        };
        let traj = Trajectory::new(meta, snapshots).expect("trajectory");
        let track = track_peak(&traj, ExtremumKind::Peak).expect("track");
        let fitted = estimate_velocity(&track).expect("fit");
        assert!(
            fitted.abs() <= 1e-6,
            "a v1 = 0 soliton must not drift, got velocity {fitted:.3e}"
        );
    }

    #[test]
    fn velocity_is_exact_on_collinear_points() {
        let track: Vec<TrackPoint> = [(0.0, 0.0), (1.0, 2.0), (2.0, 4.0)]
            .iter()
            .map(|&(time, position)| TrackPoint {
                time,
                position,
                amplitude: 1.0,
            })
            .collect();
        assert_eq!(
            estimate_velocity(&track).expect("fit"),
            2.0,
            "least squares through exactly collinear points must return the slope exactly"
        );
    }

    #[test]
    fn velocity_rejects_short_tracks() {
        let track = vec![
            TrackPoint {
                time: 0.0,
                position: 0.0,
                amplitude: 1.0,
            };
            2
        ];
        assert!(
            matches!(estimate_velocity(&track), Err(Error::Validation(_))),
            "two points are not enough for a fit"
        );
    }

    #[test]
    fn fwhm_of_bright_profile_matches_closed_form() {
        // FWHM of A²sech²(u/w) is 2·ln(1+√2)·w.
        let (params, coeffs, soliton) = bright_params();
        let kin =
            soliton_kinematics(&coeffs, &params, &soliton, SolitonKind::Bright).expect("kin");
        let half = 8.0 * kin.width;
        let grid = Grid::new(4096, -half, half, Boundary::FixedEnds).expect("grid");
        let field = Field::try_from_fn(grid, 0.0, |x| {
            bright_soliton(&coeffs, &params, &soliton, x, 0.0)
        })
        .expect("render");
        let expected = 2.0 * (1.0 + 2.0f64.sqrt()).ln() * kin.width;
        let measured = fwhm(&field, ExtremumKind::Peak).expect("fwhm");
        assert!(
            (measured - expected).abs() <= 1e-3 * kin.width,
            "bright FWHM {measured:.6} strays from closed form {expected:.6}"
        );
    }

    #[test]
    fn fwhm_of_dark_profile_matches_closed_form() {
        let (params, coeffs, soliton) = dark_params();
        let kin = soliton_kinematics(&coeffs, &params, &soliton, SolitonKind::Dark).expect("kin");
        let half = 8.0 * kin.width;
        let grid = Grid::new(4096, -half, half, Boundary::FixedEnds).expect("grid");
        let field = Field::try_from_fn(grid, 0.0, |x| {
            dark_soliton(&coeffs, &params, &soliton, x, 0.0)
        })
        .expect("render");
        let expected = 2.0 * (1.0 + 2.0f64.sqrt()).ln() * kin.width;
        let measured = fwhm(&field, ExtremumKind::Dip).expect("fwhm");
        assert!(
            (measured - expected).abs() <= 1e-3 * kin.width,
            "dark FWHM {measured:.6} strays from closed form {expected:.6}"
        );
    }

    #[test]
    fn fwhm_rejects_profile_peaked_on_a_boundary() {
        let grid = Grid::new(64, 0.0, 1.0, Boundary::FixedEnds).expect("grid");
        let field = Field::from_fn(grid, 0.0, |x| C64::new(1.0 + x, 0.0));
        assert!(
            matches!(
                fwhm(&field, ExtremumKind::Peak),
                Err(Error::DegenerateProfile(_))
            ),
            "a ramp peaking on the boundary has no right half-crossing"
        );
    }

    #[test]
    fn shape_retention_is_zero_for_identical_reference() {
        // Center the profile exactly on a grid point of a symmetric grid and
        // build both field and reference through |u| so they agree bitwise.
        let grid = Grid::new(129, -64.0, 64.0, Boundary::FixedEnds).expect("grid");
        let profile = |u: f64| 2.0 / u.abs().cosh();
        let snapshots: Vec<Field> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&t| Field::from_fn(grid, t, |x| C64::new(profile(x), 0.0)))
            .collect();
        let meta = TrajectoryMeta {
            model: crate::continuum::ModelTag::Nls,
            params: bright_params().0,
            coeffs: bright_params().1,
            grid,
            dt: None,
            carrier_shift: None,
            c2_bracket_times_field: false,
        };
        let traj = Trajectory::new(meta, snapshots).expect("trajectory");
        let retention = shape_retention(&traj, ExtremumKind::Peak, profile).expect("retention");
        assert_eq!(
            retention, 0.0,
            "a trajectory equal to its reference must score exactly zero"
        );
    }

    #[test]
    fn shape_retention_is_small_for_cubic_model_bright_run() {
        // The bright profile is an exact traveling solution of the cubic
        // model, so a short run must preserve its modulus shape.
        let (params, coeffs, soliton) = bright_params();
        let kin =
            soliton_kinematics(&coeffs, &params, &soliton, SolitonKind::Bright).expect("kin");
        let t_end = 1.0;
        let grid = Grid::new(
            1024,
            -10.0 * kin.width,
            kin.velocity * t_end + 10.0 * kin.width,
            Boundary::Periodic,
        )
        .expect("grid");
        let initial = Field::try_from_fn(grid, 0.0, |x| {
            bright_soliton(&coeffs, &params, &soliton, x, 0.0)
        })
        .expect("initial");
        let system = ContinuumSystem::new(ContinuumModel::Nls, params).expect("system");
        let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
        let traj = evolve(&system, &initial, dt, t_end, &[0.0, 0.5 * t_end, t_end]).expect("run");
        let amp = soliton.amplitude;
        let slope = amp * (coeffs.c1 / (coeffs.c0 * params.spin)).sqrt();
        let retention = shape_retention(&traj, ExtremumKind::Peak, move |u| {
            amp / (slope * u).cosh()
        })
        .expect("retention");
        assert!(
            retention < 0.01,
            "bright soliton under the cubic model must keep its shape, retention = {retention:.4}"
        );
    }

    #[test]
    fn track_positions_translate_with_the_field() {
        let grid = Grid::new(256, 0.0, 256.0, Boundary::Periodic).expect("grid");
        let field = Field::from_fn(grid, 0.0, |x| {
            C64::new((-0.05 * (x - 60.0) * (x - 60.0)).exp(), 0.0)
        });
        let shift = 37usize;
        let mut rolled = field.values.clone();
        rolled.rotate_right(shift);
        let shifted = Field {
            grid,
            values: rolled,
            time: 0.0,
        };
        let (p1, _) = super::extremum_of_field(&field, ExtremumKind::Peak).expect("base");
        let (p2, _) = super::extremum_of_field(&shifted, ExtremumKind::Peak).expect("shifted");
        let length = grid.x_max - grid.x_min;
        let wrapped = (p2 - p1 - shift as f64 * grid.dx()).rem_euclid(length);
        let dist = wrapped.min(length - wrapped);
        assert!(
            dist <= 1e-9,
            "rolling the field by {shift} sites must shift the tracked peak \
             by the same amount (mod domain), residual {dist:.3e}"
        );
    }

    #[test]
    fn diagnostics_bundle_is_consistent_on_analytic_bright() {
        let grid = Grid::new(2048, -110.0, 160.0, Boundary::Periodic).expect("grid");
        let times = [0.0, 1.0, 2.0, 3.0];
        let (traj, velocity, width, _) = render_trajectory(SolitonKind::Bright, &times, grid);
        let (params, coeffs, soliton) = bright_params();
        let amp = soliton.amplitude;
        let slope = amp * (coeffs.c1 / (coeffs.c0 * params.spin)).sqrt();
        let diag = diagnose(&traj, ExtremumKind::Peak, move |u| {
            amp / (slope * u).cosh()
        })
        .expect("diagnostics");
        assert!(
            (diag.peak_amplitude - 1.0).abs() <= 1e-3,
            "peak amplitude {} strays from 1",
            diag.peak_amplitude
        );
        assert!(
            (diag.velocity_estimate - velocity).abs() <= 1e-2,
            "velocity {} strays from {velocity}",
            diag.velocity_estimate
        );
        let expected_fwhm = 2.0 * (1.0 + 2.0f64.sqrt()).ln() * width;
        assert!(
            (diag.fwhm - expected_fwhm).abs() <= 1e-2 * width,
            "fwhm {} strays from {expected_fwhm}",
            diag.fwhm
        );
        assert!(
            (diag.center_of_mass - diag.peak_position).abs() <= 0.5,
            "center of mass {} should sit near the peak {} for a symmetric profile",
            diag.center_of_mass,
            diag.peak_position
        );
        assert!(
            diag.shape_retention_error <= 1e-3,
            "analytic render must match its own reference, retention = {:.3e}",
            diag.shape_retention_error
        );
        assert!(
            diag.fwhm > 0.0 && diag.peak_amplitude >= 0.0 && diag.shape_retention_error >= 0.0,
            "diagnostics must satisfy their sign invariants"
        );
    }

    #[test]
    fn diagnose_rejects_short_trajectories() {
        let grid = Grid::new(64, -10.0, 10.0, Boundary::Periodic).expect("grid");
        let field = Field::from_fn(grid, 0.0, |x| C64::new((-x * x).exp(), 0.0));
        let meta = TrajectoryMeta {
            model: crate::continuum::ModelTag::Nls,
            params: bright_params().0,
            coeffs: bright_params().1,
            grid,
            dt: None,
            carrier_shift: None,
            c2_bracket_times_field: false,
        };
        let traj = Trajectory::new(meta, vec![field]).expect("trajectory");
        assert!(
            matches!(
                diagnose(&traj, ExtremumKind::Peak, |u: f64| (-u * u).exp()),
                Err(Error::Validation(_))
            ),
            "one snapshot cannot support a velocity fit"
        );
    }

    proptest! {
        #[test]
        fn velocity_estimate_is_linear_in_positions(
            slope in -20.0f64..20.0,
            intercept in -5.0f64..5.0,
            scale in prop::sample::select(vec![-7.5f64, -2.0, 0.5, 3.25, 11.0]),
            n in 3usize..9,
        ) {
            let track: Vec<TrackPoint> = (0..n)
                .map(|i| {
                    let time = i as f64 * 0.25;
                    // Deterministic wobble so points are not collinear.
                    let wobble = ((i * 7919) % 13) as f64 * 0.01;
                    TrackPoint { time, position: intercept + slope * time + wobble, amplitude: 1.0 }
                })
                .collect();
            let base = estimate_velocity(&track).expect("fit");
            let scaled: Vec<TrackPoint> = track
                .iter()
                .map(|p| TrackPoint { position: scale * p.position, ..*p })
                .collect();
            let scaled_fit = estimate_velocity(&scaled).expect("fit");
            let tol = 1e-12 * (1.0 + base.abs() * scale.abs());
            prop_assert!(
                (scaled_fit - scale * base).abs() <= tol,
                "scaling positions by {} must scale the fit: {} vs {}",
                scale, scaled_fit, scale * base,
            );
        }

        #[test]
        fn modulus_diagnostics_ignore_global_phase(
            delta in -3.1f64..3.1,
            seed in 0u64..32,
        ) {
            let grid = Grid::new(64, -16.0, 16.0, Boundary::Periodic).expect("grid");
            let center = -8.0 + (seed as f64) * 0.5;
            let field = Field::from_fn(grid, 0.0, |x| {
                C64::new((-0.3 * (x - center) * (x - center)).exp(), 0.1)
            });
            let phase = C64::new(0.0, delta).exp();
            let rotated = Field {
                grid,
                values: field.values.iter().map(|v| v * phase).collect(),
                time: 0.0,
            };
            let dev = l2_deviation(&field, &rotated).expect("same grid");
            prop_assert!(dev <= 1e-13, "phase rotation leaked into moduli: {dev:.3e}");
            let (p1, a1) = super::extremum_of_field(&field, ExtremumKind::Peak).expect("base");
            let (p2, a2) = super::extremum_of_field(&rotated, ExtremumKind::Peak).expect("rotated");
            prop_assert!((p1 - p2).abs() <= 1e-9, "tracked position moved under a phase");
            prop_assert!((a1 - a2).abs() <= 1e-12, "tracked amplitude moved under a phase");
        }
    }
}
