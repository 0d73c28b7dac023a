//! Acceptance suite: every quantitative claim the library stands behind, one
//! test per criterion, each printing a single `[PASS]`/`[FAIL]` line with the
//! measured value before asserting (run with `-- --nocapture` to see all ten
//! lines on a green run).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spin_soliton::analytic::{
    bright_soliton, dark_soliton, gauge_transform, soliton_kinematics, GaugeDirection, PlaneWave,
    SolitonKind, SolitonParams,
};
use spin_soliton::continuum::{
    evolve, ContinuumModel, ContinuumSystem, Field, Grid, ModelTag, Trajectory, TrajectoryMeta,
    DEFAULT_SAFETY,
};
use spin_soliton::harness::{resolve_preset, sweep, Preset, SweepAxis};
use spin_soliton::lattice::{
    energy_full, energy_simplified, norm, rhs_full, rhs_simplified, LatticeModel, LatticeState,
    LatticeVariant,
};
use spin_soliton::model::{
    classify_regime, compute_coefficients, magic_angle, Coefficients, ModelParams, RegimeKind,
};
use spin_soliton::observables::{shape_retention, track_peak, ExtremumKind};
use spin_soliton::{Boundary, C64};

fn report(number: u32, name: &str, detail: &str, passed: bool) -> bool {
    let mark = if passed { "PASS" } else { "FAIL" };
    println!("[{mark}] criterion {number:02} ({name}): {detail}");
    passed
}

fn fig_params(theta: f64, b: f64) -> ModelParams {
    ModelParams::new(1.0, 0.1, theta, b, 10.0).expect("valid parameters")
}

fn max_modulus_gap(a: &Field, b: &Field) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(u, v)| (u.norm() - v.norm()).abs())
        .fold(0.0f64, f64::max)
}

// ---------------------------------------------------------------------------
// 1. Coefficient exactness
// ---------------------------------------------------------------------------

/// Independent evaluation through double-angle identities: sin^2 and cos^2
/// never appear, so every rounding path differs from the production one.
fn oracle_coefficients(p: &ModelParams) -> Coefficients {
    let cos2 = (2.0 * p.theta).cos();
    let sin2 = (2.0 * p.theta).sin();
    let half = p.theta / 2.0;
    // sin^2(theta) = sin^2(theta/2) (1 + cos theta) * 2 stays well-conditioned
    // at both ends of [0, pi/2].
    let s2 = 2.0 * half.sin() * half.sin() * (1.0 + p.theta.cos());
    let c0 = p.j * (1.0 + p.delta * s2 / 2.0);
    let c1 = p.j * p.delta * 3.0f64.mul_add(cos2, 1.0) / 4.0;
    let c2 = p.j * p.delta * sin2 / 4.0;
    let c3 = p.j * p.delta * s2 / 4.0;
    let potential = (2.0 * p.spin).mul_add(c1, p.b);
    Coefficients {
        c0,
        c1,
        c2,
        c3,
        potential,
        chi: potential / p.hbar,
        theta_magic: (1.0f64 / 3.0).sqrt().acos(),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn c01_coefficient_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let j = rng.gen_range(0.1..10.0);
        // B drawn through the admissible lambda window keeps |2 S c1| below
        // B/2, so the potential never suffers catastrophic cancellation and
        // its relative error stays meaningful for every draw.
        let p = ModelParams::new(
            j,
            sign * rng.gen_range(0.02..0.5),
            rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
            rng.gen_range(20.0..1000.0) * j,
            rng.gen_range(0.5..20.0),
        )
        .expect("valid parameters")
        .with_hbar(rng.gen_range(0.5..2.0))
        .expect("valid hbar");
        let got = compute_coefficients(&p).expect("coefficients");
        let want = oracle_coefficients(&p);

        let mut checks = vec![
            rel_err(got.c0, want.c0),
            rel_err(got.c2, want.c2),
            rel_err(got.c3, want.c3),
            rel_err(got.potential, want.potential),
            rel_err(got.chi, want.chi),
        ];
        // Relative error is only meaningful away from c1's zero crossing,
        // where every double-precision path shares an irreducible absolute
        // rounding floor; there a magnitude-scaled bound takes over.
        let bracket = 3.0 * p.theta.cos().powi(2) - 1.0;
        if bracket.abs() >= 0.25 {
            checks.push(rel_err(got.c1, want.c1));
        } else {
            assert!(
                (got.c1 - want.c1).abs() <= 1e-14 * (p.j * p.delta).abs(),
                "c1 near its zero must still agree to 1e-14 * J |delta|"
            );
        }
        worst = checks.into_iter().fold(worst, f64::max);
    }

    let theta0 = magic_angle();
    let at_magic = compute_coefficients(&fig_params(theta0, 100.0)).expect("coefficients");
    let c1_bound = 16.0 * f64::EPSILON * 1.0 * 0.1;
    let ok = worst < 1e-14 && at_magic.c1.abs() <= c1_bound;
    assert!(report(
        1,
        "coefficient exactness",
        &format!(
            "max rel err {worst:.3e} over 1000 sets (bound 1e-14); |c1(theta0)| = {:.3e} <= {c1_bound:.3e}",
            at_magic.c1.abs()
        ),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 2. Analytic-solution residuals
// ---------------------------------------------------------------------------

/// Relative residual of `i hbar phi_t = -c0 S phi_xx + V phi - 2 c1 |phi|^2 phi`
/// on a closed-form solution, with 4th-order finite differences in x and t.
fn max_relative_residual(
    coeffs: &Coefficients,
    params: &ModelParams,
    phi: impl Fn(f64, f64) -> C64,
    xs: &[f64],
    ts: &[f64],
) -> f64 {
    let h = 0.01;
    let k = 1e-4;
    let c0s = coeffs.c0 * params.spin;
    let i = C64::i();
    let mut worst = 0.0f64;
    for &t in ts {
        for &x in xs {
            let f = phi(x, t);
            let fxx = (-phi(x + 2.0 * h, t) + 16.0 * phi(x + h, t) - 30.0 * f
                + 16.0 * phi(x - h, t)
                - phi(x - 2.0 * h, t))
                / (12.0 * h * h);
            let ft = (-phi(x, t + 2.0 * k) + 8.0 * phi(x, t + k) - 8.0 * phi(x, t - k)
                + phi(x, t - 2.0 * k))
                / (12.0 * k);
            let kinetic = -c0s * fxx;
            let potential = coeffs.potential * f;
            let cubic = -2.0 * coeffs.c1 * f.norm_sqr() * f;
            let time = i * params.hbar * ft;
            let residual = (time - kinetic - potential - cubic).norm();
            let scale = time
                .norm()
                .max(kinetic.norm())
                .max(potential.norm())
                .max(cubic.norm());
            if scale > 1e-9 {
                worst = worst.max(residual / scale);
            }
        }
    }
    worst
}

#[test]
fn c02_analytic_residuals() {
    let ts = [0.0, 0.7, 1.4, 2.1];

    let bright_params = fig_params(0.1, 100.0);
    let bright_coeffs = compute_coefficients(&bright_params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let bk = soliton_kinematics(&bright_coeffs, &bright_params, &sp, SolitonKind::Bright)
        .expect("kinematics");
    let bright_res = {
        let xs: Vec<f64> = ts
            .iter()
            .flat_map(|&t| {
                let c = bk.velocity * t;
                (0..=40).map(move |i| c - 3.0 * bk.width + 6.0 * bk.width * i as f64 / 40.0)
            })
            .collect();
        max_relative_residual(
            &bright_coeffs,
            &bright_params,
            |x, t| bright_soliton(&bright_coeffs, &bright_params, &sp, x, t).expect("bright"),
            &xs,
            &ts,
        )
    };

    let dark_params = fig_params(1.5, 100.0);
    let dark_coeffs = compute_coefficients(&dark_params).expect("coefficients");
    let dk = soliton_kinematics(&dark_coeffs, &dark_params, &sp, SolitonKind::Dark)
        .expect("kinematics");
    let dark_res = {
        let xs: Vec<f64> = ts
            .iter()
            .flat_map(|&t| {
                let c = dk.velocity * t;
                (0..=40).map(move |i| c - 3.0 * dk.width + 6.0 * dk.width * i as f64 / 40.0)
            })
            .collect();
        max_relative_residual(
            &dark_coeffs,
            &dark_params,
            |x, t| dark_soliton(&dark_coeffs, &dark_params, &sp, x, t).expect("dark"),
            &xs,
            &ts,
        )
    };

    let ok = bright_res < 1e-6 && dark_res < 1e-6;
    assert!(report(
        2,
        "analytic residuals",
        &format!("bright {bright_res:.3e}, dark {dark_res:.3e} (bound 1e-6)"),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 3. Soliton propagation fidelity
// ---------------------------------------------------------------------------

fn bright_fidelity_error(n: usize, t_end: f64) -> f64 {
    let params = fig_params(0.1, 100.0);
    let coeffs = compute_coefficients(&params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let kin =
        soliton_kinematics(&coeffs, &params, &sp, SolitonKind::Bright).expect("kinematics");
    let grid = Grid::new(
        n,
        -10.0 * kin.width,
        kin.velocity * t_end + 10.0 * kin.width,
        Boundary::Periodic,
    )
    .expect("grid");
    let initial =
        Field::try_from_fn(grid, 0.0, |x| bright_soliton(&coeffs, &params, &sp, x, 0.0))
            .expect("initial");
    let system = ContinuumSystem::new(ContinuumModel::Nls, params).expect("system");
    let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
    let traj = evolve(&system, &initial, dt, t_end, &[t_end]).expect("evolve");
    let analytic =
        Field::try_from_fn(grid, t_end, |x| bright_soliton(&coeffs, &params, &sp, x, t_end))
            .expect("analytic");
    max_modulus_gap(traj.last(), &analytic)
}

fn dark_fidelity_error(n: usize, t_end: f64) -> f64 {
    let params = fig_params(1.5, 100.0);
    let coeffs = compute_coefficients(&params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let kin = soliton_kinematics(&coeffs, &params, &sp, SolitonKind::Dark).expect("kinematics");
    let grid = Grid::new(
        n,
        -5.0 * kin.width,
        kin.velocity * t_end + 5.0 * kin.width,
        Boundary::FixedEnds,
    )
    .expect("grid");
    let initial = Field::try_from_fn(grid, 0.0, |x| dark_soliton(&coeffs, &params, &sp, x, 0.0))
        .expect("initial");
    // Fixed edges pin complex values, so the run co-rotates with the
    // background carrier e^{-i omega t}; moduli are frame-independent.
    let system = ContinuumSystem::new(ContinuumModel::Nls, params)
        .expect("system")
        .with_carrier_shift(kin.frequency)
        .expect("carrier shift");
    let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
    let traj = evolve(&system, &initial, dt, t_end, &[t_end]).expect("evolve");
    let analytic =
        Field::try_from_fn(grid, t_end, |x| dark_soliton(&coeffs, &params, &sp, x, t_end))
            .expect("analytic");
    max_modulus_gap(traj.last(), &analytic)
}

#[test]
fn c03_propagation_fidelity() {
    let t_end = 3.0;
    let coarse = bright_fidelity_error(2048, t_end);
    let fine = bright_fidelity_error(4096, t_end);
    let ratio = coarse / fine;
    let dark = dark_fidelity_error(2048, t_end);
    let ok = coarse < 1e-2 && (3.2..=4.8).contains(&ratio) && dark < 2e-2;
    assert!(report(
        3,
        "propagation fidelity",
        &format!(
            "bright Linf {coarse:.3e} (bound 1e-2), dx->dx/2 ratio {ratio:.2} (want [3.2, 4.8]), \
             dark Linf {dark:.3e} (bound 2e-2)"
        ),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 4. Magic-angle linearity
// ---------------------------------------------------------------------------

#[test]
fn c04_magic_angle_linearity() {
    let amplitude = 0.5;
    let params = fig_params(magic_angle(), 100.0);
    let coeffs = compute_coefficients(&params).expect("coefficients");
    let length = 64.0;
    let grid = Grid::new(256, 0.0, length, Boundary::Periodic).expect("grid");
    let wave = PlaneWave::new(
        &coeffs,
        &params,
        2.0 * std::f64::consts::PI * 8.0 / length,
        amplitude,
    )
    .expect("plane wave");
    let initial = Field::from_fn(grid, 0.0, |x| wave.eval(x, 0.0));
    let system = ContinuumSystem::new(ContinuumModel::Nls, params).expect("system");
    let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
    let times = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let traj = evolve(&system, &initial, dt, 3.0, &times).expect("evolve");
    let spread = traj
        .snapshots
        .iter()
        .map(|snap| {
            let m = snap.modulus();
            m.iter().cloned().fold(0.0f64, f64::max)
                - m.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    let bound = 1e-10 * amplitude;
    assert!(report(
        4,
        "magic-angle linearity",
        &format!("max modulus spread {spread:.3e} through t = 3 (bound {bound:.1e})"),
        spread < bound
    ));
}

// ---------------------------------------------------------------------------
// 5. Conservation suite
// ---------------------------------------------------------------------------

fn bright_sampled_chain(params: &ModelParams, n: usize) -> LatticeState {
    let coeffs = compute_coefficients(params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let amplitudes: Vec<C64> = (0..n)
        .map(|j| {
            bright_soliton(&coeffs, params, &sp, j as f64 - n as f64 / 2.0, 0.0)
                .expect("bright sample")
        })
        .collect();
    LatticeState::new(amplitudes, Boundary::Periodic).expect("state")
}

#[test]
fn c05_conservation_suite() {
    let n = 256;
    let t_end = 3.0;
    let dt = 1e-4;

    let p_high = fig_params(0.1, 100.0);
    let simplified = LatticeModel::new(LatticeVariant::Simplified, p_high).expect("model");
    let initial = bright_sampled_chain(&p_high, n);
    let states =
        spin_soliton::lattice::evolve(&simplified, &initial, dt, t_end, &[t_end]).expect("evolve");
    let norm_drift = (norm(&states[0]) - norm(&initial)).abs() / norm(&initial);
    let e0 = energy_simplified(&initial, &simplified).expect("energy");
    let e1 = energy_simplified(&states[0], &simplified).expect("energy");
    let energy_drift = (e1 - e0).abs() / e0.abs();

    let p_low = fig_params(0.1, 1.0);
    let full = LatticeModel::new(LatticeVariant::Full, p_low).expect("model");
    let initial_low = bright_sampled_chain(&p_low, n);
    let states_low =
        spin_soliton::lattice::evolve(&full, &initial_low, dt, t_end, &[t_end]).expect("evolve");
    let norm_change =
        (norm(&states_low[0]) - norm(&initial_low)).abs() / norm(&initial_low);
    let f0 = energy_full(&initial_low, &full).expect("energy");
    let f1 = energy_full(&states_low[0], &full).expect("energy");
    let full_energy_drift = (f1 - f0).abs() / f0.abs();

    let ok = norm_drift < 1e-8
        && energy_drift < 1e-6
        && full_energy_drift < 1e-6
        && norm_change > 1e-3;
    assert!(report(
        5,
        "conservation suite",
        &format!(
            "simplified: norm drift {norm_drift:.3e} (< 1e-8), energy drift {energy_drift:.3e} (< 1e-6); \
             full at lambda = 1: energy drift {full_energy_drift:.3e} (< 1e-6), norm change {norm_change:.3e} (> 1e-3)"
        ),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 6. Gradient oracle
// ---------------------------------------------------------------------------

#[test]
fn c06_gradient_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let params = fig_params(0.9, 100.0);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for case in 0..100 {
        let variant = if case % 2 == 0 {
            LatticeVariant::Simplified
        } else {
            LatticeVariant::Full
        };
        let boundary = if case % 4 < 2 {
            Boundary::Periodic
        } else {
            Boundary::FixedEnds
        };
        let model = LatticeModel::new(variant, params).expect("model");
        let amplitudes: Vec<C64> = (0..8)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let state = LatticeState::new(amplitudes, boundary).expect("state");
        let energy = |amps: Vec<C64>| -> f64 {
            let s = LatticeState::new(amps, boundary).expect("perturbed state");
            match variant {
                LatticeVariant::Simplified => energy_simplified(&s, &model).expect("energy"),
                LatticeVariant::Full => energy_full(&s, &model).expect("energy"),
            }
        };
        let rhs = match variant {
            LatticeVariant::Simplified => rhs_simplified(&state, &model).expect("rhs"),
            LatticeVariant::Full => rhs_full(&state, &model).expect("rhs"),
        };

        let grad: Vec<C64> = (0..state.len())
            .map(|j| {
                let mut plus = state.amplitudes.clone();
                let mut minus = state.amplitudes.clone();
                plus[j].re += h;
                minus[j].re -= h;
                let de_dre = (energy(plus) - energy(minus)) / (2.0 * h);
                let mut plus = state.amplitudes.clone();
                let mut minus = state.amplitudes.clone();
                plus[j].im += h;
                minus[j].im -= h;
                let de_dim = (energy(plus) - energy(minus)) / (2.0 * h);
                C64::new(de_dre, de_dim) / 2.0
            })
            .collect();

        let scale = grad.iter().map(|g| g.norm()).fold(0.0f64, f64::max);
        let err = rhs
            .iter()
            .zip(&grad)
            .map(|(d, g)| (C64::i() * params.hbar * d - g).norm())
            .fold(0.0f64, f64::max)
            / scale;
        worst = worst.max(err);
    }
    assert!(report(
        6,
        "gradient oracle",
        &format!("max rel err {worst:.3e} over 100 states, both variants (bound 1e-6)"),
        worst < 1e-6
    ));
}

// ---------------------------------------------------------------------------
// 7. Gauge covariance
// ---------------------------------------------------------------------------

#[test]
fn c07_gauge_covariance() {
    let t_end = 3.0;
    let params = fig_params(0.1, 100.0);
    let coeffs = compute_coefficients(&params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let kin =
        soliton_kinematics(&coeffs, &params, &sp, SolitonKind::Bright).expect("kinematics");
    let grid = Grid::new(
        2048,
        -10.0 * kin.width,
        kin.velocity * t_end + 10.0 * kin.width,
        Boundary::Periodic,
    )
    .expect("grid");
    let lab_initial =
        Field::try_from_fn(grid, 0.0, |x| bright_soliton(&coeffs, &params, &sp, x, 0.0))
            .expect("initial");
    let env_initial = gauge_transform(&lab_initial, &coeffs, &params, GaugeDirection::ToEnvelope);

    let lab_system = ContinuumSystem::new(ContinuumModel::Nls, params).expect("system");
    let env_system = ContinuumSystem::new(ContinuumModel::NlsEnvelope, params).expect("system");
    // One shared step keeps the two discretization errors comparable; the
    // small safety factor keeps the per-frame RK4 phase residue under the
    // pointwise bound.
    let dt = lab_system
        .stability_bound(&lab_initial, 0.1)
        .min(env_system.stability_bound(&env_initial, 0.1));
    let lab = evolve(&lab_system, &lab_initial, dt, t_end, &[t_end]).expect("lab run");
    let env = evolve(&env_system, &env_initial, dt, t_end, &[t_end]).expect("envelope run");
    let mapped_back = gauge_transform(env.last(), &coeffs, &params, GaugeDirection::ToLab);

    let gap = max_modulus_gap(lab.last(), &mapped_back);
    let bound = 1e-8 * sp.amplitude;
    assert!(report(
        7,
        "gauge covariance",
        &format!("pointwise modulus gap {gap:.3e} at t = 3 (bound {bound:.1e})"),
        gap < bound
    ));
}

// ---------------------------------------------------------------------------
// 8. Lambda robustness
// ---------------------------------------------------------------------------

#[test]
fn c08_lambda_robustness() {
    let base = resolve_preset(Preset::Fig4).expect("preset");
    let table = sweep(&base, SweepAxis::Lambda, &[1.0, 10.0, 100.0, 1000.0]).expect("sweep");
    let d: Vec<f64> = table
        .rows
        .iter()
        .map(|row| {
            row.deviation_from_cubic
                .unwrap_or_else(|| panic!("row lambda = {} failed: {:?}", row.value, row.error))
        })
        .collect();
    let (d1, d10, d100, d1000) = (d[0], d[1], d[2], d[3]);
    let ok = d100 < 0.05 && d100 < d10 && d10 < d1 && d1000 < d1;
    assert!(report(
        8,
        "lambda robustness",
        &format!(
            "D(1) = {d1:.3}, D(10) = {d10:.3}, D(100) = {d100:.4}, D(1000) = {d1000:.4}; \
             want D(100) < 0.05 and D(100) < D(10) < D(1) > D(1000)"
        ),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 9. Stability ordering
// ---------------------------------------------------------------------------

fn extended_trajectory(
    params: &ModelParams,
    kind: SolitonKind,
    t_end: f64,
) -> (Trajectory, f64) {
    let coeffs = compute_coefficients(params).expect("coefficients");
    let sp = SolitonParams::new(1.0, 5.0, 0.0).expect("soliton");
    let kin = soliton_kinematics(&coeffs, params, &sp, kind).expect("kinematics");
    let (boundary, pad) = match kind {
        SolitonKind::Bright => (Boundary::Periodic, 10.0 * kin.width),
        SolitonKind::Dark => (Boundary::FixedEnds, 10.0 * kin.width),
    };
    let grid = Grid::new(2048, -pad, kin.velocity * t_end + pad, boundary).expect("grid");
    let initial = Field::try_from_fn(grid, 0.0, |x| match kind {
        SolitonKind::Bright => bright_soliton(&coeffs, params, &sp, x, 0.0),
        SolitonKind::Dark => dark_soliton(&coeffs, params, &sp, x, 0.0),
    })
    .expect("initial");
    let system = ContinuumSystem::new(ContinuumModel::ExtendedNls, *params).expect("system");
    let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
    let times: Vec<f64> = (0..=4).map(|i| t_end * i as f64 / 4.0).collect();
    (
        evolve(&system, &initial, dt, t_end, &times).expect("evolve"),
        kin.width,
    )
}

/// Strict interior extrema of |phi| farther than 3 widths from the dip.
fn extrema_beyond_dip(field: &Field, dip_x: f64, width: f64) -> usize {
    let m = field.modulus();
    let n = m.len();
    (2..n - 2)
        .filter(|&i| {
            let x = field.grid.x(i);
            (x - dip_x).abs() > 3.0 * width
                && ((m[i] > m[i - 1] && m[i] > m[i + 1]) || (m[i] < m[i - 1] && m[i] < m[i + 1]))
        })
        .count()
}

#[test]
fn c09_stability_ordering() {
    let t_end = 10.0;

    let bright_params = fig_params(0.1, 100.0);
    let (bright_traj, bright_width) =
        extended_trajectory(&bright_params, SolitonKind::Bright, t_end);
    let bright_retention = shape_retention(&bright_traj, ExtremumKind::Peak, |u| {
        1.0 / (u / bright_width).cosh()
    })
    .expect("bright retention");

    let dark_params = fig_params(1.5, 100.0);
    let (dark_traj, dark_width) = extended_trajectory(&dark_params, SolitonKind::Dark, t_end);
    let dark_retention = shape_retention(&dark_traj, ExtremumKind::Dip, |u| {
        (u / dark_width).tanh().abs()
    })
    .expect("dark retention");

    let dark_final = dark_traj.last();
    let dip = track_peak(&dark_traj, ExtremumKind::Dip).expect("dip track");
    let dip_x = dip.last().expect("nonempty track").position;
    let oscillations = extrema_beyond_dip(dark_final, dip_x, dark_width);

    let ok = bright_retention < dark_retention && oscillations >= 3;
    assert!(report(
        9,
        "stability ordering",
        &format!(
            "shape retention bright {bright_retention:.3} < dark {dark_retention:.3}; \
             dark profile shows {oscillations} extrema beyond the dip (want >= 3)"
        ),
        ok
    ));
}

// ---------------------------------------------------------------------------
// 10. Regime switching
// ---------------------------------------------------------------------------

#[test]
fn c10_regime_switching() {
    let theta0 = magic_angle();
    let angles = [0.1, 0.5, 0.9, theta0, 1.0, 1.3, 1.5];
    let kinds: Vec<RegimeKind> = angles
        .iter()
        .map(|&theta| {
            classify_regime(&fig_params(theta, 100.0))
                .expect("classification")
                .kind
        })
        .collect();
    let expected = [
        RegimeKind::Bright,
        RegimeKind::Bright,
        RegimeKind::Bright,
        RegimeKind::Linear,
        RegimeKind::Dark,
        RegimeKind::Dark,
        RegimeKind::Dark,
    ];
    let transitions = kinds.windows(2).filter(|w| w[0] != w[1]).count();
    // Bright -> Linear -> Dark is one physical transition through the
    // boundary class; the window count sees its two edges.
    let ok = kinds == expected && transitions == 2;
    let shown: Vec<String> = angles
        .iter()
        .zip(&kinds)
        .map(|(a, k)| format!("{a:.3}:{k}"))
        .collect();
    assert!(report(
        10,
        "regime switching",
        &format!("{} (one bright->dark switchover via linear)", shown.join(", ")),
        ok
    ));
}

// ---------------------------------------------------------------------------
// Shared-surface sanity: what the criteria above rely on
// ---------------------------------------------------------------------------

/// The suite above leans on trajectory metadata for persistence-side tests;
/// keep one end-to-end check that a numeric run carries faithful metadata.
#[test]
fn run_metadata_reflects_the_executed_model() {
    let params = fig_params(0.1, 100.0);
    let system = ContinuumSystem::new(ContinuumModel::Nls, params).expect("system");
    let grid = Grid::new(64, -32.0, 32.0, Boundary::Periodic).expect("grid");
    let initial = Field::from_fn(grid, 0.0, |x| C64::new((-x * x / 8.0).exp(), 0.0));
    let dt = system.stability_bound(&initial, DEFAULT_SAFETY);
    let traj = evolve(&system, &initial, dt, 0.1, &[0.1]).expect("evolve");
    let TrajectoryMeta { model, dt: meta_dt, .. } = traj.meta;
    assert_eq!(model, ModelTag::Nls, "metadata records the integrated model");
    assert_eq!(meta_dt, Some(dt), "metadata records the step actually used");
}
