//! Conservation laws on the discrete chain. The simplified site dynamics
//! conserves both its energy and the total norm Σ|a|²; the full dynamics
//! still conserves its own energy functional but pumps norm through the
//! square-root and cubic site terms — visibly so at strong nonlinearity
//! (lambda = B/J of order 1), negligibly in the admissible window.

use spin_soliton::analytic::{bright_soliton, SolitonParams};
use spin_soliton::lattice::{
    default_dt, energy_full, energy_simplified, evolve, norm, LatticeModel, LatticeState,
    LatticeVariant,
};
use spin_soliton::model::{compute_coefficients, ModelParams};
use spin_soliton::Boundary;

fn bright_sampled_state(params: &ModelParams, n: usize) -> spin_soliton::Result<LatticeState> {
    let coeffs = compute_coefficients(params)?;
    let sp = SolitonParams::new(1.0, 0.0, 0.0)?;
    let amplitudes = (0..n)
        .map(|j| bright_soliton(&coeffs, params, &sp, j as f64 - n as f64 / 2.0, 0.0))
        .collect::<spin_soliton::Result<Vec<_>>>()?;
    LatticeState::new(amplitudes, Boundary::Periodic)
}

fn main() -> spin_soliton::Result<()> {
    let n = 128;
    let t_end = 1.0;

    for (label, b, variant) in [
        ("simplified, lambda = 100", 100.0, LatticeVariant::Simplified),
        ("full,       lambda = 100", 100.0, LatticeVariant::Full),
        ("full,       lambda = 1  ", 1.0, LatticeVariant::Full),
    ] {
        let params = ModelParams::new(1.0, 0.1, 0.1, b, 10.0)?;
        let model = LatticeModel::new(variant, params)?;
        let initial = bright_sampled_state(&params, n)?;
        let dt = default_dt(&initial, &model).min(1e-4);
        let states = evolve(&model, &initial, dt, t_end, &[t_end])?;
        let last = &states[0];

        let n0 = norm(&initial);
        let norm_drift = (norm(last) - n0).abs() / n0;
        let (e0, e1) = match variant {
            LatticeVariant::Simplified => (
                energy_simplified(&initial, &model)?,
                energy_simplified(last, &model)?,
            ),
            LatticeVariant::Full => (energy_full(&initial, &model)?, energy_full(last, &model)?),
        };
        let energy_drift = (e1 - e0).abs() / e0.abs();
        println!("{label}: {n} sites, dt = {dt:.1e}, t = {t_end}");
        println!("  energy drift {energy_drift:.3e}   norm drift {norm_drift:.3e}");
    }
    println!();
    println!("energy is flat in every case; only the full flow moves the norm,");
    println!("and dramatically so once the field stops dominating (lambda ~ 1)");
    Ok(())
}
