//! Sweep the tilt angle and print the effective couplings and the regime
//! they select: bright below the magic angle, dark above, linear at it.

use spin_soliton::model::{classify_regime, compute_coefficients, magic_angle, ModelParams};

fn main() -> spin_soliton::Result<()> {
    let theta0 = magic_angle();
    println!("magic angle theta0 = arccos(sqrt(1/3)) = {theta0:.12}");
    println!();
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "theta", "c0", "c1", "c2", "c3", "V", "regime"
    );
    let mut angles: Vec<f64> = (0..=7).map(|i| 1.5 * i as f64 / 7.0).collect();
    angles.push(theta0);
    angles.sort_by(f64::total_cmp);
    for theta in angles {
        let params = ModelParams::new(1.0, 0.1, theta, 100.0, 10.0)?;
        let c = compute_coefficients(&params)?;
        let regime = classify_regime(&params)?;
        println!(
            "{theta:>8.4} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>8}",
            c.c0, c.c1, c.c2, c.c3, c.potential, regime.kind
        );
    }
    println!();
    println!("field-strength admissibility window 10 <= lambda = B/J <= 1000:");
    for b in [1.0, 10.0, 100.0, 1000.0, 5000.0] {
        let params = ModelParams::new(1.0, 0.1, 0.1, b, 10.0)?;
        let regime = classify_regime(&params)?;
        println!(
            "  B = {b:>6}: lambda = {:>6}, admissible = {}",
            regime.lambda, regime.admissible
        );
    }
    Ok(())
}
