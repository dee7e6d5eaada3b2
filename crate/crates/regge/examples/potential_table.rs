//! Build `Q_f` for a bump warping and print a few samples.

use regge::model::{build_potential, shifted_momenta, sphere_spectrum, WarpSpec};

fn main() -> regge::error::Result<()> {
    let spec = WarpSpec::bump(3, 1.0, 1.0, 1, 0.15);
    let table = build_potential(&spec, 256)?;
    println!("f(0) = {:.6}, f'(0) = {:.6}", table.f0, table.f0_prime);
    println!("jump of order {} at x = a: {:.6}", table.jump_order, table.jump_value);
    for i in (0..=256).step_by(32) {
        println!("Qf({:.4}) = {:+.8}", table.grid[i], table.qf_values[i]);
    }

    let modes = sphere_spectrum(spec.n, 4);
    let mu_sq: Vec<f64> = modes.iter().map(|m| m.0).collect();
    let sp = shifted_momenta(&mu_sq, spec.n)?;
    for ((mu, mult), z) in modes.iter().zip(&sp.z) {
        println!("mu^2 = {mu:>4}  (x{mult})  z = {z}");
    }
    Ok(())
}
