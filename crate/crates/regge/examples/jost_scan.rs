//! Evaluate `psi(0, z)` and the Weyl function, and check the Wronskian and
//! reflection identities at a few points.

use num_complex::Complex64 as C;
use regge::jost::{normalization, Jost};
use regge::kernel::solve_kernel;
use regge::model::{Potential, WarpSpec};

fn main() -> regge::error::Result<()> {
    let pot = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, 0.3))?;
    let jost = Jost::new(&solve_kernel(&pot, 256, 1e-10)?);
    for z in [C::new(0.5, 0.0), C::new(-2.5, 1.0), C::new(3.0, -4.0), C::new(-6.0, 6.0)] {
        let psi = jost.psi(z);
        let (w, r) = jost.identity_checks(z);
        let m = jost.weyl_m(z).map_or("pole".to_string(), |m| format!("{m:.6}"));
        println!("z = {z}: psi = {psi:.6e}, m = {m}, wronskian {w:.1e}, reflection {r:.1e}");
    }
    // on the right half-plane psi is close to the free normalization
    let z = C::new(40.0, 0.0);
    println!("psi(40) / psi_free(40) = {:.6}", jost.psi(z) / normalization(z, 1.0));
    Ok(())
}
