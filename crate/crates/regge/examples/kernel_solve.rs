//! Solve for the transformation kernel and check the diagonal identity
//! `K(x, x) = 1/2 int_x^a Q_f`.

use regge::kernel::{jump_estimate, solve_kernel};
use regge::model::{Potential, WarpSpec};

fn main() -> regge::error::Result<()> {
    let pot = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, 0.3))?;
    let sol = solve_kernel(&pot, 256, 1e-10)?;
    println!("{} Picard iterations, residual {:.2e}", sol.iterations, sol.residual);

    let diag = sol.diagonal();
    let h = sol.grid.h();
    let worst = diag
        .iter()
        .enumerate()
        .map(|(i, k)| (k - 0.5 * pot.integral_from(i as f64 * h)).abs())
        .fold(0.0, f64::max);
    println!("max |K(x,x) - 1/2 int_x^a Q_f| = {worst:.2e}");

    let j = jump_estimate(&sol, pot.p())?;
    println!("edge jump: analytic {:.8}, finite differences {:.8}", j.analytic, j.numeric);
    println!("residue constant A = {:.8}", sol.residue_constant());
    Ok(())
}
