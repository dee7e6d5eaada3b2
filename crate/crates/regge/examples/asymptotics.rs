//! Locate alpha and beta poles for a bump warping and compare them with the
//! large-index predictors.

use regge::jost::Jost;
use regge::kernel::solve_kernel;
use regge::model::{Potential, WarpSpec};
use regge::poles::{asymptotics_report, default_region, locate_poles, SearchOptions};

fn main() -> regge::error::Result<()> {
    let c = (-1.0f64).exp();
    let pot = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, c))?;
    let sol = solve_kernel(&pot, 512, 1e-10)?;
    let big_a = sol.residue_constant();
    let jost = Jost::new(&sol);
    let region = default_region(1.0, 1, big_a, 6)?;
    println!("A = {big_a:.6}, searching {region:?}");
    let found = locate_poles(&region, &jost, &SearchOptions::default())?;
    let rep = asymptotics_report(&found.poles, 1.0, 1, big_a)?;
    for a in rep.alpha.iter().take(6) {
        println!("alpha_{:<2} = {:+.8}  |alpha + k| = {:.2e}", a.k, a.location, a.deviation);
    }
    for b in &rep.beta {
        println!(
            "beta (j = {}) = {:.6}  trend residual {:?}  gap {:?}",
            b.j, b.location, b.re_residual, b.im_gap
        );
    }
    println!("conjugate closed: {}", rep.conjugate_closed);
    Ok(())
}
