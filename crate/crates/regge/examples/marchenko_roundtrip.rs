//! Forward scattering data from a small potential, then back through the
//! Marchenko equation.

use regge::marchenko::{roundtrip, RoundtripOptions};
use regge::model::{Potential, WarpSpec};

fn main() -> regge::error::Result<()> {
    let pot = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, 0.15))?;
    let rep = roundtrip(&pot, &RoundtripOptions::for_support(1.0))?;
    println!("K_max = {}, dk = {}, h = {}, window {}", rep.k_max, rep.dk, rep.h, rep.x_max);
    println!("bound states: {:?}", rep.bound_states);
    println!("relative L2 error {:.3e}, L-inf error {:.3e}", rep.relative_l2, rep.linf_error);
    for i in (0..rep.x.len()).step_by(8) {
        println!("x = {:.3}: true {:+.6}  recovered {:+.6}", rep.x[i], rep.qf_true[i], rep.qf_recovered[i]);
    }
    Ok(())
}
