//! Dirichlet-to-Neumann multipliers on the sphere modes, direct and from the
//! pole expansion.

use regge::jost::Jost;
use regge::kernel::solve_kernel;
use regge::model::{build_potential, shifted_momenta, sphere_spectrum, WarpSpec};
use regge::poles::SearchOptions;
use regge::wt::{build_model, dtn_multipliers};

fn main() -> regge::error::Result<()> {
    let spec = WarpSpec::unperturbed(3, 1.0, 1.0);
    let table = build_potential(&spec, 64)?;
    let jost = Jost::new(&solve_kernel(&table.potential, 128, 1e-10)?);
    let model = build_model(&jost, 20.0, &SearchOptions::default())?;
    let modes = sphere_spectrum(3, 5);
    let mu_sq: Vec<f64> = modes.iter().map(|m| m.0).collect();
    let sp = shifted_momenta(&mu_sq, 3)?;
    for e in dtn_multipliers(&jost, Some(&model), &sp, table.f0, table.f0_prime, 3)? {
        println!("mu^2 = {:>4}: direct {:?}, reconstructed {:?}", e.mu_sq, e.direct, e.reconstructed);
    }
    Ok(())
}
