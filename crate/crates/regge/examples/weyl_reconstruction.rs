//! Rebuild the Weyl function from its poles and residues.

use num_complex::Complex64 as C;
use regge::jost::Jost;
use regge::poles::SearchOptions;
use regge::wt::{build_model, synthetic_expansion};

fn main() -> regge::error::Result<()> {
    let jost = Jost::unperturbed(1.0);
    let model = build_model(&jost, 30.0, &SearchOptions::default())?;
    println!("m(0) = {:.8}, m'(0) = {:.8}, {} poles", model.m0, model.m0_prime, model.poles.len());
    let points = [C::new(1.0, 0.5), C::new(-2.5, 3.0), C::new(0.2, -4.5)];
    for r in [5.0, 10.0, 20.0, 30.0] {
        let t = model.truncated(r);
        let worst = points
            .iter()
            .map(|&z| {
                let d = jost.weyl_m(z).unwrap();
                (t.reconstruct_m(z).unwrap() - d).norm() / d.norm()
            })
            .fold(0.0, f64::max);
        println!("radius {r:>4}: worst relative error {worst:.2e}");
    }
    let syn = synthetic_expansion(&model);
    let z = C::new(5.0, 0.0);
    println!("synthetic form at z = 5: {:.10}, direct {:.10}", syn.eval(z), jost.weyl_m(z).unwrap());
    Ok(())
}
