//! Regge poles of the unperturbed problem: `psi(0, z) = J_z(1)`, whose zeros
//! sit just right of the negative integers.

use regge::contour::Rect;
use regge::jost::Jost;
use regge::poles::{locate_poles, SearchOptions};

fn main() -> regge::error::Result<()> {
    let jost = Jost::unperturbed(1.0);
    let found = locate_poles(&Rect::new(-10.5, -0.5, -1.0, 1.0)?, &jost, &SearchOptions::default())?;
    println!("{} poles, {} cells visited", found.poles.len(), found.cells);
    for p in &found.poles {
        println!(
            "{:>+.10}  {:?}  residue of m {:+.3e}  winding {}",
            p.location.re, p.family, p.residue.re, p.winding_certificate
        );
    }
    Ok(())
}
