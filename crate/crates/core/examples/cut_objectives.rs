//! Every closed-form objective for a few cuts of a Curie-Weiss chain.

use orbit_opt::models::{curie_weiss_pi, glauber_kernel, CurieWeissParams};
use orbit_opt::objectives::{cheeger_constants, ObjectiveReport};
use orbit_opt::CutSet;

fn main() -> orbit_opt::Result<()> {
    let params = CurieWeissParams::new(3, 2.0, 0.5)?;
    let p = glauber_kernel(&params)?;
    let pi = curie_weiss_pi(&params)?;

    println!("{}", ObjectiveReport::CSV_HEADER);
    for states in [vec![0], vec![7], vec![0, 1, 2, 4], vec![0, 3, 5, 6]] {
        let cut = CutSet::from_states(&states, &pi)?;
        println!("{}", ObjectiveReport::evaluate(&cut, &p, &pi)?.csv_row());
    }
    let c = cheeger_constants(&p, &pi)?;
    println!(
        "Cheeger: classical {:.5} at {}, symmetrised {:.5} at {}",
        c.classical,
        c.classical_cut.to_hex(),
        c.symmetrised,
        c.symmetrised_cut.to_hex()
    );
    Ok(())
}
