//! Alternating descent on D_KL(G_V P G_S || Pi) over cut pairs.

use orbit_opt::models::{curie_weiss_pi, glauber_kernel, CurieWeissParams};
use orbit_opt::oracle::{brute_force_pair, OracleOptions};
use orbit_opt::submodular::{coordinate_descent_pair, BoundMode, DEFAULT_INNER_STARTS};

fn main() -> orbit_opt::Result<()> {
    let params = CurieWeissParams::new(3, 2.0, 2.0)?;
    let p = glauber_kernel(&params)?;
    let pi = curie_weiss_pi(&params)?;
    let best = brute_force_pair(&p, &pi, OracleOptions::default())?;
    println!("optimum {:.4e}", best.min_value);

    for seed in 0..5 {
        let tr = coordinate_descent_pair(&p, &pi, None, None, seed, 100, BoundMode::BothModular, DEFAULT_INNER_STARTS)?;
        let (v, s) = tr.final_pair().unwrap();
        println!(
            "seed {seed}: {:.4e} after {} updates, V={} S={}",
            tr.final_value(),
            tr.objective_values.len() - 1,
            v.canonical().to_hex(),
            s.canonical().to_hex()
        );
    }
    Ok(())
}
