//! Majorisation-minimisation on D_KL(P G_S || Pi) from several seeds,
//! compared with the exhaustive optimum.

use orbit_opt::models::{curie_weiss_pi, glauber_kernel, CurieWeissParams};
use orbit_opt::oracle::{brute_force_cut, Objective, OracleOptions};
use orbit_opt::submodular::{mm_minimize_kl, BoundMode};

fn main() -> orbit_opt::Result<()> {
    let params = CurieWeissParams::new(4, 2.0, 0.0)?;
    let p = glauber_kernel(&params)?;
    let pi = curie_weiss_pi(&params)?;
    let best = brute_force_cut(Objective::KlPg, &p, &pi, OracleOptions::default())?;
    println!("optimum {:.6}", best.min_value);

    for seed in 0..8 {
        let tr = mm_minimize_kl(&p, &pi, None, seed, 100, BoundMode::BothModular)?;
        let path: Vec<String> = tr.objective_values.iter().map(|v| format!("{v:.4}")).collect();
        println!(
            "seed {seed}: {} -> {} ({} steps)",
            path.join(" > "),
            tr.final_cut().unwrap().canonical().to_hex(),
            tr.objective_values.len() - 1
        );
    }
    Ok(())
}
