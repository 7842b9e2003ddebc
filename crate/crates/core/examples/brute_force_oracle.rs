//! Exhaustive minimisation of each cut objective, and of the two-sided
//! objective over cut pairs.

use orbit_opt::models::{curie_weiss_pi, glauber_kernel, CurieWeissParams};
use orbit_opt::oracle::{brute_force_cut, brute_force_pair, Objective, OracleOptions, PairDedup};

fn main() -> orbit_opt::Result<()> {
    let params = CurieWeissParams::new(3, 2.0, 2.0)?;
    let p = glauber_kernel(&params)?;
    let pi = curie_weiss_pi(&params)?;

    for obj in [Objective::FrobGp, Objective::FrobGpg, Objective::KlGp, Objective::KlPg, Objective::KlGpg] {
        let r = brute_force_cut(obj, &p, &pi, OracleOptions::default())?;
        let cuts: Vec<String> = r.minimisers.cuts().unwrap().iter().map(|c| c.to_hex()).collect();
        println!("{:<10} min {:.6}  over {} cuts  at {}", obj.name(), r.min_value, r.evaluated, cuts.join(" "));
    }
    let pairs = brute_force_pair(&p, &pi, OracleOptions::default())?;
    println!("pair objective: min {:.6}", pairs.min_value);
    for mode in PairDedup::ALL {
        println!("  {mode:?}: {} optima out of {}", pairs.count(mode), mode.search_space(pi.len()));
    }
    Ok(())
}
