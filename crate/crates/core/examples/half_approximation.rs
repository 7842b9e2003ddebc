//! Singleton approximation of the Frobenius cut problems on lazified
//! Glauber dynamics.

use orbit_opt::experiments::half_approx_rows;
use orbit_opt::models::{curie_weiss_pi, glauber_kernel, lazify, CurieWeissParams};

fn main() -> orbit_opt::Result<()> {
    for (t, h) in [(2.0, 0.0), (2.0, 2.0), (15.0, 0.0), (15.0, 2.0)] {
        let params = CurieWeissParams::new(4, t, h)?;
        let p = lazify(&glauber_kernel(&params)?);
        let pi = curie_weiss_pi(&params)?;
        for r in half_approx_rows(&p, &pi, t, h)? {
            println!(
                "T={t:<4} h={h}  {:?}  optimum {:.5} at {:<7} singleton {:.5} at {:<5} gap {:.2e} (certified {:.3}) match={}",
                r.target,
                r.oracle_objective,
                r.oracle_cut.to_hex(),
                r.approx_objective,
                r.approx_cut.to_hex(),
                r.gap,
                r.certified_gap,
                r.cut_matches
            );
        }
    }
    Ok(())
}
