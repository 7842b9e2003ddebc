//! Lazy walk on the hypercube with the first-coordinate cut.

use orbit_opt::experiments::hypercube_rows;

fn main() -> orbit_opt::Result<()> {
    for d in [4, 6, 8] {
        for r in hypercube_rows(d)? {
            println!(
                "d={} l={:<3} ||GPG^l-Pi||^2 = {:.6e} <= {:.6e}   ||P^l-Pi||^2 = {:.4} >= {:.4}",
                r.d, r.l, r.gpg_distance_sq, r.gpg_upper, r.p_distance_sq, r.p_lower
            );
        }
    }
    Ok(())
}
