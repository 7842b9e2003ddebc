//! Recursive singleton peeling with the lazy Metropolis restriction, and
//! the two-level composition audit.

use orbit_opt::models::random_reversible;
use orbit_opt::submodular::{a_l_audit, recursive_singleton, MetropolisLazyRestriction};

fn main() -> orbit_opt::Result<()> {
    let (p, pi) = random_reversible(7, 3, true)?;
    for level in recursive_singleton(&p, &pi, &MetropolisLazyRestriction)? {
        println!(
            "level {}: remove state {} (mass {:.4}), distance {:.5}",
            level.level, level.state, level.pi_mass, level.distance
        );
    }
    for a in a_l_audit(&p, &pi, &MetropolisLazyRestriction, 2)? {
        println!("audit level {} l={}: {:.5} <= {:.5} {}", a.level, a.l, a.lhs, a.rhs, a.holds);
    }
    Ok(())
}
