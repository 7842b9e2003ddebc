//! Orbit averaging of a random reversible chain and the projection chain.

use orbit_opt::chain::{distance_to_pi_sq, matrix_power};
use orbit_opt::models::random_reversible;
use orbit_opt::objectives::kl_to_pi;
use orbit_opt::partitions::{averaged_kernels, projection_chain};
use orbit_opt::OrbitPartition;

fn main() -> orbit_opt::Result<()> {
    let (p, pi) = random_reversible(6, 42, false)?;
    let part = OrbitPartition::new(vec![vec![0, 3], vec![1, 4, 5], vec![2]], &pi)?;
    let avg = averaged_kernels(&p, &part, &pi)?;
    let (pbar, pibar) = projection_chain(&p, &part, &pi)?;

    println!("pi = {:.4?}", pi.masses());
    println!("{:>3} {:>12} {:>12} {:>12} {:>12}", "l", "||P^l-Pi||", "||GP^l-Pi||", "||GPG^l-Pi||", "KL(GPG^l)");
    for l in 1..=5 {
        let d = |k: &orbit_opt::TransitionKernel| distance_to_pi_sq(matrix_power(k, l).matrix(), &pi).map(f64::sqrt);
        let kl = kl_to_pi(matrix_power(&avg.gpg, l).matrix(), &pi)?;
        let kl_bar = kl_to_pi(matrix_power(&pbar, l).matrix(), &pibar)?;
        assert!((kl - kl_bar).abs() < 1e-10);
        println!("{l:>3} {:>12.6} {:>12.6} {:>12.6} {:>12.6}", d(&p)?, d(&avg.gp)?, d(&avg.gpg)?, kl);
    }
    println!("projection chain:\n{}", pbar.matrix());
    Ok(())
}
