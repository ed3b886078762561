//! The Gaussian model: which term of the rate is active, the equal-rate
//! locus, and a Monte Carlo check of the error decomposition.

use semantic_rd::gaussian::{equal_rate_locus, gaussian_rate, mmse, monte_carlo_decomposition_check, GaussianSpec};
use semantic_rd::prob::LogBase;

fn main() -> semantic_rd::Result<()> {
    let spec = GaussianSpec::symmetric(2.0, 1.0)?;
    println!("mmse = {:.4}, kappa = {:.4}", mmse(&spec), spec.kappa());
    for (d1, ds) in [(0.25, 2.5), (0.25, 1.6), (1.0, 1.6)] {
        let r = gaussian_rate(&spec, d1, 1.0, ds)?;
        println!(
            "R({d1}, 1, {ds}) = {:.4} nats = {:.4} bits, {:?} term active",
            r.rate_nats,
            r.rate_in(LogBase::BITS),
            r.term_x1_branch
        );
    }
    println!("equal-rate locus at D1 = 0.5: Ds = {:.4}", equal_rate_locus(&spec, 0.5));
    let mc = monte_carlo_decomposition_check(&spec, 0.5, 1.6, 200_000, 7)?;
    println!("Monte Carlo passes at 3 sigma: {}", mc.passes(3.0));
    Ok(())
}
