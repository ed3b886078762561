//! Solves single rate-distortion points numerically and compares them with
//! the closed forms, including one outside the region where the formula is
//! tight.

use semantic_rd::closed_form::{theorem3_attained, theorem3_rate};
use semantic_rd::models::binary_correlated_problem;
use semantic_rd::prob::BinarySourceSpec;
use semantic_rd::solver::{solve_rd_point, RdQuery, SolverOptions};

fn main() -> semantic_rd::Result<()> {
    let spec = BinarySourceSpec::correlated(0.25, 0.25, 0.25)?;
    let prob = binary_correlated_problem(&spec)?;
    let opts = SolverOptions::default();
    for (d1, d2, ds) in [(0.04, 0.1, 0.4), (0.0625, 0.25, 0.5), (0.2, 0.3, 0.45)] {
        let q = RdQuery::new(d1, d2, ds)?;
        let pt = solve_rd_point(&prob, &q, &opts)?;
        println!("target ({d1}, {d2}, {ds})");
        println!("  rate        {:.6} bits (lower bound {:.6})", pt.rate, pt.rate_lower_bound);
        println!("  achieved    {:.6?}", pt.achieved);
        println!("  multipliers {:.4?}", pt.multipliers);
        println!("  converged {} after {} evaluations", pt.converged, pt.evaluations);
        if let Ok(cf) = theorem3_rate(&spec, d1, d2, ds) {
            println!("  formula     {cf:.6} (tight here: {})", theorem3_attained(&spec, d1, d2, ds)?);
        }
    }
    Ok(())
}
