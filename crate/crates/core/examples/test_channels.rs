//! Builds the explicit test channels and audits them: source marginal,
//! achieved distortions and rate.

use semantic_rd::channels::{q_vector, verify_classification, CorrelatedBinaryChannel, ClassificationChannel};
use semantic_rd::closed_form::theorem3_rate;
use semantic_rd::models::binary_correlated_problem;
use semantic_rd::prob::BinarySourceSpec;

fn main() -> semantic_rd::Result<()> {
    let (p, p1, p2) = (0.25, 0.25, 0.25);
    let (d1, d2, ds) = (0.04, 0.1, 0.4);
    let ch = CorrelatedBinaryChannel::build(p, p1, p2, d1, d2, ds)?;
    let spec = BinarySourceSpec::correlated(p, p1, p2)?;
    let prob = binary_correlated_problem(&spec)?;
    let rep = semantic_rd::channels::verify_achievability(
        &ch.full_joint,
        prob.source(),
        Some(prob.d1()),
        Some(prob.d2()),
        Some(prob.ds_mod()),
        theorem3_rate(&spec, d1, d2, ds)?,
    )?;
    println!("correlated channel at ({d1}, {d2}, {ds}), q = {:.5?}", ch.q);
    println!("  {rep:?}");

    // Near the corner of the region the reverse channel needs negative mass.
    println!("q at (0.0625, 0.25) = {:.5?}", q_vector(p1, p2, 0.0625, 0.25));
    match CorrelatedBinaryChannel::build(p, p1, p2, 0.0625, 0.25, 0.5) {
        Ok(_) => println!("  built"),
        Err(e) => println!("  rejected: {e}"),
    }

    let cls = ClassificationChannel::build(0.25, 8, 0.2)?;
    let rep = verify_classification(&cls, p, 0.45)?;
    println!("classification channel, N = 8, D1 = 0.2");
    println!("  P(Y=0 | odd) = {:.4}, P(Y=0 | even) = {:.4}", cls.p_y0_given_odd, cls.p_y0_given_even);
    println!("  {rep:?}");
    Ok(())
}
