//! Entropies, mutual information and Markov residuals of a small joint
//! distribution built from a doubly symmetric binary source.

use semantic_rd::prob::{make_dsbs_named, Alphabet, JointPmf, LogBase};

fn main() -> semantic_rd::Result<()> {
    let bits = LogBase::BITS;
    // (X1, Y) doubly symmetric with crossover 0.1, X2 a noisy copy of Y.
    let xy = make_dsbs_named(0.1, "x1", "y")?;
    let axes = vec![Alphabet::binary("x1"), Alphabet::binary("y"), Alphabet::binary("x2")];
    let joint = JointPmf::from_fn(axes, |i| {
        let flip = if i[1] == i[2] { 0.8 } else { 0.2 };
        xy.get(&[i[0], i[1]]) * flip
    })?;

    println!("H(X1)          = {:.6} bits", joint.entropy(&["x1"], bits)?);
    println!("H(X1, X2 | Y)  = {:.6} bits", joint.entropy(&["x1", "x2", "y"], bits)? - joint.entropy(&["y"], bits)?);
    println!("I(X1; Y)       = {:.6} bits", joint.mutual_information(&["x1"], &["y"], bits)?);
    println!("I(X1; X2)      = {:.6} bits", joint.mutual_information(&["x1"], &["x2"], bits)?);
    println!("I(X1; X2 | Y)  = {:.3e} bits", joint.conditional_mutual_information(&["x1"], &["x2"], &["y"], bits)?);
    println!("X1 - Y - X2 residual = {:.3e}", joint.markov_residual(&["x1"], &["y"], &["x2"])?);
    println!("I(X1; Y) in nats = {:.6}", joint.mutual_information(&["x1"], &["y"], LogBase::NATS)?);
    Ok(())
}
