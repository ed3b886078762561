//! Evaluates the closed-form rate-distortion functions of the binary
//! models, and the modified semantic distortion they rest on.

use semantic_rd::closed_form::{
    in_region_d0, in_region_d1, semantic_binary_rd, separate_compression_rate, theorem2_rate, theorem3_attained,
    theorem3_rate, theorem4_rate,
};
use semantic_rd::models::{binary_semantic_joint, semantic_hamming};
use semantic_rd::prob::BinarySourceSpec;
use semantic_rd::semantic::{ds0, modified_distortion};

fn main() -> semantic_rd::Result<()> {
    let p = 0.25;
    let dmod = modified_distortion(&binary_semantic_joint(p)?, &semantic_hamming())?;
    println!("d's for p = {p}: [[{}, {}], [{}, {}]]", dmod.get(0, 0), dmod.get(0, 1), dmod.get(1, 0), dmod.get(1, 1));
    println!("Ds = 0.3 maps to an observation distortion of {}", ds0(0.3, p)?);
    println!("R_S(0.3) = {:.6} bits", semantic_binary_rd(p, 0.3)?);

    let indep = BinarySourceSpec::conditionally_independent(p, 0.25, 0.25)?;
    println!("\nconditionally independent source, p2 = p3 = 0.25");
    for (d1, d2, ds) in [(0.1, 0.1, 0.3), (0.0, 0.2, 0.5), (0.3, 0.3, 0.3)] {
        println!("  R({d1}, {d2}, {ds}) = {:.6}", theorem2_rate(&indep, d1, d2, ds)?);
    }

    let corr = BinarySourceSpec::correlated(p, 0.25, 0.25)?;
    println!("\ncorrelated source, p1 = p2 = 0.25");
    for (d1, d2, ds) in [(0.04, 0.1, 0.4), (0.0625, 0.25, 0.5)] {
        let inside = in_region_d0(&corr, d1, d2, ds)?;
        let exact = theorem3_attained(&corr, d1, d2, ds)?;
        println!(
            "  ({d1}, {d2}, {ds}): in D0 {inside}, tight {exact}, formula {:.6}, separate coding {:.6}",
            theorem3_rate(&corr, d1, d2, ds)?,
            separate_compression_rate(&corr, d1, d2, ds)?
        );
    }

    println!("\nclassification source, N = 8");
    let (d1, d2, ds) = (0.1, 0.2, 0.4);
    println!("  in D1: {}", in_region_d1(p, 0.25, 8, d1, d2, ds)?);
    println!("  R({d1}, {d2}, {ds}) = {:.6}", theorem4_rate(p, 0.25, 8, d1, d2, ds)?);
    Ok(())
}
