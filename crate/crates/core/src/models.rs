//! Source models used throughout: the binary DSBS families, the integer
//! parity-classification source, and degenerate single-source problems.

use crate::error::{domain, Result};
use crate::prob::{make_dsbs_named, Alphabet, BinarySourceSpec, DistortionMatrix, JointPmf, LogBase};
use crate::semantic::modified_distortion;
use crate::solver::RdProblem;

fn bsc(p: f64, a: usize, b: usize) -> f64 {
    if a == b {
        1.0 - p
    } else {
        p
    }
}

fn hamming(src: &str, repro: &str) -> DistortionMatrix {
    DistortionMatrix::hamming(Alphabet::binary(src), Alphabet::binary(repro)).expect("binary Hamming")
}

/// `p(s, x1)` for a semantic bit observed through a BSC(`p`).
pub fn binary_semantic_joint(p: f64) -> Result<JointPmf> {
    make_dsbs_named(p, "s", "x1")
}

/// Hamming `ds` over the binary semantic alphabet.
pub fn semantic_hamming() -> DistortionMatrix {
    hamming("s", "shat")
}

fn binary_problem(spec: &BinarySourceSpec, source: JointPmf) -> Result<RdProblem> {
    let ds_mod = modified_distortion(&binary_semantic_joint(spec.p)?, &semantic_hamming())?;
    RdProblem::new(source, hamming("x1", "x1hat"), hamming("x2", "x2hat"), ds_mod, LogBase::BITS)
}

/// Binary sources with `X1 - Y - X2`: `Y` uniform, `X1` and `X2` observed
/// from `Y` through BSC(`p2`) and BSC(`p3`).
pub fn binary_independent_problem(spec: &BinarySourceSpec) -> Result<RdProblem> {
    spec.check_conditional_independence()?;
    let axes = vec![Alphabet::binary("x1"), Alphabet::binary("x2"), Alphabet::binary("y")];
    let src = JointPmf::from_fn(axes, |i| 0.5 * bsc(spec.p2, i[0], i[2]) * bsc(spec.p3, i[1], i[2]))?;
    binary_problem(spec, src)
}

/// Binary sources with `Y - X1 - X2`: `X1` uniform, `X2` and `Y` observed
/// from `X1` through BSC(`p1`) and BSC(`p2`).
pub fn binary_correlated_problem(spec: &BinarySourceSpec) -> Result<RdProblem> {
    let axes = vec![Alphabet::binary("x1"), Alphabet::binary("x2"), Alphabet::binary("y")];
    let src = JointPmf::from_fn(axes, |i| 0.5 * bsc(spec.p1, i[0], i[1]) * bsc(spec.p2, i[0], i[2]))?;
    binary_problem(spec, src)
}

/// Parity of an integer symbol index on `[1:N]`: 0 for even, 1 for odd.
pub fn parity(index: usize) -> usize {
    // index 0 is the integer 1
    (index + 1) % 2
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(domain(format!("N must be an even integer >= 4, got {n}")));
    }
    Ok(())
}

/// `p(s, x1)` for `X1` uniform on `[1:N]` and `S` its parity seen through a
/// BSC(`p`) (`S = 0` for even).
pub fn classification_semantic_joint(p: f64, n: usize) -> Result<JointPmf> {
    check_n(n)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(domain(format!("p must lie in [0, 0.5], got {p}")));
    }
    let axes = vec![Alphabet::binary("s"), Alphabet::one_based("x1", n)?];
    JointPmf::from_fn(axes, |i| bsc(p, i[0], parity(i[1])) / n as f64)
}

/// Integer classification: `X1` uniform on `[1:N]`, `Y` its parity through a
/// BSC(`p2`), `X2` an independent fair bit, `S` the parity through BSC(`p`).
pub fn classification_problem(p: f64, p2: f64, n: usize) -> Result<RdProblem> {
    check_n(n)?;
    if !(0.0..=0.5).contains(&p2) {
        return Err(domain(format!("p2 must lie in [0, 0.5], got {p2}")));
    }
    let x1 = Alphabet::one_based("x1", n)?;
    let axes = vec![x1.clone(), Alphabet::binary("x2"), Alphabet::binary("y")];
    let src = JointPmf::from_fn(axes, |i| 0.5 * bsc(p2, parity(i[0]), i[2]) / n as f64)?;
    let d1 = DistortionMatrix::hamming(x1, Alphabet::one_based("x1hat", n)?)?;
    let ds_mod = modified_distortion(&classification_semantic_joint(p, n)?, &semantic_hamming())?;
    RdProblem::new(src, d1, hamming("x2", "x2hat"), ds_mod, LogBase::BITS)
}

/// Ordinary rate-distortion problem for one source `px` (a single-axis pmf)
/// under `d`; the second source, side information and semantic output are
/// constants.
pub fn single_source_problem(px: &JointPmf, d: &DistortionMatrix) -> Result<RdProblem> {
    if px.axes().len() != 1 {
        return Err(domain("single-source problems need a one-axis pmf"));
    }
    let x = px.axes()[0].clone();
    let axes = vec![x.clone(), Alphabet::unit("x2"), Alphabet::unit("y")];
    let src = JointPmf::new(axes, px.probs().to_vec())?;
    RdProblem::new(
        src,
        d.clone(),
        DistortionMatrix::zeros(Alphabet::unit("x2"), Alphabet::unit("x2hat")),
        DistortionMatrix::zeros(x, Alphabet::unit("shat")),
        LogBase::BITS,
    )
}

/// Indirect rate-distortion problem: only `Ŝ` is reconstructed, from the
/// observation `X1` of `p(s, x1)`.
pub fn semantic_only_problem(joint_sx1: &JointPmf, ds: &DistortionMatrix) -> Result<RdProblem> {
    let ds_mod = modified_distortion(joint_sx1, ds)?;
    let x1_name = joint_sx1.axes()[1].name().to_string();
    let px = joint_sx1.marginalize(&[x1_name.as_str()])?;
    let x = px.axes()[0].clone();
    let axes = vec![x.clone(), Alphabet::unit("x2"), Alphabet::unit("y")];
    let src = JointPmf::new(axes, px.probs().to_vec())?;
    RdProblem::new(
        src,
        DistortionMatrix::zeros(x, Alphabet::unit("x1hat")),
        DistortionMatrix::zeros(Alphabet::unit("x2"), Alphabet::unit("x2hat")),
        ds_mod,
        LogBase::BITS,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_source_satisfies_markov_chain() {
        let spec = BinarySourceSpec::conditionally_independent(0.25, 0.2, 0.3).unwrap();
        let prob = binary_independent_problem(&spec).unwrap();
        let j = prob.source();
        assert!(j.markov_residual(&["x1"], &["y"], &["x2"]).unwrap() < 1e-15);
        // (X1, X2) is DSBS(p2 * p3)
        let disagree = j.get(&[0, 1, 0]) + j.get(&[0, 1, 1]) + j.get(&[1, 0, 0]) + j.get(&[1, 0, 1]);
        assert!((disagree - spec.p1).abs() < 1e-15);
    }

    #[test]
    fn correlated_source_pairwise_laws() {
        let spec = BinarySourceSpec::correlated(0.25, 0.1, 0.3).unwrap();
        let j = binary_correlated_problem(&spec).unwrap().source().clone();
        assert!(j.markov_residual(&["y"], &["x1"], &["x2"]).unwrap() < 1e-15);
        let x2y = j.marginalize(&["x2", "y"]).unwrap();
        assert!((x2y.get(&[0, 1]) + x2y.get(&[1, 0]) - spec.p3).abs() < 1e-15);
    }

    #[test]
    fn classification_source() {
        let prob = classification_problem(0.25, 0.25, 8).unwrap();
        let j = prob.source();
        assert_eq!(j.shape(), vec![8, 2, 2]);
        // p(y = 0 | x1 = 2) = 1 - p2 (2 is even)
        let p = j.get(&[1, 0, 0]) + j.get(&[1, 1, 0]);
        assert!((p / 0.125 - 0.75).abs() < 1e-15);
        assert!((prob.ds_mod().get(1, 0) - 0.25).abs() < 1e-15);
        assert!((prob.ds_mod().get(0, 0) - 0.75).abs() < 1e-15);
        assert!(classification_problem(0.25, 0.25, 7).is_err());
        assert!(classification_problem(0.25, 0.25, 2).is_err());
    }
}
