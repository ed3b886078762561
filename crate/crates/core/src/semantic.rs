//! Semantic distortion transforms.
//!
//! The encoder never sees the semantic variable `S`; it only sees `X1`. A
//! distortion `ds(s, ŝ)` is therefore replaced by its posterior average
//! `d's(x1, ŝ) = Σ_s p(s | x1) ds(s, ŝ)`, which has the same expectation
//! whenever `S - X1 - Ŝ` holds.

use crate::error::{domain, Error, Result};
use crate::prob::{expected_distortion, DistortionMatrix, JointPmf};

/// Tolerance for the caller-asserted Markov chain `S - X1 - rest`.
pub const MARKOV_TOL: f64 = 1e-10;

/// Builds `d's(x1, ŝ)` from `p(s, x1)` (axes ordered `S`, `X1`) and `ds(s, ŝ)`.
///
/// Every `x1` must carry positive mass.
pub fn modified_distortion(joint_sx1: &JointPmf, ds: &DistortionMatrix) -> Result<DistortionMatrix> {
    let axes = joint_sx1.axes();
    if axes.len() != 2 {
        return Err(domain(format!("expected a pmf over (S, X1), got {} axes", axes.len())));
    }
    let (s_ax, x_ax) = (&axes[0], &axes[1]);
    if !s_ax.same_symbols(ds.source()) {
        return Err(Error::AlphabetMismatch(format!(
            "semantic axis `{}` does not match the distortion source alphabet",
            s_ax.name()
        )));
    }
    let n_shat = ds.repro().size();
    let mut values = vec![0.0; x_ax.size() * n_shat];
    for x in 0..x_ax.size() {
        let px: f64 = (0..s_ax.size()).map(|s| joint_sx1.get(&[s, x])).sum();
        if px <= 0.0 {
            return Err(Error::ZeroMass {
                axis: x_ax.name().to_string(),
                symbol: x_ax.labels()[x].clone(),
            });
        }
        for shat in 0..n_shat {
            let acc: f64 = (0..s_ax.size()).map(|s| joint_sx1.get(&[s, x]) * ds.get(s, shat)).sum();
            values[x * n_shat + shat] = acc / px;
        }
    }
    DistortionMatrix::new(x_ax.clone(), ds.repro().clone(), values)
}

/// Maps a semantic Hamming target onto the equivalent observation-level
/// target: `(Ds - p) / (1 - 2p)`.
pub fn ds0(ds: f64, p: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p) {
        return Err(domain(format!(
            "ds0 needs p in [0, 0.5); p = {p} makes S independent of X1 or is out of range"
        )));
    }
    if ds < p {
        return Err(Error::Infeasible(format!(
            "semantic distortion {ds} is below the irreducible floor p = {p}"
        )));
    }
    Ok((ds - p) / (1.0 - 2.0 * p))
}

/// Returns `|E ds(S, Ŝ) - E d's(X1, Ŝ)|` for a joint containing `S`, `X1` and `Ŝ`.
///
/// `d's` is built from the `(S, X1)` marginal of `joint`. The chain
/// `S - X1 - (all other axes)` is verified to within [`MARKOV_TOL`] first.
pub fn check_distortion_equivalence(
    joint: &JointPmf,
    ds: &DistortionMatrix,
    s_axis: &str,
    x1_axis: &str,
    shat_axis: &str,
) -> Result<f64> {
    let rest: Vec<&str> = joint
        .axis_names()
        .into_iter()
        .filter(|n| *n != s_axis && *n != x1_axis)
        .collect();
    let residual = joint.markov_residual(&[s_axis], &[x1_axis], &rest)?;
    if residual > MARKOV_TOL {
        return Err(Error::MarkovViolation { residual, tolerance: MARKOV_TOL });
    }
    let s_pos = joint.axis_index(s_axis)?;
    let x_pos = joint.axis_index(x1_axis)?;
    let mut sx1 = joint.marginalize(&[s_axis, x1_axis])?;
    if s_pos > x_pos {
        // marginalize keeps storage order; reorder to (S, X1)
        let a = sx1.axes().to_vec();
        sx1 = JointPmf::from_fn(vec![a[1].clone(), a[0].clone()], |i| sx1.get(&[i[1], i[0]]))?;
    }
    let dmod = modified_distortion(&sx1, ds)?;
    let lhs = expected_distortion(joint, ds, s_axis, shat_axis)?;
    let rhs = expected_distortion(joint, &dmod, x1_axis, shat_axis)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{make_dsbs_named, Alphabet};

    fn ham() -> DistortionMatrix {
        DistortionMatrix::hamming(Alphabet::binary("s"), Alphabet::binary("shat")).unwrap()
    }

    #[test]
    fn dsbs_modified_distortion() {
        for p in [0.0, 0.1, 0.25, 0.4] {
            let d = modified_distortion(&make_dsbs_named(p, "s", "x1").unwrap(), &ham()).unwrap();
            assert!((d.get(0, 0) - p).abs() < 1e-15);
            assert!((d.get(1, 1) - p).abs() < 1e-15);
            assert!((d.get(0, 1) - (1.0 - p)).abs() < 1e-15);
            assert!((d.get(1, 0) - (1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn independent_semantics_give_constant_table() {
        let d = modified_distortion(&make_dsbs_named(0.5, "s", "x1").unwrap(), &ham()).unwrap();
        assert!(d.values().iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn zero_mass_observation_rejected() {
        let axes = vec![Alphabet::binary("s"), Alphabet::indexed("x1", 3).unwrap()];
        let j = JointPmf::new(axes, vec![0.25, 0.25, 0.0, 0.25, 0.25, 0.0]).unwrap();
        match modified_distortion(&j, &ham()) {
            Err(Error::ZeroMass { symbol, .. }) => assert_eq!(symbol, "2"),
            other => panic!("expected zero-mass error, got {other:?}"),
        }
    }

    #[test]
    fn ds0_values() {
        assert_eq!(ds0(0.25, 0.25).unwrap(), 0.0);
        for p in [0.0, 0.1, 0.3, 0.49] {
            assert!((ds0(0.5, p).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!((ds0(0.3, 0.25).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(ds0(0.1, 0.25), Err(Error::Infeasible(_))));
        assert!(ds0(0.6, 0.5).is_err());
    }

    #[test]
    fn equivalence_detects_markov_violation() {
        // Ŝ = S exactly: depends on S beyond X1.
        let axes = vec![Alphabet::binary("s"), Alphabet::binary("x1"), Alphabet::binary("shat")];
        let sx = make_dsbs_named(0.2, "s", "x1").unwrap();
        let j = JointPmf::from_fn(axes, |i| if i[2] == i[0] { sx.get(&[i[0], i[1]]) } else { 0.0 }).unwrap();
        assert!(matches!(
            check_distortion_equivalence(&j, &ham(), "s", "x1", "shat"),
            Err(Error::MarkovViolation { .. })
        ));
    }

    #[test]
    fn equivalence_copy_channel() {
        // Ŝ = X1: both expectations equal p.
        let p = 0.15;
        let axes = vec![Alphabet::binary("s"), Alphabet::binary("x1"), Alphabet::binary("shat")];
        let sx = make_dsbs_named(p, "s", "x1").unwrap();
        let j = JointPmf::from_fn(axes, |i| if i[2] == i[1] { sx.get(&[i[0], i[1]]) } else { 0.0 }).unwrap();
        let r = check_distortion_equivalence(&j, &ham(), "s", "x1", "shat").unwrap();
        assert!(r < 1e-15);
        assert!((expected_distortion(&j, &ham(), "s", "shat").unwrap() - p).abs() < 1e-15);
    }
}
