//! Explicit test channels that attain the closed-form rates.
//!
//! Each builder returns a single-letter joint distribution of the sources
//! and reproductions. [`verify_achievability`] then checks that the joint
//! reproduces the source law, meets the distortion targets and has the
//! predicted conditional mutual information.

use crate::closed_form::{in_region_d0, in_region_d1};
use crate::error::{domain, Error, Result};
use crate::models::parity;
use crate::prob::{expected_distortion, Alphabet, BinarySourceSpec, DistortionMatrix, JointPmf, LogBase};
use crate::semantic::ds0;

/// Tolerance below zero for a `q_i` that is treated as rounding noise.
const Q_DUST: f64 = 1e-12;

/// `(1 - 2D)` below this makes the `q` formulas singular.
const SINGULAR: f64 = 1e-9;

/// Test channel for correlated binary sources (`Y - X1 - X2`).
///
/// With `Z_i = Y ⊕ X_i` and `Ẑ_i = Y ⊕ X̂_i`, the channel is a pair of
/// binary symmetric channels `Ẑ1 → Z1` (crossover `D1`) and `Ẑ2 → Z2`
/// (crossover `D2`). `Y` is uniform and independent of `(Ẑ1, Ẑ2, Z1, Z2)`,
/// and `Ŝ = X̂1`.
#[derive(Debug, Clone)]
pub struct CorrelatedBinaryChannel {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub d1: f64,
    pub d2: f64,
    pub ds: f64,
    /// Crossover actually used for `Ẑ1 → Z1`: `min{D1, Ds0}`.
    pub effective_d1: f64,
    /// True when `Ds0 < D1`, i.e. the semantic target drives the construction.
    pub switched: bool,
    /// Law of `(Ẑ1, Ẑ2)` over `00, 01, 10, 11`.
    pub q: [f64; 4],
    /// Joint over `x1, x2, y, x1hat, x2hat, shat`.
    pub full_joint: JointPmf,
}

/// Law of `(Z1, Z2)` over `00, 01, 10, 11` induced by the correlated source.
pub fn z_law(p1: f64, p2: f64) -> [f64; 4] {
    [(1.0 - p1) * (1.0 - p2), p1 * (1.0 - p2), p1 * p2, (1.0 - p1) * p2]
}

/// Distribution of `(Ẑ1, Ẑ2)` that makes the channel output follow
/// [`z_law`].
pub fn q_vector(p1: f64, p2: f64, d1: f64, d2: f64) -> [f64; 4] {
    let den = (1.0 - 2.0 * d1) * (1.0 - 2.0 * d2);
    let keep = 1.0 - p1 - p2 + 2.0 * p1 * p2;
    let flip = p1 + p2 - 2.0 * p1 * p2;
    let cross = p2 * (1.0 - 2.0 * p1) * (1.0 - p2);
    [
        ((1.0 - p2 - d1) * (keep - d2) + cross) / den,
        ((1.0 - p2 - d1) * (flip - d2) - cross) / den,
        ((p2 - d1) * (keep - d2) - cross) / den,
        ((p2 - d1) * (flip - d2) + cross) / den,
    ]
}

fn bsc(d: f64, a: usize, b: usize) -> f64 {
    if a == b {
        1.0 - d
    } else {
        d
    }
}

impl CorrelatedBinaryChannel {
    pub fn build(p: f64, p1: f64, p2: f64, d1: f64, d2: f64, ds: f64) -> Result<Self> {
        let spec = BinarySourceSpec::correlated(p, p1, p2)?;
        if !in_region_d0(&spec, d1, d2, ds)? {
            return Err(Error::Region(format!("({d1}, {d2}, {ds}) is outside D0")));
        }
        let d0 = ds0(ds, p)?;
        let switched = d0 < d1;
        let e1 = if switched { d0 } else { d1 };
        for d in [e1, d2] {
            if (1.0 - 2.0 * d).abs() < SINGULAR {
                return Err(domain(format!("distortion {d} makes the test channel singular")));
            }
        }
        let mut q = q_vector(p1, p2, e1, d2);
        if let Some(bad) = q.iter().find(|&&v| v < -Q_DUST) {
            return Err(Error::Region(format!("q component {bad} is negative for ({d1}, {d2}, {ds})")));
        }
        q.iter_mut().for_each(|v| *v = v.max(0.0));
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|v| *v /= total);

        let axes = vec![
            Alphabet::binary("x1"),
            Alphabet::binary("x2"),
            Alphabet::binary("y"),
            Alphabet::binary("x1hat"),
            Alphabet::binary("x2hat"),
            Alphabet::binary("shat"),
        ];
        let full_joint = JointPmf::from_fn(axes, |i| {
            let (x1, x2, y, xh1, xh2, sh) = (i[0], i[1], i[2], i[3], i[4], i[5]);
            if sh != xh1 {
                return 0.0;
            }
            let (z1, z2, zh1, zh2) = (y ^ x1, y ^ x2, y ^ xh1, y ^ xh2);
            0.5 * q[zh1 * 2 + zh2] * bsc(e1, z1, zh1) * bsc(d2, z2, zh2)
        })?;
        Ok(CorrelatedBinaryChannel { p, p1, p2, d1, d2, ds, effective_d1: e1, switched, q, full_joint })
    }

    /// Joint of `(Z1, Z2, Y, Ẑ1, Ẑ2, Ŝ)` obtained by the XOR transform.
    pub fn z_joint(&self) -> Result<JointPmf> {
        xor_transform(&self.full_joint, ["z1", "z2", "y", "z1hat", "z2hat", "shat"])
    }
}

/// Builds the correlated-binary test channel; see [`CorrelatedBinaryChannel`].
pub fn build_correlated_binary_channel(
    p: f64,
    p1: f64,
    p2: f64,
    d1: f64,
    d2: f64,
    ds: f64,
) -> Result<CorrelatedBinaryChannel> {
    CorrelatedBinaryChannel::build(p, p1, p2, d1, d2, ds)
}

/// Builds the integer classification test channel; see [`ClassificationChannel`].
pub fn build_classification_channel(p2: f64, n: usize, d1: f64) -> Result<ClassificationChannel> {
    ClassificationChannel::build(p2, n, d1)
}

/// Maps `(a1, a2, y, b1, b2, s)` to `(a1⊕y, a2⊕y, y, b1⊕y, b2⊕y, s)` on binary
/// axes. The map is an involution, so applying it twice is the identity.
pub fn xor_transform(j: &JointPmf, names: [&str; 6]) -> Result<JointPmf> {
    if j.axes().len() != 6 || j.axes().iter().any(|a| a.size() != 2) {
        return Err(domain("XOR transform needs six binary axes"));
    }
    let axes = names.iter().map(|n| Alphabet::binary(*n)).collect();
    JointPmf::from_fn(axes, |i| {
        let y = i[2];
        j.get(&[i[0] ^ y, i[1] ^ y, y, i[3] ^ y, i[4] ^ y, i[5]])
    })
}

/// Test channel for integer classification: `X̂1` uniform on `[1:N]`,
/// `p(x1 | x̂1)` keeps the symbol with probability `1 - D1` and spreads `D1`
/// evenly over the rest, and `Y - X̂1 - X1`.
#[derive(Debug, Clone)]
pub struct ClassificationChannel {
    pub p2: f64,
    pub n: usize,
    pub d1: f64,
    /// `p(y = 0 | x̂1)` for odd and even `x̂1`.
    pub p_y0_given_odd: f64,
    pub p_y0_given_even: f64,
    /// Joint over `x1, y, x1hat`.
    pub joint: JointPmf,
}

impl ClassificationChannel {
    pub fn build(p2: f64, n: usize, d1: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(domain(format!("N must be an even integer >= 4, got {n}")));
        }
        if !(0.0..=0.5).contains(&p2) {
            return Err(domain(format!("p2 must lie in [0, 0.5], got {p2}")));
        }
        let nf = n as f64;
        let bound = 2.0 * (nf - 1.0) * p2 / nf;
        if !(0.0..=bound + 1e-15).contains(&d1) {
            return Err(Error::Region(format!(
                "D1 = {d1} outside [0, {bound}] gives negative p(y | x1hat)"
            )));
        }
        let shrink = 1.0 - nf * d1 / (nf - 1.0);
        if shrink.abs() < SINGULAR {
            return Err(domain("D1 = (N-1)/N makes the channel singular"));
        }
        let half = nf * d1 / (2.0 * (nf - 1.0));
        let odd = ((p2 - half) / shrink).max(0.0);
        let even = (1.0 - p2 - half) / shrink;
        let axes = vec![
            Alphabet::one_based("x1", n)?,
            Alphabet::binary("y"),
            Alphabet::one_based("x1hat", n)?,
        ];
        let joint = JointPmf::from_fn(axes, |i| {
            let (x, y, xh) = (i[0], i[1], i[2]);
            let py0 = if parity(xh) == 1 { odd } else { even };
            let py = if y == 0 { py0 } else { 1.0 - py0 };
            let px = if x == xh { 1.0 - d1 } else { d1 / (nf - 1.0) };
            py * px / nf
        })?;
        Ok(ClassificationChannel { p2, n, d1, p_y0_given_odd: odd, p_y0_given_even: even, joint })
    }

    /// The joint extended by `Ŝ`, the parity label of `X̂1` (0 for even).
    pub fn with_semantic_output(&self) -> Result<JointPmf> {
        let mut axes = self.joint.axes().to_vec();
        axes.push(Alphabet::binary("shat"));
        JointPmf::from_fn(axes, |i| {
            if i[3] == parity(i[2]) {
                self.joint.get(&i[..3])
            } else {
                0.0
            }
        })
    }
}

/// Outcome of checking a test channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievabilityReport {
    /// Largest deviation of the induced source marginal from the source law.
    pub marginal_residual: f64,
    /// `(E d1, E d2, E d's)`; `None` for a reproduction absent from the joint.
    pub achieved: [Option<f64>; 3],
    /// `I(sources; reproductions | y)` in bits.
    pub rate: f64,
    pub closed_form_rate: f64,
    pub rate_gap: f64,
}

/// Checks a test channel whose axes follow the solver naming
/// (`x1`, `x2`, `y`, `x1hat`, `x2hat`, `shat`; any subset).
///
/// `source_law` names the source axes; each distortion is paired with the
/// `(source, reproduction)` axes it applies to and is skipped when its
/// reproduction axis is absent.
pub fn verify_achievability(
    joint: &JointPmf,
    source_law: &JointPmf,
    d1: Option<&DistortionMatrix>,
    d2: Option<&DistortionMatrix>,
    ds_mod: Option<&DistortionMatrix>,
    expected_rate: f64,
) -> Result<AchievabilityReport> {
    let names = joint.axis_names();
    let src_names: Vec<&str> = source_law.axis_names();
    let induced = joint.marginalize(&src_names)?;
    if induced.axis_names() != src_names {
        return Err(Error::AlphabetMismatch("source law axes are not in joint order".into()));
    }
    let marginal_residual = induced
        .probs()
        .iter()
        .zip(source_law.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pairs = [(d1, "x1", "x1hat"), (d2, "x2", "x2hat"), (ds_mod, "x1", "shat")];
    let mut achieved = [None; 3];
    for (slot, (d, s, r)) in achieved.iter_mut().zip(pairs) {
        if let Some(d) = d {
            if names.contains(&r) {
                *slot = Some(expected_distortion(joint, d, s, r)?);
            }
        }
    }
    let sources: Vec<&str> = ["x1", "x2"].into_iter().filter(|n| names.contains(n)).collect();
    let repros: Vec<&str> = ["x1hat", "x2hat", "shat"].into_iter().filter(|n| names.contains(n)).collect();
    let cond: Vec<&str> = ["y"].into_iter().filter(|n| names.contains(n)).collect();
    let rate = joint.conditional_mutual_information(&sources, &repros, &cond, LogBase::BITS)?;
    Ok(AchievabilityReport {
        marginal_residual,
        achieved,
        rate,
        closed_form_rate: expected_rate,
        rate_gap: (rate - expected_rate).abs(),
    })
}

/// Verifies a classification channel against the integer source law and the
/// `X1` part of the closed form.
pub fn verify_classification(
    ch: &ClassificationChannel,
    p: f64,
    ds: f64,
) -> Result<AchievabilityReport> {
    let prob = crate::models::classification_problem(p, ch.p2, ch.n)?;
    let law = prob.source().marginalize(&["x1", "y"])?;
    let expected = crate::closed_form::theorem4_x1_term(p, ch.p2, ch.n, ch.d1, ds)?;
    if !in_region_d1(p, ch.p2, ch.n, ch.d1, 0.5, ds)? {
        return Err(Error::Region("classification point outside D1".into()));
    }
    verify_achievability(
        &ch.with_semantic_output()?,
        &law,
        Some(prob.d1()),
        None,
        Some(prob.ds_mod()),
        expected,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::theorem3_rate;
    use crate::models::binary_correlated_problem;

    #[test]
    fn q_example() {
        let q = q_vector(0.25, 0.25, 0.05, 0.1);
        let want = [0.640625, 0.137153, 0.015625, 0.206597];
        for (a, b) in q.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "{q:?}");
        }
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_distortion_channel_is_identity() {
        let q = q_vector(0.2, 0.3, 0.0, 0.0);
        let z = z_law(0.2, 0.3);
        for (a, b) in q.iter().zip(z) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn correlated_channel_matches_theorem() {
        let ch = CorrelatedBinaryChannel::build(0.25, 0.25, 0.25, 0.05, 0.1, 0.3).unwrap();
        assert!(!ch.switched);
        let spec = BinarySourceSpec::correlated(0.25, 0.25, 0.25).unwrap();
        let prob = binary_correlated_problem(&spec).unwrap();
        let rep = verify_achievability(
            &ch.full_joint,
            prob.source(),
            Some(prob.d1()),
            Some(prob.d2()),
            Some(prob.ds_mod()),
            theorem3_rate(&spec, 0.05, 0.1, 0.275).unwrap(),
        )
        .unwrap();
        assert!(rep.marginal_residual < 1e-12);
        assert!((rep.achieved[0].unwrap() - 0.05).abs() < 1e-12);
        assert!((rep.achieved[1].unwrap() - 0.1).abs() < 1e-12);
        assert!((rep.achieved[2].unwrap() - 0.275).abs() < 1e-12);
        assert!(rep.rate_gap < 1e-9);
    }

    #[test]
    fn switched_branch_uses_semantic_target() {
        // Ds0 = 0.02 < D1 = 0.05
        let ch = CorrelatedBinaryChannel::build(0.25, 0.25, 0.25, 0.05, 0.1, 0.26).unwrap();
        assert!(ch.switched);
        assert!((ch.effective_d1 - 0.02).abs() < 1e-15);
    }

    #[test]
    fn out_of_region_rejected() {
        assert!(matches!(
            CorrelatedBinaryChannel::build(0.25, 0.25, 0.25, 0.05, 0.3, 0.3),
            Err(Error::Region(_))
        ));
        assert!(matches!(ClassificationChannel::build(0.1, 4, 0.2), Err(Error::Region(_))));
    }

    #[test]
    fn identity_channel_is_lossless() {
        let ch = build_correlated_binary_channel(0.25, 0.2, 0.3, 0.0, 0.0, 0.25).unwrap();
        let spec = BinarySourceSpec::correlated(0.25, 0.2, 0.3).unwrap();
        let prob = binary_correlated_problem(&spec).unwrap();
        let j = prob.source();
        let h = j.entropy(&["x1", "x2", "y"], LogBase::BITS).unwrap() - j.entropy(&["y"], LogBase::BITS).unwrap();
        let rep = verify_achievability(&ch.full_joint, prob.source(), Some(prob.d1()), Some(prob.d2()), None, h).unwrap();
        assert!(rep.achieved[0].unwrap().abs() < 1e-15 && rep.achieved[1].unwrap().abs() < 1e-15);
        assert!(rep.rate_gap < 1e-12);
    }

    #[test]
    fn xor_transform_is_involution() {
        let ch = CorrelatedBinaryChannel::build(0.25, 0.2, 0.3, 0.03, 0.1, 0.4).unwrap();
        let z = ch.z_joint().unwrap();
        let back = xor_transform(&z, ["x1", "x2", "y", "x1hat", "x2hat", "shat"]).unwrap();
        for (a, b) in back.probs().iter().zip(ch.full_joint.probs()) {
            assert!((a - b).abs() < 1e-14);
        }
        let zm = z.marginalize(&["z1", "z2"]).unwrap();
        for (a, b) in zm.probs().iter().zip(z_law(0.2, 0.3)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(z.markov_residual(&["y"], &["z1hat", "z2hat"], &["z1", "z2"]).unwrap() < 1e-12);
    }

    #[test]
    fn classification_channel_examples() {
        let ch = ClassificationChannel::build(0.25, 8, 0.05).unwrap();
        assert!((ch.p_y0_given_odd - 0.234848).abs() < 1e-6);
        let zero = ClassificationChannel::build(0.25, 8, 0.0).unwrap();
        assert_eq!(zero.p_y0_given_odd, 0.25);
        // induced p(y | x1)
        let xy = ch.joint.marginalize(&["x1", "y"]).unwrap();
        for x in 0..8 {
            let py0 = xy.get(&[x, 0]) * 8.0;
            let want = if parity(x) == 0 { 0.75 } else { 0.25 };
            assert!((py0 - want).abs() < 1e-12);
        }
        let xh = ch.joint.marginalize(&["x1hat"]).unwrap();
        assert!(xh.probs().iter().all(|v| (v - 0.125).abs() < 1e-15));
        assert!(ch.joint.markov_residual(&["y"], &["x1hat"], &["x1"]).unwrap() < 1e-12);
    }

    #[test]
    fn classification_rate() {
        let ch = ClassificationChannel::build(0.25, 8, 0.05).unwrap();
        let rep = verify_classification(&ch, 0.25, 0.3).unwrap();
        assert!(rep.rate_gap < 1e-9, "{rep:?}");
        assert!(rep.marginal_residual < 1e-12);
        assert!((rep.achieved[0].unwrap() - 0.05).abs() < 1e-12);
    }
}
