//! Exact rate-distortion expressions for the binary and integer
//! classification models, in bits.
//!
//! Formulas that only hold on a restricted distortion region (`D0` for
//! correlated binary sources, `D1` for integer classification) return
//! [`Error::Region`] outside it instead of extrapolating.

use crate::error::{domain, Error, Result};
use crate::prob::{hb, star, BinarySourceSpec};
use crate::semantic::ds0;

fn check_nonneg(pairs: &[(&str, f64)]) -> Result<()> {
    for (n, v) in pairs {
        if !(*v >= 0.0) {
            return Err(domain(format!("{n} must be >= 0, got {v}")));
        }
    }
    Ok(())
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&v) {
        return Err(domain(format!("{name} must lie in [0, 0.5], got {v}")));
    }
    Ok(())
}

/// `[h(D) reduction]` for a binary source: `h(p0) - h(D)` when `D <= p0`,
/// else zero.
fn truncated(p0: f64, d: f64) -> f64 {
    if d <= p0 {
        hb(p0) - hb(d)
    } else {
        0.0
    }
}

/// Ordinary rate-distortion function `1 - h(D)` of a fair bit under Hamming
/// distortion (zero for `D >= 1/2`).
pub fn uniform_binary_rd(d: f64) -> Result<f64> {
    check_nonneg(&[("D", d)])?;
    Ok(truncated(0.5, d))
}

/// Conditional rate-distortion function of `X` given `Y` for a DSBS(`p0`)
/// pair under Hamming distortion.
pub fn conditional_binary_rd(p0: f64, d: f64) -> Result<f64> {
    check_prob("p0", p0)?;
    check_nonneg(&[("D", d)])?;
    Ok(truncated(p0, d))
}

/// Rate-distortion function of a semantic bit seen through a BSC(`p`):
/// `1 - h((Ds - p) / (1 - 2p))` for `p <= Ds <= 1/2`, zero above.
pub fn semantic_binary_rd(p: f64, ds: f64) -> Result<f64> {
    check_nonneg(&[("Ds", ds)])?;
    if ds > 0.5 {
        check_prob("p", p)?;
        return Ok(0.0);
    }
    Ok(1.0 - hb(ds0(ds, p)?))
}

/// `min{D1, Ds0}`, the effective observation-level distortion.
pub fn effective_distortion(p: f64, d1: f64, ds: f64) -> Result<f64> {
    Ok(d1.min(ds0(ds, p)?))
}

/// Conditionally independent binary sources (`X1 - Y - X2`).
pub fn theorem2_rate(spec: &BinarySourceSpec, d1: f64, d2: f64, ds: f64) -> Result<f64> {
    check_nonneg(&[("D1", d1), ("D2", d2), ("Ds", ds)])?;
    spec.check_conditional_independence()?;
    let m = effective_distortion(spec.p, d1, ds)?;
    Ok(truncated(spec.p3, d2) + truncated(spec.p2, m))
}

/// Membership in the small-distortion region of the correlated model:
/// `min{D1, Ds0} <= p1 p2` and `D2 <= p1`.
pub fn in_region_d0(spec: &BinarySourceSpec, d1: f64, d2: f64, ds: f64) -> Result<bool> {
    check_nonneg(&[("D1", d1), ("D2", d2), ("Ds", ds)])?;
    let m = effective_distortion(spec.p, d1, ds)?;
    Ok(m <= spec.p1 * spec.p2 && d2 <= spec.p1)
}

/// Correlated binary sources (`Y - X1 - X2`), valid on the `D0` region.
pub fn theorem3_rate(spec: &BinarySourceSpec, d1: f64, d2: f64, ds: f64) -> Result<f64> {
    if !in_region_d0(spec, d1, d2, ds)? {
        return Err(Error::Region(format!(
            "(D1, D2, Ds) = ({d1}, {d2}, {ds}) is outside D0 for p1 = {}, p2 = {}; use the numerical solver",
            spec.p1, spec.p2
        )));
    }
    let m = effective_distortion(spec.p, d1, ds)?;
    Ok(hb(spec.p1) + hb(spec.p2) - hb(m) - hb(d2))
}

/// Whether the Theorem 3 value is attained: the point lies in `D0` and the
/// test channel of [`crate::channels::CorrelatedBinaryChannel`] exists, i.e.
/// its `q` vector is non-negative. Parts of `D0` fail the second test, and
/// there the true rate exceeds [`theorem3_rate`].
pub fn theorem3_attained(spec: &BinarySourceSpec, d1: f64, d2: f64, ds: f64) -> Result<bool> {
    if !in_region_d0(spec, d1, d2, ds)? {
        return Ok(false);
    }
    let m = effective_distortion(spec.p, d1, ds)?;
    let q = crate::channels::q_vector(spec.p1, spec.p2, m, d2);
    Ok(q.iter().all(|&v| v >= -1e-12))
}

/// Rate of compressing `X1` (two constraints) and `X2` separately given `Y`
/// for the correlated model, where `(X2, Y)` is DSBS(`p1 ⋆ p2`). Valid on
/// `D0`.
pub fn separate_compression_rate(spec: &BinarySourceSpec, d1: f64, d2: f64, ds: f64) -> Result<f64> {
    if !in_region_d0(spec, d1, d2, ds)? {
        return Err(Error::Region(format!("({d1}, {d2}, {ds}) is outside D0")));
    }
    let m = effective_distortion(spec.p, d1, ds)?;
    Ok(hb(spec.p2) - hb(m) + hb(star(spec.p1, spec.p2)?) - hb(d2))
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(domain(format!("N must be an even integer >= 4, got {n}")));
    }
    Ok(())
}

/// Membership in the region of the integer classification model:
/// `min{D1, Ds0} <= 2(N-1)p2/N` and `D2 <= 1/2`.
pub fn in_region_d1(p: f64, p2: f64, n: usize, d1: f64, d2: f64, ds: f64) -> Result<bool> {
    check_n(n)?;
    check_prob("p2", p2)?;
    check_nonneg(&[("D1", d1), ("D2", d2), ("Ds", ds)])?;
    let m = effective_distortion(p, d1, ds)?;
    Ok(m <= 2.0 * (n as f64 - 1.0) * p2 / n as f64 && d2 <= 0.5)
}

/// The `X1` part of the integer classification rate:
/// `h(p2) + log(N/2) - h(min{D1, Ds0}) - D1 log(N-1)`, transcribed with the
/// linear term in `D1`.
pub fn theorem4_x1_term(p: f64, p2: f64, n: usize, d1: f64, ds: f64) -> Result<f64> {
    check_n(n)?;
    let m = effective_distortion(p, d1, ds)?;
    let nf = n as f64;
    Ok(hb(p2) + (nf / 2.0).log2() - hb(m) - d1 * (nf - 1.0).log2())
}

/// Integer classification, valid on the `D1` region.
pub fn theorem4_rate(p: f64, p2: f64, n: usize, d1: f64, d2: f64, ds: f64) -> Result<f64> {
    if !in_region_d1(p, p2, n, d1, d2, ds)? {
        return Err(Error::Region(format!(
            "(D1, D2, Ds) = ({d1}, {d2}, {ds}) is outside D1 for p2 = {p2}, N = {n}; use the numerical solver"
        )));
    }
    Ok(theorem4_x1_term(p, p2, n, d1, ds)? + 1.0 - hb(d2))
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values are quoted to six decimals
    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 2e-6
    }

    #[test]
    fn conditional_binary_examples() {
        assert!(close(conditional_binary_rd(0.25, 0.1).unwrap(), 0.342282));
        assert_eq!(conditional_binary_rd(0.25, 0.25).unwrap(), 0.0);
        assert_eq!(conditional_binary_rd(0.25, 0.0).unwrap(), hb(0.25));
        assert!(conditional_binary_rd(0.25, -0.1).is_err());
    }

    #[test]
    fn semantic_binary_examples() {
        assert!(close(semantic_binary_rd(0.1, 0.2).unwrap(), 0.456436));
        assert_eq!(semantic_binary_rd(0.1, 0.1).unwrap(), 1.0);
        assert_eq!(semantic_binary_rd(0.1, 0.5).unwrap(), 0.0);
        assert_eq!(semantic_binary_rd(0.1, 0.7).unwrap(), 0.0);
        assert!(matches!(semantic_binary_rd(0.1, 0.05), Err(Error::Infeasible(_))));
    }

    #[test]
    fn theorem2_examples() {
        let s = BinarySourceSpec::conditionally_independent(0.25, 0.25, 0.25).unwrap();
        assert!(close(theorem2_rate(&s, 0.1, 0.1, 0.5).unwrap(), 0.684564));
        assert!(close(theorem2_rate(&s, 0.0, 0.0, 0.25).unwrap(), 2.0 * hb(0.25)));
        assert_eq!(theorem2_rate(&s, 0.4, 0.4, 0.5).unwrap(), 0.0);
        assert!(matches!(theorem2_rate(&s, 0.1, 0.1, 0.2), Err(Error::Infeasible(_))));
        let bad = BinarySourceSpec::new(0.25, 0.1, 0.25, 0.25).unwrap();
        assert!(theorem2_rate(&bad, 0.1, 0.1, 0.5).is_err());
    }

    #[test]
    fn theorem2_depends_on_min_only() {
        let s = BinarySourceSpec::conditionally_independent(0.25, 0.2, 0.3).unwrap();
        // Ds0 = 0.1 in both, D1 above it
        let a = theorem2_rate(&s, 0.15, 0.1, 0.3).unwrap();
        let b = theorem2_rate(&s, 0.35, 0.1, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn theorem3_examples() {
        let s = BinarySourceSpec::correlated(0.25, 0.25, 0.25).unwrap();
        assert!(close(theorem3_rate(&s, 0.05, 0.1, 0.3).unwrap(), 0.867163));
        assert!(close(theorem3_rate(&s, 0.0, 0.0, 0.25).unwrap(), 2.0 * hb(0.25)));
        // min picks Ds0 = 0.02
        let v = theorem3_rate(&s, 0.2, 0.1, 0.26).unwrap();
        assert!(close(v, 2.0 * hb(0.25) - hb(0.02) - hb(0.1)));
        assert!(matches!(theorem3_rate(&s, 0.05, 0.5, 0.3), Err(Error::Region(_))));
    }

    #[test]
    fn attained_subregion() {
        let s = BinarySourceSpec::correlated(0.25, 0.25, 0.25).unwrap();
        assert!(theorem3_attained(&s, 0.05, 0.1, 0.3).unwrap());
        // corner of D0 where q3 < 0
        assert!(in_region_d0(&s, 0.0625, 0.25, 0.5).unwrap());
        assert!(!theorem3_attained(&s, 0.0625, 0.25, 0.5).unwrap());
        assert!(!theorem3_attained(&s, 0.05, 0.5, 0.3).unwrap());
    }

    #[test]
    fn region_d0_examples() {
        let s = BinarySourceSpec::correlated(0.25, 0.25, 0.25).unwrap();
        assert!(in_region_d0(&s, 0.05, 0.1, 0.3).unwrap());
        assert!(!in_region_d0(&s, 0.05, 0.5, 0.3).unwrap());
        assert!(in_region_d0(&s, 0.0, 0.0, 0.25).unwrap());
    }

    #[test]
    fn theorem4_examples() {
        let v = theorem4_rate(0.25, 0.25, 8, 0.05, 0.1, 0.3).unwrap();
        assert!(close(v, 2.915517), "{v}");
        let lossless = theorem4_rate(0.25, 0.25, 8, 0.0, 0.0, 0.25).unwrap();
        assert!(close(lossless, hb(0.25) + 2.0 + 1.0));
        let half = theorem4_rate(0.25, 0.25, 8, 0.05, 0.5, 0.3).unwrap();
        assert!(close(half, theorem4_x1_term(0.25, 0.25, 8, 0.05, 0.3).unwrap()));
        assert!(theorem4_rate(0.25, 0.25, 7, 0.05, 0.1, 0.3).is_err());
        assert!(theorem4_rate(0.25, 0.25, 2, 0.05, 0.1, 0.3).is_err());
    }

    #[test]
    fn region_d1_examples() {
        assert!(in_region_d1(0.25, 0.25, 8, 0.05, 0.5, 0.3).unwrap());
        assert!(!in_region_d1(0.25, 0.25, 8, 0.05, 0.6, 0.3).unwrap());
        // bound 2(N-1)p2/N = 0.15 for p2 = 0.1, N = 4
        assert!(!in_region_d1(0.25, 0.1, 4, 0.5, 0.2, 0.5).unwrap());
        assert!(matches!(
            theorem4_rate(0.25, 0.1, 4, 0.5, 0.2, 0.5),
            Err(Error::Region(_))
        ));
    }

    #[test]
    fn semantic_rate_exceeds_plain_rate() {
        let p = 0.1;
        for i in 1..100 {
            let d = p + 0.01 + (0.49 - p - 0.01) * i as f64 / 100.0;
            assert!(semantic_binary_rd(p, d).unwrap() > uniform_binary_rd(d).unwrap());
        }
    }
}
