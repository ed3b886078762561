//! Jointly Gaussian sources with `X1 - Y - X2` under squared error.
//!
//! Rates are in nats. `S` is linked to the observation through
//! `S - X1 - (X2, Y)`, so only the pairwise covariances below are needed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::prob::LogBase;

/// Second-order statistics of zero-mean `(S, X1, X2, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaussianSpec {
    pub var_s: f64,
    pub var_x1: f64,
    pub var_x2: f64,
    pub var_y: f64,
    pub cov_sx1: f64,
    pub cov_x1y: f64,
    pub cov_x2y: f64,
}

impl GaussianSpec {
    pub fn new(
        var_s: f64,
        var_x1: f64,
        var_x2: f64,
        var_y: f64,
        cov_sx1: f64,
        cov_x1y: f64,
        cov_x2y: f64,
    ) -> Result<Self> {
        let spec = GaussianSpec { var_s, var_x1, var_x2, var_y, cov_sx1, cov_x1y, cov_x2y };
        spec.validate()?;
        Ok(spec)
    }

    /// All variances `var`, all covariances `cov`.
    pub fn symmetric(var: f64, cov: f64) -> Result<Self> {
        Self::new(var, var, var, var, cov, cov, cov)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("var_s", self.var_s),
            ("var_x1", self.var_x1),
            ("var_x2", self.var_x2),
            ("var_y", self.var_y),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, c, va, vb) in [
            ("cov_sx1", self.cov_sx1, self.var_s, self.var_x1),
            ("cov_x1y", self.cov_x1y, self.var_x1, self.var_y),
            ("cov_x2y", self.cov_x2y, self.var_x2, self.var_y),
        ] {
            if !c.is_finite() || c * c > va * vb * (1.0 + 1e-12) {
                return Err(domain(format!(
                    "{name} = {c} violates positive semidefiniteness ({name}^2 > {va} * {vb})"
                )));
            }
        }
        Ok(())
    }

    pub fn var_x1_given_y(&self) -> f64 {
        (self.var_x1 - self.cov_x1y * self.cov_x1y / self.var_y).max(0.0)
    }

    pub fn var_x2_given_y(&self) -> f64 {
        (self.var_x2 - self.cov_x2y * self.cov_x2y / self.var_y).max(0.0)
    }

    /// Gain of the MMSE estimator of `S` from `X1`.
    pub fn kappa(&self) -> f64 {
        self.cov_sx1 / self.var_x1
    }

    /// Smallest `Ds` at which the semantic term vanishes.
    pub fn semantic_zero_threshold(&self) -> f64 {
        mmse(self) + self.kappa().powi(2) * self.var_x1_given_y()
    }
}

/// `var_s - cov_sx1^2 / var_x1`.
pub fn mmse(spec: &GaussianSpec) -> f64 {
    (spec.var_s - spec.cov_sx1 * spec.cov_sx1 / spec.var_x1).max(0.0)
}

fn half_log_pos(ratio: f64) -> f64 {
    (0.5 * ratio.ln()).max(0.0)
}

fn check_positive(name: &str, d: f64) -> Result<()> {
    if !(d > 0.0) {
        return Err(domain(format!("{name} must be positive, got {d}")));
    }
    Ok(())
}

/// Quadratic Gaussian rate of `X1` given `Y`.
pub fn r_x1_given_y(spec: &GaussianSpec, d1: f64) -> Result<f64> {
    check_positive("D1", d1)?;
    Ok(half_log_pos(spec.var_x1_given_y() / d1))
}

/// Quadratic Gaussian rate of `X2` given `Y`.
pub fn r_x2_given_y(spec: &GaussianSpec, d2: f64) -> Result<f64> {
    check_positive("D2", d2)?;
    Ok(half_log_pos(spec.var_x2_given_y() / d2))
}

fn semantic_ratio(spec: &GaussianSpec, ds: f64) -> Result<f64> {
    let m = mmse(spec);
    if !(ds > m) {
        return Err(Error::Infeasible(format!(
            "semantic distortion {ds} must exceed mmse = {m}"
        )));
    }
    Ok(spec.kappa().powi(2) * spec.var_x1_given_y() / (ds - m))
}

/// Indirect rate of the semantic variable given `Y`.
pub fn r_s_given_y(spec: &GaussianSpec, ds: f64) -> Result<f64> {
    Ok(half_log_pos(semantic_ratio(spec, ds)?))
}

/// Which argument of the `max` in the `X1` term is larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveBranch {
    Observation,
    Semantic,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianRdResult {
    pub rate_nats: f64,
    pub term_x1_branch: ActiveBranch,
    pub mmse: f64,
    /// Set by [`gaussian_rate_capped`] when the rate was clipped.
    pub unbounded: bool,
}

impl GaussianRdResult {
    pub fn rate_in(&self, base: LogBase) -> f64 {
        base.from_nats(self.rate_nats)
    }

    pub fn rate_bits(&self) -> f64 {
        self.rate_in(LogBase::BITS)
    }
}

pub fn gaussian_rate(spec: &GaussianSpec, d1: f64, d2: f64, ds: f64) -> Result<GaussianRdResult> {
    spec.validate()?;
    check_positive("D1", d1)?;
    let r2 = r_x2_given_y(spec, d2)?;
    let obs = spec.var_x1_given_y() / d1;
    let sem = semantic_ratio(spec, ds)?;
    let (ratio, branch) = if sem > obs {
        (sem, ActiveBranch::Semantic)
    } else {
        (obs, ActiveBranch::Observation)
    };
    Ok(GaussianRdResult {
        rate_nats: r2 + half_log_pos(ratio),
        term_x1_branch: branch,
        mmse: mmse(spec),
        unbounded: false,
    })
}

/// Like [`gaussian_rate`], but clips the rate at `cap` nats and flags it,
/// for plotting near the `Ds = mmse` pole.
pub fn gaussian_rate_capped(
    spec: &GaussianSpec,
    d1: f64,
    d2: f64,
    ds: f64,
    cap: f64,
) -> Result<GaussianRdResult> {
    let mut r = gaussian_rate(spec, d1, d2, ds)?;
    if !(r.rate_nats <= cap) {
        r.rate_nats = cap;
        r.unbounded = true;
    }
    Ok(r)
}

/// `Ds` on the curve where the two arguments of the `max` coincide.
pub fn equal_rate_locus(spec: &GaussianSpec, d1: f64) -> f64 {
    mmse(spec) + spec.kappa().powi(2) * d1
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    fn from_samples(xs: impl Iterator<Item = f64>) -> Self {
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for x in xs {
            n += 1.0;
            let delta = x - mean;
            mean += delta / n;
            m2 += delta * (x - mean);
        }
        let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
        Estimate { mean, std_err: (var / n).sqrt() }
    }

    /// `mean <= bound + k * std_err`.
    pub fn within(&self, bound: f64, k: f64) -> bool {
        self.mean <= bound + k * self.std_err
    }
}

/// Monte Carlo statistics for one estimator construction.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CaseReport {
    /// `E (S - Ŝ)^2`.
    pub semantic_distortion: Estimate,
    /// `E (X1 - X̂1)^2`.
    pub d1_distortion: Estimate,
    /// `(S - Ŝ)^2 - (S̃ - Ŝ)^2 - mmse` averaged; zero in expectation.
    pub decomposition: Estimate,
    /// Bound on the estimate this case is meant to satisfy.
    pub bound: f64,
    pub bound_estimate: Estimate,
}

impl CaseReport {
    pub fn passes(&self, k: f64) -> bool {
        self.decomposition.mean.abs() <= k * self.decomposition.std_err && self.bound_estimate.within(self.bound, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MonteCarloReport {
    pub n_samples: usize,
    pub seed: u64,
    pub mmse: f64,
    /// Reconstruct `X̂1` at `D1`, then `Ŝ = κ X̂1`.
    pub case_observation: CaseReport,
    /// Reconstruct `Ŝ` at `Ds`, then `X̂1 = Ŝ / κ`.
    pub case_semantic: CaseReport,
}

impl MonteCarloReport {
    pub fn passes(&self, k: f64) -> bool {
        self.case_observation.passes(k) && self.case_semantic.passes(k)
    }
}

/// Draws `(S, X1, Y)` with `S - X1 - Y`.
struct Sampler {
    rng: ChaCha8Rng,
    sd_x1: f64,
    kappa: f64,
    sd_s_noise: f64,
    gain_y: f64,
    sd_y_noise: f64,
}

impl Sampler {
    fn new(spec: &GaussianSpec, seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sd_x1: spec.var_x1.sqrt(),
            kappa: spec.kappa(),
            sd_s_noise: mmse(spec).sqrt(),
            gain_y: spec.cov_x1y / spec.var_x1,
            sd_y_noise: (spec.var_y - spec.cov_x1y.powi(2) / spec.var_x1).max(0.0).sqrt(),
        }
    }

    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    fn draw(&mut self) -> (f64, f64, f64) {
        let x1 = self.sd_x1 * self.normal();
        let s = self.kappa * x1 + self.sd_s_noise * self.normal();
        let y = self.gain_y * x1 + self.sd_y_noise * self.normal();
        (s, x1, y)
    }
}

/// Backward test channel for a Gaussian `u` with conditional mean `m` and
/// conditional variance `var` given `Y`: returns `û` with `E (u - û)^2 = d`
/// when `d < var`, and `m` otherwise.
fn reconstruct(u: f64, m: f64, var: f64, d: f64, w: f64) -> f64 {
    if d >= var {
        return m;
    }
    let r = u - m;
    m + (1.0 - d / var) * r + ((var - d) * d / var).sqrt() * w
}

/// Simulates both estimator constructions for targets `(D1, Ds)` and checks
/// the distortion decomposition `E (S-Ŝ)^2 = mmse + E (S̃-Ŝ)^2` and the
/// bound each construction guarantees.
pub fn monte_carlo_decomposition_check(
    spec: &GaussianSpec,
    d1: f64,
    ds: f64,
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    spec.validate()?;
    check_positive("D1", d1)?;
    if n_samples < 10_000 {
        return Err(domain(format!("n_samples must be at least 10000, got {n_samples}")));
    }
    let m = mmse(spec);
    if !(ds > m) {
        return Err(Error::Infeasible(format!("Ds = {ds} must exceed mmse = {m}")));
    }
    let kappa = spec.kappa();
    if kappa == 0.0 {
        return Err(domain("cov_sx1 = 0: X1 carries no semantic information"));
    }
    let var_c = spec.var_x1_given_y();
    let cond_gain = spec.cov_x1y / spec.var_y;

    let mut sampler = Sampler::new(spec, seed);
    let mut rows = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let (s, x1, y) = sampler.draw();
        let w = sampler.normal();
        let s_tilde = kappa * x1;
        let mean_x1 = cond_gain * y;

        let xh1 = reconstruct(x1, mean_x1, var_c, d1, w);
        let case1 = (xh1, kappa * xh1);

        let sh = reconstruct(s_tilde, kappa * mean_x1, kappa * kappa * var_c, ds - m, w);
        let case2 = (sh / kappa, sh);

        rows.push((s, x1, s_tilde, case1, case2));
    }

    let case = |pick: fn(&(f64, f64, f64, (f64, f64), (f64, f64))) -> (f64, f64), bound: f64, semantic_bound: bool| {
        let sem = Estimate::from_samples(rows.iter().map(|r| (r.0 - pick(r).1).powi(2)));
        let dist1 = Estimate::from_samples(rows.iter().map(|r| (r.1 - pick(r).0).powi(2)));
        let decomposition = Estimate::from_samples(
            rows.iter().map(|r| (r.0 - pick(r).1).powi(2) - (r.2 - pick(r).1).powi(2) - m),
        );
        CaseReport {
            semantic_distortion: sem,
            d1_distortion: dist1,
            decomposition,
            bound,
            bound_estimate: if semantic_bound { sem } else { dist1 },
        }
    };
    Ok(MonteCarloReport {
        n_samples,
        seed,
        mmse: m,
        case_observation: case(|r| r.3, m + kappa * kappa * d1.min(var_c), true),
        case_semantic: case(|r| r.4, (ds - m).min(kappa * kappa * var_c) / (kappa * kappa), false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_spec() -> GaussianSpec {
        GaussianSpec::symmetric(2.0, 1.0).unwrap()
    }

    #[test]
    fn mmse_examples() {
        assert_eq!(mmse(&paper_spec()), 1.5);
        let exact = GaussianSpec::new(2.0, 2.0, 1.0, 1.0, 2.0, 0.5, 0.5).unwrap();
        assert_eq!(mmse(&exact), 0.0);
        let blind = GaussianSpec::new(3.0, 2.0, 1.0, 1.0, 0.0, 0.5, 0.5).unwrap();
        assert_eq!(mmse(&blind), 3.0);
    }

    #[test]
    fn rejects_non_psd() {
        // caption parameters: unit variances, covariance 2
        assert!(GaussianSpec::symmetric(1.0, 2.0).is_err());
        assert!(GaussianSpec::new(0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rate_examples() {
        let s = paper_spec();
        assert!((r_x2_given_y(&s, 1.0).unwrap() - 0.5 * 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(r_x2_given_y(&s, 1.5).unwrap(), 0.0);
        let e2 = 1.5 / std::f64::consts::E.powi(2);
        assert!((r_x2_given_y(&s, e2).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.semantic_zero_threshold() - 1.875).abs() < 1e-15);
        assert!((r_s_given_y(&s, 1.6).unwrap() - 0.5 * 3.75f64.ln()).abs() < 1e-12);
        assert_eq!(r_s_given_y(&s, 1.875).unwrap(), 0.0);
        assert!(matches!(r_s_given_y(&s, 1.5), Err(Error::Infeasible(_))));

        let r = gaussian_rate(&s, 0.5, 1.0, 1.875).unwrap();
        assert!((r.rate_nats - 0.5 * (3.0f64.ln() + 1.5f64.ln())).abs() < 1e-12);
        assert_eq!(r.term_x1_branch, ActiveBranch::Observation);
        let slack = gaussian_rate(&s, 10.0, 1.0, 10.0).unwrap();
        assert!((slack.rate_nats - 0.2027).abs() < 1e-4);
        assert_eq!(gaussian_rate(&s, 1.5, 1.5, 1.875).unwrap().rate_nats, 0.0);
        assert!(gaussian_rate(&s, 0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn rate_is_sum_of_terms() {
        let s = paper_spec();
        for &(d1, d2, ds) in &[(0.1, 0.3, 1.6), (0.5, 1.0, 1.7), (1.0, 2.0, 1.52)] {
            let r = gaussian_rate(&s, d1, d2, ds).unwrap();
            let parts = r_x2_given_y(&s, d2).unwrap()
                + r_x1_given_y(&s, d1).unwrap().max(r_s_given_y(&s, ds).unwrap());
            assert!((r.rate_nats - parts).abs() < 1e-15);
        }
    }

    #[test]
    fn capped_rate_flags_pole() {
        let s = paper_spec();
        let r = gaussian_rate_capped(&s, 1.0, 1.0, 1.5 + 1e-12, 5.0).unwrap();
        assert!(r.unbounded && r.rate_nats == 5.0);
    }

    #[test]
    fn locus_balances_branches() {
        let s = paper_spec();
        let d1 = 0.8;
        let ds = equal_rate_locus(&s, d1);
        let a = r_x1_given_y(&s, d1).unwrap();
        let b = r_s_given_y(&s, ds).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let s = paper_spec();
        let a = monte_carlo_decomposition_check(&s, 0.5, 1.6, 20_000, 7).unwrap();
        let b = monte_carlo_decomposition_check(&s, 0.5, 1.6, 20_000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.passes(4.0));
        assert!(monte_carlo_decomposition_check(&s, 0.5, 1.6, 100, 7).is_err());
    }
}
