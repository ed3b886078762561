//! Numerical rate-distortion solver for joint compression and semantic
//! inference with side information.
//!
//! The problem is
//!
//! ```text
//! R(D1, D2, Ds) = min I(X1,X2; X̂1,X̂2,Ŝ | Y)
//!   s.t. E d1(X1,X̂1) <= D1,  E d2(X2,X̂2) <= D2,  E d's(X1,Ŝ) <= Ds
//! ```
//!
//! over conditional pmfs `p(x̂1,x̂2,ŝ | x1,x2,y)`. For fixed non-negative
//! multipliers the Lagrangian is minimized by Blahut-Arimoto style
//! alternating minimization on the composite alphabets `X1×X2` and
//! `X̂1×X̂2×Ŝ`, independently for every side-information symbol `y` but with a
//! multiplier triple shared across `y`. [`solve_rd_point`] then searches the
//! multipliers so that every binding constraint is met.
//!
//! Components whose multiplier is zero are dropped from the alternating
//! minimization and filled in afterwards with the Bayes decision given `y`
//! and the remaining reproductions. Such a component is a deterministic
//! function of quantities the decoder already has, so the rate is unchanged
//! while its distortion is the best attainable for free.
//!
//! The multiplier search works coordinate by coordinate, with Newton steps
//! on the binding multipliers between rounds. When the achieved distortions
//! jump as the multipliers move (nearly flat distortion rows are the usual
//! cause) it falls back to a cutting-plane method on the dual, returning the
//! cheapest time-sharing of the channels it has evaluated. Every result
//! carries a certified lower bound from Lagrangian duality, and a point is
//! reported as converged when it meets the targets and its duality gap is
//! within [`SolverOptions::rate_tol`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::prob::{Alphabet, DistortionMatrix, JointPmf, LogBase};

/// Axis names of the composite channel returned in [`RdPoint::channel`].
pub const CHANNEL_AXES: [&str; 6] = ["x1", "x2", "y", "x1hat", "x2hat", "shat"];

/// One instance of the joint compression/inference problem.
#[derive(Debug, Clone)]
pub struct RdProblem {
    source: JointPmf,
    d1: DistortionMatrix,
    d2: DistortionMatrix,
    ds_mod: DistortionMatrix,
    log_base: LogBase,
}

impl RdProblem {
    /// `source` is `p(x1, x2, y)` with axes in that order; `ds_mod` is the
    /// modified semantic distortion over `X1 × Ŝ`.
    pub fn new(
        source: JointPmf,
        d1: DistortionMatrix,
        d2: DistortionMatrix,
        ds_mod: DistortionMatrix,
        log_base: LogBase,
    ) -> Result<Self> {
        let axes = source.axes();
        if axes.len() != 3 {
            return Err(domain(format!(
                "source must be a pmf over (X1, X2, Y), got {} axes",
                axes.len()
            )));
        }
        let checks = [
            (&axes[0], &d1, "d1"),
            (&axes[1], &d2, "d2"),
            (&axes[0], &ds_mod, "ds_mod"),
        ];
        for (axis, d, name) in checks {
            if !axis.same_symbols(d.source()) {
                return Err(Error::AlphabetMismatch(format!(
                    "{name} source alphabet does not match source axis `{}`",
                    axis.name()
                )));
            }
        }
        Ok(RdProblem { source, d1, d2, ds_mod, log_base })
    }

    pub fn source(&self) -> &JointPmf {
        &self.source
    }

    pub fn d1(&self) -> &DistortionMatrix {
        &self.d1
    }

    pub fn d2(&self) -> &DistortionMatrix {
        &self.d2
    }

    pub fn ds_mod(&self) -> &DistortionMatrix {
        &self.ds_mod
    }

    pub fn log_base(&self) -> LogBase {
        self.log_base
    }

    pub fn with_log_base(mut self, base: LogBase) -> Self {
        self.log_base = base;
        self
    }

    /// The problem restricted to `(X1, Y)`: `X2` and its reproduction become
    /// constants. This is the two-constraint conditional problem of `X1`.
    pub fn x1_part(&self) -> Result<RdProblem> {
        let a = self.source.axes();
        let unit = Alphabet::unit(a[1].name());
        let src = JointPmf::from_fn(vec![a[0].clone(), unit.clone(), a[2].clone()], |i| {
            (0..a[1].size()).map(|x2| self.source.get(&[i[0], x2, i[2]])).sum()
        })?;
        let d2 = DistortionMatrix::zeros(unit, Alphabet::unit(self.d2.repro().name()));
        RdProblem::new(src, self.d1.clone(), d2, self.ds_mod.clone(), self.log_base)
    }

    /// The problem restricted to `(X2, Y)`: `X1` and both of its
    /// reproductions become constants.
    pub fn x2_part(&self) -> Result<RdProblem> {
        let a = self.source.axes();
        let unit = Alphabet::unit(a[0].name());
        let src = JointPmf::from_fn(vec![unit.clone(), a[1].clone(), a[2].clone()], |i| {
            (0..a[0].size()).map(|x1| self.source.get(&[x1, i[1], i[2]])).sum()
        })?;
        let d1 = DistortionMatrix::zeros(unit.clone(), Alphabet::unit(self.d1.repro().name()));
        let ds = DistortionMatrix::zeros(unit, Alphabet::unit(self.ds_mod.repro().name()));
        RdProblem::new(src, d1, self.d2.clone(), ds, self.log_base)
    }

    /// Smallest attainable value of each expected distortion.
    pub fn min_distortions(&self) -> [f64; 3] {
        Prepared::new(self).min_distortions()
    }

    /// Distortions reached at zero rate: each reproduction is the best
    /// decision from `y` alone.
    pub fn zero_rate_distortions(&self) -> [f64; 3] {
        Prepared::new(self).zero_rate_distortions()
    }
}

/// Distortion targets. `ds` is the semantic target, compared against
/// `E d's(X1, Ŝ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdQuery {
    pub d1: f64,
    pub d2: f64,
    pub ds: f64,
}

impl RdQuery {
    pub fn new(d1: f64, d2: f64, ds: f64) -> Result<Self> {
        for (n, v) in [("D1", d1), ("D2", d2), ("Ds", ds)] {
            if !(v >= 0.0) || v.is_nan() {
                return Err(domain(format!("{n} must be >= 0, got {v}")));
            }
        }
        Ok(RdQuery { d1, d2, ds })
    }

    fn targets(&self) -> [f64; 3] {
        [self.d1, self.d2, self.ds]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Alternating-minimization iterations per multiplier triple.
    pub max_iters: usize,
    /// Stop once the Lagrangian decreases by less than this per iteration
    /// (or its certified gap drops below it).
    pub tol: f64,
    /// Jitter for the initial output marginal; `None` starts uniform.
    pub init_seed: Option<u64>,
    /// Accepted deviation of an achieved distortion from a binding target.
    pub constraint_tol: f64,
    /// Outer rounds of the coordinate-wise multiplier search.
    pub max_rounds: usize,
    /// Multipliers larger than this are treated as unbracketable.
    pub lambda_max: f64,
    /// Reuse the previous output marginal when only multipliers change.
    pub warm_start: bool,
    /// A feasible point whose duality gap is below this (in the problem's
    /// log base) counts as converged even if a binding constraint is not
    /// met with equality.
    pub rate_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 10_000,
            tol: 1e-10,
            init_seed: None,
            constraint_tol: 1e-6,
            max_rounds: 60,
            lambda_max: 1e5,
            warm_start: true,
            rate_tol: 1e-4,
        }
    }
}

/// A solved point of the rate-distortion function.
#[derive(Debug, Clone)]
pub struct RdPoint {
    /// `I(X1,X2; X̂1,X̂2,Ŝ | Y)` of `channel`, in the problem's log base.
    /// A target exceeded within `constraint_tol` can leave this marginally
    /// below the optimum.
    pub rate: f64,
    /// Lower bound on the true optimum from Lagrangian duality.
    pub rate_lower_bound: f64,
    /// `(E d1, E d2, E d's)` under `channel`.
    pub achieved: [f64; 3],
    /// Lagrange multipliers, in nats per unit distortion.
    pub multipliers: [f64; 3],
    /// Joint over [`CHANNEL_AXES`].
    pub channel: JointPmf,
    /// Alternating-minimization iterations spent on the final channel.
    pub iterations: usize,
    /// Multiplier evaluations performed by the search.
    pub evaluations: usize,
    pub converged: bool,
}

impl RdPoint {
    /// `rate - rate_lower_bound`, in the problem's log base.
    pub fn duality_gap(&self) -> f64 {
        (self.rate - self.rate_lower_bound).max(0.0)
    }
}

/// Cartesian product of distortion targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdGrid {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub ds: Vec<f64>,
}

impl RdGrid {
    pub fn len(&self) -> usize {
        self.d1.len() * self.d2.len() * self.ds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Queries in row-major order (`d1` outermost, `ds` innermost).
    pub fn queries(&self) -> Vec<RdQuery> {
        let mut out = Vec::with_capacity(self.len());
        for &d1 in &self.d1 {
            for &d2 in &self.d2 {
                for &ds in &self.ds {
                    out.push(RdQuery { d1, d2, ds });
                }
            }
        }
        out
    }
}

/// Result for one grid cell; failures are kept in place.
#[derive(Debug, Clone)]
pub struct SurfaceCell {
    pub query: RdQuery,
    pub outcome: std::result::Result<RdPoint, Error>,
}

#[derive(Debug, Clone)]
pub struct RdSurface {
    pub grid: RdGrid,
    pub cells: Vec<SurfaceCell>,
}

/// Problem data flattened for the inner loops.
struct Prepared {
    ny: usize,
    na: usize,
    n_x2: usize,
    sizes: [usize; 3],
    py: Vec<f64>,
    /// `p(a | y)`, row `y`; `a = x1 * |X2| + x2`.
    pa_y: Vec<f64>,
    /// `cost[k][a * sizes[k] + v]`.
    cost: [Vec<f64>; 3],
    axes: Vec<Alphabet>,
    log_base: LogBase,
}

impl Prepared {
    fn new(prob: &RdProblem) -> Self {
        let ax = prob.source.axes();
        let (n1, n2, ny) = (ax[0].size(), ax[1].size(), ax[2].size());
        let na = n1 * n2;
        let mut py = vec![0.0; ny];
        let mut pa_y = vec![0.0; ny * na];
        for x1 in 0..n1 {
            for x2 in 0..n2 {
                for y in 0..ny {
                    let p = prob.source.get(&[x1, x2, y]);
                    py[y] += p;
                    pa_y[y * na + x1 * n2 + x2] = p;
                }
            }
        }
        for y in 0..ny {
            if py[y] > 0.0 {
                for a in 0..na {
                    pa_y[y * na + a] /= py[y];
                }
            }
        }
        let sizes = [prob.d1.repro().size(), prob.d2.repro().size(), prob.ds_mod.repro().size()];
        let mut cost = [
            Vec::with_capacity(na * sizes[0]),
            Vec::with_capacity(na * sizes[1]),
            Vec::with_capacity(na * sizes[2]),
        ];
        for a in 0..na {
            let (x1, x2) = (a / n2, a % n2);
            cost[0].extend((0..sizes[0]).map(|v| prob.d1.get(x1, v)));
            cost[1].extend((0..sizes[1]).map(|v| prob.d2.get(x2, v)));
            cost[2].extend((0..sizes[2]).map(|v| prob.ds_mod.get(x1, v)));
        }
        let axes = vec![
            ax[0].renamed(CHANNEL_AXES[0]),
            ax[1].renamed(CHANNEL_AXES[1]),
            ax[2].renamed(CHANNEL_AXES[2]),
            prob.d1.repro().renamed(CHANNEL_AXES[3]),
            prob.d2.repro().renamed(CHANNEL_AXES[4]),
            prob.ds_mod.repro().renamed(CHANNEL_AXES[5]),
        ];
        Prepared { ny, na, n_x2: n2, sizes, py, pa_y, cost, axes, log_base: prob.log_base }
    }

    fn nb(&self) -> usize {
        self.sizes.iter().product()
    }

    #[inline]
    fn cost(&self, k: usize, a: usize, v: usize) -> f64 {
        self.cost[k][a * self.sizes[k] + v]
    }

    fn pa(&self, y: usize) -> &[f64] {
        &self.pa_y[y * self.na..(y + 1) * self.na]
    }

    fn min_distortions(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for y in 0..self.ny {
                let pa = self.pa(y);
                for (a, &p) in pa.iter().enumerate() {
                    let best = (0..self.sizes[k]).map(|v| self.cost(k, a, v)).fold(f64::INFINITY, f64::min);
                    *o += self.py[y] * p * best;
                }
            }
        }
        out
    }

    fn zero_rate_distortions(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for y in 0..self.ny {
                let pa = self.pa(y);
                let best = (0..self.sizes[k])
                    .map(|v| pa.iter().enumerate().map(|(a, &p)| p * self.cost(k, a, v)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min);
                *o += self.py[y] * best;
            }
        }
        out
    }

    /// Decomposes a full composite index into `(x̂1, x̂2, ŝ)`.
    #[inline]
    fn split(&self, b: usize) -> [usize; 3] {
        let s = b % self.sizes[2];
        let r = b / self.sizes[2];
        [r / self.sizes[1], r % self.sizes[1], s]
    }

    #[inline]
    fn join(&self, v: [usize; 3]) -> usize {
        (v[0] * self.sizes[1] + v[1]) * self.sizes[2] + v[2]
    }
}

/// Outcome of one alternating minimization for a single `y`.
struct BaOutcome {
    iterations: usize,
    converged: bool,
    /// Lagrangian value (nats) at the final output marginal.
    value: f64,
    /// `ln max_b c_b`: the value is within this of the minimum.
    gap: f64,
}

/// Alternating minimization for one side-information symbol.
///
/// `w[a * nb + b] = exp(-(c(a,b) - shift[a]))`. On return `q` holds the
/// final output marginal.
fn alternate(
    pa: &[f64],
    w: &[f64],
    shift: &[f64],
    nb: usize,
    q: &mut [f64],
    opts: &SolverOptions,
    gap_tol: Option<f64>,
) -> Result<BaOutcome> {
    let na = pa.len();
    let mut z = vec![0.0; na];
    let mut coef = vec![0.0; nb];
    let mut prev = f64::INFINITY;
    let mut value = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        value = 0.0;
        coef.iter_mut().for_each(|c| *c = 0.0);
        for a in 0..na {
            if pa[a] == 0.0 {
                continue;
            }
            let row = &w[a * nb..(a + 1) * nb];
            let za: f64 = row.iter().zip(q.iter()).map(|(wi, qi)| wi * qi).sum();
            if !(za > 0.0) || !za.is_finite() {
                return Err(Error::Numeric(format!(
                    "partition sum {za} for source symbol {a}; multipliers too large for f64"
                )));
            }
            z[a] = za;
            value += pa[a] * (shift[a] - za.ln());
            let f = pa[a] / za;
            for (c, wi) in coef.iter_mut().zip(row) {
                *c += f * wi;
            }
        }
        let (bmax, cmax) = coef.iter().copied().enumerate().fold((0, 0.0), |m, (b, c)| if c > m.1 { (b, c) } else { m });
        gap = cmax.ln().max(0.0);
        if iterations % 8 == 0 && cmax > 1.0 {
            // Multiplicative updates revive an underweighted output only
            // geometrically; step toward it with an exact line search.
            let gamma = toward_vertex(pa, w, &z, nb, bmax);
            q.iter_mut().for_each(|qi| *qi *= 1.0 - gamma);
            q[bmax] += gamma;
        } else {
            let mut total = 0.0;
            for (qi, c) in q.iter_mut().zip(&coef) {
                *qi *= c;
                total += *qi;
            }
            if !total.is_finite() || total <= 0.0 {
                return Err(Error::Numeric("output marginal degenerated".into()));
            }
            q.iter_mut().for_each(|qi| {
                *qi /= total;
                if *qi < 1e-280 {
                    *qi = 0.0;
                }
            });
        }
        let done = match gap_tol {
            Some(g) => gap < g,
            None => prev - value < opts.tol || gap < opts.tol,
        };
        if done {
            converged = true;
            break;
        }
        prev = value;
    }
    Ok(BaOutcome { iterations, converged, value, gap })
}

/// Minimizer over `γ ∈ [0, 1]` of `-Σ p(a) ln((1-γ) z(a) + γ w(a, b))`, the
/// Lagrangian along the segment from the current output marginal to the
/// point mass on `b`.
fn toward_vertex(pa: &[f64], w: &[f64], z: &[f64], nb: usize, b: usize) -> f64 {
    let slope = |g: f64| -> f64 {
        pa.iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, &p)| {
                let wb = w[a * nb + b];
                -p * (wb - z[a]) / ((1.0 - g) * z[a] + g * wb)
            })
            .sum()
    };
    if slope(1.0) <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A channel produced for one multiplier triple, or a time-sharing of two.
#[derive(Debug, Clone)]
struct Evaluation {
    lambda: [f64; 3],
    /// `t[(y * na + a) * nb + b]`.
    t: Vec<f64>,
    rate_nats: f64,
    dist: [f64; 3],
    /// `(certified Lagrangian lower bound in nats, multipliers)` pairs; each
    /// yields a dual lower bound on the rate.
    duals: Vec<(f64, [f64; 3])>,
    iterations: usize,
    converged: bool,
}

impl Evaluation {
    fn dual_bound_nats(&self, targets: &[f64; 3]) -> f64 {
        self.duals
            .iter()
            .map(|(lower, lam)| lower - lam.iter().zip(targets).map(|(l, t)| l * t).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Runs alternating minimizations for one problem, caching output marginals
/// between multiplier triples.
struct Evaluator<'a> {
    prep: &'a Prepared,
    opts: SolverOptions,
    warm: HashMap<[bool; 3], Vec<Vec<f64>>>,
    count: usize,
    /// Certified dual pairs of every evaluation so far.
    duals: Vec<(f64, [f64; 3])>,
    /// When set, alternating minimization runs until its certified gap is
    /// below this (nats) instead of stopping on slow progress.
    gap_tol: Option<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(prep: &'a Prepared, opts: SolverOptions) -> Self {
        Evaluator { prep, opts, warm: HashMap::new(), count: 0, duals: Vec::new(), gap_tol: None }
    }

    fn initial_q(&self, nb: usize, y: usize) -> Vec<f64> {
        match self.opts.init_seed {
            None => vec![1.0 / nb as f64; nb],
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(y as u64));
                let mut q: Vec<f64> = (0..nb).map(|_| 1.0 + 0.01 * rng.random::<f64>()).collect();
                let s: f64 = q.iter().sum();
                q.iter_mut().for_each(|v| *v /= s);
                q
            }
        }
    }

    fn eval(&mut self, lambda: [f64; 3]) -> Result<Evaluation> {
        if lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(domain(format!("multipliers must be finite and >= 0, got {lambda:?}")));
        }
        self.count += 1;
        let p = self.prep;
        let active = [lambda[0] > 0.0, lambda[1] > 0.0, lambda[2] > 0.0];
        let red_sizes: Vec<(usize, usize)> =
            (0..3).filter(|&k| active[k]).map(|k| (k, p.sizes[k])).collect();
        let nbr: usize = red_sizes.iter().map(|(_, s)| s).product();
        // component values of each reduced index, -1 for inactive components
        let comps: Vec<[usize; 3]> = (0..nbr)
            .map(|mut b| {
                let mut v = [usize::MAX; 3];
                for &(k, s) in red_sizes.iter().rev() {
                    v[k] = b % s;
                    b /= s;
                }
                v
            })
            .collect();

        let mut w = vec![0.0; p.na * nbr];
        let mut shift = vec![0.0; p.na];
        for a in 0..p.na {
            let row = &mut w[a * nbr..(a + 1) * nbr];
            for (b, v) in comps.iter().enumerate() {
                row[b] = (0..3)
                    .filter(|&k| active[k])
                    .map(|k| lambda[k] * p.cost(k, a, v[k]))
                    .sum();
            }
            let m = row.iter().copied().fold(f64::INFINITY, f64::min);
            shift[a] = m;
            for c in row.iter_mut() {
                *c = (-(*c - m)).exp();
            }
        }

        let mut qs = match (self.opts.warm_start, self.warm.get(&active)) {
            (true, Some(prev)) => prev
                .iter()
                .map(|q| q.iter().map(|v| (1.0 - 1e-6) * v + 1e-6 / nbr as f64).collect())
                .collect(),
            _ => (0..p.ny).map(|y| self.initial_q(nbr, y)).collect::<Vec<_>>(),
        };

        let nb = p.nb();
        let mut t = vec![0.0; p.ny * p.na * nb];
        let mut iterations = 0;
        let mut converged = true;
        let mut lower = 0.0;
        for y in 0..p.ny {
            let base = y * p.na * nb;
            if p.py[y] == 0.0 {
                for a in 0..p.na {
                    t[base + a * nb] = 1.0;
                }
                continue;
            }
            let pa = p.pa(y);
            let q = &mut qs[y];
            let out = alternate(pa, &w, &shift, nbr, q, &self.opts, self.gap_tol)?;
            iterations = iterations.max(out.iterations);
            converged &= out.converged;
            lower += p.py[y] * (out.value - out.gap);

            // reduced channel from the final marginal
            let mut tr = vec![0.0; p.na * nbr];
            for a in 0..p.na {
                let row = &w[a * nbr..(a + 1) * nbr];
                let za: f64 = row.iter().zip(q.iter()).map(|(wi, qi)| wi * qi).sum();
                for b in 0..nbr {
                    tr[a * nbr + b] = q[b] * row[b] / za;
                }
            }
            // Bayes completion of inactive components
            for (br, v) in comps.iter().enumerate() {
                let mut full = *v;
                for k in (0..3).filter(|&k| !active[k]) {
                    let mut best = (f64::INFINITY, 0usize);
                    for val in 0..p.sizes[k] {
                        let risk: f64 = (0..p.na).map(|a| pa[a] * tr[a * nbr + br] * p.cost(k, a, val)).sum();
                        if risk < best.0 - 1e-15 {
                            best = (risk, val);
                        }
                    }
                    full[k] = best.1;
                }
                let b = p.join(full);
                for a in 0..p.na {
                    t[base + a * nb + b] += tr[a * nbr + br];
                }
            }
        }
        if self.opts.warm_start {
            self.warm.insert(active, qs);
        }
        let (rate_nats, dist) = channel_stats(p, &t);
        self.duals.push((lower, lambda));
        Ok(Evaluation {
            lambda,
            t,
            rate_nats,
            dist,
            duals: vec![(lower, lambda)],
            iterations,
            converged,
        })
    }
}

/// Conditional mutual information (nats) and expected distortions of a
/// composite channel.
fn channel_stats(p: &Prepared, t: &[f64]) -> (f64, [f64; 3]) {
    let nb = p.nb();
    let mut rate = 0.0;
    let mut dist = [0.0; 3];
    let mut q = vec![0.0; nb];
    for y in 0..p.ny {
        if p.py[y] == 0.0 {
            continue;
        }
        let pa = p.pa(y);
        let base = y * p.na * nb;
        q.iter_mut().for_each(|v| *v = 0.0);
        for a in 0..p.na {
            for b in 0..nb {
                q[b] += pa[a] * t[base + a * nb + b];
            }
        }
        let mut ry = 0.0;
        for a in 0..p.na {
            if pa[a] == 0.0 {
                continue;
            }
            for b in 0..nb {
                let tv = t[base + a * nb + b];
                if tv > 0.0 && q[b] > 0.0 {
                    ry += pa[a] * tv * (tv / q[b]).ln();
                    let v = p.split(b);
                    for (k, d) in dist.iter_mut().enumerate() {
                        *d += p.py[y] * pa[a] * tv * p.cost(k, a, v[k]);
                    }
                }
            }
        }
        rate += p.py[y] * ry;
    }
    (rate.max(0.0), dist)
}

fn mix(p: &Prepared, lo: &Evaluation, hi: &Evaluation, theta: f64) -> Evaluation {
    let t: Vec<f64> = lo.t.iter().zip(&hi.t).map(|(a, b)| theta * a + (1.0 - theta) * b).collect();
    let (rate_nats, dist) = channel_stats(p, &t);
    let mut lambda = [0.0; 3];
    for k in 0..3 {
        lambda[k] = theta * lo.lambda[k] + (1.0 - theta) * hi.lambda[k];
    }
    Evaluation {
        lambda,
        t,
        rate_nats,
        dist,
        duals: lo.duals.iter().chain(&hi.duals).cloned().collect(),
        iterations: lo.iterations.max(hi.iterations),
        converged: lo.converged && hi.converged,
    }
}

fn to_point(p: &Prepared, ev: Evaluation, targets: Option<&[f64; 3]>, evaluations: usize, satisfied: bool) -> Result<RdPoint> {
    let nb = p.nb();
    let mut probs = vec![0.0; p.ny * p.na * nb];
    // storage order of the channel joint: x1, x2, y, x̂1, x̂2, ŝ
    for y in 0..p.ny {
        for a in 0..p.na {
            let pay = p.py[y] * p.pa(y)[a];
            let (x1, x2) = (a / p.n_x2, a % p.n_x2);
            let dst = ((x1 * p.n_x2 + x2) * p.ny + y) * nb;
            for b in 0..nb {
                probs[dst + b] = pay * ev.t[(y * p.na + a) * nb + b];
            }
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|v| *v /= total);
    let channel = JointPmf::new(p.axes.clone(), probs)?;
    let lower = match targets {
        Some(t) => ev.dual_bound_nats(t),
        None => ev.dual_bound_nats(&ev.dist),
    };
    Ok(RdPoint {
        rate: p.log_base.from_nats(ev.rate_nats),
        rate_lower_bound: p.log_base.from_nats(lower.max(0.0)),
        achieved: ev.dist,
        multipliers: ev.lambda,
        channel,
        iterations: ev.iterations,
        evaluations,
        converged: ev.converged && satisfied,
    })
}

/// Minimizes the Lagrangian `I + λ1 E d1 + λ2 E d2 + λs E d's` for fixed
/// multipliers (in nats per unit distortion).
///
/// The returned point reports the rate and distortions of the minimizing
/// channel; `converged` is false when `max_iters` ran out first.
pub fn ba_fixed_multipliers(
    prob: &RdProblem,
    lambda1: f64,
    lambda2: f64,
    lambda_s: f64,
    opts: &SolverOptions,
) -> Result<RdPoint> {
    if !(opts.tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let prep = Prepared::new(prob);
    let mut ev = Evaluator::new(&prep, *opts);
    let out = ev.eval([lambda1, lambda2, lambda_s])?;
    to_point(&prep, out, None, 1, true)
}

struct Search<'a, 'b> {
    ev: Evaluator<'a>,
    prep: &'b Prepared,
    targets: [f64; 3],
    tol: f64,
    lambda_max: f64,
}

impl Search<'_, '_> {
    fn satisfied(&self, e: &Evaluation, k: usize) -> bool {
        let g = e.dist[k] - self.targets[k];
        g <= self.tol && (e.lambda[k] == 0.0 || g >= -self.tol)
    }

    fn all_satisfied(&self, e: &Evaluation) -> bool {
        (0..3).all(|k| self.satisfied(e, k))
    }

    fn with(&mut self, base: [f64; 3], k: usize, value: f64) -> Result<Evaluation> {
        let mut l = base;
        l[k] = value;
        self.ev.eval(l)
    }

    /// Moves multiplier `k` until its constraint is met with equality (or is
    /// slack at zero).
    fn line_search(&mut self, cur: Evaluation, k: usize) -> Result<Evaluation> {
        let target = self.targets[k];
        let g = |e: &Evaluation| e.dist[k] - target;
        let base = cur.lambda;
        let (mut lo, mut hi);
        if g(&cur) > self.tol {
            lo = cur;
            let mut step = lo.lambda[k].max(0.5);
            loop {
                let next = (lo.lambda[k] + step).min(self.lambda_max);
                let e = self.with(base, k, next)?;
                if g(&e) <= self.tol {
                    hi = e;
                    break;
                }
                if next >= self.lambda_max {
                    return Err(Error::Bracket(format!(
                        "constraint {} stays at {:.6e} > target {:.6e} at multiplier {}",
                        k + 1,
                        e.dist[k],
                        target,
                        self.lambda_max
                    )));
                }
                lo = e;
                step *= 2.0;
            }
        } else {
            hi = cur;
            let zero = self.with(base, k, 0.0)?;
            if g(&zero) <= self.tol {
                return Ok(zero);
            }
            lo = zero;
        }
        if g(&hi) >= -self.tol {
            return Ok(hi);
        }
        let mut last_width = hi.lambda[k] - lo.lambda[k];
        for i in 0..80 {
            let (a, b) = (lo.lambda[k], hi.lambda[k]);
            let width = b - a;
            if width <= 1e-12 * (1.0 + b) {
                break;
            }
            let (ga, gb) = (g(&lo), g(&hi));
            // secant step, falling back to bisection when it stalls
            let mut x = if i % 3 == 2 || width > 0.5 * last_width {
                0.5 * (a + b)
            } else {
                a + width * ga / (ga - gb)
            };
            if !(x > a + 0.01 * width && x < b - 0.01 * width) {
                x = 0.5 * (a + b);
            }
            last_width = width;
            let e = self.with(base, k, x)?;
            let ge = g(&e);
            if ge.abs() <= self.tol {
                return Ok(e);
            }
            if ge > 0.0 {
                lo = e;
            } else {
                hi = e;
            }
        }
        // The achieved distortion jumps across the target: time-share the
        // channels at both ends of the bracket.
        let theta = (target - hi.dist[k]) / (lo.dist[k] - hi.dist[k]);
        Ok(mix(self.prep, &lo, &hi, theta.clamp(0.0, 1.0)))
    }

    /// Violation of the optimality conditions: excess distortion, plus the
    /// slack of constraints whose multiplier is positive.
    fn residual(&self, e: &Evaluation) -> f64 {
        (0..3)
            .map(|k| {
                let g = e.dist[k] - self.targets[k];
                if e.lambda[k] > 0.0 { g.abs() } else { g.max(0.0) }
            })
            .fold(0.0, f64::max)
    }

    /// Newton steps on the multipliers of the binding constraints, with a
    /// finite-difference Jacobian of the achieved distortions. Coupled
    /// constraints make coordinate-wise search zigzag; this resolves them
    /// when the distortions vary smoothly with the multipliers.
    fn newton(&mut self, mut cur: Evaluation) -> Result<Evaluation> {
        for _ in 0..20 {
            if self.all_satisfied(&cur) {
                break;
            }
            let lam = cur.lambda;
            let act: Vec<usize> =
                (0..3).filter(|&k| lam[k] > 0.0 || cur.dist[k] > self.targets[k] + self.tol).collect();
            if act.is_empty() {
                break;
            }
            let base = self.ev.eval(lam)?;
            let n = act.len();
            let mut jac = vec![0.0; n * n];
            for (c, &j) in act.iter().enumerate() {
                let h = 1e-4 * lam[j].max(1.0);
                let e = self.with(lam, j, lam[j] + h)?;
                for (r, &k) in act.iter().enumerate() {
                    jac[r * n + c] = (e.dist[k] - base.dist[k]) / h;
                }
            }
            let rhs: Vec<f64> = act.iter().map(|&k| self.targets[k] - base.dist[k]).collect();
            let Some(step) = solve_dense(&mut jac, rhs) else { break };
            let r0 = self.residual(&cur);
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..8 {
                let mut l = lam;
                for (i, &k) in act.iter().enumerate() {
                    l[k] = (lam[k] + alpha * step[i]).clamp(0.0, self.lambda_max);
                }
                let e = self.ev.eval(l)?;
                if self.residual(&e) < r0 {
                    accepted = Some(e);
                    break;
                }
                alpha *= 0.5;
            }
            match accepted {
                Some(e) => cur = e,
                None => break,
            }
        }
        Ok(cur)
    }
}

impl Search<'_, '_> {
    /// Cutting-plane search on the dual, used when the multiplier search
    /// does not settle. Every evaluated channel `T_i` bounds the dual
    /// function from above by `I(T_i) + λ·(d(T_i) - D)`; the maximizer of
    /// that model gives the next multipliers, and the best mixture of the
    /// collected channels that meets the targets gives the returned point.
    fn cutting_plane(&mut self, cur: Evaluation, gap_target: f64, max_cuts: usize) -> Result<Evaluation> {
        let m = self.lambda_max;
        self.ev.gap_tol = Some(0.25 * gap_target);
        let mut cols = vec![cur.clone()];
        for l in [cur.lambda, [0.0; 3], [m; 3]] {
            cols.push(self.ev.eval(l)?);
        }
        let mut best_lower = f64::NEG_INFINITY;
        let mut lambda = cur.lambda;
        let mut last_upper = f64::INFINITY;
        let mut stalled = 0;
        for _ in 0..max_cuts {
            best_lower = self.ev.duals.iter().map(|(lo, lam)| dual_value(*lo, lam, &self.targets)).fold(best_lower, f64::max);
            let (upper, next) = self.kelley_step(&cols)?;
            stalled = if upper < last_upper - 1e-3 * gap_target { 0 } else { stalled + 1 };
            last_upper = upper;
            if stalled >= 10 {
                break;
            }
            lambda = next;
            if upper - best_lower <= gap_target {
                break;
            }
            cols.push(self.ev.eval(next)?);
        }
        self.ev.gap_tol = None;
        let theta = self.best_mixture(&cols)?;
        let nt = cols[0].t.len();
        let mut t = vec![0.0; nt];
        for (c, &w) in cols.iter().zip(&theta) {
            if w > 0.0 {
                t.iter_mut().zip(&c.t).for_each(|(a, b)| *a += w * b);
            }
        }
        let (rate_nats, dist) = channel_stats(self.prep, &t);
        Ok(Evaluation {
            lambda,
            t,
            rate_nats,
            dist,
            duals: Vec::new(),
            iterations: cols.iter().map(|c| c.iterations).max().unwrap_or(0),
            converged: true,
        })
    }

    /// Maximizes `min_i I_i + λ·(d_i - D)` over `0 <= λ <= lambda_max`.
    fn kelley_step(&self, cols: &[Evaluation]) -> Result<(f64, [f64; 3])> {
        use minilp::{ComparisonOp, OptimizationDirection, Problem};
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let lam: Vec<_> = (0..3).map(|k| lp.add_var(-self.targets[k], (0.0, self.lambda_max))).collect();
        for c in cols {
            let mut expr = vec![(t, 1.0)];
            expr.extend((0..3).map(|k| (lam[k], -c.dist[k])));
            lp.add_constraint(&expr[..], ComparisonOp::Le, c.rate_nats);
        }
        let sol = lp.solve().map_err(|e| Error::Numeric(format!("cutting-plane model: {e}")))?;
        Ok((sol.objective(), std::array::from_fn(|k| *sol.var_value(lam[k]))))
    }

    /// Weights of the cheapest mixture of `cols` meeting the targets, with
    /// violations priced at `lambda_max`.
    fn best_mixture(&self, cols: &[Evaluation]) -> Result<Vec<f64>> {
        use minilp::{ComparisonOp, OptimizationDirection, Problem};
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let theta: Vec<_> = cols.iter().map(|c| lp.add_var(c.rate_nats, (0.0, f64::INFINITY))).collect();
        let slack: Vec<_> = (0..3).map(|_| lp.add_var(self.lambda_max, (0.0, f64::INFINITY))).collect();
        for k in 0..3 {
            let mut expr: Vec<_> = theta.iter().zip(cols).map(|(&v, c)| (v, c.dist[k])).collect();
            expr.push((slack[k], -1.0));
            lp.add_constraint(&expr[..], ComparisonOp::Le, self.targets[k]);
        }
        let ones: Vec<_> = theta.iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(&ones[..], ComparisonOp::Eq, 1.0);
        let sol = lp.solve().map_err(|e| Error::Numeric(format!("channel mixture: {e}")))?;
        let mut w: Vec<f64> = theta.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        Ok(w)
    }
}

fn dual_value(lower: f64, lambda: &[f64; 3], targets: &[f64; 3]) -> f64 {
    lower - lambda.iter().zip(targets).map(|(l, t)| l * t).sum::<f64>()
}

/// Solves `a x = b` for a small dense row-major `a` by Gaussian elimination
/// with partial pivoting. `None` when `a` is numerically singular.
fn solve_dense(a: &mut [f64], mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) {
        return None;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-10 * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r * n + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Evaluates the rate-distortion function at one target triple.
///
/// Targets at or above the zero-rate distortion of a coordinate leave that
/// multiplier at zero. Targets below the smallest attainable distortion are
/// rejected as infeasible.
pub fn solve_rd_point(prob: &RdProblem, query: &RdQuery, opts: &SolverOptions) -> Result<RdPoint> {
    if !(opts.tol > 0.0 && opts.constraint_tol > 0.0) {
        return Err(domain("tolerances must be positive"));
    }
    let targets = RdQuery::new(query.d1, query.d2, query.ds)?.targets();
    let prep = Prepared::new(prob);
    let mins = prep.min_distortions();
    for k in 0..3 {
        if targets[k] < mins[k] - opts.constraint_tol {
            return Err(Error::Infeasible(format!(
                "target D{} = {} is below the smallest attainable distortion {}",
                ["1", "2", "s"][k],
                targets[k],
                mins[k]
            )));
        }
    }
    let mut search = Search {
        ev: Evaluator::new(&prep, *opts),
        prep: &prep,
        targets,
        tol: opts.constraint_tol,
        lambda_max: opts.lambda_max,
    };
    let mut cur = search.ev.eval([0.0; 3])?;
    let mut rounds = 0;
    while !search.all_satisfied(&cur) && rounds < opts.max_rounds {
        for k in 0..3 {
            if !search.satisfied(&cur, k) {
                cur = search.line_search(cur, k)?;
            }
        }
        rounds += 1;
        if rounds >= 2 && !search.all_satisfied(&cur) {
            cur = search.newton(cur)?;
        }
    }
    let mut satisfied = search.all_satisfied(&cur);
    if !satisfied {
        let bound = search.ev.duals.iter().map(|(lo, lam)| dual_value(*lo, lam, &targets)).fold(f64::NEG_INFINITY, f64::max);
        let gap = prob.log_base.from_nats(cur.rate_nats - bound);
        let feasible = (0..3).all(|k| cur.dist[k] - targets[k] <= opts.constraint_tol);
        if !feasible || gap > opts.rate_tol {
            let target = prob.log_base.to_nats(0.1 * opts.rate_tol);
            let mixed = search.cutting_plane(cur.clone(), target, 400)?;
            let ok = (0..3).all(|k| mixed.dist[k] - targets[k] <= opts.constraint_tol);
            if ok || !feasible {
                cur = mixed;
                satisfied = false;
            }
        }
    }
    let feasible = (0..3).all(|k| cur.dist[k] - targets[k] <= opts.constraint_tol);
    let count = search.ev.count;
    cur.duals.append(&mut search.ev.duals);
    let mut pt = to_point(&prep, cur, Some(&targets), count, true)?;
    // The dual bound certifies the rate even when the multiplier search
    // stops short of complementary slackness or an inner solve runs out of
    // iterations.
    pt.converged = (pt.converged && satisfied) || (feasible && pt.duality_gap() <= opts.rate_tol);
    Ok(pt)
}

/// Solves every cell of `grid`, in parallel. Cells are independent, so the
/// result does not depend on the thread count.
pub fn sweep_surface(prob: &RdProblem, grid: &RdGrid, opts: &SolverOptions) -> Result<RdSurface> {
    if grid.is_empty() {
        return Err(domain("empty grid"));
    }
    let cells = grid
        .queries()
        .into_par_iter()
        .map(|query| SurfaceCell { query, outcome: solve_rd_point(prob, &query, opts) })
        .collect();
    Ok(RdSurface { grid: grid.clone(), cells })
}

/// Same as [`sweep_surface`] on a single thread.
pub fn sweep_surface_serial(prob: &RdProblem, grid: &RdGrid, opts: &SolverOptions) -> Result<RdSurface> {
    if grid.is_empty() {
        return Err(domain("empty grid"));
    }
    let cells = grid
        .queries()
        .into_iter()
        .map(|query| SurfaceCell { query, outcome: solve_rd_point(prob, &query, opts) })
        .collect();
    Ok(RdSurface { grid: grid.clone(), cells })
}

/// Rate-distortion function of the semantic variable alone: the observation
/// is `X1` from `p(s, x1)`, there is no second source, no side information
/// and no constraint on `X̂1`. Returned in bits.
pub fn semantic_rd(joint_sx1: &JointPmf, ds: &DistortionMatrix, target: f64, opts: &SolverOptions) -> Result<f64> {
    let prob = crate::models::semantic_only_problem(joint_sx1, ds)?;
    Ok(solve_rd_point(&prob, &RdQuery::new(0.0, 0.0, target)?, opts)?.rate)
}
