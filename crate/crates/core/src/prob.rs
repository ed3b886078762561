//! Finite-alphabet probability primitives.
//!
//! A [`JointPmf`] is a dense tensor over an ordered list of labelled
//! [`Alphabet`]s, stored row-major (the last axis varies fastest). Axis order
//! is part of a distribution's identity: marginals keep the surviving axes in
//! their original relative order.
//!
//! Information quantities take an explicit [`LogBase`]. The conventions
//! `0 log 0 = 0` and `0 log (0/0) = 0` apply throughout.

use crate::error::{domain, Error, Result};

/// Tolerance on the total mass of a pmf supplied by a caller.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Entries more negative than this are rejected instead of clamped.
const NEGATIVE_DUST: f64 = -1e-15;

/// Logarithm base for information quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const BITS: LogBase = LogBase(2.0);
    pub const NATS: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if base.is_finite() && base > 1.0 {
            Ok(LogBase(base))
        } else {
            Err(domain(format!("log base must be finite and > 1, got {base}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Converts a quantity measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        nats / self.0.ln()
    }

    /// Converts a quantity measured in this base into nats.
    pub fn to_nats(self, value: f64) -> f64 {
        value * self.0.ln()
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::BITS
    }
}

/// A named finite alphabet with distinct symbol labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if labels.is_empty() {
            return Err(domain(format!("alphabet `{name}` must have at least one symbol")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(domain(format!("alphabet `{name}` repeats label `{l}`")));
            }
        }
        Ok(Alphabet { name, labels })
    }

    /// Alphabet with labels `"0"`, `"1"`, ..., `size-1`.
    pub fn indexed(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| i.to_string()).collect())
    }

    /// Alphabet with labels `"1"`, ..., `size` (integer sources on `[1:N]`).
    pub fn one_based(name: impl Into<String>, size: usize) -> Result<Self> {
        Self::new(name, (1..=size).map(|i| i.to_string()).collect())
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::indexed(name, 2).expect("binary alphabet is valid")
    }

    /// Single-symbol alphabet, used for degenerate (constant) variables.
    pub fn unit(name: impl Into<String>) -> Self {
        Self::indexed(name, 1).expect("unit alphabet is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Alphabet { name: name.into(), labels: self.labels.clone() }
    }

    /// Same symbols, ignoring the alphabet name.
    pub fn same_symbols(&self, other: &Alphabet) -> bool {
        self.labels == other.labels
    }
}

/// Entropy of a Bernoulli(`q`) distribution.
pub fn binary_entropy(q: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("binary entropy needs q in [0,1], got {q}")));
    }
    Ok(base.from_nats(xlnx_neg(q) + xlnx_neg(1.0 - q)))
}

/// Binary entropy in bits; panics on out-of-range input. For internal closed
/// forms whose arguments are already validated.
pub(crate) fn hb(q: f64) -> f64 {
    binary_entropy(q, LogBase::BITS).expect("binary entropy argument validated by caller")
}

/// `-x ln x` with `0 ln 0 = 0`.
#[inline]
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Binary convolution `a(1-b) + b(1-a)`: the crossover probability of two
/// cascaded binary symmetric channels.
pub fn star(a: f64, b: f64) -> Result<f64> {
    for v in [a, b] {
        if !(0.0..=1.0).contains(&v) {
            return Err(domain(format!("star needs arguments in [0,1], got {v}")));
        }
    }
    Ok(a * (1.0 - b) + b * (1.0 - a))
}

/// Doubly symmetric binary source: a uniform pair that disagrees with
/// probability `p0`.
pub fn make_dsbs(p0: f64) -> Result<JointPmf> {
    make_dsbs_named(p0, "a", "b")
}

/// [`make_dsbs`] with caller-chosen axis names.
pub fn make_dsbs_named(p0: f64, first: &str, second: &str) -> Result<JointPmf> {
    if !(0.0..=0.5).contains(&p0) {
        return Err(domain(format!("DSBS parameter must lie in [0, 0.5], got {p0}")));
    }
    let same = (1.0 - p0) / 2.0;
    let diff = p0 / 2.0;
    JointPmf::new(
        vec![Alphabet::binary(first), Alphabet::binary(second)],
        vec![same, diff, diff, same],
    )
}

/// Dense joint probability mass function over an ordered list of alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl JointPmf {
    /// Validates and wraps a row-major probability tensor.
    ///
    /// Entries must be non-negative (negative dust above `-1e-15` is zeroed)
    /// and sum to one within [`NORMALIZATION_TOL`]. Inputs are never
    /// renormalized.
    pub fn new(axes: Vec<Alphabet>, mut probs: Vec<f64>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::InvalidPmf(format!("axis name `{}` repeated", a.name)));
            }
        }
        let expected: usize = axes.iter().map(Alphabet::size).product();
        if probs.len() != expected {
            return Err(Error::InvalidPmf(format!(
                "tensor has {} entries, axes imply {expected}",
                probs.len()
            )));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < NEGATIVE_DUST {
                return Err(Error::InvalidPmf(format!("entry {p} is not a probability")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        Ok(JointPmf { axes, probs })
    }

    /// Builds a pmf by evaluating `f` at every multi-index.
    pub fn from_fn(axes: Vec<Alphabet>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let n: usize = shape.iter().product();
        let mut probs = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            probs.push(f(&idx));
            increment(&mut idx, &shape);
        }
        Self::new(axes, probs)
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn axis_names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn axis(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.axes[self.axis_index(name)?])
    }

    /// Probability at a multi-index (one index per axis, in axis order).
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.probs[self.flat_index(idx)]
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.size() + i)
    }

    /// Iterates over `(multi_index, probability)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let shape = self.shape();
        let mut idx = vec![0usize; shape.len()];
        self.probs.iter().map(move |&p| {
            let out = idx.clone();
            increment(&mut idx, &shape);
            (out, p)
        })
    }

    fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.axis_index(n)?;
            if out.contains(&i) {
                return Err(Error::OverlappingAxes(n.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Sums out every axis not named in `keep`. Surviving axes keep their
    /// original relative order; an empty `keep` yields the scalar pmf `[1.0]`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let mut positions = self.resolve(keep)?;
        positions.sort_unstable();
        let axes: Vec<Alphabet> = positions.iter().map(|&i| self.axes[i].clone()).collect();
        let probs = self.marginal_by_position(&positions);
        let total: f64 = probs.iter().sum();
        let probs = probs.into_iter().map(|p| p / total).collect();
        JointPmf::new(axes, probs)
    }

    /// Raw marginal over axis positions (sorted ascending), row-major in that order.
    fn marginal_by_position(&self, positions: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = positions.iter().map(|&i| self.axes[i].size()).collect();
        let mut out = vec![0.0; sizes.iter().product()];
        for (idx, p) in self.iter() {
            if p == 0.0 {
                continue;
            }
            let k = positions.iter().fold(0, |acc, &ax| acc * self.axes[ax].size() + idx[ax]);
            out[k] += p;
        }
        out
    }

    /// Slices the pmf at `axis = symbol` and renormalizes; the axis is dropped.
    pub fn condition(&self, axis: &str, symbol: usize) -> Result<JointPmf> {
        let pos = self.axis_index(axis)?;
        let size = self.axes[pos].size();
        if symbol >= size {
            return Err(domain(format!("symbol index {symbol} out of range for `{axis}`")));
        }
        let mut probs = Vec::with_capacity(self.probs.len() / size);
        for (idx, p) in self.iter() {
            if idx[pos] == symbol {
                probs.push(p);
            }
        }
        let mass: f64 = probs.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroMass {
                axis: axis.to_string(),
                symbol: self.axes[pos].labels[symbol].clone(),
            });
        }
        let axes = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, a)| a.clone())
            .collect();
        JointPmf::new(axes, probs.into_iter().map(|p| p / mass).collect())
    }

    /// Joint entropy of the named axes.
    pub fn entropy(&self, axes: &[&str], base: LogBase) -> Result<f64> {
        let mut positions = self.resolve(axes)?;
        positions.sort_unstable();
        Ok(base.from_nats(entropy_nats(&self.marginal_by_position(&positions))))
    }

    /// Conditional mutual information `I(A; B | C)`.
    ///
    /// Computed as `H(A,C) + H(B,C) - H(A,B,C) - H(C)`; results within
    /// `-1e-12` of zero are clamped to zero.
    pub fn conditional_mutual_information(
        &self,
        group_a: &[&str],
        group_b: &[&str],
        cond: &[&str],
        base: LogBase,
    ) -> Result<f64> {
        let a = self.resolve(group_a)?;
        let b = self.resolve(group_b)?;
        let c = self.resolve(cond)?;
        for (x, xs) in [(&a, [&b, &c]), (&b, [&a, &c])] {
            for i in x.iter() {
                if xs.iter().any(|other| other.contains(i)) {
                    return Err(Error::OverlappingAxes(self.axes[*i].name.clone()));
                }
            }
        }
        let h = |groups: &[&Vec<usize>]| {
            let mut pos: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
            pos.sort_unstable();
            entropy_nats(&self.marginal_by_position(&pos))
        };
        let nats = h(&[&a, &c]) + h(&[&b, &c]) - h(&[&a, &b, &c]) - h(&[&c]);
        if nats < -1e-12 {
            return Err(Error::Numeric(format!("negative conditional mutual information {nats}")));
        }
        Ok(base.from_nats(nats.max(0.0)))
    }

    /// Mutual information `I(A; B)`.
    pub fn mutual_information(&self, group_a: &[&str], group_b: &[&str], base: LogBase) -> Result<f64> {
        self.conditional_mutual_information(group_a, group_b, &[], base)
    }

    /// Largest deviation from the Markov chain `A - B - C`, measured as
    /// `max |p(a,b,c) p(b) - p(a,b) p(b,c)|`.
    pub fn markov_residual(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let pa = self.resolve(a)?;
        let pb = self.resolve(b)?;
        let pc = self.resolve(c)?;
        let mut abc: Vec<usize> = pa.iter().chain(&pb).chain(&pc).copied().collect();
        abc.sort_unstable();
        let joint = self.marginal_by_position(&abc);
        let sub = |keep: &[usize]| -> (Vec<usize>, Vec<f64>) {
            let mut k = keep.to_vec();
            k.sort_unstable();
            let m = self.marginal_by_position(&k);
            (k, m)
        };
        let (b_pos, b_m) = sub(&pb);
        let ab: Vec<usize> = pa.iter().chain(&pb).copied().collect();
        let bc: Vec<usize> = pb.iter().chain(&pc).copied().collect();
        let (ab_pos, ab_m) = sub(&ab);
        let (bc_pos, bc_m) = sub(&bc);
        let shape: Vec<usize> = abc.iter().map(|&i| self.axes[i].size()).collect();
        let mut idx = vec![0usize; shape.len()];
        let flat = |sel: &[usize], idx: &[usize]| -> usize {
            sel.iter().fold(0, |acc, ax| {
                let k = abc.iter().position(|x| x == ax).expect("axis present");
                acc * self.axes[*ax].size() + idx[k]
            })
        };
        let mut worst: f64 = 0.0;
        for &p in &joint {
            let lhs = p * b_m[flat(&b_pos, &idx)];
            let rhs = ab_m[flat(&ab_pos, &idx)] * bc_m[flat(&bc_pos, &idx)];
            worst = worst.max((lhs - rhs).abs());
            increment(&mut idx, &shape);
        }
        Ok(worst)
    }
}

/// Entropy in nats of an (already normalized) probability vector.
pub(crate) fn entropy_nats(p: &[f64]) -> f64 {
    p.iter().map(|&x| xlnx_neg(x)).sum()
}

fn increment(idx: &mut [usize], shape: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Per-letter distortion table `d(a, â)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMatrix {
    source: Alphabet,
    repro: Alphabet,
    values: Vec<f64>,
}

impl DistortionMatrix {
    pub fn new(source: Alphabet, repro: Alphabet, values: Vec<f64>) -> Result<Self> {
        if values.len() != source.size() * repro.size() {
            return Err(domain(format!(
                "distortion table has {} entries, expected {}x{}",
                values.len(),
                source.size(),
                repro.size()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(domain(format!("distortion entries must be finite and >= 0, got {v}")));
        }
        Ok(DistortionMatrix { source, repro, values })
    }

    pub fn from_fn(source: Alphabet, repro: Alphabet, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = (0..source.size())
            .flat_map(|a| (0..repro.size()).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Self::new(source, repro, values)
    }

    /// Hamming distortion between alphabets of equal size (symbol `i` matches `i`).
    pub fn hamming(source: Alphabet, repro: Alphabet) -> Result<Self> {
        if source.size() != repro.size() {
            return Err(Error::AlphabetMismatch(format!(
                "Hamming distortion needs equal sizes, got {} and {}",
                source.size(),
                repro.size()
            )));
        }
        Self::from_fn(source, repro, |a, b| if a == b { 0.0 } else { 1.0 })
    }

    pub fn zeros(source: Alphabet, repro: Alphabet) -> Self {
        let n = source.size() * repro.size();
        DistortionMatrix { source, repro, values: vec![0.0; n] }
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn repro(&self) -> &Alphabet {
        &self.repro
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.repro.size() + b]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `E d(A, Â)` over the pair marginal of the two named axes.
pub fn expected_distortion(
    j: &JointPmf,
    d: &DistortionMatrix,
    source_axis: &str,
    repro_axis: &str,
) -> Result<f64> {
    let sa = j.axis(source_axis)?;
    let ra = j.axis(repro_axis)?;
    if !sa.same_symbols(&d.source) || !ra.same_symbols(&d.repro) {
        return Err(Error::AlphabetMismatch(format!(
            "axes `{source_axis}`/`{repro_axis}` do not match the distortion table alphabets"
        )));
    }
    if source_axis == repro_axis {
        return Err(Error::OverlappingAxes(source_axis.to_string()));
    }
    let si = j.axis_index(source_axis)?;
    let ri = j.axis_index(repro_axis)?;
    Ok(j.iter().map(|(idx, p)| p * d.get(idx[si], idx[ri])).sum())
}

/// Parameters of the binary models: `p` is the crossover between the
/// semantic variable and the observation, `p1`, `p2`, `p3` are the pairwise
/// DSBS parameters of `(X1,X2)`, `(X1,Y)` and `(X2,Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySourceSpec {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl BinarySourceSpec {
    pub fn new(p: f64, p1: f64, p2: f64, p3: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(0.0..=0.5).contains(&v) {
                return Err(domain(format!("{name} must lie in [0, 0.5], got {v}")));
            }
        }
        Ok(BinarySourceSpec { p, p1, p2, p3 })
    }

    /// Sources with the Markov chain `X1 - Y - X2`; `p1 = p2 ⋆ p3`.
    pub fn conditionally_independent(p: f64, p2: f64, p3: f64) -> Result<Self> {
        Self::new(p, 0.0, p2, p3)?;
        Self::new(p, star(p2, p3)?, p2, p3)
    }

    /// Sources with the Markov chain `Y - X1 - X2`; `p3 = p1 ⋆ p2`.
    pub fn correlated(p: f64, p1: f64, p2: f64) -> Result<Self> {
        Self::new(p, p1, p2, 0.0)?;
        Self::new(p, p1, p2, star(p1, p2)?)
    }

    /// Checks the parameter identity implied by `X1 - Y - X2`.
    pub fn check_conditional_independence(&self) -> Result<()> {
        let implied = star(self.p2, self.p3)?;
        if (self.p1 - implied).abs() > 1e-12 {
            return Err(domain(format!(
                "X1 - Y - X2 requires p1 = p2 * p3 = {implied}, got {}",
                self.p1
            )));
        }
        Ok(())
    }
}
