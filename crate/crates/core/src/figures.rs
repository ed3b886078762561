//! Data behind the numerical-results figures, emitted as CSV tables plus a
//! JSON manifest.
//!
//! Discrete cells use the closed form where it is proved and the numerical
//! solver elsewhere; the `method` column records which. Surfaces default to
//! 50×50 cells and curves to 200 intervals.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::closed_form::{self, in_region_d1};
use crate::error::{domain, Error, Result};
use crate::gaussian::{self, GaussianSpec};
use crate::models;
use crate::prob::{hb, BinarySourceSpec, LogBase};
use crate::semantic::ds0;
use crate::solver::{solve_rd_point, RdPoint, RdProblem, RdQuery, SolverOptions};

pub const DEFAULT_SURFACE_GRID: usize = 50;
pub const DEFAULT_CURVE_GRID: usize = 200;

/// Parameters shared by the binary and classification figures.
const P: f64 = 0.25;
const D2_BINARY: f64 = 0.5;
const N_CLASSES: usize = 8;
const D2_GAUSSIAN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig4,
    Fig5,
    Fig6a,
    Fig6b,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6a,
        FigureId::Fig6b,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }

    fn is_gaussian(self) -> bool {
        matches!(self, FigureId::Fig8 | FigureId::Fig9)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| domain(format!("unknown figure id {s:?}; expected one of fig4, fig5, fig6a, fig6b, fig7, fig8, fig9")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    /// Points per axis for surfaces, intervals for curves.
    pub grid: Option<usize>,
    /// Output base; bits for discrete figures and nats for Gaussian ones
    /// when unset.
    pub base: Option<LogBase>,
    pub solver: SolverOptions,
    pub parallel: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions { grid: None, base: None, solver: SolverOptions::default(), parallel: true }
    }
}

/// How a cell's rate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Ba,
    Infeasible,
    Failed,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Ba => "ba",
            Method::Infeasible => "infeasible",
            Method::Failed => "failed",
        }
    }
}

/// One evaluated cell, in bits or nats as produced.
#[derive(Debug, Clone)]
pub struct CellValue {
    pub rate: Option<f64>,
    pub method: Method,
    pub converged: bool,
    pub duality_gap: Option<f64>,
    pub constraint_residual: Option<f64>,
}

impl CellValue {
    pub fn closed_form(rate: f64) -> Self {
        CellValue { rate: Some(rate), method: Method::ClosedForm, converged: true, duality_gap: None, constraint_residual: None }
    }

    pub fn from_solver(outcome: Result<RdPoint>, query: &RdQuery, prob: &RdProblem) -> Self {
        match outcome {
            Ok(pt) => {
                let zero = prob.zero_rate_distortions();
                let targets = [query.d1, query.d2, query.ds];
                let resid = (0..3).map(|k| (pt.achieved[k] - targets[k].min(zero[k])).max(0.0)).fold(0.0, f64::max);
                CellValue {
                    rate: Some(pt.rate),
                    method: Method::Ba,
                    converged: pt.converged,
                    duality_gap: Some(pt.duality_gap()),
                    constraint_residual: Some(resid),
                }
            }
            Err(Error::Infeasible(_)) => CellValue::infeasible(),
            Err(_) => CellValue { rate: None, method: Method::Failed, converged: false, duality_gap: None, constraint_residual: None },
        }
    }

    pub fn infeasible() -> Self {
        CellValue { rate: None, method: Method::Infeasible, converged: true, duality_gap: None, constraint_residual: None }
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.rate = self.rate.map(|r| r * factor);
        self.duality_gap = self.duality_gap.map(|r| r * factor);
        self
    }
}

/// A CSV value.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Empty, Field::Num)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

/// Formats with 9 significant digits, shortest form.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Num(v) => f.write_str(&format_sig9(*v)),
            Field::Text(s) => f.write_str(s),
            Field::Bool(b) => write!(f, "{b}"),
            Field::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|f| f.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub id: FigureId,
    pub tables: Vec<Table>,
    pub manifest: Value,
}

impl FigureOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<table>.csv` for every table and `<id>_manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for t in &self.tables {
            let p = dir.join(format!("{}.csv", t.name));
            t.write_csv(&p)?;
            paths.push(p);
        }
        let p = dir.join(format!("{}_manifest.json", self.id));
        std::fs::write(&p, serde_json::to_string_pretty(&self.manifest)?)?;
        paths.push(p);
        Ok(paths)
    }
}

/// `n` evenly spaced points from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `n` evenly spaced points in `(lo, hi]`.
fn open_left(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn map_cells<T: Sync, R: Send>(items: &[T], parallel: bool, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

struct Stats {
    counts: [usize; 4],
    ba_converged: usize,
    max_gap: f64,
    max_resid: f64,
}

impl Stats {
    fn of<'a>(cells: impl Iterator<Item = &'a CellValue>) -> Self {
        let mut s = Stats { counts: [0; 4], ba_converged: 0, max_gap: 0.0, max_resid: 0.0 };
        for c in cells {
            let i = match c.method {
                Method::ClosedForm => 0,
                Method::Ba => 1,
                Method::Infeasible => 2,
                Method::Failed => 3,
            };
            s.counts[i] += 1;
            if c.method == Method::Ba && c.converged {
                s.ba_converged += 1;
            }
            s.max_gap = s.max_gap.max(c.duality_gap.unwrap_or(0.0));
            s.max_resid = s.max_resid.max(c.constraint_residual.unwrap_or(0.0));
        }
        s
    }

    fn json(&self) -> Value {
        let ba = self.counts[1] + self.counts[3];
        json!({
            "closed_form_cells": self.counts[0],
            "ba_cells": self.counts[1],
            "infeasible_cells": self.counts[2],
            "failed_cells": self.counts[3],
            "ba_converged_fraction": if ba == 0 { 1.0 } else { self.ba_converged as f64 / ba as f64 },
            "max_duality_gap": self.max_gap,
            "max_constraint_residual": self.max_resid,
        })
    }
}

fn cell_fields(c: &CellValue) -> Vec<Field> {
    vec![
        c.rate.into(),
        c.method.as_str().into(),
        c.converged.into(),
        c.duality_gap.into(),
        c.constraint_residual.into(),
    ]
}

const CELL_COLUMNS: [&str; 5] = ["rate", "method", "converged", "duality_gap", "constraint_residual"];

fn columns(lead: &[&str], tail: &[&str]) -> Vec<String> {
    lead.iter().chain(CELL_COLUMNS.iter()).chain(tail.iter()).map(|s| s.to_string()).collect()
}

/// Generates the data for one figure.
pub fn generate(id: FigureId, opts: &FigureOptions) -> Result<FigureOutput> {
    let base = opts.base.unwrap_or(if id.is_gaussian() { LogBase::NATS } else { LogBase::BITS });
    let start = Instant::now();
    let mut out = match id {
        FigureId::Fig4 => fig4(opts, base)?,
        FigureId::Fig5 => fig5(opts, base)?,
        FigureId::Fig6a => fig6(id, 0.03, opts, base)?,
        FigureId::Fig6b => fig6(id, 0.05, opts, base)?,
        FigureId::Fig7 => fig7(opts, base)?,
        FigureId::Fig8 | FigureId::Fig9 => gaussian_figure(id, opts, base)?,
    };
    let m = out.manifest.as_object_mut().expect("manifest is an object");
    m.insert("figure".into(), json!(id));
    m.insert("base".into(), json!(if base == LogBase::NATS { "nats" } else if base == LogBase::BITS { "bits" } else { "custom" }));
    m.insert("log_base_value".into(), json!(base.value()));
    m.insert("solver_options".into(), serde_json::to_value(opts.solver)?);
    m.insert("files".into(), json!(out.tables.iter().map(|t| json!({
        "name": format!("{}.csv", t.name),
        "columns": t.columns,
        "rows": t.rows.len(),
    })).collect::<Vec<_>>()));
    m.insert("elapsed_seconds".into(), json!(start.elapsed().as_secs_f64()));
    Ok(out)
}

/// Generates one figure and writes it to `dir`.
pub fn run_figure(id: FigureId, dir: &Path, opts: &FigureOptions) -> Result<FigureOutput> {
    let out = generate(id, opts)?;
    out.write(dir)?;
    Ok(out)
}

fn bits_to(base: LogBase) -> f64 {
    base.from_nats(LogBase::BITS.to_nats(1.0))
}

fn fig4(opts: &FigureOptions, base: LogBase) -> Result<FigureOutput> {
    let p = 0.1;
    let n = opts.grid.unwrap_or(DEFAULT_CURVE_GRID);
    let f = bits_to(base);
    let mut t = Table::new("fig4", &["d", "rate_semantic", "rate_plain", "method_semantic", "method_plain"]);
    let mut infeasible = 0;
    for d in linspace(0.0, 0.5, n + 1) {
        let rs = if d >= p { Some(closed_form::semantic_binary_rd(p, d)? * f) } else { None };
        infeasible += usize::from(rs.is_none());
        let r = closed_form::uniform_binary_rd(d)? * f;
        t.rows.push(vec![
            d.into(),
            rs.into(),
            r.into(),
            (if rs.is_some() { "closed_form" } else { "infeasible" }).into(),
            "closed_form".into(),
        ]);
    }
    Ok(FigureOutput {
        id: FigureId::Fig4,
        tables: vec![t],
        manifest: json!({
            "description": "semantic rate-distortion of a bit observed through a BSC versus the plain rate-distortion function",
            "parameters": {"p": p},
            "grid": {"d": [0.0, 0.5, n + 1]},
            "formulas": {
                "rate_semantic": "1 - h((D - p)/(1 - 2p)) for p <= D <= 1/2; empty (infeasible) below p",
                "rate_plain": "1 - h(D)",
            },
            "cells": {"closed_form_cells": 2 * (n + 1) - infeasible, "ba_cells": 0, "infeasible_cells": infeasible},
        }),
    })
}

struct Correlated {
    spec: BinarySourceSpec,
    prob: RdProblem,
}

impl Correlated {
    fn new() -> Result<Self> {
        let spec = BinarySourceSpec::correlated(P, P, P)?;
        let prob = models::binary_correlated_problem(&spec)?;
        Ok(Correlated { spec, prob })
    }

    fn eval(&self, d1: f64, ds: f64, opts: &SolverOptions) -> Result<(CellValue, Option<f64>)> {
        let naive = match ds0(ds, P) {
            Ok(d0) => Some(hb(self.spec.p1) + hb(self.spec.p2) - hb(d1.min(d0)) - hb(D2_BINARY)),
            Err(_) => None,
        };
        if ds >= P && closed_form::theorem3_attained(&self.spec, d1, D2_BINARY, ds)? {
            return Ok((CellValue::closed_form(closed_form::theorem3_rate(&self.spec, d1, D2_BINARY, ds)?), naive));
        }
        let q = RdQuery::new(d1, D2_BINARY, ds)?;
        Ok((CellValue::from_solver(solve_rd_point(&self.prob, &q, opts), &q, &self.prob), naive))
    }
}

fn max_abs_diff(pairs: impl Iterator<Item = (Option<f64>, Option<f64>)>) -> Option<f64> {
    pairs.filter_map(|(a, b)| Some((a? - b?).abs())).reduce(f64::max)
}

fn fig5(opts: &FigureOptions, base: LogBase) -> Result<FigureOutput> {
    let n = opts.grid.unwrap_or(DEFAULT_SURFACE_GRID);
    let model = Correlated::new()?;
    let d1s = linspace(0.0, 0.5, n);
    let dss = linspace(P, 0.5, n);
    let pts: Vec<(f64, f64)> = d1s.iter().flat_map(|&a| dss.iter().map(move |&b| (a, b))).collect();
    let f = bits_to(base);
    let cells = map_cells(&pts, opts.parallel, |&(d1, ds)| model.eval(d1, ds, &opts.solver));
    let cells: Vec<(CellValue, Option<f64>)> = cells.into_iter().collect::<Result<_>>()?;
    let mut t = Table { name: "fig5".into(), columns: columns(&["d1", "ds"], &["naive_formula"]), rows: vec![] };
    for (&(d1, ds), (c, naive)) in pts.iter().zip(&cells) {
        let c = c.clone().scaled(f);
        let mut row = vec![d1.into(), ds.into()];
        row.extend(cell_fields(&c));
        row.push(naive.map(|v| v * f).into());
        t.rows.push(row);
    }
    let stats = Stats::of(cells.iter().map(|c| &c.0));
    let divergence = max_abs_diff(cells.iter().filter(|c| c.0.method == Method::Ba).map(|c| (c.0.rate, c.1)));
    Ok(FigureOutput {
        id: FigureId::Fig5,
        tables: vec![t],
        manifest: json!({
            "description": "rate of correlated binary sources over (D1, Ds)",
            "parameters": {"p": P, "p1": P, "p2": P, "d2": D2_BINARY},
            "grid": {"d1": [0.0, 0.5, n], "ds": [P, 0.5, n]},
            "routing": "closed form inside the D0 region where its test channel exists, numerical solver elsewhere",
            "naive_formula": "h(p1) + h(p2) - h(min(D1, Ds0)) - h(D2) evaluated outside its region, for comparison only",
            "max_ba_vs_naive_formula": divergence.map(|v| v * f),
            "cells": stats.json(),
        }),
    })
}

fn fig6(id: FigureId, d1: f64, opts: &FigureOptions, base: LogBase) -> Result<FigureOutput> {
    let n = opts.grid.unwrap_or(DEFAULT_CURVE_GRID);
    let model = Correlated::new()?;
    let dss = linspace(P, 0.5, n + 1);
    let f = bits_to(base);
    let cells = map_cells(&dss, opts.parallel, |&ds| model.eval(d1, ds, &opts.solver));
    let cells: Vec<(CellValue, Option<f64>)> = cells.into_iter().collect::<Result<_>>()?;
    let mut t = Table { name: id.to_string(), columns: columns(&["ds"], &["naive_formula"]), rows: vec![] };
    for (&ds, (c, naive)) in dss.iter().zip(&cells) {
        let c = c.clone().scaled(f);
        let mut row = vec![ds.into()];
        row.extend(cell_fields(&c));
        row.push(naive.map(|v| v * f).into());
        t.rows.push(row);
    }
    let stats = Stats::of(cells.iter().map(|c| &c.0));
    let floor = cells.iter().filter_map(|c| c.0.rate).reduce(f64::min).map(|v| v * f);
    Ok(FigureOutput {
        id,
        tables: vec![t],
        manifest: json!({
            "description": format!("rate of correlated binary sources versus Ds at D1 = {d1}"),
            "parameters": {"p": P, "p1": P, "p2": P, "d1": d1, "d2": D2_BINARY},
            "grid": {"ds": [P, 0.5, n + 1]},
            "routing": "closed form inside the D0 region where its test channel exists, numerical solver elsewhere",
            "minimum_rate": floor,
            "max_ba_vs_naive_formula": max_abs_diff(cells.iter().filter(|c| c.0.method == Method::Ba).map(|c| (c.0.rate, c.1))).map(|v| v * f),
            "cells": stats.json(),
        }),
    })
}

fn fig7(opts: &FigureOptions, base: LogBase) -> Result<FigureOutput> {
    let n = opts.grid.unwrap_or(DEFAULT_SURFACE_GRID);
    let prob = models::classification_problem(P, P, N_CLASSES)?;
    let d1s = linspace(0.0, 0.5, n);
    let dss = linspace(P, 0.5, n);
    let pts: Vec<(f64, f64)> = d1s.iter().flat_map(|&a| dss.iter().map(move |&b| (a, b))).collect();
    let f = bits_to(base);
    let eval = |&(d1, ds): &(f64, f64)| -> Result<(CellValue, Option<f64>)> {
        let inside = in_region_d1(P, P, N_CLASSES, d1, D2_BINARY, ds)?;
        let literal = if inside { Some(closed_form::theorem4_rate(P, P, N_CLASSES, d1, D2_BINARY, ds)?) } else { None };
        if inside && d1 <= ds0(ds, P)? {
            return Ok((CellValue::closed_form(literal.expect("inside")), literal));
        }
        let q = RdQuery::new(d1, D2_BINARY, ds)?;
        Ok((CellValue::from_solver(solve_rd_point(&prob, &q, &opts.solver), &q, &prob), literal))
    };
    let cells: Vec<(CellValue, Option<f64>)> = map_cells(&pts, opts.parallel, eval).into_iter().collect::<Result<_>>()?;
    let mut t = Table { name: "fig7".into(), columns: columns(&["d1", "ds"], &["literal_formula"]), rows: vec![] };
    for (&(d1, ds), (c, lit)) in pts.iter().zip(&cells) {
        let c = c.clone().scaled(f);
        let mut row = vec![d1.into(), ds.into()];
        row.extend(cell_fields(&c));
        row.push(lit.map(|v| v * f).into());
        t.rows.push(row);
    }
    let stats = Stats::of(cells.iter().map(|c| &c.0));
    let gap = max_abs_diff(cells.iter().filter(|c| c.0.method == Method::Ba).map(|c| (c.0.rate, c.1)));
    Ok(FigureOutput {
        id: FigureId::Fig7,
        tables: vec![t],
        manifest: json!({
            "description": "rate of integer classification over (D1, Ds)",
            "parameters": {"p": P, "p2": P, "n": N_CLASSES, "d2": D2_BINARY},
            "grid": {"d1": [0.0, 0.5, n], "ds": [P, 0.5, n]},
            "routing": "closed form inside the D1 region where D1 <= Ds0, numerical solver elsewhere",
            "literal_formula": "closed form evaluated wherever the region test passes, for comparison",
            "max_ba_vs_literal_formula_in_region": gap.map(|v| v * f),
            "cells": stats.json(),
        }),
    })
}

/// Parameters of the Gaussian figures: all variances 2, all covariances 1.
pub fn gaussian_figure_spec() -> GaussianSpec {
    GaussianSpec::symmetric(2.0, 1.0).expect("valid Gaussian parameters")
}

fn gaussian_figure(id: FigureId, opts: &FigureOptions, base: LogBase) -> Result<FigureOutput> {
    let spec = gaussian_figure_spec();
    let n = opts.grid.unwrap_or(DEFAULT_SURFACE_GRID);
    let m = gaussian::mmse(&spec);
    let d1s = open_left(0.0, 2.0, n);
    let dss = open_left(m, 2.5, n);
    let f = base.from_nats(1.0);
    let name = if id == FigureId::Fig8 { "fig8" } else { "fig9_surface" };
    let mut t = Table::new(name, &["d1", "ds", "rate", "method", "converged", "branch"]);
    let mut min_rate = f64::INFINITY;
    for &d1 in &d1s {
        for &ds in &dss {
            let r = gaussian::gaussian_rate(&spec, d1, D2_GAUSSIAN, ds)?;
            min_rate = min_rate.min(r.rate_nats);
            let branch = match r.term_x1_branch {
                gaussian::ActiveBranch::Observation => "observation",
                gaussian::ActiveBranch::Semantic => "semantic",
            };
            t.rows.push(vec![d1.into(), ds.into(), (r.rate_nats * f).into(), "closed_form".into(), true.into(), branch.into()]);
        }
    }
    let mut tables = vec![t];
    let locus_desc = "Ds = mmse + cov_sx1^2 D1 / var_x1^2, where the observation and semantic terms are equal";
    if id == FigureId::Fig9 {
        let mut locus = Table::new("fig9_locus", &["d1", "ds", "rate"]);
        for &d1 in &d1s {
            let ds = gaussian::equal_rate_locus(&spec, d1);
            let r = gaussian::gaussian_rate(&spec, d1, D2_GAUSSIAN, ds)?;
            locus.rows.push(vec![d1.into(), ds.into(), (r.rate_nats * f).into()]);
        }
        tables.push(locus);
    }
    Ok(FigureOutput {
        id,
        tables,
        manifest: json!({
            "description": if id == FigureId::Fig8 { "Gaussian rate surface over (D1, Ds)" } else { "Gaussian rate contour data with the equal-rate locus" },
            "parameters": {"spec": spec, "d2": D2_GAUSSIAN, "mmse": m},
            "grid": {"d1": ["(0", 2.0, n], "ds": [format!("({m}"), 2.5, n]},
            "minimum_rate": min_rate * f,
            "minimum_rate_nats": min_rate,
            "semantic_zero_threshold": spec.semantic_zero_threshold(),
            "locus": locus_desc,
            "cells": {"closed_form_cells": d1s.len() * dss.len(), "ba_cells": 0},
        }),
    })
}
