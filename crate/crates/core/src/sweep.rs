//! Grid sweeps driven by a JSON configuration.
//!
//! ```json
//! {
//!   "kind": "binary_correlated",
//!   "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
//!   "grid": {"d1": [0.05], "d2": {"start": 0.0, "stop": 0.2, "num": 5}, "ds": [0.3]},
//!   "method": "auto",
//!   "base": "bits",
//!   "solver": {"constraint_tol": 1e-6}
//! }
//! ```
//!
//! `kind` is one of `binary_independent`, `binary_correlated`,
//! `classification`, `gaussian` and `custom`; see [`Model`] for the
//! parameters of each. Every row of the output holds one grid point, in
//! row-major order with `d1` outermost.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::closed_form;
use crate::error::{Error, Result};
use crate::figures::{linspace, CellValue, Field, Method, Table};
use crate::gaussian::{self, GaussianSpec};
use crate::models;
use crate::prob::{Alphabet, BinarySourceSpec, DistortionMatrix, JointPmf, LogBase};
use crate::semantic::{ds0, modified_distortion};
use crate::solver::{solve_rd_point, RdGrid, RdProblem, RdQuery, SolverOptions};

/// Values along one grid axis: an explicit list or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, num: usize },
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisSpec::List(v) => v.clone(),
            AxisSpec::Range { start, stop, num } => linspace(*start, *stop, *num),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub d1: AxisSpec,
    pub d2: AxisSpec,
    pub ds: AxisSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Closed form where it is proved, solver elsewhere.
    #[default]
    Auto,
    /// Solver everywhere (not available for Gaussian sources).
    Ba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseChoice {
    Bits,
    Nats,
}

impl From<BaseChoice> for LogBase {
    fn from(b: BaseChoice) -> Self {
        match b {
            BaseChoice::Bits => LogBase::BITS,
            BaseChoice::Nats => LogBase::NATS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    params: Value,
    grid: GridSpec,
    #[serde(default)]
    method: MethodChoice,
    #[serde(default)]
    base: Option<BaseChoice>,
    #[serde(default)]
    solver: SolverOptions,
    #[serde(default = "yes")]
    parallel: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndependentParams {
    pub p: f64,
    pub p2: f64,
    pub p3: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatedParams {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationParams {
    pub p: f64,
    pub p2: f64,
    pub n: usize,
}

/// Semantic part of a custom problem: `p(s, x1)` as rows over `s` and the
/// semantic distortion `ds(s, ŝ)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticTables {
    pub joint: Vec<Vec<f64>>,
    pub ds: Vec<Vec<f64>>,
}

/// Fully specified finite problem. `source` is `p(x1, x2, y)` flattened
/// row-major (`y` fastest); distortion tables are rows over the source
/// symbol. Exactly one of `ds_mod` and `semantic` must be given.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomParams {
    pub sizes: [usize; 3],
    pub source: Vec<f64>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    #[serde(default)]
    pub ds_mod: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub semantic: Option<SemanticTables>,
}

#[derive(Debug, Clone)]
pub enum Model {
    BinaryIndependent(BinarySourceSpec),
    BinaryCorrelated(BinarySourceSpec),
    Classification { p: f64, p2: f64, n: usize },
    Gaussian(GaussianSpec),
    Custom(Box<RdProblem>),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: Model,
    pub grid: RdGrid,
    pub method: MethodChoice,
    pub base: LogBase,
    pub solver: SolverOptions,
    pub parallel: bool,
}

fn config_err(path: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::Config { path: path.into(), message: message.to_string() }
}

fn parse_at<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { prefix.to_string() } else { format!("{prefix}.{inner}") };
        config_err(path, e.inner())
    })
}

fn matrix(name: &str, rows: &[Vec<f64>], src: Alphabet, repro_name: &str) -> Result<DistortionMatrix> {
    if rows.len() != src.size() {
        return Err(config_err(format!("params.{name}"), format!("expected {} rows, got {}", src.size(), rows.len())));
    }
    let width = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(config_err(format!("params.{name}[{i}]"), "rows must have equal length"));
    }
    let repro = Alphabet::indexed(repro_name, width).map_err(|e| config_err(format!("params.{name}"), e))?;
    DistortionMatrix::new(src, repro, rows.concat()).map_err(|e| config_err(format!("params.{name}"), e))
}

fn custom_problem(c: &CustomParams) -> Result<RdProblem> {
    let axes: Vec<Alphabet> = ["x1", "x2", "y"]
        .iter()
        .zip(c.sizes)
        .map(|(n, k)| Alphabet::indexed(*n, k))
        .collect::<Result<_>>()
        .map_err(|e| config_err("params.sizes", e))?;
    let source = JointPmf::new(axes.clone(), c.source.clone()).map_err(|e| config_err("params.source", e))?;
    let d1 = matrix("d1", &c.d1, axes[0].clone(), "x1hat")?;
    let d2 = matrix("d2", &c.d2, axes[1].clone(), "x2hat")?;
    let ds_mod = match (&c.ds_mod, &c.semantic) {
        (Some(t), None) => matrix("ds_mod", t, axes[0].clone(), "shat")?,
        (None, Some(sem)) => {
            let ns = sem.joint.len();
            let s_axis = Alphabet::indexed("s", ns).map_err(|e| config_err("params.semantic.joint", e))?;
            let width = sem.joint.first().map_or(0, Vec::len);
            if width != axes[0].size() || sem.joint.iter().any(|r| r.len() != width) {
                return Err(config_err("params.semantic.joint", format!("expected {ns} rows of length {}", axes[0].size())));
            }
            let joint = JointPmf::new(vec![s_axis.clone(), axes[0].clone()], sem.joint.concat())
                .map_err(|e| config_err("params.semantic.joint", e))?;
            let ds = matrix("semantic.ds", &sem.ds, s_axis, "shat")?;
            modified_distortion(&joint, &ds).map_err(|e| config_err("params.semantic", e))?
        }
        _ => return Err(config_err("params", "give exactly one of `ds_mod` and `semantic`")),
    };
    RdProblem::new(source, d1, d2, ds_mod, LogBase::BITS).map_err(|e| config_err("params", e))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| config_err(".", e))?;
    let raw: RawConfig = parse_at(value, "")
        .map_err(|e| match e {
            Error::Config { path, message } => Error::Config { path: path.trim_start_matches('.').to_string(), message },
            other => other,
        })?;
    let grid = RdGrid { d1: raw.grid.d1.values(), d2: raw.grid.d2.values(), ds: raw.grid.ds.values() };
    for (name, axis) in [("d1", &grid.d1), ("d2", &grid.d2), ("ds", &grid.ds)] {
        if let Some(i) = axis.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(config_err(format!("grid.{name}[{i}]"), "distortions must be finite and non-negative"));
        }
    }
    if grid.is_empty() {
        return Err(config_err("grid", "empty grid"));
    }
    let p = |e: Error| config_err("params", e);
    let model = match raw.kind.as_str() {
        "binary_independent" => {
            let c: IndependentParams = parse_at(raw.params, "params")?;
            Model::BinaryIndependent(BinarySourceSpec::conditionally_independent(c.p, c.p2, c.p3).map_err(p)?)
        }
        "binary_correlated" => {
            let c: CorrelatedParams = parse_at(raw.params, "params")?;
            Model::BinaryCorrelated(BinarySourceSpec::correlated(c.p, c.p1, c.p2).map_err(p)?)
        }
        "classification" => {
            let c: ClassificationParams = parse_at(raw.params, "params")?;
            models::classification_problem(c.p, c.p2, c.n).map_err(p)?;
            Model::Classification { p: c.p, p2: c.p2, n: c.n }
        }
        "gaussian" => {
            let s: GaussianSpec = parse_at(raw.params, "params")?;
            s.validate().map_err(p)?;
            if raw.method == MethodChoice::Ba {
                return Err(config_err("method", "the solver handles finite alphabets only"));
            }
            Model::Gaussian(s)
        }
        "custom" => {
            let c: CustomParams = parse_at(raw.params, "params")?;
            Model::Custom(Box::new(custom_problem(&c)?))
        }
        other => {
            return Err(config_err(
                "kind",
                format!("unknown kind {other:?}; expected binary_independent, binary_correlated, classification, gaussian or custom"),
            ))
        }
    };
    let default_base = if matches!(model, Model::Gaussian(_)) { LogBase::NATS } else { LogBase::BITS };
    Ok(SweepConfig {
        model,
        grid,
        method: raw.method,
        base: raw.base.map_or(default_base, LogBase::from),
        solver: raw.solver,
        parallel: raw.parallel,
    })
}

pub fn load_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(path.display().to_string(), e))?;
    parse_config(&text)
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub query: RdQuery,
    pub cell: CellValue,
    /// Closed-form value wherever it applies, whatever method was used.
    pub closed_form: Option<f64>,
    pub note: String,
}

const COLUMNS: [&str; 10] = [
    "d1",
    "d2",
    "ds",
    "rate",
    "method",
    "converged",
    "duality_gap",
    "constraint_residual",
    "closed_form",
    "note",
];

impl SweepRow {
    fn fields(&self) -> Vec<Field> {
        vec![
            self.query.d1.into(),
            self.query.d2.into(),
            self.query.ds.into(),
            self.cell.rate.into(),
            self.cell.method.as_str().into(),
            self.cell.converged.into(),
            self.cell.duality_gap.into(),
            self.cell.constraint_residual.into(),
            self.closed_form.into(),
            self.note.as_str().into(),
        ]
    }
}

/// The finite problem behind a discrete model.
fn problem_of(model: &Model) -> Result<Option<RdProblem>> {
    Ok(match model {
        Model::BinaryIndependent(s) => Some(models::binary_independent_problem(s)?),
        Model::BinaryCorrelated(s) => Some(models::binary_correlated_problem(s)?),
        Model::Classification { p, p2, n } => Some(models::classification_problem(*p, *p2, *n)?),
        Model::Custom(prob) => Some((**prob).clone()),
        Model::Gaussian(_) => None,
    })
}

/// Closed-form value in bits (nats for Gaussian) if it is attained at `q`.
fn closed_form_at(model: &Model, q: &RdQuery) -> Result<Option<f64>> {
    let region = |e: Error| match e {
        Error::Region(_) | Error::Infeasible(_) => Ok(None),
        other => Err(other),
    };
    match model {
        Model::BinaryIndependent(s) => closed_form::theorem2_rate(s, q.d1, q.d2, q.ds).map(Some).or_else(region),
        Model::BinaryCorrelated(s) => {
            if q.ds < s.p || !closed_form::theorem3_attained(s, q.d1, q.d2, q.ds)? {
                return Ok(None);
            }
            closed_form::theorem3_rate(s, q.d1, q.d2, q.ds).map(Some)
        }
        Model::Classification { p, p2, n } => {
            let Ok(d0) = ds0(q.ds, *p) else { return Ok(None) };
            if q.d1 > d0 {
                return Ok(None);
            }
            closed_form::theorem4_rate(*p, *p2, *n, q.d1, q.d2, q.ds).map(Some).or_else(region)
        }
        Model::Gaussian(s) => gaussian::gaussian_rate(s, q.d1, q.d2, q.ds).map(|r| Some(r.rate_nats)).or_else(region),
        Model::Custom(_) => Ok(None),
    }
}

fn eval_row(cfg: &SweepConfig, prob: Option<&RdProblem>, q: RdQuery) -> Result<SweepRow> {
    let native = if matches!(cfg.model, Model::Gaussian(_)) { LogBase::NATS } else { LogBase::BITS };
    let factor = cfg.base.from_nats(native.to_nats(1.0));
    let closed = closed_form_at(&cfg.model, &q)?;
    let (cell, note) = match (&cfg.model, prob) {
        (Model::Gaussian(s), _) => match closed {
            Some(r) => (CellValue::closed_form(r), String::new()),
            None if q.ds <= gaussian::mmse(s) => (CellValue::infeasible(), format!("Ds <= mmse = {}", gaussian::mmse(s))),
            None => (CellValue::infeasible(), "non-positive D1 or D2".into()),
        },
        (_, Some(prob)) => match (cfg.method, closed) {
            (MethodChoice::Auto, Some(r)) => (CellValue::closed_form(r), String::new()),
            _ => {
                let out = solve_rd_point(prob, &q, &cfg.solver);
                let note = out.as_ref().err().map(ToString::to_string).unwrap_or_default();
                (CellValue::from_solver(out, &q, prob), note)
            }
        },
        (_, None) => unreachable!("discrete models always have a problem"),
    };
    let mut cell = cell;
    cell.rate = cell.rate.map(|r| r * factor);
    cell.duality_gap = cell.duality_gap.map(|r| r * factor);
    Ok(SweepRow { query: q, cell, closed_form: closed.map(|r| r * factor), note })
}

/// Evaluates every grid point. Rows follow grid order regardless of
/// parallelism.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    let prob = problem_of(&cfg.model)?;
    let queries = cfg.grid.queries();
    if cfg.parallel {
        queries.into_par_iter().map(|q| eval_row(cfg, prob.as_ref(), q)).collect()
    } else {
        queries.into_iter().map(|q| eval_row(cfg, prob.as_ref(), q)).collect()
    }
}

pub fn rows_to_table(rows: &[SweepRow]) -> Table {
    Table {
        name: "sweep".into(),
        columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows: rows.iter().map(SweepRow::fields).collect(),
    }
}

/// Counts of a finished sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    pub closed_form: usize,
    pub ba: usize,
    pub infeasible: usize,
    pub failed: usize,
}

/// Loads `config`, runs the sweep and writes the CSV to `out`.
pub fn run_sweep_file(config: &Path, out: &Path) -> Result<SweepSummary> {
    let cfg = load_config(config)?;
    let rows = run_sweep(&cfg)?;
    rows_to_table(&rows).write_csv(out)?;
    let count = |m: Method| rows.iter().filter(|r| r.cell.method == m).count();
    Ok(SweepSummary {
        rows: rows.len(),
        closed_form: count(Method::ClosedForm),
        ba: count(Method::Ba),
        infeasible: count(Method::Infeasible),
        failed: count(Method::Failed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_error(text: &str) -> (String, String) {
        match parse_config(text) {
            Err(Error::Config { path, message }) => (path, message),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn single_binary_point() {
        let cfg = parse_config(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
                "grid": {"d1": [0.05], "d2": [0.1], "ds": [0.3]}}"#,
        )
        .unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].cell.rate.unwrap() - 0.867163).abs() < 1e-6);
        assert_eq!(rows[0].cell.method, Method::ClosedForm);
    }

    #[test]
    fn forced_solver_matches_closed_form() {
        let cfg = parse_config(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25}, "method": "ba",
                "grid": {"d1": [0.05], "d2": [0.1], "ds": [0.3]}}"#,
        )
        .unwrap();
        let row = &run_sweep(&cfg).unwrap()[0];
        assert_eq!(row.cell.method, Method::Ba);
        assert!((row.cell.rate.unwrap() - row.closed_form.unwrap()).abs() < 1e-4);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let (path, msg) = config_error(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
                "grid": {"d1": [], "d2": [0.1], "ds": [0.3]}}"#,
        );
        assert_eq!(path, "grid");
        assert_eq!(msg, "empty grid");
    }

    #[test]
    fn errors_name_the_field() {
        let (path, _) = config_error(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": "x", "p2": 0.25},
                "grid": {"d1": [0.1], "d2": [0.1], "ds": [0.3]}}"#,
        );
        assert_eq!(path, "params.p1");
        let (path, _) = config_error(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
                "grid": {"d1": [0.1], "d2": [0.1], "ds": [0.3]}, "solver": {"max_iters": -1}}"#,
        );
        assert_eq!(path, "solver.max_iters");
        let (path, _) = config_error(r#"{"kind": "nope", "params": {}, "grid": {"d1": [0.1], "d2": [0.1], "ds": [0.3]}}"#);
        assert_eq!(path, "kind");
        let (path, _) = config_error(
            r#"{"kind": "binary_correlated", "params": {"p": 0.25, "p1": 0.25, "p2": 0.25},
                "grid": {"d1": [0.1, -1], "d2": [0.1], "ds": [0.3]}}"#,
        );
        assert_eq!(path, "grid.d1[1]");
    }

    #[test]
    fn gaussian_below_mmse_is_flagged() {
        let cfg = parse_config(
            r#"{"kind": "gaussian",
                "params": {"var_s": 2, "var_x1": 2, "var_x2": 2, "var_y": 2, "cov_sx1": 1, "cov_x1y": 1, "cov_x2y": 1},
                "grid": {"d1": [0.5], "d2": [1.0], "ds": [1.0, 1.875]}}"#,
        )
        .unwrap();
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows[0].cell.method, Method::Infeasible);
        assert!(rows[0].note.contains("mmse"));
        assert!((rows[1].cell.rate.unwrap() - 0.5 * 4.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn custom_problem_parses() {
        let cfg = parse_config(
            r#"{"kind": "custom",
                "params": {"sizes": [2, 1, 1], "source": [0.5, 0.5],
                           "d1": [[0, 1], [1, 0]], "d2": [[0]],
                           "semantic": {"joint": [[0.45, 0.05], [0.05, 0.45]], "ds": [[0, 1], [1, 0]]}},
                "grid": {"d1": [0.5], "d2": [0], "ds": [0.2]}}"#,
        )
        .unwrap();
        let rows = run_sweep(&cfg).unwrap();
        // semantic bit seen through BSC(0.1)
        assert!((rows[0].cell.rate.unwrap() - 0.456436).abs() < 1e-3);
        let (path, _) = config_error(
            r#"{"kind": "custom", "params": {"sizes": [2, 1, 1], "source": [0.5, 0.5], "d1": [[0, 1]], "d2": [[0]], "ds_mod": [[0], [0]]},
                "grid": {"d1": [0.5], "d2": [0], "ds": [0.2]}}"#,
        );
        assert_eq!(path, "params.d1");
    }
}
