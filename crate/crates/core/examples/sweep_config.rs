//! Runs a JSON-configured sweep and prints the resulting rows.

use semantic_rd::sweep::{parse_config, run_sweep};

const CONFIG: &str = r#"{
    "kind": "binary_correlated",
    "params": { "p": 0.25, "p1": 0.25, "p2": 0.25 },
    "grid": { "d1": [0.02, 0.05], "d2": { "start": 0.05, "stop": 0.25, "num": 3 }, "ds": [0.45] },
    "method": "auto",
    "base": "bits"
}"#;

fn main() -> semantic_rd::Result<()> {
    let cfg = parse_config(CONFIG)?;
    for row in run_sweep(&cfg)? {
        println!(
            "({:.3}, {:.3}, {:.3}) rate {} via {}",
            row.query.d1,
            row.query.d2,
            row.query.ds,
            row.cell.rate.map_or("-".into(), |r| format!("{r:.6}")),
            row.cell.method.as_str()
        );
    }
    Ok(())
}
