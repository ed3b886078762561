//! Runs every verification suite and prints its report.

use semantic_rd::solver::SolverOptions;
use semantic_rd::verify::{run_suite, Suite};

fn main() {
    let opts = SolverOptions::default();
    let mut ok = true;
    for s in Suite::ALL {
        let rep = run_suite(s, &opts);
        println!("{rep}\n");
        ok &= rep.passed;
    }
    std::process::exit(if ok { 0 } else { 2 });
}
