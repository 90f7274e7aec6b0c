//! Driving a task from an experiment file, as the command-line tool does.

use feller_symbol::config::{ExperimentConfig, Task};
use feller_symbol::experiment::run;

const EXPERIMENT: &str = r#"
[group]
kind = "su2"
cutoff = 3

[process]
family = "compound-poisson"
jump = 0.9
rate = 2

[run]
t = 0.4
s = 0.2
seed = 12
"#;

fn main() -> feller_symbol::Result<()> {
    let mut cfg = ExperimentConfig::parse(EXPERIMENT)?;
    cfg.out = std::env::temp_dir().join("feller-symbol-example");
    for task in [Task::Symbol, Task::Evolve, Task::Resolvent] {
        let outcome = run(&cfg, task)?;
        println!("{task}: {}", if outcome.passed { "pass" } else { "fail" });
        for line in &outcome.summary {
            println!("  {line}");
        }
        for f in &outcome.files {
            println!("  wrote {}", f.display());
        }
    }
    Ok(())
}
