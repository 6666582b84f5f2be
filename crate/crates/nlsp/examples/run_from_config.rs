//! Drive the scenario runner from a config document, as the CLI does;
//! artifacts (trajectory.csv, summary.json, decay.svg, checkpoints) land
//! in the output directory.
//!
//! ```text
//! cargo run --release --example run_from_config
//! ```

use nlsp::runner::{self, parse_config};

const CONFIG: &str = r#"
scenario = "simulate"
seed = 7
output_dir = "target/example-run"
sample_every = 5
checkpoint_every = 200

[solver]
nu = 1.0
p = 1.5
dt = 1e-3
t_end = 0.25
grid_dim = 2
grid_points = 32

[flow]
variant = "cellular"
amplitude = 2.0
cell_scale = 1.0

[initial]
preset = "random_band"
k_max = 3
amplitude = 0.5
seed = 11
"#;

fn main() -> nlsp::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let artifacts = runner::run(&cfg)?;
    println!("wrote artifacts to {}", cfg.output_dir.display());
    for (key, value) in &artifacts.summary {
        println!("  {key} = {value}");
    }
    Ok(())
}
