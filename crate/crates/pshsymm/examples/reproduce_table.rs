//! Reproduces the reference invariant table of the worked examples and
//! prints it side by side with the computed values.
//!
//! ```bash
//! cargo run --example reproduce_table
//! ```

use pshsymm::config::RunConfig;
use pshsymm::runner::run_reproduce;

fn main() {
    let mut config = RunConfig::default();
    config.out_dir = std::env::temp_dir().join("pshsymm-reproduce");
    match run_reproduce(&config) {
        Ok(0) => println!("all rows within tolerance"),
        Ok(code) => {
            eprintln!("deviations beyond tolerance (exit {code})");
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("reproduction failed: {e}");
            std::process::exit(1);
        }
    }
}
