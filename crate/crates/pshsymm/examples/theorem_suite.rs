//! Runs the theorem harness on selected entries (or the whole catalog) and
//! prints the check table.
//!
//! ```bash
//! cargo run --example theorem_suite -- ex-4.2 ex-4.4
//! cargo run --example theorem_suite            # the whole catalog
//! ```

use pshsymm::builtin_catalog;
use pshsymm::config::RunConfig;
use pshsymm::report::theorem_table;
use pshsymm::runner::analyze_entry;

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    let catalog = builtin_catalog();
    let selected: Vec<_> = if names.is_empty() {
        catalog
    } else {
        catalog
            .into_iter()
            .filter(|e| names.iter().any(|n| *n == e.name))
            .collect()
    };
    if selected.is_empty() {
        eprintln!("no matching catalog entries");
        std::process::exit(1);
    }
    let config = RunConfig::default();
    let mut all_pass = true;
    for entry in &selected {
        match analyze_entry(entry, &config) {
            Ok(analysis) => {
                print!("{}", theorem_table(&analysis.theorems));
                all_pass &= analysis.theorems.all_applicable_pass;
            }
            Err(e) => {
                eprintln!("{}: analysis failed: {e}", entry.name);
                all_pass = false;
            }
        }
    }
    println!(
        "\n{}",
        if all_pass {
            "all applicable checks PASS"
        } else {
            "FAILURES present"
        }
    );
}
