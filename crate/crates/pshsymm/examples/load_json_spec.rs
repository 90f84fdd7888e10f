//! Loads a user-defined function from its JSON document and analyzes it.
//!
//! With no argument, a built-in sample document (the function
//! `log(|z1| |z2|^2)` on the unit ball of C^2) is written to a temporary
//! file first.
//!
//! ```bash
//! cargo run --example load_json_spec               # bundled sample
//! cargo run --example load_json_spec -- my.json    # your own spec
//! ```

use pshsymm::config::RunConfig;
use pshsymm::function::load_spec;
use pshsymm::runner::{analyze_entry, resolve_target};

const SAMPLE: &str = r#"{
  "name": "log-z1-z2sq",
  "dimension": 2,
  "symmetry": "toric",
  "body": {
    "kind": "closed_form",
    "expr": ["+",
      ["log", ["abs_coord", 1]],
      ["*", 2.0, ["log", ["abs_coord", 2]]]]
  },
  "domain_radius": 1.0,
  "extension_margin": 0.1
}"#;

fn main() {
    let config = RunConfig::default();
    let entry = match std::env::args().nth(1) {
        Some(path) => resolve_target(&path, None, None).unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(1);
        }),
        None => {
            println!("loading the bundled sample document:\n{SAMPLE}\n");
            let spec = load_spec(SAMPLE).unwrap();
            pshsymm::CatalogEntry {
                name: spec.name.clone(),
                spec,
                expected: None,
            }
        }
    };
    println!(
        "loaded {}: dimension {}, {:?}, {:?}, shift {:+.4}",
        entry.name,
        entry.spec.dimension,
        entry.spec.symmetry,
        entry.spec.pole_structure,
        entry.spec.normalization_shift
    );
    let analysis = analyze_entry(&entry, &config).unwrap_or_else(|e| {
        eprintln!("analysis failed: {e}");
        std::process::exit(1);
    });
    print!("{}", pshsymm::report::analysis_markdown(&analysis.invariants));
    print!("{}", pshsymm::report::theorem_table(&analysis.theorems));
}
