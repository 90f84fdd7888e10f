//! Walks the builtin catalog: names, symmetry classes, pole structure,
//! reference invariants, and a few point evaluations.
//!
//! ```bash
//! cargo run --example catalog_tour
//! ```

use pshsymm::builtin_catalog;

fn main() {
    for entry in builtin_catalog() {
        let spec = &entry.spec;
        println!("{}", entry.name);
        println!(
            "  dimension {}, {:?}, {:?}, domain radius {}",
            spec.dimension, spec.symmetry, spec.pole_structure, spec.domain_radius
        );
        if spec.normalization_shift.abs() > 1e-12 {
            println!("  normalization shift {:+.6}", spec.normalization_shift);
        }
        if let Some(exp) = &entry.expected {
            println!(
                "  reference: nu = {}, iota = {}, nu_hat = {}, tau_hat = {}, tau = {:?}",
                exp.nu, exp.iota, exp.nu_hat, exp.tau_hat, exp.tau
            );
            println!("  source: {}", exp.provenance);
        }
        // a couple of evaluations along the diagonal ray
        let n = spec.dimension;
        for s in [0.5, 0.1] {
            let mut z = vec![0.0; 2 * n];
            for k in 0..n {
                z[2 * k] = s * spec.domain_radius / (n as f64).sqrt();
            }
            match spec.evaluate(&z) {
                Ok(v) => println!("  u at |z| = {:.2} R (diagonal): {v:.6}", s),
                Err(e) => println!("  evaluation failed: {e}"),
            }
        }
        println!();
    }
}
