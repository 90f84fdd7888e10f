//! Refined Lelong numbers along directions, and the two simplex
//! maximizations built on them: Kiselman's identity for the integrability
//! index and Rashkovskii's lower bound for the residue mass.
//!
//! ```bash
//! cargo run --example directional_analysis -- demailly-0.5
//! ```

use pshsymm::catalog::resolve;
use pshsymm::config::RunConfig;
use pshsymm::invariants::{
    integrability_index_kiselman, rashkovskii_lower_bound, refined_lelong, Direction,
};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "demailly-0.5".to_string());
    let entry = resolve(&name, None, None).unwrap_or_else(|| {
        eprintln!("unknown catalog entry {name}");
        std::process::exit(1);
    });
    let config = RunConfig::default();

    println!("refined Lelong numbers nu(0, a) of {name} along the simplex:");
    for i in 1..=9 {
        let a1 = i as f64 / 10.0;
        let dir = Direction::new(vec![a1, 1.0 - a1]).unwrap();
        match refined_lelong(&entry.spec, &dir, &config) {
            Ok(est) => println!("  a = ({a1:.1}, {:.1}): nu(0,a) = {:.6}", 1.0 - a1, est.slope),
            Err(e) => println!("  a = ({a1:.1}, ..): {e}"),
        }
    }

    match integrability_index_kiselman(&entry.spec, &config) {
        Ok(k) => {
            println!(
                "\nKiselman supremum: iota = {:.6} at a = {:?}{}",
                k.estimate.slope,
                k.argmax,
                if k.boundary { " (boundary limit)" } else { "" }
            );
        }
        Err(e) => println!("\nKiselman route unavailable: {e}"),
    }

    match rashkovskii_lower_bound(&entry.spec, &config) {
        Ok(r) => println!(
            "Rashkovskii bound: tau >= {:.6} at a = {:?}",
            r.estimate.slope, r.argmax
        ),
        Err(e) => println!("Rashkovskii bound unavailable: {e}"),
    }
}
