//! Sub-level set volumes `|{u < t}|` of one catalog entry, with the exact
//! closed form beside the engine estimate where one exists.
//!
//! ```bash
//! cargo run --example sublevel_volumes -- ex-4.2
//! ```

use pshsymm::catalog::resolve;
use pshsymm::volume::{sublevel_volume, VolumeConfig};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ex-4.1".to_string());
    let entry = resolve(&name, None, None).unwrap_or_else(|| {
        eprintln!("unknown catalog entry {name}");
        std::process::exit(1);
    });
    let formula = entry
        .expected
        .as_ref()
        .and_then(|e| e.volume_formula.clone());
    let config = VolumeConfig::default();

    println!("sub-level volumes of {name}");
    println!("{:>8}  {:>14}  {:>10}  {:>18}  {:>9}  closed form", "t", "volume", "rel err", "method", "nodes");
    for i in 1..=16 {
        let t = -0.75 * i as f64;
        match sublevel_volume(&entry.spec, t, &config) {
            Ok(est) => {
                let closed = formula.as_ref().and_then(|f| f(t));
                println!(
                    "{t:>8.2}  {:>14.6e}  {:>10.2e}  {:>18}  {:>9}  {}",
                    est.value,
                    est.rel_error,
                    format!("{:?}", est.method),
                    est.samples_or_nodes,
                    closed
                        .map(|v| format!("{v:.6e}"))
                        .unwrap_or_else(|| "-".to_string()),
                );
            }
            Err(e) => println!("{t:>8.2}  failed: {e}"),
        }
    }
    println!("\n(ln-scale values stay exact long after the linear value underflows)");
    let deep = sublevel_volume(&entry.spec, -40.0, &config);
    if let Ok(est) = deep {
        println!("t = -40: value = {:.3e}, ln volume = {:.3}", est.value, est.ln_value);
    }
}
