//! Full invariant report for one catalog entry: Lelong number,
//! integrability index by two routes, symmetrized Lelong number, residue
//! masses, and the bound flags.
//!
//! ```bash
//! cargo run --example invariants_of_entry -- ex-4.2
//! ```

use pshsymm::config::RunConfig;
use pshsymm::report::analysis_markdown;
use pshsymm::runner::quick_analysis;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ex-4.2".to_string());
    let config = RunConfig::default();
    match quick_analysis(&name, &config) {
        Ok(analysis) => {
            print!("{}", analysis_markdown(&analysis.invariants));
            let inv = &analysis.invariants;
            println!("\nwindows and methods:");
            println!(
                "  nu:   window ({:.1}, {:.1}), {} points, {:?}",
                inv.nu.window.0, inv.nu.window.1, inv.nu.points_used, inv.nu.method
            );
            println!(
                "  iota: window ({:.1}, {:.1}), {} points, {:?}",
                inv.iota_volume.window.0,
                inv.iota_volume.window.1,
                inv.iota_volume.points_used,
                inv.iota_volume.method
            );
            if let Some(a) = &inv.kiselman_argmax {
                println!("  Kiselman maximizer a = {a:?}");
            }
            if inv.unstable {
                println!("  note: at least one estimate is flagged UNSTABLE");
            }
        }
        Err(e) => {
            eprintln!("analysis failed: {e}");
            std::process::exit(1);
        }
    }
}
