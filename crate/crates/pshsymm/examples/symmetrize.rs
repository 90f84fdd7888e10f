//! Builds the increasing rearrangement and Schwarz symmetrization of a
//! catalog entry, then runs the equimeasurability, layer-cake and sub-level
//! integral checks on the result.
//!
//! ```bash
//! cargo run --example symmetrize -- ex-4.1
//! ```

use pshsymm::catalog::resolve;
use pshsymm::rearrange::{
    default_t_grid, equimeasurability_check, layer_cake_exp, schwarz_symmetrize,
    sublevel_integral_check,
};
use pshsymm::volume::VolumeConfig;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ex-4.1".to_string());
    let entry = resolve(&name, None, None).unwrap_or_else(|| {
        eprintln!("unknown catalog entry {name}");
        std::process::exit(1);
    });
    let config = VolumeConfig::default();
    let grid = default_t_grid(-60.0);

    let result = schwarz_symmetrize(&entry.spec, &grid, &config).unwrap();
    println!("symmetrization of {name}");
    println!(
        "  {} profile knots, boundary value {:+.2e}, max convexity violation {:.2e}",
        result.u_hat.knots().map(|k| k.len()).unwrap_or(0),
        result.checks.boundary_value,
        result.checks.max_convexity_violation,
    );
    println!("\n  t        f_hat(t)");
    for t in [-0.5, -2.0, -5.0, -10.0, -20.0] {
        println!("  {t:>6.1}  {:>10.4}", result.u_hat.eval(t));
    }

    let probes: Vec<f64> = (1..=8).map(|i| -0.75 * i as f64).collect();
    let equi = equimeasurability_check(&entry.spec, &result, &probes, &config);
    println!("\nequimeasurability (|{{u<t}}| vs |{{u_*<t}}| vs |{{u_hat<t}}|):");
    for row in &equi.rows {
        println!(
            "  t {:>6.2}: {:.5e}  {:.5e}  {:.5e}  (rel {:.2e})",
            row.t, row.vol_u, row.vol_u_star, row.vol_u_hat, row.rel_discrepancy
        );
    }
    println!("  max relative discrepancy {:.3e}", equi.max_rel_discrepancy);

    for c in [0.4, 1.2] {
        let cake = layer_cake_exp(&entry.spec, &result, c, &config);
        println!(
            "\nlayer cake with F = exp(-2 c u), c = {c}: lhs {:.5e}, rhs {:.5e}, gap {:.2e}, divergent ({}, {})",
            cake.lhs, cake.rhs, cake.rel_gap, cake.lhs_divergent, cake.rhs_divergent
        );
    }

    let n2 = 2 * entry.spec.dimension;
    let probe = sublevel_integral_check(&entry.spec, &result, &vec![0.0; n2], 0.3, &config);
    println!(
        "\nintegral comparison on B_0.3(0): int_E u = {:.5} >= int_0^|E| u_* = {:.5} (gap {:+.3e})",
        probe.lhs, probe.rhs, probe.gap
    );
}
