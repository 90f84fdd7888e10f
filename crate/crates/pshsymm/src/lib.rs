//! Singularity invariants of S1-invariant and toric plurisubharmonic
//! functions under Schwarz symmetrization.
//!
//! The crate computes, at desk scale:
//!
//! - Lelong numbers `nu` (at the origin and at interior points), refined
//!   Lelong numbers `nu(0, a)`, integrability indices `iota` by two
//!   independent routes (sub-level volume asymptotics and Kiselman's
//!   supremum over directions), and residue Monge-Ampere masses of radial
//!   profiles;
//! - sub-level set volumes `|{u < t}|` (exact radial inversion, certified
//!   adaptive quadrature for toric bodies, stratified Monte Carlo
//!   otherwise);
//! - the increasing rearrangement `u_*`, the Schwarz symmetrization `u_hat`,
//!   and the classical check suite around them (equimeasurability,
//!   layer-cake, sub-level integral comparison, Polya-Szego);
//! - a theorem harness validating the relations `nu <= nu_hat <= n nu`,
//!   `nu/n <= iota <= nu`, `nu_hat = n iota`, `tau_hat = nu_hat^n`, and mass
//!   domination `tau_hat <= tau` on a catalog of classical examples.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example catalog_tour          # the builtin function catalog
//! cargo run --example sublevel_volumes      # volume engine on one entry
//! cargo run --example symmetrize            # u_*, u_hat, equimeasurability
//! cargo run --example invariants_of_entry   # nu, iota, nu_hat, tau_hat
//! cargo run --example directional_analysis  # Kiselman + Rashkovskii optimizers
//! cargo run --example theorem_suite         # the full verification table
//! cargo run --example reproduce_table       # reference values side by side
//! cargo run --example load_json_spec        # user-defined functions via JSON
//! ```
//!
//! The thin `pshsymm` binary drives the same pipelines in batch form
//! (`analyze`, `verify`, `reproduce`); see the README.

pub mod catalog;
pub mod config;
pub mod expr;
pub mod function;
pub mod invariants;
pub mod numeric;
pub mod profile;
pub mod rearrange;
pub mod report;
pub mod runner;
pub mod slope;
pub mod volume;

pub use catalog::{builtin_catalog, CatalogEntry, Expected, TauValue};
pub use config::{OutputFormat, RunConfig};
pub use function::{
    load_spec, Body, FunctionSpec, PoleStructure, SpecError, SymmetryClass,
};
pub use invariants::{
    integrability_index_kiselman, integrability_index_volume, invariant_report, lelong_at_point,
    lelong_origin, radial_ma_consistency, rashkovskii_lower_bound, refined_lelong,
    residue_mass_radial, verify_theorems, CheckStatus, Direction, InvariantError, InvariantReport,
    TheoremReport,
};
pub use profile::{MonotoneTable, RadialProfile, TableMode, ToricProfile};
pub use rearrange::{
    default_t_grid, equimeasurability_check, increasing_rearrangement, layer_cake_exp,
    polya_szego_check, schwarz_symmetrize, sublevel_integral_check, RearrangeError,
    SymmetrizationResult,
};
pub use slope::{SlopeEstimate, SlopeMethod};
pub use volume::{
    sublevel_volume, volume_profile, VolumeConfig, VolumeError, VolumeEstimate, VolumeMethod,
};
