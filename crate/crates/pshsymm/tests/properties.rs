//! Property tests for the algebraic invariants of the estimators: scale
//! homogeneity, direction monotonicity/concavity, and the generalized
//! inverse of monotone tables.

use proptest::prelude::*;

use pshsymm::catalog::builtin_catalog;
use pshsymm::config::RunConfig;
use pshsymm::invariants::{lelong_origin, refined_lelong, Direction};
use pshsymm::profile::{MonotoneTable, TableMode};
use pshsymm::CatalogEntry;

fn entry(name: &str) -> CatalogEntry {
    builtin_catalog()
        .into_iter()
        .find(|e| e.name == name)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `nu(gamma u) = gamma nu(u)` and `nu(0, a; gamma u) = gamma nu(0, a; u)`.
    #[test]
    fn homogeneity_in_the_function(gamma in 0.25f64..4.0, a1 in 0.05f64..0.95) {
        let config = RunConfig::fast();
        let base = entry("ex-4.2");
        let scaled = base.spec.scaled(gamma, "scaled");
        let nu0 = lelong_origin(&base.spec, &config).slope;
        let nu1 = lelong_origin(&scaled, &config).slope;
        prop_assert!((nu1 - gamma * nu0).abs() < 1e-6 * (1.0 + gamma));

        let dir = Direction(vec![a1, 1.0 - a1]);
        let r0 = refined_lelong(&base.spec, &dir, &config).unwrap().slope;
        let r1 = refined_lelong(&scaled, &dir, &config).unwrap().slope;
        prop_assert!((r1 - gamma * r0).abs() < 1e-6 * (1.0 + gamma));
    }

    /// `nu(0, a)` is nondecreasing in each component of `a`.
    #[test]
    fn refined_lelong_monotone_in_direction(
        a1 in 0.05f64..1.0,
        a2 in 0.05f64..1.0,
        bump in 0.01f64..0.5,
        which in 0usize..2,
    ) {
        let config = RunConfig::fast();
        for name in ["ex-4.1", "ex-4.2", "ex-4.4", "demailly-0.5"] {
            let e = entry(name);
            let lo = refined_lelong(&e.spec, &Direction(vec![a1, a2]), &config)
                .unwrap()
                .slope;
            let mut bigger = vec![a1, a2];
            bigger[which] += bump;
            let hi = refined_lelong(&e.spec, &Direction(bigger), &config)
                .unwrap()
                .slope;
            prop_assert!(hi >= lo - 1e-9, "{name}: {hi} < {lo}");
        }
    }

    /// Midpoint concavity of `a -> nu(0, a)`.
    #[test]
    fn refined_lelong_concave_in_direction(
        a1 in 0.05f64..1.5,
        a2 in 0.05f64..1.5,
        b1 in 0.05f64..1.5,
        b2 in 0.05f64..1.5,
    ) {
        let config = RunConfig::fast();
        for name in ["ex-4.2", "demailly-0.25"] {
            let e = entry(name);
            let va = refined_lelong(&e.spec, &Direction(vec![a1, a2]), &config).unwrap().slope;
            let vb = refined_lelong(&e.spec, &Direction(vec![b1, b2]), &config).unwrap().slope;
            let vm = refined_lelong(
                &e.spec,
                &Direction(vec![0.5 * (a1 + b1), 0.5 * (a2 + b2)]),
                &config,
            )
            .unwrap()
            .slope;
            prop_assert!(vm >= 0.5 * (va + vb) - 1e-8);
        }
    }

    /// `sublevel_measure` is the generalized inverse of `value_at`.
    #[test]
    fn monotone_table_inverse_consistency(
        raw in proptest::collection::vec((0.01f64..1.0, 0.0f64..1.0), 2..12),
    ) {
        // build a valid table from cumulative sums
        let mut s = 0.0;
        let mut v = -10.0;
        let mut breaks = vec![(0.0, v)];
        for (ds, dv) in raw {
            s += ds;
            v += dv;
            breaks.push((s, v));
        }
        let measure = breaks.last().unwrap().0;
        let table = MonotoneTable::new(breaks, TableMode::Linear, measure, None).unwrap();
        for i in 0..=20 {
            let probe = measure * i as f64 / 20.0;
            let val = table.value_at(probe);
            let back = table.sublevel_measure(val);
            // the inverse returns the infimum of the level set
            prop_assert!(back <= probe + 1e-9);
            if back < probe - 1e-9 {
                // flat stretch: value must be constant on [back, probe]
                prop_assert!((table.value_at(back + 1e-12) - val).abs() < 1e-9);
            }
        }
    }
}
