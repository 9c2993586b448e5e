use proptest::prelude::*;

use loewner_core::funcs::{FunctionDescriptor as F, Interval};
use loewner_core::intervals::{transfer_psd, verify_conjugation_dd, ConjugationMap, TransferKind};
use loewner_core::matorder::{run_check, OrderCheckConfig};
use loewner_core::property::{default_check, Property, PropertyRegistry};
use loewner_core::search::{sweep, AlphaGrid, SweepConfig};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn verdicts_do_not_depend_on_thread_count(alpha in -2.0f64..4.0, seed in any::<u64>(), n in 2usize..4) {
        let f = F::power(alpha);
        let check = default_check(Property::Cnd);
        let cfg = OrderCheckConfig::new(60, seed);
        let one = in_pool(1, || run_check(check.as_ref(), &f, n, &cfg).unwrap());
        let many = in_pool(4, || run_check(check.as_ref(), &f, n, &cfg).unwrap());
        prop_assert_eq!(one, many);
    }

    #[test]
    fn transfer_formulas_hold(alpha in -1.5f64..3.5, s in 0.11f64..4.9, t in 0.11f64..4.9) {
        let f = F::power(alpha).restricted(Interval::new(0.1, 5.0).unwrap());
        let map = ConjugationMap::new(0.1, 5.0).unwrap();
        for kind in TransferKind::ALL {
            let c = verify_conjugation_dd(&f, map, kind, s, t).unwrap();
            prop_assert!(c.holds(1e-9), "{:?} at ({}, {}): {:?}", kind, s, t, c);
        }
    }

    #[test]
    fn psd_verdict_transfers(lambda in -0.9f64..0.9, pts in proptest::collection::vec(-0.95f64..0.95, 2..5)) {
        let f = F::moebius_convex(lambda);
        let c = transfer_psd(&f, ConjugationMap::new(-1.0, 1.0).unwrap(), &pts, 1e-9).unwrap();
        // skip tuples whose smallest eigenvalue sits on the tolerance boundary
        let near = |v: &loewner_core::definiteness::DefinitenessVerdict| v.extremal_eigenvalue.abs() <= 1e-6 * v.scale;
        prop_assume!(!near(&c.direct) && !near(&c.conjugated));
        prop_assert!(c.agree);
    }
}

#[test]
fn sweep_cells_do_not_depend_on_the_rest_of_the_grid() {
    let registry = PropertyRegistry::with_defaults();
    let props = vec![Property::Cpd, Property::Monotone];
    let full = sweep(&SweepConfig::new(AlphaGrid::new(-1.0, 3.0, 0.5).unwrap(), vec![2, 3], props.clone(), 80, 17), &registry).unwrap();
    let part = sweep(&SweepConfig::new(AlphaGrid::new(1.5, 2.5, 0.5).unwrap(), vec![3], props, 80, 17), &registry).unwrap();
    for cell in &part.cells {
        assert_eq!(Some(cell), full.cell(cell.alpha, cell.order, cell.property));
    }
}
