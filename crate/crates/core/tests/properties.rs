//! Randomized invariants over small generated instances.

use itertools::Itertools;
use proptest::prelude::*;

use kdknap::costfree::build_costfree_lp;
use kdknap::disjunctive::{check_membership, solve_and_round, value_by_decomposition};
use kdknap::exactlp::{count_fractional, knapsack_relaxation, solve_lp, verify_optimality};
use kdknap::instance::{generate_random, normalize, parse_instance, serialize_instance, GenParams};
use kdknap::oracle::{brute_force, dp_solve, lp_by_vertices};
use kdknap::rational::int;
use kdknap::rounding::{round_extreme_covering, round_extreme_packing};
use kdknap::{KnapsackInstance, Rational, Sense};

const BUDGET: u128 = 1_000_000;

fn instance(k: usize, n: usize, covering: bool, seed: u64) -> KnapsackInstance {
    let params = GenParams {
        k,
        n,
        weights: (0, 6),
        costs: (1, 9),
        bounds: (1, 2),
        sense: if covering { Sense::Covering } else { Sense::Packing },
        tightness: 0.5,
    };
    generate_random(&params, seed).expect("valid parameters")
}

fn small() -> impl Strategy<Value = KnapsackInstance> {
    (1usize..=2, 1usize..=4, any::<bool>(), any::<u64>()).prop_map(|(k, n, cov, seed)| instance(k, n, cov, seed))
}

fn box_points(inst: &KnapsackInstance) -> Vec<Vec<u64>> {
    let d = inst.finite_d().unwrap();
    d.iter().map(|&u| 0..=u).multi_cartesian_product().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn json_round_trip(inst in small()) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn dp_matches_brute_force(inst in small()) {
        let b = brute_force(&inst, BUDGET).unwrap();
        let d = dp_solve(&inst, BUDGET).unwrap();
        prop_assert_eq!(b.value, d.value);
        prop_assert!(inst.is_feasible(&d.x));
    }

    #[test]
    fn simplex_matches_vertex_enumeration(inst in small()) {
        let lp = knapsack_relaxation(&inst);
        let sol = solve_lp(&lp).unwrap();
        let (best, _) = lp_by_vertices(&lp).unwrap();
        prop_assert_eq!(&sol.value, &best);
        verify_optimality(&lp, &sol).unwrap();
    }

    #[test]
    fn rounding_loss_is_bounded(inst in small()) {
        let sol = solve_lp(&knapsack_relaxation(&inst)).unwrap();
        prop_assert!(count_fractional(&sol.x) <= inst.k());
        let (rounded, report) = match inst.sense() {
            Sense::Packing => round_extreme_packing(&inst, &sol).unwrap(),
            Sense::Covering => round_extreme_covering(&inst, &sol).unwrap(),
        };
        prop_assert!(inst.is_feasible(&rounded.x));
        prop_assert!(report.loss <= Rational::from_integer(inst.k().into()) * inst.c_max());
    }

    #[test]
    fn hull_value_equals_decomposition(inst in small(), gamma in 1u64..=2) {
        let norm = normalize(&inst);
        let (sol, rounded) = solve_and_round(&norm, gamma).unwrap();
        prop_assert_eq!(&sol.value, &value_by_decomposition(&norm, gamma, false).unwrap());
        let opt = brute_force(&inst, BUDGET).unwrap().value;
        match inst.sense() {
            Sense::Packing => prop_assert!(rounded.value <= opt && opt <= sol.value),
            Sense::Covering => prop_assert!(rounded.value >= opt && opt >= sol.value),
        }
    }

    #[test]
    fn integral_points_lie_in_the_hull(
        (k, n, cov, seed) in (1usize..=2, 1usize..=3, any::<bool>(), any::<u64>()),
        gamma in 1u64..=2,
    ) {
        let inst = instance(k, n, cov, seed);
        let norm = normalize(&inst);
        for x in box_points(&inst) {
            let point: Vec<Rational> = norm.to_normalized(&x).into_iter().map(int).collect();
            prop_assert_eq!(check_membership(&norm, gamma, &point).unwrap(), inst.is_feasible(&x), "{:?}", x);
        }
    }

    #[test]
    fn costfree_constraints_ignore_costs(
        (k, n, seed) in (1usize..=2, 1usize..=3, any::<u64>()),
        costs in prop::collection::vec(1u64..50, 3),
        gamma in 1u64..=2,
    ) {
        let inst = instance(k, n, false, seed);
        let other = inst.with_costs(costs[..n].iter().map(|&c| int(c)).collect()).unwrap();
        let a = build_costfree_lp(&inst, gamma).unwrap();
        let b = build_costfree_lp(&other, gamma).unwrap();
        prop_assert_eq!(a.constraints_text(), b.constraints_text());
    }
}
