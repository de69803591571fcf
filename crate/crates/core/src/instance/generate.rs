use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Bound, KnapsackInstance, Sense};
use crate::error::{Error, Result};
use crate::rational::int;

/// Parameters for [`generate_random`]. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub k: usize,
    pub n: usize,
    pub weights: (u64, u64),
    pub costs: (u64, u64),
    pub bounds: (u64, u64),
    pub sense: Sense,
    /// In `[0, 1]`. Packing: 0 puts each limit at the heaviest single item, 1 at
    /// the full row sum. Covering: fraction of the total coverage demanded.
    pub tightness: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            k: 2,
            n: 5,
            weights: (0, 9),
            costs: (1, 9),
            bounds: (1, 3),
            sense: Sense::Packing,
            tightness: 0.5,
        }
    }
}

/// Draws a random feasible, non-trivial instance; the same seed always yields
/// the same instance.
pub fn generate_random(params: &GenParams, seed: u64) -> Result<KnapsackInstance> {
    let p = params;
    if p.k == 0 || p.n == 0 {
        return Err(Error::InvalidParams("k and n must be at least 1".into()));
    }
    for (name, (lo, hi)) in [("weight", p.weights), ("cost", p.costs), ("bound", p.bounds)] {
        if lo > hi {
            return Err(Error::InvalidParams(format!("empty {name} range {lo}..={hi}")));
        }
    }
    if !(0.0..=1.0).contains(&p.tightness) {
        return Err(Error::InvalidParams(format!("tightness {} outside [0, 1]", p.tightness)));
    }
    if p.sense == Sense::Covering && (p.bounds.1 == 0 || p.weights.1 == 0) {
        return Err(Error::InvalidParams(
            "infeasible generation: covering needs positive weights and bounds".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a: Vec<Vec<u64>> = (0..p.k)
            .map(|_| (0..p.n).map(|_| rng.gen_range(p.weights.0..=p.weights.1)).collect())
            .collect();
        let c = (0..p.n).map(|_| int(rng.gen_range(p.costs.0..=p.costs.1))).collect();
        let d: Vec<u64> = (0..p.n).map(|_| rng.gen_range(p.bounds.0..=p.bounds.1)).collect();

        let mut b = Vec::with_capacity(p.k);
        let mut ok = true;
        for row in &a {
            let total: u64 = row.iter().zip(&d).map(|(w, di)| w * di).sum();
            let heaviest = row.iter().zip(&d).filter(|(_, &di)| di > 0).map(|(w, _)| *w).max().unwrap_or(0);
            let bj = match p.sense {
                Sense::Packing => heaviest + ((total - heaviest.min(total)) as f64 * p.tightness).floor() as u64,
                Sense::Covering => {
                    if total == 0 {
                        ok = false;
                        break;
                    }
                    ((total as f64 * p.tightness).ceil() as u64).clamp(1, total)
                }
            };
            b.push(bj);
        }
        // A covering row with no coverage at all: redraw.
        if !ok {
            continue;
        }
        return KnapsackInstance::new(p.sense, a, b, c, d.into_iter().map(Bound::Finite).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let p = GenParams { k: 1, n: 3, ..GenParams::default() };
        assert_eq!(generate_random(&p, 7).unwrap(), generate_random(&p, 7).unwrap());
        assert_ne!(generate_random(&p, 7).unwrap(), generate_random(&p, 8).unwrap());
    }

    #[test]
    fn covering_with_zero_bounds_is_rejected() {
        let p = GenParams { sense: Sense::Covering, bounds: (0, 0), ..GenParams::default() };
        let err = generate_random(&p, 1).unwrap_err();
        assert!(err.to_string().contains("infeasible generation"));
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(generate_random(&GenParams { weights: (5, 1), ..GenParams::default() }, 0).is_err());
        assert!(generate_random(&GenParams { n: 0, ..GenParams::default() }, 0).is_err());
        assert!(generate_random(&GenParams { tightness: 2.0, ..GenParams::default() }, 0).is_err());
    }

    #[test]
    fn generated_instances_are_feasible() {
        for sense in [Sense::Packing, Sense::Covering] {
            for seed in 0..50 {
                let p = GenParams { k: 2, n: 5, sense, ..GenParams::default() };
                let inst = generate_random(&p, seed).unwrap();
                let d = inst.finite_d().unwrap();
                match sense {
                    Sense::Packing => assert!(inst.is_feasible(&vec![0; 5])),
                    Sense::Covering => assert!(inst.is_feasible(&d)),
                }
                assert!(inst.b().iter().all(|&b| b > 0) || sense == Sense::Packing);
            }
        }
    }
}
