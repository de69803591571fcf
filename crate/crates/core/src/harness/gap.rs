use std::time::Instant;

use num::Zero;
use serde_json::{json, Value};

use super::digest;
use crate::costfree::{costfree_solve_gamma, repair_factor};
use crate::disjunctive::{gap_factor, solve_and_round};
use crate::error::{Error, Result};
use crate::exactlp::{knapsack_relaxation, solve_lp};
use crate::instance::{cap_unbounded, normalize, KnapsackInstance, Sense};
use crate::oracle::{brute_force, dp_solve};
use crate::rational::{approx, render, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapOptions {
    pub gammas: Vec<u64>,
    pub budget: u128,
    /// Also build the cost-free LP (packing only).
    pub costfree: bool,
    /// Record wall-clock timings; reports are then no longer reproducible.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostfreeRow {
    pub lp_value: Rational,
    pub rounded_value: Rational,
    pub num_tuples: usize,
    pub lp_vars: usize,
    pub lp_rows: usize,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaRow {
    pub gamma: u64,
    pub lp_value: Rational,
    pub rounded_value: Rational,
    pub num_guesses: usize,
    pub lp_vars: usize,
    pub lp_rows: usize,
    pub fallback_used: bool,
    /// `1 - k/gamma` for packing, `1 + k/gamma` for covering.
    pub factor: Option<Rational>,
    /// `OPT(L) / OPT_IP` for packing, `OPT_IP / OPT(L)` for covering.
    pub observed_gap: Option<Rational>,
    /// Whether the gap inequality holds; `None` without an integer optimum.
    pub holds: Option<bool>,
    pub costfree: Option<CostfreeRow>,
    pub millis: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub digest: String,
    pub sense: Sense,
    pub k: usize,
    pub n: usize,
    pub opt_ip: Option<Rational>,
    /// Why the integer optimum is missing, when it is.
    pub oracle_note: Option<String>,
    pub naive_lp: Rational,
    pub rows: Vec<GammaRow>,
}

impl GapReport {
    pub fn checks_skipped(&self) -> bool {
        self.opt_ip.is_none()
    }

    /// No checked inequality failed.
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| {
            r.holds != Some(false) && r.costfree.as_ref().map_or(true, |c| c.holds != Some(false))
        })
    }

    pub fn to_json(&self) -> Value {
        let opt = |v: &Option<Rational>| v.as_ref().map(render);
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut row = json!({
                    "gamma": r.gamma,
                    "lp_value": render(&r.lp_value),
                    "rounded_value": render(&r.rounded_value),
                    "num_guesses": r.num_guesses,
                    "lp_vars": r.lp_vars,
                    "lp_rows": r.lp_rows,
                    "fallback_used": r.fallback_used,
                    "factor": opt(&r.factor),
                    "observed_gap": opt(&r.observed_gap),
                    "observed_gap_approx": r.observed_gap.as_ref().map(approx),
                    "holds": r.holds,
                });
                if let Some(c) = &r.costfree {
                    row["costfree"] = json!({
                        "lp_value": render(&c.lp_value),
                        "rounded_value": render(&c.rounded_value),
                        "num_tuples": c.num_tuples,
                        "lp_vars": c.lp_vars,
                        "lp_rows": c.lp_rows,
                        "holds": c.holds,
                    });
                }
                if let Some(ms) = r.millis {
                    row["millis"] = json!(ms);
                }
                row
            })
            .collect();
        json!({
            "digest": self.digest,
            "sense": self.sense.to_string(),
            "k": self.k,
            "n": self.n,
            "opt_ip": opt(&self.opt_ip),
            "opt_ip_available": self.opt_ip.is_some(),
            "oracle_note": self.oracle_note,
            "checks_skipped": self.checks_skipped(),
            "naive_lp": render(&self.naive_lp),
            "rows": rows,
            "all_hold": self.all_hold(),
        })
    }
}

fn ratio_or_none(num: &Rational, den: &Rational) -> Option<Rational> {
    match (num.is_zero(), den.is_zero()) {
        (true, true) => Some(Rational::from_integer(1.into())),
        (_, true) => None,
        _ => Some(num / den),
    }
}

/// Integer optimum from brute force, falling back to the DP when enumeration
/// is over budget.
fn integer_optimum(inst: &KnapsackInstance, budget: u128) -> Result<(Option<Rational>, Option<String>)> {
    match brute_force(inst, budget) {
        Ok(r) => return Ok((Some(r.value), None)),
        Err(Error::BudgetExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    match dp_solve(inst, budget) {
        Ok(r) => Ok((Some(r.value), None)),
        Err(e @ Error::BudgetExceeded { .. }) => Ok((None, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

/// Integer optimum, naive LP and hull LP per `gamma`, with the gap inequality
/// checked exactly wherever the integer optimum is available. All values refer
/// to the instance after infinite bounds are capped.
pub fn gap_report(inst: &KnapsackInstance, opts: &GapOptions) -> Result<GapReport> {
    let capped = cap_unbounded(inst)?;
    let sense = capped.sense();
    let (opt_ip, oracle_note) = integer_optimum(&capped, opts.budget)?;
    let naive_lp = solve_lp(&knapsack_relaxation(&capped))?.into_result("relaxation")?.value;
    let norm = normalize(&capped);
    let mut rows = Vec::with_capacity(opts.gammas.len());
    for &gamma in &opts.gammas {
        let start = Instant::now();
        let (sol, rounded) = solve_and_round(&norm, gamma)?;
        let factor = gap_factor(sense, capped.k(), gamma);
        let (observed_gap, holds) = match &opt_ip {
            None => (None, None),
            Some(opt) => {
                let holds = match (sense, &factor) {
                    (_, None) => true,
                    (Sense::Packing, Some(f)) => *opt >= f * &sol.value,
                    (Sense::Covering, Some(f)) => *opt <= f * &sol.value,
                };
                let gap = match sense {
                    Sense::Packing => ratio_or_none(&sol.value, opt),
                    Sense::Covering => ratio_or_none(opt, &sol.value),
                };
                (gap, Some(holds))
            }
        };
        let costfree = if opts.costfree && sense == Sense::Packing {
            let out = costfree_solve_gamma(&capped, gamma)?;
            let holds = opt_ip
                .as_ref()
                .map(|opt| *opt >= repair_factor(capped.k(), gamma) * &out.value && out.solution.value <= *opt);
            Some(CostfreeRow {
                lp_value: out.value,
                rounded_value: out.solution.value,
                num_tuples: out.num_tuples,
                lp_vars: out.lp_vars,
                lp_rows: out.lp_rows,
                holds,
            })
        } else {
            None
        };
        rows.push(GammaRow {
            gamma,
            lp_value: sol.value,
            rounded_value: rounded.value,
            num_guesses: sol.num_guesses,
            lp_vars: sol.lp_vars,
            lp_rows: sol.lp_rows,
            fallback_used: sol.fallback_used,
            factor,
            observed_gap,
            holds,
            costfree,
            millis: opts.timings.then(|| start.elapsed().as_millis()),
        });
    }
    Ok(GapReport {
        digest: digest(inst),
        sense,
        k: capped.k(),
        n: capped.n(),
        opt_ip,
        oracle_note,
        naive_lp,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Bound;
    use crate::rational::{int, ratio};

    fn running(sense: Sense) -> KnapsackInstance {
        KnapsackInstance::new(sense, vec![vec![2, 3]], vec![4], vec![int(1), int(1)], vec![Bound::Finite(1); 2]).unwrap()
    }

    fn opts(gammas: Vec<u64>) -> GapOptions {
        GapOptions { gammas, budget: 1_000_000, costfree: true, timings: false }
    }

    #[test]
    fn running_example_gaps() {
        let r = gap_report(&running(Sense::Packing), &opts(vec![1, 2])).unwrap();
        assert_eq!(r.opt_ip, Some(int(1)));
        assert_eq!(r.naive_lp, ratio(5, 3));
        assert_eq!(r.rows[0].lp_value, ratio(3, 2));
        assert_eq!(r.rows[0].observed_gap, Some(ratio(3, 2)));
        assert_eq!(r.rows[1].lp_value, int(1));
        assert_eq!(r.rows[1].observed_gap, Some(int(1)));
        assert_eq!(r.rows[0].costfree.as_ref().unwrap().lp_value, ratio(3, 2));
        assert!(r.all_hold());
        assert_eq!(r.to_json(), gap_report(&running(Sense::Packing), &opts(vec![1, 2])).unwrap().to_json());
    }

    #[test]
    fn covering_gap() {
        let r = gap_report(&running(Sense::Covering), &opts(vec![1])).unwrap();
        assert_eq!((r.opt_ip.clone(), r.rows[0].lp_value.clone()), (Some(int(2)), ratio(3, 2)));
        assert_eq!(r.rows[0].factor, Some(int(2)));
        assert_eq!(r.rows[0].holds, Some(true));
        assert!(r.rows[0].costfree.is_none());
    }

    #[test]
    fn over_budget_skips_checks() {
        let mut o = opts(vec![1]);
        o.budget = 1;
        let r = gap_report(&running(Sense::Packing), &o).unwrap();
        assert!(r.checks_skipped());
        assert!(r.oracle_note.is_some());
        assert_eq!(r.rows[0].holds, None);
        assert_eq!(r.to_json()["opt_ip_available"], false);
    }
}
