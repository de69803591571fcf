//! Pipeline dispatch, gap measurement and randomized verification suites
//! behind the `kdknap` command-line tool.

mod gap;
mod suites;

pub use gap::{gap_report, GammaRow, GapOptions, GapReport};
pub use suites::{check_case, run_suite, shrink, suite_instance, CaseOutcome, Suite, SuiteReport};

use clap::ValueEnum;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::costfree::costfree_solve_gamma;
use crate::disjunctive::solve_and_round;
use crate::error::{Error, Result};
use crate::exactlp::{count_fractional, knapsack_relaxation, solve_lp};
use crate::filtering::{gamma_for, ptas_solve, PtasConfig};
use crate::instance::{cap_unbounded, normalize, serialize_instance, IntegralSolution, KnapsackInstance, Sense};
use crate::oracle::{brute_force, dp_solve, DEFAULT_BUDGET};
use crate::rational::{render, Rational};
use crate::rounding::{round_extreme_covering, round_extreme_packing};

/// Environment variable overriding the oracle budget.
pub const BUDGET_ENV: &str = "KDKNAP_ORACLE_BUDGET";

/// The oracle budget from [`BUDGET_ENV`], or the default.
pub fn oracle_budget() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_BUDGET),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{BUDGET_ENV}={v} is not a non-negative integer"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    NaiveLp,
    Ptas,
    Disjunctive,
    Costfree,
    Dp,
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::NaiveLp => "naive-lp",
            Method::Ptas => "ptas",
            Method::Disjunctive => "disjunctive",
            Method::Costfree => "costfree",
            Method::Dp => "dp",
            Method::Brute => "brute",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub gamma: Option<u64>,
    pub epsilon: Option<Rational>,
    pub parallel: bool,
    /// Include the per-guess trace in `ptas` reports.
    pub trace: bool,
    pub budget: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gamma: None,
            epsilon: None,
            parallel: false,
            trace: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl SolveOptions {
    /// `gamma` as given, or `⌈numerator / eps⌉`.
    fn gamma(&self, numerator: u64) -> Result<u64> {
        match (self.gamma, &self.epsilon) {
            (Some(_), Some(_)) => Err(Error::InvalidParams("give either gamma or epsilon, not both".into())),
            (Some(g), None) => Ok(g),
            (None, Some(eps)) => gamma_for(numerator, eps),
            (None, None) => Err(Error::InvalidParams("this method needs gamma or epsilon".into())),
        }
    }
}

/// Hex SHA-256 of the canonical instance serialization.
pub fn digest(inst: &KnapsackInstance) -> String {
    hex::encode(Sha256::digest(serialize_instance(inst).as_bytes()))
}

fn solution_json(s: &IntegralSolution) -> Value {
    json!({ "x": s.x, "value": render(&s.value) })
}

/// Runs one pipeline and returns its report. Vectors are in the instance's
/// own item order.
pub fn solve_report(inst: &KnapsackInstance, method: Method, opts: &SolveOptions) -> Result<Value> {
    let k = inst.k() as u64;
    let mut report = match method {
        Method::NaiveLp => {
            let lp = solve_lp(&knapsack_relaxation(inst))?.into_result("relaxation")?;
            let (rounded, rr) = match inst.sense() {
                Sense::Packing => round_extreme_packing(inst, &lp)?,
                Sense::Covering => round_extreme_covering(inst, &lp)?,
            };
            json!({
                "lp_value": render(&lp.value),
                "lp_x": lp.x.iter().map(render).collect::<Vec<_>>(),
                "fractional": count_fractional(&lp.x),
                "rounded_value": render(&rounded.value),
                "x": rounded.x,
                "loss": render(&rr.loss),
                "bound": render(&rr.bound),
            })
        }
        Method::Ptas => {
            let capped = cap_unbounded(inst)?;
            let norm = normalize(&capped);
            let cfg = PtasConfig::with_gamma(opts.gamma(k)?)?.parallel(opts.parallel);
            let out = ptas_solve(&norm, &cfg)?;
            let best = norm.solution_to_original(&out.best);
            let mut r = json!({
                "gamma": cfg.gamma,
                "num_guesses": out.trace.len(),
                "best_guess": norm.to_original(&out.best_guess.g),
                "x": best.x,
                "value": render(&best.value),
            });
            if opts.trace {
                let trace: Vec<Value> = out
                    .trace
                    .iter()
                    .map(|t| {
                        json!({
                            "g": norm.to_original(&t.residual.guess.g),
                            "b_g": t.residual.b_g,
                            "d_g": norm.to_original(&t.residual.d_g).iter().map(|d| d.finite()).collect::<Vec<_>>(),
                            "lp_value": render(&t.lp_value),
                            "shifted_value": render(&t.shifted_value),
                            "rounded_value": render(&t.candidate.value),
                        })
                    })
                    .collect();
                r["trace"] = json!(trace);
            }
            r
        }
        Method::Disjunctive => {
            let capped = cap_unbounded(inst)?;
            let norm = normalize(&capped);
            let (sol, rounded) = solve_and_round(&norm, opts.gamma(k)?)?;
            let mut r = sol.report(&norm, &rounded);
            r["x"] = json!(norm.to_original(&rounded.x));
            r
        }
        Method::Costfree => {
            if inst.sense() == Sense::Covering {
                return Err(Error::contract("costfree supports packing instances only"));
            }
            let capped = cap_unbounded(inst)?;
            let out = costfree_solve_gamma(&capped, opts.gamma(k * k)?)?;
            let mut r = out.report();
            r["x"] = json!(out.solution.x);
            r
        }
        Method::Dp | Method::Brute => {
            let capped = cap_unbounded(inst)?;
            let res = if method == Method::Dp {
                dp_solve(&capped, opts.budget)?
            } else {
                brute_force(&capped, opts.budget)?
            };
            let mut r = solution_json(&IntegralSolution { x: res.x, value: res.value });
            r["states"] = json!(res.states.to_string());
            r
        }
    };
    let mut out = json!({ "method": method.name(), "sense": inst.sense().to_string() });
    out.as_object_mut()
        .expect("object")
        .extend(report.as_object_mut().expect("object").clone());
    Ok(out)
}
