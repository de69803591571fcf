//! Floor (packing) and ceiling (covering) rounding of extreme-point LP
//! solutions, with the additive `k · c_max` guarantee checked exactly.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlp::{count_fractional, knapsack_relaxation, LpSolution, PointCheck};
use crate::instance::{IntegralSolution, KnapsackInstance, Sense};
use crate::rational::{ceil_u64, dot, floor_u64, int, render, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingReport {
    pub fractional: Vec<Rational>,
    pub rounded: Vec<u64>,
    /// `|c·x* - c·round(x*)|`.
    pub loss: Rational,
    pub c_max: Rational,
    /// `k · c_max`.
    pub bound: Rational,
}

impl RoundingReport {
    pub fn to_json(&self) -> Value {
        json!({
            "fractional": self.fractional.iter().map(render).collect::<Vec<_>>(),
            "rounded": self.rounded,
            "loss": render(&self.loss),
            "c_max": render(&self.c_max),
            "bound": render(&self.bound),
        })
    }
}

pub fn round_down(x: &[Rational]) -> Vec<u64> {
    x.iter()
        .map(|v| floor_u64(v).expect("round_down needs non-negative entries"))
        .collect()
}

pub fn round_up(x: &[Rational]) -> Vec<u64> {
    x.iter()
        .map(|v| ceil_u64(v).expect("round_up needs non-negative entries"))
        .collect()
}

fn check_solution(sol: &LpSolution, n: usize) -> Result<()> {
    if !sol.is_optimal() {
        return Err(Error::contract("rounding needs an optimal LP solution"));
    }
    if sol.basis.len() != n {
        return Err(Error::contract("rounding needs a basic solution"));
    }
    Ok(())
}

/// Rounds a point of `inst`'s relaxation in the direction that keeps
/// feasibility and checks the additive guarantee.
pub fn round_point(inst: &KnapsackInstance, x: &[Rational]) -> Result<(IntegralSolution, RoundingReport)> {
    if x.len() != inst.n() {
        return Err(Error::contract(format!("point has {} coordinates, expected {}", x.len(), inst.n())));
    }
    let relaxation = knapsack_relaxation(inst);
    if let PointCheck::Violated(v) = relaxation.check_point(x) {
        return Err(Error::contract(format!("point is not in the relaxation: {v:?}")));
    }
    if count_fractional(x) > inst.k() {
        return Err(Error::contract(format!(
            "{} fractional coordinates; an extreme point has at most {}",
            count_fractional(x),
            inst.k()
        )));
    }
    let rounded = match inst.sense() {
        Sense::Packing => round_down(x),
        Sense::Covering => round_up(x),
    };
    let solution = inst.solution(rounded.clone()).map_err(|e| {
        Error::InvariantViolation(format!("rounding broke feasibility: {e}"))
    })?;
    let fractional_value = dot(inst.c(), x);
    let loss = match inst.sense() {
        Sense::Packing => &fractional_value - &solution.value,
        Sense::Covering => &solution.value - &fractional_value,
    };
    let c_max = inst.c_max();
    let bound = int(inst.k() as u64) * &c_max;
    if loss > bound {
        return Err(Error::InvariantViolation(format!(
            "rounding loss {} exceeds k·c_max = {}",
            render(&loss),
            render(&bound)
        )));
    }
    let report = RoundingReport {
        fractional: x.to_vec(),
        rounded,
        loss,
        c_max,
        bound,
    };
    Ok((solution, report))
}

/// `c·⌊x*⌋ >= c·x* - k·c_max` for an optimal extreme point of the packing relaxation.
pub fn round_extreme_packing(inst: &KnapsackInstance, sol: &LpSolution) -> Result<(IntegralSolution, RoundingReport)> {
    if inst.sense() != Sense::Packing {
        return Err(Error::contract("round_extreme_packing on a covering instance"));
    }
    check_solution(sol, inst.n())?;
    round_point(inst, &sol.x)
}

/// `c·⌈x*⌉ <= c·x* + k·c_max` for an optimal extreme point of the covering relaxation.
pub fn round_extreme_covering(inst: &KnapsackInstance, sol: &LpSolution) -> Result<(IntegralSolution, RoundingReport)> {
    if inst.sense() != Sense::Covering {
        return Err(Error::contract("round_extreme_covering on a packing instance"));
    }
    check_solution(sol, inst.n())?;
    round_point(inst, &sol.x)
}
