//! Exact rational linear programming.
//!
//! [`solve_lp`] returns optimal *basic* solutions, i.e. extreme points of the
//! feasible region, so structural facts such as "an optimal vertex of a
//! k-row knapsack relaxation has at most k fractional coordinates" can be
//! checked exactly.

mod coef;
mod problem;
mod simplex;

pub use problem::{LpProblem, ObjSense, PointCheck, Relation, Row, Violation};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{KnapsackInstance, Sense};
use crate::rational::{int, is_integral, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Position of a structural variable in the final basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; empty unless `status` is `Optimal`.
    pub x: Vec<Rational>,
    pub value: Rational,
    /// Final basis status of every structural variable.
    pub basis: Vec<VarStatus>,
    /// Row multipliers in the problem's own sense: `c - Σ duals[r]·A_r` is the
    /// reduced cost vector certifying optimality.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    fn status_only(status: LpStatus) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            value: Rational::zero(),
            basis: Vec::new(),
            duals: Vec::new(),
            pivots: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Converts a non-optimal status into the matching error.
    pub fn into_result(self, what: &str) -> Result<LpSolution> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(Error::Infeasible(what.to_string())),
            LpStatus::Unbounded => Err(Error::Unbounded(what.to_string())),
        }
    }
}

/// Solves `p` exactly with a bounded-variable simplex.
///
/// Deterministic: the same problem always produces the same solution.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    Ok(simplex::solve(p))
}

pub fn count_fractional(x: &[Rational]) -> usize {
    x.iter().filter(|v| !is_integral(v)).count()
}

/// Validates an optimal solution against its dual certificate using only the
/// original problem data: primal feasibility, dual sign conditions, and
/// complementary slackness for rows and bounds.
pub fn verify_optimality(p: &LpProblem, sol: &LpSolution) -> Result<()> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::contract("no optimal solution to verify"));
    }
    if let PointCheck::Violated(v) = p.check_point(&sol.x) {
        return Err(Error::InvariantViolation(format!("optimal point infeasible: {v:?}")));
    }
    if sol.duals.len() != p.num_rows() {
        return Err(Error::InvariantViolation("dual vector has wrong length".into()));
    }
    // Work in minimization form.
    let flip = p.sense == ObjSense::Max;
    let pi: Vec<Rational> = sol.duals.iter().map(|y| if flip { -y } else { y.clone() }).collect();
    let mut reduced: Vec<Rational> = p.objective.iter().map(|c| if flip { -c } else { c.clone() }).collect();
    for (r, row) in p.rows.iter().enumerate() {
        let y = &pi[r];
        let sign_ok = match row.relation {
            Relation::Le => !y.is_positive(),
            Relation::Ge => !y.is_negative(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return Err(Error::InvariantViolation(format!("row {r}: dual has the wrong sign")));
        }
        if !y.is_zero() {
            if row.eval(&sol.x) != row.rhs {
                return Err(Error::InvariantViolation(format!("row {r}: dual nonzero on a slack row")));
            }
            for (j, a) in &row.coeffs {
                reduced[*j] -= y * a;
            }
        }
    }
    for (j, rc) in reduced.iter().enumerate() {
        if rc.is_positive() && sol.x[j] != p.lower[j] {
            return Err(Error::InvariantViolation(format!("x{j}: positive reduced cost off lower bound")));
        }
        if rc.is_negative() && p.upper[j].as_ref() != Some(&sol.x[j]) {
            return Err(Error::InvariantViolation(format!("x{j}: negative reduced cost off upper bound")));
        }
    }
    Ok(())
}

/// The plain relaxation `opt c·x` over `0 <= x <= d` and the knapsack rows,
/// one variable per item and one row per constraint.
pub fn knapsack_relaxation(inst: &KnapsackInstance) -> LpProblem {
    let (sense, rel) = match inst.sense() {
        Sense::Packing => (ObjSense::Max, Relation::Le),
        Sense::Covering => (ObjSense::Min, Relation::Ge),
    };
    let mut p = LpProblem::new(sense);
    for i in 0..inst.n() {
        p.add_var(format!("x{i}"), Rational::zero(), inst.d()[i].as_rational(), inst.c()[i].clone());
    }
    for (row, &bj) in inst.a().iter().zip(inst.b()) {
        let coeffs = row.iter().enumerate().map(|(i, &w)| (i, int(w))).collect();
        p.add_row(coeffs, rel, int(bj));
    }
    p
}
