//! The single extended LP over all guesses: the convex hull of the union of
//! the shifted residual polytopes `{g + x : x in K(A, b^g, c, d^g)}`, written
//! with one scaled copy per guess and convex weights `lambda`.
//!
//! Variable layout, in order: the master point `y` (n entries), then for each
//! guess `g` in enumeration order the block `x^g` (n), `y^g` (n), `lambda^g`.
//! Rows, in order:
//!
//! ```text
//! y_i - sum_g y^g_i = 0                      (n rows)
//! sum_g lambda^g = 1                         (1 row)
//! for each g:
//!   y^g_i - x^g_i - g_i lambda^g = 0         (n rows)
//!   x^g_i - d^g_i lambda^g <= 0              (n rows)
//!   A_j x^g - b^g_j lambda^g <= 0  (>= for covering)   (k rows)
//! ```
//!
//! The objective is `c·y` and touches no extended variable.

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlp::{solve_lp, LpProblem, LpStatus, ObjSense, Relation};
use crate::filtering::{guesses_of, map_guesses, residual_of, solve_guess, Guess, ResidualProblem};
use crate::instance::{IntegralSolution, KnapsackInstance, NormalizedInstance, Sense};
use crate::rational::{int, is_integral, render, Rational};
use crate::rounding::round_point;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveLp {
    pub guesses: Vec<Guess>,
    pub residuals: Vec<ResidualProblem>,
    pub lp: LpProblem,
    n: usize,
}

impl DisjunctiveLp {
    fn block(&self, t: usize) -> usize {
        self.n + t * (2 * self.n + 1)
    }

    pub fn y(&self, i: usize) -> usize {
        i
    }

    pub fn x_of(&self, t: usize, i: usize) -> usize {
        self.block(t) + i
    }

    pub fn y_of(&self, t: usize, i: usize) -> usize {
        self.block(t) + self.n + i
    }

    pub fn lambda(&self, t: usize) -> usize {
        self.block(t) + 2 * self.n
    }

    pub fn num_vars(&self) -> usize {
        self.lp.num_vars()
    }

    pub fn num_rows(&self) -> usize {
        self.lp.num_rows()
    }

    /// `n + |G|(2n + 1)`.
    pub fn expected_vars(n: usize, guesses: usize) -> usize {
        n + guesses * (2 * n + 1)
    }

    /// `n + 1 + |G|(2n + k)`.
    pub fn expected_rows(n: usize, k: usize, guesses: usize) -> usize {
        n + 1 + guesses * (2 * n + k)
    }
}

fn finite(inst: &KnapsackInstance) -> Result<Vec<u64>> {
    inst.finite_d()
        .ok_or_else(|| Error::contract("the hull LP needs finite bounds; apply cap_unbounded first"))
}

pub(crate) fn build_for(inst: &KnapsackInstance, gamma: u64) -> Result<DisjunctiveLp> {
    finite(inst)?;
    let n = inst.n();
    let guesses: Vec<Guess> = guesses_of(inst, gamma)?.collect();
    if guesses.is_empty() {
        return Err(Error::Infeasible("no admissible guess".into()));
    }
    let residuals = guesses
        .iter()
        .map(|g| residual_of(inst, g, gamma))
        .collect::<Result<Vec<_>>>()?;

    let (sense, rel) = match inst.sense() {
        Sense::Packing => (ObjSense::Max, Relation::Le),
        Sense::Covering => (ObjSense::Min, Relation::Ge),
    };
    let mut lp = LpProblem::new(sense);
    for i in 0..n {
        lp.add_var(format!("y{i}"), Rational::zero(), None, inst.c()[i].clone());
    }
    for t in 0..guesses.len() {
        for i in 0..n {
            lp.add_var(format!("x{i}_g{t}"), Rational::zero(), None, Rational::zero());
        }
        for i in 0..n {
            lp.add_var(format!("y{i}_g{t}"), Rational::zero(), None, Rational::zero());
        }
        lp.add_var(format!("lambda_g{t}"), Rational::zero(), None, Rational::zero());
    }
    let out = DisjunctiveLp {
        guesses,
        residuals,
        lp,
        n,
    };
    let mut lp = out.lp.clone();
    let minus_one = -Rational::one();

    for i in 0..n {
        let mut coeffs = vec![(out.y(i), Rational::one())];
        coeffs.extend((0..out.guesses.len()).map(|t| (out.y_of(t, i), minus_one.clone())));
        lp.add_row(coeffs, Relation::Eq, Rational::zero());
    }
    lp.add_row(
        (0..out.guesses.len()).map(|t| (out.lambda(t), Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for (t, (g, res)) in out.guesses.iter().zip(&out.residuals).enumerate() {
        let lam = out.lambda(t);
        for i in 0..n {
            lp.add_row(
                vec![
                    (out.y_of(t, i), Rational::one()),
                    (out.x_of(t, i), minus_one.clone()),
                    (lam, -int(g.g[i])),
                ],
                Relation::Eq,
                Rational::zero(),
            );
        }
        for i in 0..n {
            let dg = res.d_g[i].finite().expect("finite residual bounds");
            lp.add_row(
                vec![(out.x_of(t, i), Rational::one()), (lam, -int(dg))],
                Relation::Le,
                Rational::zero(),
            );
        }
        for (row, bg) in inst.a().iter().zip(&res.b_g) {
            let mut coeffs: Vec<(usize, Rational)> =
                row.iter().enumerate().map(|(i, &w)| (out.x_of(t, i), int(w))).collect();
            coeffs.push((lam, -int(*bg)));
            lp.add_row(coeffs, rel, Rational::zero());
        }
    }
    Ok(DisjunctiveLp { lp, ..out })
}

/// Builds the hull LP over every valid guess at this `gamma`.
pub fn build_disjunctive(inst: &NormalizedInstance, gamma: u64) -> Result<DisjunctiveLp> {
    build_for(&inst.base, gamma)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveSolution {
    pub gamma: u64,
    pub value: Rational,
    pub y: Vec<Rational>,
    pub active_guess: Guess,
    /// The residual part `x^{g*}` of the active block.
    pub x_active: Vec<Rational>,
    pub lambda: Vec<Rational>,
    pub num_guesses: usize,
    pub lp_vars: usize,
    pub lp_rows: usize,
    /// Set when the returned extreme point did not put all weight on one guess
    /// and the answer was recovered guess by guess instead.
    pub fallback_used: bool,
}

impl DisjunctiveSolution {
    /// Report object; guess vectors are given in `inst`'s original item order.
    pub fn report(&self, inst: &NormalizedInstance, rounded: &IntegralSolution) -> Value {
        json!({
            "gamma": self.gamma,
            "num_guesses": self.num_guesses,
            "lp_vars": self.lp_vars,
            "lp_rows": self.lp_rows,
            "lp_value": render(&self.value),
            "active_guess": inst.to_original(&self.active_guess.g),
            "rounded_value": render(&rounded.value),
            "fallback_used": self.fallback_used,
        })
    }
}

/// The factor `1 - k/gamma` (packing) or `1 + k/gamma` (covering).
pub fn gap_factor(sense: Sense, k: usize, gamma: u64) -> Option<Rational> {
    if gamma == 0 {
        return None;
    }
    let q = Rational::new((k as u64).into(), gamma.into());
    Some(match sense {
        Sense::Packing => Rational::one() - q,
        Sense::Covering => Rational::one() + q,
    })
}

/// Checks `c·rounded >= (1 - k/gamma)·fractional` (packing) or
/// `c·rounded <= (1 + k/gamma)·fractional` (covering).
pub fn check_gap(sense: Sense, k: usize, gamma: u64, integral: &Rational, fractional: &Rational) -> bool {
    match gap_factor(sense, k, gamma) {
        None => true,
        Some(f) => match sense {
            Sense::Packing => *integral >= f * fractional,
            Sense::Covering => *integral <= f * fractional,
        },
    }
}

pub(crate) fn solve_and_round_for(
    inst: &KnapsackInstance,
    gamma: u64,
) -> Result<(DisjunctiveSolution, IntegralSolution)> {
    let dlp = build_for(inst, gamma)?;
    let sol = solve_lp(&dlp.lp)?.into_result("hull LP")?;
    let n = inst.n();
    let lambda: Vec<Rational> = (0..dlp.guesses.len()).map(|t| sol.x[dlp.lambda(t)].clone()).collect();
    let y: Vec<Rational> = sol.x[..n].to_vec();

    let ones: Vec<usize> = (0..lambda.len()).filter(|&t| lambda[t].is_one()).collect();
    let integral_lambda = ones.len() == 1 && lambda.iter().all(|l| l.is_zero() || l.is_one());

    let (active, x_active, y, value, fallback_used) = if integral_lambda {
        let t = ones[0];
        let x_active: Vec<Rational> = (0..n).map(|i| sol.x[dlp.x_of(t, i)].clone()).collect();
        let shifted: Vec<Rational> = x_active.iter().zip(&dlp.guesses[t].g).map(|(x, &g)| x + int(g)).collect();
        if shifted != y {
            return Err(Error::InvariantViolation("master point differs from the active block".into()));
        }
        (t, x_active, y, sol.value.clone(), false)
    } else {
        // Recover an optimal vertex by solving each member separately.
        let traces = map_guesses(inst, gamma, false, |g| crate::filtering::solve_guess(inst, g, gamma))?;
        let mut best = 0;
        for (t, tr) in traces.iter().enumerate() {
            if inst.better(&tr.shifted_value, &traces[best].shifted_value) {
                best = t;
            }
        }
        if traces[best].shifted_value != sol.value {
            return Err(Error::InvariantViolation(format!(
                "hull optimum {} differs from best member {}",
                render(&sol.value),
                render(&traces[best].shifted_value)
            )));
        }
        let rinst = dlp.residuals[best].instance(inst)?;
        let lp = solve_lp(&crate::exactlp::knapsack_relaxation(&rinst))?.into_result("residual relaxation")?;
        let y = lp.x.iter().zip(&dlp.guesses[best].g).map(|(x, &g)| x + int(g)).collect();
        (best, lp.x, y, sol.value.clone(), true)
    };

    let g = &dlp.guesses[active];
    let rounded = if dlp.residuals[active].full {
        let rinst = dlp.residuals[active].instance(inst)?;
        let (r, _) = round_point(&rinst, &x_active)?;
        let x: Vec<u64> = g.g.iter().zip(&r.x).map(|(a, b)| a + b).collect();
        inst.solution(x).map_err(|e| Error::InvariantViolation(e.to_string()))?
    } else {
        if !y.iter().all(is_integral) {
            return Err(Error::InvariantViolation("non-full guess left a fractional point".into()));
        }
        inst.solution(crate::rounding::round_down(&y))
            .map_err(|e| Error::InvariantViolation(e.to_string()))?
    };
    if !check_gap(inst.sense(), inst.k(), gamma, &rounded.value, &value) {
        return Err(Error::InvariantViolation(format!(
            "rounded value {} misses the gap bound against {}",
            render(&rounded.value),
            render(&value)
        )));
    }
    let solution = DisjunctiveSolution {
        gamma,
        value,
        y,
        active_guess: g.clone(),
        x_active,
        lambda,
        num_guesses: dlp.guesses.len(),
        lp_vars: dlp.num_vars(),
        lp_rows: dlp.num_rows(),
        fallback_used,
    };
    Ok((solution, rounded))
}

/// Solves the hull LP to an extreme point, reads off the active guess and
/// rounds its residual part. The result is in normalized item order.
pub fn solve_and_round(inst: &NormalizedInstance, gamma: u64) -> Result<(DisjunctiveSolution, IntegralSolution)> {
    solve_and_round_for(&inst.base, gamma)
}

pub(crate) fn value_by_decomposition_for(inst: &KnapsackInstance, gamma: u64, parallel: bool) -> Result<Rational> {
    finite(inst)?;
    let values = map_guesses(inst, gamma, parallel, |g| solve_guess(inst, g, gamma).map(|t| t.shifted_value))?;
    values
        .into_iter()
        .reduce(|a, b| if inst.better(&b, &a) { b } else { a })
        .ok_or_else(|| Error::Infeasible("no admissible guess".into()))
}

/// Best over guesses of `c·g` plus the residual LP optimum.
pub fn value_by_decomposition(inst: &NormalizedInstance, gamma: u64, parallel: bool) -> Result<Rational> {
    value_by_decomposition_for(&inst.base, gamma, parallel)
}

pub(crate) fn check_membership_for(inst: &KnapsackInstance, gamma: u64, point: &[Rational]) -> Result<bool> {
    if point.len() != inst.n() {
        return Err(Error::contract("point dimension mismatch"));
    }
    if point.iter().any(|v| v.is_negative()) {
        return Ok(false);
    }
    let mut dlp = match build_for(inst, gamma) {
        Ok(d) => d,
        Err(Error::Infeasible(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    for (i, v) in point.iter().enumerate() {
        dlp.lp.lower[i] = v.clone();
        dlp.lp.upper[i] = Some(v.clone());
        dlp.lp.objective[i] = Rational::zero();
    }
    Ok(solve_lp(&dlp.lp)?.status == LpStatus::Optimal)
}

/// Whether `point` lies in the projection of the hull LP onto `y`.
pub fn check_membership(inst: &NormalizedInstance, gamma: u64, point: &[Rational]) -> Result<bool> {
    check_membership_for(&inst.base, gamma, point)
}
