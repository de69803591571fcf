//! Cost-independent extended LP for packing. Each member of the hull is
//! indexed by a k-tuple of guesses, one per constraint, of the `gamma`
//! biggest copies (by that constraint's weights) in a solution. Extreme
//! points are repaired by rounding up and then deleting a cheapest multiset of
//! at most k copies per violated constraint.
//!
//! Everything here works in the instance's own item order: the constraint
//! system must not move when only `c` changes, and normalizing would permute
//! the variables by cost.

use itertools::Itertools;
use num::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlp::{count_fractional, solve_lp, LpProblem, LpStatus, ObjSense, PointCheck, Relation};
use crate::filtering::gamma_for;
use crate::instance::{IntegralSolution, KnapsackInstance, Sense};
use crate::rational::{ceil_u64, dot, int, render, Rational};

/// `j ≺_i l` iff `(A_ij, j) < (A_il, l)`.
fn key(inst: &KnapsackInstance, i: usize, j: usize) -> (u64, usize) {
    (inst.a()[i][j], j)
}

/// One guess per constraint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GuessTuple {
    pub gs: Vec<Vec<u64>>,
    /// `≺_i`-smallest item in the support of `g^i`, for full `g^i`.
    pub pivots: Vec<Option<usize>>,
    /// `gamma > 0` and every `g^i` has `‖g^i‖₁ = gamma`. Otherwise all `g^i`
    /// coincide.
    pub full: bool,
}

impl GuessTuple {
    fn from_parts(inst: &KnapsackInstance, gs: Vec<Vec<u64>>, gamma: u64) -> Self {
        let full = gamma > 0 && gs.iter().all(|g| g.iter().sum::<u64>() == gamma);
        let pivots = gs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if g.iter().sum::<u64>() < gamma {
                    return None;
                }
                (0..g.len()).filter(|&j| g[j] > 0).min_by_key(|&j| key(inst, i, j))
            })
            .collect();
        GuessTuple { gs, pivots, full }
    }

    /// Whether item `j` sits strictly above the pivot of constraint `i`.
    fn above_pivot(&self, inst: &KnapsackInstance, i: usize, j: usize) -> bool {
        self.pivots[i].is_some_and(|p| key(inst, i, j) > key(inst, i, p))
    }
}

/// Box `lo <= y <= up` of a tuple's polytope; the knapsack rows `Ay <= b` are
/// shared by every member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuplePolytope {
    pub tuple: GuessTuple,
    pub lo: Vec<u64>,
    pub up: Vec<u64>,
}

impl TuplePolytope {
    /// The member polytope as a standalone LP with objective `c`.
    pub fn lp(&self, inst: &KnapsackInstance) -> LpProblem {
        let mut lp = LpProblem::new(ObjSense::Max);
        for j in 0..inst.n() {
            lp.add_var(format!("y{j}"), int(self.lo[j]), Some(int(self.up[j])), inst.c()[j].clone());
        }
        for (row, &bi) in inst.a().iter().zip(inst.b()) {
            lp.add_row(row.iter().enumerate().map(|(j, &w)| (j, int(w))).collect(), Relation::Le, int(bi));
        }
        lp
    }
}

fn require_packing(inst: &KnapsackInstance) -> Result<Vec<u64>> {
    if inst.sense() != Sense::Packing {
        return Err(Error::contract("the cost-free formulation has no covering analogue"));
    }
    inst.finite_d()
        .ok_or_else(|| Error::contract("the cost-free formulation needs finite bounds; apply cap_unbounded first"))
}

fn consistent(inst: &KnapsackInstance, t: &GuessTuple, d: &[u64]) -> bool {
    let n = inst.n();
    if !t.full && t.gs.iter().any(|g| *g != t.gs[0]) {
        return false;
    }
    let m: Vec<u64> = (0..n).map(|j| t.gs.iter().map(|g| g[j]).max().unwrap_or(0)).collect();
    if m.iter().zip(d).any(|(a, b)| a > b) || !inst.is_feasible(&m) {
        return false;
    }
    (0..t.gs.len()).all(|i| (0..n).all(|l| !t.above_pivot(inst, i, l) || t.gs.iter().all(|g| g[l] <= t.gs[i][l])))
}

/// Every tuple of per-constraint guesses whose polytope is not trivially
/// empty, in lexicographic order.
///
/// A tuple is dropped only when its polytope is provably empty: mixed full and
/// partial guesses, differing partial guesses, an infeasible componentwise
/// maximum, or a fixed coordinate below another constraint's guess.
pub fn enumerate_tuples(inst: &KnapsackInstance, gamma: u64) -> Result<Vec<GuessTuple>> {
    let d = require_packing(inst)?;
    let n = inst.n();
    let singles: Vec<Vec<u64>> = d
        .iter()
        .map(|&dj| 0..=dj.min(gamma))
        .multi_cartesian_product()
        .filter(|g| g.len() == n && g.iter().sum::<u64>() <= gamma && inst.is_feasible(g))
        .collect();
    let singles = if singles.is_empty() { vec![vec![0; n]] } else { singles };
    Ok(std::iter::repeat(singles)
        .take(inst.k())
        .multi_cartesian_product()
        .map(|gs| GuessTuple::from_parts(inst, gs, gamma))
        .filter(|t| consistent(inst, t, &d))
        .collect())
}

/// The box of a tuple's polytope: `y >= g^i` and `y_j = g^i_j` above each
/// pivot for full tuples, `y = g` otherwise.
pub fn tuple_polytope(inst: &KnapsackInstance, t: &GuessTuple) -> Result<TuplePolytope> {
    let d = require_packing(inst)?;
    let n = inst.n();
    if !t.full {
        let g = t.gs.first().cloned().unwrap_or_else(|| vec![0; n]);
        return Ok(TuplePolytope { tuple: t.clone(), lo: g.clone(), up: g });
    }
    let mut lo = vec![0u64; n];
    let mut up = d;
    for (i, g) in t.gs.iter().enumerate() {
        for j in 0..n {
            lo[j] = lo[j].max(g[j]);
            if t.above_pivot(inst, i, j) {
                up[j] = up[j].min(g[j]);
            }
        }
    }
    Ok(TuplePolytope { tuple: t.clone(), lo, up })
}

/// The true tuple of an integral point: for each constraint, its `gamma`
/// biggest copies under `≺_i`, or all of `x` when it has fewer.
pub fn true_tuple(inst: &KnapsackInstance, x: &[u64], gamma: u64) -> GuessTuple {
    let n = x.len();
    let gs = (0..inst.k())
        .map(|i| {
            let mut g = vec![0u64; n];
            let mut left = gamma;
            for j in (0..n).sorted_by_key(|&j| key(inst, i, j)).rev() {
                let take = x[j].min(left);
                g[j] = take;
                left -= take;
            }
            g
        })
        .collect();
    GuessTuple::from_parts(inst, gs, gamma)
}

/// Hull LP over all tuple polytopes. Layout: `y` (n), then per tuple `y^T`
/// (n) and `lambda^T`. Rows: `y - sum_T y^T = 0`, `sum_T lambda^T = 1`, and
/// per tuple `A y^T - lambda^T b <= 0` followed by the scaled box rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostfreeLp {
    pub tuples: Vec<TuplePolytope>,
    pub lp: LpProblem,
    n: usize,
}

impl CostfreeLp {
    pub fn y_of(&self, t: usize, j: usize) -> usize {
        self.n + t * (self.n + 1) + j
    }

    pub fn lambda(&self, t: usize) -> usize {
        self.n + t * (self.n + 1) + self.n
    }

    /// Serialized rows and bounds; a function of `(A, b, d, gamma)` only.
    pub fn constraints_text(&self) -> String {
        self.lp.constraints_text()
    }
}

pub fn build_costfree_lp(inst: &KnapsackInstance, gamma: u64) -> Result<CostfreeLp> {
    let n = inst.n();
    let tuples = enumerate_tuples(inst, gamma)?
        .iter()
        .map(|t| tuple_polytope(inst, t))
        .collect::<Result<Vec<_>>>()?;
    let mut lp = LpProblem::new(ObjSense::Max);
    for j in 0..n {
        lp.add_var(format!("y{j}"), Rational::zero(), None, inst.c()[j].clone());
    }
    for t in 0..tuples.len() {
        for j in 0..n {
            lp.add_var(format!("y{j}_t{t}"), Rational::zero(), None, Rational::zero());
        }
        lp.add_var(format!("lambda_t{t}"), Rational::zero(), None, Rational::zero());
    }
    let mut out = CostfreeLp { tuples, lp, n };
    let mut lp = out.lp.clone();
    let minus_one = -Rational::one();
    for j in 0..n {
        let mut coeffs = vec![(j, Rational::one())];
        coeffs.extend((0..out.tuples.len()).map(|t| (out.y_of(t, j), minus_one.clone())));
        lp.add_row(coeffs, Relation::Eq, Rational::zero());
    }
    lp.add_row(
        (0..out.tuples.len()).map(|t| (out.lambda(t), Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for (t, poly) in out.tuples.iter().enumerate() {
        let lam = out.lambda(t);
        for (row, &bi) in inst.a().iter().zip(inst.b()) {
            let mut coeffs: Vec<(usize, Rational)> =
                row.iter().enumerate().map(|(j, &w)| (out.y_of(t, j), int(w))).collect();
            coeffs.push((lam, -int(bi)));
            lp.add_row(coeffs, Relation::Le, Rational::zero());
        }
        for j in 0..n {
            let y = out.y_of(t, j);
            if poly.lo[j] == poly.up[j] {
                lp.add_row(vec![(y, Rational::one()), (lam, -int(poly.lo[j]))], Relation::Eq, Rational::zero());
                continue;
            }
            if poly.lo[j] > 0 {
                lp.add_row(vec![(y, Rational::one()), (lam, -int(poly.lo[j]))], Relation::Ge, Rational::zero());
            }
            lp.add_row(vec![(y, Rational::one()), (lam, -int(poly.up[j]))], Relation::Le, Rational::zero());
        }
    }
    out.lp = lp;
    Ok(out)
}

/// How many copies a deletion set may remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeletionRule {
    AtMostK,
    /// Exactly `k` copies, or all of `ceil(y)` when it holds fewer.
    ExactlyK,
}

/// Cheapest multiset `D <= y_hat` allowed by `rule` with `A_i (y_hat - D) <= b_i`.
/// Ties go to the lexicographically smallest sorted list of removed indices.
fn cheapest_deletion(inst: &KnapsackInstance, i: usize, y_hat: &[u64], rule: DeletionRule) -> Option<Vec<u64>> {
    let k = inst.k();
    let total: u64 = y_hat.iter().sum();
    let sizes = match rule {
        DeletionRule::AtMostK => 0..=k,
        DeletionRule::ExactlyK => {
            let s = k.min(total as usize);
            s..=s
        }
    };
    let support: Vec<usize> = (0..y_hat.len()).filter(|&j| y_hat[j] > 0).collect();
    let row = &inst.a()[i];
    let load: u128 = row.iter().zip(y_hat).map(|(&a, &y)| a as u128 * y as u128).sum();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for size in sizes {
        for removed in support.iter().copied().combinations_with_replacement(size) {
            let mut d = vec![0u64; y_hat.len()];
            removed.iter().for_each(|&j| d[j] += 1);
            if d.iter().zip(y_hat).any(|(a, b)| a > b) {
                continue;
            }
            let freed: u128 = removed.iter().map(|&j| row[j] as u128).sum();
            if load - freed > inst.b()[i] as u128 {
                continue;
            }
            let cost: Rational = removed.iter().map(|&j| inst.c()[j].clone()).sum();
            if best.as_ref().map_or(true, |(bc, bl)| (&cost, &removed) < (bc, bl)) {
                best = Some((cost, removed));
            }
        }
    }
    best.map(|(_, removed)| {
        let mut d = vec![0u64; y_hat.len()];
        removed.iter().for_each(|&j| d[j] += 1);
        d
    })
}

fn check_in_polytope(inst: &KnapsackInstance, poly: &TuplePolytope, y: &[Rational]) -> Result<()> {
    if y.len() != inst.n() {
        return Err(Error::contract("point dimension mismatch"));
    }
    if let PointCheck::Violated(v) = poly.lp(inst).check_point(y) {
        return Err(Error::contract(format!("point is not in the tuple polytope: {v:?}")));
    }
    if count_fractional(y) > inst.k() {
        return Err(Error::contract(format!(
            "{} fractional coordinates; an extreme point has at most {}",
            count_fractional(y),
            inst.k()
        )));
    }
    Ok(())
}

/// Repair under an explicit deletion rule.
pub fn repair_with(
    inst: &KnapsackInstance,
    poly: &TuplePolytope,
    y: &[Rational],
    rule: DeletionRule,
) -> Result<IntegralSolution> {
    check_in_polytope(inst, poly, y)?;
    let y_hat: Vec<u64> = y.iter().map(|v| ceil_u64(v).expect("non-negative")).collect();
    let usage = inst.usage(&y_hat);
    let mut removed = vec![0u64; y_hat.len()];
    for i in 0..inst.k() {
        if usage[i] <= inst.b()[i] as u128 {
            continue;
        }
        let d = cheapest_deletion(inst, i, &y_hat, rule)
            .ok_or_else(|| Error::InvariantViolation(format!("no deletion set restores constraint {i}")))?;
        removed.iter_mut().zip(&d).for_each(|(r, &v)| *r = (*r).max(v));
    }
    let z = y_hat.iter().zip(&removed).map(|(a, b)| a - b).collect();
    inst.solution(z).map_err(|e| Error::InvariantViolation(format!("repair broke feasibility: {e}")))
}

/// Ceiling-then-delete with at most `k` copies per violated constraint.
pub fn repair(inst: &KnapsackInstance, poly: &TuplePolytope, y: &[Rational]) -> Result<IntegralSolution> {
    repair_with(inst, poly, y, DeletionRule::AtMostK)
}

/// `1 - k²/gamma`.
pub fn repair_factor(k: usize, gamma: u64) -> Rational {
    let k = k as u64;
    Rational::one() - Rational::new((k * k).into(), gamma.max(1).into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostfreeOutcome {
    pub gamma: u64,
    pub value: Rational,
    pub y: Vec<Rational>,
    pub active: TuplePolytope,
    pub num_tuples: usize,
    pub lp_vars: usize,
    pub lp_rows: usize,
    pub fallback_used: bool,
    pub solution: IntegralSolution,
}

impl CostfreeOutcome {
    pub fn report(&self) -> Value {
        json!({
            "gamma": self.gamma,
            "num_guesses": self.num_tuples,
            "lp_vars": self.lp_vars,
            "lp_rows": self.lp_rows,
            "lp_value": render(&self.value),
            "active_guess": self.active.tuple.gs,
            "rounded_value": render(&self.solution.value),
            "fallback_used": self.fallback_used,
            "c_independent": true,
            "num_tuples": self.num_tuples,
        })
    }
}

/// Optimum of each tuple polytope, `None` where it is empty.
pub fn tuple_optima(inst: &KnapsackInstance, gamma: u64, parallel: bool) -> Result<Vec<Option<(Rational, Vec<Rational>)>>> {
    let tuples = enumerate_tuples(inst, gamma)?;
    let solve = |t: &GuessTuple| -> Result<Option<(Rational, Vec<Rational>)>> {
        let sol = solve_lp(&tuple_polytope(inst, t)?.lp(inst))?;
        Ok(match sol.status {
            LpStatus::Optimal => Some((sol.value, sol.x)),
            LpStatus::Infeasible => None,
            LpStatus::Unbounded => return Err(Error::InvariantViolation("bounded tuple polytope is unbounded".into())),
        })
    };
    if parallel {
        tuples.par_iter().map(solve).collect()
    } else {
        tuples.iter().map(solve).collect()
    }
}

/// Best over tuples of the tuple-polytope optimum; ties go to the first tuple.
pub fn value_by_tuples(inst: &KnapsackInstance, gamma: u64, parallel: bool) -> Result<Rational> {
    tuple_optima(inst, gamma, parallel)?
        .into_iter()
        .flatten()
        .map(|(v, _)| v)
        .reduce(|a, b| if b > a { b } else { a })
        .ok_or_else(|| Error::InvariantViolation("every tuple polytope is empty".into()))
}

/// Solves the hull LP at `gamma` and repairs its optimal extreme point.
pub fn costfree_solve_gamma(inst: &KnapsackInstance, gamma: u64) -> Result<CostfreeOutcome> {
    let hull = build_costfree_lp(inst, gamma)?;
    let sol = solve_lp(&hull.lp)?.into_result("cost-free hull LP")?;
    let n = inst.n();
    let lambda: Vec<&Rational> = (0..hull.tuples.len()).map(|t| &sol.x[hull.lambda(t)]).collect();
    let ones: Vec<usize> = (0..lambda.len()).filter(|&t| lambda[t].is_one()).collect();
    let integral = ones.len() == 1 && lambda.iter().all(|l| l.is_zero() || l.is_one());
    let y: Vec<Rational> = sol.x[..n].to_vec();

    let (active, y, fallback_used) = if integral {
        let t = ones[0];
        let block: Vec<Rational> = (0..n).map(|j| sol.x[hull.y_of(t, j)].clone()).collect();
        if block != y {
            return Err(Error::InvariantViolation("master point differs from the active block".into()));
        }
        (t, y, false)
    } else {
        let optima = tuple_optima(inst, gamma, false)?;
        let mut best: Option<(usize, &Rational, &Vec<Rational>)> = None;
        for (t, o) in optima.iter().enumerate() {
            if let Some((v, x)) = o {
                if best.map_or(true, |(_, bv, _)| v > bv) {
                    best = Some((t, v, x));
                }
            }
        }
        let (t, v, x) = best.ok_or_else(|| Error::InvariantViolation("every tuple polytope is empty".into()))?;
        if *v != sol.value {
            return Err(Error::InvariantViolation(format!(
                "hull optimum {} differs from best tuple {}",
                render(&sol.value),
                render(v)
            )));
        }
        (t, x.clone(), true)
    };
    let poly = hull.tuples[active].clone();
    let solution = repair(inst, &poly, &y)?;
    let bound = repair_factor(inst.k(), gamma) * &sol.value;
    if solution.value < bound {
        return Err(Error::InvariantViolation(format!(
            "repaired value {} is below {}",
            render(&solution.value),
            render(&bound)
        )));
    }
    debug_assert_eq!(dot(inst.c(), &y), sol.value);
    Ok(CostfreeOutcome {
        gamma,
        value: sol.value,
        y,
        active: poly,
        num_tuples: hull.tuples.len(),
        lp_vars: hull.lp.num_vars(),
        lp_rows: hull.lp.num_rows(),
        fallback_used,
        solution,
    })
}

/// `gamma = ⌈k²/eps⌉`, then [`costfree_solve_gamma`].
pub fn costfree_solve(inst: &KnapsackInstance, eps: &Rational) -> Result<CostfreeOutcome> {
    let k = inst.k() as u64;
    costfree_solve_gamma(inst, gamma_for(k * k, eps)?)
}

/// Whether `point` lies in the projection of the cost-free hull LP.
pub fn costfree_membership(inst: &KnapsackInstance, gamma: u64, point: &[Rational]) -> Result<bool> {
    if point.len() != inst.n() {
        return Err(Error::contract("point dimension mismatch"));
    }
    let mut hull = build_costfree_lp(inst, gamma)?;
    for (j, v) in point.iter().enumerate() {
        hull.lp.lower[j] = v.clone();
        hull.lp.upper[j] = Some(v.clone());
        hull.lp.objective[j] = Rational::zero();
    }
    Ok(solve_lp(&hull.lp)?.status == LpStatus::Optimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Bound;
    use crate::oracle::{brute_force, lp_by_vertices, DEFAULT_BUDGET};
    use crate::rational::ratio;

    fn running() -> KnapsackInstance {
        KnapsackInstance::new(Sense::Packing, vec![vec![2, 3]], vec![4], vec![int(1), int(1)], vec![Bound::Finite(1); 2])
            .unwrap()
    }

    fn tuple(inst: &KnapsackInstance, gs: Vec<Vec<u64>>, gamma: u64) -> GuessTuple {
        GuessTuple::from_parts(inst, gs, gamma)
    }

    #[test]
    fn tuples_of_the_running_example() {
        let inst = running();
        let ts: Vec<Vec<Vec<u64>>> = enumerate_tuples(&inst, 1).unwrap().into_iter().map(|t| t.gs).collect();
        assert_eq!(ts, vec![vec![vec![0, 0]], vec![vec![0, 1]], vec![vec![1, 0]]]);
        let ts = enumerate_tuples(&inst, 0).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].gs, vec![vec![0, 0]]);
    }

    #[test]
    fn two_constraints_one_item() {
        let inst = KnapsackInstance::new(Sense::Packing, vec![vec![1], vec![2]], vec![5, 5], vec![int(1)], vec![Bound::Finite(1)])
            .unwrap();
        let ts: Vec<Vec<Vec<u64>>> = enumerate_tuples(&inst, 1).unwrap().into_iter().map(|t| t.gs).collect();
        assert_eq!(ts, vec![vec![vec![0], vec![0]], vec![vec![1], vec![1]]]);
    }

    #[test]
    fn polytopes_of_the_running_example() {
        let inst = running();
        let p = tuple_polytope(&inst, &tuple(&inst, vec![vec![0, 1]], 1)).unwrap();
        assert_eq!((p.lo.clone(), p.up.clone()), (vec![0, 1], vec![1, 1]));
        let (v, x) = lp_by_vertices(&p.lp(&inst)).unwrap();
        assert_eq!((v, x), (ratio(3, 2), vec![ratio(1, 2), int(1)]));

        let p = tuple_polytope(&inst, &tuple(&inst, vec![vec![1, 0]], 1)).unwrap();
        assert_eq!((p.lo.clone(), p.up.clone()), (vec![1, 0], vec![1, 0]));
        let p = tuple_polytope(&inst, &tuple(&inst, vec![vec![0, 0]], 1)).unwrap();
        assert_eq!((p.lo, p.up), (vec![0, 0], vec![0, 0]));
    }

    #[test]
    fn hull_of_the_running_example() {
        let inst = running();
        let out = costfree_solve(&inst, &int(1)).unwrap();
        assert_eq!(out.gamma, 1);
        assert_eq!(out.value, ratio(3, 2));
        assert_eq!(out.active.tuple.gs, vec![vec![0, 1]]);
        assert_eq!(out.solution.x, vec![0, 1]);
        assert_eq!(out.solution.value, int(1));
        assert!(!out.fallback_used);
        assert_eq!(value_by_tuples(&inst, 1, false).unwrap(), ratio(3, 2));
        assert_eq!(costfree_solve_gamma(&inst, 0).unwrap().value, int(0));
    }

    #[test]
    fn constraints_ignore_costs() {
        let inst = running();
        let other = inst.with_costs(vec![int(5), int(1)]).unwrap();
        let a = build_costfree_lp(&inst, 2).unwrap();
        let b = build_costfree_lp(&other, 2).unwrap();
        assert_eq!(a.constraints_text(), b.constraints_text());
        assert_ne!(a.lp.objective, b.lp.objective);
    }

    #[test]
    fn repair_examples() {
        let inst = running();
        let p = tuple_polytope(&inst, &tuple(&inst, vec![vec![0, 1]], 1)).unwrap();
        let z = repair(&inst, &p, &[ratio(1, 2), int(1)]).unwrap();
        assert_eq!((z.x, z.value), (vec![0, 1], int(1)));
        let z = repair(&inst, &p, &[int(0), int(1)]).unwrap();
        assert_eq!(z.x, vec![0, 1]);
        assert!(matches!(repair(&inst, &p, &[int(1), int(1)]), Err(Error::ContractViolation(_))));
        let z = repair_with(&inst, &p, &[ratio(1, 2), int(1)], DeletionRule::ExactlyK).unwrap();
        assert_eq!(z.x, vec![0, 1]);
    }

    #[test]
    fn repair_without_violation_keeps_the_ceiling() {
        let inst = KnapsackInstance::new(Sense::Packing, vec![vec![1, 1]], vec![3], vec![int(1), int(2)], vec![Bound::Finite(2); 2])
            .unwrap();
        let p = tuple_polytope(&inst, &tuple(&inst, vec![vec![0, 0]], 3)).unwrap();
        assert_eq!(p.up, vec![0, 0]);
        let full = tuple_polytope(&inst, &tuple(&inst, vec![vec![1, 2]], 3)).unwrap();
        let z = repair(&inst, &full, &[int(1), int(2)]).unwrap();
        assert_eq!(z.x, vec![1, 2]);
    }

    #[test]
    fn true_tuple_lifts_every_feasible_point() {
        let inst = KnapsackInstance::new(
            Sense::Packing,
            vec![vec![3, 1, 2], vec![1, 2, 2]],
            vec![6, 5],
            vec![int(2), int(3), int(1)],
            vec![Bound::Finite(2); 3],
        )
        .unwrap();
        for gamma in 1..=3 {
            let tuples = enumerate_tuples(&inst, gamma).unwrap();
            for x in (0..3).map(|_| 0..=2u64).multi_cartesian_product() {
                if !inst.is_feasible(&x) {
                    continue;
                }
                let t = true_tuple(&inst, &x, gamma);
                let poly = tuple_polytope(&inst, &t).unwrap();
                assert!(tuples.contains(&t), "{x:?} {gamma}");
                let y: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
                assert!(poly.lp(&inst).check_point(&y).is_feasible());
                let others = tuples
                    .iter()
                    .filter(|o| tuple_polytope(&inst, o).unwrap().lp(&inst).check_point(&y).is_feasible())
                    .count();
                assert_eq!(others, 1, "{x:?} {gamma}");
            }
        }
    }

    #[test]
    fn rejects_covering() {
        let inst = KnapsackInstance::new(Sense::Covering, vec![vec![2, 3]], vec![4], vec![int(1), int(1)], vec![Bound::Finite(1); 2])
            .unwrap();
        assert!(matches!(costfree_solve(&inst, &int(1)), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn small_instance_meets_the_guarantee() {
        let inst = KnapsackInstance::new(
            Sense::Packing,
            vec![vec![4, 2, 3, 1], vec![1, 3, 2, 2]],
            vec![7, 6],
            vec![int(3), int(2), int(4), int(1)],
            vec![Bound::Finite(1); 4],
        )
        .unwrap();
        let out = costfree_solve(&inst, &ratio(1, 2)).unwrap();
        assert_eq!(out.gamma, 8);
        let opt = brute_force(&inst, DEFAULT_BUDGET).unwrap().value;
        assert!(out.solution.value <= opt);
        assert!(out.solution.value >= repair_factor(2, 8) * &out.value);
        assert_eq!(out.value, value_by_tuples(&inst, 8, true).unwrap());
    }
}
