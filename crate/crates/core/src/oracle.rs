//! Ground truth: exhaustive enumeration, pseudo-polynomial dynamic programming
//! and vertex enumeration for small LPs. None of these share code with the
//! simplex solver or the relaxation pipelines they are used to check.

use itertools::Itertools;
use num::Zero;

use crate::error::{Error, Result};
use crate::exactlp::{LpProblem, ObjSense};
use crate::instance::{KnapsackInstance, Sense};
use crate::rational::{int, Rational};

/// Default cap on enumerated points or DP table cells.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: Rational,
    pub x: Vec<u64>,
    /// Points enumerated or DP cells touched.
    pub states: u128,
}

fn finite_bounds(inst: &KnapsackInstance) -> Result<Vec<u64>> {
    inst.finite_d()
        .ok_or_else(|| Error::contract("oracle needs finite bounds; apply cap_unbounded first"))
}

/// Exhaustive search over the box `0 <= x <= d`. Among optimal points the
/// lexicographically smallest is returned.
pub fn brute_force(inst: &KnapsackInstance, budget: u128) -> Result<OracleResult> {
    let d = finite_bounds(inst)?;
    let size = d
        .iter()
        .try_fold(1u128, |acc, &di| acc.checked_mul(di as u128 + 1))
        .unwrap_or(u128::MAX);
    if size > budget {
        return Err(Error::BudgetExceeded { what: "brute force", size, budget });
    }
    let n = inst.n();
    let mut x = vec![0u64; n];
    let mut best: Option<(Rational, Vec<u64>)> = None;
    loop {
        if inst.is_feasible(&x) {
            let v = inst.value(&x);
            if best.as_ref().map_or(true, |(bv, _)| inst.better(&v, bv)) {
                best = Some((v, x.clone()));
            }
        }
        // Odometer increment, last coordinate fastest.
        let mut i = n;
        loop {
            if i == 0 {
                let (value, x) = best.ok_or_else(|| Error::Infeasible("no feasible integer point".into()))?;
                return Ok(OracleResult { value, x, states: size });
            }
            i -= 1;
            if x[i] < d[i] {
                x[i] += 1;
                break;
            }
            x[i] = 0;
        }
    }
}

/// Dynamic program over usage vectors `0 <= u <= b`. Covering usage is clamped
/// at `b` since coverage beyond the demand is worth nothing.
pub fn dp_solve(inst: &KnapsackInstance, budget: u128) -> Result<OracleResult> {
    let d = finite_bounds(inst)?;
    let k = inst.k();
    let n = inst.n();
    let radix: Vec<usize> = inst.b().iter().map(|&b| b as usize + 1).collect();
    let states = radix
        .iter()
        .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
        .unwrap_or(u128::MAX);
    let cells = states.saturating_mul(n as u128 + 1);
    if cells > budget {
        return Err(Error::BudgetExceeded { what: "dynamic programming", size: cells, budget });
    }
    let s = states as usize;
    let decode = |mut idx: usize| -> Vec<u64> {
        let mut u = vec![0u64; k];
        for j in 0..k {
            u[j] = (idx % radix[j]) as u64;
            idx /= radix[j];
        }
        u
    };
    let encode = |u: &[u64]| -> usize {
        let mut idx = 0usize;
        for j in (0..k).rev() {
            idx = idx * radix[j] + u[j] as usize;
        }
        idx
    };

    let mut table: Vec<Option<Rational>> = vec![None; s];
    table[0] = Some(Rational::zero());
    // choice[i][state] = (previous state, copies of item i)
    let mut choice: Vec<Vec<(u32, u32)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut next: Vec<Option<Rational>> = vec![None; s];
        let mut pick = vec![(0u32, 0u32); s];
        for (idx, val) in table.iter().enumerate() {
            let Some(val) = val else { continue };
            let u = decode(idx);
            let mut v = u.clone();
            for t in 0..=d[i] {
                if t > 0 {
                    let mut fits = true;
                    for j in 0..k {
                        v[j] += inst.a()[j][i];
                        if v[j] > inst.b()[j] {
                            match inst.sense() {
                                Sense::Packing => fits = false,
                                Sense::Covering => v[j] = inst.b()[j],
                            }
                        }
                    }
                    if !fits {
                        break;
                    }
                }
                let cand = val + &inst.c()[i] * int(t);
                let target = encode(&v);
                if next[target].as_ref().map_or(true, |cur| inst.better(&cand, cur)) {
                    next[target] = Some(cand);
                    pick[target] = (idx as u32, t as u32);
                }
                // Clamped covering states stop changing once every row is full.
                if inst.sense() == Sense::Covering && t > 0 && v == inst.b() {
                    break;
                }
            }
        }
        table = next;
        choice.push(pick);
    }

    let final_state = match inst.sense() {
        Sense::Packing => (0..s)
            .filter(|&i| table[i].is_some())
            .reduce(|a, b| if inst.better(table[b].as_ref().unwrap(), table[a].as_ref().unwrap()) { b } else { a }),
        Sense::Covering => {
            let full = encode(inst.b());
            table[full].is_some().then_some(full)
        }
    };
    let Some(mut state) = final_state else {
        return Err(Error::Infeasible("no feasible integer point".into()));
    };
    let value = table[state].clone().unwrap();
    let mut x = vec![0u64; n];
    for i in (0..n).rev() {
        let (prev, t) = choice[i][state];
        x[i] = t as u64;
        state = prev as usize;
    }
    Ok(OracleResult { value, x, states: cells })
}

/// Solves the square system `m · x = rhs` exactly; `None` if singular.
pub fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        rhs.swap(col, p);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
                let delta = &f * &rhs[col];
                rhs[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

/// Rank of a rational matrix.
pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for cc in c..cols {
                    let delta = &f * &m[r][cc];
                    m[i][cc] -= delta;
                }
            }
        }
        r += 1;
    }
    r
}

/// Every constraint of `p` written as a dense hyperplane `a·x = rhs`.
fn hyperplanes(p: &LpProblem) -> Vec<(Vec<Rational>, Rational)> {
    let n = p.num_vars();
    let mut out = Vec::new();
    for row in &p.rows {
        let mut a = vec![Rational::zero(); n];
        for (j, v) in &row.coeffs {
            a[*j] = v.clone();
        }
        out.push((a, row.rhs.clone()));
    }
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = int(1);
        out.push((e.clone(), p.lower[j].clone()));
        if let Some(u) = &p.upper[j] {
            out.push((e, u.clone()));
        }
    }
    out
}

/// All vertices of the feasible region, by solving every `n`-subset of
/// constraints as equalities. Exponential; only for tiny problems.
pub fn vertices(p: &LpProblem) -> Vec<Vec<Rational>> {
    let n = p.num_vars();
    let planes = hyperplanes(p);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    if n == 0 {
        if p.check_point(&[]).is_feasible() {
            out.push(Vec::new());
        }
        return out;
    }
    for subset in (0..planes.len()).combinations(n) {
        let m = subset.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs = subset.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(m, rhs) {
            if p.check_point(&x).is_feasible() && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

/// Optimum of a bounded LP over its vertices; `None` when infeasible.
pub fn lp_by_vertices(p: &LpProblem) -> Option<(Rational, Vec<Rational>)> {
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for v in vertices(p) {
        let val = p.objective_value(&v);
        let better = match &best {
            None => true,
            Some((bv, _)) => match p.sense {
                ObjSense::Max => val > *bv,
                ObjSense::Min => val < *bv,
            },
        };
        if better {
            best = Some((val, v));
        }
    }
    best
}

/// Whether `x` satisfies at least `n` linearly independent constraints of `p`
/// with equality, i.e. is an extreme point of its feasible region.
pub fn is_extreme_point(p: &LpProblem, x: &[Rational]) -> bool {
    if !p.check_point(x).is_feasible() {
        return false;
    }
    let tight: Vec<Vec<Rational>> = hyperplanes(p)
        .into_iter()
        .filter(|(a, rhs)| {
            let lhs: Rational = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
            lhs == *rhs
        })
        .map(|(a, _)| a)
        .collect();
    if tight.is_empty() {
        return p.num_vars() == 0;
    }
    rank(tight) == p.num_vars()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlp::knapsack_relaxation;
    use crate::instance::Bound;
    use crate::rational::ratio;

    fn running(sense: Sense) -> KnapsackInstance {
        KnapsackInstance::new(sense, vec![vec![2, 3]], vec![4], vec![int(1), int(1)], vec![Bound::Finite(1); 2]).unwrap()
    }

    #[test]
    fn brute_force_running_example() {
        let p = brute_force(&running(Sense::Packing), DEFAULT_BUDGET).unwrap();
        assert_eq!((p.value, p.x), (int(1), vec![0, 1]));
        let c = brute_force(&running(Sense::Covering), DEFAULT_BUDGET).unwrap();
        assert_eq!((c.value, c.x), (int(2), vec![1, 1]));
    }

    #[test]
    fn dp_running_example() {
        assert_eq!(dp_solve(&running(Sense::Packing), DEFAULT_BUDGET).unwrap().value, int(1));
        assert_eq!(dp_solve(&running(Sense::Covering), DEFAULT_BUDGET).unwrap().value, int(2));
    }

    #[test]
    fn classical_knapsack() {
        let inst = KnapsackInstance::new(
            Sense::Packing,
            vec![vec![1, 2, 3]],
            vec![4],
            vec![int(1), int(2), int(3)],
            vec![Bound::Finite(1); 3],
        )
        .unwrap();
        let bf = brute_force(&inst, DEFAULT_BUDGET).unwrap();
        let dp = dp_solve(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(bf.value, int(4));
        assert_eq!(dp.value, int(4));
        assert!(inst.is_feasible(&dp.x));
        assert_eq!(inst.value(&dp.x), int(4));
    }

    #[test]
    fn zero_capacity_packing() {
        let inst = KnapsackInstance::new(Sense::Packing, vec![vec![2, 3]], vec![0], vec![int(1), int(1)], vec![Bound::Finite(1); 2]).unwrap();
        let r = brute_force(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!((r.value, r.x), (int(0), vec![0, 0]));
    }

    #[test]
    fn budgets_fail_loudly() {
        let inst = running(Sense::Packing);
        assert!(matches!(brute_force(&inst, 3), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(dp_solve(&inst, 3), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn infeasible_covering() {
        let inst = KnapsackInstance::new(Sense::Covering, vec![vec![1]], vec![5], vec![int(1)], vec![Bound::Finite(2)]).unwrap();
        assert!(matches!(brute_force(&inst, DEFAULT_BUDGET), Err(Error::Infeasible(_))));
        assert!(matches!(dp_solve(&inst, DEFAULT_BUDGET), Err(Error::Infeasible(_))));
    }

    #[test]
    fn vertex_enumeration_of_running_relaxation() {
        let p = knapsack_relaxation(&running(Sense::Packing));
        assert_eq!(
            vertices(&p),
            vec![
                vec![int(0), int(0)],
                vec![int(0), int(1)],
                vec![ratio(1, 2), int(1)],
                vec![int(1), int(0)],
                vec![int(1), ratio(2, 3)],
            ]
        );
        assert_eq!(lp_by_vertices(&p).unwrap().0, ratio(5, 3));
        assert!(is_extreme_point(&p, &[int(1), ratio(2, 3)]));
        assert!(!is_extreme_point(&p, &[ratio(1, 2), ratio(1, 2)]));
    }
}
