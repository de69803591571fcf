//! Bounded-variable primal simplex over exact rationals.
//!
//! The tableau is kept in sparse row form together with a column-to-rows index,
//! which keeps pivots cheap on the block-structured hull formulations. Pricing
//! picks the largest reduced cost, switching to Bland's smallest-index rule
//! after a run of degenerate pivots so the method cannot cycle.

use std::collections::BTreeSet;

use num::{Signed, Zero};

use super::coef::Coef;
use super::problem::{LpProblem, ObjSense, Relation};
use super::{LpSolution, LpStatus, VarStatus};
use crate::rational::Rational;

type SparseRow = Vec<(usize, Coef)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic(usize),
    Lower,
    Upper,
}

struct Tableau {
    rows: Vec<SparseRow>,
    col_rows: Vec<BTreeSet<usize>>,
    basic: Vec<usize>,
    state: Vec<ColState>,
    lower: Vec<Rational>,
    upper: Vec<Option<Rational>>,
    x: Vec<Rational>,
    pivots: usize,
    degenerate_run: usize,
}

/// Degenerate steps tolerated before pricing falls back to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

/// `target -= f * src`, reporting columns that appear in or vanish from `target`.
/// Entries outside `src`'s support are moved, not recomputed.
fn sub_scaled(target: &mut SparseRow, f: &Coef, src: &[(usize, Coef)], mut changed: impl FnMut(usize, bool)) {
    let old = std::mem::take(target);
    let mut out = Vec::with_capacity(old.len() + src.len());
    let mut old = old.into_iter().peekable();
    let mut src = src.iter().peekable();
    loop {
        match (old.peek(), src.peek()) {
            (None, None) => break,
            (Some(_), None) => out.extend(old.by_ref()),
            (Some((oc, _)), Some((sc, _))) if oc < sc => out.push(old.next().unwrap()),
            (Some((oc, _)), Some((sc, _))) if oc == sc => {
                let (c, v) = old.next().unwrap();
                let (_, sv) = src.next().unwrap();
                let v = v.sub_mul(f, sv);
                if v.is_zero() {
                    changed(c, false);
                } else {
                    out.push((c, v));
                }
            }
            (_, Some(_)) => {
                let (sc, sv) = src.next().unwrap();
                changed(*sc, true);
                out.push((*sc, f.mul(sv).neg()));
            }
        }
    }
    *target = out;
}

fn coeff(row: &SparseRow, col: usize) -> Option<&Coef> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|p| &row[p].1)
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl Tableau {
    fn at_bound_value(&self, col: usize, state: ColState) -> Rational {
        match state {
            ColState::Upper => self.upper[col].clone().expect("upper state needs a finite bound"),
            _ => self.lower[col].clone(),
        }
    }

    /// One simplex iteration against the reduced-cost row `cost` (minimization).
    fn step(&mut self, cost: &mut SparseRow, extra: &mut [&mut SparseRow]) -> Step {
        let eligible = |(j, dj): &(usize, Coef)| -> Option<(usize, i8)> {
            let j = *j;
            match self.state[j] {
                ColState::Lower if dj.is_negative() => {
                    let movable = self.upper[j].as_ref().map_or(true, |u| u > &self.lower[j]);
                    movable.then_some((j, 1i8))
                }
                ColState::Upper if dj.is_positive() => Some((j, -1i8)),
                _ => None,
            }
        };
        let entering = if self.degenerate_run >= DEGENERATE_LIMIT {
            cost.iter().find_map(eligible)
        } else {
            let mut best: Option<(usize, i8, &Coef)> = None;
            for entry in cost.iter() {
                if let Some((j, dir)) = eligible(entry) {
                    if best.map_or(true, |(_, _, b)| entry.1.abs_greater(b)) {
                        best = Some((j, dir, &entry.1));
                    }
                }
            }
            best.map(|(j, dir, _)| (j, dir))
        };
        let Some((j, dir)) = entering else {
            return Step::Optimal;
        };

        let column: Vec<(usize, Coef)> = self.col_rows[j]
            .iter()
            .map(|&r| (r, coeff(&self.rows[r], j).expect("column index out of sync").clone()))
            .collect();
        let column_q: Vec<Rational> = column.iter().map(|(_, a)| a.to_rational()).collect();

        // (step length, variable index, leaving row or None for a bound flip, leaves at upper)
        let mut best: Option<(Rational, usize, Option<usize>, bool)> = None;
        let mut consider = |t: Rational, var: usize, row: Option<usize>, to_upper: bool| {
            let better = match &best {
                None => true,
                Some((bt, bv, _, _)) => t < *bt || (t == *bt && var < *bv),
            };
            if better {
                best = Some((t, var, row, to_upper));
            }
        };
        if let Some(u) = &self.upper[j] {
            consider(u - &self.lower[j], j, None, dir > 0);
        }
        for ((r, _), alpha) in column.iter().zip(&column_q) {
            let b = self.basic[*r];
            // x_b moves by -alpha * dir per unit step.
            let rate = if dir > 0 { -alpha.clone() } else { alpha.clone() };
            if rate.is_negative() {
                consider((&self.x[b] - &self.lower[b]) / -&rate, b, Some(*r), false);
            } else if let Some(ub) = &self.upper[b] {
                consider((ub - &self.x[b]) / &rate, b, Some(*r), true);
            }
        }
        let Some((t, _, leave_row, to_upper)) = best else {
            return Step::Unbounded;
        };

        if t.is_zero() {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
            let signed_t = if dir > 0 { t.clone() } else { -t.clone() };
            for ((r, _), alpha) in column.iter().zip(&column_q) {
                let b = self.basic[*r];
                self.x[b] -= alpha * &signed_t;
            }
            self.x[j] += &signed_t;
        }

        match leave_row {
            None => {
                self.state[j] = if dir > 0 { ColState::Upper } else { ColState::Lower };
                self.x[j] = self.at_bound_value(j, self.state[j]);
            }
            Some(r) => {
                let leaving = self.basic[r];
                let st = if to_upper { ColState::Upper } else { ColState::Lower };
                self.state[leaving] = st;
                self.x[leaving] = self.at_bound_value(leaving, st);
                self.pivot(r, j, &column, cost, extra);
            }
        }
        Step::Moved
    }

    fn pivot(
        &mut self,
        r: usize,
        j: usize,
        column: &[(usize, Coef)],
        cost: &mut SparseRow,
        extra: &mut [&mut SparseRow],
    ) {
        self.pivots += 1;
        let alpha = coeff(&self.rows[r], j).expect("pivot element").clone();
        if !alpha.is_one() {
            for (_, v) in self.rows[r].iter_mut() {
                *v = v.div(&alpha);
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, _) in column {
            if *i == r {
                continue;
            }
            let f = coeff(&self.rows[*i], j).expect("column entry").clone();
            let col_rows = &mut self.col_rows;
            let row_index = *i;
            sub_scaled(&mut self.rows[row_index], &f, &pivot_row, |c, added| {
                if added {
                    col_rows[c].insert(row_index);
                } else {
                    col_rows[c].remove(&row_index);
                }
            });
        }
        for row in std::iter::once(cost).chain(extra.iter_mut().map(|r| &mut **r)) {
            if let Some(f) = coeff(row, j).cloned() {
                sub_scaled(row, &f, &pivot_row, |_, _| {});
            }
        }
        self.rows[r] = pivot_row;
        self.state[j] = ColState::Basic(r);
        self.basic[r] = j;
    }
}

/// Solves `p` to an optimal basic feasible solution, or reports infeasibility
/// or unboundedness.
pub fn solve(p: &LpProblem) -> LpSolution {
    let nv = p.num_vars();
    let min_cost: Vec<Rational> = match p.sense {
        ObjSense::Min => p.objective.clone(),
        ObjSense::Max => p.objective.iter().map(|c| -c).collect(),
    };

    let mut lower: Vec<Rational> = p.lower.clone();
    let mut upper: Vec<Option<Rational>> = p.upper.clone();
    let mut x: Vec<Rational> = p.lower.clone();
    let mut state = vec![ColState::Lower; nv];

    let mut rows: Vec<SparseRow> = Vec::new();
    let mut basic: Vec<usize> = Vec::new();
    // Per original row: tableau row, auxiliary column and its original coefficient.
    let mut aux: Vec<Option<(usize, usize, i8)>> = Vec::with_capacity(p.rows.len());
    let mut costed_artificials: Vec<usize> = Vec::new();
    let mut artificials: Vec<usize> = Vec::new();

    let new_col = |lower: &mut Vec<Rational>,
                       upper: &mut Vec<Option<Rational>>,
                       x: &mut Vec<Rational>,
                       state: &mut Vec<ColState>,
                       up: Option<Rational>| {
        lower.push(Rational::zero());
        upper.push(up);
        x.push(Rational::zero());
        state.push(ColState::Lower);
        lower.len() - 1
    };

    for row in &p.rows {
        if row.coeffs.is_empty() {
            if !row.relation.holds(&Rational::zero(), &row.rhs) {
                return LpSolution::status_only(LpStatus::Infeasible);
            }
            aux.push(None);
            continue;
        }
        let residual = &row.rhs - row.eval(&x[..nv]);
        let tr = rows.len();
        let mut coeffs: SparseRow = row.coeffs.iter().map(|(c, v)| (*c, Coef::from_rational(v))).collect();
        let slack_sign: i8 = match row.relation {
            Relation::Le => 1,
            Relation::Ge => -1,
            Relation::Eq => 0,
        };
        let slack_feasible = match row.relation {
            Relation::Le => !residual.is_negative(),
            Relation::Ge => !residual.is_positive(),
            Relation::Eq => false,
        };
        let mut aux_entry = None;
        if slack_sign != 0 {
            let s = new_col(&mut lower, &mut upper, &mut x, &mut state, None);
            coeffs.push((s, Coef::from_i64(slack_sign.into())));
            aux_entry = Some((tr, s, slack_sign));
            if slack_feasible {
                x[s] = residual.abs();
                state[s] = ColState::Basic(tr);
                basic.push(s);
            }
        }
        if !slack_feasible {
            let needs_cost = !residual.is_zero();
            let a = new_col(
                &mut lower,
                &mut upper,
                &mut x,
                &mut state,
                if needs_cost { None } else { Some(Rational::zero()) },
            );
            let sign: i8 = if residual.is_negative() { -1 } else { 1 };
            coeffs.push((a, Coef::from_i64(sign.into())));
            x[a] = residual.abs();
            state[a] = ColState::Basic(tr);
            basic.push(a);
            artificials.push(a);
            if needs_cost {
                costed_artificials.push(a);
            }
            if aux_entry.is_none() {
                aux_entry = Some((tr, a, sign));
            }
        }
        // Scale so the basic column has coefficient +1.
        let b = *basic.last().unwrap();
        let bsign = coeffs.iter().find(|(c, _)| *c == b).unwrap().1.clone();
        if bsign.is_negative() {
            for (_, v) in coeffs.iter_mut() {
                *v = v.neg();
            }
        }
        rows.push(coeffs);
        aux.push(aux_entry);
    }

    let ncols = lower.len();
    let mut col_rows = vec![BTreeSet::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].insert(r);
        }
    }

    let mut cost2: SparseRow = min_cost
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, Coef::from_rational(c)))
        .collect();
    let mut cost1: SparseRow = costed_artificials.iter().map(|&a| (a, Coef::from_i64(1))).collect();
    for &a in &costed_artificials {
        let ColState::Basic(r) = state[a] else { unreachable!() };
        sub_scaled(&mut cost1, &Coef::from_i64(1), &rows[r], |_, _| {});
    }

    let mut t = Tableau {
        rows,
        col_rows,
        basic,
        state,
        lower,
        upper,
        x,
        pivots: 0,
        degenerate_run: 0,
    };

    if !costed_artificials.is_empty() {
        loop {
            match t.step(&mut cost1, &mut [&mut cost2]) {
                Step::Moved => continue,
                Step::Optimal => break,
                Step::Unbounded => unreachable!("phase one is bounded below"),
            }
        }
        if costed_artificials.iter().any(|&a| !t.x[a].is_zero()) {
            return LpSolution::status_only(LpStatus::Infeasible);
        }
    }
    for &a in &artificials {
        t.upper[a] = Some(Rational::zero());
        if t.state[a] == ColState::Upper {
            t.state[a] = ColState::Lower;
        }
    }

    loop {
        match t.step(&mut cost2, &mut []) {
            Step::Moved => continue,
            Step::Optimal => break,
            Step::Unbounded => return LpSolution::status_only(LpStatus::Unbounded),
        }
    }

    let xs: Vec<Rational> = t.x[..nv].to_vec();
    let basis = (0..nv)
        .map(|j| match t.state[j] {
            ColState::Basic(_) => VarStatus::Basic,
            ColState::Lower => VarStatus::AtLower,
            ColState::Upper => VarStatus::AtUpper,
        })
        .collect();
    // Min-form multipliers from the reduced costs of auxiliary columns, then
    // expressed in the problem's own sense.
    let duals = aux
        .iter()
        .map(|entry| match entry {
            None => Rational::zero(),
            Some((_, col, sign)) => {
                let d = coeff(&cost2, *col).map_or_else(Rational::zero, Coef::to_rational);
                let pi_min = -d / Rational::from_integer((*sign).into());
                match p.sense {
                    ObjSense::Min => pi_min,
                    ObjSense::Max => -pi_min,
                }
            }
        })
        .collect();
    let value = p.objective_value(&xs);
    LpSolution {
        status: LpStatus::Optimal,
        x: xs,
        value,
        basis,
        duals,
        pivots: t.pivots,
    }
}
