//! k-dimensional knapsack instances: data model, validation, cost ordering,
//! bound capping and random generation.

mod generate;
mod json;

pub use generate::{generate_random, GenParams};
pub use json::{parse_instance, parse_solution, serialize_instance, serialize_solution};

use std::fmt;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// `max cx` subject to `Ax <= b`.
    Packing,
    /// `min cx` subject to `Ax >= b`.
    Covering,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Packing => "packing",
            Sense::Covering => "covering",
        })
    }
}

/// Upper bound on the number of copies of an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<u64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    pub fn admits(self, v: u64) -> bool {
        match self {
            Bound::Finite(d) => v <= d,
            Bound::Infinite => true,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Bound::Finite(0)
    }

    pub fn as_rational(self) -> Option<Rational> {
        self.finite().map(int)
    }
}

/// The integer program `{opt cx | x in Z^n, 0 <= x <= d, Ax (<= or >=) b}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnapsackInstance {
    sense: Sense,
    n: usize,
    a: Vec<Vec<u64>>,
    b: Vec<u64>,
    c: Vec<Rational>,
    d: Vec<Bound>,
}

impl KnapsackInstance {
    /// Builds a validated instance. `n` is taken from `c`.
    pub fn new(
        sense: Sense,
        a: Vec<Vec<u64>>,
        b: Vec<u64>,
        c: Vec<Rational>,
        d: Vec<Bound>,
    ) -> Result<Self> {
        let n = c.len();
        if a.len() != b.len() {
            return Err(Error::format(
                "b",
                format!("dimension mismatch: {} rows in A, {} limits", a.len(), b.len()),
            ));
        }
        for (j, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::format(
                    format!("A[{j}]"),
                    format!("dimension mismatch: {} columns, expected {n}", row.len()),
                ));
            }
        }
        if d.len() != n {
            return Err(Error::format(
                "d",
                format!("dimension mismatch: {} bounds, expected {n}", d.len()),
            ));
        }
        if let Some(i) = c.iter().position(|ci| ci.is_negative()) {
            return Err(Error::format(format!("c[{i}]"), "negative cost"));
        }
        Ok(KnapsackInstance {
            sense,
            n,
            a,
            b,
            c,
            d,
        })
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Number of knapsack constraints.
    pub fn k(&self) -> usize {
        self.b.len()
    }

    /// Number of items.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[Vec<u64>] {
        &self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn d(&self) -> &[Bound] {
        &self.d
    }

    /// All bounds as integers, if none is infinite.
    pub fn finite_d(&self) -> Option<Vec<u64>> {
        self.d.iter().map(|b| b.finite()).collect()
    }

    /// Same constraint data with a different cost vector.
    pub fn with_costs(&self, c: Vec<Rational>) -> Result<Self> {
        Self::new(self.sense, self.a.clone(), self.b.clone(), c, self.d.clone())
    }

    /// Same data with different limits and bounds; used for residual problems.
    pub fn with_limits(&self, b: Vec<u64>, d: Vec<Bound>) -> Result<Self> {
        Self::new(self.sense, self.a.clone(), b, self.c.clone(), d)
    }

    /// `A_j · x` for every row `j`.
    pub fn usage(&self, x: &[u64]) -> Vec<u128> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(&w, &v)| w as u128 * v as u128).sum())
            .collect()
    }

    pub fn value(&self, x: &[u64]) -> Rational {
        self.c
            .iter()
            .zip(x)
            .filter(|(_, &v)| v != 0)
            .map(|(ci, &v)| ci * int(v))
            .sum()
    }

    /// Integral feasibility in this instance's sense.
    pub fn is_feasible(&self, x: &[u64]) -> bool {
        self.infeasibility(x).is_none()
    }

    /// Describes the first violated bound or row of `x`, if any.
    pub fn infeasibility(&self, x: &[u64]) -> Option<String> {
        if x.len() != self.n {
            return Some(format!("length {} != n = {}", x.len(), self.n));
        }
        if let Some(i) = (0..self.n).find(|&i| !self.d[i].admits(x[i])) {
            return Some(format!("x[{i}] = {} exceeds its bound", x[i]));
        }
        for (j, (u, &bj)) in self.usage(x).iter().zip(&self.b).enumerate() {
            let bad = match self.sense {
                Sense::Packing => *u > bj as u128,
                Sense::Covering => *u < bj as u128,
            };
            if bad {
                return Some(format!("row {j}: usage {u} vs limit {bj}"));
            }
        }
        None
    }

    /// Wraps `x` as a solution after checking feasibility.
    pub fn solution(&self, x: Vec<u64>) -> Result<IntegralSolution> {
        if let Some(why) = self.infeasibility(&x) {
            return Err(Error::contract(format!("infeasible solution: {why}")));
        }
        let value = self.value(&x);
        Ok(IntegralSolution { x, value })
    }

    /// Largest cost among items that may be used at all (bound not zero).
    pub fn c_max(&self) -> Rational {
        self.c
            .iter()
            .zip(&self.d)
            .filter(|(_, d)| !d.is_zero())
            .map(|(c, _)| c.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `true` if the objective prefers `a` over `b` in this instance's sense.
    pub fn better(&self, a: &Rational, b: &Rational) -> bool {
        match self.sense {
            Sense::Packing => a > b,
            Sense::Covering => a < b,
        }
    }
}

/// A feasible integer point together with its exact value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegralSolution {
    pub x: Vec<u64>,
    pub value: Rational,
}

/// An instance with items stably sorted by non-decreasing cost.
///
/// `perm[i]` is the original index of normalized item `i`. Among equal costs the
/// original order is kept, so the later index counts as the more profitable item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedInstance {
    pub base: KnapsackInstance,
    pub perm: Vec<usize>,
}

impl NormalizedInstance {
    /// Maps a vector indexed by normalized items back to original item order.
    pub fn to_original<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (i, &orig) in self.perm.iter().enumerate() {
            out[orig] = v[i].clone();
        }
        out
    }

    /// Maps a vector indexed by original items to normalized order.
    pub fn to_normalized<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.perm.iter().map(|&orig| v[orig].clone()).collect()
    }

    pub fn solution_to_original(&self, s: &IntegralSolution) -> IntegralSolution {
        IntegralSolution {
            x: self.to_original(&s.x),
            value: s.value.clone(),
        }
    }
}

pub fn normalize(inst: &KnapsackInstance) -> NormalizedInstance {
    let mut perm: Vec<usize> = (0..inst.n).collect();
    perm.sort_by(|&i, &j| inst.c[i].cmp(&inst.c[j]));
    let pick = |v: &[u64]| perm.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let base = KnapsackInstance {
        sense: inst.sense,
        n: inst.n,
        a: inst.a.iter().map(|row| pick(row)).collect(),
        b: inst.b.clone(),
        c: perm.iter().map(|&i| inst.c[i].clone()).collect(),
        d: perm.iter().map(|&i| inst.d[i]).collect(),
    };
    NormalizedInstance { base, perm }
}

/// Replaces every infinite bound by a finite one that keeps the integer optimum.
pub fn cap_unbounded(inst: &KnapsackInstance) -> Result<KnapsackInstance> {
    let mut d = inst.d.clone();
    for (i, di) in d.iter_mut().enumerate() {
        if *di != Bound::Infinite {
            continue;
        }
        let ratios = inst
            .a
            .iter()
            .zip(&inst.b)
            .filter(|(row, _)| row[i] > 0)
            .map(|(row, &bj)| (bj, row[i]));
        let cap = match inst.sense {
            Sense::Packing => ratios.map(|(bj, w)| bj / w).min(),
            Sense::Covering => ratios.map(|(bj, w)| bj.div_ceil(w)).max().or(Some(0)),
        };
        *di = match cap {
            Some(v) => Bound::Finite(v),
            None if inst.c[i].is_zero() => Bound::Finite(0),
            None => {
                return Err(Error::Unbounded(format!(
                    "item {i} has no weight, no bound and positive cost"
                )))
            }
        };
    }
    Ok(KnapsackInstance { d, ..inst.clone() })
}
