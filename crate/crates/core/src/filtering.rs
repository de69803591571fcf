//! Filtering: enumerate guesses of the `gamma` most profitable items of a
//! solution, build the residual knapsack left over by each guess, and solve
//! one residual LP per guess (the LP-based approximation scheme).
//!
//! All functions work on a [`NormalizedInstance`], so item `i + 1` is always at
//! least as profitable as item `i`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlp::{knapsack_relaxation, solve_lp};
use crate::instance::{Bound, IntegralSolution, KnapsackInstance, NormalizedInstance, Sense};
use crate::rational::{render, Rational};
use crate::rounding::round_point;

/// An integral vector `0 <= g <= d` with `‖g‖₁ <= gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guess {
    pub g: Vec<u64>,
    pub size: u64,
}

impl Guess {
    pub fn new(g: Vec<u64>) -> Self {
        let size = g.iter().sum();
        Guess { g, size }
    }

    /// Smallest index with a positive entry.
    pub fn mu(&self) -> Option<usize> {
        self.g.iter().position(|&v| v > 0)
    }
}

/// The knapsack left after committing to a guess: `(A, b^g, c, d^g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualProblem {
    pub guess: Guess,
    pub mu: Option<usize>,
    pub b_g: Vec<u64>,
    pub d_g: Vec<Bound>,
    /// `true` when `‖g‖₁ = gamma`; otherwise `b^g` and `d^g` are all zero.
    pub full: bool,
}

impl ResidualProblem {
    pub fn instance(&self, base: &KnapsackInstance) -> Result<KnapsackInstance> {
        base.with_limits(self.b_g.clone(), self.d_g.clone())
    }
}

/// Bounds of the residual problem: `d - g` on coordinates up to and including
/// `mu`, zero afterwards; all zero unless the guess is full.
fn residual_bounds(d: &[Bound], g: &Guess, gamma: u64) -> Vec<Bound> {
    let n = d.len();
    match g.mu() {
        Some(mu) if g.size == gamma => (0..n)
            .map(|i| {
                if i > mu {
                    Bound::Finite(0)
                } else {
                    match d[i] {
                        Bound::Finite(v) => Bound::Finite(v - g.g[i]),
                        Bound::Infinite => Bound::Infinite,
                    }
                }
            })
            .collect(),
        _ => vec![Bound::Finite(0); n],
    }
}

/// Covering admissibility `A(g + d^g) >= b`.
fn admissible(inst: &KnapsackInstance, g: &Guess, gamma: u64) -> bool {
    let dg = residual_bounds(inst.d(), g, gamma);
    let top: Vec<u64> = g
        .g
        .iter()
        .zip(&dg)
        .map(|(&gi, di)| gi + di.finite().expect("covering guesses need finite bounds"))
        .collect();
    inst.usage(&top)
        .iter()
        .zip(inst.b())
        .all(|(&u, &b)| u >= b as u128)
}

/// Lazy lexicographic stream of guesses.
///
/// Candidates form the down-closed set `{g : g <= d, ‖g‖₁ <= gamma}` (packing
/// additionally `Ag <= b`), walked with an odometer that never steps outside
/// the set. Covering streams then keep only admissible guesses.
pub struct GuessIter<'a> {
    inst: &'a KnapsackInstance,
    gamma: u64,
    next: Option<Vec<u64>>,
}

impl GuessIter<'_> {
    fn fits(&self, g: &[u64], i: usize) -> bool {
        let size: u64 = g.iter().sum();
        if size > self.gamma || !self.inst.d()[i].admits(g[i]) {
            return false;
        }
        self.inst.sense() == Sense::Covering
            || self
                .inst
                .usage(g)
                .iter()
                .zip(self.inst.b())
                .all(|(&u, &b)| u <= b as u128)
    }

    fn advance(&self, g: &[u64]) -> Option<Vec<u64>> {
        let mut cand = g.to_vec();
        for i in (0..cand.len()).rev() {
            for v in cand[i + 1..].iter_mut() {
                *v = 0;
            }
            cand[i] += 1;
            if self.fits(&cand, i) {
                return Some(cand);
            }
            cand[i] -= 1;
        }
        None
    }
}

impl Iterator for GuessIter<'_> {
    type Item = Guess;

    fn next(&mut self) -> Option<Guess> {
        loop {
            let g = self.next.take()?;
            self.next = self.advance(&g);
            let guess = Guess::new(g);
            if self.inst.sense() == Sense::Packing || admissible(self.inst, &guess, self.gamma) {
                return Some(guess);
            }
        }
    }
}

/// Every valid guess exactly once, in lexicographic order of `g`.
pub fn enumerate_guesses(inst: &NormalizedInstance, gamma: u64) -> Result<GuessIter<'_>> {
    guesses_of(&inst.base, gamma)
}

pub(crate) fn guesses_of(inst: &KnapsackInstance, gamma: u64) -> Result<GuessIter<'_>> {
    if inst.sense() == Sense::Covering && inst.finite_d().is_none() {
        return Err(Error::contract("covering guesses need finite bounds; apply cap_unbounded first"));
    }
    Ok(GuessIter {
        inst,
        gamma,
        next: Some(vec![0; inst.n()]),
    })
}

/// Whether `g` is a valid guess for `inst` at this `gamma`.
pub fn is_valid_guess(inst: &KnapsackInstance, g: &Guess, gamma: u64) -> bool {
    if g.g.len() != inst.n() || g.size > gamma || g.g.iter().zip(inst.d()).any(|(&v, d)| !d.admits(v)) {
        return false;
    }
    match inst.sense() {
        Sense::Packing => inst.usage(&g.g).iter().zip(inst.b()).all(|(&u, &b)| u <= b as u128),
        Sense::Covering => inst.finite_d().is_some() && admissible(inst, g, gamma),
    }
}

pub fn residual(inst: &NormalizedInstance, g: &Guess, gamma: u64) -> Result<ResidualProblem> {
    residual_of(&inst.base, g, gamma)
}

pub(crate) fn residual_of(inst: &KnapsackInstance, g: &Guess, gamma: u64) -> Result<ResidualProblem> {
    if !is_valid_guess(inst, g, gamma) {
        return Err(Error::contract(format!("{:?} is not a valid guess at gamma = {gamma}", g.g)));
    }
    let full = g.size == gamma && g.size > 0;
    let (b_g, d_g) = if full {
        let used = inst.usage(&g.g);
        let b_g = inst
            .b()
            .iter()
            .zip(&used)
            .map(|(&b, &u)| (b as u128).saturating_sub(u) as u64)
            .collect();
        (b_g, residual_bounds(inst.d(), g, gamma))
    } else {
        (vec![0; inst.k()], vec![Bound::Finite(0); inst.n()])
    };
    Ok(ResidualProblem {
        guess: g.clone(),
        mu: g.mu(),
        b_g,
        d_g,
        full,
    })
}

/// The guess an integral point `x` induces: its `gamma` most profitable
/// copies (highest indices first), or all of `x` when it has fewer.
pub fn top_guess(x: &[u64], gamma: u64) -> Guess {
    let mut g = vec![0u64; x.len()];
    let mut left = gamma;
    for i in (0..x.len()).rev() {
        let take = x[i].min(left);
        g[i] = take;
        left -= take;
    }
    Guess::new(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasConfig {
    pub gamma: u64,
    pub parallel: bool,
}

impl PtasConfig {
    pub fn with_gamma(gamma: u64) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::InvalidParams("gamma must be at least 1".into()));
        }
        Ok(PtasConfig { gamma, parallel: false })
    }

    /// `gamma = ⌈k / eps⌉`, at least 1.
    pub fn from_epsilon(k: usize, eps: &Rational) -> Result<Self> {
        Self::with_gamma(gamma_for(k as u64, eps)?)
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

/// `⌈numerator / eps⌉`, clamped to at least 1.
pub fn gamma_for(numerator: u64, eps: &Rational) -> Result<u64> {
    use num::{Signed, ToPrimitive};
    if !eps.is_positive() {
        return Err(Error::InvalidParams("epsilon must be positive".into()));
    }
    let q = Rational::from_integer(numerator.into()) / eps;
    let g = q.ceil().to_integer().to_u64().ok_or_else(|| Error::InvalidParams("gamma too large".into()))?;
    Ok(g.max(1))
}

/// One line of the per-guess trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessTrace {
    pub residual: ResidualProblem,
    pub lp_value: Rational,
    /// `c·g` plus the residual LP optimum.
    pub shifted_value: Rational,
    pub candidate: IntegralSolution,
}

impl GuessTrace {
    pub fn to_json(&self) -> Value {
        json!({
            "g": self.residual.guess.g,
            "b_g": self.residual.b_g,
            "d_g": self.residual.d_g.iter().map(|d| match d {
                Bound::Finite(v) => json!(v),
                Bound::Infinite => json!("inf"),
            }).collect::<Vec<_>>(),
            "lp_value": render(&self.lp_value),
            "rounded_value": render(&self.candidate.value),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtasOutcome {
    /// Best candidate, in normalized item order.
    pub best: IntegralSolution,
    pub best_guess: Guess,
    pub trace: Vec<GuessTrace>,
}

/// Solves the residual relaxation of one guess and rounds it back.
pub(crate) fn solve_guess(inst: &KnapsackInstance, g: &Guess, gamma: u64) -> Result<GuessTrace> {
    let res = residual_of(inst, g, gamma)?;
    let rinst = res.instance(inst)?;
    let lp = solve_lp(&knapsack_relaxation(&rinst))?.into_result("residual relaxation")?;
    let (rounded, _) = round_point(&rinst, &lp.x)?;
    let x: Vec<u64> = g.g.iter().zip(&rounded.x).map(|(a, b)| a + b).collect();
    let candidate = inst.solution(x).map_err(|e| Error::InvariantViolation(format!("guess {:?}: {e}", g.g)))?;
    let shifted_value = inst.value(&g.g) + &lp.value;
    Ok(GuessTrace {
        residual: res,
        lp_value: lp.value,
        shifted_value,
        candidate,
    })
}

/// Runs `f` on every guess, serially or on the rayon pool; results come back
/// in enumeration order either way.
pub(crate) fn map_guesses<T: Send>(
    inst: &KnapsackInstance,
    gamma: u64,
    parallel: bool,
    f: impl Fn(&Guess) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let guesses = guesses_of(inst, gamma)?;
    if parallel {
        let mut out: Vec<(usize, Result<T>)> = guesses.enumerate().par_bridge().map(|(i, g)| (i, f(&g))).collect();
        out.sort_by_key(|(i, _)| *i);
        out.into_iter().map(|(_, r)| r).collect()
    } else {
        guesses.map(|g| f(&g)).collect()
    }
}

/// The LP-based approximation scheme: one residual LP per guess, rounded, best
/// candidate kept. Ties go to the lexicographically smallest guess.
pub fn ptas_solve(inst: &NormalizedInstance, cfg: &PtasConfig) -> Result<PtasOutcome> {
    let base = &inst.base;
    if base.sense() == Sense::Covering && base.finite_d().is_none() {
        return Err(Error::contract("covering needs finite bounds; apply cap_unbounded first"));
    }
    let trace = map_guesses(base, cfg.gamma, cfg.parallel, |g| solve_guess(base, g, cfg.gamma))?;
    let mut best: Option<usize> = None;
    for (i, t) in trace.iter().enumerate() {
        if best.map_or(true, |b| base.better(&t.candidate.value, &trace[b].candidate.value)) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::Infeasible("no admissible guess".into()))?;
    Ok(PtasOutcome {
        best: trace[best].candidate.clone(),
        best_guess: trace[best].residual.guess.clone(),
        trace,
    })
}
