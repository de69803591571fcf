use clap::ValueEnum;
use itertools::Itertools;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::costfree::{
    build_costfree_lp, costfree_membership, costfree_solve_gamma, repair_factor, repair_with, value_by_tuples,
    DeletionRule,
};
use crate::disjunctive::{build_disjunctive, check_gap, solve_and_round, value_by_decomposition, DisjunctiveLp};
use crate::error::{Error, Result};
use crate::exactlp::{count_fractional, knapsack_relaxation, solve_lp, verify_optimality, LpStatus};
use crate::filtering::{ptas_solve, PtasConfig};
use crate::instance::{
    generate_random, normalize, serialize_instance, Bound, GenParams, KnapsackInstance, Sense,
};
use crate::oracle::{brute_force, dp_solve, is_extreme_point, OracleResult};
use crate::rational::{ceil_u64, dot, floor_u64, int, render, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Extreme points of the naive relaxation have at most k fractional entries.
    Lemma1,
    /// Floor (ceiling) rounding loses at most `k · c_max`.
    Corollary2,
    /// The guess-and-round scheme meets `(1 ∓ k/gamma)·OPT`.
    Ptas,
    /// Hull LP optimum equals the per-guess decomposition; gap and size checks.
    DisjunctiveEquality,
    /// The ptas and hull checks on covering instances only.
    Covering,
    /// Cost independence, repair guarantee and lifting of the cost-free LP.
    Costfree,
    /// DP and brute force agree.
    OracleAgreement,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Corollary2 => "corollary2",
            Suite::Ptas => "ptas",
            Suite::DisjunctiveEquality => "disjunctive-equality",
            Suite::Covering => "covering",
            Suite::Costfree => "costfree",
            Suite::OracleAgreement => "oracle-agreement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    Pass,
    /// The case does not apply, e.g. an infeasible covering instance.
    Skip(String),
    Fail(String),
}

/// The `case`-th random instance of a suite; a pure function of its arguments.
/// Suites `ptas` and `disjunctive-equality` alternate packing (even cases) and
/// covering (odd cases) over the same distribution.
pub fn suite_instance(suite: Suite, seed: u64, case: u64) -> KnapsackInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    let mut params = GenParams {
        k: rng.gen_range(1..=3),
        n: 1,
        weights: (0, 9),
        costs: (0, 9),
        bounds: (0, 3),
        sense: if rng.gen::<bool>() { Sense::Packing } else { Sense::Covering },
        tightness: rng.gen_range(0.2..0.8),
    };
    match suite {
        Suite::Lemma1 | Suite::Corollary2 => params.n = rng.gen_range(1..=12),
        Suite::Ptas | Suite::DisjunctiveEquality | Suite::Covering => {
            params.n = rng.gen_range(1..=8);
            params.sense = match suite {
                Suite::Covering => Sense::Covering,
                _ if case % 2 == 0 => Sense::Packing,
                _ => Sense::Covering,
            };
        }
        Suite::Costfree => {
            params.k = rng.gen_range(1..=2);
            params.n = rng.gen_range(1..=5);
            params.bounds = (0, 2);
            params.sense = Sense::Packing;
        }
        Suite::OracleAgreement => {
            params.n = rng.gen_range(1..=6);
            params.weights = (0, 5);
        }
    }
    generate_random(&params, rng.gen()).expect("suite parameters are valid")
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift(e: Error) -> String {
    e.to_string()
}

fn lemma1(inst: &KnapsackInstance) -> Check {
    let p = knapsack_relaxation(inst);
    let sol = solve_lp(&p).map_err(lift)?;
    if sol.status != LpStatus::Optimal {
        return Err(format!("relaxation is {:?}", sol.status));
    }
    let frac = count_fractional(&sol.x);
    ensure(frac <= inst.k(), || format!("{frac} fractional coordinates with k = {}", inst.k()))?;
    ensure(is_extreme_point(&p, &sol.x), || "returned point is not a vertex".into())?;
    verify_optimality(&p, &sol).map_err(lift)
}

fn corollary2(inst: &KnapsackInstance) -> Check {
    let sol = solve_lp(&knapsack_relaxation(inst)).map_err(lift)?;
    if sol.status != LpStatus::Optimal {
        return Err(format!("relaxation is {:?}", sol.status));
    }
    let x: Vec<u64> = match inst.sense() {
        Sense::Packing => sol.x.iter().map(|v| floor_u64(v).unwrap()).collect(),
        Sense::Covering => sol.x.iter().map(|v| ceil_u64(v).unwrap()).collect(),
    };
    ensure(inst.is_feasible(&x), || format!("rounded point {x:?} is infeasible"))?;
    let loss = (inst.value(&x) - dot(inst.c(), &sol.x)).abs();
    let bound = int(inst.k() as u64) * inst.c_max();
    ensure(loss <= bound, || format!("loss {} exceeds {}", render(&loss), render(&bound)))
}

fn ptas(inst: &KnapsackInstance, opt: &OracleResult) -> Check {
    let norm = normalize(inst);
    for gamma in 1..=4 {
        let out = ptas_solve(&norm, &PtasConfig::with_gamma(gamma).unwrap()).map_err(lift)?;
        let best = norm.solution_to_original(&out.best);
        ensure(inst.is_feasible(&best.x), || format!("gamma {gamma}: infeasible output"))?;
        ensure(inst.value(&best.x) == best.value, || format!("gamma {gamma}: misreported value"))?;
        ensure(check_gap(inst.sense(), inst.k(), gamma, &best.value, &opt.value), || {
            format!("gamma {gamma}: value {} against OPT {}", render(&best.value), render(&opt.value))
        })?;
        ensure(!inst.better(&best.value, &opt.value), || format!("gamma {gamma}: beats the optimum"))?;
    }
    Ok(())
}

fn disjunctive(inst: &KnapsackInstance, opt: &OracleResult) -> Check {
    let norm = normalize(inst);
    let naive = solve_lp(&knapsack_relaxation(inst)).map_err(lift)?.value;
    let n = inst.n();
    for gamma in 1..=4u32 {
        let g = gamma as u64;
        let dlp = build_disjunctive(&norm, g).map_err(lift)?;
        let guesses = dlp.guesses.len();
        ensure(dlp.num_vars() == DisjunctiveLp::expected_vars(n, guesses), || format!("gamma {g}: variable count"))?;
        ensure((guesses as u128) <= (n as u128 + 1).pow(gamma), || format!("gamma {g}: {guesses} guesses"))?;
        let (sol, rounded) = solve_and_round(&norm, g).map_err(lift)?;
        let dec = value_by_decomposition(&norm, g, false).map_err(lift)?;
        ensure(sol.value == dec, || {
            format!("gamma {g}: hull {} against decomposition {}", render(&sol.value), render(&dec))
        })?;
        ensure(!sol.fallback_used, || format!("gamma {g}: extreme point mixes guesses"))?;
        ensure(!inst.better(&sol.value, &naive), || format!("gamma {g}: hull beats the naive LP"))?;
        ensure(!inst.better(&opt.value, &sol.value), || format!("gamma {g}: OPT beats the hull LP"))?;
        ensure(check_gap(inst.sense(), inst.k(), g, &opt.value, &sol.value), || {
            format!("gamma {g}: OPT {} against hull {}", render(&opt.value), render(&sol.value))
        })?;
        ensure(!inst.better(&rounded.value, &opt.value), || format!("gamma {g}: rounded beats the optimum"))?;
    }
    Ok(())
}

/// Two more cost vectors derived from the instance itself.
fn alternative_costs(inst: &KnapsackInstance) -> Vec<Vec<Rational>> {
    let h = Sha256::digest(serialize_instance(inst).as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from_le_bytes(h[..8].try_into().unwrap()));
    (0..2).map(|_| (0..inst.n()).map(|_| int(rng.gen_range(0..=9))).collect()).collect()
}

fn costfree(inst: &KnapsackInstance, budget: u128) -> Check {
    let d = inst.finite_d().ok_or("infinite bounds")?;
    let variants: Vec<KnapsackInstance> = std::iter::once(inst.clone())
        .chain(alternative_costs(inst).into_iter().map(|c| inst.with_costs(c).unwrap()))
        .collect();
    for gamma in 1..=3 {
        let text = build_costfree_lp(inst, gamma).map_err(lift)?.constraints_text();
        for v in &variants {
            let other = build_costfree_lp(v, gamma).map_err(lift)?.constraints_text();
            ensure(other == text, || format!("gamma {gamma}: constraint system depends on c"))?;
            let out = costfree_solve_gamma(v, gamma).map_err(lift)?;
            let opt = brute_force(v, budget).map_err(lift)?.value;
            let factor = repair_factor(v.k(), gamma);
            ensure(out.value == value_by_tuples(v, gamma, false).map_err(lift)?, || {
                format!("gamma {gamma}: hull value differs from the best tuple")
            })?;
            ensure(!out.fallback_used, || format!("gamma {gamma}: extreme point mixes tuples"))?;
            ensure(opt <= out.value, || format!("gamma {gamma}: LP {} below OPT", render(&out.value)))?;
            ensure(out.solution.value <= opt, || format!("gamma {gamma}: repaired value beats OPT"))?;
            for rule in [DeletionRule::AtMostK, DeletionRule::ExactlyK] {
                let z = repair_with(v, &out.active, &out.y, rule).map_err(lift)?;
                ensure(z.value >= &factor * &out.value, || {
                    format!("gamma {gamma}: {rule:?} repair {} below bound", render(&z.value))
                })?;
            }
        }
        for x in d.iter().map(|&v| 0..=v).multi_cartesian_product() {
            if x.len() != inst.n() || !inst.is_feasible(&x) {
                continue;
            }
            let y: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
            ensure(costfree_membership(inst, gamma, &y).map_err(lift)?, || {
                format!("gamma {gamma}: feasible {x:?} is outside the hull")
            })?;
        }
    }
    Ok(())
}

fn oracle_agreement(inst: &KnapsackInstance, brute: &OracleResult, budget: u128) -> Check {
    let dp = dp_solve(inst, budget).map_err(lift)?;
    ensure(dp.value == brute.value, || {
        format!("dp {} against brute force {}", render(&dp.value), render(&brute.value))
    })?;
    ensure(inst.is_feasible(&dp.x) && inst.value(&dp.x) == dp.value, || "dp solution is wrong".into())?;
    ensure(inst.is_feasible(&brute.x) && inst.value(&brute.x) == brute.value, || "brute solution is wrong".into())
}

/// Runs one suite's checks on one instance.
pub fn check_case(suite: Suite, inst: &KnapsackInstance, budget: u128) -> CaseOutcome {
    let needs_opt = !matches!(suite, Suite::Lemma1 | Suite::Corollary2 | Suite::Costfree);
    let opt = if needs_opt {
        match brute_force(inst, budget) {
            Ok(o) => Some(o),
            Err(e @ (Error::Infeasible(_) | Error::BudgetExceeded { .. })) => return CaseOutcome::Skip(e.to_string()),
            Err(e) => return CaseOutcome::Fail(e.to_string()),
        }
    } else {
        None
    };
    if suite == Suite::Covering && inst.sense() != Sense::Covering {
        return CaseOutcome::Skip("packing instance".into());
    }
    if suite == Suite::Costfree && inst.sense() != Sense::Packing {
        return CaseOutcome::Skip("covering instance".into());
    }
    let result = match suite {
        Suite::Lemma1 => lemma1(inst),
        Suite::Corollary2 => corollary2(inst),
        Suite::Ptas => ptas(inst, opt.as_ref().unwrap()),
        Suite::DisjunctiveEquality => disjunctive(inst, opt.as_ref().unwrap()),
        Suite::Covering => ptas(inst, opt.as_ref().unwrap()).and_then(|_| disjunctive(inst, opt.as_ref().unwrap())),
        Suite::Costfree => costfree(inst, budget),
        Suite::OracleAgreement => oracle_agreement(inst, opt.as_ref().unwrap(), budget),
    };
    match result {
        Ok(()) => CaseOutcome::Pass,
        Err(m) if m.starts_with("too large") => CaseOutcome::Skip(m),
        Err(m) => CaseOutcome::Fail(m),
    }
}

fn rebuild(inst: &KnapsackInstance, a: Vec<Vec<u64>>, b: Vec<u64>, c: Vec<Rational>, d: Vec<Bound>) -> Option<KnapsackInstance> {
    KnapsackInstance::new(inst.sense(), a, b, c, d).ok()
}

/// Smaller neighbours of an instance, most aggressive first.
fn neighbours(inst: &KnapsackInstance) -> Vec<KnapsackInstance> {
    let (a, b, c, d) = (inst.a().to_vec(), inst.b().to_vec(), inst.c().to_vec(), inst.d().to_vec());
    let mut out = Vec::new();
    if inst.n() > 1 {
        for j in 0..inst.n() {
            let drop = |v: &[Bound]| v.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| *x).collect();
            let a2 = a.iter().map(|row| row.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| *x).collect()).collect();
            let c2 = c.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| x.clone()).collect();
            out.extend(rebuild(inst, a2, b.clone(), c2, drop(&d)));
        }
    }
    if inst.k() > 1 {
        for i in 0..inst.k() {
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            a2.remove(i);
            b2.remove(i);
            out.extend(rebuild(inst, a2, b2, c.clone(), d.clone()));
        }
    }
    for j in 0..inst.n() {
        if let Bound::Finite(v) = d[j] {
            for nv in [0, v / 2, v.saturating_sub(1)] {
                if nv < v {
                    let mut d2 = d.clone();
                    d2[j] = Bound::Finite(nv);
                    out.extend(rebuild(inst, a.clone(), b.clone(), c.clone(), d2));
                }
            }
        }
    }
    for i in 0..inst.k() {
        for nv in [0, b[i] / 2, b[i].saturating_sub(1)] {
            if nv < b[i] {
                let mut b2 = b.clone();
                b2[i] = nv;
                out.extend(rebuild(inst, a.clone(), b2, c.clone(), d.clone()));
            }
        }
        for j in 0..inst.n() {
            for nv in [0, a[i][j] / 2, a[i][j].saturating_sub(1)] {
                if nv < a[i][j] {
                    let mut a2 = a.clone();
                    a2[i][j] = nv;
                    out.extend(rebuild(inst, a2, b.clone(), c.clone(), d.clone()));
                }
            }
        }
    }
    for j in 0..inst.n() {
        let one = int(1);
        for nv in [Rational::zero(), (&c[j] - &one).max(Rational::zero())] {
            if nv < c[j] {
                let mut c2 = c.clone();
                c2[j] = nv;
                out.extend(rebuild(inst, a.clone(), b.clone(), c2, d.clone()));
            }
        }
    }
    out.dedup();
    out
}

/// Greedily moves to smaller instances that still fail, up to `max_evals`
/// re-checks.
pub fn shrink(suite: Suite, inst: &KnapsackInstance, budget: u128, max_evals: usize) -> (KnapsackInstance, String) {
    let mut current = inst.clone();
    let mut message = match check_case(suite, inst, budget) {
        CaseOutcome::Fail(m) => m,
        _ => return (current, String::new()),
    };
    let mut evals = 0;
    'outer: while evals < max_evals {
        for cand in neighbours(&current) {
            evals += 1;
            if let CaseOutcome::Fail(m) = check_case(suite, &cand, budget) {
                current = cand;
                message = m;
                continue 'outer;
            }
            if evals >= max_evals {
                break;
            }
        }
        break;
    }
    (current, message)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub count: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failures: Vec<(u64, String)>,
    /// Shrunk version of the first failing instance and its failure message.
    pub counterexample: Option<(KnapsackInstance, String)>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "skipped": self.skipped,
            "failed": self.failures.len(),
            "failures": self.failures.iter().map(|(c, m)| json!({"case": c, "message": m})).collect::<Vec<_>>(),
        })
    }
}

/// Runs `count` random cases; the first failure is shrunk.
pub fn run_suite(suite: Suite, seed: u64, count: u64, budget: u128) -> Result<SuiteReport> {
    let mut report = SuiteReport {
        suite,
        seed,
        count,
        passed: 0,
        skipped: 0,
        failures: Vec::new(),
        counterexample: None,
    };
    for case in 0..count {
        let inst = suite_instance(suite, seed, case);
        match check_case(suite, &inst, budget) {
            CaseOutcome::Pass => report.passed += 1,
            CaseOutcome::Skip(_) => report.skipped += 1,
            CaseOutcome::Fail(m) => {
                if report.counterexample.is_none() {
                    report.counterexample = Some(shrink(suite, &inst, budget, 500));
                }
                report.failures.push((case, m));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DEFAULT_BUDGET;

    #[test]
    fn instances_are_deterministic() {
        for suite in Suite::value_variants() {
            assert_eq!(suite_instance(*suite, 7, 3), suite_instance(*suite, 7, 3));
        }
        assert_ne!(suite_instance(Suite::Lemma1, 7, 3), suite_instance(Suite::Lemma1, 7, 4));
        assert_eq!(suite_instance(Suite::Ptas, 1, 0).sense(), Sense::Packing);
        assert_eq!(suite_instance(Suite::Ptas, 1, 1).sense(), Sense::Covering);
    }

    #[test]
    fn small_runs_pass() {
        for suite in Suite::value_variants() {
            let r = run_suite(*suite, 11, 3, DEFAULT_BUDGET).unwrap();
            assert!(r.ok(), "{:?}", r.to_json());
        }
    }

    #[test]
    fn shrinking_finds_a_smaller_failure() {
        // A check that fails whenever some item has weight at least 5 in row 0.
        let inst = suite_instance(Suite::Lemma1, 3, 0);
        let fails = |i: &KnapsackInstance| i.a()[0].iter().any(|&w| w >= 5);
        let mut cur = inst.clone();
        loop {
            match neighbours(&cur).into_iter().find(|c| fails(c)) {
                Some(c) => cur = c,
                None => break,
            }
        }
        if fails(&inst) {
            assert_eq!(cur.n(), 1);
            assert_eq!(cur.a()[0], vec![5]);
            assert_eq!(cur.k(), 1);
        }
        let (same, msg) = shrink(Suite::Lemma1, &inst, DEFAULT_BUDGET, 10);
        assert_eq!((same, msg), (inst, String::new()));
    }
}
