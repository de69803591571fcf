//! Acceptance run: every criterion on its full randomized suite, one line each.
//! Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kdknap::costfree::{build_costfree_lp, costfree_membership, costfree_solve_gamma, repair_factor, repair_with, DeletionRule};
use kdknap::disjunctive::{build_disjunctive, solve_and_round, value_by_decomposition};
use kdknap::exactlp::{count_fractional, knapsack_relaxation, solve_lp, LpStatus};
use kdknap::filtering::{ptas_solve, PtasConfig};
use kdknap::harness::{suite_instance, Suite};
use kdknap::instance::{normalize, parse_instance, KnapsackInstance, Sense};
use kdknap::oracle::{brute_force, dp_solve, is_extreme_point, lp_by_vertices, DEFAULT_BUDGET};
use kdknap::rational::{ceil_u64, dot, floor_u64, int, ratio, Rational};

const SEED: u64 = 2024;

struct Tally {
    checked: usize,
    violations: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, violations: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

struct Line {
    id: usize,
    name: &'static str,
    tally: Tally,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Line {
    fn passed(&self) -> bool {
        self.tally.violations.is_empty() && self.limit.map_or(true, |l| self.elapsed <= l)
    }

    fn print(&self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let limit = self.limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {} {:<48} {status}  checks={} violations={} time={:.1}s{limit}",
            self.id,
            self.name,
            self.tally.checked,
            self.tally.violations.len(),
            self.elapsed.as_secs_f64()
        );
        for v in self.tally.violations.iter().take(5) {
            println!("    {v}");
        }
    }
}

fn gap_holds(sense: Sense, k: usize, gamma: u64, integral: &Rational, fractional: &Rational) -> bool {
    let q = Rational::new((k as u64).into(), gamma.into());
    match sense {
        Sense::Packing => *integral >= (int(1) - q) * fractional,
        Sense::Covering => *integral <= (int(1) + q) * fractional,
    }
}

/// Criteria 1 and 2 on the same 200 mixed instances.
fn relaxation_criteria() -> (Line, Line) {
    let mut t1 = Tally::new();
    let mut t2 = Tally::new();
    let mut time1 = Duration::ZERO;
    let mut time2 = Duration::ZERO;
    for case in 0..200 {
        let inst = suite_instance(Suite::Lemma1, SEED, case);
        let start = Instant::now();
        let p = knapsack_relaxation(&inst);
        let sol = solve_lp(&p).unwrap();
        if sol.status != LpStatus::Optimal {
            t1.check(false, || format!("case {case}: relaxation {:?}", sol.status));
            continue;
        }
        let frac = count_fractional(&sol.x);
        t1.check(frac <= inst.k() && is_extreme_point(&p, &sol.x), || {
            format!("case {case}: {frac} fractional with k = {}", inst.k())
        });
        time1 += start.elapsed();

        let start = Instant::now();
        let x: Vec<u64> = match inst.sense() {
            Sense::Packing => sol.x.iter().map(|v| floor_u64(v).unwrap()).collect(),
            Sense::Covering => sol.x.iter().map(|v| ceil_u64(v).unwrap()).collect(),
        };
        let loss = (inst.value(&x) - dot(inst.c(), &sol.x)).abs();
        let bound = int(inst.k() as u64) * inst.c_max();
        t2.check(inst.is_feasible(&x) && loss <= bound, || format!("case {case}: loss {loss} bound {bound}"));
        time2 += start.elapsed();
    }
    (
        Line { id: 1, name: "vertex fractional support <= k", tally: t1, elapsed: time1, limit: Some(Duration::from_secs(60)) },
        Line { id: 2, name: "rounding loss <= k*c_max", tally: t2, elapsed: time2, limit: None },
    )
}

/// Criteria 3 to 6 on 100 packing and 100 covering instances, gamma 1..=4.
fn hull_criteria() -> Vec<Line> {
    let mut t = [Tally::new(), Tally::new(), Tally::new(), Tally::new()];
    let mut time = [Duration::ZERO; 4];
    let mut fallbacks = 0;
    for case in 0..200 {
        let inst = suite_instance(Suite::Ptas, SEED, case);
        let opt = brute_force(&inst, DEFAULT_BUDGET).unwrap().value;
        let norm = normalize(&inst);
        let n = inst.n();
        for gamma in 1..=4u64 {
            let start = Instant::now();
            let out = ptas_solve(&norm, &PtasConfig::with_gamma(gamma).unwrap()).unwrap();
            let x = norm.to_original(&out.best.x);
            let v = inst.value(&x);
            let ok = inst.is_feasible(&x) && v == out.best.value && gap_holds(inst.sense(), inst.k(), gamma, &v, &opt);
            t[0].check(ok, || format!("case {case} gamma {gamma}: value {v} OPT {opt}"));
            time[0] += start.elapsed();

            let start = Instant::now();
            let (sol, rounded) = solve_and_round(&norm, gamma).unwrap();
            let dec = value_by_decomposition(&norm, gamma, false).unwrap();
            fallbacks += sol.fallback_used as usize;
            t[1].check(sol.value == dec && !sol.fallback_used, || {
                format!("case {case} gamma {gamma}: hull {} decomposition {dec}", sol.value)
            });
            time[1] += start.elapsed();

            let start = Instant::now();
            t[2].check(gap_holds(inst.sense(), inst.k(), gamma, &opt, &sol.value), || {
                format!("case {case} gamma {gamma}: OPT {opt} hull {}", sol.value)
            });
            let worse = match inst.sense() {
                Sense::Packing => rounded.value <= opt,
                Sense::Covering => rounded.value >= opt,
            };
            t[2].check(worse, || format!("case {case} gamma {gamma}: rounded beats OPT"));
            time[2] += start.elapsed();

            let start = Instant::now();
            let dlp = build_disjunctive(&norm, gamma).unwrap();
            let g = dlp.guesses.len();
            t[3].check(
                dlp.num_vars() == n + g * (2 * n + 1) && sol.lp_vars == dlp.num_vars() && (g as u128) <= (n as u128 + 1).pow(gamma as u32),
                || format!("case {case} gamma {gamma}: {} variables for {g} guesses", dlp.num_vars()),
            );
            time[3] += start.elapsed();
        }
    }
    if fallbacks > 0 {
        println!("    hull extreme points mixing guesses: {fallbacks}");
    }
    let [a, b, c, d] = t;
    vec![
        Line { id: 3, name: "guess-and-round within (1-+k/gamma)", tally: a, elapsed: time[0], limit: Some(Duration::from_secs(300)) },
        Line { id: 4, name: "hull LP = best guess decomposition", tally: b, elapsed: time[1], limit: None },
        Line { id: 5, name: "integrality gap of hull LP", tally: c, elapsed: time[2], limit: None },
        Line { id: 6, name: "hull LP size formula", tally: d, elapsed: time[3], limit: None },
    ]
}

fn costfree_criterion() -> Line {
    let mut t = Tally::new();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for case in 0..50 {
        let inst = suite_instance(Suite::Costfree, SEED, case);
        let gamma = rng.gen_range(1..=3u64);
        let variants: Vec<KnapsackInstance> = (0..3)
            .map(|_| inst.with_costs((0..inst.n()).map(|_| int(rng.gen_range(0..=9))).collect()).unwrap())
            .collect();
        let texts: Vec<String> = variants.iter().map(|v| build_costfree_lp(v, gamma).unwrap().constraints_text()).collect();
        t.check(texts.iter().all_equal(), || format!("case {case}: constraint systems differ"));
        for v in &variants {
            let out = costfree_solve_gamma(v, gamma).unwrap();
            let opt = brute_force(v, DEFAULT_BUDGET).unwrap().value;
            let bound = repair_factor(v.k(), gamma) * &out.value;
            t.check(out.solution.value >= bound && out.solution.value <= opt && opt <= out.value, || {
                format!("case {case}: repaired {} LP {} OPT {opt}", out.solution.value, out.value)
            });
            for rule in [DeletionRule::AtMostK, DeletionRule::ExactlyK] {
                let z = repair_with(v, &out.active, &out.y, rule).unwrap();
                t.check(z.value >= bound, || format!("case {case}: {rule:?} repair below bound"));
            }
        }
        let d = inst.finite_d().unwrap();
        for x in d.iter().map(|&v| 0..=v).multi_cartesian_product() {
            if inst.is_feasible(&x) {
                let y: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
                t.check(costfree_membership(&inst, gamma, &y).unwrap(), || format!("case {case}: {x:?} not lifted"));
            }
        }
    }
    Line { id: 7, name: "cost-free LP independence and repair", tally: t, elapsed: start.elapsed(), limit: None }
}

fn oracle_criterion() -> Line {
    let mut t = Tally::new();
    let start = Instant::now();
    for case in 0..200 {
        let inst = suite_instance(Suite::OracleAgreement, SEED, case);
        match (brute_force(&inst, DEFAULT_BUDGET), dp_solve(&inst, DEFAULT_BUDGET)) {
            (Ok(b), Ok(d)) => t.check(b.value == d.value && inst.is_feasible(&d.x) && inst.value(&d.x) == d.value, || {
                format!("case {case}: brute {} dp {}", b.value, d.value)
            }),
            (Err(e1), Err(e2)) if e1 == e2 => t.check(true, String::new),
            (b, d) => t.check(false, || format!("case {case}: {b:?} vs {d:?}")),
        }
    }
    Line { id: 8, name: "dp agrees with brute force", tally: t, elapsed: start.elapsed(), limit: None }
}

fn running_example_criterion() -> Line {
    let mut t = Tally::new();
    let start = Instant::now();
    let text = r#"{"sense":"packing","k":1,"n":2,"A":[[2,3]],"b":[4],"c":[1,1],"d":[1,1]}"#;
    let packing = parse_instance(text).unwrap();
    let covering = parse_instance(&text.replace("packing", "covering")).unwrap();

    // Oracles first.
    let (v, x) = lp_by_vertices(&knapsack_relaxation(&packing)).unwrap();
    t.check(v == ratio(5, 3) && x == vec![int(1), ratio(2, 3)], || format!("naive LP oracle {v}"));
    let (v, _) = lp_by_vertices(&knapsack_relaxation(&covering)).unwrap();
    t.check(v == ratio(3, 2), || format!("covering LP oracle {v}"));
    let bp = brute_force(&packing, DEFAULT_BUDGET).unwrap();
    t.check(bp.value == int(1) && bp.x == vec![0, 1], || format!("packing OPT {}", bp.value));
    let bc = brute_force(&covering, DEFAULT_BUDGET).unwrap();
    t.check(bc.value == int(2) && bc.x == vec![1, 1], || format!("covering OPT {}", bc.value));

    // Frozen values.
    let lp = solve_lp(&knapsack_relaxation(&packing)).unwrap();
    t.check(lp.value == ratio(5, 3), || format!("naive LP {}", lp.value));
    let np = normalize(&packing);
    let (sol, rounded) = solve_and_round(&np, 1).unwrap();
    t.check(sol.value == ratio(3, 2) && sol.active_guess.g == vec![0, 1], || format!("hull gamma 1: {}", sol.value));
    t.check(sol.x_active == vec![ratio(1, 2), int(0)] && rounded.value == int(1), || "hull rounding".into());
    t.check(build_disjunctive(&np, 1).unwrap().num_vars() == 17, || "hull size".into());
    t.check(value_by_decomposition(&np, 1, false).unwrap() == ratio(3, 2), || "decomposition".into());
    let (sol2, _) = solve_and_round(&np, 2).unwrap();
    t.check(sol2.value == int(1), || format!("hull gamma 2: {}", sol2.value));
    let nc = normalize(&covering);
    let (solc, roundc) = solve_and_round(&nc, 1).unwrap();
    t.check(solc.value == ratio(3, 2) && roundc.value == int(2) && roundc.x == vec![1, 1], || {
        format!("covering hull {} rounded {}", solc.value, roundc.value)
    });
    t.check(build_disjunctive(&nc, 1).unwrap().guesses.len() == 1, || "covering guesses".into());
    let cf = costfree_solve_gamma(&packing, 1).unwrap();
    t.check(cf.value == ratio(3, 2) && cf.solution.value == int(1) && cf.solution.x == vec![0, 1], || {
        format!("cost-free {} repaired {}", cf.value, cf.solution.value)
    });
    t.check(costfree_solve_gamma(&packing, 0).unwrap().value == int(0), || "cost-free gamma 0".into());
    Line { id: 9, name: "running example regression", tally: t, elapsed: start.elapsed(), limit: None }
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut lines = Vec::new();
    let (l1, l2) = relaxation_criteria();
    lines.push(l1);
    lines.push(l2);
    lines.extend(hull_criteria());
    lines.push(costfree_criterion());
    lines.push(oracle_criterion());
    lines.push(running_example_criterion());
    lines.sort_by_key(|l| l.id);
    for l in &lines {
        l.print();
    }
    let failed = lines.iter().filter(|l| !l.passed()).count();
    println!("acceptance: {} of {} criteria passed", lines.len() - failed, lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
