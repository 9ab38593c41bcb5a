//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use winpar::io::parse_lasso;
use winpar::objectives::check_lasso;
use winpar::oracle::{
    genreach_to_fixwp, paper_gallery, random_arena, run_corpus, CorpusConfig, CorpusReport, CrossCheckOptions,
    Execution, RandomArenaParams,
};
use winpar::reductions::{solve, solve_with, SolveOptions, Via};
use winpar::solvers::solve_genreach;
use winpar::synthesis::{certify, verify_strategy};
use winpar::{Arena, MooreStrategy, ObjectiveSpec, Player};

struct Verdict {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Verdict {
        Verdict { pass, detail: detail.into(), notes: Vec::new() }
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gallery membership", c1_membership),
        ("gallery solving", c2_fig5),
        ("memory witnesses", c3_memory),
        ("lattice corpus", c4_lattice),
        ("threshold equalities", c5_thresholds),
        ("cross-algorithm equality", c6_algorithms),
        ("generalized-reachability reduction", c7_genreach),
        ("synthesis soundness", c8_synthesis),
        ("scaling smoke test", c9_scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {status} ({}; {:.2?})", i + 1, v.detail, start.elapsed());
        for note in &v.notes {
            println!("    {note}");
        }
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn p1_wins(arena: &Arena, spec: &ObjectiveSpec, v: usize, via: Via) -> bool {
    solve_with(arena, spec, None, &SolveOptions::via(via)).unwrap().regions.wins(Player::P1, v)
}

fn c1_membership() -> Verdict {
    let arena = paper_gallery("fig4", None).unwrap();
    let lasso = parse_lasso("| v0 v1 v2 v3", &arena).unwrap();
    let cases = [
        (ObjectiveSpec::fix_pr(3, true), true),
        (ObjectiveSpec::fix_wp(4, true), true),
        (ObjectiveSpec::fix_pr(3, false), true),
        (ObjectiveSpec::fix_wp(4, false), true),
        (ObjectiveSpec::fix_wp(3, true), false),
    ];
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(spec, expected)| check_lasso(&arena, &lasso, spec).unwrap().holds != *expected)
        .map(|(spec, _)| spec.to_string())
        .collect();
    Verdict::new(wrong.is_empty(), format!("{} memberships, wrong: {wrong:?}", cases.len()))
}

fn c2_fig5() -> Verdict {
    let arena = paper_gallery("fig5", None).unwrap();
    let mut wrong = Vec::new();
    if !p1_wins(&arena, &ObjectiveSpec::parity(), 0, Via::Auto) {
        wrong.push("parity".to_string());
    }
    let mut checked = 1;
    for direct in [true, false] {
        for lambda in 1..=6 {
            for spec in [ObjectiveSpec::fix_pr(lambda, direct), ObjectiveSpec::fix_wp(lambda, direct)] {
                checked += 1;
                if p1_wins(&arena, &spec, 0, Via::Auto) {
                    wrong.push(spec.to_string());
                }
            }
        }
        for spec in [ObjectiveSpec::bnd_pr(direct), ObjectiveSpec::bnd_wp(direct)] {
            for via in [Via::Threshold, Via::RequestResponse] {
                checked += 1;
                let result = solve_with(&arena, &spec, None, &SolveOptions::via(via)).unwrap();
                if result.regions.wins(Player::P1, 0) {
                    wrong.push(format!("{spec} via {via:?}"));
                }
                if let Some(t) = result.threshold {
                    checked += 1;
                    if p1_wins(&arena, &spec.at_lambda(t), 0, Via::Auto) {
                        wrong.push(format!("{} at threshold", spec.at_lambda(t)));
                    }
                }
            }
        }
    }
    Verdict::new(wrong.is_empty(), format!("{checked} verdicts at v0, wrong: {wrong:?}"))
}

/// Every memoryless strategy of `player`.
fn memoryless_strategies(arena: &Arena, player: Player) -> Vec<MooreStrategy> {
    let owned: Vec<usize> = (0..arena.len()).filter(|&v| arena.owner(v) == player).collect();
    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
    for &v in &owned {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                arena.successors(v).map(move |w| {
                    let mut c = c.clone();
                    c.push(w);
                    c
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .map(|c| MooreStrategy::memoryless(arena, player, |v| c[owned.iter().position(|&u| u == v).unwrap()]).unwrap())
        .collect()
}

fn wins(arena: &Arena, strategy: &MooreStrategy, spec: &ObjectiveSpec, v: usize) -> bool {
    verify_strategy(arena, strategy, spec, v).unwrap().winning
}

/// Two-state machines for fig8 that start in state 0. Memory only changes at the
/// first vertex of a branch (`o*_0`) or an answer path (`e*_0`), which covers every
/// behaviour of a two-state machine on this arena up to renaming the states.
fn fig8_small_machines(arena: &Arena) -> Vec<MooreStrategy> {
    let n = arena.len();
    let hub = arena.vertex("hub").unwrap();
    let switches: Vec<usize> = (0..n).filter(|&v| arena.id(v).ends_with("_0")).collect();
    let answers: Vec<usize> = arena.successors(hub).collect();
    let functions = [[0, 0], [0, 1], [1, 0], [1, 1]];
    let mut out = Vec::new();
    for code in 0..functions.len().pow(switches.len() as u32) {
        for a0 in &answers {
            for a1 in &answers {
                let mut update: Vec<usize> = (0..2 * n).map(|i| i / n).collect();
                let mut c = code;
                for &v in &switches {
                    let f = functions[c % 4];
                    c /= 4;
                    update[v] = f[0];
                    update[n + v] = f[1];
                }
                let mut next = vec![None; 2 * n];
                for m in 0..2 {
                    for v in (0..n).filter(|&v| arena.owner(v) == Player::P1) {
                        next[m * n + v] = arena.successors(v).next();
                    }
                }
                next[hub] = Some(*a0);
                next[n + hub] = Some(*a1);
                out.push(MooreStrategy::new(arena, Player::P1, 2, 0, update, next).unwrap());
            }
        }
    }
    out
}

fn c3_memory() -> Verdict {
    let mut notes = Vec::new();
    let record = |notes: &mut Vec<String>, name: &str, ok: bool, detail: String| {
        notes.push(format!("{name}: {} ({detail})", if ok { "ok" } else { "FAIL" }));
        ok
    };
    let mut all = true;

    let fig6 = paper_gallery("fig6", None).unwrap();
    let mut ok = true;
    let mut sizes = Vec::new();
    for direct in [true, false] {
        let spec = ObjectiveSpec::fix_pr(4, direct);
        let memoryless = memoryless_strategies(&fig6, Player::P1);
        ok &= memoryless.iter().all(|s| !wins(&fig6, s, &spec, 0));
        let cert = certify(&fig6, &solve(&fig6, &spec, Some(0)).unwrap(), Player::P1).unwrap();
        ok &= wins(&fig6, &cert.strategy, &spec, 0) && cert.strategy.size() >= 2;
        sizes.push(cert.strategy.size());
    }
    all &=
        record(&mut notes, "fig6 (Dir)FixPR(4)", ok, format!("memoryless strategies lose, extracted |M| = {sizes:?}"));

    let fig7 = paper_gallery("fig7", None).unwrap();
    let mut ok = true;
    let mut count = 0;
    for direct in [true, false] {
        let spec = ObjectiveSpec::fix_pr(3, direct);
        ok &= !p1_wins(&fig7, &spec, 0, Via::Auto);
        let memoryless = memoryless_strategies(&fig7, Player::P2);
        count = memoryless.len();
        ok &= memoryless.iter().all(|s| !wins(&fig7, s, &spec, 0));
    }
    all &= record(
        &mut notes,
        "fig7 complement of (Dir)FixPR(3)",
        ok,
        format!("P2 wins, all {count} memoryless strategies lose"),
    );

    let fig8 = paper_gallery("fig8", Some(6)).unwrap();
    let spec = ObjectiveSpec::fix_wp(5, false);
    let machines = fig8_small_machines(&fig8);
    let winners = machines.iter().filter(|s| wins(&fig8, s, &spec, 0)).count();
    let cert = certify(&fig8, &solve(&fig8, &spec, Some(0)).unwrap(), Player::P1).unwrap();
    let ok = winners == 0 && wins(&fig8, &cert.strategy, &spec, 0);
    all &= record(
        &mut notes,
        "fig8 d=6 FixWP(5)",
        ok,
        format!("{} machines with |M| ≤ 2, {winners} win; extracted |M| = {}", machines.len(), cert.strategy.size()),
    );

    let fig9 = paper_gallery("fig9", Some(2)).unwrap();
    let memoryless = memoryless_strategies(&fig9, Player::P2);
    for lambda in [5, 4] {
        let spec = ObjectiveSpec::fix_wp(lambda, false);
        let p2_wins = !p1_wins(&fig9, &spec, 0, Via::Auto);
        let memoryless_lose = memoryless.iter().all(|s| !wins(&fig9, s, &spec, 0));
        let detail =
            format!("P2 wins: {p2_wins}, all {} memoryless P2 strategies lose: {memoryless_lose}", memoryless.len());
        if lambda == 5 {
            all &= record(&mut notes, "fig9 n=2 FixWP(5)", p2_wins && memoryless_lose, detail);
        } else {
            notes.push(format!("fig9 n=2 FixWP(4), for comparison: {detail}"));
        }
    }

    let fig10 = paper_gallery("fig10", Some(2)).unwrap();
    let ok = [true, false].iter().all(|&direct| p1_wins(&fig10, &ObjectiveSpec::fix_wp(6, direct), 0, Via::Auto));
    all &= record(&mut notes, "fig10 n=2 (Dir)FixWP(6), 4 dimensions", ok, "P1 wins".into());

    Verdict { pass: all, detail: "5 gallery memory examples".into(), notes }
}

fn summary(report: &CorpusReport) -> String {
    format!(
        "{} arenas, {} checks, {} skipped, {} violations",
        report.arenas,
        report.total.checks,
        report.total.skipped,
        report.total.violations.len()
    )
}

fn violation_notes(report: &CorpusReport) -> Vec<String> {
    report
        .total
        .violations
        .iter()
        .take(5)
        .map(|v| format!("{}: {} at {:?}", v.relation, v.detail, v.vertices))
        .collect()
}

fn corpus(
    seeds: std::ops::Range<u64>,
    max_vertices: usize,
    max_dims: usize,
    max_priority: u32,
    check: CrossCheckOptions,
) -> CorpusReport {
    let config = CorpusConfig { seeds, max_vertices, max_dims, max_priority, check };
    run_corpus(&config, Execution::Parallel)
}

fn c4_lattice() -> Verdict {
    let report = corpus(0..500, 6, 2, 4, CrossCheckOptions::default());
    let mut v = Verdict::new(report.total.is_clean() && report.arenas >= 500, summary(&report));
    v.notes = violation_notes(&report);
    v
}

fn c5_thresholds() -> Verdict {
    let options = CrossCheckOptions { lambdas: Vec::new(), thresholds: true, ..CrossCheckOptions::default() };
    let one = corpus(0..300, 6, 1, 4, options.clone());
    let multi = corpus(1000..1200, 4, 2, 2, CrossCheckOptions { max_product: 2.0e6, ..options });
    let pass = one.total.is_clean() && multi.total.is_clean() && one.total.skipped == 0 && multi.total.skipped == 0;
    let mut v = Verdict::new(pass, format!("one dimension: {}; up to two: {}", summary(&one), summary(&multi)));
    v.notes = violation_notes(&one);
    v.notes.extend(violation_notes(&multi));
    v
}

fn c6_algorithms() -> Verdict {
    let options = CrossCheckOptions { constructions: true, ..CrossCheckOptions::default() };
    let report = corpus(0..500, 6, 2, 4, options);
    let mut v = Verdict::new(
        report.total.is_clean(),
        format!("{}; threshold route compared only where its product fits", summary(&report)),
    );
    v.notes = violation_notes(&report);
    v
}

fn c7_genreach() -> Verdict {
    let mut instances = 0;
    let mut mismatches = Vec::new();
    let mut p1_count = 0;
    for seed in 0..120u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vertices = rng.gen_range(2..=5);
        let params = RandomArenaParams { vertices, density: 0.4, ..RandomArenaParams::default() };
        let arena = random_arena(seed, &params);
        let k = rng.gen_range(1..=2);
        let targets: Vec<Vec<usize>> = (0..k)
            .map(|_| {
                let mut set: Vec<usize> = (0..vertices).filter(|_| rng.gen_bool(0.3)).collect();
                if set.is_empty() {
                    set.push(rng.gen_range(0..vertices));
                }
                set
            })
            .collect();
        let expected = solve_genreach(&arena, &targets).unwrap().wins(Player::P1, 0);
        p1_count += usize::from(expected);
        let reduction = genreach_to_fixwp(&arena, &targets, 0);
        instances += 1;
        for direct in [true, false] {
            for spec in [ObjectiveSpec::fix_wp(reduction.lambda, direct), ObjectiveSpec::bnd_wp(direct)] {
                let got = p1_wins(&reduction.arena, &spec, reduction.restart, Via::Auto);
                if got != expected {
                    mismatches.push(format!("seed {seed}: {spec}"));
                }
            }
        }
    }
    let mut v = Verdict::new(
        instances >= 100 && mismatches.is_empty(),
        format!("{instances} instances ({p1_count} won by P1), 4 kinds each, {} mismatches", mismatches.len()),
    );
    v.notes = mismatches.into_iter().take(5).collect();
    v
}

fn c8_synthesis() -> Verdict {
    let options = CrossCheckOptions { strategies: true, ..CrossCheckOptions::default() };
    let report = corpus(0..500, 6, 2, 4, options);
    let mut gallery_ok = true;
    let mut gallery = 0;
    for (name, spec) in [
        ("fig6", ObjectiveSpec::fix_pr(4, true)),
        ("fig7", ObjectiveSpec::fix_pr(3, false)),
        ("fig8", ObjectiveSpec::fix_wp(5, true)),
        ("fig9", ObjectiveSpec::fix_wp(4, false)),
        ("fig10", ObjectiveSpec::fix_wp(6, false)),
    ] {
        let arena = paper_gallery(name, None).unwrap();
        let result = solve(&arena, &spec, Some(0)).unwrap();
        let player = result.regions.winner(0);
        let cert = certify(&arena, &result, player).unwrap();
        gallery += 1;
        gallery_ok &= cert.strategy.size() <= cert.memory_bound && wins(&arena, &cert.strategy, &spec, 0);
    }
    let t = &report.total;
    let pass = t.is_clean() && gallery_ok && t.max_memory_ratio <= 1.0;
    let mut v = Verdict::new(
        pass,
        format!(
            "{} strategies verified, {} counterexamples fail their objective, max |M|/bound = {:.3}, {} violations; {gallery} gallery certificates ok: {gallery_ok}",
            t.strategies_verified,
            t.counterexamples_checked,
            t.max_memory_ratio,
            t.violations.len()
        ),
    );
    v.notes = violation_notes(&report);
    v
}

fn c9_scaling() -> Verdict {
    let (vertices, d, lambda) = (10_000usize, 6u32, 50u32);
    let mut details = Vec::new();
    let mut pass = true;
    for seed in [1u64, 2] {
        let params =
            RandomArenaParams { vertices, density: 3.0 / vertices as f64, dims: 1, max_priority: d, p1_ratio: 0.5 };
        let arena = random_arena(seed, &params);
        for direct in [false, true] {
            let start = Instant::now();
            let result = solve(&arena, &ObjectiveSpec::fix_wp(lambda, direct), None).unwrap();
            let elapsed = start.elapsed();
            let states = result.product.len();
            let bound = vertices * (d as usize + 1) * lambda as usize;
            pass &= elapsed.as_secs_f64() < 60.0 && states <= bound;
            details.push(format!(
                "seed {seed} {}: {states} states, P1 wins {}, {elapsed:.2?}",
                if direct { "direct" } else { "undirect" },
                result.regions.region(Player::P1).len()
            ));
        }
    }
    Verdict { pass, detail: format!("|V| = {vertices}, d = {d}, λ = {lambda}, limit 60 s"), notes: details }
}
