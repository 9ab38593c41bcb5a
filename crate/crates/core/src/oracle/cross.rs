use std::collections::HashMap;
use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::model::MooreStrategy;
use crate::model::{Arena, Family, ObjectiveSpec, Player};
use crate::objectives::check_lasso;
use crate::reductions::{fixed_product_bound, solve_with, ReductionError, SolveOptions, Via};
use crate::synthesis::{certify, verify_strategy, SynthesisError};

use super::random::{corpus_params, random_arena};

/// What [`cross_check`] runs besides the lattice relations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheckOptions {
    pub lambdas: Vec<u32>,
    /// Fixed objectives at and beyond the thresholds against the bounded ones.
    pub thresholds: bool,
    /// Counter against history product, threshold path against request-response.
    pub constructions: bool,
    /// Extract and verify strategies for both players, refute a naive strategy.
    pub strategies: bool,
    /// Largest a-priori product bound built for threshold comparisons.
    pub max_product: f64,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        CrossCheckOptions {
            lambdas: (1..=4).collect(),
            thresholds: false,
            constructions: false,
            strategies: false,
            max_product: 2.0e5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub relation: String,
    pub detail: String,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub checks: usize,
    pub violations: Vec<ViolationRecord>,
    /// Comparisons left out because an instance was too large.
    pub skipped: usize,
    pub strategies_verified: usize,
    pub counterexamples_checked: usize,
    /// Largest ratio of extracted memory to its construction bound.
    pub max_memory_ratio: f64,
}

impl CrossCheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: CrossCheckReport) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self.skipped += other.skipped;
        self.strategies_verified += other.strategies_verified;
        self.counterexamples_checked += other.counterexamples_checked;
        self.max_memory_ratio = self.max_memory_ratio.max(other.max_memory_ratio);
    }
}

type Key = (String, Option<Via>);

struct Checker<'a> {
    arena: &'a Arena,
    options: &'a CrossCheckOptions,
    cache: HashMap<Key, Option<Vec<bool>>>,
    report: CrossCheckReport,
}

impl Checker<'_> {
    /// P1's winning set, `None` when the instance is out of reach for `via`.
    fn win(&mut self, spec: &ObjectiveSpec, via: Option<Via>) -> Option<Vec<bool>> {
        let key = (spec.to_string(), via);
        if let Some(w) = self.cache.get(&key) {
            return w.clone();
        }
        let options = SolveOptions::via(via.unwrap_or(Via::Auto));
        let w = match solve_with(self.arena, spec, None, &options) {
            Ok(r) => Some(r.regions.mask(Player::P1)),
            Err(ReductionError::ThresholdOverflow) => None,
            Err(e) => {
                self.violation("solver error", format!("{spec}: {e}"), &[]);
                None
            }
        };
        self.cache.insert(key, w.clone());
        w
    }

    fn violation(&mut self, relation: &str, detail: String, vertices: &[usize]) {
        let vertices = vertices.iter().map(|&v| self.arena.id(v).to_string()).collect();
        self.report.violations.push(ViolationRecord { relation: relation.into(), detail, vertices });
    }

    fn subset(&mut self, relation: &str, a: (&ObjectiveSpec, Option<Via>), b: (&ObjectiveSpec, Option<Via>)) {
        let (Some(wa), Some(wb)) = (self.win(a.0, a.1), self.win(b.0, b.1)) else {
            self.report.skipped += 1;
            return;
        };
        self.report.checks += 1;
        let bad: Vec<usize> = (0..wa.len()).filter(|&v| wa[v] && !wb[v]).collect();
        if !bad.is_empty() {
            self.violation(relation, format!("{} ⊄ {}", label(a), label(b)), &bad);
        }
    }

    fn equal(&mut self, relation: &str, a: (&ObjectiveSpec, Option<Via>), b: (&ObjectiveSpec, Option<Via>)) {
        let (Some(wa), Some(wb)) = (self.win(a.0, a.1), self.win(b.0, b.1)) else {
            self.report.skipped += 1;
            return;
        };
        self.report.checks += 1;
        let bad: Vec<usize> = (0..wa.len()).filter(|&v| wa[v] != wb[v]).collect();
        if !bad.is_empty() {
            self.violation(relation, format!("{} ≠ {}", label(a), label(b)), &bad);
        }
    }

    fn lattice(&mut self) {
        let arena = self.arena;
        let half = arena.d() / 2;
        let lambdas = self.options.lambdas.clone();
        for direct in [true, false] {
            let bnd_pr = ObjectiveSpec::bnd_pr(direct);
            let bnd_wp = ObjectiveSpec::bnd_wp(direct);
            self.equal("BndPR = BndWP", (&bnd_pr, None), (&bnd_wp, None));
            if arena.dims() == 1 {
                self.subset("BndWP ⊆ Parity", (&bnd_wp, None), (&ObjectiveSpec::parity(), None));
            } else {
                for m in 0..arena.dims() {
                    let projected = arena.project_dim(m);
                    let (Some(wb), Ok(par)) = (
                        self.win(&bnd_wp, None),
                        solve_with(&projected, &ObjectiveSpec::parity(), None, &SolveOptions::default()),
                    ) else {
                        self.report.skipped += 1;
                        continue;
                    };
                    self.report.checks += 1;
                    let bad: Vec<usize> =
                        (0..wb.len()).filter(|&v| wb[v] && !par.regions.wins(Player::P1, v)).collect();
                    if !bad.is_empty() {
                        self.violation("BndWP ⊆ Parity", format!("{bnd_wp} ⊄ parity of dimension {m}"), &bad);
                    }
                }
            }
            for &lambda in &lambdas {
                for family in [Family::PR, Family::WP] {
                    let fix = ObjectiveSpec::window(family, Some(lambda), direct);
                    let bnd = ObjectiveSpec::window(family, None, direct);
                    self.subset("Fix ⊆ Bnd", (&fix, None), (&bnd, None));
                    if direct {
                        self.subset(
                            "Dir ⊆ undirect",
                            (&fix, None),
                            (&ObjectiveSpec::window(family, Some(lambda), false), None),
                        );
                    }
                    let bigger = ObjectiveSpec::window(family, Some(lambda + 1), direct);
                    self.subset("λ-monotonicity", (&fix, None), (&bigger, None));
                }
                let pr = ObjectiveSpec::fix_pr(lambda, direct);
                let wp = ObjectiveSpec::fix_wp(lambda, direct);
                self.subset("FixWP(λ) ⊆ FixPR(λ)", (&wp, None), (&pr, None));
                let scaled = ObjectiveSpec::fix_wp((half * lambda).max(1), direct);
                self.subset("FixPR(λ) ⊆ FixWP(d/2·λ)", (&pr, None), (&scaled, None));
                if arena.d() <= 2 {
                    self.equal("d ≤ 2: FixPR = FixWP", (&pr, None), (&wp, None));
                }
            }
            if direct {
                self.subset("Dir ⊆ undirect", (&bnd_pr, None), (&ObjectiveSpec::bnd_pr(false), None));
                self.subset("Dir ⊆ undirect", (&bnd_wp, None), (&ObjectiveSpec::bnd_wp(false), None));
            }
        }
    }

    fn thresholds(&mut self) {
        let arena = self.arena;
        let n = arena.len() as u32;
        let half = arena.d() / 2;
        for direct in [true, false] {
            for family in [Family::PR, Family::WP] {
                let start = if arena.dims() == 1 {
                    match family {
                        Family::PR => n,
                        Family::WP => (half * n).max(1),
                    }
                } else {
                    match crate::reductions::bounded_threshold(arena, family) {
                        Ok(t) => t,
                        Err(_) => {
                            self.report.skipped += 1;
                            continue;
                        }
                    }
                };
                if fixed_product_bound(arena, family, start + 1) > self.options.max_product {
                    self.report.skipped += 1;
                    continue;
                }
                let bnd = ObjectiveSpec::window(family, None, direct);
                for lambda in [start, start + 1] {
                    let fix = ObjectiveSpec::window(family, Some(lambda), direct);
                    self.equal("threshold equality", (&fix, None), (&bnd, Some(Via::RequestResponse)));
                }
            }
        }
    }

    fn constructions(&mut self) {
        let arena = self.arena;
        let lambdas = self.options.lambdas.clone();
        for direct in [true, false] {
            if arena.dims() == 1 {
                for &lambda in &lambdas {
                    let spec = ObjectiveSpec::fix_pr(lambda, direct);
                    self.equal("counter = history", (&spec, None), (&spec, Some(Via::History)));
                }
            }
            for family in [Family::PR, Family::WP] {
                let feasible = crate::reductions::bounded_threshold(arena, family)
                    .is_ok_and(|t| fixed_product_bound(arena, family, t) <= self.options.max_product);
                if !feasible {
                    self.report.skipped += 1;
                    continue;
                }
                let bnd = ObjectiveSpec::window(family, None, direct);
                self.equal(
                    "threshold = request-response",
                    (&bnd, Some(Via::Threshold)),
                    (&bnd, Some(Via::RequestResponse)),
                );
            }
        }
    }

    fn strategies(&mut self) {
        let arena = self.arena;
        let mut specs = Vec::new();
        for &lambda in &self.options.lambdas {
            for direct in [true, false] {
                specs.push(ObjectiveSpec::fix_pr(lambda, direct));
                specs.push(ObjectiveSpec::fix_wp(lambda, direct));
            }
        }
        for direct in [true, false] {
            specs.push(ObjectiveSpec::bnd_pr(direct));
            specs.push(ObjectiveSpec::bnd_wp(direct));
        }
        if arena.dims() == 1 {
            specs.push(ObjectiveSpec::parity());
        }
        for spec in specs {
            let Ok(result) = solve_with(arena, &spec, None, &SolveOptions::default()) else {
                self.report.skipped += 1;
                continue;
            };
            for player in [Player::P1, Player::P2] {
                let region = result.regions.region(player);
                if region.is_empty() {
                    continue;
                }
                let cert = match certify(arena, &result, player) {
                    Ok(c) => c,
                    Err(SynthesisError::NoFiniteCertificate(_) | SynthesisError::NoProductStrategy) => {
                        self.report.skipped += 1;
                        continue;
                    }
                    Err(e) => {
                        self.violation("synthesis", format!("{spec} for {player}: {e}"), &[]);
                        continue;
                    }
                };
                let size = cert.strategy.size();
                self.report.max_memory_ratio = self.report.max_memory_ratio.max(size as f64 / cert.memory_bound as f64);
                if size > cert.memory_bound {
                    self.violation("memory bound", format!("{spec} for {player}: {size} > {}", cert.memory_bound), &[]);
                }
                for &v in &region {
                    self.report.checks += 1;
                    match verify_strategy(arena, &cert.strategy, &spec, v) {
                        Ok(verdict) if verdict.winning => self.report.strategies_verified += 1,
                        Ok(_) => self.violation("extracted strategy verifies", format!("{spec} for {player}"), &[v]),
                        Err(e) => {
                            self.violation("extracted strategy verifies", format!("{spec} for {player}: {e}"), &[v])
                        }
                    }
                }
            }
            // A naive strategy from where its player loses must be refuted by a lasso.
            for player in [Player::P1, Player::P2] {
                let losing = result.regions.region(player.opponent());
                let Some(&v) = losing.first() else { continue };
                let naive = MooreStrategy::memoryless(arena, player, |u| arena.successors(u).next().unwrap())
                    .expect("first successors form a strategy");
                self.refute(&naive, &spec, v);
            }
        }
    }

    fn refute(&mut self, strategy: &MooreStrategy, spec: &ObjectiveSpec, v: usize) {
        let player = strategy.player();
        self.report.checks += 1;
        let verdict = match verify_strategy(self.arena, strategy, spec, v) {
            Ok(verdict) => verdict,
            Err(e) => return self.violation("refutation", format!("{spec} for {player}: {e}"), &[v]),
        };
        if verdict.winning {
            return self.violation("losing strategy verifies", format!("{spec} for {player}"), &[v]);
        }
        let Some(lasso) = verdict.counterexample else {
            // Against P1's strategy, P2 may need ever longer delays: no lasso refutes it.
            if !(spec.kind.is_bounded() && !spec.direct && player == Player::P1) {
                self.violation("counterexample produced", format!("{spec} for {player}"), &[v]);
            }
            return;
        };
        self.report.counterexamples_checked += 1;
        let consistent = lasso.validate(self.arena).is_ok() && lasso.at(0) == v;
        let fails = check_lasso(self.arena, &lasso, spec).is_ok_and(|o| o.holds == (player == Player::P2));
        if !consistent || !fails {
            self.violation(
                "counterexample fails the objective",
                format!("{spec}: {}", lasso.display(self.arena)),
                &[v],
            );
        }
    }
}

fn label((spec, via): (&ObjectiveSpec, Option<Via>)) -> String {
    match via {
        Some(via) => format!("{spec} via {via:?}"),
        None => spec.to_string(),
    }
}

/// Runs the objective lattice (and the optional extra comparisons) on one arena.
pub fn cross_check(arena: &Arena, options: &CrossCheckOptions) -> CrossCheckReport {
    let mut checker = Checker { arena, options, cache: HashMap::new(), report: CrossCheckReport::default() };
    checker.lattice();
    if options.thresholds {
        checker.thresholds();
    }
    if options.constructions {
        checker.constructions();
    }
    if options.strategies {
        checker.strategies();
    }
    checker.report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Execution {
    /// Seeds spread over the rayon pool; sequential when built without `parallel`.
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub seeds: Range<u64>,
    pub max_vertices: usize,
    pub max_dims: usize,
    pub max_priority: u32,
    pub check: CrossCheckOptions,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seeds: 0..500,
            max_vertices: 6,
            max_dims: 2,
            max_priority: 4,
            check: CrossCheckOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusReport {
    pub arenas: usize,
    pub total: CrossCheckReport,
    /// Seeds with at least one violation.
    pub failing_seeds: Vec<u64>,
}

/// Random arena for a corpus seed.
pub fn corpus_arena(seed: u64, config: &CorpusConfig) -> Arena {
    let params = corpus_params(seed, config.max_vertices, config.max_dims, config.max_priority);
    random_arena(seed, &params)
}

pub fn run_corpus(config: &CorpusConfig, execution: Execution) -> CorpusReport {
    let one = |seed: u64| (seed, cross_check(&corpus_arena(seed, config), &config.check));
    let seeds = config.seeds.clone();
    let results: Vec<(u64, CrossCheckReport)> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => seeds.into_par_iter().map(one).collect(),
        _ => seeds.map(one).collect(),
    };
    let mut report = CorpusReport::default();
    for (seed, r) in results {
        report.arenas += 1;
        if !r.is_clean() {
            report.failing_seeds.push(seed);
        }
        report.total.merge(r);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::paper_gallery;

    #[test]
    fn fig5_lattice_is_clean() {
        let arena = paper_gallery("fig5", None).unwrap();
        let options = CrossCheckOptions {
            lambdas: (1..=6).collect(),
            thresholds: true,
            constructions: true,
            strategies: true,
            ..CrossCheckOptions::default()
        };
        let report = cross_check(&arena, &options);
        assert!(report.is_clean(), "{:?}", report.violations);
        assert!(report.strategies_verified > 0);
    }

    #[test]
    fn even_self_loop_is_won_everywhere() {
        let mut b = Arena::builder(1);
        b.vertex("v", Player::P2, &[0]);
        b.edge("v", "v");
        let arena = b.build().unwrap();
        for spec in crate::reductions::window_specs(1).into_iter().chain([ObjectiveSpec::parity()]) {
            let r = solve_with(&arena, &spec, None, &SolveOptions::default()).unwrap();
            assert!(r.regions.wins(Player::P1, 0), "{spec}");
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let config = CorpusConfig { seeds: 0..12, ..CorpusConfig::default() };
        assert_eq!(run_corpus(&config, Execution::Parallel), run_corpus(&config, Execution::Sequential));
    }
}
