//! Finite-memory strategies from product solutions, and exact strategy verification.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::model::{Arena, Lasso, MooreStrategy, ObjectiveSpec, Player, StrategyError};
use crate::objectives::stronger_smaller;
use crate::reductions::{
    self, Construction, Payload, ProductArena, ProductState, ReductionError, Route, SolveOptions, SolveResult, Step,
    Via,
};
use crate::solvers::WinningRegions;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("{0} wins from no vertex")]
    EmptyRegion(Player),
    #[error("no finite certificate produced: {0} needs infinite memory for prefix-independent bounded objectives")]
    NoFiniteCertificate(Player),
    #[error("the solving route kept no product strategy")]
    NoProductStrategy,
    #[error("strategy is for a different arena")]
    WrongArena,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Finite-memory strategy for `player` winning from every vertex of the player's region.
///
/// Memory states are product payloads plus a start state; the update follows the
/// product transition and `next` projects the product's memoryless strategy. Only
/// memory met in plays from the winning region is kept, then the machine is minimized.
pub fn extract_strategy(arena: &Arena, result: &SolveResult, player: Player) -> Result<MooreStrategy, SynthesisError> {
    certify(arena, result, player).map(|c| c.strategy)
}

/// An extracted strategy with the a-priori memory bound of the construction it came from.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub strategy: MooreStrategy,
    pub memory_bound: usize,
}

pub fn certify(arena: &Arena, result: &SolveResult, player: Player) -> Result<Certificate, SynthesisError> {
    let winning = result.regions.region(player);
    if winning.is_empty() {
        return Err(SynthesisError::EmptyRegion(player));
    }
    if result.spec.kind.is_bounded() && player == Player::P2 {
        if !result.spec.direct {
            return Err(SynthesisError::NoFiniteCertificate(Player::P2));
        }
        if result.route != Route::RequestResponse {
            // P2's strategy for the threshold window only defeats that one window size.
            let rr = reductions::solve_with(arena, &result.spec, None, &SolveOptions::via(Via::RequestResponse))?;
            return certify(arena, &rr, player);
        }
    }
    if result.spec.kind.is_bounded() && result.product_regions.is_none() {
        // The undirect request-response fixpoint keeps no product strategy; winning the
        // threshold window is enough for the bounded objective, when that product fits.
        let family = result.spec.family().unwrap();
        let fits = reductions::bounded_threshold(arena, family).is_ok_and(|t| {
            reductions::fixed_product_bound(arena, family, t) <= SolveOptions::default().max_threshold_states
        });
        if !fits {
            return Err(SynthesisError::NoProductStrategy);
        }
        let fixed = reductions::solve_with(arena, &result.spec, None, &SolveOptions::via(Via::Threshold))?;
        return certify(arena, &fixed, player);
    }
    let regions = result.product_regions.as_ref().ok_or(SynthesisError::NoProductStrategy)?;
    let machine = ProductMachine::new(arena, &result.product, regions, player, &winning);
    Ok(Certificate { strategy: machine.into_strategy(arena)?, memory_bound: memory_bound(arena, &result.product) })
}

/// Memory bound of the construction behind `product`: the number of payloads it can
/// carry (`((d+1)·λ)^n` windows, `λ^{slots}` counters, …) plus the start state.
pub fn memory_bound(arena: &Arena, product: &ProductArena) -> usize {
    let pow = |base: u128, exp: usize| base.checked_pow(exp as u32).unwrap_or(u128::MAX);
    let payloads: u128 = match product.construction() {
        Construction::Identity { .. } => 1,
        Construction::Window { lambda, .. } => pow((u128::from(arena.d()) + 1) * u128::from(*lambda), arena.dims()),
        Construction::Counter { lambda, slots, .. } => pow(u128::from(*lambda), slots.len()),
        Construction::History { lambda, .. } => {
            pow(arena.len() as u128 + 1, *lambda as usize - 1).saturating_mul(arena.len() as u128)
        }
        Construction::Visited { targets } => pow(2, targets.len()),
        Construction::RequestResponse { pairs, .. } => pow(2, *pairs).saturating_mul(2 * (*pairs).max(1) as u128),
    };
    usize::try_from(payloads.saturating_add(1)).unwrap_or(usize::MAX)
}

/// Moore machine read off a product: state 0 is the start state, every other state is
/// a payload met in some play from `winning` consistent with the strategy. Pairs no
/// such play reaches keep their memory and take the first successor.
struct ProductMachine {
    player: Player,
    memory: usize,
    update: Vec<usize>,
    next: Vec<Option<usize>>,
}

impl ProductMachine {
    fn new(
        arena: &Arena,
        product: &ProductArena,
        regions: &WinningRegions,
        player: Player,
        winning: &[usize],
    ) -> ProductMachine {
        let n = arena.len();
        let mut ids: FxHashMap<Payload, usize> = FxHashMap::default();
        let mut payloads: Vec<Payload> = Vec::new();
        let mut update: Vec<usize> = (0..n).map(|_| 0).collect();
        let mut next: Vec<Option<usize>> = (0..n).map(|v| default_next(arena, player, v)).collect();
        let mut seen: FxHashSet<(usize, usize)> = FxHashSet::default();
        let mut queue: VecDeque<(usize, usize)> = winning.iter().map(|&v| (v, 0)).collect();
        for &v in winning {
            seen.insert((v, 0));
        }
        while let Some((v, m)) = queue.pop_front() {
            let current = if m == 0 {
                product.initial_payload(arena, v)
            } else {
                match product.step_payload(arena, &payloads[m - 1], v) {
                    Step::Next(p) => p,
                    Step::Overflow => product.initial_payload(arena, v),
                }
            };
            if arena.owner(v) == player {
                let choice = product
                    .payload_id(&current)
                    .and_then(|pid| product.lookup(v, pid))
                    .and_then(|s| project_choice(arena, product, regions, s, v));
                if let Some(w) = choice {
                    next[m * n + v] = Some(w);
                }
            }
            let u = match ids.get(&current) {
                Some(&u) => u,
                None => {
                    payloads.push(current.clone());
                    ids.insert(current, payloads.len());
                    update.extend((0..n).map(|_| payloads.len()));
                    next.extend((0..n).map(|w| default_next(arena, player, w)));
                    payloads.len()
                }
            };
            update[m * n + v] = u;
            let successors: Vec<usize> = match next[m * n + v] {
                Some(w) => vec![w],
                None => arena.successors(v).collect(),
            };
            for w in successors {
                if seen.insert((w, u)) {
                    queue.push_back((w, u));
                }
            }
        }
        ProductMachine { player, memory: payloads.len() + 1, update, next }
    }

    fn into_strategy(self, arena: &Arena) -> Result<MooreStrategy, SynthesisError> {
        let n = arena.len();
        let (update, next, memory) = minimize(n, self.memory, &self.update, &self.next);
        Ok(MooreStrategy::new(arena, self.player, memory, 0, update, next)?)
    }
}

fn default_next(arena: &Arena, player: Player, v: usize) -> Option<usize> {
    (arena.owner(v) == player).then(|| arena.successors(v).next().unwrap())
}

/// Successor of `v` matching the product choice at state `s`.
fn project_choice(
    arena: &Arena,
    product: &ProductArena,
    regions: &WinningRegions,
    s: usize,
    v: usize,
) -> Option<usize> {
    let target = regions.choice(s)?;
    let position = product.graph().successor_position(s, target)?;
    arena.successors(v).nth(position)
}

/// Moore-machine minimization by partition refinement; state 0 stays initial.
fn minimize(
    n: usize,
    memory: usize,
    update: &[usize],
    next: &[Option<usize>],
) -> (Vec<usize>, Vec<Option<usize>>, usize) {
    let mut class: Vec<usize> = {
        let mut ids: FxHashMap<&[Option<usize>], usize> = FxHashMap::default();
        (0..memory)
            .map(|m| {
                let len = ids.len();
                *ids.entry(&next[m * n..(m + 1) * n]).or_insert(len)
            })
            .collect()
    };
    let mut count = class.iter().max().map_or(0, |&c| c + 1);
    loop {
        let mut ids: FxHashMap<Vec<usize>, usize> = FxHashMap::default();
        let refined: Vec<usize> = (0..memory)
            .map(|m| {
                let mut key = Vec::with_capacity(n + 1);
                key.push(class[m]);
                key.extend((0..n).map(|v| class[update[m * n + v]]));
                let len = ids.len();
                *ids.entry(key).or_insert(len)
            })
            .collect();
        let refined_count = ids.len();
        class = refined;
        if refined_count == count {
            break;
        }
        count = refined_count;
    }
    // Renumber so that the initial state's class is 0 and classes appear in first-use order.
    let mut order = vec![usize::MAX; count];
    let mut representative = Vec::with_capacity(count);
    for m in 0..memory {
        if order[class[m]] == usize::MAX {
            order[class[m]] = representative.len();
            representative.push(m);
        }
    }
    let mut new_update = Vec::with_capacity(count * n);
    let mut new_next = Vec::with_capacity(count * n);
    for &m in &representative {
        for v in 0..n {
            new_update.push(order[class[update[m * n + v]]]);
            new_next.push(next[m * n + v]);
        }
    }
    (new_update, new_next, count)
}

/// Arena of `(v, m)` pairs reachable from `(initial, m0)` in which the strategy owner's
/// moves are fixed. Every vertex is given to the opponent.
#[derive(Clone, Debug)]
pub struct RestrictedArena {
    pub arena: Arena,
    /// `(v, m)` of every restricted vertex.
    pub states: Vec<(usize, usize)>,
}

impl RestrictedArena {
    pub fn vertex_of(&self, r: usize) -> usize {
        self.states[r].0
    }

    /// Restricted vertices over the source vertices in `set`.
    pub fn lift(&self, set: &[usize]) -> Vec<usize> {
        (0..self.states.len()).filter(|&r| set.contains(&self.states[r].0)).collect()
    }
}

pub fn restrict_arena(
    arena: &Arena,
    strategy: &MooreStrategy,
    initial: usize,
) -> Result<RestrictedArena, SynthesisError> {
    strategy.validate(arena).map_err(|_| SynthesisError::WrongArena)?;
    if initial >= arena.len() {
        return Err(ReductionError::UnknownInitial(initial).into());
    }
    let owner = strategy.player();
    let opponent = owner.opponent();
    let mut index: FxHashMap<(usize, usize), usize> = FxHashMap::default();
    let mut states = vec![(initial, strategy.initial())];
    index.insert(states[0], 0);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (v, m) = states[i];
        let u = strategy.update(m, v);
        let targets: Vec<usize> =
            if arena.owner(v) == owner { vec![strategy.next(m, v).unwrap()] } else { arena.successors(v).collect() };
        let mut out = Vec::with_capacity(targets.len());
        for w in targets {
            let id = *index.entry((w, u)).or_insert_with(|| {
                states.push((w, u));
                states.len() - 1
            });
            out.push(id);
        }
        edges.push(out);
        i += 1;
    }
    let mut b = Arena::builder(arena.dims());
    for &(v, m) in &states {
        b.vertex(format!("{}@{}", arena.id(v), m), opponent, arena.priorities(v));
    }
    for (r, out) in edges.iter().enumerate() {
        for &t in out {
            b.edge_idx(r, t);
        }
    }
    b.max_priority((0..arena.dims()).map(|m| arena.max_priority(m)).collect());
    let restricted = b.build().expect("restricted arena inherits validity");
    Ok(RestrictedArena { arena: restricted, states })
}

/// Outcome of [`verify_strategy`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub winning: bool,
    /// A play consistent with the strategy that violates the strategy owner's goal.
    pub counterexample: Option<Lasso>,
}

/// Decides exactly whether `strategy` wins `spec` from `initial`.
pub fn verify_strategy(
    arena: &Arena,
    strategy: &MooreStrategy,
    spec: &ObjectiveSpec,
    initial: usize,
) -> Result<Verification, SynthesisError> {
    spec.check_for(arena).map_err(ReductionError::from)?;
    let restricted = restrict_arena(arena, strategy, initial)?;
    let r_spec = lift_spec(spec, &restricted);
    let options = SolveOptions::via(if spec.kind.is_bounded() { Via::RequestResponse } else { Via::Auto });
    let result = reductions::solve_with(&restricted.arena, &r_spec, None, &options)?;
    let owner = strategy.player();
    if result.regions.wins(owner, 0) {
        return Ok(Verification { winning: true, counterexample: None });
    }
    let counterexample =
        counterexample(&restricted, &r_spec, &result, owner.opponent()).map(|lasso| project_lasso(&restricted, &lasso));
    Ok(Verification { winning: false, counterexample })
}

fn lift_spec(spec: &ObjectiveSpec, restricted: &RestrictedArena) -> ObjectiveSpec {
    let mut lifted = spec.clone();
    lifted.targets = spec.targets.iter().map(|t| restricted.lift(t)).collect();
    lifted
}

fn project_lasso(restricted: &RestrictedArena, lasso: &Lasso) -> Lasso {
    let map = |xs: &[usize]| xs.iter().map(|&r| restricted.vertex_of(r)).collect::<Vec<_>>();
    Lasso::new(map(lasso.stem()), map(lasso.cycle())).expect("nonempty cycle")
}

/// Lasso in the restricted arena won by `winner` from restricted vertex 0.
fn counterexample(
    restricted: &RestrictedArena,
    spec: &ObjectiveSpec,
    result: &SolveResult,
    winner: Player,
) -> Option<Lasso> {
    let arena = &restricted.arena;
    if let Some(regions) = &result.product_regions {
        return follow_product(arena, &result.product, regions, result.product.seed(0), Vec::new());
    }
    // Prefix-independent bounded objective, decided without product strategies. The
    // restricted arena belongs to `winner` alone.
    if winner == Player::P2 {
        return unanswered_cycle(arena);
    }
    // P1 reaches a vertex from which the direct objective holds.
    let mut direct = spec.clone();
    direct.direct = true;
    let solved = reductions::solve_with(arena, &direct, None, &SolveOptions::via(Via::RequestResponse)).ok()?;
    let regions = solved.product_regions.as_ref()?;
    let path = shortest_path(arena, 0, |v| solved.regions.wins(Player::P1, v))?;
    let goal = *path.last().unwrap();
    let prefix = path[..path.len() - 1].to_vec();
    follow_product(arena, &solved.product, regions, solved.product.seed(goal), prefix)
}

/// Lasso from vertex 0 whose cycle holds an odd priority `c` and no priority `≼ c` in
/// the same dimension, so that it violates every bounded objective.
fn unanswered_cycle(arena: &Arena) -> Option<Lasso> {
    for m in 0..arena.dims() {
        for c in (1..=arena.max_priority(m)).step_by(2) {
            let allowed = |v: usize| !stronger_smaller(arena.priority(v, m), c);
            for x in (0..arena.len()).filter(|&x| arena.priority(x, m) == c) {
                let Some(stem) = shortest_path(arena, 0, |v| v == x) else { continue };
                let back = arena
                    .successors(x)
                    .filter(|&w| allowed(w))
                    .find_map(|w| shortest_path_within(arena, w, allowed, |v| v == x));
                if let Some(rest) = back {
                    let mut cycle = vec![x];
                    cycle.extend(&rest[..rest.len() - 1]);
                    let stem = stem[..stem.len() - 1].to_vec();
                    return Lasso::new(stem, cycle).ok().map(|l| l.canonical());
                }
            }
        }
    }
    None
}

/// Plays the memoryless product strategy (first successor where none is recorded) from
/// state `s` until a state repeats, and projects the run after `prefix`.
fn follow_product(
    arena: &Arena,
    product: &ProductArena,
    regions: &WinningRegions,
    mut s: usize,
    prefix: Vec<usize>,
) -> Option<Lasso> {
    let graph = product.graph();
    let mut seen: FxHashMap<usize, usize> = FxHashMap::default();
    let mut run: Vec<Option<usize>> = Vec::new();
    loop {
        if let Some(&i) = seen.get(&s) {
            let stem: Vec<usize> = prefix.iter().copied().chain(run[..i].iter().flatten().copied()).collect();
            let cycle: Vec<usize> = run[i..].iter().flatten().copied().collect();
            return Lasso::new(stem, cycle).ok().map(|l| l.canonical());
        }
        seen.insert(s, run.len());
        match product.state(s) {
            ProductState::Normal { vertex, .. } => run.push(Some(vertex)),
            ProductState::Reset { .. } => run.push(None),
            ProductState::Sink => return None,
        }
        let t = regions.choice(s).unwrap_or_else(|| graph.successors(s).next().unwrap());
        if product.state(t) == ProductState::Sink {
            // Recover the source vertex the overflow moved to.
            let v = product.back_map(s).unwrap();
            let position = graph.successor_position(s, t).unwrap();
            let w = arena.successors(v).nth(position).unwrap();
            let mut stem: Vec<usize> = prefix.iter().copied().chain(run.iter().flatten().copied()).collect();
            return Some(walk_first_successor(arena, &mut stem, w));
        }
        s = t;
    }
}

/// Extends `stem` from `start` by always taking the first successor until a vertex repeats.
fn walk_first_successor(arena: &Arena, stem: &mut Vec<usize>, start: usize) -> Lasso {
    let mut seen: FxHashMap<usize, usize> = FxHashMap::default();
    let mut walk = Vec::new();
    let mut v = start;
    while !seen.contains_key(&v) {
        seen.insert(v, walk.len());
        walk.push(v);
        v = arena.successors(v).next().unwrap();
    }
    let cycle = walk.split_off(seen[&v]);
    stem.extend(walk);
    Lasso::new(std::mem::take(stem), cycle).expect("nonempty cycle").canonical()
}

/// Shortest path from `start` to a vertex satisfying `goal`, both ends included.
fn shortest_path(arena: &Arena, start: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    shortest_path_within(arena, start, |_| true, goal)
}

fn shortest_path_within(
    arena: &Arena,
    start: usize,
    inside: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; arena.len()];
    let mut queue = VecDeque::from([start]);
    parent[start] = start;
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut u = v;
            while u != start {
                u = parent[u];
                path.push(u);
            }
            path.reverse();
            return Some(path);
        }
        for w in arena.successors(v) {
            if parent[w] == usize::MAX && inside(w) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::paper_gallery;
    use crate::reductions::{solve, solve_with};

    #[test]
    fn memoryless_restriction_keeps_size() {
        let arena = paper_gallery("fig5", None).unwrap();
        let s = MooreStrategy::memoryless(&arena, Player::P1, |v| arena.successors(v).next().unwrap()).unwrap();
        let r = restrict_arena(&arena, &s, 0).unwrap();
        assert!(r.arena.len() <= arena.len());
    }

    #[test]
    fn all_even_safety_is_memoryless() {
        let mut b = Arena::builder(1);
        b.vertex("a", Player::P1, &[0]);
        b.vertex("b", Player::P1, &[2]);
        b.edge("a", "b").edge("b", "a").edge("a", "a");
        let arena = b.build().unwrap();
        let spec = ObjectiveSpec::fix_wp(1, true);
        let result = solve(&arena, &spec, None).unwrap();
        let s = extract_strategy(&arena, &result, Player::P1).unwrap();
        assert_eq!(s.size(), 1);
        assert!(verify_strategy(&arena, &s, &spec, 0).unwrap().winning);
    }

    #[test]
    fn fig6_needs_alternation() {
        let arena = paper_gallery("fig6", None).unwrap();
        let spec = ObjectiveSpec::fix_pr(4, true);
        let result = solve(&arena, &spec, None).unwrap();
        assert!(result.regions.wins(Player::P1, 0));
        let s = extract_strategy(&arena, &result, Player::P1).unwrap();
        assert!(s.size() >= 2);
        assert!(verify_strategy(&arena, &s, &spec, 0).unwrap().winning);
        let v1 = arena.vertex("v1").unwrap();
        let always_v1 = MooreStrategy::memoryless(&arena, Player::P1, |v| {
            if v == 0 {
                v1
            } else {
                arena.successors(v).next().unwrap()
            }
        })
        .unwrap();
        let verdict = verify_strategy(&arena, &always_v1, &spec, 0).unwrap();
        assert!(!verdict.winning);
        let cex = verdict.counterexample.unwrap();
        assert_eq!(cex.display(&arena), "| v0 v1 v2");
    }

    #[test]
    fn fig5_p2_strategy_refutes_every_window_objective() {
        let arena = paper_gallery("fig5", None).unwrap();
        for lambda in 1..=6 {
            for spec in [ObjectiveSpec::fix_pr(lambda, true), ObjectiveSpec::fix_wp(lambda, false)] {
                let result = solve(&arena, &spec, None).unwrap();
                let s = extract_strategy(&arena, &result, Player::P2).unwrap();
                let verdict = verify_strategy(&arena, &s, &spec, 0).unwrap();
                assert!(verdict.winning, "{spec}");
            }
        }
        let spec = ObjectiveSpec::bnd_pr(false);
        let result = solve(&arena, &spec, None).unwrap();
        assert_eq!(extract_strategy(&arena, &result, Player::P2), Err(SynthesisError::NoFiniteCertificate(Player::P2)));
    }

    #[test]
    fn bounded_p1_strategy_from_request_response_route() {
        let arena = paper_gallery("fig6", None).unwrap();
        for spec in [ObjectiveSpec::bnd_pr(false), ObjectiveSpec::bnd_wp(false)] {
            let result = solve_with(&arena, &spec, None, &SolveOptions::via(Via::RequestResponse)).unwrap();
            assert!(result.product_regions.is_none());
            let s = extract_strategy(&arena, &result, Player::P1).unwrap();
            assert!(verify_strategy(&arena, &s, &spec, 0).unwrap().winning, "{spec}");
        }
    }
}
