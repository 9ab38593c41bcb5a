//! Classical backends: attractors, reachability and safety, Büchi and co-Büchi,
//! Zielonka's parity algorithm.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{Arena, GameGraph, ObjectiveSpec, Player};
use crate::reductions::ReductionError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("parity backend is one-dimensional")]
    ParityDimensions,
}

/// Winner of every vertex, with an optional memoryless choice at each vertex owned
/// by the player who wins it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinningRegions {
    winner: Vec<Player>,
    strategy: Vec<Option<usize>>,
}

impl WinningRegions {
    pub fn new(winner: Vec<Player>, strategy: Vec<Option<usize>>) -> WinningRegions {
        assert_eq!(winner.len(), strategy.len());
        WinningRegions { winner, strategy }
    }

    pub fn without_strategy(winner: Vec<Player>) -> WinningRegions {
        let n = winner.len();
        WinningRegions { winner, strategy: vec![None; n] }
    }

    fn from_mask(graph: &GameGraph, p1_wins: &[bool], mut strategy: Vec<Option<usize>>) -> WinningRegions {
        let winner: Vec<Player> = p1_wins.iter().map(|&w| if w { Player::P1 } else { Player::P2 }).collect();
        for v in 0..graph.len() {
            if graph.owner(v) != winner[v] {
                strategy[v] = None;
            }
        }
        WinningRegions { winner, strategy }
    }

    pub fn len(&self) -> usize {
        self.winner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.winner.is_empty()
    }

    pub fn winner(&self, v: usize) -> Player {
        self.winner[v]
    }

    pub fn winners(&self) -> &[Player] {
        &self.winner
    }

    pub fn wins(&self, player: Player, v: usize) -> bool {
        self.winner[v] == player
    }

    /// Sorted vertex indices won by `player`.
    pub fn region(&self, player: Player) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.winner[v] == player).collect()
    }

    pub fn mask(&self, player: Player) -> Vec<bool> {
        self.winner.iter().map(|&w| w == player).collect()
    }

    /// Memoryless choice at `v`, if `v` is owned by its winner and a strategy is known.
    pub fn choice(&self, v: usize) -> Option<usize> {
        self.strategy[v]
    }

    pub fn has_strategy(&self) -> bool {
        self.strategy.iter().any(Option::is_some)
    }
}

/// Attractor region with ranks and the rank-decreasing strategy.
#[derive(Clone, Debug)]
pub struct Attractor {
    pub region: Vec<bool>,
    /// Distance to the target, `u32::MAX` outside the region.
    pub rank: Vec<u32>,
    /// Lowest-index rank-decreasing successor at the player's non-target vertices.
    pub strategy: Vec<Option<usize>>,
}

/// Vertices from which `player` forces a visit to `target`.
pub fn attractor(graph: &GameGraph, player: Player, target: &[bool]) -> Attractor {
    attractor_within(graph, None, player, target)
}

/// Attractor inside the subgame `within`; edges leaving the subgame are ignored.
pub(crate) fn attractor_within(
    graph: &GameGraph,
    within: Option<&[bool]>,
    player: Player,
    target: &[bool],
) -> Attractor {
    let n = graph.len();
    let inside = |v: usize| within.is_none_or(|w| w[v]);
    let mut region = vec![false; n];
    let mut rank = vec![u32::MAX; n];
    let mut pending: Vec<u32> = vec![0; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if !inside(v) {
            continue;
        }
        if target[v] {
            region[v] = true;
            rank[v] = 0;
            queue.push_back(v);
        } else if graph.owner(v) != player {
            pending[v] = graph.successors(v).filter(|&w| inside(w)).count() as u32;
        }
    }
    while let Some(u) = queue.pop_front() {
        for p in graph.predecessors(u) {
            if region[p] || !inside(p) {
                continue;
            }
            if graph.owner(p) != player {
                pending[p] -= 1;
                if pending[p] > 0 {
                    continue;
                }
            }
            region[p] = true;
            rank[p] = rank[u] + 1;
            queue.push_back(p);
        }
    }
    let strategy = (0..n)
        .map(|v| {
            if !region[v] || target[v] || graph.owner(v) != player {
                return None;
            }
            graph.successors(v).filter(|&w| inside(w) && rank[w] < rank[v]).min()
        })
        .collect();
    Attractor { region, rank, strategy }
}

/// Lowest-index successor of `v` inside `region`.
pub(crate) fn stay_choice(graph: &GameGraph, v: usize, region: &[bool]) -> Option<usize> {
    graph.successors(v).filter(|&w| region[w]).min()
}

pub fn solve_reachability(graph: &GameGraph, target: &[bool]) -> WinningRegions {
    let attr = attractor(graph, Player::P1, target);
    let lose: Vec<bool> = attr.region.iter().map(|&r| !r).collect();
    let strategy = (0..graph.len())
        .map(|v| match (attr.region[v], graph.owner(v)) {
            (true, Player::P1) => attr.strategy[v].or_else(|| graph.successors(v).min()),
            (false, Player::P2) => stay_choice(graph, v, &lose),
            _ => None,
        })
        .collect();
    WinningRegions::from_mask(graph, &attr.region, strategy)
}

pub fn solve_safety(graph: &GameGraph, safe: &[bool]) -> WinningRegions {
    let unsafe_: Vec<bool> = safe.iter().map(|&s| !s).collect();
    let attr = attractor(graph, Player::P2, &unsafe_);
    let win1: Vec<bool> = attr.region.iter().map(|&r| !r).collect();
    let strategy = (0..graph.len())
        .map(|v| match (win1[v], graph.owner(v)) {
            (true, Player::P1) => stay_choice(graph, v, &win1),
            (false, Player::P2) => attr.strategy[v].or_else(|| graph.successors(v).min()),
            _ => None,
        })
        .collect();
    WinningRegions::from_mask(graph, &win1, strategy)
}

/// Büchi game for `player` inside the subgame `within`: returns the player's winning
/// region (a subset of `within`) and memoryless strategies for both players.
pub(crate) fn buchi_within(
    graph: &GameGraph,
    within: &[bool],
    player: Player,
    accepting: &[bool],
) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = graph.len();
    let opponent = player.opponent();
    let mut game = within.to_vec();
    let mut strategy = vec![None; n];
    loop {
        let target: Vec<bool> = (0..n).map(|v| game[v] && accepting[v]).collect();
        let reach = attractor_within(graph, Some(&game), player, &target);
        let trap: Vec<bool> = (0..n).map(|v| game[v] && !reach.region[v]).collect();
        if !trap.iter().any(|&t| t) {
            for v in (0..n).filter(|&v| game[v] && graph.owner(v) == player) {
                strategy[v] = if target[v] { stay_choice(graph, v, &game) } else { reach.strategy[v] };
            }
            return (game, strategy);
        }
        let escape = attractor_within(graph, Some(&game), opponent, &trap);
        for v in (0..n).filter(|&v| escape.region[v]) {
            if graph.owner(v) == opponent {
                strategy[v] = if trap[v] { stay_choice(graph, v, &trap) } else { escape.strategy[v] };
            }
            game[v] = false;
        }
    }
}

/// P1 visits `accepting` infinitely often.
pub fn solve_buchi(graph: &GameGraph, accepting: &[bool]) -> WinningRegions {
    let all = vec![true; graph.len()];
    let (win1, strategy) = buchi_within(graph, &all, Player::P1, accepting);
    WinningRegions::from_mask(graph, &win1, strategy)
}

/// P1 eventually stays in `allowed`; solved as P2's Büchi game on the complement.
pub fn solve_cobuchi(graph: &GameGraph, allowed: &[bool]) -> WinningRegions {
    let all = vec![true; graph.len()];
    let bad: Vec<bool> = allowed.iter().map(|&a| !a).collect();
    let (win2, strategy) = buchi_within(graph, &all, Player::P2, &bad);
    let win1: Vec<bool> = win2.iter().map(|&w| !w).collect();
    WinningRegions::from_mask(graph, &win1, strategy)
}

/// Parity game on a one-dimension arena: the minimal priority seen infinitely often is even.
pub fn solve_parity(arena: &Arena) -> Result<WinningRegions, SolverError> {
    if arena.dims() != 1 {
        return Err(SolverError::ParityDimensions);
    }
    let priorities: Vec<u32> = (0..arena.len()).map(|v| arena.priority(v, 0)).collect();
    Ok(solve_parity_graph(arena.graph(), &priorities))
}

pub fn solve_parity_graph(graph: &GameGraph, priorities: &[u32]) -> WinningRegions {
    let n = graph.len();
    let mut strategy = vec![None; n];
    let all = vec![true; n];
    let [win1, _] = zielonka(graph, priorities, &all, &mut strategy);
    WinningRegions::from_mask(graph, &win1, strategy)
}

fn zielonka(graph: &GameGraph, priorities: &[u32], within: &[bool], strategy: &mut [Option<usize>]) -> [Vec<bool>; 2] {
    let n = graph.len();
    let Some(p) = (0..n).filter(|&v| within[v]).map(|v| priorities[v]).min() else {
        return [vec![false; n], vec![false; n]];
    };
    let alpha = if p % 2 == 0 { Player::P1 } else { Player::P2 };
    let beta = alpha.opponent();
    let top: Vec<bool> = (0..n).map(|v| within[v] && priorities[v] == p).collect();
    let attr = attractor_within(graph, Some(within), alpha, &top);
    let sub: Vec<bool> = (0..n).map(|v| within[v] && !attr.region[v]).collect();
    let won = zielonka(graph, priorities, &sub, strategy);
    if !won[beta.index()].iter().any(|&w| w) {
        for v in (0..n).filter(|&v| attr.region[v] && graph.owner(v) == alpha) {
            strategy[v] = if top[v] { stay_choice(graph, v, within) } else { attr.strategy[v] };
        }
        let mut out = [vec![false; n], vec![false; n]];
        out[alpha.index()] = within.to_vec();
        return out;
    }
    let escape = attractor_within(graph, Some(within), beta, &won[beta.index()]);
    for v in 0..n {
        if escape.region[v] && !won[beta.index()][v] && graph.owner(v) == beta {
            strategy[v] = escape.strategy[v];
        }
    }
    let rest: Vec<bool> = (0..n).map(|v| within[v] && !escape.region[v]).collect();
    let mut out = zielonka(graph, priorities, &rest, strategy);
    for (won, &escaped) in out[beta.index()].iter_mut().zip(&escape.region) {
        *won |= escaped;
    }
    out
}

/// Generalized reachability: visit every `targets[i]` at least once. Solved on the
/// product with the set of visited target indices; projected to source vertices.
pub fn solve_genreach(arena: &Arena, targets: &[Vec<usize>]) -> Result<WinningRegions, ReductionError> {
    let spec = ObjectiveSpec::genreach(targets.to_vec());
    Ok(crate::reductions::solve(arena, &spec, None)?.regions)
}
