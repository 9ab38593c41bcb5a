use std::collections::HashMap;

use thiserror::Error;

use super::arena::{Arena, Player};
use super::lasso::Lasso;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy has no memory states")]
    NoMemory,
    #[error("initial memory {0} out of range")]
    InitialOutOfRange(usize),
    #[error("table size does not match memory × vertices")]
    TableSize,
    #[error("update({0}, {1}) = {2} is not a memory state")]
    UpdateOutOfRange(usize, String, usize),
    #[error("next({0}, {1}) missing")]
    MissingNext(usize, String),
    #[error("next({0}, {1}) = {2} is not a successor")]
    NotASuccessor(usize, String, String),
    #[error("next({0}, {1}) given for a vertex the player does not own")]
    ForeignVertex(usize, String),
}

/// Finite-memory strategy as a Moore machine.
///
/// The memory after a history `ρ` is `update*(initial, ρ)`; at the current vertex `v`
/// the strategy moves to `next(update*(initial, ρ), v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreStrategy {
    player: Player,
    memory: usize,
    initial: usize,
    vertices: usize,
    update: Vec<usize>,
    next: Vec<Option<usize>>,
}

impl MooreStrategy {
    /// Builds a strategy from full tables indexed by `m * |V| + v`.
    pub fn new(
        arena: &Arena,
        player: Player,
        memory: usize,
        initial: usize,
        update: Vec<usize>,
        next: Vec<Option<usize>>,
    ) -> Result<MooreStrategy, StrategyError> {
        let s = MooreStrategy { player, memory, initial, vertices: arena.len(), update, next };
        s.validate(arena)?;
        Ok(s)
    }

    /// Memoryless strategy choosing `choice(v)` at every vertex of the player.
    pub fn memoryless(
        arena: &Arena,
        player: Player,
        choice: impl Fn(usize) -> usize,
    ) -> Result<MooreStrategy, StrategyError> {
        let n = arena.len();
        let next = (0..n).map(|v| (arena.owner(v) == player).then(|| choice(v))).collect();
        MooreStrategy::new(arena, player, 1, 0, vec![0; n], next)
    }

    pub fn validate(&self, arena: &Arena) -> Result<(), StrategyError> {
        if self.memory == 0 {
            return Err(StrategyError::NoMemory);
        }
        if self.initial >= self.memory {
            return Err(StrategyError::InitialOutOfRange(self.initial));
        }
        let n = arena.len();
        if self.vertices != n || self.update.len() != self.memory * n || self.next.len() != self.memory * n {
            return Err(StrategyError::TableSize);
        }
        for m in 0..self.memory {
            for v in 0..n {
                let u = self.update[m * n + v];
                if u >= self.memory {
                    return Err(StrategyError::UpdateOutOfRange(m, arena.id(v).into(), u));
                }
                match (arena.owner(v) == self.player, self.next[m * n + v]) {
                    (true, None) => return Err(StrategyError::MissingNext(m, arena.id(v).into())),
                    (true, Some(w)) if w >= n || !arena.has_edge(v, w) => {
                        let target = if w < n { arena.id(w).to_string() } else { w.to_string() };
                        return Err(StrategyError::NotASuccessor(m, arena.id(v).into(), target));
                    }
                    (false, Some(_)) => return Err(StrategyError::ForeignVertex(m, arena.id(v).into())),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn player(&self) -> Player {
        self.player
    }

    /// Number of memory states `|M|`.
    pub fn size(&self) -> usize {
        self.memory
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn update(&self, m: usize, v: usize) -> usize {
        self.update[m * self.vertices + v]
    }

    pub fn next(&self, m: usize, v: usize) -> Option<usize> {
        self.next[m * self.vertices + v]
    }

    /// Unique play from `start` when the owner of each vertex follows `self` or `other`.
    pub fn outcome(&self, other: &MooreStrategy, arena: &Arena, start: usize) -> Lasso {
        assert_ne!(self.player, other.player, "strategies must belong to different players");
        let (mut a, mut b) = (self.initial, other.initial);
        let mut v = start;
        let mut seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut play = Vec::new();
        loop {
            if let Some(&i) = seen.get(&(v, a, b)) {
                let cycle = play.split_off(i);
                return Lasso::new(play, cycle).expect("nonempty cycle");
            }
            seen.insert((v, a, b), play.len());
            play.push(v);
            let w = if arena.owner(v) == self.player { self.next(a, v) } else { other.next(b, v) };
            a = self.update(a, v);
            b = other.update(b, v);
            v = w.expect("strategy defined at owned vertex");
        }
    }
}
