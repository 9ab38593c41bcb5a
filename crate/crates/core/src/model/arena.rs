use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// One of the two players. `P1` is the player trying to satisfy the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::P1 => 0,
            Player::P2 => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::P1 => write!(f, "P1"),
            Player::P2 => write!(f, "P2"),
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown player `{0}` (expected 1 or 2)")]
pub struct ParsePlayerError(String);

impl FromStr for Player {
    type Err = ParsePlayerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "P1" | "p1" => Ok(Player::P1),
            "2" | "P2" | "p2" => Ok(Player::P2),
            other => Err(ParsePlayerError(other.to_string())),
        }
    }
}

/// Compact game graph: ownership plus successor and predecessor lists in CSR form.
///
/// Shared by source arenas and product arenas, so that all solvers run on one
/// representation regardless of where the graph came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameGraph {
    owner: Vec<Player>,
    succ_start: Vec<usize>,
    succ: Vec<u32>,
    pred_start: Vec<usize>,
    pred: Vec<u32>,
}

impl GameGraph {
    /// Builds a graph from per-vertex successor lists. Duplicate successors are kept once.
    pub fn from_adjacency(owner: Vec<Player>, adjacency: &[Vec<usize>]) -> GameGraph {
        assert_eq!(owner.len(), adjacency.len());
        let mut builder = GraphBuilder::with_capacity(owner.len(), 0);
        for (v, succs) in adjacency.iter().enumerate() {
            builder.push_vertex(owner[v]);
            for &w in succs {
                if !builder.current_successors().contains(&(w as u32)) {
                    builder.push_edge(w);
                }
            }
        }
        builder.finish()
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.len()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn successors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.succ[self.succ_start[v]..self.succ_start[v + 1]].iter().map(|&w| w as usize)
    }

    pub fn predecessors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.pred[self.pred_start[v]..self.pred_start[v + 1]].iter().map(|&w| w as usize)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.succ_start[v + 1] - self.succ_start[v]
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.successors(v).any(|x| x == w)
    }

    /// Position of `w` in the successor list of `v`.
    pub fn successor_position(&self, v: usize, w: usize) -> Option<usize> {
        self.successors(v).position(|x| x == w)
    }
}

/// Incremental CSR builder. Vertices are pushed in index order, each followed by
/// its outgoing edges.
#[derive(Debug)]
pub struct GraphBuilder {
    owner: Vec<Player>,
    succ_start: Vec<usize>,
    succ: Vec<u32>,
}

impl GraphBuilder {
    pub fn with_capacity(vertices: usize, edges: usize) -> GraphBuilder {
        let mut succ_start = Vec::with_capacity(vertices + 1);
        succ_start.push(0);
        GraphBuilder { owner: Vec::with_capacity(vertices), succ_start, succ: Vec::with_capacity(edges) }
    }

    pub fn push_vertex(&mut self, owner: Player) -> usize {
        if !self.owner.is_empty() {
            self.succ_start.push(self.succ.len());
        }
        self.owner.push(owner);
        self.owner.len() - 1
    }

    pub fn push_edge(&mut self, target: usize) {
        debug_assert!(!self.owner.is_empty());
        self.succ.push(target as u32);
    }

    fn current_successors(&self) -> &[u32] {
        let start = *self.succ_start.last().unwrap();
        &self.succ[start..]
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn finish(mut self) -> GameGraph {
        if !self.owner.is_empty() {
            self.succ_start.push(self.succ.len());
        }
        let n = self.owner.len();
        let mut count = vec![0usize; n + 1];
        for &w in &self.succ {
            assert!((w as usize) < n, "edge target {w} out of range");
            count[w as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let pred_start = count.clone();
        let mut fill = count;
        let mut pred = vec![0u32; self.succ.len()];
        for v in 0..n {
            for &w in &self.succ[self.succ_start[v]..self.succ_start[v + 1]] {
                pred[fill[w as usize]] = v as u32;
                fill[w as usize] += 1;
            }
        }
        GameGraph { owner: self.owner, succ_start: self.succ_start, succ: self.succ, pred_start, pred }
    }
}

/// A problem found while validating a game description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    NoVertices,
    DuplicateVertex { vertex: String },
    DimensionMismatch { vertex: String, expected: usize, found: usize },
    DanglingEdge { source: String, target: String },
    Deadlock { vertex: String },
    PriorityOutOfRange { vertex: String, dim: usize, priority: u32, max: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "no vertices"),
            Violation::DuplicateVertex { vertex } => write!(f, "duplicate vertex {vertex}"),
            Violation::DimensionMismatch { vertex, expected, found } => {
                write!(f, "dimension mismatch at vertex {vertex}: expected {expected} priorities, found {found}")
            }
            Violation::DanglingEdge { source, target } => {
                write!(f, "edge {source} -> {target} has an unknown endpoint")
            }
            Violation::Deadlock { vertex } => write!(f, "deadlock at {vertex}"),
            Violation::PriorityOutOfRange { vertex, dim, priority, max } => {
                write!(f, "priority {priority} of {vertex} in dimension {dim} exceeds maximum {max}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

#[derive(Debug, Error)]
#[error("invalid arena: {0}")]
pub struct ArenaError(pub ValidationReport);

/// Finite game graph with vertex ownership and an `n`-dimension priority table.
#[derive(Clone, Debug)]
pub struct Arena {
    graph: GameGraph,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    dims: usize,
    priorities: Vec<u32>,
    max_priority: Vec<u32>,
}

impl PartialEq for Arena {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
            && self.ids == other.ids
            && self.dims == other.dims
            && self.priorities == other.priorities
            && self.max_priority == other.max_priority
    }
}

impl Arena {
    pub fn builder(dims: usize) -> ArenaBuilder {
        ArenaBuilder::new(dims)
    }

    pub fn graph(&self) -> &GameGraph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.graph.owner(v)
    }

    pub fn successors(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.graph.successors(v)
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        self.graph.has_edge(v, w)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |v| self.successors(v).map(move |w| (v, w)))
    }

    pub fn priority(&self, v: usize, dim: usize) -> u32 {
        self.priorities[v * self.dims + dim]
    }

    pub fn priorities(&self, v: usize) -> &[u32] {
        &self.priorities[v * self.dims..(v + 1) * self.dims]
    }

    /// Maximum priority of dimension `dim`, padded up to an even value.
    pub fn max_priority(&self, dim: usize) -> u32 {
        self.max_priority[dim]
    }

    /// `d = max_m d_m`.
    pub fn d(&self) -> u32 {
        self.max_priority.iter().copied().max().unwrap_or(0)
    }

    pub fn is_one_player(&self, player: Player) -> bool {
        (0..self.len()).all(|v| self.owner(v) == player || self.graph.out_degree(v) == 1)
    }

    /// The same graph keeping only priority dimension `dim`.
    pub fn project_dim(&self, dim: usize) -> Arena {
        let priorities = (0..self.len()).map(|v| self.priority(v, dim)).collect();
        Arena {
            graph: self.graph.clone(),
            ids: self.ids.clone(),
            index: self.index.clone(),
            dims: 1,
            priorities,
            max_priority: vec![self.max_priority[dim]],
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_arena(self)
    }
}

/// Checks the structural invariants of a constructed arena.
pub fn validate_arena(arena: &Arena) -> ValidationReport {
    let mut report = ValidationReport::default();
    if arena.is_empty() {
        report.violations.push(Violation::NoVertices);
    }
    for v in 0..arena.len() {
        if arena.graph.out_degree(v) == 0 {
            report.violations.push(Violation::Deadlock { vertex: arena.id(v).to_string() });
        }
        for m in 0..arena.dims {
            let p = arena.priority(v, m);
            if p > arena.max_priority[m] {
                report.violations.push(Violation::PriorityOutOfRange {
                    vertex: arena.id(v).to_string(),
                    dim: m,
                    priority: p,
                    max: arena.max_priority[m],
                });
            }
        }
    }
    report
}

/// Collects vertices and edges by name and validates them into an [`Arena`].
#[derive(Clone, Debug)]
pub struct ArenaBuilder {
    dims: usize,
    vertices: Vec<(String, Player, Vec<u32>)>,
    index: HashMap<String, usize>,
    edges: Vec<(String, String)>,
    declared_max: Option<Vec<u32>>,
    duplicates: Vec<String>,
}

impl ArenaBuilder {
    pub fn new(dims: usize) -> ArenaBuilder {
        ArenaBuilder {
            dims,
            vertices: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            declared_max: None,
            duplicates: Vec::new(),
        }
    }

    /// Adds a vertex and returns its dense index.
    pub fn vertex(&mut self, id: impl Into<String>, owner: Player, priorities: &[u32]) -> usize {
        let id = id.into();
        if let Some(&v) = self.index.get(&id) {
            self.duplicates.push(id);
            return v;
        }
        let v = self.vertices.len();
        self.index.insert(id.clone(), v);
        self.vertices.push((id, owner, priorities.to_vec()));
        v
    }

    pub fn edge(&mut self, source: impl Into<String>, target: impl Into<String>) -> &mut Self {
        self.edges.push((source.into(), target.into()));
        self
    }

    pub fn edge_idx(&mut self, source: usize, target: usize) -> &mut Self {
        let s = self.vertices[source].0.clone();
        let t = self.vertices[target].0.clone();
        self.edges.push((s, t));
        self
    }

    /// Declares per-dimension maxima instead of inferring them from the priorities.
    pub fn max_priority(&mut self, max: Vec<u32>) -> &mut Self {
        self.declared_max = Some(max);
        self
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.vertices.is_empty() {
            report.violations.push(Violation::NoVertices);
        }
        for id in &self.duplicates {
            report.violations.push(Violation::DuplicateVertex { vertex: id.clone() });
        }
        for (id, _, prios) in &self.vertices {
            if prios.len() != self.dims {
                report.violations.push(Violation::DimensionMismatch {
                    vertex: id.clone(),
                    expected: self.dims,
                    found: prios.len(),
                });
            }
        }
        let mut has_out = vec![false; self.vertices.len()];
        for (s, t) in &self.edges {
            match (self.index.get(s), self.index.get(t)) {
                (Some(&v), Some(_)) => has_out[v] = true,
                _ => report.violations.push(Violation::DanglingEdge { source: s.clone(), target: t.clone() }),
            }
        }
        for (v, out) in has_out.iter().enumerate() {
            if !out {
                report.violations.push(Violation::Deadlock { vertex: self.vertices[v].0.clone() });
            }
        }
        if let Some(max) = &self.declared_max {
            for (id, _, prios) in &self.vertices {
                for (m, (&p, &bound)) in prios.iter().zip(max.iter()).enumerate() {
                    if p > bound {
                        report.violations.push(Violation::PriorityOutOfRange {
                            vertex: id.clone(),
                            dim: m,
                            priority: p,
                            max: bound,
                        });
                    }
                }
            }
        }
        report
    }

    pub fn build(&self) -> Result<Arena, ArenaError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(ArenaError(report));
        }
        let n = self.vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for (s, t) in &self.edges {
            let (v, w) = (self.index[s], self.index[t]);
            if !adjacency[v].contains(&w) {
                adjacency[v].push(w);
            }
        }
        let owner = self.vertices.iter().map(|(_, o, _)| *o).collect();
        let graph = GameGraph::from_adjacency(owner, &adjacency);
        let mut max_priority = match &self.declared_max {
            Some(max) => max.clone(),
            None => vec![0; self.dims],
        };
        let mut priorities = Vec::with_capacity(n * self.dims);
        for (_, _, prios) in &self.vertices {
            for (m, &p) in prios.iter().enumerate() {
                max_priority[m] = max_priority[m].max(p);
            }
            priorities.extend_from_slice(prios);
        }
        for d in &mut max_priority {
            *d += *d % 2;
        }
        Ok(Arena {
            graph,
            ids: self.vertices.iter().map(|(id, _, _)| id.clone()).collect(),
            index: self.index.clone(),
            dims: self.dims,
            priorities,
            max_priority,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig4() -> Arena {
        let mut b = Arena::builder(1);
        for (i, p) in [3, 1, 2, 0].into_iter().enumerate() {
            b.vertex(format!("v{i}"), Player::P1, &[p]);
        }
        b.edge("v0", "v1").edge("v1", "v2").edge("v2", "v3").edge("v3", "v0");
        b.build().unwrap()
    }

    #[test]
    fn self_loop_is_legal() {
        let mut b = Arena::builder(1);
        b.vertex("v", Player::P1, &[0]);
        b.edge("v", "v");
        let arena = b.build().unwrap();
        assert!(validate_arena(&arena).is_ok());
        assert_eq!(arena.d(), 0);
    }

    #[test]
    fn missing_edges_deadlock() {
        let mut b = Arena::builder(1);
        b.vertex("v", Player::P1, &[0]);
        let report = b.validate();
        assert_eq!(report.to_string(), "deadlock at v");
        assert!(b.build().is_err());
    }

    #[test]
    fn fig4_validates_and_pads() {
        let arena = fig4();
        assert!(arena.validate().is_ok());
        assert_eq!(arena.max_priority(0), 4);
        assert_eq!(arena.successors(3).collect::<Vec<_>>(), vec![0]);
        assert_eq!(arena.graph().predecessors(0).collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn reports_each_problem() {
        let mut b = Arena::builder(2);
        b.vertex("a", Player::P1, &[0, 1]);
        b.vertex("a", Player::P2, &[0, 1]);
        b.vertex("b", Player::P2, &[1]);
        b.edge("a", "zz");
        b.edge("b", "a");
        let report = b.validate();
        assert!(report.violations.contains(&Violation::DuplicateVertex { vertex: "a".into() }));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::DimensionMismatch { found: 1, .. })));
        assert!(report.violations.iter().any(|v| matches!(v, Violation::DanglingEdge { .. })));
        assert!(report.violations.contains(&Violation::Deadlock { vertex: "a".into() }));
    }

    #[test]
    fn declared_maximum_is_checked() {
        let mut b = Arena::builder(1);
        b.vertex("a", Player::P1, &[5]);
        b.edge("a", "a");
        b.max_priority(vec![4]);
        assert!(matches!(b.validate().violations[0], Violation::PriorityOutOfRange { priority: 5, max: 4, .. }));
    }
}
