use rustc_hash::FxHashMap;
use serde::Serialize;
use smallvec::SmallVec;

use crate::model::{Arena, GameGraph, GraphBuilder, Player};
use crate::objectives::stronger_smaller;
use crate::solvers::{self, WinningRegions};

use super::rr::RequestResponsePair;

/// Per-state annotation, interned. Its layout depends on the [`Construction`].
pub type Payload = SmallVec<[u32; 8]>;

const RESET: u32 = u32::MAX - 1;
const SINK: u32 = u32::MAX;
const SENTINEL: u32 = u32::MAX;

/// A product state as seen from outside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ProductState {
    /// Source vertex together with an interned payload.
    Normal { vertex: usize, payload: usize },
    /// `β_v`: bookkeeping state after an overflow, leading to the reset state at `v`.
    Reset { vertex: usize },
    /// Absorbing `β` of the direct constructions.
    Sink,
}

/// What the product's target set means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProductObjective {
    /// Stay in the target set forever.
    Safety,
    /// Eventually stay in the target set.
    CoBuchi,
    /// Visit the target set infinitely often.
    Buchi,
    /// Visit the target set once.
    Reachability,
    /// Source priorities, minimal one seen infinitely often is even.
    Parity,
}

/// The annotation scheme of a product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// The arena itself, with a classical objective on `target`.
    Identity { objective: ProductObjective, target: Vec<bool> },
    /// Window minimum and age per dimension: `[c_1, l_1, …, c_n, l_n]`.
    Window { lambda: u32, direct: bool },
    /// One counter per (dimension, odd priority), `0` for ⊥ and `k + 1` for `k`.
    Counter { lambda: u32, direct: bool, slots: Vec<(usize, u32)> },
    /// Last λ vertices, oldest first, padded with a sentinel of priority `d`.
    History { lambda: u32, direct: bool },
    /// Bitmask of target sets already visited.
    Visited { targets: Vec<Vec<bool>> },
    /// Pending requests (two words), pointer, and wrap flag.
    RequestResponse { requests: Vec<u64>, responses: Vec<u64>, pairs: usize },
}

pub(crate) enum Step {
    Next(Payload),
    Overflow,
}

impl Construction {
    pub fn window(lambda: u32, direct: bool) -> Construction {
        assert!(lambda >= 1);
        Construction::Window { lambda, direct }
    }

    pub fn counter(arena: &Arena, lambda: u32, direct: bool) -> Construction {
        assert!(lambda >= 2, "counter product needs λ ≥ 2");
        let slots =
            (0..arena.dims()).flat_map(|m| (1..=arena.max_priority(m)).step_by(2).map(move |c| (m, c))).collect();
        Construction::Counter { lambda, direct, slots }
    }

    pub fn history(lambda: u32, direct: bool) -> Construction {
        assert!(lambda >= 1);
        Construction::History { lambda, direct }
    }

    pub fn visited(arena: &Arena, targets: &[Vec<usize>]) -> Construction {
        let targets = targets
            .iter()
            .map(|set| {
                let mut mask = vec![false; arena.len()];
                for &v in set {
                    mask[v] = true;
                }
                mask
            })
            .collect();
        Construction::Visited { targets }
    }

    pub fn request_response(arena: &Arena, pairs: &[RequestResponsePair]) -> Construction {
        assert!(pairs.len() <= 64, "at most 64 request-response pairs");
        let mut requests = vec![0u64; arena.len()];
        let mut responses = vec![0u64; arena.len()];
        for (i, pair) in pairs.iter().enumerate() {
            for &v in &pair.requests {
                requests[v] |= 1 << i;
            }
            for &v in &pair.responses {
                responses[v] |= 1 << i;
            }
        }
        Construction::RequestResponse { requests, responses, pairs: pairs.len() }
    }

    fn direct(&self) -> bool {
        match self {
            Construction::Window { direct, .. }
            | Construction::Counter { direct, .. }
            | Construction::History { direct, .. } => *direct,
            _ => false,
        }
    }

    pub fn objective(&self) -> ProductObjective {
        match self {
            Construction::Identity { objective, .. } => *objective,
            Construction::Window { direct, .. }
            | Construction::Counter { direct, .. }
            | Construction::History { direct, .. } => {
                if *direct {
                    ProductObjective::Safety
                } else {
                    ProductObjective::CoBuchi
                }
            }
            Construction::Visited { .. } => ProductObjective::Reachability,
            Construction::RequestResponse { .. } => ProductObjective::Buchi,
        }
    }

    /// Payload of the state entered when a play starts (or restarts) at `v`.
    pub(crate) fn initial(&self, arena: &Arena, v: usize) -> Payload {
        match self {
            Construction::Identity { .. } => Payload::new(),
            Construction::Window { .. } => arena.priorities(v).iter().flat_map(|&p| [p, 0]).collect(),
            Construction::Counter { slots, .. } => {
                slots.iter().map(|&(m, c)| u32::from(arena.priority(v, m) == c)).collect()
            }
            Construction::History { lambda, .. } => {
                let mut p: Payload = std::iter::repeat_n(SENTINEL, *lambda as usize - 1).collect();
                p.push(v as u32);
                p
            }
            Construction::Visited { targets } => {
                let mask = targets.iter().enumerate().filter(|(_, t)| t[v]).fold(0u32, |acc, (i, _)| acc | (1 << i));
                Payload::from_slice(&[mask])
            }
            Construction::RequestResponse { requests, .. } => {
                let pending = requests[v];
                Payload::from_slice(&[pending as u32, (pending >> 32) as u32, 0, 0])
            }
        }
    }

    /// Payload after moving to `next` from a state carrying `payload`.
    pub(crate) fn step(&self, arena: &Arena, payload: &[u32], next: usize) -> Step {
        match self {
            Construction::Identity { .. } => Step::Next(Payload::new()),
            Construction::Window { lambda, .. } => {
                let mut out = Payload::with_capacity(payload.len());
                for (m, &p) in arena.priorities(next).iter().enumerate() {
                    let (c, l) = (payload[2 * m], payload[2 * m + 1]);
                    if c % 2 == 0 {
                        out.extend([p, 0]);
                    } else if l + 1 < *lambda {
                        out.extend([c.min(p), l + 1]);
                    } else {
                        return Step::Overflow;
                    }
                }
                Step::Next(out)
            }
            Construction::Counter { lambda, slots, .. } => {
                let answered = |i: usize| {
                    let (m, c) = slots[i];
                    stronger_smaller(arena.priority(next, m), c)
                };
                if (0..slots.len()).any(|i| payload[i] == lambda - 1 && !answered(i)) {
                    return Step::Overflow;
                }
                let out = (0..slots.len())
                    .map(|i| {
                        let (m, c) = slots[i];
                        match payload[i] {
                            0 => u32::from(arena.priority(next, m) == c),
                            _ if answered(i) => 0,
                            k => k + 1,
                        }
                    })
                    .collect();
                Step::Next(out)
            }
            Construction::History { .. } => {
                let mut out: Payload = payload[1..].iter().copied().collect();
                out.push(next as u32);
                Step::Next(out)
            }
            Construction::Visited { .. } => {
                let mask = payload[0] | self.initial(arena, next)[0];
                Step::Next(Payload::from_slice(&[mask]))
            }
            Construction::RequestResponse { pairs: 0, .. } => Step::Next(Payload::from_slice(&[0, 0, 0, 1])),
            Construction::RequestResponse { requests, responses, pairs } => {
                let pending = u64::from(payload[0]) | (u64::from(payload[1]) << 32);
                let pending = (pending & !responses[next]) | requests[next];
                let i = payload[2];
                let advance = pending >> i & 1 == 0 || responses[next] >> i & 1 == 1;
                let (i, wrap) = if advance { ((i + 1) % *pairs as u32, i + 1 == *pairs as u32) } else { (i, false) };
                Step::Next(Payload::from_slice(&[pending as u32, (pending >> 32) as u32, i, u32::from(wrap)]))
            }
        }
    }

    /// Membership of a normal state in the product's target set.
    fn target(&self, arena: &Arena, vertex: usize, payload: &[u32]) -> bool {
        match self {
            Construction::Identity { target, .. } => target[vertex],
            Construction::Window { .. } | Construction::Counter { .. } => true,
            Construction::History { .. } => {
                let prio = |w: u32| if w == SENTINEL { arena.max_priority(0) } else { arena.priority(w as usize, 0) };
                let first = prio(payload[0]);
                payload.iter().any(|&w| stronger_smaller(prio(w), first))
            }
            Construction::Visited { targets } => payload[0] == (1u32 << targets.len()) - 1,
            Construction::RequestResponse { .. } => payload[3] == 1,
        }
    }
}

/// Product of an arena with a [`Construction`], explored from every source vertex.
#[derive(Clone, Debug)]
pub struct ProductArena {
    construction: Construction,
    graph: GameGraph,
    state_vertex: Vec<u32>,
    state_payload: Vec<u32>,
    payloads: Vec<Payload>,
    payload_index: FxHashMap<Payload, u32>,
    index: FxHashMap<(u32, u32), u32>,
    target: Vec<bool>,
    seeds: Vec<usize>,
    parity: Option<Vec<u32>>,
}

struct Explorer<'a> {
    construction: &'a Construction,
    state_vertex: Vec<u32>,
    state_payload: Vec<u32>,
    payloads: Vec<Payload>,
    payload_index: FxHashMap<Payload, u32>,
    index: FxHashMap<(u32, u32), u32>,
    resets: Vec<u32>,
    sink: Option<u32>,
}

impl Explorer<'_> {
    fn intern(&mut self, payload: Payload) -> u32 {
        if let Some(&id) = self.payload_index.get(&payload) {
            return id;
        }
        let id = self.payloads.len() as u32;
        self.payloads.push(payload.clone());
        self.payload_index.insert(payload, id);
        id
    }

    fn normal(&mut self, vertex: usize, payload: Payload) -> u32 {
        let pid = self.intern(payload);
        let key = (vertex as u32, pid);
        if let Some(&s) = self.index.get(&key) {
            return s;
        }
        let s = self.state_vertex.len() as u32;
        self.state_vertex.push(vertex as u32);
        self.state_payload.push(pid);
        self.index.insert(key, s);
        s
    }

    fn overflow(&mut self, vertex: usize) -> u32 {
        if self.construction.direct() {
            if self.sink.is_none() {
                self.sink = Some(self.state_vertex.len() as u32);
                self.state_vertex.push(0);
                self.state_payload.push(SINK);
            }
            self.sink.unwrap()
        } else {
            if self.resets[vertex] == u32::MAX {
                self.resets[vertex] = self.state_vertex.len() as u32;
                self.state_vertex.push(vertex as u32);
                self.state_payload.push(RESET);
            }
            self.resets[vertex]
        }
    }
}

impl ProductArena {
    /// Explores the product on the fly from `(v, initial(v))` for every source vertex.
    pub fn build(arena: &Arena, construction: Construction) -> ProductArena {
        let mut ex = Explorer {
            construction: &construction,
            state_vertex: Vec::new(),
            state_payload: Vec::new(),
            payloads: Vec::new(),
            payload_index: FxHashMap::default(),
            index: FxHashMap::default(),
            resets: vec![u32::MAX; arena.len()],
            sink: None,
        };
        let seeds: Vec<usize> = (0..arena.len())
            .map(|v| {
                let p = construction.initial(arena, v);
                ex.normal(v, p) as usize
            })
            .collect();
        let mut builder = GraphBuilder::with_capacity(arena.len(), arena.graph().edge_count());
        let mut s = 0;
        while s < ex.state_vertex.len() {
            let v = ex.state_vertex[s] as usize;
            match ex.state_payload[s] {
                SINK => {
                    builder.push_vertex(Player::P1);
                    builder.push_edge(s);
                }
                RESET => {
                    builder.push_vertex(Player::P1);
                    let p = construction.initial(arena, v);
                    let t = ex.normal(v, p);
                    builder.push_edge(t as usize);
                }
                pid => {
                    builder.push_vertex(arena.owner(v));
                    for w in arena.successors(v) {
                        let t = match construction.step(arena, &ex.payloads[pid as usize], w) {
                            Step::Next(p) => ex.normal(w, p),
                            Step::Overflow => ex.overflow(w),
                        };
                        builder.push_edge(t as usize);
                    }
                }
            }
            s += 1;
        }
        let graph = builder.finish();
        let target = (0..ex.state_vertex.len())
            .map(|s| match ex.state_payload[s] {
                SINK | RESET => false,
                pid => construction.target(arena, ex.state_vertex[s] as usize, &ex.payloads[pid as usize]),
            })
            .collect();
        let parity = (construction.objective() == ProductObjective::Parity)
            .then(|| ex.state_vertex.iter().map(|&v| arena.priority(v as usize, 0)).collect());
        ProductArena {
            graph,
            state_vertex: ex.state_vertex,
            state_payload: ex.state_payload,
            payloads: ex.payloads,
            payload_index: ex.payload_index,
            index: ex.index,
            target,
            seeds,
            parity,
            construction,
        }
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
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

    pub fn objective(&self) -> ProductObjective {
        self.construction.objective()
    }

    /// The set the product objective refers to (safe, allowed, accepting or target states).
    pub fn target(&self) -> &[bool] {
        &self.target
    }

    pub fn state(&self, s: usize) -> ProductState {
        match self.state_payload[s] {
            SINK => ProductState::Sink,
            RESET => ProductState::Reset { vertex: self.state_vertex[s] as usize },
            pid => ProductState::Normal { vertex: self.state_vertex[s] as usize, payload: pid as usize },
        }
    }

    /// Whether `s` is a `β` state.
    pub fn is_beta(&self, s: usize) -> bool {
        self.state_payload[s] >= RESET
    }

    /// Source vertex of a product state; `None` for the absorbing sink.
    pub fn back_map(&self, s: usize) -> Option<usize> {
        match self.state(s) {
            ProductState::Normal { vertex, .. } | ProductState::Reset { vertex } => Some(vertex),
            ProductState::Sink => None,
        }
    }

    /// Product state in which a play starting at source vertex `v` begins.
    pub fn seed(&self, v: usize) -> usize {
        self.seeds[v]
    }

    pub fn payload(&self, id: usize) -> &Payload {
        &self.payloads[id]
    }

    pub fn payload_count(&self) -> usize {
        self.payloads.len()
    }

    pub fn payload_id(&self, payload: &[u32]) -> Option<usize> {
        self.payload_index.get(payload).map(|&id| id as usize)
    }

    /// Normal state `(v, payload)`, if it was generated.
    pub fn lookup(&self, v: usize, payload: usize) -> Option<usize> {
        self.index.get(&(v as u32, payload as u32)).map(|&s| s as usize)
    }

    pub(crate) fn initial_payload(&self, arena: &Arena, v: usize) -> Payload {
        self.construction.initial(arena, v)
    }

    pub(crate) fn step_payload(&self, arena: &Arena, payload: &[u32], next: usize) -> Step {
        self.construction.step(arena, payload, next)
    }

    /// Solves the product game for its objective.
    pub fn solve(&self) -> WinningRegions {
        let g = &self.graph;
        match self.objective() {
            ProductObjective::Safety => solvers::solve_safety(g, &self.target),
            ProductObjective::CoBuchi => solvers::solve_cobuchi(g, &self.target),
            ProductObjective::Buchi => solvers::solve_buchi(g, &self.target),
            ProductObjective::Reachability => solvers::solve_reachability(g, &self.target),
            ProductObjective::Parity => solvers::solve_parity_graph(g, self.parity.as_ref().unwrap()),
        }
    }

    /// Source regions: `v` is won by whoever wins its seed state.
    pub fn project(&self, regions: &WinningRegions) -> WinningRegions {
        WinningRegions::without_strategy(self.seeds.iter().map(|&s| regions.winner(s)).collect())
    }

    /// Human-readable label of a state, used for DOT output.
    pub fn label(&self, arena: &Arena, s: usize) -> String {
        match self.state(s) {
            ProductState::Sink => "β".to_string(),
            ProductState::Reset { vertex } => format!("β_{}", arena.id(vertex)),
            ProductState::Normal { vertex, payload } => {
                let p = &self.payloads[payload];
                let body = match &self.construction {
                    Construction::History { .. } => p
                        .iter()
                        .map(|&w| if w == SENTINEL { "#".to_string() } else { arena.id(w as usize).to_string() })
                        .collect::<Vec<_>>()
                        .join(" "),
                    _ => p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
                };
                if body.is_empty() {
                    arena.id(vertex).to_string()
                } else {
                    format!("{} [{}]", arena.id(vertex), body)
                }
            }
        }
    }
}
