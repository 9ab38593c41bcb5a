use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::model::{Arena, Player};

/// Shape of a random arena.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomArenaParams {
    pub vertices: usize,
    /// Probability of each ordered pair being an edge.
    pub density: f64,
    pub dims: usize,
    pub max_priority: u32,
    /// Probability that a vertex belongs to P1.
    pub p1_ratio: f64,
}

impl Default for RandomArenaParams {
    fn default() -> Self {
        RandomArenaParams { vertices: 6, density: 0.35, dims: 1, max_priority: 4, p1_ratio: 0.5 }
    }
}

/// Share of priorities forced to 0, so that P1 wins somewhere reasonably often.
const ZERO_BIAS: f64 = 0.3;

/// Deterministic random arena for `seed`. Vertices left without successors get a self-loop.
pub fn random_arena(seed: u64, params: &RandomArenaParams) -> Arena {
    assert!(params.vertices > 0 && params.dims > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.vertices;
    let mut b = Arena::builder(params.dims);
    for v in 0..n {
        let owner = if rng.gen_bool(params.p1_ratio) { Player::P1 } else { Player::P2 };
        let prios: Vec<u32> = (0..params.dims)
            .map(|_| if rng.gen_bool(ZERO_BIAS) { 0 } else { rng.gen_range(0..=params.max_priority) })
            .collect();
        b.vertex(format!("v{v}"), owner, &prios);
    }
    let degree = Binomial::new(n as u64, params.density.clamp(0.0, 1.0)).unwrap();
    for v in 0..n {
        let k = degree.sample(&mut rng) as usize;
        if k == 0 {
            b.edge_idx(v, v);
            continue;
        }
        let mut targets = index::sample(&mut rng, n, k).into_vec();
        targets.sort_unstable();
        for w in targets {
            b.edge_idx(v, w);
        }
    }
    b.build().expect("generated arenas are valid")
}

/// Parameters drawn per seed for corpus runs: `|V| ≤ max_vertices`, `n ≤ max_dims`,
/// `d ≤ max_priority`.
pub fn corpus_params(seed: u64, max_vertices: usize, max_dims: usize, max_priority: u32) -> RandomArenaParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    RandomArenaParams {
        vertices: rng.gen_range(1..=max_vertices),
        density: rng.gen_range(0.2..0.6),
        dims: rng.gen_range(1..=max_dims),
        max_priority: rng.gen_range(0..=max_priority),
        p1_ratio: 0.5,
    }
}
