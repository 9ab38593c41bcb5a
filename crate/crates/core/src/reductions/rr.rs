use serde::Serialize;

use crate::model::{Arena, Player};
use crate::solvers::{attractor_within, buchi_within, WinningRegions};

use super::product::{Construction, ProductArena};
use super::ReductionError;

/// Request set `{v | p_m(v) = c}` and response set `{v | p_m(v) ≼ c}` for one odd `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RequestResponsePair {
    pub dim: usize,
    pub priority: u32,
    pub requests: Vec<usize>,
    pub responses: Vec<usize>,
}

/// One pair per (dimension, odd priority) that actually occurs.
pub fn build_rr_instance(arena: &Arena) -> Vec<RequestResponsePair> {
    let mut pairs = Vec::new();
    for m in 0..arena.dims() {
        for c in (1..=arena.max_priority(m)).step_by(2) {
            let requests: Vec<usize> = (0..arena.len()).filter(|&v| arena.priority(v, m) == c).collect();
            if requests.is_empty() {
                continue;
            }
            let responses = (0..arena.len())
                .filter(|&v| {
                    let p = arena.priority(v, m);
                    p.is_multiple_of(2) && p < c
                })
                .collect();
            pairs.push(RequestResponsePair { dim: m, priority: c, requests, responses });
        }
    }
    pairs
}

/// Outcome of the request-response route.
#[derive(Clone, Debug)]
pub struct RrSolution {
    pub regions: WinningRegions,
    pub product: ProductArena,
    /// Product regions with strategies; only for the direct objective.
    pub product_regions: Option<WinningRegions>,
}

/// Bounded request-response games. The direct objective is a Büchi game on the
/// pending-set/pointer product; the prefix-independent one repeatedly removes the
/// P1-attractor of the region where P1 wins directly inside the remaining subgame.
pub fn solve_request_response(
    arena: &Arena,
    pairs: &[RequestResponsePair],
    direct: bool,
) -> Result<RrSolution, ReductionError> {
    if pairs.len() > 64 {
        return Err(ReductionError::TooManyPairs(pairs.len()));
    }
    let product = ProductArena::build(arena, Construction::request_response(arena, pairs));
    if direct {
        let product_regions = product.solve();
        let regions = product.project(&product_regions);
        return Ok(RrSolution { regions, product, product_regions: Some(product_regions) });
    }
    let n = arena.len();
    let mut game = vec![true; n];
    let mut win1 = vec![false; n];
    loop {
        let within: Vec<bool> = (0..product.len()).map(|s| product.back_map(s).is_some_and(|v| game[v])).collect();
        let (won, _) = buchi_within(product.graph(), &within, Player::P1, product.target());
        let direct_win: Vec<bool> = (0..n).map(|v| game[v] && won[product.seed(v)]).collect();
        if !direct_win.iter().any(|&w| w) {
            break;
        }
        let attr = attractor_within(arena.graph(), Some(&game), Player::P1, &direct_win);
        for v in (0..n).filter(|&v| attr.region[v]) {
            win1[v] = true;
            game[v] = false;
        }
    }
    let winner = win1.iter().map(|&w| if w { Player::P1 } else { Player::P2 }).collect();
    Ok(RrSolution { regions: WinningRegions::without_strategy(winner), product, product_regions: None })
}
