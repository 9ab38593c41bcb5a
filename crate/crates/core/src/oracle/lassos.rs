use crate::model::{Arena, Lasso, ObjectiveSpec, Player};
use crate::objectives::check_lasso;

use super::OracleError;

/// Searches lassos from `initial` with stem length ≤ `stem_bound` and cycle length
/// ≤ `cycle_bound`, shortest first, for one that is good for the arena's player: a
/// lasso satisfying `spec` when P1 owns the choices, violating it when P2 does.
///
/// `None` only means no witness exists within the bounds.
pub fn enumerate_lassos(
    arena: &Arena,
    initial: usize,
    stem_bound: usize,
    cycle_bound: usize,
    spec: &ObjectiveSpec,
) -> Result<Option<Lasso>, OracleError> {
    spec.check_for(arena)?;
    let player = if arena.is_one_player(Player::P1) {
        Player::P1
    } else if arena.is_one_player(Player::P2) {
        Player::P2
    } else {
        return Err(OracleError::NotOnePlayer);
    };
    if initial >= arena.len() {
        return Err(OracleError::UnknownVertex(initial));
    }
    for total in 1..=stem_bound + cycle_bound {
        let mut path = vec![initial];
        if let Some(lasso) = search(arena, spec, player, &mut path, total, stem_bound, cycle_bound)? {
            return Ok(Some(lasso));
        }
    }
    Ok(None)
}

fn search(
    arena: &Arena,
    spec: &ObjectiveSpec,
    player: Player,
    path: &mut Vec<usize>,
    total: usize,
    stem_bound: usize,
    cycle_bound: usize,
) -> Result<Option<Lasso>, OracleError> {
    if path.len() == total {
        let last = *path.last().unwrap();
        let first_split = total.saturating_sub(cycle_bound);
        for split in first_split..=stem_bound.min(total - 1) {
            if !arena.has_edge(last, path[split]) {
                continue;
            }
            let lasso = Lasso::new(path[..split].to_vec(), path[split..].to_vec()).expect("nonempty cycle");
            if check_lasso(arena, &lasso, spec)?.holds == (player == Player::P1) {
                return Ok(Some(lasso));
            }
        }
        return Ok(None);
    }
    let last = *path.last().unwrap();
    for w in arena.successors(last) {
        path.push(w);
        let found = search(arena, spec, player, path, total, stem_bound, cycle_bound)?;
        path.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}
