//! Exact membership of ultimately periodic plays, and window bookkeeping.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Arena, Family, Lasso, ObjectiveKind, ObjectiveSpec, SpecError};

/// `c ≼ c'`: `c` is even and at most `c'`.
pub fn stronger_smaller(c: u32, c2: u32) -> bool {
    c.is_multiple_of(2) && c <= c2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WindowStatus {
    /// Closed at offset `l`.
    Closed(usize),
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WindowVerdict {
    pub position: usize,
    pub status: WindowStatus,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("insufficient horizon: window at position {position} needs {needed} vertices, prefix has {available}")]
pub struct HorizonError {
    pub position: usize,
    pub needed: usize,
    pub available: usize,
}

/// Smallest offset `l < limit` at which the window (WP) or the response (PR)
/// starting at `j` is settled, reading priorities through `prio`.
fn settle_offset(family: Family, prio: impl Fn(usize) -> u32, j: usize, limit: usize) -> Option<usize> {
    let first = prio(j);
    let mut min = u32::MAX;
    for l in 0..limit {
        let p = prio(j + l);
        match family {
            Family::PR => {
                if stronger_smaller(p, first) {
                    return Some(l);
                }
            }
            Family::WP => {
                min = min.min(p);
                if p == min && p.is_multiple_of(2) {
                    return Some(l);
                }
            }
        }
    }
    None
}

/// Status of the window opened at position `j` of a finite prefix.
pub fn window_close(
    arena: &Arena,
    prefix: &[usize],
    j: usize,
    dim: usize,
    lambda: u32,
) -> Result<WindowVerdict, HorizonError> {
    let lambda = lambda as usize;
    let available = prefix.len().saturating_sub(j).min(lambda);
    let prio = |i: usize| arena.priority(prefix[i], dim);
    match settle_offset(Family::WP, prio, j, available) {
        Some(l) => Ok(WindowVerdict { position: j, status: WindowStatus::Closed(l) }),
        None if available < lambda => Err(HorizonError { position: j, needed: j + lambda, available: prefix.len() }),
        None => Ok(WindowVerdict { position: j, status: WindowStatus::Open }),
    }
}

/// Failing position and dimension (or target index) of a membership check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub position: Option<usize>,
    pub dimension: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CheckOutcome {
    fn pass() -> CheckOutcome {
        CheckOutcome { holds: true, witness: None }
    }

    fn fail(position: Option<usize>, dimension: usize) -> CheckOutcome {
        CheckOutcome { holds: false, witness: Some(Witness { position, dimension }) }
    }
}

/// Positions whose windows decide the objective.
fn decisive_positions(lasso: &Lasso, direct: bool) -> std::ops::Range<usize> {
    let end = lasso.stem_len() + lasso.cycle_len();
    if direct {
        0..end
    } else {
        lasso.stem_len()..end
    }
}

/// λ large enough to decide the bounded objectives on this lasso.
pub fn bounded_horizon(lasso: &Lasso) -> u32 {
    (lasso.stem_len() + 2 * lasso.cycle_len()) as u32
}

fn window_failure(
    arena: &Arena,
    lasso: &Lasso,
    family: Family,
    lambda: u32,
    direct: bool,
    dims: &[usize],
) -> Option<(usize, usize)> {
    for j in decisive_positions(lasso, direct) {
        for &m in dims {
            let prio = |i: usize| arena.priority(lasso.at(i), m);
            if settle_offset(family, prio, j, lambda as usize).is_none() {
                return Some((j, m));
            }
        }
    }
    None
}

/// Exact membership of `stem · cycle^ω` in the objective.
pub fn check_lasso(arena: &Arena, lasso: &Lasso, spec: &ObjectiveSpec) -> Result<CheckOutcome, SpecError> {
    spec.check_for(arena)?;
    let dims: Vec<usize> = (0..arena.dims()).collect();
    let s = lasso.stem_len();
    let visited = || lasso.stem().iter().chain(lasso.cycle());
    Ok(match spec.kind {
        ObjectiveKind::FixPR | ObjectiveKind::FixWP | ObjectiveKind::BndPR | ObjectiveKind::BndWP => {
            let family = spec.family().unwrap();
            let lambda = spec.lambda.unwrap_or_else(|| bounded_horizon(lasso));
            match window_failure(arena, lasso, family, lambda, spec.direct, &dims) {
                None => CheckOutcome::pass(),
                Some((j, m)) => CheckOutcome::fail(Some(j), m),
            }
        }
        ObjectiveKind::Parity => {
            let mut worst: Option<(usize, usize)> = None;
            for &m in &dims {
                let (i, p) = lasso
                    .cycle()
                    .iter()
                    .map(|&v| arena.priority(v, m))
                    .enumerate()
                    .min_by_key(|&(i, p)| (p, i))
                    .unwrap();
                if p % 2 == 1 && worst.is_none_or(|(pos, _)| s + i < pos) {
                    worst = Some((s + i, m));
                }
            }
            match worst {
                None => CheckOutcome::pass(),
                Some((j, m)) => CheckOutcome::fail(Some(j), m),
            }
        }
        ObjectiveKind::Reach => {
            let target = spec.target_mask(0, arena.len());
            if visited().any(|&v| target[v]) {
                CheckOutcome::pass()
            } else {
                CheckOutcome::fail(None, 0)
            }
        }
        ObjectiveKind::Safe => {
            let safe = spec.target_mask(0, arena.len());
            match visited().position(|&v| !safe[v]) {
                None => CheckOutcome::pass(),
                Some(j) => CheckOutcome::fail(Some(j), 0),
            }
        }
        ObjectiveKind::Buchi => {
            let accepting = spec.target_mask(0, arena.len());
            if lasso.cycle().iter().any(|&v| accepting[v]) {
                CheckOutcome::pass()
            } else {
                CheckOutcome::fail(None, 0)
            }
        }
        ObjectiveKind::CoBuchi => {
            let allowed = spec.target_mask(0, arena.len());
            match lasso.cycle().iter().position(|&v| !allowed[v]) {
                None => CheckOutcome::pass(),
                Some(i) => CheckOutcome::fail(Some(s + i), 0),
            }
        }
        ObjectiveKind::GenReach => {
            let missing = (0..spec.targets.len()).find(|&i| {
                let target = spec.target_mask(i, arena.len());
                !visited().any(|&v| target[v])
            });
            match missing {
                None => CheckOutcome::pass(),
                Some(i) => CheckOutcome::fail(None, i),
            }
        }
    })
}

/// λ-good decomposition `k₀ < k₁ < …` of a lasso, given as a transient prefix and a
/// repeating block that recurs shifted by `period`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodDecomposition {
    pub prefix: Vec<usize>,
    pub repeating: Vec<usize>,
    pub period: usize,
}

impl GoodDecomposition {
    /// The first `count` indices of the sequence.
    pub fn indices(&self, count: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.prefix.iter().copied().take(count).collect();
        let mut round = 0;
        while out.len() < count {
            for &k in &self.repeating {
                if out.len() == count {
                    break;
                }
                out.push(k + round * self.period);
            }
            round += 1;
        }
        out
    }
}

/// Greedy λ-good decomposition in dimension `dim`, starting at 0 for the direct
/// objective and at the earliest position from which every window is λ-good otherwise.
pub fn good_decomposition(
    arena: &Arena,
    lasso: &Lasso,
    lambda: u32,
    dim: usize,
    direct: bool,
) -> Option<GoodDecomposition> {
    let prio = |i: usize| arena.priority(lasso.at(i), dim);
    let offset = |j: usize| settle_offset(Family::WP, prio, j, lambda as usize);
    let (s, c) = (lasso.stem_len(), lasso.cycle_len());
    if decisive_positions(lasso, direct).any(|j| offset(j).is_none()) {
        return None;
    }
    let mut start = if direct { 0 } else { s };
    while !direct && start > 0 && offset(start - 1).is_some() {
        start -= 1;
    }
    let state = |k: usize| if k < s { k } else { s + (k - s) % c };
    let mut seq = Vec::new();
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut k = start;
    loop {
        if k >= s {
            if let Some(&i) = seen.get(&state(k)) {
                let period = k - seq[i];
                let repeating = seq.split_off(i);
                return Some(GoodDecomposition { prefix: seq, repeating, period });
            }
            seen.insert(state(k), seq.len());
        }
        seq.push(k);
        k += offset(k)? + 1;
    }
}

/// Smallest λ for which the fixed objective holds in dimension `dim`, or `None` (∞).
pub fn min_sufficient_lambda(arena: &Arena, lasso: &Lasso, family: Family, direct: bool, dim: usize) -> Option<u32> {
    (1..=bounded_horizon(lasso)).find(|&lambda| window_failure(arena, lasso, family, lambda, direct, &[dim]).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Player;

    fn fig4() -> (Arena, Lasso) {
        let mut b = Arena::builder(1);
        for (i, p) in [3, 1, 2, 0].into_iter().enumerate() {
            b.vertex(format!("v{i}"), Player::P1, &[p]);
        }
        b.edge("v0", "v1").edge("v1", "v2").edge("v2", "v3").edge("v3", "v0");
        let arena = b.build().unwrap();
        let lasso = Lasso::in_arena(&arena, vec![], vec![0, 1, 2, 3]).unwrap();
        (arena, lasso)
    }

    #[test]
    fn window_close_examples() {
        let (arena, lasso) = fig4();
        let prefix = lasso.unroll(8);
        assert_eq!(window_close(&arena, &prefix, 0, 0, 3).unwrap().status, WindowStatus::Open);
        assert_eq!(window_close(&arena, &prefix, 0, 0, 4).unwrap().status, WindowStatus::Closed(3));
        assert_eq!(window_close(&arena, &prefix, 2, 0, 1).unwrap().status, WindowStatus::Closed(0));
        assert!(window_close(&arena, &prefix[..2], 0, 0, 4).is_err());
    }

    #[test]
    fn fig4_membership() {
        let (arena, lasso) = fig4();
        let holds = |spec: ObjectiveSpec| check_lasso(&arena, &lasso, &spec).unwrap().holds;
        assert!(holds(ObjectiveSpec::fix_pr(3, true)));
        assert!(!holds(ObjectiveSpec::fix_wp(3, true)));
        assert!(holds(ObjectiveSpec::fix_wp(4, true)));
        assert!(holds(ObjectiveSpec::fix_pr(3, false)));
        assert!(holds(ObjectiveSpec::fix_wp(4, false)));
        let out = check_lasso(&arena, &lasso, &ObjectiveSpec::fix_wp(3, true)).unwrap();
        assert_eq!(out.witness, Some(Witness { position: Some(0), dimension: 0 }));
    }

    #[test]
    fn decompositions() {
        let (arena, lasso) = fig4();
        let dec = good_decomposition(&arena, &lasso, 4, 0, true).unwrap();
        assert_eq!(dec.indices(3), vec![0, 4, 8]);
        assert!(good_decomposition(&arena, &lasso, 3, 0, true).is_none());

        let mut b = Arena::builder(1);
        b.vertex("e", Player::P1, &[2]);
        b.edge("e", "e");
        let even = b.build().unwrap();
        let l = Lasso::new(vec![], vec![0]).unwrap();
        assert_eq!(good_decomposition(&even, &l, 1, 0, true).unwrap().indices(3), vec![0, 1, 2]);
    }

    #[test]
    fn minimal_lambdas() {
        let (arena, lasso) = fig4();
        assert_eq!(min_sufficient_lambda(&arena, &lasso, Family::WP, true, 0), Some(4));
        assert_eq!(min_sufficient_lambda(&arena, &lasso, Family::PR, true, 0), Some(3));

        let mut b = Arena::builder(1);
        b.vertex("o", Player::P1, &[1]);
        b.edge("o", "o");
        let odd = b.build().unwrap();
        let l = Lasso::new(vec![], vec![0]).unwrap();
        assert_eq!(min_sufficient_lambda(&odd, &l, Family::PR, false, 0), None);
    }

    #[test]
    fn classical_kinds() {
        let (arena, lasso) = fig4();
        let holds = |spec: ObjectiveSpec| check_lasso(&arena, &lasso, &spec).unwrap().holds;
        assert!(holds(ObjectiveSpec::parity()));
        assert!(holds(ObjectiveSpec::reach(vec![2])));
        assert!(!holds(ObjectiveSpec::safe(vec![0, 1, 2])));
        assert!(holds(ObjectiveSpec::buchi(vec![1])));
        assert!(!holds(ObjectiveSpec::cobuchi(vec![1])));
        assert!(holds(ObjectiveSpec::genreach(vec![vec![0], vec![3]])));
    }
}
