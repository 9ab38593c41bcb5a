use crate::model::{Arena, Player};

/// Window-parity encoding of a generalized reachability game.
#[derive(Clone, Debug)]
pub struct GenReachReduction {
    pub arena: Arena,
    /// Window size `2·k·|V|`.
    pub lambda: u32,
    /// One dimension per target set.
    pub dims: usize,
    /// The restart vertex, where plays of the encoding begin.
    pub restart: usize,
}

/// Every edge `(v, v′)` is split by a P2 vertex `b_{v,v′}` that may continue to `v′` or
/// jump to a P2 restart vertex leading to `initial`. In dimension `m`, target vertices
/// of `U_m` and the restart vertex have priority 0, `initial` has priority 1 unless it
/// lies in `U_m`, everything else has priority 2.
pub fn genreach_to_fixwp(arena: &Arena, targets: &[Vec<usize>], initial: usize) -> GenReachReduction {
    assert!(!targets.is_empty(), "at least one target set");
    let k = targets.len();
    let mut b = Arena::builder(k);
    let restart = b.vertex("restart", Player::P2, &vec![0; k]);
    let offset = 1;
    for v in 0..arena.len() {
        let prios: Vec<u32> = targets
            .iter()
            .map(|set| match (set.contains(&v), v == initial) {
                (true, _) => 0,
                (false, true) => 1,
                (false, false) => 2,
            })
            .collect();
        b.vertex(arena.id(v), arena.owner(v), &prios);
    }
    let edges: Vec<(usize, usize)> = arena.edges().collect();
    for &(v, w) in &edges {
        let branch = b.vertex(format!("b[{}>{}]", arena.id(v), arena.id(w)), Player::P2, &vec![2; k]);
        b.edge_idx(v + offset, branch);
        b.edge_idx(branch, w + offset);
        b.edge_idx(branch, restart);
    }
    b.edge_idx(restart, initial + offset);
    let lambda = (2 * k * arena.len()) as u32;
    GenReachReduction { arena: b.build().expect("reduction preserves validity"), lambda, dims: k, restart }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObjectiveSpec;
    use crate::reductions::solve;

    fn line() -> Arena {
        let mut b = Arena::builder(1);
        b.vertex("a", Player::P1, &[0]);
        b.vertex("b", Player::P1, &[0]);
        b.vertex("c", Player::P1, &[0]);
        b.edge("a", "b").edge("b", "b").edge("c", "c");
        b.build().unwrap()
    }

    #[test]
    fn trivial_instances() {
        let arena = line();
        for (targets, expected) in [(vec![vec![0]], Player::P1), (vec![vec![2]], Player::P2)] {
            let red = genreach_to_fixwp(&arena, &targets, 0);
            assert_eq!(red.arena.len(), 1 + 3 + 3);
            let gr = solve(&arena, &ObjectiveSpec::genreach(targets), None).unwrap();
            assert_eq!(gr.regions.winner(0), expected);
            let fw = solve(&red.arena, &ObjectiveSpec::fix_wp(red.lambda, false), None).unwrap();
            assert_eq!(fw.regions.winner(red.restart), expected);
        }
    }
}
