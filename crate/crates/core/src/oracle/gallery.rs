use crate::model::{Arena, Player};

use super::OracleError;

pub const GALLERY: [&str; 7] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"];

/// Arenas of the worked examples.
///
/// * `fig4`: one-player cycle with priorities 3, 1, 2, 0.
/// * `fig5`: P1 wins parity from `v0`, P2 wins every window objective.
/// * `fig6`: P1 must alternate two cycles to win (Dir)FixPR(4).
/// * `fig7`: P2 must alternate two cycles to refute (Dir)FixPR(3).
/// * `fig8`, parameter `d` (even, default 6): P1 needs `d/2` memory for FixWP(d/2 + 2).
/// * `fig9`, parameter `n ≥ 2` (default 2): P2 must remember P1's last path.
/// * `fig10`, parameter `n ≥ 1` (default 2): `2n` dimensions, P1 needs `2^n` memory for FixWP(3n).
pub fn paper_gallery(name: &str, param: Option<u32>) -> Result<Arena, OracleError> {
    match name {
        "fig4" => Ok(fig4()),
        "fig5" => Ok(fig5()),
        "fig6" => Ok(fig6()),
        "fig7" => Ok(fig7()),
        "fig8" => {
            let d = param.unwrap_or(6);
            if d % 2 == 1 {
                return Err(OracleError::Parameter(name.into(), d));
            }
            Ok(fig8(d))
        }
        "fig9" => {
            let n = param.unwrap_or(2);
            if n < 2 {
                return Err(OracleError::Parameter(name.into(), n));
            }
            Ok(fig9(n))
        }
        "fig10" => {
            let n = param.unwrap_or(2);
            if n == 0 {
                return Err(OracleError::Parameter(name.into(), n));
            }
            Ok(fig10(n))
        }
        _ => Err(OracleError::UnknownGallery(name.into())),
    }
}

fn cycle(b: &mut crate::model::ArenaBuilder, ids: &[&str]) {
    for w in ids.windows(2) {
        b.edge(w[0], w[1]);
    }
}

fn fig4() -> Arena {
    let mut b = Arena::builder(1);
    for (id, p) in [("v0", 3), ("v1", 1), ("v2", 2), ("v3", 0)] {
        b.vertex(id, Player::P1, &[p]);
    }
    cycle(&mut b, &["v0", "v1", "v2", "v3", "v0"]);
    b.build().unwrap()
}

fn fig5() -> Arena {
    let mut b = Arena::builder(1);
    b.vertex("v0", Player::P1, &[1]);
    b.vertex("v1", Player::P2, &[2]);
    b.vertex("v2", Player::P1, &[0]);
    b.edge("v0", "v1").edge("v1", "v1").edge("v1", "v2").edge("v2", "v0");
    b.build().unwrap()
}

fn fig6() -> Arena {
    let mut b = Arena::builder(1);
    for (id, p) in [("v0", 3), ("v1", 2), ("v2", 1), ("v3", 1), ("v4", 0), ("v5", 3), ("v6", 3)] {
        b.vertex(id, Player::P1, &[p]);
    }
    cycle(&mut b, &["v0", "v1", "v2", "v0"]);
    cycle(&mut b, &["v0", "v3", "v4", "v5", "v6", "v0"]);
    b.build().unwrap()
}

fn fig7() -> Arena {
    let mut b = Arena::builder(1);
    for (id, p) in [("v0", 1), ("v1", 0), ("v2", 1), ("v3", 1), ("v4", 0)] {
        b.vertex(id, Player::P2, &[p]);
    }
    cycle(&mut b, &["v0", "v1", "v2", "v0"]);
    cycle(&mut b, &["v0", "v3", "v4", "v0"]);
    b.build().unwrap()
}

/// `v0` (P2) picks an odd priority `c = 2t + 1` through a path of `t + 1` vertices;
/// from the hub P1 picks an answer path ending in priority `2t` after `d/2 − t` vertices.
fn fig8(d: u32) -> Arena {
    let half = d / 2;
    let mut b = Arena::builder(1);
    b.vertex("v0", Player::P2, &[d]);
    b.vertex("hub", Player::P1, &[d]);
    for t in 0..half {
        let c = 2 * t + 1;
        let ids: Vec<String> = (0..=t).map(|k| format!("o{c}_{k}")).collect();
        for (k, id) in ids.iter().enumerate() {
            b.vertex(id.clone(), Player::P1, &[if k == 0 { c } else { d }]);
        }
        b.edge("v0", ids[0].clone());
        for w in ids.windows(2) {
            b.edge(w[0].clone(), w[1].clone());
        }
        b.edge(ids[t as usize].clone(), "hub");
    }
    for t in 0..half {
        let e = 2 * t;
        let len = half - t;
        let ids: Vec<String> = (0..len).map(|k| format!("e{e}_{k}")).collect();
        for (k, id) in ids.iter().enumerate() {
            b.vertex(id.clone(), Player::P1, &[if k as u32 + 1 == len { e } else { d }]);
        }
        b.edge("hub", ids[0].clone());
        for w in ids.windows(2) {
            b.edge(w[0].clone(), w[1].clone());
        }
        b.edge(ids[len as usize - 1].clone(), "v0");
    }
    if half == 0 {
        b.edge("v0", "hub").edge("hub", "v0");
    }
    b.build().unwrap()
}

/// `v0` (P2) moves to `w{i}`, from which P1 takes a path `ρ_j`, `j ≠ i`; `ρ_j` has `n`
/// vertices of priority 1 except its `j`-th one, of priority 0.
fn fig9(n: u32) -> Arena {
    let mut b = Arena::builder(1);
    b.vertex("v0", Player::P2, &[1]);
    for i in 1..=n {
        b.vertex(format!("w{i}"), Player::P1, &[1]);
        b.edge("v0", format!("w{i}"));
    }
    for j in 1..=n {
        for k in 1..=n {
            b.vertex(format!("r{j}_{k}"), Player::P1, &[u32::from(k != j)]);
            if k > 1 {
                b.edge(format!("r{j}_{}", k - 1), format!("r{j}_{k}"));
            }
        }
        b.edge(format!("r{j}_{n}"), "v0");
        for i in (1..=n).filter(|&i| i != j) {
            b.edge(format!("w{i}"), format!("r{j}_1"));
        }
    }
    b.build().unwrap()
}

/// P2 walks `v_1 … v_n` choosing a side at each step (opening a window in dimension
/// `2i − 1` or `2i`); P1 then walks `u_1 … u_n`, where the matching side closes it.
fn fig10(n: u32) -> Arena {
    let dims = 2 * n as usize;
    let mut b = Arena::builder(dims);
    let prio = |dim: Option<usize>, value: u32| -> Vec<u32> {
        (0..dims).map(|m| if Some(m) == dim { value } else { 2 }).collect()
    };
    for (prefix, owner, value) in [("v", Player::P2, 1), ("u", Player::P1, 0)] {
        for i in 1..=n as usize {
            b.vertex(format!("{prefix}{i}"), owner, &prio(None, 0));
            b.vertex(format!("{prefix}{i}L"), owner, &prio(Some(2 * i - 2), value));
            b.vertex(format!("{prefix}{i}R"), owner, &prio(Some(2 * i - 1), value));
        }
    }
    for (prefix, after) in [("v", "u1"), ("u", "v1")] {
        for i in 1..=n {
            let next = if i == n { after.to_string() } else { format!("{prefix}{}", i + 1) };
            for side in ["L", "R"] {
                b.edge(format!("{prefix}{i}"), format!("{prefix}{i}{side}"));
                b.edge(format!("{prefix}{i}{side}"), next.clone());
            }
        }
    }
    b.build().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(paper_gallery("fig4", None).unwrap().len(), 4);
        assert_eq!(paper_gallery("fig8", Some(6)).unwrap().len(), 2 + 3 * 4);
        assert_eq!(paper_gallery("fig8", Some(4)).unwrap().len(), 2 + 2 * 3);
        assert_eq!(paper_gallery("fig9", Some(2)).unwrap().len(), 7);
        assert_eq!(paper_gallery("fig9", Some(3)).unwrap().len(), 13);
        let f10 = paper_gallery("fig10", Some(2)).unwrap();
        assert_eq!((f10.len(), f10.dims()), (12, 4));
        assert!(paper_gallery("fig11", None).is_err());
        assert!(paper_gallery("fig8", Some(5)).is_err());
    }

    #[test]
    fn fig9_paths_avoid_their_index() {
        let a = paper_gallery("fig9", Some(3)).unwrap();
        let w2 = a.vertex("w2").unwrap();
        let targets: Vec<&str> = a.successors(w2).map(|v| a.id(v)).collect();
        assert_eq!(targets, ["r1_1", "r3_1"]);
        assert_eq!(a.priority(a.vertex("r3_3").unwrap(), 0), 0);
    }
}
