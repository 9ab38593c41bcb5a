//! Text formats for games, strategies and lassos; DOT export.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Arena, Lasso, MooreStrategy, Player};
use crate::reductions::{ProductArena, ProductState};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing header `winpar 1 dims=<n>`")]
    MissingHeader,
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("no vertices")]
    NoVertices,
    #[error("dimension mismatch at line {0}")]
    DimensionMismatch(usize),
    #[error("duplicate vertex `{1}` at line {0}")]
    DuplicateVertex(usize, String),
    #[error("unknown edge endpoint `{1}` at line {0}")]
    UnknownEndpoint(usize, String),
    #[error("unknown vertex `{1}` at line {0}")]
    UnknownVertex(usize, String),
    #[error("vertex `{1}` declared at line {0} has no successor")]
    Deadlock(usize, String),
    #[error("line {0}: {1}")]
    Strategy(usize, String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("lasso: {0}")]
    Lasso(String),
}

/// A parsed game file.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    pub arena: Arena,
    pub initial: Option<usize>,
}

/// Parses the line-oriented game format; `#` starts a comment.
pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let dims = match lines.next() {
        Some((_, header)) => parse_header(header).ok_or(ParseError::MissingHeader)?,
        None => return Err(ParseError::MissingHeader),
    };
    let mut b = Arena::builder(dims);
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut init = None;
    for (line, content) in lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "vertex" => {
                if words.len() < 4 {
                    return Err(ParseError::Syntax(line, "expected `vertex <id> <owner> <priorities…>`".into()));
                }
                let owner: Player =
                    words[2].parse().map_err(|_| ParseError::Syntax(line, format!("bad owner `{}`", words[2])))?;
                let prios = words[3..]
                    .iter()
                    .map(|w| w.parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| ParseError::Syntax(line, "priorities must be non-negative integers".into()))?;
                if prios.len() != dims {
                    return Err(ParseError::DimensionMismatch(line));
                }
                if declared.insert(words[1].to_string(), line).is_some() {
                    return Err(ParseError::DuplicateVertex(line, words[1].into()));
                }
                b.vertex(words[1], owner, &prios);
            }
            "edge" => {
                if words.len() != 3 {
                    return Err(ParseError::Syntax(line, "expected `edge <src> <dst>`".into()));
                }
                edges.push((line, words[1].to_string(), words[2].to_string()));
            }
            "init" => {
                if words.len() != 2 {
                    return Err(ParseError::Syntax(line, "expected `init <id>`".into()));
                }
                init = Some((line, words[1].to_string()));
            }
            other => return Err(ParseError::Syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    if declared.is_empty() {
        return Err(ParseError::NoVertices);
    }
    let mut has_successor: HashMap<&str, bool> = declared.keys().map(|k| (k.as_str(), false)).collect();
    for (line, s, t) in &edges {
        for end in [s, t] {
            if !declared.contains_key(end) {
                return Err(ParseError::UnknownEndpoint(*line, end.clone()));
            }
        }
        has_successor.insert(s.as_str(), true);
        b.edge(s.clone(), t.clone());
    }
    let mut dead: Vec<(usize, &String)> =
        declared.iter().filter(|(id, _)| !has_successor[id.as_str()]).map(|(id, &l)| (l, id)).collect();
    dead.sort();
    if let Some((line, id)) = dead.first() {
        return Err(ParseError::Deadlock(*line, (*id).clone()));
    }
    let arena = b.build().map_err(|e| ParseError::Syntax(0, e.to_string()))?;
    let initial = match init {
        Some((line, id)) => Some(arena.vertex(&id).ok_or(ParseError::UnknownVertex(line, id))?),
        None => None,
    };
    Ok(Game { arena, initial })
}

fn parse_header(line: &str) -> Option<usize> {
    let mut words = line.split_whitespace();
    if words.next()? != "winpar" || words.next()? != "1" {
        return None;
    }
    let dims = words.next()?.strip_prefix("dims=")?.parse().ok()?;
    (words.next().is_none() && dims > 0).then_some(dims)
}

/// Game file text; `parse_game` of the output gives back an equal arena.
pub fn write_game(arena: &Arena, initial: Option<usize>) -> String {
    let mut out = format!("winpar 1 dims={}\n", arena.dims());
    for v in 0..arena.len() {
        let prios: Vec<String> = arena.priorities(v).iter().map(u32::to_string).collect();
        let owner = if arena.owner(v) == Player::P1 { 1 } else { 2 };
        writeln!(out, "vertex {} {} {}", arena.id(v), owner, prios.join(" ")).unwrap();
    }
    for (v, w) in arena.edges() {
        writeln!(out, "edge {} {}", arena.id(v), arena.id(w)).unwrap();
    }
    if let Some(v) = initial {
        writeln!(out, "init {}", arena.id(v)).unwrap();
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn shape(owner: Player) -> &'static str {
    match owner {
        Player::P1 => "circle",
        Player::P2 => "box",
    }
}

/// DOT text: circles for P1, boxes for P2, priorities under the name.
pub fn export_dot(arena: &Arena) -> String {
    let mut out = String::from("digraph arena {\n");
    for v in 0..arena.len() {
        let prios: Vec<String> = arena.priorities(v).iter().map(u32::to_string).collect();
        let label = format!("{}\n{}", arena.id(v), prios.join(","));
        writeln!(out, "  n{v} [shape={}, label={}];", shape(arena.owner(v)), quote(&label)).unwrap();
    }
    for (v, w) in arena.edges() {
        writeln!(out, "  n{v} -> n{w};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// DOT text of a product; `β` states are dashed and target states doubly circled.
pub fn export_product_dot(arena: &Arena, product: &ProductArena) -> String {
    let mut out = String::from("digraph product {\n");
    let graph = product.graph();
    for s in 0..product.len() {
        let label = quote(&product.label(arena, s));
        let style = match product.state(s) {
            ProductState::Normal { .. } if product.target()[s] => ", peripheries=2".to_string(),
            ProductState::Normal { .. } => String::new(),
            _ => ", style=dashed, color=gray40".to_string(),
        };
        writeln!(out, "  s{s} [shape={}, label={label}{style}];", shape(graph.owner(s))).unwrap();
    }
    for s in 0..product.len() {
        for t in graph.successors(s) {
            writeln!(out, "  s{s} -> s{t};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// `moore <player> init=<m0>` followed by `next` and `update` lines.
pub fn write_strategy(arena: &Arena, strategy: &MooreStrategy) -> String {
    let player = if strategy.player() == Player::P1 { 1 } else { 2 };
    let mut out = format!("moore {player} init={}\n", strategy.initial());
    for m in 0..strategy.size() {
        for v in 0..arena.len() {
            if let Some(w) = strategy.next(m, v) {
                writeln!(out, "next {m} {} -> {}", arena.id(v), arena.id(w)).unwrap();
            }
        }
    }
    for m in 0..strategy.size() {
        for v in 0..arena.len() {
            writeln!(out, "update {m} {} -> {}", arena.id(v), strategy.update(m, v)).unwrap();
        }
    }
    out
}

/// Parses a strategy for `arena`. Missing `update` entries keep the memory unchanged.
pub fn read_strategy(text: &str, arena: &Arena) -> Result<MooreStrategy, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(ParseError::Strategy(1, "empty strategy".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || ParseError::Strategy(line, "expected `moore <player> init=<m0>`".into());
    if words.len() != 3 || words[0] != "moore" {
        return Err(bad_header());
    }
    let player: Player = words[1].parse().map_err(|_| bad_header())?;
    let initial: usize = words[2].strip_prefix("init=").and_then(|x| x.parse().ok()).ok_or_else(bad_header)?;
    let vertex = |line: usize, id: &str| arena.vertex(id).ok_or_else(|| ParseError::UnknownVertex(line, id.into()));
    let memory_state = |line: usize, m: &str| {
        m.parse::<usize>().map_err(|_| ParseError::Strategy(line, format!("bad memory state `{m}`")))
    };
    let mut nexts = Vec::new();
    let mut updates = Vec::new();
    let mut memory = initial + 1;
    for (line, content) in lines {
        let words: Vec<&str> = content.split_whitespace().collect();
        if words.len() != 5 || words[3] != "->" {
            return Err(ParseError::Strategy(line, "expected `<next|update> <m> <v> -> <target>`".into()));
        }
        let m = memory_state(line, words[1])?;
        let v = vertex(line, words[2])?;
        memory = memory.max(m + 1);
        match words[0] {
            "next" => nexts.push((m, v, vertex(line, words[4])?)),
            "update" => {
                let u = memory_state(line, words[4])?;
                memory = memory.max(u + 1);
                updates.push((m, v, u));
            }
            other => return Err(ParseError::Strategy(line, format!("unknown directive `{other}`"))),
        }
    }
    let n = arena.len();
    let mut update: Vec<usize> = (0..memory * n).map(|i| i / n).collect();
    let mut next = vec![None; memory * n];
    for (m, v, u) in updates {
        update[m * n + v] = u;
    }
    for (m, v, w) in nexts {
        next[m * n + v] = Some(w);
    }
    MooreStrategy::new(arena, player, memory, initial, update, next)
        .map_err(|e| ParseError::InvalidStrategy(e.to_string()))
}

/// Parses `"v0 v1 | v2 v3"`: stem before the bar, cycle after; a lasso without a bar is a cycle.
pub fn parse_lasso(text: &str, arena: &Arena) -> Result<Lasso, ParseError> {
    let (stem, cycle) = match text.split_once('|') {
        Some((s, c)) => (s, c),
        None => ("", text),
    };
    let ids = |part: &str| -> Result<Vec<usize>, ParseError> {
        part.split_whitespace()
            .map(|id| arena.vertex(id).ok_or_else(|| ParseError::Lasso(format!("unknown vertex `{id}`"))))
            .collect()
    };
    Lasso::in_arena(arena, ids(stem)?, ids(cycle)?).map_err(|e| ParseError::Lasso(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::paper_gallery;

    const FIG4: &str = "winpar 1 dims=1
# one-player cycle
vertex v0 1 3
vertex v1 1 1
vertex v2 1 2
vertex v3 1 0
edge v0 v1
edge v1 v2
edge v2 v3
edge v3 v0
init v0
";

    #[test]
    fn parses_fig4() {
        let game = parse_game(FIG4).unwrap();
        assert_eq!(game.arena, paper_gallery("fig4", None).unwrap());
        assert_eq!(game.initial, Some(0));
        assert_eq!(write_game(&game.arena, game.initial), FIG4.replace("# one-player cycle\n", ""));
    }

    #[test]
    fn diagnostics() {
        assert_eq!(parse_game("winpar 1 dims=1\n"), Err(ParseError::NoVertices));
        assert_eq!(parse_game("vertex a 1 0\n"), Err(ParseError::MissingHeader));
        let err = parse_game("winpar 1 dims=1\nvertex a 1 0\nvertex b 1 0 2\n").unwrap_err();
        assert_eq!(err.to_string(), "dimension mismatch at line 3");
        let err = parse_game("winpar 1 dims=1\nvertex a 1 0\nvertex a 2 1\n").unwrap_err();
        assert_eq!(err, ParseError::DuplicateVertex(3, "a".into()));
        let err = parse_game("winpar 1 dims=1\nvertex a 1 0\nedge a b\n").unwrap_err();
        assert_eq!(err, ParseError::UnknownEndpoint(3, "b".into()));
        let err = parse_game("winpar 1 dims=1\nvertex a 1 0\nvertex b 1 0\nedge a b\n").unwrap_err();
        assert_eq!(err, ParseError::Deadlock(3, "b".into()));
    }

    #[test]
    fn round_trips() {
        for name in crate::oracle::GALLERY {
            let arena = paper_gallery(name, None).unwrap();
            let text = write_game(&arena, Some(0));
            let game = parse_game(&text).unwrap();
            assert_eq!(game.arena, arena, "{name}");
        }
    }

    #[test]
    fn fig5_dot_has_one_box() {
        let dot = export_dot(&paper_gallery("fig5", None).unwrap());
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("shape=circle").count(), 2);
    }

    #[test]
    fn lasso_syntax() {
        let arena = paper_gallery("fig4", None).unwrap();
        let l = parse_lasso("| v0 v1 v2 v3", &arena).unwrap();
        assert_eq!(l.stem_len(), 0);
        assert_eq!(parse_lasso("v0 v1 v2 v3", &arena).unwrap(), l);
        assert!(parse_lasso("v0 | v2", &arena).is_err());
    }
}
