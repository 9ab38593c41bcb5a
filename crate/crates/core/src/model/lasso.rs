use thiserror::Error;

use super::arena::Arena;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso cycle must be nonempty")]
    EmptyCycle,
    #[error("lasso refers to vertex index {0} outside the arena")]
    UnknownVertex(usize),
    #[error("no edge {0} -> {1} in the arena")]
    MissingEdge(String, String),
}

/// Ultimately periodic play `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    stem: Vec<usize>,
    cycle: Vec<usize>,
}

impl Lasso {
    pub fn new(stem: Vec<usize>, cycle: Vec<usize>) -> Result<Lasso, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        Ok(Lasso { stem, cycle })
    }

    /// Builds a lasso and checks every step against the arena edges.
    pub fn in_arena(arena: &Arena, stem: Vec<usize>, cycle: Vec<usize>) -> Result<Lasso, LassoError> {
        let lasso = Lasso::new(stem, cycle)?;
        lasso.validate(arena)?;
        Ok(lasso)
    }

    pub fn stem(&self) -> &[usize] {
        &self.stem
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn stem_len(&self) -> usize {
        self.stem.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Vertex at position `i` of the induced play.
    pub fn at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// First `k` vertices of the play.
    pub fn unroll(&self, k: usize) -> Vec<usize> {
        (0..k).map(|i| self.at(i)).collect()
    }

    pub fn validate(&self, arena: &Arena) -> Result<(), LassoError> {
        let total = self.stem.len() + self.cycle.len();
        for i in 0..total {
            let v = self.at(i);
            if v >= arena.len() {
                return Err(LassoError::UnknownVertex(v));
            }
        }
        for i in 0..total {
            let (v, w) = (self.at(i), self.at(i + 1));
            if !arena.has_edge(v, w) {
                return Err(LassoError::MissingEdge(arena.id(v).into(), arena.id(w).into()));
            }
        }
        Ok(())
    }

    /// Renders the lasso as `stem ids | cycle ids`.
    /// Same play with the shortest stem and the primitive cycle.
    pub fn canonical(&self) -> Lasso {
        let mut stem = self.stem.clone();
        let mut cycle = self.cycle.clone();
        let c = cycle.len();
        let period = (1..=c).find(|&p| c.is_multiple_of(p) && (p..c).all(|i| cycle[i] == cycle[i - p])).unwrap();
        cycle.truncate(period);
        while stem.last() == cycle.last() && !stem.is_empty() {
            stem.pop();
            cycle.rotate_right(1);
        }
        Lasso { stem, cycle }
    }

    pub fn display(&self, arena: &Arena) -> String {
        let join = |vs: &[usize]| vs.iter().map(|&v| arena.id(v)).collect::<Vec<_>>().join(" ");
        if self.stem.is_empty() {
            format!("| {}", join(&self.cycle))
        } else {
            format!("{} | {}", join(&self.stem), join(&self.cycle))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unroll_examples() {
        let l = Lasso::new(vec![], vec![0, 1, 2, 3]).unwrap();
        assert_eq!(l.unroll(6), vec![0, 1, 2, 3, 0, 1]);
        let l = Lasso::new(vec![7], vec![8]).unwrap();
        assert_eq!(l.unroll(3), vec![7, 8, 8]);
        let l = Lasso::new(vec![], vec![5]).unwrap();
        assert!(l.unroll(0).is_empty());
        assert_eq!(Lasso::new(vec![1], vec![]), Err(LassoError::EmptyCycle));
    }

    #[test]
    fn unroll_is_prefix_closed() {
        let l = Lasso::new(vec![4, 2], vec![1, 3, 0]).unwrap();
        for k1 in 0..12 {
            for k2 in k1..12 {
                assert_eq!(l.unroll(k1)[..], l.unroll(k2)[..k1]);
            }
        }
    }
}
