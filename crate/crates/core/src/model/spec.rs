use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::arena::Arena;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ObjectiveKind {
    Parity,
    FixPR,
    FixWP,
    BndPR,
    BndWP,
    Reach,
    Safe,
    Buchi,
    CoBuchi,
    GenReach,
}

/// Parity-response versus window-parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    PR,
    WP,
}

impl ObjectiveKind {
    pub fn family(self) -> Option<Family> {
        match self {
            ObjectiveKind::FixPR | ObjectiveKind::BndPR => Some(Family::PR),
            ObjectiveKind::FixWP | ObjectiveKind::BndWP => Some(Family::WP),
            _ => None,
        }
    }

    pub fn is_fixed(self) -> bool {
        matches!(self, ObjectiveKind::FixPR | ObjectiveKind::FixWP)
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, ObjectiveKind::BndPR | ObjectiveKind::BndWP)
    }

    pub fn is_window(self) -> bool {
        self.family().is_some()
    }

    pub fn uses_targets(self) -> bool {
        matches!(
            self,
            ObjectiveKind::Reach
                | ObjectiveKind::Safe
                | ObjectiveKind::Buchi
                | ObjectiveKind::CoBuchi
                | ObjectiveKind::GenReach
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::Parity => "parity",
            ObjectiveKind::FixPR => "fixpr",
            ObjectiveKind::FixWP => "fixwp",
            ObjectiveKind::BndPR => "bndpr",
            ObjectiveKind::BndWP => "bndwp",
            ObjectiveKind::Reach => "reach",
            ObjectiveKind::Safe => "safe",
            ObjectiveKind::Buchi => "buchi",
            ObjectiveKind::CoBuchi => "cobuchi",
            ObjectiveKind::GenReach => "genreach",
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "parity" => ObjectiveKind::Parity,
            "fixpr" => ObjectiveKind::FixPR,
            "fixwp" => ObjectiveKind::FixWP,
            "bndpr" => ObjectiveKind::BndPR,
            "bndwp" => ObjectiveKind::BndWP,
            "reach" => ObjectiveKind::Reach,
            "safe" => ObjectiveKind::Safe,
            "buchi" => ObjectiveKind::Buchi,
            "cobuchi" => ObjectiveKind::CoBuchi,
            "genreach" => ObjectiveKind::GenReach,
            other => return Err(SpecError::UnknownKind(other.to_string())),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("unknown objective `{0}`")]
    UnknownKind(String),
    #[error("λ missing for {0}")]
    MissingLambda(&'static str),
    #[error("λ must be at least 1")]
    ZeroLambda,
    #[error("{0} takes no λ")]
    UnexpectedLambda(&'static str),
    #[error("{0} needs {1} target set(s), got {2}")]
    TargetCount(&'static str, &'static str, usize),
    #[error("target vertex index {0} outside the arena")]
    TargetOutOfRange(usize),
    #[error("dimension mismatch: objective is for {expected} dimension(s), arena has {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Which objective to decide, with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub direct: bool,
    pub lambda: Option<u32>,
    /// Vertex index sets for the classical objectives; one set except for `GenReach`.
    pub targets: Vec<Vec<usize>>,
}

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind, direct: bool, lambda: Option<u32>) -> ObjectiveSpec {
        ObjectiveSpec { kind, direct, lambda, targets: Vec::new() }
    }

    pub fn parity() -> ObjectiveSpec {
        ObjectiveSpec::new(ObjectiveKind::Parity, false, None)
    }

    pub fn fix_pr(lambda: u32, direct: bool) -> ObjectiveSpec {
        ObjectiveSpec::new(ObjectiveKind::FixPR, direct, Some(lambda))
    }

    pub fn fix_wp(lambda: u32, direct: bool) -> ObjectiveSpec {
        ObjectiveSpec::new(ObjectiveKind::FixWP, direct, Some(lambda))
    }

    pub fn bnd_pr(direct: bool) -> ObjectiveSpec {
        ObjectiveSpec::new(ObjectiveKind::BndPR, direct, None)
    }

    pub fn bnd_wp(direct: bool) -> ObjectiveSpec {
        ObjectiveSpec::new(ObjectiveKind::BndWP, direct, None)
    }

    /// Fixed or bounded window objective of the given family.
    pub fn window(family: Family, lambda: Option<u32>, direct: bool) -> ObjectiveSpec {
        match (family, lambda) {
            (Family::PR, Some(l)) => ObjectiveSpec::fix_pr(l, direct),
            (Family::WP, Some(l)) => ObjectiveSpec::fix_wp(l, direct),
            (Family::PR, None) => ObjectiveSpec::bnd_pr(direct),
            (Family::WP, None) => ObjectiveSpec::bnd_wp(direct),
        }
    }

    pub fn with_targets(kind: ObjectiveKind, targets: Vec<Vec<usize>>) -> ObjectiveSpec {
        ObjectiveSpec { kind, direct: false, lambda: None, targets }
    }

    pub fn reach(target: Vec<usize>) -> ObjectiveSpec {
        ObjectiveSpec::with_targets(ObjectiveKind::Reach, vec![target])
    }

    pub fn safe(safe: Vec<usize>) -> ObjectiveSpec {
        ObjectiveSpec::with_targets(ObjectiveKind::Safe, vec![safe])
    }

    pub fn buchi(accepting: Vec<usize>) -> ObjectiveSpec {
        ObjectiveSpec::with_targets(ObjectiveKind::Buchi, vec![accepting])
    }

    pub fn cobuchi(allowed: Vec<usize>) -> ObjectiveSpec {
        ObjectiveSpec::with_targets(ObjectiveKind::CoBuchi, vec![allowed])
    }

    pub fn genreach(targets: Vec<Vec<usize>>) -> ObjectiveSpec {
        ObjectiveSpec::with_targets(ObjectiveKind::GenReach, targets)
    }

    pub fn family(&self) -> Option<Family> {
        self.kind.family()
    }

    /// The same objective with λ replaced (bounded kinds become fixed ones).
    pub fn at_lambda(&self, lambda: u32) -> ObjectiveSpec {
        let family = self.family().expect("window objective");
        ObjectiveSpec::window(family, Some(lambda), self.direct)
    }

    /// Checks the shape of the spec without an arena.
    pub fn check(&self) -> Result<(), SpecError> {
        let name = self.kind.name();
        if self.kind.is_fixed() {
            match self.lambda {
                None => return Err(SpecError::MissingLambda(name)),
                Some(0) => return Err(SpecError::ZeroLambda),
                Some(_) => {}
            }
        } else if self.lambda.is_some() {
            return Err(SpecError::UnexpectedLambda(name));
        }
        match self.kind {
            ObjectiveKind::GenReach if self.targets.is_empty() => Err(SpecError::TargetCount(name, "at least one", 0)),
            ObjectiveKind::GenReach => Ok(()),
            k if k.uses_targets() && self.targets.len() != 1 => {
                Err(SpecError::TargetCount(name, "exactly one", self.targets.len()))
            }
            k if !k.uses_targets() && !self.targets.is_empty() => {
                Err(SpecError::TargetCount(name, "no", self.targets.len()))
            }
            _ => Ok(()),
        }
    }

    /// Checks the spec against an arena.
    pub fn check_for(&self, arena: &Arena) -> Result<(), SpecError> {
        self.check()?;
        for set in &self.targets {
            if let Some(&v) = set.iter().find(|&&v| v >= arena.len()) {
                return Err(SpecError::TargetOutOfRange(v));
            }
        }
        Ok(())
    }

    /// Target set `i` as a membership mask over `n` vertices.
    pub fn target_mask(&self, i: usize, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.targets[i] {
            mask[v] = true;
        }
        mask
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = if self.direct && self.kind.is_window() { "dir" } else { "" };
        write!(f, "{prefix}{}", self.kind.name())?;
        if let Some(l) = self.lambda {
            write!(f, "({l})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        assert!(ObjectiveSpec::fix_pr(3, true).check().is_ok());
        assert_eq!(
            ObjectiveSpec::new(ObjectiveKind::FixWP, false, None).check(),
            Err(SpecError::MissingLambda("fixwp"))
        );
        assert_eq!(ObjectiveSpec::fix_wp(0, false).check(), Err(SpecError::ZeroLambda));
        assert!(ObjectiveSpec::new(ObjectiveKind::BndPR, false, Some(2)).check().is_err());
        assert!(ObjectiveSpec::reach(vec![0]).check().is_ok());
        assert!(ObjectiveSpec::with_targets(ObjectiveKind::Reach, vec![]).check().is_err());
        assert!(ObjectiveSpec::genreach(vec![vec![0], vec![1]]).check().is_ok());
    }

    #[test]
    fn names_round_trip() {
        for kind in [
            ObjectiveKind::Parity,
            ObjectiveKind::FixPR,
            ObjectiveKind::FixWP,
            ObjectiveKind::BndPR,
            ObjectiveKind::BndWP,
            ObjectiveKind::Reach,
            ObjectiveKind::Safe,
            ObjectiveKind::Buchi,
            ObjectiveKind::CoBuchi,
            ObjectiveKind::GenReach,
        ] {
            assert_eq!(kind.name().parse::<ObjectiveKind>().unwrap(), kind);
        }
        assert_eq!(ObjectiveSpec::fix_wp(4, true).to_string(), "dirfixwp(4)");
    }
}
