//! Control decisions and fusion rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A supervisor's vote on one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlDecision {
    On,
    Off,
    /// Conditional on: prevails unless some supervisor issues a definite decision.
    Won,
    /// Conditional off.
    Woff,
    Abstain,
}

impl ControlDecision {
    pub const ALL: [ControlDecision; 5] = [
        ControlDecision::On,
        ControlDecision::Off,
        ControlDecision::Won,
        ControlDecision::Woff,
        ControlDecision::Abstain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ControlDecision::On => "on",
            ControlDecision::Off => "off",
            ControlDecision::Won => "won",
            ControlDecision::Woff => "woff",
            ControlDecision::Abstain => "abstain",
        }
    }
}

impl fmt::Display for ControlDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControlDecision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ControlDecision::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown control decision `{s}`"))
    }
}

/// The final decision for an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusedDecision {
    Enable,
    Disable,
}

impl FusedDecision {
    pub fn as_str(self) -> &'static str {
        match self {
            FusedDecision::Enable => "enable",
            FusedDecision::Disable => "disable",
        }
    }
}

impl fmt::Display for FusedDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusedDecision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enable" => Ok(FusedDecision::Enable),
            "disable" => Ok(FusedDecision::Disable),
            _ => Err(format!("unknown fused decision `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("control conflict: both on and off were issued")]
    ControlConflict,
    #[error("undefined fusion: won and woff without a definite decision")]
    UndefinedFusion,
    #[error("no fusion table row for ({0}, {1})")]
    NoTableRow(ControlDecision, ControlDecision),
}

/// The decisions issued for one event by the supervisors in `N_σ`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DecisionBag(Vec<ControlDecision>);

impl DecisionBag {
    pub fn new(decisions: Vec<ControlDecision>) -> Self {
        DecisionBag(decisions)
    }

    pub fn contains(&self, d: ControlDecision) -> bool {
        self.0.contains(&d)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn decisions(&self) -> &[ControlDecision] {
        &self.0
    }
}

impl FromIterator<ControlDecision> for DecisionBag {
    fn from_iter<T: IntoIterator<Item = ControlDecision>>(iter: T) -> Self {
        DecisionBag(iter.into_iter().collect())
    }
}

impl fmt::Display for DecisionBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, d) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}

/// Five-valued fusion with a per-event default.
///
/// Definite decisions dominate conditional ones; the default applies only
/// when every supervisor abstains.
pub fn fuse(cd: &DecisionBag, dft: FusedDecision) -> Result<FusedDecision, FusionError> {
    use ControlDecision::*;
    let (on, off) = (cd.contains(On), cd.contains(Off));
    let (won, woff) = (cd.contains(Won), cd.contains(Woff));
    match (on, off) {
        (true, true) => Err(FusionError::ControlConflict),
        (true, false) => Ok(FusedDecision::Enable),
        (false, true) => Ok(FusedDecision::Disable),
        (false, false) => match (won, woff) {
            (true, true) => Err(FusionError::UndefinedFusion),
            (true, false) => Ok(FusedDecision::Enable),
            (false, true) => Ok(FusedDecision::Disable),
            (false, false) => Ok(dft),
        },
    }
}

/// The legacy two-supervisor table over `{on, off, woff, abstain}`.
///
/// Unlike [`fuse`], a definite `off` beats `on` here.
pub fn fuse_ricker(a: ControlDecision, b: ControlDecision) -> Result<FusedDecision, FusionError> {
    use ControlDecision::*;
    use FusedDecision::*;
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    match (x, y) {
        (On, On) | (On, Woff) | (On, Abstain) => Ok(Enable),
        (Off, Off) | (On, Off) | (Off, Abstain) => Ok(Disable),
        (Off, Woff) | (Woff, Woff) | (Woff, Abstain) => Ok(Disable),
        (Abstain, Abstain) => Ok(Enable),
        _ => Err(FusionError::NoTableRow(a, b)),
    }
}

#[cfg(test)]
mod tests {
    use super::ControlDecision::*;
    use super::FusedDecision::*;
    use super::*;

    fn bag(ds: &[ControlDecision]) -> DecisionBag {
        ds.iter().copied().collect()
    }

    #[test]
    fn fuse_cases() {
        assert_eq!(fuse(&bag(&[On, Abstain, Abstain]), Disable), Ok(Enable));
        assert_eq!(fuse(&bag(&[Off, Woff]), Enable), Ok(Disable));
        assert_eq!(fuse(&bag(&[Won, Abstain]), Disable), Ok(Enable));
        assert_eq!(fuse(&bag(&[Woff, Abstain]), Enable), Ok(Disable));
        assert_eq!(fuse(&bag(&[Abstain, Abstain]), Disable), Ok(Disable));
        assert_eq!(fuse(&bag(&[On, Off]), Enable), Err(FusionError::ControlConflict));
        assert_eq!(fuse(&bag(&[Won, Woff]), Enable), Err(FusionError::UndefinedFusion));
        assert_eq!(fuse(&bag(&[On, Won, Woff]), Disable), Ok(Enable));
    }

    #[test]
    fn ricker_table_rows() {
        let rows = [
            (On, On, Enable),
            (On, Woff, Enable),
            (On, Abstain, Enable),
            (Off, Off, Disable),
            (Off, On, Disable),
            (Off, Abstain, Disable),
            (Woff, Off, Disable),
            (Woff, Woff, Disable),
            (Woff, Abstain, Disable),
            (Abstain, Abstain, Enable),
        ];
        for (a, b, want) in rows {
            assert_eq!(fuse_ricker(a, b), Ok(want), "{a} {b}");
            assert_eq!(fuse_ricker(b, a), Ok(want), "{b} {a}");
        }
        assert!(fuse_ricker(Won, Abstain).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for d in ControlDecision::ALL {
            assert_eq!(d.as_str().parse::<ControlDecision>(), Ok(d));
        }
        assert!("maybe".parse::<ControlDecision>().is_err());
    }
}
