//! Decentralized supervisory control with knowledge-based supervisors.
//!
//! The pipeline is: a [`PlantSpec`](automata::PlantSpec) and a
//! [`SupervisionProfile`](automata::SupervisionProfile) are projected into
//! per-supervisor observers and composed into worlds
//! ([`observation`]); the worlds form a Kripke frame ([`kripke`]) on which
//! controllability and the observability conditions are decided
//! ([`conditions`]). When they hold, [`synthesis`] builds one decision table
//! per supervisor and checks the closed loop against the legal language.
//! [`oracle`] re-derives the same answers by brute force.

pub mod automata;
pub mod conditions;
pub mod explain;
pub mod fixtures;
pub mod format;
pub mod fusion;
pub mod kripke;
pub mod observation;
pub mod oracle;
pub mod synthesis;

use automata::{PlantSpec, SupervisionProfile};
use kripke::KripkeFrame;
use observation::Composite;

/// A plant with its legal behaviour and the supervisors' capabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub plant: PlantSpec,
    pub profile: SupervisionProfile,
}

/// A problem together with its composite automaton and Kripke frame.
#[derive(Debug, Clone)]
pub struct Analysis {
    problem: Problem,
    composite: Composite,
    frame: KripkeFrame,
}

impl Analysis {
    pub fn new(problem: Problem) -> Self {
        let composite = Composite::build(&problem.plant, &problem.profile);
        let frame = KripkeFrame::build(&composite, &problem.plant, &problem.profile);
        Analysis {
            problem,
            composite,
            frame,
        }
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn plant(&self) -> &PlantSpec {
        &self.problem.plant
    }

    pub fn profile(&self) -> &SupervisionProfile {
        &self.problem.profile
    }

    pub fn composite(&self) -> &Composite {
        &self.composite
    }

    pub fn frame(&self) -> &KripkeFrame {
        &self.frame
    }
}
