//! Knowledge-based policies, supervisor tables and the closed loop.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{dfa_equivalent, Dfa, Equivalence, EventId, PlantSpec, StateId, SupervisionProfile, Word};
use crate::conditions::{check_controllability, check_inf_obs_extended, Counterexample, Shorthand};
use crate::fusion::{fuse, ControlDecision, DecisionBag, FusedDecision, FusionError};
use crate::kripke::{Evaluator, Formula, KripkeFrame, Relation};
use crate::observation::{Observer, WorldId};
use crate::Analysis;

/// Supervisor `i`'s knowledge about σ at one world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnowledgeSummary {
    /// `K_i e`
    pub knows_enable: bool,
    /// `K_i d`
    pub knows_disable: bool,
    /// `K_i(ē ⟹ O e)`
    pub covered_enable: bool,
    /// `K_i(d̄ ⟹ O d)`
    pub covered_disable: bool,
}

/// Which line of the knowledge-based policy produced a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyCase {
    /// `K_i e ∧ ¬K_i d`
    KnowsEnable,
    /// `¬K_i e ∧ K_i d`
    KnowsDisable,
    /// Only a wrong enable would be corrected by someone else.
    ConditionalOn,
    /// Only a wrong disable would be corrected by someone else.
    ConditionalOff,
    /// Both mistakes would be corrected.
    Covered,
    Otherwise,
}

impl PolicyCase {
    pub const ALL: [PolicyCase; 6] = [
        PolicyCase::KnowsEnable,
        PolicyCase::KnowsDisable,
        PolicyCase::ConditionalOn,
        PolicyCase::ConditionalOff,
        PolicyCase::Covered,
        PolicyCase::Otherwise,
    ];

    pub fn classify(k: KnowledgeSummary) -> PolicyCase {
        match (k.knows_enable, k.knows_disable, k.covered_enable, k.covered_disable) {
            (true, false, _, _) => PolicyCase::KnowsEnable,
            (false, true, _, _) => PolicyCase::KnowsDisable,
            (false, false, false, true) => PolicyCase::ConditionalOn,
            (false, false, true, false) => PolicyCase::ConditionalOff,
            (false, false, true, true) => PolicyCase::Covered,
            _ => PolicyCase::Otherwise,
        }
    }

    pub fn decision(self) -> ControlDecision {
        match self {
            PolicyCase::KnowsEnable => ControlDecision::On,
            PolicyCase::KnowsDisable => ControlDecision::Off,
            PolicyCase::ConditionalOn => ControlDecision::Won,
            PolicyCase::ConditionalOff => ControlDecision::Woff,
            PolicyCase::Covered | PolicyCase::Otherwise => ControlDecision::Abstain,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyCase::KnowsEnable => "knows-enable",
            PolicyCase::KnowsDisable => "knows-disable",
            PolicyCase::ConditionalOn => "conditional-on",
            PolicyCase::ConditionalOff => "conditional-off",
            PolicyCase::Covered => "covered",
            PolicyCase::Otherwise => "otherwise",
        }
    }

    /// The formula that justifies the decision, for explanations.
    pub fn reason(self, i: usize) -> String {
        let k = i + 1;
        match self {
            PolicyCase::KnowsEnable => format!("K{k} e"),
            PolicyCase::KnowsDisable => format!("K{k} d"),
            PolicyCase::ConditionalOn => format!("K{k}(d̄ ⟹ O d)"),
            PolicyCase::ConditionalOff => format!("K{k}(ē ⟹ O e)"),
            PolicyCase::Covered => format!("K{k}(ē ⟹ O e) and K{k}(d̄ ⟹ O d)"),
            PolicyCase::Otherwise => "no applicable knowledge".to_string(),
        }
    }
}

impl fmt::Display for PolicyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown policy case `{s}`"))
    }
}

/// Truth vectors of the four policy formulas for `(i, σ)` at every world.
pub fn knowledge_vectors(ev: &mut Evaluator<'_>, e: EventId, i: usize) -> [std::rc::Rc<[bool]>; 4] {
    let sh = Shorthand::new(e);
    let f = [
        Formula::know(i, sh.enable.clone()),
        Formula::know(i, sh.disable.clone()),
        sh.covered_enable(e, i),
        sh.covered_disable(e, i),
    ];
    f.map(|phi| ev.truth(&phi).expect("policy formulas are well formed"))
}

pub fn knowledge_summary(ev: &mut Evaluator<'_>, w: WorldId, e: EventId, i: usize) -> KnowledgeSummary {
    let [a, b, c, d] = knowledge_vectors(ev, e, i);
    KnowledgeSummary {
        knows_enable: a[w.0],
        knows_disable: b[w.0],
        covered_enable: c[w.0],
        covered_disable: d[w.0],
    }
}

/// The knowledge-based policy `kp(w, σ, i)`, evaluated with partial relations.
pub fn kp(frame: &KripkeFrame, w: WorldId, e: EventId, i: usize) -> ControlDecision {
    let mut ev = Evaluator::new(frame, Relation::Partial);
    PolicyCase::classify(knowledge_summary(&mut ev, w, e, i)).decision()
}

/// One cell of a supervisor table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionEntry {
    pub decision: ControlDecision,
    /// `None` for entries that were not produced by the policy.
    pub case: Option<PolicyCase>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("the legal language is not controllable")]
    NotControllable(Counterexample),
    #[error("the problem is not inference-observable")]
    NotInferenceObservable(Counterexample),
    #[error("supervisor {} decides {event:?} differently at worlds {first:?} and {second:?} of estimate {estimate}", .supervisor + 1)]
    PolicyAmbiguity {
        supervisor: usize,
        event: EventId,
        estimate: usize,
        first: WorldId,
        second: WorldId,
    },
}

/// `KP'_i(·, σ)`: the policy lifted to observer states.
///
/// Only legal worlds are consulted: at an illegal world every `K_i` holds
/// vacuously and the policy abstains, which carries no information about the
/// estimate. An estimate without legal worlds gets the `otherwise` abstention.
pub fn project_policy(
    frame: &KripkeFrame,
    i: usize,
    e: EventId,
    states: usize,
) -> Result<Vec<DecisionEntry>, SynthesisError> {
    let mut ev = Evaluator::new(frame, Relation::Partial);
    project_policy_with(&mut ev, i, e, states)
}

fn project_policy_with(
    ev: &mut Evaluator<'_>,
    i: usize,
    e: EventId,
    states: usize,
) -> Result<Vec<DecisionEntry>, SynthesisError> {
    let frame = ev.frame();
    let [a, b, c, d] = knowledge_vectors(ev, e, i);
    let mut seen: Vec<Option<(WorldId, PolicyCase)>> = vec![None; states];
    for w in frame.legal_worlds() {
        let case = PolicyCase::classify(KnowledgeSummary {
            knows_enable: a[w.0],
            knows_disable: b[w.0],
            covered_enable: c[w.0],
            covered_disable: d[w.0],
        });
        let s = frame.estimate(w, i);
        match seen[s] {
            None => seen[s] = Some((w, case)),
            Some((first, prev)) if prev.decision() != case.decision() => {
                return Err(SynthesisError::PolicyAmbiguity {
                    supervisor: i,
                    event: e,
                    estimate: s,
                    first,
                    second: w,
                })
            }
            Some(_) => {}
        }
    }
    Ok(seen
        .into_iter()
        .map(|x| {
            let case = x.map_or(PolicyCase::Otherwise, |(_, c)| c);
            DecisionEntry {
                decision: case.decision(),
                case: Some(case),
            }
        })
        .collect())
}

/// A supervisor realized as a Moore machine: its observer and a decision per
/// observer state and controllable event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supervisor {
    pub index: usize,
    pub observer: Observer,
    table: BTreeMap<(usize, EventId), DecisionEntry>,
}

impl Supervisor {
    pub fn new(index: usize, observer: Observer) -> Self {
        Supervisor {
            index,
            observer,
            table: BTreeMap::new(),
        }
    }

    pub fn entry(&self, state: usize, e: EventId) -> Option<DecisionEntry> {
        self.table.get(&(state, e)).copied()
    }

    pub fn decision(&self, state: usize, e: EventId) -> Option<ControlDecision> {
        self.entry(state, e).map(|x| x.decision)
    }

    pub fn insert(&mut self, state: usize, e: EventId, entry: DecisionEntry) {
        self.table.insert((state, e), entry);
    }

    /// Overwrites a cell; the entry loses its provenance.
    pub fn set_decision(&mut self, state: usize, e: EventId, decision: ControlDecision) {
        self.insert(state, e, DecisionEntry { decision, case: None });
    }

    /// Cells ordered by observer state, then event index.
    pub fn entries(&self) -> impl Iterator<Item = (usize, EventId, DecisionEntry)> + '_ {
        self.table.iter().map(|(&(s, e), &x)| (s, e, x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisResult {
    pub supervisors: Vec<Supervisor>,
    pub defaults: BTreeMap<EventId, FusedDecision>,
}

/// Checks controllability and extended inference-observability and, when
/// both hold, tabulates the policy for every supervisor and controllable event.
pub fn synthesize(analysis: &Analysis) -> Result<SynthesisResult, SynthesisError> {
    let frame = analysis.frame();
    let v = check_controllability(frame);
    if let Some(cx) = v.counterexample {
        return Err(SynthesisError::NotControllable(cx));
    }
    let v = check_inf_obs_extended(frame);
    if let Some(cx) = v.counterexample {
        return Err(SynthesisError::NotInferenceObservable(cx));
    }
    let mut ev = Evaluator::new(frame, Relation::Partial);
    let profile = analysis.profile();
    let mut supervisors = Vec::new();
    for i in 0..profile.supervisors() {
        let observer = analysis.composite().observer(i).clone();
        let states = observer.state_count();
        let mut sup = Supervisor::new(i, observer);
        for &e in profile.controllable(i) {
            for (s, entry) in project_policy_with(&mut ev, i, e, states)?.into_iter().enumerate() {
                sup.insert(s, e, entry);
            }
        }
        supervisors.push(sup);
    }
    Ok(SynthesisResult {
        supervisors,
        defaults: v.defaults,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosedLoopError {
    #[error("supervisor {} has no decision for event {event:?} at observer state {state}", .supervisor + 1)]
    MissingEntry {
        supervisor: usize,
        state: usize,
        event: EventId,
    },
    #[error("no default for event {0:?}")]
    MissingDefault(EventId),
    #[error("expected {expected} supervisors, found {found}")]
    SupervisorCount { expected: usize, found: usize },
    #[error("{error} after {string:?} on {event:?}")]
    Fusion {
        error: FusionError,
        string: Word,
        event: EventId,
    },
}

/// The fused decision of the supervisors in `N_σ` at the given observer
/// states; `None` for uncontrollable events.
pub fn decide(
    profile: &SupervisionProfile,
    result: &SynthesisResult,
    states: &[usize],
    e: EventId,
) -> Result<Option<(DecisionBag, Result<FusedDecision, FusionError>)>, ClosedLoopError> {
    let n = profile.controllers(e);
    if n.is_empty() {
        return Ok(None);
    }
    let mut bag = Vec::with_capacity(n.len());
    for i in n {
        let d = result.supervisors[i]
            .decision(states[i], e)
            .ok_or(ClosedLoopError::MissingEntry {
                supervisor: i,
                state: states[i],
                event: e,
            })?;
        bag.push(d);
    }
    let dft = *result.defaults.get(&e).ok_or(ClosedLoopError::MissingDefault(e))?;
    let bag = DecisionBag::new(bag);
    let fused = fuse(&bag, dft);
    Ok(Some((bag, fused)))
}

/// `L(f_N/G)` as a DFA over the plant's alphabet.
///
/// Fusion is only evaluated where σ is physically possible.
pub fn closed_loop(
    plant: &PlantSpec,
    profile: &SupervisionProfile,
    result: &SynthesisResult,
) -> Result<Dfa, ClosedLoopError> {
    if result.supervisors.len() != profile.supervisors() {
        return Err(ClosedLoopError::SupervisorCount {
            expected: profile.supervisors(),
            found: result.supervisors.len(),
        });
    }
    type Node = (StateId, Vec<usize>);
    let init: Node = (
        plant.initial(),
        result.supervisors.iter().map(|s| s.observer.initial()).collect(),
    );
    let mut index: HashMap<Node, usize> = HashMap::from([(init.clone(), 0)]);
    let mut nodes = vec![init];
    let mut witness: Vec<Word> = vec![Vec::new()];
    let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; plant.event_count()]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for &e in plant.events_by_name() {
            let (q, states) = nodes[k].clone();
            let Some(t) = plant.step(q, e) else { continue };
            if let Some((_, fused)) = decide(profile, result, &states, e)? {
                match fused {
                    Ok(FusedDecision::Enable) => {}
                    Ok(FusedDecision::Disable) => continue,
                    Err(error) => {
                        return Err(ClosedLoopError::Fusion {
                            error,
                            string: witness[k].clone(),
                            event: e,
                        })
                    }
                }
            }
            let next_states: Vec<usize> = result
                .supervisors
                .iter()
                .zip(&states)
                .map(|(s, &x)| s.observer.step(x, e).expect("observer follows the plant"))
                .collect();
            let node = (t, next_states);
            let id = match index.get(&node) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    index.insert(node.clone(), id);
                    nodes.push(node);
                    let mut w = witness[k].clone();
                    w.push(e);
                    witness.push(w);
                    delta.push(vec![None; plant.event_count()]);
                    queue.push_back(id);
                    id
                }
            };
            delta[k][e.0] = Some(id);
        }
    }
    let alphabet = plant.events().map(|e| plant.event_name(e).to_string()).collect();
    Ok(Dfa::new(alphabet, 0, delta).expect("closed loop table is well formed"))
}

/// Compares the closed loop with `L(E)`.
pub fn verify_solution(
    plant: &PlantSpec,
    profile: &SupervisionProfile,
    result: &SynthesisResult,
) -> Result<Equivalence, ClosedLoopError> {
    let cl = closed_loop(plant, profile, result)?;
    Ok(dfa_equivalent(&cl, &plant.to_dfa(true)).expect("same alphabet"))
}
