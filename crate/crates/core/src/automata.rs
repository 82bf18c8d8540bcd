//! Deterministic plant model with an in-place legal subautomaton.
//!
//! A [`PlantSpec`] is the plant `G` together with the legal behaviour `E`,
//! encoded as legality flags on states and transitions. The [`Dfa`] type is a
//! plain generated-language automaton used for language comparisons between
//! the plant, the composite and closed loops.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Default bound for string enumeration.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Index of an event within a [`PlantSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

/// Index of a state within a [`PlantSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// A string of events.
pub type Word = Vec<EventId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("no initial state")]
    NoInitial,
    #[error("more than one initial state (`{0}` and `{1}`)")]
    MultipleInitial(String, String),
    #[error("undefined state `{0}`")]
    UnknownState(String),
    #[error("undefined event `{0}`")]
    UnknownEvent(String),
    #[error("state `{state}` already has a transition on `{event}`")]
    Nondeterministic { state: String, event: String },
    #[error("initial state `{0}` is not legal")]
    IllegalInitial(String),
    #[error("legal transition `{from} {event} {target}` touches an illegal state")]
    LegalTransitionOutsideE {
        from: String,
        event: String,
        target: String,
    },
    #[error("transition `{from} {event} {target}` enters legal state `{target}` but is not legal")]
    IllegalEntry {
        from: String,
        event: String,
        target: String,
    },
    #[error("state `{0}` is unreachable from the initial state")]
    UnreachableState(String),
    #[error("at least one supervisor is required")]
    NoSupervisors,
    #[error("supervisor index {index} out of range 1..={n}")]
    SupervisorOutOfRange { index: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct StateInfo {
    name: String,
    legal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub target: StateId,
    pub legal: bool,
}

/// The plant `G` and its legal subautomaton `E`.
///
/// Invariants established by [`PlantBuilder::build`]:
/// the initial state is legal, legal transitions connect legal states,
/// every transition entering a legal state is itself legal (so a legal state
/// is reached exactly by the legal strings), and every state is reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantSpec {
    events: Vec<String>,
    states: Vec<StateInfo>,
    initial: StateId,
    delta: Vec<Vec<Option<Transition>>>,
    events_by_name: Vec<EventId>,
}

impl PlantSpec {
    pub fn builder() -> PlantBuilder {
        PlantBuilder::default()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len()).map(EventId)
    }

    /// Events sorted by name; the canonical exploration order.
    pub fn events_by_name(&self) -> &[EventId] {
        &self.events_by_name
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.0]
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0].name
    }

    pub fn event_by_name(&self, name: &str) -> Option<EventId> {
        self.events.iter().position(|n| n == name).map(EventId)
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_legal(&self, q: StateId) -> bool {
        self.states[q.0].legal
    }

    pub fn transition(&self, q: StateId, e: EventId) -> Option<Transition> {
        self.delta[q.0][e.0]
    }

    /// `δ^G(q, σ)`.
    pub fn step(&self, q: StateId, e: EventId) -> Option<StateId> {
        self.transition(q, e).map(|t| t.target)
    }

    /// `δ^E(q, σ)`.
    pub fn step_legal(&self, q: StateId, e: EventId) -> Option<StateId> {
        self.transition(q, e).filter(|t| t.legal).map(|t| t.target)
    }

    /// All transitions as `(source, event, transition)` in state/event order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, Transition)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(e, t)| t.map(|t| (StateId(q), EventId(e), t)))
        })
    }

    /// Runs a string through `G` (or `E` when `legal_only`).
    pub fn run(&self, word: &[EventId], legal_only: bool) -> Option<StateId> {
        word.iter().try_fold(self.initial, |q, &e| {
            if legal_only {
                self.step_legal(q, e)
            } else {
                self.step(q, e)
            }
        })
    }

    pub fn format_word(&self, word: &[EventId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter().map(|&e| self.event_name(e)).collect::<Vec<_>>().join(" ")
    }

    pub fn word_names(&self, word: &[EventId]) -> Vec<String> {
        word.iter().map(|&e| self.event_name(e).to_string()).collect()
    }

    /// The generated language automaton of `G`, or of `E` when `legal_only`.
    pub fn to_dfa(&self, legal_only: bool) -> Dfa {
        let delta = self
            .delta
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| t.filter(|t| !legal_only || t.legal).map(|t| t.target.0))
                    .collect()
            })
            .collect();
        Dfa::new(self.events.clone(), self.initial.0, delta).expect("plant transition table is well formed")
    }
}

/// Incremental constructor for [`PlantSpec`].
#[derive(Debug, Default, Clone)]
pub struct PlantBuilder {
    events: Vec<String>,
    states: Vec<StateInfo>,
    initial: Vec<usize>,
    transitions: Vec<(String, String, String, bool)>,
}

/// Identifiers are nonempty tokens without whitespace, `#`, `,` or `=`.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || matches!(c, '#' | ',' | '='))
}

impl PlantBuilder {
    pub fn event(&mut self, name: &str) -> &mut Self {
        self.events.push(name.to_string());
        self
    }

    pub fn state(&mut self, name: &str, initial: bool, legal: bool) -> &mut Self {
        if initial {
            self.initial.push(self.states.len());
        }
        self.states.push(StateInfo {
            name: name.to_string(),
            legal,
        });
        self
    }

    pub fn transition(&mut self, source: &str, event: &str, target: &str, legal: bool) -> &mut Self {
        self.transitions
            .push((source.into(), event.into(), target.into(), legal));
        self
    }

    pub fn build(&self) -> Result<PlantSpec, ModelError> {
        let mut event_index = HashMap::new();
        for (i, name) in self.events.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(ModelError::InvalidName(name.clone()));
            }
            if event_index.insert(name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateEvent(name.clone()));
            }
        }
        let mut state_index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if !is_valid_name(&s.name) {
                return Err(ModelError::InvalidName(s.name.clone()));
            }
            if state_index.insert(s.name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateState(s.name.clone()));
            }
        }
        let initial = match self.initial.as_slice() {
            [] => return Err(ModelError::NoInitial),
            [q] => *q,
            [a, b, ..] => {
                return Err(ModelError::MultipleInitial(
                    self.states[*a].name.clone(),
                    self.states[*b].name.clone(),
                ))
            }
        };
        if !self.states[initial].legal {
            return Err(ModelError::IllegalInitial(self.states[initial].name.clone()));
        }

        let mut delta = vec![vec![None; self.events.len()]; self.states.len()];
        for (src, ev, dst, legal) in &self.transitions {
            let s = *state_index
                .get(src.as_str())
                .ok_or_else(|| ModelError::UnknownState(src.clone()))?;
            let e = *event_index
                .get(ev.as_str())
                .ok_or_else(|| ModelError::UnknownEvent(ev.clone()))?;
            let t = *state_index
                .get(dst.as_str())
                .ok_or_else(|| ModelError::UnknownState(dst.clone()))?;
            if delta[s][e].is_some() {
                return Err(ModelError::Nondeterministic {
                    state: src.clone(),
                    event: ev.clone(),
                });
            }
            if *legal && !(self.states[s].legal && self.states[t].legal) {
                return Err(ModelError::LegalTransitionOutsideE {
                    from: src.clone(),
                    event: ev.clone(),
                    target: dst.clone(),
                });
            }
            if !*legal && self.states[t].legal {
                return Err(ModelError::IllegalEntry {
                    from: src.clone(),
                    event: ev.clone(),
                    target: dst.clone(),
                });
            }
            delta[s][e] = Some(Transition {
                target: StateId(t),
                legal: *legal,
            });
        }

        let mut events_by_name: Vec<EventId> = (0..self.events.len()).map(EventId).collect();
        events_by_name.sort_by(|a, b| self.events[a.0].cmp(&self.events[b.0]));

        let plant = PlantSpec {
            events: self.events.clone(),
            states: self.states.clone(),
            initial: StateId(initial),
            delta,
            events_by_name,
        };
        let reach = reachable(&plant, false);
        if let Some(q) = plant.states().find(|q| !reach.contains(q)) {
            return Err(ModelError::UnreachableState(plant.state_name(q).to_string()));
        }
        Ok(plant)
    }
}

/// Observation and control capabilities of the `n` supervisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisionProfile {
    observable: Vec<BTreeSet<EventId>>,
    controllable: Vec<BTreeSet<EventId>>,
}

impl SupervisionProfile {
    /// Supervisors are indexed from zero here; files and output use 1-based indices.
    pub fn new(observable: Vec<BTreeSet<EventId>>, controllable: Vec<BTreeSet<EventId>>) -> Result<Self, ModelError> {
        if observable.is_empty() {
            return Err(ModelError::NoSupervisors);
        }
        assert_eq!(
            observable.len(),
            controllable.len(),
            "one observable and one controllable set per supervisor"
        );
        Ok(SupervisionProfile {
            observable,
            controllable,
        })
    }

    pub fn supervisors(&self) -> usize {
        self.observable.len()
    }

    pub fn observable(&self, i: usize) -> &BTreeSet<EventId> {
        &self.observable[i]
    }

    pub fn controllable(&self, i: usize) -> &BTreeSet<EventId> {
        &self.controllable[i]
    }

    pub fn is_observable_by(&self, i: usize, e: EventId) -> bool {
        self.observable[i].contains(&e)
    }

    pub fn is_controllable_by(&self, i: usize, e: EventId) -> bool {
        self.controllable[i].contains(&e)
    }

    /// `N_σ`, in increasing supervisor order.
    pub fn controllers(&self, e: EventId) -> Vec<usize> {
        (0..self.supervisors())
            .filter(|&i| self.controllable[i].contains(&e))
            .collect()
    }

    pub fn is_controllable(&self, e: EventId) -> bool {
        self.controllable.iter().any(|c| c.contains(&e))
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.observable.iter().any(|c| c.contains(&e))
    }

    /// `Σ_c` restricted to the events of `plant`.
    pub fn controllable_events(&self, plant: &PlantSpec) -> Vec<EventId> {
        plant.events().filter(|&e| self.is_controllable(e)).collect()
    }

    pub fn uncontrollable_events(&self, plant: &PlantSpec) -> Vec<EventId> {
        plant.events().filter(|&e| !self.is_controllable(e)).collect()
    }

    /// `P_i(s)`.
    pub fn project(&self, i: usize, word: &[EventId]) -> Word {
        word.iter()
            .copied()
            .filter(|e| self.observable[i].contains(e))
            .collect()
    }
}

/// States reachable from the initial state; `legal_only` follows `δ^E` only.
pub fn reachable(model: &PlantSpec, legal_only: bool) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::from([model.initial]);
    let mut queue = VecDeque::from([model.initial]);
    while let Some(q) = queue.pop_front() {
        for e in model.events() {
            let next = if legal_only {
                model.step_legal(q, e)
            } else {
                model.step(q, e)
            };
            if let Some(t) = next {
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("depth {requested} exceeds the enumeration bound {max}")]
pub struct BoundError {
    pub requested: usize,
    pub max: usize,
}

/// Every string of length at most `k` in `L(G)` (or `L(E)`).
pub fn language_upto(model: &PlantSpec, k: usize, legal_only: bool) -> Result<BTreeSet<Word>, BoundError> {
    language_upto_bounded(model, k, legal_only, DEFAULT_MAX_DEPTH)
}

pub fn language_upto_bounded(
    model: &PlantSpec,
    k: usize,
    legal_only: bool,
    max: usize,
) -> Result<BTreeSet<Word>, BoundError> {
    if k > max {
        return Err(BoundError { requested: k, max });
    }
    let mut out = BTreeSet::new();
    let mut frontier = vec![(Vec::new(), model.initial)];
    for depth in 0..=k {
        let mut next = Vec::new();
        for (word, q) in frontier {
            if depth < k {
                for e in model.events() {
                    let t = if legal_only {
                        model.step_legal(q, e)
                    } else {
                        model.step(q, e)
                    };
                    if let Some(t) = t {
                        let mut w = word.clone();
                        w.push(e);
                        next.push((w, t));
                    }
                }
            }
            out.insert(word);
        }
        frontier = next;
    }
    Ok(out)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfaError {
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch {
        left: BTreeSet<String>,
        right: BTreeSet<String>,
    },
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// A deterministic automaton read as a generator: every state accepts, so its
/// language is the (prefix-closed) set of strings with a defined run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<String>,
    initial: usize,
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn new(alphabet: Vec<String>, initial: usize, delta: Vec<Vec<Option<usize>>>) -> Result<Self, DfaError> {
        let n = delta.len();
        if initial >= n {
            return Err(DfaError::Malformed("initial state out of range".into()));
        }
        let distinct: BTreeSet<&String> = alphabet.iter().collect();
        if distinct.len() != alphabet.len() {
            return Err(DfaError::Malformed("repeated symbol".into()));
        }
        for row in &delta {
            if row.len() != alphabet.len() || row.iter().flatten().any(|&t| t >= n) {
                return Err(DfaError::Malformed("bad transition row".into()));
            }
        }
        Ok(Dfa {
            alphabet,
            initial,
            delta,
        })
    }

    /// Builds a recognizer from an explicit list of `(source, symbol, target)`.
    pub fn from_edges(
        alphabet: &[&str],
        states: usize,
        initial: usize,
        edges: &[(usize, &str, usize)],
    ) -> Result<Self, DfaError> {
        let mut delta = vec![vec![None; alphabet.len()]; states];
        for &(s, sym, t) in edges {
            let a = alphabet
                .iter()
                .position(|x| *x == sym)
                .ok_or_else(|| DfaError::Malformed(format!("unknown symbol {sym}")))?;
            if s >= states || t >= states {
                return Err(DfaError::Malformed("state out of range".into()));
            }
            delta[s][a] = Some(t);
        }
        Dfa::new(alphabet.iter().map(|s| s.to_string()).collect(), initial, delta)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn step(&self, q: usize, symbol: usize) -> Option<usize> {
        self.delta[q][symbol]
    }

    pub fn accepts(&self, word: &[&str]) -> bool {
        let mut q = self.initial;
        for sym in word {
            let Some(a) = self.alphabet.iter().position(|x| x == sym) else {
                return false;
            };
            match self.delta[q][a] {
                Some(t) => q = t,
                None => return false,
            }
        }
        true
    }

    /// Strings of length at most `k`, as symbol-name vectors.
    pub fn language_upto(&self, k: usize) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![(Vec::<String>::new(), self.initial)];
        for depth in 0..=k {
            let mut next = Vec::new();
            for (w, q) in frontier {
                if depth < k {
                    for (a, t) in self.delta[q].iter().enumerate() {
                        if let Some(t) = t {
                            let mut w2 = w.clone();
                            w2.push(self.alphabet[a].clone());
                            next.push((w2, *t));
                        }
                    }
                }
                out.insert(w);
            }
            frontier = next;
        }
        out
    }
}

/// Outcome of a language comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// A shortest string in exactly one of the two languages; ties are broken
    /// lexicographically by symbol name.
    Counterexample(Vec<String>),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::Equal => write!(f, "equal"),
            Equivalence::Counterexample(w) if w.is_empty() => write!(f, "counterexample ε"),
            Equivalence::Counterexample(w) => write!(f, "counterexample {}", w.join(" ")),
        }
    }
}

/// Decides `L(a) = L(b)` by a breadth-first walk of the pair product.
pub fn dfa_equivalent(a: &Dfa, b: &Dfa) -> Result<Equivalence, DfaError> {
    let left: BTreeSet<String> = a.alphabet.iter().cloned().collect();
    let right: BTreeSet<String> = b.alphabet.iter().cloned().collect();
    if left != right {
        return Err(DfaError::AlphabetMismatch { left, right });
    }
    // symbol name -> (index in a, index in b), in name order
    let symbols: BTreeMap<&str, (usize, usize)> = a
        .alphabet
        .iter()
        .enumerate()
        .map(|(ia, name)| {
            let ib = b.alphabet.iter().position(|x| x == name).unwrap();
            (name.as_str(), (ia, ib))
        })
        .collect();

    let start = (a.initial, b.initial);
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), &str)>> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    let path_to = |parent: &HashMap<_, Option<((usize, usize), &str)>>, mut p: (usize, usize)| {
        let mut word = Vec::new();
        while let Some(Some((prev, sym))) = parent.get(&p) {
            word.push(sym.to_string());
            p = *prev;
        }
        word.reverse();
        word
    };
    while let Some(p @ (qa, qb)) = queue.pop_front() {
        for (&sym, &(ia, ib)) in &symbols {
            match (a.delta[qa][ia], b.delta[qb][ib]) {
                (None, None) => {}
                (Some(ta), Some(tb)) => {
                    if let std::collections::hash_map::Entry::Vacant(v) = parent.entry((ta, tb)) {
                        v.insert(Some((p, sym)));
                        queue.push_back((ta, tb));
                    }
                }
                _ => {
                    let mut word = path_to(&parent, p);
                    word.push(sym.to_string());
                    return Ok(Equivalence::Counterexample(word));
                }
            }
        }
    }
    Ok(Equivalence::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(model: &PlantSpec, set: &BTreeSet<Word>) -> BTreeSet<String> {
        set.iter()
            .map(|w| w.iter().map(|&e| model.event_name(e)).collect::<String>())
            .collect()
    }

    #[test]
    fn reachable_fixture_b() {
        let p = fixtures::fixture_b();
        let all = reachable(&p.plant, false);
        assert_eq!(all.len(), 6);
        let legal: BTreeSet<&str> = reachable(&p.plant, true)
            .into_iter()
            .map(|q| p.plant.state_name(q))
            .collect();
        assert_eq!(legal, BTreeSet::from(["q0", "q1", "q5"]));
    }

    #[test]
    fn reachable_without_transitions_is_initial() {
        let mut b = PlantSpec::builder();
        b.event("a").state("only", true, true);
        let p = b.build().unwrap();
        assert_eq!(reachable(&p, false), BTreeSet::from([StateId(0)]));
    }

    #[test]
    fn language_fixture_b() {
        let p = fixtures::fixture_b();
        let g = &p.plant;
        let legal = language_upto(g, 3, true).unwrap();
        assert_eq!(
            names(g, &legal),
            BTreeSet::from(["".into(), "a".into(), "agamma".into()])
        );
        let all = language_upto(g, 3, false).unwrap();
        let expected: BTreeSet<String> = ["", "a", "gamma", "agamma", "gammaa", "gammaagamma"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(names(g, &all), expected);
        assert_eq!(language_upto(g, 0, false).unwrap(), BTreeSet::from([vec![]]));
        assert!(language_upto(g, 13, false).is_err());
    }

    #[test]
    fn builder_rejects_invalid_models() {
        let mut b = PlantSpec::builder();
        b.event("a").state("q0", true, true);
        b.transition("q0", "a", "q9", false);
        assert_eq!(b.build(), Err(ModelError::UnknownState("q9".into())));

        let mut b = PlantSpec::builder();
        b.event("a").state("q0", true, true).state("q1", false, true);
        b.transition("q0", "a", "q1", false);
        assert!(matches!(b.build(), Err(ModelError::IllegalEntry { .. })));

        let mut b = PlantSpec::builder();
        b.event("a").state("q0", true, true).state("q1", false, false);
        assert_eq!(b.build(), Err(ModelError::UnreachableState("q1".into())));

        let mut b = PlantSpec::builder();
        b.event("a").state("q0", true, true).state("q1", false, false);
        b.transition("q0", "a", "q1", true);
        assert!(matches!(b.build(), Err(ModelError::LegalTransitionOutsideE { .. })));

        let mut b = PlantSpec::builder();
        b.event("a").event("a").state("q0", true, true);
        assert_eq!(b.build(), Err(ModelError::DuplicateEvent("a".into())));
    }

    #[test]
    fn equivalence_examples() {
        let p = fixtures::fixture_b();
        let e = p.plant.to_dfa(true);
        assert_eq!(dfa_equivalent(&e, &e).unwrap(), Equivalence::Equal);

        let eps_a = Dfa::from_edges(&["a", "gamma"], 2, 0, &[(0, "a", 1)]).unwrap();
        assert_eq!(
            dfa_equivalent(&e, &eps_a).unwrap(),
            Equivalence::Counterexample(vec!["a".into(), "gamma".into()])
        );

        // {ε, a, aγ} with three and with four states (one unreachable)
        let three = Dfa::from_edges(&["a", "gamma"], 3, 0, &[(0, "a", 1), (1, "gamma", 2)]).unwrap();
        let four = Dfa::from_edges(&["gamma", "a"], 4, 1, &[(1, "a", 2), (2, "gamma", 3), (0, "a", 0)]).unwrap();
        assert_eq!(dfa_equivalent(&three, &four).unwrap(), Equivalence::Equal);

        let other = Dfa::from_edges(&["a"], 1, 0, &[]).unwrap();
        assert!(matches!(
            dfa_equivalent(&three, &other),
            Err(DfaError::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn counterexample_prefers_lexicographic_tie_break() {
        let a = Dfa::from_edges(&["x", "y"], 1, 0, &[]).unwrap();
        let b = Dfa::from_edges(&["x", "y"], 2, 0, &[(0, "x", 1), (0, "y", 1)]).unwrap();
        assert_eq!(
            dfa_equivalent(&a, &b).unwrap(),
            Equivalence::Counterexample(vec!["x".into()])
        );
    }
}
