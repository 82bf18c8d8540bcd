//! Per-supervisor observers and the composite automaton `G' = G × P_1(G) × … × P_n(G)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automata::{Dfa, EventId, PlantSpec, StateId, SupervisionProfile, Word};

/// A supervisor's estimate of the current plant state.
pub type Estimate = BTreeSet<StateId>;

/// The observer `P_i(G)`: a subset construction over unobservable closures.
///
/// Only estimates reachable from the initial one are materialized; state 0
/// is the initial estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observer {
    supervisor: usize,
    observable: BTreeSet<EventId>,
    states: Vec<Estimate>,
    delta: Vec<BTreeMap<EventId, usize>>,
}

impl Observer {
    pub fn supervisor(&self) -> usize {
        self.supervisor
    }

    pub fn observable(&self) -> &BTreeSet<EventId> {
        &self.observable
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn estimate(&self, state: usize) -> &Estimate {
        &self.states[state]
    }

    pub fn estimates(&self) -> &[Estimate] {
        &self.states
    }

    pub fn state_of(&self, estimate: &Estimate) -> Option<usize> {
        self.states.iter().position(|s| s == estimate)
    }

    /// Transition on an observable event. `None` if `e` is observable but has
    /// no successor, `Some(state)` unchanged if `e` is unobservable.
    pub fn step(&self, state: usize, e: EventId) -> Option<usize> {
        if self.observable.contains(&e) {
            self.delta[state].get(&e).copied()
        } else {
            Some(state)
        }
    }

    pub fn observed_transitions(&self, state: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.delta[state].iter().map(|(&e, &t)| (e, t))
    }

    /// The observer state reached by a string of the plant (unobservable
    /// events are erased first).
    pub fn run(&self, word: &[EventId]) -> Option<usize> {
        word.iter().try_fold(self.initial(), |s, &e| self.step(s, e))
    }
}

fn closure(model: &PlantSpec, observable: &BTreeSet<EventId>, seed: impl IntoIterator<Item = StateId>) -> Estimate {
    let mut set: Estimate = seed.into_iter().collect();
    let mut stack: Vec<StateId> = set.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for e in model.events().filter(|e| !observable.contains(e)) {
            if let Some(t) = model.step(q, e) {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }
    set
}

/// Builds `P_i(G)` for supervisor `i`.
pub fn project(model: &PlantSpec, profile: &SupervisionProfile, i: usize) -> Observer {
    assert!(i < profile.supervisors(), "supervisor index out of range");
    let observable = profile.observable(i).clone();
    let init = closure(model, &observable, [model.initial()]);
    let mut index: HashMap<Estimate, usize> = HashMap::from([(init.clone(), 0)]);
    let mut states = vec![init];
    let mut delta: Vec<BTreeMap<EventId, usize>> = vec![BTreeMap::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for &e in model.events_by_name() {
            if !observable.contains(&e) {
                continue;
            }
            let targets: Vec<StateId> = states[s].iter().filter_map(|&q| model.step(q, e)).collect();
            if targets.is_empty() {
                continue;
            }
            let next = closure(model, &observable, targets);
            let t = *index.entry(next.clone()).or_insert_with(|| {
                states.push(next);
                delta.push(BTreeMap::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            delta[s].insert(e, t);
        }
    }
    Observer {
        supervisor: i,
        observable,
        states,
        delta,
    }
}

/// Index of a world in a [`Composite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldId(pub usize);

/// A state of `G'`: the plant state and each supervisor's observer state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    pub plant: StateId,
    pub estimates: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObservationError {
    #[error("at least one observer is required")]
    NoObservers,
    #[error("observer {position} belongs to supervisor {found}")]
    ObserverOrder { position: usize, found: usize },
}

/// The reachable part of `G'`.
///
/// Worlds are numbered in breadth-first order with events explored by name,
/// so world 0 is the initial world and `witness(w)` is the shortest,
/// lexicographically least string reaching `w`.
#[derive(Debug, Clone)]
pub struct Composite {
    observers: Vec<Observer>,
    worlds: Vec<World>,
    delta: Vec<Vec<Option<WorldId>>>,
    witness: Vec<Word>,
    event_names: Vec<String>,
}

impl Composite {
    /// Projects every supervisor and composes.
    pub fn build(model: &PlantSpec, profile: &SupervisionProfile) -> Composite {
        let observers = (0..profile.supervisors()).map(|i| project(model, profile, i)).collect();
        compose(model, observers).expect("one observer per supervisor")
    }

    pub fn observers(&self) -> &[Observer] {
        &self.observers
    }

    pub fn observer(&self, i: usize) -> &Observer {
        &self.observers[i]
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_ids(&self) -> impl Iterator<Item = WorldId> {
        (0..self.worlds.len()).map(WorldId)
    }

    pub fn world(&self, w: WorldId) -> &World {
        &self.worlds[w.0]
    }

    pub fn initial(&self) -> WorldId {
        WorldId(0)
    }

    pub fn step(&self, w: WorldId, e: EventId) -> Option<WorldId> {
        self.delta[w.0][e.0]
    }

    pub fn run(&self, word: &[EventId]) -> Option<WorldId> {
        word.iter().try_fold(self.initial(), |w, &e| self.step(w, e))
    }

    pub fn witness(&self, w: WorldId) -> &Word {
        &self.witness[w.0]
    }

    pub fn find(&self, world: &World) -> Option<WorldId> {
        self.worlds.iter().position(|x| x == world).map(WorldId)
    }

    /// Length of the longest shortest witness.
    pub fn depth(&self) -> usize {
        self.witness.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_dfa(&self) -> Dfa {
        let delta = self
            .delta
            .iter()
            .map(|row| row.iter().map(|t| t.map(|w| w.0)).collect())
            .collect();
        Dfa::new(self.event_names.clone(), 0, delta).expect("composite table is well formed")
    }
}

/// Reachable synchronous product of the plant with its observers.
pub fn compose(model: &PlantSpec, observers: Vec<Observer>) -> Result<Composite, ObservationError> {
    if observers.is_empty() {
        return Err(ObservationError::NoObservers);
    }
    for (position, o) in observers.iter().enumerate() {
        if o.supervisor != position {
            return Err(ObservationError::ObserverOrder {
                position,
                found: o.supervisor,
            });
        }
    }
    let init = World {
        plant: model.initial(),
        estimates: observers.iter().map(Observer::initial).collect(),
    };
    let mut index = HashMap::from([(init.clone(), WorldId(0))]);
    let mut worlds = vec![init];
    let mut witness = vec![Vec::new()];
    let mut delta = vec![vec![None; model.event_count()]];
    let mut queue = VecDeque::from([WorldId(0)]);
    while let Some(w) = queue.pop_front() {
        for &e in model.events_by_name() {
            let cur = &worlds[w.0];
            let Some(q) = model.step(cur.plant, e) else {
                continue;
            };
            let estimates: Option<Vec<usize>> = observers
                .iter()
                .zip(&cur.estimates)
                .map(|(o, &s)| o.step(s, e))
                .collect();
            let estimates = estimates.expect("observer tracks every plant move");
            let next = World { plant: q, estimates };
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = WorldId(worlds.len());
                    let mut word = witness[w.0].clone();
                    word.push(e);
                    index.insert(next.clone(), id);
                    worlds.push(next);
                    witness.push(word);
                    delta.push(vec![None; model.event_count()]);
                    queue.push_back(id);
                    id
                }
            };
            delta[w.0][e.0] = Some(id);
        }
    }
    Ok(Composite {
        observers,
        worlds,
        delta,
        witness,
        event_names: model.events().map(|e| model.event_name(e).to_string()).collect(),
    })
}
