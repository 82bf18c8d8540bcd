//! Brute-force validators used to cross-check the symbolic machinery.
//!
//! Nothing here reuses the composite, the Kripke frame or the condition
//! checkers: worlds are rebuilt from estimate sets, formulas are evaluated by
//! direct quantification, and solutions are checked string by string.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::automata::{EventId, PlantSpec, StateId, SupervisionProfile, Word};
use crate::conditions::{CoobsVariant, EventDomain, LegacyOptions, Shape, WorldDomain};
use crate::fusion::{fuse, ControlDecision, DecisionBag, FusedDecision, FusionError};
use crate::kripke::{Formula, Proposition, Relation};
use crate::observation::project;
use crate::synthesis::{DecisionEntry, Supervisor, SynthesisResult};
use crate::Problem;

/// Largest depth accepted by [`oracle_solves`].
pub const MAX_SOLVE_DEPTH: usize = 10;
/// Largest number of worlds accepted by [`oracle_condition`].
pub const MAX_WORLDS: usize = 64;
/// Largest number of table cells accepted by [`exhaustive_supervisor_search`].
pub const MAX_CELLS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("depth {requested} exceeds the bound {max}")]
    DepthTooLarge { requested: usize, max: usize },
    #[error("{worlds} worlds exceed the bound {max}")]
    TooManyWorlds { worlds: usize, max: usize },
    #[error("{cells} table cells exceed the bound {max}")]
    TooManyCells { cells: usize, max: usize },
    #[error("supervisor {} has no decision for the event after observing {observed:?}", .supervisor + 1)]
    MissingEntry { supervisor: usize, observed: Word },
    #[error("no default for event {0:?}")]
    MissingDefault(EventId),
}

/// Which solvability obligation a string violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Obligation {
    /// An uncontrollable continuation of a legal string must stay legal.
    UncontrollableStaysLegal,
    /// A legal controllable continuation must be enabled.
    LegalEnabled,
    /// An illegal controllable continuation must be disabled.
    IllegalDisabled,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Obligation::UncontrollableStaysLegal => "uncontrollable continuation leaves the legal language",
            Obligation::LegalEnabled => "legal continuation is not enabled",
            Obligation::IllegalDisabled => "illegal continuation is not disabled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub string: Word,
    pub event: EventId,
    pub obligation: Obligation,
    /// Set when fusion itself failed.
    pub fusion: Option<FusionError>,
}

/// Legal strings of length at most `k` in shortlex order by event name.
fn legal_strings(plant: &PlantSpec, k: usize) -> Vec<(Word, StateId)> {
    let mut out = Vec::new();
    let mut frontier = vec![(Vec::new(), plant.initial())];
    for depth in 0..=k {
        let mut next = Vec::new();
        for (w, q) in frontier {
            if depth < k {
                for &e in plant.events_by_name() {
                    if let Some(t) = plant.step_legal(q, e) {
                        let mut w2 = w.clone();
                        w2.push(e);
                        next.push((w2, t));
                    }
                }
            }
            out.push((w, q));
        }
        frontier = next;
    }
    out
}

/// `f_N(s, σ)` computed from the projections `P_i(s)`.
fn joint_decision(
    profile: &SupervisionProfile,
    result: &SynthesisResult,
    s: &[EventId],
    e: EventId,
) -> Result<Result<FusedDecision, FusionError>, OracleError> {
    let mut bag = Vec::new();
    for i in profile.controllers(e) {
        let observed = profile.project(i, s);
        let sup = &result.supervisors[i];
        let d = sup
            .observer
            .run(&observed)
            .and_then(|state| sup.decision(state, e))
            .ok_or(OracleError::MissingEntry {
                supervisor: i,
                observed,
            })?;
        bag.push(d);
    }
    let dft = *result.defaults.get(&e).ok_or(OracleError::MissingDefault(e))?;
    Ok(fuse(&DecisionBag::new(bag), dft))
}

/// Checks the three solvability obligations on every legal string of length
/// at most `k` and reports the first violation in shortlex order.
pub fn oracle_solves(
    plant: &PlantSpec,
    profile: &SupervisionProfile,
    result: &SynthesisResult,
    k: usize,
) -> Result<Option<Violation>, OracleError> {
    if k > MAX_SOLVE_DEPTH {
        return Err(OracleError::DepthTooLarge {
            requested: k,
            max: MAX_SOLVE_DEPTH,
        });
    }
    for (s, q) in legal_strings(plant, k) {
        for &e in plant.events_by_name() {
            let Some(t) = plant.transition(q, e) else { continue };
            let violation = |obligation, fusion| Violation {
                string: s.clone(),
                event: e,
                obligation,
                fusion,
            };
            if !profile.is_controllable(e) {
                if !t.legal {
                    return Ok(Some(violation(Obligation::UncontrollableStaysLegal, None)));
                }
                continue;
            }
            let obligation = if t.legal {
                Obligation::LegalEnabled
            } else {
                Obligation::IllegalDisabled
            };
            match joint_decision(profile, result, &s, e)? {
                Err(f) => return Ok(Some(violation(obligation, Some(f)))),
                Ok(FusedDecision::Enable) if !t.legal => return Ok(Some(violation(obligation, None))),
                Ok(FusedDecision::Disable) if t.legal => return Ok(Some(violation(obligation, None))),
                Ok(_) => {}
            }
        }
    }
    Ok(None)
}

/// A world rebuilt from scratch: plant state and every supervisor's estimate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct RawWorld {
    plant: StateId,
    estimates: Vec<BTreeSet<StateId>>,
}

fn unobservable_closure(
    plant: &PlantSpec,
    profile: &SupervisionProfile,
    i: usize,
    mut set: BTreeSet<StateId>,
) -> BTreeSet<StateId> {
    loop {
        let grown: BTreeSet<StateId> = set
            .iter()
            .flat_map(|&q| {
                plant
                    .events()
                    .filter(|&e| !profile.is_observable_by(i, e))
                    .filter_map(move |e| plant.step(q, e))
            })
            .collect();
        let before = set.len();
        set.extend(grown);
        if set.len() == before {
            return set;
        }
    }
}

fn raw_worlds(plant: &PlantSpec, profile: &SupervisionProfile) -> Result<Vec<RawWorld>, OracleError> {
    let n = profile.supervisors();
    let init = RawWorld {
        plant: plant.initial(),
        estimates: (0..n)
            .map(|i| unobservable_closure(plant, profile, i, BTreeSet::from([plant.initial()])))
            .collect(),
    };
    let mut seen = vec![init.clone()];
    let mut queue = VecDeque::from([init]);
    while let Some(w) = queue.pop_front() {
        for &e in plant.events_by_name() {
            let Some(q) = plant.step(w.plant, e) else { continue };
            let estimates = (0..n)
                .map(|i| {
                    if profile.is_observable_by(i, e) {
                        let post = w.estimates[i].iter().filter_map(|&p| plant.step(p, e)).collect();
                        unobservable_closure(plant, profile, i, post)
                    } else {
                        w.estimates[i].clone()
                    }
                })
                .collect();
            let next = RawWorld { plant: q, estimates };
            if !seen.contains(&next) {
                if seen.len() == MAX_WORLDS {
                    return Err(OracleError::TooManyWorlds {
                        worlds: MAX_WORLDS + 1,
                        max: MAX_WORLDS,
                    });
                }
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// Naive model checker: no caching, relations tested pairwise on demand.
struct Naive<'a> {
    plant: &'a PlantSpec,
    profile: &'a SupervisionProfile,
    worlds: &'a [RawWorld],
    relation: Relation,
}

impl Naive<'_> {
    fn legal(&self, w: usize) -> bool {
        self.plant.is_legal(self.worlds[w].plant)
    }

    fn related(&self, i: usize, a: usize, b: usize) -> bool {
        let same = self.worlds[a].estimates[i] == self.worlds[b].estimates[i];
        match self.relation {
            Relation::Total => same,
            Relation::Partial => same && self.legal(a) && self.legal(b),
        }
    }

    fn knows(&self, i: usize, w: usize, body: &Formula) -> bool {
        (0..self.worlds.len()).all(|v| !self.related(i, w, v) || self.holds(v, body))
    }

    fn holds(&self, w: usize, phi: &Formula) -> bool {
        match phi {
            Formula::Var(Proposition::Possible(e)) => self.plant.step(self.worlds[w].plant, *e).is_some(),
            Formula::Var(Proposition::Legal(e)) => self.plant.step_legal(self.worlds[w].plant, *e).is_some(),
            Formula::Var(Proposition::WorldLegal) => self.legal(w),
            Formula::Not(a) => !self.holds(w, a),
            Formula::And(a, b) => self.holds(w, a) && self.holds(w, b),
            Formula::Or(a, b) => self.holds(w, a) || self.holds(w, b),
            Formula::Implies(a, b) => !self.holds(w, a) || self.holds(w, b),
            Formula::Know(i, a) => self.knows(*i, w, a),
            Formula::SomeoneKnows { event, body } => self
                .profile
                .controllers(*event)
                .into_iter()
                .any(|i| self.knows(i, w, body)),
            Formula::OtherKnows { event, except, body } => self
                .profile
                .controllers(*event)
                .into_iter()
                .filter(|j| j != except)
                .any(|j| self.knows(j, w, body)),
        }
    }

    fn e(&self, w: usize, s: EventId) -> bool {
        let q = self.worlds[w].plant;
        self.plant.step(q, s).is_none() || self.plant.step_legal(q, s).is_some()
    }

    fn d(&self, w: usize, s: EventId) -> bool {
        self.plant.step_legal(self.worlds[w].plant, s).is_none()
    }
}

/// Which condition [`oracle_condition`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleCondition {
    Controllability,
    Extended,
    Corrected(Shape),
    Legacy(LegacyOptions),
    Coobservability(CoobsVariant),
}

fn enable_f(s: EventId) -> Formula {
    Formula::possible(s).not().or(Formula::legal(s))
}

fn disable_f(s: EventId) -> Formula {
    Formula::legal(s).not()
}

/// Decides a condition by expanding its quantifiers literally.
pub fn oracle_condition(problem: &Problem, which: OracleCondition) -> Result<bool, OracleError> {
    let Problem { plant, profile } = problem;
    let worlds = raw_worlds(plant, profile)?;
    let relation = match which {
        OracleCondition::Legacy(o) => o.relation,
        OracleCondition::Coobservability(v) => v.relation(),
        _ => Relation::Partial,
    };
    let m = Naive {
        plant,
        profile,
        worlds: &worlds,
        relation,
    };
    let all: Vec<usize> = (0..worlds.len()).collect();
    let legal: Vec<usize> = all.iter().copied().filter(|&w| m.legal(w)).collect();
    let controllable: Vec<EventId> = plant.events().filter(|&s| profile.is_controllable(s)).collect();
    let k = |i: usize, w: usize, f: &Formula| m.knows(i, w, f);

    let coupled = |w: usize, s: EventId| {
        let n = profile.controllers(s);
        m.e(w, s)
            || n.iter().any(|&i| {
                n.iter()
                    .any(|&j| k(i, w, &Formula::legal(s).implies(Formula::know(j, enable_f(s)))))
            })
    };

    Ok(match which {
        OracleCondition::Controllability => legal.iter().all(|&w| {
            plant
                .events()
                .filter(|&s| !profile.is_controllable(s))
                .all(|s| m.e(w, s))
        }),
        OracleCondition::Extended => controllable.iter().all(|&s| {
            let n = profile.controllers(s);
            let ebar = Formula::legal(s);
            let dbar = Formula::possible(s).and(Formula::legal(s).not());
            let line = |w: usize| {
                n.iter().any(|&i| {
                    let others = Formula::other_knows(s, i, enable_f(s));
                    let others_d = Formula::other_knows(s, i, disable_f(s));
                    k(i, w, &enable_f(s))
                        || k(i, w, &disable_f(s))
                        || k(i, w, &ebar.clone().implies(others))
                        || k(i, w, &dbar.clone().implies(others_d))
                })
            };
            [true, false].into_iter().any(|phi_is_e| {
                legal
                    .iter()
                    .all(|&w| line(w) || if phi_is_e { m.e(w, s) } else { m.d(w, s) })
            })
        }),
        OracleCondition::Corrected(Shape::Coupled) => {
            controllable.iter().all(|&s| legal.iter().all(|&w| coupled(w, s)))
        }
        OracleCondition::Corrected(Shape::Split) => controllable.iter().all(|&s| {
            let n = profile.controllers(s);
            legal.iter().all(|&w| {
                if n.len() < 2 {
                    return coupled(w, s);
                }
                m.e(w, s)
                    || n.iter().any(|&i| {
                        n.iter().filter(|&&j| j != i).any(|&j| {
                            k(i, w, &enable_f(s))
                                || k(i, w, &disable_f(s))
                                || k(i, w, &Formula::legal(s).implies(Formula::know(j, enable_f(s))))
                        })
                    })
            })
        }),
        OracleCondition::Legacy(o) => {
            let events: Vec<EventId> = match o.events {
                EventDomain::Controllable => controllable.clone(),
                EventDomain::All => plant.events().collect(),
            };
            let domain = match o.worlds {
                WorldDomain::Legal => &legal,
                WorldDomain::All => &all,
            };
            events.iter().all(|&s| domain.iter().all(|&w| coupled(w, s)))
        }
        OracleCondition::Coobservability(v) => controllable.iter().all(|&s| {
            let n = profile.controllers(s);
            legal.iter().all(|&w| match v.default_decision() {
                FusedDecision::Enable => m.e(w, s) || n.iter().any(|&i| k(i, w, &disable_f(s))),
                FusedDecision::Disable => m.d(w, s) || n.iter().any(|&i| k(i, w, &enable_f(s))),
            })
        }),
    })
}

/// Result of [`exhaustive_supervisor_search`].
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub exists: bool,
    /// A solving assignment, already confirmed by [`oracle_solves`].
    pub witness: Option<SynthesisResult>,
    /// The depth the obligations were collected at.
    pub depth: usize,
}

/// Number of table cells `Σ_i |Q_i^obs| · |Σ_{i,c}|`.
pub fn table_cells(problem: &Problem) -> usize {
    let Problem { plant, profile } = problem;
    (0..profile.supervisors())
        .map(|i| project(plant, profile, i).state_count() * profile.controllable(i).len())
        .sum()
}

/// Searches every assignment of control decisions and defaults for one that
/// solves the problem.
///
/// Obligations are collected from all legal strings up to the depth, each
/// becoming a constraint `fuse(cells, default) = required` on the observer
/// states reached by the projections. Events share no cells, so each event
/// is searched on its own.
pub fn exhaustive_supervisor_search(problem: &Problem, depth: Option<usize>) -> Result<SearchOutcome, OracleError> {
    let Problem { plant, profile } = problem;
    let cells = table_cells(problem);
    if cells > MAX_CELLS {
        return Err(OracleError::TooManyCells { cells, max: MAX_CELLS });
    }
    let worlds = raw_worlds(plant, profile)?;
    let k = depth.unwrap_or_else(|| (plant.state_count() + 1).max(world_depth(plant, profile, &worlds) + 1));
    let k = k.min(MAX_SOLVE_DEPTH);
    let observers: Vec<_> = (0..profile.supervisors()).map(|i| project(plant, profile, i)).collect();
    let outcome = |witness: Option<SynthesisResult>| SearchOutcome {
        exists: witness.is_some(),
        witness,
        depth: k,
    };

    // (event, observer states of N_σ) -> required decision
    let mut constraints: BTreeMap<EventId, BTreeMap<Vec<usize>, FusedDecision>> = BTreeMap::new();
    for (s, q) in legal_strings(plant, k) {
        for e in plant.events() {
            let Some(t) = plant.transition(q, e) else { continue };
            if !profile.is_controllable(e) {
                if !t.legal {
                    return Ok(outcome(None));
                }
                continue;
            }
            let key: Vec<usize> = profile
                .controllers(e)
                .into_iter()
                .map(|i| {
                    observers[i]
                        .run(&profile.project(i, &s))
                        .expect("projection of a plant string")
                })
                .collect();
            let need = if t.legal {
                FusedDecision::Enable
            } else {
                FusedDecision::Disable
            };
            let slot = constraints.entry(e).or_default();
            if slot.insert(key, need).is_some_and(|prev| prev != need) {
                return Ok(outcome(None));
            }
        }
    }

    let mut supervisors: Vec<Supervisor> = observers
        .iter()
        .enumerate()
        .map(|(i, o)| Supervisor::new(i, o.clone()))
        .collect();
    let mut defaults = BTreeMap::new();
    for e in profile.controllable_events(plant) {
        let n = profile.controllers(e);
        let rows: Vec<(Vec<usize>, FusedDecision)> = constraints
            .get(&e)
            .map(|m| m.iter().map(|(k, v)| (k.clone(), *v)).collect())
            .unwrap_or_default();
        let Some((table, dft)) = search_event(
            &n,
            &observers.iter().map(|o| o.state_count()).collect::<Vec<_>>(),
            &rows,
        ) else {
            return Ok(outcome(None));
        };
        for (&i, states) in n.iter().zip(table) {
            for (s, d) in states.into_iter().enumerate() {
                supervisors[i].insert(
                    s,
                    e,
                    DecisionEntry {
                        decision: d,
                        case: None,
                    },
                );
            }
        }
        defaults.insert(e, dft);
    }
    let result = SynthesisResult { supervisors, defaults };
    let confirmed = oracle_solves(plant, profile, &result, k)?.is_none();
    Ok(outcome(confirmed.then_some(result)))
}

fn world_depth(plant: &PlantSpec, profile: &SupervisionProfile, worlds: &[RawWorld]) -> usize {
    // breadth-first distances over the rebuilt worlds
    let index: HashMap<&RawWorld, usize> = worlds.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let mut dist = vec![usize::MAX; worlds.len()];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let w = &worlds[k];
        for e in plant.events() {
            let Some(q) = plant.step(w.plant, e) else { continue };
            let estimates: Vec<BTreeSet<StateId>> = (0..profile.supervisors())
                .map(|i| {
                    if profile.is_observable_by(i, e) {
                        let post = w.estimates[i].iter().filter_map(|&p| plant.step(p, e)).collect();
                        unobservable_closure(plant, profile, i, post)
                    } else {
                        w.estimates[i].clone()
                    }
                })
                .collect();
            let t = index[&RawWorld { plant: q, estimates }];
            if dist[t] == usize::MAX {
                dist[t] = dist[k] + 1;
                queue.push_back(t);
            }
        }
    }
    dist.into_iter().max().unwrap_or(0)
}

/// Depth-first search over the cells of one event with both defaults.
///
/// Cells that appear in no constraint are left at `abstain`.
fn search_event(
    n: &[usize],
    sizes: &[usize],
    rows: &[(Vec<usize>, FusedDecision)],
) -> Option<(Vec<Vec<ControlDecision>>, FusedDecision)> {
    // cells are (position in n, observer state)
    let mut used: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|(key, _)| key.iter().enumerate().map(|(p, &s)| (p, s)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    used.sort();
    for dft in [FusedDecision::Enable, FusedDecision::Disable] {
        let mut table: Vec<Vec<Option<ControlDecision>>> = n.iter().map(|&i| vec![None; sizes[i]]).collect();
        if dfs(&used, 0, &mut table, rows, dft) {
            let table = table
                .into_iter()
                .map(|col| col.into_iter().map(|d| d.unwrap_or(ControlDecision::Abstain)).collect())
                .collect();
            return Some((table, dft));
        }
    }
    None
}

fn dfs(
    cells: &[(usize, usize)],
    next: usize,
    table: &mut Vec<Vec<Option<ControlDecision>>>,
    rows: &[(Vec<usize>, FusedDecision)],
    dft: FusedDecision,
) -> bool {
    let consistent = rows.iter().all(|(key, need)| {
        let bag: Option<Vec<ControlDecision>> = key.iter().enumerate().map(|(p, &s)| table[p][s]).collect();
        match bag {
            Some(bag) => fuse(&DecisionBag::new(bag), dft) == Ok(*need),
            None => true,
        }
    });
    if !consistent {
        return false;
    }
    let Some(&(p, s)) = cells.get(next) else {
        return true;
    };
    for d in ControlDecision::ALL {
        table[p][s] = Some(d);
        if dfs(cells, next + 1, table, rows, dft) {
            return true;
        }
    }
    table[p][s] = None;
    false
}

/// The generator behind every seeded run.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Size limits for [`random_problem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomConfig {
    pub max_states: usize,
    pub max_events: usize,
    pub supervisors: usize,
    /// Chance that an unused `(state, event)` slot gets a transition.
    pub extra_transition: f64,
    /// Chance that a candidate transition is legal.
    pub legal: f64,
    /// Chance that a supervisor observes a given event.
    pub observable: f64,
    /// Chance that a supervisor controls a given event.
    pub controllable: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            max_states: 5,
            max_events: 3,
            supervisors: 2,
            extra_transition: 0.35,
            legal: 0.65,
            observable: 0.5,
            controllable: 0.5,
        }
    }
}

const EVENT_NAMES: [&str; 6] = ["a", "b", "c", "d", "f", "g"];

/// A random valid problem: every state reachable, legality closed under the
/// model invariants, random observation and control sets.
pub fn random_problem<R: Rng + ?Sized>(rng: &mut R, cfg: RandomConfig) -> Problem {
    assert!(cfg.max_states >= 1 && (1..=EVENT_NAMES.len()).contains(&cfg.max_events) && cfg.supervisors >= 1);
    loop {
        if let Some(p) = try_random_problem(rng, cfg) {
            return p;
        }
    }
}

fn try_random_problem<R: Rng + ?Sized>(rng: &mut R, cfg: RandomConfig) -> Option<Problem> {
    let ns = rng.gen_range(1..=cfg.max_states);
    let ne = rng.gen_range(1..=cfg.max_events);
    let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; ne]; ns];
    for k in 1..ns {
        let mut slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|p| (0..ne).map(move |e| (p, e)))
            .filter(|&(p, e)| delta[p][e].is_none())
            .collect();
        slots.shuffle(rng);
        let (p, e) = slots[0];
        delta[p][e] = Some(k);
    }
    for row in delta.iter_mut() {
        for slot in row.iter_mut() {
            if slot.is_none() && rng.gen_bool(cfg.extra_transition) {
                *slot = Some(rng.gen_range(0..ns));
            }
        }
    }
    let mut candidate: Vec<Vec<bool>> = delta
        .iter()
        .map(|row| row.iter().map(|_| rng.gen_bool(cfg.legal)).collect())
        .collect();

    // legal states: closure of the initial state under candidate transitions,
    // then demote states entered by an illegal transition until stable
    let mut legal = vec![false; ns];
    loop {
        legal.iter_mut().for_each(|x| *x = false);
        legal[0] = true;
        let mut stack = vec![0usize];
        while let Some(q) = stack.pop() {
            for e in 0..ne {
                if let (Some(t), true) = (delta[q][e], candidate[q][e]) {
                    if !legal[t] {
                        legal[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        let mut changed = false;
        for q in 0..ns {
            for e in 0..ne {
                let Some(t) = delta[q][e] else { continue };
                let is_legal = candidate[q][e] && legal[q];
                if legal[t] && !is_legal {
                    if legal[q] && rng.gen_bool(0.5) {
                        candidate[q][e] = true;
                    } else {
                        if t == 0 {
                            return None;
                        }
                        // cut every candidate edge into t
                        for row in 0..ns {
                            for x in 0..ne {
                                if delta[row][x] == Some(t) {
                                    candidate[row][x] = false;
                                }
                            }
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut b = PlantSpec::builder();
    for name in &EVENT_NAMES[..ne] {
        b.event(name);
    }
    for q in 0..ns {
        b.state(&format!("q{q}"), q == 0, legal[q]);
    }
    for q in 0..ns {
        for e in 0..ne {
            if let Some(t) = delta[q][e] {
                let l = candidate[q][e] && legal[q] && legal[t];
                b.transition(&format!("q{q}"), EVENT_NAMES[e], &format!("q{t}"), l);
            }
        }
    }
    let plant = b.build().expect("generated plant satisfies the invariants");
    let mut sets = [Vec::new(), Vec::new()];
    for (set, p) in sets.iter_mut().zip([cfg.observable, cfg.controllable]) {
        for _ in 0..cfg.supervisors {
            let chosen: BTreeSet<EventId> = plant.events().filter(|_| rng.gen_bool(p)).collect();
            set.push(chosen);
        }
    }
    let [observable, controllable] = sets;
    let profile = SupervisionProfile::new(observable, controllable).expect("at least one supervisor");
    Some(Problem { plant, profile })
}

/// A random variant of the two-path diamond: `a` and `b` commute, `gamma`
/// may follow every state with random legality, and observation and control
/// of every event are drawn at random (at least one controller for `gamma`).
pub fn random_diamond<R: Rng + ?Sized>(rng: &mut R) -> Problem {
    let mut b = PlantSpec::builder();
    for e in ["a", "b", "gamma"] {
        b.event(e);
    }
    let legal: Vec<bool> = (0..4).map(|_| rng.gen_bool(0.5)).collect();
    for k in 0..4 {
        b.state(&format!("s{k}"), k == 0, true);
    }
    for (k, &l) in legal.iter().enumerate() {
        b.state(&format!("t{k}"), false, l);
        b.transition(&format!("s{k}"), "gamma", &format!("t{k}"), l);
    }
    for (src, e, dst) in [
        ("s0", "a", "s1"),
        ("s0", "b", "s2"),
        ("s1", "b", "s3"),
        ("s2", "a", "s3"),
    ] {
        b.transition(src, e, dst, true);
    }
    let plant = b.build().expect("diamond satisfies the invariants");
    let gamma = plant.event_by_name("gamma").expect("declared above");
    let mut observable = vec![BTreeSet::new(), BTreeSet::new()];
    let mut controllable = vec![BTreeSet::new(), BTreeSet::new()];
    for e in plant.events() {
        for i in 0..2 {
            if e != gamma && rng.gen_bool(0.5) {
                observable[i].insert(e);
            }
            if rng.gen_bool(0.5) {
                controllable[i].insert(e);
            }
        }
    }
    if controllable.iter().all(|c| !c.contains(&gamma)) {
        controllable[rng.gen_range(0..2)].insert(gamma);
    }
    let profile = SupervisionProfile::new(observable, controllable).expect("two supervisors");
    Problem { plant, profile }
}

/// A random formula of modal depth at most `depth`, without `w_E`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, events: usize, supervisors: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        let e = EventId(rng.gen_range(0..events));
        return if rng.gen_bool(0.5) {
            Formula::possible(e)
        } else {
            Formula::legal(e)
        };
    }
    let sub = |rng: &mut R| random_formula(rng, events, supervisors, depth - 1);
    match rng.gen_range(0..8) {
        0 => sub(rng).not(),
        1 => sub(rng).and(sub(rng)),
        2 => sub(rng).or(sub(rng)),
        3 => sub(rng).implies(sub(rng)),
        4 | 5 => {
            let i = rng.gen_range(0..supervisors);
            Formula::know(i, sub(rng))
        }
        6 => {
            let e = EventId(rng.gen_range(0..events));
            Formula::someone_knows(e, sub(rng))
        }
        _ => {
            let e = EventId(rng.gen_range(0..events));
            let i = rng.gen_range(0..supervisors);
            Formula::other_knows(e, i, sub(rng))
        }
    }
}

/// Evaluates `phi` at every rebuilt world by direct quantification; worlds
/// are returned in the same breadth-first order as the composite.
pub fn oracle_eval(problem: &Problem, phi: &Formula, relation: Relation) -> Result<Vec<(bool, bool)>, OracleError> {
    let worlds = raw_worlds(&problem.plant, &problem.profile)?;
    let m = Naive {
        plant: &problem.plant,
        profile: &problem.profile,
        worlds: &worlds,
        relation,
    };
    Ok((0..worlds.len()).map(|w| (m.legal(w), m.holds(w, phi))).collect())
}
