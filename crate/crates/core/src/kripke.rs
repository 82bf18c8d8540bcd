//! Kripke frames over the composite automaton and an epistemic formula evaluator.
//!
//! Worlds are the worlds of the [`Composite`]. Each supervisor `i` has two
//! accessibility relations:
//!
//! * the total relation `≃_i`: `w ≃_i w'` iff `w_i = w'_i`;
//! * the partial relation `∼_i`: additionally both plant states are legal.
//!
//! `∼_i` is a partial equivalence relation, so an illegal world has an empty
//! class and every `K_i φ` holds there vacuously.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::automata::{EventId, PlantSpec, SupervisionProfile, Word};
use crate::observation::{Composite, WorldId};

/// Atomic propositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proposition {
    /// `σ_G`: the event is physically possible.
    Possible(EventId),
    /// `σ_E`: the event is possible and legal.
    Legal(EventId),
    /// `w_E`: the plant state of the world is legal.
    WorldLegal,
}

/// Epistemic formulas.
///
/// `SomeoneKnows` and `OtherKnows` are macros over `N_σ` of the named event;
/// they are expanded at evaluation time against the frame's profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Proposition),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Know(usize, Box<Formula>),
    /// `S φ = ⋁_{i ∈ N_σ} K_i φ`.
    SomeoneKnows {
        event: EventId,
        body: Box<Formula>,
    },
    /// `O φ = ⋁_{j ∈ N_σ, j ≠ except} K_j φ`; false when no such `j` exists.
    OtherKnows {
        event: EventId,
        except: usize,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn var(p: Proposition) -> Formula {
        Formula::Var(p)
    }

    pub fn possible(e: EventId) -> Formula {
        Formula::Var(Proposition::Possible(e))
    }

    pub fn legal(e: EventId) -> Formula {
        Formula::Var(Proposition::Legal(e))
    }

    pub fn world_legal() -> Formula {
        Formula::Var(Proposition::WorldLegal)
    }

    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn know(i: usize, body: Formula) -> Formula {
        Formula::Know(i, Box::new(body))
    }

    pub fn someone_knows(event: EventId, body: Formula) -> Formula {
        Formula::SomeoneKnows {
            event,
            body: Box::new(body),
        }
    }

    pub fn other_knows(event: EventId, except: usize, body: Formula) -> Formula {
        Formula::OtherKnows {
            event,
            except,
            body: Box::new(body),
        }
    }

    /// Rewrites derived connectives into `¬` and `∧`.
    pub fn expand_connectives(&self) -> Formula {
        match self {
            Formula::Var(p) => Formula::Var(*p),
            Formula::Not(a) => a.expand_connectives().not(),
            Formula::And(a, b) => a.expand_connectives().and(b.expand_connectives()),
            Formula::Or(a, b) => a.expand_connectives().not().and(b.expand_connectives().not()).not(),
            Formula::Implies(a, b) => a.as_ref().clone().not().or(b.as_ref().clone()).expand_connectives(),
            Formula::Know(i, a) => Formula::know(*i, a.expand_connectives()),
            Formula::SomeoneKnows { event, body } => Formula::someone_knows(*event, body.expand_connectives()),
            Formula::OtherKnows { event, except, body } => {
                Formula::other_knows(*event, *except, body.expand_connectives())
            }
        }
    }

    pub fn mentions_world_legal(&self) -> bool {
        match self {
            Formula::Var(p) => *p == Proposition::WorldLegal,
            Formula::Not(a) => a.mentions_world_legal(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.mentions_world_legal() || b.mentions_world_legal()
            }
            Formula::Know(_, a) | Formula::SomeoneKnows { body: a, .. } | Formula::OtherKnows { body: a, .. } => {
                a.mentions_world_legal()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Know(_, a) | Formula::SomeoneKnows { body: a, .. } | Formula::OtherKnows { body: a, .. } => {
                1 + a.depth()
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(Proposition::Possible(e)) => write!(f, "G{}", e.0),
            Formula::Var(Proposition::Legal(e)) => write!(f, "E{}", e.0),
            Formula::Var(Proposition::WorldLegal) => write!(f, "wE"),
            Formula::Not(a) => write!(f, "¬{a}"),
            Formula::And(a, b) => write!(f, "({a} ∧ {b})"),
            Formula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Formula::Implies(a, b) => write!(f, "({a} ⟹ {b})"),
            Formula::Know(i, a) => write!(f, "K{}{a}", i + 1),
            Formula::SomeoneKnows { body, .. } => write!(f, "S{body}"),
            Formula::OtherKnows { except, body, .. } => write!(f, "O{}{body}", except + 1),
        }
    }
}

/// Replaces every `K_i ψ` by `K_i(w_E ⟹ ψ')` and guards the root with `w_E ⟹ ·`.
///
/// On a frame with total relations the result agrees, at legal worlds, with
/// the original formula under partial relations. The input is expected not to
/// mention `w_E` itself.
pub fn guard_transform(phi: &Formula) -> Formula {
    Formula::world_legal().implies(guard_inner(phi))
}

fn guard_inner(phi: &Formula) -> Formula {
    let guarded = |body: &Formula| Formula::world_legal().implies(guard_inner(body));
    match phi {
        Formula::Var(p) => Formula::Var(*p),
        Formula::Not(a) => guard_inner(a).not(),
        Formula::And(a, b) => guard_inner(a).and(guard_inner(b)),
        Formula::Or(a, b) => guard_inner(a).or(guard_inner(b)),
        Formula::Implies(a, b) => guard_inner(a).implies(guard_inner(b)),
        Formula::Know(i, a) => Formula::know(*i, guarded(a)),
        Formula::SomeoneKnows { event, body } => Formula::someone_knows(*event, guarded(body)),
        Formula::OtherKnows { event, except, body } => Formula::other_knows(*event, *except, guarded(body)),
    }
}

/// Which accessibility family `K_i` quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `∼_i`, restricted to legal worlds.
    Partial,
    /// `≃_i`, an equivalence on all worlds.
    Total,
}

impl Relation {
    fn slot(self) -> usize {
        match self {
            Relation::Partial => 0,
            Relation::Total => 1,
        }
    }
}

/// A partition of (some of) the worlds into classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<Option<usize>>,
    classes: Vec<Vec<WorldId>>,
}

impl Partition {
    /// `None` for a world outside the domain of a partial relation.
    pub fn class_of(&self, w: WorldId) -> Option<usize> {
        self.class_of[w.0]
    }

    pub fn class(&self, c: usize) -> &[WorldId] {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[Vec<WorldId>] {
        &self.classes
    }

    /// `[w]_i`; empty for worlds outside the domain.
    pub fn members(&self, w: WorldId) -> &[WorldId] {
        match self.class_of[w.0] {
            Some(c) => &self.classes[c],
            None => &[],
        }
    }

    pub fn related(&self, a: WorldId, b: WorldId) -> bool {
        matches!((self.class_of[a.0], self.class_of[b.0]), (Some(x), Some(y)) if x == y)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula mentions unknown event #{0}")]
    UnknownEvent(usize),
    #[error("formula mentions unknown supervisor {0}")]
    UnknownSupervisor(usize),
    #[error("world #{0} is not in the frame")]
    UnknownWorld(usize),
}

/// `(W, π, {∼_i}, {≃_i})`.
#[derive(Debug, Clone)]
pub struct KripkeFrame {
    world_count: usize,
    event_count: usize,
    world_legal: Vec<bool>,
    /// `[world][event] = (σ_G, σ_E)`
    valuation: Vec<Vec<(bool, bool)>>,
    /// `[relation slot][supervisor]`
    access: [Vec<Partition>; 2],
    controllers: Vec<Vec<usize>>,
    witness: Vec<Word>,
    /// `[world][supervisor]` observer state
    estimates: Vec<Vec<usize>>,
    event_order: Vec<EventId>,
}

impl KripkeFrame {
    pub fn build(composite: &Composite, model: &PlantSpec, profile: &SupervisionProfile) -> KripkeFrame {
        let n = profile.supervisors();
        let worlds: Vec<WorldId> = composite.world_ids().collect();
        let world_legal: Vec<bool> = worlds
            .iter()
            .map(|&w| model.is_legal(composite.world(w).plant))
            .collect();
        let valuation = worlds
            .iter()
            .map(|&w| {
                let q = composite.world(w).plant;
                model
                    .events()
                    .map(|e| match model.transition(q, e) {
                        Some(t) => (true, t.legal),
                        None => (false, false),
                    })
                    .collect()
            })
            .collect();
        let partition = |i: usize, partial: bool| {
            let mut by_estimate: HashMap<usize, usize> = HashMap::new();
            let mut class_of = vec![None; worlds.len()];
            let mut classes: Vec<Vec<WorldId>> = Vec::new();
            for &w in &worlds {
                if partial && !world_legal[w.0] {
                    continue;
                }
                let key = composite.world(w).estimates[i];
                let c = *by_estimate.entry(key).or_insert_with(|| {
                    classes.push(Vec::new());
                    classes.len() - 1
                });
                classes[c].push(w);
                class_of[w.0] = Some(c);
            }
            Partition { class_of, classes }
        };
        let access = [
            (0..n).map(|i| partition(i, true)).collect(),
            (0..n).map(|i| partition(i, false)).collect(),
        ];
        KripkeFrame {
            world_count: worlds.len(),
            event_count: model.event_count(),
            world_legal,
            valuation,
            access,
            controllers: model.events().map(|e| profile.controllers(e)).collect(),
            witness: worlds.iter().map(|&w| composite.witness(w).clone()).collect(),
            estimates: worlds.iter().map(|&w| composite.world(w).estimates.clone()).collect(),
            event_order: model.events_by_name().to_vec(),
        }
    }

    /// Shortest (then lexicographically least) string reaching `w`.
    pub fn witness(&self, w: WorldId) -> &Word {
        &self.witness[w.0]
    }

    /// The observer state of supervisor `i` at `w`.
    pub fn estimate(&self, w: WorldId, i: usize) -> usize {
        self.estimates[w.0][i]
    }

    /// Events in name order.
    pub fn events(&self) -> &[EventId] {
        &self.event_order
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn worlds(&self) -> impl Iterator<Item = WorldId> {
        (0..self.world_count).map(WorldId)
    }

    pub fn legal_worlds(&self) -> impl Iterator<Item = WorldId> + '_ {
        self.worlds().filter(|w| self.world_legal[w.0])
    }

    pub fn supervisors(&self) -> usize {
        self.access[0].len()
    }

    pub fn event_count(&self) -> usize {
        self.event_count
    }

    pub fn is_legal(&self, w: WorldId) -> bool {
        self.world_legal[w.0]
    }

    pub fn controllers(&self, e: EventId) -> &[usize] {
        &self.controllers[e.0]
    }

    pub fn partition(&self, i: usize, relation: Relation) -> &Partition {
        &self.access[relation.slot()][i]
    }

    /// `π(w, p)`.
    pub fn valuation(&self, w: WorldId, p: Proposition) -> bool {
        match p {
            Proposition::Possible(e) => self.valuation[w.0][e.0].0,
            Proposition::Legal(e) => self.valuation[w.0][e.0].1,
            Proposition::WorldLegal => self.world_legal[w.0],
        }
    }
}

/// Formula evaluator with a per-subformula cache of truth vectors.
///
/// Each subformula is evaluated once over all worlds, so evaluating the same
/// condition at every world costs one pass per subformula.
pub struct Evaluator<'f> {
    frame: &'f KripkeFrame,
    relation: Relation,
    memo: HashMap<Formula, Rc<[bool]>>,
}

impl<'f> Evaluator<'f> {
    pub fn new(frame: &'f KripkeFrame, relation: Relation) -> Self {
        Evaluator {
            frame,
            relation,
            memo: HashMap::new(),
        }
    }

    pub fn frame(&self) -> &'f KripkeFrame {
        self.frame
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn holds(&mut self, w: WorldId, phi: &Formula) -> Result<bool, EvalError> {
        if w.0 >= self.frame.world_count {
            return Err(EvalError::UnknownWorld(w.0));
        }
        Ok(self.truth(phi)?[w.0])
    }

    /// Truth value of `phi` at every world.
    pub fn truth(&mut self, phi: &Formula) -> Result<Rc<[bool]>, EvalError> {
        if let Some(v) = self.memo.get(phi) {
            return Ok(v.clone());
        }
        let n = self.frame.world_count;
        let v: Rc<[bool]> = match phi {
            Formula::Var(p) => {
                if let Proposition::Possible(e) | Proposition::Legal(e) = p {
                    if e.0 >= self.frame.event_count {
                        return Err(EvalError::UnknownEvent(e.0));
                    }
                }
                (0..n).map(|w| self.frame.valuation(WorldId(w), *p)).collect()
            }
            Formula::Not(a) => self.truth(a)?.iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (x, y) = (self.truth(a)?, self.truth(b)?);
                x.iter().zip(y.iter()).map(|(p, q)| *p && *q).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.truth(a)?, self.truth(b)?);
                x.iter().zip(y.iter()).map(|(p, q)| *p || *q).collect()
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.truth(a)?, self.truth(b)?);
                x.iter().zip(y.iter()).map(|(p, q)| !*p || *q).collect()
            }
            Formula::Know(i, a) => self.know(*i, a)?,
            Formula::SomeoneKnows { event, body } => {
                let agents = self.controllers(*event)?;
                self.any_know(agents.iter().copied(), body)?
            }
            Formula::OtherKnows { event, except, body } => {
                let agents = self.controllers(*event)?;
                self.any_know(agents.iter().copied().filter(|j| j != except), body)?
            }
        };
        self.memo.insert(phi.clone(), v.clone());
        Ok(v)
    }

    fn controllers(&self, e: EventId) -> Result<Vec<usize>, EvalError> {
        if e.0 >= self.frame.event_count {
            return Err(EvalError::UnknownEvent(e.0));
        }
        Ok(self.frame.controllers(e).to_vec())
    }

    fn any_know(&mut self, agents: impl Iterator<Item = usize>, body: &Formula) -> Result<Rc<[bool]>, EvalError> {
        let mut acc = vec![false; self.frame.world_count];
        for i in agents {
            let k = self.know(i, body)?;
            acc.iter_mut().zip(k.iter()).for_each(|(a, k)| *a |= *k);
        }
        Ok(acc.into())
    }

    fn know(&mut self, i: usize, body: &Formula) -> Result<Rc<[bool]>, EvalError> {
        if i >= self.frame.supervisors() {
            return Err(EvalError::UnknownSupervisor(i));
        }
        let inner = self.truth(body)?;
        let part = self.frame.partition(i, self.relation);
        let class_truth: Vec<bool> = part
            .classes()
            .iter()
            .map(|members| members.iter().all(|w| inner[w.0]))
            .collect();
        Ok((0..self.frame.world_count)
            .map(|w| part.class_of(WorldId(w)).map_or(true, |c| class_truth[c]))
            .collect())
    }
}

/// Evaluates `phi` at `w`.
pub fn eval(frame: &KripkeFrame, w: WorldId, phi: &Formula, relation: Relation) -> Result<bool, EvalError> {
    Evaluator::new(frame, relation).holds(w, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn frame_b() -> (crate::Problem, Composite, KripkeFrame) {
        let p = fixtures::fixture_b();
        let c = Composite::build(&p.plant, &p.profile);
        let f = KripkeFrame::build(&c, &p.plant, &p.profile);
        (p, c, f)
    }

    fn world(p: &crate::Problem, c: &Composite, s: &str) -> WorldId {
        let word: Vec<EventId> = s
            .split_whitespace()
            .map(|n| p.plant.event_by_name(n).unwrap())
            .collect();
        c.run(&word).unwrap()
    }

    #[test]
    fn fixture_b_classes() {
        let (p, c, f) = frame_b();
        let part = f.partition(0, Relation::Partial);
        let eps = world(&p, &c, "");
        let a = world(&p, &c, "a");
        let ag = world(&p, &c, "a gamma");
        assert_eq!(part.members(eps), [eps]);
        assert_eq!(part.members(a), [a, ag]);
        for s in ["gamma", "gamma a", "gamma a gamma"] {
            assert!(part.members(world(&p, &c, s)).is_empty());
        }
        let blind = f.partition(1, Relation::Total);
        assert_eq!(blind.classes().len(), 1);
        assert_eq!(blind.classes()[0].len(), 6);
    }

    #[test]
    fn fixture_b_evaluation() {
        let (p, c, f) = frame_b();
        let g = p.plant.event_by_name("gamma").unwrap();
        let ga = world(&p, &c, "gamma a");
        assert!(eval(&f, ga, &Formula::know(0, Formula::legal(g)), Relation::Partial).unwrap());
        let eps = world(&p, &c, "");
        assert!(eval(&f, eps, &Formula::know(0, Formula::legal(g).not()), Relation::Partial).unwrap());
        let taut = Formula::possible(g).or(Formula::possible(g).not());
        for w in f.legal_worlds() {
            assert!(eval(&f, w, &taut, Relation::Partial).unwrap());
        }
        assert_eq!(
            eval(&f, eps, &Formula::legal(EventId(9)), Relation::Partial),
            Err(EvalError::UnknownEvent(9))
        );
    }

    #[test]
    fn full_legality_makes_relations_coincide() {
        let mut b = crate::automata::PlantSpec::builder();
        b.event("a").event("b");
        b.state("x", true, true).state("y", false, true);
        b.transition("x", "a", "y", true).transition("y", "b", "x", true);
        let plant = b.build().unwrap();
        let a = plant.event_by_name("a").unwrap();
        let profile = SupervisionProfile::new(vec![[a].into()], vec![Default::default()]).unwrap();
        let c = Composite::build(&plant, &profile);
        let f = KripkeFrame::build(&c, &plant, &profile);
        assert_eq!(f.partition(0, Relation::Partial), f.partition(0, Relation::Total));
    }

    #[test]
    fn guard_transform_shapes() {
        let d = Formula::legal(EventId(0)).not();
        assert_eq!(
            guard_transform(&Formula::know(0, d.clone())),
            Formula::world_legal().implies(Formula::know(0, Formula::world_legal().implies(d)))
        );
        let p = Formula::possible(EventId(1));
        assert_eq!(guard_transform(&p), Formula::world_legal().implies(p.clone()));
        let nested = Formula::know(0, Formula::know(1, p.clone()));
        let wl = Formula::world_legal;
        assert_eq!(
            guard_transform(&nested),
            wl().implies(Formula::know(0, wl().implies(Formula::know(1, wl().implies(p)))))
        );
    }

    #[test]
    fn derived_connectives_match_expansion() {
        let (p, _c, f) = frame_b();
        let g = p.plant.event_by_name("gamma").unwrap();
        let a = p.plant.event_by_name("a").unwrap();
        let phi = Formula::know(
            1,
            Formula::legal(g).implies(Formula::know(0, Formula::possible(a).or(Formula::legal(g)))),
        );
        let expanded = phi.expand_connectives();
        for rel in [Relation::Partial, Relation::Total] {
            let mut ev = Evaluator::new(&f, rel);
            assert_eq!(ev.truth(&phi).unwrap(), ev.truth(&expanded).unwrap());
        }
    }
}
