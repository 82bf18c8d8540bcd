//! Controllability and the observability conditions, evaluated on a [`KripkeFrame`].
//!
//! Every check quantifies over the legal worlds (unless a legacy option says
//! otherwise) and, for each controllable event, over the disjunction that
//! characterizes the condition. A failing check reports the first offending
//! event in name order and the first offending world in breadth-first order.

use std::collections::BTreeMap;
use std::fmt;

use crate::automata::{EventId, Word};
use crate::fusion::FusedDecision;
use crate::kripke::{Evaluator, Formula, KripkeFrame, Relation};
use crate::observation::WorldId;

/// The event-indexed formulas `e`, `d`, `ē` and `d̄`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shorthand {
    /// `e = ¬σ_G ∨ σ_E`: σ can be enabled.
    pub enable: Formula,
    /// `d = ¬σ_E`: σ can be disabled.
    pub disable: Formula,
    /// `ē = σ_E`: σ must be enabled.
    pub must_enable: Formula,
    /// `d̄ = σ_G ∧ ¬σ_E`: σ must be disabled.
    pub must_disable: Formula,
}

impl Shorthand {
    pub fn new(e: EventId) -> Self {
        Shorthand {
            enable: Formula::possible(e).not().or(Formula::legal(e)),
            disable: Formula::legal(e).not(),
            must_enable: Formula::legal(e),
            must_disable: Formula::possible(e).and(Formula::legal(e).not()),
        }
    }

    /// `K_i(ē ⟹ O e)`.
    pub fn covered_enable(&self, e: EventId, i: usize) -> Formula {
        Formula::know(
            i,
            self.must_enable
                .clone()
                .implies(Formula::other_knows(e, i, self.enable.clone())),
        )
    }

    /// `K_i(d̄ ⟹ O d)`.
    pub fn covered_disable(&self, e: EventId, i: usize) -> Formula {
        Formula::know(
            i,
            self.must_disable
                .clone()
                .implies(Formula::other_knows(e, i, self.disable.clone())),
        )
    }
}

/// A world together with its shortest witnessing string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub world: WorldId,
    pub string: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    /// An uncovered world where σ must be enabled.
    pub needs_enable: Witness,
    /// An uncovered world where σ must be disabled.
    pub needs_disable: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub event: EventId,
    pub world: WorldId,
    pub string: Word,
    pub conflict: Option<Conflict>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// The default partition of `Σ_c`; populated when an observability
    /// condition holds.
    pub defaults: BTreeMap<EventId, FusedDecision>,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    fn pass(defaults: BTreeMap<EventId, FusedDecision>) -> Self {
        Verdict {
            holds: true,
            defaults,
            counterexample: None,
        }
    }

    fn fail(counterexample: Counterexample) -> Self {
        Verdict {
            holds: false,
            defaults: BTreeMap::new(),
            counterexample: Some(counterexample),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `∃ i, j ∈ N_σ. K_i(σ_E ⟹ K_j e) ∨ e`
    Coupled,
    /// The four-line form with `i ≠ j`.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorldDomain {
    Legal,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventDomain {
    Controllable,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LegacyOptions {
    pub relation: Relation,
    pub worlds: WorldDomain,
    pub events: EventDomain,
}

impl Default for LegacyOptions {
    /// The original formulation: total relations, all worlds, all events.
    fn default() -> Self {
        LegacyOptions {
            relation: Relation::Total,
            worlds: WorldDomain::All,
            events: EventDomain::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoobsVariant {
    /// Veto only (`off`/`abstain`), default enable.
    Cp,
    /// Approve only (`on`/`abstain`), default disable.
    Da,
    StrongCp,
    StrongDa,
}

impl CoobsVariant {
    pub fn relation(self) -> Relation {
        match self {
            CoobsVariant::Cp | CoobsVariant::Da => Relation::Partial,
            CoobsVariant::StrongCp | CoobsVariant::StrongDa => Relation::Total,
        }
    }

    pub fn default_decision(self) -> FusedDecision {
        match self {
            CoobsVariant::Cp | CoobsVariant::StrongCp => FusedDecision::Enable,
            CoobsVariant::Da | CoobsVariant::StrongDa => FusedDecision::Disable,
        }
    }
}

/// Every condition the workbench can decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Controllability,
    Extended,
    Corrected(Shape),
    Legacy(LegacyOptions),
    Coobservability(CoobsVariant),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Controllability => write!(f, "controllability"),
            Condition::Extended => write!(f, "extended inference-observability"),
            Condition::Corrected(Shape::Coupled) => write!(f, "corrected inference-observability"),
            Condition::Corrected(Shape::Split) => write!(f, "corrected inference-observability (split form)"),
            Condition::Legacy(_) => write!(f, "legacy inference-observability"),
            Condition::Coobservability(CoobsVariant::Cp) => write!(f, "C&P co-observability"),
            Condition::Coobservability(CoobsVariant::Da) => write!(f, "D&A co-observability"),
            Condition::Coobservability(CoobsVariant::StrongCp) => write!(f, "strong C&P co-observability"),
            Condition::Coobservability(CoobsVariant::StrongDa) => write!(f, "strong D&A co-observability"),
        }
    }
}

/// Dispatches to the matching checker.
pub fn check(frame: &KripkeFrame, condition: Condition) -> Verdict {
    match condition {
        Condition::Controllability => check_controllability(frame),
        Condition::Extended => check_inf_obs_extended(frame),
        Condition::Corrected(shape) => check_inf_obs_corrected(frame, shape),
        Condition::Legacy(opts) => check_inf_obs_legacy(frame, opts),
        Condition::Coobservability(v) => check_coobservability(frame, v),
    }
}

fn truth(ev: &mut Evaluator<'_>, phi: &Formula) -> std::rc::Rc<[bool]> {
    ev.truth(phi)
        .expect("condition formulas only mention frame events and supervisors")
}

fn counterexample(frame: &KripkeFrame, event: EventId, world: WorldId) -> Counterexample {
    Counterexample {
        event,
        world,
        string: frame.witness(world).clone(),
        conflict: None,
    }
}

fn controllable(frame: &KripkeFrame) -> impl Iterator<Item = EventId> + '_ {
    frame
        .events()
        .iter()
        .copied()
        .filter(|&e| !frame.controllers(e).is_empty())
}

fn all_enable(frame: &KripkeFrame, d: FusedDecision) -> BTreeMap<EventId, FusedDecision> {
    controllable(frame).map(|e| (e, d)).collect()
}

/// Runs `per_world` over every `(σ, w)` in the chosen domains and reports the
/// first failure.
fn check_pointwise(
    frame: &KripkeFrame,
    events: impl Iterator<Item = EventId>,
    worlds: WorldDomain,
    mut per_event: impl FnMut(EventId) -> std::rc::Rc<[bool]>,
) -> Option<Counterexample> {
    for e in events {
        let ok = per_event(e);
        let bad = frame
            .worlds()
            .filter(|&w| worlds == WorldDomain::All || frame.is_legal(w))
            .find(|w| !ok[w.0]);
        if let Some(w) = bad {
            return Some(counterexample(frame, e, w));
        }
    }
    None
}

/// Holds iff at every legal world every uncontrollable event satisfies `e`.
pub fn check_controllability(frame: &KripkeFrame) -> Verdict {
    let mut ev = Evaluator::new(frame, Relation::Partial);
    let events: Vec<EventId> = frame
        .events()
        .iter()
        .copied()
        .filter(|&e| frame.controllers(e).is_empty())
        .collect();
    match check_pointwise(frame, events.into_iter(), WorldDomain::Legal, |e| {
        truth(&mut ev, &Shorthand::new(e).enable)
    }) {
        None => Verdict::pass(BTreeMap::new()),
        Some(cx) => Verdict::fail(cx),
    }
}

/// Truth of the four knowledge lines `Se ∨ Sd ∨ S(ē ⟹ Oe) ∨ S(d̄ ⟹ Od)`.
pub fn knowledge_lines(ev: &mut Evaluator<'_>, e: EventId) -> Vec<bool> {
    let frame = ev.frame();
    let sh = Shorthand::new(e);
    let mut acc = vec![false; frame.world_count()];
    let mut add = |v: std::rc::Rc<[bool]>| acc.iter_mut().zip(v.iter()).for_each(|(a, b)| *a |= *b);
    add(truth(ev, &Formula::someone_knows(e, sh.enable.clone())));
    add(truth(ev, &Formula::someone_knows(e, sh.disable.clone())));
    for &i in frame.controllers(e) {
        add(truth(ev, &sh.covered_enable(e, i)));
        add(truth(ev, &sh.covered_disable(e, i)));
    }
    acc
}

/// Extended inference-observability with the default partition chosen per event.
pub fn check_inf_obs_extended(frame: &KripkeFrame) -> Verdict {
    check_inf_obs_extended_with(frame, None)
}

/// As [`check_inf_obs_extended`], optionally with the default of each event fixed.
///
/// For each `σ ∈ Σ_c` let `U_σ` be the legal worlds where no knowledge line
/// holds. The check passes for σ when every world of `U_σ` satisfies `e`
/// (default enable) or every one satisfies `d` (default disable); an empty
/// `U_σ` defaults to enable.
pub fn check_inf_obs_extended_with(frame: &KripkeFrame, fixed: Option<&BTreeMap<EventId, FusedDecision>>) -> Verdict {
    let mut ev = Evaluator::new(frame, Relation::Partial);
    let mut defaults = BTreeMap::new();
    let events: Vec<EventId> = controllable(frame).collect();
    for e in events {
        let lines = knowledge_lines(&mut ev, e);
        let sh = Shorthand::new(e);
        let can_enable = truth(&mut ev, &sh.enable);
        let can_disable = truth(&mut ev, &sh.disable);
        let uncovered: Vec<WorldId> = frame.legal_worlds().filter(|w| !lines[w.0]).collect();
        let all_e = uncovered.iter().all(|w| can_enable[w.0]);
        let all_d = uncovered.iter().all(|w| can_disable[w.0]);
        let choice = match fixed.and_then(|m| m.get(&e)) {
            Some(FusedDecision::Enable) => all_e.then_some(FusedDecision::Enable),
            Some(FusedDecision::Disable) => all_d.then_some(FusedDecision::Disable),
            None if all_e => Some(FusedDecision::Enable),
            None if all_d => Some(FusedDecision::Disable),
            None => None,
        };
        match choice {
            Some(d) => {
                defaults.insert(e, d);
            }
            None => {
                let needs_enable = uncovered.iter().copied().find(|w| !can_disable[w.0]);
                let needs_disable = uncovered.iter().copied().find(|w| !can_enable[w.0]);
                let first = match (needs_enable, needs_disable) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("a failing event has an offending world"),
                };
                let witness = |w: WorldId| Witness {
                    world: w,
                    string: frame.witness(w).clone(),
                };
                let mut cx = counterexample(frame, e, first);
                if let (Some(a), Some(b)) = (needs_enable, needs_disable) {
                    cx.conflict = Some(Conflict {
                        needs_enable: witness(a),
                        needs_disable: witness(b),
                    });
                }
                return Verdict::fail(cx);
            }
        }
    }
    Verdict::pass(defaults)
}

/// `∃ i, j ∈ N_σ. K_i(σ_E ⟹ K_j e) ∨ e` at every world of the domain.
fn coupled_truth(ev: &mut Evaluator<'_>, e: EventId) -> Vec<bool> {
    let frame = ev.frame();
    let sh = Shorthand::new(e);
    let mut acc: Vec<bool> = truth(ev, &sh.enable).to_vec();
    let n = frame.controllers(e).to_vec();
    for &i in &n {
        for &j in &n {
            let phi = Formula::know(i, Formula::legal(e).implies(Formula::know(j, sh.enable.clone())));
            let v = truth(ev, &phi);
            acc.iter_mut().zip(v.iter()).for_each(|(a, b)| *a |= *b);
        }
    }
    acc
}

fn split_truth(ev: &mut Evaluator<'_>, e: EventId) -> Vec<bool> {
    let frame = ev.frame();
    let n = frame.controllers(e).to_vec();
    if n.len() < 2 {
        return coupled_truth(ev, e);
    }
    let sh = Shorthand::new(e);
    let mut acc: Vec<bool> = truth(ev, &sh.enable).to_vec();
    for &i in &n {
        for &j in n.iter().filter(|&&j| j != i) {
            let lines = [
                Formula::know(i, sh.enable.clone()),
                Formula::know(i, sh.disable.clone()),
                Formula::know(i, Formula::legal(e).implies(Formula::know(j, sh.enable.clone()))),
            ];
            for phi in &lines {
                let v = truth(ev, phi);
                acc.iter_mut().zip(v.iter()).for_each(|(a, b)| *a |= *b);
            }
        }
    }
    acc
}

/// Corrected inference-observability over `Σ_c` and legal worlds.
pub fn check_inf_obs_corrected(frame: &KripkeFrame, shape: Shape) -> Verdict {
    let mut ev = Evaluator::new(frame, Relation::Partial);
    let events: Vec<EventId> = controllable(frame).collect();
    let cx = check_pointwise(frame, events.into_iter(), WorldDomain::Legal, |e| {
        match shape {
            Shape::Coupled => coupled_truth(&mut ev, e),
            Shape::Split => split_truth(&mut ev, e),
        }
        .into()
    });
    match cx {
        None => Verdict::pass(all_enable(frame, FusedDecision::Enable)),
        Some(cx) => Verdict::fail(cx),
    }
}

/// The coupled disjunction with configurable relation and quantifier domains.
pub fn check_inf_obs_legacy(frame: &KripkeFrame, opts: LegacyOptions) -> Verdict {
    let mut ev = Evaluator::new(frame, opts.relation);
    let events: Vec<EventId> = match opts.events {
        EventDomain::Controllable => controllable(frame).collect(),
        EventDomain::All => frame.events().to_vec(),
    };
    match check_pointwise(frame, events.into_iter(), opts.worlds, |e| {
        coupled_truth(&mut ev, e).into()
    }) {
        None => Verdict::pass(all_enable(frame, FusedDecision::Enable)),
        Some(cx) => Verdict::fail(cx),
    }
}

/// C&P: `Sd ∨ e`; D&A: `Se ∨ d`; strong variants use the total relations.
pub fn check_coobservability(frame: &KripkeFrame, variant: CoobsVariant) -> Verdict {
    let mut ev = Evaluator::new(frame, variant.relation());
    let events: Vec<EventId> = controllable(frame).collect();
    let cx = check_pointwise(frame, events.into_iter(), WorldDomain::Legal, |e| {
        let sh = Shorthand::new(e);
        let (known, fallback) = match variant.default_decision() {
            FusedDecision::Enable => (sh.disable, sh.enable),
            FusedDecision::Disable => (sh.enable, sh.disable),
        };
        truth(&mut ev, &Formula::someone_knows(e, known).or(fallback))
    });
    match cx {
        None => Verdict::pass(all_enable(frame, variant.default_decision())),
        Some(cx) => Verdict::fail(cx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::Analysis;

    fn names(a: &Analysis, w: &Word) -> String {
        a.plant().format_word(w)
    }

    #[test]
    fn fixture_b_verdicts() {
        let a = Analysis::new(fixtures::fixture_b());
        let f = a.frame();
        assert!(check_controllability(f).holds);
        assert!(check_inf_obs_corrected(f, Shape::Coupled).holds);
        assert!(check_inf_obs_corrected(f, Shape::Split).holds);
        assert!(check_inf_obs_extended(f).holds);
        // over all of Σ the uncontrollable `a` already fails at the illegal world γ
        let legacy = check_inf_obs_legacy(f, LegacyOptions::default());
        let cx = legacy.counterexample.unwrap();
        assert_eq!(
            (a.plant().event_name(cx.event), names(&a, &cx.string).as_str()),
            ("a", "gamma")
        );
        let controllable_only = LegacyOptions {
            events: EventDomain::Controllable,
            ..LegacyOptions::default()
        };
        let cx = check_inf_obs_legacy(f, controllable_only).counterexample.unwrap();
        assert_eq!(
            (a.plant().event_name(cx.event), names(&a, &cx.string).as_str()),
            ("gamma", "gamma a")
        );
        let legal = LegacyOptions {
            worlds: WorldDomain::Legal,
            ..LegacyOptions::default()
        };
        assert!(check_inf_obs_legacy(f, legal).holds);
        assert!(check_coobservability(f, CoobsVariant::Cp).holds);
    }

    #[test]
    fn fixture_c_verdicts() {
        let a = Analysis::new(fixtures::fixture_c());
        let f = a.frame();
        let ext = check_inf_obs_extended(f);
        assert!(ext.holds);
        let g = a.plant().event_by_name("gamma").unwrap();
        assert_eq!(ext.defaults.get(&g), Some(&FusedDecision::Enable));
        assert!(check_inf_obs_corrected(f, Shape::Coupled).holds);
        let cp = check_coobservability(f, CoobsVariant::Cp);
        assert!(!cp.holds);
        assert_eq!(cp.counterexample.unwrap().world, WorldId(0));
        // approvals alone suffice here; the mirrored fixture breaks D&A
        assert!(check_coobservability(f, CoobsVariant::Da).holds);
        let m = Analysis::new(fixtures::fixture_c_mirrored());
        assert!(!check_coobservability(m.frame(), CoobsVariant::Da).holds);
        assert!(check_coobservability(m.frame(), CoobsVariant::Cp).holds);
    }

    #[test]
    fn symmetric_diamond_fails() {
        let a = Analysis::new(fixtures::symmetric_diamond());
        let f = a.frame();
        assert!(check_controllability(f).holds);
        assert!(!check_inf_obs_corrected(f, Shape::Coupled).holds);
        assert!(!check_inf_obs_corrected(f, Shape::Split).holds);
        let ext = check_inf_obs_extended(f);
        let conflict = ext.counterexample.unwrap().conflict.unwrap();
        assert_eq!(names(&a, &conflict.needs_disable.string), "ε");
        assert_eq!(names(&a, &conflict.needs_enable.string), "a");
    }

    #[test]
    fn blind_chain_conflict() {
        let a = Analysis::new(fixtures::blind_chain());
        let ext = check_inf_obs_extended(a.frame());
        assert!(!ext.holds);
        let conflict = ext.counterexample.unwrap().conflict.unwrap();
        assert_eq!(names(&a, &conflict.needs_enable.string), "ε");
        assert_eq!(names(&a, &conflict.needs_disable.string), "gamma");
    }

    #[test]
    fn uncontrollable_exit_breaks_controllability() {
        let a = Analysis::new(fixtures::fixture_b_uncontrollable_exit());
        let v = check_controllability(a.frame());
        assert!(!v.holds);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.world, WorldId(0));
        assert_eq!(a.plant().event_name(cx.event), "a");
    }

    #[test]
    fn frozen_defaults_recheck() {
        for p in [
            fixtures::fixture_b(),
            fixtures::fixture_c(),
            fixtures::fixture_c_mirrored(),
        ] {
            let a = Analysis::new(p);
            let v = check_inf_obs_extended(a.frame());
            assert!(v.holds);
            assert!(check_inf_obs_extended_with(a.frame(), Some(&v.defaults)).holds);
        }
    }
}
