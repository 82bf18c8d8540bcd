//! Per-decision explanations for the simulator's `why` command.

use std::fmt;

use crate::automata::EventId;
use crate::conditions::check_inf_obs_extended;
use crate::format::estimate_names;
use crate::fusion::{fuse, ControlDecision, DecisionBag, FusedDecision, FusionError};
use crate::kripke::{Evaluator, Relation};
use crate::observation::WorldId;
use crate::synthesis::{knowledge_summary, KnowledgeSummary, PolicyCase, SynthesisResult};
use crate::Analysis;

/// Components of a world: plant state, then each estimate as `{…}`.
pub fn world_label(analysis: &Analysis, w: WorldId) -> Vec<String> {
    let world = analysis.composite().world(w);
    let mut out = vec![analysis.plant().state_name(world.plant).to_string()];
    for (i, &s) in world.estimates.iter().enumerate() {
        let est = analysis.composite().observer(i).estimate(s);
        out.push(format!("{{{}}}", estimate_names(analysis.plant(), est).join(",")));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisorView {
    pub supervisor: usize,
    pub estimate: Vec<String>,
    /// Labels of the legal worlds indistinguishable from this one.
    pub class: Vec<Vec<String>>,
    pub knowledge: KnowledgeSummary,
    pub case: Option<PolicyCase>,
    /// `None` when a loaded table has no entry here.
    pub decision: Option<ControlDecision>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Uncontrollable,
    Controlled {
        supervisors: Vec<SupervisorView>,
        bag: DecisionBag,
        default: Option<FusedDecision>,
        fused: Option<Result<FusedDecision, FusionError>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub event: String,
    pub world: Vec<String>,
    pub string: Vec<String>,
    pub possible: bool,
    pub legal: bool,
    pub gate: Gate,
}

/// Explains the decision on `e` at `w`, from `result` when given and from the
/// knowledge-based policy otherwise.
pub fn explain(analysis: &Analysis, result: Option<&SynthesisResult>, w: WorldId, e: EventId) -> Explanation {
    let plant = analysis.plant();
    let frame = analysis.frame();
    let q = analysis.composite().world(w).plant;
    let t = plant.transition(q, e);
    let n = frame.controllers(e).to_vec();
    let gate = if n.is_empty() {
        Gate::Uncontrollable
    } else {
        let mut ev = Evaluator::new(frame, Relation::Partial);
        let mut supervisors = Vec::new();
        for &i in &n {
            let state = frame.estimate(w, i);
            let knowledge = knowledge_summary(&mut ev, w, e, i);
            let (decision, case) = match result {
                Some(r) => match r.supervisors[i].entry(state, e) {
                    Some(x) => (Some(x.decision), x.case),
                    None => (None, None),
                },
                None => {
                    let c = PolicyCase::classify(knowledge);
                    (Some(c.decision()), Some(c))
                }
            };
            let class = frame
                .partition(i, Relation::Partial)
                .members(w)
                .iter()
                .map(|&v| world_label(analysis, v))
                .collect();
            supervisors.push(SupervisorView {
                supervisor: i,
                estimate: estimate_names(plant, analysis.composite().observer(i).estimate(state)),
                class,
                knowledge,
                case,
                decision,
            });
        }
        let default = match result {
            Some(r) => r.defaults.get(&e).copied(),
            None => check_inf_obs_extended(frame).defaults.get(&e).copied(),
        };
        let decisions: Option<Vec<ControlDecision>> = supervisors.iter().map(|s| s.decision).collect();
        let bag = DecisionBag::new(decisions.clone().unwrap_or_default());
        let fused = decisions.and_then(|_| match default {
            Some(d) => Some(fuse(&bag, d)),
            None => {
                let (x, y) = (fuse(&bag, FusedDecision::Enable), fuse(&bag, FusedDecision::Disable));
                (x == y).then_some(x)
            }
        });
        Gate::Controlled {
            supervisors,
            bag,
            default,
            fused,
        }
    };
    Explanation {
        event: plant.event_name(e).to_string(),
        world: world_label(analysis, w),
        string: plant.word_names(analysis.composite().witness(w)),
        possible: t.is_some(),
        legal: t.is_some_and(|t| t.legal),
        gate,
    }
}

impl fmt::Display for Explanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let string = if self.string.is_empty() {
            "ε".to_string()
        } else {
            self.string.join(" ")
        };
        let status = match (self.possible, self.legal) {
            (false, _) => "not possible",
            (true, true) => "possible, legal",
            (true, false) => "possible, illegal",
        };
        writeln!(
            f,
            "{} at ({}) after {}: {}",
            self.event,
            self.world.join(" | "),
            string,
            status
        )?;
        match &self.gate {
            Gate::Uncontrollable => writeln!(f, "  uncontrollable; always allowed"),
            Gate::Controlled {
                supervisors,
                bag,
                default,
                fused,
            } => {
                for s in supervisors {
                    let k = s.supervisor + 1;
                    writeln!(f, "  supervisor {k}: estimate {{{}}}", s.estimate.join(","))?;
                    let class: Vec<String> = s.class.iter().map(|c| format!("({})", c.join(" | "))).collect();
                    if class.is_empty() {
                        writeln!(f, "    class: none (illegal world, knowledge is vacuous)")?;
                    } else {
                        writeln!(f, "    class: {}", class.join(", "))?;
                    }
                    let kn = &s.knowledge;
                    writeln!(
                        f,
                        "    K{k} e = {}, K{k} d = {}, K{k}(ē ⟹ O e) = {}, K{k}(d̄ ⟹ O d) = {}",
                        kn.knows_enable, kn.knows_disable, kn.covered_enable, kn.covered_disable
                    )?;
                    match (s.decision, s.case) {
                        (Some(d), Some(c)) => writeln!(f, "    decision: {d} via {}", c.reason(s.supervisor))?,
                        (Some(d), None) => writeln!(f, "    decision: {d} (from table)")?,
                        (None, _) => writeln!(f, "    decision: missing")?,
                    }
                }
                let default = default.map_or("none".to_string(), |d| d.to_string());
                let fused = match fused {
                    Some(Ok(d)) => d.to_string(),
                    Some(Err(e)) => format!("error: {e}"),
                    None => "undetermined".to_string(),
                };
                writeln!(f, "  bag {bag}; default {default}; fused {fused}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::synthesize;

    #[test]
    fn fixture_c_initial() {
        let a = Analysis::new(fixtures::fixture_c());
        let r = synthesize(&a).unwrap();
        let g = a.plant().event_by_name("gamma").unwrap();
        for res in [None, Some(&r)] {
            let x = explain(&a, res, WorldId(0), g);
            let Gate::Controlled { supervisors, fused, .. } = &x.gate else {
                panic!("gamma is controllable")
            };
            assert_eq!(supervisors[0].decision, Some(ControlDecision::Woff));
            assert_eq!(supervisors[0].case, Some(PolicyCase::ConditionalOff));
            assert_eq!(supervisors[1].decision, Some(ControlDecision::Woff));
            assert_eq!(*fused, Some(Ok(FusedDecision::Disable)));
        }
        let text = explain(&a, Some(&r), WorldId(0), g).to_string();
        assert!(text.contains("woff via K1(ē ⟹ O e)"), "{text}");
    }

    #[test]
    fn fixture_b_after_a() {
        let a = Analysis::new(fixtures::fixture_b());
        let ev_a = a.plant().event_by_name("a").unwrap();
        let g = a.plant().event_by_name("gamma").unwrap();
        let w = a.composite().run(&[ev_a]).unwrap();
        let x = explain(&a, None, w, g);
        let Gate::Controlled { supervisors, fused, .. } = &x.gate else {
            panic!()
        };
        assert_eq!(supervisors[0].decision, Some(ControlDecision::On));
        assert_eq!(supervisors[0].case, Some(PolicyCase::KnowsEnable));
        assert_eq!(*fused, Some(Ok(FusedDecision::Enable)));
        let u = explain(&a, None, WorldId(0), ev_a);
        assert_eq!(u.gate, Gate::Uncontrollable);
        assert!(u.to_string().contains("uncontrollable; always allowed"));
    }
}
