//! The line-oriented model format and the JSON supervisor files.
//!
//! ```text
//! # comment
//! supervisors <n>
//! event <name> [obs=<i,...>] [ctrl=<i,...>]
//! state <name> [init] [legal]
//! trans <src> <event> <dst> [legal]
//! ```
//!
//! Supervisor indices in files are 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{EventId, ModelError, PlantSpec, SupervisionProfile};
use crate::fusion::{ControlDecision, FusedDecision};
use crate::observation::Observer;
use crate::synthesis::{DecisionEntry, PolicyCase, Supervisor, SynthesisResult};
use crate::Problem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("{0}")]
    Syntax(String),
    #[error("`supervisors` declared more than once")]
    DuplicateSupervisors,
    #[error("missing `supervisors` declaration")]
    MissingSupervisors,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A parse or validation error at a 1-based line and column.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn tokens(line: &str, lineno: usize) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &body[s..k],
                    pos: Pos {
                        line: lineno,
                        column: body[..s].chars().count() + 1,
                    },
                });
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    out
}

fn err(pos: Pos, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: kind.into(),
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

struct EventDecl {
    name: String,
    pos: Pos,
    obs: Vec<(usize, Pos)>,
    ctrl: Vec<(usize, Pos)>,
}

struct StateDecl {
    name: String,
    pos: Pos,
}

struct TransDecl {
    fields: [(String, Pos); 3],
}

fn indices(tok: &Token<'_>, list: &str) -> Result<Vec<(usize, Pos)>, ParseError> {
    if list.is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|x| {
            x.parse::<usize>()
                .map(|i| (i, tok.pos))
                .map_err(|_| syntax(tok.pos, format!("bad supervisor index `{x}`")))
        })
        .collect()
}

/// Largest accepted `supervisors` count.
pub const MAX_SUPERVISORS: usize = 64;

/// Parses and validates a model.
pub fn parse_model(text: &str) -> Result<Problem, ParseError> {
    let mut supervisors: Option<(usize, Pos)> = None;
    let mut events: Vec<EventDecl> = Vec::new();
    let mut states: Vec<StateDecl> = Vec::new();
    let mut trans: Vec<TransDecl> = Vec::new();
    let mut builder = PlantSpec::builder();
    let mut last_line = 1;

    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        last_line = lineno;
        let toks = tokens(line, lineno);
        let Some(head) = toks.first() else { continue };
        let rest = &toks[1..];
        match head.text {
            "supervisors" => {
                if supervisors.is_some() {
                    return Err(err(head.pos, ParseErrorKind::DuplicateSupervisors));
                }
                let [n] = rest else {
                    return Err(syntax(head.pos, "expected `supervisors <n>`"));
                };
                let v = n
                    .text
                    .parse::<usize>()
                    .map_err(|_| syntax(n.pos, format!("bad supervisor count `{}`", n.text)))?;
                if v == 0 {
                    return Err(err(n.pos, ModelError::NoSupervisors));
                }
                if v > MAX_SUPERVISORS {
                    return Err(syntax(
                        n.pos,
                        format!("at most {MAX_SUPERVISORS} supervisors are supported"),
                    ));
                }
                supervisors = Some((v, n.pos));
            }
            "event" => {
                let Some((name, opts)) = rest.split_first() else {
                    return Err(syntax(head.pos, "expected `event <name>`"));
                };
                let mut decl = EventDecl {
                    name: name.text.to_string(),
                    pos: name.pos,
                    obs: Vec::new(),
                    ctrl: Vec::new(),
                };
                let (mut seen_obs, mut seen_ctrl) = (false, false);
                for t in opts {
                    if let Some(list) = t.text.strip_prefix("obs=") {
                        if std::mem::replace(&mut seen_obs, true) {
                            return Err(syntax(t.pos, "repeated `obs=`"));
                        }
                        decl.obs = indices(t, list)?;
                    } else if let Some(list) = t.text.strip_prefix("ctrl=") {
                        if std::mem::replace(&mut seen_ctrl, true) {
                            return Err(syntax(t.pos, "repeated `ctrl=`"));
                        }
                        decl.ctrl = indices(t, list)?;
                    } else {
                        return Err(syntax(t.pos, format!("unexpected `{}`", t.text)));
                    }
                }
                builder.event(name.text);
                events.push(decl);
            }
            "state" => {
                let Some((name, opts)) = rest.split_first() else {
                    return Err(syntax(head.pos, "expected `state <name>`"));
                };
                let (mut init, mut legal) = (false, false);
                for t in opts {
                    let flag = match t.text {
                        "init" => &mut init,
                        "legal" => &mut legal,
                        _ => return Err(syntax(t.pos, format!("unexpected `{}`", t.text))),
                    };
                    if std::mem::replace(flag, true) {
                        return Err(syntax(t.pos, format!("repeated `{}`", t.text)));
                    }
                }
                builder.state(name.text, init, legal);
                states.push(StateDecl {
                    name: name.text.to_string(),
                    pos: name.pos,
                });
            }
            "trans" => {
                let (src, ev, dst, legal) = match rest {
                    [s, e, d] => (s, e, d, false),
                    [s, e, d, l] if l.text == "legal" => (s, e, d, true),
                    [_, _, _, l] => return Err(syntax(l.pos, format!("unexpected `{}`", l.text))),
                    _ => return Err(syntax(head.pos, "expected `trans <src> <event> <dst> [legal]`")),
                };
                builder.transition(src.text, ev.text, dst.text, legal);
                trans.push(TransDecl {
                    fields: [src, ev, dst].map(|t| (t.text.to_string(), t.pos)),
                });
            }
            other => return Err(err(head.pos, ParseErrorKind::UnknownDirective(other.to_string()))),
        }
    }

    let end = Pos {
        line: last_line,
        column: 1,
    };
    let (n, _) = supervisors.ok_or_else(|| err(end, ParseErrorKind::MissingSupervisors))?;

    let plant = builder.build().map_err(|e| {
        let pos = locate(&e, &events, &states, &trans).unwrap_or(end);
        err(pos, e)
    })?;

    let mut observable = vec![BTreeSet::new(); n];
    let mut controllable = vec![BTreeSet::new(); n];
    for (k, decl) in events.iter().enumerate() {
        let e = EventId(k);
        for (sets, list) in [(&mut observable, &decl.obs), (&mut controllable, &decl.ctrl)] {
            for &(i, pos) in list {
                if i == 0 || i > n {
                    return Err(err(pos, ModelError::SupervisorOutOfRange { index: i, n }));
                }
                sets[i - 1].insert(e);
            }
        }
    }
    let profile = SupervisionProfile::new(observable, controllable).map_err(|e| err(end, e))?;
    Ok(Problem { plant, profile })
}

/// Best source position for a validation error raised by the builder.
fn locate(e: &ModelError, events: &[EventDecl], states: &[StateDecl], trans: &[TransDecl]) -> Option<Pos> {
    let nth_event = |name: &str, nth: usize| events.iter().filter(|d| d.name == name).nth(nth).map(|d| d.pos);
    let nth_state = |name: &str, nth: usize| states.iter().filter(|d| d.name == name).nth(nth).map(|d| d.pos);
    let field = |slot: usize, name: &str| {
        trans
            .iter()
            .find(|t| t.fields[slot].0 == name)
            .map(|t| t.fields[slot].1)
    };
    let edge = |s: &str, ev: &str, d: &str| {
        trans
            .iter()
            .find(|t| t.fields[0].0 == s && t.fields[1].0 == ev && t.fields[2].0 == d)
            .map(|t| t.fields[0].1)
    };
    match e {
        ModelError::DuplicateEvent(n) => nth_event(n, 1),
        ModelError::DuplicateState(n) => nth_state(n, 1),
        ModelError::InvalidName(n) => nth_event(n, 0).or_else(|| nth_state(n, 0)),
        ModelError::MultipleInitial(_, b) => nth_state(b, 0),
        ModelError::IllegalInitial(n) | ModelError::UnreachableState(n) => nth_state(n, 0),
        ModelError::UnknownState(n) => {
            let first = trans
                .iter()
                .find_map(|t| [0, 2].into_iter().find(|&k| t.fields[k].0 == *n).map(|k| t.fields[k].1));
            first.or_else(|| field(0, n))
        }
        ModelError::UnknownEvent(n) => field(1, n),
        ModelError::Nondeterministic { state, event } => trans
            .iter()
            .filter(|t| t.fields[0].0 == *state && t.fields[1].0 == *event)
            .nth(1)
            .map(|t| t.fields[0].1),
        ModelError::LegalTransitionOutsideE { from, event, target }
        | ModelError::IllegalEntry { from, event, target } => edge(from, event, target),
        ModelError::NoInitial | ModelError::NoSupervisors | ModelError::SupervisorOutOfRange { .. } => None,
    }
}

fn index_list(items: impl Iterator<Item = usize>) -> String {
    items.map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

/// Canonical text for a model: declarations in index order.
pub fn serialize_model(problem: &Problem) -> String {
    let Problem { plant, profile } = problem;
    let mut out = String::new();
    let _ = writeln!(out, "supervisors {}", profile.supervisors());
    for e in plant.events() {
        let _ = write!(out, "event {}", plant.event_name(e));
        let obs: Vec<usize> = (0..profile.supervisors())
            .filter(|&i| profile.is_observable_by(i, e))
            .collect();
        let ctrl: Vec<usize> = (0..profile.supervisors())
            .filter(|&i| profile.is_controllable_by(i, e))
            .collect();
        if !obs.is_empty() {
            let _ = write!(out, " obs={}", index_list(obs.into_iter()));
        }
        if !ctrl.is_empty() {
            let _ = write!(out, " ctrl={}", index_list(ctrl.into_iter()));
        }
        out.push('\n');
    }
    for q in plant.states() {
        let _ = write!(out, "state {}", plant.state_name(q));
        if q == plant.initial() {
            out.push_str(" init");
        }
        if plant.is_legal(q) {
            out.push_str(" legal");
        }
        out.push('\n');
    }
    for (q, e, t) in plant.transitions() {
        let _ = write!(
            out,
            "trans {} {} {}",
            plant.state_name(q),
            plant.event_name(e),
            plant.state_name(t.target)
        );
        if t.legal {
            out.push_str(" legal");
        }
        out.push('\n');
    }
    out
}

/// One row of a supervisor file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    /// Sorted state names of the observer state.
    pub estimate: Vec<String>,
    pub event: String,
    pub decision: ControlDecision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<PolicyCase>,
}

/// On-disk form of one supervisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupervisorFile {
    /// 1-based.
    pub supervisor: usize,
    pub table: Vec<TableRow>,
}

/// Event name to default decision.
pub type DefaultsFile = BTreeMap<String, FusedDecision>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SupervisorFileError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("supervisor index {index} out of range 1..={n}")]
    SupervisorOutOfRange { index: usize, n: usize },
    #[error("supervisor {0} is defined twice")]
    DuplicateSupervisor(usize),
    #[error("supervisor {0} is missing")]
    MissingSupervisor(usize),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("supervisor {supervisor} has no observer state {estimate:?}")]
    UnknownEstimate { supervisor: usize, estimate: Vec<String> },
    #[error("supervisor {supervisor} does not control `{event}`")]
    NotControllable { supervisor: usize, event: String },
    #[error("supervisor {supervisor} lists ({estimate:?}, {event}) twice")]
    DuplicateRow {
        supervisor: usize,
        estimate: Vec<String>,
        event: String,
    },
    #[error("no default for controllable event `{0}`")]
    MissingDefault(String),
}

/// Decodes a supervisor file without consulting any model.
pub fn parse_supervisor(text: &str) -> Result<SupervisorFile, SupervisorFileError> {
    serde_json::from_str(text).map_err(|e| SupervisorFileError::Json(e.to_string()))
}

pub fn parse_defaults(text: &str) -> Result<DefaultsFile, SupervisorFileError> {
    serde_json::from_str(text).map_err(|e| SupervisorFileError::Json(e.to_string()))
}

/// Resolves a decoded supervisor file against `problem`.
pub fn resolve_supervisor(problem: &Problem, file: &SupervisorFile) -> Result<Supervisor, SupervisorFileError> {
    let Problem { plant, profile } = problem;
    let n = profile.supervisors();
    if file.supervisor == 0 || file.supervisor > n {
        return Err(SupervisorFileError::SupervisorOutOfRange {
            index: file.supervisor,
            n,
        });
    }
    let i = file.supervisor - 1;
    let observer: Observer = crate::observation::project(plant, profile, i);
    let mut sup = Supervisor::new(i, observer);
    for row in &file.table {
        let e = plant
            .event_by_name(&row.event)
            .ok_or_else(|| SupervisorFileError::UnknownEvent(row.event.clone()))?;
        if !profile.is_controllable_by(i, e) {
            return Err(SupervisorFileError::NotControllable {
                supervisor: file.supervisor,
                event: row.event.clone(),
            });
        }
        let est = row
            .estimate
            .iter()
            .map(|s| {
                plant
                    .state_by_name(s)
                    .ok_or_else(|| SupervisorFileError::UnknownState(s.clone()))
            })
            .collect::<Result<BTreeSet<_>, _>>()?;
        let s = sup
            .observer
            .state_of(&est)
            .ok_or_else(|| SupervisorFileError::UnknownEstimate {
                supervisor: file.supervisor,
                estimate: row.estimate.clone(),
            })?;
        if sup.entry(s, e).is_some() {
            return Err(SupervisorFileError::DuplicateRow {
                supervisor: file.supervisor,
                estimate: row.estimate.clone(),
                event: row.event.clone(),
            });
        }
        sup.insert(
            s,
            e,
            DecisionEntry {
                decision: row.decision,
                case: row.case,
            },
        );
    }
    Ok(sup)
}

/// Assembles a full result from per-supervisor files and the defaults map.
pub fn resolve_result(
    problem: &Problem,
    files: &[SupervisorFile],
    defaults: &DefaultsFile,
) -> Result<SynthesisResult, SupervisorFileError> {
    let n = problem.profile.supervisors();
    let mut slots: Vec<Option<Supervisor>> = vec![None; n];
    for f in files {
        let sup = resolve_supervisor(problem, f)?;
        let k = sup.index;
        if slots[k].replace(sup).is_some() {
            return Err(SupervisorFileError::DuplicateSupervisor(f.supervisor));
        }
    }
    let supervisors = slots
        .into_iter()
        .enumerate()
        .map(|(k, s)| s.ok_or(SupervisorFileError::MissingSupervisor(k + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut map = BTreeMap::new();
    for (name, &d) in defaults {
        let e = problem
            .plant
            .event_by_name(name)
            .ok_or_else(|| SupervisorFileError::UnknownEvent(name.clone()))?;
        map.insert(e, d);
    }
    for e in problem.profile.controllable_events(&problem.plant) {
        if !map.contains_key(&e) {
            return Err(SupervisorFileError::MissingDefault(
                problem.plant.event_name(e).to_string(),
            ));
        }
    }
    Ok(SynthesisResult {
        supervisors,
        defaults: map,
    })
}

/// The on-disk form of supervisor `i` of `result`.
pub fn supervisor_file(plant: &PlantSpec, sup: &Supervisor) -> SupervisorFile {
    let table = sup
        .entries()
        .map(|(s, e, entry)| TableRow {
            estimate: estimate_names(plant, sup.observer.estimate(s)),
            event: plant.event_name(e).to_string(),
            decision: entry.decision,
            case: entry.case,
        })
        .collect();
    SupervisorFile {
        supervisor: sup.index + 1,
        table,
    }
}

pub fn defaults_file(plant: &PlantSpec, result: &SynthesisResult) -> DefaultsFile {
    result
        .defaults
        .iter()
        .map(|(&e, &d)| (plant.event_name(e).to_string(), d))
        .collect()
}

/// State names of an estimate, sorted by name.
pub fn estimate_names(plant: &PlantSpec, est: &BTreeSet<crate::automata::StateId>) -> Vec<String> {
    let mut v: Vec<String> = est.iter().map(|&q| plant.state_name(q).to_string()).collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::synthesize;
    use crate::Analysis;

    #[test]
    fn fixture_b_text() {
        let p = parse_model(fixtures::FIXTURE_B).unwrap();
        assert_eq!(p.plant.state_count(), 6);
        assert_eq!(p.plant.event_count(), 2);
        assert_eq!(p.profile.supervisors(), 2);
    }

    #[test]
    fn undefined_state_is_located() {
        let text = "supervisors 1\nevent a\nstate q0 init legal\ntrans q0 a q9\n";
        let e = parse_model(text).unwrap_err();
        assert_eq!((e.line, e.column), (4, 12));
        assert_eq!(e.kind, ParseErrorKind::Model(ModelError::UnknownState("q9".into())));
    }

    #[test]
    fn syntax_errors() {
        let cases = [
            ("event a\n", ParseErrorKind::MissingSupervisors),
            ("supervisors 1\nsupervisors 1\n", ParseErrorKind::DuplicateSupervisors),
            ("supervisors 1\nfoo\n", ParseErrorKind::UnknownDirective("foo".into())),
        ];
        for (text, kind) in cases {
            assert_eq!(parse_model(text).unwrap_err().kind, kind, "{text}");
        }
        let e = parse_model("supervisors 1\nevent a obs=3\nstate q init legal\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(matches!(
            e.kind,
            ParseErrorKind::Model(ModelError::SupervisorOutOfRange { index: 3, n: 1 })
        ));
        let e = parse_model("supervisors 4000000000\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 13));
        let e = parse_model("supervisors 1\nstate q init legal bogus\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 20));
    }

    #[test]
    fn round_trip_fixtures() {
        for (_, text) in fixtures::ALL {
            let p = parse_model(text).unwrap();
            let s = serialize_model(&p);
            let q = parse_model(&s).unwrap();
            assert_eq!(p, q);
            assert_eq!(s, serialize_model(&q));
        }
    }

    #[test]
    fn supervisor_files_round_trip() {
        let a = Analysis::new(fixtures::fixture_c());
        let r = synthesize(&a).unwrap();
        let files: Vec<SupervisorFile> = r.supervisors.iter().map(|s| supervisor_file(a.plant(), s)).collect();
        let texts: Vec<String> = files.iter().map(|f| serde_json::to_string_pretty(f).unwrap()).collect();
        let decoded: Vec<SupervisorFile> = texts.iter().map(|t| parse_supervisor(t).unwrap()).collect();
        assert_eq!(decoded, files);
        let defaults = defaults_file(a.plant(), &r);
        let back = resolve_result(a.problem(), &decoded, &defaults).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn supervisor_file_errors() {
        let p = fixtures::fixture_b();
        let bad = SupervisorFile {
            supervisor: 1,
            table: vec![TableRow {
                estimate: vec!["q0".into()],
                event: "gamma".into(),
                decision: ControlDecision::On,
                case: None,
            }],
        };
        assert!(matches!(
            resolve_supervisor(&p, &bad),
            Err(SupervisorFileError::UnknownEstimate { .. })
        ));
        assert!(parse_supervisor("{\"supervisor\": 1, \"table\": [], \"x\": 0}").is_err());
    }
}
