//! The event-stepping REPL.

use std::io::{self, BufRead, Write};

use kbsc_core::automata::{EventId, Word};
use kbsc_core::explain::{explain, world_label, Explanation, Gate};
use kbsc_core::fusion::{ControlDecision, FusedDecision};
use kbsc_core::observation::WorldId;
use kbsc_core::synthesis::SynthesisResult;
use kbsc_core::Analysis;

use crate::report::{label_text, word_text};

const HELP: &str = "commands: events, step <event>, why <event>, estimates, reset, help, quit";

pub struct Simulator<'a> {
    analysis: &'a Analysis,
    result: Option<&'a SynthesisResult>,
    world: WorldId,
    string: Word,
}

/// What the closed loop does with an event at the current world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gating {
    NotPossible,
    Enabled,
    Disabled(String),
}

impl<'a> Simulator<'a> {
    pub fn new(analysis: &'a Analysis, result: Option<&'a SynthesisResult>) -> Self {
        Simulator {
            analysis,
            result,
            world: analysis.composite().initial(),
            string: Word::new(),
        }
    }

    pub fn world(&self) -> WorldId {
        self.world
    }

    pub fn string(&self) -> &Word {
        &self.string
    }

    pub fn explain(&self, e: EventId) -> Explanation {
        explain(self.analysis, self.result, self.world, e)
    }

    pub fn gating(&self, e: EventId) -> Gating {
        let x = self.explain(e);
        if !x.possible {
            return Gating::NotPossible;
        }
        match &x.gate {
            Gate::Uncontrollable => Gating::Enabled,
            Gate::Controlled {
                supervisors,
                default,
                fused,
                ..
            } => {
                let votes = |pick: &[ControlDecision]| -> Vec<String> {
                    supervisors
                        .iter()
                        .filter_map(|s| match s.decision {
                            Some(d) if pick.contains(&d) => Some(format!("supervisor {} ({d})", s.supervisor + 1)),
                            _ => None,
                        })
                        .collect()
                };
                match fused {
                    Some(Ok(FusedDecision::Enable)) => Gating::Enabled,
                    Some(Ok(FusedDecision::Disable)) => {
                        let by = votes(&[ControlDecision::Off]);
                        let by = if by.is_empty() {
                            votes(&[ControlDecision::Woff])
                        } else {
                            by
                        };
                        if by.is_empty() {
                            Gating::Disabled(format!(
                                "all supervisors abstain and the default is {}",
                                default.map_or("unset".into(), |d| d.to_string())
                            ))
                        } else {
                            Gating::Disabled(format!("disabled by {}", by.join(", ")))
                        }
                    }
                    Some(Err(err)) => {
                        let by = votes(&[
                            ControlDecision::On,
                            ControlDecision::Off,
                            ControlDecision::Won,
                            ControlDecision::Woff,
                        ]);
                        Gating::Disabled(format!("{err}: {}", by.join(", ")))
                    }
                    None => {
                        let missing: Vec<String> = supervisors
                            .iter()
                            .filter(|s| s.decision.is_none())
                            .map(|s| format!("supervisor {}", s.supervisor + 1))
                            .collect();
                        if missing.is_empty() {
                            Gating::Disabled("no default decision is defined".into())
                        } else {
                            Gating::Disabled(format!("no decision from {}", missing.join(", ")))
                        }
                    }
                }
            }
        }
    }

    /// Takes `e` when the closed loop allows it.
    pub fn step(&mut self, e: EventId) -> Result<(), String> {
        let name = self.analysis.plant().event_name(e).to_string();
        match self.gating(e) {
            Gating::NotPossible => Err(format!("{name} is not possible here")),
            Gating::Disabled(why) => Err(format!("{name} is disabled: {why}")),
            Gating::Enabled => {
                self.world = self
                    .analysis
                    .composite()
                    .step(self.world, e)
                    .expect("possible events step");
                self.string.push(e);
                Ok(())
            }
        }
    }

    pub fn reset(&mut self) {
        self.world = self.analysis.composite().initial();
        self.string.clear();
    }

    fn status(&self) -> String {
        let legal = if self.analysis.frame().is_legal(self.world) {
            "legal"
        } else {
            "illegal"
        };
        format!(
            "at {} after {} [{legal}]",
            label_text(&world_label(self.analysis, self.world)),
            word_text(self.analysis.plant(), &self.string)
        )
    }

    fn event_arg(&self, arg: Option<&str>) -> Result<EventId, String> {
        let name = arg.ok_or("missing event name")?;
        self.analysis
            .plant()
            .event_by_name(name)
            .ok_or_else(|| format!("unknown event `{name}`"))
    }

    /// Runs one command line; `Ok(false)` asks to quit.
    pub fn command(&mut self, line: &str, out: &mut dyn Write) -> io::Result<bool> {
        let mut words = line.split_whitespace();
        let Some(cmd) = words.next() else { return Ok(true) };
        let arg = words.next();
        let plant = self.analysis.plant();
        match cmd {
            "quit" | "exit" => return Ok(false),
            "help" => writeln!(out, "{HELP}")?,
            "reset" => {
                self.reset();
                writeln!(out, "{}", self.status())?;
            }
            "estimates" => {
                let label = world_label(self.analysis, self.world);
                writeln!(out, "plant: {}", label[0])?;
                for (i, est) in label[1..].iter().enumerate() {
                    writeln!(out, "supervisor {}: {est}", i + 1)?;
                }
            }
            "events" => {
                for &e in plant.events_by_name() {
                    let status = match self.gating(e) {
                        Gating::NotPossible => "not possible".to_string(),
                        Gating::Enabled => "enabled".to_string(),
                        Gating::Disabled(why) => format!("disabled ({why})"),
                    };
                    writeln!(out, "{}: {status}", plant.event_name(e))?;
                }
            }
            "step" => match self.event_arg(arg).and_then(|e| self.step(e)) {
                Ok(()) => writeln!(out, "{}", self.status())?,
                Err(msg) => writeln!(out, "refused: {msg}")?,
            },
            "why" => match self.event_arg(arg) {
                Ok(e) => write!(out, "{}", self.explain(e))?,
                Err(msg) => writeln!(out, "error: {msg}")?,
            },
            other => writeln!(out, "unknown command `{other}`; {HELP}")?,
        }
        Ok(true)
    }

    pub fn run(&mut self, input: &mut dyn BufRead, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.status())?;
        writeln!(out, "{HELP}")?;
        let mut line = String::new();
        loop {
            write!(out, "> ")?;
            out.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                return Ok(());
            }
            if !self.command(&line, out)? {
                return Ok(());
            }
        }
    }
}
