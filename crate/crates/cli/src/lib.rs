//! The `kbsc` command-line tool.
//!
//! Exit codes: 0 when the condition holds or the closed loop is correct, 1
//! when it does not, 2 on usage, input or parse errors.

pub mod config;
pub mod dot;
pub mod report;
pub mod simulate;

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use clap::Parser;
use kbsc_core::conditions::{check, Condition};
use kbsc_core::format::{
    defaults_file, parse_defaults, parse_model, parse_supervisor, resolve_result, supervisor_file,
};
use kbsc_core::oracle::{
    exhaustive_supervisor_search, oracle_condition, oracle_solves, random_problem, seeded_rng, table_cells,
    OracleCondition, RandomConfig, MAX_CELLS, MAX_SOLVE_DEPTH,
};
use kbsc_core::synthesis::{synthesize, verify_solution, ClosedLoopError, SynthesisError, SynthesisResult};
use kbsc_core::{Analysis, Problem};
use serde_json::{json, Value};

use config::{Cli, Command, OracleMode, OutputMode, RunConfig};
use report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULTS_FILE: &str = "defaults.json";

pub fn supervisor_file_name(k: usize) -> String {
    format!("supervisor-{k}.json")
}

/// A failure that ends the command with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<T: ToString> From<T> for UsageError {
    fn from(e: T) -> Self {
        UsageError(e.to_string())
    }
}

type Outcome = Result<i32, UsageError>;

struct Io<'a> {
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let mut io = Io { input, out };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Outcome {
    match command {
        Command::Check { file, condition, json } => {
            let cfg = RunConfig::for_check(condition, json)?;
            cmd_check(&load_model(&file)?, cfg, io)
        }
        Command::Synthesize { file, output, json } => {
            cmd_synthesize(&load_model(&file)?, &output, OutputMode::from_flag(json), io)
        }
        Command::Verify {
            file,
            supervisors,
            depth,
            json,
        } => {
            let cfg = RunConfig::for_verify(depth, json)?;
            let problem = load_model(&file)?;
            let result = load_supervisors(&problem, &supervisors)?;
            cmd_verify(&problem, &result, cfg, io)
        }
        Command::Simulate { file, supervisors } => {
            let problem = load_model(&file)?;
            let analysis = Analysis::new(problem.clone());
            let result = match supervisors {
                Some(dir) => Some(load_supervisors(&problem, &dir)?),
                None => match synthesize(&analysis) {
                    Ok(r) => Some(r),
                    Err(e) => {
                        writeln!(
                            io.out,
                            "note: {}; decisions follow the knowledge-based policy",
                            synthesis_error_text(&analysis, &e)
                        )?;
                        None
                    }
                },
            };
            let mut sim = simulate::Simulator::new(&analysis, result.as_ref());
            sim.run(io.input, io.out)?;
            Ok(EXIT_OK)
        }
        Command::ExportDot { file, composite } => {
            let a = Analysis::new(load_model(&file)?);
            let text = if composite {
                dot::composite_dot(&a)
            } else {
                dot::plant_dot(&a)
            };
            write!(io.out, "{text}")?;
            Ok(EXIT_OK)
        }
        Command::Oracle {
            file,
            mode,
            condition,
            supervisors,
            depth,
            seed,
            count,
            json,
        } => {
            let cfg = RunConfig::for_oracle(
                file.is_some(),
                mode,
                condition,
                supervisors.is_some(),
                depth,
                seed,
                count,
                json,
            )?;
            match file {
                Some(file) => {
                    let problem = load_model(&file)?;
                    let stored = match &supervisors {
                        Some(dir) => Some(load_supervisors(&problem, dir)?),
                        None => None,
                    };
                    cmd_oracle_file(&problem, stored, mode, cfg, io)
                }
                None => cmd_oracle_random(mode, cfg, io),
            }
        }
    }
}

pub fn load_model(path: &Path) -> Result<Problem, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Reads `supervisor-*.json` and `defaults.json` from `dir`.
pub fn load_supervisors(problem: &Problem, dir: &Path) -> Result<SynthesisResult, UsageError> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())));
    let mut files = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| UsageError(format!("{}: {e}", dir.display())))?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("supervisor-") && n.ends_with(".json"))
        })
        .collect();
    entries.sort();
    for p in entries {
        let f = parse_supervisor(&read(&p)?).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
        files.push(f);
    }
    let dp = dir.join(DEFAULTS_FILE);
    let defaults = parse_defaults(&read(&dp)?).map_err(|e| UsageError(format!("{}: {e}", dp.display())))?;
    resolve_result(problem, &files, &defaults).map_err(|e| UsageError(format!("{}: {e}", dir.display())))
}

fn emit(io: &mut Io<'_>, mode: OutputMode, value: Value, text: String) -> Result<(), UsageError> {
    match mode {
        OutputMode::Json => writeln!(io.out, "{}", serde_json::to_string_pretty(&value)?)?,
        OutputMode::Text => writeln!(io.out, "{text}")?,
    }
    Ok(())
}

fn code(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cmd_check(problem: &Problem, cfg: RunConfig, io: &mut Io<'_>) -> Outcome {
    let a = Analysis::new(problem.clone());
    let v = check(a.frame(), cfg.condition);
    emit(
        io,
        cfg.output,
        verdict_json(&a, cfg.condition, &v),
        verdict_text(&a, cfg.condition, &v),
    )?;
    Ok(code(v.holds))
}

fn synthesis_failure(a: &Analysis, e: &SynthesisError) -> (Value, String) {
    let (condition, cx) = match e {
        SynthesisError::NotControllable(cx) => (Condition::Controllability, Some(cx)),
        SynthesisError::NotInferenceObservable(cx) => (Condition::Extended, Some(cx)),
        SynthesisError::PolicyAmbiguity { .. } => (Condition::Extended, None),
    };
    let value = json!({
        "holds": false,
        "condition": condition.to_string(),
        "error": synthesis_error_text(a, e),
        "counterexample": cx.map(|cx| counterexample_json(a, cx)),
        "defaults": {},
        "supervisors": [],
    });
    let mut text = format!("synthesis failed: {}", synthesis_error_text(a, e));
    if let Some(cx) = cx {
        text.push('\n');
        text.push_str(&counterexample_text(a, cx));
    }
    (value, text)
}

fn synthesis_error_text(a: &Analysis, e: &SynthesisError) -> String {
    match e {
        SynthesisError::PolicyAmbiguity {
            supervisor,
            event,
            first,
            second,
            ..
        } => format!(
            "supervisor {} decides {} differently at {} and {}",
            supervisor + 1,
            a.plant().event_name(*event),
            label_text(&kbsc_core::explain::world_label(a, *first)),
            label_text(&kbsc_core::explain::world_label(a, *second)),
        ),
        other => other.to_string(),
    }
}

fn cmd_synthesize(problem: &Problem, dir: &Path, mode: OutputMode, io: &mut Io<'_>) -> Outcome {
    let a = Analysis::new(problem.clone());
    let r = match synthesize(&a) {
        Ok(r) => r,
        Err(e) => {
            let (value, text) = synthesis_failure(&a, &e);
            emit(io, mode, value, text)?;
            return Ok(EXIT_FAIL);
        }
    };
    fs::create_dir_all(dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for s in &r.supervisors {
        let f = supervisor_file(a.plant(), s);
        let path = dir.join(supervisor_file_name(f.supervisor));
        fs::write(&path, serde_json::to_string_pretty(&f)? + "\n")
            .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        written.push(path.display().to_string());
    }
    let path = dir.join(DEFAULTS_FILE);
    fs::write(
        &path,
        serde_json::to_string_pretty(&defaults_file(a.plant(), &r))? + "\n",
    )
    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    written.push(path.display().to_string());
    let mut value = result_json(a.plant(), &r);
    value["holds"] = json!(true);
    value["files"] = json!(written);
    let text = format!("{}\nwrote {}", result_text(a.plant(), &r), written.join(", "));
    emit(io, mode, value, text)?;
    Ok(EXIT_OK)
}

fn default_depth(problem: &Problem) -> usize {
    (problem.plant.state_count() + 1).min(MAX_SOLVE_DEPTH)
}

fn closed_loop_error_text(problem: &Problem, e: &ClosedLoopError) -> String {
    let plant = &problem.plant;
    match e {
        ClosedLoopError::MissingEntry { supervisor, event, .. } => {
            format!(
                "supervisor {} has no decision for {} at some reachable estimate",
                supervisor + 1,
                plant.event_name(*event)
            )
        }
        ClosedLoopError::MissingDefault(ev) => format!("no default for {}", plant.event_name(*ev)),
        ClosedLoopError::Fusion { error, string, event } => {
            format!(
                "{error} on {} after {}",
                plant.event_name(*event),
                word_text(plant, string)
            )
        }
        other => other.to_string(),
    }
}

fn cmd_verify(problem: &Problem, r: &SynthesisResult, cfg: RunConfig, io: &mut Io<'_>) -> Outcome {
    let depth = cfg.depth.unwrap_or_else(|| default_depth(problem));
    let eq = verify_solution(&problem.plant, &problem.profile, r);
    let oracle = oracle_solves(&problem.plant, &problem.profile, r, depth);
    let mut lines = Vec::new();
    let mut value = json!({"depth": depth});
    let equal = match &eq {
        Ok(eq) => {
            lines.push(format!("closed loop vs legal language: {eq}"));
            value["closed_loop"] = equivalence_json(eq);
            eq.is_equal()
        }
        Err(e) => {
            let msg = closed_loop_error_text(problem, e);
            lines.push(format!("closed loop: {msg}"));
            value["closed_loop"] = json!({"equal": false, "error": msg});
            false
        }
    };
    let clean = match &oracle {
        Ok(None) => {
            lines.push(format!("oracle (depth {depth}): no violation"));
            value["oracle"] = json!({"violation": null});
            true
        }
        Ok(Some(v)) => {
            lines.push(format!("oracle (depth {depth}): {}", violation_text(&problem.plant, v)));
            value["oracle"] = json!({"violation": violation_json(&problem.plant, v)});
            false
        }
        Err(e) => {
            lines.push(format!("oracle (depth {depth}): {e}"));
            value["oracle"] = json!({"error": e.to_string()});
            false
        }
    };
    value["holds"] = json!(equal && clean);
    emit(io, cfg.output, value, lines.join("\n"))?;
    Ok(code(equal && clean))
}

fn oracle_kind(c: Condition) -> OracleCondition {
    match c {
        Condition::Controllability => OracleCondition::Controllability,
        Condition::Extended => OracleCondition::Extended,
        Condition::Corrected(s) => OracleCondition::Corrected(s),
        Condition::Legacy(o) => OracleCondition::Legacy(o),
        Condition::Coobservability(v) => OracleCondition::Coobservability(v),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

/// One oracle run: (oracle verdict, checker verdict, JSON, text).
fn oracle_once(
    problem: &Problem,
    stored: Option<SynthesisResult>,
    mode: OracleMode,
    cfg: RunConfig,
) -> Result<(bool, bool, Value, String), UsageError> {
    let a = Analysis::new(problem.clone());
    match mode {
        OracleMode::Condition => {
            let oracle = oracle_condition(problem, oracle_kind(cfg.condition))?;
            let checker = check(a.frame(), cfg.condition).holds;
            let value = json!({"condition": cfg.condition.to_string(), "oracle": oracle, "checker": checker});
            let text = format!(
                "{}: oracle {}, checker {}",
                cfg.condition,
                yes_no(oracle),
                yes_no(checker)
            );
            Ok((oracle, checker, value, text))
        }
        OracleMode::Solve => {
            let checker =
                check(a.frame(), Condition::Controllability).holds && check(a.frame(), Condition::Extended).holds;
            let r = match stored {
                Some(r) => r,
                None => match synthesize(&a) {
                    Ok(r) => r,
                    Err(e) => {
                        let msg = synthesis_error_text(&a, &e);
                        let value = json!({"oracle": false, "checker": checker, "error": msg});
                        return Ok((false, checker, value, format!("no supervisors to check: {msg}")));
                    }
                },
            };
            let depth = cfg.depth.unwrap_or_else(|| default_depth(problem));
            let v = oracle_solves(&problem.plant, &problem.profile, &r, depth)?;
            let ok = v.is_none();
            let value = json!({
                "depth": depth,
                "oracle": ok,
                "checker": checker,
                "violation": v.as_ref().map(|v| violation_json(&problem.plant, v)),
            });
            let text = match &v {
                None => format!("supervisors solve the problem up to depth {depth}"),
                Some(v) => format!("violation up to depth {depth}: {}", violation_text(&problem.plant, v)),
            };
            Ok((ok, checker, value, text))
        }
        OracleMode::Search => {
            let checker =
                check(a.frame(), Condition::Controllability).holds && check(a.frame(), Condition::Extended).holds;
            let o = exhaustive_supervisor_search(problem, cfg.depth)?;
            let mut value = json!({
                "depth": o.depth,
                "oracle": o.exists,
                "checker": checker,
                "cells": table_cells(problem),
            });
            let mut text = format!(
                "exhaustive search (depth {}): {}; checker {}",
                o.depth,
                if o.exists { "a solution exists" } else { "no solution" },
                yes_no(checker)
            );
            if let Some(w) = &o.witness {
                value["witness"] = result_json(&problem.plant, w);
                text.push('\n');
                text.push_str(&result_text(&problem.plant, w));
            }
            Ok((o.exists, checker, value, text))
        }
    }
}

fn cmd_oracle_file(
    problem: &Problem,
    stored: Option<SynthesisResult>,
    mode: OracleMode,
    cfg: RunConfig,
    io: &mut Io<'_>,
) -> Outcome {
    let solve_with_stored = stored.is_some();
    let (oracle, checker, mut value, mut text) = oracle_once(problem, stored, mode, cfg)?;
    // stored tables may be wrong even when the problem is solvable
    let agree = solve_with_stored || oracle == checker;
    value["agree"] = json!(agree);
    value["holds"] = json!(oracle && agree);
    if !agree {
        text.push_str("\nDISAGREEMENT between oracle and checker");
    }
    emit(io, cfg.output, value, text)?;
    Ok(code(oracle && agree))
}

fn cmd_oracle_random(mode: OracleMode, cfg: RunConfig, io: &mut Io<'_>) -> Outcome {
    let first = cfg.seed.expect("validated");
    let random = match mode {
        OracleMode::Search => RandomConfig {
            max_states: 4,
            max_events: 2,
            ..RandomConfig::default()
        },
        _ => RandomConfig::default(),
    };
    let mut runs = Vec::new();
    let mut lines = Vec::new();
    let (mut disagreements, mut skipped) = (0, 0);
    for seed in first..first.saturating_add(cfg.count as u64) {
        let problem = random_problem(&mut seeded_rng(seed), random);
        if mode == OracleMode::Search && table_cells(&problem) > MAX_CELLS {
            skipped += 1;
            lines.push(format!("seed {seed}: skipped, more than {MAX_CELLS} table cells"));
            runs.push(json!({"seed": seed, "skipped": true}));
            continue;
        }
        let (oracle, checker, mut value, text) = match oracle_once(&problem, None, mode, cfg) {
            Ok(x) => x,
            Err(UsageError(msg)) => {
                skipped += 1;
                lines.push(format!("seed {seed}: skipped, {msg}"));
                runs.push(json!({"seed": seed, "skipped": true, "error": msg}));
                continue;
            }
        };
        let agree = oracle == checker;
        disagreements += usize::from(!agree);
        value["seed"] = json!(seed);
        value["agree"] = json!(agree);
        runs.push(value);
        let mark = if agree { "" } else { "  DISAGREEMENT" };
        lines.push(format!("seed {seed}: {}{mark}", text.lines().next().unwrap_or("")));
    }
    lines.push(format!(
        "{} instances, {skipped} skipped, {disagreements} disagreements",
        cfg.count
    ));
    let value = json!({
        "instances": cfg.count,
        "skipped": skipped,
        "disagreements": disagreements,
        "holds": disagreements == 0,
        "runs": runs,
    });
    emit(io, cfg.output, value, lines.join("\n"))?;
    Ok(code(disagreements == 0))
}
