//! Text and JSON renderings of verdicts, tables and oracle findings.

use kbsc_core::automata::{Equivalence, PlantSpec, Word};
use kbsc_core::conditions::{Condition, Counterexample, Verdict, Witness};
use kbsc_core::explain::world_label;
use kbsc_core::format::{defaults_file, supervisor_file};
use kbsc_core::fusion::FusedDecision;
use kbsc_core::oracle::Violation;
use kbsc_core::synthesis::SynthesisResult;
use kbsc_core::Analysis;
use serde_json::{json, Value};

pub fn string_text(names: &[String]) -> String {
    if names.is_empty() {
        "ε".to_string()
    } else {
        names.join(" ")
    }
}

pub fn word_text(plant: &PlantSpec, w: &Word) -> String {
    string_text(&plant.word_names(w))
}

pub fn label_text(label: &[String]) -> String {
    format!("({})", label.join(" | "))
}

fn witness_json(a: &Analysis, w: &Witness) -> Value {
    json!({
        "world": world_label(a, w.world),
        "string": a.plant().word_names(&w.string),
    })
}

pub fn counterexample_json(a: &Analysis, cx: &Counterexample) -> Value {
    let conflict = cx.conflict.as_ref().map(|c| {
        json!({
            "needs_enable": witness_json(a, &c.needs_enable),
            "needs_disable": witness_json(a, &c.needs_disable),
        })
    });
    json!({
        "event": a.plant().event_name(cx.event),
        "string": a.plant().word_names(&cx.string),
        "world": world_label(a, cx.world),
        "conflict": conflict,
    })
}

pub fn defaults_json(
    a: &Analysis,
    defaults: &std::collections::BTreeMap<kbsc_core::automata::EventId, FusedDecision>,
) -> Value {
    let map: serde_json::Map<String, Value> = defaults
        .iter()
        .map(|(&e, d)| (a.plant().event_name(e).to_string(), json!(d.as_str())))
        .collect();
    Value::Object(map)
}

pub fn verdict_json(a: &Analysis, condition: Condition, v: &Verdict) -> Value {
    json!({
        "condition": condition.to_string(),
        "holds": v.holds,
        "defaults": defaults_json(a, &v.defaults),
        "counterexample": v.counterexample.as_ref().map(|cx| counterexample_json(a, cx)),
    })
}

pub fn counterexample_text(a: &Analysis, cx: &Counterexample) -> String {
    let plant = a.plant();
    let mut s = format!(
        "counterexample: {} at {} after {}",
        plant.event_name(cx.event),
        label_text(&world_label(a, cx.world)),
        word_text(plant, &cx.string)
    );
    if let Some(c) = &cx.conflict {
        s.push_str(&format!(
            "\n  must enable at {} after {}\n  must disable at {} after {}",
            label_text(&world_label(a, c.needs_enable.world)),
            word_text(plant, &c.needs_enable.string),
            label_text(&world_label(a, c.needs_disable.world)),
            word_text(plant, &c.needs_disable.string),
        ));
    }
    s
}

pub fn defaults_text(
    a: &Analysis,
    defaults: &std::collections::BTreeMap<kbsc_core::automata::EventId, FusedDecision>,
) -> String {
    if defaults.is_empty() {
        return "defaults: none".to_string();
    }
    let parts: Vec<String> = defaults
        .iter()
        .map(|(&e, d)| format!("{}={d}", a.plant().event_name(e)))
        .collect();
    format!("defaults: {}", parts.join(", "))
}

pub fn verdict_text(a: &Analysis, condition: Condition, v: &Verdict) -> String {
    let mut lines = vec![
        format!("condition: {condition}"),
        format!("holds: {}", if v.holds { "yes" } else { "no" }),
    ];
    if v.holds && condition != Condition::Controllability {
        lines.push(defaults_text(a, &v.defaults));
    }
    if let Some(cx) = &v.counterexample {
        lines.push(counterexample_text(a, cx));
    }
    lines.join("\n")
}

pub fn result_json(plant: &PlantSpec, r: &SynthesisResult) -> Value {
    let supervisors: Vec<Value> = r
        .supervisors
        .iter()
        .map(|s| serde_json::to_value(supervisor_file(plant, s)).expect("tables serialize"))
        .collect();
    json!({
        "defaults": serde_json::to_value(defaults_file(plant, r)).expect("defaults serialize"),
        "supervisors": supervisors,
    })
}

pub fn result_text(plant: &PlantSpec, r: &SynthesisResult) -> String {
    let mut out = Vec::new();
    for s in &r.supervisors {
        let f = supervisor_file(plant, s);
        out.push(format!("supervisor {}:", f.supervisor));
        for row in f.table {
            let case = row.case.map(|c| format!(" ({c})")).unwrap_or_default();
            out.push(format!(
                "  {{{}}} {}: {}{case}",
                row.estimate.join(","),
                row.event,
                row.decision
            ));
        }
    }
    let d = defaults_file(plant, r);
    let parts: Vec<String> = d.iter().map(|(e, x)| format!("{e}={x}")).collect();
    out.push(format!(
        "defaults: {}",
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(", ")
        }
    ));
    out.join("\n")
}

pub fn equivalence_json(eq: &Equivalence) -> Value {
    match eq {
        Equivalence::Equal => json!({"equal": true, "counterexample": null}),
        Equivalence::Counterexample(w) => json!({"equal": false, "counterexample": w}),
    }
}

pub fn violation_json(plant: &PlantSpec, v: &Violation) -> Value {
    json!({
        "string": plant.word_names(&v.string),
        "event": plant.event_name(v.event),
        "obligation": v.obligation.to_string(),
        "fusion_error": v.fusion.as_ref().map(|e| e.to_string()),
    })
}

pub fn violation_text(plant: &PlantSpec, v: &Violation) -> String {
    let mut s = format!(
        "{} after {}: {}",
        plant.event_name(v.event),
        word_text(plant, &v.string),
        v.obligation
    );
    if let Some(e) = &v.fusion {
        s.push_str(&format!(" ({e})"));
    }
    s
}
