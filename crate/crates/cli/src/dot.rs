//! DOT export of the plant and of the composite.

use std::fmt::Write;

use kbsc_core::explain::world_label;
use kbsc_core::Analysis;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// The plant; legal states get a double border and illegal transitions are
/// dashed.
pub fn plant_dot(a: &Analysis) -> String {
    let plant = a.plant();
    let mut out = String::from("digraph plant {\n  rankdir=LR;\n  node [shape=circle];\n  __start [shape=point];\n");
    for q in plant.states() {
        let name = quote(plant.state_name(q));
        let shape = if plant.is_legal(q) { "doublecircle" } else { "circle" };
        writeln!(out, "  {name} [shape={shape}];").unwrap();
    }
    writeln!(out, "  __start -> {};", quote(plant.state_name(plant.initial()))).unwrap();
    for (q, e, t) in plant.transitions() {
        let style = if t.legal { "" } else { ", style=dashed" };
        writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            quote(plant.state_name(q)),
            quote(plant.state_name(t.target)),
            quote(plant.event_name(e))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// The composite; each world shows the plant state and then every estimate,
/// one per line.
pub fn composite_dot(a: &Analysis) -> String {
    let plant = a.plant();
    let comp = a.composite();
    let mut out = String::from("digraph composite {\n  rankdir=LR;\n  node [shape=box];\n  __start [shape=point];\n");
    for w in comp.world_ids() {
        let parts: Vec<String> = world_label(a, w).iter().map(|p| escape(p)).collect();
        let label = parts.join("\\n");
        let peripheries = if a.frame().is_legal(w) { 2 } else { 1 };
        writeln!(out, "  w{} [label=\"{label}\", peripheries={peripheries}];", w.0).unwrap();
    }
    writeln!(out, "  __start -> w{};", comp.initial().0).unwrap();
    for w in comp.world_ids() {
        let q = comp.world(w).plant;
        for e in plant.events() {
            let Some(v) = comp.step(w, e) else { continue };
            let legal = plant.transition(q, e).is_some_and(|t| t.legal);
            let style = if legal { "" } else { ", style=dashed" };
            writeln!(
                out,
                "  w{} -> w{} [label={}{style}];",
                w.0,
                v.0,
                quote(plant.event_name(e))
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}
