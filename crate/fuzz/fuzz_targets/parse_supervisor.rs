#![no_main]

use kbsc_core::fixtures;
use kbsc_core::format::{parse_defaults, parse_supervisor, resolve_supervisor, supervisor_file};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_defaults(text);
    let Ok(file) = parse_supervisor(text) else { return };
    let problem = fixtures::fixture_c();
    if let Ok(sup) = resolve_supervisor(&problem, &file) {
        let back = supervisor_file(&problem.plant, &sup);
        assert_eq!(back.supervisor, file.supervisor);
        assert_eq!(back.table.len(), file.table.len());
    }
});
