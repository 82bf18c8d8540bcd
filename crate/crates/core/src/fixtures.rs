//! The example models shipped in `models/`.

use crate::format::parse_model;
use crate::Problem;

pub const FIXTURE_B: &str = include_str!("../../../models/fixture-b.des");
pub const FIXTURE_B_UNCONTROLLABLE_EXIT: &str = include_str!("../../../models/fixture-b-uncontrollable-exit.des");
pub const FIXTURE_C: &str = include_str!("../../../models/fixture-c.des");
pub const FIXTURE_C_MIRRORED: &str = include_str!("../../../models/fixture-c-mirrored.des");
pub const SYMMETRIC_DIAMOND: &str = include_str!("../../../models/symmetric-diamond.des");
pub const BLIND_CHAIN: &str = include_str!("../../../models/blind-chain.des");

/// Every shipped model with its file stem.
pub const ALL: [(&str, &str); 6] = [
    ("fixture-b", FIXTURE_B),
    ("fixture-b-uncontrollable-exit", FIXTURE_B_UNCONTROLLABLE_EXIT),
    ("fixture-c", FIXTURE_C),
    ("fixture-c-mirrored", FIXTURE_C_MIRRORED),
    ("symmetric-diamond", SYMMETRIC_DIAMOND),
    ("blind-chain", BLIND_CHAIN),
];

fn load(text: &str) -> Problem {
    parse_model(text).expect("shipped model is valid")
}

pub fn fixture_b() -> Problem {
    load(FIXTURE_B)
}

pub fn fixture_b_uncontrollable_exit() -> Problem {
    load(FIXTURE_B_UNCONTROLLABLE_EXIT)
}

pub fn fixture_c() -> Problem {
    load(FIXTURE_C)
}

pub fn fixture_c_mirrored() -> Problem {
    load(FIXTURE_C_MIRRORED)
}

pub fn symmetric_diamond() -> Problem {
    load(SYMMETRIC_DIAMOND)
}

pub fn blind_chain() -> Problem {
    load(BLIND_CHAIN)
}
