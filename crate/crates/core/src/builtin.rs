//! Compiled-in example groups.

use crate::automata::{parse_group, AutomatonGroup};

pub const GRIGORCHUK: &str = "\
group grigorchuk
alphabet 2
state a perm 1 0 -> id id
state b perm 0 1 -> a c
state c perm 0 1 -> a d
state d perm 0 1 -> id b
";

/// Binary adding machine: a(0w) = 1w, a(1w) = 0a(w).
pub const ODOMETER: &str = "\
group odometer
alphabet 2
state a perm 1 0 -> id a
";

pub const GUPTA_SIDKI_3: &str = "\
group gupta_sidki_3
alphabet 3
state a perm 1 2 0 -> id id id
state A perm 2 0 1 -> id id id
state t perm 0 1 2 -> a A t
";

/// The two-element group generated by the letter swap on every level.
pub const REFLECTION: &str = "\
group reflection
alphabet 2
state a perm 1 0 -> a a
";

pub const TRIVIAL: &str = "\
group trivial
alphabet 2
state e perm 0 1 -> e e
";

pub const NAMES: [&str; 5] = [
    "grigorchuk",
    "odometer",
    "gupta_sidki_3",
    "reflection",
    "trivial",
];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "grigorchuk" => Some(GRIGORCHUK),
        "odometer" => Some(ODOMETER),
        "gupta_sidki_3" => Some(GUPTA_SIDKI_3),
        "reflection" => Some(REFLECTION),
        "trivial" => Some(TRIVIAL),
        _ => None,
    }
}

pub fn by_name(name: &str) -> Option<AutomatonGroup> {
    source(name).map(|s| parse_group(s).expect("built-in group parses"))
}

pub fn grigorchuk() -> AutomatonGroup {
    parse_group(GRIGORCHUK).expect("built-in group parses")
}

pub fn odometer() -> AutomatonGroup {
    parse_group(ODOMETER).expect("built-in group parses")
}

pub fn gupta_sidki_3() -> AutomatonGroup {
    parse_group(GUPTA_SIDKI_3).expect("built-in group parses")
}

pub fn reflection() -> AutomatonGroup {
    parse_group(REFLECTION).expect("built-in group parses")
}

pub fn trivial() -> AutomatonGroup {
    parse_group(TRIVIAL).expect("built-in group parses")
}

pub fn all() -> Vec<AutomatonGroup> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}
