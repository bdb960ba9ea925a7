use super::pointed::{parse_pointed, pointed};
use super::schema::load;
use super::FusionData;
use crate::error::{Error, Result};

const TRIVIAL: &str = include_str!("../../fixtures/trivial.json");
const FIBONACCI: &str = include_str!("../../fixtures/fibonacci.json");
const ISING: &str = include_str!("../../fixtures/ising.json");

pub const BUILTIN_NAMES: &[&str] = &["trivial", "fib", "ising", "pointed:<orders>:<bichar>"];

/// Embedded fixture categories: `trivial`, `fib`, `ising`, and
/// `pointed:<orders>:<bichar>` (see [`parse_pointed`]).
pub fn builtin(name: &str) -> Result<FusionData> {
    match name {
        "trivial" => load(TRIVIAL),
        "fib" | "fibonacci" => load(FIBONACCI),
        "ising" => load(ISING),
        other => match other.strip_prefix("pointed:") {
            Some(rest) => pointed(&parse_pointed(rest)?),
            None => Err(Error::Schema(format!(
                "unknown builtin `{other}` (expected one of {})",
                BUILTIN_NAMES.join(", ")
            ))),
        },
    }
}

/// Raw JSON text of a named explicit fixture.
pub fn builtin_document(name: &str) -> Option<&'static str> {
    match name {
        "trivial" => Some(TRIVIAL),
        "fib" | "fibonacci" => Some(FIBONACCI),
        "ising" => Some(ISING),
        _ => None,
    }
}
