//! Bundled input documents.

use crate::io::{parse_input, Input, InputError};

/// Four lines in general position, rank-one system with monodromy `-1`
/// around each.
pub const FOUR_LINES: &str = include_str!("../fixtures/four_lines.json");

/// Six-cuspidal sextic with cusps on a conic; monodromy `ζ_6` around each
/// of the six points.
pub const ZARISKI_C: &str = include_str!("../fixtures/zariski_c.json");

/// Six-cuspidal sextic with cusps not on a conic; same local monodromy.
pub const ZARISKI_CPRIME: &str = include_str!("../fixtures/zariski_cprime.json");

/// The tuple `(ζ_6^4, ζ_6^4, ζ_6^4)` with the single braid `b1`; the output
/// is the scalar `ζ_6`.
pub const SCALAR_SIX: &str = include_str!("../fixtures/scalar_six.json");

pub const ALL: [(&str, &str); 4] = [
    ("four_lines", FOUR_LINES),
    ("zariski_c", ZARISKI_C),
    ("zariski_cprime", ZARISKI_CPRIME),
    ("scalar_six", SCALAR_SIX),
];

/// Parse a bundled fixture by name.
pub fn load(name: &str) -> Option<Result<Input, InputError>> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_input(text))
}
