use crate::error::{Error, Result};

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
pub(crate) fn real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub(crate) fn parse_real(field: &str, line: u64, column: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::malformed(line, format!("{column}: `{field}` is not a finite number")))
}

pub(crate) fn parse_count(field: &str, line: u64, column: &str) -> Result<u64> {
    field
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::malformed(line, format!("{column}: `{field}` is not a count")))
}
