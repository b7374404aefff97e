//! Small helpers shared by the TSV writers.

use std::borrow::Cow;

/// Replaces the characters that would break a TSV record.
pub(crate) fn field(s: &str) -> Cow<'_, str> {
    if s.contains(['\t', '\n', '\r']) {
        Cow::Owned(s.replace(['\t', '\n', '\r'], " "))
    } else {
        Cow::Borrowed(s)
    }
}

/// Formats a real for reports: fixed six decimals, no negative zero.
pub(crate) fn real(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Formats a band bound: integral values without decimals, `inf` for unbounded.
pub(crate) fn bound(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}
