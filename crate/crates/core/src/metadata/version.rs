//! Debian version ordering.
//!
//! A version string is `[epoch:]upstream[-revision]`. The epoch compares
//! numerically; upstream and revision compare with the `verrevcmp` rules
//! used by dpkg, where `~` sorts before everything including the end of
//! the string. Strings that dpkg would reject (empty epoch, non-numeric
//! epoch, missing upstream) still get a defined position: a malformed
//! epoch is read as part of the upstream version.

use core::cmp::Ordering;

struct Parts<'a> {
    epoch: &'a str,
    upstream: &'a str,
    revision: &'a str,
}

impl<'a> Parts<'a> {
    fn split(version: &'a str) -> Self {
        let (epoch, rest) = match version.find(':') {
            Some(pos) if pos > 0 && version[..pos].bytes().all(|b| b.is_ascii_digit()) => {
                (&version[..pos], &version[pos + 1..])
            }
            _ => ("0", version),
        };
        let (upstream, revision) = match rest.rfind('-') {
            Some(pos) => (&rest[..pos], &rest[pos + 1..]),
            None => (rest, ""),
        };
        Parts {
            epoch,
            upstream,
            revision,
        }
    }
}

/// Compare two version strings with dpkg semantics.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    let a = Parts::split(a);
    let b = Parts::split(b);
    compare_digits(a.epoch.as_bytes(), b.epoch.as_bytes())
        .then_with(|| verrevcmp(a.upstream.as_bytes(), b.upstream.as_bytes()))
        .then_with(|| verrevcmp(a.revision.as_bytes(), b.revision.as_bytes()))
}

/// True when the two strings denote the same version (`1.0` and `1.00`, say).
pub fn versions_equal(a: &str, b: &str) -> bool {
    compare_versions(a, b) == Ordering::Equal
}

// Numeric comparison of arbitrary-length digit runs without overflow.
fn compare_digits(a: &[u8], b: &[u8]) -> Ordering {
    let a = strip_zeros(a);
    let b = strip_zeros(b);
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn strip_zeros(s: &[u8]) -> &[u8] {
    let start = s.iter().position(|&c| c != b'0').unwrap_or(s.len());
    &s[start..]
}

fn order(c: Option<&u8>) -> i32 {
    match c {
        None => 0,
        Some(b'~') => -1,
        Some(c) if c.is_ascii_digit() => 0,
        Some(c) if c.is_ascii_alphabetic() => i32::from(*c),
        Some(c) => i32::from(*c) + 256,
    }
}

fn is_digit(c: Option<&u8>) -> bool {
    c.is_some_and(u8::is_ascii_digit)
}

fn verrevcmp(mut a: &[u8], mut b: &[u8]) -> Ordering {
    while !a.is_empty() || !b.is_empty() {
        while (!a.is_empty() && !is_digit(a.first())) || (!b.is_empty() && !is_digit(b.first())) {
            let ac = order(a.first());
            let bc = order(b.first());
            if ac != bc {
                return ac.cmp(&bc);
            }
            a = a.get(1..).unwrap_or_default();
            b = b.get(1..).unwrap_or_default();
        }
        let a_len = a.iter().take_while(|c| c.is_ascii_digit()).count();
        let b_len = b.iter().take_while(|c| c.is_ascii_digit()).count();
        match compare_digits(&a[..a_len], &b[..b_len]) {
            Ordering::Equal => {}
            other => return other,
        }
        a = &a[a_len..];
        b = &b[b_len..];
    }
    Ordering::Equal
}
