//! The `tour/1` text format.
//!
//! ```text
//! # tour/1
//! t 3 101
//! ```
//!
//! One tournament per `t <n> <bits>` line, bits in upper-triangle pair order.
//! Lines starting with `#` and blank lines are ignored.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tournament::Tournament;

pub const HEADER: &str = "# tour/1";

pub fn format_line(t: &Tournament) -> String {
    let bits = t.to_bits();
    if bits.is_empty() {
        format!("t {}", t.n())
    } else {
        format!("t {} {}", t.n(), bits)
    }
}

pub fn write_string(ts: &[Tournament]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for t in ts {
        out.push_str(&format_line(t));
        out.push('\n');
    }
    out
}

pub fn parse_str(src: &str) -> Result<Vec<Tournament>> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("t") => {}
            Some(tag) => return Err(err(format!("expected record tag 't', found {tag:?}"))),
            None => unreachable!(),
        }
        let n: usize = parts
            .next()
            .ok_or_else(|| err("missing vertex count".into()))?
            .parse()
            .map_err(|_| err("vertex count is not a non-negative integer".into()))?;
        let bits = parts.next().unwrap_or("");
        if parts.next().is_some() {
            return Err(err("trailing tokens after bitstring".into()));
        }
        let t = Tournament::from_bits(n, bits).map_err(|e| match e {
            Error::Malformed(m) => err(m),
            other => err(other.to_string()),
        })?;
        out.push(t);
    }
    Ok(out)
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<Tournament>> {
    let src = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_str(&src)
}

pub fn write_file(path: impl AsRef<Path>, ts: &[Tournament]) -> Result<()> {
    fs::write(path.as_ref(), write_string(ts))
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_records() {
        let src = "# tour/1\n\n# a comment\nt 3 101\nt 1\n  t 2 0  \n";
        let ts = parse_str(src).unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts[0].to_bits(), "101");
        assert_eq!(ts[1].n(), 1);
        assert!(ts[2].arc(1, 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_str("# tour/1\nt 3 11\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_str("t 3 111\nx 3 111\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_str("t three 111\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_str("t 3 111 extra\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn canonical_text_is_stable() {
        let src = "# tour/1\nt 1\nt 4 110111\n";
        assert_eq!(write_string(&parse_str(src).unwrap()), src);
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..40, seed in any::<u64>()) {
            let t = crate::constructions::random_tournament(n, seed);
            let text = write_string(std::slice::from_ref(&t));
            let back = parse_str(&text).unwrap();
            prop_assert_eq!(&back[0], &t);
            prop_assert_eq!(write_string(&back), text);
        }
    }
}
