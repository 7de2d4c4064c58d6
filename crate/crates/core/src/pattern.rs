use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tournament::Tournament;

/// Largest custom pattern accepted by the counting routines.
pub const MAX_CUSTOM_PATTERN: usize = 8;

/// The named 3- and 4-vertex tournaments, or an arbitrary small pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternId {
    Tt3,
    C3,
    Tt4,
    /// Cyclic triangle plus a dominating source.
    C3Plus,
    /// Cyclic triangle plus a dominated sink.
    C3Minus,
    /// The strong 4-vertex tournament.
    C4,
    Custom(Tournament),
}

impl PatternId {
    pub fn custom(t: Tournament) -> Result<Self> {
        if t.n() > MAX_CUSTOM_PATTERN {
            return Err(Error::UnsupportedSize {
                what: "custom pattern order",
                limit: MAX_CUSTOM_PATTERN,
                got: t.n(),
            });
        }
        Ok(PatternId::Custom(t))
    }

    pub fn tournament(&self) -> Tournament {
        let (n, bits) = match self {
            PatternId::Tt3 => (3, "111"),
            PatternId::C3 => (3, "101"),
            PatternId::Tt4 => (4, "111111"),
            PatternId::C3Plus => (4, "111101"),
            PatternId::C3Minus => (4, "101111"),
            PatternId::C4 => (4, "110111"),
            PatternId::Custom(t) => return t.clone(),
        };
        Tournament::from_bits(n, bits).expect("built-in pattern")
    }

    pub fn order(&self) -> usize {
        match self {
            PatternId::Tt3 | PatternId::C3 => 3,
            PatternId::Custom(t) => t.n(),
            _ => 4,
        }
    }

    pub fn name(&self) -> String {
        match self {
            PatternId::Tt3 => "TT3".into(),
            PatternId::C3 => "C3".into(),
            PatternId::Tt4 => "TT4".into(),
            PatternId::C3Plus => "C3PLUS".into(),
            PatternId::C3Minus => "C3MINUS".into(),
            PatternId::C4 => "C4".into(),
            PatternId::Custom(t) => format!("CUSTOM:{}:{}", t.n(), t.to_bits()),
        }
    }

    /// True iff no two vertices of the pattern relate identically to all others.
    pub fn is_twin_free(&self) -> bool {
        let h = self.tournament();
        let k = h.n();
        for a in 0..k {
            for b in (a + 1)..k {
                if (0..k)
                    .filter(|&c| c != a && c != b)
                    .all(|c| h.arc(a, c) == h.arc(b, c))
                {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for PatternId {
    type Err = Error;

    /// Accepts the six names (case-insensitive; `C3+`/`C3-` also work) or
    /// `custom:<n>:<bits>`.
    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Ok(match upper.as_str() {
            "TT3" => PatternId::Tt3,
            "C3" => PatternId::C3,
            "TT4" => PatternId::Tt4,
            "C3PLUS" | "C3+" => PatternId::C3Plus,
            "C3MINUS" | "C3-" => PatternId::C3Minus,
            "C4" => PatternId::C4,
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                match parts.as_slice() {
                    ["CUSTOM", n, bits] => {
                        let n: usize = n
                            .parse()
                            .map_err(|_| Error::Malformed(format!("bad pattern order {n:?}")))?;
                        PatternId::custom(Tournament::from_bits(n, bits)?)?
                    }
                    _ => return Err(Error::Malformed(format!("unknown pattern {s:?}"))),
                }
            }
        })
    }
}
