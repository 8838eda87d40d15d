use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Matrix letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    M1,
    M2,
}

impl Letter {
    pub fn other(self) -> Self {
        match self {
            Letter::M1 => Letter::M2,
            Letter::M2 => Letter::M1,
        }
    }

    fn digit(self) -> char {
        match self {
            Letter::M1 => '1',
            Letter::M2 => '2',
        }
    }
}

/// Word in `M1`, `M2` under a trace, stored in canonical (least cyclic
/// rotation) form. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TraceWord(Vec<Letter>);

impl TraceWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(canonical_rotation(letters))
    }

    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn power(l: Letter, k: usize) -> Self {
        Self(vec![l; k])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, l: Letter) -> usize {
        self.0.iter().filter(|&&c| c == l).count()
    }
}

/// Lexicographically least cyclic rotation.
pub fn canonical_rotation(letters: Vec<Letter>) -> Vec<Letter> {
    let n = letters.len();
    if n < 2 {
        return letters;
    }
    let best = (0..n)
        .min_by(|&a, &b| {
            (0..n)
                .map(|i| letters[(a + i) % n])
                .cmp((0..n).map(|i| letters[(b + i) % n]))
        })
        .unwrap_or(0);
    let mut out = letters;
    out.rotate_left(best);
    out
}

/// `canonicalize` on a raw letter sequence.
pub fn canonicalize(letters: &[Letter]) -> TraceWord {
    TraceWord::new(letters.to_vec())
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.digit()))
    }
}

impl fmt::Debug for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tr[{self}]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid trace word {0:?}: expected digits 1 and 2 (empty for the identity)")]
pub struct ParseWordError(pub String);

/// Parses the report form: `"112"` for `M1 M1 M2`, `""` for the identity.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>, ParseWordError> {
    s.chars()
        .map(|c| match c {
            '1' => Ok(Letter::M1),
            '2' => Ok(Letter::M2),
            _ => Err(ParseWordError(s.to_string())),
        })
        .collect()
}

impl FromStr for TraceWord {
    type Err = ParseWordError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self::new(parse_letters(s)?))
    }
}

impl Serialize for TraceWord {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        let text: String = self.0.iter().map(|l| l.digit()).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for TraceWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Product of traces under a single expectation; factor order is irrelevant
/// and identity factors are dropped (their `N` is carried by the caller).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct TraceProduct(Vec<TraceWord>);

impl TraceProduct {
    /// Sorts the factors and removes identities, returning the number removed.
    pub fn new(mut factors: Vec<TraceWord>) -> (Self, usize) {
        let before = factors.len();
        factors.retain(|w| !w.is_empty());
        let ids = before - factors.len();
        factors.sort();
        (Self(factors), ids)
    }

    pub fn single(w: TraceWord) -> (Self, usize) {
        Self::new(vec![w])
    }

    pub fn factors(&self) -> &[TraceWord] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn merged(&self, other: &Self) -> Self {
        let mut f = self.0.clone();
        f.extend(other.0.iter().cloned());
        f.sort();
        Self(f)
    }
}

impl fmt::Debug for TraceProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{w:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    #[test]
    fn rotation_examples() {
        assert_eq!(canonicalize(&[M1, M2, M1]).letters(), &[M1, M1, M2]);
        assert_eq!(canonicalize(&[M2]).letters(), &[M2]);
        assert_eq!(canonicalize(&[M1, M2, M2, M1]).letters(), &[M1, M1, M2, M2]);
    }

    #[test]
    fn string_round_trip() {
        let w: TraceWord = "2112".parse().unwrap();
        assert_eq!(w.to_string(), "1122");
        assert_eq!("".parse::<TraceWord>().unwrap(), TraceWord::identity());
        assert!("13".parse::<TraceWord>().is_err());
    }

    #[test]
    fn product_drops_identities() {
        let (p, ids) = TraceProduct::new(vec![TraceWord::identity(), "2".parse().unwrap(), "1".parse().unwrap()]);
        assert_eq!(ids, 1);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.factors()[0].to_string(), "1");
    }
}
