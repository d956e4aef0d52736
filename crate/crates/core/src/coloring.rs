//! Finite colorings of an interval `[1, n]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest color count the text format can express (`0-9` then `a-z`).
pub const MAX_COLORS: usize = 36;

/// An r-coloring of `[1, n]`. Entry `i` of `colors` is the color of the integer `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<u8>,
    r: usize,
}

impl Coloring {
    pub fn new(colors: Vec<u8>, r: usize) -> Result<Self> {
        if colors.is_empty() {
            return Err(Error::Domain("a coloring needs n >= 1".into()));
        }
        if r == 0 || r > MAX_COLORS {
            return Err(Error::Domain(format!(
                "color count {r} outside 1..={MAX_COLORS}"
            )));
        }
        if let Some(pos) = colors.iter().position(|&c| c as usize >= r) {
            return Err(Error::InvalidColor {
                pos: pos + 1,
                ch: color_char(colors[pos]),
                r,
            });
        }
        Ok(Coloring { colors, r })
    }

    /// Parses the digit/letter text format, rejecting any symbol `>= r`.
    pub fn parse(text: &str, r: usize) -> Result<Self> {
        let colors = text
            .trim()
            .chars()
            .enumerate()
            .map(|(i, ch)| {
                char_color(ch)
                    .filter(|&c| (c as usize) < r)
                    .ok_or(Error::InvalidColor { pos: i + 1, ch, r })
            })
            .collect::<Result<Vec<u8>>>()?;
        Coloring::new(colors, r)
    }

    /// Parses with `r` inferred as one more than the largest symbol (at least 2).
    pub fn parse_infer(text: &str) -> Result<Self> {
        let max = text
            .trim()
            .chars()
            .enumerate()
            .map(|(i, ch)| {
                char_color(ch).ok_or(Error::InvalidColor {
                    pos: i + 1,
                    ch,
                    r: MAX_COLORS,
                })
            })
            .try_fold(0u8, |m, c| c.map(|c| m.max(c)))?;
        Coloring::parse(text, (max as usize + 1).max(2))
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Color of the integer `x`, 1-based.
    pub fn color_of(&self, x: usize) -> u8 {
        self.colors[x - 1]
    }

    /// Restriction to `[1, m]`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n() {
            return Err(Error::Domain(format!(
                "cannot truncate length {} to {m}",
                self.n()
            )));
        }
        Ok(Coloring {
            colors: self.colors[..m].to_vec(),
            r: self.r,
        })
    }

    /// Applies a color relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[u8]) -> Result<Self> {
        if perm.len() != self.r {
            return Err(Error::LengthMismatch(perm.len(), self.r));
        }
        Coloring::new(
            self.colors.iter().map(|&c| perm[c as usize]).collect(),
            self.r,
        )
    }

    pub fn to_text(&self) -> String {
        self.colors.iter().map(|&c| color_char(c)).collect()
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coloring::parse_infer(s)
    }
}

pub fn color_char(c: u8) -> char {
    std::char::from_digit(c as u32, MAX_COLORS as u32).unwrap_or('?')
}

pub fn char_color(ch: char) -> Option<u8> {
    if ch.is_ascii_uppercase() {
        return None;
    }
    ch.to_digit(MAX_COLORS as u32).map(|d| d as u8)
}

/// Renders a raw color slice in the text format (no validation).
pub fn colors_to_text(colors: &[u8]) -> String {
    colors.iter().map(|&c| color_char(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = Coloring::parse("0102az", 36).unwrap();
        assert_eq!(c.colors(), &[0, 1, 0, 2, 10, 35]);
        assert_eq!(c.to_text(), "0102az");
        assert_eq!(c.color_of(5), 10);
    }

    #[test]
    fn rejects_symbols_beyond_r() {
        let err = Coloring::parse("0120", 2).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidColor {
                pos: 3,
                ch: '2',
                r: 2
            }
        );
        assert!(Coloring::parse("01A", 36).is_err());
        assert!(Coloring::parse("", 2).is_err());
    }

    #[test]
    fn infers_color_count() {
        let c: Coloring = "0000".parse().unwrap();
        assert_eq!(c.r(), 2);
        let c: Coloring = "0123".parse().unwrap();
        assert_eq!(c.r(), 4);
    }
}
