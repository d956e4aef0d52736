//! Gap sets: the allowed differences between consecutive terms of a diffsequence.
//!
//! Sets are named with a small textual grammar:
//!
//! ```text
//! powers(a) | thm23(a) | fibonacci | primes | primes+t | s_m(m)
//!   | residues(m; c1,c2,...) | diffs(t1,t2,...) | scaled(j, SPEC)
//!   | union(SPEC, SPEC) | explicit(d1,d2,...) | odds_plus_two
//! ```
//!
//! `Display` prints the canonical form; parsing it back yields an equal set.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primes;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GapSet {
    /// `{a^i : i >= 0}`.
    Powers(u64),
    /// `{(a-1)a^j} ∪ {(a-1)^2 a^j}`, `j >= 0`.
    Thm23(u64),
    /// Fibonacci numbers as a set (the repeated 1 collapses).
    Fibonacci,
    /// `P + shift`, the primes translated upward.
    Primes {
        shift: u64,
    },
    /// `{d : d mod modulus ∈ classes}`. `s_m(m)` is every nonzero class.
    Residues {
        modulus: u64,
        classes: Vec<u64>,
    },
    /// `T - T = {t - s : s < t in T}` for a finite `T`.
    Diffs(Vec<u64>),
    /// `jS = {j d : d ∈ S}`.
    Scaled(u64, Box<GapSet>),
    Union(Box<GapSet>, Box<GapSet>),
    Explicit(Vec<u64>),
    /// `{2} ∪ (2N - 1)`.
    OddsPlusTwo,
}

impl GapSet {
    /// Parses a set spec. See the module docs for the grammar.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut p = Parser {
            src: spec.as_bytes(),
            pos: 0,
        };
        let set = p.set()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(set)
    }

    pub fn powers(a: u64) -> Result<Self> {
        if a < 2 {
            return Err(Error::Domain(format!("powers(a) needs a >= 2, got {a}")));
        }
        Ok(GapSet::Powers(a))
    }

    pub fn thm23(a: u64) -> Result<Self> {
        if a < 2 {
            return Err(Error::Domain(format!("thm23(a) needs a >= 2, got {a}")));
        }
        Ok(GapSet::Thm23(a))
    }

    pub fn primes_shifted(shift: u64) -> Self {
        GapSet::Primes { shift }
    }

    /// Non-multiples of `m`.
    pub fn s_m(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("s_m(m) needs m >= 2, got {m}")));
        }
        Ok(GapSet::Residues {
            modulus: m,
            classes: (1..m).collect(),
        })
    }

    pub fn residues(modulus: u64, classes: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::Domain("residues(m; ...) needs m >= 1".into()));
        }
        let mut classes: Vec<u64> = classes.into_iter().collect();
        if let Some(c) = classes.iter().find(|&&c| c >= modulus) {
            return Err(Error::Domain(format!(
                "residue class {c} not below modulus {modulus}"
            )));
        }
        classes.sort_unstable();
        classes.dedup();
        Ok(GapSet::Residues { modulus, classes })
    }

    /// `{x : 3 ∤ x and 4 ∤ x}`.
    pub fn not_div_3_or_4() -> Self {
        GapSet::Residues {
            modulus: 12,
            classes: vec![1, 2, 5, 7, 10, 11],
        }
    }

    pub fn diffs(ts: impl IntoIterator<Item = u64>) -> Self {
        let mut ts: Vec<u64> = ts.into_iter().collect();
        ts.sort_unstable();
        ts.dedup();
        GapSet::Diffs(ts)
    }

    pub fn scaled(j: u64, inner: GapSet) -> Result<Self> {
        if j < 1 {
            return Err(Error::Domain("scaled(j, S) needs j >= 1".into()));
        }
        Ok(GapSet::Scaled(j, Box::new(inner)))
    }

    pub fn union(a: GapSet, b: GapSet) -> Self {
        GapSet::Union(Box::new(a), Box::new(b))
    }

    pub fn explicit(ds: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut ds: Vec<u64> = ds.into_iter().collect();
        if ds.contains(&0) {
            return Err(Error::Domain("explicit gaps must be positive".into()));
        }
        ds.sort_unstable();
        ds.dedup();
        Ok(GapSet::Explicit(ds))
    }

    /// Short kind name, as used by the bound registry and `sets` listing.
    pub fn kind(&self) -> &'static str {
        match self {
            GapSet::Powers(_) => "powers",
            GapSet::Thm23(_) => "thm23",
            GapSet::Fibonacci => "fibonacci",
            GapSet::Primes { shift: 0 } => "primes",
            GapSet::Primes { .. } => "primes_shifted",
            GapSet::Residues { modulus, classes } if is_s_m(*modulus, classes) => "s_m",
            GapSet::Residues { .. } => "residues",
            GapSet::Diffs(_) => "diff_of_set",
            GapSet::Scaled(..) => "scaled",
            GapSet::Union(..) => "union",
            GapSet::Explicit(_) => "explicit",
            GapSet::OddsPlusTwo => "odds_plus_two",
        }
    }

    pub fn contains(&self, d: u64) -> bool {
        if d == 0 {
            return false;
        }
        match self {
            GapSet::Powers(a) => {
                let mut x = d;
                while x.is_multiple_of(*a) {
                    x /= a;
                }
                x == 1
            }
            GapSet::Thm23(a) => {
                let base = a - 1;
                if !d.is_multiple_of(base) {
                    return false;
                }
                let mut x = d / base;
                while x.is_multiple_of(*a) {
                    x /= a;
                }
                x == 1 || x == base
            }
            GapSet::Fibonacci => {
                let (mut f, mut g) = (1u64, 2u64);
                while f < d {
                    (f, g) = (g, f + g);
                }
                f == d
            }
            GapSet::Primes { shift } => d > *shift && primes::is_prime(d - shift),
            GapSet::Residues { modulus, classes } => classes.binary_search(&(d % modulus)).is_ok(),
            GapSet::Diffs(ts) => ts.iter().any(|&s| ts.binary_search(&(s + d)).is_ok()),
            GapSet::Scaled(j, inner) => d.is_multiple_of(*j) && inner.contains(d / j),
            GapSet::Union(a, b) => a.contains(d) || b.contains(d),
            GapSet::Explicit(ds) => ds.binary_search(&d).is_ok(),
            GapSet::OddsPlusTwo => d % 2 == 1 || d == 2,
        }
    }

    /// `S ∩ [1, bound]` in increasing order.
    pub fn enumerate(&self, bound: u64) -> Vec<u64> {
        let mut out = match self {
            GapSet::Powers(a) => geometric(1, *a, bound),
            GapSet::Thm23(a) => {
                let mut v = geometric(a - 1, *a, bound);
                v.extend(geometric((a - 1) * (a - 1), *a, bound));
                v
            }
            GapSet::Fibonacci => {
                let mut v = Vec::new();
                let (mut f, mut g) = (1u64, 2u64);
                while f <= bound {
                    v.push(f);
                    (f, g) = (g, f + g);
                }
                v
            }
            GapSet::Primes { shift } => {
                if bound <= *shift {
                    Vec::new()
                } else {
                    primes::sieve(bound - shift)
                        .into_iter()
                        .map(|p| p + shift)
                        .collect()
                }
            }
            GapSet::Residues { .. } | GapSet::OddsPlusTwo => {
                (1..=bound).filter(|&d| self.contains(d)).collect()
            }
            GapSet::Diffs(ts) => {
                let mut v = Vec::new();
                for (i, &s) in ts.iter().enumerate() {
                    for &t in &ts[i + 1..] {
                        if t - s <= bound {
                            v.push(t - s);
                        }
                    }
                }
                v
            }
            GapSet::Scaled(j, inner) => inner
                .enumerate(bound / j)
                .into_iter()
                .map(|d| d * j)
                .collect(),
            GapSet::Union(a, b) => {
                let mut v = a.enumerate(bound);
                v.extend(b.enumerate(bound));
                v
            }
            GapSet::Explicit(ds) => ds.iter().copied().take_while(|&d| d <= bound).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Materialized view of `S ∩ [1, n - 1]`, everything a DP over `[1, n]` needs.
    pub fn mask(&self, n: usize) -> GapMask {
        let gaps: Vec<usize> = self
            .enumerate(n.saturating_sub(1) as u64)
            .into_iter()
            .map(|d| d as usize)
            .collect();
        GapMask::from_sorted(gaps, n)
    }
}

fn is_s_m(modulus: u64, classes: &[u64]) -> bool {
    modulus >= 2 && classes.len() as u64 == modulus - 1 && classes.iter().copied().eq(1..modulus)
}

fn geometric(start: u64, ratio: u64, bound: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut x = start;
    while x <= bound {
        v.push(x);
        match x.checked_mul(ratio) {
            Some(y) => x = y,
            None => break,
        }
    }
    v
}

/// `S ∩ [1, n - 1]` as a sorted list plus a membership table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapMask {
    gaps: Vec<usize>,
    member: Vec<bool>,
}

impl GapMask {
    /// Builds from gaps that are sorted, distinct, and all `< n`.
    pub fn from_sorted(gaps: Vec<usize>, n: usize) -> Self {
        let mut member = vec![false; n.max(1)];
        for &d in &gaps {
            member[d] = true;
        }
        GapMask { gaps, member }
    }

    pub fn gaps(&self) -> &[usize] {
        &self.gaps
    }

    pub fn contains(&self, d: usize) -> bool {
        self.member.get(d).copied().unwrap_or(false)
    }

    /// The length `n` this mask was built for.
    pub fn span(&self) -> usize {
        self.member.len()
    }
}

impl fmt::Display for GapSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapSet::Powers(a) => write!(f, "powers({a})"),
            GapSet::Thm23(a) => write!(f, "thm23({a})"),
            GapSet::Fibonacci => f.write_str("fibonacci"),
            GapSet::Primes { shift: 0 } => f.write_str("primes"),
            GapSet::Primes { shift } => write!(f, "primes+{shift}"),
            GapSet::Residues { modulus, classes } if is_s_m(*modulus, classes) => {
                write!(f, "s_m({modulus})")
            }
            GapSet::Residues { modulus, classes } => {
                write!(f, "residues({modulus}; {})", join(classes))
            }
            GapSet::Diffs(ts) => write!(f, "diffs({})", join(ts)),
            GapSet::Scaled(j, inner) => write!(f, "scaled({j}, {inner})"),
            GapSet::Union(a, b) => write!(f, "union({a}, {b})"),
            GapSet::Explicit(ds) => write!(f, "explicit({})", join(ds)),
            GapSet::OddsPlusTwo => f.write_str("odds_plus_two"),
        }
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl FromStr for GapSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GapSet::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", ch as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a set name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "number out of range".into(),
            })
    }

    /// Comma-separated numbers up to (not including) the closing paren.
    fn number_list(&mut self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        if self.peek() == Some(b')') {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.peek() == Some(b',') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }

    fn set(&mut self) -> Result<GapSet> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?.to_owned();
        let domain = |e: Error| match e {
            Error::Domain(msg) => Error::Parse { pos: start, msg },
            other => other,
        };
        let set = match name.as_str() {
            "fibonacci" => GapSet::Fibonacci,
            "odds_plus_two" => GapSet::OddsPlusTwo,
            "primes" => {
                if self.peek() == Some(b'+') {
                    self.pos += 1;
                    GapSet::Primes {
                        shift: self.number()?,
                    }
                } else {
                    GapSet::Primes { shift: 0 }
                }
            }
            "powers" | "thm23" | "s_m" => {
                self.expect(b'(')?;
                let a = self.number()?;
                self.expect(b')')?;
                match name.as_str() {
                    "powers" => GapSet::powers(a),
                    "thm23" => GapSet::thm23(a),
                    _ => GapSet::s_m(a),
                }
                .map_err(domain)?
            }
            "residues" => {
                self.expect(b'(')?;
                let m = self.number()?;
                self.expect(b';')?;
                let classes = self.number_list()?;
                self.expect(b')')?;
                GapSet::residues(m, classes).map_err(domain)?
            }
            "diffs" | "explicit" => {
                self.expect(b'(')?;
                let xs = self.number_list()?;
                self.expect(b')')?;
                if name == "diffs" {
                    GapSet::diffs(xs)
                } else {
                    GapSet::explicit(xs).map_err(domain)?
                }
            }
            "scaled" => {
                self.expect(b'(')?;
                let j = self.number()?;
                self.expect(b',')?;
                let inner = self.set()?;
                self.expect(b')')?;
                GapSet::scaled(j, inner).map_err(domain)?
            }
            "union" => {
                self.expect(b'(')?;
                let a = self.set()?;
                self.expect(b',')?;
                let b = self.set()?;
                self.expect(b')')?;
                GapSet::union(a, b)
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unknown set {other:?}"),
                })
            }
        };
        Ok(set)
    }
}

/// The named catalog, as listed by the CLI `sets` command.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("powers(a)", "{a^i : i >= 0}"),
        ("thm23(a)", "{(a-1)a^j} ∪ {(a-1)^2 a^j}"),
        ("fibonacci", "Fibonacci numbers"),
        ("primes", "the primes P"),
        ("primes+t", "P + t"),
        ("s_m(m)", "positive integers not divisible by m"),
        ("residues(m; c1,...)", "union of residue classes mod m"),
        ("diffs(t1,...)", "T - T for a finite T"),
        ("scaled(j, S)", "jS"),
        ("union(S, T)", "S ∪ T"),
        ("explicit(d1,...)", "a finite list"),
        ("odds_plus_two", "{2} ∪ odd numbers"),
    ]
}
