//! Explicit colorings: avoidance witnesses behind lower bounds on f, and
//! blocking colorings showing a set is not r-accessible.
//!
//! Colorings defined on all of N are materialized on a prefix `[1, N]`.

use serde::Serialize;

use crate::chain::{longest_restricted, longest_with_mask, DiffseqWitness};
use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::sets::{GapMask, GapSet};

/// `prefix · block^repeats · suffix`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PatternColoring {
    pub prefix: String,
    pub block: String,
    pub repeats: usize,
    pub suffix: String,
}

impl PatternColoring {
    pub fn new(prefix: &str, block: &str, repeats: usize, suffix: &str) -> Self {
        PatternColoring {
            prefix: prefix.to_string(),
            block: block.to_string(),
            repeats,
            suffix: suffix.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.repeats * self.block.len() + self.suffix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len());
        s.push_str(&self.prefix);
        for _ in 0..self.repeats {
            s.push_str(&self.block);
        }
        s.push_str(&self.suffix);
        s
    }

    pub fn expand(&self, r: usize) -> Result<Coloring> {
        Coloring::parse(&self.to_text(), r)
    }
}

/// `c` repeated `t` times.
fn rep(c: &str, t: usize) -> String {
    c.repeat(t)
}

/// The property a named witness claims about its coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// No monochromatic k-term S-diffsequence.
    Avoids { k: usize },
    /// Color `c` has no monochromatic S-diffsequence of `below[c]` terms.
    PerColorBelow { below: Vec<usize> },
    /// No k-term S-diffsequence whose elements all lie in S itself.
    AvoidsOnSet { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimCheck {
    pub holds: bool,
    /// Longest monochromatic chain seen (per color for `PerColorBelow`).
    pub longest: Vec<usize>,
    pub witness: DiffseqWitness,
}

#[derive(Clone, Debug)]
pub struct NamedWitness {
    pub name: String,
    pub params: Vec<u64>,
    pub coloring: Coloring,
    pub set: GapSet,
    pub claim: Claim,
}

/// Header written before a witness dump.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessHeader {
    pub name: String,
    pub params: Vec<u64>,
    pub set_spec: String,
    pub claim: Claim,
}

impl NamedWitness {
    pub fn header(&self) -> WitnessHeader {
        WitnessHeader {
            name: self.name.clone(),
            params: self.params.clone(),
            set_spec: self.set.to_string(),
            claim: self.claim.clone(),
        }
    }

    /// Header line (JSON) followed by the coloring string.
    pub fn dump(&self) -> String {
        format!(
            "{}\n{}\n",
            serde_json::to_string(&self.header()).expect("serializable"),
            self.coloring
        )
    }

    pub fn check(&self) -> ClaimCheck {
        let mask = self.set.mask(self.coloring.n());
        match &self.claim {
            Claim::Avoids { k } => {
                let (len, witness) = longest_with_mask(&self.coloring, &mask);
                ClaimCheck {
                    holds: len < *k,
                    longest: vec![len],
                    witness,
                }
            }
            Claim::PerColorBelow { below } => {
                let mut longest = Vec::with_capacity(below.len());
                let mut holds = true;
                let mut worst = DiffseqWitness {
                    positions: Vec::new(),
                    color: 0,
                };
                for (color, &limit) in below.iter().enumerate() {
                    let allowed: Vec<bool> = self
                        .coloring
                        .colors()
                        .iter()
                        .map(|&c| c as usize == color)
                        .collect();
                    let (len, w) =
                        longest_restricted(&self.coloring, &mask, &allowed).expect("lengths agree");
                    holds &= len < limit;
                    if len > worst.len() {
                        worst = w;
                    }
                    longest.push(len);
                }
                ClaimCheck {
                    holds,
                    longest,
                    witness: worst,
                }
            }
            Claim::AvoidsOnSet { k } => {
                let restricted = subset_elements_coloring(&self.coloring, &self.set);
                let (len, witness) = restricted.longest(&mask);
                ClaimCheck {
                    holds: len < *k,
                    longest: vec![len],
                    witness,
                }
            }
        }
    }
}

/// Names accepted by [`named_witness`], with their positional parameters.
pub const WITNESS_NAMES: &[(&str, &str)] = &[
    ("chi_k", "k (k >= 5)"),
    ("C_k", "k (even, k >= 2)"),
    ("D_k", "k (odd, k >= 3)"),
    ("thm34", "k (k >= 2)"),
    ("thm35", "m k (m >= 5, k >= 1)"),
    ("prop36", "k (k >= 3)"),
    ("mod_block", "m N (m >= 2)"),
    ("lemma25", "m i N (m >= 2, gcd(i, m) = 1)"),
    ("p_not_3acc", "N"),
    ("remark1", "N"),
];

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::WitnessParams(msg.into())
}

fn arity(name: &str, params: &[u64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(bad(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn build(
    name: &str,
    params: &[u64],
    text: String,
    r: usize,
    set: GapSet,
    claim: Claim,
) -> Result<NamedWitness> {
    Ok(NamedWitness {
        name: name.to_string(),
        params: params.to_vec(),
        coloring: Coloring::parse(&text, r)?,
        set,
        claim,
    })
}

fn from_fn(n: u64, f: impl Fn(u64) -> u8) -> String {
    let colors: Vec<u8> = (1..=n).map(f).collect();
    crate::coloring::colors_to_text(&colors)
}

/// Builds one of the named colorings together with the claim it supports.
pub fn named_witness(name: &str, params: &[u64]) -> Result<NamedWitness> {
    match name {
        "chi_k" => {
            arity(name, params, 1)?;
            let k = params[0];
            if k < 5 {
                return Err(bad("chi_k needs k >= 5"));
            }
            let text = PatternColoring::new("", "10010110", (k - 3) as usize, "").to_text();
            build(
                name,
                params,
                text,
                2,
                GapSet::Powers(2),
                Claim::Avoids { k: k as usize },
            )
        }
        "C_k" => {
            arity(name, params, 1)?;
            let k = params[0];
            if k < 2 || k % 2 == 1 {
                return Err(bad("C_k needs an even k >= 2"));
            }
            let text = PatternColoring::new("1", "000111", ((k - 2) / 2) as usize, "0").to_text();
            build(
                name,
                params,
                text,
                2,
                GapSet::OddsPlusTwo,
                Claim::Avoids { k: k as usize },
            )
        }
        "D_k" => {
            arity(name, params, 1)?;
            let k = params[0];
            if k < 3 || k.is_multiple_of(2) {
                return Err(bad("D_k needs an odd k >= 3"));
            }
            let text = PatternColoring::new("11", "000111", ((k - 3) / 2) as usize, "00").to_text();
            build(
                name,
                params,
                text,
                2,
                GapSet::OddsPlusTwo,
                Claim::Avoids { k: k as usize },
            )
        }
        "thm34" => {
            arity(name, params, 1)?;
            let k = params[0];
            if k < 2 {
                return Err(bad("thm34 needs k >= 2"));
            }
            // 0 on residues 2, 3 (mod 4), 1 on residues 0, 1
            let text = from_fn(4 * k - 6, |i| u8::from(!matches!(i % 4, 2 | 3)));
            build(
                name,
                params,
                text,
                2,
                GapSet::s_m(3)?,
                Claim::Avoids { k: k as usize },
            )
        }
        "thm35" => {
            arity(name, params, 2)?;
            let (m, k) = (params[0], params[1]);
            if m < 5 || k < 1 {
                return Err(bad("thm35 needs m >= 5 and k >= 1"));
            }
            let a = (k / m) as usize;
            let m1 = (m - 1) as usize;
            let tail = (k as usize) - a * m1 - 1;
            let text = format!(
                "{}{}{}{}",
                rep(&format!("1{}", rep("0", m1)), a),
                rep(&format!("{}0", rep("1", m1)), a),
                rep("0", tail),
                rep("1", tail)
            );
            if text.is_empty() {
                return Err(bad("thm35 with k = 1 colors the empty interval"));
            }
            build(
                name,
                params,
                text,
                2,
                GapSet::s_m(m)?,
                Claim::Avoids { k: k as usize },
            )
        }
        "prop36" => {
            arity(name, params, 1)?;
            let k = params[0];
            if k < 3 {
                return Err(bad("prop36 needs k >= 3"));
            }
            let block = "10011000110011";
            let text = if k.is_multiple_of(2) {
                PatternColoring::new("1", block, ((k - 2) / 2) as usize, "").to_text()
            } else {
                PatternColoring::new("1", block, ((k - 3) / 2) as usize, "1001100").to_text()
            };
            build(
                name,
                params,
                text,
                2,
                GapSet::not_div_3_or_4(),
                Claim::Avoids { k: k as usize },
            )
        }
        "mod_block" => {
            arity(name, params, 2)?;
            let (m, n) = (params[0], params[1]);
            if !(2..=crate::coloring::MAX_COLORS as u64).contains(&m) || n < 1 {
                return Err(bad("mod_block needs 2 <= m <= 36 and N >= 1"));
            }
            let text = from_fn(n, |x| (x % m) as u8);
            // s_m(m) is the largest set with no multiple of m
            build(
                name,
                params,
                text,
                m as usize,
                GapSet::s_m(m)?,
                Claim::Avoids { k: 2 },
            )
        }
        "lemma25" => {
            arity(name, params, 3)?;
            let (m, i, n) = (params[0], params[1], params[2]);
            if m < 2 || i < 1 || gcd(i, m) != 1 || n < 1 {
                return Err(bad("lemma25 needs m >= 2, i >= 1, gcd(i, m) = 1, N >= 1"));
            }
            let text = from_fn(n, |x| u8::from(x % m != 0));
            let set = GapSet::residues(m, [i % m])?;
            build(name, params, text, 2, set, Claim::Avoids { k: m as usize })
        }
        "p_not_3acc" => {
            arity(name, params, 1)?;
            let n = params[0];
            if n < 1 {
                return Err(bad("p_not_3acc needs N >= 1"));
            }
            // 0 = red (remaining evens), 1 = blue (remaining odds), 2 = green (multiples of 9)
            let text = from_fn(n, |x| match x {
                _ if x % 9 == 0 => 2,
                _ if x % 2 == 0 => 0,
                _ => 1,
            });
            let claim = Claim::PerColorBelow {
                below: vec![9, 9, 2],
            };
            build(name, params, text, 3, GapSet::Primes { shift: 0 }, claim)
        }
        "remark1" => {
            arity(name, params, 1)?;
            let n = params[0];
            if n < 1 {
                return Err(bad("remark1 needs N >= 1"));
            }
            // defined on S only; positions outside S are ignored by the claim
            let text = from_fn(n, |x| u8::from(x % 4 == 1 || x == 2));
            build(
                name,
                params,
                text,
                2,
                GapSet::OddsPlusTwo,
                Claim::AvoidsOnSet { k: 4 },
            )
        }
        other => Err(Error::UnknownWitness(other.to_string())),
    }
}

/// Product coloring with `c1.r() * c2.r()` colors: `color(x) = c1(x)·r2 + c2(x)`.
pub fn product_coloring(c1: &Coloring, c2: &Coloring) -> Result<Coloring> {
    if c1.n() != c2.n() {
        return Err(Error::LengthMismatch(c1.n(), c2.n()));
    }
    let r2 = c2.r();
    let colors = c1
        .colors()
        .iter()
        .zip(c2.colors())
        .map(|(&a, &b)| (a as usize * r2 + b as usize) as u8)
        .collect();
    Coloring::new(colors, c1.r() * r2)
}

/// A coloring whose diffsequences may only use elements of a domain set.
#[derive(Clone, Debug)]
pub struct RestrictedColoring {
    pub coloring: Coloring,
    pub allowed: Vec<bool>,
}

impl RestrictedColoring {
    /// Longest monochromatic diffsequence with every element in the domain.
    pub fn longest(&self, mask: &GapMask) -> (usize, DiffseqWitness) {
        longest_restricted(&self.coloring, mask, &self.allowed).expect("lengths agree")
    }
}

pub fn subset_elements_coloring(c: &Coloring, domain: &GapSet) -> RestrictedColoring {
    let allowed = (1..=c.n() as u64).map(|x| domain.contains(x)).collect();
    RestrictedColoring {
        coloring: c.clone(),
        allowed,
    }
}
