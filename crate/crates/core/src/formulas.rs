//! Closed-form values, bounds, and conjectures for f(S,k;r), and a registry
//! the solver and the test harness consult.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::GapSet;

/// `3k - 4` for odd `k`, `3k - 3` for even `k`.
pub fn g(k: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::Domain(format!("g(k) needs k >= 2, got {k}")));
    }
    Ok(if k % 2 == 1 { 3 * k - 4 } else { 3 * k - 3 })
}

/// Fibonacci numbers with `fib(1) = fib(2) = 1`.
pub fn fib(i: u64) -> u64 {
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 1..i {
        (a, b) = (b, a + b);
    }
    a
}

/// Value of f(jS,k;r) given M = f(S,k;r).
pub fn scaled_value(m: u64, j: u64) -> u64 {
    j * (m - 1) + 1
}

/// Lower bound `2k + 2a - 1` for the non-multiples of `m >= 5`, with `a = ⌊k/m⌋`.
pub fn s_m_lower(m: u64, k: u64) -> u64 {
    let a = k / m;
    debug_assert!(a * m <= k && k < (a + 1) * m);
    2 * k + 2 * a - 1
}

/// Conjectured f(S_6,k;2), piecewise in `k mod 4`.
pub fn s6_conjecture(k: u64) -> u64 {
    let num = match k % 4 {
        2 => 5 * k - 4,
        3 => 5 * k - 5,
        0 => 5 * k - 6,
        _ => 5 * k - 7,
    };
    num / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
    Conjecture,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Exact => "exact",
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
            BoundKind::Conjecture => "conjecture",
        })
    }
}

/// One registered formula. `eval` returns `None` when the entry does not apply.
#[derive(Clone, Copy)]
pub struct BoundEntry {
    pub id: &'static str,
    pub family: &'static str,
    pub params: &'static str,
    pub k_range: &'static str,
    pub kind: BoundKind,
    pub formula: &'static str,
    pub citation: &'static str,
    eval: fn(&GapSet, u64, u64) -> Option<u64>,
}

impl BoundEntry {
    pub fn eval(&self, set: &GapSet, k: u64, r: u64) -> Option<u64> {
        (self.eval)(set, k, r)
    }
}

impl fmt::Debug for BoundEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundEntry")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .finish()
    }
}

fn s_m_modulus(set: &GapSet) -> Option<u64> {
    match set {
        GapSet::Residues { modulus, .. } if set.kind() == "s_m" => Some(*modulus),
        _ => None,
    }
}

fn is_powers_of_two(set: &GapSet) -> bool {
    matches!(set, GapSet::Powers(2) | GapSet::Thm23(2))
}

const REGISTRY: &[BoundEntry] = &[
    BoundEntry {
        id: "odds2-exact",
        family: "odds_plus_two",
        params: "",
        k_range: "2<=k<=8",
        kind: BoundKind::Exact,
        formula: "g(k) = 3k-4 (k odd), 3k-3 (k even)",
        citation: "{2} ∪ odds: two-color formula, confirmed by exhaustive search up to k = 8",
        eval: |s, k, r| {
            (*s == GapSet::OddsPlusTwo && r == 2 && (2..=8).contains(&k)).then(|| g(k).unwrap())
        },
    },
    // The formula is not an upper bound in general: search gives f = 25, 31, 35
    // at k = 9, 11, 12. The colorings C_k / D_k still certify it from below.
    BoundEntry {
        id: "odds2-lower",
        family: "odds_plus_two",
        params: "",
        k_range: "k>=2",
        kind: BoundKind::Lower,
        formula: "g(k)",
        citation: "{2} ∪ odds: colorings C_k / D_k of [1, g(k)-1]",
        eval: |s, k, r| (*s == GapSet::OddsPlusTwo && r == 2 && k >= 2).then(|| g(k).unwrap()),
    },
    BoundEntry {
        id: "odds2-r3-upper",
        family: "odds_plus_two",
        params: "",
        k_range: "k>=1",
        kind: BoundKind::Upper,
        formula: "6k^2-13k+6",
        citation: "{2} ∪ odds: three-color upper bound",
        eval: |s, k, r| {
            (*s == GapSet::OddsPlusTwo && r == 3 && k >= 2).then(|| 6 * k * k + 6 - 13 * k)
        },
    },
    BoundEntry {
        id: "s3-exact",
        family: "s_m",
        params: "m=3",
        k_range: "k>=2",
        kind: BoundKind::Exact,
        formula: "4k-5",
        citation: "non-multiples of 3: mod-4 coloring and pairing induction",
        eval: |s, k, r| (s_m_modulus(s) == Some(3) && r == 2 && k >= 2).then(|| 4 * k - 5),
    },
    BoundEntry {
        id: "s4-exact",
        family: "s_m",
        params: "m=4",
        k_range: "k>=2",
        kind: BoundKind::Exact,
        formula: "g(k)",
        citation: "non-multiples of 4: contains {2} ∪ odds, same colorings C_k / D_k",
        eval: |s, k, r| (s_m_modulus(s) == Some(4) && r == 2 && k >= 2).then(|| g(k).unwrap()),
    },
    BoundEntry {
        id: "sm-small-k",
        family: "s_m",
        params: "m>=5",
        k_range: "1<=k<m",
        kind: BoundKind::Exact,
        formula: "2k-1",
        citation: "non-multiples of m: any k-1/k-1 split avoids, 2k-1 forces",
        eval: |s, k, r| match s_m_modulus(s) {
            Some(m) if m >= 5 && r == 2 && k >= 1 && k < m => Some(2 * k - 1),
            _ => None,
        },
    },
    BoundEntry {
        id: "sm-lower",
        family: "s_m",
        params: "m>=5",
        k_range: "k>=1",
        kind: BoundKind::Lower,
        formula: "2k+2a-1, a = floor(k/m)",
        citation: "non-multiples of m: (10^{m-1})^a (1^{m-1}0)^a 0^b 1^b coloring",
        eval: |s, k, r| match s_m_modulus(s) {
            Some(m) if m >= 5 && r == 2 && k >= 1 => Some(s_m_lower(m, k)),
            _ => None,
        },
    },
    BoundEntry {
        id: "s6-conjecture",
        family: "s_m",
        params: "m=6",
        k_range: "k>=2",
        kind: BoundKind::Conjecture,
        formula: "(5k-4)/2, (5k-5)/2, (5k-6)/2, (5k-7)/2 for k = 2,3,0,1 mod 4",
        citation: "non-multiples of 6: conjectured closed form",
        eval: |s, k, r| (s_m_modulus(s) == Some(6) && r == 2 && k >= 2).then(|| s6_conjecture(k)),
    },
    BoundEntry {
        id: "powers2-lower",
        family: "powers",
        params: "a=2",
        k_range: "k>=3",
        kind: BoundKind::Lower,
        formula: "8(k-3)+1",
        citation: "powers of two: (10010110)^{k-3} coloring",
        eval: |s, k, r| (is_powers_of_two(s) && r == 2 && k >= 3).then(|| 8 * (k - 3) + 1),
    },
    BoundEntry {
        id: "thm23-upper",
        family: "thm23",
        params: "a>=2, a!=3",
        k_range: "k>=1",
        kind: BoundKind::Upper,
        formula: "a^k-a+1",
        citation: "{(a-1)a^j} ∪ {(a-1)^2 a^j}: greedy extension argument",
        eval: |s, k, r| {
            let a = match s {
                GapSet::Thm23(a) => *a,
                GapSet::Powers(2) => 2,
                _ => return None,
            };
            if a == 3 || r != 2 || k < 1 {
                return None;
            }
            u32::try_from(k)
                .ok()
                .and_then(|k| a.checked_pow(k))
                .map(|p| p - a + 1)
        },
    },
    BoundEntry {
        id: "fib-upper",
        family: "fibonacci",
        params: "",
        k_range: "k>=1",
        kind: BoundKind::Upper,
        formula: "F_{k+3}-2",
        citation: "Fibonacci gaps: upper bound",
        eval: |s, k, r| (*s == GapSet::Fibonacci && r == 2 && k >= 1).then(|| fib(k + 3) - 2),
    },
    BoundEntry {
        id: "no34-exact",
        family: "residues",
        params: "m=12; 1,2,5,7,10,11",
        k_range: "k>=3",
        kind: BoundKind::Exact,
        formula: "7k-12",
        citation: "{x : 3∤x, 4∤x}: 14-periodic coloring and mod-12 case analysis",
        eval: |s, k, r| (*s == GapSet::not_div_3_or_4() && r == 2 && k >= 3).then(|| 7 * k - 12),
    },
];

/// Every registered formula, in a fixed order.
pub fn registry() -> &'static [BoundEntry] {
    REGISTRY
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    pub value: u64,
    pub id: String,
}

/// Tightest registered bounds for one `(S, k, r)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lower: Option<BoundValue>,
    pub upper: Option<BoundValue>,
    pub exact: Option<u64>,
    pub conjecture: Option<BoundValue>,
    /// Theorem-backed lower bounds that exceed a theorem-backed upper bound (should stay empty).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conflicts: Vec<String>,
}

impl Bounds {
    pub fn is_empty(&self) -> bool {
        self.lower.is_none() && self.upper.is_none() && self.conjecture.is_none()
    }

    fn offer_lower(&mut self, value: u64, id: String) {
        if self.lower.as_ref().is_none_or(|b| value > b.value) {
            self.lower = Some(BoundValue { value, id });
        }
    }

    fn offer_upper(&mut self, value: u64, id: String) {
        if self.upper.as_ref().is_none_or(|b| value < b.value) {
            self.upper = Some(BoundValue { value, id });
        }
    }

    fn finish(mut self) -> Self {
        if let (Some(lo), Some(hi)) = (&self.lower, &self.upper) {
            if lo.value == hi.value {
                self.exact = Some(lo.value);
            } else if lo.value > hi.value {
                self.conflicts.push(format!("{} > {}", lo.id, hi.id));
            }
        }
        self
    }
}

/// Tightest registered bounds for f(S,k;r). Unknown families give empty bounds.
///
/// Scaled sets inherit the bounds of their base set through `M -> j(M-1)+1`.
pub fn bound(set: &GapSet, k: u64, r: u64) -> Bounds {
    if let GapSet::Scaled(j, inner) = set {
        let base = bound(inner, k, r);
        let map = |b: BoundValue| BoundValue {
            value: scaled_value(b.value, *j),
            id: format!("scaled({j}):{}", b.id),
        };
        return Bounds {
            lower: base.lower.map(map),
            upper: base.upper.map(map),
            exact: base.exact.map(|m| scaled_value(m, *j)),
            conjecture: base.conjecture.map(map),
            conflicts: base.conflicts,
        };
    }
    let mut out = Bounds::default();
    for e in REGISTRY {
        let Some(v) = e.eval(set, k, r) else { continue };
        let id = e.id.to_string();
        match e.kind {
            BoundKind::Exact => {
                out.offer_lower(v, id.clone());
                out.offer_upper(v, id);
            }
            BoundKind::Lower => out.offer_lower(v, id),
            BoundKind::Upper => out.offer_upper(v, id),
            BoundKind::Conjecture => {
                out.conjecture = Some(BoundValue { value: v, id });
            }
        }
    }
    out.finish()
}

/// Registry as CSV: `family,params,k_range,kind,formula,citation`.
pub fn registry_csv() -> String {
    let quote = |s: &str| {
        if s.contains([',', '"']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let mut out = String::from("family,params,k_range,kind,formula,citation\n");
    for e in REGISTRY {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            quote(e.family),
            quote(e.params),
            quote(e.k_range),
            e.kind,
            quote(e.formula),
            quote(e.citation)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> GapSet {
        GapSet::parse(s).unwrap()
    }

    #[test]
    fn g_values() {
        assert_eq!(g(3).unwrap(), 5);
        assert_eq!(g(4).unwrap(), 9);
        assert_eq!(g(2).unwrap(), 3);
        assert!(g(1).is_err());
        for k in 2..200 {
            assert_eq!(g(k + 2).unwrap(), g(k).unwrap() + 6);
        }
    }

    #[test]
    fn fib_values() {
        assert_eq!(fib(1), 1);
        assert_eq!(fib(2), 1);
        assert_eq!(fib(6), 8);
        assert_eq!(fib(10), 55);
    }

    #[test]
    fn scaled_values() {
        assert_eq!(scaled_value(7, 2), 13);
        assert_eq!(scaled_value(3, 1), 3);
        assert_eq!(scaled_value(7, 3), 19);
    }

    #[test]
    fn every_entry_evaluates_everywhere() {
        let specs = [
            "odds_plus_two",
            "s_m(3)",
            "s_m(4)",
            "s_m(5)",
            "s_m(6)",
            "s_m(9)",
            "powers(2)",
            "powers(3)",
            "thm23(2)",
            "thm23(5)",
            "fibonacci",
            "residues(12; 1,2,5,7,10,11)",
            "scaled(3, s_m(3))",
            "primes",
        ];
        for spec in specs {
            for k in 1..=30 {
                for r in 1..=4 {
                    let b = bound(&set(spec), k, r);
                    assert!(
                        b.conflicts.is_empty(),
                        "{spec} k={k} r={r}: {:?}",
                        b.conflicts
                    );
                }
            }
        }
    }

    #[test]
    fn registry_examples() {
        let b = bound(&set("s_m(3)"), 5, 2);
        assert_eq!(b.exact, Some(15));

        let b = bound(&set("powers(2)"), 6, 2);
        assert_eq!(b.lower.as_ref().unwrap().value, 25);
        assert_eq!(b.upper.as_ref().unwrap().value, 63);
        assert_eq!(b.exact, None);

        let b = bound(&set("s_m(6)"), 7, 2);
        assert_eq!(b.conjecture.unwrap().value, 15);
        assert_eq!(b.lower.unwrap().value, 15);

        assert!(bound(&set("primes+3"), 4, 2).is_empty());
        assert_eq!(bound(&set("odds_plus_two"), 8, 2).exact, Some(21));
        let b = bound(&set("odds_plus_two"), 9, 2);
        assert_eq!((b.exact, b.lower.unwrap().value), (None, 23));
        assert_eq!(
            bound(&set("odds_plus_two"), 4, 3).upper.unwrap().value,
            6 * 16 - 52 + 6
        );
        assert_eq!(bound(&set("fibonacci"), 2, 2).upper.unwrap().value, 3);
    }

    #[test]
    fn thm23_at_two_is_powers_upper() {
        for k in 1..20u64 {
            let a = bound(&GapSet::Thm23(2), k, 2).upper.unwrap().value;
            assert_eq!(a, (1 << k) - 1);
            assert_eq!(bound(&set("powers(2)"), k, 2).upper.unwrap().value, a);
        }
        assert!(bound(&GapSet::Thm23(3), 4, 2).upper.is_none());
    }

    #[test]
    fn s_m_lower_law() {
        // a = 0 reproduces the small-k exact value
        for m in 5..10 {
            for k in 1..m {
                assert_eq!(s_m_lower(m, k), 2 * k - 1);
                assert_eq!(
                    bound(&set(&format!("s_m({m})")), k, 2).exact,
                    Some(2 * k - 1)
                );
            }
        }
        // known gap between bound and value at m = 5, k = 8
        assert_eq!(s_m_lower(5, 8), 17);
    }

    #[test]
    fn s6_conjecture_vs_lower_bound() {
        for k in 2..10 {
            assert_eq!(s6_conjecture(k), s_m_lower(6, k), "k={k}");
        }
        // the two closed forms part ways from k = 10 on
        assert_eq!((s6_conjecture(10), s_m_lower(6, 10)), (23, 21));
        assert_eq!((s6_conjecture(11), s_m_lower(6, 11)), (25, 23));
    }

    #[test]
    fn scaled_bounds_propagate() {
        let b = bound(&set("scaled(3, s_m(3))"), 3, 2);
        assert_eq!(b.exact, Some(19));
    }

    #[test]
    fn csv_has_one_row_per_entry() {
        let csv = registry_csv();
        assert_eq!(csv.lines().count(), registry().len() + 1);
        assert!(csv.starts_with("family,params,k_range,kind,formula,citation"));
    }
}
