//! Chains of primes whose consecutive gaps are translated primes, and the
//! admissibility test for the offset systems such chains come from.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::{for_each_prime, is_prime_trial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeChain {
    pub t: u64,
    pub elements: Vec<u64>,
    pub gaps: Vec<u64>,
    /// `gap_witnesses[i] = gaps[i] - t`, the prime each gap translates.
    pub gap_witnesses: Vec<u64>,
}

impl PrimeChain {
    pub fn from_elements(t: u64, elements: Vec<u64>) -> Self {
        let gaps: Vec<u64> = elements
            .windows(2)
            .map(|w| w[1].wrapping_sub(w[0]))
            .collect();
        let gap_witnesses = gaps.iter().map(|g| g.wrapping_sub(t)).collect();
        PrimeChain {
            t,
            elements,
            gaps,
            gap_witnesses,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The first `len` elements as a chain of their own.
    pub fn prefix(&self, len: usize) -> PrimeChain {
        PrimeChain::from_elements(self.t, self.elements[..len].to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Depth-first from the smallest start; returns the lexicographically least chain.
    Dfs,
    /// Grows the largest element; returns a chain whose last element is as small as possible.
    Bfs,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Dfs => "dfs",
            Strategy::Bfs => "bfs",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dfs" => Ok(Strategy::Dfs),
            "bfs" => Ok(Strategy::Bfs),
            other => Err(Error::Domain(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainSearch {
    Found(PrimeChain),
    NotFoundUpTo(u64),
}

/// Chain output document.
#[derive(Clone, Debug, Serialize)]
pub struct ChainRecord {
    pub t: u64,
    pub k: usize,
    pub elements: Vec<u64>,
    pub gaps: Vec<u64>,
    pub gap_witnesses: Vec<u64>,
    pub bound: u64,
    pub strategy: Strategy,
}

impl ChainRecord {
    pub fn new(chain: &PrimeChain, bound: u64, strategy: Strategy) -> Self {
        ChainRecord {
            t: chain.t,
            k: chain.len(),
            elements: chain.elements.clone(),
            gaps: chain.gaps.clone(),
            gap_witnesses: chain.gap_witnesses.clone(),
            bound,
            strategy,
        }
    }
}

/// Primes up to a bound: an odd-only bitset for lookups plus the ordered list.
struct PrimeIndex {
    odd_bits: Vec<u64>,
    list: Vec<u64>,
}

impl PrimeIndex {
    fn new(bound: u64) -> Self {
        let mut odd_bits = vec![0u64; (bound / 2 / 64 + 1) as usize];
        let mut list = Vec::new();
        for_each_prime(bound, |p| {
            if p != 2 {
                let h = p / 2;
                odd_bits[(h / 64) as usize] |= 1 << (h % 64);
            }
            list.push(p);
        });
        PrimeIndex { odd_bits, list }
    }

    fn is_prime(&self, x: u64) -> bool {
        if x.is_multiple_of(2) {
            return x == 2;
        }
        let h = x / 2;
        self.odd_bits
            .get((h / 64) as usize)
            .is_some_and(|w| w >> (h % 64) & 1 == 1)
    }

    fn links(&self, t: u64, lo: u64, hi: u64) -> bool {
        hi > lo + t && self.is_prime(hi - lo - t)
    }
}

/// Searches for primes `p_1 < ... < p_k <= bound` with every `p_i - p_{i-1} - t` prime.
pub fn find_chain(t: u64, k: usize, bound: u64, strategy: Strategy) -> Result<ChainSearch> {
    if t.is_multiple_of(2) {
        return Err(Error::Domain(format!("translation t must be odd, got {t}")));
    }
    if k < 2 {
        return Err(Error::Domain(format!(
            "chain length k must be >= 2, got {k}"
        )));
    }
    let index = PrimeIndex::new(bound);
    let found = match strategy {
        Strategy::Dfs => dfs_chain(&index, t, k),
        Strategy::Bfs => bfs_chain(&index, t, k),
    };
    Ok(match found {
        Some(elements) => ChainSearch::Found(PrimeChain::from_elements(t, elements)),
        None => ChainSearch::NotFoundUpTo(bound),
    })
}

fn dfs_chain(index: &PrimeIndex, t: u64, k: usize) -> Option<Vec<u64>> {
    let primes = &index.list;
    // best_from[i] > 0: upper bound on chains starting at primes[i], set once exhausted
    let mut best_from = vec![0u32; primes.len()];
    fn go(
        index: &PrimeIndex,
        t: u64,
        k: usize,
        at: usize,
        chain: &mut Vec<u64>,
        best_from: &mut [u32],
    ) -> bool {
        if chain.len() == k {
            return true;
        }
        let need = (k - chain.len()) as u32;
        let cur = index.list[at];
        let mut longest = 0;
        for next in at + 1..index.list.len() {
            let p = index.list[next];
            if !index.links(t, cur, p) {
                continue;
            }
            if best_from[next] != 0 && best_from[next] < need {
                longest = longest.max(best_from[next]);
                continue;
            }
            chain.push(p);
            if go(index, t, k, next, chain, best_from) {
                return true;
            }
            chain.pop();
            longest = longest.max(best_from[next]);
        }
        // every chain from here is at most 1 + longest long
        best_from[at] = longest + 1;
        false
    }
    for (start, &p) in primes.iter().enumerate() {
        let mut chain = vec![p];
        if go(index, t, k, start, &mut chain, &mut best_from) {
            return Some(chain);
        }
    }
    None
}

fn bfs_chain(index: &PrimeIndex, t: u64, k: usize) -> Option<Vec<u64>> {
    let primes = &index.list;
    let k32 = k as u32;
    // ending[i] = min(k, longest chain ending at primes[i])
    let mut ending: Vec<u32> = Vec::with_capacity(primes.len());
    for (i, &p) in primes.iter().enumerate() {
        let best = (0..i)
            .filter(|&j| index.links(t, primes[j], p))
            .map(|j| ending[j])
            .max()
            .unwrap_or(0);
        let here = (best + 1).min(k32);
        ending.push(here);
        if here == k32 {
            // walk back, taking the smallest predecessor long enough each time
            let mut chain = vec![p];
            let mut cur = i;
            for need in (1..k32).rev() {
                let j = (0..cur)
                    .find(|&j| ending[j] >= need && index.links(t, primes[j], primes[cur]))
                    .expect("a predecessor exists");
                chain.push(primes[j]);
                cur = j;
            }
            chain.reverse();
            return Some(chain);
        }
    }
    None
}

/// Independent re-check by trial division.
pub fn verify_chain(chain: &PrimeChain) -> bool {
    let n = chain.elements.len();
    n >= 1
        && chain.gaps.len() == n - 1
        && chain.gap_witnesses.len() == n - 1
        && chain.elements.iter().all(|&p| is_prime_trial(p))
        && chain
            .elements
            .windows(2)
            .zip(&chain.gaps)
            .zip(&chain.gap_witnesses)
            .all(|((w, &g), &q)| {
                w[1] > w[0]
                    && w[1] - w[0] == g
                    && g > chain.t
                    && g - chain.t == q
                    && is_prime_trial(q)
            })
}

/// Offsets `b_1 = 0 < b_2 < ...` of the polynomials `y + b_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetSystem {
    pub t: u64,
    /// `(q_1, ..., q_{k-1})` when built from a tuple.
    pub source: Vec<u64>,
    pub offsets: Vec<u64>,
}

impl OffsetSystem {
    /// `b_i = Σ_{j<i} (q_j + t)`.
    pub fn from_tuple(t: u64, qs: &[u64]) -> Self {
        let mut offsets = Vec::with_capacity(qs.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &q in qs {
            acc += q + t;
            offsets.push(acc);
        }
        OffsetSystem {
            t,
            source: qs.to_vec(),
            offsets,
        }
    }

    pub fn from_offsets(offsets: Vec<u64>) -> Self {
        OffsetSystem {
            t: 0,
            source: Vec::new(),
            offsets,
        }
    }
}

/// True iff some residue `h (mod p)` keeps every `h + b_i` off `0 (mod p)`.
pub fn is_p_admissible(sys: &OffsetSystem, p: u64) -> bool {
    let mut hit = vec![false; p as usize];
    for &b in &sys.offsets {
        // h ≡ -b (mod p) makes h + b divisible by p
        hit[((p - b % p) % p) as usize] = true;
    }
    hit.iter().any(|&h| !h)
}

/// Admissibility checked at the primes `p < k`; every prime `p >= k` has more
/// residues than the system has offsets whenever there are at most `k` of them.
pub fn is_admissible_small_primes(sys: &OffsetSystem, k: u64) -> bool {
    (2..k)
        .filter(|&p| is_prime_trial(p))
        .all(|p| is_p_admissible(sys, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn found(t: u64, k: usize, bound: u64, s: Strategy) -> PrimeChain {
        match find_chain(t, k, bound, s).unwrap() {
            ChainSearch::Found(c) => c,
            other => panic!("no chain: {other:?}"),
        }
    }

    #[test]
    fn short_chains() {
        assert_eq!(found(1, 2, 10, Strategy::Dfs).elements, vec![2, 5]);
        assert_eq!(found(3, 2, 20, Strategy::Dfs).elements, vec![2, 7]);
        let c = found(1, 3, 100, Strategy::Dfs);
        assert_eq!(c.elements, vec![2, 5, 11]);
        assert_eq!(c.gaps, vec![3, 6]);
        assert_eq!(c.gap_witnesses, vec![2, 5]);
        assert!(verify_chain(&c));
    }

    #[test]
    fn rejects_even_translation() {
        assert!(find_chain(2, 3, 100, Strategy::Dfs).is_err());
        assert!(find_chain(1, 1, 100, Strategy::Dfs).is_err());
    }

    #[test]
    fn not_found_below_tiny_bound() {
        assert_eq!(
            find_chain(1, 4, 10, Strategy::Dfs).unwrap(),
            ChainSearch::NotFoundUpTo(10)
        );
        assert_eq!(
            find_chain(1, 4, 10, Strategy::Bfs).unwrap(),
            ChainSearch::NotFoundUpTo(10)
        );
    }

    #[test]
    fn verify_rejects_bad_chains() {
        assert!(!verify_chain(&PrimeChain::from_elements(
            1,
            vec![5, 11, 18]
        )));
        assert!(!verify_chain(&PrimeChain::from_elements(
            1,
            vec![5, 12, 17]
        )));
        assert!(verify_chain(&PrimeChain::from_elements(1, vec![5, 11, 17])));
        let mut c = PrimeChain::from_elements(1, vec![5, 11, 17]);
        c.gap_witnesses[0] = 7;
        assert!(!verify_chain(&c));
    }

    #[test]
    fn bfs_minimizes_last_element() {
        for t in [1, 3, 5] {
            for k in 2..6 {
                let d = found(t, k, 100_000, Strategy::Dfs);
                let b = found(t, k, 100_000, Strategy::Bfs);
                assert!(verify_chain(&b));
                assert!(b.elements.last() <= d.elements.last());
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(!is_p_admissible(&OffsetSystem::from_offsets(vec![0, 1]), 2));
        assert!(is_p_admissible(&OffsetSystem::from_offsets(vec![0, 2]), 2));
        let sys = OffsetSystem::from_tuple(1, &[5, 5]);
        assert_eq!(sys.offsets, vec![0, 6, 12]);
        assert!(is_p_admissible(&sys, 3));

        let sys = OffsetSystem::from_tuple(1, &[5, 7, 11]);
        assert_eq!(sys.offsets, vec![0, 6, 14, 26]);
        assert!(is_admissible_small_primes(&sys, 4));
        assert!(is_admissible_small_primes(
            &OffsetSystem::from_offsets(vec![0]),
            2
        ));
        assert!(!is_admissible_small_primes(
            &OffsetSystem::from_offsets(vec![0, 1, 2]),
            4
        ));
    }
}
