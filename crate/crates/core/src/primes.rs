//! Deterministic prime sieving.

use std::sync::{OnceLock, RwLock};

const SEGMENT: usize = 1 << 18;

/// Primes `p <= limit` by a simple Eratosthenes sieve.
fn small_primes(limit: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Calls `visit` on every prime in `[2, limit]` in increasing order, sieving
/// in fixed-size segments so memory stays `O(sqrt(limit) + SEGMENT)`.
pub fn for_each_prime(limit: u64, mut visit: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_primes(root as usize);
    let mut seg = vec![true; SEGMENT];
    let mut low = 2u64;
    while low <= limit {
        let high = (low + SEGMENT as u64 - 1).min(limit);
        let len = (high - low + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start <= high {
                seg[(start - low) as usize] = false;
                start += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                visit(low + i as u64);
            }
        }
        low = high + 1;
    }
}

/// All primes in `[2, limit]`.
pub fn sieve(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| out.push(p));
    out
}

/// Primality by trial division. Independent of the sieve; used for re-checks.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Shared primality table that grows on demand.
struct PrimeTable {
    limit: usize,
    is_prime: Vec<bool>,
}

impl PrimeTable {
    fn build(limit: usize) -> Self {
        let mut is_prime = vec![false; limit + 1];
        for_each_prime(limit as u64, |p| is_prime[p as usize] = true);
        PrimeTable { limit, is_prime }
    }
}

fn table() -> &'static RwLock<PrimeTable> {
    static TABLE: OnceLock<RwLock<PrimeTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(PrimeTable::build(1 << 16)))
}

/// Makes sure the shared table covers `[0, n]`.
pub fn ensure(n: u64) {
    let n = n as usize;
    if table().read().unwrap().limit >= n {
        return;
    }
    let mut t = table().write().unwrap();
    if t.limit < n {
        *t = PrimeTable::build(n.max(t.limit * 2));
    }
}

/// Sieve-backed primality test.
pub fn is_prime(n: u64) -> bool {
    ensure(n);
    table().read().unwrap().is_prime[n as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sieves() {
        assert_eq!(sieve(10), vec![2, 3, 5, 7]);
        assert_eq!(sieve(2), vec![2]);
        assert!(sieve(1).is_empty());
    }

    #[test]
    fn segmented_agrees_with_trial_division() {
        let limit = 3 * SEGMENT as u64 + 17;
        let fast = sieve(limit);
        let slow: Vec<u64> = (0..=limit).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn pi_of_a_million() {
        assert_eq!(sieve(1_000_000).len(), 78_498);
    }

    #[test]
    fn table_grows() {
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
        assert!(!is_prime(0) && !is_prime(1) && is_prime(2));
    }
}
