//! Exact computation of f(S,k;r) by complete backtracking over colorings of `[1, n]`.
//!
//! Positions are colored left to right. Colors must first appear in increasing
//! order (position 1 is always color 0), so every coloring is searched once up
//! to relabeling and the first solution found is the lexicographically least
//! canonical one.
//!
//! Besides the L-array prune (a position whose L value reaches `k`), the
//! search keeps, for every uncolored position `j` and color `c`, the largest L
//! value among colored positions `x` of color `c` with `j - x ∈ S`. Those L
//! values are final once `x` is colored, so when every color is already
//! blocked at some `j <= n` the branch is dead and is cut immediately.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::chain::has_k_term;
use crate::coloring::{colors_to_text, Coloring, MAX_COLORS};
use crate::error::{Error, Result};
use crate::formulas;
use crate::sets::GapSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes: Some(max_nodes),
            max_time: None,
        }
    }

    pub fn time(max_time: Duration) -> Self {
        SearchBudget {
            max_nodes: None,
            max_time: Some(max_time),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub budget: SearchBudget,
    /// Worker threads; results do not depend on it.
    pub workers: usize,
    /// Start the upward iteration at the best theorem-backed lower bound
    /// instead of at `k`.
    pub seed_bounds: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: SearchBudget::unlimited(),
            workers: 1,
            seed_bounds: true,
        }
    }
}

impl SolveOptions {
    pub fn with_budget(budget: SearchBudget) -> Self {
        SolveOptions {
            budget,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A coloring of `[1, n]` with no monochromatic k-term diffsequence.
    Coloring(Coloring),
    /// The complete search exhausted without finding one.
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleOutcome {
    pub result: Feasibility,
    pub nodes: u64,
}

fn validate(k: usize, r: usize, n: usize) -> Result<()> {
    if k == 0 || r == 0 || n == 0 {
        return Err(Error::Domain(format!(
            "need k, r, n >= 1 (k={k}, r={r}, n={n})"
        )));
    }
    if r > MAX_COLORS {
        return Err(Error::Domain(format!(
            "at most {MAX_COLORS} colors, got {r}"
        )));
    }
    Ok(())
}

/// Sequential feasibility search at fixed `n`.
pub fn feasible(
    set: &GapSet,
    k: usize,
    r: usize,
    n: usize,
    budget: SearchBudget,
) -> Result<FeasibleOutcome> {
    feasible_with(set, k, r, n, &SolveOptions::with_budget(budget))
}

pub fn feasible_with(
    set: &GapSet,
    k: usize,
    r: usize,
    n: usize,
    opts: &SolveOptions,
) -> Result<FeasibleOutcome> {
    validate(k, r, n)?;
    let mask = set.mask(n);
    let limits = Limits::new(opts.budget);
    let out = run_search(mask.gaps(), k, r, n, opts.workers.max(1), &limits);
    Ok(out.into_outcome(r))
}

struct Limits {
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    spent: AtomicU64,
    stop: AtomicBool,
}

impl Limits {
    fn new(budget: SearchBudget) -> Self {
        Limits {
            max_nodes: budget.max_nodes,
            deadline: budget.max_time.map(|d| Instant::now() + d),
            spent: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    /// Charges `nodes` to the shared budget; true when the search must stop.
    fn charge(&self, nodes: u64) -> bool {
        let total = self.spent.fetch_add(nodes, Ordering::Relaxed) + nodes;
        if self.max_nodes.is_some_and(|m| total > m)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
        {
            self.stop.store(true, Ordering::Relaxed);
        }
        self.stop.load(Ordering::Relaxed)
    }
}

enum Step {
    Found,
    Exhausted,
    Abort,
}

const CHECK_EVERY: u64 = 1 << 14;

struct Engine<'a> {
    n: usize,
    k: u32,
    r: usize,
    gaps: &'a [usize],
    colors: Vec<u8>,
    depth: usize,
    /// `reach[j*r + c]`: max L over colored `x` of color `c` with `j - x ∈ S`.
    reach: Vec<u32>,
    /// Number of colors at `j` whose use would complete a k-term sequence.
    blocked: Vec<u8>,
    trail: Vec<(u32, u32)>,
    marks: Vec<usize>,
    /// Distinct colors used by the prefix of each depth.
    used: Vec<u8>,
    nodes: u64,
    unreported: u64,
    limits: &'a Limits,
    cancel: Option<(&'a AtomicUsize, usize)>,
}

impl<'a> Engine<'a> {
    fn new(gaps: &'a [usize], k: usize, r: usize, n: usize, limits: &'a Limits) -> Self {
        Engine {
            n,
            k: k as u32,
            r,
            gaps,
            colors: vec![0; n],
            depth: 0,
            reach: vec![0; n * r],
            blocked: vec![0; n],
            trail: Vec::new(),
            marks: Vec::with_capacity(n),
            used: vec![0; n + 1],
            nodes: 0,
            unreported: 0,
            limits,
            cancel: None,
        }
    }

    /// Colors position `depth + 1` with `c`; on failure the state is unchanged.
    fn assign(&mut self, c: u8) -> bool {
        let i = self.depth;
        let r = self.r;
        let len = self.reach[i * r + c as usize] + 1;
        if len >= self.k {
            return false;
        }
        let threshold = self.k - 1;
        self.marks.push(self.trail.len());
        self.colors[i] = c;
        self.used[i + 1] = self.used[i].max(c + 1);
        self.depth += 1;
        let mut wiped = false;
        for &s in self.gaps {
            let j = i + s;
            if j >= self.n {
                break;
            }
            let idx = j * r + c as usize;
            let old = self.reach[idx];
            if old < len {
                self.trail.push((idx as u32, old));
                self.reach[idx] = len;
                if len >= threshold && old < threshold {
                    self.blocked[j] += 1;
                    if self.blocked[j] as usize == r {
                        wiped = true;
                        break;
                    }
                }
            }
        }
        if wiped {
            self.undo();
            return false;
        }
        true
    }

    fn undo(&mut self) {
        let mark = self.marks.pop().expect("undo without assign");
        let threshold = self.k - 1;
        while self.trail.len() > mark {
            let (idx, old) = self.trail.pop().unwrap();
            let idx = idx as usize;
            if self.reach[idx] >= threshold && old < threshold {
                self.blocked[idx / self.r] -= 1;
            }
            self.reach[idx] = old;
        }
        self.depth -= 1;
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.unreported += 1;
        if self.unreported >= CHECK_EVERY {
            let n = std::mem::take(&mut self.unreported);
            if self.limits.charge(n) {
                return true;
            }
            if let Some((best, me)) = self.cancel {
                if best.load(Ordering::Relaxed) < me {
                    return true;
                }
            }
        }
        false
    }

    fn flush(&mut self) -> bool {
        let n = std::mem::take(&mut self.unreported);
        self.limits.charge(n)
    }

    fn dfs(&mut self) -> Step {
        if self.depth == self.n {
            return Step::Found;
        }
        let choices = (self.used[self.depth] as usize + 1).min(self.r) as u8;
        for c in 0..choices {
            if self.tick() {
                return Step::Abort;
            }
            if self.assign(c) {
                match self.dfs() {
                    Step::Exhausted => self.undo(),
                    other => return other,
                }
            }
        }
        Step::Exhausted
    }

    /// Enumerates prefixes of length `split` in search order. Every node visited
    /// is charged to the task that follows it, so summing task counts up to the
    /// first solving task reproduces the sequential count.
    fn collect_prefixes(&mut self, split: usize, out: &mut Vec<(Vec<u8>, u64)>, pending: &mut u64) {
        if self.depth == split {
            out.push((self.colors[..split].to_vec(), std::mem::take(pending)));
            return;
        }
        let choices = (self.used[self.depth] as usize + 1).min(self.r) as u8;
        for c in 0..choices {
            *pending += 1;
            if self.assign(c) {
                self.collect_prefixes(split, out, pending);
                self.undo();
            }
        }
    }
}

struct SearchOutcome {
    found: Option<Vec<u8>>,
    exhausted: bool,
    nodes: u64,
}

impl SearchOutcome {
    fn into_outcome(self, r: usize) -> FeasibleOutcome {
        let result = match (self.found, self.exhausted) {
            (Some(colors), _) => {
                Feasibility::Coloring(Coloring::new(colors, r).expect("valid colors"))
            }
            (None, true) => Feasibility::Infeasible,
            (None, false) => Feasibility::BudgetExceeded,
        };
        FeasibleOutcome {
            result,
            nodes: self.nodes,
        }
    }
}

fn run_search(
    gaps: &[usize],
    k: usize,
    r: usize,
    n: usize,
    workers: usize,
    limits: &Limits,
) -> SearchOutcome {
    let split = (workers as f64).log2().ceil() as usize + 2;
    if workers <= 1 || split >= n {
        let mut eng = Engine::new(gaps, k, r, n, limits);
        let step = eng.dfs();
        eng.flush();
        return match step {
            Step::Found => SearchOutcome {
                found: Some(eng.colors),
                exhausted: false,
                nodes: eng.nodes,
            },
            Step::Exhausted => SearchOutcome {
                found: None,
                exhausted: true,
                nodes: eng.nodes,
            },
            Step::Abort => SearchOutcome {
                found: None,
                exhausted: false,
                nodes: eng.nodes,
            },
        };
    }

    let mut prefixes = Vec::new();
    let mut trailing = 0u64;
    Engine::new(gaps, k, r, n, limits).collect_prefixes(split, &mut prefixes, &mut trailing);

    let best = AtomicUsize::new(usize::MAX);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let results: Vec<(Step, u64, Option<Vec<u8>>)> = pool.install(|| {
        use rayon::prelude::*;
        prefixes
            .par_iter()
            .enumerate()
            .map(|(idx, (prefix, _))| {
                if best.load(Ordering::Relaxed) < idx {
                    return (Step::Abort, 0, None);
                }
                let mut eng = Engine::new(gaps, k, r, n, limits);
                eng.cancel = Some((&best, idx));
                for &c in prefix {
                    let ok = eng.assign(c);
                    debug_assert!(ok);
                }
                let step = eng.dfs();
                eng.flush();
                let found = matches!(step, Step::Found).then(|| eng.colors.clone());
                if found.is_some() {
                    best.fetch_min(idx, Ordering::Relaxed);
                }
                (step, eng.nodes, found)
            })
            .collect()
    });

    let mut nodes = 0;
    for ((step, task_nodes, found), (_, pre)) in results.into_iter().zip(&prefixes) {
        nodes += pre + task_nodes;
        match step {
            Step::Found => {
                return SearchOutcome {
                    found,
                    exhausted: false,
                    nodes,
                }
            }
            Step::Exhausted => {}
            Step::Abort => {
                return SearchOutcome {
                    found: None,
                    exhausted: false,
                    nodes,
                }
            }
        }
    }
    SearchOutcome {
        found: None,
        exhausted: true,
        nodes: nodes + trailing,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// The value is f(S,k;r).
    Exact,
    /// A single feasibility check succeeded at this n.
    FeasibleAt(u64),
    /// Every n up to the bound admits an avoiding coloring.
    NotFoundUpTo(u64),
    /// Budget ran out; carries the largest n proven feasible.
    Timeout(u64),
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::Exact => f.write_str("Exact"),
            SolveStatus::FeasibleAt(n) => write!(f, "FeasibleAt({n})"),
            SolveStatus::NotFoundUpTo(n) => write!(f, "NotFoundUpTo({n})"),
            SolveStatus::Timeout(n) => write!(f, "Timeout({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub spec: String,
    pub k: usize,
    pub r: usize,
    pub status: SolveStatus,
    /// f(S,k;r) when `status` is `Exact`.
    pub value: Option<u64>,
    /// Largest avoiding coloring found. For `Exact` it colors `[1, value - 1]`;
    /// `None` when that interval is empty.
    pub certificate: Option<Coloring>,
    pub nodes: u64,
    pub elapsed: Duration,
    /// Where the upward iteration started (largest n assumed feasible + 1).
    pub start: u64,
}

/// Wire form of [`SolveResult`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub spec: String,
    pub k: usize,
    pub r: usize,
    pub status: String,
    pub value: Option<u64>,
    pub certificate: Option<String>,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub version: String,
}

impl SolveResult {
    pub fn to_record(&self) -> SolveRecord {
        SolveRecord {
            spec: self.spec.clone(),
            k: self.k,
            r: self.r,
            status: self.status.to_string(),
            value: self.value,
            certificate: self.certificate.as_ref().map(Coloring::to_text),
            nodes: self.nodes,
            elapsed_ms: self.elapsed.as_millis() as u64,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("serializable")
    }
}

/// f(S,k;r) by iterating `n` upward until the feasibility search exhausts.
///
/// The iteration starts from the largest theorem-backed lower bound (or `k`).
/// If that bound turns out to be infeasible the search walks downward instead,
/// so a wrong bound can cost time but never corrupt the value.
pub fn compute_f(
    set: &GapSet,
    k: usize,
    r: usize,
    n_max: u64,
    budget: SearchBudget,
) -> Result<SolveResult> {
    compute_f_with(set, k, r, n_max, &SolveOptions::with_budget(budget))
}

pub fn compute_f_with(
    set: &GapSet,
    k: usize,
    r: usize,
    n_max: u64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    validate(k, r, 1)?;
    let started = Instant::now();
    let seeded = if opts.seed_bounds {
        formulas::bound(set, k as u64, r as u64)
            .lower
            .map_or(0, |b| b.value)
    } else {
        0
    };
    let start = seeded.max(k as u64);

    let mut result = SolveResult {
        spec: set.to_string(),
        k,
        r,
        status: SolveStatus::NotFoundUpTo(n_max),
        value: None,
        certificate: None,
        nodes: 0,
        elapsed: Duration::ZERO,
        start,
    };

    let remaining = |spent: u64| SolveOptions {
        budget: SearchBudget {
            max_nodes: opts.budget.max_nodes.map(|m| m.saturating_sub(spent)),
            max_time: opts
                .budget
                .max_time
                .map(|t| t.saturating_sub(started.elapsed())),
        },
        ..*opts
    };
    let step = |n: u64, res: &mut SolveResult| -> Result<Feasibility> {
        let out = feasible_with(set, k, r, n as usize, &remaining(res.nodes))?;
        res.nodes += out.nodes;
        Ok(out.result)
    };

    let mut n = start - 1;
    if n > n_max {
        result.elapsed = started.elapsed();
        return Ok(result);
    }
    // establish feasibility at start - 1
    if n >= 1 {
        loop {
            match step(n, &mut result)? {
                Feasibility::Coloring(c) => {
                    result.certificate = Some(c);
                    break;
                }
                Feasibility::Infeasible => {
                    if n == 1 {
                        // every coloring of [1,1] already fails, so f = 1
                        result.status = SolveStatus::Exact;
                        result.value = Some(1);
                        result.elapsed = started.elapsed();
                        return Ok(result);
                    }
                    n -= 1;
                    result.status = SolveStatus::Exact;
                }
                Feasibility::BudgetExceeded => {
                    result.status = SolveStatus::Timeout(0);
                    result.elapsed = started.elapsed();
                    return Ok(result);
                }
            }
        }
        if result.status == SolveStatus::Exact {
            result.value = Some(n + 1);
            result.elapsed = started.elapsed();
            return Ok(result);
        }
    }

    for n in (n + 1)..=n_max {
        match step(n, &mut result)? {
            Feasibility::Coloring(c) => result.certificate = Some(c),
            Feasibility::Infeasible => {
                result.status = SolveStatus::Exact;
                result.value = Some(n);
                break;
            }
            Feasibility::BudgetExceeded => {
                result.status = SolveStatus::Timeout(n - 1);
                break;
            }
        }
    }
    result.elapsed = started.elapsed();
    Ok(result)
}

/// Single feasibility check at `n`, reported as a [`SolveResult`].
pub fn check_at(
    set: &GapSet,
    k: usize,
    r: usize,
    n: u64,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let started = Instant::now();
    let out = feasible_with(set, k, r, n as usize, opts)?;
    let (status, value, certificate) = match out.result {
        Feasibility::Coloring(c) => (SolveStatus::FeasibleAt(n), None, Some(c)),
        // infeasible at n only bounds f from above
        Feasibility::Infeasible => (SolveStatus::NotFoundUpTo(0), None, None),
        Feasibility::BudgetExceeded => (SolveStatus::Timeout(0), None, None),
    };
    Ok(SolveResult {
        spec: set.to_string(),
        k,
        r,
        status,
        value,
        certificate,
        nodes: out.nodes,
        elapsed: started.elapsed(),
        start: n,
    })
}

/// Re-checks an `Exact` result: the certificate avoids k-term sequences and a
/// fresh search at `value` exhausts.
pub fn verify_certificate(result: &SolveResult, set: &GapSet, k: usize, r: usize) -> bool {
    let (SolveStatus::Exact, Some(value)) = (result.status, result.value) else {
        return false;
    };
    if value == 0 {
        return false;
    }
    let cert_ok = match &result.certificate {
        None => value == 1,
        Some(c) => c.n() as u64 == value - 1 && c.r() <= r && !has_k_term(c, set, k),
    };
    cert_ok
        && matches!(
            feasible(set, k, r, value as usize, SearchBudget::unlimited()).map(|o| o.result),
            Ok(Feasibility::Infeasible)
        )
}

/// Text rendering of a raw prefix, for diagnostics.
pub fn describe_prefix(colors: &[u8]) -> String {
    colors_to_text(colors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> GapSet {
        GapSet::parse(s).unwrap()
    }

    fn feas(s: &str, k: usize, r: usize, n: usize) -> Feasibility {
        feasible(&set(s), k, r, n, SearchBudget::unlimited())
            .unwrap()
            .result
    }

    fn exact(s: &str, k: usize) -> u64 {
        let res = compute_f(&set(s), k, 2, 500, SearchBudget::unlimited()).unwrap();
        assert_eq!(res.status, SolveStatus::Exact, "{s} k={k}");
        res.value.unwrap()
    }

    #[test]
    fn two_singletons() {
        assert_eq!(
            feas("odds_plus_two", 2, 2, 2),
            Feasibility::Coloring(Coloring::parse("01", 2).unwrap())
        );
    }

    #[test]
    fn powers_of_two_k3() {
        assert!(matches!(
            feas("powers(2)", 3, 2, 6),
            Feasibility::Coloring(_)
        ));
        assert_eq!(feas("powers(2)", 3, 2, 7), Feasibility::Infeasible);
        assert_eq!(feas("s_m(3)", 3, 2, 7), Feasibility::Infeasible);
    }

    #[test]
    fn small_exact_values() {
        assert_eq!(exact("s_m(5)", 2), 3);
        assert_eq!(exact("powers(2)", 4), 11);
        assert_eq!(exact("primes", 3), 9);
    }

    #[test]
    fn unit_gap_never_forced() {
        let res = compute_f(&set("explicit(1)"), 2, 2, 100, SearchBudget::unlimited()).unwrap();
        assert_eq!(res.status, SolveStatus::NotFoundUpTo(100));
        assert_eq!(res.certificate.unwrap().n(), 100);
    }

    #[test]
    fn k_one_is_one() {
        let res = compute_f(&set("primes"), 1, 3, 10, SearchBudget::unlimited()).unwrap();
        assert_eq!((res.status, res.value), (SolveStatus::Exact, Some(1)));
        assert!(res.certificate.is_none());
        assert!(verify_certificate(&res, &set("primes"), 1, 3));
    }

    #[test]
    fn one_color_is_first_k_chain() {
        // with one color f is the least n such that [1,n] contains a k-term chain
        let res = compute_f(&set("explicit(2)"), 3, 1, 20, SearchBudget::unlimited()).unwrap();
        assert_eq!(res.value, Some(5));
    }

    #[test]
    fn certificate_checks() {
        let s = set("s_m(3)");
        let res = compute_f(&s, 3, 2, 100, SearchBudget::unlimited()).unwrap();
        assert_eq!(res.value, Some(7));
        assert!(verify_certificate(&res, &s, 3, 2));

        // flipping one color must create a 3-term chain somewhere
        let cert = res.certificate.clone().unwrap();
        let mut detected = 0;
        for i in 0..cert.n() {
            let mut colors = cert.colors().to_vec();
            colors[i] ^= 1;
            let mut bad = res.clone();
            bad.certificate = Some(Coloring::new(colors, 2).unwrap());
            if has_k_term(bad.certificate.as_ref().unwrap(), &s, 3) {
                assert!(!verify_certificate(&bad, &s, 3, 2));
                detected += 1;
            }
        }
        assert!(detected > 0);

        let mut low = res.clone();
        low.value = Some(6);
        low.certificate = Some(cert.truncate(5).unwrap());
        assert!(!verify_certificate(&low, &s, 3, 2));
    }

    #[test]
    fn budget_exceeded_reports_timeout() {
        let res = compute_f(&set("powers(2)"), 8, 2, 100, SearchBudget::nodes(50)).unwrap();
        assert!(matches!(res.status, SolveStatus::Timeout(_)));
        assert_eq!(res.value, None);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = set("primes+1");
        for n in [8usize, 12, 13] {
            let one = feasible_with(
                &s,
                3,
                2,
                n,
                &SolveOptions {
                    workers: 1,
                    ..Default::default()
                },
            )
            .unwrap();
            for w in [2, 3, 8] {
                let many = feasible_with(
                    &s,
                    3,
                    2,
                    n,
                    &SolveOptions {
                        workers: w,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(one, many, "n={n} workers={w}");
            }
        }
    }

    #[test]
    fn json_record() {
        let res = compute_f(&set("s_m(3)"), 3, 2, 100, SearchBudget::unlimited()).unwrap();
        let rec: SolveRecord = serde_json::from_str(&res.to_json()).unwrap();
        assert_eq!(rec.status, "Exact");
        assert_eq!(rec.value, Some(7));
        assert_eq!(rec.certificate.unwrap().len(), 6);
        assert_eq!(rec.spec, "s_m(3)");
    }
}
