//! Longest monochromatic S-diffsequence in a colored interval.
//!
//! `L[i]` is the length of the longest monochromatic S-diffsequence ending at
//! `i`: `L[i] = 1 + max { L[i-s] : s ∈ S, s < i, color(i-s) = color(i) }`.

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::sets::{GapMask, GapSet};

/// Largest interval the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_N: usize = 20;

/// A monochromatic diffsequence found in a coloring. Positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffseqWitness {
    pub positions: Vec<usize>,
    pub color: u8,
}

impl DiffseqWitness {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Re-checks the witness against a coloring and gap set, independently of the DP.
    pub fn is_valid_for(&self, c: &Coloring, set: &GapSet) -> bool {
        !self.positions.is_empty()
            && self
                .positions
                .iter()
                .all(|&x| x >= 1 && x <= c.n() && c.color_of(x) == self.color)
            && self
                .positions
                .windows(2)
                .all(|w| w[1] > w[0] && set.contains((w[1] - w[0]) as u64))
    }
}

/// Runs the DP over positions where `allowed` holds (all positions if `None`).
/// Returns the L array (0 for skipped positions) and back-pointers.
fn chain_lengths(
    colors: &[u8],
    mask: &GapMask,
    allowed: Option<&[bool]>,
) -> (Vec<u32>, Vec<usize>) {
    let n = colors.len();
    let mut lens = vec![0u32; n];
    let mut back = vec![usize::MAX; n];
    for i in 0..n {
        if allowed.is_some_and(|a| !a[i]) {
            continue;
        }
        let mut best = 0u32;
        let mut pred = usize::MAX;
        // gaps ascend, so predecessors i - s descend; `>=` keeps the smallest on ties
        for &s in mask.gaps() {
            if s > i {
                break;
            }
            let j = i - s;
            if colors[j] == colors[i] && lens[j] >= best && lens[j] > 0 {
                best = lens[j];
                pred = j;
            }
        }
        lens[i] = best + 1;
        back[i] = pred;
    }
    (lens, back)
}

fn best_witness(colors: &[u8], lens: &[u32], back: &[usize]) -> (usize, DiffseqWitness) {
    let (end, &len) = lens
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, &l)| l)
        .expect("non-empty coloring");
    if len == 0 {
        return (
            0,
            DiffseqWitness {
                positions: Vec::new(),
                color: 0,
            },
        );
    }
    let mut positions = Vec::with_capacity(len as usize);
    let mut cur = end;
    loop {
        positions.push(cur + 1);
        if back[cur] == usize::MAX {
            break;
        }
        cur = back[cur];
    }
    positions.reverse();
    (
        len as usize,
        DiffseqWitness {
            positions,
            color: colors[end],
        },
    )
}

/// Longest monochromatic S-diffsequence together with one witness attaining it.
///
/// Ties are broken deterministically: the earliest end position wins, and each
/// step follows the smallest predecessor attaining the maximum.
pub fn longest_mono_diffseq(c: &Coloring, set: &GapSet) -> (usize, DiffseqWitness) {
    longest_with_mask(c, &set.mask(c.n()))
}

pub fn longest_with_mask(c: &Coloring, mask: &GapMask) -> (usize, DiffseqWitness) {
    let (lens, back) = chain_lengths(c.colors(), mask, None);
    best_witness(c.colors(), &lens, &back)
}

/// Same as [`longest_mono_diffseq`] but only positions with `allowed[i - 1]`
/// may appear in the diffsequence. Length 0 means no position is allowed.
pub fn longest_restricted(
    c: &Coloring,
    mask: &GapMask,
    allowed: &[bool],
) -> Result<(usize, DiffseqWitness)> {
    if allowed.len() != c.n() {
        return Err(Error::LengthMismatch(allowed.len(), c.n()));
    }
    let (lens, back) = chain_lengths(c.colors(), mask, Some(allowed));
    Ok(best_witness(c.colors(), &lens, &back))
}

/// Whether `c` contains a monochromatic k-term S-diffsequence. Stops at the first one.
pub fn has_k_term(c: &Coloring, set: &GapSet, k: usize) -> bool {
    has_k_term_mask(c.colors(), &set.mask(c.n()), k)
}

pub fn has_k_term_mask(colors: &[u8], mask: &GapMask, k: usize) -> bool {
    if k <= 1 {
        return !colors.is_empty();
    }
    let mut state = ChainState::new(mask.gaps().to_vec());
    colors.iter().any(|&col| state.extend(col, k).prune)
}

/// Outcome of coloring the next position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extension {
    /// L value of the newly colored position.
    pub len: u32,
    /// `len >= k`: the prefix already holds a monochromatic k-term diffsequence.
    pub prune: bool,
}

/// Incremental, undoable form of the DP: positions are colored strictly left
/// to right, so retracting the last one only pops it.
#[derive(Clone, Debug)]
pub struct ChainState {
    gaps: Vec<usize>,
    colors: Vec<u8>,
    lens: Vec<u32>,
}

impl ChainState {
    /// `gaps` must be sorted ascending.
    pub fn new(gaps: Vec<usize>) -> Self {
        debug_assert!(gaps.windows(2).all(|w| w[0] < w[1]));
        ChainState {
            gaps,
            colors: Vec::new(),
            lens: Vec::new(),
        }
    }

    pub fn from_mask(mask: &GapMask) -> Self {
        ChainState::new(mask.gaps().to_vec())
    }

    /// Number of positions colored so far.
    pub fn assigned(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn lens(&self) -> &[u32] {
        &self.lens
    }

    /// L value position `assigned + 1` would get with `color`, without committing.
    pub fn peek(&self, color: u8) -> u32 {
        let i = self.colors.len();
        let mut best = 0;
        for &s in &self.gaps {
            if s > i {
                break;
            }
            if self.colors[i - s] == color {
                best = best.max(self.lens[i - s]);
            }
        }
        best + 1
    }

    pub fn extend(&mut self, color: u8, k: usize) -> Extension {
        let len = self.peek(color);
        self.colors.push(color);
        self.lens.push(len);
        Extension {
            len,
            prune: len as usize >= k,
        }
    }

    /// Undoes the most recent [`extend`](Self::extend).
    pub fn retract(&mut self) {
        self.colors.pop();
        self.lens.pop();
    }
}

/// Exhaustive oracle: tries every subset of positions, with no DP.
pub fn brute_force_longest(c: &Coloring, set: &GapSet) -> Result<usize> {
    let n = c.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::OracleGuard(n, BRUTE_FORCE_MAX_N));
    }
    let member: Vec<bool> = (0..n as u64).map(|d| set.contains(d)).collect();
    let colors = c.colors();
    let mut best = 0;
    for subset in 1u32..(1 << n) {
        let size = subset.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut prev: Option<usize> = None;
        let mut ok = true;
        let mut bits = subset;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if let Some(p) = prev {
                if colors[p] != colors[x] || !member[x - p] {
                    ok = false;
                    break;
                }
            }
            prev = Some(x);
        }
        if ok {
            best = size;
        }
    }
    Ok(best)
}
