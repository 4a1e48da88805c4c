//! Gray-code enumeration of sign vectors with a deterministic parallel max-reduce.
//!
//! Sign vector `s in {+1, -1}^bits` is encoded as a mask whose bit `j` is set
//! iff `s_j = -1`. The search space is cut into fixed chunks of `2^16` Gray
//! indices; each chunk is initialized directly and then walked by single-bit
//! flips, so each step costs whatever the caller's incremental update costs.
//! Equal values resolve to the lowest mask, which makes the result independent
//! of thread count and scheduling.

use rayon::prelude::*;

const CHUNK_BITS: usize = 16;

/// Best `(value, mask)`: larger value wins, the lower mask wins on ties.
#[inline]
pub(crate) fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

const NONE: (f64, u64) = (f64::NEG_INFINITY, u64::MAX);

#[inline]
fn gray(g: u64) -> u64 {
    g ^ (g >> 1)
}

/// Sequential scan of all `2^bits` masks.
///
/// `init(mask)` builds the state for a mask, `flip(state, j, negative)` flips
/// bit `j` (to `-1` when `negative`) and `value(state)` scores it.
pub(crate) fn gray_max_seq<S, I, F, V>(bits: usize, init: I, flip: F, value: V) -> (f64, u64)
where
    I: Fn(u64) -> S,
    F: Fn(&mut S, usize, bool),
    V: Fn(&S) -> f64,
{
    scan(0, 1u64 << bits, &init, &flip, &value)
}

/// Parallel version of [`gray_max_seq`] over fixed-size chunks.
pub(crate) fn gray_max<S, I, F, V>(bits: usize, init: I, flip: F, value: V) -> (f64, u64)
where
    I: Fn(u64) -> S + Sync,
    F: Fn(&mut S, usize, bool) + Sync,
    V: Fn(&S) -> f64 + Sync,
{
    assert!(bits < 63, "sign-vector enumeration limited to 62 bits");
    if bits <= CHUNK_BITS {
        return gray_max_seq(bits, init, flip, value);
    }
    let chunk = 1u64 << CHUNK_BITS;
    let chunks = 1u64 << (bits - CHUNK_BITS);
    (0..chunks)
        .into_par_iter()
        .map(|c| scan(c * chunk, (c + 1) * chunk, &init, &flip, &value))
        .reduce(|| NONE, better)
}

fn scan<S, I, F, V>(start: u64, end: u64, init: &I, flip: &F, value: &V) -> (f64, u64)
where
    I: Fn(u64) -> S,
    F: Fn(&mut S, usize, bool),
    V: Fn(&S) -> f64,
{
    let mut mask = gray(start);
    let mut state = init(mask);
    let mut best = (value(&state), mask);
    for g in start + 1..end {
        let j = g.trailing_zeros() as usize;
        mask ^= 1 << j;
        flip(&mut state, j, mask >> j & 1 == 1);
        best = better(best, (value(&state), mask));
    }
    best
}

/// `+1` / `-1` for bit `j` of `mask`.
#[inline]
pub(crate) fn sign_of(mask: u64, j: usize) -> f64 {
    if mask >> j & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_every_mask_and_breaks_ties_low() {
        // value = popcount of the mask, maximum unique at all-ones
        let r = gray_max(
            18,
            |m| m.count_ones() as f64,
            |s, _, neg| *s += if neg { 1.0 } else { -1.0 },
            |s| *s,
        );
        assert_eq!(r, (18.0, (1 << 18) - 1));
        // constant value: lowest mask
        let r = gray_max(18, |_| 0.0, |_, _, _| {}, |s| *s);
        assert_eq!(r, (0.0, 0));
    }

    #[test]
    fn parallel_matches_sequential() {
        let w: Vec<f64> = (0..20).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let init = |m: u64| (0..20).map(|j| sign_of(m, j) * w[j]).sum::<f64>();
        let flip = |s: &mut f64, j: usize, neg: bool| *s += if neg { -2.0 * w[j] } else { 2.0 * w[j] };
        let val = |s: &f64| -(s - 3.0).abs();
        assert_eq!(gray_max(20, init, flip, val), gray_max_seq(20, init, flip, val));
    }
}
