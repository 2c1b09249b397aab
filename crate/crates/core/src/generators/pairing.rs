//! Random regular pairings with local rejection.
//!
//! Stubs are shuffled and paired. Pairs that would create a self-loop, a
//! parallel edge or a forbidden pair go back to a pool that is reshuffled and
//! re-paired; when the pool stops shrinking, each leftover pair is absorbed by
//! a switch with a random existing edge. If that fails too, the attempt is
//! discarded and a fresh stream keyed by `(seed, attempt)` is used.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

const MAX_ATTEMPTS: u64 = 16;
const STALL_ROUNDS: usize = 3;
const MAX_ROUNDS: usize = 100_000;
const SWITCH_TRIES: usize = 100_000;
const EMPTY: u32 = u32::MAX;

/// Fixed-width adjacency: vertex `v` owns `slots[v*d..(v+1)*d]`, of which the
/// first `fill[v]` entries are its sorted neighbors.
struct Slots<F> {
    d: usize,
    slots: Vec<u32>,
    fill: Vec<u32>,
    forbid: F,
}

impl<F: Fn(u32, u32) -> bool> Slots<F> {
    #[inline]
    fn list(&self, v: u32) -> &[u32] {
        let start = v as usize * self.d;
        &self.slots[start..start + self.fill[v as usize] as usize]
    }

    #[inline]
    fn adjacent(&self, a: u32, b: u32) -> bool {
        self.list(a).binary_search(&b).is_ok()
    }

    #[inline]
    fn can_join(&self, a: u32, b: u32) -> bool {
        a != b
            && (self.fill[a as usize] as usize) < self.d
            && (self.fill[b as usize] as usize) < self.d
            && !(self.forbid)(a, b)
            && !self.adjacent(a, b)
    }

    fn insert_half(&mut self, a: u32, b: u32) {
        let start = a as usize * self.d;
        let len = self.fill[a as usize] as usize;
        let region = &mut self.slots[start..start + len + 1];
        let pos = region[..len].partition_point(|&x| x < b);
        region.copy_within(pos..len, pos + 1);
        region[pos] = b;
        self.fill[a as usize] += 1;
    }

    fn remove_half(&mut self, a: u32, b: u32) {
        let start = a as usize * self.d;
        let len = self.fill[a as usize] as usize;
        let region = &mut self.slots[start..start + len];
        let pos = region.binary_search(&b).expect("edge present");
        region.copy_within(pos + 1..len, pos);
        region[len - 1] = EMPTY;
        self.fill[a as usize] -= 1;
    }

    fn join(&mut self, a: u32, b: u32) {
        self.insert_half(a, b);
        self.insert_half(b, a);
    }

    fn cut(&mut self, a: u32, b: u32) {
        self.remove_half(a, b);
        self.remove_half(b, a);
    }

    /// Replaces a random edge `{x, y}` by `{a, x}` and `{b, y}`.
    fn switch_in(&mut self, a: u32, b: u32, rng: &mut ChaCha8Rng) -> bool {
        let n = self.fill.len() as u32;
        for _ in 0..SWITCH_TRIES {
            let x = rng.gen_range(0..n);
            let deg = self.fill[x as usize];
            if deg == 0 {
                continue;
            }
            let y = self.list(x)[rng.gen_range(0..deg) as usize];
            if x == a || x == b || y == a || y == b {
                continue;
            }
            self.cut(x, y);
            if self.can_join(a, x) {
                self.join(a, x);
                if self.can_join(b, y) {
                    self.join(b, y);
                    return true;
                }
                self.cut(a, x);
            }
            self.join(x, y);
        }
        false
    }
}

/// Samples a simple `d`-regular graph on `n` vertices avoiding every pair for
/// which `forbid` returns `true`. Returns the fixed-width sorted adjacency
/// array (`n * d` entries).
pub(crate) fn regular_pairing<F>(n: usize, d: usize, seed: u64, forbid: F) -> Result<Vec<u32>>
where
    F: Fn(u32, u32) -> bool + Copy,
{
    if d >= n.max(1) && d > 0 {
        return Err(Error::invalid(format!("degree {d} must be below n = {n}")));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::invalid(format!("n * d = {n} * {d} is odd")));
    }
    if n > u32::MAX as usize - 1 {
        return Err(Error::invalid("too many vertices"));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream_rng(derive_seed(seed, attempt), 0);
        if let Some(slots) = try_pairing(n, d, &mut rng, forbid) {
            return Ok(slots);
        }
    }
    Err(Error::Budget(format!(
        "no simple {d}-regular pairing on {n} vertices after {MAX_ATTEMPTS} attempts"
    )))
}

fn try_pairing<F>(n: usize, d: usize, rng: &mut ChaCha8Rng, forbid: F) -> Option<Vec<u32>>
where
    F: Fn(u32, u32) -> bool + Copy,
{
    let mut s = Slots {
        d,
        slots: vec![EMPTY; n * d],
        fill: vec![0u32; n],
        forbid,
    };
    let mut pool: Vec<u32> = Vec::new();
    {
        let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
        for v in 0..n as u32 {
            stubs.extend(std::iter::repeat(v).take(d));
        }
        stubs.shuffle(rng);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || forbid(a, b) {
                pool.extend_from_slice(pair);
            } else {
                for (x, y) in [(a, b), (b, a)] {
                    s.slots[x as usize * d + s.fill[x as usize] as usize] = y;
                    s.fill[x as usize] += 1;
                }
            }
        }
    }

    // Sort each list and strip parallel edges; every extra copy of {u, v}
    // returns one stub to each endpoint.
    for u in 0..n {
        let len = s.fill[u] as usize;
        let list = &mut s.slots[u * d..u * d + len];
        list.sort_unstable();
        let mut write = 0;
        for read in 0..len {
            if write > 0 && list[read] == list[write - 1] {
                if (list[read] as usize) > u {
                    pool.push(u as u32);
                    pool.push(list[read]);
                }
                continue;
            }
            list[write] = list[read];
            write += 1;
        }
        for slot in &mut list[write..] {
            *slot = EMPTY;
        }
        s.fill[u] = write as u32;
    }

    let mut stalls = 0;
    let mut rounds = 0;
    while !pool.is_empty() {
        rounds += 1;
        if rounds > MAX_ROUNDS {
            return None;
        }
        pool.shuffle(rng);
        let before = pool.len();
        let mut rest = Vec::new();
        for pair in pool.chunks_exact(2) {
            if s.can_join(pair[0], pair[1]) {
                s.join(pair[0], pair[1]);
            } else {
                rest.extend_from_slice(pair);
            }
        }
        pool = rest;
        if pool.len() < before {
            stalls = 0;
            continue;
        }
        stalls += 1;
        if stalls >= STALL_ROUNDS {
            for pair in std::mem::take(&mut pool).chunks_exact(2) {
                if s.can_join(pair[0], pair[1]) {
                    s.join(pair[0], pair[1]);
                } else if !s.switch_in(pair[0], pair[1], rng) {
                    return None;
                }
            }
        }
    }
    debug_assert!(s.fill.iter().all(|&f| f as usize == d));
    Some(s.slots)
}
